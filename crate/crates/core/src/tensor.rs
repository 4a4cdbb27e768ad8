//! Contractions of a flat row-major payoff tensor against per-axis weight vectors.
//!
//! Axis 0 is the most significant digit of the flat index.

/// Contracts the last axis of `tensor` (shape `dims`) with `weights`.
fn contract_last(tensor: &[f64], last_dim: usize, weights: &[f64]) -> Vec<f64> {
    tensor
        .chunks_exact(last_dim)
        .map(|row| row.iter().zip(weights).map(|(u, w)| u * w).sum())
        .collect()
}

/// Contracts the first axis of `tensor` with `weights`.
fn contract_first(tensor: &[f64], first_dim: usize, weights: &[f64]) -> Vec<f64> {
    let rest = tensor.len() / first_dim;
    let mut out = vec![0.0; rest];
    for (a, &w) in weights.iter().enumerate().take(first_dim) {
        if w == 0.0 {
            continue;
        }
        let block = &tensor[a * rest..(a + 1) * rest];
        for (o, u) in out.iter_mut().zip(block) {
            *o += w * u;
        }
    }
    out
}

/// For every axis `i`, the vector obtained by contracting all axes except `i`.
///
/// Suffix contractions are shared across axes, so the total cost stays within a
/// small constant factor of the tensor size.
pub(crate) fn all_axis_marginals(tensor: &[f64], dims: &[usize], weights: &[&[f64]]) -> Vec<Vec<f64>> {
    let n = dims.len();
    debug_assert_eq!(weights.len(), n);
    // suffix[k] = tensor with axes k..n contracted; shape dims[..k]
    let mut suffix: Vec<Vec<f64>> = vec![Vec::new(); n + 1];
    suffix[n] = tensor.to_vec();
    for k in (1..n).rev() {
        suffix[k] = contract_last(&suffix[k + 1], dims[k], weights[k]);
    }
    (0..n)
        .map(|i| {
            let mut t = std::mem::take(&mut suffix[i + 1]);
            for j in 0..i {
                t = contract_first(&t, dims[j], weights[j]);
            }
            t
        })
        .collect()
}

/// For axis `i` only.
pub(crate) fn axis_marginal(tensor: &[f64], dims: &[usize], weights: &[&[f64]], axis: usize) -> Vec<f64> {
    let n = dims.len();
    let mut t = tensor.to_vec();
    for k in (axis + 1..n).rev() {
        t = contract_last(&t, dims[k], weights[k]);
    }
    for j in 0..axis {
        t = contract_first(&t, dims[j], weights[j]);
    }
    t
}

/// Full contraction: the multilinear form evaluated at `weights`.
pub(crate) fn full_contraction(tensor: &[f64], dims: &[usize], weights: &[&[f64]]) -> f64 {
    let last = dims.len() - 1;
    axis_marginal(tensor, dims, weights, last)
        .iter()
        .zip(weights[last])
        .map(|(u, w)| u * w)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn marginals_match_direct_sums() {
        // 2 x 3 x 2 tensor with distinct entries
        let dims = [2, 3, 2];
        let tensor: Vec<f64> = (0..12).map(|x| x as f64 * 1.5 - 4.0).collect();
        let w0 = [0.3, 0.7];
        let w1 = [0.2, 0.5, 0.3];
        let w2 = [0.6, 0.4];
        let weights: [&[f64]; 3] = [&w0, &w1, &w2];
        let marg = all_axis_marginals(&tensor, &dims, &weights);

        let mut direct = vec![vec![0.0; 2], vec![0.0; 3], vec![0.0; 2]];
        for a in 0..2 {
            for b in 0..3 {
                for c in 0..2 {
                    let u = tensor[a * 6 + b * 2 + c];
                    direct[0][a] += u * w1[b] * w2[c];
                    direct[1][b] += u * w0[a] * w2[c];
                    direct[2][c] += u * w0[a] * w1[b];
                }
            }
        }
        for (m, d) in marg.iter().zip(&direct) {
            for (x, y) in m.iter().zip(d) {
                assert!((x - y).abs() < 1e-12);
            }
        }
        for axis in 0..3 {
            assert_eq!(axis_marginal(&tensor, &dims, &weights, axis), marg[axis]);
        }
        let total: f64 = direct[0].iter().zip(&w0).map(|(x, w)| x * w).sum();
        assert!((full_contraction(&tensor, &dims, &weights) - total).abs() < 1e-12);
    }

    #[test]
    fn single_axis() {
        let t = [1.0, 2.0, 3.0];
        let w = [0.2, 0.3, 0.5];
        let weights: [&[f64]; 1] = [&w];
        assert_eq!(all_axis_marginals(&t, &[3], &weights), vec![t.to_vec()]);
        assert!((full_contraction(&t, &[3], &weights) - 2.3).abs() < 1e-15);
    }
}
