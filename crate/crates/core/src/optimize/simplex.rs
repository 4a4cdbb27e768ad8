use rand_core::RngCore;

use crate::rng;

/// Euclidean projection onto the probability simplex (sort-based, exact).
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - 1.0) / (j + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    let mut x: Vec<f64> = v.iter().map(|&u| (u - theta).max(0.0)).collect();
    // clean residual rounding so the result sums to 1
    let total: f64 = x.iter().sum();
    x.iter_mut().for_each(|p| *p /= total);
    x
}

/// Uniform sample from the simplex of dimension `dim` (flat Dirichlet):
/// normalized unit-rate exponentials.
pub fn random_simplex(dim: usize, rng: &mut impl RngCore) -> Vec<f64> {
    assert!(dim >= 1, "simplex dimension must be at least 1");
    if dim == 1 {
        return vec![1.0];
    }
    let draws: Vec<f64> = (0..dim).map(|_| rng::exponential(rng)).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|x| x / total).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_examples() {
        assert_eq!(project_simplex(&[0.3, 0.7]), vec![0.3, 0.7]);
        assert_eq!(project_simplex(&[2.0, 0.0]), vec![1.0, 0.0]);
        let p = project_simplex(&[0.6, 0.6]);
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
        let p = project_simplex(&[-1.0, 0.5, 0.9]);
        assert_eq!(p[0], 0.0);
        assert!((p[1] - 0.3).abs() < 1e-12 && (p[2] - 0.7).abs() < 1e-12);
    }

    #[test]
    fn simplex_sample_basics() {
        let mut r = rng::stream(5, 0);
        assert_eq!(random_simplex(1, &mut r), vec![1.0]);
        for dim in 2..6 {
            let s = random_simplex(dim, &mut r);
            assert_eq!(s.len(), dim);
            assert!(s.iter().all(|&p| p >= 0.0));
            assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
