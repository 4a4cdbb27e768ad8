//! Projected-gradient ascent with backtracking on orbit-shared strategies.

use super::{max_abs_diff, project_simplex, Method, OptRun, OptimizerConfig, SymmetricProblem};
use crate::error::Result;
use crate::game::Game;
use crate::symmetry::OrbitPartition;

const MIN_STEP: f64 = 1e-40;
/// Armijo constant: a step must gain this fraction of its first-order prediction.
const SUFFICIENT_INCREASE: f64 = 1e-4;

pub fn run_projected_gradient(
    game: &Game,
    partition: &OrbitPartition,
    init: &[Vec<f64>],
    config: &OptimizerConfig,
) -> Result<OptRun> {
    run_projected_gradient_observed(game, partition, init, config, |_, _| {})
}

/// Like [`run_projected_gradient`], calling `observe(iterate, expected_utility)`
/// on the initial point and every accepted iterate.
///
/// Gradients are divided by the payoff span so the step scale does not depend
/// on payoff units. A trial step is halved until it gains at least a small
/// fraction of the first-order prediction `⟨∇EU, x' − x⟩` (never negative after
/// projection). Every iteration starts again from `config.step_size`.
pub fn run_projected_gradient_observed(
    game: &Game,
    partition: &OrbitPartition,
    init: &[Vec<f64>],
    config: &OptimizerConfig,
    mut observe: impl FnMut(&[Vec<f64>], f64),
) -> Result<OptRun> {
    config.validate()?;
    let problem = SymmetricProblem::new(game, partition)?;
    let mut shared = problem.check_shared(init)?;
    let span = problem.span();
    let mut eval = problem.evaluate(&shared);
    observe(&shared, eval.value);
    if span == 0.0 {
        return Ok(problem.finish(Method::Gradient, shared, 0, true));
    }

    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.max_iters {
        iterations += 1;
        let mut h = config.step_size;
        let accepted = loop {
            let candidate: Vec<Vec<f64>> = shared
                .iter()
                .zip(&eval.gradient)
                .map(|(s, g)| {
                    if s.len() < 2 {
                        return s.clone();
                    }
                    let moved: Vec<f64> = s.iter().zip(g).map(|(p, d)| p + h * d / span).collect();
                    project_simplex(&moved)
                })
                .collect();
            let value = problem.value(&candidate);
            let predicted: f64 = candidate
                .iter()
                .flatten()
                .zip(shared.iter().flatten())
                .zip(eval.gradient.iter().flatten())
                .map(|((c, s), g)| g * (c - s))
                .sum();
            if value >= eval.value && value - eval.value >= SUFFICIENT_INCREASE * predicted {
                break Some(candidate);
            }
            h /= 2.0;
            if h < MIN_STEP {
                break None;
            }
        };
        let Some(next) = accepted else {
            // no ascent step exists at floating-point resolution
            converged = true;
            break;
        };
        let moved = max_abs_diff(&next, &shared);
        shared = next;
        eval = problem.evaluate(&shared);
        observe(&shared, eval.value);
        if moved < config.convergence_tol {
            converged = true;
            break;
        }
    }
    Ok(problem.finish(Method::Gradient, shared, iterations, converged))
}
