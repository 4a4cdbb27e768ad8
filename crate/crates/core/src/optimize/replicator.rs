//! Discrete-time replicator dynamic on orbit-shared strategies.
//!
//! Each orbit is a population; the fitness of action `a` is the orbit-mean
//! payoff of deviating to `a`. Fitness advantages are divided by the game's
//! payoff span, so a step of 1 keeps every coordinate nonnegative.

use super::{max_abs_diff, Method, OptRun, OptimizerConfig, SymmetricProblem};
use crate::error::Result;
use crate::game::Game;
use crate::symmetry::OrbitPartition;

/// Smallest step tried before giving up on an update.
const MIN_STEP: f64 = 1e-30;

fn step_from(problem: &SymmetricProblem, shared: &[Vec<f64>], eval: &super::Evaluation, step: f64) -> Vec<Vec<f64>> {
    let span = problem.span();
    if span == 0.0 {
        return shared.to_vec();
    }
    let advantages: Vec<Option<Vec<f64>>> = (0..shared.len())
        .map(|k| {
            if shared[k].len() < 2 {
                return None;
            }
            let f = problem.fitness(eval, k);
            let mean: f64 = f.iter().zip(&shared[k]).map(|(x, p)| x * p).sum();
            Some(f.iter().map(|x| (x - mean) / span).collect())
        })
        .collect();

    let mut h = step;
    loop {
        let next: Vec<Vec<f64>> = shared
            .iter()
            .zip(&advantages)
            .map(|(s, adv)| match adv {
                None => s.clone(),
                Some(adv) => s.iter().zip(adv).map(|(p, r)| p * (1.0 + h * r)).collect(),
            })
            .collect();
        if next.iter().flatten().all(|&p| p >= 0.0) || h < MIN_STEP {
            return next
                .into_iter()
                .map(|mut s| {
                    s.iter_mut().for_each(|p| *p = p.max(0.0));
                    let total: f64 = s.iter().sum();
                    s.iter_mut().for_each(|p| *p /= total);
                    s
                })
                .collect();
        }
        h /= 2.0;
    }
}

/// One Euler step of the replicator dynamic, renormalized onto the simplex.
pub fn replicator_step(
    game: &Game,
    partition: &OrbitPartition,
    shared: &[Vec<f64>],
    step: f64,
) -> Result<Vec<Vec<f64>>> {
    let problem = SymmetricProblem::new(game, partition)?;
    let shared = problem.check_shared(shared)?;
    let eval = problem.evaluate(&shared);
    Ok(step_from(&problem, &shared, &eval, step))
}

pub fn run_replicator(
    game: &Game,
    partition: &OrbitPartition,
    init: &[Vec<f64>],
    config: &OptimizerConfig,
) -> Result<OptRun> {
    run_replicator_observed(game, partition, init, config, |_, _| {})
}

/// Like [`run_replicator`], calling `observe(iterate, expected_utility)` on the
/// initial point and after every step.
pub fn run_replicator_observed(
    game: &Game,
    partition: &OrbitPartition,
    init: &[Vec<f64>],
    config: &OptimizerConfig,
    mut observe: impl FnMut(&[Vec<f64>], f64),
) -> Result<OptRun> {
    config.validate()?;
    let problem = SymmetricProblem::new(game, partition)?;
    let mut shared = problem.check_shared(init)?;
    let mut eval = problem.evaluate(&shared);
    observe(&shared, eval.value);
    let mut converged = false;
    let mut iterations = 0;
    while iterations < config.max_iters {
        let next = step_from(&problem, &shared, &eval, config.step_size);
        iterations += 1;
        let moved = max_abs_diff(&next, &shared);
        shared = next;
        eval = problem.evaluate(&shared);
        observe(&shared, eval.value);
        if moved < config.convergence_tol {
            converged = true;
            break;
        }
    }
    Ok(problem.finish(Method::Replicator, shared, iterations, converged))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn fixed_points() {
        let g = fixtures::taxi_identical();
        let one = OrbitPartition::single(2);
        assert_eq!(replicator_step(&g, &one, &[vec![0.5, 0.5]], 1.0).unwrap(), vec![vec![0.5, 0.5]]);
        assert_eq!(replicator_step(&g, &one, &[vec![1.0, 0.0]], 1.0).unwrap(), vec![vec![1.0, 0.0]]);
        let d = fixtures::degenerate_3x3(0.1);
        assert_eq!(
            replicator_step(&d, &one, &[vec![0.0, 1.0, 0.0]], 1.0).unwrap(),
            vec![vec![0.0, 1.0, 0.0]]
        );
    }

    #[test]
    fn moves_toward_interior_optimum() {
        let g = fixtures::taxi_identical();
        let next = replicator_step(&g, &OrbitPartition::single(2), &[vec![0.4, 0.6]], 1.0).unwrap();
        // fitness H = 1.6, W = 1.4, mean 1.48, span 1: 0.4 · 1.12
        assert!((next[0][0] - 0.448).abs() < 1e-12);
        assert!((next[0][0] - 0.5).abs() < 0.1);
    }

    #[test]
    fn converges_on_taxi() {
        let g = fixtures::taxi_identical();
        let run = run_replicator(&g, &OrbitPartition::single(2), &[vec![0.4, 0.6]], &OptimizerConfig::default()).unwrap();
        assert!(run.converged);
        assert!((run.final_shared[0][0] - 0.5).abs() < 1e-6);
        assert!((run.expected_utility - 1.5).abs() < 1e-12);
    }

    #[test]
    fn single_action_orbits_are_skipped() {
        let g = crate::game::make_common_payoff_game(2, &[1, 2], vec![0.0, 1.0]).unwrap();
        let parts = OrbitPartition::singletons(2);
        let run = run_replicator(&g, &parts, &[vec![1.0], vec![0.5, 0.5]], &OptimizerConfig::default()).unwrap();
        assert_eq!(run.final_shared[0], vec![1.0]);
        assert!(run.final_shared[1][1] > 1.0 - 1e-8);
    }
}
