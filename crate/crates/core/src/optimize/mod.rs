//! Local search over symmetric (orbit-shared) strategy profiles.
//!
//! A symmetric profile is stored as one probability vector per orbit. Both
//! optimizers climb the common payoff `EU(expand(shared))`; the replicator
//! follows the evolutionary dynamic, the gradient method takes projected steps
//! with backtracking.

mod gradient;
mod replicator;
mod simplex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Game, StrategyProfile};
use crate::rng;
use crate::symmetry::{expand_unchecked, OrbitPartition};

pub use gradient::{run_projected_gradient, run_projected_gradient_observed};
pub use replicator::{replicator_step, run_replicator, run_replicator_observed};
pub use simplex::{project_simplex, random_simplex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Replicator,
    Gradient,
}

impl Method {
    pub const BOTH: [Method; 2] = [Method::Replicator, Method::Gradient];

    /// Stable code used to derive per-run random streams.
    fn stream_code(self) -> u64 {
        match self {
            Method::Replicator => 0,
            Method::Gradient => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Replicator => "replicator",
            Method::Gradient => "gradient",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "replicator" => Ok(Method::Replicator),
            "gradient" => Ok(Method::Gradient),
            other => Err(Error::InvalidArgument(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    /// Initial step. For the replicator this multiplies fitness normalized by
    /// the payoff span; for the gradient method it is the first trial step.
    pub step_size: f64,
    pub max_iters: usize,
    /// Stop once the max-norm of an update falls below this.
    pub convergence_tol: f64,
    /// Runs per method in [`best_of_runs`].
    pub restarts: usize,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            step_size: 1.0,
            max_iters: 10_000,
            convergence_tol: 1e-10,
            restarts: 10,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(Error::InvalidArgument(format!("step_size must be positive, got {}", self.step_size)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be at least 1".into()));
        }
        if self.convergence_tol.is_nan() || self.convergence_tol < 0.0 {
            return Err(Error::InvalidArgument("convergence_tol must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Outcome of one local search run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptRun {
    pub method: Method,
    /// One strategy per orbit, in partition order.
    pub final_shared: Vec<Vec<f64>>,
    pub expected_utility: f64,
    pub iterations_used: usize,
    pub converged: bool,
    /// `max_O [max_a f_O(a) − Σ_a s_O(a) f_O(a)]` with `f_O` the orbit-mean
    /// deviation payoff; zero exactly at first-order stationary points.
    pub kkt_residual: f64,
}

impl OptRun {
    pub fn profile(&self, partition: &OrbitPartition) -> StrategyProfile {
        expand_unchecked(&self.final_shared, partition)
    }

    /// Largest probability on any single action is at least `1 − threshold` for every orbit.
    pub fn is_pure(&self, threshold: f64) -> bool {
        self.final_shared
            .iter()
            .all(|s| s.iter().copied().fold(0.0, f64::max) >= 1.0 - threshold)
    }
}

/// A common-payoff game viewed through an orbit partition.
pub(crate) struct SymmetricProblem<'a> {
    game: &'a Game,
    table: &'a [f64],
    partition: &'a OrbitPartition,
    dims: Vec<usize>,
    span: f64,
}

pub(crate) struct Evaluation {
    pub value: f64,
    /// `[orbit][action]`: sum over orbit members of the deviation payoff.
    pub gradient: Vec<Vec<f64>>,
}

impl<'a> SymmetricProblem<'a> {
    pub fn new(game: &'a Game, partition: &'a OrbitPartition) -> Result<Self> {
        let table = game.common_table()?;
        let dims = partition.orbit_action_counts(game)?;
        Ok(SymmetricProblem {
            game,
            table,
            partition,
            dims,
            span: game.payoff_span(),
        })
    }

    pub fn check_shared(&self, shared: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        if shared.len() != self.dims.len() {
            return Err(Error::InvalidArgument(format!(
                "{} shared strategies for {} orbits",
                shared.len(),
                self.dims.len()
            )));
        }
        shared
            .iter()
            .zip(&self.dims)
            .enumerate()
            .map(|(k, (s, &d))| {
                let player = self.partition.orbits()[k][0];
                if s.len() != d {
                    return Err(Error::DimensionMismatch {
                        player,
                        expected: d,
                        actual: s.len(),
                    });
                }
                crate::game::normalize_strategy(player, s.clone())
            })
            .collect()
    }

    pub fn span(&self) -> f64 {
        self.span
    }

    /// Orbits whose simplex has more than one point.
    pub fn free_orbits(&self) -> impl Iterator<Item = usize> + '_ {
        self.dims.iter().enumerate().filter(|(_, &d)| d > 1).map(|(k, _)| k)
    }

    pub fn orbit_size(&self, k: usize) -> usize {
        self.partition.orbits()[k].len()
    }

    pub fn value(&self, shared: &[Vec<f64>]) -> f64 {
        let profile = expand_unchecked(shared, self.partition);
        self.game.common_value_unchecked(self.table, &profile)
    }

    pub fn evaluate(&self, shared: &[Vec<f64>]) -> Evaluation {
        let profile = expand_unchecked(shared, self.partition);
        let deviations = self.game.deviation_table(&profile);
        let value = deviations[0].iter().zip(profile.strategy(0)).map(|(d, p)| d * p).sum();
        let gradient = self
            .partition
            .orbits()
            .iter()
            .zip(&self.dims)
            .map(|(orbit, &d)| {
                let mut g = vec![0.0; d];
                for &i in orbit {
                    for (ga, da) in g.iter_mut().zip(&deviations[i]) {
                        *ga += da;
                    }
                }
                g
            })
            .collect();
        Evaluation { value, gradient }
    }

    /// Orbit-mean deviation payoff for orbit `k`.
    pub fn fitness(&self, eval: &Evaluation, k: usize) -> Vec<f64> {
        let size = self.orbit_size(k) as f64;
        eval.gradient[k].iter().map(|g| g / size).collect()
    }

    pub fn kkt_residual(&self, shared: &[Vec<f64>], eval: &Evaluation) -> f64 {
        self.free_orbits()
            .map(|k| {
                let f = self.fitness(eval, k);
                let best = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let mean: f64 = f.iter().zip(&shared[k]).map(|(x, p)| x * p).sum();
                (best - mean).max(0.0)
            })
            .fold(0.0, f64::max)
    }

    pub fn finish(&self, method: Method, shared: Vec<Vec<f64>>, iterations_used: usize, converged: bool) -> OptRun {
        let eval = self.evaluate(&shared);
        OptRun {
            method,
            expected_utility: eval.value,
            kkt_residual: self.kkt_residual(&shared, &eval),
            final_shared: shared,
            iterations_used,
            converged,
        }
    }
}

pub(crate) fn max_abs_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// `∂EU/∂shared_O(a)`: the sum over members of orbit `O` of their deviation payoff for `a`.
pub fn symmetric_gradient(game: &Game, partition: &OrbitPartition, shared: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let problem = SymmetricProblem::new(game, partition)?;
    let shared = problem.check_shared(shared)?;
    Ok(problem.evaluate(&shared).gradient)
}

/// First-order optimality residual of a symmetric point; see [`OptRun::kkt_residual`].
pub fn kkt_residual(game: &Game, partition: &OrbitPartition, shared: &[Vec<f64>]) -> Result<f64> {
    let problem = SymmetricProblem::new(game, partition)?;
    let shared = problem.check_shared(shared)?;
    let eval = problem.evaluate(&shared);
    Ok(problem.kkt_residual(&shared, &eval))
}

/// A uniformly random point for every orbit.
pub fn random_shared(game: &Game, partition: &OrbitPartition, rng: &mut impl rand_core::RngCore) -> Result<Vec<Vec<f64>>> {
    Ok(partition
        .orbit_action_counts(game)?
        .into_iter()
        .map(|d| random_simplex(d, rng))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BestOfRuns {
    pub best: OptRun,
    /// Position of `best` in `runs`.
    pub best_index: usize,
    /// Every run, grouped by method in the order requested, then by run index.
    pub runs: Vec<OptRun>,
}

impl BestOfRuns {
    pub fn runs_of(&self, method: Method) -> impl Iterator<Item = &OptRun> {
        self.runs.iter().filter(move |r| r.method == method)
    }
}

/// Seed stream for run `run` of `method` under master `seed`.
pub fn run_stream(seed: u64, method: Method, run: usize) -> rng::StreamRng {
    rng::stream(seed, (method.stream_code() << 32) | run as u64)
}

pub fn run_method(
    game: &Game,
    partition: &OrbitPartition,
    init: &[Vec<f64>],
    config: &OptimizerConfig,
    method: Method,
) -> Result<OptRun> {
    match method {
        Method::Replicator => run_replicator(game, partition, init, config),
        Method::Gradient => run_projected_gradient(game, partition, init, config),
    }
}

/// `config.restarts` independently initialized runs per method; the best run
/// has the highest expected utility, ties going to the earliest run.
pub fn best_of_runs(
    game: &Game,
    partition: &OrbitPartition,
    config: &OptimizerConfig,
    methods: &[Method],
) -> Result<BestOfRuns> {
    config.validate()?;
    if config.restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    if methods.is_empty() {
        return Err(Error::InvalidArgument("no optimization method selected".into()));
    }
    let tasks: Vec<(Method, usize)> = methods
        .iter()
        .flat_map(|&m| (0..config.restarts).map(move |r| (m, r)))
        .collect();
    let runs = tasks
        .par_iter()
        .map(|&(method, run)| {
            let init = random_shared(game, partition, &mut run_stream(config.seed, method, run))?;
            run_method(game, partition, &init, config, method)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best_index = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.expected_utility > runs[best_index].expected_utility {
            best_index = i;
        }
    }
    Ok(BestOfRuns {
        best: runs[best_index].clone(),
        best_index,
        runs,
    })
}
