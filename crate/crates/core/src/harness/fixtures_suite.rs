//! Machine-checked worked examples.

use serde::Serialize;

use crate::analysis::{self, EquilibriumTol, Verdict};
use crate::error::Result;
use crate::fixtures::{self, veil, HOME, WORK};
use crate::game::{expected_utility, Game, PureProfile, StrategyProfile};
use crate::optimize::{self, best_of_runs, run_projected_gradient, run_replicator, Method, OptimizerConfig};
use crate::rng;
use crate::symmetry::{expand_symmetric, is_symmetry, OrbitPartition, Permutation};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub fixture: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct FixtureReport {
    pub checks: Vec<Check>,
}

impl FixtureReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

struct Recorder<'a> {
    fixture: &'static str,
    checks: &'a mut Vec<Check>,
}

impl Recorder<'_> {
    fn truth(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check {
            fixture: self.fixture,
            name: name.to_string(),
            passed,
            detail,
        });
    }

    fn close(&mut self, name: &str, actual: f64, expected: f64, tol: f64) {
        let passed = (actual - expected).abs() <= tol;
        self.truth(name, passed, format!("expected {expected} ± {tol:e}, got {actual}"));
    }

    fn at_most(&mut self, name: &str, actual: f64, bound: f64) {
        self.truth(name, actual <= bound, format!("expected ≤ {bound:e}, got {actual:e}"));
    }

    fn equal<T: PartialEq + std::fmt::Debug>(&mut self, name: &str, actual: T, expected: T) {
        let detail = format!("expected {expected:?}, got {actual:?}");
        self.truth(name, actual == expected, detail);
    }
}

fn eu(game: &Game, profile: &StrategyProfile) -> Result<f64> {
    Ok(expected_utility(game, profile)?[0])
}

fn pure(game: &Game, actions: &[usize]) -> Result<StrategyProfile> {
    Ok(PureProfile::new(game, actions.to_vec())?.to_mixed(game))
}

fn pair(p: f64, q: f64) -> Result<StrategyProfile> {
    StrategyProfile::new(vec![vec![p, 1.0 - p], vec![q, 1.0 - q]])
}

fn taxi_permits(r: &mut Recorder) -> Result<()> {
    let g = fixtures::taxi_permits();
    r.equal("EU(W,H)", eu(&g, &pure(&g, &[WORK, HOME])?)?, 2.0);
    r.equal("swap is not a symmetry", is_symmetry(&g, &Permutation::transposition(2, 0, 1)), false);
    Ok(())
}

fn taxi_identical(r: &mut Recorder) -> Result<()> {
    let g = fixtures::taxi_identical();
    let half = pair(0.5, 0.5)?;
    r.close("EU at (0.5, 0.5)", eu(&g, &half)?, 1.5, 1e-12);
    let best = best_of_runs(&g, &OrbitPartition::single(2), &OptimizerConfig::default(), &Method::BOTH)?;
    r.close("best symmetric EU", best.best.expected_utility, 1.5, 1e-9);
    r.close("best symmetric p", best.best.final_shared[0][0], 0.5, 1e-6);
    r.equal("exploitability at (0.5, 0.5)", analysis::exploitability(&g, &half)?, 0.0);
    r.equal(
        "verdict at (0.5, 0.5)",
        analysis::stability_verdict(&g, &half, EquilibriumTol::exact())?,
        Verdict::Unstable,
    );
    let drop = analysis::worst_case_perturbation_decrease(&g, &half, EquilibriumTol::exact(), &mut rng::stream(0, 0))?;
    r.close("perturbation decrease %", drop.decrease_pct.unwrap_or(f64::NAN), 100.0 / 3.0, 1e-9);
    Ok(())
}

fn taxi_both_needed(r: &mut Recorder) -> Result<()> {
    let g = fixtures::taxi_both_needed();
    r.equal("exploitability at (0.5, 0.5)", analysis::exploitability(&g, &pair(0.5, 0.5)?)?, 0.0);
    for p in [0.1, 0.3, 0.49, 0.51, 0.7, 0.9] {
        let run = run_projected_gradient(&g, &OrbitPartition::single(2), &[vec![p, 1.0 - p]], &OptimizerConfig::default())?;
        r.truth(
            &format!("gradient from p={p} reaches a pure profile"),
            run.is_pure(1e-9),
            format!("final {:?}", run.final_shared[0]),
        );
        r.close(&format!("gradient from p={p} EU"), run.expected_utility, 1.0, 1e-9);
    }
    Ok(())
}

fn ten_robots(r: &mut Recorder) -> Result<()> {
    let g = fixtures::ten_robots(0.5);
    let all_a = pure(&g, &[0; 10])?;
    r.equal("EU(all a)", eu(&g, &all_a)?, 1.0);
    r.equal("exploitability(all a)", analysis::exploitability(&g, &all_a)?, 0.0);
    r.equal(
        "verdict(all a)",
        analysis::stability_verdict(&g, &all_a, EquilibriumTol::exact())?,
        Verdict::Stable,
    );
    let found = analysis::asym_local_search_oracle(&g, &all_a, 0.01, 2_000, &mut rng::stream(0, 0))?;
    r.equal("oracle finds no improvement", found.is_none(), true);
    Ok(())
}

fn degenerate(r: &mut Recorder) -> Result<()> {
    let g = fixtures::degenerate_3x3(0.1);
    let aa = pure(&g, &[0, 0])?;
    let best = best_of_runs(&g, &OrbitPartition::single(2), &OptimizerConfig::default(), &Method::BOTH)?;
    r.close("best symmetric EU", best.best.expected_utility, 1.0, 1e-9);
    r.truth(
        "best symmetric play is a",
        best.best.final_shared[0][0] >= 1.0 - 1e-6,
        format!("final {:?}", best.best.final_shared[0]),
    );
    r.equal(
        "degenerate at (a, a)",
        analysis::is_degenerate_equilibrium(&g, &aa, EquilibriumTol::exact())?,
        true,
    );
    r.equal(
        "verdict at (a, a)",
        analysis::stability_verdict(&g, &aa, EquilibriumTol::exact())?,
        Verdict::UnknownDegenerate,
    );
    let found = analysis::asym_local_search_oracle(&g, &aa, 0.05, 1_000, &mut rng::stream(0, 0))?;
    r.equal("oracle finds an improvement", found.is_some(), true);
    Ok(())
}

pub const BUTLER_DRINK: f64 = 2.0 - std::f64::consts::SQRT_2;
pub const BUTLER_EU: f64 = 4.0 * (std::f64::consts::SQRT_2 - 1.0);

fn robot_butler(r: &mut Recorder) -> Result<()> {
    let g = fixtures::robot_butler();
    let one = OrbitPartition::single(4);
    let run = run_replicator(&g, &one, &[vec![0.5, 0.5]], &OptimizerConfig::default())?;
    r.close("drink probability", run.final_shared[0][fixtures::DRINK], BUTLER_DRINK, 1e-4);
    r.close("EU", run.expected_utility, BUTLER_EU, 1e-6);
    let profile = expand_symmetric(&run.final_shared, &one)?;
    r.at_most("exploitability", analysis::exploitability(&g, &profile)?, 1e-6);
    let best = best_of_runs(&g, &one, &OptimizerConfig::default(), &Method::BOTH)?;
    r.close("best of 20 EU", best.best.expected_utility, BUTLER_EU, 1e-6);
    Ok(())
}

/// Team payoff of two plans, computed by walking every type draw and every
/// fair coin flip that settles a cautious standoff.
pub fn veil_oracle(plans: [usize; 2]) -> f64 {
    let value = |kind: usize| if kind == veil::HIGH { 6.0 } else { 4.0 };
    let mut total = 0.0;
    for k0 in [veil::LOW, veil::HIGH] {
        for k1 in [veil::LOW, veil::HIGH] {
            let aggressive = [
                veil::action(plans[0], k0) == veil::AGGRESSIVE,
                veil::action(plans[1], k1) == veil::AGGRESSIVE,
            ];
            for coin in [0, 1] {
                let winner = match aggressive {
                    [true, true] => None,
                    [true, false] => Some(0),
                    [false, true] => Some(1),
                    [false, false] => Some(coin),
                };
                let gained = match winner {
                    None => 0.0,
                    Some(0) => value(k0),
                    Some(_) => value(k1),
                };
                total += 0.125 * gained;
            }
        }
    }
    total
}

/// Shared plan mix: low → cautious always, high → aggressive with probability 1/6.
pub fn veil_optimum() -> Vec<f64> {
    let mut x = vec![0.0; 4];
    x[veil::plan(veil::CAUTIOUS, veil::CAUTIOUS)] = 5.0 / 6.0;
    x[veil::plan(veil::CAUTIOUS, veil::AGGRESSIVE)] = 1.0 / 6.0;
    x
}

/// Expected team payoff of the exact optimum under this game's rules.
pub const VEIL_OPTIMUM_EU: f64 = 121.0 / 24.0;
pub const VEIL_ASYMMETRIC_EU: f64 = 21.0 / 4.0;

fn veil_of_ignorance(r: &mut Recorder) -> Result<()> {
    let g = veil::game();
    let table = g.common_table()?;
    let mismatches = (0..4)
        .flat_map(|a| (0..4).map(move |b| [a, b]))
        .filter(|&[a, b]| table[g.index_of(&[a, b])] != veil_oracle([a, b]))
        .count();
    r.equal("tensor entries match the coin-flip oracle", mismatches, 0);

    let one = OrbitPartition::single(2);
    let best = best_of_runs(&g, &one, &OptimizerConfig::default(), &Method::BOTH)?;
    let target = veil_optimum();
    let gap = optimize_gap(&best.best.final_shared[0], &target);
    r.at_most("optimum plan mix", gap, 1e-4);

    let exact = expand_symmetric(&[target], &one)?;
    r.close("EU at the exact optimum", eu(&g, &exact)?, VEIL_OPTIMUM_EU, 1e-9);
    r.at_most("exploitability at the exact optimum", analysis::exploitability(&g, &exact)?, 1e-12);
    let bench = pure(
        &g,
        &[veil::plan(veil::CAUTIOUS, veil::AGGRESSIVE), veil::plan(veil::CAUTIOUS, veil::CAUTIOUS)],
    )?;
    r.equal("asymmetric benchmark EU", eu(&g, &bench)?, VEIL_ASYMMETRIC_EU);
    Ok(())
}

fn optimize_gap(a: &[f64], b: &[f64]) -> f64 {
    optimize::max_abs_diff(&[a.to_vec()], &[b.to_vec()])
}

type FixtureFn = fn(&mut Recorder) -> Result<()>;

pub const FIXTURE_NAMES: [&str; 7] = [
    "taxi-1a",
    "taxi-1b",
    "taxi-1c",
    "ten-robots",
    "degenerate-3x3",
    "robot-butler",
    "veil-of-ignorance",
];

const FIXTURES: [FixtureFn; 7] = [
    taxi_permits,
    taxi_identical,
    taxi_both_needed,
    ten_robots,
    degenerate,
    robot_butler,
    veil_of_ignorance,
];

/// Evaluates every fixture; an error inside a fixture is recorded as a failed check.
pub fn run_fixtures() -> FixtureReport {
    let mut checks = Vec::new();
    for (fixture, f) in FIXTURE_NAMES.into_iter().zip(FIXTURES) {
        let mut r = Recorder {
            fixture,
            checks: &mut checks,
        };
        if let Err(e) = f(&mut r) {
            r.truth("completed", false, e.to_string());
        }
    }
    FixtureReport { checks }
}
