//! Equilibrium and stability checks on strategy profiles.

use rand_core::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{advance, best_response_set, point_mass, support_of, Game, StrategyProfile, SUPPORT_THRESHOLD};
use crate::rng;

/// Selections enumerated exactly by [`worst_case_perturbation_decrease`]; larger
/// best-response products are sampled.
pub const SELECTION_ENUMERATION_CAP: usize = 1_000_000;
pub const SELECTION_SAMPLES: usize = 100_000;
/// An oracle improvement must beat the base value by this much.
pub const ORACLE_MARGIN: f64 = 1e-9;
/// `|EU|` below this makes a percentage decrease meaningless.
pub const PERCENT_FLOOR: f64 = 1e-9;

/// Tolerances for equilibrium checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumTol {
    /// Largest exploitability accepted as an equilibrium.
    pub nash: f64,
    /// Payoff differences at or below this count as indifference.
    pub indifference: f64,
}

impl EquilibriumTol {
    /// For exact profiles such as hand-built fixtures.
    pub const fn exact() -> Self {
        EquilibriumTol {
            nash: 1e-9,
            indifference: 1e-9,
        }
    }

    /// For optimizer output, which carries first-order noise.
    pub const fn optimizer() -> Self {
        EquilibriumTol {
            nash: 1e-4,
            indifference: 1e-6,
        }
    }

    pub fn uniform(tol: f64) -> Self {
        EquilibriumTol {
            nash: tol,
            indifference: tol,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Stable,
    Unstable,
    UnknownDegenerate,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Stable => "stable",
            Verdict::Unstable => "unstable",
            Verdict::UnknownDegenerate => "unknown-degenerate",
        }
    }
}

/// `EU_i(s)` and the per-player table of deviation payoffs.
fn utilities(game: &Game, profile: &StrategyProfile) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    game.check_profile(profile)?;
    let deviations = game.deviation_table(profile);
    let values = deviations
        .iter()
        .zip(profile.strategies())
        .map(|(d, s)| d.iter().zip(s).map(|(x, p)| x * p).sum())
        .collect();
    Ok((values, deviations))
}

/// Largest gain any player gets from a unilateral pure deviation (never negative).
pub fn exploitability(game: &Game, profile: &StrategyProfile) -> Result<f64> {
    let (values, deviations) = utilities(game, profile)?;
    Ok(values
        .iter()
        .zip(&deviations)
        .map(|(v, d)| d.iter().map(|x| x - v).fold(0.0, f64::max))
        .fold(0.0, f64::max))
}

/// Every player's support, at probability `> threshold`, is a single action.
pub fn is_deterministic(profile: &StrategyProfile, threshold: f64) -> bool {
    profile
        .strategies()
        .iter()
        .all(|s| s.iter().filter(|&&p| p > threshold).count() == 1)
}

/// Moves every strategy whose largest probability is at least `1 − threshold`
/// onto that vertex.
pub fn snap_near_pure(profile: &StrategyProfile, threshold: f64) -> StrategyProfile {
    let strategies = profile
        .strategies()
        .iter()
        .map(|s| {
            let (arg, max) = s
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |acc, (a, &p)| if p > acc.1 { (a, p) } else { acc });
            if max >= 1.0 - threshold {
                point_mass(s.len(), arg)
            } else {
                s.clone()
            }
        })
        .collect();
    StrategyProfile::from_parts_unchecked(strategies)
}

fn require_equilibrium(game: &Game, profile: &StrategyProfile, tol: f64) -> Result<()> {
    let e = exploitability(game, profile)?;
    if e > tol {
        return Err(Error::NotAnEquilibrium { exploitability: e, tol });
    }
    Ok(())
}

/// Whether a Nash equilibrium is degenerate.
///
/// Pure profile: at least two players are indifferent between their action and
/// some other one. Mixed profile: for every player `i` and every pure `a_{-i}`
/// drawn from the others' supports, `u_i(·, a_{-i})` is constant on `supp(s_i)`.
pub fn is_degenerate_equilibrium(game: &Game, profile: &StrategyProfile, tol: EquilibriumTol) -> Result<bool> {
    require_equilibrium(game, profile, tol.nash)?;
    if is_deterministic(profile, SUPPORT_THRESHOLD) {
        let deviations = game.deviation_table(profile);
        let indifferent = profile
            .strategies()
            .iter()
            .zip(&deviations)
            .filter(|(s, d)| {
                let played = support_of(s)[0];
                d.iter()
                    .enumerate()
                    .any(|(a, &x)| a != played && (x - d[played]).abs() <= tol.indifference)
            })
            .count();
        return Ok(indifferent >= 2);
    }

    let supports: Vec<Vec<usize>> = profile.strategies().iter().map(|s| support_of(s)).collect();
    let n = game.players();
    for i in 0..n {
        if supports[i].len() < 2 {
            continue;
        }
        let table = game.table(i);
        let radices: Vec<usize> = supports.iter().map(Vec::len).collect();
        let mut others = radices.clone();
        others[i] = 1;
        let combos: usize = others.iter().product();
        let mut digits = vec![0; n];
        let mut actions = vec![0; n];
        for _ in 0..combos {
            for j in 0..n {
                actions[j] = supports[j][digits[j]];
            }
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for &a in &supports[i] {
                actions[i] = a;
                let u = table[game.index_of(&actions)];
                lo = lo.min(u);
                hi = hi.max(u);
            }
            if hi - lo > tol.indifference {
                return Ok(false);
            }
            advance(&mut digits, &others);
        }
    }
    Ok(true)
}

/// Whether an equilibrium is locally optimal among asymmetric profiles:
/// unknown when degenerate, otherwise stable exactly when deterministic.
pub fn stability_verdict(game: &Game, profile: &StrategyProfile, tol: EquilibriumTol) -> Result<Verdict> {
    if is_degenerate_equilibrium(game, profile, tol)? {
        Ok(Verdict::UnknownDegenerate)
    } else if is_deterministic(profile, SUPPORT_THRESHOLD) {
        Ok(Verdict::Stable)
    } else {
        Ok(Verdict::Unstable)
    }
}

/// Moves `delta` of player `i`'s mass from `from` to `to`.
fn shift(strategies: &mut [Vec<f64>], i: usize, from: usize, to: usize, delta: f64) {
    strategies[i][from] -= delta;
    strategies[i][to] += delta;
}

/// Searches for a profile within `radius` (max per-action probability change)
/// whose common payoff beats `profile` by more than [`ORACLE_MARGIN`].
///
/// First tries every single-player and every two-player pair of mass transfers
/// `a → b` of size `min(radius, s_i(a))`, then `samples` random joint moves
/// toward uniformly drawn simplex points.
pub fn asym_local_search_oracle(
    game: &Game,
    profile: &StrategyProfile,
    radius: f64,
    samples: usize,
    rng: &mut impl RngCore,
) -> Result<Option<StrategyProfile>> {
    if radius.is_nan() || radius <= 0.0 {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    game.check_profile(profile)?;
    let table = game.common_table()?;
    let base = game.common_value_unchecked(table, profile);
    let beats = |strategies: &[Vec<f64>]| {
        let candidate = StrategyProfile::from_parts_unchecked(strategies.to_vec());
        game.common_value_unchecked(table, &candidate) > base + ORACLE_MARGIN
    };
    let n = game.players();
    let counts = game.action_counts();
    let transfers = |i: usize| {
        let s = profile.strategy(i);
        (0..counts[i])
            .filter(move |&a| s[a] > 0.0)
            .flat_map(move |a| (0..counts[i]).filter(move |&b| b != a).map(move |b| (a, b, radius.min(s[a]))))
    };

    let mut work = profile.strategies().to_vec();
    for i in 0..n {
        for (a, b, d) in transfers(i) {
            shift(&mut work, i, a, b, d);
            if beats(&work) {
                return Ok(Some(StrategyProfile::from_parts_unchecked(work)));
            }
            shift(&mut work, i, b, a, d);
            work[i].clone_from(&profile.strategies()[i]);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for (a, b, d) in transfers(i) {
                shift(&mut work, i, a, b, d);
                for (c, e, d2) in transfers(j) {
                    shift(&mut work, j, c, e, d2);
                    if beats(&work) {
                        return Ok(Some(StrategyProfile::from_parts_unchecked(work)));
                    }
                    work[j].clone_from(&profile.strategies()[j]);
                }
                work[i].clone_from(&profile.strategies()[i]);
            }
        }
    }

    for _ in 0..samples {
        let moving = 1 + rng::index(rng, n);
        for (i, (w, s)) in work.iter_mut().zip(profile.strategies()).enumerate() {
            if i + 1 < moving && rng::uniform01(rng) < 0.5 {
                w.clone_from(s);
                continue;
            }
            let target = crate::optimize::random_simplex(s.len(), rng);
            let reach = target.iter().zip(s).map(|(t, p)| (t - p).abs()).fold(0.0, f64::max);
            let lambda = if reach > 0.0 {
                (radius * rng::uniform01(rng) / reach).min(1.0)
            } else {
                0.0
            };
            for ((x, t), p) in w.iter_mut().zip(&target).zip(s) {
                *x = p + lambda * (t - p);
            }
        }
        if beats(&work) {
            return Ok(Some(StrategyProfile::from_parts_unchecked(work)));
        }
    }
    Ok(None)
}

fn check_nonnegative(name: &str, x: f64) -> Result<()> {
    if x >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be nonnegative, got {x}")))
    }
}

/// An equilibrium of a game stays a `2ε`-equilibrium when every payoff moves by at most `ε`.
pub fn perturbation_eps_nash_bound(eps: f64) -> Result<f64> {
    check_nonnegative("eps", eps)?;
    Ok(2.0 * eps)
}

/// Exploitability bound for profiles within total variation `delta` of an equilibrium.
pub fn tv_eps_nash_bound(delta: f64, game: &Game) -> Result<f64> {
    check_nonnegative("delta", delta)?;
    Ok(4.0 * delta * game.max_abs_payoff())
}

/// Exploitability bound for profiles within KL divergence `nu` of an equilibrium.
pub fn kl_eps_nash_bound(nu: f64, game: &Game) -> Result<f64> {
    check_nonnegative("nu", nu)?;
    Ok(2.0 * (2.0 * nu).sqrt() * game.max_abs_payoff())
}

/// Total variation between the joint outcome distributions of two profiles.
pub fn total_variation(game: &Game, p: &StrategyProfile, q: &StrategyProfile) -> Result<f64> {
    game.check_profile(p)?;
    game.check_profile(q)?;
    let n = game.players();
    let mut digits = vec![0; n];
    let mut sum = 0.0;
    for _ in 0..game.num_profiles() {
        let (mut a, mut b) = (1.0, 1.0);
        for (i, &d) in digits.iter().enumerate() {
            a *= p.strategy(i)[d];
            b *= q.strategy(i)[d];
        }
        sum += (a - b).abs();
        advance(&mut digits, game.action_counts());
    }
    Ok(0.5 * sum)
}

/// `KL(p ‖ q)` of the joint outcome distributions; the sum of per-player
/// divergences since both are product measures. Infinite when `p` puts mass
/// where `q` has none.
pub fn kl_divergence(p: &StrategyProfile, q: &StrategyProfile) -> Result<f64> {
    if p.players() != q.players() {
        return Err(Error::PlayerCountMismatch {
            expected: p.players(),
            actual: q.players(),
        });
    }
    let mut total = 0.0;
    for (i, (a, b)) in p.strategies().iter().zip(q.strategies()).enumerate() {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                player: i,
                expected: a.len(),
                actual: b.len(),
            });
        }
        for (&x, &y) in a.iter().zip(b) {
            if x > 0.0 {
                if y <= 0.0 {
                    return Ok(f64::INFINITY);
                }
                total += x * (x / y).ln();
            }
        }
    }
    Ok(total.max(0.0))
}

/// Tolerance used for best-response sets of exact profiles.
pub const BEST_RESPONSE_TOL: f64 = 1e-9;

/// Point masses on one selected best response per player.
pub fn simultaneous_best_response(game: &Game, profile: &StrategyProfile, selection: &[usize]) -> Result<StrategyProfile> {
    simultaneous_best_response_tol(game, profile, selection, BEST_RESPONSE_TOL)
}

pub fn simultaneous_best_response_tol(
    game: &Game,
    profile: &StrategyProfile,
    selection: &[usize],
    tol: f64,
) -> Result<StrategyProfile> {
    game.check_profile(profile)?;
    if selection.len() != game.players() {
        return Err(Error::PlayerCountMismatch {
            expected: game.players(),
            actual: selection.len(),
        });
    }
    let mut strategies = Vec::with_capacity(selection.len());
    for (player, &action) in selection.iter().enumerate() {
        if !best_response_set(game, profile, player, tol)?.contains(&action) {
            return Err(Error::NotBestResponse { player, action });
        }
        strategies.push(point_mass(game.action_counts()[player], action));
    }
    Ok(StrategyProfile::from_parts_unchecked(strategies))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationDecrease {
    pub expected_utility: f64,
    /// Lowest common payoff over joint best-response selections.
    pub worst_utility: f64,
    pub worst_selection: Vec<usize>,
    /// `100·(EU − worst)/|EU|`; absent when `|EU|` is below [`PERCENT_FLOOR`].
    pub decrease_pct: Option<f64>,
    /// Set when the selection product was sampled rather than enumerated.
    pub lower_bound: bool,
}

/// Worst common payoff reachable when each player's tie among exact best
/// responses is broken adversarially and everyone best-responds at once.
///
/// `tol.nash` guards the equilibrium precondition; `tol.indifference` sets the
/// best-response sets. `rng` is used only when the product of best-response
/// sets exceeds [`SELECTION_ENUMERATION_CAP`].
pub fn worst_case_perturbation_decrease(
    game: &Game,
    profile: &StrategyProfile,
    tol: EquilibriumTol,
    rng: &mut impl RngCore,
) -> Result<PerturbationDecrease> {
    let table = game.common_table()?;
    require_equilibrium(game, profile, tol.nash)?;
    let sets = (0..game.players())
        .map(|i| best_response_set(game, profile, i, tol.indifference))
        .collect::<Result<Vec<_>>>()?;
    let expected_utility = game.common_value_unchecked(table, profile);
    let radices: Vec<usize> = sets.iter().map(Vec::len).collect();
    let product = radices
        .iter()
        .try_fold(1usize, |acc, &r| acc.checked_mul(r))
        .unwrap_or(usize::MAX);

    let mut worst_utility = f64::INFINITY;
    let mut worst_selection = Vec::new();
    let mut consider = |selection: Vec<usize>| {
        let u = table[game.index_of(&selection)];
        if u < worst_utility {
            worst_utility = u;
            worst_selection = selection;
        }
    };
    let lower_bound = product > SELECTION_ENUMERATION_CAP;
    if lower_bound {
        for _ in 0..SELECTION_SAMPLES {
            consider(sets.iter().map(|s| s[rng::index(rng, s.len())]).collect());
        }
    } else {
        let mut digits = vec![0; radices.len()];
        for _ in 0..product {
            consider(digits.iter().zip(&sets).map(|(&d, s)| s[d]).collect());
            advance(&mut digits, &radices);
        }
    }
    let decrease_pct = (expected_utility.abs() >= PERCENT_FLOOR)
        .then(|| 100.0 * (expected_utility - worst_utility) / expected_utility.abs());
    Ok(PerturbationDecrease {
        expected_utility,
        worst_utility,
        worst_selection,
        decrease_pct,
        lower_bound,
    })
}

/// Everything [`analyze`] reports about one profile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub expected_utility: Vec<f64>,
    pub exploitability: f64,
    /// Nash tolerance the remaining fields were computed under.
    pub is_nash_at: f64,
    pub is_nash: bool,
    pub is_mixed: bool,
    pub is_deterministic: bool,
    /// Absent when the profile is not an equilibrium.
    pub is_degenerate: Option<bool>,
    pub asym_locally_optimal: Option<Verdict>,
    pub perturbation_decrease_pct: Option<f64>,
    pub perturbation_decrease_is_lower_bound: bool,
}

/// Runs every applicable check. Stability and perturbation fields need an
/// equilibrium; the perturbation decrease also needs a common payoff.
pub fn analyze(game: &Game, profile: &StrategyProfile, tol: EquilibriumTol) -> Result<AnalysisReport> {
    let (expected_utility, _) = utilities(game, profile)?;
    let exploitability = exploitability(game, profile)?;
    let is_nash = exploitability <= tol.nash;
    let is_deterministic = is_deterministic(profile, SUPPORT_THRESHOLD);
    let (is_degenerate, asym_locally_optimal) = if is_nash {
        let verdict = stability_verdict(game, profile, tol)?;
        (Some(verdict == Verdict::UnknownDegenerate), Some(verdict))
    } else {
        (None, None)
    };
    let decrease = if is_nash && game.is_common_payoff() {
        Some(worst_case_perturbation_decrease(game, profile, tol, &mut rng::stream(0, 0))?)
    } else {
        None
    };
    Ok(AnalysisReport {
        expected_utility,
        exploitability,
        is_nash_at: tol.nash,
        is_nash,
        is_mixed: !is_deterministic,
        is_deterministic,
        is_degenerate,
        asym_locally_optimal,
        perturbation_decrease_pct: decrease.as_ref().and_then(|d| d.decrease_pct),
        perturbation_decrease_is_lower_bound: decrease.is_some_and(|d| d.lower_bound),
    })
}

/// Common payoff on an evenly spaced grid over `(P(player 0 plays 0), P(player 1 plays 0))`
/// for a two-player, two-action game; rows of `(p, q, EU)`.
pub fn eu_grid(game: &Game, steps: usize) -> Result<Vec<(f64, f64, f64)>> {
    if game.action_counts() != [2, 2] {
        return Err(Error::InvalidArgument("grid needs a two-player game with two actions each".into()));
    }
    if steps == 0 {
        return Err(Error::InvalidArgument("grid needs at least one step".into()));
    }
    let table = game.common_table()?;
    let mut rows = Vec::with_capacity((steps + 1) * (steps + 1));
    for i in 0..=steps {
        let p = i as f64 / steps as f64;
        for j in 0..=steps {
            let q = j as f64 / steps as f64;
            let profile = StrategyProfile::from_parts_unchecked(vec![vec![p, 1.0 - p], vec![q, 1.0 - q]]);
            rows.push((p, q, game.common_value_unchecked(table, &profile)));
        }
    }
    Ok(rows)
}
