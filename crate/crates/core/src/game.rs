//! Finite normal-form games, mixed strategy profiles and exact expected utilities.
//!
//! Payoff tensors are flat arrays in mixed-radix row-major order with player 0
//! most significant: `index(a) = Σ_i a_i · Π_{j>i} |A_j|`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor;

/// Probability mass above which an action counts as played.
pub const SUPPORT_THRESHOLD: f64 = 1e-9;
/// Allowed deviation of a strategy's total mass from 1.
pub const SIMPLEX_TOL: f64 = 1e-9;
/// Largest normalization drift that constructors silently repair.
pub const RENORMALIZE_LIMIT: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub enum Payoffs {
    /// One tensor shared by every player.
    Common(Vec<f64>),
    /// One tensor per player.
    PerPlayer(Vec<Vec<f64>>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GameRepr", into = "GameRepr")]
pub struct Game {
    action_counts: Vec<usize>,
    strides: Vec<usize>,
    payoffs: Payoffs,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PayoffRepr {
    Flat(Vec<f64>),
    Nested(Vec<Vec<f64>>),
}

#[derive(Serialize, Deserialize)]
struct GameRepr {
    players: usize,
    actions: Vec<usize>,
    common_payoff: bool,
    payoffs: PayoffRepr,
}

impl TryFrom<GameRepr> for Game {
    type Error = Error;

    fn try_from(repr: GameRepr) -> Result<Self> {
        match (repr.common_payoff, repr.payoffs) {
            (true, PayoffRepr::Flat(table)) => make_common_payoff_game(repr.players, &repr.actions, table),
            (false, PayoffRepr::Nested(tables)) => {
                if repr.actions.len() != repr.players {
                    return Err(Error::PlayerCountMismatch {
                        expected: repr.players,
                        actual: repr.actions.len(),
                    });
                }
                Game::general(repr.actions, tables)
            }
            (true, PayoffRepr::Nested(_)) => Err(Error::InvalidGame(
                "common-payoff game needs a single flat payoff array".into(),
            )),
            (false, PayoffRepr::Flat(_)) => Err(Error::InvalidGame(
                "general game needs one payoff array per player".into(),
            )),
        }
    }
}

impl From<Game> for GameRepr {
    fn from(game: Game) -> Self {
        let players = game.players();
        match game.payoffs {
            Payoffs::Common(t) => GameRepr {
                players,
                actions: game.action_counts,
                common_payoff: true,
                payoffs: PayoffRepr::Flat(t),
            },
            Payoffs::PerPlayer(ts) => GameRepr {
                players,
                actions: game.action_counts,
                common_payoff: false,
                payoffs: PayoffRepr::Nested(ts),
            },
        }
    }
}

fn checked_size(action_counts: &[usize]) -> Result<usize> {
    if action_counts.is_empty() {
        return Err(Error::InvalidGame("a game needs at least one player".into()));
    }
    if let Some(i) = action_counts.iter().position(|&c| c == 0) {
        return Err(Error::InvalidGame(format!("player {i} has no actions")));
    }
    action_counts
        .iter()
        .try_fold(1usize, |acc, &c| acc.checked_mul(c))
        .ok_or_else(|| Error::InvalidGame("payoff tensor size overflows".into()))
}

fn check_table(table: &[f64], expected: usize) -> Result<()> {
    if table.len() != expected {
        return Err(Error::PayoffTableSize {
            expected,
            actual: table.len(),
        });
    }
    if let Some(i) = table.iter().position(|u| !u.is_finite()) {
        return Err(Error::InvalidGame(format!("payoff entry {i} is not finite")));
    }
    Ok(())
}

fn strides_for(action_counts: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; action_counts.len()];
    for i in (0..action_counts.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * action_counts[i + 1];
    }
    strides
}

/// Builds a common-payoff game from one flat row-major payoff table.
pub fn make_common_payoff_game(players: usize, action_counts: &[usize], table: Vec<f64>) -> Result<Game> {
    if action_counts.len() != players {
        return Err(Error::PlayerCountMismatch {
            expected: players,
            actual: action_counts.len(),
        });
    }
    let size = checked_size(action_counts)?;
    check_table(&table, size)?;
    Ok(Game {
        strides: strides_for(action_counts),
        action_counts: action_counts.to_vec(),
        payoffs: Payoffs::Common(table),
    })
}

impl Game {
    /// A game with a separate payoff tensor per player.
    pub fn general(action_counts: Vec<usize>, tables: Vec<Vec<f64>>) -> Result<Game> {
        let size = checked_size(&action_counts)?;
        if tables.len() != action_counts.len() {
            return Err(Error::PlayerCountMismatch {
                expected: action_counts.len(),
                actual: tables.len(),
            });
        }
        for t in &tables {
            check_table(t, size)?;
        }
        Ok(Game {
            strides: strides_for(&action_counts),
            action_counts,
            payoffs: Payoffs::PerPlayer(tables),
        })
    }

    /// Builds a common-payoff game by evaluating `payoff` on every pure profile.
    pub fn common_from_fn(action_counts: &[usize], mut payoff: impl FnMut(&[usize]) -> f64) -> Result<Game> {
        let size = checked_size(action_counts)?;
        let mut table = Vec::with_capacity(size);
        let mut profile = vec![0; action_counts.len()];
        for _ in 0..size {
            table.push(payoff(&profile));
            advance(&mut profile, action_counts);
        }
        make_common_payoff_game(action_counts.len(), action_counts, table)
    }

    pub fn players(&self) -> usize {
        self.action_counts.len()
    }

    pub fn action_counts(&self) -> &[usize] {
        &self.action_counts
    }

    pub fn num_profiles(&self) -> usize {
        self.strides[0] * self.action_counts[0]
    }

    pub fn is_common_payoff(&self) -> bool {
        match &self.payoffs {
            Payoffs::Common(_) => true,
            Payoffs::PerPlayer(ts) => ts.windows(2).all(|w| w[0] == w[1]),
        }
    }

    pub fn payoffs(&self) -> &Payoffs {
        &self.payoffs
    }

    /// Payoff tensor seen by `player`.
    pub fn table(&self, player: usize) -> &[f64] {
        match &self.payoffs {
            Payoffs::Common(t) => t,
            Payoffs::PerPlayer(ts) => &ts[player],
        }
    }

    /// The shared tensor of a common-payoff game.
    pub fn common_table(&self) -> Result<&[f64]> {
        match &self.payoffs {
            Payoffs::Common(t) => Ok(t),
            Payoffs::PerPlayer(ts) if self.is_common_payoff() => Ok(&ts[0]),
            Payoffs::PerPlayer(_) => Err(Error::NotCommonPayoff),
        }
    }

    pub fn index_of(&self, actions: &[usize]) -> usize {
        actions.iter().zip(&self.strides).map(|(a, s)| a * s).sum()
    }

    pub fn profile_at(&self, mut index: usize) -> Vec<usize> {
        self.strides
            .iter()
            .map(|&s| {
                let a = index / s;
                index %= s;
                a
            })
            .collect()
    }

    pub fn payoff(&self, player: usize, actions: &[usize]) -> f64 {
        self.table(player)[self.index_of(actions)]
    }

    pub fn max_abs_payoff(&self) -> f64 {
        self.all_entries().fold(0.0, |m, u| m.max(u.abs()))
    }

    /// `max u − min u` over every player's entries.
    pub fn payoff_span(&self) -> f64 {
        let (lo, hi) = self
            .all_entries()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), u| (lo.min(u), hi.max(u)));
        hi - lo
    }

    fn all_entries(&self) -> Box<dyn Iterator<Item = f64> + '_> {
        match &self.payoffs {
            Payoffs::Common(t) => Box::new(t.iter().copied()),
            Payoffs::PerPlayer(ts) => Box::new(ts.iter().flatten().copied()),
        }
    }

    /// Applies `f` to every payoff entry.
    pub fn map_payoffs(&self, mut f: impl FnMut(f64) -> f64) -> Result<Game> {
        let payoffs = match &self.payoffs {
            Payoffs::Common(t) => Payoffs::Common(t.iter().map(|&u| f(u)).collect()),
            Payoffs::PerPlayer(ts) => {
                Payoffs::PerPlayer(ts.iter().map(|t| t.iter().map(|&u| f(u)).collect()).collect())
            }
        };
        let game = Game {
            payoffs,
            ..self.clone()
        };
        if let Some(i) = game.all_entries().position(|u| !u.is_finite()) {
            return Err(Error::InvalidGame(format!("payoff entry {i} is not finite")));
        }
        Ok(game)
    }

    pub fn check_profile(&self, profile: &StrategyProfile) -> Result<()> {
        if profile.players() != self.players() {
            return Err(Error::PlayerCountMismatch {
                expected: self.players(),
                actual: profile.players(),
            });
        }
        for (player, (s, &count)) in profile.strategies.iter().zip(&self.action_counts).enumerate() {
            if s.len() != count {
                return Err(Error::DimensionMismatch {
                    player,
                    expected: count,
                    actual: s.len(),
                });
            }
        }
        Ok(())
    }

    fn check_player_action(&self, player: usize, action: usize) -> Result<()> {
        if player >= self.players() {
            return Err(Error::PlayerOutOfRange {
                player,
                players: self.players(),
            });
        }
        if action >= self.action_counts[player] {
            return Err(Error::ActionOutOfRange {
                player,
                action,
                actions: self.action_counts[player],
            });
        }
        Ok(())
    }

    /// `Σ_a table(a) Π_j weights_j(a_j)`, enumerating profiles depth-first and
    /// pruning zero-probability branches.
    fn enumerate(&self, table: &[f64], weights: &[&[f64]]) -> f64 {
        fn rec(table: &[f64], strides: &[usize], weights: &[&[f64]], depth: usize, offset: usize, mass: f64) -> f64 {
            if depth == weights.len() {
                return mass * table[offset];
            }
            let mut acc = 0.0;
            for (a, &p) in weights[depth].iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                acc += rec(table, strides, weights, depth + 1, offset + a * strides[depth], mass * p);
            }
            acc
        }
        rec(table, &self.strides, weights, 0, 0, 1.0)
    }

    /// Deviation payoffs for every player and action, `[i][a] = EU_i(a, s_{-i})`.
    ///
    /// Uses shared tensor contractions; the profile must already match the game.
    pub fn deviation_table(&self, profile: &StrategyProfile) -> Vec<Vec<f64>> {
        let weights = profile.as_slices();
        match &self.payoffs {
            Payoffs::Common(t) => tensor::all_axis_marginals(t, &self.action_counts, &weights),
            Payoffs::PerPlayer(ts) => ts
                .iter()
                .enumerate()
                .map(|(i, t)| tensor::axis_marginal(t, &self.action_counts, &weights, i))
                .collect(),
        }
    }

    /// Expected common payoff by tensor contraction (dimension checks skipped).
    pub(crate) fn common_value_unchecked(&self, table: &[f64], profile: &StrategyProfile) -> f64 {
        tensor::full_contraction(table, &self.action_counts, &profile.as_slices())
    }
}

/// Odometer increment over mixed-radix digits, last digit fastest.
pub(crate) fn advance(digits: &mut [usize], radices: &[usize]) {
    for k in (0..digits.len()).rev() {
        digits[k] += 1;
        if digits[k] < radices[k] {
            return;
        }
        digits[k] = 0;
    }
}

/// A pure action profile, one action index per player.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PureProfile(pub Vec<usize>);

impl PureProfile {
    pub fn new(game: &Game, actions: Vec<usize>) -> Result<Self> {
        if actions.len() != game.players() {
            return Err(Error::PlayerCountMismatch {
                expected: game.players(),
                actual: actions.len(),
            });
        }
        for (player, &a) in actions.iter().enumerate() {
            game.check_player_action(player, a)?;
        }
        Ok(PureProfile(actions))
    }

    pub fn to_mixed(&self, game: &Game) -> StrategyProfile {
        StrategyProfile {
            strategies: self
                .0
                .iter()
                .zip(game.action_counts())
                .map(|(&a, &count)| point_mass(count, a))
                .collect(),
        }
    }
}

pub fn point_mass(dim: usize, action: usize) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[action] = 1.0;
    v
}

/// Validates one probability vector, repairing small normalization drift.
pub fn normalize_strategy(player: usize, mut s: Vec<f64>) -> Result<Vec<f64>> {
    let fail = |reason: String| Error::NotOnSimplex { player, reason };
    if s.is_empty() {
        return Err(fail("empty".into()));
    }
    for (a, p) in s.iter_mut().enumerate() {
        if !p.is_finite() {
            return Err(fail(format!("entry {a} is not finite")));
        }
        if *p < 0.0 {
            if *p < -SIMPLEX_TOL {
                return Err(fail(format!("entry {a} is negative ({p})")));
            }
            *p = 0.0;
        }
    }
    let total: f64 = s.iter().sum();
    let drift = (total - 1.0).abs();
    if drift > RENORMALIZE_LIMIT {
        return Err(fail(format!("sums to {total}")));
    }
    if drift > 0.0 {
        s.iter_mut().for_each(|p| *p /= total);
    }
    Ok(s)
}

/// A mixed strategy for every player.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileRepr")]
pub struct StrategyProfile {
    strategies: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct ProfileRepr {
    strategies: Vec<Vec<f64>>,
}

impl TryFrom<ProfileRepr> for StrategyProfile {
    type Error = Error;

    fn try_from(repr: ProfileRepr) -> Result<Self> {
        StrategyProfile::new(repr.strategies)
    }
}

impl StrategyProfile {
    pub fn new(strategies: Vec<Vec<f64>>) -> Result<Self> {
        let strategies = strategies
            .into_iter()
            .enumerate()
            .map(|(i, s)| normalize_strategy(i, s))
            .collect::<Result<_>>()?;
        Ok(StrategyProfile { strategies })
    }

    /// Uniform mixing for every player.
    pub fn uniform(game: &Game) -> Self {
        StrategyProfile {
            strategies: game
                .action_counts()
                .iter()
                .map(|&c| vec![1.0 / c as f64; c])
                .collect(),
        }
    }

    pub fn players(&self) -> usize {
        self.strategies.len()
    }

    pub fn strategies(&self) -> &[Vec<f64>] {
        &self.strategies
    }

    pub fn strategy(&self, player: usize) -> &[f64] {
        &self.strategies[player]
    }

    pub fn into_strategies(self) -> Vec<Vec<f64>> {
        self.strategies
    }

    pub(crate) fn as_slices(&self) -> Vec<&[f64]> {
        self.strategies.iter().map(Vec::as_slice).collect()
    }

    /// Actions played with probability above [`SUPPORT_THRESHOLD`].
    pub fn support(&self, player: usize) -> Vec<usize> {
        support_of(&self.strategies[player])
    }

    /// Same profile with `player` switched to a pure `action`.
    pub fn with_pure(&self, player: usize, action: usize) -> StrategyProfile {
        let mut strategies = self.strategies.clone();
        strategies[player] = point_mass(strategies[player].len(), action);
        StrategyProfile { strategies }
    }

    pub(crate) fn from_parts_unchecked(strategies: Vec<Vec<f64>>) -> Self {
        StrategyProfile { strategies }
    }
}

pub fn support_of(s: &[f64]) -> Vec<usize> {
    s.iter()
        .enumerate()
        .filter(|(_, &p)| p > SUPPORT_THRESHOLD)
        .map(|(a, _)| a)
        .collect()
}

/// Exact multilinear expected utility for every player.
pub fn expected_utility(game: &Game, profile: &StrategyProfile) -> Result<Vec<f64>> {
    game.check_profile(profile)?;
    let weights = profile.as_slices();
    Ok(match game.payoffs() {
        Payoffs::Common(t) => vec![game.enumerate(t, &weights); game.players()],
        Payoffs::PerPlayer(ts) => ts.iter().map(|t| game.enumerate(t, &weights)).collect(),
    })
}

/// Expected utility to `player` when it plays `action` and everyone else follows `profile`.
pub fn deviation_utility(game: &Game, profile: &StrategyProfile, player: usize, action: usize) -> Result<f64> {
    game.check_profile(profile)?;
    game.check_player_action(player, action)?;
    let pure = point_mass(game.action_counts()[player], action);
    let mut weights = profile.as_slices();
    weights[player] = &pure;
    Ok(game.enumerate(game.table(player), &weights))
}

/// Actions whose deviation utility is within `tol` of the best one.
pub fn best_response_set(game: &Game, profile: &StrategyProfile, player: usize, tol: f64) -> Result<Vec<usize>> {
    if tol < 0.0 || tol.is_nan() {
        return Err(Error::InvalidArgument(format!("tolerance must be nonnegative, got {tol}")));
    }
    game.check_player_action(player, 0)?;
    let values = (0..game.action_counts()[player])
        .map(|a| deviation_utility(game, profile, player, a))
        .collect::<Result<Vec<_>>>()?;
    Ok(near_max(&values, tol))
}

/// Indices whose value is within `tol` of the maximum.
pub(crate) fn near_max(values: &[f64], tol: f64) -> Vec<usize> {
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= best - tol)
        .map(|(a, _)| a)
        .collect()
}
