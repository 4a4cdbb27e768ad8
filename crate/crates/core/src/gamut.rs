//! Totally symmetric common-payoff games from the GAMUT classes.
//!
//! One payoff is drawn per unordered action profile (multiset of actions) and
//! shared by every ordering of it. Draws come from ChaCha8 stream 0 under the
//! game's seed, one `lo + (hi − lo)·u` per multiset in ascending
//! [`unordered_index`] order; fixed payoffs consume no draw.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{advance, Game};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GamutClass {
    /// Every multiset pays `U(−100, 100)`.
    Random,
    /// All-equal profiles pay `U(0, 100)`, all others `U(−100, 0)`.
    Coordination,
    /// All-equal profiles pay 100, all others `U(−100, 99)`.
    Collaboration,
}

impl GamutClass {
    pub const ALL: [GamutClass; 3] = [GamutClass::Random, GamutClass::Coordination, GamutClass::Collaboration];

    pub fn name(self) -> &'static str {
        match self {
            GamutClass::Random => "random",
            GamutClass::Coordination => "coordination",
            GamutClass::Collaboration => "collaboration",
        }
    }

    /// Stable code mixed into per-game seeds.
    pub fn code(self) -> u64 {
        match self {
            GamutClass::Random => 0,
            GamutClass::Coordination => 1,
            GamutClass::Collaboration => 2,
        }
    }

    /// Closed range containing every payoff the class can produce.
    pub fn payoff_bounds(self) -> (f64, f64) {
        (-100.0, 100.0)
    }

    /// `(lo, hi)` for a multiset, or `None` when the payoff is fixed at `hi`.
    fn range(self, all_equal: bool) -> (Option<f64>, f64) {
        match (self, all_equal) {
            (GamutClass::Random, _) => (Some(-100.0), 100.0),
            (GamutClass::Coordination, true) => (Some(0.0), 100.0),
            (GamutClass::Coordination, false) => (Some(-100.0), 0.0),
            (GamutClass::Collaboration, true) => (None, 100.0),
            (GamutClass::Collaboration, false) => (Some(-100.0), 99.0),
        }
    }
}

impl std::fmt::Display for GamutClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for GamutClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "random" | "randomgame" => Ok(GamutClass::Random),
            "coordination" | "coordinationgame" => Ok(GamutClass::Coordination),
            "collaboration" | "collaborationgame" => Ok(GamutClass::Collaboration),
            _ => Err(Error::InvalidArgument(format!("unknown game class {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GamutSpec {
    pub class: GamutClass,
    pub players: usize,
    pub actions: usize,
    pub seed: u64,
}

impl GamutSpec {
    pub fn validate(&self) -> Result<()> {
        if self.players < 2 || self.actions < 2 {
            return Err(Error::InvalidArgument(format!(
                "need at least 2 players and 2 actions, got {} and {}",
                self.players, self.actions
            )));
        }
        Ok(())
    }
}

/// `C(n, k)`, exact for the small arguments used here.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of multisets of size `players` over `actions` symbols.
pub fn multiset_count(players: usize, actions: usize) -> usize {
    binomial(actions + players - 1, players)
}

/// Rank of the sorted action list among all sorted lists of the same length
/// (colexicographic order of the combination `a_(k) + k`).
pub fn unordered_index(actions: &[usize]) -> usize {
    let mut sorted = actions.to_vec();
    sorted.sort_unstable();
    sorted
        .iter()
        .enumerate()
        .map(|(k, &a)| binomial(a + k, k + 1))
        .sum()
}

/// A seeded game of the given class.
pub fn generate(spec: &GamutSpec) -> Result<Game> {
    spec.validate()?;
    let (n, m) = (spec.players, spec.actions);
    let count = multiset_count(n, m);
    let mut all_equal = vec![false; count];
    for a in 0..m {
        all_equal[unordered_index(&vec![a; n])] = true;
    }
    let mut rng = rng::stream(spec.seed, 0);
    let values: Vec<f64> = all_equal
        .iter()
        .map(|&eq| match spec.class.range(eq) {
            (Some(lo), hi) => rng::uniform(&mut rng, lo, hi),
            (None, fixed) => fixed,
        })
        .collect();

    let counts = vec![m; n];
    let total = m.pow(n as u32);
    let mut digits = vec![0; n];
    let mut table = Vec::with_capacity(total);
    for _ in 0..total {
        table.push(values[unordered_index(&digits)]);
        advance(&mut digits, &counts);
    }
    crate::game::make_common_payoff_game(n, &counts, table)
}

/// `(u − lo)/(hi − lo)` with the class bounds, mapping payoffs into `[0, 1]`.
pub fn normalize(game: &Game, class: GamutClass) -> Result<Game> {
    let (lo, hi) = class.payoff_bounds();
    game.map_payoffs(|u| (u - lo) / (hi - lo))
}

/// A generated game with its provenance, serialized as the game's fields plus a `gamut` block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GamutGame {
    #[serde(flatten)]
    pub game: Game,
    pub gamut: GamutSpec,
}

impl GamutGame {
    pub fn generate(spec: GamutSpec) -> Result<Self> {
        Ok(GamutGame {
            game: generate(&spec)?,
            gamut: spec,
        })
    }
}
