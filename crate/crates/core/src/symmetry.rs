//! Player permutations, game symmetries, generated groups and orbit partitions.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{advance, normalize_strategy, Game, StrategyProfile};

/// Default cap on generated group size (10!).
pub const DEFAULT_GROUP_CAP: usize = 3_628_800;
/// Default player limit for brute-force symmetry enumeration.
pub const DEFAULT_BRUTE_FORCE_PLAYERS: usize = 6;
/// Relative tolerance when comparing payoff entries for symmetry.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// A bijection on player indices in zero-based one-line notation: `map[i] = ρ(i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<usize>);

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(map: Vec<usize>) -> Result<Self> {
        Permutation::new(map)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.0
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &j in &map {
            if j >= n || std::mem::replace(&mut seen[j], true) {
                return Err(Error::InvalidPermutation(format!("{map:?} is not a bijection on 0..{n}")));
            }
        }
        Ok(Permutation(map))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    /// Swaps players `i` and `j`.
    pub fn transposition(n: usize, i: usize, j: usize) -> Self {
        let mut map: Vec<usize> = (0..n).collect();
        map.swap(i, j);
        Permutation(map)
    }

    /// `i ↦ i + shift (mod n)`.
    pub fn rotation(n: usize, shift: usize) -> Self {
        Permutation((0..n).map(|i| (i + shift) % n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&j| self.0[j]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }
}

/// Why a permutation failed to be a symmetry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Asymmetry {
    /// Permutation acts on a different number of players.
    WrongSize { players: usize, perm: usize },
    /// `ρ(player)` has a different number of actions than `player`.
    ActionSetMismatch { player: usize },
    /// `u_{ρ(i)}(a) ≠ u_i(a_ρ)` at this pure profile.
    PayoffMismatch { player: usize, profile: Vec<usize> },
}

fn payoffs_match(x: f64, y: f64) -> bool {
    (x - y).abs() <= SYMMETRY_TOL * (1.0 + x.abs().max(y.abs()))
}

/// Checks `u_{ρ(i)}(a) = u_i(a_{ρ(0)}, …, a_{ρ(n-1)})` on every pure profile.
///
/// Multilinearity makes the pure-profile condition equivalent to the one over
/// mixed profiles.
pub fn check_symmetry(game: &Game, perm: &Permutation) -> std::result::Result<(), Asymmetry> {
    let n = game.players();
    if perm.len() != n {
        return Err(Asymmetry::WrongSize {
            players: n,
            perm: perm.len(),
        });
    }
    let counts = game.action_counts();
    if let Some(player) = (0..n).find(|&i| counts[i] != counts[perm.apply(i)]) {
        return Err(Asymmetry::ActionSetMismatch { player });
    }
    if perm.is_identity() {
        return Ok(());
    }
    let common = game.common_table().ok();
    let mut a = vec![0; n];
    let mut permuted = vec![0; n];
    for idx in 0..game.num_profiles() {
        for (k, slot) in permuted.iter_mut().enumerate() {
            *slot = a[perm.apply(k)];
        }
        let pidx = game.index_of(&permuted);
        match common {
            Some(t) => {
                if !payoffs_match(t[idx], t[pidx]) {
                    return Err(Asymmetry::PayoffMismatch { player: 0, profile: a });
                }
            }
            None => {
                for i in 0..n {
                    if !payoffs_match(game.table(perm.apply(i))[idx], game.table(i)[pidx]) {
                        return Err(Asymmetry::PayoffMismatch { player: i, profile: a });
                    }
                }
            }
        }
        debug_assert_eq!(game.index_of(&a), idx);
        advance(&mut a, counts);
    }
    Ok(())
}

pub fn is_symmetry(game: &Game, perm: &Permutation) -> bool {
    check_symmetry(game, perm).is_ok()
}

/// A permutation group together with the set it was generated from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryGroup {
    players: usize,
    elements: BTreeSet<Permutation>,
    generators: Vec<Permutation>,
}

impl SymmetryGroup {
    pub fn players(&self) -> usize {
        self.players
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> impl Iterator<Item = &Permutation> {
        self.elements.iter()
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.elements.contains(p)
    }

    /// Every element is a permutation of `n` players (the full symmetric group).
    pub fn is_full_symmetric_group(&self) -> bool {
        self.elements.len() == (1..=self.players).product::<usize>()
    }

    /// Only the identity.
    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }
}

/// Closure of `generators` under composition, with the default size cap.
pub fn generate_group(players: usize, generators: &[Permutation]) -> Result<SymmetryGroup> {
    generate_group_capped(players, generators, DEFAULT_GROUP_CAP)
}

/// Breadth-first closure of `generators` under composition.
pub fn generate_group_capped(players: usize, generators: &[Permutation], cap: usize) -> Result<SymmetryGroup> {
    if let Some(g) = generators.iter().find(|g| g.len() != players) {
        return Err(Error::InvalidPermutation(format!("{g} does not act on {players} players")));
    }
    let identity = Permutation::identity(players);
    let mut seen: HashSet<Permutation> = HashSet::from([identity.clone()]);
    let mut queue = VecDeque::from([identity]);
    while let Some(e) = queue.pop_front() {
        for g in generators {
            let next = g.compose(&e);
            if !seen.contains(&next) {
                if seen.len() >= cap {
                    return Err(Error::GroupTooLarge { cap });
                }
                seen.insert(next.clone());
                queue.push_back(next);
            }
        }
    }
    Ok(SymmetryGroup {
        players,
        elements: seen.into_iter().collect(),
        generators: generators.to_vec(),
    })
}

/// Every symmetry of `game`, found by testing all `n!` permutations.
pub fn all_symmetries(game: &Game) -> Result<SymmetryGroup> {
    all_symmetries_capped(game, DEFAULT_BRUTE_FORCE_PLAYERS)
}

pub fn all_symmetries_capped(game: &Game, max_players: usize) -> Result<SymmetryGroup> {
    let n = game.players();
    if n > max_players {
        return Err(Error::TooManyPlayers {
            players: n,
            cap: max_players,
        });
    }
    let mut elements = BTreeSet::new();
    let mut map: Vec<usize> = (0..n).collect();
    loop {
        let p = Permutation(map.clone());
        if is_symmetry(game, &p) {
            elements.insert(p);
        }
        if !next_permutation(&mut map) {
            break;
        }
    }
    let generators = elements.iter().filter(|p| !p.is_identity()).cloned().collect();
    Ok(SymmetryGroup {
        players: n,
        elements,
        generators,
    })
}

/// Lexicographic successor; false once `v` is the last permutation.
fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("pivot exists");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Equivalence classes of players under a group action.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitPartition {
    orbit_of: Vec<usize>,
    orbits: Vec<Vec<usize>>,
}

impl OrbitPartition {
    /// Builds a partition from per-player labels; labels are renumbered by first appearance.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut renumber = std::collections::HashMap::new();
        let mut orbits: Vec<Vec<usize>> = Vec::new();
        let orbit_of = labels
            .iter()
            .enumerate()
            .map(|(i, l)| {
                let next = renumber.len();
                let k = *renumber.entry(*l).or_insert(next);
                if k == orbits.len() {
                    orbits.push(Vec::new());
                }
                orbits[k].push(i);
                k
            })
            .collect();
        OrbitPartition { orbit_of, orbits }
    }

    /// All players in one orbit.
    pub fn single(players: usize) -> Self {
        Self::from_labels(&vec![0; players])
    }

    /// Every player alone.
    pub fn singletons(players: usize) -> Self {
        Self::from_labels(&(0..players).collect::<Vec<_>>())
    }

    pub fn players(&self) -> usize {
        self.orbit_of.len()
    }

    pub fn num_orbits(&self) -> usize {
        self.orbits.len()
    }

    pub fn orbit_of(&self, player: usize) -> usize {
        self.orbit_of[player]
    }

    pub fn orbits(&self) -> &[Vec<usize>] {
        &self.orbits
    }

    /// Every orbit of `self` lies inside a single orbit of `coarser`.
    pub fn refines(&self, coarser: &OrbitPartition) -> bool {
        self.players() == coarser.players()
            && self
                .orbits
                .iter()
                .all(|o| o.iter().all(|&i| coarser.orbit_of(i) == coarser.orbit_of(o[0])))
    }

    /// Action count shared by each orbit's members.
    pub fn orbit_action_counts(&self, game: &Game) -> Result<Vec<usize>> {
        if game.players() != self.players() {
            return Err(Error::PlayerCountMismatch {
                expected: game.players(),
                actual: self.players(),
            });
        }
        self.orbits
            .iter()
            .map(|o| {
                let count = game.action_counts()[o[0]];
                match o.iter().find(|&&i| game.action_counts()[i] != count) {
                    Some(&player) => Err(Error::DimensionMismatch {
                        player,
                        expected: count,
                        actual: game.action_counts()[player],
                    }),
                    None => Ok(count),
                }
            })
            .collect()
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Orbits of the group action on player indices.
pub fn orbits(group: &SymmetryGroup) -> OrbitPartition {
    let n = group.players();
    let mut parent: Vec<usize> = (0..n).collect();
    for p in group.elements() {
        for i in 0..n {
            let (a, b) = (find(&mut parent, i), find(&mut parent, p.apply(i)));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let labels: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    OrbitPartition::from_labels(&labels)
}

/// Same-orbit players use componentwise-equal strategies (within `tol`).
pub fn is_invariant(profile: &StrategyProfile, partition: &OrbitPartition, tol: f64) -> bool {
    if profile.players() != partition.players() {
        return false;
    }
    partition.orbits().iter().all(|orbit| {
        let first = profile.strategy(orbit[0]);
        orbit[1..].iter().all(|&i| {
            let s = profile.strategy(i);
            s.len() == first.len() && s.iter().zip(first).all(|(x, y)| (x - y).abs() <= tol)
        })
    })
}

/// Gives every player its orbit's shared strategy.
pub fn expand_symmetric(shared: &[Vec<f64>], partition: &OrbitPartition) -> Result<StrategyProfile> {
    if shared.len() != partition.num_orbits() {
        return Err(Error::InvalidArgument(format!(
            "{} shared strategies for {} orbits",
            shared.len(),
            partition.num_orbits()
        )));
    }
    let checked = shared
        .iter()
        .enumerate()
        .map(|(k, s)| normalize_strategy(partition.orbits()[k][0], s.clone()))
        .collect::<Result<Vec<_>>>()?;
    Ok(expand_unchecked(&checked, partition))
}

pub(crate) fn expand_unchecked(shared: &[Vec<f64>], partition: &OrbitPartition) -> StrategyProfile {
    StrategyProfile::from_parts_unchecked(
        (0..partition.players())
            .map(|i| shared[partition.orbit_of(i)].clone())
            .collect(),
    )
}

/// Reads back one strategy per orbit (from its first member).
pub fn shared_strategies(profile: &StrategyProfile, partition: &OrbitPartition) -> Vec<Vec<f64>> {
    partition
        .orbits()
        .iter()
        .map(|o| profile.strategy(o[0]).to_vec())
        .collect()
}
