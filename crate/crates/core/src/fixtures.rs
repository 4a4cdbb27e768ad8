//! Small worked games with known symmetric optima.

use crate::game::{make_common_payoff_game, Game};

/// Action index for "home" in the taxi games.
pub const HOME: usize = 0;
/// Action index for "work" in the taxi games.
pub const WORK: usize = 1;

/// Two taxis, each holding only one entrance permit. Row player is Auto.
pub fn taxi_permits() -> Game {
    make_common_payoff_game(2, &[2, 2], vec![1.0, 0.0, 2.0, 1.0]).expect("static table")
}

/// Two identical taxis; splitting up is best.
pub fn taxi_identical() -> Game {
    make_common_payoff_game(2, &[2, 2], vec![1.0, 2.0, 2.0, 1.0]).expect("static table")
}

/// Both groups need both taxis; going together is best.
pub fn taxi_both_needed() -> Game {
    make_common_payoff_game(2, &[2, 2], vec![1.0, 0.0, 0.0, 1.0]).expect("static table")
}

/// The 3x3 game whose symmetric optimum `(a, a)` is a degenerate equilibrium.
pub fn degenerate_3x3(eps: f64) -> Game {
    #[rustfmt::skip]
    let table = vec![
        1.0, 1.0, 1.0,
        1.0, -10.0, 1.0 + eps,
        1.0, 1.0 + eps, -10.0,
    ];
    make_common_payoff_game(2, &[3, 3], table).expect("static table")
}

/// Ten robots with actions a, b, c: all-a pays 1, exactly one b with the rest c
/// pays `1 + eps`, anything else pays 0.
pub fn ten_robots(eps: f64) -> Game {
    Game::common_from_fn(&[3; 10], |a| {
        let count = |x| a.iter().filter(|&&y| y == x).count();
        if count(0) == 10 {
            1.0
        } else if count(1) == 1 && count(2) == 9 {
            1.0 + eps
        } else {
            0.0
        }
    })
    .expect("static table")
}

pub const FOOD: usize = 0;
pub const DRINK: usize = 1;

/// Four butlers on the corners of a square; each party group reaches its own
/// corner and both neighbours. A group scores 0 without drink, 1 with drink
/// only, 2 with food and drink. The common payoff is the mean over groups.
pub fn robot_butler() -> Game {
    Game::common_from_fn(&[2; 4], |a| {
        let total: f64 = (0..4)
            .map(|g| {
                let reach = [a[(g + 3) % 4], a[g], a[(g + 1) % 4]];
                let drink = reach.contains(&DRINK);
                let food = reach.contains(&FOOD);
                match (drink, food) {
                    (false, _) => 0.0,
                    (true, false) => 1.0,
                    (true, true) => 2.0,
                }
            })
            .sum();
        total / 4.0
    })
    .expect("static table")
}

/// Resource contest played behind a veil of ignorance.
///
/// Each robot picks a contingency plan: an action (cautious or aggressive) for
/// each private type (low or high need, equally likely). Plan index is
/// `2 * action_if_low + action_if_high` with 0 = cautious, 1 = aggressive.
/// The resource is worth 4 to a low-need robot and 6 to a high-need one; the
/// team payoff is whatever value ends up consumed.
pub mod veil {
    use super::*;

    pub const CAUTIOUS: usize = 0;
    pub const AGGRESSIVE: usize = 1;
    pub const LOW: usize = 0;
    pub const HIGH: usize = 1;
    pub const VALUE: [f64; 2] = [4.0, 6.0];

    pub fn plan(if_low: usize, if_high: usize) -> usize {
        2 * if_low + if_high
    }

    pub fn action(plan: usize, kind: usize) -> usize {
        if kind == LOW {
            plan / 2
        } else {
            plan % 2
        }
    }

    /// Team value of one encounter.
    pub fn encounter_value(actions: [usize; 2], kinds: [usize; 2]) -> f64 {
        let v = [VALUE[kinds[0]], VALUE[kinds[1]]];
        match (actions[0], actions[1]) {
            (CAUTIOUS, CAUTIOUS) => (v[0] + v[1]) / 2.0,
            (AGGRESSIVE, CAUTIOUS) => v[0],
            (CAUTIOUS, AGGRESSIVE) => v[1],
            _ => 0.0,
        }
    }

    pub fn game() -> Game {
        Game::common_from_fn(&[4, 4], |plans| {
            let mut total = 0.0;
            for k0 in [LOW, HIGH] {
                for k1 in [LOW, HIGH] {
                    let actions = [action(plans[0], k0), action(plans[1], k1)];
                    total += 0.25 * encounter_value(actions, [k0, k1]);
                }
            }
            total
        })
        .expect("static table")
    }
}
