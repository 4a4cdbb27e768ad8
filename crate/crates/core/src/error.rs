use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("player {player}: expected {expected} actions, got {actual}")]
    DimensionMismatch {
        player: usize,
        expected: usize,
        actual: usize,
    },

    #[error("expected {expected} players, got {actual}")]
    PlayerCountMismatch { expected: usize, actual: usize },

    #[error("payoff table has {actual} entries, expected {expected}")]
    PayoffTableSize { expected: usize, actual: usize },

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("player {player}: strategy is not a probability vector ({reason})")]
    NotOnSimplex { player: usize, reason: String },

    #[error("player index {player} out of range for {players} players")]
    PlayerOutOfRange { player: usize, players: usize },

    #[error("action {action} out of range for player {player} with {actions} actions")]
    ActionOutOfRange {
        player: usize,
        action: usize,
        actions: usize,
    },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("group would exceed {cap} elements")]
    GroupTooLarge { cap: usize },

    #[error("brute-force symmetry search limited to {cap} players, game has {players}")]
    TooManyPlayers { players: usize, cap: usize },

    #[error("operation requires a common-payoff game")]
    NotCommonPayoff,

    #[error("profile is not an equilibrium: exploitability {exploitability:e} exceeds {tol:e}")]
    NotAnEquilibrium { exploitability: f64, tol: f64 },

    #[error("player {player}: action {action} is not a best response")]
    NotBestResponse { player: usize, action: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
