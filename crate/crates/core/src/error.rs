use thiserror::Error;

use crate::equilibrium::ExistenceReport;
use crate::model::Theory;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A scenario input violates one of the model invariants.
    #[error("invalid {field}: {message}")]
    Invalid { field: String, message: String },

    #[error("invalid parameter {name}: {message}")]
    Parameter { name: &'static str, message: String },

    #[error("profile has {got} actions but the scenario has {expected} players")]
    ProfileLength { expected: usize, got: usize },

    #[error("{players} players would require enumerating 2^{players} profiles (limit {limit})")]
    TooManyPlayers { players: usize, limit: usize },

    #[error("operation supports exactly {expected} players, scenario has {got}")]
    UnsupportedPlayerCount { expected: usize, got: usize },

    #[error("no proper mixed equilibrium: existence condition fails\n{report}")]
    NoProperEquilibrium { report: Box<ExistenceReport> },

    #[error("degenerate game: player {player} has a zero indifference denominator")]
    DegenerateGame { player: usize },

    #[error("no proper {theory} equilibrium: indifference ratio {ratio} for player {player} is not positive")]
    NoProperIndifference {
        theory: Theory,
        player: usize,
        ratio: f64,
    },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("sweep produced no feasible point")]
    EmptySweep,

    #[error("failed to parse scenario: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            message: message.into(),
        }
    }
}
