use thiserror::Error;

use crate::scenario::BellScenario;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scenario (n={n}, m={m}, v={v}): need n >= 1, m >= 1, v >= 2")]
    InvalidScenario { n: usize, m: usize, v: usize },

    #[error("invalid box: {0}")]
    InvalidBox(String),

    #[error("correlators reconstruct p[{a}{b}|{x}{y}] = {value}, outside [0, 1]")]
    CorrelatorInfeasible {
        a: usize,
        b: usize,
        x: usize,
        y: usize,
        value: f64,
    },

    #[error("operation needs the (2,2,2) scenario, got {0}")]
    WrongScenario(BellScenario),

    #[error("invalid mixing weights: {0}")]
    WeightError(String),

    #[error("boxes belong to different scenarios: {0} vs {1}")]
    ScenarioMismatch(BellScenario, BellScenario),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid classical model: {0}")]
    InvalidModel(String),

    #[error("branch dimensions disagree: {0}")]
    DimensionMismatch(String),

    #[error("{count} deterministic strategies exceed the cap of {cap}")]
    TooLarge { count: u128, cap: u128 },

    #[error("anchor box is not in the queried set (best distance {distance:e})")]
    AnchorInfeasible { distance: f64 },

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("linear program failed: {0}")]
    Lp(String),

    #[error("unknown box label `{0}`")]
    UnknownLabel(String),

    #[error("unknown claim id `{0}`")]
    UnknownClaim(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
