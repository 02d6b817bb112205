use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("alternative index {index} out of range for {alts} alternatives")]
    AlternativeOutOfRange { index: usize, alts: usize },

    #[error("agent index {index} out of range for {agents} agents")]
    AgentOutOfRange { index: usize, agents: usize },

    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),

    #[error("{what} = {value} exceeds the configured cap of {cap}")]
    CapExceeded {
        what: &'static str,
        value: u64,
        cap: u64,
    },

    #[error("{what} requires {required} units of work, over the budget of {budget}")]
    BudgetExceeded {
        what: &'static str,
        required: u128,
        budget: u64,
    },

    #[error("code {code} out of range [0, {limit})")]
    CodeOutOfRange { code: u64, limit: u64 },

    #[error("dimension mismatch: expected n={expected_agents}, m={expected_alts}; got n={agents}, m={alts}")]
    DimensionMismatch {
        expected_agents: usize,
        expected_alts: usize,
        agents: usize,
        alts: usize,
    },

    #[error("rule {0} is not tops-only; manipulable profiles are undefined for it")]
    NotTopsOnly(String),

    #[error("rule {0} is not tops-only and efficient")]
    NotTopsEfficient(String),

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("unknown lemma id `{0}`")]
    UnknownLemma(String),

    #[error("profile {profile} is classified both or neither manipulable and dictatorial")]
    ClassificationConflict { profile: String },

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn parse(position: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            position,
            message: message.into(),
        }
    }
}
