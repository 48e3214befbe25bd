use thiserror::Error;

use crate::engine::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("state space must contain at least one state")]
    EmptySpace,
    #[error("duplicate state label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("state index {index} out of range for a space of {size} states")]
    StateOutOfRange { index: usize, size: usize },

    #[error("blocks overlap at state {state}")]
    Overlap { state: usize },
    #[error("blocks do not cover the state space (state {state} missing)")]
    Coverage { state: usize },
    #[error("empty block in partition")]
    EmptyBlock,
    #[error("operands live on different state spaces")]
    SpaceMismatch,
    #[error("event must be nonempty")]
    EmptyEvent,

    #[error("event is not measurable in the algebra")]
    NotMeasurable,
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("conditioning on an event of zero mass")]
    ZeroMassConditioning,
    #[error("algebra does not refine the coarser algebra")]
    NotARefinement,
    #[error("{count} extension vertices exceed the cap of {cap}")]
    Explosion { count: u128, cap: u64 },
    #[error("invalid rational `{0}`")]
    InvalidRational(String),

    #[error("posterior is not commensurate to the prior: {0}")]
    NotCommensurate(Violation),
    #[error("evidence has outer prior measure 0; no canonical witness exists")]
    TriviallyConditioned,
    #[error("original space does not embed in the expanded space: {0}")]
    Embedding(String),
    #[error("link {index} -> {next} conditions on an event of outer measure 0", next = .index + 1)]
    TrivialLink { index: usize },
    #[error("link {index} -> {next} is not an extended Bayesian update: {violation}", next = .index + 1)]
    BrokenLink { index: usize, violation: Violation },
    #[error("chain needs at least one period")]
    EmptyChain,

    #[error("unknown prize `{0}`")]
    UnknownPrize(String),
    #[error("invalid utility index: {0}")]
    InvalidUtility(String),
    #[error("{atoms} coarse atoms exceed the enumeration cap of {cap}")]
    TooManyAtoms { atoms: usize, cap: usize },

    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown proposition `{0}`")]
    UnknownProposition(String),
    #[error("too many propositions ({0}); the valuation space is capped at 2^20 states")]
    TooManyPropositions(usize),
    #[error("awareness shrinks between periods {from} and {to}: `{prop}` is forgotten")]
    AwarenessShrink { from: usize, to: usize, prop: String },
    #[error("period {period}: {msg}")]
    MassAlgebraMismatch { period: usize, msg: String },

    #[error("scenario: {0}")]
    Scenario(String),
}

impl Error {
    /// Errors caused by a configured resource cap rather than by bad input.
    pub fn is_resource_cap(&self) -> bool {
        matches!(self, Error::Explosion { .. } | Error::TooManyAtoms { .. })
    }
}
