//! Exact-rational engine for updating beliefs when the state space grows.
//!
//! Probabilities live on finite partition algebras over a labelled state
//! space. An update goes from a prior on a coarse algebra to a posterior on a
//! finer one; [`engine`] decides whether some interim measure on the fine
//! algebra extends the prior and conditions to the posterior, and builds it.

pub mod algebra;
pub mod commands;
pub mod decision;
pub mod engine;
pub mod error;
pub mod logic;
pub mod measure;
pub mod rational;
pub mod report;
pub mod sample;
pub mod scenario;

pub use algebra::{Algebra, Event, StateSpace};
pub use engine::{classify_update, Chain, UpdatePair, UpdateReport, UpdateStatus};
pub use error::{Error, Result};
pub use measure::Measure;
pub use rational::Rational;
