//! Graphs of groups with finite edge groups and the coarse geometry of their
//! fundamental groups: exact normal forms, Bass-Serre trees, Cayley balls,
//! separation verifiers and finite-depth boundary approximations.

pub mod abelian;
pub mod bass_serre;
pub mod boundary;
pub mod corpus;
mod dsu;
pub mod fundgroup;
pub mod gog;
pub mod groups;
pub mod separation;

pub use abelian::AbelianInvariants;
pub use fundgroup::{emit_presentation, word_metric_ball, CayleyBall, FundamentalGroup, GeneratingSet, NormalForm, Presentation};
pub use gog::{parse_gog, GraphOfGroups, ParseError, SpanningData};
pub use groups::{Elem, FiniteGroup, GroupBackend};

/// An enumeration grew past its configured element cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("element budget of {limit} exceeded")]
pub struct BudgetExceeded {
    pub limit: usize,
}
