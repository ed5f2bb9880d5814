//! Interval exchange transformations, Rauzy-Veech induction and reduced triples.

pub mod combinat;
pub mod error;
pub mod harness;
pub mod iet;
pub mod induction;
pub mod matrices;
pub mod reduction;
pub mod triples;

pub use combinat::{Alphabet, Arrow, Kind, Letter, Path, Permutation, RauzyClass};
pub use error::{Error, Result};
pub use iet::{Iet, Scalar, Triple};
pub use induction::InductionState;
pub use matrices::{QVector, VisitMatrix};
pub use reduction::DecoratedClass;
