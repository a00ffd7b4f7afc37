//! Exact coefficients in a finitely generated Q-linear span of reals.

pub mod basis;
pub mod linalg;
pub mod map;
pub mod partition;
pub mod rational;
pub mod span;

pub use basis::{BasisDescriptor, EnclosureSource, Interval, Symbol, DEFAULT_REFINE_BUDGET};
pub use map::{apply_map, apply_to_coefficients, QLinearMap};
pub use partition::{partition_of_one, shrink_delta, Multilinear, PartitionEntry, PartitionOfOne, ShrunkDelta};
pub use rational::Rational;
pub use span::{compare, SpanElement};
