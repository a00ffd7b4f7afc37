pub mod coefflattice;
pub mod complements;
pub mod dualgraph;
pub mod discrepancy;
pub mod error;
pub mod explorer;

pub use error::{Error, Result};
