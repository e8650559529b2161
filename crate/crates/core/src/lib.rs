// Negated float comparisons are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod characterization;
pub mod cli;
pub mod distributions;
pub mod error;
pub mod estimation;
pub mod measures;
pub mod numerics;

pub use distributions::{Distribution, Family, FamilyTag, Support};
pub use error::{Error, Result};
pub use numerics::{QuadratureConfig, RootConfig};
