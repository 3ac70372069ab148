// `!(x > 0.0)` also rejects NaN, which is the point
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod body;
mod cells;
pub mod context;
pub mod convex;
pub mod envelopes;
pub mod error;
pub mod functionals;
pub mod grid;
pub mod harness;
pub mod monge_ampere;

pub use body::GradientBody;
pub use context::ModelContext;
pub use error::{Error, Result};
pub use functionals::{Extended, Weight};
pub use grid::{DiscreteMeasure, GridDomain, ScalarField};
