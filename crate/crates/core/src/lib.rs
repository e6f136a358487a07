//! Exact arithmetic in fields of iterated Laurent series with twisted
//! monomial orders, with residue and constant-term calculus on top.

pub mod calculus;
pub mod coeff;
pub mod driver;
pub mod error;
pub mod expr;
pub mod identities;
pub mod json;
pub mod kernel;
pub mod order;
pub mod series;

pub use coeff::Coefficient;
pub use error::{MnError, Result};
pub use order::{ExponentVector, FieldSpec, Grading, OrderKey, OrderTwist, PrecisionBox};
pub use series::{Budget, Series, Term};
