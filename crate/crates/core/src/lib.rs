//! Numerical laboratory for two-shift correlation sums over zeros of the
//! Riemann zeta function.

// negated comparisons reject NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// sieve loops index several parallel tables
#![allow(clippy::needless_range_loop)]

pub mod arith;
pub mod characters;
pub mod contour;
pub mod correlation;
pub mod error;
pub mod lemmas;
pub mod quadrature;
pub mod summation;
pub mod zeta;
pub mod zeros;

pub use error::{LabError, Result};
pub use num_complex::Complex64;
