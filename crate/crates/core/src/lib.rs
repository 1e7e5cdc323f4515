//! Exact solution counts for `(a_1 x_1^{m_1} + … + a_n x_n^{m_n})^k = b x_1^{k_1} ⋯ x_n^{k_n}`
//! over finite fields.

pub mod charsum;
pub mod cli;
pub mod counter;
pub mod diagonal;
pub mod eqmodel;
pub mod error;
pub mod gf;
pub mod integrality;
pub mod numth;
pub mod sampling;
pub mod selftest;
pub mod tables;

pub use error::{Error, Result};
pub use gf::{Elem, FieldTable};
