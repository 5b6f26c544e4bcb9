//! Groebner bases for the relation ideal of doubly periodic arrays via the
//! Berlekamp-Massey-Sakata iteration on the index set S(t), and locator
//! decoding of bivariate abelian codes built on it.

pub mod bms;
pub mod cli;
pub mod codes;
pub mod ff;
pub mod golden;
pub mod locator;
pub mod oracle;
pub mod order;
pub mod poly;

pub use bms::{run, BmsError, BmsState, RunOutput, TraceRecord};
pub use codes::{decode, AbelianCode, Word};
pub use ff::{Field, FieldElement};
pub use locator::{AlphaPair, PeriodicArray};
pub use order::{DeltaSet, Point, SofT, TotalOrder};
pub use poly::BivariatePolynomial;
