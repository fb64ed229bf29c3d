//! Numerical laboratory for second-main-theorem inequalities of holomorphic
//! curves into projective varieties.
//!
//! The crate is organised bottom-up:
//!
//! * [`algebra`]: exact forms over ℚ(i) and hypersurfaces with analytic coefficients;
//! * [`groebner`]: Gröbner bases, Hilbert functions, dimension and degree;
//! * [`position`]: distributive constants and subgeneral position;
//! * [`weights`]: Hilbert weights, Chow-weight estimates and their inequalities;
//! * [`analytic`]: analytic functions, Wronskians, zero divisors;
//! * [`nevanlinna`]: characteristic, counting and proximity functions, defects;
//! * [`smt`]: truncation constants and the main inequality;
//! * [`scenario`]: scenario files and report emission.

pub mod algebra;
pub mod analytic;
pub mod error;
pub mod groebner;
pub mod interval;
pub mod nevanlinna;
pub mod position;
pub mod scenario;
pub mod smt;
pub mod weights;

pub use error::{Error, Result};
