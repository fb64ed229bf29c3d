//! One-variable analytic functions: polynomials, rational functions and
//! exponential polynomials, with derivatives, Wronskians and zero divisors.

pub mod function;
pub mod upoly;
pub mod zeros;

pub use function::{wronskian, AnalyticFunction, Curve, NumericCurve, NumericFunction, EXP_TERM_BUDGET};
pub use upoly::UPoly;
pub use zeros::{circle_winding, polynomial_zeros, zeros_by_winding, zeros_in_disc, Divisor, DivisorPoint};
