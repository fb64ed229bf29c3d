//! Exact algebra over ℚ(i): homogeneous forms, monomials, hypersurfaces
//! with analytic coefficients, and the literal syntax used by scenarios.

pub mod gaussian;
pub mod hypersurface;
pub mod monomial;
pub mod parse;
pub mod poly;

pub use gaussian::GaussianRational;
pub use hypersurface::{lcm_degree, Hypersurface, NumericHypersurface};
pub use monomial::{binomial, monomials_of_degree, Monomial};
pub use parse::{parse_gaussian, parse_homog, parse_monomial, parse_rational};
pub use poly::{HomogPoly, WeightVector};
