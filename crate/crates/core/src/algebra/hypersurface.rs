use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_traits::Zero;

use super::gaussian::GaussianRational;
use super::monomial::Monomial;
use super::parse::parse_monomial;
use super::poly::HomogPoly;
use crate::analytic::{AnalyticFunction, Curve, NumericFunction};
use crate::error::{Error, Result};

/// A (possibly moving) hypersurface `Q = Σ_I a_I(z) x^I` of degree `d`
/// whose coefficients are analytic functions of the disc variable.
#[derive(Clone, PartialEq)]
pub struct Hypersurface {
    num_vars: usize,
    degree: u32,
    coeffs: BTreeMap<Monomial, AnalyticFunction>,
}

impl Hypersurface {
    pub fn new(num_vars: usize, degree: u32, coeffs: BTreeMap<Monomial, AnalyticFunction>) -> Result<Self> {
        for m in coeffs.keys() {
            if m.num_vars() != num_vars {
                return Err(Error::DimensionMismatch { expected: num_vars, got: m.num_vars() });
            }
            if m.degree() != degree {
                return Err(Error::DegreeMismatch { expected: degree, got: m.degree() });
            }
        }
        let coeffs: BTreeMap<_, _> = coeffs.into_iter().filter(|(_, a)| !a.is_zero()).collect();
        if coeffs.is_empty() {
            return Err(Error::Degenerate("hypersurface with all coefficients zero".into()));
        }
        Ok(Self { num_vars, degree, coeffs })
    }

    /// A fixed hypersurface from a constant-coefficient form.
    pub fn fixed(p: &HomogPoly) -> Result<Self> {
        Self::new(
            p.num_vars(),
            p.degree(),
            p.terms().map(|(m, c)| (m.clone(), AnalyticFunction::constant(c.clone()))).collect(),
        )
    }

    /// Builds from `monomial-string → function-string` pairs.
    pub fn parse<'a, I>(num_vars: usize, degree: u32, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut coeffs = BTreeMap::new();
        for (mono, func) in entries {
            let m = parse_monomial(mono, num_vars)?;
            let f = AnalyticFunction::parse(func)?;
            let slot = coeffs.entry(m).or_insert_with(AnalyticFunction::zero);
            *slot = slot.add(&f)?;
        }
        Self::new(num_vars, degree, coeffs)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn coeffs(&self) -> &BTreeMap<Monomial, AnalyticFunction> {
        &self.coeffs
    }

    pub fn is_fixed(&self) -> bool {
        self.coeffs.values().all(|a| a.is_constant())
    }

    /// The constant form, for fixed hypersurfaces.
    pub fn as_fixed(&self) -> Option<HomogPoly> {
        let terms: Option<Vec<(Monomial, GaussianRational)>> = self
            .coeffs
            .iter()
            .map(|(m, a)| a.as_constant().map(|c| (m.clone(), c)))
            .collect();
        HomogPoly::from_terms(self.num_vars, self.degree, terms?).ok()
    }

    /// The form `Q(z)` at an exact point; `None` at a pole or when a
    /// coefficient has no exact value there.
    pub fn at(&self, z: &GaussianRational) -> Option<HomogPoly> {
        let terms: Option<Vec<(Monomial, GaussianRational)>> = self
            .coeffs
            .iter()
            .map(|(m, a)| a.eval_exact(z).map(|c| (m.clone(), c)))
            .collect();
        HomogPoly::from_terms(self.num_vars, self.degree, terms?).ok()
    }

    /// Whether `z` is a zero or pole of some nonzero coefficient.
    pub fn is_bad_point(&self, z: &GaussianRational) -> bool {
        self.coeffs.values().any(|a| match a.eval_exact(z) {
            Some(v) => v.is_zero(),
            None => true,
        })
    }

    /// `Q(f) = Σ a_I f_0^{i_0} ⋯ f_N^{i_N}` as an analytic function.
    pub fn compose(&self, curve: &Curve) -> Result<AnalyticFunction> {
        if curve.num_components() != self.num_vars {
            return Err(Error::DimensionMismatch { expected: self.num_vars, got: curve.num_components() });
        }
        let mut powers: Vec<Vec<AnalyticFunction>> = curve
            .components
            .iter()
            .map(|f| vec![AnalyticFunction::one(), f.clone()])
            .collect();
        let mut acc = AnalyticFunction::zero();
        for (m, a) in &self.coeffs {
            let mut t = a.clone();
            for (i, &e) in m.exponents().iter().enumerate() {
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul(&curve.components[i])?;
                    powers[i].push(next);
                }
                if e > 0 {
                    t = t.mul(&powers[i][e as usize])?;
                }
            }
            acc = acc.add(&t)?;
        }
        Ok(acc)
    }

    /// `Q̃ = Σ (a_I / a_{I₀}) x^I` with `I₀ = (d, 0, …, 0)`.
    pub fn normalize(&self) -> Result<Hypersurface> {
        let i0 = Monomial::pure_power(self.num_vars, 0, self.degree);
        let lead = self
            .coeffs
            .get(&i0)
            .cloned()
            .ok_or(Error::Normalization { degree: self.degree })?;
        let coeffs = self
            .coeffs
            .iter()
            .map(|(m, a)| {
                let c = if *m == i0 { AnalyticFunction::one() } else { a.div(&lead)? };
                Ok((m.clone(), c))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        Hypersurface::new(self.num_vars, self.degree, coeffs)
    }

    pub fn numeric(&self) -> NumericHypersurface {
        NumericHypersurface {
            terms: self.coeffs.iter().map(|(m, a)| (m.exponents().to_vec(), a.numeric())).collect(),
        }
    }
}

impl fmt::Display for Hypersurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = self.as_fixed() {
            return write!(f, "{p}");
        }
        for (k, (m, a)) in self.coeffs.iter().rev().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "[{a}]*{m}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Hypersurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Floating-point evaluation of `Q(z)(x)` and of `‖Q(z)‖`.
#[derive(Clone, Debug)]
pub struct NumericHypersurface {
    terms: Vec<(Vec<u32>, NumericFunction)>,
}

impl NumericHypersurface {
    /// `Q(z)` evaluated at the point `x`.
    pub fn eval(&self, z: Complex64, x: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, a)| {
                e.iter().zip(x).fold(a.eval(z), |acc, (&k, xi)| acc * xi.powu(k))
            })
            .sum()
    }

    /// Euclidean norm of the coefficient vector at `z`.
    pub fn coeff_norm(&self, z: Complex64) -> f64 {
        self.terms.iter().map(|(_, a)| a.eval(z).norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Least common multiple of the degrees.
pub fn lcm_degree(family: &[Hypersurface]) -> u32 {
    family.iter().fold(1u32, |acc, q| num_integer::lcm(acc, q.degree().max(1)))
}
