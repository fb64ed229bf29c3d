use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::gaussian::GaussianRational;
use super::monomial::Monomial;
use crate::error::{Error, Result};

/// Homogeneous polynomial over ℚ(i), stored sparsely in grevlex order.
///
/// Terms are kept in ascending monomial order, so the leading term is the
/// last entry. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HomogPoly {
    num_vars: usize,
    degree: u32,
    terms: BTreeMap<Monomial, GaussianRational>,
}

impl HomogPoly {
    pub fn zero(num_vars: usize, degree: u32) -> Self {
        Self { num_vars, degree, terms: BTreeMap::new() }
    }

    pub fn monomial(m: Monomial, c: GaussianRational) -> Self {
        let mut p = Self::zero(m.num_vars(), m.degree());
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn var(num_vars: usize, i: usize) -> Self {
        Self::monomial(Monomial::var(num_vars, i), GaussianRational::one())
    }

    /// Linear form `Σ c_i x_i`.
    pub fn linear(coeffs: &[GaussianRational]) -> Self {
        let n = coeffs.len();
        Self::from_terms(
            n,
            1,
            coeffs.iter().enumerate().map(|(i, c)| (Monomial::var(n, i), c.clone())),
        )
        .expect("linear terms all have degree 1")
    }

    /// Builds from `(monomial, coefficient)` pairs; repeated monomials are summed.
    pub fn from_terms<I>(num_vars: usize, degree: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, GaussianRational)>,
    {
        let mut p = Self::zero(num_vars, degree);
        for (m, c) in terms {
            if m.num_vars() != num_vars {
                return Err(Error::DimensionMismatch { expected: num_vars, got: m.num_vars() });
            }
            if m.degree() != degree {
                return Err(Error::DegreeMismatch { expected: degree, got: m.degree() });
            }
            p.add_term(m, &c);
        }
        Ok(p)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> GaussianRational {
        self.terms.get(m).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn leading(&self) -> Option<(&Monomial, &GaussianRational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.keys().next_back()
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: &GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub(crate) fn take_terms(self) -> BTreeMap<Monomial, GaussianRational> {
        self.terms
    }

    fn check_compatible(&self, o: &HomogPoly) -> Result<()> {
        if self.num_vars != o.num_vars {
            return Err(Error::DimensionMismatch { expected: self.num_vars, got: o.num_vars });
        }
        if self.degree != o.degree && !self.is_zero() && !o.is_zero() {
            return Err(Error::DegreeMismatch { expected: self.degree, got: o.degree });
        }
        Ok(())
    }

    /// Sum of two forms of the same degree (a zero form adapts to the other's degree).
    pub fn add(&self, o: &HomogPoly) -> Result<HomogPoly> {
        self.check_compatible(o)?;
        let (mut acc, other) = if self.is_zero() { (o.clone(), self) } else { (self.clone(), o) };
        for (m, c) in &other.terms {
            acc.add_term(m.clone(), c);
        }
        Ok(acc)
    }

    pub fn sub(&self, o: &HomogPoly) -> Result<HomogPoly> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> HomogPoly {
        HomogPoly {
            num_vars: self.num_vars,
            degree: self.degree,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, s: &GaussianRational) -> HomogPoly {
        if s.is_zero() {
            return HomogPoly::zero(self.num_vars, self.degree);
        }
        HomogPoly {
            num_vars: self.num_vars,
            degree: self.degree,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    /// `c · x^m · self`.
    pub fn mul_term(&self, m: &Monomial, c: &GaussianRational) -> HomogPoly {
        if c.is_zero() {
            return HomogPoly::zero(self.num_vars, self.degree + m.degree());
        }
        HomogPoly {
            num_vars: self.num_vars,
            degree: self.degree + m.degree(),
            terms: self.terms.iter().map(|(t, a)| (t.mul(m), a * c)).collect(),
        }
    }

    pub fn mul(&self, o: &HomogPoly) -> Result<HomogPoly> {
        if self.num_vars != o.num_vars {
            return Err(Error::DimensionMismatch { expected: self.num_vars, got: o.num_vars });
        }
        let mut acc = HomogPoly::zero(self.num_vars, self.degree + o.degree);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                acc.add_term(m1.mul(m2), &(c1 * c2));
            }
        }
        Ok(acc)
    }

    pub fn pow(&self, e: u32) -> HomogPoly {
        let mut acc = HomogPoly::monomial(Monomial::one(self.num_vars), GaussianRational::one());
        for _ in 0..e {
            acc = acc.mul(self).expect("same ring");
        }
        acc
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> HomogPoly {
        match self.leading() {
            Some((_, c)) if !c.is_one() => self.scale(&c.inv().expect("nonzero")),
            _ => self.clone(),
        }
    }

    pub fn eval(&self, point: &[Complex64]) -> Result<Complex64> {
        if point.len() != self.num_vars {
            return Err(Error::DimensionMismatch { expected: self.num_vars, got: point.len() });
        }
        Ok(self
            .terms
            .iter()
            .map(|(m, c)| {
                m.0.iter()
                    .zip(point)
                    .fold(c.to_complex(), |acc, (&e, x)| acc * x.powu(e))
            })
            .sum())
    }

    pub fn eval_exact(&self, point: &[GaussianRational]) -> Result<GaussianRational> {
        if point.len() != self.num_vars {
            return Err(Error::DimensionMismatch { expected: self.num_vars, got: point.len() });
        }
        let mut acc = GaussianRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (&e, x) in m.0.iter().zip(point) {
                if e > 0 {
                    t = &t * &x.pow(e);
                }
            }
            acc += &t;
        }
        Ok(acc)
    }

    /// Substitutes `x_i ↦ Σ_j rows[i][j]·x_j`.
    pub fn linear_substitute(&self, rows: &[Vec<GaussianRational>]) -> Result<HomogPoly> {
        if rows.len() != self.num_vars {
            return Err(Error::DimensionMismatch { expected: self.num_vars, got: rows.len() });
        }
        let images: Vec<HomogPoly> = rows.iter().map(|r| HomogPoly::linear(r)).collect();
        let mut acc = HomogPoly::zero(self.num_vars, self.degree);
        for (m, c) in &self.terms {
            let mut t = HomogPoly::monomial(Monomial::one(self.num_vars), c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = t.mul(&images[i].pow(e))?;
                }
            }
            acc = acc.add(&t)?;
        }
        Ok(acc)
    }

    /// Euclidean norm of the coefficient vector.
    pub fn coeff_norm(&self) -> f64 {
        self.terms.values().map(|c| c.to_complex().norm_sqr()).sum::<f64>().sqrt()
    }
}

impl fmt::Display for HomogPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let (neg, mag) = if c.is_real() && c.re.is_negative() {
                (true, -c)
            } else {
                (false, c.clone())
            };
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let is_const = m.degree() == 0;
            if mag.is_one() && !is_const {
                write!(f, "{m}")?;
            } else if is_const {
                write!(f, "{mag}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for HomogPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Non-negative rational weights, one per variable (or per hypersurface).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightVector(Vec<BigRational>);

impl WeightVector {
    pub fn new(entries: Vec<BigRational>) -> Result<Self> {
        if let Some(pos) = entries.iter().position(|c| c.is_negative()) {
            return Err(Error::Validation {
                field: format!("weights[{pos}]"),
                message: "weights must be non-negative".into(),
            });
        }
        Ok(Self(entries))
    }

    pub fn from_ints(v: &[i64]) -> Result<Self> {
        Self::new(v.iter().map(|&x| BigRational::from_integer(x.into())).collect())
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> BigRational {
        self.0.iter().fold(BigRational::zero(), |a, b| a + b)
    }

    pub fn max(&self) -> BigRational {
        self.0.iter().cloned().max().unwrap_or_else(BigRational::zero)
    }

    pub fn scale(&self, s: &BigRational) -> Result<Self> {
        Self::new(self.0.iter().map(|c| c * s).collect())
    }

    pub fn plus(&self, o: &WeightVector) -> Result<Self> {
        if self.len() != o.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), got: o.len() });
        }
        Self::new(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    /// `a · c` for an exponent vector.
    pub fn dot(&self, m: &Monomial) -> BigRational {
        m.0.iter()
            .zip(&self.0)
            .fold(BigRational::zero(), |acc, (&e, c)| acc + c * BigRational::from_integer(e.into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::parse_homog;

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn eval_examples() {
        let conic = parse_homog("x0*x2 - x1^2", 3).unwrap();
        assert_eq!(conic.eval(&[c(1.0), c(2.0), c(4.0)]).unwrap(), c(0.0));
        let sq = parse_homog("x0^2", 2).unwrap();
        assert_eq!(sq.eval(&[c(3.0), c(1.0)]).unwrap(), c(9.0));
        let q = parse_homog("x0^2 + x1^2", 2).unwrap();
        let v = q.eval(&[c(1.0), Complex64::new(0.0, 1.0)]).unwrap();
        assert!(v.norm() < 1e-15);
        let exact = q
            .eval_exact(&[GaussianRational::one(), GaussianRational::i()])
            .unwrap();
        assert!(exact.is_zero());
    }

    #[test]
    fn eval_dimension_mismatch() {
        let q = parse_homog("x0^2 + x1^2", 2).unwrap();
        assert!(matches!(q.eval(&[c(1.0)]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn add_degree_mismatch() {
        let a = parse_homog("x0", 2).unwrap();
        let b = parse_homog("x0^2", 2).unwrap();
        assert!(a.add(&b).is_err());
        assert!(a.add(&HomogPoly::zero(2, 5)).is_ok());
    }

    #[test]
    fn linear_substitution_swaps_variables() {
        let p = parse_homog("x0^2 + 2*x0*x1", 2).unwrap();
        let one = GaussianRational::one();
        let zero = GaussianRational::zero();
        let swap = vec![vec![zero.clone(), one.clone()], vec![one, zero]];
        let q = p.linear_substitute(&swap).unwrap();
        assert_eq!(q, parse_homog("x1^2 + 2*x0*x1", 2).unwrap());
    }

    #[test]
    fn negative_weight_rejected() {
        assert!(WeightVector::from_ints(&[1, -1]).is_err());
    }
}
