use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_complex::Complex64;
use num_traits::Zero;

use super::upoly::{horner, UPoly};
use crate::algebra::parse::{parse_with, ExprAlgebra};
use crate::algebra::GaussianRational;
use crate::error::{Error, Result};

/// Default cap on the number of `c·z^k·e^{λz}` terms an exponential
/// polynomial may carry after a product.
pub const EXP_TERM_BUDGET: usize = 10_000;

/// A holomorphic function of one complex variable in one of three exact
/// representations. Values are kept canonical:
///
/// * `Rational` has a monic non-constant denominator coprime to the numerator;
/// * `ExpPoly` has distinct exponents, nonzero polynomial parts, and at
///   least one nonzero exponent (otherwise it is a `Polynomial`).
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum AnalyticFunction {
    Polynomial(UPoly),
    Rational { num: UPoly, den: UPoly },
    ExpPoly(Vec<(UPoly, GaussianRational)>),
}

use AnalyticFunction::*;

impl AnalyticFunction {
    pub fn zero() -> Self {
        Polynomial(UPoly::zero())
    }

    pub fn one() -> Self {
        Polynomial(UPoly::one())
    }

    pub fn constant(c: GaussianRational) -> Self {
        Polynomial(UPoly::constant(c))
    }

    pub fn z() -> Self {
        Polynomial(UPoly::z())
    }

    pub fn poly(p: UPoly) -> Self {
        Polynomial(p)
    }

    /// `e^{λz}`.
    pub fn exp(lambda: GaussianRational) -> Self {
        Self::from_exp_terms(vec![(UPoly::one(), lambda)])
    }

    pub fn rational(num: UPoly, den: UPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Degenerate("rational function with zero denominator".into()));
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            (num.exact_div(&g).unwrap(), den.exact_div(&g).unwrap())
        };
        let lead_inv = den.lead().inv().unwrap();
        let (num, den) = (num.scale(&lead_inv), den.scale(&lead_inv));
        if den.is_constant() {
            Ok(Polynomial(num))
        } else {
            Ok(Rational { num, den })
        }
    }

    /// Canonicalizes a sum `Σ p_j(z) e^{λ_j z}`.
    pub fn from_exp_terms(terms: Vec<(UPoly, GaussianRational)>) -> Self {
        let mut merged: BTreeMap<GaussianRational, UPoly> = BTreeMap::new();
        for (p, l) in terms {
            let e = merged.entry(l).or_insert_with(UPoly::zero);
            *e = e.add(&p);
        }
        merged.retain(|_, p| !p.is_zero());
        if merged.keys().all(|l| l.is_zero()) {
            return Polynomial(merged.into_values().next().unwrap_or_else(UPoly::zero));
        }
        ExpPoly(merged.into_iter().map(|(l, p)| (p, l)).collect())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Polynomial(p) if p.is_zero())
    }

    pub fn as_constant(&self) -> Option<GaussianRational> {
        match self {
            Polynomial(p) => p.as_constant(),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            Polynomial(_) => "poly",
            Rational { .. } => "rational",
            ExpPoly(_) => "exppoly",
        }
    }

    fn exp_terms(&self) -> Option<Vec<(UPoly, GaussianRational)>> {
        match self {
            Polynomial(p) => Some(vec![(p.clone(), GaussianRational::zero())]),
            ExpPoly(t) => Some(t.clone()),
            Rational { .. } => None,
        }
    }

    /// `(num, den)` for the polynomial and rational variants.
    fn as_fraction(&self) -> Option<(UPoly, UPoly)> {
        match self {
            Polynomial(p) => Some((p.clone(), UPoly::one())),
            Rational { num, den } => Some((num.clone(), den.clone())),
            ExpPoly(_) => None,
        }
    }

    fn term_count(terms: &[(UPoly, GaussianRational)]) -> usize {
        terms
            .iter()
            .map(|(p, _)| p.coeffs().iter().filter(|c| !c.is_zero()).count())
            .sum()
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        if let (Some(a), Some(b)) = (self.exp_terms(), o.exp_terms()) {
            return Ok(Self::from_exp_terms(a.into_iter().chain(b).collect()));
        }
        match (self.as_fraction(), o.as_fraction()) {
            (Some((n1, d1)), Some((n2, d2))) => {
                Self::rational(n1.mul(&d2).add(&n2.mul(&d1)), d1.mul(&d2))
            }
            _ => Err(Error::Unsupported(format!(
                "sum of {} and {} functions",
                self.variant_name(),
                o.variant_name()
            ))),
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            Polynomial(p) => Polynomial(p.neg()),
            Rational { num, den } => Rational { num: num.neg(), den: den.clone() },
            ExpPoly(t) => ExpPoly(t.iter().map(|(p, l)| (p.neg(), l.clone())).collect()),
        }
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        match self {
            Polynomial(p) => Polynomial(p.scale(c)),
            Rational { num, den } => Rational { num: num.scale(c), den: den.clone() },
            ExpPoly(t) => ExpPoly(t.iter().map(|(p, l)| (p.scale(c), l.clone())).collect()),
        }
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.mul_with_budget(o, EXP_TERM_BUDGET)
    }

    pub fn mul_with_budget(&self, o: &Self, budget: usize) -> Result<Self> {
        if self.is_zero() || o.is_zero() {
            return Ok(Self::zero());
        }
        if let Some(c) = self.as_constant() {
            return Ok(o.scale(&c));
        }
        if let Some(c) = o.as_constant() {
            return Ok(self.scale(&c));
        }
        if let (Some(a), Some(b)) = (self.exp_terms(), o.exp_terms()) {
            let mut out = Vec::with_capacity(a.len() * b.len());
            for (p, l) in &a {
                for (q, m) in &b {
                    out.push((p.mul(q), l + m));
                }
            }
            let f = Self::from_exp_terms(out);
            if let ExpPoly(t) = &f {
                if Self::term_count(t) > budget {
                    return Err(Error::BudgetExceeded { what: "exponential-polynomial term", limit: budget });
                }
            }
            return Ok(f);
        }
        match (self.as_fraction(), o.as_fraction()) {
            (Some((n1, d1)), Some((n2, d2))) => Self::rational(n1.mul(&n2), d1.mul(&d2)),
            _ => Err(Error::Unsupported(format!(
                "product of {} and {} functions",
                self.variant_name(),
                o.variant_name()
            ))),
        }
    }

    /// Quotient within the variant classes: fractions of polynomials, or
    /// division by a single exponential term `c·e^{λz}`.
    pub fn div(&self, o: &Self) -> Result<Self> {
        if o.is_zero() {
            return Err(Error::Degenerate("division by the zero function".into()));
        }
        if let Some(c) = o.as_constant() {
            return Ok(self.scale(&c.inv().unwrap()));
        }
        if let (Some((n1, d1)), Some((n2, d2))) = (self.as_fraction(), o.as_fraction()) {
            return Self::rational(n1.mul(&d2), d1.mul(&n2));
        }
        if let ExpPoly(t) = o {
            if t.len() == 1 {
                if let Some(c) = t[0].0.as_constant() {
                    let inv = Self::exp(-&t[0].1).scale(&c.inv().unwrap());
                    return self.mul(&inv);
                }
            }
        }
        Err(Error::Unsupported(format!(
            "quotient of {} by {} function",
            self.variant_name(),
            o.variant_name()
        )))
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Exact `order`-th derivative; every variant class is closed under d/dz.
    pub fn derivative(&self, order: u32) -> Self {
        let mut f = self.clone();
        for _ in 0..order {
            f = f.derivative_once();
        }
        f
    }

    fn derivative_once(&self) -> Self {
        match self {
            Polynomial(p) => Polynomial(p.derivative()),
            Rational { num, den } => {
                let n = num.derivative().mul(den).sub(&num.mul(&den.derivative()));
                Self::rational(n, den.mul(den)).expect("nonzero denominator")
            }
            ExpPoly(t) => Self::from_exp_terms(
                t.iter()
                    .map(|(p, l)| (p.derivative().add(&p.scale(l)), l.clone()))
                    .collect(),
            ),
        }
    }

    /// Exact value at a Gaussian-rational point; `None` for transcendental
    /// values (nonzero exponents) or at a pole.
    pub fn eval_exact(&self, z: &GaussianRational) -> Option<GaussianRational> {
        match self {
            Polynomial(p) => Some(p.eval_exact(z)),
            Rational { num, den } => {
                let d = den.eval_exact(z);
                (!d.is_zero()).then(|| &num.eval_exact(z) / &d)
            }
            ExpPoly(_) => None,
        }
    }

    pub fn numeric(&self) -> NumericFunction {
        match self {
            Polynomial(p) => NumericFunction::Poly(p.to_complex()),
            Rational { num, den } => NumericFunction::Rational(num.to_complex(), den.to_complex()),
            ExpPoly(t) => NumericFunction::Exp(
                t.iter().map(|(p, l)| (p.to_complex(), l.to_complex())).collect(),
            ),
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.numeric().eval(z)
    }

    /// Parses the component syntax `poly: 1 - 2*z^3`, `rational: (1)/(1-z)`,
    /// `exppoly: (1)*exp(0) + (z)*exp(2*z)`. Without a prefix any variant is accepted.
    pub fn parse(src: &str) -> Result<Self> {
        let (tag, body) = match src.split_once(':') {
            Some((t, b)) => (Some(t.trim()), b),
            None => (None, src),
        };
        let perr = |message: String| Error::Parse { context: format!("function `{src}`"), message };
        let f = parse_with(body, &FunctionAlg).map_err(perr)?;
        let ok = match tag {
            None => true,
            Some("poly") => matches!(f, Polynomial(_)),
            Some("rational") => !matches!(f, ExpPoly(_)),
            Some("exppoly") => !matches!(f, Rational { .. }),
            Some(other) => return Err(perr(format!("unknown variant tag `{other}`"))),
        };
        if !ok {
            return Err(perr(format!("expression is a {} function", f.variant_name())));
        }
        Ok(f)
    }
}

impl fmt::Display for AnalyticFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Polynomial(p) => write!(f, "poly: {p}"),
            Rational { num, den } => write!(f, "rational: ({num})/({den})"),
            ExpPoly(t) => {
                write!(f, "exppoly: ")?;
                for (k, (p, l)) in t.iter().enumerate() {
                    if k > 0 {
                        write!(f, " + ")?;
                    }
                    if l.is_zero() {
                        write!(f, "({p})")?;
                    } else {
                        write!(f, "({p})*exp({l}*z)")?;
                    }
                }
                Ok(())
            }
        }
    }
}

impl fmt::Debug for AnalyticFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

struct FunctionAlg;

impl ExprAlgebra for FunctionAlg {
    type Value = AnalyticFunction;

    fn constant(&self, c: GaussianRational) -> AnalyticFunction {
        AnalyticFunction::constant(c)
    }

    fn variable(&self, name: &str) -> std::result::Result<AnalyticFunction, String> {
        match name {
            "z" => Ok(AnalyticFunction::z()),
            _ => Err(format!("unknown variable `{name}`")),
        }
    }

    fn add(&self, a: AnalyticFunction, b: AnalyticFunction) -> std::result::Result<AnalyticFunction, String> {
        a.add(&b).map_err(|e| e.to_string())
    }

    fn mul(&self, a: AnalyticFunction, b: AnalyticFunction) -> std::result::Result<AnalyticFunction, String> {
        a.mul(&b).map_err(|e| e.to_string())
    }

    fn div(&self, a: AnalyticFunction, b: AnalyticFunction) -> std::result::Result<AnalyticFunction, String> {
        a.div(&b).map_err(|e| e.to_string())
    }

    fn neg(&self, a: AnalyticFunction) -> AnalyticFunction {
        a.neg()
    }

    fn pow(&self, a: AnalyticFunction, e: u32) -> std::result::Result<AnalyticFunction, String> {
        a.pow(e).map_err(|e| e.to_string())
    }

    fn call(&self, name: &str, arg: AnalyticFunction) -> std::result::Result<AnalyticFunction, String> {
        if name != "exp" {
            return Err(format!("unknown function `{name}`"));
        }
        // only exp(λ·z) with rational λ is representable exactly
        match &arg {
            Polynomial(p) if p.degree().unwrap_or(0) <= 1 => {
                let c = p.coeffs();
                if c.first().is_some_and(|c0| !c0.is_zero()) {
                    return Err("exp argument must have no constant term".into());
                }
                Ok(AnalyticFunction::exp(c.get(1).cloned().unwrap_or_else(GaussianRational::zero)))
            }
            _ => Err("exp argument must be linear in z".into()),
        }
    }
}

/// Floating-point image of an [`AnalyticFunction`] for fast evaluation.
#[derive(Clone, Debug)]
pub enum NumericFunction {
    Poly(Vec<Complex64>),
    Rational(Vec<Complex64>, Vec<Complex64>),
    Exp(Vec<(Vec<Complex64>, Complex64)>),
}

impl NumericFunction {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            NumericFunction::Poly(c) => horner(c, z),
            NumericFunction::Rational(n, d) => horner(n, z) / horner(d, z),
            NumericFunction::Exp(t) => t.iter().map(|(p, l)| horner(p, z) * (l * z).exp()).sum(),
        }
    }
}

/// A holomorphic curve `f = (f_0, …, f_N)` on the disc `|z| < domain_r`
/// (`domain_r = ∞` for maps from ℂ).
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub components: Vec<AnalyticFunction>,
    pub domain_r: f64,
}

impl Curve {
    pub fn new(components: Vec<AnalyticFunction>, domain_r: f64) -> Self {
        Self { components, domain_r }
    }

    /// Entire curve with the given components.
    pub fn entire(components: Vec<AnalyticFunction>) -> Self {
        Self::new(components, f64::INFINITY)
    }

    pub fn parse(components: &[&str], domain_r: f64) -> Result<Self> {
        Ok(Self::new(
            components.iter().map(|s| AnalyticFunction::parse(s)).collect::<Result<_>>()?,
            domain_r,
        ))
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn numeric(&self) -> NumericCurve {
        NumericCurve(self.components.iter().map(|c| c.numeric()).collect())
    }
}

/// Floating-point curve evaluation.
#[derive(Clone, Debug)]
pub struct NumericCurve(pub Vec<NumericFunction>);

impl NumericCurve {
    pub fn eval(&self, z: Complex64) -> Vec<Complex64> {
        self.0.iter().map(|f| f.eval(z)).collect()
    }

    /// `log ‖f(z)‖` with the Euclidean norm, computed without overflow.
    pub fn log_norm(&self, z: Complex64) -> f64 {
        log_norm(&self.eval(z))
    }
}

pub(crate) fn log_norm(v: &[Complex64]) -> f64 {
    let m = v.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
    if m == 0.0 || !m.is_finite() {
        return if m == 0.0 { f64::NEG_INFINITY } else { f64::INFINITY };
    }
    let s: f64 = v.iter().map(|c| (c.norm() / m).powi(2)).sum();
    m.ln() + 0.5 * s.ln()
}

/// Wronskian `det(f_i^{(k)})_{0≤i,k≤N}`, expanded exactly.
pub fn wronskian(curve: &Curve) -> Result<AnalyticFunction> {
    let n = curve.components.len();
    if n == 0 {
        return Ok(AnalyticFunction::one());
    }
    if n > 16 {
        return Err(Error::Unsupported("Wronskian of more than 16 components".into()));
    }
    let matrix: Vec<Vec<AnalyticFunction>> = curve
        .components
        .iter()
        .map(|f| (0..n as u32).map(|k| f.derivative(k)).collect())
        .collect();
    let mut memo = HashMap::new();
    det_minor(&matrix, 0, 0, &mut memo)
}

/// Determinant of rows `row..` against the columns not in `used`, by
/// cofactor expansion memoized on the column mask.
fn det_minor(
    m: &[Vec<AnalyticFunction>],
    row: usize,
    used: u32,
    memo: &mut HashMap<u32, AnalyticFunction>,
) -> Result<AnalyticFunction> {
    let n = m.len();
    if row == n {
        return Ok(AnalyticFunction::one());
    }
    if let Some(v) = memo.get(&used) {
        return Ok(v.clone());
    }
    let mut acc = AnalyticFunction::zero();
    let mut sign_pos = true;
    for col in 0..n {
        if used & (1 << col) != 0 {
            continue;
        }
        let entry = &m[row][col];
        if !entry.is_zero() {
            let minor = det_minor(m, row + 1, used | (1 << col), memo)?;
            let t = entry.mul(&minor)?;
            acc = if sign_pos { acc.add(&t)? } else { acc.sub(&t)? };
        }
        sign_pos = !sign_pos;
    }
    memo.insert(used, acc.clone());
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn f(s: &str) -> AnalyticFunction {
        AnalyticFunction::parse(s).unwrap()
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(f("poly: z^2").derivative(1), f("poly: 2*z"));
        assert_eq!(f("exppoly: exp(2*z)").derivative(3), f("exppoly: 8*exp(2*z)"));
        assert_eq!(f("rational: 1/(1-z)").derivative(1), f("rational: 1/(1-z)^2"));
    }

    #[test]
    fn wronskian_examples() {
        let c = Curve::parse(&["poly: 1", "poly: z", "poly: z^2"], f64::INFINITY).unwrap();
        assert_eq!(wronskian(&c).unwrap(), f("2"));
        let c = Curve::parse(&["1", "z"], f64::INFINITY).unwrap();
        assert_eq!(wronskian(&c).unwrap(), f("1"));
        let c = Curve::parse(&["1", "exp(z)", "exp(2*z)"], f64::INFINITY).unwrap();
        assert_eq!(wronskian(&c).unwrap(), f("2*exp(3*z)"));
    }

    #[test]
    fn wronskian_of_dependent_tuple_vanishes() {
        let c = Curve::parse(&["1 + z", "z", "1"], f64::INFINITY).unwrap();
        assert!(wronskian(&c).unwrap().is_zero());
        let c = Curve::parse(&["exp(z) + z", "exp(z)", "z"], f64::INFINITY).unwrap();
        assert!(wronskian(&c).unwrap().is_zero());
    }

    #[test]
    fn rational_is_reduced_and_monic() {
        let r = f("rational: (2*z - 2)/(z^2 - 1)");
        assert_eq!(r, f("rational: 2/(z + 1)"));
        match r {
            Rational { den, .. } => assert!(den.lead().is_one()),
            other => panic!("unexpected {other}"),
        }
        assert_eq!(f("(z^2 - 1)/(z - 1)"), f("poly: z + 1"));
    }

    #[test]
    fn variant_tags_are_checked() {
        assert!(AnalyticFunction::parse("poly: 1/(1-z)").is_err());
        assert!(AnalyticFunction::parse("rational: exp(z)").is_err());
        assert!(AnalyticFunction::parse("exppoly: exp(1 + z)").is_err());
        assert!(AnalyticFunction::parse("spline: z").is_err());
        assert_eq!(f("exppoly: (1)*exp(0) + (z)*exp(2*z)").variant_name(), "exppoly");
    }

    #[test]
    fn mixing_rational_and_exponential_is_unsupported() {
        let err = f("1/(1-z)").mul(&f("exp(z)")).unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
    }

    #[test]
    fn product_budget_is_enforced() {
        let a = f("exp(z) + exp(2*z) + exp(3*z)");
        assert!(a.mul_with_budget(&a, 3).is_err());
        assert!(a.mul_with_budget(&a, 5).is_ok());
    }

    #[test]
    fn display_reparses() {
        for s in ["poly: 1 - 2*z^3", "rational: (1)/(1-z)", "exppoly: (1)*exp(0) + (z)*exp(2*z)", "(1+i)*exp(-i*z)"] {
            let g = f(s);
            assert_eq!(AnalyticFunction::parse(&g.to_string()).unwrap(), g, "{s}");
        }
    }

    #[test]
    fn numeric_eval_matches_exact() {
        let g = f("rational: (z^2 + i)/(z - 3)");
        let z = GaussianRational::from_parts((1, 2), (1, 3));
        let exact = g.eval_exact(&z).unwrap().to_complex();
        assert!((g.eval(z.to_complex()) - exact).norm() < 1e-14);
    }
}
