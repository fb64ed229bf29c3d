//! Explicit truncation constants and evaluation of the second main theorem
//! and its defect relation on concrete scenarios.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::gaussian::rat_to_f64;
use crate::algebra::{monomials_of_degree, Hypersurface};
use crate::analytic::{zeros_in_disc, Curve, Divisor};
use crate::error::{Error, Result};
use crate::groebner::Variety;
use crate::interval::{
    ceil_rational, certified_floor, e_interval, floor_rational_pow, ln10_interval, ln_bigint, ln_rational, Interval,
};
use crate::nevanlinna::{
    characteristic, counting, defect, growth_index, DefectEstimate, GrowthEstimate, GrowthModel, QuadConfig,
    RadialGrid,
};
use crate::position::{distributive_constant, DistributiveReport, HypersurfaceFamily, SamplingConfig};

/// Exact truncation levels are materialized only up to this many bits.
pub const MAX_EXACT_BITS: u64 = 1_000_000;
/// Precision (bits) for logarithms reported alongside the constants.
const LOG_BITS: u64 = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Variant {
    /// Moving hypersurfaces on a disc.
    MovingDisc,
    /// Fixed hypersurfaces on a disc.
    FixedDisc,
    /// The earlier constant for fixed hypersurfaces, for comparison.
    Baseline,
    /// Maps from ℂ with moving hypersurfaces.
    EntireMoving,
    /// Maps from ℂ with fixed hypersurfaces.
    EntireFixed,
}

/// Inputs of the constant formulas.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantInputs {
    pub n: u32,
    pub deg_v: u64,
    pub d: u32,
    pub q: u32,
    #[serde(serialize_with = "crate::scenario::ser_rational")]
    pub delta: BigRational,
    #[serde(serialize_with = "crate::scenario::ser_rational")]
    pub epsilon: BigRational,
}

impl ConstantInputs {
    pub fn new(n: u32, deg_v: u64, d: u32, q: u32, delta: BigRational, epsilon: BigRational) -> Self {
        Self { n, deg_v, d, q, delta, epsilon }
    }

    fn validate(&self, strict_epsilon: bool) -> Result<()> {
        let bad = |field: &str, message: &str| Err(Error::Validation { field: field.into(), message: message.into() });
        if self.n < 1 {
            return bad("n", "must be at least 1");
        }
        if self.deg_v < 1 {
            return bad("deg_v", "must be at least 1");
        }
        if self.d < 1 {
            return bad("d", "must be at least 1");
        }
        if !self.delta.is_positive() {
            return bad("delta", "must be positive");
        }
        if !self.epsilon.is_positive() {
            return bad("epsilon", "must be positive");
        }
        if strict_epsilon && self.epsilon >= self.n1() * &self.delta {
            return Err(Error::Precondition(format!(
                "epsilon = {} must be below (n+1)Δ = {}",
                self.epsilon,
                self.n1() * &self.delta
            )));
        }
        Ok(())
    }

    fn n1(&self) -> BigRational {
        int(self.n as i64 + 1)
    }

    fn dn_degv(&self) -> BigInt {
        BigInt::from(self.d).pow(self.n) * BigInt::from(self.deg_v)
    }
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

fn big(v: &BigInt) -> BigRational {
    BigRational::from_integer(v.clone())
}

/// The reading `⌊C·b^E⌋` of the outer bracket, reported when it differs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlternativeReading {
    #[serde(serialize_with = "crate::scenario::ser_opt_bigint")]
    pub l: Option<BigInt>,
    pub log10_l: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmtConstants {
    pub variant: Variant,
    pub inputs: ConstantInputs,
    #[serde(serialize_with = "crate::scenario::ser_opt_bigint")]
    pub u: Option<BigInt>,
    #[serde(serialize_with = "crate::scenario::ser_opt_bigint")]
    pub l: Option<BigInt>,
    pub log10_l: f64,
    /// Certified bound on `|log10 L − log10_l|`.
    pub log10_l_error: f64,
    /// Base `1 + ε/(2(n+1)Δ)` of the moving constant.
    #[serde(serialize_with = "crate::scenario::ser_opt_rational")]
    pub base: Option<BigRational>,
    /// Exponent `⌊dⁿ deg V (u+1)^{n+q} / log² b⌋ + 1` of the moving constant.
    #[serde(serialize_with = "crate::scenario::ser_opt_bigint")]
    pub exponent: Option<BigInt>,
    pub alternative: Option<AlternativeReading>,
}

impl SmtConstants {
    /// `log10(L − 1)`, the truncation level in the disc theorems.
    pub fn log10_l_minus_one(&self) -> f64 {
        match &self.l {
            Some(l) if l > &BigInt::one() => log10_big(&(l - 1u32)).0,
            Some(_) => f64::NEG_INFINITY,
            None => self.log10_l,
        }
    }

    /// `L − 1` (disc) or `L` (entire) as a truncation level, `None` when above `u32`.
    pub fn truncation_level(&self) -> Option<u32> {
        let l = self.l.as_ref()?;
        let k = if self.is_entire() { l.clone() } else { l - 1u32 };
        k.to_u32()
    }

    pub fn is_entire(&self) -> bool {
        matches!(self.variant, Variant::EntireFixed | Variant::EntireMoving)
    }

    /// Recomputes `u` and compares it with the stored value.
    pub fn verify_u(&self) -> bool {
        let factor = match self.variant {
            Variant::MovingDisc | Variant::EntireMoving => 2,
            Variant::FixedDisc => 1,
            Variant::EntireFixed | Variant::Baseline => return true,
        };
        self.u.as_ref() == Some(&u_value(&self.inputs, factor))
    }
}

fn log10_big(n: &BigInt) -> (f64, f64) {
    let ln = ln_bigint(n, LOG_BITS).expect("positive");
    log10_of(&ln)
}

fn log10_of(ln: &Interval) -> (f64, f64) {
    let iv = (ln / &ln10_interval(LOG_BITS)).expect("ln 10 > 0");
    let mid = iv.midpoint_f64();
    let half = rat_to_f64(&iv.width()) / 2.0;
    // conversion of the midpoint adds at most one ulp
    (mid, half + mid.abs() * f64::EPSILON)
}

/// `⌈factor·Δ(2n+1)(n+1)dⁿ deg V (Δ(n+1)+ε)/ε⌉`.
fn u_value(inp: &ConstantInputs, factor: i64) -> BigInt {
    let n = inp.n as i64;
    let x = int(factor) * &inp.delta * int(2 * n + 1) * inp.n1() * big(&inp.dn_degv())
        * (&inp.delta * inp.n1() + &inp.epsilon)
        / &inp.epsilon;
    ceil_rational(&x)
}

/// Constants of the moving-hypersurface theorem on a disc.
pub fn constants_moving(inp: &ConstantInputs) -> Result<SmtConstants> {
    inp.validate(true)?;
    moving_constants(inp, Variant::MovingDisc)
}

fn moving_constants(inp: &ConstantInputs, variant: Variant) -> Result<SmtConstants> {
    let n = inp.n;
    let u = u_value(inp, 2);
    let base = BigRational::one() + &inp.epsilon / (int(2) * inp.n1() * &inp.delta);
    let x = inp.dn_degv() * (&u + 1u32).pow(n + inp.q);
    let xr = Interval::point(big(&x));
    let (floor, _) = certified_floor("exponent", |p| {
        let ln_b = ln_rational(&base, p)?;
        (&xr / &(&ln_b * &ln_b)).map(|iv| iv.round(p))
    })?;
    let exponent = floor + 1u32;
    let c = inp.dn_degv() * (&u + 1u32).pow(n);
    let ln_b = ln_rational(&base, LOG_BITS)?;
    let e_f = exponent.to_f64().unwrap_or(f64::INFINITY);
    let bits = e_f * rat_to_f64(&ln_b.hi) / std::f64::consts::LN_2 + c.bits() as f64;
    let (l, alt) = if bits <= MAX_EXACT_BITS as f64 {
        let e = exponent.to_u64().expect("exponent fits");
        let p = floor_rational_pow(&base, e);
        let l = &c * &p;
        let alt_l = floor_scaled_pow(&c, &base, e);
        let alt = (alt_l != l).then(|| AlternativeReading { log10_l: log10_big(&alt_l).0, l: Some(alt_l) });
        (Some(l), alt)
    } else {
        (None, None)
    };
    let (log10_l, log10_l_error) = match &l {
        Some(l) => log10_big(l),
        None => {
            // ln L ∈ [ln C + E ln b − 2b^{−E}, ln C + E ln b] once b^E ≥ 2
            let ln_c = ln_bigint(&c, LOG_BITS)?;
            let e_iv = Interval::point(big(&exponent));
            let s = &ln_c + &(&ln_b * &e_iv);
            let slack = BigRational::new(1.into(), BigInt::one() << 200usize);
            log10_of(&Interval::new(&s.lo - slack, s.hi))
        }
    };
    let alternative = alt;
    Ok(SmtConstants {
        variant,
        inputs: inp.clone(),
        u: Some(u),
        l,
        log10_l,
        log10_l_error,
        base: Some(base),
        exponent: Some(exponent),
        alternative,
    })
}

/// `⌊c·(num/den)^e⌋`.
fn floor_scaled_pow(c: &BigInt, base: &BigRational, e: u64) -> BigInt {
    let scaled = BigRational::new(c.clone(), BigInt::one());
    let num = num_traits::pow::pow(base.numer().clone(), e as usize) * scaled.numer();
    let den = base.denom();
    let tz = den.trailing_zeros().unwrap_or(0);
    if (den >> (tz as usize)).is_one() {
        return num >> ((tz * e) as usize);
    }
    num_integer::Integer::div_floor(&num, &num_traits::pow::pow(den.clone(), e as usize))
}

/// `⌊R·eⁿ⌋` for a positive rational `R`, certified.
fn floor_times_e_pow(what: &str, r: &BigRational, n: u32) -> Result<(BigInt, f64, f64)> {
    let rr = Interval::point(r.clone());
    let (l, _) = certified_floor(what, |p| Ok((&rr * &e_interval(p + 8).powu(n)).round(p)))?;
    let (log10_l, err) = if l.is_positive() { log10_big(&l) } else { (f64::NEG_INFINITY, 0.0) };
    Ok((l, log10_l, err))
}

/// `L′ = ⌊d^{n²+n} (deg V)^{n+1} eⁿ (2n+5)ⁿ (Δ²(n+1)/ε + Δ)ⁿ⌋`.
fn fixed_l(inp: &ConstantInputs) -> Result<(BigInt, f64, f64)> {
    let n = inp.n;
    let r = big(&BigInt::from(inp.d).pow(n * n + n))
        * big(&BigInt::from(inp.deg_v).pow(n + 1))
        * big(&BigInt::from(2 * n + 5).pow(n))
        * num_traits::pow::pow(&inp.delta * &inp.delta * inp.n1() / &inp.epsilon + &inp.delta, n as usize);
    floor_times_e_pow("L'", &r, n)
}

/// Constants of the fixed-hypersurface theorem on a disc.
pub fn constants_fixed(inp: &ConstantInputs) -> Result<SmtConstants> {
    inp.validate(false)?;
    let (l, log10_l, err) = fixed_l(inp)?;
    Ok(SmtConstants {
        variant: Variant::FixedDisc,
        inputs: inp.clone(),
        u: Some(u_value(inp, 1)),
        l: Some(l),
        log10_l,
        log10_l_error: err,
        base: None,
        exponent: None,
        alternative: None,
    })
}

/// The earlier truncation level `⌊d^{n²+n} deg(V)^{n+1} eⁿ Δⁿ (2n+4)ⁿ (n+1)ⁿ (q!)ⁿ ε^{−n}⌋`.
pub fn constants_baseline(inp: &ConstantInputs) -> Result<SmtConstants> {
    inp.validate(false)?;
    let n = inp.n;
    let fact: BigInt = (1..=inp.q as u64).map(BigInt::from).product();
    let r = big(&BigInt::from(inp.d).pow(n * n + n))
        * big(&BigInt::from(inp.deg_v).pow(n + 1))
        * num_traits::pow::pow(inp.delta.clone(), n as usize)
        * big(&BigInt::from(2 * n + 4).pow(n))
        * big(&BigInt::from(n + 1).pow(n))
        * big(&fact.pow(n))
        / num_traits::pow::pow(inp.epsilon.clone(), n as usize);
    let (l, log10_l, err) = floor_times_e_pow("L_B", &r, n)?;
    Ok(SmtConstants {
        variant: Variant::Baseline,
        inputs: inp.clone(),
        u: None,
        l: Some(l),
        log10_l,
        log10_l_error: err,
        base: None,
        exponent: None,
        alternative: None,
    })
}

/// Constants of the theorem for maps from ℂ: the moving level (with `u`) or
/// the fixed level `L′`.
pub fn constants_entire(inp: &ConstantInputs, moving: bool) -> Result<SmtConstants> {
    if moving {
        inp.validate(true)?;
        moving_constants(inp, Variant::EntireMoving)
    } else {
        inp.validate(false)?;
        let (l, log10_l, err) = fixed_l(inp)?;
        Ok(SmtConstants {
            variant: Variant::EntireFixed,
            inputs: inp.clone(),
            u: None,
            l: Some(l),
            log10_l,
            log10_l_error: err,
            base: None,
            exponent: None,
            alternative: None,
        })
    }
}

/// A curve, a target variety and a family of hypersurfaces with the
/// parameters of the inequality.
#[derive(Clone, Debug)]
pub struct Problem {
    pub variety: Variety,
    pub family: HypersurfaceFamily,
    pub curve: Curve,
    pub epsilon: BigRational,
    pub epsilon_prime: BigRational,
    pub grid: RadialGrid,
    pub growth: Option<GrowthModel>,
    /// Replaces the theorem's truncation level when set.
    pub truncation_override: Option<u32>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RunOptions {
    pub quad: QuadConfig,
    pub sampling: SamplingConfig,
    pub strict_jensen: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityRow {
    pub r: f64,
    pub characteristic: f64,
    pub lhs: f64,
    pub counting_sum: f64,
    #[serde(serialize_with = "crate::scenario::ser_f64_inf")]
    pub correction: f64,
    #[serde(serialize_with = "crate::scenario::ser_f64_inf")]
    pub rhs: f64,
    #[serde(serialize_with = "crate::scenario::ser_f64_inf")]
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub baseline_log10_l: f64,
    /// `log10 L_B − log10 L`.
    pub log10_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmtReport {
    pub constants: SmtConstants,
    pub distributive: DistributiveReport,
    pub growth: GrowthEstimate,
    #[serde(serialize_with = "crate::scenario::ser_rational")]
    pub epsilon_prime: BigRational,
    /// `log10` of the coefficient of `T` in the correction term (`-inf` if none).
    #[serde(serialize_with = "crate::scenario::ser_f64_inf")]
    pub correction_log10: f64,
    pub truncation_level: Option<u32>,
    pub rows: Vec<InequalityRow>,
    pub comparison: Option<Comparison>,
    pub tolerance: f64,
    pub flags: Vec<String>,
}

impl SmtReport {
    pub fn falsified(&self) -> bool {
        self.flags.iter().any(|f| f.starts_with("falsification"))
    }
}

/// Common setup of the inequality and defect computations.
struct Setup {
    n: u32,
    d: u32,
    dist: DistributiveReport,
    growth: GrowthEstimate,
    flags: Vec<String>,
}

fn setup(problem: &Problem, opts: &RunOptions) -> Result<Setup> {
    let v = &problem.variety;
    if v.dim() < 1 {
        return Err(Error::Precondition("V must have positive dimension".into()));
    }
    if problem.curve.num_components() != v.num_vars() {
        return Err(Error::DimensionMismatch { expected: v.num_vars(), got: problem.curve.num_components() });
    }
    if problem.family.is_empty() {
        return Err(Error::Validation { field: "hypersurfaces".into(), message: "at least one hypersurface".into() });
    }
    for g in v.ideal().generators() {
        if !Hypersurface::fixed(g)?.compose(&problem.curve)?.is_zero() {
            return Err(Error::Precondition("the curve does not lie on V".into()));
        }
    }
    for (j, q) in problem.family.members().iter().enumerate() {
        if q.compose(&problem.curve)?.is_zero() {
            return Err(Error::Degenerate(format!("Q_{} vanishes identically on the curve", j + 1)));
        }
    }
    let mut flags = vec!["assumption: algebraic nondegeneracy is spot-checked, not certified".to_string()];
    if let Some(t) = spot_check_nondegenerate(&problem.curve, v)? {
        flags.push(format!("spot_check: the curve satisfies an extra relation of degree {t}"));
    }
    let dist = distributive_constant(v, &problem.family, &opts.sampling)?;
    if !dist.samples_agree {
        flags.push("samples_disagree: the distributive constant varied across sample points".into());
    }
    if dist.degenerate {
        flags.push("degenerate: every subset misses V".into());
    }
    let growth = match (&problem.growth, problem.grid.domain_r.is_infinite()) {
        (_, true) => growth_index(&GrowthModel::Sampled(Vec::new()), f64::INFINITY)?,
        (Some(m), false) => growth_index(m, problem.grid.domain_r)?,
        (None, false) => {
            let t: Vec<(f64, f64)> = problem
                .grid
                .values
                .par_iter()
                .map(|&r| Ok((r, characteristic(&problem.curve, r, &opts.quad)?)))
                .collect::<Result<_>>()?;
            growth_index(&GrowthModel::Sampled(t), problem.grid.domain_r)?
        }
    };
    Ok(Setup { n: v.dim() as u32, d: problem.family.lcm_degree(), dist, growth, flags })
}

/// Smallest degree `t ≤ 2` of a form vanishing on the curve but not in `I_V`,
/// from the numerical rank of monomial evaluations at sample points.
pub fn spot_check_nondegenerate(curve: &Curve, v: &Variety) -> Result<Option<u32>> {
    let f = curve.numeric();
    let rmax = if curve.domain_r.is_finite() { 0.9 * curve.domain_r } else { 1.5 };
    for t in 1..=2u32 {
        let monos = monomials_of_degree(v.num_vars(), t);
        let samples = 3 * monos.len() + 4;
        let rows: Vec<Vec<Complex64>> = (0..samples)
            .map(|k| {
                let z = Complex64::from_polar(rmax * (0.3 + 0.7 * (k as f64 * 0.618_034).fract()), 2.399_963 * k as f64);
                let x = f.eval(z);
                let scale = x.iter().map(|c| c.norm()).fold(0.0f64, f64::max).max(f64::MIN_POSITIVE);
                let x: Vec<Complex64> = x.iter().map(|c| c / scale).collect();
                monos
                    .iter()
                    .map(|m| m.exponents().iter().zip(&x).fold(Complex64::new(1.0, 0.0), |a, (&e, xi)| a * xi.powu(e)))
                    .collect()
            })
            .collect();
        let mat = DMatrix::from_fn(samples, monos.len(), |i, j| rows[i][j]);
        let sv = mat.svd(false, false).singular_values;
        let top = sv.iter().cloned().fold(0.0f64, f64::max);
        let rank = sv.iter().filter(|s| **s > 1e-9 * top).count();
        let nullity = monos.len() - rank;
        let ideal_dim = monos.len() - v.hilbert_function(t) as usize;
        if nullity > ideal_dim {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

/// Evaluates both sides of the second main theorem along the grid.
pub fn verify_main_inequality(problem: &Problem, opts: &RunOptions) -> Result<SmtReport> {
    let Setup { n, d, dist, growth, mut flags } = setup(problem, opts)?;
    let v = &problem.variety;
    let q = problem.family.len() as u32;
    let entire = problem.grid.domain_r.is_infinite();
    let moving = problem.family.is_moving();
    let inputs = ConstantInputs::new(n, v.degree(), d, q, dist.value.clone(), problem.epsilon.clone());
    let constants = match (entire, moving) {
        (true, m) => constants_entire(&inputs, m)?,
        (false, true) => constants_moving(&inputs)?,
        (false, false) => constants_fixed(&inputs)?,
    };
    let truncation = problem.truncation_override.or_else(|| constants.truncation_level());
    let grid_in = &problem.grid;
    let divisors: Vec<Divisor> = problem
        .family
        .members()
        .par_iter()
        .map(|qj| zeros_in_disc(&qj.compose(&problem.curve)?, grid_in.r_max()))
        .collect::<Result<_>>()?;
    let grid = grid_in.avoiding(&divisors.iter().collect::<Vec<_>>());
    if grid.values != grid_in.values {
        flags.push("grid_nudged: radii moved off zeros of Q_j(f)".into());
    }
    let t: Vec<f64> =
        grid.values.par_iter().map(|&r| characteristic(&problem.curve, r, &opts.quad)).collect::<Result<_>>()?;
    // degree equalization: Q_j ↦ Q_j^{d/d_j} scales the divisor
    let mut counting_sum = vec![0.0; grid.values.len()];
    let mut saturated = true;
    for (qj, div) in problem.family.members().iter().zip(&divisors) {
        let (div, weight) = if entire {
            (div.clone(), 1.0 / qj.degree() as f64)
        } else {
            (div.scaled(d / qj.degree()), 1.0 / d as f64)
        };
        let full = counting(&div, &grid, None, opts.strict_jensen);
        let trunc = counting(&div, &grid, truncation, opts.strict_jensen);
        saturated &= full == trunc;
        for (acc, x) in counting_sum.iter_mut().zip(&trunc) {
            *acc += weight * x;
        }
    }
    let max_mult = divisors.iter().map(|d| d.max_multiplicity()).max().unwrap_or(0);
    let below = truncation.is_none_or(|k| max_mult < k);
    if below && saturated {
        flags.push(format!(
            "truncation_saturation: max multiplicity {max_mult} is below the truncation level, so N^[L-1] = N exactly"
        ));
    }
    let main = rat_to_f64(&(int(q as i64) - &dist.value * int(n as i64 + 1) - &problem.epsilon));
    if main <= 0.0 {
        flags.push("vacuous_regime: q ≤ Δ(n+1) + ε, the left side is non-positive".into());
    }
    let correction_log10 = if entire {
        f64::NEG_INFINITY
    } else {
        let u = constants.u.clone().expect("disc constants carry u");
        let a = rat_to_f64(&(&dist.value * int(n as i64 + 1) + &problem.epsilon));
        let cf = growth.value + rat_to_f64(&problem.epsilon_prime);
        a.log10() + cf.log10() + constants.log10_l_minus_one() - (2.0 * d as f64 * u.to_f64().unwrap()).log10()
    };
    let correction = if correction_log10 > 300.0 { f64::INFINITY } else { 10f64.powf(correction_log10) };
    let tolerance = 1e-6 + 10.0 * opts.quad.tol * (q as f64 + 1.0);
    let rows: Vec<InequalityRow> = grid
        .values
        .iter()
        .zip(&t)
        .zip(&counting_sum)
        .map(|((&r, &tr), &ns)| {
            let corr = if correction.is_infinite() && tr > 0.0 { f64::INFINITY } else { correction * tr };
            let lhs = main * tr;
            let rhs = ns + corr;
            InequalityRow { r, characteristic: tr, lhs, counting_sum: ns, correction: corr, rhs, margin: rhs - lhs }
        })
        .collect();
    for row in &rows {
        if row.margin < -tolerance {
            flags.push(format!("falsification: margin {:.3e} at r = {}", row.margin, row.r));
        }
    }
    let comparison = if moving {
        None
    } else {
        let b = constants_baseline(&inputs)?;
        Some(Comparison { baseline_log10_l: b.log10_l, log10_ratio: b.log10_l - constants.log10_l })
    };
    Ok(SmtReport {
        constants,
        distributive: dist,
        growth,
        epsilon_prime: problem.epsilon_prime.clone(),
        correction_log10,
        truncation_level: truncation,
        rows,
        comparison,
        tolerance,
        flags,
    })
}

/// Constants applicable to a problem together with the earlier fixed-case level.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantsReport {
    pub constants: SmtConstants,
    pub baseline: Option<SmtConstants>,
    pub distributive: DistributiveReport,
}

/// Computes `Δ_V` and the constants of the variant matching the problem.
pub fn problem_constants(problem: &Problem, sampling: &SamplingConfig) -> Result<ConstantsReport> {
    let v = &problem.variety;
    if v.dim() < 1 {
        return Err(Error::Precondition("V must have positive dimension".into()));
    }
    let dist = distributive_constant(v, &problem.family, sampling)?;
    let inputs = ConstantInputs::new(
        v.dim() as u32,
        v.degree(),
        problem.family.lcm_degree(),
        problem.family.len() as u32,
        dist.value.clone(),
        problem.epsilon.clone(),
    );
    let moving = problem.family.is_moving();
    let constants = match (problem.grid.domain_r.is_infinite(), moving) {
        (true, m) => constants_entire(&inputs, m)?,
        (false, true) => constants_moving(&inputs)?,
        (false, false) => constants_fixed(&inputs)?,
    };
    let baseline = if moving { None } else { Some(constants_baseline(&inputs)?) };
    Ok(ConstantsReport { constants, baseline, distributive: dist })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DefectRow {
    pub index: usize,
    pub degree: u32,
    pub defect: DefectEstimate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DefectReport {
    pub constants: SmtConstants,
    /// `u` of the fixed theorem used in the growth term.
    #[serde(serialize_with = "crate::scenario::ser_opt_bigint")]
    pub u_fixed: Option<BigInt>,
    /// `u` with the factor 2, as printed next to the defect relation.
    #[serde(serialize_with = "crate::scenario::ser_opt_bigint")]
    pub u_printed: Option<BigInt>,
    #[serde(serialize_with = "crate::scenario::ser_rational")]
    pub distributive: BigRational,
    pub growth: GrowthEstimate,
    pub truncation_level: Option<u32>,
    pub rows: Vec<DefectRow>,
    pub sum: f64,
    #[serde(serialize_with = "crate::scenario::ser_f64_inf")]
    pub bound: f64,
    /// Bound using `u` with the factor 2.
    #[serde(serialize_with = "crate::scenario::ser_f64_inf")]
    pub bound_printed_u: f64,
    pub holds: bool,
    pub flags: Vec<String>,
}

/// Truncated defects of a fixed family and the defect-relation bound.
pub fn defect_relation_report(problem: &Problem, opts: &RunOptions) -> Result<DefectReport> {
    if problem.family.is_moving() {
        return Err(Error::Precondition("the defect relation is stated for fixed hypersurfaces".into()));
    }
    let Setup { n, d, dist, growth, mut flags } = setup(problem, opts)?;
    let v = &problem.variety;
    let q = problem.family.len() as u32;
    let inputs = ConstantInputs::new(n, v.degree(), d, q, dist.value.clone(), problem.epsilon.clone());
    let constants = constants_fixed(&inputs)?;
    let truncation = problem.truncation_override.or_else(|| constants.truncation_level());
    let rows: Vec<DefectRow> = problem
        .family
        .members()
        .iter()
        .enumerate()
        .map(|(j, qj)| {
            Ok(DefectRow {
                index: j,
                degree: qj.degree(),
                defect: defect(&problem.curve, qj, truncation, &problem.grid, &opts.quad, opts.strict_jensen)?,
            })
        })
        .collect::<Result<_>>()?;
    let sum: f64 = rows.iter().map(|r| r.defect.value).sum();
    let a = rat_to_f64(&(&dist.value * int(n as i64 + 1) + &problem.epsilon));
    let u_fixed = u_value(&inputs, 1);
    let u_printed = u_value(&inputs, 2);
    let term = |u: &BigInt| -> f64 {
        if growth.value == 0.0 {
            return 0.0;
        }
        let lg = a.log10() + growth.value.log10() + constants.log10_l_minus_one()
            - (2.0 * d as f64 * u.to_f64().unwrap()).log10();
        if lg > 300.0 { f64::INFINITY } else { 10f64.powf(lg) }
    };
    let bound = a + term(&u_fixed);
    let bound_printed_u = a + term(&u_printed);
    let holds = sum <= bound + 1e-9;
    if !holds {
        flags.push(format!("falsification: defect sum {sum:.6} exceeds {bound:.6}"));
    }
    Ok(DefectReport {
        constants,
        u_fixed: Some(u_fixed),
        u_printed: Some(u_printed),
        distributive: dist.value,
        growth,
        truncation_level: truncation,
        rows,
        sum,
        bound,
        bound_printed_u,
        holds,
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inputs(q: u32, eps: (i64, i64)) -> ConstantInputs {
        ConstantInputs::new(1, 1, 1, q, int(1), BigRational::new(eps.0.into(), eps.1.into()))
    }

    #[test]
    fn fixed_examples() {
        let c = constants_fixed(&inputs(2, (1, 1))).unwrap();
        assert_eq!(c.u, Some(BigInt::from(18)));
        assert_eq!(c.l, Some(BigInt::from(57)));
        assert!(c.verify_u());
        assert_eq!(constants_fixed(&inputs(2, (2, 1))).unwrap().u, Some(BigInt::from(12)));
        assert!(constants_fixed(&inputs(2, (0, 1))).is_err());
    }

    #[test]
    fn baseline_examples() {
        assert_eq!(constants_baseline(&inputs(2, (1, 1))).unwrap().l, Some(BigInt::from(65)));
        assert_eq!(constants_baseline(&inputs(5, (1, 1))).unwrap().l, Some(BigInt::from(3914)));
    }

    #[test]
    fn moving_preconditions() {
        assert!(constants_moving(&inputs(2, (2, 1))).is_err());
        assert!(constants_moving(&inputs(2, (3, 1))).is_err());
        let a = constants_moving(&inputs(2, (1, 2))).unwrap();
        let b = constants_moving(&inputs(2, (1, 1))).unwrap();
        assert!(a.u.unwrap() > b.u.unwrap());
    }

    #[test]
    fn moving_small_case_is_exact() {
        // d = 1, n = 1, q = 1, Δ = 1, ε = 3/2 keeps L small enough to check by hand
        let inp = ConstantInputs::new(1, 1, 1, 1, int(1), BigRational::new(3.into(), 2.into()));
        let c = constants_moving(&inp).unwrap();
        let u = c.u.clone().unwrap();
        assert_eq!(u, BigInt::from(28)); // ⌈2·3·2·(7/2)/(3/2)⌉
        let e = c.exponent.clone().unwrap();
        let b = 1.0f64 + 1.5 / 4.0;
        let expect = (29f64.powi(2) / b.ln().powi(2)).floor() + 1.0;
        assert_eq!(e.to_f64().unwrap(), expect);
        let l = c.l.clone().unwrap();
        assert!((log10_big(&l).0 - c.log10_l).abs() < 1e-9);
        assert!((c.log10_l - (29f64.log10() + expect * b.log10())).abs() < 1e-6);
    }

    #[test]
    fn moving_example_has_certified_size() {
        let c = constants_moving(&inputs(2, (1, 1))).unwrap();
        assert_eq!(c.u, Some(BigInt::from(36)));
        let e = c.exponent.clone().unwrap().to_f64().unwrap();
        assert!((e - 1_017_271.0).abs() < 2.0, "{e}");
        assert!(c.l.is_some());
        let oracle = 37f64.log10() + e * 1.25f64.log10();
        assert!((c.log10_l - oracle).abs() < 1e-4, "{} vs {oracle}", c.log10_l);
        assert!(c.log10_l_error < 1e-9);
    }
}
