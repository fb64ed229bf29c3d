//! Nevanlinna theory on discs: characteristic, truncated counting and
//! proximity functions, first main theorem residuals, growth index, defects,
//! and the Cartan-type inequality for hyperplanes.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{GaussianRational, HomogPoly, Hypersurface};
use crate::analytic::{wronskian, zeros_in_disc, AnalyticFunction, Curve, Divisor, NumericCurve};
use crate::error::{Error, Result};

/// Zero moduli treated as the origin.
const ORIGIN_TOL: f64 = 1e-10;
/// Allowed decrease of `T` along a grid.
pub const MONOTONE_TOL: f64 = 1e-9;

/// Radii `r0 < r_1 < … < r_m < R` at which Nevanlinna functions are sampled.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadialGrid {
    pub r0: f64,
    pub values: Vec<f64>,
    #[serde(serialize_with = "crate::scenario::ser_f64_inf")]
    pub domain_r: f64,
}

impl RadialGrid {
    pub fn new(r0: f64, values: Vec<f64>, domain_r: f64) -> Result<Self> {
        let bad = |m: String| Err(Error::Validation { field: "grid".into(), message: m });
        if !(r0 > 0.0 && r0 < domain_r) {
            return bad(format!("r0 = {r0} must satisfy 0 < r0 < R"));
        }
        if values.is_empty() {
            return bad("grid is empty".into());
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return bad("grid must be strictly increasing".into());
        }
        if values[0] <= r0 {
            return bad(format!("first grid value {} must exceed r0 = {r0}", values[0]));
        }
        if *values.last().unwrap() >= domain_r {
            return bad("grid must stay inside the disc".into());
        }
        Ok(Self { r0, values, domain_r })
    }

    /// Geometric `r ∈ [2, 10³]` with 40 points on ℂ, `R(1 − 2^{−j})` for
    /// `j = 1..20` on a finite disc.
    pub fn default_for(domain_r: f64, r0: f64) -> Result<Self> {
        let values = if domain_r.is_infinite() {
            geometric(2.0, 1e3, 40)
        } else {
            (1..=20).map(|j| domain_r * (1.0 - 2f64.powi(-j))).collect()
        };
        Self::new(r0, values, domain_r)
    }

    pub fn r_max(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// Indices of the top decile, at least three points when available.
    pub fn top_decile(&self) -> std::ops::Range<usize> {
        let n = self.values.len();
        let k = (n / 10).max(3).min(n);
        n - k..n
    }

    /// Moves grid values off zero moduli by steps of `1e-8`.
    pub fn avoiding(&self, divisors: &[&Divisor]) -> RadialGrid {
        let moduli: Vec<f64> = divisors.iter().flat_map(|d| d.points.iter().map(|p| p.location.norm())).collect();
        let values = self
            .values
            .iter()
            .map(|&r| {
                let mut r = r;
                while moduli.iter().any(|m| (m - r).abs() < crate::analytic::zeros::CONTOUR_GUARD) {
                    r += crate::analytic::zeros::NUDGE_STEP;
                }
                r
            })
            .collect();
        RadialGrid { values, ..self.clone() }
    }
}

/// `count` points from `a` to `b` in geometric progression.
pub fn geometric(a: f64, b: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![a];
    }
    (0..count).map(|i| a * (b / a).powf(i as f64 / (count - 1) as f64)).collect()
}

/// Trapezoid quadrature settings for circle averages.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadConfig {
    pub tol: f64,
    pub max_nodes: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { tol: 1e-8, max_nodes: 1 << 20 }
    }
}

impl QuadConfig {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

/// `(1/2π) ∫ g(θ) dθ` by the trapezoid rule, doubling nodes until two
/// successive values differ by at most `tol`.
pub fn circle_mean<F>(g: F, cfg: &QuadConfig) -> Result<f64>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let mut n = 64usize;
    let sample = |count: usize, offset: f64, step: f64| -> Result<f64> {
        let vals: Vec<Result<f64>> = if count >= 4096 {
            (0..count).into_par_iter().map(|k| g(offset + step * k as f64)).collect()
        } else {
            (0..count).map(|k| g(offset + step * k as f64)).collect()
        };
        let mut s = 0.0;
        for v in vals {
            s += v?;
        }
        Ok(s)
    };
    let mut sum = sample(n, 0.0, 2.0 * PI / n as f64)?;
    let mut prev = sum / n as f64;
    while n < cfg.max_nodes {
        let h = 2.0 * PI / (2 * n) as f64;
        sum += sample(n, h, 2.0 * h)?;
        n *= 2;
        let cur = sum / n as f64;
        if (cur - prev).abs() <= cfg.tol {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::QuadratureNotConverged { tol: cfg.tol, max_nodes: cfg.max_nodes })
}

fn check_radius(curve: &Curve, r: f64) -> Result<()> {
    if !(r > 0.0 && r < curve.domain_r) {
        return Err(Error::Precondition(format!("radius {r} outside (0, {})", curve.domain_r)));
    }
    Ok(())
}

fn log_norm_at(f: &NumericCurve, z: Complex64) -> Result<f64> {
    let v = f.log_norm(z);
    if v == f64::NEG_INFINITY {
        return Err(Error::CommonZero(z.norm()));
    }
    if !v.is_finite() {
        return Err(Error::Precondition(format!("curve overflows at |z| = {}", z.norm())));
    }
    Ok(v)
}

/// `T_f(r) = (1/2π)∫ log‖f(re^{iθ})‖ dθ − log‖f(0)‖`.
pub fn characteristic(curve: &Curve, r: f64, cfg: &QuadConfig) -> Result<f64> {
    check_radius(curve, r)?;
    let f = curve.numeric();
    let at0 = log_norm_at(&f, Complex64::zero())?;
    let mean = circle_mean(|t| log_norm_at(&f, Complex64::from_polar(r, t)), cfg)?;
    Ok(mean - at0)
}

/// `n^{[k]}` contribution of a multiplicity.
fn truncate(m: u32, k: Option<u32>) -> f64 {
    k.map_or(m, |k| m.min(k)) as f64
}

/// Truncated counting function on the grid radii, from `r0`.
///
/// Zeros at the origin are dropped unless `strict_jensen` is set, in which
/// case they contribute `n^{[k]}(0)·log(r/r0)`.
pub fn counting(divisor: &Divisor, grid: &RadialGrid, k: Option<u32>, strict_jensen: bool) -> Vec<f64> {
    counting_at(divisor, grid.r0, &grid.values, k, strict_jensen)
}

pub fn counting_at(divisor: &Divisor, r0: f64, radii: &[f64], k: Option<u32>, strict_jensen: bool) -> Vec<f64> {
    let mut at_origin = 0.0;
    let mut inner = 0.0;
    for p in &divisor.points {
        let a = p.location.norm();
        if a <= ORIGIN_TOL {
            at_origin += truncate(p.multiplicity, k);
        } else if a <= r0 {
            inner += truncate(p.multiplicity, k);
        }
    }
    let base = inner + if strict_jensen { at_origin } else { 0.0 };
    radii
        .iter()
        .map(|&r| {
            let outer: f64 = divisor
                .points
                .iter()
                .filter(|p| {
                    let a = p.location.norm();
                    a > r0 && a <= r
                })
                .map(|p| truncate(p.multiplicity, k) * (r / p.location.norm()).ln())
                .sum();
            outer + base * (r / r0).ln()
        })
        .collect()
}

/// `m_f(r, Q) = (1/2π)∫ log(‖f‖^d ‖Q(z)‖ / |Q(f)|) dθ`.
pub fn proximity(curve: &Curve, q: &Hypersurface, r: f64, cfg: &QuadConfig) -> Result<f64> {
    check_radius(curve, r)?;
    let g = q.compose(curve)?;
    if g.is_zero() {
        return Err(Error::Degenerate("the curve lies in the hypersurface".into()));
    }
    let div = zeros_in_disc(&g, 2.0 * r)?;
    proximity_unchecked(&curve.numeric(), q, r, cfg, &div)
}

/// Zeros with `||a| − r| < NEAR_BAND·r` are subtracted from `log|Q(f)|` and
/// their exact circle means `log max(r, |a|)` added back.
const NEAR_BAND: f64 = 0.25;

fn proximity_unchecked(f: &NumericCurve, q: &Hypersurface, r: f64, cfg: &QuadConfig, div: &Divisor) -> Result<f64> {
    let qn = q.numeric();
    let d = q.degree() as f64;
    let near: Vec<(Complex64, f64)> = div
        .points
        .iter()
        .filter(|p| (p.location.norm() - r).abs() < NEAR_BAND * r)
        .map(|p| (p.location, p.multiplicity as f64))
        .collect();
    let exact: f64 = near.iter().map(|(a, m)| m * a.norm().max(r).ln()).sum();
    let mean = circle_mean(
        |t| {
            let z = Complex64::from_polar(r, t);
            let x = f.eval(z);
            let v = qn.eval(z, &x).norm();
            if v == 0.0 {
                return Err(Error::Precondition(format!("Q(f) vanishes on |z| = {r}")));
            }
            let smooth = v.ln() - near.iter().map(|(a, m)| m * (z - a).norm().ln()).sum::<f64>();
            Ok(d * crate::analytic::function::log_norm(&x) + qn.coeff_norm(z).ln() - smooth)
        },
        cfg,
    )?;
    Ok(mean - exact)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FmtResidual {
    pub radii: Vec<f64>,
    pub residuals: Vec<f64>,
    pub spread: f64,
}

/// `d·T_f(r) − m_f(r,Q) − N_{Q(f)}(r)` along the grid.
pub fn fmt_residual(curve: &Curve, q: &Hypersurface, grid: &RadialGrid, cfg: &QuadConfig) -> Result<FmtResidual> {
    let g = q.compose(curve)?;
    if g.is_zero() {
        return Err(Error::Degenerate("the curve lies in the hypersurface".into()));
    }
    let div = divisor_for(&g, grid)?;
    if div.points.iter().any(|p| p.location.norm() <= grid.r0) {
        return Err(Error::Precondition("Q(f) has zeros in |z| ≤ r0".into()));
    }
    let grid = grid.avoiding(&[&div]);
    let n = counting(&div, &grid, None, false);
    let f = curve.numeric();
    let d = q.degree() as f64;
    let residuals: Vec<f64> = grid
        .values
        .par_iter()
        .zip(n.par_iter())
        .map(|(&r, nr)| Ok(d * characteristic(curve, r, cfg)? - proximity_unchecked(&f, q, r, cfg, &div)? - nr))
        .collect::<Result<_>>()?;
    Ok(FmtResidual { spread: spread(&residuals), radii: grid.values.clone(), residuals })
}

fn spread(v: &[f64]) -> f64 {
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    hi - lo
}

/// Zero divisor of `g` on the closed disc of the largest grid radius.
fn divisor_for(g: &AnalyticFunction, grid: &RadialGrid) -> Result<Divisor> {
    zeros_in_disc(g, grid.r_max())
}

/// Growth model of the characteristic near the boundary.
#[derive(Clone, Debug, PartialEq)]
pub enum GrowthModel {
    /// `T(r) = λ·log(1/(R − r))`.
    Logarithmic { lambda: f64 },
    /// Sampled `(r, T(r))`.
    Sampled(Vec<(f64, f64)>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthEstimate {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub method: &'static str,
}

/// `c_f = inf{c > 0 : ∫_0^R exp(c·T(r)) dr = ∞}`.
pub fn growth_index(model: &GrowthModel, domain_r: f64) -> Result<GrowthEstimate> {
    if domain_r.is_infinite() {
        return Ok(GrowthEstimate { value: 0.0, lower: 0.0, upper: 0.0, method: "entire" });
    }
    match model {
        GrowthModel::Logarithmic { lambda } => {
            if !(*lambda > 0.0) {
                return Err(Error::GrowthFit(format!("λ = {lambda} must be positive")));
            }
            let c = 1.0 / lambda;
            Ok(GrowthEstimate { value: c, lower: c, upper: c, method: "model" })
        }
        GrowthModel::Sampled(samples) => fit_growth(samples, domain_r),
    }
}

fn fit_growth(samples: &[(f64, f64)], domain_r: f64) -> Result<GrowthEstimate> {
    if samples.windows(2).any(|w| w[1].0 <= w[0].0 || w[1].1 < w[0].1 - MONOTONE_TOL) {
        return Err(Error::GrowthFit("samples are not increasing in r with non-decreasing T".into()));
    }
    let n = samples.len();
    let k = (n / 10).max(3);
    if n < 3 {
        return Err(Error::GrowthFit("need at least three samples".into()));
    }
    let top = &samples[n - k.min(n)..];
    let xs: Vec<f64> = top.iter().map(|(r, _)| (1.0 / (domain_r - r)).ln()).collect();
    let ys: Vec<f64> = top.iter().map(|(_, t)| *t).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::GrowthFit("degenerate abscissae".into()));
    }
    let lambda = sxy / sxx;
    let intercept = my - lambda * mx;
    let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - lambda * x).powi(2)).sum();
    let tss: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if !(lambda > 0.0) || (tss > 0.0 && rss > 1e-2 * tss) {
        return Err(Error::GrowthFit(format!(
            "profile is not of logarithmic blow-up type (slope {lambda:.3e}, residual {rss:.3e})"
        )));
    }
    let se = if m > 2.0 { (rss / (m - 2.0) / sxx).sqrt() } else { 0.0 };
    let (hi_l, lo_l) = (lambda + 2.0 * se, (lambda - 2.0 * se).max(f64::MIN_POSITIVE));
    Ok(GrowthEstimate { value: 1.0 / lambda, lower: 1.0 / hi_l, upper: 1.0 / lo_l, method: "fit" })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DefectEstimate {
    pub value: f64,
    /// `(r, N^{[k]}/(d T))` at the last three grid radii.
    pub last_three: Vec<(f64, f64)>,
}

/// `δ^{[k]} ≈ 1 − max_{top decile} N^{[k]}(r) / (d·T_f(r))`.
pub fn defect(
    curve: &Curve,
    q: &Hypersurface,
    k: Option<u32>,
    grid: &RadialGrid,
    cfg: &QuadConfig,
    strict_jensen: bool,
) -> Result<DefectEstimate> {
    let g = q.compose(curve)?;
    if g.is_zero() {
        return Err(Error::Degenerate("the curve lies in the hypersurface".into()));
    }
    let div = divisor_for(&g, grid)?;
    let t: Vec<f64> = grid.values.par_iter().map(|&r| characteristic(curve, r, cfg)).collect::<Result<_>>()?;
    let n = counting(&div, grid, k, strict_jensen);
    defect_from(&grid.values, &t, &n, q.degree(), grid.top_decile())
}

pub(crate) fn defect_from(radii: &[f64], t: &[f64], n: &[f64], d: u32, top: std::ops::Range<usize>) -> Result<DefectEstimate> {
    let last = *t.last().unwrap();
    if !(last > 0.0) {
        return Err(Error::Precondition(format!("T_f(r_max) = {last} must be positive")));
    }
    let ratio = |i: usize| if t[i] > 0.0 { n[i] / (d as f64 * t[i]) } else { 0.0 };
    let best = top.map(ratio).fold(f64::NEG_INFINITY, f64::max);
    let len = radii.len();
    Ok(DefectEstimate {
        value: 1.0 - best,
        last_three: (len.saturating_sub(3)..len).map(|i| (radii[i], ratio(i))).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RuSibonyRow {
    pub r: f64,
    pub characteristic: f64,
    pub integral: f64,
    pub wronskian_counting: f64,
    pub margin: f64,
    pub relative_margin: f64,
}

/// Maximal linearly independent subsets of the hyperplane coefficient vectors.
fn independent_subsets(hyperplanes: &[HomogPoly], nv: usize) -> Vec<Vec<usize>> {
    let vecs: Vec<Vec<GaussianRational>> = hyperplanes
        .iter()
        .map(|h| (0..nv).map(|i| h.coeff(&crate::algebra::Monomial::var(nv, i))).collect())
        .collect();
    let q = hyperplanes.len();
    let mut best: Vec<Vec<usize>> = Vec::new();
    let mut best_size = 0;
    for mask in 1u32..(1u32 << q) {
        let size = mask.count_ones() as usize;
        if size < best_size || size > nv {
            continue;
        }
        let subset: Vec<usize> = (0..q).filter(|i| mask >> i & 1 == 1).collect();
        if rank(subset.iter().map(|&i| vecs[i].clone()).collect()) == size {
            if size > best_size {
                best.clear();
                best_size = size;
            }
            best.push(subset);
        }
    }
    best
}

fn rank(mut rows: Vec<Vec<GaussianRational>>) -> usize {
    let mut r = 0;
    let cols = rows.first().map_or(0, |v| v.len());
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = rows[r][c].inv().unwrap();
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = &rows[i][c] * &inv;
                for j in c..cols {
                    let t = &f * &rows[r][j];
                    rows[i][j] -= &t;
                }
            }
        }
        r += 1;
    }
    r
}

/// Looser tolerance for the non-smooth `max_K` integrand.
pub const RU_SIBONY_TOL_FACTOR: f64 = 1e3;

/// `(n+1)T_f(r) − [(1/2π)∫ max_K Σ_{j∈K} log(‖f‖/|H_j(f)|) dθ + N_W(r)]`.
pub fn check_ru_sibony(
    curve: &Curve,
    hyperplanes: &[HomogPoly],
    grid: &RadialGrid,
    cfg: &QuadConfig,
) -> Result<Vec<RuSibonyRow>> {
    let nv = curve.num_components();
    for h in hyperplanes {
        if h.num_vars() != nv || h.degree() != 1 {
            return Err(Error::Validation { field: "hyperplanes".into(), message: "linear forms in the curve's variables expected".into() });
        }
    }
    let w = wronskian(curve)?;
    if w.is_zero() {
        return Err(Error::Degenerate("the curve is linearly degenerate (Wronskian ≡ 0)".into()));
    }
    let wdiv = zeros_in_disc(&w, grid.r_max())?;
    let mut divs = vec![wdiv.clone()];
    for h in hyperplanes {
        let g = Hypersurface::fixed(h)?.compose(curve)?;
        if g.is_zero() {
            return Err(Error::Degenerate("the curve lies in a hyperplane".into()));
        }
        divs.push(zeros_in_disc(&g, grid.r_max())?);
    }
    let grid = grid.avoiding(&divs.iter().collect::<Vec<_>>());
    let nw = counting(&wdiv, &grid, None, false);
    let subsets = independent_subsets(hyperplanes, nv);
    let forms: Vec<Vec<Complex64>> = hyperplanes
        .iter()
        .map(|h| (0..nv).map(|i| h.coeff(&crate::algebra::Monomial::var(nv, i)).to_complex()).collect())
        .collect();
    let f = curve.numeric();
    let loose = QuadConfig { tol: cfg.tol * RU_SIBONY_TOL_FACTOR, ..*cfg };
    grid.values
        .par_iter()
        .zip(nw.par_iter())
        .map(|(&r, &nwr)| {
            let t = characteristic(curve, r, cfg)?;
            let integral = if subsets.is_empty() {
                0.0
            } else {
                circle_mean(
                    |th| {
                        let z = Complex64::from_polar(r, th);
                        let x = f.eval(z);
                        let ln = crate::analytic::function::log_norm(&x);
                        let logs: Vec<f64> = forms
                            .iter()
                            .map(|a| ln - a.iter().zip(&x).map(|(c, xi)| c * xi).sum::<Complex64>().norm().ln())
                            .collect();
                        Ok(subsets
                            .iter()
                            .map(|k| k.iter().map(|&j| logs[j]).sum::<f64>())
                            .fold(f64::NEG_INFINITY, f64::max))
                    },
                    &loose,
                )?
            };
            let margin = nv as f64 * t - (integral + nwr);
            Ok(RuSibonyRow {
                r,
                characteristic: t,
                integral,
                wronskian_counting: nwr,
                margin,
                relative_margin: if t > 0.0 { margin / t } else { 0.0 },
            })
        })
        .collect()
}

/// Nevanlinna data of one hypersurface along a grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HypersurfaceProfile {
    pub degree: u32,
    pub truncation: Option<u32>,
    pub proximity: Vec<f64>,
    pub counting_full: Vec<f64>,
    pub counting_truncated: Vec<f64>,
    pub residual: Vec<f64>,
    pub max_multiplicity: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NevanlinnaProfile {
    pub grid: RadialGrid,
    pub characteristic: Vec<f64>,
    pub hypersurfaces: Vec<HypersurfaceProfile>,
    /// `T` never decreased by more than [`MONOTONE_TOL`].
    pub monotone: bool,
}

impl NevanlinnaProfile {
    /// Evaluates `T`, `m`, `N` and `N^{[k]}` for every hypersurface; zeros of
    /// each `Q_j(f)` are extracted once on the largest disc.
    pub fn compute(
        curve: &Curve,
        family: &[Hypersurface],
        truncation: &[Option<u32>],
        grid: &RadialGrid,
        cfg: &QuadConfig,
        strict_jensen: bool,
    ) -> Result<Self> {
        let gs: Vec<AnalyticFunction> = family.iter().map(|q| q.compose(curve)).collect::<Result<_>>()?;
        if let Some(j) = gs.iter().position(|g| g.is_zero()) {
            return Err(Error::Degenerate(format!("Q_{} vanishes identically on the curve", j + 1)));
        }
        let divs: Vec<Divisor> = gs.par_iter().map(|g| zeros_in_disc(g, grid.r_max())).collect::<Result<_>>()?;
        let grid = grid.avoiding(&divs.iter().collect::<Vec<_>>());
        let t: Vec<f64> = grid.values.par_iter().map(|&r| characteristic(curve, r, cfg)).collect::<Result<_>>()?;
        let f = curve.numeric();
        let mut hypersurfaces = Vec::with_capacity(family.len());
        for (j, q) in family.iter().enumerate() {
            let k = truncation.get(j).copied().flatten();
            let m: Vec<f64> = grid
                .values
                .par_iter()
                .map(|&r| proximity_unchecked(&f, q, r, cfg, &divs[j]))
                .collect::<Result<_>>()?;
            let full = counting(&divs[j], &grid, None, strict_jensen);
            let trunc = counting(&divs[j], &grid, k, strict_jensen);
            let d = q.degree() as f64;
            let residual = t.iter().zip(&m).zip(&full).map(|((t, m), n)| d * t - m - n).collect();
            hypersurfaces.push(HypersurfaceProfile {
                degree: q.degree(),
                truncation: k,
                proximity: m,
                counting_full: full,
                counting_truncated: trunc,
                residual,
                max_multiplicity: divs[j].max_multiplicity(),
            });
        }
        let monotone = t.windows(2).all(|w| w[1] >= w[0] - MONOTONE_TOL);
        Ok(Self { grid, characteristic: t, hypersurfaces, monotone })
    }

    /// CSV rows: `r, T`, then `m, N_full, N_trunc, residual` per hypersurface.
    pub fn csv_header(&self) -> Vec<String> {
        let mut h = vec!["r".to_string(), "T".to_string()];
        for j in 1..=self.hypersurfaces.len() {
            for name in ["m", "N_full", "N_trunc", "residual"] {
                h.push(format!("{name}_{j}"));
            }
        }
        h
    }

    pub fn csv_rows(&self) -> Vec<Vec<f64>> {
        (0..self.grid.values.len())
            .map(|i| {
                let mut row = vec![self.grid.values[i], self.characteristic[i]];
                for h in &self.hypersurfaces {
                    row.extend([h.proximity[i], h.counting_full[i], h.counting_truncated[i], h.residual[i]]);
                }
                row
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_homog;
    use crate::analytic::DivisorPoint;

    fn line() -> Curve {
        Curve::parse(&["1", "z"], f64::INFINITY).unwrap()
    }

    fn hs(n: usize, s: &str) -> Hypersurface {
        Hypersurface::fixed(&parse_homog(s, n).unwrap()).unwrap()
    }

    #[test]
    fn characteristic_examples() {
        let cfg = QuadConfig::default();
        assert!((characteristic(&line(), 1.0, &cfg).unwrap() - 0.5 * 2f64.ln()).abs() < 1e-8);
        assert!((characteristic(&line(), 3.0, &cfg).unwrap() - 0.5 * 10f64.ln()).abs() < 1e-8);
        let c = Curve::parse(&["1", "1"], f64::INFINITY).unwrap();
        assert!(characteristic(&c, 5.0, &cfg).unwrap().abs() < 1e-12);
    }

    #[test]
    fn counting_examples() {
        let d = Divisor::from_points(vec![(Complex64::new(0.5, 0.0), 3)], 5.0);
        let grid = RadialGrid::new(0.1, vec![2.0], f64::INFINITY).unwrap();
        assert!((counting(&d, &grid, Some(2), false)[0] - 2.0 * 4f64.ln()).abs() < 1e-12);
        assert!((counting(&d, &grid, None, false)[0] - 3.0 * 4f64.ln()).abs() < 1e-12);
        let origin = Divisor::from_points(vec![(Complex64::zero(), 2)], 5.0);
        assert_eq!(counting(&origin, &grid, None, false), vec![0.0]);
        assert!((counting(&origin, &grid, None, true)[0] - 2.0 * 20f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn counting_identity_between_truncations() {
        let d = Divisor {
            points: vec![
                DivisorPoint { location: Complex64::new(0.3, 0.4), multiplicity: 3 },
                DivisorPoint { location: Complex64::new(-2.0, 1.0), multiplicity: 1 },
                DivisorPoint { location: Complex64::new(0.0, 4.0), multiplicity: 2 },
            ],
            radius: 10.0,
            requested_radius: 10.0,
            residual_count_check: 6,
        };
        let grid = RadialGrid::new(0.2, geometric(1.0, 9.0, 12), f64::INFINITY).unwrap();
        let full = counting(&d, &grid, None, false);
        let one = counting(&d, &grid, Some(1), false);
        for (i, &r) in grid.values.iter().enumerate() {
            let expect: f64 = d
                .points
                .iter()
                .filter(|p| p.location.norm() <= r)
                .map(|p| (p.multiplicity - 1) as f64 * (r / p.location.norm()).ln())
                .sum();
            assert!((full[i] - one[i] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn proximity_examples() {
        let cfg = QuadConfig::default();
        let m = proximity(&line(), &hs(2, "x1"), 2.0, &cfg).unwrap();
        assert!((m - (0.5 * 5f64.ln() - 2f64.ln())).abs() < 1e-8);
        let m = proximity(&line(), &hs(2, "x0"), 2.0, &cfg).unwrap();
        assert!((m - 0.5 * 5f64.ln()).abs() < 1e-8);
        let conic = Curve::parse(&["1", "z", "z^2"], f64::INFINITY).unwrap();
        assert!(matches!(proximity(&conic, &hs(3, "x0*x2 - x1^2"), 2.0, &cfg), Err(Error::Degenerate(_))));
    }

    #[test]
    fn fmt_examples() {
        let cfg = QuadConfig::default();
        let grid = RadialGrid::new(0.5, geometric(2.0, 50.0, 12), f64::INFINITY).unwrap();
        let res = fmt_residual(&line(), &hs(2, "x0 + x1"), &grid, &cfg).unwrap();
        assert!(res.spread <= 1e-6, "{res:?}");
        let c = Curve::parse(&["1", "z", "z^2"], f64::INFINITY).unwrap();
        let q = hs(3, "x0^2 + 2*x0*x1 - 3*x1*x2 + x2^2 + x0*x2");
        let res = fmt_residual(&c, &q, &grid, &cfg).unwrap();
        assert!(res.spread <= 1e-5, "{res:?}");
        assert!(fmt_residual(&line(), &hs(2, "x1"), &grid, &cfg).is_err());
    }

    #[test]
    fn growth_examples() {
        let e = growth_index(&GrowthModel::Logarithmic { lambda: 2.0 }, 1.0).unwrap();
        assert_eq!(e.value, 0.5);
        assert_eq!(growth_index(&GrowthModel::Logarithmic { lambda: 1.0 }, 1.0).unwrap().value, 1.0);
        assert_eq!(growth_index(&GrowthModel::Sampled(vec![]), f64::INFINITY).unwrap().value, 0.0);
        let samples: Vec<(f64, f64)> =
            (1..=20).map(|j| 1.0 - 2f64.powi(-j)).map(|r| (r, 4.0 * (1.0 / (1.0 - r)).ln() + 0.3)).collect();
        let e = growth_index(&GrowthModel::Sampled(samples), 1.0).unwrap();
        assert!((e.value - 0.25).abs() < 1e-9);
        let flat: Vec<(f64, f64)> = (1..=20).map(|j| (1.0 - 2f64.powi(-j), 1.0)).collect();
        assert!(growth_index(&GrowthModel::Sampled(flat), 1.0).is_err());
    }

    #[test]
    fn defect_examples() {
        let cfg = QuadConfig::default();
        let grid = RadialGrid::default_for(f64::INFINITY, 1.0).unwrap();
        let d = defect(&line(), &hs(2, "x0"), None, &grid, &cfg, false).unwrap();
        assert!((d.value - 1.0).abs() < 1e-9);
        let d = defect(&line(), &hs(2, "x1"), None, &grid, &cfg, true).unwrap();
        assert!(d.value < 0.15 && d.value >= -1e-9, "{d:?}");
        let one = defect(&line(), &hs(2, "x0 - x1"), Some(1), &grid, &cfg, false).unwrap();
        let inf = defect(&line(), &hs(2, "x0 - x1"), None, &grid, &cfg, false).unwrap();
        assert_eq!(one.value, inf.value);
    }

    #[test]
    fn ru_sibony_examples() {
        let cfg = QuadConfig::default();
        let grid = RadialGrid::new(0.5, geometric(10.0, 1e3, 5), f64::INFINITY).unwrap();
        let h = |n: usize, s: &[&str]| s.iter().map(|x| parse_homog(x, n).unwrap()).collect::<Vec<_>>();
        let rows = check_ru_sibony(&line(), &h(2, &["x0", "x1", "x0 - x1"]), &grid, &cfg).unwrap();
        assert!(rows.last().unwrap().relative_margin >= -0.05, "{rows:?}");
        let conic = Curve::parse(&["1", "z", "z^2"], f64::INFINITY).unwrap();
        let lines = h(3, &["x0 + x1 + 2*x2", "x0 - x1 + 3*x2", "2*x0 + x1 - x2", "x0 + 5*x1 + 7*x2"]);
        let rows = check_ru_sibony(&conic, &lines, &grid, &cfg).unwrap();
        assert!(rows.last().unwrap().relative_margin >= -0.05, "{rows:?}");
        let rows = check_ru_sibony(&conic, &[], &grid, &cfg).unwrap();
        assert!(rows.iter().all(|r| r.margin >= 0.0));
    }

    #[test]
    fn profile_is_monotone_with_ordered_counts() {
        let cfg = QuadConfig::default();
        let c = Curve::parse(&["1", "z", "z^2"], f64::INFINITY).unwrap();
        let family = vec![hs(3, "x0 + x1 + x2"), hs(3, "(x0 - 2*x1)^2 + x2^2")];
        let grid = RadialGrid::new(0.1, geometric(1.0, 100.0, 15), f64::INFINITY).unwrap();
        let p = NevanlinnaProfile::compute(&c, &family, &[Some(1), Some(1)], &grid, &cfg, false).unwrap();
        assert!(p.monotone);
        for h in &p.hypersurfaces {
            for (a, b) in h.counting_full.iter().zip(&h.counting_truncated) {
                assert!(a >= b && *b >= 0.0);
            }
        }
        assert_eq!(p.csv_header().len(), p.csv_rows()[0].len());
    }
}
