//! Zero divisors of analytic functions in a closed disc `|z| ≤ t`.
//!
//! Polynomial (and rational) functions go through the exact square-free
//! decomposition followed by companion-matrix eigenvalues. Exponential
//! polynomials are handled by the argument principle: the total count
//! from a trapezoid winding integral on the outer circle, locations by
//! recursive quadrisection with per-cell windings.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::function::{AnalyticFunction, NumericFunction};
use super::upoly::{horner, UPoly};
use crate::error::{Error, Result};

/// Zeros closer than this to the contour trigger a radius nudge.
pub const CONTOUR_GUARD: f64 = 1e-9;
/// Size of one radius nudge.
pub const NUDGE_STEP: f64 = 1e-8;
/// Quadrisection cells below this size are reported as one cluster.
pub const CELL_FLOOR: f64 = 1e-7;
const MIN_NODES: usize = 64;
const MAX_NODES: usize = 1 << 18;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivisorPoint {
    pub location: Complex64,
    pub multiplicity: u32,
}

/// A finite divisor `Σ m_j·[z_j]` inside the closed disc of radius `radius`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Divisor {
    pub points: Vec<DivisorPoint>,
    /// Radius actually used, after any nudge away from zeros on the contour.
    pub radius: f64,
    pub requested_radius: f64,
    /// Total degree from an independent winding computation on `|z| = radius`.
    pub residual_count_check: u32,
}

impl Divisor {
    pub fn empty(radius: f64) -> Self {
        Self { points: Vec::new(), radius, requested_radius: radius, residual_count_check: 0 }
    }

    /// Divisor from explicit points, with the check count set to their total.
    pub fn from_points(points: Vec<(Complex64, u32)>, radius: f64) -> Self {
        let points: Vec<DivisorPoint> = points
            .into_iter()
            .map(|(location, multiplicity)| DivisorPoint { location, multiplicity })
            .collect();
        let total = points.iter().map(|p| p.multiplicity).sum();
        Self { points, radius, requested_radius: radius, residual_count_check: total }
    }

    pub fn total(&self) -> u32 {
        self.points.iter().map(|p| p.multiplicity).sum()
    }

    pub fn max_multiplicity(&self) -> u32 {
        self.points.iter().map(|p| p.multiplicity).max().unwrap_or(0)
    }

    pub fn was_nudged(&self) -> bool {
        self.radius != self.requested_radius
    }

    /// Every multiplicity multiplied by `k` (the divisor of `g^k`).
    pub fn scaled(&self, k: u32) -> Divisor {
        Divisor {
            points: self
                .points
                .iter()
                .map(|p| DivisorPoint { location: p.location, multiplicity: p.multiplicity * k })
                .collect(),
            residual_count_check: self.residual_count_check * k,
            ..self.clone()
        }
    }

    fn sort(&mut self) {
        self.points.sort_by(|a, b| {
            a.location
                .norm()
                .total_cmp(&b.location.norm())
                .then(a.location.arg().total_cmp(&b.location.arg()))
        });
    }
}

/// Zero divisor of `g` in `|z| ≤ t`.
pub fn zeros_in_disc(g: &AnalyticFunction, t: f64) -> Result<Divisor> {
    match g {
        AnalyticFunction::Polynomial(p) => polynomial_zeros(p, t),
        AnalyticFunction::Rational { num, .. } => polynomial_zeros(num, t),
        AnalyticFunction::ExpPoly(_) => zeros_by_winding(g, t),
    }
}

fn check_radius(t: f64) -> Result<()> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::Precondition(format!("disc radius must be positive and finite, got {t}")));
    }
    Ok(())
}

fn nudge(t: f64, moduli: impl Iterator<Item = f64> + Clone) -> f64 {
    let mut r = t;
    while moduli.clone().any(|m| (m - r).abs() < CONTOUR_GUARD) {
        r += NUDGE_STEP;
    }
    r
}

/// A circle inside the zero-free annulus around `radius`, as far from the
/// known zero moduli as possible; zeros beyond `cap` are not known.
fn safe_check_radius(radius: f64, cap: f64, moduli: impl Iterator<Item = f64>) -> f64 {
    let (mut lo, mut hi) = (0.0f64, cap.max(radius));
    for m in moduli {
        if m <= radius {
            lo = lo.max(m);
        } else {
            hi = hi.min(m);
        }
    }
    if lo == 0.0 && hi > radius {
        // no zero inside: stay near the requested circle
        return radius.min(0.5 * (radius + hi)).max(0.5 * radius);
    }
    0.5 * (lo + hi)
}

/// Exact route: square-free parts, then simple roots of each part.
pub fn polynomial_zeros(p: &UPoly, t: f64) -> Result<Divisor> {
    check_radius(t)?;
    if p.is_zero() {
        return Err(Error::Degenerate("zero divisor of the zero function".into()));
    }
    let mut all = Vec::new();
    for (part, mult) in p.square_free() {
        for z in simple_roots(&part)? {
            all.push((z, mult));
        }
    }
    let radius = nudge(t, all.iter().map(|(z, _)| z.norm()));
    let all_moduli: Vec<f64> = all.iter().map(|(z, _)| z.norm()).collect();
    let mut d = Divisor {
        points: all
            .into_iter()
            .filter(|(z, _)| z.norm() <= radius)
            .map(|(location, multiplicity)| DivisorPoint { location, multiplicity })
            .collect(),
        radius,
        requested_radius: t,
        residual_count_check: 0,
    };
    d.sort();
    let num = p.to_complex();
    let dnum = p.derivative().to_complex();
    let check = safe_check_radius(radius, 2.0 * radius + 1.0, all_moduli.into_iter());
    d.residual_count_check =
        circle_winding(&|z| horner(&num, z), &|z| horner(&dnum, z), Complex64::new(0.0, 0.0), check)?;
    if d.residual_count_check != d.total() {
        return Err(Error::WindingNotCertified(format!(
            "root count {} disagrees with winding {}",
            d.total(),
            d.residual_count_check
        )));
    }
    Ok(d)
}

/// Roots of a square-free polynomial: companion eigenvalues polished by Newton.
fn simple_roots(p: &UPoly) -> Result<Vec<Complex64>> {
    let deg = p.degree().unwrap_or(0);
    if deg == 0 {
        return Ok(Vec::new());
    }
    let c = p.monic().to_complex();
    if deg == 1 {
        return Ok(vec![-c[0]]);
    }
    let mut m = DMatrix::<Complex64>::zeros(deg, deg);
    for i in 1..deg {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..deg {
        m[(i, deg - 1)] = -c[i];
    }
    let eig = nalgebra::linalg::Schur::new(m)
        .eigenvalues()
        .ok_or_else(|| Error::WindingNotCertified("companion Schur form not triangular".into()))?;
    let dc = p.monic().derivative().to_complex();
    Ok(eig
        .iter()
        .map(|&z0| {
            let mut z = z0;
            for _ in 0..50 {
                let d = horner(&dc, z);
                if d.norm() == 0.0 {
                    break;
                }
                let step = horner(&c, z) / d;
                z -= step;
                if step.norm() <= 1e-16 * z.norm().max(1.0) {
                    break;
                }
            }
            z
        })
        .collect())
}

/// Argument-principle winding of `g` around the circle `|z − center| = rho`,
/// by trapezoid quadrature of `(z − c) g'/g` with node doubling.
pub fn circle_winding(
    g: &(dyn Fn(Complex64) -> Complex64 + Sync),
    dg: &(dyn Fn(Complex64) -> Complex64 + Sync),
    center: Complex64,
    rho: f64,
) -> Result<u32> {
    let mut n = MIN_NODES;
    let mut prev: Option<i64> = None;
    while n <= MAX_NODES {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let w = Complex64::from_polar(rho, 2.0 * PI * k as f64 / n as f64);
            let z = center + w;
            let gz = g(z);
            if gz.norm() == 0.0 || !gz.is_finite() {
                return Err(Error::WindingNotCertified(format!("function vanishes on contour at {z}")));
            }
            acc += w * dg(z) / gz;
        }
        let mean = acc / n as f64;
        let rounded = mean.re.round();
        let ok = (mean - Complex64::new(rounded, 0.0)).norm() < 0.25;
        if ok && prev == Some(rounded as i64) {
            if rounded < 0.0 {
                return Err(Error::WindingNotCertified("negative winding for a holomorphic function".into()));
            }
            return Ok(rounded as u32);
        }
        prev = ok.then_some(rounded as i64);
        n *= 2;
    }
    Err(Error::WindingNotCertified(format!("no stable integer within {MAX_NODES} nodes")))
}

struct Evaluator {
    g: NumericFunction,
    dg: NumericFunction,
}

#[derive(Clone, Copy, Debug)]
struct Cell {
    x: f64,
    y: f64,
    w: f64,
    h: f64,
}

impl Cell {
    fn size(&self) -> f64 {
        self.w.max(self.h)
    }

    fn center(&self) -> Complex64 {
        Complex64::new(self.x + self.w / 2.0, self.y + self.h / 2.0)
    }

    fn distance_from_origin(&self) -> f64 {
        let dx = if self.x > 0.0 { self.x } else if self.x + self.w < 0.0 { -(self.x + self.w) } else { 0.0 };
        let dy = if self.y > 0.0 { self.y } else if self.y + self.h < 0.0 { -(self.y + self.h) } else { 0.0 };
        dx.hypot(dy)
    }

    fn contains(&self, z: Complex64, slack: f64) -> bool {
        z.re >= self.x - slack
            && z.re <= self.x + self.w + slack
            && z.im >= self.y - slack
            && z.im <= self.y + self.h + slack
    }

    fn split(&self, fx: f64, fy: f64) -> [Cell; 4] {
        let (w1, h1) = (self.w * fx, self.h * fy);
        let (w2, h2) = (self.w - w1, self.h - h1);
        [
            Cell { x: self.x, y: self.y, w: w1, h: h1 },
            Cell { x: self.x + w1, y: self.y, w: w2, h: h1 },
            Cell { x: self.x, y: self.y + h1, w: w1, h: h2 },
            Cell { x: self.x + w1, y: self.y + h1, w: w2, h: h2 },
        ]
    }
}

impl Evaluator {
    fn g(&self, z: Complex64) -> Complex64 {
        self.g.eval(z)
    }

    fn dg(&self, z: Complex64) -> Complex64 {
        self.dg.eval(z)
    }

    /// Winding of `g` around the rectangle boundary by continuous argument tracking.
    fn cell_winding(&self, c: &Cell) -> Option<i64> {
        let corners = [
            Complex64::new(c.x, c.y),
            Complex64::new(c.x + c.w, c.y),
            Complex64::new(c.x + c.w, c.y + c.h),
            Complex64::new(c.x, c.y + c.h),
        ];
        let mut total = 0.0;
        for k in 0..4 {
            let (a, b) = (corners[k], corners[(k + 1) % 4]);
            let pieces = 16;
            let mut za = a;
            let mut ga = self.g(za);
            for j in 1..=pieces {
                let zb = a + (b - a) * (j as f64 / pieces as f64);
                let gb = self.g(zb);
                total += self.arg_change(za, zb, ga, gb, 0)?;
                za = zb;
                ga = gb;
            }
        }
        let w = total / (2.0 * PI);
        let r = w.round();
        ((w - r).abs() < 0.1).then_some(r as i64)
    }

    fn arg_change(&self, a: Complex64, b: Complex64, ga: Complex64, gb: Complex64, depth: u32) -> Option<f64> {
        let tiny = 1e-300;
        if ga.norm() < tiny || gb.norm() < tiny || !ga.is_finite() || !gb.is_finite() {
            return None;
        }
        let m = (a + b) / 2.0;
        let gm = self.g(m);
        if gm.norm() < tiny {
            return None;
        }
        let d = (gb / ga).arg();
        let d1 = (gm / ga).arg();
        let d2 = (gb / gm).arg();
        if d.abs() < PI / 8.0 && (d1 + d2 - d).abs() < 1e-6 {
            return Some(d);
        }
        if depth > 48 {
            return None;
        }
        Some(self.arg_change(a, m, ga, gm, depth + 1)? + self.arg_change(m, b, gm, gb, depth + 1)?)
    }

    /// Newton iteration with known multiplicity, started at the cell centre.
    fn newton(&self, start: Complex64, mult: u32) -> Option<Complex64> {
        let mut z = start;
        let mut last = f64::INFINITY;
        for _ in 0..100 {
            let gz = self.g(z);
            if gz.norm() == 0.0 {
                return Some(z);
            }
            let d = self.dg(z);
            if d.norm() == 0.0 || !d.is_finite() {
                break;
            }
            let step = gz / d * mult as f64;
            z -= step;
            if !z.is_finite() {
                return None;
            }
            last = step.norm();
            if last <= 1e-15 * z.norm().max(1.0) {
                return Some(z);
            }
        }
        // multiple roots stall at ~sqrt(eps) accuracy
        (last <= 1e-9 * z.norm().max(1.0)).then_some(z)
    }

    fn children(&self, cell: &Cell, w: i64) -> Option<Vec<(Cell, i64)>> {
        const SPLITS: [(f64, f64); 5] = [(0.5, 0.5), (0.5123, 0.4871), (0.4789, 0.5217), (0.5371, 0.4633), (0.4567, 0.5411)];
        for (fx, fy) in SPLITS {
            let kids = cell.split(fx, fy);
            let ws: Option<Vec<i64>> = kids.iter().map(|k| self.cell_winding(k)).collect();
            if let Some(ws) = ws {
                if ws.iter().sum::<i64>() == w && ws.iter().all(|&x| x >= 0) {
                    return Some(kids.into_iter().zip(ws).filter(|(_, x)| *x > 0).collect());
                }
            }
        }
        None
    }

    fn locate(&self, cell: Cell, w: i64, localize: f64) -> Result<Vec<(Complex64, u32)>> {
        if w <= 0 {
            return Ok(Vec::new());
        }
        let size = cell.size();
        if w == 1 || size < localize {
            if let Some(z) = self.newton(cell.center(), w as u32) {
                if cell.contains(z, 1e-12 * z.norm().max(1.0)) {
                    let rho = (size / 4.0).max(1e-9 * z.norm().max(1.0));
                    let check = circle_winding(&|p| self.g(p), &|p| self.dg(p), z, rho);
                    if matches!(check, Ok(m) if m as i64 == w) {
                        return Ok(vec![(z, w as u32)]);
                    }
                }
            }
        }
        if size < CELL_FLOOR {
            return Ok(vec![(cell.center(), w as u32)]);
        }
        let kids = self.children(&cell, w).ok_or_else(|| {
            Error::WindingNotCertified(format!("cell windings near {} do not add up", cell.center()))
        })?;
        let parts: Result<Vec<Vec<(Complex64, u32)>>> =
            kids.into_par_iter().map(|(k, kw)| self.locate(k, kw, localize)).collect();
        Ok(parts?.into_iter().flatten().collect())
    }
}

/// Argument-principle route, usable for every variant (rational functions
/// are handled through their numerator).
pub fn zeros_by_winding(g: &AnalyticFunction, t: f64) -> Result<Divisor> {
    check_radius(t)?;
    if g.is_zero() {
        return Err(Error::Degenerate("zero divisor of the zero function".into()));
    }
    let g = match g {
        AnalyticFunction::Rational { num, .. } => AnalyticFunction::poly(num.clone()),
        other => other.clone(),
    };
    let ev = Evaluator { g: g.numeric(), dg: g.derivative(1).numeric() };
    let outer = t * (1.0 + 1e-6) + 1e-6;
    let mut found = None;
    for bump in [1.0, 1.000_137, 1.000_419, 1.001_03] {
        let b = outer * bump;
        let root = Cell { x: -b, y: -b, w: 2.0 * b, h: 2.0 * b };
        if let Some(w) = ev.cell_winding(&root) {
            found = Some((root, w));
            break;
        }
    }
    let (root, w) = found.ok_or_else(|| Error::WindingNotCertified("outer square touches a zero".into()))?;
    let localize = 1e-3 * t.max(1.0);
    let zeros = locate_in_disc(&ev, root, w, outer, localize)?;
    let radius = nudge(t, zeros.iter().map(|(z, _)| z.norm()));
    let moduli: Vec<f64> = zeros.iter().map(|(z, _)| z.norm()).collect();
    let mut d = Divisor {
        points: zeros
            .into_iter()
            .filter(|(z, _)| z.norm() <= radius)
            .map(|(location, multiplicity)| DivisorPoint { location, multiplicity })
            .collect(),
        radius,
        requested_radius: t,
        residual_count_check: 0,
    };
    d.sort();
    let check = safe_check_radius(radius, outer, moduli.into_iter());
    d.residual_count_check =
        circle_winding(&|z| ev.g(z), &|z| ev.dg(z), Complex64::new(0.0, 0.0), check)?;
    if d.residual_count_check != d.total() {
        return Err(Error::WindingNotCertified(format!(
            "located {} zeros but the outer winding is {}",
            d.total(),
            d.residual_count_check
        )));
    }
    Ok(d)
}

/// Quadrisection restricted to cells meeting the disc of radius `outer`.
fn locate_in_disc(ev: &Evaluator, root: Cell, w: i64, outer: f64, localize: f64) -> Result<Vec<(Complex64, u32)>> {
    // a cell far from the disc is dropped without further refinement
    if root.distance_from_origin() > outer || w == 0 {
        return Ok(Vec::new());
    }
    if root.size() <= outer / 4.0 {
        return ev.locate(root, w, localize);
    }
    let kids = ev
        .children(&root, w)
        .ok_or_else(|| Error::WindingNotCertified("cell windings do not add up".into()))?;
    let parts: Result<Vec<Vec<(Complex64, u32)>>> = kids
        .into_par_iter()
        .map(|(k, kw)| locate_in_disc(ev, k, kw, outer, localize))
        .collect();
    Ok(parts?.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> AnalyticFunction {
        AnalyticFunction::parse(s).unwrap()
    }

    #[test]
    fn cubic_with_double_root() {
        let d = zeros_in_disc(&f("z*(z-1)^2"), 2.0).unwrap();
        assert_eq!(d.total(), 3);
        assert_eq!(d.residual_count_check, 3);
        assert_eq!(d.points.len(), 2);
        assert!(d.points[0].location.norm() < 1e-12);
        assert_eq!(d.points[0].multiplicity, 1);
        assert!((d.points[1].location - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(d.points[1].multiplicity, 2);
    }

    #[test]
    fn exp_minus_one_in_radius_seven() {
        let d = zeros_in_disc(&f("exp(z) - 1"), 7.0).unwrap();
        assert_eq!(d.total(), 3);
        assert_eq!(d.points.len(), 3);
        let mut targets = vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 2.0 * PI),
            Complex64::new(0.0, -2.0 * PI),
        ];
        for p in &d.points {
            assert_eq!(p.multiplicity, 1);
            let k = targets.iter().position(|t| (t - p.location).norm() < 1e-6).expect("unexpected zero");
            targets.remove(k);
        }
    }

    #[test]
    fn exponential_has_no_zeros() {
        let d = zeros_in_disc(&f("exp(z)"), 5.0).unwrap();
        assert!(d.points.is_empty());
        assert_eq!(d.residual_count_check, 0);
    }

    #[test]
    fn zero_on_contour_nudges_radius() {
        let d = zeros_in_disc(&f("z - 1"), 1.0).unwrap();
        assert!(d.was_nudged());
        assert!(d.radius > 1.0 && d.radius < 1.0 + 1e-7);
        assert_eq!(d.total(), 1);
    }

    #[test]
    fn rational_uses_numerator() {
        let d = zeros_in_disc(&f("rational: (z - 1/2)/(z + 1/3)"), 1.0).unwrap();
        assert_eq!(d.total(), 1);
        assert!((d.points[0].location - Complex64::new(0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn winding_route_finds_double_root() {
        let g = f("(z - 1/3)^2*(z + 1/2*i)");
        let d = zeros_by_winding(&g, 1.0).unwrap();
        assert_eq!(d.total(), 3);
        let double = d.points.iter().find(|p| p.multiplicity == 2).expect("double root");
        assert!((double.location - Complex64::new(1.0 / 3.0, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn zero_function_rejected() {
        assert!(zeros_in_disc(&AnalyticFunction::zero(), 1.0).is_err());
    }
}
