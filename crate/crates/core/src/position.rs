//! Distributive constants, weakly subgeneral position, and the norm
//! domination sweep for families of (moving) hypersurfaces.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{lcm_degree, GaussianRational, HomogPoly, Hypersurface};
use crate::analytic::{AnalyticFunction, Curve};
use crate::error::{Error, Result};
use crate::groebner::Variety;

/// Largest family for which the subset lattice is scanned.
pub const MAX_FAMILY: usize = 16;

/// A family `Q_1, …, Q_q` of hypersurfaces in a common ambient space.
#[derive(Clone, Debug, PartialEq)]
pub struct HypersurfaceFamily {
    num_vars: usize,
    members: Vec<Hypersurface>,
}

impl HypersurfaceFamily {
    pub fn new(num_vars: usize, members: Vec<Hypersurface>) -> Result<Self> {
        for q in &members {
            if q.num_vars() != num_vars {
                return Err(Error::DimensionMismatch { expected: num_vars, got: q.num_vars() });
            }
        }
        Ok(Self { num_vars, members })
    }

    pub fn fixed(num_vars: usize, forms: &[HomogPoly]) -> Result<Self> {
        Self::new(num_vars, forms.iter().map(Hypersurface::fixed).collect::<Result<Vec<_>>>()?)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn members(&self) -> &[Hypersurface] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_moving(&self) -> bool {
        !self.members.iter().all(|q| q.is_fixed())
    }

    pub fn subfamily(&self, indices: &[usize]) -> Result<Self> {
        let members = indices
            .iter()
            .map(|&i| {
                self.members
                    .get(i)
                    .cloned()
                    .ok_or_else(|| Error::Validation { field: "indices".into(), message: format!("index {i} out of range") })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.num_vars, members)
    }

    /// Whether `z` is a zero or pole of some coefficient.
    pub fn is_bad_point(&self, z: &GaussianRational) -> bool {
        self.members.iter().any(|q| q.is_bad_point(z))
    }

    /// All members as constant forms at `z`.
    pub fn at(&self, z: &GaussianRational) -> Option<Vec<HomogPoly>> {
        self.members.iter().map(|q| q.at(z)).collect()
    }

    pub fn lcm_degree(&self) -> u32 {
        lcm_degree(&self.members)
    }

    fn check_exact_coefficients(&self) -> Result<()> {
        for q in &self.members {
            for a in q.coeffs().values() {
                if matches!(a, AnalyticFunction::ExpPoly(_)) {
                    return Err(Error::Unsupported(
                        "exponential-polynomial coefficients cannot be sampled exactly".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// How moving families are sampled at generic points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SamplingConfig {
    pub samples: usize,
    pub seed: u64,
    /// Resampling attempts per requested sample before giving up.
    pub max_attempts: usize,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self { samples: 3, seed: 0x5eed, max_attempts: 64 }
    }
}

/// Random Gaussian-rational points avoiding the bad set of `family`.
pub fn sample_points(family: &HypersurfaceFamily, cfg: &SamplingConfig) -> Result<Vec<GaussianRational>> {
    if !family.is_moving() {
        return Ok(vec![GaussianRational::zero()]);
    }
    family.check_exact_coefficients()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::with_capacity(cfg.samples);
    let budget = cfg.max_attempts * cfg.samples.max(1);
    let mut tries = 0;
    while out.len() < cfg.samples.max(1) {
        if tries == budget {
            return Err(Error::SamplingExhausted(budget));
        }
        tries += 1;
        let part = |rng: &mut ChaCha8Rng| {
            BigRational::new(BigInt::from(rng.gen_range(-40i64..=40)), BigInt::from(rng.gen_range(1i64..=9)))
        };
        let z = GaussianRational::new(part(&mut rng), part(&mut rng));
        if !family.is_bad_point(&z) && !out.contains(&z) {
            out.push(z);
        }
    }
    Ok(out)
}

/// One row of the subset table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubsetEntry {
    pub subset: Vec<usize>,
    pub size: usize,
    /// Dimension of `V ∩ ⋂_Γ Q_j*`, −1 when empty.
    pub dim: i32,
    #[serde(serialize_with = "crate::scenario::ser_rational")]
    pub ratio: BigRational,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistributiveReport {
    #[serde(serialize_with = "crate::scenario::ser_rational")]
    pub value: BigRational,
    pub witness: Vec<usize>,
    /// Subset table at the sample attaining the value.
    pub table: Vec<SubsetEntry>,
    #[serde(serialize_with = "crate::scenario::ser_gaussians")]
    pub sample_points: Vec<GaussianRational>,
    #[serde(serialize_with = "crate::scenario::ser_rationals")]
    pub per_sample_values: Vec<BigRational>,
    /// All samples gave the same value.
    pub samples_agree: bool,
    /// Every subset had empty intersection with V.
    pub degenerate: bool,
    /// Dimensions never increased along inclusions.
    pub monotone: bool,
}

struct Scan {
    value: BigRational,
    witness: Vec<usize>,
    table: Vec<SubsetEntry>,
    monotone: bool,
}

fn subset_of(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).collect()
}

/// Dimension of `V ∩ ⋂_Γ V(forms)` for every nonempty `Γ`, grown one
/// generator at a time with supersets of empty intersections pruned.
fn scan_subsets(v: &Variety, forms: &[HomogPoly]) -> Result<Scan> {
    let q = forms.len();
    let n = v.dim();
    let mut varieties: HashMap<u32, Option<Variety>> = HashMap::new();
    varieties.insert(0, Some(v.clone()));
    let mut dims: HashMap<u32, i32> = HashMap::new();
    dims.insert(0, n);
    let mut monotone = true;
    for size in 1..=q {
        let level: Vec<u32> = (1u32..(1u32 << q)).filter(|m| m.count_ones() as usize == size).collect();
        let computed: Vec<(u32, Result<Option<Variety>>)> = level
            .par_iter()
            .map(|&mask| {
                let top = 31 - mask.leading_zeros();
                let parent = mask & !(1 << top);
                let res = match &varieties[&parent] {
                    None => Ok(None),
                    Some(pv) => pv.intersect(&forms[top as usize..top as usize + 1]).map(|x| (!x.is_empty()).then_some(x)),
                };
                (mask, res)
            })
            .collect();
        for (mask, res) in computed {
            let x = res?;
            let d = x.as_ref().map_or(-1, |x| x.dim());
            for i in subset_of(mask) {
                if dims.get(&(mask & !(1 << i))).is_some_and(|&pd| d > pd) {
                    monotone = false;
                }
            }
            dims.insert(mask, d);
            varieties.insert(mask, x);
        }
        // the previous level is no longer needed
        varieties.retain(|m, _| m.count_ones() as usize >= size);
    }
    let mut value = BigRational::zero();
    let mut witness = Vec::new();
    let mut table = Vec::new();
    let mut masks: Vec<u32> = dims.keys().copied().filter(|&m| m != 0).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    for mask in masks {
        let d = dims[&mask];
        let size = mask.count_ones() as usize;
        let ratio = if d < 0 {
            BigRational::zero()
        } else if d >= n {
            return Err(Error::Degenerate(format!(
                "the intersection over {:?} contains V",
                subset_of(mask)
            )));
        } else {
            BigRational::new(BigInt::from(size), BigInt::from(n - d))
        };
        if ratio > value {
            value = ratio.clone();
            witness = subset_of(mask);
        }
        table.push(SubsetEntry { subset: subset_of(mask), size, dim: d, ratio });
    }
    Ok(Scan { value, witness, table, monotone })
}

fn check_family(v: &Variety, family: &HypersurfaceFamily) -> Result<()> {
    if v.num_vars() != family.num_vars() {
        return Err(Error::DimensionMismatch { expected: v.num_vars(), got: family.num_vars() });
    }
    if family.len() > MAX_FAMILY {
        return Err(Error::Precondition(format!("at most {MAX_FAMILY} hypersurfaces, got {}", family.len())));
    }
    if v.dim() < 1 {
        return Err(Error::Precondition(format!("V must have dimension at least 1, got {}", v.dim())));
    }
    Ok(())
}

/// `Δ_V = max_Γ |Γ| / (n − dim(V ∩ ⋂_Γ Q_j*))` over nonempty `Γ`, empty
/// intersections contributing 0; moving families use the maximum over samples.
pub fn distributive_constant(
    v: &Variety,
    family: &HypersurfaceFamily,
    cfg: &SamplingConfig,
) -> Result<DistributiveReport> {
    check_family(v, family)?;
    let points = sample_points(family, cfg)?;
    let mut best: Option<Scan> = None;
    let mut per_sample = Vec::with_capacity(points.len());
    let mut monotone = true;
    for z in &points {
        let forms = family.at(z).ok_or(Error::SamplingExhausted(points.len()))?;
        let scan = scan_subsets(v, &forms)?;
        per_sample.push(scan.value.clone());
        monotone &= scan.monotone;
        if best.as_ref().is_none_or(|b| scan.value > b.value) {
            best = Some(scan);
        }
    }
    let best = best.expect("at least one sample");
    let samples_agree = per_sample.windows(2).all(|w| w[0] == w[1]);
    Ok(DistributiveReport {
        degenerate: best.value.is_zero(),
        value: best.value,
        witness: best.witness,
        table: best.table,
        sample_points: if family.is_moving() { points } else { Vec::new() },
        per_sample_values: per_sample,
        samples_agree,
        monotone,
    })
}

/// Whether every `(ℓ+1)`-subset meets `V` emptily at all sample points.
pub fn subgeneral_position(v: &Variety, family: &HypersurfaceFamily, ell: usize, cfg: &SamplingConfig) -> Result<bool> {
    if v.num_vars() != family.num_vars() {
        return Err(Error::DimensionMismatch { expected: v.num_vars(), got: family.num_vars() });
    }
    if ell + 1 > family.len() {
        return Err(Error::Precondition(format!("ℓ + 1 = {} exceeds q = {}", ell + 1, family.len())));
    }
    if family.len() > MAX_FAMILY {
        return Err(Error::Precondition(format!("at most {MAX_FAMILY} hypersurfaces, got {}", family.len())));
    }
    let q = family.len();
    for z in sample_points(family, cfg)? {
        let forms = family.at(&z).ok_or(Error::SamplingExhausted(1))?;
        let masks: Vec<u32> = (1u32..(1u32 << q)).filter(|m| m.count_ones() as usize == ell + 1).collect();
        let all_empty = masks
            .par_iter()
            .map(|&m| {
                let sel: Vec<HomogPoly> = subset_of(m).into_iter().map(|i| forms[i].clone()).collect();
                v.intersect(&sel).map(|x| x.is_empty())
            })
            .collect::<Result<Vec<bool>>>()?
            .into_iter()
            .all(|e| e);
        if !all_empty {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubgeneralBoundCheck {
    pub ell: usize,
    #[serde(serialize_with = "crate::scenario::ser_rational")]
    pub bound: BigRational,
    #[serde(serialize_with = "crate::scenario::ser_rational")]
    pub delta: BigRational,
    /// `(ℓ − n + 1) − Δ_V`.
    #[serde(serialize_with = "crate::scenario::ser_rational")]
    pub margin: BigRational,
    pub falsified: bool,
}

/// Compares `Δ_V` with `ℓ − n + 1` for a family in weakly ℓ-subgeneral position.
pub fn check_subgeneral_bound(
    v: &Variety,
    family: &HypersurfaceFamily,
    ell: usize,
    cfg: &SamplingConfig,
) -> Result<SubgeneralBoundCheck> {
    if !subgeneral_position(v, family, ell, cfg)? {
        return Err(Error::Precondition(format!("family is not in weakly {ell}-subgeneral position")));
    }
    let delta = distributive_constant(v, family, cfg)?.value;
    let bound = BigRational::from_integer(BigInt::from(ell as i64 - v.dim() as i64 + 1));
    let margin = &bound - &delta;
    Ok(SubgeneralBoundCheck { ell, falsified: margin < BigRational::zero(), bound, delta, margin })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DominationRow {
    pub radius: f64,
    /// `sup_θ ‖f‖^d / max_s |Q̃_s(f)|^{d/d_s}` over the sampled circle.
    pub max_ratio: f64,
}

/// Number of angles sampled per circle in [`check_norm_domination`].
pub const DOMINATION_ANGLES: usize = 512;

/// Sweeps circles `|z| = r` and records how far `‖f‖^d` exceeds the largest
/// normalized member value; members without an `x_0^d` coefficient are used raw.
pub fn check_norm_domination(
    v: &Variety,
    family: &HypersurfaceFamily,
    indices: &[usize],
    curve: &Curve,
    radii: &[f64],
    cfg: &SamplingConfig,
) -> Result<Vec<DominationRow>> {
    let sub = family.subfamily(indices)?;
    if v.num_vars() != family.num_vars() || curve.num_components() != v.num_vars() {
        return Err(Error::DimensionMismatch { expected: v.num_vars(), got: curve.num_components() });
    }
    for z in sample_points(&sub, cfg)? {
        let forms = sub.at(&z).ok_or(Error::SamplingExhausted(1))?;
        if !v.intersect(&forms)?.is_empty() {
            return Err(Error::Precondition(format!("subfamily {indices:?} has a common point on V")));
        }
    }
    for g in v.ideal().generators() {
        if !Hypersurface::fixed(g)?.compose(curve)?.is_zero() {
            return Err(Error::Precondition("curve does not lie on V".into()));
        }
    }
    let d = sub.lcm_degree() as f64;
    let normalized: Vec<(f64, _)> = sub
        .members()
        .iter()
        .map(|q| {
            let q = q.normalize().unwrap_or_else(|_| q.clone());
            (d / q.degree() as f64, q.numeric())
        })
        .collect();
    let f = curve.numeric();
    radii
        .iter()
        .map(|&r| {
            if !(r > 0.0 && r < curve.domain_r) {
                return Err(Error::Precondition(format!("radius {r} outside the domain")));
            }
            let mut sup = 0.0f64;
            for k in 0..DOMINATION_ANGLES {
                let z = Complex64::from_polar(r, 2.0 * PI * (k as f64 + 0.5) / DOMINATION_ANGLES as f64);
                let x = f.eval(z);
                let log_num = d * f.log_norm(z);
                let log_den = normalized
                    .iter()
                    .map(|(p, q)| p * q.eval(z, &x).norm().ln())
                    .fold(f64::NEG_INFINITY, f64::max);
                sup = sup.max((log_num - log_den).exp());
            }
            Ok(DominationRow { radius: r, max_ratio: sup })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_homog;

    fn fam(n: usize, forms: &[&str]) -> HypersurfaceFamily {
        HypersurfaceFamily::fixed(n, &forms.iter().map(|f| parse_homog(f, n).unwrap()).collect::<Vec<_>>()).unwrap()
    }

    fn ratio(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn distributive_examples() {
        let cfg = SamplingConfig::default();
        let p2 = Variety::projective_space(2);
        let general = distributive_constant(&p2, &fam(3, &["x0", "x1", "x2"]), &cfg).unwrap();
        assert_eq!(general.value, ratio(1, 1));
        assert!(general.monotone);
        let concurrent = distributive_constant(&p2, &fam(3, &["x0", "x1", "x0 + x1"]), &cfg).unwrap();
        assert_eq!(concurrent.value, ratio(3, 2));
        assert_eq!(concurrent.witness, vec![0, 1, 2]);
        let p1 = Variety::projective_space(1);
        let pts = distributive_constant(&p1, &fam(2, &["x0", "x1", "x0 - x1"]), &cfg).unwrap();
        assert_eq!(pts.value, ratio(1, 1));
    }

    #[test]
    fn subgeneral_examples() {
        let cfg = SamplingConfig::default();
        let p2 = Variety::projective_space(2);
        assert!(subgeneral_position(&p2, &fam(3, &["x0", "x1", "x2"]), 2, &cfg).unwrap());
        assert!(!subgeneral_position(&p2, &fam(3, &["x0", "x1", "x0 + x1"]), 2, &cfg).unwrap());
        let conic = Variety::from_generators(3, vec![parse_homog("x0*x2 - x1^2", 3).unwrap()]).unwrap();
        // x0 and x1 meet at (0:0:1), which lies on the conic
        assert!(!subgeneral_position(&conic, &fam(3, &["x0", "x1", "x2", "x0+x1+x2"]), 1, &cfg).unwrap());
        let lines = fam(3, &["x0 + x1 + 2*x2", "x0 - x1 + 3*x2", "2*x0 + x1 - x2", "x0 + 5*x1 + 7*x2"]);
        assert!(subgeneral_position(&conic, &lines, 1, &cfg).unwrap());
    }

    #[test]
    fn subgeneral_bound_examples() {
        let cfg = SamplingConfig::default();
        let p2 = Variety::projective_space(2);
        let r = check_subgeneral_bound(&p2, &fam(3, &["x0", "x1", "x2"]), 2, &cfg).unwrap();
        assert_eq!(r.margin, ratio(0, 1));
        let r = check_subgeneral_bound(&Variety::projective_space(1), &fam(2, &["x0", "x1", "x0 - x1"]), 1, &cfg).unwrap();
        assert_eq!(r.margin, ratio(0, 1));
        let r = check_subgeneral_bound(&p2, &fam(3, &["x0", "x1", "x2", "x0 + x1 + x2"]), 2, &cfg).unwrap();
        assert_eq!(r.margin, ratio(0, 1));
        assert!(!r.falsified);
        assert!(check_subgeneral_bound(&p2, &fam(3, &["x0", "x1", "x0 + x1"]), 2, &cfg).is_err());
    }

    #[test]
    fn norm_domination_examples() {
        let cfg = SamplingConfig::default();
        let p1 = Variety::projective_space(1);
        let line = Curve::parse(&["1", "z"], f64::INFINITY).unwrap();
        let rows = check_norm_domination(&p1, &fam(2, &["x0", "x1"]), &[0, 1], &line, &[0.5, 1.0, 3.0, 10.0], &cfg)
            .unwrap();
        for row in rows {
            assert!(row.max_ratio <= 2f64.sqrt() + 1e-12, "{row:?}");
        }
        let p2 = Variety::projective_space(2);
        assert!(check_norm_domination(&p2, &fam(3, &["x0", "x1"]), &[0, 1], &Curve::parse(&["1", "z", "z^2"], f64::INFINITY).unwrap(), &[1.0], &cfg).is_err());

        let conic = Variety::from_generators(3, vec![parse_homog("x0*x2 - x1^2", 3).unwrap()]).unwrap();
        let c = Curve::parse(&["1", "z", "z^2"], f64::INFINITY).unwrap();
        let rows = check_norm_domination(&conic, &fam(3, &["x0", "x2"]), &[0, 1], &c, &[1.0, 2.0, 5.0], &cfg).unwrap();
        assert!(rows.iter().all(|r| r.max_ratio.is_finite() && r.max_ratio < 10.0));
    }

    #[test]
    fn moving_family_samples_agree() {
        let q = |s: &[(&str, &str)]| Hypersurface::parse(3, 1, s.iter().copied()).unwrap();
        let family = HypersurfaceFamily::new(
            3,
            vec![
                q(&[("x0", "1"), ("x1", "z")]),
                q(&[("x1", "1"), ("x2", "z^2 + 1")]),
                q(&[("x0", "1"), ("x2", "1/(z - 3)")]),
            ],
        )
        .unwrap();
        let p2 = Variety::projective_space(2);
        let a = distributive_constant(&p2, &family, &SamplingConfig { seed: 1, ..Default::default() }).unwrap();
        let b = distributive_constant(&p2, &family, &SamplingConfig { seed: 2, ..Default::default() }).unwrap();
        assert_eq!(a.value, b.value);
        assert!(a.samples_agree && b.samples_agree);
        assert_eq!(a.sample_points.len(), 3);
        assert!(a.sample_points.iter().all(|z| !b.sample_points.contains(z)));
    }

    #[test]
    fn exp_coefficients_are_unsupported() {
        let q = Hypersurface::parse(2, 1, [("x0", "1"), ("x1", "exp(z)")]).unwrap();
        let family = HypersurfaceFamily::new(2, vec![q]).unwrap();
        let err = distributive_constant(&Variety::projective_space(1), &family, &SamplingConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
    }
}
