//! Hilbert weights by greedy basis selection, Chow weights as limits of
//! normalized Hilbert weights, and checks of the associated inequalities.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::algebra::gaussian::rat_to_f64;
use crate::algebra::{monomials_of_degree, GaussianRational, HomogPoly, Monomial, WeightVector};
use crate::error::{Error, Result};
use crate::groebner::Variety;
use crate::position::{distributive_constant, HypersurfaceFamily, SamplingConfig};

/// Sparse vector in standard-monomial coordinates.
pub type SparseVec = BTreeMap<usize, GaussianRational>;

/// Normal forms of all degree-`u` monomials modulo `I_X`, in the coordinate
/// system of the standard monomials.
#[derive(Clone, Debug)]
pub struct NormalFormTable {
    pub u: u32,
    /// Degree-`u` monomials, ascending grevlex.
    pub monomials: Vec<Monomial>,
    pub standard: Vec<Monomial>,
    pub forms: HashMap<Monomial, SparseVec>,
}

impl NormalFormTable {
    /// Processes monomials in ascending order so that every non-standard
    /// `m = t·lt(g)` resolves through already-known `t·μ` for the tail `μ` of `g`.
    pub fn new(x: &Variety, u: u32) -> Self {
        let mut monomials = monomials_of_degree(x.num_vars(), u);
        monomials.reverse();
        let basis = x.basis().polys();
        let mut standard = Vec::new();
        let mut index = HashMap::new();
        let mut forms: HashMap<Monomial, SparseVec> = HashMap::with_capacity(monomials.len());
        for m in &monomials {
            let g = basis.iter().find(|g| g.leading_monomial().unwrap().divides(m));
            let v = match g {
                None => {
                    let k = standard.len();
                    standard.push(m.clone());
                    index.insert(m.clone(), k);
                    SparseVec::from([(k, GaussianRational::one())])
                }
                Some(g) => reduce_through(g, m, &forms),
            };
            forms.insert(m.clone(), v);
        }
        Self { u, monomials, standard, forms }
    }

    pub fn dimension(&self) -> usize {
        self.standard.len()
    }
}

fn reduce_through(g: &HomogPoly, m: &Monomial, forms: &HashMap<Monomial, SparseVec>) -> SparseVec {
    let t = g.leading_monomial().unwrap().quotient_of(m).unwrap();
    let mut acc = SparseVec::new();
    // g is monic, so x^m ≡ −Σ_tail c·x^{t·μ}
    for (mu, c) in g.terms().rev().skip(1) {
        for (k, a) in &forms[&mu.mul(&t)] {
            let e = acc.entry(*k).or_insert_with(GaussianRational::zero);
            *e -= &(c * a);
        }
    }
    acc.retain(|_, v| !v.is_zero());
    acc
}

/// Incremental row echelon form over ℚ(i), pivot on the largest column.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: BTreeMap<usize, SparseVec>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Inserts `v` if it is independent of the current rows.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let mut v = v.clone();
        while let Some((&p, c)) = v.iter().next_back() {
            let Some(row) = self.rows.get(&p) else {
                let inv = c.inv().unwrap();
                for x in v.values_mut() {
                    *x = &*x * &inv;
                }
                self.rows.insert(p, v);
                return true;
            };
            let c = c.clone();
            for (k, a) in row {
                let e = v.entry(*k).or_insert_with(GaussianRational::zero);
                *e -= &(&c * a);
            }
            v.retain(|_, x| !x.is_zero());
        }
        false
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HilbertWeightResult {
    #[serde(serialize_with = "crate::scenario::ser_rational")]
    pub value: BigRational,
    pub basis: Vec<Monomial>,
    pub u: u32,
    #[serde(serialize_with = "crate::scenario::ser_weights")]
    pub weights_used: WeightVector,
}

fn check_weights(x: &Variety, c: &WeightVector) -> Result<()> {
    if c.len() != x.num_vars() {
        return Err(Error::DimensionMismatch { expected: x.num_vars(), got: c.len() });
    }
    Ok(())
}

/// `S_X(u, c)`: the largest `Σ a·c` over monomial bases of `ℂ[x]_u / (I_X)_u`.
pub fn hilbert_weight(x: &Variety, u: u32, c: &WeightVector) -> Result<HilbertWeightResult> {
    check_weights(x, c)?;
    if u < 1 {
        return Err(Error::Precondition("u must be at least 1".into()));
    }
    let table = NormalFormTable::new(x, u);
    Ok(hilbert_weight_from_table(&table, c))
}

pub fn hilbert_weight_from_table(table: &NormalFormTable, c: &WeightVector) -> HilbertWeightResult {
    let mut order: Vec<(BigRational, &Monomial)> = table.monomials.iter().map(|m| (c.dot(m), m)).collect();
    // weight descending, then grevlex descending
    order.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| b.1.cmp(a.1)));
    let target = table.dimension();
    let mut ech = Echelon::default();
    let mut basis = Vec::with_capacity(target);
    let mut value = BigRational::zero();
    for (w, m) in order {
        if basis.len() == target {
            break;
        }
        if ech.insert(&table.forms[m]) {
            basis.push(m.clone());
            value += w;
        }
    }
    HilbertWeightResult { value, basis, u: table.u, weights_used: c.clone() }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChowEstimate {
    pub value: f64,
    /// `(u, s_u)` for every computed `u`.
    pub sequence: Vec<(u32, f64)>,
    pub extrapolants: Vec<f64>,
    pub error_bound: f64,
}

/// Ladder `round(u_max / 2^j)` for `j ≥ 0` while at least `k + 2`.
pub fn u_ladder(k: i32, u_max: u32) -> Vec<u32> {
    let floor = (k + 2).max(2) as u32;
    let mut out = Vec::new();
    let mut j = 0;
    loop {
        let u = ((u_max as f64) / 2f64.powi(j)).round() as u32;
        if u < floor || out.last() == Some(&u) {
            break;
        }
        out.push(u);
        j += 1;
    }
    out.reverse();
    out
}

/// Value at `h = 0` of the interpolating polynomial through `(h_i, s_i)`.
fn neville_at_zero(h: &[BigRational], s: &[BigRational]) -> BigRational {
    let mut p: Vec<BigRational> = s.to_vec();
    let n = p.len();
    for level in 1..n {
        for i in 0..n - level {
            let (hi, hj) = (&h[i], &h[i + level]);
            p[i] = (hj * &p[i] - hi * &p[i + 1]) / (hj - hi);
        }
    }
    p[0].clone()
}

/// Mumford-limit estimate of `e_X(c)` from `s_u = (k+1)δ S_X(u,c) / (u H_X(u))`.
pub fn chow_weight_estimate(x: &Variety, c: &WeightVector, u_max: u32) -> Result<ChowEstimate> {
    check_weights(x, c)?;
    let k = x.dim();
    if k < 0 {
        return Err(Error::Precondition("Chow weight of the empty variety".into()));
    }
    if u_max < (k + 3) as u32 {
        return Err(Error::Precondition(format!("u_max must be at least k + 3 = {}", k + 3)));
    }
    let ladder = u_ladder(k, u_max);
    let scale = BigRational::from_integer(BigInt::from((k as u64 + 1) * x.degree()));
    let exact: Vec<BigRational> = ladder
        .iter()
        .map(|&u| {
            let s = hilbert_weight(x, u, c)?.value;
            let denom = BigRational::from_integer(BigInt::from(u as u64 * x.hilbert_function(u)));
            Ok(&scale * s / denom)
        })
        .collect::<Result<_>>()?;
    let h: Vec<BigRational> = ladder.iter().map(|&u| BigRational::new(1.into(), BigInt::from(u))).collect();
    let diffs: Vec<BigRational> = exact.windows(2).map(|w| &w[1] - &w[0]).collect();
    for w in diffs.windows(2) {
        if (w[0].is_positive() && w[1].is_negative() || w[0].is_negative() && w[1].is_positive())
            && w[1].abs() > w[0].abs()
        {
            return Err(Error::Oscillating(format!(
                "s_u differences {} then {}",
                rat_to_f64(&w[0]),
                rat_to_f64(&w[1])
            )));
        }
    }
    let extrapolants: Vec<BigRational> = (0..exact.len())
        .map(|i| {
            let lo = i.saturating_sub(2);
            neville_at_zero(&h[lo..=i], &exact[lo..=i])
        })
        .collect();
    let last3 = &extrapolants[extrapolants.len().saturating_sub(3)..];
    let hi = last3.iter().max().unwrap();
    let lo = last3.iter().min().unwrap();
    Ok(ChowEstimate {
        value: rat_to_f64(extrapolants.last().unwrap()),
        sequence: ladder.iter().zip(&exact).map(|(&u, s)| (u, rat_to_f64(s))).collect(),
        extrapolants: extrapolants.iter().map(rat_to_f64).collect(),
        error_bound: rat_to_f64(&(hi - lo)),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub margin: f64,
    pub tolerance: f64,
    pub falsified: bool,
}

/// Margin of `S/(uH) ≥ e/((k+1)δ) − ((2k+1)δ/u)·max c`.
pub fn check_evertse_ferretti(x: &Variety, u: u32, c: &WeightVector, est: &ChowEstimate) -> Result<InequalityCheck> {
    check_weights(x, c)?;
    let (k, delta) = (x.dim(), x.degree());
    if k < 0 {
        return Err(Error::Precondition("empty variety".into()));
    }
    if (u as u64) <= delta {
        return Err(Error::Precondition(format!("u = {u} must exceed the degree {delta}")));
    }
    let s = hilbert_weight(x, u, c)?.value;
    let lhs = s / BigRational::from_integer(BigInt::from(u as u64 * x.hilbert_function(u)));
    let kd = ((k as u64 + 1) * delta) as f64;
    let slack = BigRational::new(BigInt::from((2 * k as u64 + 1) * delta), BigInt::from(u)) * c.max();
    let margin = rat_to_f64(&lhs) - (est.value / kd - rat_to_f64(&slack));
    let tolerance = est.error_bound / kd;
    Ok(InequalityCheck { margin, tolerance, falsified: margin < -tolerance - 1e-12 })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChowLowerBoundCheck {
    pub estimate: ChowEstimate,
    #[serde(serialize_with = "crate::scenario::ser_rational")]
    pub distributive: BigRational,
    pub bound: f64,
    pub check: InequalityCheck,
    /// The selection has at least `k + 1` hyperplanes.
    pub ell_at_least_k_plus_one: bool,
}

/// Margin of `e_Y(c) ≥ (δ_Y / Δ_{ℋ,Y}) Σ_j c_{i_j}` for coordinate hyperplanes
/// `H_{i_1}, …, H_{i_ℓ}`, after checking the selection hypotheses.
pub fn check_chow_lower_bound(
    y: &Variety,
    subset: &[usize],
    c: &WeightVector,
    u_max: u32,
) -> Result<ChowLowerBoundCheck> {
    check_weights(y, c)?;
    let nv = y.num_vars();
    if subset.is_empty() || subset.iter().any(|&i| i >= nv) {
        return Err(Error::Validation { field: "subset".into(), message: format!("indices must lie in 0..{nv}") });
    }
    let w = c.entries();
    let last = &w[*subset.last().unwrap()];
    if subset.iter().any(|&i| &w[i] < last) {
        return Err(Error::Hypothesis { index: 1, message: "the last selected weight is not the minimum".into() });
    }
    let hyper: Vec<HomogPoly> = subset.iter().map(|&i| HomogPoly::var(nv, i)).collect();
    if y.intersect(&hyper[..hyper.len() - 1])?.is_empty() {
        return Err(Error::Hypothesis { index: 2, message: "Y misses the first ℓ − 1 hyperplanes".into() });
    }
    for (j, h) in subset.iter().zip(&hyper) {
        if y.basis().contains(h) {
            return Err(Error::Hypothesis { index: 3, message: format!("Y lies in H_{j}") });
        }
    }
    let family = HypersurfaceFamily::fixed(nv, &hyper)?;
    let distributive = distributive_constant(y, &family, &SamplingConfig::default())?.value;
    let estimate = chow_weight_estimate(y, c, u_max)?;
    let sum = subset.iter().fold(BigRational::zero(), |a, &i| a + &w[i]);
    let bound = rat_to_f64(&(BigRational::from_integer(BigInt::from(y.degree())) * sum / &distributive));
    let margin = estimate.value - bound;
    let tolerance = estimate.error_bound;
    Ok(ChowLowerBoundCheck {
        check: InequalityCheck { margin, tolerance, falsified: margin < -tolerance - 1e-9 },
        ell_at_least_k_plus_one: subset.len() as i32 > y.dim(),
        estimate,
        distributive,
        bound,
    })
}
