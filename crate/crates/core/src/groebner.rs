//! Buchberger's algorithm over ℚ(i) in grevlex order, normal forms, Hilbert
//! functions of projective varieties, and dimension/degree read off the
//! stabilized Hilbert function.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use num_traits::{One, Zero};

use crate::algebra::{binomial, monomials_of_degree, GaussianRational, HomogPoly, Monomial};
use crate::error::{Error, Result};

/// Default cap on single-term reduction steps per Gröbner computation.
pub const DEFAULT_REDUCTION_BUDGET: usize = 1_000_000;
/// Largest `u` at which the Hilbert-function plateau search may start.
pub const HILBERT_WINDOW_MAX: u32 = 60;

/// A homogeneous ideal given by generators in `num_vars` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Ideal {
    num_vars: usize,
    generators: Vec<HomogPoly>,
}

impl Ideal {
    pub fn new(num_vars: usize, generators: Vec<HomogPoly>) -> Result<Self> {
        for g in &generators {
            if g.num_vars() != num_vars {
                return Err(Error::DimensionMismatch { expected: num_vars, got: g.num_vars() });
            }
        }
        Ok(Self { num_vars, generators: generators.into_iter().filter(|g| !g.is_zero()).collect() })
    }

    /// The zero ideal, defining all of `ℙ^{num_vars − 1}`.
    pub fn zero(num_vars: usize) -> Self {
        Self { num_vars, generators: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn generators(&self) -> &[HomogPoly] {
        &self.generators
    }

    pub fn with(&self, extra: &[HomogPoly]) -> Result<Ideal> {
        let mut g = self.generators.clone();
        g.extend(extra.iter().cloned());
        Ideal::new(self.num_vars, g)
    }
}

/// Reduced Gröbner basis: monic, inter-reduced, sorted by leading monomial.
#[derive(Clone, Debug, PartialEq)]
pub struct GroebnerBasis {
    num_vars: usize,
    polys: Vec<HomogPoly>,
}

impl GroebnerBasis {
    pub fn polys(&self) -> &[HomogPoly] {
        &self.polys
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.polys.iter().map(|p| p.leading_monomial().unwrap().clone()).collect()
    }

    pub fn normal_form(&self, p: &HomogPoly) -> HomogPoly {
        let mut budget = usize::MAX;
        reduce(p, &self.polys, &mut budget).expect("unbounded budget")
    }

    pub fn contains(&self, p: &HomogPoly) -> bool {
        self.normal_form(p).is_zero()
    }

    /// Whether `x^m` is a standard monomial (not divisible by any leading term).
    pub fn is_standard(&self, m: &Monomial) -> bool {
        !self.polys.iter().any(|g| g.leading_monomial().unwrap().divides(m))
    }

    /// Buchberger's criterion: every S-polynomial reduces to zero.
    pub fn satisfies_buchberger_criterion(&self) -> bool {
        for i in 0..self.polys.len() {
            for j in (i + 1)..self.polys.len() {
                let s = s_polynomial(&self.polys[i], &self.polys[j]);
                if !self.normal_form(&s).is_zero() {
                    return false;
                }
            }
        }
        true
    }
}

fn s_polynomial(f: &HomogPoly, g: &HomogPoly) -> HomogPoly {
    let (mf, cf) = f.leading().unwrap();
    let (mg, cg) = g.leading().unwrap();
    let l = mf.lcm(mg);
    let a = f.mul_term(&mf.quotient_of(&l).unwrap(), &cf.inv().unwrap());
    let b = g.mul_term(&mg.quotient_of(&l).unwrap(), &cg.inv().unwrap());
    a.sub(&b).expect("same degree")
}

/// Full reduction of `p` modulo `basis`; each single-term step draws on `budget`.
fn reduce(p: &HomogPoly, basis: &[HomogPoly], budget: &mut usize) -> Result<HomogPoly> {
    let mut work = p.clone().take_terms();
    let mut rest = BTreeMap::new();
    let leads: Vec<(&Monomial, GaussianRational)> = basis
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| {
            let (m, c) = g.leading().unwrap();
            (m, c.inv().unwrap())
        })
        .collect();
    let live: Vec<&HomogPoly> = basis.iter().filter(|g| !g.is_zero()).collect();
    while let Some((m, c)) = work.pop_last() {
        match leads.iter().position(|(lm, _)| lm.divides(&m)) {
            Some(k) => {
                if *budget == 0 {
                    return Err(Error::BudgetExceeded { what: "Gröbner reduction", limit: DEFAULT_REDUCTION_BUDGET });
                }
                *budget -= 1;
                let (lm, inv) = &leads[k];
                let t = lm.quotient_of(&m).unwrap();
                let factor = &c * inv;
                for (gm, gc) in live[k].terms().rev().skip(1) {
                    let mm = gm.mul(&t);
                    let delta = &factor * gc;
                    let e = work.entry(mm).or_insert_with(GaussianRational::zero);
                    *e -= &delta;
                    if e.is_zero() {
                        // remove cancelled entries to keep pop_last meaningful
                        let key = gm.mul(&t);
                        work.remove(&key);
                    }
                }
            }
            None => {
                rest.insert(m, c);
            }
        }
    }
    HomogPoly::from_terms(p.num_vars(), p.degree(), rest)
}

/// Reduced Gröbner basis of `ideal` with the default budget.
pub fn groebner_basis(ideal: &Ideal) -> Result<GroebnerBasis> {
    groebner_basis_with_budget(ideal, DEFAULT_REDUCTION_BUDGET)
}

pub fn groebner_basis_with_budget(ideal: &Ideal, budget: usize) -> Result<GroebnerBasis> {
    extend_basis(&GroebnerBasis { num_vars: ideal.num_vars, polys: Vec::new() }, ideal.generators(), budget)
}

/// Gröbner basis of `⟨basis, extra⟩`, reusing an existing basis.
pub fn extend_basis(basis: &GroebnerBasis, extra: &[HomogPoly], budget: usize) -> Result<GroebnerBasis> {
    let mut remaining = budget;
    let mut g: Vec<HomogPoly> = basis.polys.clone();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for p in extra {
        if p.num_vars() != basis.num_vars {
            return Err(Error::DimensionMismatch { expected: basis.num_vars, got: p.num_vars() });
        }
        let r = reduce(p, &g, &mut remaining)?;
        if r.is_zero() {
            continue;
        }
        let idx = g.len();
        g.push(r.monic());
        pairs.extend((0..idx).map(|i| (i, idx)));
    }
    while !pairs.is_empty() {
        // normal strategy: smallest lcm first
        let (pos, _) = pairs
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| pair_lcm(&g, **a).cmp(&pair_lcm(&g, **b)))
            .unwrap();
        let (i, j) = pairs.swap_remove(pos);
        let (mi, mj) = (g[i].leading_monomial().unwrap(), g[j].leading_monomial().unwrap());
        if mi.is_coprime(mj) {
            continue;
        }
        let s = s_polynomial(&g[i], &g[j]);
        let r = reduce(&s, &g, &mut remaining)?;
        if r.is_zero() {
            continue;
        }
        let idx = g.len();
        g.push(r.monic());
        pairs.extend((0..idx).map(|k| (k, idx)));
    }
    Ok(GroebnerBasis { num_vars: basis.num_vars, polys: interreduce(g, &mut remaining)? })
}

fn pair_lcm(g: &[HomogPoly], (i, j): (usize, usize)) -> Monomial {
    g[i].leading_monomial().unwrap().lcm(g[j].leading_monomial().unwrap())
}

fn interreduce(mut g: Vec<HomogPoly>, budget: &mut usize) -> Result<Vec<HomogPoly>> {
    g.sort_by(|a, b| a.leading_monomial().cmp(&b.leading_monomial()));
    // drop elements whose leading term is divisible by another's
    let mut minimal: Vec<HomogPoly> = Vec::new();
    for (k, p) in g.iter().enumerate() {
        let lm = p.leading_monomial().unwrap();
        let redundant = g.iter().enumerate().any(|(j, q)| {
            let lq = q.leading_monomial().unwrap();
            j != k && lq.divides(lm) && (lq != lm || j < k)
        });
        if !redundant {
            minimal.push(p.clone());
        }
    }
    let mut out = Vec::with_capacity(minimal.len());
    for k in 0..minimal.len() {
        let others: Vec<HomogPoly> = minimal
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != k)
            .map(|(_, q)| q.clone())
            .collect();
        let (lm, lc) = minimal[k].leading().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let tail = minimal[k].sub(&HomogPoly::monomial(lm.clone(), lc.clone()))?;
        let tail = reduce(&tail, &others, budget)?;
        let full = tail.add(&HomogPoly::monomial(lm, lc))?;
        out.push(full.monic());
    }
    out.sort_by(|a, b| a.leading_monomial().cmp(&b.leading_monomial()));
    Ok(out)
}

/// Normal form of `p` with respect to a Gröbner basis.
pub fn normal_form(p: &HomogPoly, basis: &GroebnerBasis) -> HomogPoly {
    basis.normal_form(p)
}

/// Numerator `N(t)` of the Hilbert series `N(t)/(1−t)^n` of the quotient by
/// a monomial ideal, by the colon recursion `N(I + ⟨m⟩) = N(I) − t^{deg m} N(I : m)`.
fn hilbert_numerator(gens: &[Monomial], num_vars: usize) -> Vec<i128> {
    let gens = minimalize(gens);
    if gens.is_empty() {
        return vec![1];
    }
    // pairwise coprime generators factor as Π(1 − t^{deg})
    let coprime = gens.iter().enumerate().all(|(i, a)| gens[i + 1..].iter().all(|b| a.is_coprime(b)));
    if coprime {
        return gens.iter().fold(vec![1], |acc, m| poly_mul(&acc, &one_minus_t_pow(m.degree())));
    }
    let (last, rest) = gens.split_last().unwrap();
    let colon: Vec<Monomial> = rest.iter().map(|g| last.quotient_of(&last.lcm(g)).unwrap()).collect();
    let a = hilbert_numerator(rest, num_vars);
    let b = hilbert_numerator(&colon, num_vars);
    let shift = last.degree() as usize;
    let mut out = vec![0i128; a.len().max(b.len() + shift)];
    for (k, v) in a.iter().enumerate() {
        out[k] += v;
    }
    for (k, v) in b.iter().enumerate() {
        out[k + shift] -= v;
    }
    while out.len() > 1 && *out.last().unwrap() == 0 {
        out.pop();
    }
    out
}

fn minimalize(gens: &[Monomial]) -> Vec<Monomial> {
    let mut sorted: Vec<Monomial> = gens.to_vec();
    sorted.sort_by_key(|m| m.degree());
    sorted.dedup();
    let mut out: Vec<Monomial> = Vec::new();
    for m in sorted {
        if !out.iter().any(|g| g.divides(&m)) {
            out.push(m);
        }
    }
    out
}

fn one_minus_t_pow(d: u32) -> Vec<i128> {
    let mut v = vec![0i128; d as usize + 1];
    v[0] = 1;
    v[d as usize] -= 1;
    v
}

fn poly_mul(a: &[i128], b: &[i128]) -> Vec<i128> {
    let mut out = vec![0i128; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// A projective variety `V(I) ⊂ ℙ^{num_vars − 1}` with cached Gröbner data.
///
/// The ideal is not checked for primality; dimension and degree are those of
/// the Hilbert polynomial of `I`.
#[derive(Debug)]
pub struct Variety {
    ideal: Ideal,
    basis: GroebnerBasis,
    numerator: Vec<i128>,
    dim: i32,
    degree: u64,
    hilbert_cache: Mutex<HashMap<u32, u64>>,
}

impl Clone for Variety {
    fn clone(&self) -> Self {
        Self {
            ideal: self.ideal.clone(),
            basis: self.basis.clone(),
            numerator: self.numerator.clone(),
            dim: self.dim,
            degree: self.degree,
            hilbert_cache: Mutex::new(self.hilbert_cache.lock().unwrap().clone()),
        }
    }
}

impl Variety {
    pub fn new(ideal: Ideal) -> Result<Self> {
        let basis = groebner_basis(&ideal)?;
        Self::from_basis(ideal, basis)
    }

    pub fn from_basis(ideal: Ideal, basis: GroebnerBasis) -> Result<Self> {
        let numerator = hilbert_numerator(&basis.leading_monomials(), ideal.num_vars);
        let mut v = Self {
            ideal,
            basis,
            numerator,
            dim: -1,
            degree: 0,
            hilbert_cache: Mutex::new(HashMap::new()),
        };
        let (k, d) = v.stabilized_dim_degree()?;
        v.dim = k;
        v.degree = d;
        Ok(v)
    }

    /// `ℙ^n`, the zero ideal in `n + 1` variables.
    pub fn projective_space(n: usize) -> Self {
        Self::new(Ideal::zero(n + 1)).expect("zero ideal")
    }

    pub fn from_generators(num_vars: usize, gens: Vec<HomogPoly>) -> Result<Self> {
        Self::new(Ideal::new(num_vars, gens)?)
    }

    pub fn ideal(&self) -> &Ideal {
        &self.ideal
    }

    pub fn basis(&self) -> &GroebnerBasis {
        &self.basis
    }

    pub fn num_vars(&self) -> usize {
        self.ideal.num_vars
    }

    /// Dimension, −1 for the empty variety.
    pub fn dim(&self) -> i32 {
        self.dim
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn is_empty(&self) -> bool {
        self.dim < 0
    }

    /// `H_X(u)`: the number of degree-`u` monomials outside the leading-term ideal.
    pub fn hilbert_function(&self, u: u32) -> u64 {
        if let Some(v) = self.hilbert_cache.lock().unwrap().get(&u) {
            return *v;
        }
        let n = self.num_vars() as u64;
        let mut h: i128 = 0;
        for (k, c) in self.numerator.iter().enumerate() {
            if (k as u32) <= u {
                h += c * binomial(u as u64 - k as u64 + n - 1, n - 1) as i128;
            }
        }
        let h = u64::try_from(h).expect("Hilbert function is non-negative");
        self.hilbert_cache.lock().unwrap().insert(u, h);
        h
    }

    /// Standard monomials of degree `u` in descending grevlex order.
    pub fn standard_monomials(&self, u: u32) -> Vec<Monomial> {
        monomials_of_degree(self.num_vars(), u)
            .into_iter()
            .filter(|m| self.basis.is_standard(m))
            .collect()
    }

    /// Hilbert polynomial data from the first window of `N + 2` consecutive
    /// degrees on which some `(k+1)`-st finite difference vanishes.
    fn stabilized_dim_degree(&self) -> Result<(i32, u64)> {
        let kmax = self.num_vars() as i32 - 1;
        let span = (kmax + 2) as u32;
        let top = HILBERT_WINDOW_MAX + 2 * span + 2;
        let h: Vec<i128> = (0..=top).map(|u| self.hilbert_function(u) as i128).collect();
        let diff = |order: i32, u: u32| -> i128 {
            // forward difference Δ^order H(u)
            (0..=order as u32)
                .map(|j| {
                    let sign = if (order as u32 - j).is_multiple_of(2) { 1 } else { -1 };
                    sign * binomial(order as u64, j as u64) as i128 * h[(u + j) as usize]
                })
                .sum()
        };
        for u0 in 0..=HILBERT_WINDOW_MAX {
            for k in -1..=kmax {
                if (u0..u0 + span).all(|u| diff(k + 1, u) == 0) {
                    let degree = if k < 0 { 0 } else { diff(k, u0) };
                    if k >= 0 && degree <= 0 {
                        continue;
                    }
                    return Ok((k, degree as u64));
                }
            }
        }
        Err(Error::WindowNotStabilized(HILBERT_WINDOW_MAX))
    }

    /// `V ∩ V(forms)`.
    pub fn intersect(&self, forms: &[HomogPoly]) -> Result<Variety> {
        let ideal = self.ideal.with(forms)?;
        let basis = extend_basis(&self.basis, forms, DEFAULT_REDUCTION_BUDGET)?;
        Variety::from_basis(ideal, basis)
    }

    /// Applies `x_i ↦ Σ_j rows[i][j] x_j` to every generator.
    pub fn linear_substitute(&self, rows: &[Vec<GaussianRational>]) -> Result<Variety> {
        let gens = self
            .ideal
            .generators()
            .iter()
            .map(|g| g.linear_substitute(rows))
            .collect::<Result<Vec<_>>>()?;
        Variety::from_generators(self.num_vars(), gens)
    }
}

/// `(k, δ)` of a variety; `(−1, 0)` when empty.
pub fn variety_dim_degree(x: &Variety) -> (i32, u64) {
    (x.dim(), x.degree())
}

/// Hilbert function of `X` at `u`.
pub fn hilbert_function(x: &Variety, u: u32) -> u64 {
    x.hilbert_function(u)
}

/// Dimension of `V ∩ ⋂ V(form_j)`, −1 when empty.
pub fn intersection_dim(v: &Variety, forms: &[HomogPoly]) -> Result<i32> {
    Ok(v.intersect(forms)?.dim())
}

/// Constant forms `1·x^0`, used by callers as a unit check.
pub fn unit_form(num_vars: usize) -> HomogPoly {
    HomogPoly::monomial(Monomial::one(num_vars), GaussianRational::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_homog;

    fn ideal(n: usize, gens: &[&str]) -> Ideal {
        Ideal::new(n, gens.iter().map(|g| parse_homog(g, n).unwrap()).collect()).unwrap()
    }

    fn variety(n: usize, gens: &[&str]) -> Variety {
        Variety::new(ideal(n, gens)).unwrap()
    }

    #[test]
    fn basis_examples() {
        let b = groebner_basis(&ideal(2, &["x0"])).unwrap();
        assert_eq!(b.polys(), &[parse_homog("x0", 2).unwrap()]);

        let conic = parse_homog("x0*x2 - x1^2", 3).unwrap();
        let b = groebner_basis(&ideal(3, &["x0*x2 - x1^2"])).unwrap();
        assert_eq!(b.polys(), &[conic.monic()]);

        let b = groebner_basis(&ideal(2, &["x0 + x1", "x0 - x1"])).unwrap();
        assert_eq!(b.polys(), &[parse_homog("x1", 2).unwrap(), parse_homog("x0", 2).unwrap()]);
    }

    #[test]
    fn normal_form_examples() {
        let b = groebner_basis(&ideal(3, &["x0*x2 - x1^2"])).unwrap();
        let nf = b.normal_form(&parse_homog("x1^2", 3).unwrap());
        assert_eq!(nf, parse_homog("x0*x2", 3).unwrap());
        let diff = parse_homog("x1^2", 3).unwrap().sub(&nf).unwrap();
        assert!(b.contains(&diff));

        let b = groebner_basis(&ideal(1, &["x0"])).unwrap();
        assert!(b.normal_form(&parse_homog("x0^3", 1).unwrap()).is_zero());

        let b = groebner_basis(&Ideal::zero(3)).unwrap();
        let p = parse_homog("x0^2 + 3*x1*x2", 3).unwrap();
        assert_eq!(b.normal_form(&p), p);
    }

    #[test]
    fn hilbert_function_examples() {
        let p2 = Variety::projective_space(2);
        assert_eq!(p2.hilbert_function(3), 10);
        let conic = variety(3, &["x0*x2 - x1^2"]);
        assert_eq!(conic.hilbert_function(2), 5);
        assert_eq!(conic.hilbert_function(3), 7);
        for u in 0..20 {
            assert_eq!(conic.hilbert_function(u), 2 * u as u64 + 1);
            assert_eq!(conic.standard_monomials(u).len() as u64, conic.hilbert_function(u));
        }
    }

    #[test]
    fn dim_degree_examples() {
        assert_eq!(variety_dim_degree(&variety(3, &["x0*x2 - x1^2"])), (1, 2));
        assert_eq!(variety_dim_degree(&Variety::projective_space(2)), (2, 1));
        let empty = variety(3, &["x0", "x1", "x2"]);
        assert_eq!(variety_dim_degree(&empty), (-1, 0));
        assert!(empty.is_empty());
    }

    #[test]
    fn intersection_examples() {
        let p2 = Variety::projective_space(2);
        let x = |s: &str| parse_homog(s, 3).unwrap();
        assert_eq!(intersection_dim(&p2, &[x("x0"), x("x1")]).unwrap(), 0);
        assert_eq!(intersection_dim(&p2, &[x("x0"), x("x1"), x("x2")]).unwrap(), -1);
        let conic = variety(3, &["x0*x2 - x1^2"]);
        let pts = conic.intersect(&[x("x1")]).unwrap();
        assert_eq!(pts.dim(), 0);
        // x1 = 0 meets the conic in (1:0:0) and (0:0:1), with multiplicity 2 each in the scheme
        assert!(pts.degree() >= 2);
    }

    #[test]
    fn twisted_cubic() {
        let tc = variety(4, &["x0*x2 - x1^2", "x1*x3 - x2^2", "x0*x3 - x1*x2"]);
        assert_eq!(variety_dim_degree(&tc), (1, 3));
        for u in 0..10 {
            assert_eq!(tc.hilbert_function(u), 3 * u as u64 + 1);
        }
        assert!(tc.basis().satisfies_buchberger_criterion());
    }

    #[test]
    fn budget_exceeded_is_an_error() {
        let i = ideal(4, &["x0*x2 - x1^2", "x1*x3 - x2^2", "x0*x3 - x1*x2"]);
        assert!(matches!(groebner_basis_with_budget(&i, 1), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn numerator_count_matches_enumeration() {
        let v = variety(4, &["x0^2 + x1*x3", "x1^3 - x2^2*x3 + x0*x1*x2"]);
        for u in 0..9 {
            let direct = monomials_of_degree(4, u).iter().filter(|m| v.basis().is_standard(m)).count();
            assert_eq!(direct as u64, v.hilbert_function(u), "u = {u}");
        }
        assert_eq!(variety_dim_degree(&v), (1, 6));
    }
}
