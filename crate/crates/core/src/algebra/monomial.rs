use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Exponent vector `x0^e0 · x1^e1 ⋯`, ordered graded-reverse-lexicographically
/// with `x0 > x1 > … > xN`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(num_vars: usize) -> Self {
        Monomial(vec![0; num_vars])
    }

    pub fn var(num_vars: usize, i: usize) -> Self {
        let mut e = vec![0; num_vars];
        e[i] = 1;
        Monomial(e)
    }

    /// `x_i^d`, the monomial `I₀ = (d, 0, …, 0)` when `i = 0`.
    pub fn pure_power(num_vars: usize, i: usize, d: u32) -> Self {
        let mut e = vec![0; num_vars];
        e[i] = d;
        Monomial(e)
    }

    pub fn num_vars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, when `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        if !self.divides(other) {
            return None;
        }
        Some(Monomial(other.0.iter().zip(&self.0).map(|(b, a)| b - a).collect()))
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Weighted degree `a · c` against a weight vector indexed by variable.
    pub fn dot<T>(&self, weights: &[T]) -> T
    where
        T: Clone + num_traits::Zero + std::ops::Mul<Output = T> + From<u32>,
    {
        self.0
            .iter()
            .zip(weights)
            .fold(T::zero(), |acc, (&e, w)| acc + T::from(e) * w.clone())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.0.len(), other.0.len());
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        // the last differing exponent decides, smaller exponent wins
        for (a, b) in self.0.iter().zip(&other.0).rev() {
            if a != b {
                return b.cmp(a);
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{i}")?;
            } else {
                write!(f, "x{i}^{e}")?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// All monomials of degree `u` in `num_vars` variables, largest first in grevlex.
///
/// There are exactly `C(num_vars − 1 + u, u)` of them.
pub fn monomials_of_degree(num_vars: usize, u: u32) -> Vec<Monomial> {
    assert!(num_vars >= 1, "at least one variable required");
    let mut out = Vec::new();
    let mut cur = vec![0u32; num_vars];
    fill(&mut cur, 0, u, &mut out);
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

fn fill(cur: &mut Vec<u32>, pos: usize, rest: u32, out: &mut Vec<Monomial>) {
    if pos == cur.len() - 1 {
        cur[pos] = rest;
        out.push(Monomial(cur.clone()));
        return;
    }
    for e in (0..=rest).rev() {
        cur[pos] = e;
        fill(cur, pos + 1, rest - e, out);
    }
    cur[pos] = 0;
}

/// `C(n, k)` as u128; panics on overflow.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_vars_degree_two() {
        let ms = monomials_of_degree(2, 2);
        let shown: Vec<String> = ms.iter().map(|m| m.to_string()).collect();
        assert_eq!(shown, ["x0^2", "x0*x1", "x1^2"]);
    }

    #[test]
    fn counts() {
        assert_eq!(monomials_of_degree(3, 1).len(), 3);
        assert_eq!(monomials_of_degree(4, 5).len(), 56);
        assert_eq!(monomials_of_degree(1, 7).len(), 1);
        assert_eq!(monomials_of_degree(3, 0).len(), 1);
    }

    #[test]
    fn count_matches_binomial_table() {
        for v in 1..=6usize {
            for u in 0..=8u32 {
                let ms = monomials_of_degree(v, u);
                assert_eq!(ms.len() as u128, binomial((v as u64) - 1 + u as u64, u as u64));
                let mut dedup = ms.clone();
                dedup.dedup();
                assert_eq!(dedup.len(), ms.len());
            }
        }
    }

    #[test]
    fn grevlex_leading_term_of_conic_relation() {
        let x1sq = Monomial(vec![0, 2, 0]);
        let x0x2 = Monomial(vec![1, 0, 1]);
        assert!(x1sq > x0x2);
        assert!(Monomial(vec![1, 0, 0]) > Monomial(vec![0, 1, 0]));
        assert!(Monomial(vec![0, 0, 2]) > Monomial(vec![1, 0, 0]));
    }
}
