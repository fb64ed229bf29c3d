//! Literal syntax shared by scenario files:
//! `3/2*x0^2*x1 - i*x2^3`, `1 - 2*z^3`, `(z)*exp(2*z)`.
//!
//! A small precedence-climbing parser generic over the value algebra, so
//! the same grammar serves homogeneous forms and one-variable functions.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::gaussian::GaussianRational;
use super::monomial::Monomial;
use super::poly::HomogPoly;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Sym(char),
}

fn tokenize(src: &str) -> std::result::Result<Vec<(usize, Tok)>, String> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() || ch == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push((start, Tok::Num(parse_decimal(&text).ok_or_else(|| format!("bad number `{text}` at {start}"))?)));
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start, Tok::Ident(chars[start..i].iter().collect())));
        } else if "+-*/^()".contains(ch) {
            out.push((i, Tok::Sym(ch)));
            i += 1;
        } else {
            return Err(format!("unexpected character `{ch}` at {i}"));
        }
    }
    Ok(out)
}

/// Exact rational from a decimal literal such as `12`, `0.25`.
pub fn parse_decimal(text: &str) -> Option<BigRational> {
    let mut parts = text.split('.');
    let int_part = parts.next()?;
    let frac_part = parts.next().unwrap_or("");
    if parts.next().is_some() || (int_part.is_empty() && frac_part.is_empty()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = digits.parse().ok()?;
    let den = BigInt::from(10u32).pow(frac_part.len() as u32);
    Some(BigRational::new(num, den))
}

/// Value algebra driven by the parser.
pub(crate) trait ExprAlgebra {
    type Value: Clone;
    fn constant(&self, c: GaussianRational) -> Self::Value;
    fn variable(&self, name: &str) -> std::result::Result<Self::Value, String>;
    fn add(&self, a: Self::Value, b: Self::Value) -> std::result::Result<Self::Value, String>;
    fn mul(&self, a: Self::Value, b: Self::Value) -> std::result::Result<Self::Value, String>;
    fn div(&self, a: Self::Value, b: Self::Value) -> std::result::Result<Self::Value, String>;
    fn neg(&self, a: Self::Value) -> Self::Value;
    fn pow(&self, a: Self::Value, e: u32) -> std::result::Result<Self::Value, String>;
    fn call(&self, name: &str, arg: Self::Value) -> std::result::Result<Self::Value, String> {
        let _ = arg;
        Err(format!("unknown function `{name}`"))
    }
}

struct Parser<'a, A: ExprAlgebra> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    alg: &'a A,
}

impl<'a, A: ExprAlgebra> Parser<'a, A> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(usize::MAX)
    }

    fn eat(&mut self, ch: char) -> bool {
        if self.peek() == Some(&Tok::Sym(ch)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> std::result::Result<A::Value, String> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                let rhs = self.term()?;
                acc = self.alg.add(acc, rhs)?;
            } else if self.eat('-') {
                let rhs = self.term()?;
                acc = self.alg.add(acc, self.alg.neg(rhs))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> std::result::Result<A::Value, String> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                let rhs = self.unary()?;
                acc = self.alg.mul(acc, rhs)?;
            } else if self.eat('/') {
                let rhs = self.unary()?;
                acc = self.alg.div(acc, rhs)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> std::result::Result<A::Value, String> {
        if self.eat('-') {
            let v = self.unary()?;
            return Ok(self.alg.neg(v));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> std::result::Result<A::Value, String> {
        let base = self.atom()?;
        if self.eat('^') {
            let at = self.offset();
            match self.toks.get(self.pos).cloned() {
                Some((_, Tok::Num(n))) if n.is_integer() => {
                    self.pos += 1;
                    let e: u32 = n
                        .numer()
                        .try_into()
                        .map_err(|_| format!("exponent too large at {at}"))?;
                    return self.alg.pow(base, e);
                }
                _ => return Err(format!("expected non-negative integer exponent at {at}")),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> std::result::Result<A::Value, String> {
        let at = self.offset();
        let tok = self.toks.get(self.pos).cloned().map(|(_, t)| t);
        match tok {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(self.alg.constant(GaussianRational::from_rational(n)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if self.eat('(') {
                    let arg = self.expr()?;
                    if !self.eat(')') {
                        return Err(format!("expected `)` at {}", self.offset()));
                    }
                    return self.alg.call(&name, arg);
                }
                if name == "i" {
                    return Ok(self.alg.constant(GaussianRational::i()));
                }
                self.alg.variable(&name).map_err(|e| format!("{e} at {at}"))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(')') {
                    return Err(format!("expected `)` at {}", self.offset()));
                }
                Ok(v)
            }
            Some(t) => Err(format!("unexpected token {t:?} at {at}")),
            None => Err("unexpected end of input".into()),
        }
    }
}

pub(crate) fn parse_with<A: ExprAlgebra>(src: &str, alg: &A) -> std::result::Result<A::Value, String> {
    let toks = tokenize(src)?;
    if toks.is_empty() {
        return Err("empty expression".into());
    }
    let mut p = Parser { toks, pos: 0, alg };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(format!("trailing input at {}", p.offset()));
    }
    Ok(v)
}

/// Sparse, not necessarily homogeneous, polynomial used while parsing.
struct MultiAlg {
    num_vars: usize,
}

type MPoly = BTreeMap<Vec<u32>, GaussianRational>;

fn mpoly_const(n: usize, c: GaussianRational) -> MPoly {
    let mut m = MPoly::new();
    if !c.is_zero() {
        m.insert(vec![0; n], c);
    }
    m
}

fn mpoly_as_const(p: &MPoly) -> Option<GaussianRational> {
    match p.len() {
        0 => Some(GaussianRational::zero()),
        1 => {
            let (e, c) = p.iter().next().unwrap();
            e.iter().all(|&x| x == 0).then(|| c.clone())
        }
        _ => None,
    }
}

impl ExprAlgebra for MultiAlg {
    type Value = MPoly;

    fn constant(&self, c: GaussianRational) -> MPoly {
        mpoly_const(self.num_vars, c)
    }

    fn variable(&self, name: &str) -> std::result::Result<MPoly, String> {
        let idx: usize = name
            .strip_prefix('x')
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| format!("unknown variable `{name}`"))?;
        if idx >= self.num_vars {
            return Err(format!("variable `{name}` out of range (N+1 = {})", self.num_vars));
        }
        let mut e = vec![0; self.num_vars];
        e[idx] = 1;
        let mut m = MPoly::new();
        m.insert(e, GaussianRational::one());
        Ok(m)
    }

    fn add(&self, mut a: MPoly, b: MPoly) -> std::result::Result<MPoly, String> {
        for (e, c) in b {
            let entry = a.entry(e).or_insert_with(GaussianRational::zero);
            *entry += &c;
        }
        a.retain(|_, c| !c.is_zero());
        Ok(a)
    }

    fn mul(&self, a: MPoly, b: MPoly) -> std::result::Result<MPoly, String> {
        let mut out = MPoly::new();
        for (e1, c1) in &a {
            for (e2, c2) in &b {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(x, y)| x + y).collect();
                let entry = out.entry(e).or_insert_with(GaussianRational::zero);
                *entry += &(c1 * c2);
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    fn div(&self, a: MPoly, b: MPoly) -> std::result::Result<MPoly, String> {
        let c = mpoly_as_const(&b).ok_or("division by a non-constant polynomial")?;
        let inv = c.inv().ok_or("division by zero")?;
        Ok(a.into_iter().map(|(e, x)| (e, &x * &inv)).collect())
    }

    fn neg(&self, a: MPoly) -> MPoly {
        a.into_iter().map(|(e, c)| (e, -c)).collect()
    }

    fn pow(&self, a: MPoly, e: u32) -> std::result::Result<MPoly, String> {
        let mut acc = mpoly_const(self.num_vars, GaussianRational::one());
        for _ in 0..e {
            acc = self.mul(acc, a.clone())?;
        }
        Ok(acc)
    }
}

/// Parses a homogeneous form in `x0 … x{num_vars-1}`.
pub fn parse_homog(src: &str, num_vars: usize) -> Result<HomogPoly> {
    let perr = |message: String| Error::Parse { context: format!("polynomial `{src}`"), message };
    let mp = parse_with(src, &MultiAlg { num_vars }).map_err(perr)?;
    let degree = mp.keys().next().map(|e| e.iter().sum()).unwrap_or(0);
    HomogPoly::from_terms(num_vars, degree, mp.into_iter().map(|(e, c)| (Monomial(e), c)))
        .map_err(|e| perr(format!("not homogeneous: {e}")))
}

/// Parses a constant in ℚ(i), e.g. `3/2`, `-1+2*i`, `0.25`.
pub fn parse_gaussian(src: &str) -> Result<GaussianRational> {
    let perr = |message: String| Error::Parse { context: format!("constant `{src}`"), message };
    let mp = parse_with(src, &MultiAlg { num_vars: 1 }).map_err(perr)?;
    mpoly_as_const(&mp).ok_or_else(|| perr("expected a constant".into()))
}

/// Parses a non-negative rational such as `3/2` or `0.5`.
pub fn parse_rational(src: &str) -> Result<BigRational> {
    let g = parse_gaussian(src)?;
    if !g.is_real() {
        return Err(Error::Parse { context: format!("rational `{src}`"), message: "imaginary part present".into() });
    }
    Ok(g.re)
}

/// Parses a monomial key such as `x0^2*x1`; `1` denotes the empty monomial.
pub fn parse_monomial(src: &str, num_vars: usize) -> Result<Monomial> {
    let p = parse_homog(src, num_vars)?;
    match p.len() {
        1 => {
            let (m, c) = p.terms().next().unwrap();
            if !c.is_one() {
                return Err(Error::Parse { context: format!("monomial `{src}`"), message: "coefficient not allowed".into() });
            }
            Ok(m.clone())
        }
        _ => Err(Error::Parse { context: format!("monomial `{src}`"), message: "expected a single monomial".into() }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_mixed_literal() {
        let p = parse_homog("3/2*x0^2*x1 - i*x2^3", 3).unwrap();
        assert_eq!(p.degree(), 3);
        assert_eq!(p.len(), 2);
        assert_eq!(p.coeff(&Monomial(vec![2, 1, 0])), GaussianRational::from_ratio(3, 2));
        assert_eq!(p.coeff(&Monomial(vec![0, 0, 3])), -GaussianRational::i());
    }

    #[test]
    fn display_roundtrip() {
        for src in ["x0*x2 - x1^2", "3/2*x0^2*x1 - i*x2^3", "(1+2*i)*x0 + x1"] {
            let p = parse_homog(src, 3).unwrap();
            let again = parse_homog(&p.to_string(), 3).unwrap();
            assert_eq!(p, again, "{src} -> {p}");
        }
    }

    #[test]
    fn rejects_inhomogeneous() {
        let err = parse_homog("x0^2 + x1", 2).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }

    #[test]
    fn rejects_out_of_range_variable() {
        assert!(parse_homog("x3", 3).is_err());
        assert!(parse_homog("x0 +", 3).is_err());
        assert!(parse_homog("x0 / x1", 3).is_err());
    }

    #[test]
    fn constants() {
        assert_eq!(parse_gaussian("0.25").unwrap(), GaussianRational::from_ratio(1, 4));
        assert_eq!(parse_gaussian("-1+2*i").unwrap(), GaussianRational::from_parts((-1, 1), (2, 1)));
        assert_eq!(parse_rational("3/2").unwrap(), BigRational::new(3.into(), 2.into()));
        assert!(parse_rational("i").is_err());
    }

    #[test]
    fn monomial_keys() {
        assert_eq!(parse_monomial("x0^2*x1", 3).unwrap(), Monomial(vec![2, 1, 0]));
        assert!(parse_monomial("2*x0", 3).is_err());
    }
}
