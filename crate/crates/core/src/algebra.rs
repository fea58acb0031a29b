//! Multivariate Laurent polynomials over the integers.
//!
//! Cluster variables, exchange polynomials and their specializations all live
//! here. Values are immutable; every operation returns a fresh polynomial.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("dimension mismatch: {0} vs {1} variables")]
    DimensionMismatch(usize, usize),
    #[error("not divisible: {num} by {den}")]
    NotDivisible { num: String, den: String },
    #[error("expected a single monomial with coefficient 1, got {0}")]
    NonMonomialInput(String),
    #[error("invalid orbit map: {0}")]
    InvalidOrbitMap(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, AlgebraError>;

/// Exponent vector of a Laurent monomial. Ordered lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub Vec<i64>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn div(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn meet(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().sum()
    }
}

/// Sparse Laurent polynomial with nonzero integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        LaurentPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, 1)
    }

    pub fn constant(nvars: usize, c: impl Into<BigInt>) -> Self {
        Self::term(nvars, Monomial::one(nvars), c)
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::term(nvars, Monomial::var(nvars, i), 1)
    }

    pub fn term(nvars: usize, m: Monomial, c: impl Into<BigInt>) -> Self {
        assert_eq!(m.nvars(), nvars, "monomial arity");
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        LaurentPoly { nvars, terms }
    }

    /// Build from (exponents, coefficient) pairs, collecting like terms.
    pub fn from_terms<I>(nvars: usize, it: I) -> Self
    where
        I: IntoIterator<Item = (Vec<i64>, BigInt)>,
    {
        let mut p = LaurentPoly::zero(nvars);
        for (e, c) in it {
            assert_eq!(e.len(), nvars, "monomial arity");
            p.add_term(Monomial(e), c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self.terms.iter().all(|(m, c)| m.is_one() && c.is_one())
    }

    /// True when no exponent is negative.
    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|m| m.0.iter().all(|&e| e >= 0))
    }

    /// Single term with coefficient 1.
    pub fn as_unit_monomial(&self) -> Option<&Monomial> {
        match self.terms.iter().next() {
            Some((m, c)) if self.terms.len() == 1 && c.is_one() => Some(m),
            _ => None,
        }
    }

    pub fn coefficient(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// Componentwise minimum exponent over all terms (zero vector for 0).
    pub fn min_exponents(&self) -> Monomial {
        let mut it = self.terms.keys();
        match it.next() {
            None => Monomial::one(self.nvars),
            Some(first) => it.fold(first.clone(), |acc, m| acc.meet(m)),
        }
    }

    /// Largest exponent of variable `i` appearing in any term.
    pub fn max_exponent(&self, i: usize) -> Option<i64> {
        self.terms.keys().map(|m| m.0[i]).max()
    }

    /// Whether variable `i` occurs with a nonzero exponent.
    pub fn involves(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m.0[i] != 0)
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_dims(&self, other: &LaurentPoly) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(AlgebraError::DimensionMismatch(self.nvars, other.nvars));
        }
        Ok(())
    }

    pub fn add(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_dims(other)?;
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(m.clone(), c.clone());
        }
        Ok(r)
    }

    pub fn sub(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> LaurentPoly {
        self.scale(&BigInt::from(-1))
    }

    pub fn scale(&self, k: &BigInt) -> LaurentPoly {
        if k.is_zero() {
            return LaurentPoly::zero(self.nvars);
        }
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> LaurentPoly {
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_dims(other)?;
        let mut acc: std::collections::HashMap<Monomial, BigInt> = std::collections::HashMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                *acc.entry(m1.mul(m2)).or_default() += c1 * c2;
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(LaurentPoly { nvars: self.nvars, terms })
    }

    pub fn pow(&self, e: u32) -> LaurentPoly {
        let mut acc = LaurentPoly::one(self.nvars);
        for _ in 0..e {
            acc = acc.mul(self).expect("same arity");
        }
        acc
    }

    /// Exact quotient `self / q` in the Laurent ring.
    ///
    /// Both operands are shifted to ordinary polynomials by clearing their
    /// minimal exponents, then divided by leading terms in lex order.
    pub fn exact_div(&self, q: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_dims(q)?;
        let not_div = || AlgebraError::NotDivisible {
            num: self.to_string(),
            den: q.to_string(),
        };
        if q.is_zero() {
            return Err(not_div());
        }
        if self.is_zero() {
            return Ok(LaurentPoly::zero(self.nvars));
        }
        let pmin = self.min_exponents();
        let qmin = q.min_exponents();
        let ps = self.mul_monomial(&invert(&pmin));
        let qs = q.mul_monomial(&invert(&qmin));
        let (qlm, qlc) = qs.terms.iter().next_back().expect("nonzero");
        let mut rem = ps;
        let mut quot = LaurentPoly::zero(self.nvars);
        while let Some((rlm, rlc)) = rem.terms.iter().next_back() {
            let d = rlm.div(qlm);
            if d.0.iter().any(|&e| e < 0) {
                return Err(not_div());
            }
            let (k, r) = rlc.div_rem(qlc);
            if !r.is_zero() {
                return Err(not_div());
            }
            for (m, c) in &qs.terms {
                rem.add_term(m.mul(&d), -(c * &k));
            }
            quot.add_term(d, k);
        }
        Ok(quot.mul_monomial(&pmin.div(&qmin)))
    }

    /// Push exponents forward along an orbit map (the specialization F).
    pub fn specialize(&self, f: &OrbitMap) -> Result<LaurentPoly> {
        if f.image.len() != self.nvars {
            return Err(AlgebraError::DimensionMismatch(self.nvars, f.image.len()));
        }
        let mut r = LaurentPoly::zero(f.target_nvars);
        for (m, c) in &self.terms {
            let mut e = vec![0i64; f.target_nvars];
            for (i, &x) in m.0.iter().enumerate() {
                e[f.image[i]] += x;
            }
            r.add_term(Monomial(e), c.clone());
        }
        Ok(r)
    }

    /// Substitute `values[i]` for variable `i`. Negative exponents require
    /// the substituted value to be an invertible monomial.
    pub fn substitute(&self, values: &[LaurentPoly]) -> Result<LaurentPoly> {
        if values.len() != self.nvars {
            return Err(AlgebraError::DimensionMismatch(self.nvars, values.len()));
        }
        let target = values.first().map(|v| v.nvars).unwrap_or(0);
        for v in values {
            if v.nvars != target {
                return Err(AlgebraError::DimensionMismatch(target, v.nvars));
            }
        }
        let mut r = LaurentPoly::zero(target);
        for (m, c) in &self.terms {
            let mut t = LaurentPoly::constant(target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let factor = values[i].pow(e.unsigned_abs() as u32);
                t = if e > 0 {
                    t.mul(&factor)?
                } else {
                    t.exact_div(&factor)?
                };
            }
            r = r.add(&t)?;
        }
        Ok(r)
    }

    /// Split into (numerator polynomial, denominator monomial) with the
    /// numerator not divisible by any variable.
    pub fn numerator_denominator(&self) -> (LaurentPoly, Monomial) {
        let m = self.min_exponents();
        let den = Monomial(m.0.iter().map(|&e| (-e).max(0)).collect());
        (self.mul_monomial(&den), den)
    }

    /// Human-readable rendering with 1-based variable names, e.g.
    /// `(x1^2 + x1 + 1)/x2`.
    pub fn pretty(&self, prefix: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let (num, den) = self.numerator_denominator();
        let num_s = pretty_poly(&num, prefix);
        if den.is_one() {
            return num_s;
        }
        let den_s = pretty_monomial(&den, prefix);
        let den_s = if den.0.iter().filter(|&&e| e != 0).count() > 1 {
            format!("({den_s})")
        } else {
            den_s
        };
        if num.len() > 1 {
            format!("({num_s})/{den_s}")
        } else {
            format!("{num_s}/{den_s}")
        }
    }

    /// Parse the canonical serialization produced by `Display`.
    pub fn parse_canonical(s: &str, nvars: usize) -> Result<LaurentPoly> {
        let s = s.trim();
        let err = |pos: usize, msg: &str| AlgebraError::Parse { pos, msg: msg.into() };
        if s == "0" {
            return Ok(LaurentPoly::zero(nvars));
        }
        let mut p = LaurentPoly::zero(nvars);
        let mut offset = 0usize;
        let mut prev: Option<Monomial> = None;
        for chunk in s.split(" + ") {
            let mut parts = chunk.split(" * ");
            let coeff_s = parts.next().unwrap_or("");
            let coeff: BigInt = coeff_s
                .parse()
                .map_err(|_| err(offset, "expected integer coefficient"))?;
            if coeff.is_zero() {
                return Err(err(offset, "zero coefficient"));
            }
            let mut e = vec![0i64; nvars];
            let mut last_var: Option<usize> = None;
            if let Some(vars) = parts.next() {
                for f in vars.split(' ') {
                    let (name, exp) = f
                        .split_once('^')
                        .ok_or_else(|| err(offset, "expected x<i>^<e>"))?;
                    let idx: usize = name
                        .strip_prefix('x')
                        .and_then(|d| d.parse().ok())
                        .ok_or_else(|| err(offset, "bad variable name"))?;
                    let exp: i64 = exp.parse().map_err(|_| err(offset, "bad exponent"))?;
                    if idx >= nvars {
                        return Err(err(offset, "variable index out of range"));
                    }
                    if exp == 0 || last_var.is_some_and(|l| l >= idx) {
                        return Err(err(offset, "non-canonical monomial"));
                    }
                    last_var = Some(idx);
                    e[idx] = exp;
                }
                if last_var.is_none() {
                    return Err(err(offset, "empty monomial"));
                }
            }
            if parts.next().is_some() {
                return Err(err(offset, "unexpected ' * '"));
            }
            let m = Monomial(e);
            if prev.as_ref().is_some_and(|q| q >= &m) {
                return Err(err(offset, "terms out of order"));
            }
            prev = Some(m.clone());
            p.terms.insert(m, coeff);
            offset += chunk.len() + 3;
        }
        Ok(p)
    }

    /// Parse an arithmetic expression such as `(x1^2+x1+1)/x2` with 1-based
    /// variable names (`x1` is index 0; any lowercase prefix is accepted).
    pub fn parse_expr(s: &str, nvars: usize) -> Result<LaurentPoly> {
        ExprParser { src: s.as_bytes(), pos: 0, nvars }.parse()
    }
}

fn invert(m: &Monomial) -> Monomial {
    Monomial(m.0.iter().map(|e| -e).collect())
}

fn pretty_monomial(m: &Monomial, prefix: &str) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.0.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(format!("{prefix}{}", i + 1)),
            _ => parts.push(format!("{prefix}{}^{e}", i + 1)),
        }
    }
    parts.join("*")
}

fn pretty_poly(p: &LaurentPoly, prefix: &str) -> String {
    // Highest terms first reads naturally.
    let mut out = String::new();
    for (k, (m, c)) in p.terms.iter().rev().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let ms = pretty_monomial(m, prefix);
        if ms.is_empty() {
            out.push_str(&a.to_string());
        } else if a.is_one() {
            out.push_str(&ms);
        } else {
            out.push_str(&format!("{a}*{ms}"));
        }
    }
    out
}

/// Canonical serialization: `coeff * x0^e0 x1^e1 + ...`, terms ascending.
impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c}")?;
            let vars: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e != 0)
                .map(|(i, e)| format!("x{i}^{e}"))
                .collect();
            if !vars.is_empty() {
                write!(f, " * {}", vars.join(" "))?;
            }
        }
        Ok(())
    }
}

impl PartialOrd for LaurentPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by canonical serialization, the order used for censuses.
impl Ord for LaurentPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.to_string().cmp(&other.to_string())
    }
}

struct ExprParser<'a> {
    src: &'a [u8],
    pos: usize,
    nvars: usize,
}

impl ExprParser<'_> {
    fn err(&self, msg: &str) -> AlgebraError {
        AlgebraError::Parse { pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn parse(mut self) -> Result<LaurentPoly> {
        let p = self.expr()?;
        if self.peek().is_some() {
            return Err(self.err("trailing input"));
        }
        Ok(p)
    }

    fn expr(&mut self) -> Result<LaurentPoly> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                self.term()?.neg()
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?)?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<LaurentPoly> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.power()?)?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    acc = acc.exact_div(&self.power()?)?;
                }
                Some(c) if c == b'(' || c.is_ascii_alphanumeric() => {
                    acc = acc.mul(&self.power()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<LaurentPoly> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        self.skip_ws();
        let neg = self.src.get(self.pos) == Some(&b'-');
        if neg {
            self.pos += 1;
        }
        let e = self.number()?;
        let e: u32 = e.try_into().map_err(|_| self.err("exponent too large"))?;
        let p = base.pow(e);
        if neg {
            LaurentPoly::one(self.nvars).exact_div(&p)
        } else {
            Ok(p)
        }
    }

    fn number(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected number"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        Ok(s.parse().expect("digits"))
    }

    fn atom(&mut self) -> Result<LaurentPoly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let p = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(p)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.number()?;
                Ok(LaurentPoly::constant(self.nvars, n))
            }
            Some(c) if c.is_ascii_lowercase() => {
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_lowercase() {
                    self.pos += 1;
                }
                let idx = self.number()?;
                let idx: usize = idx.try_into().map_err(|_| self.err("bad index"))?;
                if idx == 0 || idx > self.nvars {
                    return Err(self.err("variable index out of range"));
                }
                Ok(LaurentPoly::var(self.nvars, idx - 1))
            }
            _ => Err(self.err("expected atom")),
        }
    }
}

/// A surjection of variable indices; induces the specialization homomorphism.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitMap {
    pub target_nvars: usize,
    pub image: Vec<usize>,
}

impl OrbitMap {
    pub fn new(target_nvars: usize, image: Vec<usize>) -> Result<Self> {
        let mut hit = vec![false; target_nvars];
        for &i in &image {
            if i >= target_nvars {
                return Err(AlgebraError::InvalidOrbitMap(format!(
                    "image {i} out of range {target_nvars}"
                )));
            }
            hit[i] = true;
        }
        if let Some(j) = hit.iter().position(|h| !h) {
            return Err(AlgebraError::InvalidOrbitMap(format!("index {j} not hit")));
        }
        Ok(OrbitMap { target_nvars, image })
    }

    pub fn identity(n: usize) -> Self {
        OrbitMap { target_nvars: n, image: (0..n).collect() }
    }

    /// Collapse everything to one variable.
    pub fn constant(n: usize) -> Self {
        OrbitMap { target_nvars: 1, image: vec![0; n] }
    }
}

/// Componentwise minimum of two unit monomials.
pub fn monomial_gcd(a: &LaurentPoly, b: &LaurentPoly) -> Result<LaurentPoly> {
    a.check_dims(b)?;
    let ma = a
        .as_unit_monomial()
        .ok_or_else(|| AlgebraError::NonMonomialInput(a.to_string()))?;
    let mb = b
        .as_unit_monomial()
        .ok_or_else(|| AlgebraError::NonMonomialInput(b.to_string()))?;
    Ok(LaurentPoly::term(a.nvars, ma.meet(mb), 1))
}
