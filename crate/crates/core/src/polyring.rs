//! Sparse polynomials with exact rational coefficients in the `m + 1` ambient
//! coordinates of `R^{m+1}`, read as functions on the unit sphere `S^m`.
//!
//! A [`SpherePoly`] stores an ambient representative. Two representatives are
//! the same function on the sphere exactly when they have the same canonical
//! form under [`reduce_on_sphere`], which is the harmonic expansion
//! `H_0 + H_1 + ... + H_L` with every `H_k` harmonic and homogeneous of degree
//! `k`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_rational, int, parse_rational, Rational};

/// Exponent vector `(a_1, ..., a_{m+1})` of the monomial `φ^a`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zeros(nvars: usize) -> Self {
        MultiIndex(vec![0; nvars])
    }

    /// The exponent of the single variable `φ_{i+1}` (0-based `i`).
    pub fn unit(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        MultiIndex(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn has_odd(&self) -> bool {
        self.0.iter().any(|a| a % 2 == 1)
    }

    pub fn plus(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.len(), other.len());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn bumped(&self, i: usize, by: i64) -> MultiIndex {
        let mut e = self.0.clone();
        e[i] = (e[i] as i64 + by) as u32;
        MultiIndex(e)
    }

    /// All exponent vectors of total degree `degree` in `nvars` variables,
    /// ordered with larger leading exponents first, so that degree 1 yields
    /// `φ_1, φ_2, ..., φ_{m+1}`.
    pub fn all_of_degree(nvars: usize, degree: u32) -> Vec<MultiIndex> {
        fn rec(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if pos + 1 == cur.len() {
                cur[pos] = left;
                out.push(MultiIndex(cur.clone()));
                return;
            }
            for a in (0..=left).rev() {
                cur[pos] = a;
                rec(pos + 1, left - a, cur, out);
            }
        }
        let mut out = Vec::new();
        if nvars == 0 {
            if degree == 0 {
                out.push(MultiIndex(vec![]));
            }
            return out;
        }
        rec(0, degree, &mut vec![0; nvars], &mut out);
        out
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// Polynomial in `nvars = m + 1` ambient variables with exact rational
/// coefficients. Zero coefficients are never stored; the zero polynomial has
/// an empty term map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpherePoly {
    nvars: usize,
    terms: BTreeMap<MultiIndex, Rational>,
}

/// One entry of the polynomial JSON encoding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyTerm {
    pub exp: Vec<u32>,
    pub coeff: String,
}

impl SpherePoly {
    pub fn zero(nvars: usize) -> Self {
        SpherePoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::monomial(MultiIndex::zeros(nvars), c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    /// The coordinate function `φ_{i+1}` (0-based `i`).
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable {i} out of range for {nvars} variables");
        Self::monomial(MultiIndex::unit(nvars, i), Rational::one())
    }

    pub fn monomial(exp: MultiIndex, c: Rational) -> Self {
        let nvars = exp.len();
        let mut p = SpherePoly::zero(nvars);
        p.add_term(exp, c);
        p
    }

    /// `Σ_i φ_i²`, which is identically one on the sphere.
    pub fn norm_squared(nvars: usize) -> Self {
        let mut p = SpherePoly::zero(nvars);
        for i in 0..nvars {
            p.add_term(MultiIndex::unit(nvars, i).bumped(i, 1), Rational::one());
        }
        p
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Rational)>,
    {
        let mut p = SpherePoly::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    found: e.len(),
                });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &MultiIndex) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, e: MultiIndex, c: Rational) {
        debug_assert_eq!(e.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// Largest total degree present; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(MultiIndex::degree).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(MultiIndex::degree);
        match it.next() {
            None => true,
            Some(d) => it.all(|e| e == d),
        }
    }

    /// Splits the representative into homogeneous pieces keyed by degree.
    pub fn homogeneous_components(&self) -> BTreeMap<u32, SpherePoly> {
        let mut out: BTreeMap<u32, SpherePoly> = BTreeMap::new();
        for (e, c) in &self.terms {
            out.entry(e.degree())
                .or_insert_with(|| SpherePoly::zero(self.nvars))
                .add_term(e.clone(), c.clone());
        }
        out
    }

    fn check_dims(&self, other: &SpherePoly) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: other.nvars,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &SpherePoly) -> Result<SpherePoly> {
        self.check_dims(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &SpherePoly) -> Result<SpherePoly> {
        self.check_dims(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &SpherePoly) -> Result<SpherePoly> {
        self.check_dims(other)?;
        let mut out = SpherePoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.add_term(e1.plus(e2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> SpherePoly {
        if c.is_zero() {
            return SpherePoly::zero(self.nvars);
        }
        SpherePoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> SpherePoly {
        let mut out = SpherePoly::one(self.nvars);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// `∂p/∂φ_{i+1}`.
    pub fn derivative(&self, i: usize) -> SpherePoly {
        let mut out = SpherePoly::zero(self.nvars);
        for (e, c) in &self.terms {
            let a = e.0[i];
            if a > 0 {
                out.add_term(e.bumped(i, -1), c * int(a as i64));
            }
        }
        out
    }

    /// Euler operator `Σ_i φ_i ∂_i p`: multiplies each term by its degree.
    pub fn euler(&self) -> SpherePoly {
        let mut out = SpherePoly::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * int(e.degree() as i64));
        }
        out
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: point.len(),
            });
        }
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &a) in point.iter().zip(&e.0) {
                for _ in 0..a {
                    t *= x;
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Divides by `Σφ_i²` eliminating powers `φ_1^2`, returning
    /// `(quotient, remainder)` with every remainder term of `φ_1`-degree ≤ 1.
    /// The remainder is zero exactly when the input lies in the ideal
    /// generated by `Σφ_i²`.
    pub fn div_rem_norm_squared(&self) -> (SpherePoly, SpherePoly) {
        let n = self.nvars;
        let mut rem = self.clone();
        let mut quot = SpherePoly::zero(n);
        if n == 0 {
            return (quot, rem);
        }
        loop {
            // Keys sort lexicographically, so the last key maximises a_1.
            let (e, c) = match rem.terms.iter().next_back() {
                Some((e, c)) if e.0[0] >= 2 => (e.clone(), c.clone()),
                _ => break,
            };
            let base = e.bumped(0, -2);
            quot.add_term(base.clone(), c.clone());
            for i in 0..n {
                rem.add_term(base.bumped(i, 2), -c.clone());
            }
        }
        (quot, rem)
    }

    /// Remainder of division by the sphere relation `Σφ_i² − 1` eliminating
    /// `φ_1²`. Two polynomials agree on the sphere iff these remainders agree.
    pub fn eliminate_first_variable(&self) -> SpherePoly {
        let n = self.nvars;
        let mut rem = self.clone();
        if n == 0 {
            return rem;
        }
        loop {
            let (e, c) = match rem.terms.iter().next_back() {
                Some((e, c)) if e.0[0] >= 2 => (e.clone(), c.clone()),
                _ => break,
            };
            // φ_1^2 → 1 − Σ_{i>1} φ_i^2
            let base = e.bumped(0, -2);
            rem.add_term(e, -c.clone());
            rem.add_term(base.clone(), c.clone());
            for i in 1..n {
                rem.add_term(base.bumped(i, 2), -c.clone());
            }
        }
        rem
    }

    pub fn to_json_terms(&self) -> Vec<PolyTerm> {
        let mut terms: Vec<(&MultiIndex, &Rational)> = self.terms.iter().collect();
        // Highest degree first, then larger leading exponents first.
        terms.sort_by(|a, b| b.0.degree().cmp(&a.0.degree()).then_with(|| b.0.cmp(a.0)));
        terms
            .into_iter()
            .map(|(e, c)| PolyTerm {
                exp: e.0.clone(),
                coeff: format_rational(c),
            })
            .collect()
    }

    pub fn from_json_terms(nvars: usize, terms: &[PolyTerm]) -> Result<SpherePoly> {
        let parsed = terms
            .iter()
            .map(|t| Ok((MultiIndex::new(t.exp.clone()), parse_rational(&t.coeff)?)))
            .collect::<Result<Vec<_>>>()?;
        SpherePoly::from_terms(nvars, parsed)
    }
}

impl fmt::Display for SpherePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, t) in self.to_json_terms().iter().enumerate() {
            let c = parse_rational(&t.coeff).expect("self-produced rational");
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let mono: Vec<String> = t
                .exp
                .iter()
                .enumerate()
                .filter(|(_, &a)| a > 0)
                .map(|(i, &a)| {
                    if a == 1 {
                        format!("x{}", i + 1)
                    } else {
                        format!("x{}^{}", i + 1, a)
                    }
                })
                .collect();
            if mono.is_empty() {
                write!(f, "{}", format_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{}*{}", format_rational(&mag), mono.join("*"))?;
            }
        }
        Ok(())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl<'a> $tr<&'a SpherePoly> for &'a SpherePoly {
            type Output = SpherePoly;
            /// Panics on mismatched ambient dimensions; use the `checked_*`
            /// methods to get an error instead.
            fn $method(self, rhs: &'a SpherePoly) -> SpherePoly {
                self.$checked(rhs).expect("ambient dimension mismatch")
            }
        }
        impl $tr<SpherePoly> for SpherePoly {
            type Output = SpherePoly;
            fn $method(self, rhs: SpherePoly) -> SpherePoly {
                (&self).$checked(&rhs).expect("ambient dimension mismatch")
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for &SpherePoly {
    type Output = SpherePoly;
    fn neg(self) -> SpherePoly {
        self.scale(&-Rational::one())
    }
}

impl Neg for SpherePoly {
    type Output = SpherePoly;
    fn neg(self) -> SpherePoly {
        -&self
    }
}

/// `Δ⁰p = Σ_i ∂²p/∂φ_i²` on the ambient representative.
pub fn euclidean_laplacian(p: &SpherePoly) -> SpherePoly {
    let n = p.nvars;
    let mut out = SpherePoly::zero(n);
    for (e, c) in &p.terms {
        for i in 0..n {
            let a = e.0[i];
            if a >= 2 {
                out.add_term(e.bumped(i, -2), c * int((a * (a - 1)) as i64));
            }
        }
    }
    out
}

/// `dφ_{i+1}(∇f) = ∂_i f − φ_i Σ_j φ_j ∂_j f`, the `i`-th ambient component
/// of the tangential gradient of `f`.
pub fn tangential_component(f: &SpherePoly, i: usize) -> SpherePoly {
    let xi = SpherePoly::var(f.nvars, i);
    &f.derivative(i) - &(&xi * &f.euler())
}

/// Tangential pairing `⟨∇f, ∇h⟩` on the sphere:
/// `Σ_i ∂_i f ∂_i h − (Σ_i φ_i ∂_i f)(Σ_j φ_j ∂_j h)`.
pub fn grad_pairing(f: &SpherePoly, h: &SpherePoly) -> Result<SpherePoly> {
    f.check_dims(h)?;
    let mut out = SpherePoly::zero(f.nvars);
    for i in 0..f.nvars {
        out = &out + &(&f.derivative(i) * &h.derivative(i));
    }
    Ok(&out - &(&f.euler() * &h.euler()))
}

/// Harmonic part of a homogeneous polynomial of degree `d` in `n` variables:
/// `Σ_j (−1)^j |x|^{2j} Δ^j p / (2^j j! Π_{i=1..j} (n + 2d − 2 − 2i))`.
fn harmonic_part(p: &SpherePoly, d: u32) -> SpherePoly {
    let n = p.nvars as i64;
    let r2 = SpherePoly::norm_squared(p.nvars);
    let mut out = p.clone();
    let mut lap = p.clone();
    let mut rpow = SpherePoly::one(p.nvars);
    let mut denom = Rational::one();
    for j in 1..=(d / 2) as i64 {
        lap = euclidean_laplacian(&lap);
        if lap.is_zero() {
            break;
        }
        rpow = &rpow * &r2;
        denom *= int(2 * j * (n + 2 * d as i64 - 2 - 2 * j));
        let sign = if j % 2 == 1 { -Rational::one() } else { Rational::one() };
        out = &out + &(&rpow * &lap).scale(&(sign / &denom));
    }
    out
}

/// Unique decomposition of a homogeneous `p` of degree `d` as
/// `Σ_k |x|^{d−k} H_k`, returned as `(k, H_k)` pairs in decreasing `k` with
/// zero components omitted.
pub(crate) fn decompose_homogeneous(p: &SpherePoly, d: u32) -> Vec<(u32, SpherePoly)> {
    let mut out = Vec::new();
    let mut cur = p.clone();
    let mut k = d as i64;
    while k >= 0 && !cur.is_zero() {
        let h = harmonic_part(&cur, k as u32);
        let rest = &cur - &h;
        if !h.is_zero() {
            out.push((k as u32, h));
        }
        let (q, r) = rest.div_rem_norm_squared();
        debug_assert!(r.is_zero(), "harmonic remainder not divisible by |x|^2");
        cur = q;
        k -= 2;
    }
    out
}

/// Canonical harmonic expansion of `p` on the sphere, keyed by degree.
pub fn harmonic_expansion(p: &SpherePoly) -> BTreeMap<u32, SpherePoly> {
    let mut out: BTreeMap<u32, SpherePoly> = BTreeMap::new();
    for (d, comp) in p.homogeneous_components() {
        for (k, h) in decompose_homogeneous(&comp, d) {
            let slot = out.entry(k).or_insert_with(|| SpherePoly::zero(p.nvars));
            *slot = &*slot + &h;
        }
    }
    out.retain(|_, h| !h.is_zero());
    out
}

/// Canonical representative of `p` modulo `Σφ_i² = 1`: the sum of its
/// harmonic components.
pub fn reduce_on_sphere(p: &SpherePoly) -> SpherePoly {
    harmonic_expansion(p)
        .into_values()
        .fold(SpherePoly::zero(p.nvars), |acc, h| &acc + &h)
}

/// Equality as functions on the sphere.
pub fn eq_on_sphere(p: &SpherePoly, q: &SpherePoly) -> bool {
    p.nvars == q.nvars && reduce_on_sphere(&(p - q)).is_zero()
}
