//! Exact integration over the unit sphere `S^m`, normalised so that
//! `Vol(S^m) = 1`.
//!
//! Monomial moments come from the degree recursion
//! `∫φ^a = Σ_i a_i(a_i−1) / (l(l+m−1)) ∫φ^{a−2ε_i}` with `l = |a|`,
//! which is `∫P = (1/λ_l)∫Δ⁰P` applied to a single monomial.

use std::collections::HashMap;
use std::sync::RwLock;

use num_traits::{One, Zero};

use crate::polyring::{grad_pairing, MultiIndex, SpherePoly};
use crate::rational::{int, Rational};

/// Memoised monomial moments on `S^m`. Safe to share between threads; the
/// cache is guarded by a read-write lock and only ever grows.
#[derive(Debug)]
pub struct MomentTable {
    m: usize,
    cache: RwLock<HashMap<Vec<u32>, Rational>>,
}

impl MomentTable {
    pub fn new(m: usize) -> Self {
        assert!(m >= 1, "sphere dimension must be at least 1");
        MomentTable {
            m,
            cache: RwLock::new(HashMap::new()),
        }
    }

    /// Sphere dimension `m`.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn nvars(&self) -> usize {
        self.m + 1
    }

    /// Fills the cache for every even multi-index up to `max_degree`, after
    /// which lookups in that range never take the write lock.
    pub fn warm_up(&self, max_degree: u32) {
        for d in (0..=max_degree).step_by(2) {
            for a in MultiIndex::all_of_degree(self.nvars(), d) {
                self.monomial_moment(&a);
            }
        }
    }

    pub fn cached_len(&self) -> usize {
        self.cache.read().expect("moment cache poisoned").len()
    }

    /// `∫_{S^m} φ^a dM / Vol(S^m)`.
    pub fn monomial_moment(&self, a: &MultiIndex) -> Rational {
        assert_eq!(a.len(), self.nvars(), "multi-index length must be m+1");
        if a.has_odd() {
            return Rational::zero();
        }
        // Moments are symmetric under permutation of the exponents.
        let mut key = a.exponents().to_vec();
        key.sort_unstable_by(|x, y| y.cmp(x));
        self.moment_sorted(key)
    }

    fn moment_sorted(&self, key: Vec<u32>) -> Rational {
        let l: u32 = key.iter().sum();
        if l == 0 {
            return Rational::one();
        }
        if let Some(v) = self.cache.read().expect("moment cache poisoned").get(&key) {
            return v.clone();
        }
        let denom = int(l as i64 * (l as i64 + self.m as i64 - 1));
        let mut acc = Rational::zero();
        for i in 0..key.len() {
            let ai = key[i];
            if ai < 2 {
                continue;
            }
            let mut sub = key.clone();
            sub[i] -= 2;
            sub.sort_unstable_by(|x, y| y.cmp(x));
            acc += int((ai * (ai - 1)) as i64) * self.moment_sorted(sub);
        }
        let v = acc / denom;
        self.cache
            .write()
            .expect("moment cache poisoned")
            .insert(key, v.clone());
        v
    }

    /// `∫ p dM` (normalised), summing moments term by term.
    pub fn integral(&self, p: &SpherePoly) -> Rational {
        assert_eq!(p.nvars(), self.nvars(), "polynomial lives in the wrong ambient space");
        p.terms()
            .filter(|(e, _)| !e.has_odd())
            .map(|(e, c)| c * self.monomial_moment(e))
            .fold(Rational::zero(), |acc, t| acc + t)
    }

    /// `∫ p·q dM` without materialising the product.
    pub fn integral_of_product(&self, p: &SpherePoly, q: &SpherePoly) -> Rational {
        let mut acc = Rational::zero();
        for (e1, c1) in p.terms() {
            for (e2, c2) in q.terms() {
                let e = e1.plus(e2);
                if e.has_odd() {
                    continue;
                }
                acc += c1 * c2 * self.monomial_moment(&e);
            }
        }
        acc
    }

    /// `⟨f, h⟩_{L²} = ∫ f h`.
    pub fn l2_inner(&self, f: &SpherePoly, h: &SpherePoly) -> Rational {
        self.integral_of_product(f, h)
    }

    /// `∫ ⟨∇f, ∇h⟩`.
    pub fn dirichlet_inner(&self, f: &SpherePoly, h: &SpherePoly) -> Rational {
        self.integral(&grad_pairing(f, h).expect("matching ambient dimension"))
    }
}

fn double_factorial_odd(k: u32) -> Rational {
    // (k−1)!! for even k
    let mut acc = Rational::one();
    let mut j = k as i64 - 1;
    while j > 1 {
        acc *= int(j);
        j -= 2;
    }
    acc
}

/// Closed form `Π_i (a_i−1)!! / Π_{k=1}^{|a|/2} (m+2k−1)`, zero when some
/// exponent is odd. Independent of [`MomentTable`].
pub fn oracle_moment(m: usize, a: &MultiIndex) -> Rational {
    if a.has_odd() {
        return Rational::zero();
    }
    let num = a
        .exponents()
        .iter()
        .fold(Rational::one(), |acc, &ai| acc * double_factorial_odd(ai));
    let half = a.degree() / 2;
    let den = (1..=half as i64).fold(Rational::one(), |acc, k| acc * int(m as i64 + 2 * k - 1));
    num / den
}
