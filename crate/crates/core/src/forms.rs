//! Constant calibration forms on `R^{m+n}` and the forms they induce on the
//! unit sphere `S^m ⊂ R^{m+1} × {0}`.
//!
//! The pipeline is `Ω → ξ̂ = ι_{W_β} ι_{W_α} Ω → ξ = *φ*ξ̂ → ω = ½ φ*ξ̂`.
//! Forms on the sphere are stored through ambient coefficients of `dφ^i`,
//! understood modulo the normal covector `Σ φ_i dφ^i`. They are only ever
//! evaluated on tangential gradients, where that ambiguity vanishes.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{random_rotation, random_sphere_frame, SphereFrame};
use crate::linalg::{determinant, RatMatrix};
use crate::moments::MomentTable;
use crate::polyring::{reduce_on_sphere, tangential_component, MultiIndex, SpherePoly};
use crate::rational::{format_rational, int, parse_rational, rat, Rational};

/// Sign of the permutation that sorts `seq` (entries distinct).
fn permutation_sign(seq: &[usize]) -> i64 {
    let mut inv = 0;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Alternating form with constant coefficients on `R^dim`. Axes are numbered
/// from 1; each term `dx^{i_1 ... i_r}` is keyed by its strictly increasing
/// index tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstantForm {
    dim: usize,
    rank: usize,
    terms: BTreeMap<Vec<usize>, Rational>,
}

impl ConstantForm {
    pub fn zero(dim: usize, rank: usize) -> Self {
        ConstantForm {
            dim,
            rank,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<I>(dim: usize, rank: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, Rational)>,
    {
        let mut f = ConstantForm::zero(dim, rank);
        for (idx, c) in terms {
            f.add_term(idx, c)?;
        }
        Ok(f)
    }

    /// `Ω = ½ϖ² = dx¹²³⁴ + dx¹²⁵⁶ + dx³⁴⁵⁶` on `R⁶ = C³`.
    pub fn kahler3() -> Self {
        ConstantForm::from_terms(
            6,
            4,
            [vec![1, 2, 3, 4], vec![1, 2, 5, 6], vec![3, 4, 5, 6]]
                .into_iter()
                .map(|i| (i, Rational::one())),
        )
        .expect("built-in form is valid")
    }

    pub fn add_term(&mut self, idx: Vec<usize>, c: Rational) -> Result<()> {
        if idx.len() != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                found: idx.len(),
            });
        }
        if let Some(&bad) = idx.iter().find(|&&i| i == 0 || i > self.dim) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                max: self.dim,
            });
        }
        if idx.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::UnsortedIndex(idx));
        }
        if c.is_zero() {
            return Ok(());
        }
        let e = self.terms.entry(idx).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &Rational)> {
        self.terms.iter()
    }

    pub fn scale(&self, c: &Rational) -> ConstantForm {
        let mut out = ConstantForm::zero(self.dim, self.rank);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v * c).expect("same shape");
        }
        out
    }

    /// `ι_{e_axis}` of the form: `ι_{e_a} dx^I = (−1)^p dx^{I∖a}` where `p` is
    /// the 0-based position of `a` in `I`.
    pub fn contract(&self, axis: usize) -> Result<ConstantForm> {
        if axis == 0 || axis > self.dim {
            return Err(Error::IndexOutOfRange {
                index: axis,
                max: self.dim,
            });
        }
        if self.rank == 0 {
            return Err(Error::RankMismatch { expected: 1, found: 0 });
        }
        let mut out = ConstantForm::zero(self.dim, self.rank - 1);
        for (idx, c) in &self.terms {
            if let Some(p) = idx.iter().position(|&i| i == axis) {
                let mut rest = idx.clone();
                rest.remove(p);
                let s = if p % 2 == 0 { c.clone() } else { -c.clone() };
                out.add_term(rest, s)?;
            }
        }
        Ok(out)
    }

    /// Value on the vectors `v_1, ..., v_r` (each of length `dim`):
    /// `Σ_I c_I det[v_j(i)]_{i∈I}`.
    pub fn evaluate(&self, vectors: &[Vec<Rational>]) -> Result<Rational> {
        if vectors.len() != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                found: vectors.len(),
            });
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != self.dim) {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        let mut acc = Rational::zero();
        for (idx, c) in &self.terms {
            let mut m = RatMatrix::zeros(self.rank, self.rank);
            for (r, &i) in idx.iter().enumerate() {
                for (j, v) in vectors.iter().enumerate() {
                    m.set(r, j, v[i - 1].clone());
                }
            }
            acc += c * determinant(&m);
        }
        Ok(acc)
    }

    /// Looks for an orthonormal `rank`-frame with `|Ω(e_1, ..., e_r)| > 1`,
    /// trying every coordinate frame and then `samples` random rational
    /// rotations. Returns the offending frame and value.
    pub fn find_comass_violation<R: Rng>(
        &self,
        samples: usize,
        rng: &mut R,
    ) -> Option<(Vec<Vec<Rational>>, Rational)> {
        let basis = |i: usize| -> Vec<Rational> {
            (1..=self.dim).map(|k| if k == i { int(1) } else { int(0) }).collect()
        };
        for idx in self.terms.keys() {
            let frame: Vec<Vec<Rational>> = idx.iter().map(|&i| basis(i)).collect();
            let v = self.evaluate(&frame).expect("shape checked");
            if num_traits::Signed::abs(&v) > Rational::one() {
                return Some((frame, v));
            }
        }
        for _ in 0..samples {
            let q = random_rotation(self.dim, rng);
            let frame: Vec<Vec<Rational>> = (0..self.rank).map(|j| q.column(j)).collect();
            let v = self.evaluate(&frame).expect("shape checked");
            if num_traits::Signed::abs(&v) > Rational::one() {
                return Some((frame, v));
            }
        }
        None
    }
}

/// `ξ̂_{αβ} = ι_{W_β} ι_{W_α} Ω` for normal axes `α ≠ β` in `m+2 ..= m+n`,
/// where `m + 1` is the rank of `Ω`.
pub fn interior_product(omega: &ConstantForm, alpha: usize, beta: usize) -> Result<ConstantForm> {
    if omega.rank < 2 {
        return Err(Error::RankMismatch {
            expected: 2,
            found: omega.rank,
        });
    }
    let m = omega.rank - 1;
    for axis in [alpha, beta] {
        if axis < m + 2 || axis > omega.dim {
            return Err(Error::IndexOutOfRange {
                index: axis,
                max: omega.dim,
            });
        }
    }
    if alpha == beta {
        return Err(Error::Precondition("normal directions must differ".into()));
    }
    omega.contract(alpha)?.contract(beta)
}

/// One-form `Σ c_i dφ^i` on the sphere with polynomial coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyOneForm {
    components: Vec<SpherePoly>,
}

impl PolyOneForm {
    pub fn zero(nvars: usize) -> Self {
        PolyOneForm {
            components: vec![SpherePoly::zero(nvars); nvars],
        }
    }

    pub fn from_components(components: Vec<SpherePoly>) -> Self {
        let n = components.len();
        assert!(components.iter().all(|c| c.nvars() == n));
        PolyOneForm { components }
    }

    pub fn nvars(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[SpherePoly] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(SpherePoly::is_zero)
    }

    /// `‖ξ‖² = Σ c_i² − (Σ φ_i c_i)²`, reduced on the sphere.
    pub fn tangential_norm_squared(&self) -> SpherePoly {
        let n = self.nvars();
        let mut sq = SpherePoly::zero(n);
        let mut normal = SpherePoly::zero(n);
        for (i, c) in self.components.iter().enumerate() {
            sq = &sq + &(c * c);
            normal = &normal + &(&SpherePoly::var(n, i) * c);
        }
        reduce_on_sphere(&(&sq - &(&normal * &normal)))
    }

    /// `ξ(v)` at a sphere point `x` for a tangent vector `v`.
    pub fn evaluate(&self, x: &[Rational], v: &[Rational]) -> Result<Rational> {
        let mut acc = Rational::zero();
        for (c, vi) in self.components.iter().zip(v) {
            acc += c.evaluate(x)? * vi;
        }
        Ok(acc)
    }
}

/// Two-form `Σ_{i<j} w_ij dφ^i ∧ dφ^j` on the sphere (0-based `i < j`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyTwoForm {
    nvars: usize,
    components: BTreeMap<(usize, usize), SpherePoly>,
}

impl PolyTwoForm {
    pub fn zero(nvars: usize) -> Self {
        PolyTwoForm {
            nvars,
            components: BTreeMap::new(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn components(&self) -> &BTreeMap<(usize, usize), SpherePoly> {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.values().all(SpherePoly::is_zero)
    }

    pub fn add_component(&mut self, i: usize, j: usize, w: SpherePoly) {
        assert!(i < j && j < self.nvars, "components are stored for i < j");
        let slot = self
            .components
            .entry((i, j))
            .or_insert_with(|| SpherePoly::zero(self.nvars));
        *slot = &*slot + &w;
        if slot.is_zero() {
            self.components.remove(&(i, j));
        }
    }

    pub fn scale(&self, c: &Rational) -> PolyTwoForm {
        let mut out = PolyTwoForm::zero(self.nvars);
        for (&(i, j), w) in &self.components {
            out.add_component(i, j, w.scale(c));
        }
        out
    }
}

/// Closed-form `ξ = *φ*ξ̂` for a constant `(m−1)`-form `ξ̂`: for an index
/// tuple `J` with complement `{i < j}` in `1..=m+1`,
/// `*(dφ^J) = (−1)^{m−1} sgn(J, i, j) (φ_i dφ^j − φ_j dφ^i)`.
/// The sphere star is `(−1)^{m−1} ι_x ∘ *` of the ambient one, so the extra
/// sign only shows for even `m`. Terms of `ξ̂` touching axes beyond `m + 1`
/// pull back to zero.
pub fn star_pullback(xi_hat: &ConstantForm, m: usize) -> Result<PolyOneForm> {
    if m < 2 || xi_hat.rank + 1 != m {
        return Err(Error::RankMismatch {
            expected: m.saturating_sub(1),
            found: xi_hat.rank,
        });
    }
    let n = m + 1;
    let mut comps = vec![SpherePoly::zero(n); n];
    for (idx, c) in &xi_hat.terms {
        if idx.iter().any(|&a| a > n) {
            continue;
        }
        let comp: Vec<usize> = (1..=n).filter(|a| !idx.contains(a)).collect();
        let (i, j) = (comp[0], comp[1]);
        let mut seq = idx.clone();
        seq.extend([i, j]);
        let parity = if m % 2 == 1 { 1 } else { -1 };
        let s = c * int(parity * permutation_sign(&seq));
        comps[j - 1] = &comps[j - 1] + &SpherePoly::var(n, i - 1).scale(&s);
        comps[i - 1] = &comps[i - 1] - &SpherePoly::var(n, j - 1).scale(&s);
    }
    Ok(PolyOneForm { components: comps })
}

/// `ω = ½ φ*ξ̂` on `S³` for a constant two-form `ξ̂`.
///
/// This is a co-primitive of `ξ` (`δω = ξ`) when `ξ̂` restricted to `R⁴` is
/// self-dual, as in the Kähler case; [`coprimitive_defect`] tests it.
pub fn omega_from_xi(xi_hat: &ConstantForm, m: usize) -> Result<PolyTwoForm> {
    if m != 3 {
        return Err(Error::Unsupported(format!(
            "ω = ½φ*ξ̂ is only wired for S³, not S^{m}"
        )));
    }
    if xi_hat.rank != 2 {
        return Err(Error::RankMismatch {
            expected: 2,
            found: xi_hat.rank,
        });
    }
    let n = m + 1;
    let mut out = PolyTwoForm::zero(n);
    for (idx, c) in &xi_hat.terms {
        if idx.iter().any(|&a| a > n) {
            continue;
        }
        out.add_component(idx[0] - 1, idx[1] - 1, SpherePoly::constant(n, c * rat(1, 2)));
    }
    Ok(out)
}

/// `ξ(∇f) = Σ_i c_i dφ^i(∇f)`, reduced on the sphere.
pub fn xi_apply(xi: &PolyOneForm, f: &SpherePoly) -> SpherePoly {
    reduce_on_sphere(&xi_apply_raw(xi, f))
}

fn xi_apply_raw(xi: &PolyOneForm, f: &SpherePoly) -> SpherePoly {
    let mut out = SpherePoly::zero(f.nvars());
    for (i, c) in xi.components.iter().enumerate() {
        if !c.is_zero() {
            out = &out + &(c * &tangential_component(f, i));
        }
    }
    out
}

/// `ω(∇f, ∇h) = Σ_{i<j} w_ij (dφ^i(∇f) dφ^j(∇h) − dφ^j(∇f) dφ^i(∇h))`,
/// reduced on the sphere.
pub fn omega_pair(omega: &PolyTwoForm, f: &SpherePoly, h: &SpherePoly) -> SpherePoly {
    let n = omega.nvars;
    let gf: Vec<SpherePoly> = (0..n).map(|i| tangential_component(f, i)).collect();
    let gh: Vec<SpherePoly> = (0..n).map(|i| tangential_component(h, i)).collect();
    let mut out = SpherePoly::zero(n);
    for (&(i, j), w) in &omega.components {
        let wedge = &(&gf[i] * &gh[j]) - &(&gf[j] * &gh[i]);
        out = &out + &(w * &wedge);
    }
    reduce_on_sphere(&out)
}

/// `∫ ω(∇f, ∇h)` computed without forming the pairing polynomial.
pub fn omega_pair_integral(
    table: &MomentTable,
    omega: &PolyTwoForm,
    f: &SpherePoly,
    h: &SpherePoly,
) -> Rational {
    let n = omega.nvars;
    let gf: Vec<SpherePoly> = (0..n).map(|i| tangential_component(f, i)).collect();
    let gh: Vec<SpherePoly> = (0..n).map(|i| tangential_component(h, i)).collect();
    let mut acc = Rational::zero();
    for (&(i, j), w) in &omega.components {
        let a = &gf[i] * w;
        let b = &gf[j] * w;
        acc += table.integral_of_product(&a, &gh[j]) - table.integral_of_product(&b, &gh[i]);
    }
    acc
}

/// First pair of monomials `(f, h)` of degree ≤ `max_degree` with
/// `∫ f ξ(∇h) ≠ ∫ ω(∇f, ∇h)`, if any.
pub fn coprimitive_defect(
    table: &MomentTable,
    xi: &PolyOneForm,
    omega: &PolyTwoForm,
    max_degree: u32,
) -> Option<(SpherePoly, SpherePoly)> {
    let n = xi.nvars();
    let monos: Vec<SpherePoly> = (0..=max_degree)
        .flat_map(|d| MultiIndex::all_of_degree(n, d))
        .map(|e| SpherePoly::monomial(e, int(1)))
        .collect();
    for f in &monos {
        for h in &monos {
            let lhs = table.integral_of_product(f, &xi_apply_raw(xi, h));
            let rhs = omega_pair_integral(table, omega, f, h);
            if lhs != rhs {
                return Some((f.clone(), h.clone()));
            }
        }
    }
    None
}

/// Hodge star of the pulled-back `(m−1)`-form at a sphere point, computed
/// from an oriented orthonormal tangent frame `(e_1, ..., e_m)`:
/// `(*α)(e_k) = (−1)^{m−k} α(e_1, ..., ê_k, ..., e_m)`.
pub fn pointwise_star(xi_hat: &ConstantForm, m: usize, frame: &SphereFrame) -> Result<Vec<Rational>> {
    if xi_hat.rank + 1 != m {
        return Err(Error::RankMismatch {
            expected: m - 1,
            found: xi_hat.rank,
        });
    }
    let pad = |v: &Vec<Rational>| -> Vec<Rational> {
        let mut w = v.clone();
        w.resize(xi_hat.dim.max(m + 1), Rational::zero());
        w
    };
    let frame_vecs: Vec<Vec<Rational>> = frame.tangent.iter().map(pad).collect();
    (1..=m)
        .map(|k| {
            let rest: Vec<Vec<Rational>> = frame_vecs
                .iter()
                .enumerate()
                .filter(|(j, _)| j + 1 != k)
                .map(|(_, v)| v.clone())
                .collect();
            let v = xi_hat.evaluate(&rest)?;
            Ok(if (m - k).is_multiple_of(2) { v } else { -v })
        })
        .collect()
}

/// Compares [`star_pullback`] against [`pointwise_star`] at `samples` random
/// rational sphere points; returns the first disagreeing point.
pub fn validate_star_rule<R: Rng>(
    xi_hat: &ConstantForm,
    m: usize,
    samples: usize,
    rng: &mut R,
) -> Result<Option<Vec<Rational>>> {
    let xi = star_pullback(xi_hat, m)?;
    for _ in 0..samples {
        let frame = random_sphere_frame(m + 1, rng);
        let expected = pointwise_star(xi_hat, m, &frame)?;
        for (k, e) in frame.tangent.iter().enumerate() {
            if xi.evaluate(&frame.point, e)? != expected[k] {
                return Ok(Some(frame.point.clone()));
            }
        }
    }
    Ok(None)
}

/// One term of the calibration file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormTerm {
    pub idx: Vec<usize>,
    pub coeff: String,
}

/// Calibration spec file: `{"m", "n", "rank", "terms": [{"idx", "coeff"}]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CalibrationSpec {
    pub m: usize,
    pub n: usize,
    pub rank: usize,
    pub terms: Vec<FormTerm>,
}

impl CalibrationSpec {
    pub fn builtin(name: &str) -> Option<CalibrationSpec> {
        match name {
            "kahler3" => Some(CalibrationSpec::from_form(3, &ConstantForm::kahler3())),
            _ => None,
        }
    }

    pub fn from_form(m: usize, form: &ConstantForm) -> CalibrationSpec {
        CalibrationSpec {
            m,
            n: form.dim - m,
            rank: form.rank,
            terms: form
                .terms()
                .map(|(idx, c)| FormTerm {
                    idx: idx.clone(),
                    coeff: format_rational(c),
                })
                .collect(),
        }
    }

    pub fn to_form(&self) -> Result<ConstantForm> {
        if self.m < 2 {
            return Err(Error::Precondition(format!("m must be ≥ 2, got {}", self.m)));
        }
        if self.rank != self.m + 1 {
            return Err(Error::RankMismatch {
                expected: self.m + 1,
                found: self.rank,
            });
        }
        let terms = self
            .terms
            .iter()
            .map(|t| Ok((t.idx.clone(), parse_rational(&t.coeff)?)))
            .collect::<Result<Vec<_>>>()?;
        ConstantForm::from_terms(self.m + self.n, self.rank, terms)
    }
}
