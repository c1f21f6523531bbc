//! Degree-by-degree certification of the Cauchy–Riemann inequality
//! `−6∫ω(∇f,∇h) ≤ ‖∇f‖² + ‖∇h‖²` on `S³ ⊂ C³`.
//!
//! For `f = Σ μ_a b_a`, `h = Σ σ_a b_a` over a basis of `E_{λ_l}` the
//! inequality reads `μᵀGμ + σᵀGσ − 2μᵀKσ ≥ 0` with `G` the Dirichlet Gram
//! matrix and `K_ab = −3∫ω(∇b_a, ∇b_b)`, i.e. positive semidefiniteness of
//! the block matrix `[[G, −K], [K, G]]`.

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::forms::{
    coprimitive_defect, interior_product, omega_from_xi, omega_pair_integral, star_pullback, xi_apply,
    CalibrationSpec, ConstantForm, FormTerm, PolyOneForm, PolyTwoForm,
};
use crate::harmonics::{eigenvalue, harmonic_basis, sphere_laplacian, HarmonicSpace};
use crate::linalg::{psd_decompose, solve, PsdStatus, RatMatrix};
use crate::moments::MomentTable;
use crate::polyring::{reduce_on_sphere, tangential_component, MultiIndex, PolyTerm, SpherePoly};
use crate::rational::{format_rational, int, rat, Rational};

pub const NORMALIZATION: &str = "Vol(S^m)=1";

/// Degree up to which the weak co-primitive identity `∫fξ(∇h) = ∫ω(∇f,∇h)`
/// is checked on monomial pairs before a calibration is accepted.
const COPRIMITIVE_CHECK_DEGREE: u32 = 2;

/// Constants relating the forms of the inequality. `ϖ = 2ω`, and
/// `−∫ϖ(∇f,∇h) = (2/3)·(−3∫ω(∇f,∇h)) ≤ (2/3)‖∇f‖‖∇h‖`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bookkeeping {
    /// Factor in `K_ab = −3∫ω(∇b_a,∇b_b)`.
    pub pairing_factor: i64,
    /// Factor in `−6∫ω(∇f,∇h) ≤ ‖∇f‖² + ‖∇h‖²`.
    pub inequality_factor: i64,
    /// `ϖ / ω`.
    pub varpi_over_omega: i64,
    /// Best constant `c` in `−∫ϖ(∇f,∇h) ≤ c‖∇f‖‖∇h‖`.
    #[serde(with = "crate::rational::serde_rational")]
    pub sharp_constant: Rational,
}

pub fn bookkeeping() -> Bookkeeping {
    let pairing_factor = 3;
    let varpi_over_omega = 2;
    Bookkeeping {
        pairing_factor,
        inequality_factor: 2 * pairing_factor,
        varpi_over_omega,
        sharp_constant: rat(varpi_over_omega, pairing_factor),
    }
}

impl Bookkeeping {
    /// `−∫ϖ(∇f,∇h)` from `−3∫ω(∇f,∇h)`.
    pub fn varpi_pairing(&self, scaled_omega_pairing: &Rational) -> Rational {
        scaled_omega_pairing * rat(self.varpi_over_omega, self.pairing_factor)
    }

    /// `−6∫ω(∇f,∇h)` from `−3∫ω(∇f,∇h)`.
    pub fn inequality_lhs(&self, scaled_omega_pairing: &Rational) -> Rational {
        scaled_omega_pairing * rat(self.inequality_factor, self.pairing_factor)
    }
}

/// Calibration data for the `S³ ⊂ C³` configuration with the unique normal
/// pair `(α, β) = (5, 6)`.
#[derive(Debug)]
pub struct Problem {
    pub spec: CalibrationSpec,
    pub omega: ConstantForm,
    pub xi_hat: ConstantForm,
    pub xi: PolyOneForm,
    pub two_form: PolyTwoForm,
    pub table: MomentTable,
}

impl Problem {
    pub fn kahler() -> Problem {
        Problem::from_spec(&CalibrationSpec::builtin("kahler3").expect("builtin")).expect("builtin is valid")
    }

    pub fn from_spec(spec: &CalibrationSpec) -> Result<Problem> {
        if spec.m != 3 || spec.n != 3 {
            return Err(Error::Unsupported(format!(
                "exact certification is wired for m = n = 3 only, got m = {}, n = {}",
                spec.m, spec.n
            )));
        }
        let omega = spec.to_form()?;
        let xi_hat = interior_product(&omega, 5, 6)?;
        let xi = star_pullback(&xi_hat, 3)?;
        let two_form = omega_from_xi(&xi_hat, 3)?;
        let table = MomentTable::new(3);
        if let Some((f, h)) = coprimitive_defect(&table, &xi, &two_form, COPRIMITIVE_CHECK_DEGREE) {
            return Err(Error::Precondition(format!(
                "½φ*ξ̂ is not a co-primitive of ξ: ∫fξ(∇h) ≠ ∫ω(∇f,∇h) for f = {f}, h = {h}"
            )));
        }
        Ok(Problem {
            spec: spec.clone(),
            omega,
            xi_hat,
            xi,
            two_form,
            table,
        })
    }

    /// `K`-entry `−3∫ω(∇f,∇h)` for arbitrary polynomials.
    pub fn scaled_pairing(&self, f: &SpherePoly, h: &SpherePoly) -> Rational {
        omega_pair_integral(&self.table, &self.two_form, f, h) * int(-bookkeeping().pairing_factor)
    }
}

/// Exact matrices of one degree.
#[derive(Clone, Debug)]
pub struct DegreeMatrices {
    pub space: HarmonicSpace,
    pub gram: RatMatrix,
    pub pairing: RatMatrix,
}

/// Builds `G` and `K` on the monomials of degree `l` (where tangential
/// components have at most two terms) and pulls them back to the harmonic
/// basis, `G = BᵀDB`, `K = BᵀMB`.
pub fn assemble_matrices(problem: &Problem, l: u32) -> Result<DegreeMatrices> {
    if l == 0 {
        return Err(Error::Precondition("degree must be at least 1".into()));
    }
    let n = 4;
    let space = harmonic_basis(3, l);
    let monos = MultiIndex::all_of_degree(n, l);
    let grads: Vec<Vec<SpherePoly>> = monos
        .iter()
        .map(|e| {
            let p = SpherePoly::monomial(e.clone(), int(1));
            (0..n).map(|i| tangential_component(&p, i)).collect()
        })
        .collect();
    let t = &problem.table;
    let factor = int(-bookkeeping().pairing_factor);
    let k = monos.len();
    let mut dir = RatMatrix::zeros(k, k);
    let mut pair = RatMatrix::zeros(k, k);
    for r in 0..k {
        for s in r..k {
            let mut d = Rational::zero();
            for (gr, gs) in grads[r].iter().zip(&grads[s]) {
                d += t.integral_of_product(gr, gs);
            }
            dir.set(r, s, d.clone());
            dir.set(s, r, d);
        }
        for s in 0..k {
            let mut acc = Rational::zero();
            for (&(i, j), w) in problem.two_form.components() {
                let a = &grads[r][i] * w;
                let b = &grads[r][j] * w;
                acc += t.integral_of_product(&a, &grads[s][j]) - t.integral_of_product(&b, &grads[s][i]);
            }
            pair.set(r, s, acc * &factor);
        }
    }
    let b = space.coefficient_matrix(&monos);
    let bt = b.transpose();
    let gram = bt.mul(&dir).mul(&b);
    let pairing = bt.mul(&pair).mul(&b);
    Ok(DegreeMatrices { space, gram, pairing })
}

/// Exact outcome of the block-matrix test.
#[derive(Clone, Debug)]
pub struct PsdCertificate {
    pub status: PsdStatus,
    pub pivot_order: Vec<usize>,
    pub pivots: Vec<Rational>,
    /// Kernel vectors split as `(μ, σ)`, integer with unit content.
    pub kernel: Vec<(Vec<Rational>, Vec<Rational>)>,
    /// `(μ, σ)` with `μᵀGμ + σᵀGσ − 2μᵀKσ < 0`, with that value.
    pub witness: Option<(Vec<Rational>, Vec<Rational>, Rational)>,
}

impl PsdCertificate {
    pub fn min_pivot(&self) -> Option<&Rational> {
        self.pivots.iter().min()
    }
}

/// `μᵀGμ + σᵀGσ − 2μᵀKσ`.
pub fn block_form(g: &RatMatrix, k: &RatMatrix, mu: &[Rational], sigma: &[Rational]) -> Rational {
    let ks = k.mul_vec(sigma);
    let cross: Rational = mu.iter().zip(&ks).map(|(a, b)| a * b).sum();
    g.quadratic_form(mu) + g.quadratic_form(sigma) - cross * int(2)
}

pub fn psd_certificate(g: &RatMatrix, k: &RatMatrix) -> Result<PsdCertificate> {
    if !g.is_square() || g.rows() != k.rows() || !k.is_square() {
        return Err(Error::DimensionMismatch {
            expected: g.rows(),
            found: k.rows(),
        });
    }
    if !g.is_symmetric() {
        return Err(Error::Precondition("G is not symmetric".into()));
    }
    if !k.is_antisymmetric() {
        return Err(Error::Precondition("K is not antisymmetric".into()));
    }
    let d = g.rows();
    let block = RatMatrix::block(g, &k.neg(), k, g);
    let dec = psd_decompose(&block)?;
    let split = |v: &Vec<Rational>| (v[..d].to_vec(), v[d..].to_vec());
    let witness = dec.witness.as_ref().map(|w| {
        let (mu, sigma) = split(w);
        let value = block_form(g, k, &mu, &sigma);
        (mu, sigma, value)
    });
    Ok(PsdCertificate {
        status: dec.status,
        pivot_order: dec.pivot_order,
        pivots: dec.pivots,
        kernel: dec.kernel.iter().map(split).collect(),
        witness,
    })
}

/// `|−3∫fξ(∇h)| ≤ 3‖f‖‖∇h‖ ≤ (3/√λ_l)‖∇f‖‖∇h‖`, strict against
/// `‖∇f‖‖∇h‖` iff `9 < λ_l`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TailBound {
    pub l: u32,
    pub m: usize,
    pub factor_squared: u64,
    pub lambda: u64,
    pub strict: bool,
}

pub fn rayleigh_tail_bound(l: u32, m: usize) -> TailBound {
    let f = bookkeeping().pairing_factor as u64;
    let lambda = eigenvalue(m, l);
    TailBound {
        l,
        m,
        factor_squared: f * f,
        lambda,
        strict: f * f < lambda,
    }
}

/// Whether `∫ω(∇b, ∇b′) = 0` for every basis pair across degrees `l ≠ s`.
pub fn cross_degree_check(problem: &Problem, l: u32, s: u32) -> Result<bool> {
    if l == s {
        return Err(Error::Precondition(format!("cross-degree check needs l ≠ s, got {l} twice")));
    }
    let a = harmonic_basis(3, l);
    let b = harmonic_basis(3, s);
    for f in &a.basis {
        for h in &b.basis {
            if !omega_pair_integral(&problem.table, &problem.two_form, f, h).is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Checks `ξ(∇f) ∈ E_{λ_l}` and `⟨f, ξ(∇f)⟩ = 0` on a basis of `E_{λ_l}`.
#[derive(Clone, Debug, Serialize)]
pub struct Theorem11Report {
    pub l: u32,
    pub checked: usize,
    /// Basis elements for which either property fails.
    #[serde(serialize_with = "ser_polys")]
    pub failures: Vec<SpherePoly>,
}

impl Theorem11Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn theorem11_check(problem: &Problem, l: u32) -> Theorem11Report {
    let space = harmonic_basis(3, l);
    let lambda = int(space.eigenvalue as i64);
    let failures = space
        .basis
        .iter()
        .filter(|f| {
            let h = xi_apply(&problem.xi, f);
            let eigen = reduce_on_sphere(&sphere_laplacian(&h)) == h.scale(&lambda);
            !(eigen && problem.table.l2_inner(f, &h).is_zero())
        })
        .cloned()
        .collect();
    Theorem11Report {
        l,
        checked: space.dim(),
        failures,
    }
}

/// Report for one degree, as emitted in the certificate bundle.
#[derive(Clone, Debug, Serialize)]
pub struct DegreeReport {
    pub l: u32,
    pub lambda: u64,
    pub dim: usize,
    #[serde(serialize_with = "ser_polys")]
    pub basis: Vec<SpherePoly>,
    #[serde(serialize_with = "ser_matrix")]
    pub gram: RatMatrix,
    #[serde(serialize_with = "ser_matrix")]
    pub pairing: RatMatrix,
    pub status: PsdStatus,
    pub kernel_dim: usize,
    #[serde(serialize_with = "ser_pairs")]
    pub kernel_basis: Vec<(Vec<Rational>, Vec<Rational>)>,
    pub pivot_order: Vec<usize>,
    #[serde(serialize_with = "ser_vec")]
    pub pivots: Vec<Rational>,
    #[serde(serialize_with = "ser_opt")]
    pub min_pivot: Option<Rational>,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub l: u32,
    #[serde(serialize_with = "ser_vec")]
    pub mu: Vec<Rational>,
    #[serde(serialize_with = "ser_vec")]
    pub sigma: Vec<Rational>,
    /// `‖∇f‖² + ‖∇h‖² + 6∫ω(∇f,∇h)`, negative.
    #[serde(with = "crate::rational::serde_rational")]
    pub value: Rational,
}

pub fn degree_report(problem: &Problem, l: u32) -> Result<DegreeReport> {
    let mats = assemble_matrices(problem, l)?;
    let cert = psd_certificate(&mats.gram, &mats.pairing)?;
    Ok(DegreeReport {
        l,
        lambda: mats.space.eigenvalue,
        dim: mats.space.dim(),
        min_pivot: cert.min_pivot().cloned(),
        witness: cert.witness.map(|(mu, sigma, value)| Witness { l, mu, sigma, value }),
        basis: mats.space.basis,
        gram: mats.gram,
        pairing: mats.pairing,
        status: cert.status,
        kernel_dim: cert.kernel.len(),
        kernel_basis: cert.kernel,
        pivot_order: cert.pivot_order,
        pivots: cert.pivots,
    })
}

/// Equality cases at `l = 1`: `f = Σμ_aφ_a`, `h = Σσ_aφ_a` with `σ = Tμ`.
#[derive(Clone, Debug, Serialize)]
pub struct EqualityFamily {
    pub degree: u32,
    pub description: String,
    /// `T` in `σ = Tμ`, if the kernel is a graph over `μ`.
    #[serde(serialize_with = "ser_opt_matrix")]
    pub sigma_from_mu: Option<RatMatrix>,
    pub relations: Vec<String>,
    #[serde(serialize_with = "ser_pairs")]
    pub kernel_basis: Vec<(Vec<Rational>, Vec<Rational>)>,
}

/// Solves for `T` with `σ = Tμ` on the kernel, when its `μ`-parts are a basis.
pub fn sigma_from_mu(kernel: &[(Vec<Rational>, Vec<Rational>)]) -> Option<RatMatrix> {
    let d = kernel.first()?.0.len();
    if kernel.len() != d {
        return None;
    }
    let mut mu = RatMatrix::zeros(d, d);
    let mut sigma = RatMatrix::zeros(d, d);
    for (c, (m, s)) in kernel.iter().enumerate() {
        for r in 0..d {
            mu.set(r, c, m[r].clone());
            sigma.set(r, c, s[r].clone());
        }
    }
    // Tᵀ solves μᵀ Tᵀ = σᵀ column by column.
    let mt = mu.transpose();
    let st = sigma.transpose();
    let mut t = RatMatrix::zeros(d, d);
    for j in 0..d {
        let col = solve(&mt, &st.column(j)).ok()?;
        for (i, v) in col.into_iter().enumerate() {
            t.set(j, i, v);
        }
    }
    Some(t)
}

fn relation_strings(t: &RatMatrix) -> Vec<String> {
    (0..t.rows())
        .map(|j| {
            let mut rhs = String::new();
            for k in 0..t.cols() {
                let c = t.get(j, k);
                if c.is_zero() {
                    continue;
                }
                let sign = if c.is_negative() { "-" } else if rhs.is_empty() { "" } else { "+" };
                let mag = c.abs();
                let coeff = if mag == int(1) { String::new() } else { format!("{}*", format_rational(&mag)) };
                if !rhs.is_empty() {
                    rhs.push(' ');
                }
                rhs.push_str(&format!("{sign}{coeff}mu{}", k + 1));
            }
            if rhs.is_empty() {
                rhs.push('0');
            }
            format!("sigma{} = {}", j + 1, rhs)
        })
        .collect()
}

pub fn equality_family(report: &DegreeReport) -> EqualityFamily {
    let t = sigma_from_mu(&report.kernel_basis);
    EqualityFamily {
        degree: report.l,
        description: format!(
            "equality in −6∫ω(∇f,∇h) ≤ ‖∇f‖² + ‖∇h‖² for f = Σ mu_a b_a, h = Σ sigma_a b_a over the degree-{} basis",
            report.l
        ),
        relations: t.as_ref().map(relation_strings).unwrap_or_default(),
        sigma_from_mu: t,
        kernel_basis: report.kernel_basis.clone(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossDegree {
    pub l: u32,
    pub s: u32,
    pub zero: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "certified")]
    Certified,
    #[serde(rename = "not_certified")]
    NotCertified,
}

#[derive(Clone, Debug, Serialize)]
pub struct CalibrationData {
    pub spec: CalibrationSpec,
    pub xi_hat: Vec<FormTerm>,
    #[serde(serialize_with = "ser_polys")]
    pub xi: Vec<SpherePoly>,
    pub omega: Vec<TwoFormTerm>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TwoFormTerm {
    pub i: usize,
    pub j: usize,
    pub coeff: Vec<PolyTerm>,
}

/// Self-contained certification record.
#[derive(Clone, Debug, Serialize)]
pub struct CertificateBundle {
    pub normalization: String,
    pub m: usize,
    pub n: usize,
    pub calibration: CalibrationData,
    pub l_exact: u32,
    pub degrees: Vec<DegreeReport>,
    pub tail: TailBound,
    pub cross_degree: Vec<CrossDegree>,
    pub cross_degree_zero: bool,
    pub theorem11: Vec<Theorem11Report>,
    pub constants: Bookkeeping,
    pub equality_family: Option<EqualityFamily>,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
}

impl CertificateBundle {
    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }
}

fn calibration_data(problem: &Problem) -> CalibrationData {
    CalibrationData {
        spec: problem.spec.clone(),
        xi_hat: CalibrationSpec::from_form(1, &problem.xi_hat).terms,
        xi: problem.xi.components().to_vec(),
        omega: problem
            .two_form
            .components()
            .iter()
            .map(|(&(i, j), w)| TwoFormTerm {
                i: i + 1,
                j: j + 1,
                coeff: w.to_json_terms(),
            })
            .collect(),
    }
}

/// Runs every check for degrees `1..=l_exact`, the tail bound at `l = 3`,
/// pairwise cross-degree vanishing and the eigenspace-preservation check.
/// Degree reports are computed on up to `jobs` threads.
pub fn certify_stability(problem: &Problem, l_exact: u32, jobs: usize) -> Result<CertificateBundle> {
    if l_exact < 2 {
        return Err(Error::Precondition(format!("L_exact must be at least 2, got {l_exact}")));
    }
    problem.table.warm_up(2 * l_exact + 2);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Unsupported(e.to_string()))?;
    let degrees: Vec<DegreeReport> = pool.install(|| {
        (1..=l_exact)
            .into_par_iter()
            .map(|l| degree_report(problem, l))
            .collect::<Result<Vec<_>>>()
    })?;

    let mut cross_degree = Vec::new();
    for l in 1..=l_exact {
        for s in l + 1..=l_exact {
            cross_degree.push(CrossDegree {
                l,
                s,
                zero: cross_degree_check(problem, l, s)?,
            });
        }
    }
    let cross_degree_zero = cross_degree.iter().all(|c| c.zero);
    let theorem11: Vec<Theorem11Report> = (1..=l_exact).map(|l| theorem11_check(problem, l)).collect();
    let tail = rayleigh_tail_bound(3, 3);

    let witness = degrees.iter().find_map(|d| d.witness.clone());
    let all_psd = degrees.iter().all(|d| d.status != PsdStatus::NotPsd);
    let certified = all_psd && tail.strict && cross_degree_zero && theorem11.iter().all(Theorem11Report::passed);
    let equality_family = degrees
        .first()
        .filter(|d| d.status == PsdStatus::PsdWithKernel)
        .map(equality_family);

    Ok(CertificateBundle {
        normalization: NORMALIZATION.to_string(),
        m: problem.spec.m,
        n: problem.spec.n,
        calibration: calibration_data(problem),
        l_exact,
        degrees,
        tail,
        cross_degree,
        cross_degree_zero,
        theorem11,
        constants: bookkeeping(),
        equality_family,
        verdict: if certified { Verdict::Certified } else { Verdict::NotCertified },
        witness,
    })
}

fn ser_vec<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(format_rational))
}

fn ser_opt<S: Serializer>(v: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(r) => s.serialize_some(&format_rational(r)),
        None => s.serialize_none(),
    }
}

fn ser_matrix<S: Serializer>(m: &RatMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    m.to_strings().serialize(s)
}

fn ser_opt_matrix<S: Serializer>(m: &Option<RatMatrix>, s: S) -> std::result::Result<S::Ok, S::Error> {
    m.as_ref().map(RatMatrix::to_strings).serialize(s)
}

fn ser_polys<S: Serializer>(v: &[SpherePoly], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(SpherePoly::to_json_terms))
}

#[derive(Serialize)]
struct PairOut {
    mu: Vec<String>,
    sigma: Vec<String>,
}

fn ser_pairs<S: Serializer>(v: &[(Vec<Rational>, Vec<Rational>)], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|(m, g)| PairOut {
        mu: m.iter().map(format_rational).collect(),
        sigma: g.iter().map(format_rational).collect(),
    }))
}
