//! Eigenspaces `E_{λ_l}` of the sphere Laplacian and the spectral
//! operators built on them.
//!
//! Sign convention: the Laplacian has non-negative spectrum, acting on the
//! degree-`l` harmonic component by `λ_l = l(l+m−1)`.

use crate::error::{Error, Result};
use crate::linalg::{nullspace, RatMatrix};
use crate::polyring::{decompose_homogeneous, euclidean_laplacian, harmonic_expansion, MultiIndex, SpherePoly};
use crate::rational::{int, Rational};

pub fn eigenvalue(m: usize, l: u32) -> u64 {
    l as u64 * (l as u64 + m as u64 - 1)
}

fn binomial(n: i64, k: i64) -> i64 {
    if k < 0 || n < k {
        return 0;
    }
    let mut acc: i64 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `m_l = C(m+l, m) − C(m+l−2, m)`.
pub fn eigenspace_dim(m: usize, l: u32) -> usize {
    let (m, l) = (m as i64, l as i64);
    (binomial(m + l, m) - binomial(m + l - 2, m)) as usize
}

/// Exact basis of harmonic homogeneous polynomials of degree `l` on `S^m`.
#[derive(Clone, Debug)]
pub struct HarmonicSpace {
    pub m: usize,
    pub l: u32,
    pub eigenvalue: u64,
    pub basis: Vec<SpherePoly>,
}

impl HarmonicSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Combination `Σ coeffs[a]·basis[a]`.
    pub fn combine(&self, coeffs: &[Rational]) -> SpherePoly {
        assert_eq!(coeffs.len(), self.basis.len());
        self.basis
            .iter()
            .zip(coeffs)
            .fold(SpherePoly::zero(self.m + 1), |acc, (b, c)| &acc + &b.scale(c))
    }

    /// Coefficient matrix `B` with `basis[a] = Σ_r B[r][a] φ^{monomials[r]}`.
    pub fn coefficient_matrix(&self, monomials: &[MultiIndex]) -> RatMatrix {
        let mut b = RatMatrix::zeros(monomials.len(), self.basis.len());
        for (a, p) in self.basis.iter().enumerate() {
            for (r, e) in monomials.iter().enumerate() {
                b.set(r, a, p.coeff(e));
            }
        }
        b
    }
}

/// Kernel of `Δ⁰` on homogeneous degree-`l` polynomials in `m+1` variables,
/// computed by fraction-free elimination on its integer matrix.
pub fn harmonic_basis(m: usize, l: u32) -> HarmonicSpace {
    assert!(m >= 1, "sphere dimension must be at least 1");
    let n = m + 1;
    let cols = MultiIndex::all_of_degree(n, l);
    let rows = if l >= 2 { MultiIndex::all_of_degree(n, l - 2) } else { Vec::new() };
    let mut lap = RatMatrix::zeros(rows.len(), cols.len());
    for (c, e) in cols.iter().enumerate() {
        let image = euclidean_laplacian(&SpherePoly::monomial(e.clone(), int(1)));
        for (r, f) in rows.iter().enumerate() {
            let v = image.coeff(f);
            lap.set(r, c, v);
        }
    }
    let basis = nullspace(&lap)
        .into_iter()
        .map(|v| {
            let terms = cols.iter().cloned().zip(v);
            SpherePoly::from_terms(n, terms).expect("monomials have the right length")
        })
        .collect();
    HarmonicSpace {
        m,
        l,
        eigenvalue: eigenvalue(m, l),
        basis,
    }
}

/// Writes homogeneous `p` of degree `l` as `Σ_k |x|^{l−k} H_k`, returning the
/// nonzero `(k, H_k)` in decreasing `k`.
pub fn harmonic_decompose(p: &SpherePoly) -> Result<Vec<(u32, SpherePoly)>> {
    if !p.is_homogeneous() {
        let degs = p.homogeneous_components().into_keys().collect();
        return Err(Error::NotHomogeneous(degs));
    }
    match p.degree() {
        None => Ok(Vec::new()),
        Some(d) => Ok(decompose_homogeneous(p, d)),
    }
}

/// `Σ_l λ_l H_l` over the harmonic expansion of `f`.
pub fn sphere_laplacian(f: &SpherePoly) -> SpherePoly {
    let m = f.nvars() - 1;
    harmonic_expansion(f)
        .into_iter()
        .fold(SpherePoly::zero(f.nvars()), |acc, (k, h)| {
            &acc + &h.scale(&int(eigenvalue(m, k) as i64))
        })
}

/// Degree-`l` harmonic component of `f`.
pub fn eigen_project(f: &SpherePoly, l: u32) -> SpherePoly {
    harmonic_expansion(f)
        .remove(&l)
        .unwrap_or_else(|| SpherePoly::zero(f.nvars()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::MomentTable;
    use crate::polyring::{eq_on_sphere, reduce_on_sphere};
    use crate::rational::rat;
    use proptest::prelude::*;

    fn x(i: usize) -> SpherePoly {
        SpherePoly::var(4, i)
    }

    #[test]
    fn dimensions_on_s3() {
        let b0 = harmonic_basis(3, 0);
        assert_eq!(b0.dim(), 1);
        assert_eq!(b0.basis[0], SpherePoly::one(4));
        let b1 = harmonic_basis(3, 1);
        assert_eq!(b1.basis, (0..4).map(x).collect::<Vec<_>>());
        assert_eq!(harmonic_basis(3, 2).dim(), 9);
        assert_eq!(harmonic_basis(3, 3).dim(), 16);
        assert_eq!(eigenspace_dim(3, 3), 16);
    }

    #[test]
    fn dimension_formula_matches_kernel_rank() {
        for m in 1..=4 {
            for l in 0..=6 {
                let h = harmonic_basis(m, l);
                assert_eq!(h.dim(), eigenspace_dim(m, l), "m={m} l={l}");
                for b in &h.basis {
                    assert!(euclidean_laplacian(b).is_zero());
                    assert!(b.is_homogeneous());
                }
            }
        }
    }

    #[test]
    fn basis_is_independent() {
        for l in 0..=5 {
            let h = harmonic_basis(3, l);
            let monos = MultiIndex::all_of_degree(4, l);
            let b = h.coefficient_matrix(&monos);
            assert!(nullspace(&b).is_empty(), "l={l}");
        }
    }

    #[test]
    fn decompose_examples() {
        assert_eq!(harmonic_decompose(&x(0)).unwrap(), vec![(1, x(0))]);
        let sq = &x(0) * &x(0);
        let d = harmonic_decompose(&sq).unwrap();
        let h2 = &sq - &SpherePoly::norm_squared(4).scale(&rat(1, 4));
        assert_eq!(d, vec![(2, h2), (0, SpherePoly::constant(4, rat(1, 4)))]);
        assert_eq!(
            harmonic_decompose(&SpherePoly::norm_squared(4)).unwrap(),
            vec![(0, SpherePoly::one(4))]
        );
        assert!(matches!(
            harmonic_decompose(&(&sq + &x(1))),
            Err(Error::NotHomogeneous(_))
        ));
    }

    #[test]
    fn laplacian_examples() {
        assert_eq!(sphere_laplacian(&x(0)), x(0).scale(&int(3)));
        assert!(sphere_laplacian(&SpherePoly::constant(4, rat(5, 2))).is_zero());
        let sq = &x(0) * &x(0);
        let want = &sq.scale(&int(8)) - &SpherePoly::constant(4, int(2));
        assert!(eq_on_sphere(&sphere_laplacian(&sq), &want));
    }

    #[test]
    fn projection_examples() {
        let sq = &x(0) * &x(0);
        assert_eq!(eigen_project(&sq, 0), SpherePoly::constant(4, rat(1, 4)));
        assert_eq!(eigen_project(&x(0), 1), x(0));
        assert!(eigen_project(&x(0), 2).is_zero());
    }

    #[test]
    fn basis_elements_are_eigenfunctions() {
        for l in 0..=5 {
            let h = harmonic_basis(3, l);
            for b in &h.basis {
                assert_eq!(sphere_laplacian(b), b.scale(&int(h.eigenvalue as i64)));
            }
        }
    }

    #[test]
    fn gram_identity_across_degrees() {
        let t = MomentTable::new(3);
        let spaces: Vec<HarmonicSpace> = (0..=4).map(|l| harmonic_basis(3, l)).collect();
        for a in &spaces {
            for b in &spaces {
                for f in &a.basis {
                    for h in &b.basis {
                        let l2 = t.l2_inner(f, h);
                        let dir = t.dirichlet_inner(f, h);
                        if a.l == b.l {
                            assert_eq!(dir, l2 * int(a.eigenvalue as i64));
                        } else {
                            assert_eq!(l2, int(0));
                            assert_eq!(dir, int(0));
                        }
                    }
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn decomposition_recomposes(
            l in 0u32..=6,
            coeffs in prop::collection::vec(-5i64..=5, 5),
            picks in prop::collection::vec(0usize..1000, 5),
        ) {
            let monos = MultiIndex::all_of_degree(4, l);
            let mut p = SpherePoly::zero(4);
            for (c, k) in coeffs.iter().zip(&picks) {
                p.add_term(monos[k % monos.len()].clone(), int(*c));
            }
            let parts = harmonic_decompose(&p).unwrap();
            // ambient identity p = Σ |x|^{l−k} H_k
            let r2 = SpherePoly::norm_squared(4);
            let mut ambient = SpherePoly::zero(4);
            let mut on_sphere = SpherePoly::zero(4);
            for (k, h) in &parts {
                prop_assert_eq!((l - k) % 2, 0);
                ambient = &ambient + &(&r2.pow((l - k) / 2) * h);
                on_sphere = &on_sphere + &reduce_on_sphere(h);
            }
            prop_assert_eq!(ambient, p.clone());
            prop_assert_eq!(on_sphere, reduce_on_sphere(&p));
        }

        #[test]
        fn integration_by_parts(
            coeffs in prop::collection::vec(-4i64..=4, 8),
            exps in prop::collection::vec(prop::collection::vec(0u32..=3, 4), 8),
        ) {
            let t = MomentTable::new(3);
            let mk = |cs: &[i64], es: &[Vec<u32>]| {
                let mut p = SpherePoly::zero(4);
                for (c, e) in cs.iter().zip(es) {
                    p.add_term(MultiIndex::new(e.clone()), int(*c));
                }
                p
            };
            let f = mk(&coeffs[..4], &exps[..4]);
            let h = mk(&coeffs[4..], &exps[4..]);
            prop_assert_eq!(t.dirichlet_inner(&f, &h), t.l2_inner(&f, &sphere_laplacian(&h)));
        }
    }
}
