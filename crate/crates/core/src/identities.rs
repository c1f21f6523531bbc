//! Seeded randomized checks of the exact identities behind the certifier:
//! the weak co-primitive relation `∫fξ(∇h) = ∫ω(∇f,∇h) = −∫hξ(∇f)` and the
//! commutation `Δ(ξ(∇f)) = ξ(∇Δf)`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::certifier::Problem;
use crate::forms::{omega_pair_integral, xi_apply};
use crate::harmonics::sphere_laplacian;
use crate::polyring::{MultiIndex, PolyTerm, SpherePoly};
use crate::rational::int;

/// Random polynomial with up to `max_terms` monomials drawn uniformly from
/// all exponents of total degree `≤ max_degree`, integer coefficients in
/// `−5..=5`.
pub fn random_poly<R: Rng>(rng: &mut R, nvars: usize, max_degree: u32, max_terms: usize) -> SpherePoly {
    let monos: Vec<MultiIndex> = (0..=max_degree)
        .flat_map(|d| MultiIndex::all_of_degree(nvars, d))
        .collect();
    let mut p = SpherePoly::zero(nvars);
    let terms = rng.gen_range(1..=max_terms.max(1));
    for _ in 0..terms {
        let e = monos[rng.gen_range(0..monos.len())].clone();
        let c = rng.gen_range(1..=5) * if rng.gen_bool(0.5) { 1 } else { -1 };
        p.add_term(e, int(c));
    }
    p
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub trial: usize,
    pub identity: String,
    pub f: Vec<PolyTerm>,
    pub h: Vec<PolyTerm>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub seed: u64,
    pub trials: usize,
    pub max_degree: u32,
    pub coprimitive_checked: usize,
    pub commutation_checked: usize,
    pub counterexamples: Vec<Counterexample>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// `∫fξ(∇h) = ∫ω(∇f,∇h) = −∫hξ(∇f)`.
pub fn coprimitive_holds(problem: &Problem, f: &SpherePoly, h: &SpherePoly) -> bool {
    let t = &problem.table;
    let a = t.integral_of_product(f, &xi_apply(&problem.xi, h));
    let b = omega_pair_integral(t, &problem.two_form, f, h);
    let c = -t.integral_of_product(h, &xi_apply(&problem.xi, f));
    a == b && b == c
}

/// `Δ(ξ(∇f)) = ξ(∇Δf)` on the sphere.
pub fn commutation_holds(problem: &Problem, f: &SpherePoly) -> bool {
    let lhs = sphere_laplacian(&xi_apply(&problem.xi, f));
    let rhs = xi_apply(&problem.xi, &sphere_laplacian(f));
    lhs == rhs
}

pub fn verify_identities(problem: &Problem, seed: u64, trials: usize, max_degree: u32) -> IdentityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counterexamples = Vec::new();
    for trial in 0..trials {
        let f = random_poly(&mut rng, 4, max_degree, 4);
        let h = random_poly(&mut rng, 4, max_degree, 4);
        if !coprimitive_holds(problem, &f, &h) {
            counterexamples.push(Counterexample {
                trial,
                identity: "int f xi(grad h) = int omega(grad f, grad h) = -int h xi(grad f)".into(),
                f: f.to_json_terms(),
                h: h.to_json_terms(),
            });
        }
        for g in [&f, &h] {
            if !commutation_holds(problem, g) {
                counterexamples.push(Counterexample {
                    trial,
                    identity: "Delta xi(grad f) = xi(grad Delta f)".into(),
                    f: g.to_json_terms(),
                    h: Vec::new(),
                });
            }
        }
    }
    IdentityReport {
        seed,
        trials,
        max_degree,
        coprimitive_checked: trials,
        commutation_checked: 2 * trials,
        counterexamples,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{coprimitive_defect, CalibrationSpec, ConstantForm};

    #[test]
    fn random_polys_respect_degree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let p = random_poly(&mut rng, 4, 3, 4);
            assert!(p.degree().is_none_or(|d| d <= 3));
            assert!(p.num_terms() <= 4);
        }
    }

    #[test]
    fn seeded_runs_are_reproducible() {
        let p = Problem::kahler();
        let a = serde_json::to_string(&verify_identities(&p, 7, 5, 3)).unwrap();
        let b = serde_json::to_string(&verify_identities(&p, 7, 5, 3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn identities_hold_for_kahler() {
        let p = Problem::kahler();
        let r = verify_identities(&p, 11, 10, 4);
        assert!(r.passed(), "{:?}", r.counterexamples);
    }

    #[test]
    fn identities_are_linear_in_the_calibration() {
        let form = ConstantForm::kahler3().scale(&int(-3));
        let p = Problem::from_spec(&CalibrationSpec::from_form(3, &form)).unwrap();
        assert!(verify_identities(&p, 1, 5, 3).passed());
    }

    #[test]
    fn monomial_coprimitive_up_to_degree_five() {
        let p = Problem::kahler();
        assert_eq!(coprimitive_defect(&p.table, &p.xi, &p.two_form, 5), None);
    }
}
