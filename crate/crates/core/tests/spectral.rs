use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spherecert::certifier::{certify_stability, degree_report, rayleigh_tail_bound, theorem11_check, Problem};
use spherecert::forms::{interior_product, validate_star_rule, ConstantForm};
use spherecert::harmonics::{eigenspace_dim, harmonic_basis};
use spherecert::rational::int;
use spherecert::{PsdStatus, Verdict};

#[test]
fn exact_checks_agree_with_the_tail_bound() {
    let p = Problem::kahler();
    for l in 3..=8 {
        let r = degree_report(&p, l).unwrap();
        assert_eq!(r.dim, eigenspace_dim(3, l));
        assert!(rayleigh_tail_bound(l, 3).strict);
        assert_eq!(r.status, PsdStatus::PositiveDefinite, "l={l}");
    }
}

#[test]
fn eigenspaces_are_preserved() {
    let p = Problem::kahler();
    for l in 0..=4 {
        let r = theorem11_check(&p, l);
        assert_eq!(r.checked, harmonic_basis(3, l).dim());
        assert!(r.passed(), "l={l}");
    }
}

#[test]
fn star_rule_on_s3_at_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let kahler = interior_product(&ConstantForm::kahler3(), 5, 6).unwrap();
    assert_eq!(validate_star_rule(&kahler, 3, 25, &mut rng).unwrap(), None);
    for _ in 0..5 {
        let mut f = ConstantForm::zero(4, 2);
        for i in 1..=4 {
            for j in i + 1..=4 {
                f.add_term(vec![i, j], int(rng.gen_range(-4..=4))).unwrap();
            }
        }
        assert_eq!(validate_star_rule(&f, 3, 20, &mut rng).unwrap(), None);
    }
}

#[test]
fn certification_to_degree_four() {
    let p = Problem::kahler();
    let b = certify_stability(&p, 4, 4).unwrap();
    assert_eq!(b.verdict, Verdict::Certified);
    let statuses: Vec<_> = b.degrees.iter().map(|d| d.status).collect();
    assert_eq!(
        statuses,
        vec![
            PsdStatus::PsdWithKernel,
            PsdStatus::PositiveDefinite,
            PsdStatus::PositiveDefinite,
            PsdStatus::PositiveDefinite
        ]
    );
    assert!(b.cross_degree_zero);
    assert_eq!(b.cross_degree.len(), 6);
}
