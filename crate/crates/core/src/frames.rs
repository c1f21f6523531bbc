//! Rational orthonormal frames.
//!
//! The Cayley transform `Q = (I − A)(I + A)^{-1}` of a rational skew matrix
//! `A` is a rational rotation (`det Q = 1`). Its first column is a rational
//! point `x` on the unit sphere and the remaining columns form an
//! orthonormal tangent frame at `x` with `(x, e_1, ..., e_m)` positively
//! oriented, so pointwise checks on the sphere can be run without roundoff.

use rand::Rng;

use crate::linalg::{solve, RatMatrix};
use crate::rational::{int, Rational};

pub fn cayley(skew: &RatMatrix) -> RatMatrix {
    assert!(skew.is_antisymmetric(), "Cayley transform needs a skew matrix");
    let n = skew.rows();
    let id = RatMatrix::identity(n);
    let plus = id.add(skew);
    let minus = id.add(&skew.neg());
    // Q = (I − A)(I + A)^{-1}; solve column by column for (I + A)^{-1}.
    let mut inv = RatMatrix::zeros(n, n);
    for j in 0..n {
        let e: Vec<Rational> = (0..n).map(|i| if i == j { int(1) } else { int(0) }).collect();
        let col = solve(&plus, &e).expect("I + A is invertible for skew A");
        for (i, v) in col.into_iter().enumerate() {
            inv.set(i, j, v);
        }
    }
    minus.mul(&inv)
}

pub fn random_rotation<R: Rng>(n: usize, rng: &mut R) -> RatMatrix {
    let mut a = RatMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v = int(rng.gen_range(-3..=3));
            a.set(i, j, v.clone());
            a.set(j, i, -v);
        }
    }
    cayley(&a)
}

/// Rational point on `S^{nvars−1}` together with an oriented orthonormal
/// tangent frame.
pub struct SphereFrame {
    pub point: Vec<Rational>,
    pub tangent: Vec<Vec<Rational>>,
}

pub fn random_sphere_frame<R: Rng>(nvars: usize, rng: &mut R) -> SphereFrame {
    let q = random_rotation(nvars, rng);
    SphereFrame {
        point: q.column(0),
        tangent: (1..nvars).map(|j| q.column(j)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dot;
    use num_traits::{One, Zero};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn det(m: &RatMatrix) -> Rational {
        // Laplace expansion is fine at these sizes.
        let n = m.rows();
        if n == 1 {
            return m.get(0, 0).clone();
        }
        let mut acc = Rational::zero();
        for j in 0..n {
            let mut minor = RatMatrix::zeros(n - 1, n - 1);
            for i in 1..n {
                let mut c = 0;
                for k in 0..n {
                    if k != j {
                        minor.set(i - 1, c, m.get(i, k).clone());
                        c += 1;
                    }
                }
            }
            let t = m.get(0, j) * det(&minor);
            if j % 2 == 0 {
                acc += t
            } else {
                acc -= t
            }
        }
        acc
    }

    #[test]
    fn rotations_are_orthogonal_and_oriented() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=5 {
            for _ in 0..5 {
                let q = random_rotation(n, &mut rng);
                assert_eq!(q.transpose().mul(&q), RatMatrix::identity(n));
                assert!(det(&q).is_one());
            }
        }
    }

    #[test]
    fn frames_are_tangent() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = random_sphere_frame(4, &mut rng);
        assert!(dot(&f.point, &f.point).is_one());
        for e in &f.tangent {
            assert!(dot(e, &f.point).is_zero());
        }
    }
}
