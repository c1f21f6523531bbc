//! Exact dense linear algebra over the rationals.
//!
//! Elimination runs on integer matrices with Bareiss' fraction-free update
//! `a_ij ← (p·a_ij − a_ik·a_kj) / p_prev`, where every division is exact.
//! Signs of the resulting pivots are therefore exact, which is all the PSD
//! certificate depends on.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_rational, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Malformed("ragged matrix rows".into()));
        }
        Ok(RatMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut t = RatMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn scale(&self, c: &Rational) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn neg(&self) -> RatMatrix {
        self.scale(&-Rational::one())
    }

    pub fn add(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = RatMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| a * b)
                    .fold(Rational::zero(), |acc, t| acc + t)
            })
            .collect()
    }

    /// `vᵀ A v`.
    pub fn quadratic_form(&self, v: &[Rational]) -> Rational {
        dot(v, &self.mul_vec(v))
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..=i).all(|j| self.get(i, j) == &-self.get(j, i)))
    }

    /// `[[a, b], [c, d]]`.
    pub fn block(a: &RatMatrix, b: &RatMatrix, c: &RatMatrix, d: &RatMatrix) -> RatMatrix {
        assert_eq!(a.rows, b.rows);
        assert_eq!(c.rows, d.rows);
        assert_eq!(a.cols, c.cols);
        assert_eq!(b.cols, d.cols);
        let mut out = RatMatrix::zeros(a.rows + c.rows, a.cols + b.cols);
        for (src, r0, c0) in [(a, 0, 0), (b, 0, a.cols), (c, a.rows, 0), (d, a.rows, a.cols)] {
            for i in 0..src.rows {
                for j in 0..src.cols {
                    out.set(r0 + i, c0 + j, src.get(i, j).clone());
                }
            }
        }
        out
    }

    /// Rows as `"p/q"` strings, for reports.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(format_rational).collect())
            .collect()
    }

    /// Positive common denominator `s` and the integer matrix `s·A`.
    fn to_integer(&self) -> (BigInt, Vec<Vec<BigInt>>) {
        let mut s = BigInt::one();
        for x in &self.data {
            s = s.lcm(x.denom());
        }
        let m = (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| (x * &s).to_integer()).collect())
            .collect();
        (s, m)
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.to_strings() {
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| x * y)
        .fold(Rational::zero(), |acc, t| acc + t)
}

/// Exact determinant of a square matrix (fraction-free elimination).
pub fn determinant(a: &RatMatrix) -> Rational {
    assert!(a.is_square());
    let n = a.rows;
    if n == 0 {
        return Rational::one();
    }
    let (s, mut m) = a.to_integer();
    let mut prev = BigInt::one();
    let mut sign = BigInt::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            m.swap(p, c);
            sign = -sign;
        }
        let piv = m[c][c].clone();
        for i in c + 1..n {
            for j in c + 1..n {
                let v = (&piv * &m[i][j] - &m[i][c] * &m[c][j]) / &prev;
                m[i][j] = v;
            }
            m[i][c] = BigInt::zero();
        }
        prev = piv;
    }
    BigRational::new(sign * &m[n - 1][n - 1], num_traits::pow(s, n))
}

/// Basis of the right kernel `{v : A v = 0}`, one vector per free column of
/// the echelon form. Each vector has its free coordinate positive and is
/// scaled to integer entries with unit content.
pub fn nullspace(a: &RatMatrix) -> Vec<Vec<Rational>> {
    let (_, mut m) = a.to_integer();
    let rows = a.rows;
    let cols = a.cols;
    let mut pivot_cols = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let piv = m[r][c].clone();
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = (&piv * &m[i][j] - &m[i][c] * &m[r][j]) / &prev;
                m[i][j] = v;
            }
            m[i][c] = BigInt::zero();
        }
        // Columns left of `c` in rows below `r` are already zero.
        prev = piv;
        pivot_cols.push(c);
        r += 1;
    }
    let rank = pivot_cols.len();
    let free: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for k in (0..rank).rev() {
                let pc = pivot_cols[k];
                let mut acc = Rational::zero();
                for j in pc + 1..cols {
                    if !m[k][j].is_zero() && !v[j].is_zero() {
                        acc += BigRational::from_integer(m[k][j].clone()) * &v[j];
                    }
                }
                v[pc] = -acc / BigRational::from_integer(m[k][pc].clone());
            }
            crate::rational::primitive_integer_vector(&v)
                .into_iter()
                .map(BigRational::from_integer)
                .collect()
        })
        .collect()
}

/// Solves `A x = b` for square invertible `A` by exact Gauss–Jordan.
pub fn solve(a: &RatMatrix, b: &[Rational]) -> Result<Vec<Rational>> {
    if !a.is_square() || a.rows != b.len() {
        return Err(Error::Precondition("solve needs a square system".into()));
    }
    let n = a.rows;
    let mut m: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut row = a.row(i).to_vec();
            row.push(b[i].clone());
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n)
            .find(|&i| !m[i][c].is_zero())
            .ok_or_else(|| Error::Precondition("singular system".into()))?;
        m.swap(c, p);
        let inv = m[c][c].recip();
        for j in c..=n {
            m[c][j] = &m[c][j] * &inv;
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..=n {
                    let t = &f * &m[c][j];
                    m[i][j] -= t;
                }
            }
        }
    }
    Ok(m.into_iter().map(|row| row[n].clone()).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PsdStatus {
    #[serde(rename = "positive_definite")]
    PositiveDefinite,
    #[serde(rename = "PSD_with_kernel")]
    PsdWithKernel,
    #[serde(rename = "NOT_PSD")]
    NotPsd,
}

/// Outcome of the symmetric fraction-free elimination.
#[derive(Clone, Debug)]
pub struct PsdDecomposition {
    pub status: PsdStatus,
    /// Positions eliminated, in order.
    pub pivot_order: Vec<usize>,
    /// `LDLᵀ` pivots `d_k / d_{k−1}` on the original scale, all positive.
    pub pivots: Vec<Rational>,
    /// Exact kernel basis (integer coordinates, unit content) when PSD.
    pub kernel: Vec<Vec<Rational>>,
    /// Vector `x` with `xᵀ A x < 0` when not PSD.
    pub witness: Option<Vec<Rational>>,
}

impl PsdDecomposition {
    pub fn min_pivot(&self) -> Option<&Rational> {
        self.pivots.iter().min()
    }
}

/// Decides positive semidefiniteness of a symmetric rational matrix by
/// symmetric Bareiss elimination with diagonal pivoting.
///
/// Positive diagonal entries of the Schur complement are eliminated one at a
/// time. When none remain, a negative diagonal entry or a nonzero
/// off-diagonal entry between two zero diagonals yields a witness; otherwise
/// the complement vanishes and its coordinates span the kernel.
pub fn psd_decompose(a: &RatMatrix) -> Result<PsdDecomposition> {
    if !a.is_symmetric() {
        return Err(Error::Precondition("matrix is not symmetric".into()));
    }
    let n = a.rows;
    let (scale, mut m) = a.to_integer();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut order = Vec::new();
    let mut minors: Vec<BigInt> = Vec::new();
    let mut prev = BigInt::one();

    while let Some(pos) = remaining.iter().position(|&i| m[i][i].is_positive()) {
        let r = remaining.remove(pos);
        let piv = m[r][r].clone();
        for &i in &remaining {
            for &j in &remaining {
                if j < i {
                    continue;
                }
                let v = (&piv * &m[i][j] - &m[i][r] * &m[r][j]) / &prev;
                m[i][j] = v.clone();
                m[j][i] = v;
            }
        }
        prev = piv.clone();
        minors.push(piv);
        order.push(r);
    }

    let mut pivots = Vec::with_capacity(minors.len());
    let mut last = BigInt::one();
    for d in &minors {
        pivots.push(BigRational::new(d.clone(), &last * &scale));
        last = d.clone();
    }

    // Direction z on the remaining coordinates with zᵀ S z < 0, if any.
    let mut negative: Option<Vec<(usize, Rational)>> = remaining
        .iter()
        .find(|&&i| m[i][i].is_negative())
        .map(|&i| vec![(i, Rational::one())]);
    if negative.is_none() {
        'outer: for (p, &i) in remaining.iter().enumerate() {
            for &j in &remaining[p + 1..] {
                if !m[i][j].is_zero() {
                    let s = if m[i][j].is_positive() { -Rational::one() } else { Rational::one() };
                    negative = Some(vec![(i, Rational::one()), (j, s)]);
                    break 'outer;
                }
            }
        }
    }

    if let Some(z) = negative {
        let x = lift(a, &order, &z)?;
        debug_assert!(a.quadratic_form(&x).is_negative());
        return Ok(PsdDecomposition {
            status: PsdStatus::NotPsd,
            pivot_order: order,
            pivots,
            kernel: Vec::new(),
            witness: Some(normalize(&x)),
        });
    }

    let kernel = remaining
        .iter()
        .map(|&r| lift(a, &order, &[(r, Rational::one())]).map(|x| normalize(&x)))
        .collect::<Result<Vec<_>>>()?;
    let status = if kernel.is_empty() {
        PsdStatus::PositiveDefinite
    } else {
        PsdStatus::PsdWithKernel
    };
    Ok(PsdDecomposition {
        status,
        pivot_order: order,
        pivots,
        kernel,
        witness: None,
    })
}

/// Extends `z` (given on non-pivot coordinates) to the full vector minimising
/// the quadratic form over the pivot coordinates: `A_PP x_P = −A_PR z`.
fn lift(a: &RatMatrix, pivots: &[usize], z: &[(usize, Rational)]) -> Result<Vec<Rational>> {
    let n = a.rows;
    let mut x = vec![Rational::zero(); n];
    for (i, v) in z {
        x[*i] = v.clone();
    }
    if pivots.is_empty() {
        return Ok(x);
    }
    let k = pivots.len();
    let mut app = RatMatrix::zeros(k, k);
    for (p, &i) in pivots.iter().enumerate() {
        for (q, &j) in pivots.iter().enumerate() {
            app.set(p, q, a.get(i, j).clone());
        }
    }
    let rhs: Vec<Rational> = pivots
        .iter()
        .map(|&i| {
            -z.iter()
                .map(|(j, v)| a.get(i, *j) * v)
                .fold(Rational::zero(), |acc, t| acc + t)
        })
        .collect();
    let xp = solve(&app, &rhs)?;
    for (p, &i) in pivots.iter().enumerate() {
        x[i] = xp[p].clone();
    }
    Ok(x)
}

fn normalize(x: &[Rational]) -> Vec<Rational> {
    crate::rational::primitive_integer_vector(x)
        .into_iter()
        .map(BigRational::from_integer)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect())
            .unwrap()
    }

    #[test]
    fn nullspace_of_laplacian_row() {
        // Δ⁰ on quadratics in two variables: [2, 0, 2]
        let a = m(&[&[2, 0, 2]]);
        let ns = nullspace(&a);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(a.mul_vec(v).iter().all(Zero::is_zero));
        }
        assert_eq!(ns[0], vec![int(0), int(1), int(0)]);
        assert_eq!(ns[1], vec![int(-1), int(0), int(1)]);
    }

    #[test]
    fn nullspace_full_rank_and_empty() {
        assert!(nullspace(&RatMatrix::identity(3)).is_empty());
        let z = RatMatrix::zeros(0, 3);
        assert_eq!(nullspace(&z).len(), 3);
    }

    #[test]
    fn determinants() {
        assert_eq!(determinant(&m(&[&[2, 1], &[1, 3]])), int(5));
        assert_eq!(determinant(&m(&[&[0, 1], &[1, 0]])), int(-1));
        assert_eq!(determinant(&m(&[&[1, 2], &[2, 4]])), int(0));
        assert_eq!(determinant(&RatMatrix::identity(3).scale(&rat(1, 2))), rat(1, 8));
    }

    #[test]
    fn solve_small_system() {
        let a = m(&[&[2, 1], &[1, 3]]);
        let x = solve(&a, &[int(3), int(5)]).unwrap();
        assert_eq!(x, vec![rat(4, 5), rat(7, 5)]);
        assert!(solve(&m(&[&[1, 1], &[1, 1]]), &[int(1), int(1)]).is_err());
    }

    #[test]
    fn identity_is_positive_definite() {
        let d = psd_decompose(&RatMatrix::identity(4)).unwrap();
        assert_eq!(d.status, PsdStatus::PositiveDefinite);
        assert!(d.kernel.is_empty());
        assert_eq!(d.min_pivot(), Some(&int(1)));
    }

    #[test]
    fn rank_one_has_kernel() {
        let a = m(&[&[1, 1], &[1, 1]]);
        let d = psd_decompose(&a).unwrap();
        assert_eq!(d.status, PsdStatus::PsdWithKernel);
        assert_eq!(d.kernel, vec![vec![int(-1), int(1)]]);
    }

    #[test]
    fn indefinite_has_witness() {
        for a in [m(&[&[1, 2], &[2, 1]]), m(&[&[0, 1], &[1, 0]]), m(&[&[-1]]), m(&[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]])] {
            let d = psd_decompose(&a).unwrap();
            assert_eq!(d.status, PsdStatus::NotPsd);
            let w = d.witness.unwrap();
            assert!(a.quadratic_form(&w).is_negative());
        }
    }

    #[test]
    fn rejects_asymmetric() {
        assert!(psd_decompose(&m(&[&[1, 2], &[0, 1]])).is_err());
    }

    #[test]
    fn pivots_match_ldl() {
        let a = m(&[&[4, 2], &[2, 3]]);
        let d = psd_decompose(&a).unwrap();
        assert_eq!(d.pivots, vec![int(4), int(2)]);
        let a = RatMatrix::identity(2).scale(&rat(3, 4));
        let d = psd_decompose(&a).unwrap();
        assert_eq!(d.pivots, vec![rat(3, 4), rat(3, 4)]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        // Gram matrices BᵀB are PSD with kernel dimension = n − rank(B).
        #[test]
        fn gram_matrices_are_psd(entries in prop::collection::vec(-3i64..=3, 12)) {
            let b = RatMatrix::from_rows(entries.chunks(4).map(|r| r.iter().map(|&v| int(v)).collect()).collect()).unwrap();
            let g = b.transpose().mul(&b);
            let d = psd_decompose(&g).unwrap();
            prop_assert_ne!(d.status, PsdStatus::NotPsd);
            let rank = 4 - nullspace(&b).len();
            prop_assert_eq!(d.kernel.len(), 4 - rank);
            for v in &d.kernel {
                prop_assert!(g.mul_vec(v).iter().all(Zero::is_zero));
            }
        }

        #[test]
        fn witnesses_are_genuine(entries in prop::collection::vec(-4i64..=4, 10)) {
            let n = 4;
            let mut a = RatMatrix::zeros(n, n);
            let mut it = entries.into_iter();
            for i in 0..n {
                for j in i..n {
                    let v = int(it.next().unwrap());
                    a.set(i, j, v.clone());
                    a.set(j, i, v);
                }
            }
            let d = psd_decompose(&a).unwrap();
            match d.status {
                PsdStatus::NotPsd => prop_assert!(a.quadratic_form(d.witness.as_ref().unwrap()).is_negative()),
                _ => {
                    for v in &d.kernel {
                        prop_assert!(a.mul_vec(v).iter().all(Zero::is_zero));
                    }
                }
            }
        }
    }
}
