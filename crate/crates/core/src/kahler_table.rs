//! Table of weighted pairing integrals `c∫w·ω(∇φ_k,∇φ_s)` for the Kähler
//! form on `S³`, each compared with its expected multiple of `∫φ² = 1/4`.

use serde::Serialize;

use crate::certifier::Problem;
use crate::forms::omega_pair;
use crate::polyring::SpherePoly;
use crate::rational::{format_rational, int, rat, Rational};

#[derive(Clone, Debug, Serialize)]
pub struct TableRow {
    /// Factor in front of the integral, `3` or `−3`.
    pub factor: i64,
    /// Weight, e.g. `"phi1*phi4"` or `"1"`.
    pub weight: String,
    pub pair: (usize, usize),
    pub computed: String,
    /// Expected value as a multiple of `∫φ²`.
    pub expected_multiple: String,
    pub expected: String,
    pub matched: bool,
}

fn x(i: usize) -> SpherePoly {
    SpherePoly::var(4, i - 1)
}

fn row(problem: &Problem, factor: i64, weight: &[usize], pair: (usize, usize), multiple: Rational) -> TableRow {
    let w = weight.iter().fold(SpherePoly::one(4), |acc, &i| &acc * &x(i));
    let (k, s) = pair;
    let computed = problem.table.integral_of_product(&w, &omega_poly(problem, k, s)) * int(factor);
    let expected = &multiple * rat(1, 4);
    TableRow {
        factor,
        weight: if weight.is_empty() {
            "1".into()
        } else {
            weight.iter().map(|i| format!("phi{i}")).collect::<Vec<_>>().join("*")
        },
        pair,
        matched: computed == expected,
        computed: format_rational(&computed),
        expected_multiple: format_rational(&multiple),
        expected: format_rational(&expected),
    }
}

fn omega_poly(problem: &Problem, k: usize, s: usize) -> SpherePoly {
    omega_pair(&problem.two_form, &x(k), &x(s))
}

/// Every row of the table, including the vanishing "other" cases
/// enumerated over all index combinations (`i ≤ j`, `k < s`).
pub fn lemma42_table(problem: &Problem) -> Vec<TableRow> {
    let mut rows = Vec::new();
    rows.push(row(problem, 3, &[], (1, 2), int(3)));
    rows.push(row(problem, 3, &[], (3, 4), int(3)));
    let pairs: Vec<(usize, usize)> = (1..=4).flat_map(|k| (k + 1..=4).map(move |s| (k, s))).collect();
    for &p in &pairs {
        if p != (1, 2) && p != (3, 4) {
            rows.push(row(problem, -3, &[], p, int(0)));
        }
    }
    for &p in &pairs {
        for k in 1..=4 {
            rows.push(row(problem, -3, &[k], p, int(0)));
        }
    }

    let listed: Vec<([usize; 2], (usize, usize), Rational)> = vec![
        ([1, 1], (1, 2), rat(-1, 2)),
        ([2, 2], (1, 2), rat(-1, 2)),
        ([3, 3], (1, 2), int(-1)),
        ([4, 4], (1, 2), int(-1)),
        ([1, 1], (3, 4), int(-1)),
        ([2, 2], (3, 4), int(-1)),
        ([3, 3], (3, 4), rat(-1, 2)),
        ([4, 4], (3, 4), rat(-1, 2)),
        ([1, 4], (1, 3), rat(-1, 4)),
        ([1, 3], (2, 3), rat(-1, 4)),
        ([1, 3], (1, 4), rat(1, 4)),
        ([2, 3], (2, 4), rat(1, 4)),
        ([2, 3], (1, 3), rat(1, 4)),
        ([2, 4], (1, 4), rat(1, 4)),
        ([2, 4], (2, 3), rat(-1, 4)),
        ([1, 4], (2, 4), rat(-1, 4)),
    ];
    for (w, p, c) in &listed {
        rows.push(row(problem, -3, w, *p, c.clone()));
    }
    for i in 1..=4 {
        for j in i..=4 {
            for &p in &pairs {
                if !listed.iter().any(|(w, q, _)| *w == [i, j] && *q == p) {
                    rows.push(row(problem, -3, &[i, j], p, int(0)));
                }
            }
        }
    }
    rows
}

pub const CSV_HEADER: &str = "factor,weight,pair,computed,expected_multiple_of_int_phi2,expected,status";

pub fn to_csv_line(r: &TableRow) -> String {
    format!(
        "{},{},\"({},{})\",{},{},{},{}",
        r.factor,
        r.weight,
        r.pair.0,
        r.pair.1,
        r.computed,
        r.expected_multiple,
        r.expected,
        if r.matched { "MATCH" } else { "MISMATCH" }
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_row_matches() {
        let p = Problem::kahler();
        let rows = lemma42_table(&p);
        // 2 + 4 + 24 + 16 listed + (60 − 16) other quadratic cases
        assert_eq!(rows.len(), 2 + 4 + 24 + 16 + 44);
        for r in &rows {
            assert!(r.matched, "{}", to_csv_line(r));
        }
    }

    #[test]
    fn spot_values() {
        let p = Problem::kahler();
        let rows = lemma42_table(&p);
        let find = |w: &str, pair| rows.iter().find(|r| r.weight == w && r.pair == pair).unwrap();
        assert_eq!(find("phi3*phi3", (1, 2)).computed, "-1/4");
        assert_eq!(find("phi1*phi3", (1, 4)).computed, "1/16");
        assert_eq!(find("1", (1, 2)).computed, "3/4");
    }
}
