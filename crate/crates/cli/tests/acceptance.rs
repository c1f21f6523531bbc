//! Acceptance criteria 1-9, one PASS/FAIL line each.

use std::process::Command;
use std::time::{Duration, Instant};

use num_traits::Zero;
use serde_json::Value;
use spherecert::certifier::{assemble_matrices, block_form, degree_report, rayleigh_tail_bound, theorem11_check, Problem};
use spherecert::forms::xi_apply;
use spherecert::harmonics::{harmonic_basis, sphere_laplacian};
use spherecert::moments::oracle_moment;
use spherecert::polyring::harmonic_expansion;
use spherecert::rational::{int, rat};
use spherecert::{parse_rational, CalibrationSpec, ConstantForm, MomentTable, MultiIndex, PsdStatus, Rational, SpherePoly};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let el = start.elapsed();
    ensure(el < limit, format!("took {el:?}, limit {limit:?}"))
}

fn cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_spherecert"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).expect("utf-8 output"))
}

fn rationals(v: &Value) -> Vec<Rational> {
    v.as_array()
        .expect("array")
        .iter()
        .map(|s| parse_rational(s.as_str().expect("string")).expect("rational"))
        .collect()
}

fn x(i: usize) -> SpherePoly {
    SpherePoly::var(4, i)
}

fn criterion1() -> Check {
    let start = Instant::now();
    let mut count = 0;
    for m in 2..=4usize {
        let t = MomentTable::new(m);
        for d in (0..=12).step_by(2) {
            for a in MultiIndex::all_of_degree(m + 1, d).into_iter().filter(|a| !a.has_odd()) {
                ensure(t.monomial_moment(&a) == oracle_moment(m, &a), format!("m={m} a={a}"))?;
                count += 1;
            }
        }
    }
    within(start, Duration::from_secs(5))?;
    Ok(format!("{count} even multi-indices agree exactly"))
}

fn criterion2() -> Check {
    for m in 2..=6usize {
        let t = MomentTable::new(m);
        let a = MultiIndex::unit(m + 1, 0).plus(&MultiIndex::unit(m + 1, 0));
        ensure(t.monomial_moment(&a) == rat(1, m as i64 + 1), format!("∫φ² on S^{m}"))?;
    }
    let t = MomentTable::new(3);
    let phi2 = t.integral(&(&x(0) * &x(0)));
    ensure(phi2 == rat(1, 4), "∫φ² = 1/4")?;
    ensure(t.integral(&x(0).pow(4)) == &phi2 * rat(1, 2), "∫φ⁴ = ½∫φ²")?;
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                let p = &(&x(i) * &x(i)) * &(&x(j) * &x(j));
                ensure(t.integral(&p) == &phi2 * rat(1, 6), "∫φ_i²φ_j² = ⅙∫φ²")?;
            }
        }
        ensure(t.dirichlet_inner(&x(i), &x(i)) == &phi2 * int(3), "∫‖∇φ‖² = 3∫φ²")?;
    }
    let (code, out) = cli(&["moments", "--m", "3", "--max-degree", "4", "--format", "csv"]);
    ensure(code == 0 && out.lines().any(|l| l == "2,0,0,0,1/4"), "CLI moments row (2,0,0,0) → 1/4")?;
    Ok("∫φ²=1/(m+1) for m=2..6; ∫φ⁴, ∫φ_i²φ_j², ∫‖∇φ‖² on S³".into())
}

fn criterion3() -> Check {
    let dims: Vec<usize> = (1..=3).map(|l| harmonic_basis(3, l).dim()).collect();
    ensure(dims == vec![4, 9, 16], format!("dimensions {dims:?}"))?;
    let t = MomentTable::new(3);
    let spaces: Vec<_> = (0..=4).map(|l| harmonic_basis(3, l)).collect();
    for s in &spaces {
        let lambda = int((s.l * (s.l + 2)) as i64);
        for b in &s.basis {
            ensure(sphere_laplacian(b) == b.scale(&lambda), format!("Δ_S b ≠ λ b at l={}", s.l))?;
        }
    }
    for a in &spaces {
        for b in &spaces {
            for f in &a.basis {
                for h in &b.basis {
                    let dir = t.dirichlet_inner(f, h);
                    let l2 = t.l2_inner(f, h);
                    let ok = if a.l == b.l {
                        dir == l2 * int(a.eigenvalue as i64)
                    } else {
                        dir.is_zero() && l2 == int(0)
                    };
                    ensure(ok, format!("Gram identity fails for degrees ({}, {})", a.l, b.l))?;
                }
            }
        }
    }
    Ok("dims 4, 9, 16; Δ_S b = l(l+2) b and Gram identity for l ≤ 4".into())
}

fn criterion4() -> Check {
    let (code, out) = cli(&["table-lemma42", "--format", "csv"]);
    ensure(code == 0, format!("exit code {code}"))?;
    let rows: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    ensure(rows.len() == 90, format!("{} rows", rows.len()))?;
    ensure(rows.iter().all(|r| r.ends_with(",MATCH")), "a row is not MATCH")?;
    ensure(rows.contains(&"-3,phi3*phi3,\"(1,2)\",-1/4,-1,-1/4,MATCH"), "−3∫φ3²ω(∇φ1,∇φ2) = −∫φ²")?;
    ensure(rows.contains(&"-3,phi1*phi3,\"(1,4)\",1/16,1/4,1/16,MATCH"), "−3∫φ1φ3ω(∇φ1,∇φ4) = ¼∫φ²")?;
    let others = rows.iter().filter(|r| r.starts_with("-3,phi") && r.contains(",0,0,0,")).count();
    Ok(format!("{} rows MATCH, {others} vanishing weighted rows", rows.len()))
}

fn criterion5() -> Check {
    let start = Instant::now();
    let p = Problem::kahler();
    let mut checked = 0;
    for l in 0..=4 {
        let r = theorem11_check(&p, l);
        ensure(r.passed(), format!("failures at l={l}"))?;
        for f in &harmonic_basis(3, l).basis {
            let h = xi_apply(&p.xi, f);
            let degrees: Vec<u32> = harmonic_expansion(&h).into_keys().collect();
            ensure(degrees.is_empty() || degrees == vec![l], format!("ξ(∇f) leaves E_λ at l={l}"))?;
            ensure(p.table.l2_inner(f, &h).is_zero(), format!("⟨f, ξ(∇f)⟩ ≠ 0 at l={l}"))?;
        }
        checked += r.checked;
    }
    within(start, Duration::from_secs(30))?;
    Ok(format!("{checked} basis elements, l ≤ 4"))
}

fn criterion6() -> Check {
    let (code, out) = cli(&["verify-identities", "--seed", "7", "--trials", "25", "--max-degree", "5"]);
    ensure(code == 0, format!("exit code {code}"))?;
    let v: Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    ensure(v["passed"] == true, "counterexample reported")?;
    ensure(v["report"]["coprimitive_checked"] == 25, "trial count")?;
    Ok("25 seeded pairs, degree ≤ 5, both identities exact".into())
}

fn criterion7() -> Check {
    let start = Instant::now();
    let (code, out) = cli(&["certify", "--omega", "kahler3", "--L", "2"]);
    within(start, Duration::from_secs(120))?;
    ensure(code == 0, format!("exit code {code}"))?;
    let v: Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    ensure(v["verdict"] == "certified", "verdict")?;
    let d1 = &v["degrees"][0];
    ensure(d1["status"] == "PSD_with_kernel" && d1["kernel_dim"] == 4, "l=1 status")?;
    for k in d1["kernel_basis"].as_array().ok_or("kernel")? {
        let mu = rationals(&k["mu"]);
        let sigma = rationals(&k["sigma"]);
        ensure(
            sigma[1] == -mu[0].clone() && sigma[0] == mu[1] && sigma[3] == -mu[2].clone() && sigma[2] == mu[3],
            "kernel vector off the equality family",
        )?;
    }
    ensure(v["degrees"][1]["status"] == "positive_definite", "l=2 status")?;
    let tail = &v["tail"];
    ensure(
        tail["factor_squared"] == 9 && tail["lambda"] == 15 && tail["strict"] == true,
        "tail comparison",
    )?;
    ensure(v["constants"]["sharp_constant"] == "2/3", "sharp constant")?;
    Ok(format!(
        "certified; l=1 kernel 4 = {{σ2=−μ1, σ1=μ2, σ4=−μ3, σ3=μ4}}; l=2 PD (min pivot {}); 9 < 15; {:?}",
        v["degrees"][1]["min_pivot"].as_str().unwrap_or("?"),
        start.elapsed()
    ))
}

fn criterion8() -> Check {
    let (code, out) = cli(&["certify", "--omega", "kahler3", "--L", "2", "--scale", "2"]);
    ensure(code == 2, format!("exit code {code}"))?;
    let v: Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    ensure(v["verdict"] == "not_certified", "verdict")?;
    let w = &v["witness"];
    ensure(w["l"] == 1, "witness degree")?;
    let mu = rationals(&w["mu"]);
    let sigma = rationals(&w["sigma"]);
    // Re-check independently against the doubled calibration.
    let form = ConstantForm::kahler3().scale(&int(2));
    let p = Problem::from_spec(&CalibrationSpec::from_form(3, &form)).map_err(|e| e.to_string())?;
    let m = assemble_matrices(&p, 1).map_err(|e| e.to_string())?;
    let value = block_form(&m.gram, &m.pairing, &mu, &sigma);
    ensure(value < int(0), "witness does not violate the block condition")?;
    let f = m.space.combine(&mu);
    let h = m.space.combine(&sigma);
    let lhs = p.scaled_pairing(&f, &h) * int(2);
    let rhs = p.table.dirichlet_inner(&f, &f) + p.table.dirichlet_inner(&h, &h);
    ensure(lhs > rhs, "witness does not violate −6∫ω(∇f,∇h) ≤ ‖∇f‖² + ‖∇h‖²")?;
    let show = |v: &[Rational]| v.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(",");
    Ok(format!(
        "NOT certified; witness μ=({}) σ=({}), block form {}",
        show(&mu),
        show(&sigma),
        value
    ))
}

fn criterion9() -> Check {
    let start = Instant::now();
    let p = Problem::kahler();
    for l in 3..=6 {
        let r = degree_report(&p, l).map_err(|e| e.to_string())?;
        ensure(r.status == PsdStatus::PositiveDefinite, format!("l={l} is {:?}", r.status))?;
        ensure(rayleigh_tail_bound(l, 3).strict, format!("tail bound not strict at l={l}"))?;
    }
    within(start, Duration::from_secs(600))?;
    Ok(format!("l = 3..6 positive definite, agreeing with 9 < λ_l; {:?}", start.elapsed()))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("moment oracle equivalence", criterion1),
        ("golden moment values", criterion2),
        ("eigenspace structure", criterion3),
        ("weighted pairing table", criterion4),
        ("eigenspace preservation", criterion5),
        ("co-primitive and commutation identities", criterion6),
        ("main certification", criterion7),
        ("negative control", criterion8),
        ("redundant exact confirmation", criterion9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {} ({name}): PASS - {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL - {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
