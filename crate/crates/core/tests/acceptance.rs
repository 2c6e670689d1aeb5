//! Acceptance gate: one line per criterion, nonzero exit if any fails.
//!
//! Oracles here are computed from raw coordinates with plain loops or
//! directly with nalgebra, never through the library routine being checked.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_rational::Ratio;
use nuclear_trace::exponents::{check_holder_chain, exponent_budget, reduce_to_p_ge_2};
use nuclear_trace::harness::{
    generate, run_factorization_suite, run_ladder_suite, run_trace_suite, ExperimentConfig, Family, FamilySpec,
};
use nuclear_trace::spectra::weyl_check;
use nuclear_trace::{build_pipeline, spectral_report, Exponent, NuclearRep};

type Q = Ratio<i64>;
type Outcome = Result<String, String>;

fn config(name: &str) -> ExperimentConfig {
    ExperimentConfig::load(Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)).unwrap()
}

/// `Σ_k μ_k Σ_i f_k[i] v_k[i]` from the stored coordinates.
fn oracle_trace(rep: &NuclearRep) -> f64 {
    rep.terms()
        .iter()
        .map(|t| {
            let pairing: f64 = t.functional().coords().iter().zip(t.vector().coords()).map(|(a, b)| a * b).sum();
            t.mu() * pairing
        })
        .sum()
}

/// `Σ_k μ_k v_k f_kᵀ` from the stored coordinates.
fn oracle_matrix(rep: &NuclearRep) -> DMatrix<f64> {
    let n = rep.ambient().dim();
    let mut m = DMatrix::zeros(n, n);
    for t in rep.terms() {
        let (f, v) = (t.functional().coords(), t.vector().coords());
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] += t.mu() * v[i] * f[j];
            }
        }
    }
    m
}

fn sum_mu(rep: &NuclearRep) -> f64 {
    rep.terms().iter().map(|t| t.mu()).sum()
}

/// The 200 seeded representations shared by criteria 2 and 3.
fn random_reps() -> Vec<NuclearRep> {
    let grid = ["2", "3", "inf"];
    (0..200u64)
        .map(|case| {
            let dim = 8 + (case as usize * 7) % 57;
            let spec = FamilySpec {
                family: if case % 2 == 0 { Family::RandomUnit } else { Family::SharedFunctionalRotations },
                p: grid[case as usize % 3].parse().unwrap(),
                dim,
                terms: 1 + (case as usize * 5) % dim.min(20),
                exponent_multiplier: 1.1,
                seed: 20260101,
                stream: case,
            };
            generate(&spec).unwrap()
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let table = [
        ("1", "2/3", "2"),
        ("4/3", "4/5", "4"),
        ("2", "1", "inf"),
        ("3", "6/7", "6"),
        ("4", "4/5", "4"),
        ("inf", "2/3", "2"),
    ];
    for (p, s, r) in table {
        let p: Exponent = p.parse().unwrap();
        let t = exponent_budget(p);
        // 1/s = 1 + |1/2 - 1/p| on the reduced exponent, 1/r = 1/s - 1
        let inv_p = if p.is_infinite() { Q::from_integer(0) } else { p.reciprocal() };
        let gap = Q::new(1, 2) - inv_p;
        let inv_s = Q::from_integer(1) + if gap < Q::from_integer(0) { -gap } else { gap };
        let inv_r = inv_s - Q::from_integer(1);
        if t.s.to_string() != s || t.r.to_string() != r {
            return Err(format!("p = {p}: got (s, r) = ({}, {}), want ({s}, {r})", t.s, t.r));
        }
        if t.s.reciprocal() != inv_s || t.r.reciprocal() != inv_r {
            return Err(format!("p = {p}: reciprocals disagree with 1 + |1/2 - 1/p|"));
        }
        let q = reduce_to_p_ge_2(p);
        let inv_q = if q.is_infinite() { Q::from_integer(0) } else { q.reciprocal() };
        if inv_r + Q::new(1, 2) + inv_q != Q::from_integer(1) {
            return Err(format!("p = {p}: oracle chain sum is not 1"));
        }
        if !check_holder_chain(&[t.r, Exponent::TWO, q]) {
            return Err(format!("p = {p}: check_holder_chain false"));
        }
    }
    Ok("6 exponents exact, chains sum to 1".into())
}

fn criterion_2(reps: &[NuclearRep]) -> Outcome {
    let mut worst = 0.0f64;
    for (case, rep) in reps.iter().enumerate() {
        if rep.len() > 20 || rep.ambient().dim() > 64 {
            return Err(format!("case {case} outside the size envelope"));
        }
        let report = spectral_report(rep).map_err(|e| e.to_string())?;
        let budget = 1.0 + sum_mu(rep);
        let residual = (oracle_trace(rep) - report.eigen_sum.re).hypot(report.eigen_sum.im);
        if residual > 1e-9 * budget || report.lidskii_residual > 1e-9 * budget {
            return Err(format!("case {case}: residual {residual:e}"));
        }
        worst = worst.max(residual / budget);
    }
    let suite = run_trace_suite(&config("trace.json")).map_err(|e| e.to_string())?;
    if suite.passed != 200 || suite.failed != 0 {
        return Err(suite.summary());
    }
    Ok(format!("200 reps, worst residual/(1+Σμ) {worst:.1e}; shipped trace suite 200/200"))
}

fn criterion_3(reps: &[NuclearRep]) -> Outcome {
    let mut worst = 0.0f64;
    for (case, rep) in reps.iter().enumerate() {
        let (out, _) = rep.rewrite_chain(10, 1000 + case as u64).map_err(|e| e.to_string())?;
        let budget = 1.0 + sum_mu(rep);
        let drift = (oracle_trace(&out) - oracle_trace(rep)).abs();
        if drift > 1e-10 * budget {
            return Err(format!("case {case}: drift {drift:e}"));
        }
        worst = worst.max(drift / budget);
    }
    Ok(format!("200 ten-step chains, worst drift/(1+Σμ) {worst:.1e}"))
}

fn criterion_4() -> Outcome {
    let grid = ["2", "3", "4", "inf"];
    let mut worst = 0.0f64;
    for case in 0..100u64 {
        let dim = 6 + (case as usize * 11) % 43;
        let rep = generate(&FamilySpec {
            family: if case % 2 == 0 { Family::RandomUnit } else { Family::SharedFunctionalRotations },
            p: grid[case as usize % 4].parse().unwrap(),
            dim,
            terms: 1 + (case as usize * 3) % dim.min(16),
            exponent_multiplier: 1.1,
            seed: 20260103,
            stream: case,
        })
        .unwrap();
        let pipe = build_pipeline(&rep).map_err(|e| e.to_string())?;
        // compose stage matrices right to left: B Δ₂ Δ₁ j Δ_{1-s} A
        let product = pipe
            .stages()
            .iter()
            .fold(None::<DMatrix<f64>>, |acc, st| {
                Some(match acc {
                    None => st.matrix().clone(),
                    Some(m) => st.matrix() * m,
                })
            })
            .unwrap();
        let target = oracle_matrix(&rep);
        let gap = (&product - &target).norm() / (1.0 + target.norm());
        if gap > 1e-10 {
            return Err(format!("case {case}: reconstruction gap {gap:e}"));
        }
        worst = worst.max(gap);
        // certificates carry r (U3), 2 (U2), p (U1)
        let certs = pipe.certificates();
        let recip = |e: Exponent| if e.is_infinite() { Q::from_integer(0) } else { e.reciprocal() };
        let sum: Q = certs.iter().map(|c| recip(c.exponent)).sum();
        if sum != Q::from_integer(1) {
            return Err(format!("case {case}: certificate chain sums to {sum}"));
        }
    }
    let suite = run_factorization_suite(&config("factorize.json")).map_err(|e| e.to_string())?;
    if suite.failed != 0 || suite.passed != 100 {
        return Err(suite.summary());
    }
    Ok(format!("100 pipelines, worst gap {worst:.1e}; shipped factorize suite 100/100"))
}

fn criterion_5() -> Outcome {
    let mut slack = f64::INFINITY;
    for case in 0..100u64 {
        let dim = 8 + (case as usize * 13) % 57;
        let rep = generate(&FamilySpec {
            family: if case % 2 == 0 { Family::RandomUnit } else { Family::SharedFunctionalRotations },
            p: Exponent::TWO,
            dim,
            terms: 1 + (case as usize * 7) % dim.min(20),
            exponent_multiplier: 1.1,
            seed: 20260102,
            stream: case,
        })
        .unwrap();
        let w = weyl_check(&rep).map_err(|e| e.to_string())?;
        let sigma: f64 = oracle_matrix(&rep).singular_values().iter().sum();
        let mu = sum_mu(&rep);
        let tol = 1e-9 * (1.0 + mu);
        if !(w.abs_sum <= sigma + tol && sigma <= mu + tol && (sigma - w.singular_sum).abs() <= tol) {
            return Err(format!("case {case}: Σ|λ| {} Σσ {sigma} Σμ {mu}", w.abs_sum));
        }
        slack = slack.min(mu - sigma);
    }
    Ok(format!("100 reps on l_2, min Σμ - Σσ {slack:.2e}"))
}

fn criterion_6() -> Outcome {
    let mut notes = Vec::new();
    for name in ["ladder_diagonal_2.json", "ladder_diagonal_inf.json"] {
        let c = config(name);
        let report = run_ladder_suite(&c).map_err(|e| e.to_string())?;
        let rows = &report.suite.rows;
        if c.p == Exponent::TWO {
            for r in rows {
                let closed: f64 = (1..=r.row.level).map(|k| (k as f64).powf(-1.1)).sum();
                let rel = (r.row.abs_sum - closed).abs() / closed;
                if rel > 1e-10 {
                    return Err(format!("{name} N = {}: relative error {rel:e}", r.row.level));
                }
            }
        }
        let gaps: Vec<f64> = rows.windows(2).map(|w| w[1].row.abs_sum - w[0].row.abs_sum).collect();
        if !gaps.windows(2).all(|w| w[1] < w[0]) {
            return Err(format!("{name}: gaps {gaps:?} not strictly decreasing"));
        }
        if !report.suite.all_passed() {
            return Err(report.suite.summary());
        }
        notes.push(format!("p={} gaps ok", c.p));
    }
    let c = config("ladder_rotations_inf.json");
    let max = c.tail_fraction_max.ok_or("rotation config has no tail_fraction_max")?;
    let report = run_ladder_suite(&c).map_err(|e| e.to_string())?;
    let observed = report.suite.rows.iter().map(|r| r.row.tail_fraction).fold(0.0, f64::max);
    if observed > max || !report.suite.all_passed() {
        return Err(format!("rotation tail fraction {observed} over {max}"));
    }
    notes.push(format!("rotation tail {observed:.4} ≤ {max}"));
    Ok(notes.join(", "))
}

fn run_cli(config: &str, only: &str, out: &Path) -> Result<(), String> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(config);
    let status = Command::new(env!("CARGO_BIN_EXE_glt"))
        .args(["suite", "--config"])
        .arg(&path)
        .args(["--only", only, "--out"])
        .arg(out)
        .env("GLT_THREADS", "4")
        .output()
        .map_err(|e| e.to_string())?;
    if !status.status.success() {
        return Err(format!("{only}: {}", String::from_utf8_lossy(&status.stderr)));
    }
    Ok(())
}

fn data_files(dir: &Path) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| !p.to_string_lossy().ends_with(".meta.json"))
        .collect();
    files.sort();
    files
}

fn criterion_7() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut compared = 0;
    for (config, only) in [
        ("trace.json", "trace"),
        ("factorize.json", "factorize"),
        ("ladder_rotations_inf.json", "ladder"),
    ] {
        let (a, b) = (tmp.path().join(format!("{only}-a")), tmp.path().join(format!("{only}-b")));
        run_cli(config, only, &a)?;
        run_cli(config, only, &b)?;
        let (fa, fb) = (data_files(&a), data_files(&b));
        if fa.is_empty() || fa.len() != fb.len() {
            return Err(format!("{only}: file sets differ"));
        }
        for (x, y) in fa.iter().zip(&fb) {
            if std::fs::read(x).unwrap() != std::fs::read(y).unwrap() {
                return Err(format!("{} differs between runs", x.display()));
            }
            compared += 1;
        }
    }
    Ok(format!("{compared} data files byte-identical across repeated runs"))
}

fn main() {
    let start = Instant::now();
    let mut failed = 0;
    let mut report = |n: usize, name: &str, limit: Duration, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let outcome = f();
        let elapsed = t.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > limit => Err(format!("{msg}; over the {}s limit", limit.as_secs())),
            other => other,
        };
        let (tag, msg) = match &outcome {
            Ok(m) => ("PASS", m.as_str()),
            Err(m) => ("FAIL", m.as_str()),
        };
        if outcome.is_err() {
            failed += 1;
        }
        println!("criterion {n} [{tag}] {name} ({:.2}s): {msg}", elapsed.as_secs_f64());
    };
    let secs = Duration::from_secs;
    report(1, "exact exponent table", secs(1), &mut criterion_1);
    let reps = random_reps();
    report(2, "finite-rank Lidskii identity", secs(30), &mut || criterion_2(&reps));
    report(3, "trace invariance under rewrites", secs(10), &mut || criterion_3(&reps));
    report(4, "pipeline reconstruction", secs(30), &mut criterion_4);
    report(5, "Weyl chain on l_2", secs(30), &mut criterion_5);
    report(6, "summability ladder", secs(60), &mut criterion_6);
    report(7, "determinism", secs(120), &mut criterion_7);
    let total = start.elapsed();
    let over = total > secs(120);
    println!(
        "acceptance: {} of 7 passed in {:.2}s{}",
        7 - failed,
        total.as_secs_f64(),
        if over { " (over the 120s total)" } else { "" }
    );
    if failed > 0 || over {
        std::process::exit(1);
    }
}
