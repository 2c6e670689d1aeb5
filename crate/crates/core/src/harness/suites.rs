//! The three experiment suites.
//!
//! Every case draws from its own random stream keyed by `(seed, case)`, so
//! reports do not depend on how cases are scheduled across threads. Wall-clock
//! timing is kept out of the serialized report and written separately.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentConfig, Family};
use super::generate::{decay_coefficients, generate, FamilySpec};
use crate::error::{Error, Result};
use crate::exponents::{s_from_p, Exponent, ParameterTriple};
use crate::factorization::{build_pipeline, certificates_chain_exact, SummingCertificate};
use crate::nuclear::{equivalent, RewriteScheme};
use crate::rng;
use crate::spectra::{ladder_csv, spectral_report, summability_ladder, weyl_check, LadderRow, WeylCheck, SPECTRAL_TOL};

/// Relative ceiling on `diag(Δ₁)·diag(Δ₂)·diag(Δ_{1-s})` against `μ`.
pub const DIAGONAL_TOL: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteKind {
    Trace,
    Factorize,
    Ladder,
}

impl SuiteKind {
    pub const ALL: [SuiteKind; 3] = [SuiteKind::Trace, SuiteKind::Factorize, SuiteKind::Ladder];

    pub fn name(&self) -> &'static str {
        match self {
            SuiteKind::Trace => "trace",
            SuiteKind::Factorize => "factorize",
            SuiteKind::Ladder => "ladder",
        }
    }
}

impl fmt::Display for SuiteKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SuiteKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SuiteKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseStatus {
    Pass,
    Fail,
    SkippedDegenerate,
}

impl CaseStatus {
    fn from_pass(pass: bool) -> Self {
        if pass {
            CaseStatus::Pass
        } else {
            CaseStatus::Fail
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport<R> {
    pub suite: SuiteKind,
    pub config: ExperimentConfig,
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub rows: Vec<R>,
    #[serde(skip)]
    pub duration: Duration,
}

impl<R: Serialize> SuiteReport<R> {
    fn new(suite: SuiteKind, config: &ExperimentConfig, rows: Vec<R>, statuses: &[CaseStatus], started: Instant) -> Self {
        let count = |s| statuses.iter().filter(|&&x| x == s).count();
        let (passed, failed, skipped) = (
            count(CaseStatus::Pass),
            count(CaseStatus::Fail),
            count(CaseStatus::SkippedDegenerate),
        );
        SuiteReport {
            suite,
            config: config.clone(),
            total: passed + failed,
            passed,
            failed,
            skipped,
            rows,
            duration: started.elapsed(),
        }
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: {} passed, {} failed, {} skipped ({:.2}s)",
            self.suite,
            self.passed,
            self.failed,
            self.skipped,
            self.duration.as_secs_f64()
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Writes `<suite>.json` and the timing record `<suite>.meta.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_file(&dir.join(format!("{}.json", self.suite)), &self.to_json())?;
        let meta = serde_json::json!({
            "suite": self.suite,
            "duration_ms": self.duration.as_millis() as u64,
        });
        write_file(
            &dir.join(format!("{}.meta.json", self.suite)),
            &serde_json::to_string_pretty(&meta)?,
        )
    }
}

pub(crate) fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Per-case dimension, term count and exponent, drawn from the case stream.
fn case_spec(config: &ExperimentConfig, case: usize) -> (FamilySpec, u64) {
    let grid = config.p_values();
    let p = grid[case % grid.len()];
    let mut rng = rng::stream(config.seed, case as u64);
    let dim = config.ladder[rng.random_range(0..config.ladder.len())];
    let cap = config.decay.term_count.min(dim);
    let terms = rng.random_range(1..=cap);
    let rewrite_seed = rng.random::<u64>();
    let spec = FamilySpec {
        family: config.family,
        p,
        dim,
        terms,
        exponent_multiplier: config.decay.exponent_multiplier,
        seed: config.seed,
        stream: case as u64,
    };
    (spec, rewrite_seed)
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceCase {
    pub case: usize,
    pub p: Exponent,
    pub dim: usize,
    pub terms: usize,
    pub mu_sum: f64,
    pub nuclear_trace: f64,
    pub rewritten_trace: f64,
    pub trace_drift: f64,
    pub rewrites: Vec<RewriteScheme>,
    pub rewritten_equivalent: bool,
    pub lidskii_residual: f64,
    pub abs_sum: f64,
    /// Present for `p = 2`, where `Σ μ_k` bounds the singular values.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weyl: Option<WeylCheck>,
    pub status: CaseStatus,
}

fn trace_case(config: &ExperimentConfig, case: usize) -> Result<TraceCase> {
    let (spec, rewrite_seed) = case_spec(config, case);
    let rep = generate(&spec)?;
    let mu_sum = rep.mu_sum();
    let (rewritten, rewrites) = rep.rewrite_chain(config.rewrite_steps, rewrite_seed)?;
    let nuclear_trace = rep.nuclear_trace();
    let rewritten_trace = rewritten.nuclear_trace();
    let trace_drift = (rewritten_trace - nuclear_trace).abs();
    let rewritten_equivalent = equivalent(&rep, &rewritten, config.tolerances.trace)?;
    let report = spectral_report(&rep)?;
    let weyl = if spec.p == Exponent::TWO {
        Some(weyl_check(&rep)?)
    } else {
        None
    };
    let budget = 1.0 + mu_sum;
    let pass = trace_drift <= config.tolerances.trace * budget
        && rewritten_equivalent
        && report.lidskii_residual <= SPECTRAL_TOL * budget
        && report.trace_identity_holds()
        && report.conjugate_pairing_holds()
        && weyl.as_ref().is_none_or(|w| w.pass);
    let status = if rep.dropped() > 0 {
        CaseStatus::SkippedDegenerate
    } else {
        CaseStatus::from_pass(pass)
    };
    Ok(TraceCase {
        case,
        p: spec.p,
        dim: spec.dim,
        terms: rep.len(),
        mu_sum,
        nuclear_trace,
        rewritten_trace,
        trace_drift,
        rewrites,
        rewritten_equivalent,
        lidskii_residual: report.lidskii_residual,
        abs_sum: report.abs_sum,
        weyl,
        status,
    })
}

/// Representation-independence of the nuclear trace and the finite
/// trace identity, over `config.cases` seeded cases.
pub fn run_trace_suite(config: &ExperimentConfig) -> Result<SuiteReport<TraceCase>> {
    config.validate()?;
    let started = Instant::now();
    let rows = (0..config.cases)
        .into_par_iter()
        .map(|case| trace_case(config, case))
        .collect::<Result<Vec<_>>>()?;
    let statuses: Vec<_> = rows.iter().map(|r| r.status).collect();
    Ok(SuiteReport::new(SuiteKind::Trace, config, rows, &statuses, started))
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorizationCase {
    pub case: usize,
    pub p_input: Exponent,
    /// The representation was replaced by its adjoint on `ℓ_{p'}`.
    pub dualized: bool,
    pub dim: usize,
    pub terms: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub triple: Option<ParameterTriple>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reconstruction_gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagonal_gap: Option<f64>,
    pub chain_exact: bool,
    pub certificates: Vec<SummingCertificate>,
    pub status: CaseStatus,
}

fn factorization_case(config: &ExperimentConfig, case: usize) -> Result<FactorizationCase> {
    let (spec, _) = case_spec(config, case);
    let rep = generate(&spec)?;
    let dualized = spec.p < Exponent::TWO;
    let rep = if dualized { rep.adjoint() } else { rep };
    let mut row = FactorizationCase {
        case,
        p_input: spec.p,
        dualized,
        dim: spec.dim,
        terms: rep.len(),
        triple: None,
        reconstruction_gap: None,
        diagonal_gap: None,
        chain_exact: false,
        certificates: Vec::new(),
        status: CaseStatus::SkippedDegenerate,
    };
    if rep.dropped() > 0 || rep.is_empty() {
        return Ok(row);
    }
    let pipe = build_pipeline(&rep)?;
    let gap = pipe.reconstruction_gap(&rep.assemble())?;
    let diagonal_gap = pipe.diagonal_gap();
    let certificates = pipe.certificates();
    row.chain_exact = certificates_chain_exact(&certificates);
    row.status = CaseStatus::from_pass(
        gap <= config.tolerances.reconstruction && diagonal_gap <= DIAGONAL_TOL && row.chain_exact,
    );
    row.triple = Some(pipe.triple);
    row.reconstruction_gap = Some(gap);
    row.diagonal_gap = Some(diagonal_gap);
    row.certificates = certificates;
    Ok(row)
}

/// Builds the five-stage pipeline for each case (after duality reduction)
/// and checks reconstruction, diagonal consistency and the exponent chain.
pub fn run_factorization_suite(config: &ExperimentConfig) -> Result<SuiteReport<FactorizationCase>> {
    config.validate()?;
    let started = Instant::now();
    let rows = (0..config.cases)
        .into_par_iter()
        .map(|case| factorization_case(config, case))
        .collect::<Result<Vec<_>>>()?;
    let statuses: Vec<_> = rows.iter().map(|r| r.status).collect();
    Ok(SuiteReport::new(SuiteKind::Factorize, config, rows, &statuses, started))
}

#[derive(Clone, Debug, Serialize)]
pub struct LadderCase {
    #[serde(flatten)]
    pub row: LadderRow,
    /// `Σ_{k≤N} μ_k` for the diagonal family, whose eigenvalues are the `μ_k`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<f64>,
    pub status: CaseStatus,
}

#[derive(Clone, Debug, Serialize)]
pub struct GapCheck {
    pub gaps: Vec<f64>,
    pub strictly_decreasing: bool,
    /// Only the diagonal family is a fixed operator seen at growing
    /// truncations; the random families renormalize per level, so their
    /// gaps are reported without being asserted.
    pub asserted: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LadderReport {
    #[serde(flatten)]
    pub suite: SuiteReport<LadderCase>,
    pub gap_check: GapCheck,
}

impl LadderReport {
    pub fn csv(&self) -> String {
        ladder_csv(&self.suite.rows.iter().map(|c| c.row.clone()).collect::<Vec<_>>())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Writes `ladder.json`, `ladder.csv` and `ladder.meta.json`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        self.suite.write(dir)?;
        write_file(&dir.join("ladder.json"), &self.to_json())?;
        write_file(&dir.join("ladder.csv"), &self.csv())
    }
}

/// Relative agreement required between the diagonal family's eigenvalue sum
/// and its closed-form partial sum.
pub const CLOSED_FORM_TOL: f64 = 1e-10;

/// Walks the truncation ladder for the configured family and checks the
/// residual budget and the tail-fraction ceiling per row. For the diagonal
/// family it also checks the closed form and strict shrinkage of the
/// consecutive gaps `S_{N_{i+1}} - S_{N_i}`.
pub fn run_ladder_suite(config: &ExperimentConfig) -> Result<LadderReport> {
    config.validate()?;
    if config.ladder.len() < 3 {
        return Err(Error::Config(format!(
            "ladder suite needs at least 3 levels, got {:?}",
            config.ladder
        )));
    }
    let started = Instant::now();
    let family = |n: usize| {
        generate(&FamilySpec {
            family: config.family,
            p: config.p,
            dim: n,
            terms: config.decay.term_count.min(n),
            exponent_multiplier: config.decay.exponent_multiplier,
            seed: config.seed,
            stream: 0,
        })
    };
    let rows = summability_ladder(family, &config.ladder, s_from_p(config.p))?;

    let mut cases = Vec::with_capacity(rows.len());
    let mut statuses = Vec::with_capacity(rows.len() + 1);
    for row in rows {
        let closed_form = (config.family == Family::Diagonal).then(|| {
            let terms = config.decay.term_count.min(row.level);
            decay_coefficients(config.p, config.decay.exponent_multiplier, terms)
                .iter()
                .sum::<f64>()
        });
        let pass = row.residual <= SPECTRAL_TOL * (1.0 + row.abs_sum)
            && config.tail_fraction_max.is_none_or(|max| row.tail_fraction <= max)
            && closed_form.is_none_or(|c| (row.abs_sum - c).abs() <= CLOSED_FORM_TOL * c);
        let status = CaseStatus::from_pass(pass);
        statuses.push(status);
        cases.push(LadderCase {
            row,
            closed_form,
            status,
        });
    }
    let gaps: Vec<f64> = cases.windows(2).map(|w| w[1].row.abs_sum - w[0].row.abs_sum).collect();
    let strictly_decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
    let asserted = config.family == Family::Diagonal;
    if asserted {
        statuses.push(CaseStatus::from_pass(strictly_decreasing));
    }
    Ok(LadderReport {
        suite: SuiteReport::new(SuiteKind::Ladder, config, cases, &statuses, started),
        gap_check: GapCheck {
            gaps,
            strictly_decreasing,
            asserted,
        },
    })
}

/// Runs one suite and writes its data files into `dir`; returns the summary
/// line and whether every case passed.
pub fn run_and_write(kind: SuiteKind, config: &ExperimentConfig, dir: &Path) -> Result<(String, bool)> {
    Ok(match kind {
        SuiteKind::Trace => {
            let r = run_trace_suite(config)?;
            r.write(dir)?;
            (r.summary(), r.all_passed())
        }
        SuiteKind::Factorize => {
            let r = run_factorization_suite(config)?;
            r.write(dir)?;
            (r.summary(), r.all_passed())
        }
        SuiteKind::Ladder => {
            let r = run_ladder_suite(config)?;
            r.write(dir)?;
            (r.suite.summary(), r.suite.all_passed())
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::Decay;

    fn config(family: Family, p: &str) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(
            p.parse().unwrap(),
            family,
            Decay {
                exponent_multiplier: 1.1,
                term_count: 8,
            },
            vec![4, 8, 16],
            5,
        );
        c.cases = 12;
        c
    }

    #[test]
    fn trace_suite_passes_and_is_deterministic() {
        let c = config(Family::RandomUnit, "3");
        let a = run_trace_suite(&c).unwrap();
        assert_eq!((a.passed, a.failed), (12, 0));
        assert_eq!(a.total, a.passed + a.failed);
        let b = run_trace_suite(&c).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn seed_changes_data_not_outcome() {
        let mut c = config(Family::SharedFunctionalRotations, "2");
        let a = run_trace_suite(&c).unwrap();
        c.seed = 6;
        let b = run_trace_suite(&c).unwrap();
        assert_eq!(a.passed, b.passed);
        assert_ne!(a.rows[0].nuclear_trace, b.rows[0].nuclear_trace);
    }

    #[test]
    fn factorization_dualizes_small_p() {
        let c = config(Family::RandomUnit, "1");
        let r = run_factorization_suite(&c).unwrap();
        assert_eq!(r.failed, 0);
        for row in &r.rows {
            assert!(row.dualized);
            let t = row.triple.unwrap();
            assert_eq!(t.p, Exponent::INFINITY);
            assert_eq!(t.s, "2/3".parse().unwrap());
            assert_eq!(t.r, Exponent::TWO);
        }
    }

    #[test]
    fn degenerate_cases_are_skipped() {
        let mut c = config(Family::Diagonal, "2");
        c.decay.exponent_multiplier = 400.0;
        let r = run_factorization_suite(&c).unwrap();
        assert!(r.skipped > 0);
        assert_eq!(r.failed, 0);
        assert!(r
            .rows
            .iter()
            .any(|row| row.status == CaseStatus::SkippedDegenerate));
    }

    #[test]
    fn ladder_needs_three_levels() {
        let mut c = config(Family::Diagonal, "2");
        c.ladder = vec![32];
        assert!(run_ladder_suite(&c).is_err());
    }

    #[test]
    fn suite_names() {
        for k in SuiteKind::ALL {
            assert_eq!(k.name().parse::<SuiteKind>().unwrap(), k);
        }
        assert!("weyl".parse::<SuiteKind>().is_err());
    }
}
