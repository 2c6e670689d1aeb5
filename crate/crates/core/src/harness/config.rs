use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::Exponent;
use crate::seqspace::MAX_DIM;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `Σ μ_k e_k ⊗ e_k`.
    Diagonal,
    /// Standard-normal functionals and vectors, normalized in `ℓ_{p'}` and `ℓ_p`.
    RandomUnit,
    /// Pairs of terms sharing a functional, each pair rewritten by a seeded rotation.
    SharedFunctionalRotations,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decay {
    /// The `1 + δ` factor in `μ_k = k^{-(1/s)(1+δ)}`.
    pub exponent_multiplier: f64,
    pub term_count: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    #[serde(default = "default_tol")]
    pub reconstruction: f64,
    #[serde(default = "default_tol")]
    pub trace: f64,
}

fn default_tol() -> f64 {
    1e-10
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            reconstruction: default_tol(),
            trace: default_tol(),
        }
    }
}

fn default_cases() -> usize {
    100
}

fn default_rewrite_steps() -> usize {
    10
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub p: Exponent,
    pub family: Family,
    pub decay: Decay,
    /// Truncation levels. The ladder suite walks them in order; the trace and
    /// factorization suites draw each case's dimension from them.
    pub ladder: Vec<usize>,
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    /// Exponents cycled through by the trace and factorization suites; `[p]` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_grid: Option<Vec<Exponent>>,
    #[serde(default = "default_cases")]
    pub cases: usize,
    #[serde(default = "default_rewrite_steps")]
    pub rewrite_steps: usize,
    /// Per-row ceiling on the ladder's tail fraction, when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_fraction_max: Option<f64>,
}

impl ExperimentConfig {
    pub fn new(p: Exponent, family: Family, decay: Decay, ladder: Vec<usize>, seed: u64) -> Self {
        ExperimentConfig {
            p,
            family,
            decay,
            ladder,
            seed,
            tolerances: Tolerances::default(),
            out_dir: default_out_dir(),
            p_grid: None,
            cases: default_cases(),
            rewrite_steps: default_rewrite_steps(),
            tail_fraction_max: None,
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let config: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.ladder.is_empty() {
            return bad("ladder must not be empty".into());
        }
        if self.ladder.windows(2).any(|w| w[1] <= w[0]) {
            return bad(format!("ladder {:?} must be strictly increasing", self.ladder));
        }
        if self.ladder[0] == 0 || *self.ladder.last().unwrap() > MAX_DIM {
            return bad(format!("ladder entries must lie in 1..={MAX_DIM}"));
        }
        if self.decay.term_count == 0 || self.decay.term_count > self.max_level() {
            return bad(format!(
                "term_count {} must lie in 1..={}",
                self.decay.term_count,
                self.max_level()
            ));
        }
        if !self.decay.exponent_multiplier.is_finite() || self.decay.exponent_multiplier < 1.0 {
            return bad(format!(
                "exponent_multiplier {} must be a finite value >= 1",
                self.decay.exponent_multiplier
            ));
        }
        let t = self.tolerances;
        if !(t.reconstruction > 0.0 && t.trace > 0.0) {
            return bad("tolerances must be positive".into());
        }
        if self.cases == 0 {
            return bad("cases must be positive".into());
        }
        if matches!(&self.p_grid, Some(g) if g.is_empty()) {
            return bad("p_grid must not be empty".into());
        }
        if matches!(self.tail_fraction_max, Some(x) if x.is_nan() || x <= 0.0) {
            return bad("tail_fraction_max must be positive".into());
        }
        Ok(())
    }

    pub fn max_level(&self) -> usize {
        self.ladder.last().copied().unwrap_or(0)
    }

    pub fn p_values(&self) -> Vec<Exponent> {
        self.p_grid.clone().unwrap_or_else(|| vec![self.p])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ExperimentConfig {
        ExperimentConfig::new(
            Exponent::TWO,
            Family::Diagonal,
            Decay {
                exponent_multiplier: 1.1,
                term_count: 64,
            },
            vec![16, 32, 64],
            42,
        )
    }

    #[test]
    fn round_trip() {
        let mut c = sample();
        c.p_grid = Some(vec![Exponent::TWO, Exponent::INFINITY, "7/3".parse().unwrap()]);
        c.tail_fraction_max = Some(0.3);
        c.tolerances.trace = 3.5e-11;
        let back: ExperimentConfig = serde_json::from_str(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn defaults_fill_in() {
        let c: ExperimentConfig = serde_json::from_str(
            r#"{"p":"inf","family":"random_unit","decay":{"exponent_multiplier":1.1,"term_count":4},
                "ladder":[8,16],"seed":1}"#,
        )
        .unwrap();
        assert_eq!(c.tolerances, Tolerances::default());
        assert_eq!(c.cases, 100);
        assert_eq!(c.p_values(), vec![Exponent::INFINITY]);
        c.validate().unwrap();
    }

    #[test]
    fn validation() {
        let mut c = sample();
        c.ladder.clear();
        assert!(c.validate().is_err());
        let mut c = sample();
        c.ladder = vec![32, 16];
        assert!(c.validate().is_err());
        let mut c = sample();
        c.ladder = vec![16, 5000];
        assert!(c.validate().is_err());
        let mut c = sample();
        c.decay.term_count = 65;
        assert!(c.validate().is_err());
        let mut c = sample();
        c.decay.exponent_multiplier = 0.9;
        assert!(c.validate().is_err());
        let mut c = sample();
        c.tolerances.trace = 0.0;
        assert!(c.validate().is_err());
        sample().validate().unwrap();
    }

    #[test]
    fn unknown_fields_rejected() {
        let r: std::result::Result<ExperimentConfig, _> = serde_json::from_str(
            r#"{"p":"2","family":"diagonal","decay":{"exponent_multiplier":1.1,"term_count":4},
                "ladder":[8],"seed":1,"sede":2}"#,
        );
        assert!(r.is_err());
    }
}
