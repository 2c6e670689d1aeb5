//! Seeded representation families.
//!
//! Coefficients follow `μ_k = k^{-(1/s)·m}` with `m` the decay multiplier, so
//! `Σ μ_k^s` converges whenever `m > 1`. Random coordinates for term `k` are
//! drawn from their own stream, so raising the truncation level extends every
//! vector instead of redrawing it.

use num_traits::ToPrimitive;
use rand::Rng as _;
use rand_distr::StandardNormal;

use super::config::{ExperimentConfig, Family};
use crate::error::{Error, Result};
use crate::exponents::{s_from_p, Exponent};
use crate::nuclear::{NuclearRep, RawTerm};
use crate::rng;
use crate::seqspace::{normalize, SpaceTag, Vector};

/// Everything needed to draw one representation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FamilySpec {
    pub family: Family,
    pub p: Exponent,
    pub dim: usize,
    pub terms: usize,
    pub exponent_multiplier: f64,
    pub seed: u64,
    /// Stream id; suites use the case index.
    pub stream: u64,
}

/// `k^{-(1/s)·m}` for `k = 1..=n`.
pub fn decay_coefficients(p: Exponent, multiplier: f64, n: usize) -> Vec<f64> {
    let inv_s = s_from_p(p).reciprocal().to_f64().expect("small rational");
    let a = inv_s * multiplier;
    (1..=n).map(|k| (k as f64).powf(-a)).collect()
}

fn gaussian_unit(seed: u64, stream: u64, sub: u64, space: SpaceTag) -> Result<Vec<f64>> {
    let mut rng = rng::substream(seed, stream, sub);
    let coords: Vec<f64> = (0..space.dim()).map(|_| rng.sample(StandardNormal)).collect();
    Ok(normalize(&Vector::new(coords, space)?)?.into_coords())
}

pub fn generate(spec: &FamilySpec) -> Result<NuclearRep> {
    let ambient = SpaceTag::lp(spec.p, spec.dim)?;
    let dual = ambient.conjugate();
    if spec.terms == 0 {
        return Err(Error::Config("a family needs at least one term".into()));
    }
    let mu = decay_coefficients(spec.p, spec.exponent_multiplier, spec.terms);
    match spec.family {
        Family::Diagonal => {
            if spec.terms > spec.dim {
                return Err(Error::Config(format!(
                    "diagonal family has at most {} terms in dimension {}",
                    spec.dim, spec.dim
                )));
            }
            let terms = mu.iter().enumerate().map(|(k, &m)| {
                let mut e = vec![0.0; spec.dim];
                e[k] = 1.0;
                RawTerm::new(m, e.clone(), e)
            });
            NuclearRep::new(ambient, terms)
        }
        Family::RandomUnit => {
            let mut terms = Vec::with_capacity(spec.terms);
            for (k, &m) in mu.iter().enumerate() {
                let k = k as u64;
                let f = gaussian_unit(spec.seed, spec.stream, 2 * k, dual)?;
                let v = gaussian_unit(spec.seed, spec.stream, 2 * k + 1, ambient)?;
                terms.push(RawTerm::new(m, f, v));
            }
            NuclearRep::new(ambient, terms)
        }
        Family::SharedFunctionalRotations => {
            let mut rep = NuclearRep::new(ambient, [])?;
            let mut angles = rng::substream(spec.seed, spec.stream, u64::MAX);
            for (j, pair) in mu.chunks(2).enumerate() {
                let j = j as u64;
                let f = gaussian_unit(spec.seed, spec.stream, 3 * j, dual)?;
                let mut raw = Vec::with_capacity(2);
                for (i, &m) in pair.iter().enumerate() {
                    let v = gaussian_unit(spec.seed, spec.stream, 3 * j + 1 + i as u64, ambient)?;
                    raw.push(RawTerm::new(m, f.clone(), v));
                }
                let mut block = NuclearRep::new(ambient, raw)?;
                let theta = angles.random_range(0.0..std::f64::consts::TAU);
                if block.len() == 2 {
                    block = block.rotate_pair(0, 1, theta)?;
                }
                rep = rep.concat(&block)?;
            }
            Ok(rep)
        }
    }
}

/// The family named in `config` at truncation `n`, on stream 0.
pub fn generate_family(config: &ExperimentConfig, n: usize) -> Result<NuclearRep> {
    if n == 0 || n > config.max_level() {
        return Err(Error::Config(format!(
            "truncation {n} outside 1..={}",
            config.max_level()
        )));
    }
    generate(&FamilySpec {
        family: config.family,
        p: config.p,
        dim: n,
        terms: config.decay.term_count.min(n),
        exponent_multiplier: config.decay.exponent_multiplier,
        seed: config.seed,
        stream: 0,
    })
}
