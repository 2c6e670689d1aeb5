//! Finite s-nuclear representations `T = Σ_k μ_k y'_k ⊗ y_k`.
//!
//! A [`NuclearRep`] lives on an ambient `ℓ_p` truncation. Functionals carry
//! the conjugate tag `ℓ_{p'}`. On construction every functional and vector is
//! normalized to unit norm and the scales are absorbed into `μ_k`, which are
//! kept nonnegative and sorted in nonincreasing order.
//!
//! The rewrites in this module change the term list without changing the
//! assembled operator. They exist to probe that the nuclear trace depends on
//! the operator and not on the representation.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::{s_from_p, Exponent, OrderExponent};
use crate::rng;
use crate::seqspace::{dual_pairing, frobenius_distance, DenseOperator, SpaceKind, SpaceTag, Vector};

/// Coefficients below this are dropped at construction.
pub const MU_FLOOR: f64 = 1e-300;

/// Coordinates closer than this (max-abs) count as the same direction when merging.
const MERGE_TOL: f64 = 1e-12;

/// One term `μ · (functional ⊗ vector)` with unit-norm factors.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    mu: f64,
    functional: Vector,
    vector: Vector,
}

impl Term {
    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn functional(&self) -> &Vector {
        &self.functional
    }

    pub fn vector(&self) -> &Vector {
        &self.vector
    }
}

/// Unnormalized input for one term; also the JSON shape of a term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawTerm {
    pub mu: f64,
    pub functional: Vec<f64>,
    pub vector: Vec<f64>,
}

impl RawTerm {
    pub fn new(mu: f64, functional: Vec<f64>, vector: Vec<f64>) -> Self {
        RawTerm {
            mu,
            functional,
            vector,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NuclearRep {
    ambient: SpaceTag,
    order: OrderExponent,
    terms: Vec<Term>,
    dropped: usize,
}

fn ambient_p(ambient: &SpaceTag) -> Result<Exponent> {
    match ambient.kind() {
        SpaceKind::Lp { p } => Ok(p),
        _ => Err(Error::SpaceMismatch {
            expected: "an l_p ambient space".into(),
            found: ambient.to_string(),
        }),
    }
}

/// Normalizes raw terms; returns the kept terms and the number dropped.
fn normalize_terms(
    ambient: SpaceTag,
    raw: impl IntoIterator<Item = RawTerm>,
) -> Result<(Vec<Term>, usize)> {
    let dual = ambient.conjugate();
    let mut terms = Vec::new();
    let mut dropped = 0;
    for t in raw {
        if !t.mu.is_finite() {
            return Err(Error::Degenerate(format!("non-finite coefficient {}", t.mu)));
        }
        let f = Vector::new(t.functional, dual)?;
        let v = Vector::new(t.vector, ambient)?;
        let (nf, nv) = (f.norm(), v.norm());
        if !nf.is_finite() || !nv.is_finite() {
            return Err(Error::Degenerate("non-finite coordinates".into()));
        }
        let mu = t.mu.abs() * nf * nv;
        if mu.is_nan() || mu < MU_FLOOR {
            dropped += 1;
            continue;
        }
        let sign = t.mu.signum();
        terms.push(Term {
            mu,
            functional: f.scaled(1.0 / nf),
            vector: v.scaled(sign / nv),
        });
    }
    Ok((terms, dropped))
}

fn sort_terms(terms: &mut [Term]) {
    terms.sort_by(|a, b| b.mu.total_cmp(&a.mu));
}

impl NuclearRep {
    /// Builds a representation on `ambient` (an `ℓ_p` tag) with order `s(p)`.
    ///
    /// Negative coefficients are folded into the sign of the vector.
    pub fn new(ambient: SpaceTag, raw: impl IntoIterator<Item = RawTerm>) -> Result<Self> {
        let p = ambient_p(&ambient)?;
        let (mut terms, dropped) = normalize_terms(ambient, raw)?;
        sort_terms(&mut terms);
        Ok(NuclearRep {
            ambient,
            order: s_from_p(p),
            terms,
            dropped,
        })
    }

    /// Overrides the order `s` recorded with the representation.
    pub fn with_order(mut self, order: OrderExponent) -> Self {
        self.order = order;
        self
    }

    fn with_terms(&self, mut terms: Vec<Term>) -> NuclearRep {
        sort_terms(&mut terms);
        NuclearRep {
            ambient: self.ambient,
            order: self.order,
            terms,
            dropped: self.dropped,
        }
    }

    pub fn ambient(&self) -> SpaceTag {
        self.ambient
    }

    pub fn p(&self) -> Exponent {
        self.ambient.norm_exponent()
    }

    pub fn order(&self) -> OrderExponent {
        self.order
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of input terms discarded at construction for falling below [`MU_FLOOR`].
    pub fn dropped(&self) -> usize {
        self.dropped
    }

    pub fn mus(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.mu).collect()
    }

    pub fn mu_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.mu).sum()
    }

    /// `(Σ_k (μ_k ‖y'_k‖ ‖y_k‖)^s)^{1/s}` for this representation.
    ///
    /// This is an upper bound for the `s`-quasi-norm of the operator, which is
    /// the infimum of this quantity over all representations.
    pub fn quasi_norm_value(&self, s: OrderExponent) -> f64 {
        let weights: Vec<f64> = self
            .terms
            .iter()
            .map(|t| t.mu * t.functional.norm() * t.vector.norm())
            .collect();
        let max = weights.iter().fold(0.0f64, |m, &w| m.max(w));
        if max == 0.0 {
            return 0.0;
        }
        let sf = s.to_f64();
        let sum: f64 = weights.iter().map(|w| (w / max).powf(sf)).sum();
        max * sum.powf(1.0 / sf)
    }

    /// `Σ_k μ_k ⟨y'_k, y_k⟩`.
    pub fn nuclear_trace(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.mu * dual_pairing(&t.functional, &t.vector).expect("tags fixed at construction"))
            .sum()
    }

    /// The matrix `Σ_k μ_k y_k y'_kᵀ` acting on the ambient space.
    pub fn assemble(&self) -> DenseOperator {
        let d = self.ambient.dim();
        let k = self.terms.len();
        let vectors = DMatrix::from_fn(d, k, |i, j| self.terms[j].mu * self.terms[j].vector.coords()[i]);
        let functionals = DMatrix::from_fn(k, d, |i, j| self.terms[i].functional.coords()[j]);
        let matrix = if k == 0 {
            DMatrix::zeros(d, d)
        } else {
            vectors * functionals
        };
        DenseOperator::new(matrix, self.ambient, self.ambient).expect("shape fixed by ambient")
    }

    /// The adjoint representation `Σ μ_k y_k ⊗ y'_k` on `ℓ_{p'}`.
    pub fn adjoint(&self) -> NuclearRep {
        let ambient = self.ambient.conjugate();
        let dual = self.ambient;
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                mu: t.mu,
                functional: t.vector.retagged(dual).expect("same dim"),
                vector: t.functional.retagged(ambient).expect("same dim"),
            })
            .collect();
        NuclearRep {
            ambient,
            order: self.order,
            terms,
            dropped: self.dropped,
        }
    }

    /// Appends the terms of `other`, which must share the ambient space.
    pub fn concat(&self, other: &NuclearRep) -> Result<NuclearRep> {
        self.check_ambient(other)?;
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(self.with_terms(terms))
    }

    fn check_ambient(&self, other: &NuclearRep) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::SpaceMismatch {
                expected: self.ambient.to_string(),
                found: other.ambient.to_string(),
            });
        }
        Ok(())
    }

    /// Replaces term `index` by two half-weight copies.
    pub fn split_term(&self, index: usize) -> Result<NuclearRep> {
        let t = self.terms.get(index).ok_or_else(|| Error::RewriteInapplicable {
            scheme: "split",
            reason: format!("no term {index} in a {}-term representation", self.len()),
        })?;
        let half = Term {
            mu: t.mu / 2.0,
            ..t.clone()
        };
        let mut terms = self.terms.clone();
        terms[index] = half.clone();
        terms.insert(index + 1, half);
        Ok(self.with_terms(terms))
    }

    /// Index pairs `(i, j)`, `i < j`, whose functionals and vectors coincide.
    pub fn mergeable_pairs(&self) -> Vec<(usize, usize)> {
        let close = |a: &Vector, b: &Vector| {
            a.coords()
                .iter()
                .zip(b.coords())
                .all(|(x, y)| (x - y).abs() <= MERGE_TOL)
        };
        let mut pairs = Vec::new();
        for i in 0..self.terms.len() {
            for j in i + 1..self.terms.len() {
                let (a, b) = (&self.terms[i], &self.terms[j]);
                if close(&a.functional, &b.functional) && close(&a.vector, &b.vector) {
                    pairs.push((i, j));
                }
            }
        }
        pairs
    }

    /// Merges two parallel terms into one carrying the summed coefficient.
    pub fn merge_pair(&self, i: usize, j: usize) -> Result<NuclearRep> {
        if !self.mergeable_pairs().contains(&(i.min(j), i.max(j))) {
            return Err(Error::RewriteInapplicable {
                scheme: "merge",
                reason: format!("terms {i} and {j} are not parallel"),
            });
        }
        let (i, j) = (i.min(j), i.max(j));
        let mut terms = self.terms.clone();
        let absorbed = terms.remove(j);
        terms[i].mu += absorbed.mu;
        Ok(self.with_terms(terms))
    }

    /// Rewrites terms `i` and `j` through a plane rotation `Q(θ)`.
    ///
    /// With `F = [y'_i y'_j]` and `W = [μ_i y_i; μ_j y_j]`, the pair is
    /// replaced by the columns of `F Qᵀ` and the rows of `Q W`. Since
    /// `F Qᵀ Q W = F W` the assembled operator is unchanged. A pair sharing a
    /// functional keeps sharing it (up to scale) after the rewrite.
    pub fn rotate_pair(&self, i: usize, j: usize, theta: f64) -> Result<NuclearRep> {
        if i == j || i >= self.len() || j >= self.len() {
            return Err(Error::RewriteInapplicable {
                scheme: "rotate",
                reason: format!("invalid pair ({i}, {j}) for {} terms", self.len()),
            });
        }
        let (c, s) = (theta.cos(), theta.sin());
        let (a, b) = (&self.terms[i], &self.terms[j]);
        let mix = |x: &[f64], y: &[f64], cx: f64, cy: f64| -> Vec<f64> {
            x.iter().zip(y).map(|(u, v)| cx * u + cy * v).collect()
        };
        let (fa, fb) = (a.functional.coords(), b.functional.coords());
        let wa: Vec<f64> = a.vector.coords().iter().map(|x| a.mu * x).collect();
        let wb: Vec<f64> = b.vector.coords().iter().map(|x| b.mu * x).collect();
        let rotated = [
            RawTerm::new(1.0, mix(fa, fb, c, -s), mix(&wa, &wb, c, -s)),
            RawTerm::new(1.0, mix(fa, fb, s, c), mix(&wa, &wb, s, c)),
        ];
        let (new_terms, _) = normalize_terms(self.ambient, rotated)?;
        let mut terms: Vec<Term> = self
            .terms
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i && k != j)
            .map(|(_, t)| t.clone())
            .collect();
        terms.extend(new_terms);
        Ok(self.with_terms(terms))
    }

    /// Applies one seeded rewrite of the given scheme.
    pub fn rewrite_equivalent(&self, scheme: RewriteScheme, seed: u64) -> Result<NuclearRep> {
        let mut rng = rng::stream(seed, 0);
        self.rewrite_with(scheme, &mut rng)
    }

    fn rewrite_with(&self, scheme: RewriteScheme, rng: &mut rng::Rng) -> Result<NuclearRep> {
        match scheme {
            RewriteScheme::Split => {
                if self.is_empty() {
                    return Err(Error::RewriteInapplicable {
                        scheme: "split",
                        reason: "representation has no terms".into(),
                    });
                }
                self.split_term(rng.random_range(0..self.len()))
            }
            RewriteScheme::Merge => {
                let pairs = self.mergeable_pairs();
                if pairs.is_empty() {
                    return Err(Error::RewriteInapplicable {
                        scheme: "merge",
                        reason: "no parallel pair of terms".into(),
                    });
                }
                let (i, j) = pairs[rng.random_range(0..pairs.len())];
                self.merge_pair(i, j)
            }
            RewriteScheme::Rotate => {
                if self.len() < 2 {
                    return Err(Error::RewriteInapplicable {
                        scheme: "rotate",
                        reason: "need at least two terms".into(),
                    });
                }
                let i = rng.random_range(0..self.len());
                let mut j = rng.random_range(0..self.len() - 1);
                if j >= i {
                    j += 1;
                }
                let theta = rng.random_range(0.0..std::f64::consts::TAU);
                self.rotate_pair(i, j, theta)
            }
        }
    }

    /// Applies `steps` rewrites, each drawn uniformly from the applicable schemes.
    pub fn rewrite_chain(&self, steps: usize, seed: u64) -> Result<(NuclearRep, Vec<RewriteScheme>)> {
        let mut rng = rng::stream(seed, 1);
        let mut rep = self.clone();
        let mut applied = Vec::with_capacity(steps);
        for _ in 0..steps {
            let mut options = Vec::with_capacity(3);
            if !rep.is_empty() {
                options.push(RewriteScheme::Split);
            }
            if !rep.mergeable_pairs().is_empty() {
                options.push(RewriteScheme::Merge);
            }
            if rep.len() >= 2 {
                options.push(RewriteScheme::Rotate);
            }
            if options.is_empty() {
                break;
            }
            let scheme = options[rng.random_range(0..options.len())];
            rep = rep.rewrite_with(scheme, &mut rng)?;
            applied.push(scheme);
        }
        Ok((rep, applied))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RewriteScheme {
    Split,
    Merge,
    Rotate,
}

impl fmt::Display for RewriteScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RewriteScheme::Split => "split",
            RewriteScheme::Merge => "merge",
            RewriteScheme::Rotate => "rotate",
        })
    }
}

impl FromStr for RewriteScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "split" => Ok(RewriteScheme::Split),
            "merge" => Ok(RewriteScheme::Merge),
            "rotate" => Ok(RewriteScheme::Rotate),
            other => Err(Error::Config(format!("unknown rewrite scheme `{other}`"))),
        }
    }
}

pub fn quasi_norm_value(rep: &NuclearRep, s: OrderExponent) -> f64 {
    rep.quasi_norm_value(s)
}

pub fn nuclear_trace(rep: &NuclearRep) -> f64 {
    rep.nuclear_trace()
}

pub fn assemble(rep: &NuclearRep) -> DenseOperator {
    rep.assemble()
}

pub fn rewrite_equivalent(rep: &NuclearRep, scheme: RewriteScheme, seed: u64) -> Result<NuclearRep> {
    rep.rewrite_equivalent(scheme, seed)
}

/// `‖T₁ - T₂‖_F ≤ tol · (1 + ‖T₁‖_F)` for the assembled operators.
pub fn equivalent(rep1: &NuclearRep, rep2: &NuclearRep, tol: f64) -> Result<bool> {
    rep1.check_ambient(rep2)?;
    let (a, b) = (rep1.assemble(), rep2.assemble());
    Ok(frobenius_distance(&a, &b)? <= tol * (1.0 + a.frobenius_norm()))
}

#[derive(Serialize, Deserialize)]
struct AmbientJson {
    p: Exponent,
    dim: usize,
}

#[derive(Serialize, Deserialize)]
struct RepJson {
    ambient: AmbientJson,
    order_s: OrderExponent,
    terms: Vec<RawTerm>,
}

impl Serialize for NuclearRep {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RepJson {
            ambient: AmbientJson {
                p: self.p(),
                dim: self.ambient.dim(),
            },
            order_s: self.order,
            terms: self
                .terms
                .iter()
                .map(|t| RawTerm::new(t.mu, t.functional.coords().to_vec(), t.vector.coords().to_vec()))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for NuclearRep {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RepJson::deserialize(d)?;
        let ambient = SpaceTag::lp(raw.ambient.p, raw.ambient.dim).map_err(D::Error::custom)?;
        NuclearRep::new(ambient, raw.terms)
            .map(|rep| rep.with_order(raw.order_s))
            .map_err(D::Error::custom)
    }
}
