//! The five-stage factorization of an s-nuclear operator on `ℓ_p`, `p ≥ 2`:
//!
//! ```text
//!   ℓ_p --A--> ℓ_∞ --Δ_{1-s}--> ℓ_r --j--> c₀ --Δ₁--> ℓ₂ --Δ₂--> ℓ₁ --B--> ℓ_p
//! ```
//!
//! `A` stacks the functionals as rows, `B` places the vectors as columns,
//! `Δ_{1-s} = diag(μ_k^{1-s})`, and `Δ_s = Δ₂Δ₁` is split evenly into two
//! copies of `diag(μ_k^{s/2})`. Grouping the stages as
//! `U₃ = jΔ_{1-s}A`, `U₂ = Δ₁`, `U₁ = BΔ₂` gives the three summing factors
//! with exponents `(r, 2, p)`, whose reciprocals add up to one.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
pub use crate::exponents::exponent_budget;
use crate::exponents::{check_holder_chain, Exponent, OrderExponent, ParameterTriple};
use crate::nuclear::NuclearRep;
use crate::seqspace::{compose, frobenius_distance, lp_norm_slice, DenseOperator, SpaceTag};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Pipeline {
    pub triple: ParameterTriple,
    pub mu: Vec<f64>,
    pub stage_a: DenseOperator,
    pub stage_d1ms: DenseOperator,
    pub stage_j: DenseOperator,
    pub stage_delta1: DenseOperator,
    pub stage_delta2: DenseOperator,
    pub stage_b: DenseOperator,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum StageLabel {
    U1,
    U2,
    U3,
}

impl fmt::Display for StageLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// An upper bound for the `exponent`-summing norm of one factor.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummingCertificate {
    pub stage_label: StageLabel,
    pub exponent: Exponent,
    pub bound: f64,
    pub formula: String,
}

/// Splits `Δ_s = diag(μ^s)` into two equal factors `diag(μ^{s/2})`.
pub fn split_diagonal(mu: &[f64], s: OrderExponent) -> Result<(Vec<f64>, Vec<f64>)> {
    if let Some(bad) = mu.iter().find(|m| m.is_nan() || **m <= 0.0) {
        return Err(Error::Degenerate(format!("diagonal entry {bad} is not positive")));
    }
    let half = s.to_f64() / 2.0;
    let d: Vec<f64> = mu.iter().map(|m| m.powf(half)).collect();
    Ok((d.clone(), d))
}

/// Builds the pipeline for `rep`, whose ambient exponent must already satisfy `p ≥ 2`.
pub fn build_pipeline(rep: &NuclearRep) -> Result<Pipeline> {
    let p = rep.p();
    if p < Exponent::TWO {
        return Err(Error::UnreducedExponent(p));
    }
    if rep.is_empty() {
        return Err(Error::Degenerate("representation has no terms".into()));
    }
    let triple = exponent_budget(p);
    let s = triple.s.to_f64();
    let mu = rep.mus();
    let (delta1, delta2) = split_diagonal(&mu, triple.s)?;
    let d1ms: Vec<f64> = mu.iter().map(|m| m.powf(1.0 - s)).collect();

    let n = mu.len();
    let ambient = rep.ambient();
    let linf = SpaceTag::linf(n)?;
    let lr = SpaceTag::lp(triple.r, n)?;
    let c0 = SpaceTag::c0(n)?;
    let l2 = SpaceTag::lp(Exponent::TWO, n)?;
    let l1 = SpaceTag::lp(Exponent::ONE, n)?;

    let d = ambient.dim();
    let terms = rep.terms();
    let a = nalgebra::DMatrix::from_fn(n, d, |k, i| terms[k].functional().coords()[i]);
    let b = nalgebra::DMatrix::from_fn(d, n, |i, k| terms[k].vector().coords()[i]);

    Ok(Pipeline {
        triple,
        stage_a: DenseOperator::new(a, ambient, linf)?,
        stage_d1ms: DenseOperator::diagonal(&d1ms, linf, lr)?,
        stage_j: DenseOperator::injection(lr, c0)?,
        stage_delta1: DenseOperator::diagonal(&delta1, c0, l2)?,
        stage_delta2: DenseOperator::diagonal(&delta2, l2, l1)?,
        stage_b: DenseOperator::new(b, l1, ambient)?,
        mu,
    })
}

/// Operator norm of `A: ℓ_p → ℓ_∞`, the largest `ℓ_{p'}` norm of a row.
fn norm_into_linf(a: &DenseOperator) -> f64 {
    let q = a.domain().norm_exponent().conjugate();
    a.matrix()
        .row_iter()
        .map(|row| lp_norm_slice(&row.iter().copied().collect::<Vec<_>>(), q))
        .fold(0.0, f64::max)
}

/// Operator norm of `B: ℓ₁ → ℓ_p`, the largest `ℓ_p` norm of a column.
fn norm_from_l1(b: &DenseOperator) -> f64 {
    let p = b.codomain().norm_exponent();
    b.matrix()
        .column_iter()
        .map(|col| lp_norm_slice(col.as_slice(), p))
        .fold(0.0, f64::max)
}

impl Pipeline {
    /// The six stages in application order.
    pub fn stages(&self) -> [&DenseOperator; 6] {
        [
            &self.stage_a,
            &self.stage_d1ms,
            &self.stage_j,
            &self.stage_delta1,
            &self.stage_delta2,
            &self.stage_b,
        ]
    }

    pub fn compose(&self) -> Result<DenseOperator> {
        compose(&self.stages().map(Clone::clone))
    }

    /// `U₃ = j Δ_{1-s} A : ℓ_p → c₀`.
    pub fn u3(&self) -> Result<DenseOperator> {
        compose(&[self.stage_a.clone(), self.stage_d1ms.clone(), self.stage_j.clone()])
    }

    /// `U₂ = Δ₁ : c₀ → ℓ₂`.
    pub fn u2(&self) -> DenseOperator {
        self.stage_delta1.clone()
    }

    /// `U₁ = B Δ₂ : ℓ₂ → ℓ_p`.
    pub fn u1(&self) -> Result<DenseOperator> {
        compose(&[self.stage_delta2.clone(), self.stage_b.clone()])
    }

    pub fn norm_a(&self) -> f64 {
        norm_into_linf(&self.stage_a)
    }

    pub fn norm_b(&self) -> f64 {
        norm_from_l1(&self.stage_b)
    }

    /// Largest relative deviation of `diag(Δ₁)·diag(Δ₂)·diag(Δ_{1-s})` from `μ`.
    pub fn diagonal_gap(&self) -> f64 {
        let d1 = self.stage_delta1.diagonal_entries();
        let d2 = self.stage_delta2.diagonal_entries();
        let dm = self.stage_d1ms.diagonal_entries();
        self.mu
            .iter()
            .enumerate()
            .map(|(k, m)| ((d1[k] * d2[k] * dm[k] - m) / m).abs())
            .fold(0.0, f64::max)
    }

    /// `‖compose(stages) - T‖_F / (1 + ‖T‖_F)` against the assembled operator.
    pub fn reconstruction_gap(&self, target: &DenseOperator) -> Result<f64> {
        let composed = self.compose()?;
        if composed.domain() != target.domain() || composed.codomain() != target.codomain() {
            return Err(Error::SpaceMismatch {
                expected: target.domain().to_string(),
                found: composed.domain().to_string(),
            });
        }
        Ok(frobenius_distance(&composed, target)? / (1.0 + target.frobenius_norm()))
    }

    pub fn certificates(&self) -> Vec<SummingCertificate> {
        summing_certificates(self)
    }
}

/// Upper bounds for the summing norms of `U₃ ∈ Π_r`, `U₂ ∈ Π₂`, `U₁ ∈ Π_p`.
pub fn summing_certificates(pipe: &Pipeline) -> Vec<SummingCertificate> {
    let t = pipe.triple;
    let d1ms = pipe.stage_d1ms.diagonal_entries();
    let delta1 = pipe.stage_delta1.diagonal_entries();
    let delta2 = pipe.stage_delta2.diagonal_entries();
    let (norm_a, norm_b) = (pipe.norm_a(), pipe.norm_b());
    let r_norm = lp_norm_slice(&d1ms, t.r);
    let u3_formula = if t.r.is_infinite() {
        "sup_k mu_k^(1-s) * ||A: l_p -> l_inf||"
    } else {
        "||(mu_k^(1-s))||_r * ||A: l_p -> l_inf||"
    };
    vec![
        SummingCertificate {
            stage_label: StageLabel::U3,
            exponent: t.r,
            bound: r_norm * norm_a,
            formula: u3_formula.into(),
        },
        SummingCertificate {
            stage_label: StageLabel::U2,
            exponent: Exponent::TWO,
            bound: lp_norm_slice(&delta1, Exponent::TWO),
            formula: "||(mu_k^(s/2))||_2 = (sum_k mu_k^s)^(1/2)".into(),
        },
        SummingCertificate {
            stage_label: StageLabel::U1,
            exponent: t.p,
            bound: norm_b * lp_norm_slice(&delta2, Exponent::TWO),
            formula: "||B: l_1 -> l_p|| * (sum_k mu_k^s)^(1/2); upper bound, sharpness not established"
                .into(),
        },
    ]
}

/// True iff the certificate exponents form an exact Hölder chain.
pub fn certificates_chain_exact(certs: &[SummingCertificate]) -> bool {
    check_holder_chain(&certs.iter().map(|c| c.exponent).collect::<Vec<_>>())
}

/// Pipeline together with its certificates, as emitted by `factorize`.
#[derive(Serialize)]
pub struct PipelineReport<'a> {
    pub pipeline: &'a Pipeline,
    pub diagonals: Diagonals,
    pub certificates: Vec<SummingCertificate>,
    pub chain_exact: bool,
    pub reconstruction_gap: f64,
    pub diagonal_gap: f64,
}

#[derive(Serialize)]
pub struct Diagonals {
    pub d1ms: Vec<f64>,
    pub delta1: Vec<f64>,
    pub delta2: Vec<f64>,
}

impl<'a> PipelineReport<'a> {
    pub fn new(pipeline: &'a Pipeline, rep: &NuclearRep) -> Result<Self> {
        let certificates = pipeline.certificates();
        Ok(PipelineReport {
            diagonals: Diagonals {
                d1ms: pipeline.stage_d1ms.diagonal_entries(),
                delta1: pipeline.stage_delta1.diagonal_entries(),
                delta2: pipeline.stage_delta2.diagonal_entries(),
            },
            chain_exact: certificates_chain_exact(&certificates),
            certificates,
            reconstruction_gap: pipeline.reconstruction_gap(&rep.assemble())?,
            diagonal_gap: pipeline.diagonal_gap(),
            pipeline,
        })
    }
}
