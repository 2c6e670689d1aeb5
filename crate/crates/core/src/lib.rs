//! Numerical experiments on s-nuclear operators over truncated sequence spaces.
//!
//! For `p ∈ [1, ∞]` and `1/s = 1 + |1/2 - 1/p|`, every s-nuclear operator on
//! a subspace of `L_p` has a well-defined nuclear trace equal to the sum of
//! its eigenvalues, and its eigenvalues are absolutely summable. This crate
//! builds such operators on finite truncations of `ℓ_p`, runs the
//! factorization through diagonal and summing operators that underlies the
//! result, and checks the trace and summability statements numerically.
//!
//! Modules, bottom-up:
//!
//! - [`exponents`]: exact rational arithmetic for `p`, `p'`, `s`, `r`.
//! - [`seqspace`]: vectors, norms and tagged dense operators on `ℓ_p`, `c₀`, `ℓ_∞`.
//! - [`nuclear`]: representations `Σ μ_k y'_k ⊗ y_k`, their trace and rewrites.
//! - [`factorization`]: the five-stage pipeline and summing-norm certificates.
//! - [`spectra`]: eigenvalues, trace residuals, Weyl checks, truncation ladders.
//! - [`harness`]: seeded generators, experiment suites, reports and the CLI.

pub mod error;
pub mod exponents;
pub mod factorization;
pub mod harness;
pub mod nuclear;
pub mod rng;
pub mod seqspace;
pub mod spectra;

pub use error::{Error, Result};
pub use exponents::{Exponent, OrderExponent, ParameterTriple};
pub use factorization::{build_pipeline, Pipeline, SummingCertificate};
pub use nuclear::{NuclearRep, RawTerm, RewriteScheme};
pub use seqspace::{DenseOperator, SpaceKind, SpaceTag, Vector};
pub use spectra::{spectral_report, LadderRow, SpectralReport, WeylCheck};
