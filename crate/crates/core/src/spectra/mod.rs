//! Eigenvalues of assembled truncations and the diagnostics built on them.
//!
//! Spectra are computed by orthogonal reduction to Hessenberg form followed by
//! the Francis double-shift QR iteration, which is backward stable. Eigenvalues are
//! reported with algebraic multiplicity, ordered by nonincreasing modulus;
//! ties in modulus are ordered by ascending principal argument in `(-π, π]`.

use nalgebra::SVD;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exponents::OrderExponent;
use crate::nuclear::NuclearRep;
use crate::seqspace::DenseOperator;

mod hqr;

/// Relative budget for the finite-dimensional trace identity and the Weyl checks.
pub const SPECTRAL_TOL: f64 = 1e-9;

fn max_iterations(n: usize) -> usize {
    (100 * n).max(1000)
}

fn serialize_complex<S: Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

fn serialize_complex_seq<S: Serializer>(zs: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(zs.len()))?;
    for z in zs {
        seq.serialize_element(&[z.re, z.im])?;
    }
    seq.end()
}

/// Principal argument in `(-π, π]`, with `arg(0) = 0`.
fn principal_arg(z: &Complex64) -> f64 {
    if z.re == 0.0 && z.im == 0.0 {
        return 0.0;
    }
    let a = z.im.atan2(z.re);
    if a <= -std::f64::consts::PI {
        std::f64::consts::PI
    } else {
        a
    }
}

/// Sorts by nonincreasing modulus; runs of moduli equal up to rounding are
/// ordered by ascending argument.
pub fn sort_spectrum(mut values: Vec<Complex64>) -> Vec<Complex64> {
    for z in values.iter_mut() {
        // canonical zero signs keep the ordering and the JSON output stable
        if z.re == 0.0 {
            z.re = 0.0;
        }
        if z.im == 0.0 {
            z.im = 0.0;
        }
    }
    values.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    let top = values.first().map_or(0.0, |z| z.norm());
    let tie = 64.0 * f64::EPSILON * top;
    let mut start = 0;
    while start < values.len() {
        let mut end = start + 1;
        while end < values.len() && values[end - 1].norm() - values[end].norm() <= tie {
            end += 1;
        }
        values[start..end].sort_by(|a, b| principal_arg(a).total_cmp(&principal_arg(b)));
        start = end;
    }
    values
}

/// All eigenvalues of a square endomorphism, sorted as described in the module docs.
pub fn eigen_spectrum(op: &DenseOperator) -> Result<Vec<Complex64>> {
    let m = op.matrix();
    if !m.is_square() {
        return Err(Error::LengthMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    if !op.is_endomorphism() {
        return Err(Error::SpaceMismatch {
            expected: op.domain().to_string(),
            found: op.codomain().to_string(),
        });
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::Degenerate("matrix has non-finite entries".into()));
    }
    let n = m.nrows();
    let h = m.clone().hessenberg().unpack_h();
    let row_major: Vec<f64> = h.transpose().as_slice().to_vec();
    let values = hqr::hessenberg_eigenvalues(n, row_major).ok_or(Error::NoConvergence(n))?;
    Ok(sort_spectrum(values))
}

/// Singular values of the matrix, in nonincreasing order.
pub fn singular_values(op: &DenseOperator) -> Result<Vec<f64>> {
    let n = op.matrix().nrows().min(op.matrix().ncols());
    let svd = SVD::try_new(op.matrix().clone(), false, false, f64::EPSILON, max_iterations(n))
        .ok_or(Error::NoConvergence(n))?;
    let mut values: Vec<f64> = svd.singular_values.iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralReport {
    pub dim: usize,
    #[serde(serialize_with = "serialize_complex_seq")]
    pub eigenvalues: Vec<Complex64>,
    pub matrix_trace: f64,
    pub nuclear_trace: f64,
    #[serde(serialize_with = "serialize_complex")]
    pub eigen_sum: Complex64,
    pub abs_sum: f64,
    pub lidskii_residual: f64,
}

impl SpectralReport {
    /// Builds the report fields for an operator and the nuclear trace of its representation.
    pub fn from_operator(op: &DenseOperator, nuclear_trace: f64) -> Result<Self> {
        let eigenvalues = eigen_spectrum(op)?;
        let eigen_sum: Complex64 = eigenvalues.iter().sum();
        let abs_sum = eigenvalues.iter().map(|z| z.norm()).sum();
        Ok(SpectralReport {
            dim: eigenvalues.len(),
            matrix_trace: op.trace(),
            nuclear_trace,
            eigen_sum,
            abs_sum,
            lidskii_residual: (Complex64::new(nuclear_trace, 0.0) - eigen_sum).norm(),
            eigenvalues,
        })
    }

    /// `|eigen_sum - matrix_trace| ≤ 1e-9 · (1 + Σ|λ|)`.
    pub fn trace_identity_holds(&self) -> bool {
        (self.eigen_sum - Complex64::new(self.matrix_trace, 0.0)).norm()
            <= SPECTRAL_TOL * (1.0 + self.abs_sum)
    }

    /// Imaginary part of the eigenvalue sum is at rounding level (conjugate pairing).
    pub fn conjugate_pairing_holds(&self) -> bool {
        self.eigen_sum.im.abs() <= SPECTRAL_TOL * (1.0 + self.abs_sum)
    }

    /// Sum of `|λ_n|` over indices `n > N/4` (one-based) divided by `Σ|λ_n|`.
    pub fn tail_fraction(&self) -> f64 {
        if self.abs_sum == 0.0 {
            return 0.0;
        }
        let tail: f64 = self.eigenvalues.iter().skip(self.dim / 4).map(|z| z.norm()).sum();
        tail / self.abs_sum
    }
}

pub fn spectral_report(rep: &NuclearRep) -> Result<SpectralReport> {
    SpectralReport::from_operator(&rep.assemble(), rep.nuclear_trace())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeylCheck {
    pub abs_sum: f64,
    pub singular_sum: f64,
    pub nuclear_bound: f64,
    pub pass: bool,
}

/// Checks `Σ|λ_n| ≤ Σσ_n ≤ Σμ_k` within `1e-9 · (1 + Σμ_k)`.
///
/// The second inequality uses the Euclidean unit-norm of the factors, so it
/// is a valid bound for representations on `ℓ₂`.
pub fn weyl_check(rep: &NuclearRep) -> Result<WeylCheck> {
    let op = rep.assemble();
    let abs_sum: f64 = eigen_spectrum(&op)?.iter().map(|z| z.norm()).sum();
    let singular_sum: f64 = singular_values(&op)?.iter().sum();
    let nuclear_bound = rep.mu_sum();
    let tol = SPECTRAL_TOL * (1.0 + nuclear_bound);
    Ok(WeylCheck {
        abs_sum,
        singular_sum,
        nuclear_bound,
        pass: abs_sum <= singular_sum + tol && singular_sum <= nuclear_bound + tol,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LadderRow {
    pub level: usize,
    pub abs_sum: f64,
    pub tail_fraction: f64,
    pub residual: f64,
    /// Value of the representation's `s`-quasi-norm at this level.
    pub quasi_norm: f64,
    /// `abs_sum / quasi_norm`; reported, not bounded.
    pub ratio: f64,
}

/// Evaluates `family` at each truncation level. Levels run in parallel; rows
/// come back in ladder order.
pub fn summability_ladder<F>(family: F, levels: &[usize], s: OrderExponent) -> Result<Vec<LadderRow>>
where
    F: Fn(usize) -> Result<NuclearRep> + Sync,
{
    if levels.is_empty() || levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config(format!("ladder {levels:?} must be nonempty and strictly increasing")));
    }
    levels
        .par_iter()
        .map(|&level| {
            let rep = family(level)?;
            let report = spectral_report(&rep)?;
            let quasi_norm = rep.quasi_norm_value(s);
            Ok(LadderRow {
                level,
                abs_sum: report.abs_sum,
                tail_fraction: report.tail_fraction(),
                residual: report.lidskii_residual,
                quasi_norm,
                ratio: if quasi_norm > 0.0 { report.abs_sum / quasi_norm } else { 0.0 },
            })
        })
        .collect()
}

/// Scientific notation with 12 significant digits and a signed two-digit
/// exponent, e.g. `1.23456789012e-03`.
pub fn sci12(x: f64) -> String {
    let s = format!("{x:.11e}");
    match s.split_once('e') {
        Some((mantissa, exp)) => {
            let exp: i32 = exp.parse().expect("rust float exponent");
            format!("{mantissa}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
        }
        None => s,
    }
}

pub const LADDER_CSV_HEADER: &str = "level,abs_sum,tail_fraction,residual";

pub fn ladder_csv(rows: &[LadderRow]) -> String {
    let mut out = String::from(LADDER_CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.level,
            sci12(row.abs_sum),
            sci12(row.tail_fraction),
            sci12(row.residual)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::Exponent;
    use crate::nuclear::RawTerm;
    use crate::seqspace::SpaceTag;
    use nalgebra::DMatrix;

    fn op(rows: usize, data: &[f64]) -> DenseOperator {
        let t = SpaceTag::lp(Exponent::TWO, rows).unwrap();
        DenseOperator::new(DMatrix::from_row_slice(rows, rows, data), t, t).unwrap()
    }

    fn e(i: usize, dim: usize) -> Vec<f64> {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        v
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_spectrum_sorted() {
        let ev = eigen_spectrum(&op(3, &[3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0])).unwrap();
        assert_eq!(ev, vec![c(3.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn nilpotent_spectrum_is_zero() {
        let ev = eigen_spectrum(&op(2, &[0.0, 0.0, 1.0, 0.0])).unwrap();
        assert!(ev.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn square_root_pair() {
        // λ² = 1/4
        let ev = eigen_spectrum(&op(2, &[0.0, 1.0, 0.25, 0.0])).unwrap();
        assert!((ev[0] - c(0.5, 0.0)).norm() < 1e-14, "{ev:?}");
        assert!((ev[1] - c(-0.5, 0.0)).norm() < 1e-14, "{ev:?}");
    }

    #[test]
    fn rotation_gives_conjugate_pair_in_argument_order() {
        // rotation by π/2: eigenvalues ±i
        let ev = eigen_spectrum(&op(2, &[0.0, -1.0, 1.0, 0.0])).unwrap();
        assert!((ev[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((ev[1] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn cyclic_permutation_converges() {
        // roots of unity; a classic stall case for unshifted QR
        let n = 6;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[((i + 1) % n) * n + i] = 1.0;
        }
        let ev = eigen_spectrum(&op(n, &data)).unwrap();
        for z in &ev {
            assert!((z.norm() - 1.0).abs() < 1e-12);
        }
        let sum: Complex64 = ev.iter().sum();
        assert!(sum.norm() < 1e-12);
    }

    #[test]
    fn ordering_ties_and_zero() {
        let sorted = sort_spectrum(vec![c(0.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0), c(1.0, 0.0), c(0.0, -1.0), c(2.0, 0.0)]);
        assert_eq!(
            sorted,
            vec![c(2.0, 0.0), c(0.0, -1.0), c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, 0.0)]
        );
        assert_eq!(principal_arg(&c(-1.0, -0.0)), std::f64::consts::PI);
    }

    #[test]
    fn rejects_non_endomorphisms() {
        let a = SpaceTag::lp(Exponent::TWO, 2).unwrap();
        let b = SpaceTag::c0(2).unwrap();
        let m = DenseOperator::injection(a, b).unwrap();
        assert!(eigen_spectrum(&m).is_err());
        let r = DenseOperator::new(DMatrix::zeros(2, 3), SpaceTag::c0(3).unwrap(), a).unwrap();
        assert!(eigen_spectrum(&r).is_err());
    }

    #[test]
    fn reports_for_simple_reps() {
        let l2 = SpaceTag::lp(Exponent::TWO, 2).unwrap();
        let diag = NuclearRep::new(l2, [RawTerm::new(1.0, e(0, 2), e(0, 2)), RawTerm::new(0.5, e(1, 2), e(1, 2))]).unwrap();
        let r = spectral_report(&diag).unwrap();
        assert_eq!(r.eigenvalues, vec![c(1.0, 0.0), c(0.5, 0.0)]);
        assert!(r.lidskii_residual <= 1e-12);
        assert!(r.trace_identity_holds() && r.conjugate_pairing_holds());

        let nil = NuclearRep::new(l2, [RawTerm::new(1.0, e(0, 2), e(1, 2))]).unwrap();
        let r = spectral_report(&nil).unwrap();
        assert_eq!(r.nuclear_trace, 0.0);
        assert!(r.eigen_sum.norm() <= 1e-12 && r.lidskii_residual <= 1e-12);
    }

    #[test]
    fn weyl_simple_cases() {
        let l2 = SpaceTag::lp(Exponent::TWO, 3).unwrap();
        let diag = NuclearRep::new(l2, (0..3).map(|k| RawTerm::new(1.0 / (k + 1) as f64, e(k, 3), e(k, 3)))).unwrap();
        let w = weyl_check(&diag).unwrap();
        assert!(w.pass);
        assert!((w.abs_sum - w.nuclear_bound).abs() < 1e-14);
        assert!((w.singular_sum - w.nuclear_bound).abs() < 1e-14);

        let nil = NuclearRep::new(l2, [RawTerm::new(1.0, e(0, 3), e(1, 3))]).unwrap();
        let w = weyl_check(&nil).unwrap();
        assert!(w.pass);
        assert_eq!(w.abs_sum, 0.0);
        assert!((w.singular_sum - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ladder_rejects_bad_levels() {
        let fam = |_n: usize| -> Result<NuclearRep> { unreachable!() };
        assert!(summability_ladder(fam, &[], OrderExponent::ONE).is_err());
        assert!(summability_ladder(fam, &[8, 8], OrderExponent::ONE).is_err());
        assert!(summability_ladder(fam, &[16, 8], OrderExponent::ONE).is_err());
    }

    #[test]
    fn csv_formatting() {
        assert_eq!(sci12(1.0), "1.00000000000e+00");
        assert_eq!(sci12(0.00123), "1.23000000000e-03");
        assert_eq!(sci12(0.0), "0.00000000000e+00");
        assert_eq!(sci12(1.5e120), "1.50000000000e+120");
        let rows = [LadderRow { level: 64, abs_sum: 2.5, tail_fraction: 0.1, residual: 0.0, quasi_norm: 3.0, ratio: 0.8 }];
        assert_eq!(
            ladder_csv(&rows),
            "level,abs_sum,tail_fraction,residual\n64,2.50000000000e+00,1.00000000000e-01,0.00000000000e+00\n"
        );
    }
}
