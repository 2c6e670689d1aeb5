//! Finite truncations of the sequence spaces `ℓ_p`, `c₀` and `ℓ_∞`.
//!
//! A [`SpaceTag`] names the space and the truncation level. Operators carry a
//! tag on each side and composition only succeeds when the tags at every
//! junction agree, so a pipeline wired through the wrong space is rejected
//! even when the dimensions happen to line up.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::Exponent;

/// Largest truncation level accepted for any space.
pub const MAX_DIM: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SpaceKind {
    Lp { p: Exponent },
    C0,
    Linf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawTag")]
pub struct SpaceTag {
    #[serde(flatten)]
    kind: SpaceKind,
    dim: usize,
}

#[derive(Deserialize)]
struct RawTag {
    #[serde(flatten)]
    kind: SpaceKind,
    dim: usize,
}

impl TryFrom<RawTag> for SpaceTag {
    type Error = Error;

    fn try_from(raw: RawTag) -> Result<Self> {
        SpaceTag::new(raw.kind, raw.dim)
    }
}

impl SpaceTag {
    pub fn new(kind: SpaceKind, dim: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidDimension(dim));
        }
        Ok(SpaceTag { kind, dim })
    }

    pub fn lp(p: Exponent, dim: usize) -> Result<Self> {
        Self::new(SpaceKind::Lp { p }, dim)
    }

    pub fn c0(dim: usize) -> Result<Self> {
        Self::new(SpaceKind::C0, dim)
    }

    pub fn linf(dim: usize) -> Result<Self> {
        Self::new(SpaceKind::Linf, dim)
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The exponent whose norm this space carries; `c₀` and `ℓ_∞` use the sup norm.
    pub fn norm_exponent(&self) -> Exponent {
        match self.kind {
            SpaceKind::Lp { p } => p,
            SpaceKind::C0 | SpaceKind::Linf => Exponent::INFINITY,
        }
    }

    /// The tag functionals on this space carry: `ℓ_{p'}`, and `ℓ_1` for `c₀`/`ℓ_∞`.
    pub fn conjugate(&self) -> SpaceTag {
        let p = match self.kind {
            SpaceKind::Lp { p } => p.conjugate(),
            SpaceKind::C0 | SpaceKind::Linf => Exponent::ONE,
        };
        SpaceTag {
            kind: SpaceKind::Lp { p },
            dim: self.dim,
        }
    }
}

impl fmt::Display for SpaceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SpaceKind::Lp { p } => write!(f, "l_{p}[{}]", self.dim),
            SpaceKind::C0 => write!(f, "c0[{}]", self.dim),
            SpaceKind::Linf => write!(f, "l_inf[{}]", self.dim),
        }
    }
}

fn mismatch(expected: &SpaceTag, found: &SpaceTag) -> Error {
    Error::SpaceMismatch {
        expected: expected.to_string(),
        found: found.to_string(),
    }
}

/// The `ℓ_p` norm of a coordinate slice, scaled by the largest entry so
/// that large and tiny entries neither overflow nor underflow.
pub fn lp_norm_slice(xs: &[f64], p: Exponent) -> f64 {
    let max = xs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if max == 0.0 || p.is_infinite() {
        return max;
    }
    if p == Exponent::ONE {
        return xs.iter().map(|x| x.abs()).sum();
    }
    if p == Exponent::TWO {
        let s: f64 = xs.iter().map(|x| (x / max) * (x / max)).sum();
        return max * s.sqrt();
    }
    let pf = p.to_f64();
    let s: f64 = xs.iter().map(|x| (x.abs() / max).powf(pf)).sum();
    max * s.powf(1.0 / pf)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawVector")]
pub struct Vector {
    space: SpaceTag,
    coords: Vec<f64>,
}

#[derive(Deserialize)]
struct RawVector {
    space: SpaceTag,
    coords: Vec<f64>,
}

impl TryFrom<RawVector> for Vector {
    type Error = Error;

    fn try_from(raw: RawVector) -> Result<Self> {
        Vector::new(raw.coords, raw.space)
    }
}

impl Vector {
    pub fn new(coords: Vec<f64>, space: SpaceTag) -> Result<Self> {
        if coords.len() != space.dim() {
            return Err(Error::LengthMismatch {
                expected: space.dim(),
                found: coords.len(),
            });
        }
        Ok(Vector { space, coords })
    }

    pub fn zeros(space: SpaceTag) -> Self {
        Vector {
            space,
            coords: vec![0.0; space.dim()],
        }
    }

    /// The coordinate vector `e_index` (zero-based).
    pub fn unit(index: usize, space: SpaceTag) -> Result<Self> {
        if index >= space.dim() {
            return Err(Error::LengthMismatch {
                expected: space.dim(),
                found: index + 1,
            });
        }
        let mut v = Self::zeros(space);
        v.coords[index] = 1.0;
        Ok(v)
    }

    pub fn space(&self) -> SpaceTag {
        self.space
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn norm(&self) -> f64 {
        lp_norm_slice(&self.coords, self.space.norm_exponent())
    }

    pub fn scaled(&self, factor: f64) -> Vector {
        Vector {
            space: self.space,
            coords: self.coords.iter().map(|x| x * factor).collect(),
        }
    }

    /// The same coordinates under another tag of equal dimension.
    pub fn retagged(&self, space: SpaceTag) -> Result<Vector> {
        Vector::new(self.coords.clone(), space)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&x| x == 0.0)
    }
}

pub fn lp_norm(v: &Vector) -> f64 {
    v.norm()
}

/// `⟨f, v⟩ = Σ f_i v_i`, where `f` must carry the conjugate tag of `v`.
pub fn dual_pairing(f: &Vector, v: &Vector) -> Result<f64> {
    let expected = v.space.conjugate();
    if f.space != expected {
        return Err(mismatch(&expected, &f.space));
    }
    Ok(f.coords.iter().zip(&v.coords).map(|(a, b)| a * b).sum())
}

pub fn normalize(v: &Vector) -> Result<Vector> {
    let n = v.norm();
    if n == 0.0 || !n.is_finite() {
        return Err(Error::Degenerate(format!(
            "cannot normalize vector with norm {n} in {}",
            v.space
        )));
    }
    Ok(v.scaled(1.0 / n))
}

/// A dense real matrix acting from `domain` into `codomain`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    matrix: DMatrix<f64>,
    domain: SpaceTag,
    codomain: SpaceTag,
}

impl DenseOperator {
    pub fn new(matrix: DMatrix<f64>, domain: SpaceTag, codomain: SpaceTag) -> Result<Self> {
        if matrix.ncols() != domain.dim() {
            return Err(Error::LengthMismatch {
                expected: domain.dim(),
                found: matrix.ncols(),
            });
        }
        if matrix.nrows() != codomain.dim() {
            return Err(Error::LengthMismatch {
                expected: codomain.dim(),
                found: matrix.nrows(),
            });
        }
        Ok(DenseOperator {
            matrix,
            domain,
            codomain,
        })
    }

    pub fn identity(space: SpaceTag) -> Self {
        DenseOperator {
            matrix: DMatrix::identity(space.dim(), space.dim()),
            domain: space,
            codomain: space,
        }
    }

    /// The identity matrix viewed as a map between two tags of equal dimension.
    pub fn injection(domain: SpaceTag, codomain: SpaceTag) -> Result<Self> {
        Self::new(
            DMatrix::identity(codomain.dim(), domain.dim()),
            domain,
            codomain,
        )
    }

    pub fn diagonal(diag: &[f64], domain: SpaceTag, codomain: SpaceTag) -> Result<Self> {
        Self::new(
            DMatrix::from_diagonal(&DVector::from_column_slice(diag)),
            domain,
            codomain,
        )
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn domain(&self) -> SpaceTag {
        self.domain
    }

    pub fn codomain(&self) -> SpaceTag {
        self.codomain
    }

    pub fn is_endomorphism(&self) -> bool {
        self.domain == self.codomain
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm()
    }

    /// The diagonal entries, for operators built by [`DenseOperator::diagonal`].
    pub fn diagonal_entries(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().copied().collect()
    }
}

pub fn apply(op: &DenseOperator, v: &Vector) -> Result<Vector> {
    if v.space != op.domain {
        return Err(mismatch(&op.domain, &v.space));
    }
    let x = DVector::from_column_slice(&v.coords);
    let y = &op.matrix * x;
    Ok(Vector {
        space: op.codomain,
        coords: y.iter().copied().collect(),
    })
}

/// Composes stages in application order: `ops[0]` acts first.
pub fn compose(ops: &[DenseOperator]) -> Result<DenseOperator> {
    let (first, rest) = ops
        .split_first()
        .ok_or_else(|| Error::Degenerate("empty composition".into()))?;
    let mut acc = first.clone();
    for (i, op) in rest.iter().enumerate() {
        if acc.codomain != op.domain {
            return Err(Error::JunctionMismatch {
                index: i,
                left: acc.codomain.to_string(),
                right: op.domain.to_string(),
            });
        }
        acc = DenseOperator {
            matrix: &op.matrix * &acc.matrix,
            domain: acc.domain,
            codomain: op.codomain,
        };
    }
    Ok(acc)
}

/// `‖a - b‖_F` for operators of equal shape.
pub fn frobenius_distance(a: &DenseOperator, b: &DenseOperator) -> Result<f64> {
    if a.matrix.shape() != b.matrix.shape() {
        return Err(Error::LengthMismatch {
            expected: a.matrix.len(),
            found: b.matrix.len(),
        });
    }
    Ok((&a.matrix - &b.matrix).norm())
}

#[derive(Serialize, Deserialize)]
struct OperatorJson {
    domain: SpaceTag,
    codomain: SpaceTag,
    matrix: Vec<Vec<f64>>,
}

impl Serialize for DenseOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let matrix = self
            .matrix
            .row_iter()
            .map(|row| row.iter().copied().collect())
            .collect();
        OperatorJson {
            domain: self.domain,
            codomain: self.codomain,
            matrix,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DenseOperator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = OperatorJson::deserialize(d)?;
        let rows = raw.matrix.len();
        let cols = raw.domain.dim();
        if raw.matrix.iter().any(|r| r.len() != cols) {
            return Err(D::Error::custom("ragged matrix rows"));
        }
        let m = DMatrix::from_row_iterator(rows, cols, raw.matrix.into_iter().flatten());
        DenseOperator::new(m, raw.domain, raw.codomain).map_err(D::Error::custom)
    }
}
