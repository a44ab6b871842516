//! JSON encoding of points, tangent vectors and results.
//!
//! A complex scalar is `[re, im]`; a matrix is a row-major array of rows.

use std::path::Path;

use flagfiber::finsler::MinimalLifting;
use flagfiber::riemann::HorizontalVector;
use flagfiber::{BundlePoint, CMat, CVec, TangentVector, C64};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub type JsonComplex = [f64; 2];
pub type JsonVector = Vec<JsonComplex>;
pub type JsonMatrix = Vec<Vec<JsonComplex>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointJson {
    pub p: JsonMatrix,
    pub f: JsonVector,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TangentJson {
    pub x: JsonMatrix,
    pub g: JsonVector,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HorizontalJson {
    pub t: f64,
    pub g: JsonVector,
    pub y1: JsonMatrix,
    pub y2: JsonMatrix,
    /// Adapted basis, columns `f, R(P) ⊖ ⟨f⟩, N(P)`.
    pub frame: JsonMatrix,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LiftingJson {
    pub matrix: JsonMatrix,
    pub norm: f64,
    pub oracle_gap: Option<f64>,
}

pub fn vector_to_json(v: &CVec) -> JsonVector {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn matrix_to_json(m: &CMat) -> JsonMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn vector_from_json(v: &JsonVector) -> CVec {
    CVec::from_iterator(v.len(), v.iter().map(|z| C64::new(z[0], z[1])))
}

pub fn matrix_from_json(m: &JsonMatrix, what: &str) -> Result<CMat, CliError> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if m.iter().any(|r| r.len() != cols) {
        return Err(CliError::Config(format!("{what}: ragged matrix rows")));
    }
    Ok(CMat::from_fn(rows, cols, |i, j| C64::new(m[i][j][0], m[i][j][1])))
}

impl PointJson {
    pub fn from_point(pt: &BundlePoint) -> Self {
        PointJson { p: matrix_to_json(pt.p()), f: vector_to_json(pt.f()) }
    }

    pub fn to_point(&self) -> Result<BundlePoint, CliError> {
        let p = matrix_from_json(&self.p, "p")?;
        let f = vector_from_json(&self.f);
        if p.nrows() != p.ncols() || p.nrows() != f.len() {
            return Err(CliError::Config(format!(
                "point: p is {}x{} but f has length {}",
                p.nrows(),
                p.ncols(),
                f.len()
            )));
        }
        Ok(flagfiber::bundle::validate_point(p, f)?)
    }
}

impl TangentJson {
    pub fn from_tangent(v: &TangentVector) -> Self {
        TangentJson { x: matrix_to_json(&v.x), g: vector_to_json(&v.g) }
    }

    pub fn to_tangent(&self, pt: &BundlePoint) -> Result<TangentVector, CliError> {
        let x = matrix_from_json(&self.x, "x")?;
        let g = vector_from_json(&self.g);
        if x.shape() != (pt.dim(), pt.dim()) || g.len() != pt.dim() {
            return Err(CliError::Config("tangent vector does not match the point dimension".into()));
        }
        Ok(TangentVector::new(pt, x, g)?)
    }
}

impl HorizontalJson {
    pub fn from_horizontal(h: &HorizontalVector) -> Self {
        HorizontalJson {
            t: h.t,
            g: vector_to_json(&h.g),
            y1: matrix_to_json(&h.y1),
            y2: matrix_to_json(&h.y2),
            frame: matrix_to_json(&h.frame.basis),
        }
    }
}

impl LiftingJson {
    pub fn from_lifting(l: &MinimalLifting) -> Self {
        LiftingJson { matrix: matrix_to_json(&l.x0matrix), norm: l.norm, oracle_gap: l.oracle_gap }
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("cannot parse {}: {e}", path.display())))
}

pub fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}
