//! Quotient Finsler norm on the tangent spaces of the bundle.
//!
//! In the adapted frame every lifting of a tangent vector has the form
//!
//! ```text
//! [ i·x0    xrow    a_top    ]
//! [ −xrow*  *       a_bottom ]
//! [ −a*             **       ]
//! ```
//!
//! and a minimal lifting is found by filling `*` (see [`row`]) and then
//! `**` (see [`krein`]).

pub mod dkw;
pub mod krein;
pub mod probe;
pub mod row;

pub use dkw::{dkw_row, dkw_solutions, RowOrientation};
pub use krein::{assemble_krein, krein_complete, KreinCompletion};
pub use probe::{minimality_probe, ProbeReport};
pub use row::{row_minimize, RowMethod, RowMinimum};

use crate::bundle::{self, BundlePoint, TangentVector};
use crate::error::Result;
use crate::linalg::{exp_skew, spectral_norm, AdaptedFrame, CMat, C64};

/// The fixed entries shared by all liftings of a tangent vector.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftingTemplate {
    /// Imaginary part of the `⟨f₀⟩` diagonal entry.
    pub x0: f64,
    /// `1 × (r−1)` row over `R(P₀) ⊖ ⟨f₀⟩`.
    pub xrow: CMat,
    /// `r × (n−r)` block from `N(P₀)` to `R(P₀)`.
    pub a: CMat,
    pub frame: AdaptedFrame,
}

impl LiftingTemplate {
    /// Reads the template off any anti-Hermitian `z` (original coordinates).
    pub fn from_generator(frame: &AdaptedFrame, z: &CMat) -> Self {
        let zf = frame.to_frame(z);
        let [_, k, m] = frame.dims;
        let r = k + 1;
        LiftingTemplate {
            x0: zf[(0, 0)].im,
            xrow: zf.view((0, 1), (1, k)).into_owned(),
            a: zf.view((0, r), (r, m)).into_owned(),
            frame: frame.clone(),
        }
    }

    pub fn rank(&self) -> usize {
        self.xrow.ncols() + 1
    }

    /// Upper-left `r × r` block with `Y` in the free slot.
    pub fn upper_block(&self, y: &CMat) -> CMat {
        let k = self.xrow.ncols();
        let mut b = CMat::zeros(k + 1, k + 1);
        b[(0, 0)] = C64::new(0.0, self.x0);
        b.view_mut((0, 1), (1, k)).copy_from(&self.xrow);
        b.view_mut((1, 0), (k, 1)).copy_from(&(-self.xrow.adjoint()));
        b.view_mut((1, 1), (k, k)).copy_from(y);
        b
    }

    /// The `r × n` row block `[B(Y) A]`.
    pub fn row_block(&self, y: &CMat) -> CMat {
        let r = self.rank();
        let m = self.a.ncols();
        let mut out = CMat::zeros(r, r + m);
        out.view_mut((0, 0), (r, r)).copy_from(&self.upper_block(y));
        out.view_mut((0, r), (r, m)).copy_from(&self.a);
        out
    }

    /// Columns of the row block not touched by `Y`: the first one and `A`.
    pub fn fixed_columns(&self) -> CMat {
        let r = self.rank();
        let m = self.a.ncols();
        let mut out = CMat::zeros(r, 1 + m);
        out[(0, 0)] = C64::new(0.0, self.x0);
        out.view_mut((1, 0), (r - 1, 1)).copy_from(&(-self.xrow.adjoint()));
        out.view_mut((0, 1), (r, m)).copy_from(&self.a);
        out
    }

    /// `Y`-independent lower bound: the larger of the first-row norm and
    /// the fixed-column norm.
    pub fn lower_bound(&self) -> f64 {
        let k = self.xrow.ncols();
        let first_row = self.row_block(&CMat::zeros(k, k)).rows(0, 1).norm();
        first_row.max(spectral_norm(&self.fixed_columns()))
    }

    /// Full lifting (original coordinates) with slots `Y` and `Z`.
    pub fn assemble(&self, y: &CMat, z: &CMat) -> CMat {
        let full = assemble_krein(&self.upper_block(y), &self.a, z);
        self.frame.from_frame(&full)
    }

    pub fn is_zero(&self) -> bool {
        self.x0 == 0.0 && self.xrow.iter().all(|v| *v == C64::new(0.0, 0.0))
            && self.a.iter().all(|v| *v == C64::new(0.0, 0.0))
    }
}

pub fn template_from_tangent(pt: &BundlePoint, v: &TangentVector) -> Result<LiftingTemplate> {
    let z = bundle::some_lifting(pt, v)?;
    Ok(LiftingTemplate::from_generator(&pt.frame(), &z))
}

/// A lifting of least operator norm.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimalLifting {
    pub x0matrix: CMat,
    pub norm: f64,
    /// Distance from `norm` to a certified lower bound for the quotient
    /// norm; `None` when no solver ran.
    pub oracle_gap: Option<f64>,
}

/// Two-step minimal lifting: [`row_minimize`] then [`krein_complete`].
pub fn minimal_lifting(pt: &BundlePoint, v: &TangentVector) -> Result<MinimalLifting> {
    let tpl = template_from_tangent(pt, v)?;
    if tpl.is_zero() {
        let n = pt.dim();
        return Ok(MinimalLifting { x0matrix: CMat::zeros(n, n), norm: 0.0, oracle_gap: None });
    }
    complete(&tpl)
}

fn complete(tpl: &LiftingTemplate) -> Result<MinimalLifting> {
    let row = row_minimize(tpl)?;
    let corner = krein_complete(&tpl.upper_block(&row.y), &tpl.a);
    let x0matrix = tpl.assemble(&row.y, &corner.z);
    let norm = spectral_norm(&x0matrix);
    Ok(MinimalLifting { x0matrix, norm, oracle_gap: Some((norm - row.lower).max(0.0)) })
}

/// Minimal lifting of `δ(z)` directly from a generator `z`.
pub fn minimal_lifting_of_generator(frame: &AdaptedFrame, z: &CMat) -> Result<MinimalLifting> {
    let tpl = LiftingTemplate::from_generator(frame, z);
    if tpl.is_zero() {
        let n = frame.dim();
        return Ok(MinimalLifting { x0matrix: CMat::zeros(n, n), norm: 0.0, oracle_gap: None });
    }
    complete(&tpl)
}

pub fn finsler_norm(pt: &BundlePoint, v: &TangentVector) -> Result<f64> {
    Ok(minimal_lifting(pt, v)?.norm)
}

/// Quotient norm of `δ(z)` at the point with adapted frame `frame`. Only
/// the row step runs, since the corner completion does not change the norm.
pub fn generator_norm(frame: &AdaptedFrame, z: &CMat) -> Result<f64> {
    let tpl = LiftingTemplate::from_generator(frame, z);
    if tpl.is_zero() {
        return Ok(0.0);
    }
    Ok(row_minimize(&tpl)?.iota)
}

/// `exp(t X₀)·pt` with `X₀` the minimal lifting of `v`.
pub fn finsler_geodesic(pt: &BundlePoint, v: &TangentVector, t: f64) -> Result<BundlePoint> {
    let lift = minimal_lifting(pt, v)?;
    Ok(bundle::act_unchecked(&exp_skew(&lift.x0matrix.scale(t)), pt))
}
