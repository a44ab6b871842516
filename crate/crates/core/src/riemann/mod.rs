//! Riemannian geometry of the bundle with the Hilbert–Schmidt structure.
//!
//! The kernel of `δ` at `(P₀, f₀)` consists of the anti-Hermitian
//! matrices that commute with `P₀` and kill `f₀`; in the adapted frame
//! these are the block-diagonal matrices `diag(0, Z₁₁, Z₂₂)`. Their
//! trace-orthogonal complement, the horizontal space, is
//!
//! ```text
//! [ i·t   −g*   y1  ]
//! [ g      0    y2  ]
//! [ −y1*  −y2*   0  ]
//! ```

mod connection;
mod exp;
mod pi;

pub use connection::{ambient_geodesic_residual, covariant_derivative, sectional_curvature};
pub use exp::{contraction_gap, dexp_f, exp_map, find_r0, g_func, geodesic, log_map, minimality_probe};
pub use pi::{orth_project_pi, orth_project_pi_closed};

use crate::bundle::{self, BundlePoint, TangentVector};
use crate::error::{Error, Result};
use crate::linalg::{check_anti_hermitian, fro, outer, AdaptedFrame, CMat, CVec, C64};

/// A horizontal generator, stored by its free blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct HorizontalVector {
    pub t: f64,
    /// Column over `R(P₀) ⊖ ⟨f₀⟩`.
    pub g: CVec,
    /// `1 × (n−r)` block `N(P₀) → ⟨f₀⟩`.
    pub y1: CMat,
    /// `(r−1) × (n−r)` block `N(P₀) → R(P₀) ⊖ ⟨f₀⟩`.
    pub y2: CMat,
    pub frame: AdaptedFrame,
}

impl HorizontalVector {
    /// Reads the horizontal blocks of `z`, ignoring the vertical ones.
    pub fn from_matrix(frame: &AdaptedFrame, z: &CMat) -> Self {
        let zf = frame.to_frame(z);
        let [_, k, m] = frame.dims;
        let r = k + 1;
        HorizontalVector {
            t: zf[(0, 0)].im,
            g: zf.view((1, 0), (k, 1)).column(0).into_owned(),
            y1: zf.view((0, r), (1, m)).into_owned(),
            y2: zf.view((1, r), (k, m)).into_owned(),
            frame: frame.clone(),
        }
    }

    /// Frame-coordinate matrix.
    pub fn frame_matrix(&self) -> CMat {
        let [_, k, m] = self.frame.dims;
        let r = k + 1;
        let n = r + m;
        let mut z = CMat::zeros(n, n);
        z[(0, 0)] = C64::new(0.0, self.t);
        z.view_mut((1, 0), (k, 1)).copy_from(&self.g);
        z.view_mut((0, 1), (1, k)).copy_from(&(-self.g.adjoint()));
        z.view_mut((0, r), (1, m)).copy_from(&self.y1);
        z.view_mut((r, 0), (m, 1)).copy_from(&(-self.y1.adjoint()));
        z.view_mut((1, r), (k, m)).copy_from(&self.y2);
        z.view_mut((r, 1), (m, k)).copy_from(&(-self.y2.adjoint()));
        z
    }

    /// The anti-Hermitian matrix in original coordinates.
    pub fn matrix(&self) -> CMat {
        self.frame.from_frame(&self.frame_matrix())
    }

    /// `‖Z‖₂² = t² + 2‖g‖² + 2‖y1‖² + 2‖y2‖²`.
    pub fn norm(&self) -> f64 {
        (self.t * self.t
            + 2.0 * (self.g.norm_squared() + self.y1.norm_squared() + self.y2.norm_squared()))
        .sqrt()
    }

    /// Ambient norm of `δ(Z)`: `t² + ‖g‖² + 3‖y1‖² + 2‖y2‖²`.
    pub fn ambient_norm(&self) -> f64 {
        (self.t * self.t
            + self.g.norm_squared()
            + 3.0 * self.y1.norm_squared()
            + 2.0 * self.y2.norm_squared())
        .sqrt()
    }
}

/// Which Riemannian metric to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    Quotient,
    Ambient,
}

/// `Q(X) = PXP + P⊥XP⊥ + ff*Xff* − ff*XP − PXff*`, the trace-orthogonal
/// projection onto `ker δ`.
pub fn vertical_project_q(pt: &BundlePoint, z: &CMat) -> Result<CMat> {
    if z.shape() != (pt.dim(), pt.dim()) {
        return Err(Error::DimensionMismatch("matrix vs point".into()));
    }
    check_anti_hermitian(z)?;
    Ok(q_unchecked(pt, z))
}

pub(crate) fn q_unchecked(pt: &BundlePoint, z: &CMat) -> CMat {
    let p = pt.p();
    let q = pt.complement();
    let ff = outer(pt.f(), pt.f());
    p * z * p + &q * z * &q + &ff * z * &ff - &ff * z * p - p * z * &ff
}

/// `Z − Q(Z)` in original coordinates.
pub(crate) fn horizontal_part(pt: &BundlePoint, z: &CMat) -> CMat {
    z - q_unchecked(pt, z)
}

pub fn horizontal_project(pt: &BundlePoint, z: &CMat) -> Result<HorizontalVector> {
    let v = vertical_project_q(pt, z)?;
    Ok(HorizontalVector::from_matrix(&pt.frame(), &(z - v)))
}

/// `κ(v)`: the unique horizontal `Z` with `δ(Z) = v`.
pub fn horizontal_lift_kappa(pt: &BundlePoint, v: &TangentVector) -> Result<HorizontalVector> {
    v.validate(pt)?;
    Ok(kappa_unchecked(pt, v))
}

pub(crate) fn kappa_unchecked(pt: &BundlePoint, v: &TangentVector) -> HorizontalVector {
    let z = bundle::lifting_unchecked(pt, v);
    HorizontalVector::from_matrix(&pt.frame(), &horizontal_part(pt, &z))
}

/// `κ(v)` as a matrix in original coordinates.
pub(crate) fn kappa_matrix(pt: &BundlePoint, v: &TangentVector) -> CMat {
    let z = bundle::lifting_unchecked(pt, v);
    horizontal_part(pt, &z)
}

pub fn metric_norm(pt: &BundlePoint, v: &TangentVector, kind: MetricKind) -> Result<f64> {
    v.validate(pt)?;
    Ok(match kind {
        MetricKind::Quotient => fro(&kappa_matrix(pt, v)),
        MetricKind::Ambient => v.ambient_norm(),
    })
}
