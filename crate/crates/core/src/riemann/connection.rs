//! Levi-Civita connection of the quotient metric and its curvature.

use super::{kappa_matrix, orth_project_pi, q_unchecked};
use crate::bundle::{self, BundlePoint, TangentVector};
use crate::error::{Error, Result};
use crate::linalg::{check_anti_hermitian, commutator, fro, hermitian_part, trace_inner, CMat};

/// Largest sample step accepted by [`covariant_derivative`].
pub const MAX_STEP: f64 = 1e-2;

/// `D_γ̇ V` at sample `i` of a uniformly sampled curve:
/// `δ_γ(Ḃ + ½[B, A])` with `B = κ_γ(V)`, `A = κ_γ(γ̇)` and `Ḃ` a
/// central difference.
pub fn covariant_derivative(
    curve: &[BundlePoint],
    field: &[TangentVector],
    step: f64,
    i: usize,
) -> Result<TangentVector> {
    if curve.len() != field.len() {
        return Err(Error::IncompatibleSamples(format!(
            "{} curve samples vs {} field samples",
            curve.len(),
            field.len()
        )));
    }
    if i == 0 || i + 1 >= curve.len() {
        return Err(Error::IncompatibleSamples(format!(
            "index {i} has no neighbours in {} samples",
            curve.len()
        )));
    }
    if step.is_nan() || step <= 0.0 || step > MAX_STEP {
        return Err(Error::GridTooCoarse(step));
    }
    for j in [i - 1, i, i + 1] {
        field[j].validate(&curve[j])?;
    }
    let pt = &curve[i];
    let (prev, next) = (&curve[i - 1], &curve[i + 1]);
    let h2 = 2.0 * step;
    let dp = (next.p() - prev.p()).unscale(h2);
    let df = (next.f() - prev.f()).unscale(h2);
    let velocity = bundle::project_e_unchecked(pt, &hermitian_part(&dp), &df);

    let b = kappa_matrix(pt, &field[i]);
    let a = kappa_matrix(pt, &velocity);
    let b_dot = (kappa_matrix(next, &field[i + 1]) - kappa_matrix(prev, &field[i - 1])).unscale(h2);
    let z = b_dot + commutator(&b, &a).scale(0.5);
    Ok(bundle::delta_unchecked(pt, &z))
}

/// Sectional curvature of the plane spanned by `v` and `w`:
/// `¼‖[X, Y]^h‖² + ‖[X, Y]^v‖²` for quotient-orthonormal horizontal lifts.
pub fn sectional_curvature(pt: &BundlePoint, v: &TangentVector, w: &TangentVector) -> Result<f64> {
    v.validate(pt)?;
    w.validate(pt)?;
    let zv = kappa_matrix(pt, v);
    let zw = kappa_matrix(pt, w);
    let nv = fro(&zv);
    if nv == 0.0 {
        return Err(Error::DegenerateSpan);
    }
    let e1 = zv.unscale(nv);
    let rest = &zw - e1.scale(trace_inner(&e1, &zw));
    let nr = fro(&rest);
    if nr <= 1e-12 * fro(&zw).max(f64::MIN_POSITIVE) {
        return Err(Error::DegenerateSpan);
    }
    let e2 = rest.unscale(nr);
    let bracket = commutator(&e1, &e2);
    let vertical = q_unchecked(pt, &bracket);
    let horizontal = &bracket - &vertical;
    Ok(0.25 * horizontal.norm_squared() + vertical.norm_squared())
}

/// `Π(Z²P − 2ZPZ + PZ², Z²f)`: vanishes iff `t ↦ e^{tZ}·(P, f)` is a
/// geodesic of the ambient metric.
pub fn ambient_geodesic_residual(pt: &BundlePoint, z: &CMat) -> Result<TangentVector> {
    if z.shape() != (pt.dim(), pt.dim()) {
        return Err(Error::DimensionMismatch("generator vs point".into()));
    }
    check_anti_hermitian(z)?;
    let p = pt.p();
    let z2 = z * z;
    let x = &z2 * p - (z * p * z).scale(2.0) + p * &z2;
    orth_project_pi(pt, &hermitian_part(&x), &(&z2 * pt.f()))
}
