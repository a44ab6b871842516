//! Ambient-orthogonal projection onto the tangent space.
//!
//! `E` (the tangent projection of the bundle module) is idempotent but not
//! self-adjoint. For any idempotent `E` on a real inner-product space the
//! orthogonal projection onto its range is `E (E + E* − 1)^{-1}`. We form
//! the real matrix of `E` in an orthonormal basis of `Herm × Cⁿ` and apply
//! the identity; the closed forms are kept alongside as a cross-check.

use nalgebra::{DMatrix, DVector};

use crate::bundle::{self, BundlePoint, TangentVector};
use crate::error::{Error, Result};
use crate::linalg::{check_hermitian, inner, outer, CMat, CVec, C64};

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Orthonormal basis of `Herm(n) × Cⁿ` for `Tr(XY) + Re⟨h, k⟩`.
fn ambient_basis(n: usize) -> Vec<(CMat, CVec)> {
    let mut out = Vec::with_capacity(n * n + 2 * n);
    let zero_v = CVec::zeros(n);
    for i in 0..n {
        let mut x = CMat::zeros(n, n);
        x[(i, i)] = C64::new(1.0, 0.0);
        out.push((x, zero_v.clone()));
    }
    for i in 0..n {
        for j in i + 1..n {
            let mut x = CMat::zeros(n, n);
            x[(i, j)] = C64::new(SQRT_HALF, 0.0);
            x[(j, i)] = C64::new(SQRT_HALF, 0.0);
            out.push((x, zero_v.clone()));
            let mut x = CMat::zeros(n, n);
            x[(i, j)] = C64::new(0.0, SQRT_HALF);
            x[(j, i)] = C64::new(0.0, -SQRT_HALF);
            out.push((x, zero_v.clone()));
        }
    }
    for i in 0..n {
        for phase in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
            let mut h = CVec::zeros(n);
            h[i] = phase;
            out.push((CMat::zeros(n, n), h));
        }
    }
    out
}

fn ambient_inner(a: &(CMat, CVec), x: &CMat, h: &CVec) -> f64 {
    let tr: C64 = a.0.iter().zip(x.iter()).map(|(p, q)| p.conj() * q).sum();
    tr.re + inner(h, &a.1).re
}

/// `Π(x, h)` through `E (E + E* − 1)^{-1}`.
pub fn orth_project_pi(pt: &BundlePoint, x: &CMat, h: &CVec) -> Result<TangentVector> {
    let n = pt.dim();
    if x.shape() != (n, n) || h.len() != n {
        return Err(Error::DimensionMismatch("input vs point".into()));
    }
    check_hermitian(x)?;
    let basis = ambient_basis(n);
    let dim = basis.len();
    let mut e = DMatrix::<f64>::zeros(dim, dim);
    for (j, b) in basis.iter().enumerate() {
        let img = bundle::project_e_unchecked(pt, &b.0, &b.1);
        for (i, a) in basis.iter().enumerate() {
            e[(i, j)] = ambient_inner(a, &img.x, &img.g);
        }
    }
    let s = &e + e.transpose() - DMatrix::<f64>::identity(dim, dim);
    let coords = DVector::from_iterator(dim, basis.iter().map(|a| ambient_inner(a, x, h)));
    // E + E* − 1 is invertible for every idempotent E.
    let solved = s
        .lu()
        .solve(&coords)
        .ok_or_else(|| Error::NoConvergence("E + E* - 1 is singular".into()))?;
    let out = e * solved;
    let mut px = CMat::zeros(n, n);
    let mut ph = CVec::zeros(n);
    for (w, b) in out.iter().zip(&basis) {
        px += b.0.scale(*w);
        ph += b.1.scale(*w);
    }
    Ok(TangentVector { x: px, g: ph })
}

/// Closed forms:
/// `Π₁ = P⊥XP + PXP⊥ + (f(P⊥h)* + (P⊥h)f*)/3 − (ff*XP⊥ + P⊥Xff*)/3`,
/// `Π₂ = i Im⟨h, f⟩ f + (P − ff*)h + (2/3)P⊥Xf + (1/3)P⊥h`.
pub fn orth_project_pi_closed(pt: &BundlePoint, x: &CMat, h: &CVec) -> Result<TangentVector> {
    let n = pt.dim();
    if x.shape() != (n, n) || h.len() != n {
        return Err(Error::DimensionMismatch("input vs point".into()));
    }
    check_hermitian(x)?;
    Ok(pi_closed_unchecked(pt, x, h))
}

pub(crate) fn pi_closed_unchecked(pt: &BundlePoint, x: &CMat, h: &CVec) -> TangentVector {
    let p = pt.p();
    let f = pt.f();
    let q = pt.complement();
    let ff = outer(f, f);
    let qh = &q * h;
    let third = 1.0 / 3.0;
    let px = &q * x * p + p * x * &q + (outer(f, &qh) + outer(&qh, f)).scale(third)
        - (&ff * x * &q + &q * x * &ff).scale(third);
    let im = inner(h, f).im;
    let g = f * C64::new(0.0, im) + (p - &ff) * h + (&q * (x * f)).scale(2.0 * third)
        + qh.scale(third);
    TangentVector { x: px, g }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{basis_vector, c, hermitian_part};
    use crate::sample;

    #[test]
    fn routes_agree() {
        for i in 0..10 {
            let mut rng = sample::stream(31, 0, i);
            let pt = sample::point_any_rank(&mut rng, 4);
            let x = sample::hermitian(&mut rng, 4);
            let h = sample::vector(&mut rng, 4);
            let a = orth_project_pi(&pt, &x, &h).unwrap();
            let b = orth_project_pi_closed(&pt, &x, &h).unwrap();
            assert!((a.x - b.x).norm() + (a.g - b.g).norm() < 1e-10);
        }
    }

    #[test]
    fn diagonal_fixture_vanishes() {
        let mut p = CMat::zeros(3, 3);
        p[(0, 0)] = c(1.0, 0.0);
        p[(1, 1)] = c(1.0, 0.0);
        let pt = BundlePoint::new(p, basis_vector(3, 0)).unwrap();
        let e3 = basis_vector(3, 2);
        let x = hermitian_part(&outer(&e3, &e3));
        let out = orth_project_pi(&pt, &x, &CVec::zeros(3)).unwrap();
        assert!(out.x.norm() + out.g.norm() < 1e-12);
    }
}
