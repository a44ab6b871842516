//! Exponential map, its differential, and the shooting inverse.

use nalgebra::{DMatrix, DVector};

use super::{kappa_matrix, kappa_unchecked, HorizontalVector};
use crate::bundle::{self, BundlePoint, TangentVector};
use crate::curve::{self, CurveMetric, ProbeReport};
use crate::error::{Error, Result};
use crate::linalg::{check_anti_hermitian, eigh, exp_skew, fro, AdaptedFrame, CMat, CVec, C64, I};

/// `Exp(v) = e^Z·(P₀, f₀)` with `Z = κ(v)`.
pub fn exp_map(pt: &BundlePoint, v: &TangentVector) -> Result<BundlePoint> {
    v.validate(pt)?;
    Ok(bundle::act_unchecked(&exp_skew(&kappa_matrix(pt, v)), pt))
}

pub fn geodesic(pt: &BundlePoint, v: &TangentVector, t: f64) -> Result<BundlePoint> {
    exp_map(pt, &v.scale(t))
}

/// `F(λ) = (1 − e^{−λ})/λ` with `F(0) = 1`.
fn f_of(lambda: C64) -> C64 {
    if lambda.norm() < 1e-4 {
        let l2 = lambda * lambda;
        return C64::new(1.0, 0.0) - lambda / 2.0 + l2 / 6.0 - l2 * lambda / 24.0;
    }
    (C64::new(1.0, 0.0) - (-lambda).exp()) / lambda
}

/// Spectrum of `Z = V diag(iμ) V*`.
fn skew_spectrum(z: &CMat) -> (Vec<f64>, CMat) {
    // iZ is Hermitian with eigenvalues −μ.
    let (values, v) = eigh(&(z * I));
    (values.into_iter().map(|l| -l).collect(), v)
}

/// `F(ad Z) W`. In the eigenbasis of `Z`, `ad Z` acts on the matrix unit
/// `E_jk` as multiplication by `i(μ_j − μ_k)`.
pub fn dexp_f(z: &CMat, w: &CMat) -> Result<CMat> {
    check_anti_hermitian(z)?;
    if z.shape() != w.shape() {
        return Err(Error::DimensionMismatch("generator vs direction".into()));
    }
    let (mu, v) = skew_spectrum(z);
    Ok(dexp_in_basis(&mu, &v, w))
}

fn dexp_in_basis(mu: &[f64], v: &CMat, w: &CMat) -> CMat {
    let mut wt = v.adjoint() * w * v;
    for j in 0..mu.len() {
        for k in 0..mu.len() {
            wt[(j, k)] *= f_of(C64::new(0.0, mu[j] - mu[k]));
        }
    }
    v * wt * v.adjoint()
}

/// `g(t) = sin t/t + (cos t − 1)/t²`, `g(0) = 1/2`.
pub fn g_func(t: f64) -> f64 {
    if t.abs() < 0.05 {
        let t2 = t * t;
        return 0.5 - t2 / 8.0 + t2 * t2 / 144.0 - t2 * t2 * t2 / 5760.0 + t2 * t2 * t2 * t2 / 403_200.0;
    }
    t.sin() / t + (t.cos() - 1.0) / (t * t)
}

/// First positive root of `g`, by bisection on `t sin t + cos t − 1`.
pub fn find_r0() -> f64 {
    let h = |t: f64| t * t.sin() + t.cos() - 1.0;
    let (mut lo, mut hi) = (std::f64::consts::FRAC_PI_2, 3.0 * std::f64::consts::FRAC_PI_4);
    debug_assert!(h(lo) > 0.0 && h(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `‖F(ad Z) − 1‖`, the largest `|F(i(μ_j − μ_k)) − 1|`.
pub fn contraction_gap(z: &CMat) -> Result<f64> {
    check_anti_hermitian(z)?;
    let (mu, _) = skew_spectrum(z);
    let mut gap: f64 = 0.0;
    for a in &mu {
        for b in &mu {
            gap = gap.max((f_of(C64::new(0.0, a - b)) - 1.0).norm());
        }
    }
    Ok(gap)
}

/// Real orthogonal basis of the horizontal space (original coordinates).
pub(crate) fn horizontal_basis(frame: &AdaptedFrame) -> Vec<CMat> {
    let [_, k, m] = frame.dims;
    let empty = HorizontalVector {
        t: 0.0,
        g: CVec::zeros(k),
        y1: CMat::zeros(1, m),
        y2: CMat::zeros(k, m),
        frame: frame.clone(),
    };
    let mut out = Vec::new();
    let mut t = empty.clone();
    t.t = 1.0;
    out.push(t.matrix());
    let units = [C64::new(1.0, 0.0), C64::new(0.0, 1.0)];
    for i in 0..k {
        for u in units {
            let mut h = empty.clone();
            h.g[i] = u;
            out.push(h.matrix());
        }
    }
    for j in 0..m {
        for u in units {
            let mut h = empty.clone();
            h.y1[(0, j)] = u;
            out.push(h.matrix());
        }
    }
    for i in 0..k {
        for j in 0..m {
            for u in units {
                let mut h = empty.clone();
                h.y2[(i, j)] = u;
                out.push(h.matrix());
            }
        }
    }
    out
}

fn flatten(x: &CMat, g: &CVec) -> DVector<f64> {
    let mut out = Vec::with_capacity(2 * (x.len() + g.len()));
    for z in x.iter().chain(g.iter()) {
        out.push(z.re);
        out.push(z.im);
    }
    DVector::from_vec(out)
}

const LOG_MAX_ITER: usize = 100;
const LOG_TOL: f64 = 1e-10;
const RADIUS: f64 = std::f64::consts::FRAC_PI_4;

/// Horizontal `Z` at `pt0` with `e^Z·pt0 = pt1` and `‖Z‖₂ < π/4`.
///
/// Gauss–Newton on the horizontal coordinates; the Jacobian column for a
/// direction `W` is `e^Z·δ₀(F(ad Z)W)`. `OutOfRadius` is only raised when
/// the chordal distance certifies `d_q ≥ π/4` (the ambient distance
/// dominates the chord and `d_q ≥ √(2/3)·d_a`).
pub fn log_map(pt0: &BundlePoint, pt1: &BundlePoint) -> Result<HorizontalVector> {
    if pt0.dim() != pt1.dim() {
        return Err(Error::DimensionMismatch("points of different dimension".into()));
    }
    let frame = pt0.frame();
    if pt0.rank() != pt1.rank() {
        return Err(Error::OutOfRadius(f64::INFINITY));
    }
    let dp = pt1.p() - pt0.p();
    let df = pt1.f() - pt0.f();
    let chord = (dp.norm_squared() + df.norm_squared()).sqrt();
    let lower = chord * (2.0f64 / 3.0).sqrt();
    if lower >= RADIUS {
        return Err(Error::OutOfRadius(lower));
    }
    if chord == 0.0 {
        return Ok(HorizontalVector::from_matrix(&frame, &CMat::zeros(pt0.dim(), pt0.dim())));
    }

    let basis = horizontal_basis(&frame);
    let target = flatten(pt1.p(), pt1.f());
    let residual = |z: &CMat| -> DVector<f64> {
        let u = exp_skew(z);
        let q = bundle::act_unchecked(&u, pt0);
        flatten(q.p(), q.f()) - &target
    };
    let first = bundle::project_e_unchecked(pt0, &dp, &df);
    let mut z = kappa_matrix(pt0, &first);
    let mut res = residual(&z);
    let mut res_norm = res.norm();
    for _ in 0..LOG_MAX_ITER {
        if res_norm <= 1e-14 {
            break;
        }
        let (mu, v) = skew_spectrum(&z);
        let u = exp_skew(&z);
        let mut jac = DMatrix::<f64>::zeros(res.len(), basis.len());
        for (j, w) in basis.iter().enumerate() {
            let d = dexp_in_basis(&mu, &v, w);
            let tv = bundle::delta_unchecked(pt0, &d);
            let col = flatten(&(&u * &tv.x * u.adjoint()), &(&u * &tv.g));
            jac.set_column(j, &col);
        }
        let step = jac
            .svd(true, true)
            .solve(&(-&res), 1e-14)
            .map_err(|e| Error::NoConvergence(format!("least-squares step failed: {e}")))?;
        let mut alpha = 1.0;
        let mut improved = false;
        for _ in 0..40 {
            let mut trial = z.clone();
            for (w, s) in basis.iter().zip(step.iter()) {
                trial += w.scale(alpha * s);
            }
            let r = residual(&trial);
            if r.norm() < res_norm {
                z = trial;
                res = r;
                res_norm = res.norm();
                improved = true;
                break;
            }
            alpha *= 0.5;
        }
        if !improved {
            break;
        }
    }
    if res_norm > LOG_TOL {
        return Err(Error::NoConvergence(format!("shooting residual {res_norm:.3e}")));
    }
    let size = fro(&z);
    if size >= RADIUS + LOG_TOL {
        return Err(Error::NoConvergence(format!(
            "shooting converged to |Z| = {size:.6} outside the radius"
        )));
    }
    Ok(HorizontalVector::from_matrix(&frame, &z))
}

/// Competitor sweep for the quotient metric along `Exp(t v)`, with `v`
/// rescaled to `‖κ(v)‖₂ = 1`.
pub fn minimality_probe(
    pt: &BundlePoint,
    v: &TangentVector,
    t: f64,
    n_competitors: usize,
    seed: u64,
) -> Result<ProbeReport> {
    v.validate(pt)?;
    let z = kappa_unchecked(pt, v).matrix();
    let size = fro(&z);
    if size == 0.0 {
        return Ok(ProbeReport::trivial(n_competitors));
    }
    curve::minimality_sweep(pt, &z.unscale(size), t, CurveMetric::Quotient, n_competitors, seed)
}
