//! Invariant suites behind `flagfiber verify`.
//!
//! Each invariant maps a seeded random instance to a non-negative error.
//! Sample `i` of invariant `k` always draws from stream `(seed, k, i)`, and
//! the maxima are reduced in sample order, so the report does not depend
//! on the thread count.

use std::f64::consts::PI;

use flagfiber::bundle::{self, TangentVector};
use flagfiber::linalg::{
    adapted_frame, block_compose, block_decompose, identity, mat_exp, principal_inv_sqrt, projection_pair_index,
    spectral_norm,
};
use flagfiber::riemann::{self, MetricKind};
use flagfiber::sample::{self, SampleRng};
use flagfiber::{finsler, BundlePoint, CMat, Result, C64};
use rayon::prelude::*;
use serde::Serialize;

/// `--tol` value at which every invariant uses its nominal tolerance.
pub const NOMINAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub dim: usize,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InvariantReport {
    pub name: &'static str,
    pub max_error: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SectionReport {
    pub name: &'static str,
    pub pass: bool,
    pub invariants: Vec<InvariantReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub dim: usize,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub pass: bool,
    pub sections: Vec<SectionReport>,
}

type Check = fn(&mut SampleRng, usize) -> Result<f64>;

struct Invariant {
    name: &'static str,
    tolerance: f64,
    /// Deterministic invariants run once regardless of `samples`.
    single: bool,
    check: Check,
}

const fn inv(name: &'static str, tolerance: f64, check: Check) -> Invariant {
    Invariant { name, tolerance, single: false, check }
}

const fn once(name: &'static str, tolerance: f64, check: Check) -> Invariant {
    Invariant { name, tolerance, single: true, check }
}

fn sections() -> Vec<(&'static str, Vec<Invariant>)> {
    vec![
        (
            "operator_core",
            vec![
                inv("mat_exp_unitary", 1e-11, exp_unitary),
                inv("mat_exp_inverse", 1e-12, exp_inverse),
                inv("inv_sqrt_identity", 1e-11, inv_sqrt_identity),
                inv("spectral_norm_unitary_invariance", 1e-10, norm_invariance),
                inv("spectral_norm_submultiplicative", 1e-10, norm_submultiplicative),
                inv("frame_unitary", 1e-12, frame_unitary),
                inv("frame_spans", 1e-12, frame_spans),
                inv("block_roundtrip", 1e-12, block_roundtrip),
                inv("pair_index_antisymmetry", 0.0, pair_index),
            ],
        ),
        (
            "bundle",
            vec![
                inv("e_idempotent", 1e-10, e_idempotent),
                inv("e_fixes_delta", 1e-10, e_fixes_delta),
                inv("action_composition", 1e-11, action_composition),
                inv("delta_kernel", 1e-12, delta_kernel),
                inv("some_lifting_residual", 1e-11, lifting_residual),
                inv("cross_section_action", 1e-10, cross_section_action),
                inv("trivialize_roundtrip", 1e-11, trivialize_roundtrip),
            ],
        ),
        (
            "finsler",
            vec![
                inv("minimal_lifting_residual", 1e-10, minimal_residual),
                inv("norm_is_operator_norm", 1e-12, norm_matches_matrix),
                inv("lower_bound_law", 1e-10, lower_bound_law),
                inv("row_certificate_gap", 1e-6, row_certificate),
                inv("homogeneity", 1e-8, homogeneity),
                inv("triangle_inequality", 1e-8, triangle),
                inv("unitary_invariance", 1e-8, unitary_invariance),
                inv("krein_parrott_bound", 1e-8, krein_parrott),
            ],
        ),
        (
            "riemann",
            vec![
                inv("q_idempotent", 1e-12, q_idempotent),
                inv("q_orthogonality", 1e-11, q_orthogonality),
                inv("pythagoras", 1e-10, pythagoras),
                inv("kappa_residual", 1e-10, kappa_residual),
                inv("quotient_closed_form", 1e-11, quotient_closed_form),
                inv("ambient_closed_form", 1e-11, ambient_closed_form),
                inv("metric_equivalence", 1e-12, metric_equivalence),
                inv("pi_idempotent", 1e-10, pi_idempotent),
                inv("pi_self_adjoint", 1e-10, pi_self_adjoint),
                inv("pi_closed_forms", 1e-10, pi_closed_forms),
                inv("dexp_finite_difference", 1e-6, dexp_fd),
                inv("geodesic_covariant_residual", 1e-5, geodesic_residual),
                inv("exp_log_roundtrip", 1e-8, exp_log_roundtrip),
                inv("eigenvalue_identity", 1e-12, eigenvalue_identity),
                inv("contraction_gap_below_one", 0.0, contraction_below_one),
                once("r0_root", 1e-12, r0_root),
                inv("curvature_nonnegative", 1e-12, curvature_nonnegative),
            ],
        ),
    ]
}

pub fn run(cfg: &VerifyConfig) -> VerifyReport {
    let scale = cfg.tol / NOMINAL_TOL;
    let mut salt = 0u64;
    let mut out = Vec::new();
    for (name, invariants) in sections() {
        let mut reports = Vec::new();
        for inv in invariants {
            salt += 1;
            let count = if inv.single { 1 } else { cfg.samples };
            let errors: Vec<f64> = (0..count)
                .into_par_iter()
                .map(|i| {
                    let mut rng = sample::stream(cfg.seed, salt, i as u64);
                    match (inv.check)(&mut rng, cfg.dim) {
                        Ok(e) if e.is_finite() => e.max(0.0),
                        _ => f64::INFINITY,
                    }
                })
                .collect();
            let max_error = errors.iter().copied().fold(0.0, f64::max);
            let tolerance = inv.tolerance * scale;
            reports.push(InvariantReport {
                name: inv.name,
                max_error,
                tolerance,
                samples: count,
                pass: max_error <= tolerance,
            });
        }
        let pass = reports.iter().all(|r| r.pass);
        out.push(SectionReport { name, pass, invariants: reports });
    }
    VerifyReport {
        dim: cfg.dim,
        samples: cfg.samples,
        seed: cfg.seed,
        tol: cfg.tol,
        pass: out.iter().all(|s| s.pass),
        sections: out,
    }
}

fn uniform(rng: &mut SampleRng) -> f64 {
    // The angle of a planar Gaussian is uniform.
    let (a, b) = (sample::real_gaussian(rng), sample::real_gaussian(rng));
    (b.atan2(a) + PI) / (2.0 * PI)
}

fn point(rng: &mut SampleRng, n: usize) -> BundlePoint {
    sample::point_any_rank(rng, n)
}

fn trace_dot(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(p, q)| (p.conj() * q).re).sum()
}

fn ambient_dot(a: &TangentVector, b: &TangentVector) -> f64 {
    trace_dot(&a.x, &b.x) + b.g.dotc(&a.g).re
}

fn exp_unitary(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let z = sample::anti_hermitian(rng, n);
    let z = z.scale(10.0 * uniform(rng) / spectral_norm(&z));
    let u = mat_exp(&z)?;
    Ok((u.adjoint() * &u - identity(n)).norm())
}

fn exp_inverse(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let z = sample::anti_hermitian(rng, n);
    Ok((mat_exp(&z)? * mat_exp(&(-&z))? - identity(n)).norm())
}

fn inv_sqrt_identity(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let m = sample::matrix(rng, n, n);
    let a = &m * m.adjoint() + identity(n).scale(0.1);
    let s = principal_inv_sqrt(&a)?;
    Ok((&s * a * &s - identity(n)).norm())
}

fn norm_invariance(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let a = sample::matrix(rng, n, n);
    let u = sample::unitary(rng, n);
    let v = sample::unitary(rng, n);
    Ok((spectral_norm(&(u * &a * v)) - spectral_norm(&a)).abs())
}

fn norm_submultiplicative(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let a = sample::matrix(rng, n, n);
    let b = sample::matrix(rng, n, n);
    Ok(spectral_norm(&(&a * &b)) - spectral_norm(&a) * spectral_norm(&b))
}

fn frame_unitary(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let b = adapted_frame(&point(rng, n)).basis;
    Ok((b.adjoint() * &b - identity(n)).norm())
}

fn frame_spans(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let pt = point(rng, n);
    let b = adapted_frame(&pt).basis;
    let mut err = (b.column(0) - pt.f()).norm();
    for k in 0..n {
        let col = b.column(k).into_owned();
        let image = pt.p() * &col;
        err = err.max(if k < pt.rank() { (image - col).norm() } else { image.norm() });
    }
    Ok(err)
}

fn block_roundtrip(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let frame = adapted_frame(&point(rng, n));
    let z = sample::matrix(rng, n, n);
    Ok((block_compose(&block_decompose(&z, &frame)?, &frame)? - z).norm())
}

fn pair_index(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let a = point(rng, n);
    let b = point(rng, n);
    let sum = projection_pair_index(a.p(), b.p())? + projection_pair_index(b.p(), a.p())?;
    Ok(sum.abs() as f64)
}

fn e_idempotent(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let pt = point(rng, n);
    let once = bundle::tangent_project_e(&pt, &sample::hermitian(rng, n), &sample::vector(rng, n))?;
    let twice = bundle::tangent_project_e(&pt, &once.x, &once.g)?;
    Ok(twice.sub(&once).ambient_norm())
}

fn e_fixes_delta(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let pt = point(rng, n);
    let v = sample::tangent(rng, &pt);
    Ok(bundle::tangent_project_e(&pt, &v.x, &v.g)?.sub(&v).ambient_norm())
}

fn action_composition(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let pt = point(rng, n);
    let u = sample::unitary(rng, n);
    let v = sample::unitary(rng, n);
    let lhs = bundle::act(&(&u * &v), &pt)?;
    let rhs = bundle::act(&u, &bundle::act(&v, &pt)?)?;
    Ok((lhs.p() - rhs.p()).norm() + (lhs.f() - rhs.f()).norm())
}

fn delta_kernel(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let pt = point(rng, n);
    let z = sample::anti_hermitian(rng, n);
    let vertical = riemann::vertical_project_q(&pt, &z)?;
    Ok(bundle::delta(&pt, &vertical)?.ambient_norm())
}

fn lifting_residual(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let pt = point(rng, n);
    let v = sample::tangent(rng, &pt);
    let z = bundle::some_lifting(&pt, &v)?;
    Ok(bundle::delta(&pt, &z)?.sub(&v).ambient_norm())
}

fn cross_section_action(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let base = point(rng, n);
    let size = 0.5 * uniform(rng);
    let pt = sample::nearby_point(rng, &base, size);
    let img = bundle::act(&bundle::cross_section(&base, &pt)?, &base)?;
    Ok((img.p() - pt.p()).norm() + (img.f() - pt.f()).norm())
}

fn trivialize_roundtrip(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let base = point(rng, n);
    let size = 0.5 * uniform(rng);
    let pt = sample::nearby_point(rng, &base, size);
    let (p, h) = bundle::trivialize(&base, &pt)?;
    let back = bundle::untrivialize(&base, &p, &h)?;
    let membership = (base.p() * &h - &h).norm();
    Ok(((back.p() - pt.p()).norm() + (back.f() - pt.f()).norm()).max(membership))
}

fn minimal_residual(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let pt = point(rng, n);
    let v = sample::tangent(rng, &pt);
    let lift = finsler::minimal_lifting(&pt, &v)?;
    Ok(bundle::delta(&pt, &lift.x0matrix)?.sub(&v).ambient_norm())
}

fn norm_matches_matrix(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let pt = point(rng, n);
    let v = sample::tangent(rng, &pt);
    let lift = finsler::minimal_lifting(&pt, &v)?;
    Ok((lift.norm - spectral_norm(&lift.x0matrix)).abs())
}

fn lower_bound_law(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let pt = point(rng, n);
    let v = sample::tangent(rng, &pt);
    let norm = finsler::finsler_norm(&pt, &v)?;
    Ok(spectral_norm(&v.x).max(v.g.norm()) - norm)
}

fn row_certificate(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let pt = point(rng, n);
    let v = sample::tangent(rng, &pt);
    Ok(finsler::minimal_lifting(&pt, &v)?.oracle_gap.unwrap_or(0.0))
}

fn homogeneity(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let pt = point(rng, n);
    let v = sample::tangent(rng, &pt);
    let s = sample::real_gaussian(rng) * 2.0;
    let lhs = finsler::finsler_norm(&pt, &v.scale(s))?;
    Ok((lhs - s.abs() * finsler::finsler_norm(&pt, &v)?).abs())
}

fn triangle(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let pt = point(rng, n);
    let v = sample::tangent(rng, &pt);
    let w = sample::tangent(rng, &pt);
    let sum = finsler::finsler_norm(&pt, &v.add(&w))?;
    Ok(sum - finsler::finsler_norm(&pt, &v)? - finsler::finsler_norm(&pt, &w)?)
}

fn unitary_invariance(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let pt = point(rng, n);
    let v = sample::tangent(rng, &pt);
    let u = sample::unitary(rng, n);
    let moved = bundle::act(&u, &pt)?;
    Ok((finsler::finsler_norm(&moved, &v.conjugate(&u))? - finsler::finsler_norm(&pt, &v)?).abs())
}

fn krein_parrott(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let r = 1 + ((uniform(rng) * (n - 1) as f64) as usize).min(n - 2);
    let b = sample::anti_hermitian(rng, r);
    let a = sample::matrix(rng, r, n - r);
    let done = finsler::krein_complete(&b, &a);
    Ok(spectral_norm(&finsler::assemble_krein(&b, &a, &done.z)) - done.mu)
}

fn q_idempotent(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let pt = point(rng, n);
    let q = riemann::vertical_project_q(&pt, &sample::anti_hermitian(rng, n))?;
    Ok((riemann::vertical_project_q(&pt, &q)? - q).norm())
}

fn q_orthogonality(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let pt = point(rng, n);
    let z = sample::anti_hermitian(rng, n);
    let q = riemann::vertical_project_q(&pt, &z)?;
    Ok(trace_dot(&q, &(z - &q)).abs())
}

fn pythagoras(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let pt = point(rng, n);
    let z = sample::anti_hermitian(rng, n);
    let q = riemann::vertical_project_q(&pt, &z)?;
    let h = riemann::horizontal_project(&pt, &z)?.matrix();
    Ok((z.norm_squared() - q.norm_squared() - h.norm_squared()).abs())
}

fn kappa_residual(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let pt = point(rng, n);
    let v = sample::tangent(rng, &pt);
    let k = riemann::horizontal_lift_kappa(&pt, &v)?.matrix();
    Ok(bundle::delta(&pt, &k)?.sub(&v).ambient_norm())
}

fn quotient_closed_form(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let pt = point(rng, n);
    let h = riemann::horizontal_project(&pt, &sample::anti_hermitian(rng, n))?;
    Ok((h.norm() - h.matrix().norm()).abs())
}

fn ambient_closed_form(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let pt = point(rng, n);
    let h = riemann::horizontal_project(&pt, &sample::anti_hermitian(rng, n))?;
    let v = bundle::delta(&pt, &h.matrix())?;
    Ok((h.ambient_norm() - v.ambient_norm()).abs())
}

fn metric_equivalence(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let pt = point(rng, n);
    let v = sample::tangent(rng, &pt);
    let q = riemann::metric_norm(&pt, &v, MetricKind::Quotient)?;
    let a = riemann::metric_norm(&pt, &v, MetricKind::Ambient)?;
    Ok((q * 0.5f64.sqrt() - a).max(a - q * 1.5f64.sqrt()))
}

fn pi_idempotent(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let pt = point(rng, n);
    let once = riemann::orth_project_pi(&pt, &sample::hermitian(rng, n), &sample::vector(rng, n))?;
    let twice = riemann::orth_project_pi(&pt, &once.x, &once.g)?;
    Ok(twice.sub(&once).ambient_norm())
}

fn pi_self_adjoint(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let pt = point(rng, n);
    let u = TangentVector { x: sample::hermitian(rng, n), g: sample::vector(rng, n) };
    let w = TangentVector { x: sample::hermitian(rng, n), g: sample::vector(rng, n) };
    let pu = riemann::orth_project_pi(&pt, &u.x, &u.g)?;
    let pw = riemann::orth_project_pi(&pt, &w.x, &w.g)?;
    Ok((ambient_dot(&pu, &w) - ambient_dot(&u, &pw)).abs())
}

fn pi_closed_forms(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let pt = point(rng, n);
    let x = sample::hermitian(rng, n);
    let h = sample::vector(rng, n);
    let a = riemann::orth_project_pi(&pt, &x, &h)?;
    let b = riemann::orth_project_pi_closed(&pt, &x, &h)?;
    Ok(a.sub(&b).ambient_norm())
}

fn dexp_fd(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let z = sample::anti_hermitian(rng, n);
    let w = sample::anti_hermitian(rng, n);
    let h = 1e-5;
    let fd = (mat_exp(&(&z + w.scale(h)))? - mat_exp(&(&z - w.scale(h)))?).unscale(2.0 * h);
    Ok((riemann::dexp_f(&z, &w)? - mat_exp(&z)?.adjoint() * fd).norm())
}

fn geodesic_residual(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let step = 1e-4;
    let pt = point(rng, n);
    let v = sample::tangent(rng, &pt);
    let z = riemann::horizontal_lift_kappa(&pt, &v)?.matrix();
    let s0 = uniform(rng);
    let mut curve = Vec::new();
    let mut field = Vec::new();
    let lifted = bundle::delta(&pt, &z)?;
    for k in 0..3 {
        let s = s0 + step * (k as f64 - 1.0);
        curve.push(riemann::geodesic(&pt, &v, s)?);
        field.push(lifted.conjugate(&mat_exp(&z.scale(s))?));
    }
    Ok(riemann::covariant_derivative(&curve, &field, step, 1)?.ambient_norm())
}

fn exp_log_roundtrip(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let pt = point(rng, n);
    let v = sample::tangent(rng, &pt);
    let q = riemann::metric_norm(&pt, &v, MetricKind::Quotient)?;
    let v = v.scale(0.7 * uniform(rng) / q);
    let target = riemann::exp_map(&pt, &v)?;
    let z = riemann::log_map(&pt, &target)?;
    Ok((z.matrix() - riemann::horizontal_lift_kappa(&pt, &v)?.matrix()).norm())
}

fn eigenvalue_identity(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let z = sample::anti_hermitian(rng, n);
    let values = (z * C64::new(0.0, 1.0)).symmetric_eigen().eigenvalues;
    let mut err: f64 = 0.0;
    for a in values.iter() {
        for b in values.iter() {
            let t = b - a;
            let lambda = C64::new(0.0, t);
            let f = if t.abs() < 1e-3 {
                C64::new(1.0, 0.0) - lambda / 2.0 + lambda * lambda / 6.0 - lambda * lambda * lambda / 24.0
            } else {
                (C64::new(1.0, 0.0) - (-lambda).exp()) / lambda
            };
            err = err.max(((f - 1.0).norm_sqr() - (1.0 - 2.0 * riemann::g_func(t))).abs());
        }
    }
    Ok(err)
}

fn contraction_below_one(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let z = sample::anti_hermitian(rng, n);
    let size = riemann::find_r0() / 2.0 * (1.0 - 1e-3) * uniform(rng);
    let gap = riemann::contraction_gap(&z.scale(size / spectral_norm(&z)))?;
    Ok(if gap < 1.0 { 0.0 } else { gap - 1.0 + f64::EPSILON })
}

fn r0_root(_: &mut SampleRng, _: usize) -> Result<f64> {
    let r0 = riemann::find_r0();
    Ok((r0 * r0.sin() + r0.cos() - 1.0).abs())
}

fn curvature_nonnegative(rng: &mut SampleRng, n: usize) -> Result<f64> {
    let pt = point(rng, n);
    let v = sample::tangent(rng, &pt);
    let w = sample::tangent(rng, &pt);
    Ok(-riemann::sectional_curvature(&pt, &v, &w)?)
}
