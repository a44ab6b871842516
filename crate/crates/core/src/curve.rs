//! Lengths of sampled curves and of unitary orbit curves.

use rand::Rng;
use rayon::prelude::*;

use crate::bundle::{self, BundlePoint, TangentVector};
use crate::error::{Error, Result};
use crate::finsler;
use crate::linalg::{eigh, fro, hermitian_part, spectral_norm, AdaptedFrame, CMat, C64, I, TOL};
use crate::riemann;
use crate::sample;

/// Tangent norm used to measure a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveMetric {
    Finsler,
    Quotient,
    Ambient,
}

pub fn tangent_norm(pt: &BundlePoint, v: &TangentVector, metric: CurveMetric) -> Result<f64> {
    match metric {
        CurveMetric::Finsler => finsler::finsler_norm(pt, v),
        CurveMetric::Quotient => riemann::metric_norm(pt, v, riemann::MetricKind::Quotient),
        CurveMetric::Ambient => riemann::metric_norm(pt, v, riemann::MetricKind::Ambient),
    }
}

/// Norm of `δ_pt(z)` for an anti-Hermitian generator `z`.
pub fn generator_speed(pt: &BundlePoint, frame: &AdaptedFrame, z: &CMat, metric: CurveMetric) -> Result<f64> {
    Ok(match metric {
        CurveMetric::Finsler => finsler::generator_norm(frame, z)?,
        CurveMetric::Quotient => fro(&riemann::horizontal_part(pt, z)),
        CurveMetric::Ambient => bundle::delta_unchecked(pt, z).ambient_norm(),
    })
}

/// Length of a sampled curve. Each chord `Δ = γ_{k+1} − γ_k` is projected
/// onto the tangent spaces at both ends and the two norms averaged, which
/// makes the sum second-order accurate in the sample spacing and
/// independent of the parametrization.
pub fn curve_length(samples: &[BundlePoint], metric: CurveMetric) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::IncompatibleSamples(format!("{} samples, need at least 2", samples.len())));
    }
    let mut total = 0.0;
    for (k, pair) in samples.windows(2).enumerate() {
        let (a, b) = (&pair[0], &pair[1]);
        if a.dim() != b.dim() || a.rank() != b.rank() {
            return Err(Error::IncompatibleSamples(format!("samples {k} and {} lie in different components", k + 1)));
        }
        let dp = b.p() - a.p();
        let dist = spectral_norm(&dp);
        if dist >= 1.0 - TOL {
            return Err(Error::IncompatibleSamples(format!(
                "samples {k} and {} are not chart-compatible (|dP| = {dist})",
                k + 1
            )));
        }
        let dx = hermitian_part(&dp);
        let df = b.f() - a.f();
        let va = bundle::project_e_unchecked(a, &dx, &df);
        let vb = bundle::project_e_unchecked(b, &dx, &df);
        total += 0.5 * (tangent_norm(a, &va, metric)? + tangent_norm(b, &vb, metric)?);
    }
    Ok(total)
}

/// Outcome of a competitor sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub geodesic_length: f64,
    pub min_competitor_length: f64,
    pub competitors: usize,
    /// Competitors shorter than the geodesic by more than `tolerance`.
    pub violations: usize,
    /// Largest `geodesic − competitor` (negative when all are longer).
    pub max_shortfall: f64,
    pub tolerance: f64,
}

impl ProbeReport {
    pub fn trivial(competitors: usize) -> Self {
        ProbeReport {
            geodesic_length: 0.0,
            min_competitor_length: 0.0,
            competitors,
            violations: 0,
            max_shortfall: 0.0,
            tolerance: PROBE_TOL,
        }
    }

    pub fn violated(&self) -> bool {
        self.violations > 0
    }
}

pub const PROBE_TOL: f64 = 1e-6;
const SIMPSON_INTERVALS: usize = 48;
const SWEEP_SALT: u64 = 0x5EED_0001;

/// Unitary exponential from a precomputed spectrum `Z = V diag(iμ) V*`.
struct SkewExp {
    mu: Vec<f64>,
    v: CMat,
}

impl SkewExp {
    fn new(z: &CMat) -> Self {
        let (values, v) = eigh(&(z * I));
        SkewExp { mu: values.into_iter().map(|l| -l).collect(), v }
    }

    fn at(&self, s: f64) -> CMat {
        let mut scaled = self.v.clone();
        for (k, m) in self.mu.iter().enumerate() {
            let phase = C64::from_polar(1.0, m * s);
            for e in scaled.column_mut(k).iter_mut() {
                *e *= phase;
            }
        }
        scaled * self.v.adjoint()
    }
}

/// One competitor `U(s) = e^{ε₁φ₁(s)W₁} e^{ε₂φ₂(s)W₂} e^{sX}` with
/// `φᵢ(s) = sin(kᵢπ s/t)`, so `U(0) = 1` and `U(t) = e^{tX}`.
struct Competitor {
    w1: CMat,
    w2: SkewExp,
    w2_raw: CMat,
    eps: [f64; 2],
    freq: [f64; 2],
}

impl Competitor {
    fn draw(seed: u64, index: u64, n: usize, t: f64) -> Self {
        let mut rng = sample::stream(seed, SWEEP_SALT, index);
        let unit = |rng: &mut sample::SampleRng| {
            let w = sample::anti_hermitian(rng, n);
            let size = fro(&w);
            w.unscale(size)
        };
        let w1 = unit(&mut rng);
        let w2_raw = unit(&mut rng);
        let eps = [
            t.abs() * 10f64.powf(rng.random_range(-3.0..0.0)),
            t.abs() * 10f64.powf(rng.random_range(-3.0..0.0)),
        ];
        let freq = [rng.random_range(1..=3) as f64, rng.random_range(1..=3) as f64];
        Competitor { w1, w2: SkewExp::new(&w2_raw), w2_raw, eps, freq }
    }

    /// Pulled-back velocity `U(s)* U'(s)`:
    /// `B*[A₂*(ε₁φ₁'W₁)A₂ + ε₂φ₂'W₂ + X]B`.
    fn velocity(&self, x: &SkewExp, x_raw: &CMat, s: f64, t: f64) -> CMat {
        let pi = std::f64::consts::PI;
        let w = |k: f64| k * pi / t;
        let phi2 = (w(self.freq[1]) * s).sin();
        let d1 = self.eps[0] * w(self.freq[0]) * (w(self.freq[0]) * s).cos();
        let d2 = self.eps[1] * w(self.freq[1]) * (w(self.freq[1]) * s).cos();
        let a2 = self.w2.at(self.eps[1] * phi2);
        let b = x.at(s);
        let inner = a2.adjoint() * self.w1.scale(d1) * &a2 + self.w2_raw.scale(d2) + x_raw;
        b.adjoint() * inner * b
    }
}

fn simpson(values: &[f64], h: f64) -> f64 {
    let last = values.len() - 1;
    let mut acc = values[0] + values[last];
    for (k, v) in values.iter().enumerate().take(last).skip(1) {
        acc += if k % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    acc * h / 3.0
}

/// Compares the orbit `s ↦ e^{sX}·pt` on `[0, t]` with `n` perturbed
/// curves sharing its endpoints. Competitor `j` is drawn from its own
/// random stream, so the report does not depend on the thread count.
pub fn minimality_sweep(
    pt: &BundlePoint,
    x: &CMat,
    t: f64,
    metric: CurveMetric,
    n_competitors: usize,
    seed: u64,
) -> Result<ProbeReport> {
    if t == 0.0 {
        return Ok(ProbeReport::trivial(n_competitors));
    }
    let frame = pt.frame();
    let geodesic_length = t.abs() * generator_speed(pt, &frame, x, metric)?;
    let x_exp = SkewExp::new(x);
    let h = t / SIMPSON_INTERVALS as f64;
    let lengths: Vec<f64> = (0..n_competitors)
        .into_par_iter()
        .map(|j| {
            let comp = Competitor::draw(seed, j as u64, pt.dim(), t);
            let speeds = (0..=SIMPSON_INTERVALS)
                .map(|k| {
                    let s = k as f64 * h;
                    generator_speed(pt, &frame, &comp.velocity(&x_exp, x, s, t), metric)
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok(simpson(&speeds, h.abs()))
        })
        .collect::<Result<Vec<f64>>>()?;
    let min_competitor_length = lengths.iter().copied().fold(f64::INFINITY, f64::min);
    let max_shortfall = lengths.iter().map(|l| geodesic_length - l).fold(f64::NEG_INFINITY, f64::max);
    let violations = lengths.iter().filter(|l| geodesic_length - **l > PROBE_TOL).count();
    Ok(ProbeReport {
        geodesic_length,
        min_competitor_length,
        competitors: n_competitors,
        violations,
        max_shortfall,
        tolerance: PROBE_TOL,
    })
}
