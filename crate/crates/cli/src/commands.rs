//! The subcommands. Each returns the bytes to write; `main` decides where.

use std::path::Path;

use flagfiber::bundle::{self, TangentVector};
use flagfiber::curve::{generator_speed, CurveMetric};
use flagfiber::linalg::mat_exp;
use flagfiber::riemann::{self, HorizontalVector, MetricKind};
use flagfiber::sample::{self, SampleRng};
use flagfiber::{finsler, BundlePoint, CMat, CVec};
use rayon::prelude::*;

use crate::error::CliError;
use crate::io::{read_json, to_pretty, HorizontalJson, LiftingJson, PointJson, TangentJson};
use crate::verify::{self, VerifyConfig};

const NORMS_SALT: u64 = 0x4E4F_524D;
const CURVATURE_SALT: u64 = 0x4355_5256;

/// Shared sampling configuration.
#[derive(Debug, Clone, Copy)]
pub struct RunConfig {
    pub dim: usize,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.dim < 2 {
            return Err(CliError::Config(format!("--dim must be at least 2, got {}", self.dim)));
        }
        if self.samples < 1 {
            return Err(CliError::Config("--samples must be at least 1".into()));
        }
        if self.tol.is_nan() || self.tol <= 0.0 || self.tol.is_infinite() {
            return Err(CliError::Config(format!("--tol must be positive and finite, got {}", self.tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeodesicMetric {
    Finsler,
    Quotient,
}

/// Which tangent directions `norms` samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormFamily {
    Random,
    /// Only the `g` slot of the horizontal lift, where ambient/quotient is `1/√2`.
    G,
    /// Only the `y1` slot, where the ratio is `√(3/2)`.
    Y1,
}

pub struct Output {
    pub body: String,
    /// Extra lines for stderr.
    pub note: Option<String>,
    pub exit: i32,
}

impl Output {
    fn ok(body: String) -> Self {
        Output { body, note: None, exit: 0 }
    }
}

fn read_point(path: &Path) -> Result<BundlePoint, CliError> {
    read_json::<PointJson>(path)?.to_point()
}

fn read_tangent(path: &Path, pt: &BundlePoint) -> Result<TangentVector, CliError> {
    read_json::<TangentJson>(path)?.to_tangent(pt)
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Output(e.to_string())
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String, CliError> {
    let bytes = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
}

pub fn verify(cfg: &RunConfig) -> Result<Output, CliError> {
    cfg.validate()?;
    let report = verify::run(&VerifyConfig { dim: cfg.dim, samples: cfg.samples, seed: cfg.seed, tol: cfg.tol });
    let exit = if report.pass { 0 } else { 1 };
    Ok(Output { body: to_pretty(&report), note: None, exit })
}

pub fn lift(point: &Path, vector: &Path) -> Result<Output, CliError> {
    let pt = read_point(point)?;
    let v = read_tangent(vector, &pt)?;
    let lift = finsler::minimal_lifting(&pt, &v)?;
    Ok(Output::ok(to_pretty(&LiftingJson::from_lifting(&lift))))
}

pub fn geodesic(point: &Path, vector: &Path, metric: GeodesicMetric, t: f64, steps: usize) -> Result<Output, CliError> {
    if steps < 1 {
        return Err(CliError::Config("--steps must be at least 1".into()));
    }
    if !t.is_finite() {
        return Err(CliError::Config(format!("--t must be finite, got {t}")));
    }
    let pt = read_point(point)?;
    let v = read_tangent(vector, &pt)?;
    let n = pt.dim();
    // Both geodesics are orbits of a one-parameter unitary group.
    let (z, curve_metric) = match metric {
        GeodesicMetric::Finsler => (finsler::minimal_lifting(&pt, &v)?.x0matrix, CurveMetric::Finsler),
        GeodesicMetric::Quotient => (riemann::horizontal_lift_kappa(&pt, &v)?.matrix(), CurveMetric::Quotient),
    };

    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["s".to_string()];
    for i in 0..n {
        for j in 0..n {
            header.push(format!("p_{i}_{j}_re"));
            header.push(format!("p_{i}_{j}_im"));
        }
    }
    for i in 0..n {
        header.push(format!("f_{i}_re"));
        header.push(format!("f_{i}_im"));
    }
    header.push("speed".into());
    w.write_record(&header).map_err(csv_error)?;

    let rows: Vec<Result<Vec<f64>, CliError>> = (0..=steps)
        .into_par_iter()
        .map(|k| {
            let s = t * k as f64 / steps as f64;
            let u = mat_exp(&z.scale(s))?;
            let here = bundle::act(&u, &pt)?;
            // The generator seen from the moved point is still `z`.
            let speed = generator_speed(&here, &here.frame(), &z, curve_metric)?;
            let mut row = vec![s];
            row.extend(here.p().transpose().iter().flat_map(|c| [c.re, c.im]));
            row.extend(here.f().iter().flat_map(|c| [c.re, c.im]));
            row.push(speed);
            Ok(row)
        })
        .collect();
    for row in rows {
        w.serialize(row?).map_err(csv_error)?;
    }
    Ok(Output::ok(finish_csv(w)?))
}

pub fn logmap(from: &Path, to: &Path) -> Result<Output, CliError> {
    let a = read_point(from)?;
    let b = read_point(to)?;
    if a.dim() != b.dim() {
        return Err(CliError::Config(format!("points live in dimensions {} and {}", a.dim(), b.dim())));
    }
    let h = riemann::log_map(&a, &b)?;
    Ok(Output::ok(to_pretty(&HorizontalJson::from_horizontal(&h))))
}

fn family_sample(rng: &mut SampleRng, n: usize, family: NormFamily) -> flagfiber::Result<(BundlePoint, TangentVector)> {
    let pick = |rng: &mut SampleRng, lo: usize, hi: usize| {
        // Uniform integer in lo..=hi from the angle of a planar Gaussian.
        let (a, b) = (sample::real_gaussian(rng), sample::real_gaussian(rng));
        let u = (b.atan2(a) + std::f64::consts::PI) / (2.0 * std::f64::consts::PI);
        (lo + (u * (hi - lo + 1) as f64) as usize).min(hi)
    };
    match family {
        NormFamily::Random => {
            let pt = sample::point_any_rank(rng, n);
            let v = sample::tangent(rng, &pt);
            Ok((pt, v))
        }
        NormFamily::G | NormFamily::Y1 => {
            let rank = if family == NormFamily::G { pick(rng, 2, n) } else { pick(rng, 1, n - 1) };
            let pt = sample::point(rng, n, rank);
            let frame = pt.frame();
            let [_, k, m] = frame.dims;
            let mut h = HorizontalVector {
                t: 0.0,
                g: CVec::zeros(k),
                y1: CMat::zeros(1, m),
                y2: CMat::zeros(k, m),
                frame,
            };
            if family == NormFamily::G {
                h.g = sample::vector(rng, k);
            } else {
                h.y1 = sample::matrix(rng, 1, m);
            }
            let v = bundle::delta(&pt, &h.matrix())?;
            Ok((pt, v))
        }
    }
}

pub fn norms(cfg: &RunConfig, family: NormFamily) -> Result<Output, CliError> {
    cfg.validate()?;
    let rows: Vec<Result<(f64, f64), CliError>> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample::stream(cfg.seed, NORMS_SALT, i as u64);
            let (pt, v) = family_sample(&mut rng, cfg.dim, family)?;
            let q = riemann::metric_norm(&pt, &v, MetricKind::Quotient)?;
            let a = riemann::metric_norm(&pt, &v, MetricKind::Ambient)?;
            Ok((q, a))
        })
        .collect();

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["sample", "quotient", "ambient", "ratio"]).map_err(csv_error)?;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (i, row) in rows.into_iter().enumerate() {
        let (q, a) = row?;
        let ratio = if q > 0.0 { a / q } else { f64::NAN };
        if q > 0.0 {
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        w.serialize((i, q, a, ratio)).map_err(csv_error)?;
    }
    let note = format!("ratio min {lo:.12} max {hi:.12}");
    Ok(Output { body: finish_csv(w)?, note: Some(note), exit: 0 })
}

pub fn curvature(cfg: &RunConfig) -> Result<Output, CliError> {
    cfg.validate()?;
    let rows: Vec<Result<f64, CliError>> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample::stream(cfg.seed, CURVATURE_SALT, i as u64);
            let pt = sample::point_any_rank(&mut rng, cfg.dim);
            let v = sample::tangent(&mut rng, &pt);
            let w = sample::tangent(&mut rng, &pt);
            Ok(riemann::sectional_curvature(&pt, &v, &w)?)
        })
        .collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["sample", "curvature"]).map_err(csv_error)?;
    for (i, k) in rows.into_iter().enumerate() {
        w.serialize((i, k?)).map_err(csv_error)?;
    }
    Ok(Output::ok(finish_csv(w)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        let ok = RunConfig { dim: 2, samples: 1, seed: 0, tol: 1e-10 };
        assert!(ok.validate().is_ok());
        for bad in [
            RunConfig { dim: 1, ..ok },
            RunConfig { samples: 0, ..ok },
            RunConfig { tol: 0.0, ..ok },
            RunConfig { tol: f64::NAN, ..ok },
        ] {
            assert_eq!(bad.validate().unwrap_err().exit_code(), 2);
        }
    }

    #[test]
    fn sharp_families_hit_their_constants() {
        let cfg = RunConfig { dim: 4, samples: 20, seed: 3, tol: 1e-10 };
        for (family, expected) in [(NormFamily::G, 0.5f64.sqrt()), (NormFamily::Y1, 1.5f64.sqrt())] {
            let out = norms(&cfg, family).unwrap();
            let mut r = csv::Reader::from_reader(out.body.as_bytes());
            for rec in r.records() {
                let ratio: f64 = rec.unwrap()[3].parse().unwrap();
                assert!((ratio - expected).abs() < 1e-12);
            }
        }
    }
}
