//! Competitor sweep along Finsler geodesics.

use super::minimal_lifting;
use crate::bundle::{BundlePoint, TangentVector};
use crate::curve::{self, CurveMetric};
use crate::error::Result;

pub use crate::curve::ProbeReport;

/// Lengths of `s ↦ e^{sX₀}·pt` on `[0, t]` against `n_competitors`
/// perturbed curves with the same endpoints. `v` is rescaled to unit
/// Finsler norm first.
pub fn minimality_probe(
    pt: &BundlePoint,
    v: &TangentVector,
    t: f64,
    n_competitors: usize,
    seed: u64,
) -> Result<ProbeReport> {
    let lift = minimal_lifting(pt, v)?;
    if lift.norm == 0.0 {
        return Ok(ProbeReport::trivial(n_competitors));
    }
    let x0 = lift.x0matrix.unscale(lift.norm);
    curve::minimality_sweep(pt, &x0, t, CurveMetric::Finsler, n_competitors, seed)
}
