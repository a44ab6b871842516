//! Closed family of minimal completions for the row of a vector in the
//! fiber of `(P₀, f₀)`: `g = i·g₀ f₀ + γ` with `γ ⊥ f₀` in `R(P₀)`.
//!
//! With `T = γγ*/‖γ‖²` the family is
//! `Y_Z = ±i·g₀ T + ‖g‖ (1 − T)^{1/2} Z (1 − T)^{1/2}`, `‖Z‖ ≤ 1`.
//! Since `T` is a projection, `(1 − T)^{1/2} = 1 − T`. Which sign attains
//! the minimum depends on the orientation of the `(2,1)` entry of the row.

use crate::error::{Error, Result};
use crate::linalg::{check_anti_hermitian, identity, outer, spectral_norm, CMat, CVec, C64, TOL};

/// Orientation of the lower-left entry of the row block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowOrientation {
    /// `[[i g₀, −γ*], [γ, Y]]`: the row of an actual lifting of `(0, g)`.
    /// The attaining family carries `−i g₀ T`.
    Lifting,
    /// `[[i g₀, −γ*], [−γ, Y]]`: the printed orientation, attained by `+i g₀ T`.
    Printed,
}

impl RowOrientation {
    fn sign(self) -> f64 {
        match self {
            RowOrientation::Lifting => -1.0,
            RowOrientation::Printed => 1.0,
        }
    }
}

/// Member of the family for the given orientation.
pub fn dkw_solutions(g0: f64, gamma: &CVec, zfree: &CMat, orientation: RowOrientation) -> Result<CMat> {
    let k = gamma.len();
    if zfree.shape() != (k, k) {
        return Err(Error::DimensionMismatch(format!(
            "free slot {}x{} vs gamma of length {k}",
            zfree.nrows(),
            zfree.ncols()
        )));
    }
    let gn = gamma.norm();
    if gn <= TOL {
        return Err(Error::DegenerateGamma(gn));
    }
    check_anti_hermitian(zfree)?;
    let zn = spectral_norm(zfree);
    if zn > 1.0 + TOL {
        return Err(Error::NotContraction(zn));
    }
    let t = outer(gamma, gamma).unscale(gn * gn);
    let rest = identity(k) - &t;
    let g_norm = (g0 * g0 + gn * gn).sqrt();
    let phase = C64::new(0.0, orientation.sign() * g0);
    Ok(&t * phase + (&rest * zfree * &rest).scale(g_norm))
}

/// Row block `[[i g₀, −γ*], [±γ, Y]]` in the chosen orientation.
pub fn dkw_row(g0: f64, gamma: &CVec, y: &CMat, orientation: RowOrientation) -> CMat {
    let k = gamma.len();
    let mut row = CMat::zeros(k + 1, k + 1);
    row[(0, 0)] = C64::new(0.0, g0);
    row.view_mut((0, 1), (1, k)).copy_from(&(-gamma.adjoint()));
    let lower = match orientation {
        RowOrientation::Lifting => gamma.clone(),
        RowOrientation::Printed => -gamma,
    };
    row.view_mut((1, 0), (k, 1)).copy_from(&lower);
    row.view_mut((1, 1), (k, k)).copy_from(y);
    row
}
