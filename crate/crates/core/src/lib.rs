//! Numerical geometry of the canonical sphere bundle
//! `R = {(P, f) : Pf = f, |f| = 1}` over the Grassmannian of `Cⁿ`.
//!
//! * [`linalg`]: dense complex kernels, adapted frames and block views.
//! * [`bundle`]: points, the unitary action, its differential and charts.
//! * [`finsler`]: the quotient operator-norm metric via minimal liftings.
//! * [`riemann`]: the quotient Hilbert-Schmidt metric, geodesics and curvature.
//! * [`curve`]: lengths of sampled and unitary-driven curves.

pub mod bundle;
pub mod curve;
pub mod error;
pub mod finsler;
pub mod linalg;
pub mod riemann;
pub mod sample;

pub use bundle::{BundlePoint, TangentVector};
pub use error::{Error, Result};
pub use linalg::{AdaptedFrame, BlockGrid, CMat, CVec, C64, TOL};
