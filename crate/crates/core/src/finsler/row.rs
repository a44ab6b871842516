//! First step of the minimal-lifting procedure: fill the anti-Hermitian
//! slot `Y` of the row block
//!
//! ```text
//! R(Y) = [ i·x0    xrow   a_top    ]
//!        [ −xrow*  Y      a_bottom ]
//! ```
//!
//! so that its operator norm is least. The minimum is bounded below by
//! `L = max(‖first row‖, ‖Y-free columns‖)`. When the unconstrained
//! Parrott completion can be taken skew the bound is attained and we stop;
//! otherwise the skew constraint binds and a log-barrier method on
//!
//! ```text
//! [ τ − G   M(Y) ]
//! [ M(Y)*   1    ]  ⪰ 0,   G = C Cᴴ,  M(Y) = [xrow; Y]
//! ```
//!
//! minimizes `τ = ‖R(Y)‖²`, with `C` the fixed columns.

use nalgebra::{Cholesky, DMatrix, DVector};

use super::LiftingTemplate;
use crate::error::{Error, Result};
use crate::linalg::{anti_hermitian_part, spectral_norm, CMat, C64};

/// How the row minimum was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowMethod {
    /// No free slot (rank one) or zero data.
    Trivial,
    /// A closed-form candidate attained the lower bound.
    Closed,
    /// Interior-point iterations.
    Barrier,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowMinimum {
    /// Minimizing anti-Hermitian slot on `R(P₀) ⊖ ⟨f₀⟩`.
    pub y: CMat,
    /// Operator norm of the completed row block.
    pub iota: f64,
    /// Certified lower bound for the true minimum.
    pub lower: f64,
    pub method: RowMethod,
}

impl RowMinimum {
    /// Distance between the returned value and the certified bound.
    pub fn gap(&self) -> f64 {
        (self.iota - self.lower).max(0.0)
    }
}

/// Relative slack under which a candidate counts as attaining `L`.
const ATTAIN_RTOL: f64 = 1e-12;
/// Target duality gap for the normalized barrier problem.
const GAP_TARGET: f64 = 1e-11;
const MAX_NEWTON: usize = 1500;
/// Newton decrement at which a barrier subproblem counts as centered.
const CENTER_TOL: f64 = 1e-3;
/// Newton steps allowed per centering before rounding is blamed.
const CENTER_STEPS: usize = 60;

pub fn row_minimize(tpl: &LiftingTemplate) -> Result<RowMinimum> {
    let k = tpl.xrow.ncols();
    let lower = tpl.lower_bound();
    if k == 0 || lower == 0.0 && tpl.xrow.iter().all(|z| *z == C64::new(0.0, 0.0)) {
        let y = CMat::zeros(k, k);
        let iota = spectral_norm(&tpl.row_block(&y));
        return Ok(RowMinimum { y, iota, lower: lower.min(iota), method: RowMethod::Trivial });
    }

    // Closed candidates, reduced by (value, lowest index).
    let candidates = [CMat::zeros(k, k), central_candidate(tpl, lower)];
    let mut best: Option<(f64, CMat)> = None;
    for y in candidates {
        let value = spectral_norm(&tpl.row_block(&y));
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, y));
        }
    }
    let (value, start) = best.expect("two candidates");
    if value <= lower * (1.0 + ATTAIN_RTOL) {
        return Ok(RowMinimum { y: start, iota: value, lower, method: RowMethod::Closed });
    }

    let (y, tau_lower) = barrier(tpl, &start, value)?;
    let mut iota = spectral_norm(&tpl.row_block(&y));
    let mut y = y;
    if iota > value {
        // Never return something worse than a probed candidate.
        iota = value;
        y = start;
    }
    let certified = tau_lower.max(0.0).sqrt().max(lower).min(iota);
    Ok(RowMinimum { y, iota, lower: certified, method: RowMethod::Barrier })
}

/// Skew part of the Parrott central completion of the row.
fn central_candidate(tpl: &LiftingTemplate, mu: f64) -> CMat {
    let k = tpl.xrow.ncols();
    let fixed = tpl.fixed_columns();
    let a = fixed.rows(0, 1).into_owned();
    let c = fixed.rows(1, k).into_owned();
    let denom = mu * mu - a.norm_squared();
    if denom <= 1e-12 * mu * mu {
        return CMat::zeros(k, k);
    }
    let ca = &c * a.adjoint();
    let y = (ca * &tpl.xrow).unscale(-denom);
    anti_hermitian_part(&y)
}

/// Orthogonal basis of the real space of `k×k` anti-Hermitian matrices.
pub(crate) fn skew_basis(k: usize) -> Vec<CMat> {
    let mut basis = Vec::with_capacity(k * k);
    for i in 0..k {
        let mut e = CMat::zeros(k, k);
        e[(i, i)] = C64::new(0.0, 1.0);
        basis.push(e);
    }
    for i in 0..k {
        for j in i + 1..k {
            let mut e = CMat::zeros(k, k);
            e[(i, j)] = C64::new(1.0, 0.0);
            e[(j, i)] = C64::new(-1.0, 0.0);
            basis.push(e);
            let mut e = CMat::zeros(k, k);
            e[(i, j)] = C64::new(0.0, 1.0);
            e[(j, i)] = C64::new(0.0, 1.0);
            basis.push(e);
        }
    }
    basis
}

fn coords(basis: &[CMat], y: &CMat) -> Vec<f64> {
    basis
        .iter()
        .map(|e| {
            let dot: C64 = e.iter().zip(y.iter()).map(|(a, b)| a.conj() * b).sum();
            dot.re / e.norm_squared()
        })
        .collect()
}

fn combine(basis: &[CMat], y: &[f64], k: usize) -> CMat {
    let mut out = CMat::zeros(k, k);
    for (e, &w) in basis.iter().zip(y) {
        out += e.scale(w);
    }
    out
}

struct Lmi {
    r: usize,
    k: usize,
    gram: CMat,
    xrow: CMat,
    basis: Vec<CMat>,
}

impl Lmi {
    fn size(&self) -> usize {
        self.r + self.k
    }

    /// `F(τ, y)`; `x[0] = τ`.
    fn matrix(&self, x: &[f64]) -> CMat {
        let (r, k) = (self.r, self.k);
        let n = r + k;
        let mut f = CMat::zeros(n, n);
        let mut top = -self.gram.clone();
        for i in 0..r {
            top[(i, i)] += C64::new(x[0], 0.0);
        }
        f.view_mut((0, 0), (r, r)).copy_from(&top);
        let y = combine(&self.basis, &x[1..], k);
        let mut m = CMat::zeros(r, k);
        m.view_mut((0, 0), (1, k)).copy_from(&self.xrow);
        m.view_mut((1, 0), (k, k)).copy_from(&y);
        f.view_mut((0, r), (r, k)).copy_from(&m);
        f.view_mut((r, 0), (k, r)).copy_from(&m.adjoint());
        for i in 0..k {
            f[(r + i, r + i)] = C64::new(1.0, 0.0);
        }
        f
    }

    /// `∂F/∂x_a` for every coordinate.
    fn directions(&self) -> Vec<CMat> {
        let (r, k) = (self.r, self.k);
        let n = r + k;
        let mut dirs = Vec::with_capacity(self.basis.len() + 1);
        let mut dt = CMat::zeros(n, n);
        for i in 0..r {
            dt[(i, i)] = C64::new(1.0, 0.0);
        }
        dirs.push(dt);
        for e in &self.basis {
            let mut d = CMat::zeros(n, n);
            d.view_mut((1, r), (k, k)).copy_from(e);
            d.view_mut((r, 1), (k, k)).copy_from(&e.adjoint());
            dirs.push(d);
        }
        dirs
    }
}

/// Returns the minimizing slot and a lower bound for the minimum of
/// `‖R(Y)‖²`, both in the original scale.
fn barrier(tpl: &LiftingTemplate, start: &CMat, start_value: f64) -> Result<(CMat, f64)> {
    let k = tpl.xrow.ncols();
    let r = k + 1;
    let sigma = start_value;
    let fixed = tpl.fixed_columns().unscale(sigma);
    let lmi = Lmi {
        r,
        k,
        gram: &fixed * fixed.adjoint(),
        xrow: tpl.xrow.unscale(sigma),
        basis: skew_basis(k),
    };
    let dirs = lmi.directions();
    let dim = dirs.len();
    let big_n = lmi.size() as f64;

    let mut x = vec![1.25];
    x.extend(coords(&lmi.basis, &start.unscale(sigma)));
    let mut s = 4.0 * big_n;

    let mut newton_steps = 0usize;
    loop {
        // Centering.
        let mut local = 0usize;
        loop {
            newton_steps += 1;
            local += 1;
            if newton_steps > MAX_NEWTON {
                return Err(Error::SolverDiverged(format!(
                    "row barrier exceeded {MAX_NEWTON} Newton steps"
                )));
            }
            let chol = Cholesky::new(lmi.matrix(&x))
                .ok_or_else(|| Error::SolverDiverged("iterate left the feasible cone".into()))?;
            let w = chol.inverse();
            let wd: Vec<CMat> = dirs.iter().map(|d| &w * d).collect();
            let mut grad = DVector::<f64>::zeros(dim);
            let mut hess = DMatrix::<f64>::zeros(dim, dim);
            for a in 0..dim {
                grad[a] = -wd[a].trace().re;
                for b in 0..=a {
                    let h = trace_product(&wd[a], &wd[b]);
                    hess[(a, b)] = h;
                    hess[(b, a)] = h;
                }
            }
            grad[0] += s;
            let step = match hess.clone().cholesky() {
                Some(c) => c.solve(&(-&grad)),
                None => {
                    let shift = 1e-12 * hess.diagonal().amax().max(1.0);
                    let reg = &hess + DMatrix::<f64>::identity(dim, dim) * shift;
                    reg.lu().solve(&(-&grad)).ok_or_else(|| {
                        Error::SolverDiverged("singular barrier Hessian".into())
                    })?
                }
            };
            let decrement = -grad.dot(&step);
            if !decrement.is_finite() {
                return Err(Error::SolverDiverged("non-finite Newton step".into()));
            }
            let lambda = decrement.max(0.0).sqrt();
            if lambda <= CENTER_TOL || local > CENTER_STEPS && lambda <= 0.25 {
                break;
            }
            // Damped Newton keeps self-concordant barriers feasible; the
            // Cholesky check guards against rounding near the boundary.
            let mut alpha = if lambda > 0.25 { 1.0 / (1.0 + lambda) } else { 1.0 };
            loop {
                let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, d)| a + alpha * d).collect();
                if Cholesky::new(lmi.matrix(&trial)).is_some() {
                    x = trial;
                    break;
                }
                alpha *= 0.5;
                if alpha < 1e-12 {
                    return Err(Error::SolverDiverged("no feasible Newton step".into()));
                }
            }
        }
        if big_n / s <= GAP_TARGET {
            break;
        }
        s *= 8.0;
    }

    let y = combine(&lmi.basis, &x[1..], k).scale(sigma);
    // Near the central path the duality gap is at most (N + √N)/s.
    let tau_lower = (x[0] - (big_n + big_n.sqrt()) / s) * sigma * sigma;
    Ok((y, tau_lower))
}

/// `Re tr(A B)`.
fn trace_product(a: &CMat, b: &CMat) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for p in 0..n {
        for q in 0..n {
            acc += (a[(p, q)] * b[(q, p)]).re;
        }
    }
    acc
}
