//! Independent oracles shared by the integration tests. Nothing here calls
//! the solvers under test.
#![allow(dead_code)]

use flagfiber::linalg::{basis_vector, c, CMat, CVec, C64};
use flagfiber::BundlePoint;

pub fn fixture() -> BundlePoint {
    let mut p = CMat::zeros(3, 3);
    p[(0, 0)] = c(1.0, 0.0);
    p[(1, 1)] = c(1.0, 0.0);
    BundlePoint::new(p, basis_vector(3, 0)).unwrap()
}

pub fn e(n: usize, k: usize) -> CVec {
    basis_vector(n, k)
}

/// `x y*`.
pub fn ket_bra(x: &CVec, y: &CVec) -> CMat {
    x * y.adjoint()
}

/// Largest singular value by power iteration on `M*M`.
pub fn power_norm(m: &CMat) -> f64 {
    let n = m.ncols();
    if n == 0 || m.nrows() == 0 {
        return 0.0;
    }
    let gram = m.adjoint() * m;
    let mut v = CVec::from_fn(n, |i, _| C64::new(1.0 + 0.37 * i as f64, 0.11 * (i as f64 + 1.0).sqrt()));
    v /= C64::new(v.norm(), 0.0);
    let mut lambda = 0.0;
    for _ in 0..20_000 {
        let w = &gram * &v;
        let nw = w.norm();
        if nw == 0.0 {
            return 0.0;
        }
        let next = w.unscale(nw);
        let done = (nw - lambda).abs() <= 1e-15 * nw;
        lambda = nw;
        v = next;
        if done {
            break;
        }
    }
    lambda.sqrt()
}

/// Top singular triple `(σ, u, v)`: `v` is a top eigenvector of `M*M`
/// (nalgebra's Hermitian eigensolver) and `u = Mv/σ`, so `u*Mv = σ`.
pub fn top_singular(m: &CMat) -> (f64, CVec, CVec) {
    let eig = (m.adjoint() * m).symmetric_eigen();
    let mut idx = 0;
    for (k, l) in eig.eigenvalues.iter().enumerate() {
        if *l > eig.eigenvalues[idx] {
            idx = k;
        }
    }
    let v = eig.eigenvectors.column(idx).into_owned();
    let mv = m * &v;
    let s = mv.norm();
    let u = if s > 0.0 { mv.unscale(s) } else { CVec::zeros(m.nrows()) };
    (s, u, v)
}

/// Basis of the `k×k` anti-Hermitian matrices, independent of the crate's.
pub fn skew_units(k: usize) -> Vec<CMat> {
    let mut out = Vec::new();
    for i in 0..k {
        for j in 0..k {
            let mut m = CMat::zeros(k, k);
            if i == j {
                m[(i, i)] = c(0.0, 1.0);
            } else if i < j {
                m[(i, j)] = c(1.0, 0.0);
                m[(j, i)] = c(-1.0, 0.0);
            } else {
                m[(i, j)] = c(0.0, 1.0);
                m[(j, i)] = c(0.0, 1.0);
            }
            out.push(m);
        }
    }
    out
}

pub fn skew_from(units: &[CMat], y: &[f64], k: usize) -> CMat {
    let mut m = CMat::zeros(k, k);
    for (u, w) in units.iter().zip(y) {
        m += u.scale(*w);
    }
    m
}

/// Certified interval for the minimum of a convex function.
#[derive(Debug, Clone)]
pub struct OracleMin {
    pub best: f64,
    pub lower: f64,
    pub argmin: Vec<f64>,
}

/// Central-cut ellipsoid method. `f` returns a value and a subgradient;
/// the minimizer must lie within `radius` of `x0`. Every cut yields the
/// lower bound `f(x) − √(gᵀPg)`.
pub fn ellipsoid_min(
    f: impl Fn(&[f64]) -> (f64, Vec<f64>),
    x0: &[f64],
    radius: f64,
    tol: f64,
    max_iter: usize,
) -> OracleMin {
    let d = x0.len();
    if d == 0 {
        let (v, _) = f(x0);
        return OracleMin { best: v, lower: v, argmin: vec![] };
    }
    if d == 1 {
        return golden_min(|t| f(&[t]).0, x0[0] - radius, x0[0] + radius, tol);
    }
    let mut x = x0.to_vec();
    let mut p = vec![vec![0.0; d]; d];
    for (i, row) in p.iter_mut().enumerate() {
        row[i] = radius * radius;
    }
    let mut best = f64::INFINITY;
    let mut argmin = x.clone();
    let mut lower = f64::NEG_INFINITY;
    let df = d as f64;
    for _ in 0..max_iter {
        let (v, g) = f(&x);
        if v < best {
            best = v;
            argmin = x.clone();
        }
        let pg: Vec<f64> = (0..d).map(|i| (0..d).map(|j| p[i][j] * g[j]).sum()).collect();
        let gpg: f64 = g.iter().zip(&pg).map(|(a, b)| a * b).sum();
        // A collapsed ellipsoid carries no further information.
        if gpg <= 0.0 {
            break;
        }
        let width = gpg.sqrt();
        lower = lower.max(v - width);
        if best - lower <= tol {
            break;
        }
        let b: Vec<f64> = pg.iter().map(|q| q / width).collect();
        for i in 0..d {
            x[i] -= b[i] / (df + 1.0);
        }
        let scale = df * df / (df * df - 1.0);
        for i in 0..d {
            for j in 0..d {
                p[i][j] = scale * (p[i][j] - 2.0 / (df + 1.0) * b[i] * b[j]);
            }
        }
        for i in 0..d {
            for j in 0..i {
                let s = 0.5 * (p[i][j] + p[j][i]);
                p[i][j] = s;
                p[j][i] = s;
            }
        }
        // Enlarging P keeps every later cut valid despite rounding in the
        // thin directions of the ellipsoid.
        let floor = 1e-13 * (0..d).map(|i| p[i][i]).fold(0.0, f64::max);
        for (i, row) in p.iter_mut().enumerate() {
            row[i] += floor;
        }
    }
    OracleMin { best, lower, argmin }
}

/// Grid scan followed by golden-section refinement for a convex,
/// 1-Lipschitz function of one variable. The minimizer stays inside the
/// final bracket, so its width bounds the error.
pub fn golden_min(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> OracleMin {
    let steps = 2000;
    let h = (b - a) / steps as f64;
    let mut best_k = 0;
    let mut best_v = f64::INFINITY;
    for k in 0..=steps {
        let v = f(a + k as f64 * h);
        if v < best_v {
            best_v = v;
            best_k = k;
        }
    }
    let mut lo = a + (best_k.max(1) - 1) as f64 * h;
    let mut hi = a + (best_k + 1).min(steps) as f64 * h;
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if hi - lo < 1e-14 {
            break;
        }
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        }
    }
    let xm = 0.5 * (lo + hi);
    let fm = f(xm);
    let best = fm.min(best_v).min(f1).min(f2);
    OracleMin { best, lower: best - (hi - lo) - tol, argmin: vec![xm] }
}

/// Objective and subgradient of `y ↦ ‖M(y)‖` for an affine `M`.
pub fn norm_with_subgradient(m: &CMat, dirs: &[CMat]) -> (f64, Vec<f64>) {
    let (s, u, v) = top_singular(m);
    let g = dirs
        .iter()
        .map(|d| (u.adjoint() * d * &v)[(0, 0)].re)
        .collect();
    (s, g)
}

/// Frame coordinates of `z` at `pt`.
pub fn in_frame(pt: &BundlePoint, z: &CMat) -> CMat {
    pt.frame().to_frame(z)
}

/// Joint oracle: minimal operator norm over both free diagonal blocks
/// (`R(P) ⊖ ⟨f⟩` and `N(P)`) of the frame matrix `zf`.
pub fn joint_oracle(zf: &CMat, dims: [usize; 3]) -> OracleMin {
    let [_, k, m] = dims;
    let n = 1 + k + m;
    let uk = skew_units(k);
    let um = skew_units(m);
    let mut base = zf.clone();
    base.view_mut((1, 1), (k, k)).fill(C64::new(0.0, 0.0));
    base.view_mut((1 + k, 1 + k), (m, m)).fill(C64::new(0.0, 0.0));
    let mut dirs = Vec::new();
    for u in &uk {
        let mut d = CMat::zeros(n, n);
        d.view_mut((1, 1), (k, k)).copy_from(u);
        dirs.push(d);
    }
    for u in &um {
        let mut d = CMat::zeros(n, n);
        d.view_mut((1 + k, 1 + k), (m, m)).copy_from(u);
        dirs.push(d);
    }
    let radius = 2.0 * (n as f64).sqrt() * top_singular(&base).0 + 1.0;
    let eval = |y: &[f64]| {
        let mut mat = base.clone();
        for (d, w) in dirs.iter().zip(y) {
            mat += d.scale(*w);
        }
        norm_with_subgradient(&mat, &dirs)
    };
    ellipsoid_min(eval, &vec![0.0; dirs.len()], radius, 1e-9, 60_000)
}

/// Row oracle: minimal norm of the `r × n` row block over the free slot.
pub fn row_oracle(row: &CMat, k: usize) -> OracleMin {
    let units = skew_units(k);
    let mut base = row.clone();
    base.view_mut((1, 1), (k, k)).fill(C64::new(0.0, 0.0));
    let dirs: Vec<CMat> = units
        .iter()
        .map(|u| {
            let mut d = CMat::zeros(row.nrows(), row.ncols());
            d.view_mut((1, 1), (k, k)).copy_from(u);
            d
        })
        .collect();
    let radius = 2.0 * ((k + 1) as f64).sqrt() * top_singular(&base).0 + 1.0;
    let eval = |y: &[f64]| {
        let mut mat = base.clone();
        for (d, w) in dirs.iter().zip(y) {
            mat += d.scale(*w);
        }
        norm_with_subgradient(&mat, &dirs)
    };
    ellipsoid_min(eval, &vec![0.0; dirs.len()], radius, 1e-9, 60_000)
}

/// Central finite difference of a matrix-valued function.
pub fn fd_matrix(f: impl Fn(f64) -> CMat, s: f64, h: f64) -> CMat {
    (f(s + h) - f(s - h)).unscale(2.0 * h)
}

pub fn fd_vector(f: impl Fn(f64) -> CVec, s: f64, h: f64) -> CVec {
    (f(s + h) - f(s - h)).unscale(2.0 * h)
}
