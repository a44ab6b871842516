//! Points of the sphere bundle `{(P, f) : Pf = f, |f| = 1}`, the unitary
//! action on them, its differential at the identity and the chart maps
//! built from the transport unitary.

use crate::error::{Error, Result};
use crate::linalg::{
    self, check_anti_hermitian, check_hermitian, check_projection, check_unitary, fro, identity,
    inner, outer, AdaptedFrame, CMat, CVec, C64, TOL,
};

/// A pair `(P, f)` with `P` an orthogonal projection and `f` a unit
/// vector in its range.
#[derive(Debug, Clone, PartialEq)]
pub struct BundlePoint {
    p: CMat,
    f: CVec,
}

impl BundlePoint {
    /// Validates `(p, f)`; see [`validate_point`].
    pub fn new(p: CMat, f: CVec) -> Result<Self> {
        validate_point(p, f)
    }

    pub(crate) fn from_parts(p: CMat, f: CVec) -> Self {
        BundlePoint { p, f }
    }

    pub fn p(&self) -> &CMat {
        &self.p
    }

    pub fn f(&self) -> &CVec {
        &self.f
    }

    pub fn dim(&self) -> usize {
        self.f.len()
    }

    pub fn rank(&self) -> usize {
        linalg::projection_rank(&self.p)
    }

    pub fn frame(&self) -> AdaptedFrame {
        linalg::adapted_frame(self)
    }

    /// `I − P`.
    pub fn complement(&self) -> CMat {
        identity(self.dim()) - &self.p
    }

    pub fn into_parts(self) -> (CMat, CVec) {
        (self.p, self.f)
    }
}

/// Checks `P = P*`, `P² = P`, `Pf = f` and `|f| = 1`, all to the shared
/// relative tolerance.
pub fn validate_point(p: CMat, f: CVec) -> Result<BundlePoint> {
    let n = linalg::check_square(&p)?;
    if n < 2 {
        return Err(Error::DimensionMismatch("dimension must be at least 2".into()));
    }
    if f.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} for a {n}x{n} projection",
            f.len()
        )));
    }
    check_projection(&p)?;
    let norm = f.norm();
    if (norm - 1.0).abs() > TOL {
        return Err(Error::NotUnit(norm));
    }
    let defect = (&p * &f - &f).norm();
    if defect > TOL {
        return Err(Error::NotFixedVector(defect));
    }
    Ok(BundlePoint { p, f })
}

/// A tangent vector `(X, g)`: `X` Hermitian and `P`-codiagonal,
/// `Re⟨g, f⟩ = 0` and `P⊥g = P⊥Xf`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    pub x: CMat,
    pub g: CVec,
}

impl TangentVector {
    /// Validates `(x, g)` as a tangent vector at `pt`.
    pub fn new(pt: &BundlePoint, x: CMat, g: CVec) -> Result<Self> {
        let v = TangentVector { x, g };
        v.validate(pt)?;
        Ok(v)
    }

    pub fn zero(n: usize) -> Self {
        TangentVector {
            x: CMat::zeros(n, n),
            g: CVec::zeros(n),
        }
    }

    pub fn validate(&self, pt: &BundlePoint) -> Result<()> {
        let n = pt.dim();
        if self.x.shape() != (n, n) || self.g.len() != n {
            return Err(Error::DimensionMismatch("tangent vector vs point".into()));
        }
        check_hermitian(&self.x).map_err(|e| Error::TangentInvariant(format!("x: {e}")))?;
        let scale = fro(&self.x).max(self.g.norm()).max(1.0);
        let q = pt.complement();
        let diag_defect = fro(&(pt.p() * &self.x * pt.p())) + fro(&(&q * &self.x * &q));
        if diag_defect > TOL * scale {
            return Err(Error::TangentInvariant(format!(
                "x is not P-codiagonal (defect {diag_defect:.3e})"
            )));
        }
        let pairing = inner(&self.g, pt.f()).re;
        if pairing.abs() > TOL * scale {
            return Err(Error::TangentInvariant(format!(
                "Re<g, f> = {pairing:.3e} must vanish"
            )));
        }
        let compat = (&q * (&self.g - &self.x * pt.f())).norm();
        if compat > TOL * scale {
            return Err(Error::TangentInvariant(format!(
                "P^perp g != P^perp x f (defect {compat:.3e})"
            )));
        }
        Ok(())
    }

    pub fn scale(&self, s: f64) -> Self {
        TangentVector {
            x: self.x.scale(s),
            g: self.g.scale(s),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        TangentVector {
            x: &self.x + &other.x,
            g: &self.g + &other.g,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        TangentVector {
            x: &self.x - &other.x,
            g: &self.g - &other.g,
        }
    }

    /// `sqrt(|x|₂² + |g|²)`, the ambient norm.
    pub fn ambient_norm(&self) -> f64 {
        (self.x.norm_squared() + self.g.norm_squared()).sqrt()
    }

    /// Transport by a unitary: `(U x U*, U g)`.
    pub fn conjugate(&self, u: &CMat) -> Self {
        TangentVector {
            x: u * &self.x * u.adjoint(),
            g: u * &self.g,
        }
    }
}

/// `U·(P, f) = (U P U*, U f)`.
pub fn act(u: &CMat, pt: &BundlePoint) -> Result<BundlePoint> {
    if u.shape() != (pt.dim(), pt.dim()) {
        return Err(Error::DimensionMismatch("unitary vs point".into()));
    }
    check_unitary(u)?;
    Ok(act_unchecked(u, pt))
}

pub(crate) fn act_unchecked(u: &CMat, pt: &BundlePoint) -> BundlePoint {
    BundlePoint::from_parts(u * pt.p() * u.adjoint(), u * pt.f())
}

/// Differential of the orbit map at the identity: `Z ↦ ([Z, P], Z f)`.
pub fn delta(pt: &BundlePoint, z: &CMat) -> Result<TangentVector> {
    if z.shape() != (pt.dim(), pt.dim()) {
        return Err(Error::DimensionMismatch("generator vs point".into()));
    }
    check_anti_hermitian(z)?;
    Ok(delta_unchecked(pt, z))
}

pub(crate) fn delta_unchecked(pt: &BundlePoint, z: &CMat) -> TangentVector {
    TangentVector {
        x: z * pt.p() - pt.p() * z,
        g: z * pt.f(),
    }
}

/// The (non-orthogonal) projection of `Herm × H` onto the tangent space:
/// `(X, h) ↦ (P⊥XP + PXP⊥, i Im⟨h, f⟩ f + (P − f⊗f) h + P⊥X f)`.
pub fn tangent_project_e(pt: &BundlePoint, x: &CMat, h: &CVec) -> Result<TangentVector> {
    if x.shape() != (pt.dim(), pt.dim()) || h.len() != pt.dim() {
        return Err(Error::DimensionMismatch("input vs point".into()));
    }
    check_hermitian(x)?;
    Ok(project_e_unchecked(pt, x, h))
}

pub(crate) fn project_e_unchecked(pt: &BundlePoint, x: &CMat, h: &CVec) -> TangentVector {
    let p = pt.p();
    let f = pt.f();
    let q = pt.complement();
    let new_x = &q * x * p + p * x * &q;
    let im = inner(h, f).im;
    let new_g = f * C64::new(0.0, im) + (p - outer(f, f)) * h + &q * (x * f);
    TangentVector { x: new_x, g: new_g }
}

/// Anti-Hermitian `z` with `z f = g`:
/// `z = g⊗f + ⟨f, g⟩ f⊗f − f⊗g`. Requires `Re⟨g, f⟩ = 0`.
pub fn skew_mapping_vector(f: &CVec, g: &CVec) -> Result<CMat> {
    if f.len() != g.len() {
        return Err(Error::DimensionMismatch("vectors of different length".into()));
    }
    let pairing = inner(g, f).re;
    if pairing.abs() > TOL * g.norm().max(1.0) {
        return Err(Error::RealPairing(pairing));
    }
    Ok(skew_unchecked(f, g))
}

pub(crate) fn skew_unchecked(f: &CVec, g: &CVec) -> CMat {
    // Only the imaginary part of ⟨f, g⟩ is kept so the output is exactly skew.
    let fg = C64::new(0.0, inner(f, g).im);
    outer(g, f) + outer(f, f) * fg - outer(f, g)
}

/// For a Hermitian `P`-codiagonal `zh`, returns `X = zh P − P zh`, which
/// is anti-Hermitian with `[X, P] = zh`.
pub fn codiagonal_source(pt: &BundlePoint, zh: &CMat) -> Result<CMat> {
    if zh.shape() != (pt.dim(), pt.dim()) {
        return Err(Error::DimensionMismatch("matrix vs point".into()));
    }
    check_hermitian(zh)?;
    let q = pt.complement();
    let defect = fro(&(pt.p() * zh * pt.p())) + fro(&(&q * zh * &q));
    if defect > TOL * fro(zh).max(1.0) {
        return Err(Error::NotCodiagonal(defect));
    }
    Ok(zh * pt.p() - pt.p() * zh)
}

/// An anti-Hermitian `Z` with `δ(Z) = v`: the codiagonal part comes from
/// [`codiagonal_source`], the remaining `R(P)` component of `g` from
/// [`skew_mapping_vector`].
pub fn some_lifting(pt: &BundlePoint, v: &TangentVector) -> Result<CMat> {
    v.validate(pt)?;
    Ok(lifting_unchecked(pt, v))
}

pub(crate) fn lifting_unchecked(pt: &BundlePoint, v: &TangentVector) -> CMat {
    let codiag = &v.x * pt.p() - pt.p() * &v.x;
    let residual = pt.p() * (&v.g - &codiag * pt.f());
    codiag + skew_unchecked(pt.f(), &residual)
}

/// Unitary rotating `ξ` onto `η` inside their span and fixing the
/// orthogonal complement. With `c = ⟨η, ξ⟩`, `ξ' = (η − cξ)/s`:
/// `ν = 1 + (c−1) ξ⊗ξ + (c̄−1) ξ'⊗ξ' + s (ξ'⊗ξ − ξ⊗ξ')`.
///
/// When `η` is a phase multiple of `ξ` the plane degenerates and the
/// pure phase `1 + (c−1) ξ⊗ξ` is returned.
pub fn rotation_unitary(xi: &CVec, eta: &CVec) -> Result<CMat> {
    if xi.len() != eta.len() {
        return Err(Error::DimensionMismatch("vectors of different length".into()));
    }
    for v in [xi, eta] {
        if (v.norm() - 1.0).abs() > TOL {
            return Err(Error::NotUnit(v.norm()));
        }
    }
    let gap = (xi - eta).norm();
    if gap >= 2.0 - TOL {
        return Err(Error::AntipodalVectors(gap));
    }
    Ok(rotation_unchecked(xi, eta))
}

pub(crate) fn rotation_unchecked(xi: &CVec, eta: &CVec) -> CMat {
    let n = xi.len();
    let c = inner(eta, xi);
    let w = eta - xi * c;
    // |η − cξ| equals sqrt(1 − |c|²) for unit vectors and is better conditioned.
    let s = w.norm();
    let xx = outer(xi, xi);
    if s < 1e-14 {
        return identity(n) + xx * (c - 1.0);
    }
    let xp = w.unscale(s);
    identity(n) + xx * (c - 1.0) + outer(&xp, &xp) * (c.conj() - 1.0)
        + (outer(&xp, xi) - outer(xi, &xp)).scale(s)
}

/// Unitary `μ` with `μ P₀ μ* = P` and `μ = 1` at `P = P₀`:
/// `μ = (P P₀ + (1−P)(1−P₀)) (1 − (P − P₀)²)^{−1/2}`.
pub fn transport_unitary_mu(p0: &CMat, p: &CMat) -> Result<CMat> {
    check_projection(p0)?;
    check_projection(p)?;
    if p0.shape() != p.shape() {
        return Err(Error::DimensionMismatch("projection pair".into()));
    }
    let dist = linalg::spectral_norm(&(p - p0));
    if dist >= 1.0 - TOL {
        return Err(Error::TooFar(dist));
    }
    Ok(mu_unchecked(p0, p))
}

pub(crate) fn mu_unchecked(p0: &CMat, p: &CMat) -> CMat {
    let n = p0.nrows();
    let id = identity(n);
    let d = p - p0;
    let intertwiner = p * p0 + (&id - p) * (&id - p0);
    let gram = &id - &d * &d;
    intertwiner * linalg::hermitian_function(&gram, |l| 1.0 / l.sqrt())
}

fn chart_transport(base: &BundlePoint, pt: &BundlePoint) -> Result<CMat> {
    if base.dim() != pt.dim() {
        return Err(Error::DimensionMismatch("points of different dimension".into()));
    }
    let dist = linalg::spectral_norm(&(pt.p() - base.p()));
    if dist >= 1.0 - TOL {
        return Err(Error::OutOfChart(format!("|P - P0| = {dist}")));
    }
    Ok(mu_unchecked(base.p(), pt.p()))
}

/// Local cross section of the orbit map: a unitary `W` with
/// `W·base = pt`, built as `μ(P) V` with `V` the rotation of `f₀` onto
/// `μ(P)* f` inside `R(P₀)`.
pub fn cross_section(base: &BundlePoint, pt: &BundlePoint) -> Result<CMat> {
    let mu = chart_transport(base, pt)?;
    let h = mu.adjoint() * pt.f();
    let gap = (&h - base.f()).norm();
    if gap >= 2.0 - TOL {
        return Err(Error::OutOfChart(format!("|mu* f - f0| = {gap}")));
    }
    // f₀ and h both lie in R(P₀), so the rotation fixes N(P₀).
    Ok(mu * rotation_unchecked(base.f(), &h))
}

/// Local trivialization `(P, f) ↦ (P, μ(P)* f)` around `base`.
pub fn trivialize(base: &BundlePoint, pt: &BundlePoint) -> Result<(CMat, CVec)> {
    let mu = chart_transport(base, pt)?;
    Ok((pt.p().clone(), mu.adjoint() * pt.f()))
}

/// Inverse of [`trivialize`]: `(P, h) ↦ (P, μ(P) h)`.
pub fn untrivialize(base: &BundlePoint, p: &CMat, h: &CVec) -> Result<BundlePoint> {
    let dist = linalg::spectral_norm(&(p - base.p()));
    if dist >= 1.0 - TOL {
        return Err(Error::OutOfChart(format!("|P - P0| = {dist}")));
    }
    let mu = transport_unitary_mu(base.p(), p)?;
    BundlePoint::new(p.clone(), mu * h)
}

/// Two points lie in the same orbit iff their projections have equal rank.
pub fn same_component(a: &BundlePoint, b: &BundlePoint) -> bool {
    a.dim() == b.dim() && a.rank() == b.rank()
}
