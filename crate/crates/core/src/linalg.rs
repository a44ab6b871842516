//! Dense complex-matrix kernels shared by the geometry modules.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`. The rank-one operator
//! `x ⊗ y` acts as `z ↦ ⟨z, y⟩ x`, i.e. it is the matrix `x y*`, and the
//! inner product `⟨a, b⟩` is linear in the first slot.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::bundle::BundlePoint;
use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Relative tolerance used by every validator.
pub const TOL: f64 = 1e-10;

pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Rank-one operator `x ⊗ y = x y*`.
pub fn outer(x: &CVec, y: &CVec) -> CMat {
    x * y.adjoint()
}

/// `⟨a, b⟩ = Σ aᵢ conj(bᵢ)`.
pub fn inner(a: &CVec, b: &CVec) -> C64 {
    b.dotc(a)
}

/// Coordinate vector `e_k` (zero-based).
pub fn basis_vector(n: usize, k: usize) -> CVec {
    let mut v = CVec::zeros(n);
    v[k] = C64::new(1.0, 0.0);
    v
}

pub fn fro(m: &CMat) -> f64 {
    m.norm()
}

/// Real trace inner product `Re Tr(a* b)`.
pub fn trace_inner(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

pub fn anti_hermitian_part(m: &CMat) -> CMat {
    (m - m.adjoint()).scale(0.5)
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

fn scale_floor(m: &CMat) -> f64 {
    fro(m).max(1.0)
}

pub fn check_square(m: &CMat) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m.nrows())
}

pub fn check_hermitian(m: &CMat) -> Result<()> {
    check_square(m)?;
    let defect = fro(&(m - m.adjoint()));
    if defect > TOL * scale_floor(m) {
        return Err(Error::NotHermitian(defect));
    }
    Ok(())
}

pub fn check_anti_hermitian(m: &CMat) -> Result<()> {
    check_square(m)?;
    let defect = fro(&(m + m.adjoint()));
    if defect > TOL * scale_floor(m) {
        return Err(Error::NotAntiHermitian(defect));
    }
    Ok(())
}

pub fn check_unitary(u: &CMat) -> Result<()> {
    let n = check_square(u)?;
    let defect = fro(&(u.adjoint() * u - identity(n)));
    if defect > TOL * (n as f64).sqrt().max(1.0) {
        return Err(Error::NotUnitary(defect));
    }
    Ok(())
}

pub fn check_projection(p: &CMat) -> Result<()> {
    check_square(p)?;
    let herm = fro(&(p - p.adjoint()));
    if herm > TOL * scale_floor(p) {
        return Err(Error::NotProjection(format!("P != P* (defect {herm:.3e})")));
    }
    let idem = fro(&(p * p - p));
    if idem > TOL * scale_floor(p) {
        return Err(Error::NotProjection(format!("P^2 != P (defect {idem:.3e})")));
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix. The input is symmetrized
/// first; eigenvalues come back in ascending order.
pub fn eigh(h: &CMat) -> (Vec<f64>, CMat) {
    let eig = SymmetricEigen::new(hermitian_part(h));
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Applies a real function to a Hermitian matrix through its spectrum.
pub fn hermitian_function(h: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (values, v) = eigh(h);
    let mut scaled = v.clone();
    for (k, &lambda) in values.iter().enumerate() {
        let w = f(lambda);
        scaled.column_mut(k).scale_mut(w);
    }
    scaled * v.adjoint()
}

/// `exp(Z)` for anti-Hermitian `Z`, skipping validation.
pub(crate) fn exp_skew(z: &CMat) -> CMat {
    // Z = -iH with H = iZ Hermitian, so exp(Z) = V diag(e^{-iλ}) V*.
    let h = z * I;
    let (values, v) = eigh(&h);
    let mut scaled = v.clone();
    for (k, &lambda) in values.iter().enumerate() {
        let phase = C64::from_polar(1.0, -lambda);
        for entry in scaled.column_mut(k).iter_mut() {
            *entry *= phase;
        }
    }
    scaled * v.adjoint()
}

/// Matrix exponential of an anti-Hermitian matrix by unitary
/// diagonalization; the result is unitary to rounding.
pub fn mat_exp(z: &CMat) -> Result<CMat> {
    check_anti_hermitian(z)?;
    Ok(exp_skew(z))
}

/// `A^{-1/2}` for a positive-definite Hermitian `A`.
pub fn principal_inv_sqrt(a: &CMat) -> Result<CMat> {
    check_hermitian(a)?;
    let (values, _) = eigh(a);
    let smallest = values.first().copied().unwrap_or(0.0);
    if smallest <= TOL * scale_floor(a) {
        return Err(Error::NotPositiveDefinite(smallest));
    }
    Ok(hermitian_function(a, |l| 1.0 / l.sqrt()))
}

/// Largest singular value; works for rectangular blocks.
pub fn spectral_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    // Gram matrix on the smaller side keeps the eigenproblem small.
    let gram = if m.nrows() <= m.ncols() {
        m * m.adjoint()
    } else {
        m.adjoint() * m
    };
    let (values, _) = eigh(&gram);
    let top = values.last().copied().unwrap_or(0.0).max(0.0);
    let estimate = top.sqrt();
    // Gram-based values lose relative accuracy for tiny norms; SVD is exact there.
    if estimate < 1e-6 * fro(m) || gram.nrows() > 16 {
        return m
            .clone()
            .svd(false, false)
            .singular_values
            .iter()
            .cloned()
            .fold(0.0, f64::max);
    }
    estimate
}

/// Rank of an orthogonal projection (its trace, rounded).
pub fn projection_rank(p: &CMat) -> usize {
    p.trace().re.round().max(0.0) as usize
}

/// Index `j(P₊, P)` of a pair of projections. In finite dimension the
/// restricted map `P P₊ : R(P₊) → R(P)` has index `rank P₊ − rank P`.
pub fn projection_pair_index(p_plus: &CMat, p: &CMat) -> Result<i64> {
    check_projection(p_plus)?;
    check_projection(p)?;
    if p_plus.shape() != p.shape() {
        return Err(Error::DimensionMismatch("projection pair".into()));
    }
    Ok(projection_rank(p_plus) as i64 - projection_rank(p) as i64)
}

/// Unitary basis adapted to `H = ⟨f⟩ ⊕ (R(P) ⊖ ⟨f⟩) ⊕ N(P)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptedFrame {
    pub basis: CMat,
    /// Block sizes `(1, r − 1, n − r)`.
    pub dims: [usize; 3],
}

impl AdaptedFrame {
    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn rank(&self) -> usize {
        self.dims[0] + self.dims[1]
    }

    pub fn offsets(&self) -> [usize; 3] {
        [0, self.dims[0], self.dims[0] + self.dims[1]]
    }

    /// Coordinates of `m` in the frame: `B* m B`.
    pub fn to_frame(&self, m: &CMat) -> CMat {
        self.basis.adjoint() * m * &self.basis
    }

    pub fn from_frame(&self, m: &CMat) -> CMat {
        &self.basis * m * self.basis.adjoint()
    }

    pub fn vec_to_frame(&self, v: &CVec) -> CVec {
        self.basis.adjoint() * v
    }

    pub fn vec_from_frame(&self, v: &CVec) -> CVec {
        &self.basis * v
    }
}

/// Pivoted Gram-Schmidt: from `candidates` pick `count` directions,
/// each time the one with the largest residual against `chosen`;
/// ties go to the lowest index.
fn pivoted_completion(candidates: &[CVec], chosen: &mut Vec<CVec>, count: usize) {
    for _ in 0..count {
        let mut best: Option<(f64, CVec)> = None;
        for cand in candidates {
            let mut r = cand.clone();
            // Two passes keep the residual orthogonal to working precision.
            for _ in 0..2 {
                for q in chosen.iter() {
                    let coeff = q.dotc(&r);
                    r -= q * coeff;
                }
            }
            let norm = r.norm();
            if best.as_ref().is_none_or(|(b, _)| norm > *b * (1.0 + 1e-12)) {
                best = Some((norm, r));
            }
        }
        let (norm, r) = best.expect("candidate list is non-empty");
        chosen.push(r.unscale(norm));
    }
}

/// Adapted frame of a bundle point: first column `f`, then an orthonormal
/// basis of `R(P) ⊖ ⟨f⟩`, then of `N(P)`, completed from coordinate
/// vectors deterministically.
pub fn adapted_frame(point: &BundlePoint) -> AdaptedFrame {
    frame_of(point.p(), point.f())
}

pub(crate) fn frame_of(p: &CMat, f: &CVec) -> AdaptedFrame {
    let n = p.nrows();
    let r = projection_rank(p).clamp(1, n);
    let ff = outer(f, f);
    let range_part = p - &ff;
    let kernel_part = identity(n) - p;
    let mut chosen = vec![f.clone()];
    let range: Vec<CVec> = (0..n).map(|k| range_part.column(k).into_owned()).collect();
    pivoted_completion(&range, &mut chosen, r - 1);
    let kernel: Vec<CVec> = (0..n).map(|k| kernel_part.column(k).into_owned()).collect();
    pivoted_completion(&kernel, &mut chosen, n - r);
    let basis = CMat::from_columns(&chosen);
    AdaptedFrame {
        basis,
        dims: [1, r - 1, n - r],
    }
}

/// A 3×3 grid of blocks in adapted-frame coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockGrid {
    pub blocks: [[CMat; 3]; 3],
    pub dims: [usize; 3],
}

impl BlockGrid {
    pub fn block(&self, i: usize, j: usize) -> &CMat {
        &self.blocks[i][j]
    }

    /// Reassembles the frame-coordinate matrix.
    pub fn assemble(&self) -> CMat {
        let n: usize = self.dims.iter().sum();
        let mut out = CMat::zeros(n, n);
        let off = [0, self.dims[0], self.dims[0] + self.dims[1]];
        for i in 0..3 {
            for j in 0..3 {
                out.view_mut((off[i], off[j]), (self.dims[i], self.dims[j]))
                    .copy_from(&self.blocks[i][j]);
            }
        }
        out
    }

    /// Splits a frame-coordinate matrix.
    pub fn split(m: &CMat, dims: [usize; 3]) -> Self {
        let off = [0, dims[0], dims[0] + dims[1]];
        let blocks = std::array::from_fn(|i| {
            std::array::from_fn(|j| m.view((off[i], off[j]), (dims[i], dims[j])).into_owned())
        });
        BlockGrid { blocks, dims }
    }
}

pub fn block_decompose(z: &CMat, frame: &AdaptedFrame) -> Result<BlockGrid> {
    if z.nrows() != frame.dim() || z.ncols() != frame.dim() {
        return Err(Error::DimensionMismatch(format!(
            "matrix {}x{} vs frame of dimension {}",
            z.nrows(),
            z.ncols(),
            frame.dim()
        )));
    }
    Ok(BlockGrid::split(&frame.to_frame(z), frame.dims))
}

pub fn block_compose(grid: &BlockGrid, frame: &AdaptedFrame) -> Result<CMat> {
    if grid.dims != frame.dims {
        return Err(Error::DimensionMismatch("block sizes differ from frame".into()));
    }
    Ok(frame.from_frame(&grid.assemble()))
}
