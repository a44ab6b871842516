//! Seeded random instances.
//!
//! Every stream is a ChaCha8 generator keyed by `(seed, salt)` and
//! positioned on stream `index`, so sample `i` of a sweep is the same no
//! matter how the sweep is split across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bundle::{self, BundlePoint, TangentVector};
use crate::linalg::{anti_hermitian_part, basis_vector, exp_skew, hermitian_part, CMat, CVec, C64};

pub type SampleRng = ChaCha8Rng;

const SALT_MIX: u64 = 0x9E37_79B9_7F4A_7C15;

/// Independent stream `index` of the generator family `(seed, salt)`.
pub fn stream(seed: u64, salt: u64, index: u64) -> SampleRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(SALT_MIX));
    rng.set_stream(index);
    rng
}

/// Standard complex Gaussian (unit expected modulus squared).
pub fn gaussian(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn real_gaussian(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn vector(rng: &mut impl Rng, n: usize) -> CVec {
    CVec::from_fn(n, |_, _| gaussian(rng))
}

pub fn anti_hermitian(rng: &mut impl Rng, n: usize) -> CMat {
    anti_hermitian_part(&matrix(rng, n, n))
}

pub fn hermitian(rng: &mut impl Rng, n: usize) -> CMat {
    hermitian_part(&matrix(rng, n, n))
}

/// Haar-ish unitary: exponential of a large random skew matrix.
pub fn unitary(rng: &mut impl Rng, n: usize) -> CMat {
    exp_skew(&anti_hermitian(rng, n).scale(3.0))
}

/// Random point with `rank P = rank`.
pub fn point(rng: &mut impl Rng, n: usize, rank: usize) -> BundlePoint {
    assert!(rank >= 1 && rank <= n, "rank must lie in 1..=n");
    let diag = CVec::from_fn(n, |i, _| C64::new(if i < rank { 1.0 } else { 0.0 }, 0.0));
    let base = BundlePoint::from_parts(CMat::from_diagonal(&diag), basis_vector(n, 0));
    let u = unitary(rng, n);
    bundle::act_unchecked(&u, &base)
}

/// Random point whose rank is drawn from `1..n`.
pub fn point_any_rank(rng: &mut impl Rng, n: usize) -> BundlePoint {
    let rank = rng.random_range(1..n);
    point(rng, n, rank)
}

/// `δ(Z)` for a random anti-Hermitian `Z`.
pub fn tangent(rng: &mut impl Rng, pt: &BundlePoint) -> TangentVector {
    let z = anti_hermitian(rng, pt.dim());
    bundle::delta_unchecked(pt, &z)
}

/// Point obtained from `pt` by a unitary close to the identity.
pub fn nearby_point(rng: &mut impl Rng, pt: &BundlePoint, size: f64) -> BundlePoint {
    let z = anti_hermitian(rng, pt.dim());
    let scale = size / z.norm().max(f64::MIN_POSITIVE);
    bundle::act_unchecked(&exp_skew(&z.scale(scale)), pt)
}
