//! Second step: complete the corner of `[[B, A], [−A*, ·]]` without
//! increasing the norm beyond the Parrott bound.

use crate::linalg::{anti_hermitian_part, hermitian_function, spectral_norm, CMat};

#[derive(Debug, Clone, PartialEq)]
pub struct KreinCompletion {
    /// Anti-Hermitian corner on `N(P₀)`.
    pub z: CMat,
    /// `max(‖[B A]‖, ‖[B; −A*]‖)`.
    pub mu: f64,
}

/// The full matrix `[[B, A], [−A*, Z]]`.
pub fn assemble_krein(b: &CMat, a: &CMat, z: &CMat) -> CMat {
    let (r, m) = (b.nrows(), z.nrows());
    let mut out = CMat::zeros(r + m, r + m);
    out.view_mut((0, 0), (r, r)).copy_from(b);
    out.view_mut((0, r), (r, m)).copy_from(a);
    out.view_mut((r, 0), (m, r)).copy_from(&(-a.adjoint()));
    out.view_mut((r, r), (m, m)).copy_from(z);
    out
}

/// Central completion `Z = −C B* (μ² − BB*)^{-1} A` with `C = −A*`,
/// evaluated through `(μ² − BB*)^{-1/2}` with a pseudo-inverse on the
/// saturated directions, then symmetrized to the anti-Hermitian part.
pub fn krein_complete(b: &CMat, a: &CMat) -> KreinCompletion {
    let m = a.ncols();
    let top = {
        let mut t = CMat::zeros(b.nrows(), b.ncols() + m);
        t.view_mut((0, 0), b.shape()).copy_from(b);
        t.view_mut((0, b.ncols()), a.shape()).copy_from(a);
        t
    };
    let c = -a.adjoint();
    let left = {
        let mut l = CMat::zeros(b.nrows() + m, b.ncols());
        l.view_mut((0, 0), b.shape()).copy_from(b);
        l.view_mut((b.nrows(), 0), c.shape()).copy_from(&c);
        l
    };
    let mu = spectral_norm(&top).max(spectral_norm(&left));
    if m == 0 || mu == 0.0 {
        return KreinCompletion { z: CMat::zeros(m, m), mu };
    }
    let mu2 = mu * mu;
    let cut = 1e-12 * mu2;
    let inv_root = |l: f64| {
        let d = mu2 - l;
        if d > cut {
            1.0 / d.sqrt()
        } else {
            0.0
        }
    };
    let gamma1 = hermitian_function(&(b * b.adjoint()), inv_root) * a;
    let gamma2 = &c * hermitian_function(&(b.adjoint() * b), inv_root);
    let z = -(gamma2 * b.adjoint() * gamma1);
    KreinCompletion { z: anti_hermitian_part(&z), mu }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::sample;

    #[test]
    fn zero_off_diagonal() {
        let b = CMat::from_row_slice(2, 2, &[c(0.0, 1.0), c(0.5, 0.0), c(-0.5, 0.0), c(0.0, -0.2)]);
        let k = krein_complete(&b, &CMat::zeros(2, 2));
        assert!(k.z.norm() < 1e-15);
        assert!((k.mu - spectral_norm(&b)).abs() < 1e-14);
    }

    #[test]
    fn zero_corner_block() {
        let mut rng = sample::stream(3, 0, 0);
        let a = sample::matrix(&mut rng, 2, 3);
        let k = krein_complete(&CMat::zeros(2, 2), &a);
        assert!(k.z.norm() < 1e-15);
        assert!((k.mu - spectral_norm(&a)).abs() < 1e-13);
    }

    #[test]
    fn attains_bound_on_random_data() {
        for i in 0..50 {
            let mut rng = sample::stream(11, 0, i);
            let b = sample::anti_hermitian(&mut rng, 3);
            let a = sample::matrix(&mut rng, 3, 2);
            let k = krein_complete(&b, &a);
            let full = assemble_krein(&b, &a, &k.z);
            assert!(spectral_norm(&full) - k.mu <= 1e-10 * k.mu.max(1.0));
            assert!((&k.z + k.z.adjoint()).norm() < 1e-14);
        }
    }
}
