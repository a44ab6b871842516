mod common;

use common::*;
use flagfiber::bundle::{self, TangentVector};
use flagfiber::curve::{curve_length, CurveMetric};
use flagfiber::finsler::{
    self, dkw_row, dkw_solutions, krein_complete, minimal_lifting, row_minimize, template_from_tangent,
    RowOrientation,
};
use flagfiber::linalg::{c, mat_exp, spectral_norm, CMat, CVec};
use flagfiber::sample;

#[test]
fn row_solver_matches_oracle_interval() {
    let mut barrier_cases = 0;
    for i in 0..60 {
        let mut rng = sample::stream(101, 0, i);
        let n = 3 + (i as usize % 2);
        let pt = sample::point_any_rank(&mut rng, n);
        let v = sample::tangent(&mut rng, &pt);
        let tpl = template_from_tangent(&pt, &v).unwrap();
        let k = tpl.xrow.ncols();
        let sol = row_minimize(&tpl).unwrap();
        let oracle = row_oracle(&tpl.row_block(&CMat::zeros(k, k)), k);
        assert!(sol.iota <= oracle.best + 1e-6, "case {i}: {} > {}", sol.iota, oracle.best);
        assert!(sol.iota >= oracle.lower - 1e-9, "case {i}: {} < {}", sol.iota, oracle.lower);
        assert!((sol.iota - power_norm(&tpl.row_block(&sol.y))).abs() < 1e-9);
        assert!(sol.iota >= tpl.lower_bound() - 1e-12);
        if sol.method == finsler::RowMethod::Barrier {
            barrier_cases += 1;
        }
    }
    assert!(barrier_cases > 0, "sample never exercised the barrier path");
}

#[test]
fn row_examples() {
    // xrow = 0 and a = 0: the row is the scalar i·x0.
    let pt = fixture();
    let f = pt.f().clone();
    let v = TangentVector::new(&pt, CMat::zeros(3, 3), f.scale(1.0) * c(0.0, -0.8)).unwrap();
    let tpl = template_from_tangent(&pt, &v).unwrap();
    let sol = row_minimize(&tpl).unwrap();
    assert!(sol.y.norm() < 1e-15);
    assert!((sol.iota - 0.8).abs() < 1e-15);
    // Fixture fiber direction.
    let v = TangentVector::new(&pt, CMat::zeros(3, 3), e(3, 1)).unwrap();
    let sol = row_minimize(&template_from_tangent(&pt, &v).unwrap()).unwrap();
    assert!((sol.iota - 1.0).abs() < 1e-12);
}

#[test]
fn krein_matches_brute_force() {
    for i in 0..30 {
        let mut rng = sample::stream(102, 0, i);
        let r = 1 + i as usize % 2;
        let m = 1 + (i as usize / 2) % 2;
        let b = sample::anti_hermitian(&mut rng, r);
        let a = sample::matrix(&mut rng, r, m);
        let done = krein_complete(&b, &a);
        let full = finsler::assemble_krein(&b, &a, &done.z);
        let norm = power_norm(&full);
        assert!(norm - done.mu <= 1e-8, "case {i}: {norm} vs {}", done.mu);
        // Oracle over the corner only.
        let units = skew_units(m);
        let dirs: Vec<CMat> = units
            .iter()
            .map(|u| finsler::assemble_krein(&CMat::zeros(r, r), &CMat::zeros(r, m), u))
            .collect();
        let base = finsler::assemble_krein(&b, &a, &CMat::zeros(m, m));
        let oracle = ellipsoid_min(
            |y| {
                let mut mat = base.clone();
                for (d, w) in dirs.iter().zip(y) {
                    mat += d.scale(*w);
                }
                norm_with_subgradient(&mat, &dirs)
            },
            &vec![0.0; dirs.len()],
            4.0 * top_singular(&base).0 + 1.0,
            1e-10,
            60_000,
        );
        assert!((norm - oracle.best).abs() < 1e-6, "case {i}: {norm} vs {}", oracle.best);
    }
}

#[test]
fn minimal_lifting_matches_joint_oracle() {
    for i in 0..40 {
        let mut rng = sample::stream(103, 0, i);
        let n = 2 + i as usize % 3;
        let pt = sample::point_any_rank(&mut rng, n);
        let v = sample::tangent(&mut rng, &pt);
        let lift = minimal_lifting(&pt, &v).unwrap();
        let back = bundle::delta(&pt, &lift.x0matrix).unwrap();
        assert!((&back.x - &v.x).norm() < 1e-10);
        assert!((&back.g - &v.g).norm() < 1e-10);
        let oracle = joint_oracle(&in_frame(&pt, &lift.x0matrix), pt.frame().dims);
        assert!(lift.norm <= oracle.best + 1e-6, "case {i}: {} vs {}", lift.norm, oracle.best);
        assert!(lift.norm >= oracle.lower - 1e-9, "case {i}: {} vs {} (best {}, power {})", lift.norm, oracle.lower, oracle.best, power_norm(&lift.x0matrix));
        assert!(lift.oracle_gap.unwrap() <= 1e-6);
    }
}

#[test]
fn lower_bound_law() {
    for i in 0..100 {
        let mut rng = sample::stream(104, 0, i);
        let n = 2 + i as usize % 5;
        let pt = sample::point_any_rank(&mut rng, n);
        let v = sample::tangent(&mut rng, &pt).scale(0.1 + i as f64 * 0.05);
        let norm = finsler::finsler_norm(&pt, &v).unwrap();
        let bound = spectral_norm(&v.x).max(v.g.norm());
        assert!(norm >= bound - 1e-10, "case {i}: {norm} < {bound}");
    }
}

#[test]
fn remark_classes() {
    for i in 0..20 {
        let mut rng = sample::stream(105, 0, i);
        let pt = sample::point(&mut rng, 4, 2 + i as usize % 2);
        // Fiber direction with ⟨g, f⟩ = 0.
        let h = pt.p() * sample::vector(&mut rng, 4);
        let g = &h - pt.f() * pt.f().dotc(&h);
        let v = TangentVector::new(&pt, CMat::zeros(4, 4), g.clone()).unwrap();
        let lift = minimal_lifting(&pt, &v).unwrap();
        assert!((lift.norm - g.norm()).abs() < 1e-10);
        let expected = ket_bra(&g, pt.f()) - ket_bra(pt.f(), &g);
        assert!((power_norm(&expected) - g.norm()).abs() < 1e-9);
        // Codiagonal direction (x, 0).
        let q = pt.complement();
        let w = sample::matrix(&mut rng, 4, 4);
        let mut x = &q * &w * pt.p();
        x = &x + x.adjoint();
        // Remove the component that would move f.
        let xf = &x * pt.f();
        let x = &x - ket_bra(&xf, pt.f()) - ket_bra(pt.f(), &xf);
        let v = TangentVector::new(&pt, x.clone(), CVec::zeros(4)).unwrap();
        let lift = minimal_lifting(&pt, &v).unwrap();
        assert!((lift.norm - spectral_norm(&x)).abs() < 1e-10, "{} vs {}", lift.norm, spectral_norm(&x));
    }
}

#[test]
fn dkw_orientation_against_row_solver() {
    for i in 0..20 {
        let mut rng = sample::stream(106, 0, i);
        let pt = sample::point(&mut rng, 4, 3);
        let frame = pt.frame();
        let g0 = sample::real_gaussian(&mut rng);
        let gamma = sample::vector(&mut rng, 2);
        let mut gf = CVec::zeros(4);
        gf[0] = c(0.0, g0);
        gf.rows_mut(1, 2).copy_from(&gamma);
        let g = frame.vec_from_frame(&gf);
        let v = TangentVector::new(&pt, CMat::zeros(4, 4), g.clone()).unwrap();
        let tpl = template_from_tangent(&pt, &v).unwrap();
        let sol = row_minimize(&tpl).unwrap();
        assert!((sol.iota - g.norm()).abs() < 1e-9);
        // The template row is the lifting orientation.
        let y = dkw_solutions(g0, &gamma, &CMat::zeros(2, 2), RowOrientation::Lifting).unwrap();
        let row = dkw_row(g0, &gamma, &y, RowOrientation::Lifting);
        let tpl_row = tpl.row_block(&y);
        assert!((tpl_row.columns(0, 3) - &row).norm() < 1e-12);
        assert!((spectral_norm(&row) - sol.iota).abs() < 1e-9);
        // Every contraction in the free slot stays minimal.
        let z = sample::anti_hermitian(&mut rng, 2);
        let z = z.unscale(spectral_norm(&z));
        for o in [RowOrientation::Lifting, RowOrientation::Printed] {
            let y = dkw_solutions(g0, &gamma, &z, o).unwrap();
            let norm = spectral_norm(&dkw_row(g0, &gamma, &y, o));
            assert!((norm - g.norm()).abs() < 1e-9, "{o:?}: {norm} vs {}", g.norm());
        }
        // The printed sign placed into the lifting row is not minimal.
        let printed = dkw_solutions(g0, &gamma, &CMat::zeros(2, 2), RowOrientation::Printed).unwrap();
        let mixed = spectral_norm(&dkw_row(g0, &gamma, &printed, RowOrientation::Lifting));
        assert!((mixed - (g0.abs() + gamma.norm())).abs() < 1e-9);
    }
}

#[test]
fn dkw_fixture_value() {
    let pt = fixture();
    let g = e(3, 0) * c(0.0, 1.0) + e(3, 1);
    let v = TangentVector::new(&pt, CMat::zeros(3, 3), g).unwrap();
    let tpl = template_from_tangent(&pt, &v).unwrap();
    let oracle = row_oracle(&tpl.row_block(&CMat::zeros(1, 1)), 1);
    assert!((oracle.best - 2f64.sqrt()).abs() < 1e-9);
    assert!((finsler::finsler_norm(&pt, &v).unwrap() - 2f64.sqrt()).abs() < 1e-9);
}

#[test]
fn homogeneity_triangle_invariance() {
    for i in 0..30 {
        let mut rng = sample::stream(107, 0, i);
        let n = 3 + i as usize % 2;
        let pt = sample::point_any_rank(&mut rng, n);
        let v = sample::tangent(&mut rng, &pt);
        let w = sample::tangent(&mut rng, &pt);
        let nv = finsler::finsler_norm(&pt, &v).unwrap();
        let nw = finsler::finsler_norm(&pt, &w).unwrap();
        let sum = finsler::finsler_norm(&pt, &v.add(&w)).unwrap();
        assert!(sum <= nv + nw + 1e-8);
        let scaled = finsler::finsler_norm(&pt, &v.scale(-2.5)).unwrap();
        assert!((scaled - 2.5 * nv).abs() < 1e-8);
        let u = sample::unitary(&mut rng, n);
        let moved = bundle::act(&u, &pt).unwrap();
        let nu = finsler::finsler_norm(&moved, &v.conjugate(&u)).unwrap();
        assert!((nu - nv).abs() < 1e-8);
    }
}

#[test]
fn geodesic_examples() {
    let pt = fixture();
    let v = TangentVector::new(&pt, CMat::zeros(3, 3), e(3, 1)).unwrap();
    assert_eq!(finsler::finsler_geodesic(&pt, &v, 0.0).unwrap(), pt);
    for t in [0.3, 1.2] {
        let q = finsler::finsler_geodesic(&pt, &v, t).unwrap();
        let expected = e(3, 0).scale(t.cos()) + e(3, 1).scale(t.sin());
        assert!((q.f() - expected).norm() < 1e-13);
    }
    // Codiagonal: the vector stays put.
    let x = ket_bra(&e(3, 2), &e(3, 1)) + ket_bra(&e(3, 1), &e(3, 2));
    let v = TangentVector::new(&pt, x, CVec::zeros(3)).unwrap();
    for t in [0.4, 1.5] {
        let q = finsler::finsler_geodesic(&pt, &v, t).unwrap();
        assert!((q.f() - pt.f()).norm() < 1e-13);
    }
}

#[test]
fn geodesic_derivative_and_length() {
    for i in 0..5 {
        let mut rng = sample::stream(108, 0, i);
        let pt = sample::point(&mut rng, 4, 2);
        let v = sample::tangent(&mut rng, &pt);
        let h = 1e-5;
        let dp = fd_matrix(|s| finsler::finsler_geodesic(&pt, &v, s).unwrap().p().clone(), 0.0, h);
        let df = fd_vector(|s| finsler::finsler_geodesic(&pt, &v, s).unwrap().f().clone(), 0.0, h);
        assert!((dp - &v.x).norm() < 1e-8);
        assert!((df - &v.g).norm() < 1e-8);

        let norm = finsler::finsler_norm(&pt, &v).unwrap();
        let t = 0.7;
        let sampled = |steps: usize| {
            let pts: Vec<_> = (0..=steps)
                .map(|k| finsler::finsler_geodesic(&pt, &v, t * k as f64 / steps as f64).unwrap())
                .collect();
            curve_length(&pts, CurveMetric::Finsler).unwrap()
        };
        let coarse = (sampled(16) - t * norm).abs();
        let fine = (sampled(32) - t * norm).abs();
        assert!(fine <= 1e-3 * t * norm, "{fine}");
        assert!(fine <= coarse / 3.0 || fine < 1e-9, "{coarse} {fine}");
    }
}

#[test]
fn probe_examples() {
    let pt = fixture();
    let v = TangentVector::new(&pt, CMat::zeros(3, 3), e(3, 1)).unwrap();
    let report = finsler::minimality_probe(&pt, &v, 0.1, 100, 7).unwrap();
    assert!(!report.violated(), "{report:?}");
    assert!((report.geodesic_length - 0.1).abs() < 1e-12);

    let x = ket_bra(&e(3, 2), &e(3, 0)) + ket_bra(&e(3, 0), &e(3, 2));
    let v = TangentVector::new(&pt, x, e(3, 2)).unwrap();
    let report = finsler::minimality_probe(&pt, &v, std::f64::consts::FRAC_PI_2, 100, 8).unwrap();
    assert!(!report.violated(), "{report:?}");

    let report = finsler::minimality_probe(&pt, &v, 0.0, 10, 9).unwrap();
    assert_eq!(report.geodesic_length, 0.0);
    assert_eq!(report.min_competitor_length, 0.0);
}

#[test]
fn geodesic_is_an_orbit_of_the_minimal_lifting() {
    let mut rng = sample::stream(109, 0, 0);
    let pt = sample::point(&mut rng, 3, 2);
    let v = sample::tangent(&mut rng, &pt);
    let lift = minimal_lifting(&pt, &v).unwrap();
    let q = finsler::finsler_geodesic(&pt, &v, 0.9).unwrap();
    let u = mat_exp(&lift.x0matrix.scale(0.9)).unwrap();
    assert!((q.p() - &u * pt.p() * u.adjoint()).norm() < 1e-12);
}
