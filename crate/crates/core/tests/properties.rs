//! Randomized property suites for the norm calculus, dual relations,
//! curvature bounds, and quadrature behavior.

use std::f64::consts::PI;

use proptest::prelude::*;

use wulff_willmore_core::minkowski::MinkowskiNorm;
use wulff_willmore_core::regions::{avr, wulff_cone_volume, ConvexRegion};
use wulff_willmore_core::surfaces::{Clip, SurfacePatch};
use wulff_willmore_core::{Mat3, Vec3};

fn norm_set() -> Vec<MinkowskiNorm> {
    let m = Mat3::new(
        1.3, 0.2, 0.0, //
        0.2, 1.0, 0.1, //
        0.0, 0.1, 0.8,
    );
    vec![
        MinkowskiNorm::euclidean(),
        MinkowskiNorm::capillary(1.2).unwrap(),
        MinkowskiNorm::ellipsoidal(m).unwrap(),
        MinkowskiNorm::euclidean().tilt(0.3).unwrap().0,
    ]
}

fn unit_strategy() -> impl Strategy<Value = Vec3> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64).prop_filter_map("too short", |(x, y, z)| {
        let v = Vec3::new(x, y, z);
        let n = v.norm();
        (n > 0.1).then(|| v / n)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn homogeneity_and_euler(z in unit_strategy(), t in 0.1..5.0f64) {
        for f in norm_set() {
            let v = f.value(&z);
            prop_assert!((f.value(&(z * t)) - t * v).abs() <= 1e-12 * t.max(1.0));
            prop_assert!((f.gradient(&z).dot(&z) - v).abs() <= 1e-10);
            prop_assert!((f.gradient(&(z * t)) - f.gradient(&z)).norm() <= 1e-10);
        }
    }

    #[test]
    fn cahn_hoffman_lands_on_dual_unit_sphere(z in unit_strategy()) {
        for f in norm_set() {
            let phi = f.cahn_hoffman(&z).unwrap();
            prop_assert!((f.dual(&phi) - 1.0).abs() <= 1e-9);
            prop_assert!((phi.dot(&z) - f.value(&z)).abs() <= 1e-9);
        }
    }

    #[test]
    fn dual_pairing_bound(z in unit_strategy(), x in unit_strategy(), s in 0.2..3.0f64) {
        for f in norm_set() {
            let x = x * s;
            prop_assert!(x.dot(&z) <= f.dual(&x) * f.value(&z) + 1e-10);
        }
    }

    #[test]
    fn hessian_operator_positive_definite(z in unit_strategy()) {
        for f in norm_set() {
            let (a, _) = f.hessian_operator(&z).unwrap();
            let tr = a[(0, 0)] + a[(1, 1)];
            let det = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
            let min_eig = (tr - (tr * tr - 4.0 * det).max(0.0).sqrt()) / 2.0;
            prop_assert!(min_eig > 0.0, "min eigenvalue {min_eig}");
        }
    }

    #[test]
    fn dual_triangle_inequality(a in unit_strategy(), b in unit_strategy(),
                                s in 0.2..2.0f64, t in 0.2..2.0f64) {
        for f in norm_set() {
            let (a, b) = (a * s, b * t);
            prop_assert!(f.dual(&(a + b)) <= f.dual(&a) + f.dual(&b) + 1e-10);
        }
    }

    #[test]
    fn radial_point_attains_wulff_distance(y in unit_strategy(),
                                           s in 2.0..6.0f64, r in 0.3..1.3f64) {
        // for y outside the Wulff ball W_r, the radial boundary point
        // attains F°(y) - r, which the triangle inequality shows is optimal
        for f in norm_set() {
            let y = y * s;
            let fy = f.dual(&y);
            prop_assume!(fy > r + 0.1);
            let x_star = y * (r / fy);
            prop_assert!((f.dual(&(y - x_star)) - (fy - r)).abs() <= 1e-9 * fy);
        }
    }

    #[test]
    fn reversal_involution(z in unit_strategy(), s in 0.2..3.0f64) {
        for f in norm_set() {
            let xi = z * s;
            let rev = f.reversal();
            prop_assert!((rev.value(&xi) - f.value(&(-xi))).abs() <= 1e-12);
            prop_assert!((rev.reversal().value(&xi) - f.value(&xi)).abs() <= 1e-12);
            prop_assert!((rev.dual(&xi) - f.dual(&(-xi))).abs() <= 1e-9);
        }
    }

    #[test]
    fn tilt_preserves_hessian_operator(z in unit_strategy(), w0 in -0.4..0.4f64) {
        // the tilted norm differs by a linear term, so the curvature
        // operator is unchanged
        for f in norm_set() {
            let (lo, hi) = f.omega_range();
            let w0 = w0.clamp(0.9 * lo, 0.9 * hi);
            let (tilted, cv) = f.tilt(w0).unwrap();
            let xi = z * 1.7;
            prop_assert!(
                (tilted.value(&xi) - f.value(&xi) - w0 * xi.dot(&cv.e_f)).abs() <= 1e-10
            );
            let (a, _) = f.hessian_operator(&z).unwrap();
            let (b, _) = tilted.hessian_operator(&z).unwrap();
            prop_assert!((a - b).norm() <= 1e-8);
        }
    }

    #[test]
    fn flow_jacobian_am_gm(k1 in -2.0..2.0f64, spread in 0.0..2.0f64, t in 0.0..1.5f64) {
        let k2 = k1 + spread;
        let h = (k1 + k2) / 2.0;
        prop_assume!(1.0 + t * h >= 0.0);
        let prod = (1.0 + t * k1) * (1.0 + t * k2);
        let bound = (1.0 + t * h).powi(2);
        prop_assert!(prod <= bound + 1e-12);
        if spread == 0.0 {
            prop_assert!((prod - bound).abs() <= 1e-12);
        }
    }
}

#[test]
fn angle_comparison_large_sample() {
    for f in norm_set() {
        let report = f.angle_comparison_check(10_000, 11);
        assert_eq!(report.violations, 0, "min slack {}", report.min_slack);
        assert!(report.min_slack >= -1e-9);
    }
}

#[test]
fn avr_is_scale_invariant() {
    let cone = ConvexRegion::circular_cone(Vec3::z(), PI / 4.0).unwrap();
    for f in norm_set() {
        let base = avr(&f, &cone, 32).unwrap().value;
        let v1 = wulff_cone_volume(&f, &cone, 1.0, 48).unwrap();
        for s in [1.0f64, 3.0, 10.0] {
            let vs = wulff_cone_volume(&f, &cone, s, 48).unwrap();
            assert!(
                (vs - s.powi(3) * v1).abs() <= 1e-9 * vs.abs(),
                "scaling break at s = {s}"
            );
            // the ratio defining the asymptotic volume fraction is unchanged
            let full_s = wulff_cone_volume(&f, &ConvexRegion::full_space(), s, 48).unwrap();
            assert!((vs / full_s - base).abs() <= 1e-6);
        }
    }
}

#[test]
fn quadrature_converges_from_order_8_to_64() {
    let upper = ConvexRegion::half_space(Vec3::z()).unwrap();
    let hemi = SurfacePatch::sphere_cap(Vec3::zeros(), 1.0, Clip::Region(upper)).unwrap();
    let exact = 2.0 * PI;
    let mut prev = f64::INFINITY;
    for order in [8usize, 16, 32, 64] {
        let err = (hemi.area(order).unwrap() - exact).abs();
        assert!(
            err <= prev.max(1e-12),
            "error grew at order {order}: {err} > {prev}"
        );
        prev = err;
    }
    assert!(prev <= 1e-10, "final error {prev}");

    let f = MinkowskiNorm::capillary(1.0).unwrap();
    let cap = SurfacePatch::wulff_cap(
        f.clone(),
        Vec3::zeros(),
        1.0,
        Clip::Region(ConvexRegion::half_space(Vec3::z()).unwrap()),
    )
    .unwrap();
    let fine = cap.area(96).unwrap();
    let coarse = cap.area(48).unwrap();
    assert!((fine - coarse).abs() / fine <= 1e-8);
}
