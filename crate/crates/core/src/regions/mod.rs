//! Unbounded closed convex sets: containment, outward boundary normals on
//! the regular part, tangent cones at infinity, Wulff-ball intersection
//! volumes by radial quadrature, and the asymptotic volume ratio.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::minkowski::MinkowskiNorm;
use crate::util::{
    brent_root, fibonacci_sphere, gauss_legendre_on, rotation_to_axis, KahanSum, Vec3,
};

const BOUNDARY_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub enum RegionKind {
    FullSpace,
    /// { x : <x, inward> >= 0 }
    HalfSpace {
        inward: Vec3,
    },
    /// { x : angle(x, axis) <= half_angle }
    CircularCone {
        axis: Vec3,
        half_angle: f64,
    },
    /// { x : <x, n_i> <= 0 for all i }, n_i outward face normals
    PolyhedralCone {
        normals: Vec<Vec3>,
    },
}

/// An unbounded closed convex set. All built-in families are cones once the
/// anchor is moved to the origin, so the tangent cone at infinity is the
/// anchored region itself.
#[derive(Debug, Clone)]
pub struct ConvexRegion {
    kind: RegionKind,
    anchor: Vec3,
}

/// AVR value with the quadrature order used and an order-doubling error
/// estimate.
#[derive(Debug, Clone, Copy)]
pub struct AvrResult {
    pub value: f64,
    pub order: usize,
    pub error_estimate: f64,
}

impl ConvexRegion {
    pub fn full_space() -> Self {
        Self {
            kind: RegionKind::FullSpace,
            anchor: Vec3::zeros(),
        }
    }

    /// Half-space containing the `inward` direction: { <x, inward> >= 0 }.
    pub fn half_space(inward: Vec3) -> Result<Self> {
        if inward.norm() < 1e-14 {
            return Err(Error::Domain("half_space: zero normal".into()));
        }
        Ok(Self {
            kind: RegionKind::HalfSpace {
                inward: inward.normalize(),
            },
            anchor: Vec3::zeros(),
        })
    }

    pub fn circular_cone(axis: Vec3, half_angle: f64) -> Result<Self> {
        if axis.norm() < 1e-14 {
            return Err(Error::Domain("circular_cone: zero axis".into()));
        }
        if !(half_angle > 0.0 && half_angle < PI / 2.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "circular_cone: half_angle {half_angle} outside (0, pi/2]"
            )));
        }
        Ok(Self {
            kind: RegionKind::CircularCone {
                axis: axis.normalize(),
                half_angle,
            },
            anchor: Vec3::zeros(),
        })
    }

    /// Intersection of half-spaces through the origin with outward normals.
    pub fn polyhedral_cone(normals: Vec<Vec3>) -> Result<Self> {
        if normals.is_empty() {
            return Err(Error::Domain("polyhedral_cone: no faces".into()));
        }
        let normals: Vec<Vec3> = normals.iter().map(|n| n.normalize()).collect();
        let region = Self {
            kind: RegionKind::PolyhedralCone { normals },
            anchor: Vec3::zeros(),
        };
        // the interior must be non-degenerate
        region.interior_axis()?;
        Ok(region)
    }

    /// Intersection of two half-spaces (a wedge).
    pub fn wedge(outward1: Vec3, outward2: Vec3) -> Result<Self> {
        Self::polyhedral_cone(vec![outward1, outward2])
    }

    pub fn with_anchor(mut self, anchor: Vec3) -> Self {
        self.anchor = anchor;
        self
    }

    pub fn anchor(&self) -> Vec3 {
        self.anchor
    }

    pub fn kind(&self) -> &RegionKind {
        &self.kind
    }

    /// Signed inclusion function in anchored coordinates: positive inside,
    /// zero on the boundary, negative outside.
    pub fn barrier(&self, x: &Vec3) -> f64 {
        let x = x - self.anchor;
        match &self.kind {
            RegionKind::FullSpace => f64::INFINITY,
            RegionKind::HalfSpace { inward } => x.dot(inward),
            RegionKind::CircularCone { axis, half_angle } => {
                x.dot(axis) - x.norm() * half_angle.cos()
            }
            RegionKind::PolyhedralCone { normals } => normals
                .iter()
                .map(|n| -x.dot(n))
                .fold(f64::INFINITY, f64::min),
        }
    }

    pub fn contains(&self, x: &Vec3) -> bool {
        self.barrier(x) >= -1e-12
    }

    /// Outward unit normal on the regular part of the boundary.
    pub fn boundary_normal(&self, x: &Vec3) -> Result<Vec3> {
        let xa = x - self.anchor;
        let scale = xa.norm().max(1.0);
        match &self.kind {
            RegionKind::FullSpace => Err(Error::Geometry("full space has no boundary".into())),
            RegionKind::HalfSpace { inward } => {
                if xa.dot(inward).abs() > BOUNDARY_TOL * scale {
                    return Err(Error::Geometry(format!(
                        "point not on half-space boundary (offset {})",
                        xa.dot(inward)
                    )));
                }
                Ok(-inward)
            }
            RegionKind::CircularCone { axis, half_angle } => {
                if xa.norm() < BOUNDARY_TOL {
                    return Err(Error::Singular("cone apex".into()));
                }
                let u = xa.normalize();
                let angle = u.dot(axis).clamp(-1.0, 1.0).acos();
                if (angle - half_angle).abs() > BOUNDARY_TOL {
                    return Err(Error::Geometry(format!(
                        "point not on cone boundary (angle {angle} vs {half_angle})"
                    )));
                }
                let perp = xa - axis * xa.dot(axis);
                if perp.norm() < BOUNDARY_TOL * scale {
                    return Err(Error::Singular("point on cone axis".into()));
                }
                Ok(perp.normalize() * half_angle.cos() - axis * half_angle.sin())
            }
            RegionKind::PolyhedralCone { normals } => {
                if xa.norm() < BOUNDARY_TOL {
                    return Err(Error::Singular("cone apex".into()));
                }
                let mut active = Vec::new();
                for (i, n) in normals.iter().enumerate() {
                    let v = xa.dot(n);
                    if v > BOUNDARY_TOL * scale {
                        return Err(Error::Geometry("point outside the region".into()));
                    }
                    if v.abs() <= BOUNDARY_TOL * scale {
                        active.push(i);
                    }
                }
                match active.len() {
                    0 => Err(Error::Geometry("point in the interior".into())),
                    1 => Ok(normals[active[0]]),
                    _ => Err(Error::Singular("edge of the polyhedral cone".into())),
                }
            }
        }
    }

    /// A unit direction in the interior of the anchored cone.
    pub fn interior_axis(&self) -> Result<Vec3> {
        match &self.kind {
            RegionKind::FullSpace => Ok(Vec3::z()),
            RegionKind::HalfSpace { inward } => Ok(*inward),
            RegionKind::CircularCone { axis, .. } => Ok(*axis),
            RegionKind::PolyhedralCone { normals } => {
                let sum: Vec3 = -normals.iter().sum::<Vec3>();
                let mut best = if sum.norm() > 1e-12 {
                    sum.normalize()
                } else {
                    Vec3::z()
                };
                let origin = self.anchor;
                let b = |u: &Vec3| {
                    let p = origin + u;
                    self.barrier(&p)
                };
                if b(&best) <= 1e-10 {
                    let cand = fibonacci_sphere(4096)
                        .into_iter()
                        .max_by(|p, q| b(p).partial_cmp(&b(q)).unwrap())
                        .unwrap();
                    best = cand;
                }
                if b(&best) <= 1e-10 {
                    return Err(Error::Domain("polyhedral cone has empty interior".into()));
                }
                Ok(best)
            }
        }
    }

    /// Tangent cone at infinity: the same cone re-anchored at the origin.
    /// Supplied analytically for every built-in family.
    pub fn tangent_cone_at_infinity(&self) -> ConvexRegion {
        ConvexRegion {
            kind: self.kind.clone(),
            anchor: Vec3::zeros(),
        }
    }

    /// For anchored cones: polar extent theta_max(phi) of K on the sphere in
    /// the frame whose pole is `interior_axis`, plus the index of the face
    /// terminating the meridian (polyhedral cones only).
    fn theta_max_on_sphere(&self, frame: &crate::util::Mat3, phi: f64) -> (f64, Option<usize>) {
        match &self.kind {
            RegionKind::FullSpace => (PI, None),
            RegionKind::HalfSpace { .. } => (PI / 2.0, None),
            RegionKind::CircularCone { half_angle, .. } => (*half_angle, None),
            RegionKind::PolyhedralCone { normals } => {
                let pole = frame * Vec3::z();
                let equator = frame * Vec3::new(phi.cos(), phi.sin(), 0.0);
                // each face reads c_i cos(theta) + s_i sin(theta) <= 0 along
                // the meridian, i.e. A cos(theta - delta) <= 0 with c_i < 0
                // at the interior pole; first positive root (delta - pi/2)
                // taken mod pi
                let mut best = (PI, None);
                for (i, n) in normals.iter().enumerate() {
                    let c = pole.dot(n);
                    let s = equator.dot(n);
                    if (c * c + s * s).sqrt() < 1e-14 {
                        continue;
                    }
                    let delta = s.atan2(c);
                    let mut root = (delta - PI / 2.0).rem_euclid(PI);
                    if root <= 1e-15 {
                        root = PI;
                    }
                    if root < best.0 {
                        best = (root, Some(i));
                    }
                }
                best
            }
        }
    }

    /// Azimuth panels of [0, 2 pi] on which theta_max(phi) is smooth. For
    /// polyhedral cones the breaks are where the terminating face changes,
    /// located by bisection on the face index.
    fn azimuth_panels(&self, frame: &crate::util::Mat3) -> Vec<(f64, f64)> {
        if !matches!(self.kind, RegionKind::PolyhedralCone { .. }) {
            return vec![(0.0, 2.0 * PI)];
        }
        let idx = |phi: f64| self.theta_max_on_sphere(frame, phi).1;
        let samples = 720;
        let mut cuts = Vec::new();
        for k in 0..samples {
            let a = 2.0 * PI * k as f64 / samples as f64;
            let b = 2.0 * PI * (k + 1) as f64 / samples as f64;
            if idx(a) != idx(b) {
                let (mut lo, mut hi) = (a, b);
                let target = idx(a);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if idx(mid) == target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                cuts.push(0.5 * (lo + hi));
            }
        }
        if cuts.is_empty() {
            return vec![(0.0, 2.0 * PI)];
        }
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut panels = Vec::new();
        for w in cuts.windows(2) {
            panels.push((w[0], w[1]));
        }
        panels.push((cuts[cuts.len() - 1], cuts[0] + 2.0 * PI));
        panels
    }

    /// Quadrature nodes (unit direction, weight) for integrals over K on the
    /// unit sphere; exact domain handling per family, spectrally convergent
    /// for smooth integrands.
    pub fn spherical_nodes(&self, n_polar: usize, n_azimuth: usize) -> Vec<(Vec3, f64)> {
        let axis = self.interior_axis().expect("region with empty interior");
        let frame = rotation_to_axis(&axis);
        let mut nodes = Vec::new();
        for (a, b) in self.azimuth_panels(&frame) {
            for &(phi, wphi) in &gauss_legendre_on(n_azimuth, a, b) {
                let (tmax, _) = self.theta_max_on_sphere(&frame, phi);
                for &(theta, wtheta) in &gauss_legendre_on(n_polar, 0.0, tmax) {
                    let u = frame
                        * Vec3::new(
                            theta.sin() * phi.cos(),
                            theta.sin() * phi.sin(),
                            theta.cos(),
                        );
                    nodes.push((u, wphi * wtheta * theta.sin()));
                }
            }
        }
        nodes
    }
}

/// |W^F_R ∩ K| for an anchored cone K by radial integration: the Wulff
/// ball's radial function in direction u is R / F°(u).
pub fn wulff_cone_volume(
    norm: &MinkowskiNorm,
    region: &ConvexRegion,
    radius: f64,
    order: usize,
) -> Result<f64> {
    if radius <= 0.0 {
        return Err(Error::Domain(format!(
            "radius must be positive, got {radius}"
        )));
    }
    if region.anchor.norm() > 0.0 {
        return Err(Error::Domain(
            "wulff_cone_volume requires K anchored at the origin".into(),
        ));
    }
    let mut acc = KahanSum::new();
    for (u, w) in region.spherical_nodes(order, 2 * order) {
        let fo = norm.dual(&u);
        acc.add(w / (fo * fo * fo));
    }
    Ok(radius.powi(3) / 3.0 * acc.value())
}

/// |W^F| = |W^F_1 ∩ R^3|.
pub fn wulff_ball_volume(norm: &MinkowskiNorm, order: usize) -> f64 {
    wulff_cone_volume(norm, &ConvexRegion::full_space(), 1.0, order).unwrap()
}

/// AVR_F(K) = |W^F ∩ K_inf| / |W^F|.
pub fn avr(norm: &MinkowskiNorm, region: &ConvexRegion, order: usize) -> Result<AvrResult> {
    let cone = region.tangent_cone_at_infinity();
    let value_at = |ord: usize| -> Result<f64> {
        let num = wulff_cone_volume(norm, &cone, 1.0, ord)?;
        let den = wulff_ball_volume(norm, ord);
        Ok(num / den)
    };
    let coarse = value_at(order)?;
    let fine = value_at(2 * order)?;
    Ok(AvrResult {
        value: fine.clamp(0.0, 1.0),
        order: 2 * order,
        error_estimate: (fine - coarse).abs().max(f64::EPSILON),
    })
}

/// The ratio profile |W^F_{r+R} ∩ K| / R^3 over an increasing grid of R.
/// Non-increasing for convex K; constant exactly when K is a cone and r = 0.
pub fn avr_monotonicity_profile(
    norm: &MinkowskiNorm,
    region: &ConvexRegion,
    r: f64,
    radii: &[f64],
    order: usize,
) -> Result<Vec<f64>> {
    if r < 0.0 {
        return Err(Error::Domain("offset r must be non-negative".into()));
    }
    radii
        .iter()
        .map(|&big_r| {
            let v = wulff_cone_volume(norm, region, r + big_r, order)?;
            Ok(v / big_r.powi(3))
        })
        .collect()
}

/// Volume of the translated Wulff ball W^F_1(center) intersected with the
/// upper half-space { x3 >= 0 }: radial quadrature around an interior point
/// on the vertical axis, with the ball/plane switch-over resolved per
/// meridian so each polar panel integrates a smooth radial function.
pub fn wulff_halfspace_volume(norm: &MinkowskiNorm, center: &Vec3, order: usize) -> Result<f64> {
    // work in w = x - center; the plane is w3 = -c3
    let plane_w3 = -center.z;
    let t_top = 1.0 / norm.dual(&Vec3::z());
    let t_bot = -1.0 / norm.dual(&(-Vec3::z()));
    if plane_w3 >= t_top - 1e-14 {
        return Ok(0.0);
    }
    if plane_w3 <= t_bot + 1e-14 {
        // plane below the ball: the full Wulff volume
        return Ok(wulff_ball_volume(norm, order));
    }
    let p = Vec3::new(0.0, 0.0, 0.5 * (plane_w3.max(t_bot) + t_top));
    debug_assert!(norm.dual(&p) < 1.0);
    // radial extent to the Wulff boundary from p in direction u
    let rho_ball = |u: &Vec3| -> f64 {
        let g = |s: f64| norm.dual(&(p + u * s)) - 1.0;
        let mut hi = 2.0 * (1.0 / norm.dual(u) + p.norm());
        let mut n = 0;
        while g(hi) < 0.0 {
            hi *= 2.0;
            n += 1;
            assert!(n < 100);
        }
        brent_root(g, 0.0, hi, 1e-14)
    };
    let rho_plane = |u: &Vec3| -> f64 {
        if u.z < -1e-14 {
            (plane_w3 - p.z) / u.z
        } else {
            f64::INFINITY
        }
    };
    let dir = |theta: f64, phi: f64| {
        Vec3::new(
            theta.sin() * phi.cos(),
            theta.sin() * phi.sin(),
            theta.cos(),
        )
    };
    // positive when the ball surface comes first along the ray, i.e. the
    // plane intersection point lies outside the Wulff ball
    let switch = |theta: f64, phi: f64| -> f64 {
        let u = dir(theta, phi);
        let rp = rho_plane(&u);
        if rp.is_infinite() {
            return 1.0;
        }
        norm.dual(&(p + u * rp)) - 1.0
    };
    let mut acc = KahanSum::new();
    for &(phi, wphi) in &gauss_legendre_on(2 * order, 0.0, 2.0 * PI) {
        // locate the ball/plane switch-over angle on this meridian
        let steps = 256;
        let mut theta_star = PI;
        for k in 1..=steps {
            let t = PI * k as f64 / steps as f64;
            if switch(t, phi) <= 0.0 {
                let a = PI * (k - 1) as f64 / steps as f64;
                theta_star = brent_root(|t| switch(t, phi), a.max(1e-12), t, 1e-13);
                break;
            }
        }
        let mut panels = vec![(0.0, theta_star, true)];
        if theta_star < PI {
            panels.push((theta_star, PI, false));
        }
        for (a, b, ball_side) in panels {
            for &(theta, wtheta) in &gauss_legendre_on(order, a, b) {
                let u = dir(theta, phi);
                let rho = if ball_side {
                    rho_ball(&u)
                } else {
                    rho_plane(&u)
                };
                acc.add(wphi * wtheta * theta.sin() * rho.powi(3) / 3.0);
            }
        }
    }
    Ok(acc.value())
}

/// Volume of a unit-sphere cap of height h: pi h^2 (3 - h) / 3. Independent
/// oracle for the spherical-cap scenarios.
pub fn spherical_cap_volume(h: f64) -> f64 {
    PI * h * h * (3.0 - h) / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn contains_examples() {
        let hs = ConvexRegion::half_space(Vec3::z()).unwrap();
        assert!(hs.contains(&Vec3::new(1.0, 2.0, 0.1)));
        assert!(!hs.contains(&Vec3::new(1.0, 2.0, -0.1)));
        let cone = ConvexRegion::circular_cone(Vec3::z(), PI / 4.0).unwrap();
        // angle to axis = atan(1/0.9) > pi/4
        assert!(!cone.contains(&Vec3::new(1.0, 0.0, 0.9)));
        assert!(cone.contains(&Vec3::new(1.0, 0.0, 1.1)));
        assert!(ConvexRegion::full_space().contains(&Vec3::new(-5.0, 3.0, 0.0)));
    }

    #[test]
    fn boundary_normals() {
        let hs = ConvexRegion::half_space(Vec3::z()).unwrap();
        let n = hs.boundary_normal(&Vec3::new(5.0, -2.0, 0.0)).unwrap();
        assert_relative_eq!(n, -Vec3::z(), epsilon = 1e-14);

        let cone = ConvexRegion::circular_cone(Vec3::z(), 0.6).unwrap();
        let x = Vec3::new(0.6_f64.sin(), 0.0, 0.6_f64.cos()) * 3.0;
        let n = cone.boundary_normal(&x).unwrap();
        // cone boundary points satisfy <x, N(x)> = 0
        assert!(x.dot(&n).abs() < 1e-12);
        assert!((n.norm() - 1.0).abs() < 1e-14);

        let wedge = ConvexRegion::wedge(-Vec3::z(), -Vec3::x()).unwrap();
        // edge point: both faces active
        assert!(matches!(
            wedge.boundary_normal(&Vec3::new(0.0, 1.0, 0.0)),
            Err(Error::Singular(_))
        ));
        // face point
        let n = wedge.boundary_normal(&Vec3::new(0.0, 1.0, 0.5)).unwrap();
        assert_relative_eq!(n, -Vec3::x(), epsilon = 1e-12);
    }

    #[test]
    fn euclidean_ball_and_half_ball_volumes() {
        let f = MinkowskiNorm::euclidean();
        let full = wulff_cone_volume(&f, &ConvexRegion::full_space(), 1.0, 48).unwrap();
        assert_relative_eq!(full, 4.0 * PI / 3.0, epsilon = 1e-10);
        let hs = ConvexRegion::half_space(Vec3::z()).unwrap();
        let half = wulff_cone_volume(&f, &hs, 2.0, 48).unwrap();
        assert_relative_eq!(half, 16.0 * PI / 3.0, epsilon = 1e-9);
    }

    #[test]
    fn capillary_wulff_ball_is_translated_unit_ball() {
        let f = MinkowskiNorm::capillary(PI / 3.0).unwrap();
        let v = wulff_ball_volume(&f, 64);
        assert_relative_eq!(v, 4.0 * PI / 3.0, epsilon = 1e-8);
    }

    #[test]
    fn avr_examples() {
        let f = MinkowskiNorm::euclidean();
        let hs = ConvexRegion::half_space(Vec3::z()).unwrap();
        assert_relative_eq!(avr(&f, &hs, 48).unwrap().value, 0.5, epsilon = 1e-10);

        let wedge = ConvexRegion::wedge(-Vec3::z(), -Vec3::x()).unwrap();
        assert_relative_eq!(avr(&f, &wedge, 48).unwrap().value, 0.25, epsilon = 1e-9);

        for alpha in [PI / 6.0, PI / 4.0, PI / 3.0] {
            let cone = ConvexRegion::circular_cone(Vec3::z(), alpha).unwrap();
            assert_relative_eq!(
                avr(&f, &cone, 48).unwrap().value,
                (1.0 - alpha.cos()) / 2.0,
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn monotonicity_profile_half_space() {
        let f = MinkowskiNorm::euclidean();
        let hs = ConvexRegion::half_space(Vec3::z()).unwrap();
        let grid = [1.0, 2.0, 4.0, 8.0];
        // r = 0: constant 2 pi / 3 (cone case)
        let flat = avr_monotonicity_profile(&f, &hs, 0.0, &grid, 48).unwrap();
        for v in &flat {
            assert_relative_eq!(*v, 2.0 * PI / 3.0, epsilon = 1e-9);
        }
        // r = 1: strictly decreasing, matching (2 pi / 3)(1 + R)^3 / R^3
        let dec = avr_monotonicity_profile(&f, &hs, 1.0, &grid, 48).unwrap();
        for (v, &r) in dec.iter().zip(grid.iter()) {
            assert_relative_eq!(
                *v,
                2.0 * PI / 3.0 * (1.0 + r).powi(3) / r.powi(3),
                epsilon = 1e-8
            );
        }
        for w in dec.windows(2) {
            assert!(w[1] < w[0]);
        }
    }

    #[test]
    fn capillary_cone_profile_constant() {
        let f = MinkowskiNorm::capillary(PI / 3.0).unwrap();
        let cone = ConvexRegion::circular_cone(Vec3::z(), 0.7).unwrap();
        let prof = avr_monotonicity_profile(&f, &cone, 0.0, &[1.0, 2.0, 4.0, 8.0], 64).unwrap();
        for v in &prof {
            assert!((v - prof[0]).abs() < 1e-6 * prof[0]);
        }
    }

    #[test]
    fn halfspace_volume_matches_cap_oracle() {
        // B_1(-cos(theta0) E3) ∩ {x3 >= 0} has the spherical-cap volume
        let f = MinkowskiNorm::euclidean();
        for theta0 in [PI / 3.0, PI / 2.0, 2.0 * PI / 3.0] {
            let c = Vec3::new(0.0, 0.0, -theta0.cos());
            let v = wulff_halfspace_volume(&f, &c, 64).unwrap();
            let h = 1.0 - theta0.cos();
            assert_relative_eq!(v, spherical_cap_volume(h), epsilon = 1e-8 * v.max(1.0));
        }
    }

    #[test]
    fn halfspace_volume_degenerate_planes() {
        let f = MinkowskiNorm::euclidean();
        // plane above the ball
        assert_eq!(
            wulff_halfspace_volume(&f, &Vec3::new(0.0, 0.0, -2.0), 32).unwrap(),
            0.0
        );
        // plane below the ball
        assert_relative_eq!(
            wulff_halfspace_volume(&f, &Vec3::new(0.0, 0.0, 2.0), 48).unwrap(),
            4.0 * PI / 3.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn supporting_hyperplane_property() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let regions = [
            ConvexRegion::half_space(Vec3::z()).unwrap(),
            ConvexRegion::circular_cone(Vec3::z(), 0.8).unwrap(),
            ConvexRegion::wedge(-Vec3::z(), Vec3::new(-1.0, 0.0, -0.2)).unwrap(),
        ];
        for region in &regions {
            let axis = region.interior_axis().unwrap();
            for _ in 0..1000 {
                // boundary point: shoot a ray from inside through a random direction
                let d = Vec3::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                );
                if d.norm() < 1e-3 {
                    continue;
                }
                let start = axis * rng.gen_range(0.5..2.0);
                let g = |t: f64| region.barrier(&(start + d * t));
                if g(20.0) >= 0.0 {
                    continue;
                }
                let t = brent_root(g, 0.0, 20.0, 1e-13);
                let x = start + d * t;
                let n = match region.boundary_normal(&x) {
                    Ok(n) => n,
                    Err(_) => continue,
                };
                let y = axis * rng.gen_range(0.1..3.0);
                assert!((y - x).dot(&n) <= 1e-9, "supporting hyperplane violated");
            }
        }
    }
}
