//! Hypersurface patches with boundary, their quadrature rules, and the
//! anisotropic curvature pipeline.
//!
//! Cap-type patches are parametrized over the sphere by polar coordinates
//! (theta, phi) with pole E3; a clip restricts the polar extent, either to a
//! fixed angle or to a convex region, whose boundary angle theta_b(phi) is
//! resolved per meridian so quadrature panels stay smooth.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::Matrix2;

use crate::error::{Error, Result};
use crate::minkowski::MinkowskiNorm;
use crate::regions::{ConvexRegion, RegionKind};
use crate::util::{brent_root, gauss_legendre_on, KahanSum, Vec3};

/// Restriction of a cap patch's polar domain.
#[derive(Debug, Clone)]
pub enum Clip {
    /// The full parameter sphere (a closed surface).
    None,
    /// theta <= value, independent of phi.
    ThetaMax(f64),
    /// Keep the part of the surface inside the region.
    Region(ConvexRegion),
}

type GraphFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum PatchKind {
    SphereCap {
        center: Vec3,
        radius: f64,
    },
    WulffCap {
        norm: MinkowskiNorm,
        center: Vec3,
        radius: f64,
    },
    /// X = center + r (1 + a P(z)) Phi(z) for a polynomial mode P.
    PerturbedWulff {
        norm: MinkowskiNorm,
        center: Vec3,
        radius: f64,
        amplitude: f64,
        mode: (u32, u32),
    },
    /// X(u, v) = (u, v, f(u, v)) over a rectangle.
    Graph {
        f: GraphFn,
        rect: [f64; 4],
    },
}

impl fmt::Debug for PatchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatchKind::SphereCap { center, radius } => f
                .debug_struct("SphereCap")
                .field("center", center)
                .field("radius", radius)
                .finish(),
            PatchKind::WulffCap { center, radius, .. } => f
                .debug_struct("WulffCap")
                .field("center", center)
                .field("radius", radius)
                .finish(),
            PatchKind::PerturbedWulff {
                center,
                radius,
                amplitude,
                mode,
                ..
            } => f
                .debug_struct("PerturbedWulff")
                .field("center", center)
                .field("radius", radius)
                .field("amplitude", amplitude)
                .field("mode", mode)
                .finish(),
            PatchKind::Graph { rect, .. } => f.debug_struct("Graph").field("rect", rect).finish(),
        }
    }
}

/// An embedded surface patch with an orientation. The default orientation
/// points away from the center for cap patches and upward for graphs.
///
/// Cap patches carry a rotation frame so the parametrization pole points
/// into the clip region; the normal direction z = frame * dir(theta, phi)
/// is unaffected as a set.
#[derive(Debug, Clone)]
pub struct SurfacePatch {
    kind: PatchKind,
    clip: Clip,
    flip: bool,
    frame: crate::util::Mat3,
}

/// Pointwise output of the curvature pipeline.
#[derive(Debug, Clone, Copy)]
pub struct CurvatureData {
    pub x: Vec3,
    /// Unit outward normal.
    pub nu: Vec3,
    /// Anisotropic normal Phi(nu) for the norm the curvatures refer to.
    pub nu_f: Vec3,
    pub f_of_nu: f64,
    /// Anisotropic principal curvatures, ascending.
    pub kappa_f: [f64; 2],
    /// Classical principal curvatures, ascending.
    pub kappa: [f64; 2],
    /// Area element |X_u x X_v| at the parameter point.
    pub area_element: f64,
}

impl CurvatureData {
    /// Normalized anisotropic mean curvature (kappa1 + kappa2) / 2.
    pub fn h_f(&self) -> f64 {
        0.5 * (self.kappa_f[0] + self.kappa_f[1])
    }

    /// Anisotropic Gauss curvature kappa1 * kappa2.
    pub fn h_n_f(&self) -> f64 {
        self.kappa_f[0] * self.kappa_f[1]
    }
}

/// A quadrature node on the patch: parameters, position, oriented unit
/// normal, and weight (the area element is folded in).
#[derive(Debug, Clone, Copy)]
pub struct SurfaceSample {
    pub uv: [f64; 2],
    pub x: Vec3,
    pub nu: Vec3,
    pub weight: f64,
}

const NORMAL_FD_STEP: f64 = 1e-5;
const GRAPH_FD_STEP: f64 = 1e-6;
const CLOSED_TOL: f64 = 1e-12;

fn sphere_dir(theta: f64, phi: f64) -> Vec3 {
    Vec3::new(
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    )
}

fn sphere_dir_theta(theta: f64, phi: f64) -> Vec3 {
    Vec3::new(
        theta.cos() * phi.cos(),
        theta.cos() * phi.sin(),
        -theta.sin(),
    )
}

fn sphere_dir_phi(theta: f64, phi: f64) -> Vec3 {
    Vec3::new(-theta.sin() * phi.sin(), theta.sin() * phi.cos(), 0.0)
}

/// Low-order polynomial perturbation modes on the sphere, indexed in the
/// spherical-harmonic style (degree, order): value and ambient gradient.
fn perturbation_mode(mode: (u32, u32), z: &Vec3) -> Result<(f64, Vec3)> {
    let (value, grad) = match mode {
        (0, 0) => (1.0, Vec3::zeros()),
        (1, 0) => (z.z, Vec3::z()),
        (2, 0) => (z.z * z.z, Vec3::new(0.0, 0.0, 2.0 * z.z)),
        (2, 1) => (z.x * z.z, Vec3::new(z.z, 0.0, z.x)),
        (2, 2) => (z.x * z.x - z.y * z.y, Vec3::new(2.0 * z.x, -2.0 * z.y, 0.0)),
        (3, 0) => (z.z * z.z * z.z, Vec3::new(0.0, 0.0, 3.0 * z.z * z.z)),
        _ => {
            return Err(Error::Domain(format!(
                "unsupported perturbation mode {mode:?}"
            )))
        }
    };
    Ok((value, grad))
}

fn clip_frame(clip: &Clip) -> Result<crate::util::Mat3> {
    match clip {
        Clip::Region(region) => Ok(crate::util::rotation_to_axis(&region.interior_axis()?)),
        _ => Ok(crate::util::Mat3::identity()),
    }
}

impl SurfacePatch {
    pub fn sphere_cap(center: Vec3, radius: f64, clip: Clip) -> Result<Self> {
        if radius <= 0.0 {
            return Err(Error::Domain(format!(
                "radius must be positive, got {radius}"
            )));
        }
        let frame = clip_frame(&clip)?;
        Ok(Self {
            kind: PatchKind::SphereCap { center, radius },
            clip,
            flip: false,
            frame,
        })
    }

    pub fn wulff_cap(norm: MinkowskiNorm, center: Vec3, radius: f64, clip: Clip) -> Result<Self> {
        if radius <= 0.0 {
            return Err(Error::Domain(format!(
                "radius must be positive, got {radius}"
            )));
        }
        let frame = clip_frame(&clip)?;
        Ok(Self {
            kind: PatchKind::WulffCap {
                norm,
                center,
                radius,
            },
            clip,
            flip: false,
            frame,
        })
    }

    pub fn perturbed_wulff(
        norm: MinkowskiNorm,
        center: Vec3,
        radius: f64,
        amplitude: f64,
        mode: (u32, u32),
        clip: Clip,
    ) -> Result<Self> {
        if radius <= 0.0 {
            return Err(Error::Domain(format!(
                "radius must be positive, got {radius}"
            )));
        }
        perturbation_mode(mode, &Vec3::z())?;
        if amplitude.abs() > 0.5 {
            return Err(Error::Domain(format!(
                "perturbation amplitude {amplitude} too large for an embedded patch"
            )));
        }
        let frame = clip_frame(&clip)?;
        Ok(Self {
            kind: PatchKind::PerturbedWulff {
                norm,
                center,
                radius,
                amplitude,
                mode,
            },
            clip,
            flip: false,
            frame,
        })
    }

    pub fn graph(
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        rect: [f64; 4],
    ) -> Result<Self> {
        if !(rect[0] < rect[1] && rect[2] < rect[3]) {
            return Err(Error::Domain(format!("empty graph rectangle {rect:?}")));
        }
        Ok(Self {
            kind: PatchKind::Graph {
                f: Arc::new(f),
                rect,
            },
            clip: Clip::None,
            flip: false,
            frame: crate::util::Mat3::identity(),
        })
    }

    /// Reverse the orientation.
    pub fn flipped(mut self) -> Self {
        self.flip = !self.flip;
        self
    }

    fn orient(&self) -> f64 {
        if self.flip {
            -1.0
        } else {
            1.0
        }
    }

    pub fn is_graph(&self) -> bool {
        matches!(self.kind, PatchKind::Graph { .. })
    }

    /// True when the patch has no boundary (an unclipped cap).
    pub fn is_closed(&self) -> bool {
        match (&self.kind, &self.clip) {
            (PatchKind::Graph { .. }, _) => false,
            (_, Clip::None) => true,
            (_, Clip::ThetaMax(t)) => *t >= PI - CLOSED_TOL,
            (_, Clip::Region(_)) => false,
        }
    }

    fn z(&self, u: f64, v: f64) -> Vec3 {
        self.frame * sphere_dir(u, v)
    }

    fn z_theta(&self, u: f64, v: f64) -> Vec3 {
        self.frame * sphere_dir_theta(u, v)
    }

    fn z_phi(&self, u: f64, v: f64) -> Vec3 {
        self.frame * sphere_dir_phi(u, v)
    }

    pub fn point(&self, u: f64, v: f64) -> Vec3 {
        match &self.kind {
            PatchKind::SphereCap { center, radius } => center + self.z(u, v) * *radius,
            PatchKind::WulffCap {
                norm,
                center,
                radius,
            } => center + norm.cahn_hoffman(&self.z(u, v)).unwrap() * *radius,
            PatchKind::PerturbedWulff {
                norm,
                center,
                radius,
                amplitude,
                mode,
            } => {
                let z = self.z(u, v);
                let (p, _) = perturbation_mode(*mode, &z).unwrap();
                center + norm.cahn_hoffman(&z).unwrap() * (radius * (1.0 + amplitude * p))
            }
            PatchKind::Graph { f, .. } => Vec3::new(u, v, f(u, v)),
        }
    }

    /// First derivatives (X_u, X_v); analytic for cap patches, central
    /// differences for graphs.
    pub fn derivs(&self, u: f64, v: f64) -> (Vec3, Vec3) {
        match &self.kind {
            PatchKind::SphereCap { radius, .. } => {
                (self.z_theta(u, v) * *radius, self.z_phi(u, v) * *radius)
            }
            PatchKind::WulffCap { norm, radius, .. } => {
                let h = norm.hessian(&self.z(u, v));
                (
                    h * self.z_theta(u, v) * *radius,
                    h * self.z_phi(u, v) * *radius,
                )
            }
            PatchKind::PerturbedWulff {
                norm,
                radius,
                amplitude,
                mode,
                ..
            } => {
                let z = self.z(u, v);
                let (p, gp) = perturbation_mode(*mode, &z).unwrap();
                let phi = norm.cahn_hoffman(&z).unwrap();
                let h = norm.hessian(&z);
                let scale = 1.0 + amplitude * p;
                let d = |zt: Vec3| (phi * (amplitude * gp.dot(&zt)) + h * zt * scale) * *radius;
                (d(self.z_theta(u, v)), d(self.z_phi(u, v)))
            }
            PatchKind::Graph { f, .. } => {
                let h = GRAPH_FD_STEP * u.abs().max(v.abs()).max(1.0);
                let fu = (f(u + h, v) - f(u - h, v)) / (2.0 * h);
                let fv = (f(u, v + h) - f(u, v - h)) / (2.0 * h);
                (Vec3::new(1.0, 0.0, fu), Vec3::new(0.0, 1.0, fv))
            }
        }
    }

    /// Oriented unit normal.
    pub fn normal(&self, u: f64, v: f64) -> Vec3 {
        let raw = match &self.kind {
            PatchKind::SphereCap { .. } | PatchKind::WulffCap { .. } => self.z(u, v),
            PatchKind::PerturbedWulff { .. } => {
                let (xu, xv) = self.derivs(u, v);
                let n = xu.cross(&xv);
                let z = self.z(u, v);
                let s = if n.dot(&z) < 0.0 { -1.0 } else { 1.0 };
                n.normalize() * s
            }
            PatchKind::Graph { .. } => {
                let (xu, xv) = self.derivs(u, v);
                xu.cross(&xv).normalize()
            }
        };
        raw * self.orient()
    }

    /// Derivatives of the oriented unit normal; analytic where the normal is
    /// the parameter direction itself, finite differences otherwise.
    fn normal_derivs(&self, u: f64, v: f64) -> (Vec3, Vec3) {
        match &self.kind {
            PatchKind::SphereCap { .. } | PatchKind::WulffCap { .. } => (
                self.z_theta(u, v) * self.orient(),
                self.z_phi(u, v) * self.orient(),
            ),
            _ => {
                let h = NORMAL_FD_STEP;
                let du = (self.normal(u + h, v) - self.normal(u - h, v)) / (2.0 * h);
                let dv = (self.normal(u, v + h) - self.normal(u, v - h)) / (2.0 * h);
                (du, dv)
            }
        }
    }

    /// Anisotropic curvature data at a parameter point, with respect to
    /// `norm`. The shape operator is assembled from first derivatives of the
    /// normal, pushed to an orthonormal tangent frame, and symmetrized; the
    /// anisotropic principal curvatures are the eigenvalues of
    /// A_F^{1/2} W A_F^{1/2} with A_F the restriction of D^2 F(nu) to the
    /// tangent plane.
    pub fn curvature(&self, norm: &MinkowskiNorm, u: f64, v: f64) -> Result<CurvatureData> {
        let x = self.point(u, v);
        let (xu, xv) = self.derivs(u, v);
        let cross = xu.cross(&xv);
        let area_element = cross.norm();
        let scale = xu.norm().max(xv.norm());
        if area_element < 1e-10 * scale * scale {
            return Err(Error::Singular(format!(
                "degenerate parametrization at ({u}, {v})"
            )));
        }
        let nu = self.normal(u, v);
        let (nu_u, nu_v) = self.normal_derivs(u, v);

        // Weingarten relation in the parameter basis: (I W)_{ij} = <X_i, nu_j>
        let gram = Matrix2::new(xu.dot(&xu), xu.dot(&xv), xu.dot(&xv), xv.dot(&xv));
        let c = Matrix2::new(xu.dot(&nu_u), xu.dot(&nu_v), xv.dot(&nu_u), xv.dot(&nu_v));
        let w_param = gram
            .try_inverse()
            .ok_or_else(|| Error::Singular("singular first fundamental form".into()))?
            * c;

        // push to the orthonormal frame t1 = X_u / |X_u|, t2 via Gram-Schmidt
        let t1 = xu.normalize();
        let t2 = (xv - t1 * xv.dot(&t1)).normalize();
        // [X_u X_v] = [t1 t2] A with A upper triangular
        let a = Matrix2::new(xu.dot(&t1), xv.dot(&t1), 0.0, xv.dot(&t2));
        let a_inv = a.try_inverse().unwrap();
        let w_ortho = a * w_param * a_inv;
        let w_sym = (w_ortho + w_ortho.transpose()) * 0.5;

        let kappa = sym2_eigenvalues(&w_sym);

        // tangential restriction of the ambient Hessian of F at the unit
        // normal; positive by the elliptic-integrand assumption
        let d2f = norm.hessian(&nu);
        let af = Matrix2::new(
            t1.dot(&(d2f * t1)),
            t1.dot(&(d2f * t2)),
            t2.dot(&(d2f * t1)),
            t2.dot(&(d2f * t2)),
        );
        let af = (af + af.transpose()) * 0.5;
        let af_eigs = sym2_eigenvalues(&af);
        if af_eigs[0] <= 0.0 {
            return Err(Error::InvalidNorm(format!(
                "tangential Hessian not positive definite at nu = {nu:?}"
            )));
        }
        let sqrt_af = sym2_sqrt(&af);
        let s = sqrt_af * w_sym * sqrt_af;
        let kappa_f = sym2_eigenvalues(&((s + s.transpose()) * 0.5));

        Ok(CurvatureData {
            x,
            nu,
            nu_f: norm.cahn_hoffman(&nu)?,
            f_of_nu: norm.value(&nu),
            kappa_f,
            kappa,
            area_element,
        })
    }

    /// Polar extent of the patch along the meridian at azimuth `phi`.
    pub fn theta_bound(&self, phi: f64) -> Result<f64> {
        match &self.clip {
            Clip::None => Ok(PI),
            Clip::ThetaMax(t) => {
                if *t <= 0.0 || *t > PI {
                    return Err(Error::Domain(format!("theta clip {t} outside (0, pi]")));
                }
                Ok(*t)
            }
            Clip::Region(region) => {
                let g = |theta: f64| region.barrier(&self.point(theta, phi));
                if g(1e-9) <= 0.0 {
                    return Err(Error::Geometry(
                        "patch pole lies outside the clip region".into(),
                    ));
                }
                let steps = 256;
                for k in 1..=steps {
                    let t = PI * k as f64 / steps as f64;
                    if g(t) <= 0.0 {
                        let a = PI * (k - 1) as f64 / steps as f64;
                        return Ok(brent_root(g, a.max(1e-9), t, 1e-13));
                    }
                }
                Ok(PI)
            }
        }
    }

    /// Azimuth panels on which the clipped polar bound varies smoothly;
    /// breaks occur only for polyhedral clip regions, at azimuths where the
    /// terminating face changes.
    fn azimuth_panels(&self) -> Result<Vec<(f64, f64)>> {
        let region = match &self.clip {
            Clip::Region(region) if matches!(region.kind(), RegionKind::PolyhedralCone { .. }) => {
                region
            }
            _ => return Ok(vec![(0.0, 2.0 * PI)]),
        };
        let normals = match region.kind() {
            RegionKind::PolyhedralCone { normals } => normals.clone(),
            _ => unreachable!(),
        };
        let active_face = |phi: f64| -> Result<Option<usize>> {
            let tb = self.theta_bound(phi)?;
            if tb >= PI - CLOSED_TOL {
                return Ok(None);
            }
            let x = self.point(tb, phi) - region.anchor();
            let best = normals
                .iter()
                .enumerate()
                .min_by(|(_, m), (_, n)| x.dot(m).abs().partial_cmp(&x.dot(n).abs()).unwrap())
                .map(|(i, _)| i);
            Ok(best)
        };
        let samples = 720;
        let mut cuts = Vec::new();
        for k in 0..samples {
            let a = 2.0 * PI * k as f64 / samples as f64;
            let b = 2.0 * PI * (k + 1) as f64 / samples as f64;
            if active_face(a)? != active_face(b)? {
                let (mut lo, mut hi) = (a, b);
                let target = active_face(a)?;
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if active_face(mid)? == target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                cuts.push(0.5 * (lo + hi));
            }
        }
        if cuts.is_empty() {
            return Ok(vec![(0.0, 2.0 * PI)]);
        }
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut panels = Vec::new();
        for w in cuts.windows(2) {
            panels.push((w[0], w[1]));
        }
        panels.push((cuts[cuts.len() - 1], cuts[0] + 2.0 * PI));
        Ok(panels)
    }

    /// Gauss-Legendre quadrature samples over the patch. `order` is the
    /// polar (resp. u) node count; the azimuth direction uses 2 * order.
    pub fn samples(&self, order: usize) -> Result<Vec<SurfaceSample>> {
        let mut out = Vec::new();
        match &self.kind {
            PatchKind::Graph { rect, .. } => {
                for &(u, wu) in &gauss_legendre_on(order, rect[0], rect[1]) {
                    for &(v, wv) in &gauss_legendre_on(order, rect[2], rect[3]) {
                        let (xu, xv) = self.derivs(u, v);
                        out.push(SurfaceSample {
                            uv: [u, v],
                            x: self.point(u, v),
                            nu: self.normal(u, v),
                            weight: wu * wv * xu.cross(&xv).norm(),
                        });
                    }
                }
            }
            _ => {
                for (a, b) in self.azimuth_panels()? {
                    for &(phi, wphi) in &gauss_legendre_on(2 * order, a, b) {
                        let tmax = self.theta_bound(phi)?;
                        for &(theta, wtheta) in &gauss_legendre_on(order, 0.0, tmax) {
                            let (xu, xv) = self.derivs(theta, phi);
                            out.push(SurfaceSample {
                                uv: [theta, phi],
                                x: self.point(theta, phi),
                                nu: self.normal(theta, phi),
                                weight: wphi * wtheta * xu.cross(&xv).norm(),
                            });
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Integrate a pointwise quantity over the patch.
    pub fn integrate(&self, order: usize, mut f: impl FnMut(&SurfaceSample) -> f64) -> Result<f64> {
        let mut acc = KahanSum::new();
        for s in self.samples(order)? {
            let v = f(&s);
            if !v.is_finite() {
                return Err(Error::Numerical {
                    msg: format!("non-finite integrand at uv = {:?}", s.uv),
                    best: acc.value(),
                });
            }
            acc.add(v * s.weight);
        }
        Ok(acc.value())
    }

    pub fn area(&self, order: usize) -> Result<f64> {
        self.integrate(order, |_| 1.0)
    }

    /// Boundary point at azimuth `phi` (cap patches with a clip).
    pub fn boundary_point(&self, phi: f64) -> Result<Vec3> {
        if self.is_closed() || self.is_graph() {
            return Err(Error::Geometry(
                "patch has no clipped boundary curve".into(),
            ));
        }
        Ok(self.point(self.theta_bound(phi)?, phi))
    }

    /// Uniformly spaced boundary parameter pairs (theta_b(phi), phi).
    pub fn boundary_params(&self, count: usize) -> Result<Vec<[f64; 2]>> {
        if self.is_closed() || self.is_graph() {
            return Err(Error::Geometry(
                "patch has no clipped boundary curve".into(),
            ));
        }
        (0..count)
            .map(|j| {
                let phi = 2.0 * PI * j as f64 / count as f64;
                Ok([self.theta_bound(phi)?, phi])
            })
            .collect()
    }

    /// Area enclosed by the boundary curve projected to the x1-x2 plane, by
    /// Green's theorem over the (periodic) azimuth parameter.
    pub fn footprint_area(&self, count: usize) -> Result<f64> {
        if self.is_closed() || self.is_graph() {
            return Err(Error::Geometry(
                "patch has no clipped boundary curve".into(),
            ));
        }
        let h = 1e-6;
        let curve = |phi: f64| -> Result<(f64, f64)> {
            let p = self.boundary_point(phi)?;
            Ok((p.x, p.y))
        };
        let mut acc = KahanSum::new();
        for j in 0..count {
            let phi = 2.0 * PI * j as f64 / count as f64;
            let (x, y) = curve(phi)?;
            let (xp, yp) = curve(phi + h)?;
            let (xm, ym) = curve(phi - h)?;
            let dx = (xp - xm) / (2.0 * h);
            let dy = (yp - ym) / (2.0 * h);
            acc.add(0.5 * (x * dy - y * dx));
        }
        Ok((acc.value() * 2.0 * PI / count as f64).abs())
    }
}

/// Contact data sampled along the clipped boundary of a patch lying on the
/// regular part of a region's boundary.
#[derive(Debug, Clone)]
pub struct BoundarySample {
    pub x: Vec3,
    pub nu: Vec3,
    pub nu_f: Vec3,
    /// Region outward normal at x.
    pub n_bar: Vec3,
    /// <nu_F, N_bar>.
    pub contact: f64,
    /// omega = <nu_F, -E3> (meaningful in half-space scenarios).
    pub omega: f64,
}

#[derive(Debug, Clone)]
pub struct BoundaryTrace {
    pub samples: Vec<BoundarySample>,
    pub min_contact: f64,
    pub min_omega: f64,
    pub max_omega: f64,
    /// False when some sample is tangential (|<nu, N_bar>| within 1e-6 of 1).
    pub transversal: bool,
}

/// Sample the boundary curve of `patch` on the boundary of `region` and
/// collect the contact quantities entering the theorems' hypotheses.
pub fn boundary_trace(
    norm: &MinkowskiNorm,
    patch: &SurfacePatch,
    region: &ConvexRegion,
    count: usize,
) -> Result<BoundaryTrace> {
    if count < 8 {
        return Err(Error::Domain(format!(
            "need at least 8 boundary samples, got {count}"
        )));
    }
    let mut samples = Vec::with_capacity(count);
    let mut min_contact = f64::INFINITY;
    let mut min_omega = f64::INFINITY;
    let mut max_omega = f64::NEG_INFINITY;
    let mut transversal = true;
    for p in patch.boundary_params(count)? {
        let x = patch.point(p[0], p[1]);
        let nu = patch.normal(p[0], p[1]);
        let n_bar = region.boundary_normal(&x)?;
        let nu_f = norm.cahn_hoffman(&nu)?;
        let contact = nu_f.dot(&n_bar);
        let omega = -nu_f.z;
        if nu.dot(&n_bar).abs() >= 1.0 - 1e-6 {
            transversal = false;
        }
        min_contact = min_contact.min(contact);
        min_omega = min_omega.min(omega);
        max_omega = max_omega.max(omega);
        samples.push(BoundarySample {
            x,
            nu,
            nu_f,
            n_bar,
            contact,
            omega,
        });
    }
    Ok(BoundaryTrace {
        samples,
        min_contact,
        min_omega,
        max_omega,
        transversal,
    })
}

/// Eigenvalues of a symmetric 2x2 matrix, ascending.
fn sym2_eigenvalues(m: &Matrix2<f64>) -> [f64; 2] {
    let mean = 0.5 * (m[(0, 0)] + m[(1, 1)]);
    let half_diff = 0.5 * (m[(0, 0)] - m[(1, 1)]);
    let r = (half_diff * half_diff + m[(0, 1)] * m[(0, 1)]).sqrt();
    [mean - r, mean + r]
}

/// Principal square root of a symmetric positive definite 2x2 matrix:
/// sqrt(M) = (M + sqrt(det) I) / sqrt(tr + 2 sqrt(det)).
fn sym2_sqrt(m: &Matrix2<f64>) -> Matrix2<f64> {
    let s = m.determinant().sqrt();
    let t = (m.trace() + 2.0 * s).sqrt();
    (m + Matrix2::identity() * s) / t
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn euclid() -> MinkowskiNorm {
        MinkowskiNorm::euclidean()
    }

    #[test]
    fn sphere_area_and_volume_flux() {
        let s = SurfacePatch::sphere_cap(Vec3::zeros(), 1.0, Clip::None).unwrap();
        assert_relative_eq!(s.area(24).unwrap(), 4.0 * PI, epsilon = 1e-11);
        let vol = s.integrate(24, |smp| smp.x.dot(&smp.nu) / 3.0).unwrap();
        assert_relative_eq!(vol, 4.0 * PI / 3.0, epsilon = 1e-11);
    }

    #[test]
    fn tilted_halfspace_clip_gives_hemisphere() {
        // plane through the center: exactly half the area, for any tilt
        let region = ConvexRegion::half_space(Vec3::new(0.3, -0.1, 1.0)).unwrap();
        let s = SurfacePatch::sphere_cap(Vec3::zeros(), 1.0, Clip::Region(region)).unwrap();
        assert_relative_eq!(s.area(48).unwrap(), 2.0 * PI, epsilon = 1e-9);
    }

    #[test]
    fn capillary_cap_area_and_footprint() {
        let theta0 = PI / 3.0;
        let region = ConvexRegion::half_space(Vec3::z()).unwrap();
        let s = SurfacePatch::sphere_cap(
            Vec3::new(0.0, 0.0, -theta0.cos()),
            1.0,
            Clip::Region(region),
        )
        .unwrap();
        assert_relative_eq!(
            s.area(48).unwrap(),
            2.0 * PI * (1.0 - theta0.cos()),
            epsilon = 1e-9
        );
        assert_relative_eq!(
            s.footprint_area(512).unwrap(),
            PI * theta0.sin().powi(2),
            epsilon = 1e-9
        );
        // constant contact angle along the boundary
        for p in s.boundary_params(32).unwrap() {
            let nu = s.normal(p[0], p[1]);
            assert_relative_eq!(nu.z, theta0.cos(), epsilon = 1e-9);
        }
    }

    #[test]
    fn sphere_curvature_is_inverse_radius() {
        let s = SurfacePatch::sphere_cap(Vec3::new(0.2, -0.4, 1.0), 2.5, Clip::None).unwrap();
        let d = s.curvature(&euclid(), 1.1, 2.3).unwrap();
        assert_relative_eq!(d.kappa[0], 0.4, epsilon = 1e-12);
        assert_relative_eq!(d.kappa[1], 0.4, epsilon = 1e-12);
        assert_relative_eq!(d.kappa_f[0], 0.4, epsilon = 1e-12);
        assert_relative_eq!(d.h_f(), 0.4, epsilon = 1e-12);
        // flipped orientation negates curvatures
        let d = s.clone().flipped().curvature(&euclid(), 1.1, 2.3).unwrap();
        assert_relative_eq!(d.kappa[1], -0.4, epsilon = 1e-12);
    }

    #[test]
    fn wulff_cap_is_umbilic_for_its_norm() {
        let m = crate::util::Mat3::from_diagonal(&Vec3::new(1.0, 2.5, 0.7));
        let norm = MinkowskiNorm::ellipsoidal(m).unwrap();
        let s = SurfacePatch::wulff_cap(norm.clone(), Vec3::new(0.1, 0.0, -0.2), 2.0, Clip::None)
            .unwrap();
        for (u, v) in [(0.7, 0.3), (1.4, 2.0), (2.6, 5.1), (0.2, 4.4)] {
            let d = s.curvature(&norm, u, v).unwrap();
            assert_relative_eq!(d.kappa_f[0], 0.5, epsilon = 1e-7);
            assert_relative_eq!(d.kappa_f[1], 0.5, epsilon = 1e-7);
        }
        // classical curvatures differ on a genuinely anisotropic Wulff shape
        let d = s.curvature(&norm, 0.7, 0.3).unwrap();
        assert!((d.kappa[0] - d.kappa[1]).abs() > 1e-3);
    }

    #[test]
    fn capillary_wulff_sphere_matches_translated_ball() {
        let norm = MinkowskiNorm::capillary(2.0 * PI / 5.0).unwrap();
        let s = SurfacePatch::wulff_cap(norm.clone(), Vec3::zeros(), 1.0, Clip::None).unwrap();
        // the Cahn-Hoffman image of the capillary norm is the unit sphere
        // centered at -cos(theta0) E3
        let c = Vec3::new(0.0, 0.0, -(2.0 * PI / 5.0).cos());
        for (u, v) in [(0.3, 1.0), (1.9, 4.2)] {
            let x = s.point(u, v);
            assert_relative_eq!((x - c).norm(), 1.0, epsilon = 1e-12);
            let d = s.curvature(&norm, u, v).unwrap();
            assert_relative_eq!(d.kappa_f[0], 1.0, epsilon = 1e-9);
            assert_relative_eq!(d.kappa_f[1], 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn graph_saddle_and_paraboloid_curvatures() {
        let saddle =
            SurfacePatch::graph(|x, y| 0.5 * (x * x - y * y), [-1.0, 1.0, -1.0, 1.0]).unwrap();
        let d = saddle.curvature(&euclid(), 0.0, 0.0).unwrap();
        assert_relative_eq!(d.kappa[0], -1.0, epsilon = 1e-5);
        assert_relative_eq!(d.kappa[1], 1.0, epsilon = 1e-5);
        assert_relative_eq!(d.h_f(), 0.0, epsilon = 1e-5);

        let bowl =
            SurfacePatch::graph(|x, y| 0.5 * (x * x + y * y), [-1.0, 1.0, -1.0, 1.0]).unwrap();
        // upward normal makes a bowl concave from the normal's side
        let d = bowl.curvature(&euclid(), 0.0, 0.0).unwrap();
        assert_relative_eq!(d.kappa[0], -1.0, epsilon = 1e-5);
        assert_relative_eq!(d.kappa[1], -1.0, epsilon = 1e-5);
    }

    #[test]
    fn perturbed_patch_reduces_to_wulff_at_zero_amplitude() {
        let norm = MinkowskiNorm::capillary(PI / 4.0).unwrap();
        let p = SurfacePatch::perturbed_wulff(
            norm.clone(),
            Vec3::zeros(),
            1.3,
            0.0,
            (2, 0),
            Clip::None,
        )
        .unwrap();
        let w = SurfacePatch::wulff_cap(norm.clone(), Vec3::zeros(), 1.3, Clip::None).unwrap();
        for (u, v) in [(0.4, 0.9), (2.2, 3.3)] {
            assert_relative_eq!(p.point(u, v), w.point(u, v), epsilon = 1e-14);
            let dp = p.curvature(&norm, u, v).unwrap();
            assert_relative_eq!(dp.kappa_f[0], 1.0 / 1.3, epsilon = 1e-7);
            assert_relative_eq!(dp.kappa_f[1], 1.0 / 1.3, epsilon = 1e-7);
        }
    }

    #[test]
    fn perturbed_sphere_against_radial_oracle() {
        // rho(z) = r (1 + a z3^2): closed-form area element via the radial
        // graph formula dA = rho sqrt(rho^2 + |grad_T rho|^2) dsigma
        let r = 1.0;
        let a = 0.1;
        let p = SurfacePatch::perturbed_wulff(euclid(), Vec3::zeros(), r, a, (2, 0), Clip::None)
            .unwrap();
        let area = p.area(48).unwrap();
        let mut oracle = KahanSum::new();
        for &(theta, wt) in &gauss_legendre_on(96, 0.0, PI) {
            let z3 = theta.cos();
            let rho = r * (1.0 + a * z3 * z3);
            let drho_dtheta = r * a * 2.0 * z3 * (-theta.sin());
            let integrand = rho * (rho * rho + drho_dtheta * drho_dtheta).sqrt() * theta.sin();
            oracle.add(wt * integrand * 2.0 * PI);
        }
        assert_relative_eq!(area, oracle.value(), epsilon = 1e-9 * oracle.value());
    }

    #[test]
    fn cone_clip_area() {
        // spherical cap inside a coaxial cone: area 2 pi (1 - cos alpha)
        let alpha = 0.8;
        let cone = ConvexRegion::circular_cone(Vec3::z(), alpha).unwrap();
        let s = SurfacePatch::sphere_cap(Vec3::zeros(), 1.0, Clip::Region(cone)).unwrap();
        assert_relative_eq!(
            s.area(32).unwrap(),
            2.0 * PI * (1.0 - alpha.cos()),
            epsilon = 1e-10
        );
    }

    #[test]
    fn wedge_clip_area() {
        // quarter sphere inside the wedge {x3 >= 0} ∩ {x1 >= 0}
        let wedge = ConvexRegion::wedge(-Vec3::z(), -Vec3::x()).unwrap();
        let s = SurfacePatch::sphere_cap(Vec3::zeros(), 1.0, Clip::Region(wedge)).unwrap();
        assert_relative_eq!(s.area(48).unwrap(), PI, epsilon = 1e-9);
    }
}
