//! Assembles both sides of the Willmore-type inequalities, checks their
//! hypotheses, detects equality cases with a Wulff-fit rigidity probe, and
//! validates the supporting integral identities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minkowski::MinkowskiNorm;
use crate::regions::{wulff_cone_volume, wulff_halfspace_volume, ConvexRegion, RegionKind};
use crate::surfaces::{boundary_trace, Clip, SurfacePatch};
use crate::util::Vec3;

/// Which inequality a scenario verifies. Half-space variants carry their
/// contact parameter.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "theorem", rename_all = "snake_case")]
pub enum TheoremTag {
    /// Euclidean Willmore inequality in an unbounded convex region.
    IsoConvex,
    /// Anisotropic version in an unbounded convex region.
    AnisoConvex,
    /// Capillary hypersurface in the upper half-space, contact angle theta0.
    CapillaryHalfspace { theta0: f64 },
    /// Anisotropic omega0-capillary hypersurface in the upper half-space.
    AnisoCapillaryHalfspace { omega0: f64 },
    /// Anisotropic free-boundary hypersurface in the upper half-space.
    AnisoFreeBoundary,
    /// The primed half-space variant whose right side is a weighted
    /// boundary-area integral instead of a volume.
    VariantPrime { omega0: f64 },
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub norm: MinkowskiNorm,
    pub region: ConvexRegion,
    pub surface: SurfacePatch,
    pub tag: TheoremTag,
    pub order: usize,
    pub tol: f64,
    pub seed: u64,
    pub boundary_samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Equality,
    Fail,
    HypothesisFailed,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HypothesisChecks {
    /// min <nu_F, N_bar> over boundary samples (convex-region scenarios).
    pub boundary_contact_min: Option<f64>,
    /// min/max of omega = <nu_F, -E3> over the boundary (half-space
    /// scenarios) and the scenario's omega0.
    pub omega_min: Option<f64>,
    pub omega_max: Option<f64>,
    pub omega0: Option<f64>,
    pub transversal: bool,
    pub region_consistent: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RigidityProbe {
    pub center: [f64; 3],
    pub radius: f64,
    /// Root-mean-square residual of F°(x - center) - radius over samples.
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub order: usize,
    pub boundary_samples: usize,
    pub tol: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub scenario: String,
    pub status: Status,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub relative_margin: f64,
    pub equality: bool,
    pub hypotheses: HypothesisChecks,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rigidity: Option<RigidityProbe>,
    pub provenance: Provenance,
}

/// The norm whose curvatures and weight enter the left-hand side of the
/// tagged inequality, together with the omega0 threshold for half-space
/// boundary hypotheses.
pub fn effective_norm(
    base: &MinkowskiNorm,
    tag: &TheoremTag,
) -> Result<(MinkowskiNorm, Option<f64>)> {
    match tag {
        TheoremTag::IsoConvex | TheoremTag::AnisoConvex => Ok((base.clone(), None)),
        TheoremTag::CapillaryHalfspace { theta0 } => {
            Ok((MinkowskiNorm::capillary(*theta0)?, Some(-theta0.cos())))
        }
        TheoremTag::AnisoCapillaryHalfspace { omega0 } => {
            let (tilted, _) = base.tilt(*omega0)?;
            Ok((tilted, Some(*omega0)))
        }
        TheoremTag::AnisoFreeBoundary => Ok((base.clone(), Some(0.0))),
        TheoremTag::VariantPrime { omega0 } => {
            base.tilt(*omega0)?; // range check
            Ok((base.clone(), Some(*omega0)))
        }
    }
}

/// Left-hand side (1/(n+1)) ∫_Σ F(ν) |H^F|^n dA for n = 2, with the
/// effective norm supplying both the weight and the curvatures.
pub fn willmore_lhs(norm: &MinkowskiNorm, surface: &SurfacePatch, order: usize) -> Result<f64> {
    let mut err: Option<Error> = None;
    let value = surface.integrate(order, |s| match surface.curvature(norm, s.uv[0], s.uv[1]) {
        Ok(d) => d.f_of_nu * d.h_f() * d.h_f(),
        Err(e) => {
            err.get_or_insert(e);
            f64::NAN
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(value? / 3.0)
}

/// Right-hand side of the tagged inequality.
pub fn willmore_rhs(
    base: &MinkowskiNorm,
    region: &ConvexRegion,
    tag: &TheoremTag,
    order: usize,
) -> Result<f64> {
    match tag {
        TheoremTag::IsoConvex | TheoremTag::AnisoConvex => {
            wulff_cone_volume(base, &region.tangent_cone_at_infinity(), 1.0, order)
        }
        TheoremTag::CapillaryHalfspace { theta0 } => {
            wulff_halfspace_volume(&MinkowskiNorm::capillary(*theta0)?, &Vec3::zeros(), order)
        }
        TheoremTag::AnisoCapillaryHalfspace { omega0 } => {
            let (tilted, _) = base.tilt(*omega0)?;
            wulff_halfspace_volume(&tilted, &Vec3::zeros(), order)
        }
        TheoremTag::AnisoFreeBoundary => wulff_halfspace_volume(base, &Vec3::zeros(), order),
        TheoremTag::VariantPrime { omega0 } => {
            let (tilted, _) = base.tilt(*omega0)?;
            let upper = ConvexRegion::half_space(Vec3::z())?;
            let cap = SurfacePatch::wulff_cap(tilted, Vec3::zeros(), 1.0, Clip::Region(upper))?;
            let base = base.clone();
            Ok(cap.integrate(order, |s| base.value(&s.nu))? / 3.0)
        }
    }
}

fn region_consistent(region: &ConvexRegion, tag: &TheoremTag) -> bool {
    match tag {
        TheoremTag::IsoConvex | TheoremTag::AnisoConvex => true,
        _ => match region.kind() {
            RegionKind::HalfSpace { inward } => (inward - Vec3::z()).norm() < 1e-12,
            _ => false,
        },
    }
}

fn hypothesis_checks(
    sc: &Scenario,
    eff: &MinkowskiNorm,
    omega0: Option<f64>,
) -> Result<HypothesisChecks> {
    let consistent = region_consistent(&sc.region, &sc.tag);
    if sc.surface.is_closed() {
        // closed surface: boundary hypotheses hold vacuously, but only the
        // full space admits a closed Sigma with boundary on the region edge
        let passed = consistent && matches!(sc.region.kind(), RegionKind::FullSpace);
        return Ok(HypothesisChecks {
            boundary_contact_min: None,
            omega_min: None,
            omega_max: None,
            omega0: None,
            transversal: true,
            region_consistent: consistent,
            passed,
        });
    }
    let tol = sc.tol;
    match &sc.tag {
        TheoremTag::IsoConvex | TheoremTag::AnisoConvex => {
            let trace = boundary_trace(eff, &sc.surface, &sc.region, sc.boundary_samples)?;
            let passed = consistent && trace.transversal && trace.min_contact >= -tol;
            Ok(HypothesisChecks {
                boundary_contact_min: Some(trace.min_contact),
                omega_min: None,
                omega_max: None,
                omega0: None,
                transversal: trace.transversal,
                region_consistent: consistent,
                passed,
            })
        }
        _ => {
            // half-space scenarios: omega(x) = <Phi_base(nu), -E3> >= omega0
            let trace = boundary_trace(&sc.norm, &sc.surface, &sc.region, sc.boundary_samples)?;
            let w0 = omega0.unwrap_or(0.0);
            let (lo, hi) = sc.norm.omega_range();
            let range_ok = w0 > lo && w0 < hi;
            let passed = consistent && trace.transversal && range_ok && trace.min_omega >= w0 - tol;
            Ok(HypothesisChecks {
                boundary_contact_min: None,
                omega_min: Some(trace.min_omega),
                omega_max: Some(trace.max_omega),
                omega0: Some(w0),
                transversal: trace.transversal,
                region_consistent: consistent,
                passed,
            })
        }
    }
}

/// Least-squares fit of a Wulff shape F°(x - c) = r to surface samples by
/// Gauss-Newton with a finite-difference Jacobian and multi-start centers.
pub fn wulff_fit(norm: &MinkowskiNorm, points: &[Vec3]) -> Result<RigidityProbe> {
    if points.len() < 8 {
        return Err(Error::Domain("wulff_fit needs at least 8 points".into()));
    }
    let centroid: Vec3 = points.iter().sum::<Vec3>() / points.len() as f64;
    let spread = points
        .iter()
        .map(|p| (p - centroid).norm())
        .fold(0.0_f64, f64::max);
    let mut starts = vec![centroid];
    for axis in [Vec3::x(), Vec3::y(), Vec3::z()] {
        starts.push(centroid + axis * 0.5 * spread);
        starts.push(centroid - axis * 0.5 * spread);
    }
    let rms = |c: &Vec3, r: f64| -> f64 {
        let s: f64 = points
            .iter()
            .map(|p| {
                let d = norm.dual(&(p - c)) - r;
                d * d
            })
            .sum();
        (s / points.len() as f64).sqrt()
    };
    let mut best: Option<RigidityProbe> = None;
    for start in starts {
        let mut c = start;
        let mut r = points.iter().map(|p| norm.dual(&(p - c))).sum::<f64>() / points.len() as f64;
        for _ in 0..100 {
            // normal equations for the step in (c, r)
            let mut jtj = nalgebra::Matrix4::<f64>::zeros();
            let mut jtr = nalgebra::Vector4::<f64>::zeros();
            let h = 1e-6 * r.max(1.0);
            for p in points {
                let f0 = norm.dual(&(p - c)) - r;
                let mut row = nalgebra::Vector4::<f64>::zeros();
                for k in 0..3 {
                    let mut dc = Vec3::zeros();
                    dc[k] = h;
                    row[k] = (norm.dual(&(p - (c + dc))) - norm.dual(&(p - (c - dc)))) / (2.0 * h);
                }
                row[3] = -1.0;
                jtj += row * row.transpose();
                jtr += row * f0;
            }
            jtj += nalgebra::Matrix4::identity() * 1e-12;
            let step = match jtj.try_inverse() {
                Some(inv) => inv * jtr,
                None => break,
            };
            c -= Vec3::new(step[0], step[1], step[2]);
            r -= step[3];
            if step.norm() < 1e-12 * r.abs().max(1.0) {
                break;
            }
        }
        if r <= 0.0 {
            continue;
        }
        let residual = rms(&c, r);
        if best.as_ref().map_or(true, |b| residual < b.residual) {
            best = Some(RigidityProbe {
                center: [c.x, c.y, c.z],
                radius: r,
                residual,
            });
        }
    }
    best.ok_or_else(|| Error::Numerical {
        msg: "Wulff fit did not converge from any start".into(),
        best: f64::NAN,
    })
}

/// Run the full pipeline for one scenario.
pub fn verify(sc: &Scenario) -> Result<VerificationReport> {
    let (eff, omega0) = effective_norm(&sc.norm, &sc.tag)?;
    let hypotheses = hypothesis_checks(sc, &eff, omega0)?;
    let lhs = willmore_lhs(&eff, &sc.surface, sc.order)?;
    let rhs = willmore_rhs(&sc.norm, &sc.region, &sc.tag, sc.order)?;
    let margin = lhs - rhs;
    let relative_margin = margin / rhs.abs().max(f64::MIN_POSITIVE);
    let equality = hypotheses.passed && relative_margin.abs() <= sc.tol;
    let rigidity = if equality {
        let fit_norm = match &sc.tag {
            // equality surfaces are Wulff shapes of the effective norm
            TheoremTag::VariantPrime { omega0 } => sc.norm.tilt(*omega0)?.0,
            _ => eff.clone(),
        };
        let points: Vec<Vec3> = sc
            .surface
            .samples(sc.order.min(16))?
            .iter()
            .map(|s| s.x)
            .collect();
        Some(wulff_fit(&fit_norm, &points)?)
    } else {
        None
    };
    let status = if !hypotheses.passed {
        Status::HypothesisFailed
    } else if relative_margin >= -sc.tol {
        if equality {
            Status::Equality
        } else {
            Status::Pass
        }
    } else {
        Status::Fail
    };
    Ok(VerificationReport {
        scenario: sc.name.clone(),
        status,
        lhs,
        rhs,
        margin,
        relative_margin,
        equality,
        hypotheses,
        rigidity,
        provenance: Provenance {
            order: sc.order,
            boundary_samples: sc.boundary_samples,
            tol: sc.tol,
            seed: sc.seed,
        },
    })
}

/// Residuals of the divergence-theorem identities relating the weighted
/// area of a clipped Wulff boundary to the enclosed volume:
/// ∫ F(ν) dA = 3 |W^F ∩ upper half-space| and its omega0-tilted version.
pub fn identity_area_volume(norm: &MinkowskiNorm, omega0: f64, order: usize) -> Result<(f64, f64)> {
    let upper = ConvexRegion::half_space(Vec3::z())?;
    let plain_cap = SurfacePatch::wulff_cap(
        norm.clone(),
        Vec3::zeros(),
        1.0,
        Clip::Region(upper.clone()),
    )?;
    let n = norm.clone();
    let area_side = plain_cap.integrate(order, |s| n.value(&s.nu))?;
    let vol_side = 3.0 * wulff_halfspace_volume(norm, &Vec3::zeros(), order)?;
    let res1 = (area_side - vol_side).abs() / vol_side.abs().max(f64::MIN_POSITIVE);

    let (tilted, cap_vec) = norm.tilt(omega0)?;
    let tilted_cap =
        SurfacePatch::wulff_cap(tilted.clone(), Vec3::zeros(), 1.0, Clip::Region(upper))?;
    let n = norm.clone();
    let e_f = cap_vec.e_f;
    let area_side = tilted_cap.integrate(order, |s| n.value(&s.nu) + omega0 * s.nu.dot(&e_f))?;
    let vol_side = 3.0 * wulff_halfspace_volume(&tilted, &Vec3::zeros(), order)?;
    let res2 = (area_side - vol_side).abs() / vol_side.abs().max(f64::MIN_POSITIVE);
    Ok((res1, res2))
}

/// Residual of the flux identity ∫_Σ <ν, E^F> dA = footprint area, for a
/// half-space patch whose boundary lies in the plane x3 = 0.
pub fn identity_flux(surface: &SurfacePatch, e_f: &Vec3, order: usize) -> Result<f64> {
    let flux = surface.integrate(order, |s| s.nu.dot(e_f))?;
    let footprint = surface.footprint_area(1024)?;
    Ok((flux - footprint).abs() / footprint.abs().max(f64::MIN_POSITIVE))
}
