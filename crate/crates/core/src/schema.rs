//! On-disk configuration schema: serde DTOs for norms, regions, surfaces,
//! scenarios, and suites, with builders into the domain types.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minkowski::{MinkowskiNorm, SphereGrid};
use crate::regions::ConvexRegion;
use crate::surfaces::{Clip, SurfacePatch};
use crate::util::{Mat3, Vec3};
use crate::verifier::{Scenario, TheoremTag};

fn vec3(a: [f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

/// Norm sub-schema, e.g. `{"family": "capillary", "theta0": 1.047}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum NormSpec {
    Euclidean,
    Capillary {
        theta0: f64,
    },
    Ellipsoidal {
        matrix: [[f64; 3]; 3],
    },
    Tilted {
        base: Box<NormSpec>,
        omega0: f64,
    },
    /// Values tabulated on a sphere grid, loaded from a CSV of
    /// (z1, z2, z3, F) rows; `path` is resolved against the config file.
    Sampled {
        path: String,
    },
}

impl NormSpec {
    pub fn build(&self, base_dir: &Path) -> Result<MinkowskiNorm> {
        match self {
            NormSpec::Euclidean => Ok(MinkowskiNorm::euclidean()),
            NormSpec::Capillary { theta0 } => MinkowskiNorm::capillary(*theta0),
            NormSpec::Ellipsoidal { matrix } => {
                let m = Mat3::from_fn(|i, j| matrix[i][j]);
                MinkowskiNorm::ellipsoidal(m)
            }
            NormSpec::Tilted { base, omega0 } => {
                let b = base.build(base_dir)?;
                Ok(b.tilt(*omega0)?.0)
            }
            NormSpec::Sampled { path } => {
                let p = Path::new(path);
                let resolved = if p.is_absolute() {
                    p.to_path_buf()
                } else {
                    base_dir.join(p)
                };
                Ok(MinkowskiNorm::sampled(SphereGrid::from_csv(&resolved)?))
            }
        }
    }
}

/// Region sub-schema, e.g.
/// `{"kind": "circular_cone", "axis": [0,0,1], "half_angle": 0.785}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegionKindSpec {
    FullSpace,
    /// Inward unit normal: the region is `<x - anchor, normal> >= 0`.
    HalfSpace {
        normal: [f64; 3],
    },
    CircularCone {
        axis: [f64; 3],
        half_angle: f64,
    },
    /// Outward face normals.
    PolyhedralCone {
        normals: Vec<[f64; 3]>,
    },
    Wedge {
        normals: [[f64; 3]; 2],
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegionSpec {
    #[serde(flatten)]
    pub kind: RegionKindSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<[f64; 3]>,
}

impl RegionSpec {
    pub fn build(&self) -> Result<ConvexRegion> {
        let region = match &self.kind {
            RegionKindSpec::FullSpace => ConvexRegion::full_space(),
            RegionKindSpec::HalfSpace { normal } => ConvexRegion::half_space(vec3(*normal))?,
            RegionKindSpec::CircularCone { axis, half_angle } => {
                ConvexRegion::circular_cone(vec3(*axis), *half_angle)?
            }
            RegionKindSpec::PolyhedralCone { normals } => {
                ConvexRegion::polyhedral_cone(normals.iter().map(|n| vec3(*n)).collect())?
            }
            RegionKindSpec::Wedge { normals } => {
                ConvexRegion::wedge(vec3(normals[0]), vec3(normals[1]))?
            }
        };
        Ok(match self.anchor {
            Some(a) => region.with_anchor(vec3(a)),
            None => region,
        })
    }
}

/// Clip sub-schema: `"none"`, `"upper_halfspace"`, `"region"` (the scenario
/// region), or `{"theta_max": 1.2}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ClipSpec {
    Named(String),
    ThetaMax { theta_max: f64 },
}

impl Default for ClipSpec {
    fn default() -> Self {
        ClipSpec::Named("none".into())
    }
}

impl ClipSpec {
    fn build(&self, region: &ConvexRegion) -> Result<Clip> {
        match self {
            ClipSpec::Named(s) => match s.as_str() {
                "none" => Ok(Clip::None),
                "upper_halfspace" => Ok(Clip::Region(ConvexRegion::half_space(Vec3::new(
                    0.0, 0.0, 1.0,
                ))?)),
                "region" => Ok(Clip::Region(region.clone())),
                other => Err(Error::Schema(format!(
                    "unknown clip '{other}' (expected none | upper_halfspace | region)"
                ))),
            },
            ClipSpec::ThetaMax { theta_max } => Ok(Clip::ThetaMax(*theta_max)),
        }
    }
}

/// Surface sub-schema, e.g. `{"kind": "sphere_cap", "radius": 1.0,
/// "center": [0,0,-0.5], "clip": "upper_halfspace"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SurfaceSpec {
    SphereCap {
        radius: f64,
        center: [f64; 3],
        #[serde(default)]
        clip: ClipSpec,
        #[serde(default)]
        flip: bool,
    },
    WulffCap {
        radius: f64,
        center: [f64; 3],
        #[serde(default)]
        clip: ClipSpec,
        #[serde(default)]
        flip: bool,
    },
    PerturbedWulff {
        radius: f64,
        center: [f64; 3],
        amplitude: f64,
        /// Spherical-harmonic-style index pair selecting the bump profile.
        mode: [u32; 2],
        #[serde(default)]
        clip: ClipSpec,
        #[serde(default)]
        flip: bool,
    },
}

impl SurfaceSpec {
    pub fn center(&self) -> Vec3 {
        match self {
            SurfaceSpec::SphereCap { center, .. }
            | SurfaceSpec::WulffCap { center, .. }
            | SurfaceSpec::PerturbedWulff { center, .. } => vec3(*center),
        }
    }

    pub fn build(&self, norm: &MinkowskiNorm, region: &ConvexRegion) -> Result<SurfacePatch> {
        let patch = match self {
            SurfaceSpec::SphereCap {
                radius,
                center,
                clip,
                flip,
            } => {
                let p = SurfacePatch::sphere_cap(vec3(*center), *radius, clip.build(region)?)?;
                if *flip {
                    p.flipped()
                } else {
                    p
                }
            }
            SurfaceSpec::WulffCap {
                radius,
                center,
                clip,
                flip,
            } => {
                let p = SurfacePatch::wulff_cap(
                    norm.clone(),
                    vec3(*center),
                    *radius,
                    clip.build(region)?,
                )?;
                if *flip {
                    p.flipped()
                } else {
                    p
                }
            }
            SurfaceSpec::PerturbedWulff {
                radius,
                center,
                amplitude,
                mode,
                clip,
                flip,
            } => {
                let p = SurfacePatch::perturbed_wulff(
                    norm.clone(),
                    vec3(*center),
                    *radius,
                    *amplitude,
                    (mode[0], mode[1]),
                    clip.build(region)?,
                )?;
                if *flip {
                    p.flipped()
                } else {
                    p
                }
            }
        };
        Ok(patch)
    }
}

/// Flow-check sub-schema, e.g.
/// `{"check": "neighborhood_volume", "R": 8.0, "samples": 1000000}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum FlowCheckSpec {
    NeighborhoodVolume {
        #[serde(rename = "R")]
        radius: f64,
        samples: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    GaussCoverage {
        targets: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    Inclusion {
        #[serde(rename = "R")]
        radius: f64,
        samples: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

fn default_order() -> usize {
    64
}

fn default_tol() -> f64 {
    1e-6
}

fn default_boundary_samples() -> usize {
    256
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub name: String,
    pub norm: NormSpec,
    pub region: RegionSpec,
    pub surface: SurfaceSpec,
    #[serde(flatten)]
    pub theorem: TheoremTag,
    #[serde(default = "default_order")]
    pub order: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "default_boundary_samples")]
    pub boundary_samples: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flow_checks: Vec<FlowCheckSpec>,
}

impl ScenarioSpec {
    /// Build the runnable scenario; relative paths in the spec resolve
    /// against `base_dir`, and a missing per-scenario seed falls back to
    /// `global_seed`.
    pub fn build(&self, base_dir: &Path, global_seed: u64) -> Result<Scenario> {
        let norm = self.norm.build(base_dir)?;
        let region = self.region.build()?;
        let surface = self.surface.build(&norm, &region)?;
        Ok(Scenario {
            name: self.name.clone(),
            norm,
            region,
            surface,
            tag: self.theorem.clone(),
            order: self.order,
            tol: self.tol,
            seed: self.seed.unwrap_or(global_seed),
            boundary_samples: self.boundary_samples,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub scenarios: Vec<ScenarioSpec>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
}

impl SuiteConfig {
    pub fn from_str(text: &str) -> Result<Self> {
        let cfg: SuiteConfig =
            serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Schema(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_str(&text)
    }

    fn validate(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for sc in &self.scenarios {
            if !seen.insert(sc.name.as_str()) {
                return Err(Error::Schema(format!(
                    "duplicate scenario name '{}'",
                    sc.name
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    #[test]
    fn round_trip_scenario() {
        let text = r#"{
            "name": "cap",
            "norm": {"family": "capillary", "theta0": 1.0471975511965976},
            "region": {"kind": "half_space", "normal": [0, 0, 1]},
            "surface": {"kind": "sphere_cap", "radius": 1.0,
                        "center": [0, 0, -0.5], "clip": "upper_halfspace"},
            "theorem": "capillary_halfspace",
            "theta0": 1.0471975511965976
        }"#;
        let spec: ScenarioSpec = serde_json::from_str(text).unwrap();
        assert_eq!(spec.order, 64);
        assert_eq!(spec.tol, 1e-6);
        let sc = spec.build(Path::new("."), 7).unwrap();
        assert_eq!(sc.seed, 7);
        assert!(matches!(sc.tag, TheoremTag::CapillaryHalfspace { .. }));
        let back = serde_json::to_string(&spec).unwrap();
        let again: ScenarioSpec = serde_json::from_str(&back).unwrap();
        assert_eq!(again.name, "cap");
    }

    #[test]
    fn bad_theta0_is_a_domain_error() {
        let spec = NormSpec::Capillary { theta0: 0.0 };
        let err = spec.build(Path::new(".")).unwrap_err();
        assert!(err.to_string().contains("theta0 out of open interval"));
    }

    #[test]
    fn duplicate_names_rejected() {
        let text = r#"{"scenarios": [
            {"name": "a", "norm": {"family": "euclidean"},
             "region": {"kind": "full_space"},
             "surface": {"kind": "sphere_cap", "radius": 1.0, "center": [0,0,0]},
             "theorem": "iso_convex"},
            {"name": "a", "norm": {"family": "euclidean"},
             "region": {"kind": "full_space"},
             "surface": {"kind": "sphere_cap", "radius": 1.0, "center": [0,0,0]},
             "theorem": "iso_convex"}
        ]}"#;
        assert!(SuiteConfig::from_str(text).is_err());
    }

    #[test]
    fn region_spec_with_anchor_and_cone() {
        let text = r#"{"kind": "circular_cone", "axis": [0, 0, 1],
                       "half_angle": 0.7853981633974483, "anchor": [1, 0, 0]}"#;
        let spec: RegionSpec = serde_json::from_str(text).unwrap();
        let region = spec.build().unwrap();
        assert_eq!(region.anchor(), Vec3::new(1.0, 0.0, 0.0));
        assert!(region.contains(&Vec3::new(1.0, 0.0, 5.0)));
    }

    #[test]
    fn flow_check_spec_round_trip() {
        let text = r#"{"check": "neighborhood_volume", "R": 8.0,
                       "samples": 1000000, "seed": 42}"#;
        let spec: FlowCheckSpec = serde_json::from_str(text).unwrap();
        match &spec {
            FlowCheckSpec::NeighborhoodVolume {
                radius,
                samples,
                seed,
            } => {
                assert_eq!(*radius, 8.0);
                assert_eq!(*samples, 1_000_000);
                assert_eq!(*seed, Some(42));
            }
            _ => panic!("wrong variant"),
        }
        let back = serde_json::to_value(&spec).unwrap();
        assert_eq!(back["R"], 8.0);
    }

    #[test]
    fn tilted_norm_spec_builds() {
        let spec = NormSpec::Tilted {
            base: Box::new(NormSpec::Euclidean),
            omega0: 0.3,
        };
        let norm = spec.build(Path::new(".")).unwrap();
        let e3 = Vec3::new(0.0, 0.0, 1.0);
        assert!((norm.value(&e3) - 1.3).abs() < 1e-12);
    }

    #[test]
    fn variant_prime_tag_flattens() {
        let text = r#"{
            "name": "vp",
            "norm": {"family": "euclidean"},
            "region": {"kind": "half_space", "normal": [0, 0, 1]},
            "surface": {"kind": "sphere_cap", "radius": 1.0,
                        "center": [0, 0, 0.3], "clip": "upper_halfspace"},
            "theorem": "variant_prime",
            "omega0": 0.3,
            "order": 32
        }"#;
        let spec: ScenarioSpec = serde_json::from_str(text).unwrap();
        assert!(matches!(spec.theorem, TheoremTag::VariantPrime { omega0 } if omega0 == 0.3));
        assert_eq!(spec.order, 32);
        let _ = PI;
    }
}
