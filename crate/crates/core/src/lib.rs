//! Numerical anisotropic geometry: Minkowski norms and Wulff shapes,
//! anisotropic curvatures of parametric hypersurface patches, asymptotic
//! volume ratios of unbounded convex sets, and verification of Willmore-type
//! inequalities with their equality cases and supporting identities.

pub mod error;
pub mod flow;
pub mod minkowski;
pub mod regions;
pub mod schema;
pub mod surfaces;
pub mod util;
pub mod verifier;

pub use error::{Error, Result};
pub use minkowski::{CapillaryVector, MinkowskiNorm, SphereGrid};
pub use util::{Mat3, Vec3};
