//! Minkowski norms and everything derived from them: the ambient gradient
//! (Cahn-Hoffman map), the Hessian operator A_F on tangent spaces, the dual
//! norm, the reversal F*, tilted (capillary) norms and the constant vector
//! E^F paired with the half-space boundary.

mod sampled;

pub use sampled::SphereGrid;

use nalgebra::Matrix2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::util::{fibonacci_sphere, slerp, tangent_basis, Mat3, Vec3};

/// Finite-difference step on the sphere for derivative-free families.
pub const FD_STEP: f64 = 1e-5;

const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
enum Family {
    Euclidean,
    /// F(xi) = |xi| - cos(theta0) <xi, E3>
    Capillary {
        theta0: f64,
    },
    /// F(xi) = sqrt(xi^T M xi), M symmetric positive definite
    Ellipsoidal {
        m: Mat3,
        m_inv: Mat3,
    },
    /// F(xi) = base(xi) + omega0 <xi, E^F>
    Tilted {
        base: Box<MinkowskiNorm>,
        omega0: f64,
        e_f: Vec3,
    },
    /// F(xi) = base(-xi)
    Reversed {
        base: Box<MinkowskiNorm>,
    },
    Sampled {
        grid: SphereGrid,
    },
}

/// A smooth one-homogeneous anisotropy on R^3. Immutable after construction;
/// every evaluator is a pure function.
#[derive(Debug, Clone)]
pub struct MinkowskiNorm {
    family: Family,
}

/// The pair (omega0, E^F) attached to a capillary problem in the half-space.
#[derive(Debug, Clone, Copy)]
pub struct CapillaryVector {
    pub omega0: f64,
    pub e_f: Vec3,
}

/// Settings for the variational dual-norm solver used when no closed form is
/// available.
#[derive(Debug, Clone, Copy)]
pub struct DualSolverSettings {
    pub starts: usize,
    pub grad_tol: f64,
    pub max_iters: usize,
}

impl Default for DualSolverSettings {
    fn default() -> Self {
        Self {
            starts: 20,
            grad_tol: 1e-12,
            max_iters: 500,
        }
    }
}

/// Outcome of the angle-comparison sampling check.
#[derive(Debug, Clone, Copy)]
pub struct AngleComparisonReport {
    pub trials: usize,
    pub min_slack: f64,
    pub violations: usize,
}

impl MinkowskiNorm {
    pub fn euclidean() -> Self {
        Self {
            family: Family::Euclidean,
        }
    }

    /// F(xi) = |xi| - cos(theta0) xi_3, for theta0 in the open interval (0, pi).
    pub fn capillary(theta0: f64) -> Result<Self> {
        if !(theta0 > 0.0 && theta0 < std::f64::consts::PI) {
            return Err(Error::Domain(format!(
                "theta0 out of open interval (0, pi): {theta0}"
            )));
        }
        Ok(Self {
            family: Family::Capillary { theta0 },
        })
    }

    /// F(xi) = sqrt(xi^T M xi) for symmetric positive-definite M.
    pub fn ellipsoidal(m: Mat3) -> Result<Self> {
        if (m - m.transpose()).norm() > 1e-12 {
            return Err(Error::InvalidNorm(
                "ellipsoidal matrix must be symmetric".into(),
            ));
        }
        let chol = m.cholesky().ok_or_else(|| {
            Error::InvalidNorm("ellipsoidal matrix must be positive definite".into())
        })?;
        let m_inv = chol.inverse();
        Ok(Self {
            family: Family::Ellipsoidal { m, m_inv },
        })
    }

    pub fn sampled(grid: SphereGrid) -> Self {
        Self {
            family: Family::Sampled { grid },
        }
    }

    /// Admissible open range for omega0: (-F(E3), F(-E3)).
    pub fn omega_range(&self) -> (f64, f64) {
        (-self.value(&Vec3::z()), self.value(&(-Vec3::z())))
    }

    /// The constant vector E^F paired with omega0 (three branches by sign).
    pub fn capillary_vector(&self, omega0: f64) -> Result<CapillaryVector> {
        let (lo, hi) = self.omega_range();
        if !(omega0 > lo && omega0 < hi) {
            return Err(Error::Domain(format!(
                "omega0 = {omega0} outside open interval ({lo}, {hi})"
            )));
        }
        let e3 = Vec3::z();
        let e_f = if omega0 > 0.0 {
            -self.cahn_hoffman(&(-e3))? / self.value(&(-e3))
        } else if omega0 < 0.0 {
            self.cahn_hoffman(&e3)? / self.value(&e3)
        } else {
            e3
        };
        debug_assert!((e_f.dot(&e3) - 1.0).abs() < 1e-8);
        Ok(CapillaryVector { omega0, e_f })
    }

    /// The tilted norm F~(xi) = F(xi) + omega0 <xi, E^F> together with its
    /// capillary vector. Turns an omega0-capillary problem into a free
    /// boundary one.
    pub fn tilt(&self, omega0: f64) -> Result<(MinkowskiNorm, CapillaryVector)> {
        let cv = self.capillary_vector(omega0)?;
        if omega0 == 0.0 {
            return Ok((self.clone(), cv));
        }
        let norm = MinkowskiNorm {
            family: Family::Tilted {
                base: Box::new(self.clone()),
                omega0,
                e_f: cv.e_f,
            },
        };
        Ok((norm, cv))
    }

    /// The reversal F*(z) = F(-z).
    pub fn reversal(&self) -> MinkowskiNorm {
        if let Family::Reversed { base } = &self.family {
            return (**base).clone();
        }
        if matches!(self.family, Family::Euclidean) {
            return Self::euclidean();
        }
        MinkowskiNorm {
            family: Family::Reversed {
                base: Box::new(self.clone()),
            },
        }
    }

    /// F(xi), one-homogeneous, F(0) = 0.
    pub fn value(&self, xi: &Vec3) -> f64 {
        match &self.family {
            Family::Euclidean => xi.norm(),
            Family::Capillary { theta0 } => xi.norm() - theta0.cos() * xi.z,
            Family::Ellipsoidal { m, .. } => (m * xi).dot(xi).max(0.0).sqrt(),
            Family::Tilted { base, omega0, e_f } => base.value(xi) + omega0 * xi.dot(e_f),
            Family::Reversed { base } => base.value(&-xi),
            Family::Sampled { grid } => grid.value(xi),
        }
    }

    /// Ambient gradient DF(xi) (zero-homogeneous). DF at a unit vector z is
    /// the Cahn-Hoffman map.
    pub fn gradient(&self, xi: &Vec3) -> Vec3 {
        match &self.family {
            Family::Euclidean => xi / xi.norm(),
            Family::Capillary { theta0 } => xi / xi.norm() - Vec3::z() * theta0.cos(),
            Family::Ellipsoidal { m, .. } => {
                let mxi = m * xi;
                mxi / mxi.dot(xi).sqrt()
            }
            Family::Tilted { base, omega0, e_f } => base.gradient(xi) + e_f * *omega0,
            Family::Reversed { base } => -base.gradient(&-xi),
            Family::Sampled { .. } => self.fd_gradient(xi),
        }
    }

    /// Ambient Hessian D^2 F(xi) (homogeneous of degree -1). Its restriction
    /// to the tangent plane of the sphere at a unit z is A_F.
    pub fn hessian(&self, xi: &Vec3) -> Mat3 {
        match &self.family {
            Family::Euclidean | Family::Capillary { .. } => {
                let n = xi.norm();
                let u = xi / n;
                (Mat3::identity() - u * u.transpose()) / n
            }
            Family::Ellipsoidal { m, .. } => {
                let f = (m * xi).dot(xi).sqrt();
                let mxi = m * xi;
                m / f - (mxi * mxi.transpose()) / (f * f * f)
            }
            Family::Tilted { base, .. } => base.hessian(xi),
            Family::Reversed { base } => base.hessian(&-xi),
            Family::Sampled { .. } => self.fd_hessian(xi),
        }
    }

    fn fd_gradient(&self, xi: &Vec3) -> Vec3 {
        let h = FD_STEP * xi.norm().max(1.0);
        let mut g = Vec3::zeros();
        for k in 0..3 {
            let mut p = *xi;
            let mut q = *xi;
            p[k] += h;
            q[k] -= h;
            g[k] = (self.value(&p) - self.value(&q)) / (2.0 * h);
        }
        g
    }

    fn fd_hessian(&self, xi: &Vec3) -> Mat3 {
        let h = FD_STEP * xi.norm().max(1.0);
        let f0 = self.value(xi);
        let mut out = Mat3::zeros();
        for a in 0..3 {
            for b in a..3 {
                let v = if a == b {
                    let mut p = *xi;
                    let mut q = *xi;
                    p[a] += h;
                    q[a] -= h;
                    (self.value(&p) - 2.0 * f0 + self.value(&q)) / (h * h)
                } else {
                    let mut pp = *xi;
                    let mut pm = *xi;
                    let mut mp = *xi;
                    let mut mm = *xi;
                    pp[a] += h;
                    pp[b] += h;
                    pm[a] += h;
                    pm[b] -= h;
                    mp[a] -= h;
                    mp[b] += h;
                    mm[a] -= h;
                    mm[b] -= h;
                    (self.value(&pp) - self.value(&pm) - self.value(&mp) + self.value(&mm))
                        / (4.0 * h * h)
                };
                out[(a, b)] = v;
                out[(b, a)] = v;
            }
        }
        out
    }

    /// Cahn-Hoffman map Phi(z) = grad F(z) + F(z) z = DF(z) at unit z.
    pub fn cahn_hoffman(&self, z: &Vec3) -> Result<Vec3> {
        if (z.norm() - 1.0).abs() > UNIT_TOL {
            return Err(Error::Domain(format!(
                "cahn_hoffman requires a unit vector, |z| = {}",
                z.norm()
            )));
        }
        Ok(self.gradient(z))
    }

    /// A_F at unit z: the 2x2 matrix of D^2F(z) restricted to T_z S^2 in the
    /// deterministic tangent basis. Errors if the positivity condition fails.
    pub fn hessian_operator(&self, z: &Vec3) -> Result<(Matrix2<f64>, (Vec3, Vec3))> {
        if (z.norm() - 1.0).abs() > UNIT_TOL {
            return Err(Error::Domain(format!(
                "hessian_operator requires a unit vector, |z| = {}",
                z.norm()
            )));
        }
        let (t1, t2) = tangent_basis(z);
        let h = self.hessian(z);
        let a11 = (h * t1).dot(&t1);
        let a12 = 0.5 * ((h * t1).dot(&t2) + (h * t2).dot(&t1));
        let a22 = (h * t2).dot(&t2);
        let a = Matrix2::new(a11, a12, a12, a22);
        let half_tr = 0.5 * (a11 + a22);
        let disc = (half_tr * half_tr - (a11 * a22 - a12 * a12))
            .max(0.0)
            .sqrt();
        let min_eig = half_tr - disc;
        if min_eig <= 0.0 {
            return Err(Error::InvalidNorm(format!(
                "A_F has non-positive eigenvalue {min_eig} at z = {z:?}"
            )));
        }
        Ok((a, (t1, t2)))
    }

    /// Dual norm F deg(x) = sup over unit z of <x, z>/F(z). Closed forms for
    /// the analytic families, variational solver otherwise.
    pub fn dual(&self, x: &Vec3) -> f64 {
        if x.norm() == 0.0 {
            return 0.0;
        }
        match &self.family {
            Family::Euclidean => x.norm(),
            Family::Capillary { theta0 } => {
                // r solves |x + r cos(theta0) E3| = r; the Wulff ball is the
                // unit ball centered at -cos(theta0) E3.
                let c = theta0.cos();
                let s2 = 1.0 - c * c;
                (c * x.z + (c * c * x.z * x.z + s2 * x.norm_squared()).sqrt()) / s2
            }
            Family::Ellipsoidal { m_inv, .. } => (m_inv * x).dot(x).max(0.0).sqrt(),
            Family::Tilted { base, omega0, e_f } => {
                // Wulff shape of the tilt is the base Wulff shape translated
                // by omega0 E^F, so F~deg(x) = r with base_dual(x - r w0 E^F) = r.
                let g = |r: f64| base.dual(&(x - e_f * (*omega0 * r))) - r;
                let mut hi = base.dual(x).max(1e-12);
                let mut iters = 0;
                while g(hi) > 0.0 {
                    hi *= 2.0;
                    iters += 1;
                    assert!(iters < 200, "tilted dual: bracket expansion failed");
                }
                crate::util::brent_root(g, 0.0, hi, 1e-14 * hi.max(1.0))
            }
            Family::Reversed { base } => base.dual(&-x),
            Family::Sampled { .. } => self
                .dual_variational(x, &DualSolverSettings::default())
                .expect("dual solver failed"),
        }
    }

    /// Multi-start projected gradient ascent for the dual norm, independent of
    /// any closed form. Public so tests can cross-check analytic duals.
    pub fn dual_variational(&self, x: &Vec3, settings: &DualSolverSettings) -> Result<f64> {
        if x.norm() == 0.0 {
            return Ok(0.0);
        }
        let scale = x.norm();
        let q = |z: &Vec3| x.dot(z) / self.value(z);
        let mut best = f64::NEG_INFINITY;
        let mut converged = false;
        for start in fibonacci_sphere(settings.starts) {
            let mut z = start;
            let mut step = 1.0;
            for _ in 0..settings.max_iters {
                let f = self.value(&z);
                let df = self.gradient(&z);
                let qz = x.dot(&z) / f;
                // ambient gradient of q projected to the tangent plane
                let g = (x - df * qz) / f;
                let gt = g - z * g.dot(&z);
                if gt.norm() < settings.grad_tol * scale {
                    converged = true;
                    break;
                }
                // backtracking ascent step on the sphere
                let mut accepted = false;
                for _ in 0..60 {
                    let cand = (z + gt * step).normalize();
                    if q(&cand) > qz {
                        z = cand;
                        step *= 1.4;
                        accepted = true;
                        break;
                    }
                    step *= 0.5;
                }
                if !accepted {
                    converged = true;
                    break;
                }
            }
            // Newton polish in the tangent plane
            for _ in 0..8 {
                let (t1, t2) = tangent_basis(&z);
                let hfd = 1e-6;
                let qc = q(&z);
                let ev = |s1: f64, s2: f64| q(&(z + t1 * s1 + t2 * s2).normalize());
                let g1 = (ev(hfd, 0.0) - ev(-hfd, 0.0)) / (2.0 * hfd);
                let g2 = (ev(0.0, hfd) - ev(0.0, -hfd)) / (2.0 * hfd);
                let h11 = (ev(hfd, 0.0) - 2.0 * qc + ev(-hfd, 0.0)) / (hfd * hfd);
                let h22 = (ev(0.0, hfd) - 2.0 * qc + ev(0.0, -hfd)) / (hfd * hfd);
                let h12 = (ev(hfd, hfd) - ev(hfd, -hfd) - ev(-hfd, hfd) + ev(-hfd, -hfd))
                    / (4.0 * hfd * hfd);
                let det = h11 * h22 - h12 * h12;
                if det.abs() < 1e-300 || h11 >= 0.0 {
                    break;
                }
                let s1 = -(h22 * g1 - h12 * g2) / det;
                let s2 = -(h11 * g2 - h12 * g1) / det;
                let cand = (z + t1 * s1 + t2 * s2).normalize();
                if q(&cand) >= qc {
                    z = cand;
                } else {
                    break;
                }
                if (s1 * s1 + s2 * s2).sqrt() < 1e-13 {
                    break;
                }
            }
            best = best.max(q(&z));
        }
        if !converged && best.is_finite() {
            return Err(Error::Numerical {
                msg: "dual solver did not reach gradient tolerance".into(),
                best,
            });
        }
        Ok(best)
    }

    /// Samples the anisotropic angle comparison: for y on the minimizing
    /// geodesic between x and z, <Phi(x), z> <= <Phi(y), z>.
    pub fn angle_comparison_check(&self, trials: usize, seed: u64) -> AngleComparisonReport {
        assert!(trials >= 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut min_slack = f64::INFINITY;
        let mut violations = 0;
        let mut done = 0;
        while done < trials {
            let x = random_unit(&mut rng);
            let z = random_unit(&mut rng);
            let d = x.dot(&z);
            // antipodal pairs have a non-unique geodesic; coincident pairs are trivial
            if d < -1.0 + 1e-6 || d > 1.0 - 1e-9 {
                continue;
            }
            let s: f64 = rng.gen_range(0.0..1.0);
            let y = slerp(&x, &z, s).normalize();
            let phi_x = self.gradient(&x);
            let phi_y = self.gradient(&y);
            let slack = phi_y.dot(&z) - phi_x.dot(&z);
            if slack < -1e-9 {
                violations += 1;
            }
            min_slack = min_slack.min(slack);
            done += 1;
        }
        AngleComparisonReport {
            trials,
            min_slack,
            violations,
        }
    }

    /// True when F(z) = F(-z) holds at a sample of directions.
    pub fn is_even(&self) -> bool {
        fibonacci_sphere(64)
            .iter()
            .all(|z| (self.value(z) - self.value(&-z)).abs() < 1e-12 * self.value(z))
    }
}

fn random_unit<R: Rng>(rng: &mut R) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}
