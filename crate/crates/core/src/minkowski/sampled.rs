//! Grid-sampled norms: values of F on a latitude-longitude sphere grid,
//! evaluated anywhere by bicubic (Catmull-Rom) interpolation. Derivatives of
//! the one-homogeneous extension come from central finite differences, so
//! this family exercises every code path that does not assume closed forms.

use std::f64::consts::PI;
use std::path::Path;

use crate::error::{Error, Result};
use crate::util::Vec3;

/// Values of a positive function on the sphere, sampled on the grid
/// `theta_i = i*pi/n_theta` (i = 0..=n_theta), `phi_j = j*2*pi/n_phi`.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    n_theta: usize,
    n_phi: usize,
    /// (n_theta + 1) rows of n_phi values.
    values: Vec<f64>,
}

fn catmull_rom(p0: f64, p1: f64, p2: f64, p3: f64, t: f64) -> f64 {
    0.5 * (2.0 * p1
        + (-p0 + p2) * t
        + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t * t
        + (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * t * t * t)
}

impl SphereGrid {
    /// Sample a function of the unit direction on an `n_theta x n_phi` grid.
    /// `n_phi` must be even so the pole reflection `phi -> phi + pi` lands on
    /// a grid column.
    pub fn from_fn<F: Fn(&Vec3) -> f64>(f: F, n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta < 8 || n_phi < 8 || n_phi % 2 != 0 {
            return Err(Error::Domain(format!(
                "sphere grid must have n_theta >= 8 and even n_phi >= 8, got {n_theta}x{n_phi}"
            )));
        }
        let mut values = Vec::with_capacity((n_theta + 1) * n_phi);
        for i in 0..=n_theta {
            let theta = PI * i as f64 / n_theta as f64;
            for j in 0..n_phi {
                let phi = 2.0 * PI * j as f64 / n_phi as f64;
                let u = Vec3::new(
                    theta.sin() * phi.cos(),
                    theta.sin() * phi.sin(),
                    theta.cos(),
                );
                let v = f(&u);
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::InvalidNorm(format!(
                        "sampled value {v} at theta={theta}, phi={phi} is not positive"
                    )));
                }
                values.push(v);
            }
        }
        Ok(Self {
            n_theta,
            n_phi,
            values,
        })
    }

    /// Read rows `z1,z2,z3,F` whose directions form a full
    /// latitude-longitude grid.
    pub fn from_csv<P: AsRef<Path>>(path: P) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(false)
            .from_path(path.as_ref())
            .map_err(|e| Error::Schema(format!("sampled norm CSV: {e}")))?;
        let mut points = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Schema(format!("CSV line {}: {e}", line + 1)))?;
            if rec.len() != 4 {
                return Err(Error::Schema(format!(
                    "CSV line {}: expected 4 fields (z1,z2,z3,F), got {}",
                    line + 1,
                    rec.len()
                )));
            }
            let mut v = [0.0; 4];
            for (k, field) in rec.iter().enumerate() {
                v[k] = field.trim().parse::<f64>().map_err(|e| {
                    Error::Schema(format!("CSV line {}, field {}: {e}", line + 1, k + 1))
                })?;
            }
            points.push((Vec3::new(v[0], v[1], v[2]), v[3]));
        }
        Self::from_points(&points)
    }

    /// Reassemble a grid from unordered `(direction, value)` pairs.
    pub fn from_points(points: &[(Vec3, f64)]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Schema("sampled norm: empty point set".into()));
        }
        let tol = 1e-9;
        let mut thetas: Vec<f64> = Vec::new();
        let mut phis: Vec<f64> = Vec::new();
        for (p, _) in points {
            let u = p.normalize();
            let theta = u.z.clamp(-1.0, 1.0).acos();
            let phi = u.y.atan2(u.x).rem_euclid(2.0 * PI);
            if !thetas.iter().any(|t| (t - theta).abs() < tol) {
                thetas.push(theta);
            }
            let at_pole = theta < tol || (PI - theta) < tol;
            if !at_pole && !phis.iter().any(|q| (q - phi).abs() < tol) {
                phis.push(phi);
            }
        }
        thetas.sort_by(|a, b| a.partial_cmp(b).unwrap());
        phis.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n_theta = thetas.len() - 1;
        let n_phi = phis.len();
        if n_theta < 8 || n_phi < 8 || n_phi % 2 != 0 {
            return Err(Error::Schema(format!(
                "sampled norm: irregular grid ({} thetas, {} phis)",
                thetas.len(),
                n_phi
            )));
        }
        for (i, t) in thetas.iter().enumerate() {
            let expect = PI * i as f64 / n_theta as f64;
            if (t - expect).abs() > 1e-6 {
                return Err(Error::Schema(format!(
                    "sampled norm: theta row {i} at {t}, expected uniform grid value {expect}"
                )));
            }
        }
        let mut values = vec![f64::NAN; (n_theta + 1) * n_phi];
        for (p, v) in points {
            let u = p.normalize();
            let theta = u.z.clamp(-1.0, 1.0).acos();
            let phi = u.y.atan2(u.x).rem_euclid(2.0 * PI);
            let i = (theta / (PI / n_theta as f64)).round() as usize;
            if i == 0 || i == n_theta {
                for j in 0..n_phi {
                    values[i * n_phi + j] = *v;
                }
            } else {
                let j = (phi / (2.0 * PI / n_phi as f64)).round() as usize % n_phi;
                values[i * n_phi + j] = *v;
            }
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Schema(
                "sampled norm: grid has missing entries".into(),
            ));
        }
        Ok(Self {
            n_theta,
            n_phi,
            values,
        })
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    /// Grid lookup with pole reflection and periodic wrap.
    fn at(&self, i: isize, j: isize) -> f64 {
        let nt = self.n_theta as isize;
        let np = self.n_phi as isize;
        let (mut i, mut j) = (i, j);
        if i < 0 {
            i = -i;
            j += np / 2;
        } else if i > nt {
            i = 2 * nt - i;
            j += np / 2;
        }
        let j = j.rem_euclid(np) as usize;
        self.values[i as usize * self.n_phi + j]
    }

    /// Interpolated value of the sphere function at a unit direction.
    pub fn value_at_direction(&self, u: &Vec3) -> f64 {
        let theta = u.z.clamp(-1.0, 1.0).acos();
        let phi = u.y.atan2(u.x).rem_euclid(2.0 * PI);
        let ht = PI / self.n_theta as f64;
        let hp = 2.0 * PI / self.n_phi as f64;
        let fi = theta / ht;
        let fj = phi / hp;
        let i0 = fi.floor() as isize;
        let j0 = fj.floor() as isize;
        let ti = fi - i0 as f64;
        let tj = fj - j0 as f64;
        let mut rows = [0.0; 4];
        for (r, row) in rows.iter_mut().enumerate() {
            let i = i0 - 1 + r as isize;
            *row = catmull_rom(
                self.at(i, j0 - 1),
                self.at(i, j0),
                self.at(i, j0 + 1),
                self.at(i, j0 + 2),
                tj,
            );
        }
        catmull_rom(rows[0], rows[1], rows[2], rows[3], ti)
    }

    /// One-homogeneous extension.
    pub fn value(&self, xi: &Vec3) -> f64 {
        let n = xi.norm();
        if n == 0.0 {
            return 0.0;
        }
        n * self.value_at_direction(&(xi / n))
    }

    /// Serialize as the CSV accepted by `from_csv`.
    pub fn to_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut wtr = csv::Writer::from_path(path.as_ref())
            .map_err(|e| Error::Schema(format!("sampled norm CSV: {e}")))?;
        for i in 0..=self.n_theta {
            let theta = PI * i as f64 / self.n_theta as f64;
            let j_end = if i == 0 || i == self.n_theta {
                1
            } else {
                self.n_phi
            };
            for j in 0..j_end {
                let phi = 2.0 * PI * j as f64 / self.n_phi as f64;
                let u = Vec3::new(
                    theta.sin() * phi.cos(),
                    theta.sin() * phi.sin(),
                    theta.cos(),
                );
                wtr.write_record(&[
                    format!("{:.17e}", u.x),
                    format!("{:.17e}", u.y),
                    format!("{:.17e}", u.z),
                    format!("{:.17e}", self.values[i * self.n_phi + j]),
                ])
                .map_err(|e| Error::Schema(format!("sampled norm CSV: {e}")))?;
            }
        }
        wtr.flush()?;
        Ok(())
    }
}
