//! Shared numerical helpers: quadrature rules, compensated summation,
//! deterministic sphere point sets and small root finders.

use nalgebra::{Matrix3, Vector3};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Kahan-Babuska compensated accumulator. Summation order is fixed by the
/// caller, so parallel schedules that merge per-chunk accumulators in index
/// order reproduce the serial result bit for bit.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    c: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.c
    }
}

/// Sum an iterator with compensation.
pub fn kahan_sum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut acc = KahanSum::new();
    for x in it {
        acc.add(x);
    }
    acc.value()
}

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre recurrence. Accurate to machine precision for n <= 512.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // evaluate P_n(x) and P_n'(x)
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            dp = (n as f64) * (x * p - p0) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Gauss-Legendre rule mapped to [a, b].
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (xs, ws) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    xs.iter()
        .zip(ws.iter())
        .map(|(&x, &w)| (mid + half * x, half * w))
        .collect()
}

/// Deterministic quasi-uniform point set on the unit sphere (Fibonacci
/// lattice).
pub fn fibonacci_sphere(n: usize) -> Vec<Vec3> {
    let golden = (1.0 + 5.0_f64.sqrt()) / 2.0;
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = 2.0 * std::f64::consts::PI * (i as f64 / golden).fract();
            Vec3::new(r * phi.cos(), r * phi.sin(), z)
        })
        .collect()
}

/// Deterministic orthonormal basis of the plane orthogonal to unit `z`:
/// starts Gram-Schmidt from the coordinate axis least aligned with `z`.
pub fn tangent_basis(z: &Vec3) -> (Vec3, Vec3) {
    let a = z.x.abs();
    let b = z.y.abs();
    let c = z.z.abs();
    let seed = if a <= b && a <= c {
        Vec3::x()
    } else if b <= a && b <= c {
        Vec3::y()
    } else {
        Vec3::z()
    };
    let t1 = (seed - z * seed.dot(z)).normalize();
    let t2 = z.cross(&t1);
    (t1, t2)
}

/// Rotation taking E3 to the given unit axis.
pub fn rotation_to_axis(axis: &Vec3) -> Mat3 {
    let e3 = Vec3::z();
    let c = e3.dot(axis);
    if c > 1.0 - 1e-14 {
        return Mat3::identity();
    }
    if c < -1.0 + 1e-14 {
        // 180 degree turn about E1
        return Mat3::from_diagonal(&Vec3::new(1.0, -1.0, -1.0));
    }
    let v = e3.cross(axis);
    let vx = Mat3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0);
    Mat3::identity() + vx + vx * vx * (1.0 / (1.0 + c))
}

/// Spherical linear interpolation between unit vectors, s in [0, 1].
pub fn slerp(a: &Vec3, b: &Vec3, s: f64) -> Vec3 {
    let cosw = a.dot(b).clamp(-1.0, 1.0);
    let w = cosw.acos();
    if w < 1e-12 {
        return *a;
    }
    let sw = w.sin();
    (a * ((1.0 - s) * w).sin() + b * (s * w).sin()) / sw
}

/// Brent-style bracketed root finder (bisection with secant acceleration).
/// Requires f(a) and f(b) of opposite sign.
pub fn brent_root<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut fa = f(a);
    let mut fb = f(b);
    assert!(
        fa * fb <= 0.0,
        "brent_root: no sign change on [{a}, {b}] ({fa}, {fb})"
    );
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if (b - a).abs() < tol {
            return mid;
        }
        // secant candidate, fall back to bisection if outside the bracket
        let mut x = if (fb - fa).abs() > 1e-300 {
            b - fb * (b - a) / (fb - fa)
        } else {
            mid
        };
        if !(x > a && x < b) {
            x = mid;
        }
        let fx = f(x);
        if fx == 0.0 {
            return x;
        }
        if fa * fx < 0.0 {
            b = x;
            fb = fx;
        } else {
            a = x;
            fa = fx;
        }
    }
    0.5 * (a + b)
}
