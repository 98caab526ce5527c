//! Isotropic orientational averaging of two-photon amplitude bilinears.
//!
//! The photon polarizations are fixed in the lab while the molecule takes
//! every orientation with equal weight. For molecular tensors `A`, `B` the
//! average of `(e2 . A . e1) conj(e2 . B . e1)` reduces to three rotational
//! invariants,
//!
//! ```text
//! dF = sum_ab A_aa conj(B_bb)
//! dG = sum_ab A_ab conj(B_ab)
//! dH = sum_ab A_ab conj(B_ba)
//! <.> = (F dF + G dG + H dH) / 30
//! ```
//!
//! with `(F, G, H) = (2, 2, 2)` for parallel and `(-1, 4, -1)` for
//! perpendicular linear polarizations. [`quadrature_average`] integrates the
//! same quantity over rotations numerically and serves as a check.

use std::f64::consts::PI;

use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::Serialize;

use crate::amplitude::{contract, Tensor};
use crate::molecule::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolarizationScheme {
    ParallelLinear,
    PerpendicularLinear,
}

impl PolarizationScheme {
    /// `(F, G, H)`
    pub fn coefficients(self) -> (f64, f64, f64) {
        match self {
            PolarizationScheme::ParallelLinear => (2.0, 2.0, 2.0),
            PolarizationScheme::PerpendicularLinear => (-1.0, 4.0, -1.0),
        }
    }

    /// Lab-frame `(pol1, pol2)`.
    pub fn lab_polarizations(self) -> (Vec3, Vec3) {
        match self {
            PolarizationScheme::ParallelLinear => (Vec3::x(), Vec3::x()),
            PolarizationScheme::PerpendicularLinear => (Vec3::x(), Vec3::y()),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PolarizationScheme::ParallelLinear => "parallel-linear",
            PolarizationScheme::PerpendicularLinear => "perpendicular-linear",
        }
    }
}

pub fn bilinear_isotropic_average(a: &Tensor, b: &Tensor, scheme: PolarizationScheme) -> Complex64 {
    let (f, g, h) = scheme.coefficients();
    let zero = Complex64::new(0.0, 0.0);
    let d_f = a.trace() * b.trace().conj();
    let (mut d_g, mut d_h) = (zero, zero);
    for i in 0..3 {
        for j in 0..3 {
            d_g += a[(i, j)] * b[(i, j)].conj();
            d_h += a[(i, j)] * b[(j, i)].conj();
        }
    }
    (d_f * f + d_g * g + d_h * h) / 30.0
}

/// Smallest resolution at which [`quadrature_average`] integrates the
/// degree-four integrand exactly (up to rounding).
pub const MIN_EXACT_RESOLUTION: usize = 5;

/// Numerical rotation average with `resolution` points along each Euler
/// angle: trapezoid rules in the two azimuthal angles and Gauss-Legendre in
/// `cos(beta)`. Below [`MIN_EXACT_RESOLUTION`] the result is only an
/// approximation; a resolution of zero is treated as one.
pub fn quadrature_average(
    a: &Tensor,
    b: &Tensor,
    scheme: PolarizationScheme,
    resolution: usize,
) -> Complex64 {
    let n = resolution.max(1);
    let (pol1, pol2) = scheme.lab_polarizations();
    let (nodes, weights) = gauss_legendre(n);
    let step = 2.0 * PI / n as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for (&u, &wu) in nodes.iter().zip(&weights) {
        let beta = u.acos();
        let mut shell = Complex64::new(0.0, 0.0);
        for ia in 0..n {
            for ig in 0..n {
                let r = euler_zyz(ia as f64 * step, beta, ig as f64 * step);
                let ra = rotate(&r, a);
                let rb = rotate(&r, b);
                shell += contract(&ra, &pol1, &pol2) * contract(&rb, &pol1, &pol2).conj();
            }
        }
        total += shell * (0.5 * wu);
    }
    total / (n * n) as f64
}

fn rotate(r: &Matrix3<f64>, t: &Tensor) -> Tensor {
    let rc = r.map(|x| Complex64::new(x, 0.0));
    rc * t * rc.transpose()
}

/// `R_z(alpha) R_y(beta) R_z(gamma)`
pub fn euler_zyz(alpha: f64, beta: f64, gamma: f64) -> Matrix3<f64> {
    let rz = |t: f64| {
        let (s, c) = t.sin_cos();
        Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
    };
    let (s, c) = beta.sin_cos();
    let ry = Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c);
    rz(alpha) * ry * rz(gamma)
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on [-1, 1].
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))`
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
