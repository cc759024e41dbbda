//! Spherical-harmonic baseline.
//!
//! Surface coefficients are estimated by discrete quadrature over the
//! microphones and extrapolated off the sphere with the propagator ratio
//! `G_n(r, a, k) / G_n(a, a, k)`, so at `r = a` the reconstruction is the
//! truncated SH interpolation of the surface data.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::field::Measurements;
use crate::geom::{cart_to_sph, CartPoint, SphPoint};
use crate::linalg::{cholesky_solve, CMatrix};
use crate::specfun::{radial_propagators, sh_index, sph_harmonics_all, Boundary, MAX_ORDER};
use crate::{Complex, Error, Result};

/// Default truncation order: `(N + 1)^2 = 25 <= 32` microphones.
pub const DEFAULT_ORDER: usize = 4;

/// Tolerance on `| |p| - a |` (m) for a point to count as on the sphere.
pub const ON_SPHERE_TOL: f64 = 1e-9;

/// Surface pressure coefficients `P_n^m(a)`, indexed by `n^2 + n + m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShCoefficients {
    pub order: usize,
    pub coeffs: Vec<Complex>,
    pub k: f64,
    pub a: f64,
}

impl ShCoefficients {
    pub fn zeros(order: usize, k: f64, a: f64) -> Self {
        Self {
            order,
            coeffs: vec![Complex::new(0.0, 0.0); (order + 1) * (order + 1)],
            k,
            a,
        }
    }

    pub fn get(&self, n: usize, m: i32) -> Complex {
        self.coeffs[sh_index(n, m)]
    }

    /// `(n, m, P_n^m)` in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, i32, Complex)> + '_ {
        (0..=self.order).flat_map(move |n| {
            (-(n as i32)..=n as i32).map(move |m| (n, m, self.get(n, m)))
        })
    }
}

/// Quadrature weights for directions on the unit sphere.
///
/// Starts from uniform weights `4 pi / Q` and applies the smallest correction
/// that makes `sum_q w_q Y_n^m(q)` exact for every `n <= degree`. When no
/// correction achieves exactness (residual above `1e-8`), uniform weights are
/// returned unchanged.
pub fn quadrature_weights(directions: &[CartPoint], degree: usize) -> Result<Vec<f64>> {
    let q = directions.len();
    if q == 0 {
        return Err(Error::Domain("no quadrature nodes"));
    }
    let uniform = vec![4.0 * PI / q as f64; q];
    if degree == 0 {
        return Ok(uniform);
    }
    if degree > MAX_ORDER {
        return Err(Error::Domain("quadrature degree exceeds MAX_ORDER"));
    }
    // real constraint rows: Re Y_n^m and Im Y_n^m for m >= 0
    let tables = directions
        .iter()
        .map(|d| {
            let s = cart_to_sph(*d);
            sph_harmonics_all(degree, s.theta, s.phi)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    for n in 0..=degree {
        for m in 0..=n as i32 {
            let idx = sh_index(n, m);
            rows.push(tables.iter().map(|t| t[idx].re).collect());
            rhs.push(if n == 0 { libm::sqrt(4.0 * PI) } else { 0.0 });
            if m > 0 {
                rows.push(tables.iter().map(|t| t[idx].im).collect());
                rhs.push(0.0);
            }
        }
    }
    let residual = |w: &[f64]| -> f64 {
        rows.iter()
            .zip(&rhs)
            .map(|(row, b)| libm::fabs(row.iter().zip(w).map(|(a, x)| a * x).sum::<f64>() - b))
            .fold(0.0, f64::max)
    };
    if residual(&uniform) < 1e-12 {
        return Ok(uniform);
    }
    // (A^T A + mu I) delta = A^T (b - A w0)
    let mut normal = CMatrix::zeros(q, q);
    let mut trace = 0.0;
    for i in 0..q {
        for j in i..q {
            let s: f64 = rows.iter().map(|row| row[i] * row[j]).sum();
            normal.set(i, j, Complex::new(s, 0.0));
            normal.set(j, i, Complex::new(s, 0.0));
        }
        trace += normal.get(i, i).re;
    }
    let mu = 1e-12 * trace / q as f64;
    for i in 0..q {
        let d = normal.get(i, i);
        normal.set(i, i, d + mu);
    }
    let misfit: Vec<f64> = rows
        .iter()
        .zip(&rhs)
        .map(|(row, b)| b - row.iter().zip(&uniform).map(|(a, x)| a * x).sum::<f64>())
        .collect();
    let rhs_q: Vec<Complex> = (0..q)
        .map(|i| Complex::new(rows.iter().zip(&misfit).map(|(row, r)| row[i] * r).sum(), 0.0))
        .collect();
    let delta = match cholesky_solve(&normal, &rhs_q) {
        Ok(d) => d,
        Err(_) => return Ok(uniform),
    };
    let weights: Vec<f64> = uniform.iter().zip(&delta).map(|(w, d)| w + d.re).collect();
    if residual(&weights) < 1e-8 {
        Ok(weights)
    } else {
        Ok(uniform)
    }
}

fn check_on_sphere(m: &Measurements, a: f64) -> Result<()> {
    if m.positions.iter().any(|p| libm::fabs(p.norm() - a) > ON_SPHERE_TOL) {
        return Err(Error::Domain("measurement position is not on the sphere"));
    }
    Ok(())
}

/// `P_n^m(a) = sum_q w_q P(a, Omega_q) conj(Y_n^m(Omega_q))` with weights from
/// [`quadrature_weights`] at degree `2N`.
pub fn estimate_coeffs(m: &Measurements, a: f64, k: f64, order: usize) -> Result<ShCoefficients> {
    if m.is_empty() {
        return Err(Error::Domain("no measurements"));
    }
    if !(a > 0.0 && k > 0.0) {
        return Err(Error::Domain("radius and wavenumber must be positive"));
    }
    if order > MAX_ORDER / 2 {
        return Err(Error::Domain("SH order too large"));
    }
    check_on_sphere(m, a)?;
    let weights = quadrature_weights(&m.positions, 2 * order)?;
    let mut c = ShCoefficients::zeros(order, k, a);
    for ((pos, p), w) in m.positions.iter().zip(&m.pressures).zip(&weights) {
        let s = cart_to_sph(*pos);
        let y = sph_harmonics_all(order, s.theta, s.phi)?;
        for (acc, yv) in c.coeffs.iter_mut().zip(&y) {
            *acc += p * yv.conj() * *w;
        }
    }
    Ok(c)
}

/// Transfer ratios `G_n(r)/G_n(a)` for `n = 0..=order`.
fn transfer_ratios(c: &ShCoefficients, r: f64) -> Result<Vec<Complex>> {
    let at_r = radial_propagators(Boundary::Rigid, c.order, r, c.a, c.k)?;
    let at_a = radial_propagators(Boundary::Rigid, c.order, c.a, c.a, c.k)?;
    Ok(at_r.iter().zip(&at_a).map(|(g, g0)| g / g0).collect())
}

/// Field at `p` (`p.r >= a`).
pub fn reconstruct(c: &ShCoefficients, p: SphPoint) -> Result<Complex> {
    if !(p.r >= c.a * (1.0 - 1e-9)) {
        return Err(Error::Domain("reconstruction radius inside the sphere"));
    }
    let ratios = transfer_ratios(c, p.r.max(c.a))?;
    let y = sph_harmonics_all(c.order, p.theta, p.phi)?;
    let mut out = Complex::new(0.0, 0.0);
    for (n, ratio) in ratios.iter().enumerate() {
        let mut inner = Complex::new(0.0, 0.0);
        for m in -(n as i32)..=(n as i32) {
            let i = sh_index(n, m);
            inner += c.coeffs[i] * y[i];
        }
        out += ratio * inner;
    }
    Ok(out)
}

/// Cartesian convenience wrapper around [`reconstruct`].
pub fn reconstruct_at(c: &ShCoefficients, p: CartPoint) -> Result<Complex> {
    reconstruct(c, cart_to_sph(p))
}

/// Per-order amplification `|G_n(r)/G_n(a)|` of the extrapolation.
pub fn conditioning_report(c: &ShCoefficients, r: f64) -> Result<Vec<(usize, f64)>> {
    if !(r >= c.a * (1.0 - 1e-9)) {
        return Err(Error::Domain("radius inside the sphere"));
    }
    Ok(transfer_ratios(c, r.max(c.a))?
        .into_iter()
        .enumerate()
        .map(|(n, g)| (n, g.norm()))
        .collect())
}
