//! Plane-wave decomposition baseline.
//!
//! Amplitudes are fitted against the rigid-sphere response of each plane
//! wave, then the field is rebuilt from free-field plane waves only. A plane
//! wave "from direction d" is `e^{i k d . x}` under the `e^{+iωt}` convention.

use alloc::vec::Vec;

use crate::field::Measurements;
use crate::geom::CartPoint;
use crate::linalg::{cholesky_solve, largest_eigenvalue, CMatrix};
use crate::specfun::{legendre_all, radial_propagators, Boundary, MAX_ORDER};
use crate::{Complex, Error, Result};

/// Default relative Tikhonov parameter (multiplies the largest singular value).
pub const DEFAULT_REG: f64 = 1e-3;

/// Orders kept in the steering series beyond `ceil(ka)`.
pub const DEFAULT_EXTRA_ORDERS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct PwModel {
    pub directions: Vec<CartPoint>,
    pub amplitudes: Vec<Complex>,
    pub k: f64,
    pub reg: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PwConfig {
    /// Arrival directions (unit vectors).
    pub directions: Vec<CartPoint>,
    /// Relative Tikhonov parameter `>= 0`.
    pub reg: f64,
    /// Steering series order; `None` picks `ceil(ka) + DEFAULT_EXTRA_ORDERS`.
    pub order: Option<usize>,
    pub k: f64,
    pub a: f64,
}

impl PwConfig {
    /// Dictionary equal to the microphone directions.
    pub fn from_mics(mics: &[CartPoint], k: f64, a: f64) -> Self {
        Self {
            directions: mics.iter().map(|p| p.normalized()).collect(),
            reg: DEFAULT_REG,
            order: None,
            k,
            a,
        }
    }

    pub fn series_order(&self) -> usize {
        self.order.unwrap_or_else(|| {
            (libm::ceil(self.k * self.a) as usize + DEFAULT_EXTRA_ORDERS).min(MAX_ORDER)
        })
    }
}

/// `Q x L` rigid-sphere steering matrix: entry `(q, l)` is the pressure at mic
/// `q` (on `r = a`) due to a unit plane wave from direction `l`,
/// `sum_n i^n (2n+1) G_n(a, a, k) P_n(cos Theta_ql)`.
pub fn steering_matrix(
    directions: &[CartPoint],
    mics: &[CartPoint],
    k: f64,
    a: f64,
    order: usize,
) -> Result<CMatrix> {
    if mics.iter().any(|p| libm::fabs(p.norm() - a) > 1e-9) {
        return Err(Error::Domain("steering microphones must lie on the sphere"));
    }
    if order < libm::ceil(k * a) as usize + 2 {
        return Err(Error::Domain("steering order must be at least ceil(ka) + 2"));
    }
    steering_matrix_with(Boundary::Rigid, directions, mics, k, a, order)
}

/// Steering matrix for points at any common radius `r >= a`; with
/// [`Boundary::Free`] the entries are the Jacobi-Anger partial sums of
/// `e^{i k r cos Theta}`.
pub fn steering_matrix_with(
    boundary: Boundary,
    directions: &[CartPoint],
    points: &[CartPoint],
    k: f64,
    a: f64,
    order: usize,
) -> Result<CMatrix> {
    if directions.is_empty() || points.is_empty() {
        return Err(Error::Domain("empty direction or point set"));
    }
    if order > MAX_ORDER {
        return Err(Error::Domain("steering order exceeds MAX_ORDER"));
    }
    if directions.iter().any(|d| libm::fabs(d.norm() - 1.0) > 1e-9) {
        return Err(Error::Domain("directions must be unit vectors"));
    }
    let r = points[0].norm();
    if points.iter().any(|p| libm::fabs(p.norm() - r) > 1e-9) {
        return Err(Error::Domain("steering points must share one radius"));
    }
    let g = radial_propagators(boundary, order, r, a, k)?;
    // i^n (2n+1) G_n
    let weights: Vec<Complex> = g
        .iter()
        .enumerate()
        .map(|(n, gn)| {
            let i_pow = match n % 4 {
                0 => Complex::new(1.0, 0.0),
                1 => Complex::new(0.0, 1.0),
                2 => Complex::new(-1.0, 0.0),
                _ => Complex::new(0.0, -1.0),
            };
            i_pow * gn * (2 * n + 1) as f64
        })
        .collect();
    let mut h = CMatrix::zeros(points.len(), directions.len());
    for (q, p) in points.iter().enumerate() {
        for (l, d) in directions.iter().enumerate() {
            let pn = legendre_all(order, p.cos_angle(*d));
            let v: Complex = weights.iter().zip(&pn).map(|(w, pl)| w * pl).sum();
            h.set(q, l, v);
        }
    }
    Ok(h)
}

/// Tikhonov fit `argmin |H w - p|^2 + reg^2 sigma_max^2 |w|^2` via the normal
/// equations.
pub fn solve_amplitudes(m: &Measurements, cfg: &PwConfig) -> Result<PwModel> {
    if m.is_empty() || cfg.directions.is_empty() {
        return Err(Error::Domain("need at least one measurement and one direction"));
    }
    if !(cfg.reg >= 0.0 && cfg.reg.is_finite()) {
        return Err(Error::Domain("regularization must be non-negative"));
    }
    let h = steering_matrix(&cfg.directions, &m.positions, cfg.k, cfg.a, cfg.series_order())?;
    let mut gram = h.gram();
    let sigma_max_sq = largest_eigenvalue(&gram);
    let shift = cfg.reg * cfg.reg * sigma_max_sq;
    for i in 0..gram.rows {
        let d = gram.get(i, i);
        gram.set(i, i, d + shift);
    }
    let rhs = h.adjoint_mul_vec(&m.pressures);
    let amplitudes = cholesky_solve(&gram, &rhs)?;
    Ok(PwModel {
        directions: cfg.directions.clone(),
        amplitudes,
        k: cfg.k,
        reg: cfg.reg,
    })
}

/// Fit residual `|H w - p|` of a model against the data it was fitted to.
pub fn fit_residual(m: &Measurements, cfg: &PwConfig, model: &PwModel) -> Result<f64> {
    let h = steering_matrix(&cfg.directions, &m.positions, cfg.k, cfg.a, cfg.series_order())?;
    let fitted = h.mul_vec(&model.amplitudes);
    Ok(libm::sqrt(
        fitted
            .iter()
            .zip(&m.pressures)
            .map(|(f, p)| (f - p).norm_sqr())
            .sum::<f64>(),
    ))
}

/// Free-field plane-wave sum `sum_l w_l e^{i k p . d_l}`.
pub fn reconstruct_pw(model: &PwModel, p: CartPoint) -> Complex {
    model
        .directions
        .iter()
        .zip(&model.amplitudes)
        .map(|(d, w)| w * Complex::from_polar(1.0, model.k * p.dot(*d)))
        .sum()
}
