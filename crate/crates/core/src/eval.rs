//! Error metrics, radius sweeps and field slices.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::field::{scene_pressure, ScatteringScene};
use crate::geom::{cart_to_sph, fibonacci_sphere_rotated, sph_to_cart, sphere_grid, CartPoint};
use crate::nn::{forward, MlpParams};
use crate::pw::{reconstruct_pw, PwModel};
use crate::rng::Xoshiro256;
use crate::sh::{reconstruct, ShCoefficients};
use crate::{Complex, Error, Result};

/// Floor applied to NMSE values (dB).
pub const NMSE_FLOOR_DB: f64 = -300.0;

/// Default sweep radii (m).
pub const DEFAULT_SWEEP_RADII: [f64; 7] = [0.042, 0.05, 0.06, 0.072, 0.08, 0.09, 0.1];

/// Default evaluation points per sweep radius.
pub const DEFAULT_POINTS_PER_RADIUS: usize = 2000;

/// Anything that can report a pressure at a point outside the sphere.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldEstimator {
    /// Simulated field divided by `scale` (the measurement normalization).
    GroundTruth { scene: ScatteringScene, scale: f64 },
    Sh(ShCoefficients),
    Pl(PwModel),
    Pinn(MlpParams),
}

impl FieldEstimator {
    pub fn label(&self) -> &'static str {
        match self {
            FieldEstimator::GroundTruth { .. } => "truth",
            FieldEstimator::Sh(_) => "sh",
            FieldEstimator::Pl(_) => "pl",
            FieldEstimator::Pinn(_) => "pinn",
        }
    }

    pub fn pressure(&self, p: CartPoint) -> Result<Complex> {
        match self {
            FieldEstimator::GroundTruth { scene, scale } => Ok(scene_pressure(scene, p)? / *scale),
            FieldEstimator::Sh(c) => reconstruct(c, cart_to_sph(p)),
            FieldEstimator::Pl(m) => Ok(reconstruct_pw(m, p)),
            FieldEstimator::Pinn(params) => {
                let [re, im] = forward(params, p);
                Ok(Complex::new(re, im))
            }
        }
    }

    pub fn pressures(&self, points: &[CartPoint]) -> Result<Vec<Complex>> {
        points.iter().map(|p| self.pressure(*p)).collect()
    }
}

/// Per-point `|P - P_hat|`.
pub fn error_map(
    truth: &FieldEstimator,
    est: &FieldEstimator,
    points: &[CartPoint],
) -> Result<Vec<f64>> {
    if points.is_empty() {
        return Err(Error::Domain("no evaluation points"));
    }
    points
        .iter()
        .map(|p| Ok((truth.pressure(*p)? - est.pressure(*p)?).norm()))
        .collect()
}

/// `10 log10(sum |P - P_hat|^2 / sum |P|^2)` over paired values, floored at
/// [`NMSE_FLOOR_DB`].
pub fn nmse_values(truth: &[Complex], est: &[Complex]) -> Result<f64> {
    if truth.len() != est.len() {
        return Err(Error::Shape {
            what: "estimate values",
            expected: truth.len(),
            found: est.len(),
        });
    }
    let num: f64 = truth.iter().zip(est).map(|(t, e)| (t - e).norm_sqr()).sum();
    let den: f64 = truth.iter().map(|t| t.norm_sqr()).sum();
    if !(den > 0.0) {
        return Err(Error::Domain("reference field has zero energy"));
    }
    if num == 0.0 {
        return Ok(NMSE_FLOOR_DB);
    }
    Ok((10.0 * libm::log10(num / den)).max(NMSE_FLOOR_DB))
}

pub fn nmse(truth: &FieldEstimator, est: &FieldEstimator, points: &[CartPoint]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::Domain("no evaluation points"));
    }
    nmse_values(&truth.pressures(points)?, &est.pressures(points)?)
}

/// One row of a radius sweep: NMSE (dB) of each estimator, in input order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub radius: f64,
    pub nmse: Vec<f64>,
}

/// Evaluation points for one sweep radius: a Fibonacci lattice whose azimuth
/// is offset by `2 pi u`, with `u` the next uniform draw of the sweep's
/// generator.
pub fn sweep_points(radius: f64, count: usize, rng: &mut Xoshiro256) -> Result<Vec<CartPoint>> {
    let phi0 = 2.0 * PI * rng.next_f64();
    fibonacci_sphere_rotated(count, radius, phi0)
}

pub fn radius_sweep(
    truth: &FieldEstimator,
    estimators: &[&FieldEstimator],
    radii: &[f64],
    points_per_radius: usize,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    let a = match truth {
        FieldEstimator::GroundTruth { scene, .. } => scene.a,
        _ => 0.0,
    };
    if radii.iter().any(|&r| !(r >= a * (1.0 - 1e-12)) || !r.is_finite()) {
        return Err(Error::Domain("sweep radius inside the sphere"));
    }
    let mut rng = Xoshiro256::seed_from_u64(seed);
    radii
        .iter()
        .map(|&radius| {
            let points = sweep_points(radius, points_per_radius, &mut rng)?;
            let reference = truth.pressures(&points)?;
            let nmse = estimators
                .iter()
                .map(|e| nmse_values(&reference, &e.pressures(&points)?))
                .collect::<Result<Vec<_>>>()?;
            Ok(SweepRow { radius, nmse })
        })
        .collect()
}

/// One grid cell of a field slice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceRow {
    pub theta: f64,
    pub phi: f64,
    pub re: f64,
    pub im: f64,
    /// `|P_truth - P_est|`.
    pub err: f64,
}

/// Estimate and its error against `truth` on the `(theta, phi)` grid at radius `r`.
pub fn field_slice(
    est: &FieldEstimator,
    truth: &FieldEstimator,
    r: f64,
    n_theta: usize,
    n_phi: usize,
) -> Result<Vec<SliceRow>> {
    sphere_grid(r, n_theta, n_phi)?
        .into_iter()
        .map(|s| {
            let p = sph_to_cart(s);
            let v = est.pressure(p)?;
            let t = truth.pressure(p)?;
            Ok(SliceRow {
                theta: s.theta,
                phi: s.phi,
                re: v.re,
                im: v.im,
                err: (t - v).norm(),
            })
        })
        .collect()
}
