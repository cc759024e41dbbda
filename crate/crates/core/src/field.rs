//! Ground-truth simulator: point sources near a rigid sphere.
//!
//! The pressure at `x` (with `|x| = r`) due to a unit point source at `s`
//! (`|s| = r_s > r`) is
//!
//! ```text
//! P = (-i k / 4 pi) sum_n (2n + 1) G_n(r, a, k) h_n^(2)(k r_s) P_n(cos Theta)
//! ```
//!
//! which reduces to `e^{-ik|x - s|} / (4 pi |x - s|)` when the scattered part of
//! `G_n` is dropped.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::geom::CartPoint;
use crate::rng::Xoshiro256;
use crate::specfun::{self, BesselTable, Boundary, MAX_ORDER};
use crate::{Complex, Error, Result};

/// Stop once `|term| < SERIES_TOL * |sum|` for `SERIES_RUN` consecutive orders.
const SERIES_TOL: f64 = 1e-12;
const SERIES_RUN: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSource {
    pub position: CartPoint,
    pub amplitude: Complex,
}

impl PointSource {
    pub fn unit(position: CartPoint) -> Self {
        Self {
            position,
            amplitude: Complex::new(1.0, 0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringScene {
    /// Sphere radius (m).
    pub a: f64,
    /// Speed of sound (m/s).
    pub c: f64,
    /// Frequency (Hz).
    pub f: f64,
    pub sources: Vec<PointSource>,
}

impl ScatteringScene {
    /// 42 mm sphere, 343 m/s, 1 kHz, two unit sources at (2.5, 0.8, 0) m and
    /// (-2, -0.6, 1.2) m.
    pub fn reference() -> Self {
        Self {
            a: 0.042,
            c: 343.0,
            f: 1000.0,
            sources: alloc::vec![
                PointSource::unit(CartPoint::new(2.5, 0.8, 0.0)),
                PointSource::unit(CartPoint::new(-2.0, -0.6, 1.2)),
            ],
        }
    }

    /// Wavenumber `k = 2 pi f / c`.
    pub fn k(&self) -> f64 {
        2.0 * PI * self.f / self.c
    }

    pub fn validate(&self) -> Result<()> {
        for v in [self.a, self.c, self.f] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain("scene radius, sound speed and frequency must be positive"));
            }
        }
        for s in &self.sources {
            if !s.position.is_finite() || s.position.norm() <= self.a {
                return Err(Error::Domain("source must lie outside the sphere"));
            }
            if !(s.amplitude.re.is_finite() && s.amplitude.im.is_finite()) {
                return Err(Error::Domain("source amplitude must be finite"));
            }
        }
        Ok(())
    }
}

/// Pressure at `obs` from source `source_index` alone.
pub fn point_source_pressure(
    scene: &ScatteringScene,
    source_index: usize,
    obs: CartPoint,
) -> Result<Complex> {
    let source = scene
        .sources
        .get(source_index)
        .ok_or(Error::Domain("source index out of range"))?;
    source_pressure_with(Boundary::Rigid, scene.a, scene.k(), source, obs)
}

/// Point-source series with an explicit boundary; [`Boundary::Free`] yields
/// the free-field Green's function.
pub fn source_pressure_with(
    boundary: Boundary,
    a: f64,
    k: f64,
    source: &PointSource,
    obs: CartPoint,
) -> Result<Complex> {
    let r = obs.norm();
    let rs = source.position.norm();
    if !obs.is_finite() || r < a * (1.0 - 1e-9) {
        return Err(Error::Domain("observation point inside the sphere"));
    }
    if rs <= r {
        return Err(Error::Domain("source must lie outside the observation radius"));
    }
    let r = r.max(a);
    let cos_t = obs.cos_angle(source.position);
    let legendre = specfun::legendre_all(MAX_ORDER, cos_t);
    let at_r = BesselTable::new(MAX_ORDER + 1, k * r)?;
    let at_s = BesselTable::new(MAX_ORDER + 1, k * rs)?;
    let at_a = BesselTable::new(MAX_ORDER + 1, k * a)?;

    let mut sum = Complex::new(0.0, 0.0);
    let mut small_run = 0;
    for n in 0..=MAX_ORDER {
        let mut g = Complex::new(at_r.j(n), 0.0);
        if boundary == Boundary::Rigid {
            g -= at_a.j_prime(n) / at_a.h2_prime(n) * at_r.h2(n);
        }
        let term = g * at_s.h2(n) * ((2 * n + 1) as f64 * legendre[n]);
        sum += term;
        if term.norm() < SERIES_TOL * sum.norm() {
            small_run += 1;
            if small_run >= SERIES_RUN {
                break;
            }
        } else {
            small_run = 0;
        }
    }
    let p = sum * Complex::new(0.0, -k / (4.0 * PI)) * source.amplitude;
    if !(p.re.is_finite() && p.im.is_finite()) {
        return Err(Error::Numerical("non-finite pressure"));
    }
    Ok(p)
}

/// Superposition of every source in the scene; zero for an empty scene.
pub fn scene_pressure(scene: &ScatteringScene, obs: CartPoint) -> Result<Complex> {
    let k = scene.k();
    let mut p = Complex::new(0.0, 0.0);
    if scene.sources.is_empty() {
        if obs.norm() < scene.a * (1.0 - 1e-9) {
            return Err(Error::Domain("observation point inside the sphere"));
        }
        return Ok(p);
    }
    for s in &scene.sources {
        p += source_pressure_with(Boundary::Rigid, scene.a, k, s, obs)?;
    }
    Ok(p)
}

/// Complex pressure samples with the normalization that has been applied.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurements {
    pub positions: Vec<CartPoint>,
    pub pressures: Vec<Complex>,
    /// Product of every normalization divisor applied so far (1 when raw).
    pub scale: f64,
    /// SNR of the added noise, `None` for noiseless data.
    pub snr_db: Option<f64>,
}

impl Measurements {
    pub fn new(positions: Vec<CartPoint>, pressures: Vec<Complex>) -> Result<Self> {
        if positions.len() != pressures.len() {
            return Err(Error::Shape {
                what: "measurement pressures",
                expected: positions.len(),
                found: pressures.len(),
            });
        }
        Ok(Self {
            positions,
            pressures,
            scale: 1.0,
            snr_db: None,
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Mean `|P|^2` over the set.
    pub fn mean_power(&self) -> f64 {
        self.pressures.iter().map(|p| p.norm_sqr()).sum::<f64>() / self.len() as f64
    }
}

/// Noiseless scene pressure at every position.
pub fn simulate(scene: &ScatteringScene, positions: &[CartPoint]) -> Result<Measurements> {
    scene.validate()?;
    let pressures = positions
        .iter()
        .map(|&p| scene_pressure(scene, p))
        .collect::<Result<Vec<_>>>()?;
    Measurements::new(positions.to_vec(), pressures)
}

/// Adds circular complex white Gaussian noise with total power
/// `mean|P|^2 * 10^(-snr_db/10)` (half in each component). An infinite
/// `snr_db` leaves the data untouched.
///
/// Draw order: for each sample, real part then imaginary part.
pub fn add_noise(m: &Measurements, snr_db: f64, seed: u64) -> Result<Measurements> {
    if m.is_empty() {
        return Err(Error::Domain("cannot add noise to empty measurements"));
    }
    if snr_db.is_nan() {
        return Err(Error::Domain("SNR must be a number"));
    }
    if snr_db == f64::INFINITY {
        return Ok(m.clone());
    }
    let noise_power = m.mean_power() * libm::pow(10.0, -snr_db / 10.0);
    let sigma = libm::sqrt(noise_power / 2.0);
    let mut rng = Xoshiro256::seed_from_u64(seed);
    let pressures = m
        .pressures
        .iter()
        .map(|p| {
            let re = rng.normal();
            let im = rng.normal();
            p + Complex::new(re, im) * sigma
        })
        .collect();
    Ok(Measurements {
        positions: m.positions.clone(),
        pressures,
        scale: m.scale,
        snr_db: Some(snr_db),
    })
}

/// Divides by `s = max_q max(|Re P_q|, |Im P_q|)` so all components land in
/// `[-1, 1]`; `s` is folded into `scale`.
pub fn normalize(m: &Measurements) -> Result<Measurements> {
    if m.is_empty() {
        return Err(Error::Domain("cannot normalize empty measurements"));
    }
    let s = m
        .pressures
        .iter()
        .map(|p| libm::fabs(p.re).max(libm::fabs(p.im)))
        .fold(0.0, f64::max);
    if s == 0.0 {
        return Err(Error::Domain("cannot normalize an all-zero field"));
    }
    if !s.is_finite() {
        return Err(Error::Numerical("non-finite pressure"));
    }
    Ok(Measurements {
        positions: m.positions.clone(),
        pressures: m.pressures.iter().map(|p| p / s).collect(),
        scale: m.scale * s,
        snr_db: m.snr_db,
    })
}
