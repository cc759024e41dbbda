//! Special functions for the rigid-sphere problem.
//!
//! Spherical Bessel functions of the first (`j_n`) and second (`y_n`) kind,
//! the outgoing spherical Hankel function `h_n^(2) = j_n - i y_n`, Legendre
//! polynomials, orthonormal complex spherical harmonics (Condon-Shortley
//! phase) and the rigid-sphere radial propagator
//!
//! ```text
//! G_n(r, a, k) = j_n(kr) - [j_n'(ka) / h_n^(2)'(ka)] h_n^(2)(kr)
//! ```
//!
//! whose radial derivative vanishes at `r = a`.
//!
//! All functions are real-argument only and limited to orders `n <= MAX_ORDER`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::{Complex, Error, Result};

/// Highest supported order for every function in this module.
pub const MAX_ORDER: usize = 60;

/// Below this argument `j_n` is summed from its power series.
const SERIES_LIMIT: f64 = 1.0;

/// Relative slack allowed when checking `r >= a`, so that points placed on the
/// sphere by scaling a unit vector are accepted.
const RADIUS_SLACK: f64 = 1e-9;

fn check_order(n: usize) -> Result<()> {
    if n > MAX_ORDER {
        return Err(Error::Domain("order exceeds MAX_ORDER"));
    }
    Ok(())
}

fn check_nonneg(x: f64) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain("argument must be finite and non-negative"));
    }
    Ok(())
}

fn check_positive(x: f64) -> Result<()> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain("argument must be finite and positive"));
    }
    Ok(())
}

/// Power series `j_n(x) = x^n/(2n+1)!! * sum_k (-x^2/2)^k / (k! (2n+3)...(2n+2k+1))`.
fn j_series(n: usize, x: f64) -> f64 {
    let mut prefactor = 1.0;
    for i in 1..=n {
        prefactor *= x / (2 * i + 1) as f64;
    }
    let half_sq = -0.5 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        term *= half_sq / (k as f64 * (2 * n + 2 * k + 1) as f64);
        sum += term;
        if libm::fabs(term) < 1e-17 * libm::fabs(sum) {
            break;
        }
    }
    prefactor * sum
}

fn j0_closed(x: f64) -> f64 {
    libm::sin(x) / x
}

fn j1_closed(x: f64) -> f64 {
    let (s, c) = (libm::sin(x), libm::cos(x));
    s / (x * x) - c / x
}

fn j2_closed(x: f64) -> f64 {
    let (s, c) = (libm::sin(x), libm::cos(x));
    (3.0 / (x * x) - 1.0) * s / x - 3.0 * c / (x * x)
}

/// `j_0..=j_nmax` at `x`. Series below [`SERIES_LIMIT`], upward recurrence when
/// `x >= nmax`, Miller's downward recurrence otherwise.
fn j_array(nmax: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; nmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    if x < SERIES_LIMIT {
        for (n, v) in out.iter_mut().enumerate() {
            *v = j_series(n, x);
        }
        return out;
    }
    let j0 = j0_closed(x);
    let j1 = j1_closed(x);
    out[0] = j0;
    if nmax == 0 {
        return out;
    }
    out[1] = j1;
    if x >= nmax as f64 {
        for n in 1..nmax {
            out[n + 1] = (2 * n + 1) as f64 / x * out[n] - out[n - 1];
        }
        return out;
    }

    // Miller: start well above both nmax and x, recur down, then fix the
    // normalization against whichever of j_0, j_1 is larger in magnitude.
    let top = nmax.max(x as usize) + 20 + libm::sqrt(40.0 * nmax as f64) as usize;
    let mut f_next = 0.0;
    let mut f_cur = 1e-30;
    for k in (1..=top).rev() {
        let f_prev = (2 * k + 1) as f64 / x * f_cur - f_next;
        f_next = f_cur;
        f_cur = f_prev;
        // f_cur now holds order k-1, f_next order k
        if k - 1 <= nmax {
            out[k - 1] = f_cur;
        }
        if k <= nmax {
            out[k] = f_next;
        }
        if libm::fabs(f_cur) > 1e200 {
            f_cur *= 1e-200;
            f_next *= 1e-200;
            for v in out.iter_mut() {
                *v *= 1e-200;
            }
        }
    }
    let scale = if libm::fabs(j0) >= libm::fabs(j1) {
        j0 / out[0]
    } else {
        j1 / out[1]
    };
    for v in out.iter_mut() {
        *v *= scale;
    }
    out
}

/// `y_0..=y_nmax` at `x > 0` by upward recurrence.
fn y_array(nmax: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; nmax + 1];
    let (s, c) = (libm::sin(x), libm::cos(x));
    out[0] = -c / x;
    if nmax >= 1 {
        out[1] = -c / (x * x) - s / x;
    }
    for n in 1..nmax {
        out[n + 1] = (2 * n + 1) as f64 / x * out[n] - out[n - 1];
    }
    out
}

/// Spherical Bessel function of the first kind `j_n(x)`, `x >= 0`.
pub fn sph_bessel_j(n: usize, x: f64) -> Result<f64> {
    check_order(n)?;
    check_nonneg(x)?;
    if x == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    if x < SERIES_LIMIT {
        return Ok(j_series(n, x));
    }
    Ok(match n {
        0 => j0_closed(x),
        1 => j1_closed(x),
        2 => j2_closed(x),
        _ => j_array(n, x)[n],
    })
}

/// Spherical Bessel function of the second kind `y_n(x)`, `x > 0`.
pub fn sph_bessel_y(n: usize, x: f64) -> Result<f64> {
    check_order(n)?;
    check_positive(x)?;
    Ok(y_array(n, x)[n])
}

/// Spherical Hankel function of the second kind `h_n^(2)(x) = j_n(x) - i y_n(x)`.
pub fn sph_hankel2(n: usize, x: f64) -> Result<Complex> {
    check_order(n)?;
    check_positive(x)?;
    Ok(Complex::new(sph_bessel_j(n, x)?, -sph_bessel_y(n, x)?))
}

/// `j_n'(x)`. Defined for `x >= 0`; at the origin only `j_1'(0) = 1/3` is non-zero.
pub fn sph_bessel_j_prime(n: usize, x: f64) -> Result<f64> {
    check_order(n)?;
    check_nonneg(x)?;
    if x == 0.0 {
        return Ok(if n == 1 { 1.0 / 3.0 } else { 0.0 });
    }
    let table = BesselTable::new(n + 1, x)?;
    Ok(table.j_prime(n))
}

/// `y_n'(x)`, `x > 0`.
pub fn sph_bessel_y_prime(n: usize, x: f64) -> Result<f64> {
    check_order(n)?;
    check_positive(x)?;
    let y = y_array(n + 1, x);
    Ok(if n == 0 {
        -y[1]
    } else {
        y[n - 1] - (n + 1) as f64 / x * y[n]
    })
}

/// `h_n^(2)'(x)`, `x > 0`.
pub fn sph_hankel2_prime(n: usize, x: f64) -> Result<Complex> {
    check_order(n)?;
    check_positive(x)?;
    let table = BesselTable::new(n + 1, x)?;
    Ok(table.h2_prime(n))
}

/// `j_n`, `y_n` for every order up to `nmax` at a single positive argument.
#[derive(Debug, Clone)]
pub struct BesselTable {
    x: f64,
    j: Vec<f64>,
    y: Vec<f64>,
}

impl BesselTable {
    /// Tabulates orders `0..=nmax` (`nmax <= MAX_ORDER + 1` so that
    /// derivatives up to `MAX_ORDER` are available).
    pub fn new(nmax: usize, x: f64) -> Result<Self> {
        if nmax > MAX_ORDER + 1 {
            return Err(Error::Domain("order exceeds MAX_ORDER"));
        }
        check_positive(x)?;
        let mut j = j_array(nmax, x);
        if x >= SERIES_LIMIT && nmax >= 2 {
            j[2] = j2_closed(x);
        }
        Ok(Self {
            x,
            j,
            y: y_array(nmax, x),
        })
    }

    pub fn max_order(&self) -> usize {
        self.j.len() - 1
    }

    pub fn arg(&self) -> f64 {
        self.x
    }

    pub fn j(&self, n: usize) -> f64 {
        self.j[n]
    }

    pub fn y(&self, n: usize) -> f64 {
        self.y[n]
    }

    pub fn h2(&self, n: usize) -> Complex {
        Complex::new(self.j[n], -self.y[n])
    }

    /// `f_n' = f_{n-1} - (n+1)/x f_n`, with `f_0' = -f_1`.
    pub fn j_prime(&self, n: usize) -> f64 {
        if n == 0 {
            -self.j[1]
        } else {
            self.j[n - 1] - (n + 1) as f64 / self.x * self.j[n]
        }
    }

    pub fn y_prime(&self, n: usize) -> f64 {
        if n == 0 {
            -self.y[1]
        } else {
            self.y[n - 1] - (n + 1) as f64 / self.x * self.y[n]
        }
    }

    pub fn h2_prime(&self, n: usize) -> Complex {
        Complex::new(self.j_prime(n), -self.y_prime(n))
    }
}

/// Legendre polynomial `P_n(t)` by the three-term recurrence.
pub fn legendre_p(n: usize, t: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&t) {
        return Err(Error::Domain("Legendre argument outside [-1, 1]"));
    }
    Ok(legendre_all(n, t)[n])
}

/// `P_0(t)..=P_nmax(t)`; the caller guarantees `|t| <= 1`.
pub(crate) fn legendre_all(nmax: usize, t: f64) -> Vec<f64> {
    let mut p = vec![0.0; nmax + 1];
    p[0] = 1.0;
    if nmax >= 1 {
        p[1] = t;
    }
    for k in 1..nmax {
        p[k + 1] = ((2 * k + 1) as f64 * t * p[k] - k as f64 * p[k - 1]) / (k + 1) as f64;
    }
    p
}

/// Flat index of `(n, m)` in an SH coefficient vector: `n^2 + n + m`.
#[inline]
pub fn sh_index(n: usize, m: i32) -> usize {
    (n * n + n) .wrapping_add_signed(m as isize)
}

/// Orthonormal complex spherical harmonic `Y_n^m(theta, phi)` with the
/// Condon-Shortley phase.
pub fn sph_harmonic(n: usize, m: i32, theta: f64, phi: f64) -> Result<Complex> {
    check_order(n)?;
    if m.unsigned_abs() as usize > n {
        return Err(Error::Domain("|m| must not exceed n"));
    }
    if !(0.0..=PI).contains(&theta) || !phi.is_finite() {
        return Err(Error::Domain("theta must lie in [0, pi]"));
    }
    let mu = m.unsigned_abs() as usize;
    let p = normalized_alf_column(n, mu, libm::cos(theta), libm::sin(theta));
    let y = Complex::from_polar(p, mu as f64 * phi);
    Ok(if m >= 0 {
        y
    } else if mu % 2 == 0 {
        y.conj()
    } else {
        -y.conj()
    })
}

/// All `Y_n^m` for `n <= nmax` at one direction, indexed by [`sh_index`].
pub fn sph_harmonics_all(nmax: usize, theta: f64, phi: f64) -> Result<Vec<Complex>> {
    check_order(nmax)?;
    if !(0.0..=PI).contains(&theta) || !phi.is_finite() {
        return Err(Error::Domain("theta must lie in [0, pi]"));
    }
    let (ct, st) = (libm::cos(theta), libm::sin(theta));
    let mut out = vec![Complex::new(0.0, 0.0); (nmax + 1) * (nmax + 1)];
    for mu in 0..=nmax {
        let e = Complex::from_polar(1.0, mu as f64 * phi);
        let sign = if mu % 2 == 0 { 1.0 } else { -1.0 };
        let column = normalized_alf_range(nmax, mu, ct, st);
        for (offset, p) in column.into_iter().enumerate() {
            let n = mu + offset;
            let y = e * p;
            out[sh_index(n, mu as i32)] = y;
            if mu > 0 {
                out[sh_index(n, -(mu as i32))] = y.conj() * sign;
            }
        }
    }
    Ok(out)
}

/// Normalized associated Legendre values `Pbar_n^mu(cos theta)` for
/// `n = mu..=nmax`, including the Condon-Shortley phase and the factor
/// `sqrt((2n+1)/(4 pi) (n-mu)!/(n+mu)!)`.
fn normalized_alf_range(nmax: usize, mu: usize, ct: f64, st: f64) -> Vec<f64> {
    let mut pmm = 1.0 / libm::sqrt(4.0 * PI);
    for i in 1..=mu {
        pmm *= -libm::sqrt((2 * i + 1) as f64 / (2 * i) as f64) * st;
    }
    let mut out = Vec::with_capacity(nmax + 1 - mu);
    out.push(pmm);
    if nmax == mu {
        return out;
    }
    let mut prev = pmm;
    let mut cur = ct * libm::sqrt((2 * mu + 3) as f64) * pmm;
    out.push(cur);
    let m2 = (mu * mu) as f64;
    for l in (mu + 2)..=nmax {
        let lf = l as f64;
        let a = libm::sqrt((4.0 * lf * lf - 1.0) / (lf * lf - m2));
        let lm1 = lf - 1.0;
        let b = libm::sqrt((lm1 * lm1 - m2) / (4.0 * lm1 * lm1 - 1.0));
        let next = a * (ct * cur - b * prev);
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

fn normalized_alf_column(n: usize, mu: usize, ct: f64, st: f64) -> f64 {
    normalized_alf_range(n, mu, ct, st)[n - mu]
}

/// Which radial solution to use: rigid-sphere (scattering included) or the
/// free-field `j_n` alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    #[default]
    Rigid,
    Free,
}

/// Rigid-sphere scattering coefficient `j_n'(ka) / h_n^(2)'(ka)`.
pub fn rigid_scattering_coefficient(n: usize, ka: f64) -> Result<Complex> {
    check_order(n)?;
    check_positive(ka)?;
    let t = BesselTable::new(n + 1, ka)?;
    Ok(t.j_prime(n) / t.h2_prime(n))
}

fn check_radii(r: f64, a: f64, k: f64) -> Result<()> {
    check_positive(a)?;
    check_positive(k)?;
    if !r.is_finite() || r < a * (1.0 - RADIUS_SLACK) {
        return Err(Error::Domain("radius inside the rigid sphere"));
    }
    Ok(())
}

/// Radial propagator `G_n(r, a, k)` for `r >= a`.
pub fn radial_propagator(n: usize, r: f64, a: f64, k: f64) -> Result<Complex> {
    radial_propagator_with(Boundary::Rigid, n, r, a, k)
}

/// `G_n` with an explicit boundary choice; [`Boundary::Free`] drops the
/// scattered term and leaves `j_n(kr)`.
pub fn radial_propagator_with(
    boundary: Boundary,
    n: usize,
    r: f64,
    a: f64,
    k: f64,
) -> Result<Complex> {
    check_order(n)?;
    check_radii(r, a, k)?;
    let at_r = BesselTable::new(n + 1, k * r)?;
    let incident = Complex::new(at_r.j(n), 0.0);
    match boundary {
        Boundary::Free => Ok(incident),
        Boundary::Rigid => {
            let coeff = rigid_scattering_coefficient(n, k * a)?;
            Ok(incident - coeff * at_r.h2(n))
        }
    }
}

/// Radial derivative `dG_n/dr = k [j_n'(kr) - (j_n'(ka)/h_n^(2)'(ka)) h_n^(2)'(kr)]`.
pub fn radial_propagator_prime(n: usize, r: f64, a: f64, k: f64) -> Result<Complex> {
    radial_propagator_prime_with(Boundary::Rigid, n, r, a, k)
}

pub fn radial_propagator_prime_with(
    boundary: Boundary,
    n: usize,
    r: f64,
    a: f64,
    k: f64,
) -> Result<Complex> {
    check_order(n)?;
    check_radii(r, a, k)?;
    let at_r = BesselTable::new(n + 1, k * r)?;
    let incident = Complex::new(at_r.j_prime(n), 0.0);
    let inner = match boundary {
        Boundary::Free => incident,
        Boundary::Rigid => {
            let coeff = rigid_scattering_coefficient(n, k * a)?;
            incident - coeff * at_r.h2_prime(n)
        }
    };
    Ok(inner * k)
}

/// `G_0..=G_nmax` at one radius, sharing one Bessel table per argument.
pub fn radial_propagators(
    boundary: Boundary,
    nmax: usize,
    r: f64,
    a: f64,
    k: f64,
) -> Result<Vec<Complex>> {
    check_order(nmax)?;
    check_radii(r, a, k)?;
    let at_r = BesselTable::new(nmax + 1, k * r)?;
    let at_a = BesselTable::new(nmax + 1, k * a)?;
    Ok((0..=nmax)
        .map(|n| {
            let incident = Complex::new(at_r.j(n), 0.0);
            match boundary {
                Boundary::Free => incident,
                Boundary::Rigid => incident - at_a.j_prime(n) / at_a.h2_prime(n) * at_r.h2(n),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    /// Independent oracle: straight power series of j_1 with 30 terms.
    fn j1_power_series(x: f64) -> f64 {
        // j_1(x) = sum_k (-1)^k 2^k (k+1)! x^(2k+1) / (2k+3)!  ... expressed via
        // x/3 * sum_k (-x^2/2)^k / (k! * 5*7*...*(2k+3))
        let mut sum = 0.0;
        for k in 0..30u32 {
            let mut denom = 1.0;
            for i in 1..=k {
                denom *= i as f64 * (2 * i + 3) as f64;
            }
            sum += (-x * x / 2.0).powi(k as i32) / denom;
        }
        x / 3.0 * sum
    }

    #[test]
    fn j_trivial_values() {
        assert!(sph_bessel_j(0, PI).unwrap().abs() < 1e-14);
        assert_eq!(sph_bessel_j(1, 0.0).unwrap(), 0.0);
        assert_eq!(sph_bessel_j(0, 0.0).unwrap(), 1.0);
        assert!(rel(sph_bessel_j(1, 1.0).unwrap(), j1_power_series(1.0)) < 1e-12);
    }

    #[test]
    fn j_domain_errors() {
        assert!(sph_bessel_j(0, -1.0).is_err());
        assert!(sph_bessel_j(MAX_ORDER + 1, 1.0).is_err());
        assert!(sph_bessel_y(0, 0.0).is_err());
        assert!(sph_bessel_y(2, -0.3).is_err());
    }

    #[test]
    fn j_regimes_agree() {
        // series, closed form, upward and Miller must meet continuously
        for n in 0..=12 {
            for &x in &[0.3, 0.999, 1.0, 1.5, 4.0, 11.0, 12.0, 13.0] {
                let direct = sph_bessel_j(n, x).unwrap();
                let series = j_series(n, x);
                if x < 5.0 {
                    assert!(
                        (direct - series).abs() <= 1e-12 * series.abs().max(1e-12),
                        "n={n} x={x}: {direct} vs {series}"
                    );
                }
                let arr = j_array(12, x)[n];
                assert!((direct - arr).abs() <= 1e-11 * direct.abs().max(1e-14));
            }
        }
    }

    #[test]
    fn y_trivial_values() {
        assert!(sph_bessel_y(0, PI / 2.0).unwrap().abs() < 1e-14);
        assert!((sph_bessel_y(0, PI).unwrap() - 1.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn hankel_values() {
        let h = sph_hankel2(0, PI).unwrap();
        assert!(h.re.abs() < 1e-14);
        assert!((h.im + 1.0 / PI).abs() < 1e-15);
        for &x in &[0.01, 0.5, 3.0, 40.0] {
            assert!(rel(sph_hankel2(0, x).unwrap().norm(), 1.0 / x) < 1e-13);
        }
    }

    #[test]
    fn hankel_matches_direct_recurrence_oracle() {
        // independent: both kinds by their own upward recurrence from closed forms
        let x: f64 = 0.77;
        let (s, c) = (x.sin(), x.cos());
        let mut jj = [s / x, s / (x * x) - c / x, 0.0, 0.0];
        let mut yy = [-c / x, -c / (x * x) - s / x, 0.0, 0.0];
        for n in 1..3 {
            yy[n + 1] = (2 * n + 1) as f64 / x * yy[n] - yy[n - 1];
        }
        // j by the explicit closed form of j_3
        jj[3] = (15.0 / x.powi(4) - 6.0 / (x * x)) * s - (15.0 / x.powi(3) - 1.0 / x) * c;
        let h = sph_hankel2(3, x).unwrap();
        assert!(rel(h.re, jj[3]) < 1e-9);
        assert!(rel(h.im, -yy[3]) < 1e-10);
    }

    #[test]
    fn derivative_identities() {
        let j0p = sph_bessel_j_prime(0, 1.0).unwrap();
        assert!((j0p + sph_bessel_j(1, 1.0).unwrap()).abs() < 1e-12);

        let h = 1e-6;
        let x = 0.77;
        let fd = (sph_bessel_j(2, x + h).unwrap() - sph_bessel_j(2, x - h).unwrap()) / (2.0 * h);
        assert!(rel(sph_bessel_j_prime(2, x).unwrap(), fd) < 1e-6);
        let fdh = (sph_hankel2(2, x + h).unwrap() - sph_hankel2(2, x - h).unwrap()) / (2.0 * h);
        let hp = sph_hankel2_prime(2, x).unwrap();
        assert!((hp - fdh).norm() / hp.norm() < 1e-6);

        let x = 2.5;
        let w = sph_bessel_j(4, x).unwrap() * sph_bessel_y_prime(4, x).unwrap()
            - sph_bessel_j_prime(4, x).unwrap() * sph_bessel_y(4, x).unwrap();
        assert!(rel(w, 1.0 / (x * x)) < 1e-10);
    }

    #[test]
    fn j_prime_at_origin() {
        assert_eq!(sph_bessel_j_prime(0, 0.0).unwrap(), 0.0);
        assert_eq!(sph_bessel_j_prime(1, 0.0).unwrap(), 1.0 / 3.0);
        assert_eq!(sph_bessel_j_prime(3, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn wronskian_grid() {
        for n in 0..=8 {
            for &x in &[0.1, 0.77, 2.5, 10.0] {
                let w = sph_bessel_j(n, x).unwrap() * sph_bessel_y_prime(n, x).unwrap()
                    - sph_bessel_j_prime(n, x).unwrap() * sph_bessel_y(n, x).unwrap();
                assert!(rel(w, 1.0 / (x * x)) < 1e-9, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn legendre_values() {
        for &t in &[-1.0, 0.0, 0.5, 1.0] {
            assert_eq!(legendre_p(1, t).unwrap(), t);
        }
        for n in 0..=10 {
            assert!((legendre_p(n, 1.0).unwrap() - 1.0).abs() < 1e-15);
        }
        let t: f64 = 0.3;
        let explicit = (63.0 * t.powi(5) - 70.0 * t.powi(3) + 15.0 * t) / 8.0;
        assert!((legendre_p(5, t).unwrap() - explicit).abs() < 1e-13);
        assert!(legendre_p(2, 1.0 + 1e-9).is_err());
    }

    #[test]
    fn harmonic_values() {
        let y00 = sph_harmonic(0, 0, 1.2, 2.1).unwrap();
        assert!((y00.re - 0.282_094_791_8).abs() < 1e-10 && y00.im == 0.0);
        let th = 0.7;
        let y10 = sph_harmonic(1, 0, th, 0.4).unwrap();
        assert!((y10.re - (3.0 / (4.0 * PI)).sqrt() * f64::cos(th)).abs() < 1e-15);
        assert!(sph_harmonic(1, 0, PI / 2.0, 0.0).unwrap().norm() < 1e-16);
        assert!(sph_harmonic(2, 3, 0.1, 0.1).is_err());
        assert!(sph_harmonic(2, -3, 0.1, 0.1).is_err());
    }

    #[test]
    fn harmonic_table_matches_scalar() {
        let (th, ph) = (1.1, 4.3);
        let table = sph_harmonics_all(6, th, ph).unwrap();
        for n in 0..=6usize {
            for m in -(n as i32)..=(n as i32) {
                let y = sph_harmonic(n, m, th, ph).unwrap();
                assert!((table[sh_index(n, m)] - y).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn conjugation_symmetry() {
        for n in 0..=8usize {
            for m in 1..=(n as i32) {
                let (th, ph) = (0.3 + 0.1 * n as f64, 0.2 * m as f64 + 1.0);
                let pos = sph_harmonic(n, m, th, ph).unwrap();
                let neg = sph_harmonic(n, -m, th, ph).unwrap();
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                assert!((neg - pos.conj() * sign).norm() <= 1e-15 * pos.norm().max(1.0));
            }
        }
    }

    #[test]
    fn rigid_boundary_derivative_vanishes() {
        let a = 0.042;
        let k = 0.77 / a;
        for n in 0..=6 {
            let g = radial_propagator(n, a, a, k).unwrap();
            let gp = radial_propagator_prime(n, a, a, k).unwrap();
            assert!(gp.norm() < 1e-12 * g.norm(), "n={n}");
        }
    }

    #[test]
    fn propagator_prime_matches_finite_difference() {
        let a = 0.042;
        let k = 0.77 / a;
        let r = 1.5 * a;
        let h = 1e-6 * a;
        for n in 0..=5 {
            let fd = (radial_propagator(n, r + h, a, k).unwrap()
                - radial_propagator(n, r - h, a, k).unwrap())
                / (2.0 * h);
            let gp = radial_propagator_prime(n, r, a, k).unwrap();
            assert!((gp - fd).norm() / gp.norm() < 1e-6, "n={n}");
        }
    }

    #[test]
    fn free_field_limits() {
        let (a, k) = (0.042, 18.3);
        let r = 0.07;
        for n in 0..=4 {
            let g = radial_propagator_with(Boundary::Free, n, r, a, k).unwrap();
            let j = sph_bessel_j(n, k * r).unwrap();
            assert!(g.im == 0.0 && (g.re - j).abs() <= 1e-14 * j.abs());
        }
        let gp = radial_propagator_prime_with(Boundary::Free, 0, r, a, k).unwrap();
        assert!((gp.re - k * sph_bessel_j_prime(0, k * r).unwrap()).abs() < 1e-15);
        assert!(radial_propagator(0, 0.5 * a, a, k).is_err());
    }

    #[test]
    fn low_frequency_power_law() {
        let a = 1.0;
        let k = 0.01;
        let r = 2.0 * a;
        for n in 0..=4usize {
            let ratio = (radial_propagator(n, r, a, k).unwrap()
                / radial_propagator(n, a, a, k).unwrap())
            .norm();
            let law = (n + 1) as f64 / (2 * n + 1) as f64 * 2f64.powi(n as i32);
            assert!(rel(ratio, law) < 0.10, "n={n}: {ratio} vs {law}");
        }
    }

    #[test]
    fn propagator_table_matches_scalar() {
        let (a, k) = (0.042, 18.31);
        let table = radial_propagators(Boundary::Rigid, 10, 0.09, a, k).unwrap();
        for (n, g) in table.iter().enumerate() {
            let s = radial_propagator(n, 0.09, a, k).unwrap();
            assert!((g - s).norm() <= 1e-13 * s.norm());
        }
    }
}
