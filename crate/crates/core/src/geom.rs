//! Coordinates and point sets.
//!
//! Spherical coordinates use the physics convention: `theta` is the polar
//! angle from `+z` in `[0, pi]`, `phi` the azimuth from `+x` in `[0, 2 pi)`.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::{Add, Mul, Neg, Sub};

use crate::rng::Xoshiro256;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CartPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SphPoint {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

impl CartPoint {
    pub const ORIGIN: CartPoint = CartPoint {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    pub fn dot(self, o: CartPoint) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn norm(self) -> f64 {
        libm::sqrt(self.dot(self))
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }

    /// Unit vector in the same direction; the origin maps to itself.
    pub fn normalized(self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            self
        } else {
            self.scale(1.0 / n)
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Cosine of the angle between two non-zero vectors, clamped to `[-1, 1]`.
    pub fn cos_angle(self, o: CartPoint) -> f64 {
        let d = self.norm() * o.norm();
        if d == 0.0 {
            return 1.0;
        }
        (self.dot(o) / d).clamp(-1.0, 1.0)
    }
}

impl Add for CartPoint {
    type Output = CartPoint;
    fn add(self, o: CartPoint) -> CartPoint {
        CartPoint::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for CartPoint {
    type Output = CartPoint;
    fn sub(self, o: CartPoint) -> CartPoint {
        CartPoint::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for CartPoint {
    type Output = CartPoint;
    fn neg(self) -> CartPoint {
        CartPoint::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for CartPoint {
    type Output = CartPoint;
    fn mul(self, s: f64) -> CartPoint {
        self.scale(s)
    }
}

impl SphPoint {
    pub const fn new(r: f64, theta: f64, phi: f64) -> Self {
        Self { r, theta, phi }
    }
}

pub fn sph_to_cart(p: SphPoint) -> CartPoint {
    let (st, ct) = (libm::sin(p.theta), libm::cos(p.theta));
    let (sp, cp) = (libm::sin(p.phi), libm::cos(p.phi));
    CartPoint::new(p.r * st * cp, p.r * st * sp, p.r * ct)
}

/// Inverse of [`sph_to_cart`]. The origin maps to `(0, 0, 0)`; points on the
/// `z` axis get `phi = 0`.
pub fn cart_to_sph(p: CartPoint) -> SphPoint {
    let r = p.norm();
    if r == 0.0 {
        return SphPoint::new(0.0, 0.0, 0.0);
    }
    let theta = libm::acos((p.z / r).clamp(-1.0, 1.0));
    let mut phi = libm::atan2(p.y, p.x);
    if phi < 0.0 {
        phi += 2.0 * PI;
    }
    if phi >= 2.0 * PI {
        phi = 0.0;
    }
    SphPoint::new(r, theta, phi)
}

/// Number of microphones in [`mic_array_layout`].
pub const MIC_COUNT: usize = 32;

/// 32 near-uniform directions: the 12 icosahedron vertices plus the 20
/// dodecahedron vertices (the vertices of a pentakis dodecahedron, equivalently
/// the face centres of a truncated icosahedron), scaled to radius `a`.
///
/// Ordered by ascending `z`, then ascending `phi`.
pub fn mic_array_layout(a: f64) -> Result<Vec<CartPoint>> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::Domain("array radius must be positive"));
    }
    let g = (1.0 + libm::sqrt(5.0)) / 2.0;
    let ig = 1.0 / g;
    let mut dirs = Vec::with_capacity(MIC_COUNT);
    for &s1 in &[-1.0, 1.0] {
        for &s2 in &[-1.0, 1.0] {
            // icosahedron: cyclic permutations of (0, +-1, +-g)
            dirs.push(CartPoint::new(0.0, s1, s2 * g));
            dirs.push(CartPoint::new(s1, s2 * g, 0.0));
            dirs.push(CartPoint::new(s2 * g, 0.0, s1));
            // dual dodecahedron: cyclic permutations of (0, +-g, +-1/g)
            dirs.push(CartPoint::new(0.0, s1 * g, s2 * ig));
            dirs.push(CartPoint::new(s1 * g, s2 * ig, 0.0));
            dirs.push(CartPoint::new(s2 * ig, 0.0, s1 * g));
        }
    }
    for &sx in &[-1.0, 1.0] {
        for &sy in &[-1.0, 1.0] {
            for &sz in &[-1.0, 1.0] {
                dirs.push(CartPoint::new(sx, sy, sz));
            }
        }
    }
    let mut pts: Vec<(CartPoint, SphPoint)> = dirs
        .into_iter()
        .map(|d| {
            let p = d.normalized().scale(a);
            (p, cart_to_sph(p))
        })
        .collect();
    // z values coincide exactly in rings; quantize so the phi tie-break applies
    let key = |p: &CartPoint| libm::round(p.z / a * 1e9) as i64;
    pts.sort_by(|(p, s), (q, t)| {
        key(p)
            .cmp(&key(q))
            .then(s.phi.partial_cmp(&t.phi).unwrap_or(core::cmp::Ordering::Equal))
    });
    Ok(pts.into_iter().map(|(p, _)| p).collect())
}

/// Golden-angle (Fibonacci) lattice of `count` points on the sphere of
/// radius `r`: `z_i = 1 - (2i + 1)/count`, `phi_i = i * pi (3 - sqrt 5)`.
pub fn fibonacci_sphere(count: usize, r: f64) -> Result<Vec<CartPoint>> {
    fibonacci_sphere_rotated(count, r, 0.0)
}

/// [`fibonacci_sphere`] with every azimuth shifted by `phi0`.
pub fn fibonacci_sphere_rotated(count: usize, r: f64, phi0: f64) -> Result<Vec<CartPoint>> {
    if count == 0 {
        return Err(Error::Domain("point count must be at least 1"));
    }
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::Domain("sphere radius must be positive"));
    }
    let golden = PI * (3.0 - libm::sqrt(5.0));
    Ok((0..count)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / count as f64;
            let rho = libm::sqrt((1.0 - z * z).max(0.0));
            let phi = phi0 + golden * i as f64;
            let d = CartPoint::new(rho * libm::cos(phi), rho * libm::sin(phi), z);
            // renormalize so |p| = r to rounding
            d.normalized().scale(r)
        })
        .collect())
}

/// `count` points i.i.d. uniform by volume in the shell `r_min <= |p| <= r_max`.
///
/// Per point, in this order: one uniform `u` gives
/// `r = cbrt(r_min^3 + u (r_max^3 - r_min^3))`; then three standard normals
/// (see [`crate::rng`]) give the direction, redrawn in the (measure-zero)
/// event that all three are zero.
pub fn random_shell(count: usize, r_min: f64, r_max: f64, seed: u64) -> Result<Vec<CartPoint>> {
    if !(r_min.is_finite() && r_max.is_finite() && r_min > 0.0) {
        return Err(Error::Domain("shell radii must be positive"));
    }
    if r_min > r_max {
        return Err(Error::Domain("r_min must not exceed r_max"));
    }
    let mut rng = Xoshiro256::seed_from_u64(seed);
    let (lo, hi) = (r_min * r_min * r_min, r_max * r_max * r_max);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let u = rng.next_f64();
        let r = libm::cbrt(lo + u * (hi - lo)).clamp(r_min, r_max);
        let dir = loop {
            let d = CartPoint::new(rng.normal(), rng.normal(), rng.normal());
            if d.norm() > 0.0 {
                break d.normalized();
            }
        };
        out.push(dir.scale(r));
    }
    Ok(out)
}

/// Regular `(theta, phi)` grid of cell centres at radius `r`, `theta`-major.
pub fn sphere_grid(r: f64, n_theta: usize, n_phi: usize) -> Result<Vec<SphPoint>> {
    if n_theta < 2 || n_phi < 2 {
        return Err(Error::Domain("grid needs at least 2 cells per axis"));
    }
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::Domain("grid radius must be non-negative"));
    }
    let mut out = Vec::with_capacity(n_theta * n_phi);
    for i in 0..n_theta {
        let theta = (i as f64 + 0.5) * PI / n_theta as f64;
        for j in 0..n_phi {
            let phi = (j as f64 + 0.5) * 2.0 * PI / n_phi as f64;
            out.push(SphPoint::new(r, theta, phi));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(p: CartPoint, q: CartPoint, tol: f64) -> bool {
        (p - q).norm() <= tol
    }

    #[test]
    fn conversions() {
        assert!(close(
            sph_to_cart(SphPoint::new(1.0, 0.0, 0.0)),
            CartPoint::new(0.0, 0.0, 1.0),
            1e-15
        ));
        assert!(close(
            sph_to_cart(SphPoint::new(1.0, PI / 2.0, 0.0)),
            CartPoint::new(1.0, 0.0, 0.0),
            1e-15
        ));
        assert_eq!(
            cart_to_sph(CartPoint::new(0.0, 0.0, 1.0)),
            SphPoint::new(1.0, 0.0, 0.0)
        );
        assert_eq!(cart_to_sph(CartPoint::ORIGIN), SphPoint::new(0.0, 0.0, 0.0));
        let s = SphPoint::new(0.072, 1.1, 2.3);
        let back = cart_to_sph(sph_to_cart(s));
        assert!((back.r - s.r).abs() < 1e-12);
        assert!((back.theta - s.theta).abs() < 1e-12);
        assert!((back.phi - s.phi).abs() < 1e-12);
    }

    #[test]
    fn mic_layout_geometry() {
        let a = 0.042;
        let mics = mic_array_layout(a).unwrap();
        assert_eq!(mics.len(), MIC_COUNT);
        let mut c = CartPoint::ORIGIN;
        for p in &mics {
            assert!((p.norm() - a).abs() < 1e-12);
            c = c + *p;
        }
        assert!(c.norm() < 1e-12);
        for p in &mics {
            assert!(mics.iter().any(|q| close(*q, -*p, 1e-12)), "antipode missing");
        }
        for w in mics.windows(2) {
            assert!(w[0].z <= w[1].z + 1e-12);
        }
        assert!(mic_array_layout(0.0).is_err());
    }

    #[test]
    fn fibonacci_basic() {
        let one = fibonacci_sphere(1, 0.3).unwrap();
        assert_eq!(one.len(), 1);
        assert!((one[0].norm() - 0.3).abs() < 1e-15);
        for p in fibonacci_sphere(500, 0.042).unwrap() {
            assert!((p.norm() - 0.042).abs() < 1e-12);
        }
        assert!(fibonacci_sphere(0, 1.0).is_err());
    }

    #[test]
    fn shell_contract() {
        let pts = random_shell(2000, 0.042, 0.15, 9).unwrap();
        for p in &pts {
            let r = p.norm();
            assert!((0.042..=0.15).contains(&r));
        }
        assert_eq!(pts, random_shell(2000, 0.042, 0.15, 9).unwrap());
        assert_ne!(pts, random_shell(2000, 0.042, 0.15, 10).unwrap());
        assert!(random_shell(10, 0.2, 0.1, 0).is_err());
        let thin = random_shell(5, 0.1, 0.1, 0).unwrap();
        assert!(thin.iter().all(|p| (p.norm() - 0.1).abs() < 1e-15));
    }

    #[test]
    fn grid_cells() {
        let g = sphere_grid(0.072, 2, 2).unwrap();
        assert_eq!(g.len(), 4);
        let expect = [
            (PI / 4.0, PI / 2.0),
            (PI / 4.0, 3.0 * PI / 2.0),
            (3.0 * PI / 4.0, PI / 2.0),
            (3.0 * PI / 4.0, 3.0 * PI / 2.0),
        ];
        for (p, (t, f)) in g.iter().zip(expect) {
            assert_eq!(p.r, 0.072);
            assert!((p.theta - t).abs() < 1e-15 && (p.phi - f).abs() < 1e-15);
        }
        assert_eq!(sphere_grid(1.0, 7, 5).unwrap().len(), 35);
        assert!(sphere_grid(1.0, 1, 5).is_err());
    }
}
