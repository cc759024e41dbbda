use std::f64::consts::PI;

use rigid_pinn_core::geom::{cart_to_sph, fibonacci_sphere};
use rigid_pinn_core::rng::Xoshiro256;
use rigid_pinn_core::specfun::{
    legendre_p, radial_propagator, radial_propagator_prime, sph_bessel_j, sph_bessel_j_prime,
    sph_bessel_y, sph_bessel_y_prime, sph_harmonic,
};
use rigid_pinn_core::Complex;

fn random_direction(rng: &mut Xoshiro256) -> (f64, f64) {
    let z = rng.uniform(-1.0, 1.0);
    (z.acos(), rng.uniform(0.0, 2.0 * PI))
}

#[test]
fn addition_theorem_order_three() {
    let n = 3;
    let mut rng = Xoshiro256::seed_from_u64(31);
    for _ in 0..10 {
        let (t1, p1) = random_direction(&mut rng);
        let (t2, p2) = random_direction(&mut rng);
        let mut lhs = Complex::new(0.0, 0.0);
        for m in -(n as i32)..=n as i32 {
            lhs += sph_harmonic(n, m, t1, p1).unwrap() * sph_harmonic(n, m, t2, p2).unwrap().conj();
        }
        // cosine of the angle between the two directions, from Cartesian components
        let u = [t1.sin() * p1.cos(), t1.sin() * p1.sin(), t1.cos()];
        let v = [t2.sin() * p2.cos(), t2.sin() * p2.sin(), t2.cos()];
        let c = (u[0] * v[0] + u[1] * v[1] + u[2] * v[2]).clamp(-1.0, 1.0);
        let rhs = (2 * n + 1) as f64 / (4.0 * PI) * legendre_p(n, c).unwrap();
        assert!((lhs.re - rhs).abs() < 1e-12, "{lhs} vs {rhs}");
        assert!(lhs.im.abs() < 1e-12);
    }
}

#[test]
fn orthonormal_under_fibonacci_quadrature() {
    let pts = fibonacci_sphere(500, 1.0).unwrap();
    let w = 4.0 * PI / pts.len() as f64;
    let dirs: Vec<_> = pts.iter().map(|p| cart_to_sph(*p)).collect();
    let modes: Vec<(usize, i32)> = (0..=4usize)
        .flat_map(|n| (-(n as i32)..=n as i32).map(move |m| (n, m)))
        .collect();
    let table: Vec<Vec<Complex>> = modes
        .iter()
        .map(|&(n, m)| {
            dirs.iter()
                .map(|s| sph_harmonic(n, m, s.theta, s.phi).unwrap())
                .collect()
        })
        .collect();
    let (mut worst_low, mut worst) = (0.0f64, 0.0f64);
    for (i, a) in table.iter().enumerate() {
        for (j, b) in table.iter().enumerate() {
            let ip: Complex = a.iter().zip(b).map(|(x, y)| x * y.conj()).sum::<Complex>() * w;
            let expect = if i == j { 1.0 } else { 0.0 };
            let dev = (ip - expect).norm();
            worst = worst.max(dev);
            if modes[i].0 <= 3 && modes[j].0 <= 3 {
                worst_low = worst_low.max(dev);
            }
        }
    }
    assert!(worst_low < 1e-3, "max deviation up to n = 3: {worst_low}");
    // the lattice aliases (4, -1) with (4, 0) at 1.6e-3
    assert!(worst < 2e-3, "max deviation up to n = 4: {worst}");
}

#[test]
fn wronskian_grid() {
    for &x in &[0.1, 0.77, 2.5, 10.0] {
        for n in 0..=8 {
            let w = sph_bessel_j(n, x).unwrap() * sph_bessel_y_prime(n, x).unwrap()
                - sph_bessel_j_prime(n, x).unwrap() * sph_bessel_y(n, x).unwrap();
            let expect = 1.0 / (x * x);
            assert!(((w - expect) / expect).abs() < 1e-9, "n={n} x={x}");
        }
    }
}

#[test]
fn rigid_boundary_identity() {
    let a = 0.042;
    let k = 0.77 / a;
    for n in 0..=6 {
        let g = radial_propagator(n, a, a, k).unwrap();
        let gp = radial_propagator_prime(n, a, a, k).unwrap();
        assert!(gp.norm() < 1e-12 * g.norm(), "n={n}");
    }
}

#[test]
fn power_law_growth_at_low_frequency() {
    let a = 0.042;
    let k = 0.01 / a;
    let r = 2.0 * a;
    for n in 0..=4 {
        let ratio = (radial_propagator(n, r, a, k).unwrap() / radial_propagator(n, a, a, k).unwrap()).norm();
        let law = (n + 1) as f64 / (2 * n + 1) as f64 * 2f64.powi(n as i32);
        assert!((ratio / law - 1.0).abs() < 0.1, "n={n}: {ratio} vs {law}");
    }
}
