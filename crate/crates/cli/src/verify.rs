//! Runtime self-checks of the special functions and the network derivatives.

use std::f64::consts::PI;

use rigid_pinn_core::geom::{fibonacci_sphere, random_shell, CartPoint};
use rigid_pinn_core::nn::{
    forward, input_derivatives, loss_terms, param_gradient, MlpArch, MlpParams, Physics,
    TrainingBatch,
};
use rigid_pinn_core::rng::Xoshiro256;
use rigid_pinn_core::specfun::{
    legendre_p, radial_propagator, radial_propagator_prime, sph_bessel_j, sph_bessel_j_prime,
    sph_bessel_y, sph_bessel_y_prime, sph_harmonic,
};
use rigid_pinn_core::train::default_weights;
use rigid_pinn_core::{Complex, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    /// Worst observed error.
    pub error: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.error < self.tolerance
    }
}

pub fn run_all() -> Result<Vec<Check>> {
    Ok(vec![
        wronskian()?,
        addition_theorem()?,
        rigid_boundary()?,
        input_gradient(),
        input_laplacian(),
        parameter_gradient()?,
    ])
}

fn wronskian() -> Result<Check> {
    let mut worst = 0.0f64;
    for x in [0.1, 0.77, 2.5, 10.0] {
        for n in 0..=8 {
            let w = sph_bessel_j(n, x)? * sph_bessel_y_prime(n, x)?
                - sph_bessel_j_prime(n, x)? * sph_bessel_y(n, x)?;
            worst = worst.max((w * x * x - 1.0).abs());
        }
    }
    Ok(Check {
        name: "wronskian",
        error: worst,
        tolerance: 1e-9,
    })
}

fn addition_theorem() -> Result<Check> {
    let mut rng = Xoshiro256::seed_from_u64(1);
    let mut worst = 0.0f64;
    let n = 3;
    for _ in 0..10 {
        let (t1, p1) = (rng.uniform(-1.0, 1.0).acos(), rng.uniform(0.0, 2.0 * PI));
        let (t2, p2) = (rng.uniform(-1.0, 1.0).acos(), rng.uniform(0.0, 2.0 * PI));
        let mut sum = Complex::new(0.0, 0.0);
        for m in -3..=3 {
            sum += sph_harmonic(n, m, t1, p1)? * sph_harmonic(n, m, t2, p2)?.conj();
        }
        let c = t1.cos() * t2.cos() + t1.sin() * t2.sin() * (p1 - p2).cos();
        let rhs = 7.0 / (4.0 * PI) * legendre_p(n, c.clamp(-1.0, 1.0))?;
        worst = worst.max((sum - rhs).norm());
    }
    Ok(Check {
        name: "addition theorem",
        error: worst,
        tolerance: 1e-12,
    })
}

fn rigid_boundary() -> Result<Check> {
    let (a, k) = (0.042, 0.77 / 0.042);
    let mut worst = 0.0f64;
    for n in 0..=6 {
        let g = radial_propagator(n, a, a, k)?;
        worst = worst.max(radial_propagator_prime(n, a, a, k)?.norm() / g.norm());
    }
    Ok(Check {
        name: "rigid boundary",
        error: worst,
        tolerance: 1e-12,
    })
}

fn random_params(rng: &mut Xoshiro256) -> MlpParams {
    let arch = MlpArch::default();
    let values = (0..arch.param_count()).map(|_| rng.uniform(-1.5, 1.5)).collect();
    MlpParams {
        arch,
        values,
    }
}

fn random_point(rng: &mut Xoshiro256) -> CartPoint {
    CartPoint::new(
        rng.uniform(-1.0, 1.0),
        rng.uniform(-1.0, 1.0),
        rng.uniform(-1.0, 1.0),
    )
}

fn axis(i: usize, h: f64) -> CartPoint {
    let mut v = [0.0; 3];
    v[i] = h;
    CartPoint::from_array(v)
}

fn input_gradient() -> Check {
    let mut rng = Xoshiro256::seed_from_u64(2);
    let h = 1e-5;
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let p = random_params(&mut rng);
        let x = random_point(&mut rng);
        let d = input_derivatives(&p, x);
        let scale = d.gradient.iter().flatten().fold(1e-12f64, |m, v| m.max(v.abs()));
        for i in 0..3 {
            let (fp, fm) = (forward(&p, x + axis(i, h)), forward(&p, x - axis(i, h)));
            for j in 0..2 {
                let fd = (fp[j] - fm[j]) / (2.0 * h);
                worst = worst.max((fd - d.gradient[j][i]).abs() / scale);
            }
        }
    }
    Check {
        name: "input gradient",
        error: worst,
        tolerance: 1e-6,
    }
}

fn input_laplacian() -> Check {
    let mut rng = Xoshiro256::seed_from_u64(3);
    let h = 1e-4;
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let p = random_params(&mut rng);
        let x = random_point(&mut rng);
        let d = input_derivatives(&p, x);
        let f0 = forward(&p, x);
        let mut fd = [-6.0 * f0[0], -6.0 * f0[1]];
        for i in 0..3 {
            let (fp, fm) = (forward(&p, x + axis(i, h)), forward(&p, x - axis(i, h)));
            for j in 0..2 {
                fd[j] += fp[j] + fm[j];
            }
        }
        let scale = d.laplacian[0].abs().max(d.laplacian[1].abs()).max(1e-12);
        for j in 0..2 {
            worst = worst.max((fd[j] / (h * h) - d.laplacian[j]).abs() / scale);
        }
    }
    Check {
        name: "input laplacian",
        error: worst,
        tolerance: 1e-5,
    }
}

fn parameter_gradient() -> Result<Check> {
    let mut rng = Xoshiro256::seed_from_u64(4);
    let k = 2.0 * PI * 1000.0 / 343.0;
    let physics = Physics::new(k);
    let weights = default_weights(k, 0.042)?;
    let h = 1e-6;
    let mut worst = 0.0f64;
    for trial in 0..20 {
        let p = random_params(&mut rng);
        let batch = TrainingBatch {
            data_points: fibonacci_sphere(4, 0.042)?,
            data_values: (0..4)
                .map(|_| Complex::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)))
                .collect(),
            pde_points: random_shell(8, 0.042, 0.15, trial)?,
            bc_points: fibonacci_sphere(8, 0.042)?,
        };
        let grad = param_gradient(&p, &batch, physics, &weights)?;
        let scale = grad.iter().fold(1e-12f64, |m, v| m.max(v.abs()));
        for i in 0..p.len() {
            let mut plus = p.clone();
            plus.values[i] += h;
            let mut minus = p.clone();
            minus.values[i] -= h;
            let fd = (loss_terms(&plus, &batch, physics)?.weighted(&weights)
                - loss_terms(&minus, &batch, physics)?.weighted(&weights))
                / (2.0 * h);
            worst = worst.max((fd - grad[i]).abs() / scale);
        }
    }
    Ok(Check {
        name: "parameter gradient",
        error: worst,
        tolerance: 1e-5,
    })
}
