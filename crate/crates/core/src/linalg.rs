//! Small dense complex linear algebra for the baselines (sizes ~ 32-81).

use alloc::vec;
use alloc::vec::Vec;

use crate::{Complex, Error, Result};

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::new(0.0, 0.0); rows * cols],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul_vec(&self, x: &[Complex]) -> Vec<Complex> {
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// `A^H x`.
    pub fn adjoint_mul_vec(&self, x: &[Complex]) -> Vec<Complex> {
        let mut out = vec![Complex::new(0.0, 0.0); self.cols];
        for i in 0..self.rows {
            for (j, o) in out.iter_mut().enumerate() {
                *o += self.get(i, j).conj() * x[i];
            }
        }
        out
    }

    /// Gram matrix `A^H A`.
    pub fn gram(&self) -> CMatrix {
        let n = self.cols;
        let mut g = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut s = Complex::new(0.0, 0.0);
                for r in 0..self.rows {
                    s += self.get(r, i).conj() * self.get(r, j);
                }
                g.set(i, j, s);
                g.set(j, i, s.conj());
            }
        }
        g
    }
}

/// Solves `A x = b` for Hermitian positive-definite `A` by Cholesky.
pub fn cholesky_solve(a: &CMatrix, b: &[Complex]) -> Result<Vec<Complex>> {
    let n = a.rows;
    if a.cols != n || b.len() != n {
        return Err(Error::Shape {
            what: "Cholesky system",
            expected: n,
            found: b.len(),
        });
    }
    let trace: f64 = (0..n).map(|i| a.get(i, i).re).sum();
    let floor = 1e-14 * trace.max(f64::MIN_POSITIVE);
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a.get(j, j).re;
        for k in 0..j {
            d -= l.get(j, k).norm_sqr();
        }
        if !(d > floor) {
            return Err(Error::Numerical("matrix is singular or not positive definite"));
        }
        let djj = libm::sqrt(d);
        l.set(j, j, Complex::new(djj, 0.0));
        for i in (j + 1)..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k).conj();
            }
            l.set(i, j, s / djj);
        }
    }
    // forward: L y = b
    let mut y = vec![Complex::new(0.0, 0.0); n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l.get(i, k) * y[k];
        }
        y[i] = s / l.get(i, i).re;
    }
    // backward: L^H x = y
    let mut x = vec![Complex::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in (i + 1)..n {
            s -= l.get(k, i).conj() * x[k];
        }
        x[i] = s / l.get(i, i).re;
    }
    Ok(x)
}

/// Largest eigenvalue of a Hermitian positive semi-definite matrix by power
/// iteration from a fixed start vector.
pub fn largest_eigenvalue(a: &CMatrix) -> f64 {
    let n = a.rows;
    if n == 0 {
        return 0.0;
    }
    let mut v: Vec<Complex> = (0..n)
        .map(|i| Complex::new(1.0 + 0.01 * i as f64, 0.003 * i as f64))
        .collect();
    let mut lambda = 0.0;
    for _ in 0..2000 {
        let w = a.mul_vec(&v);
        let norm = libm::sqrt(w.iter().map(|c| c.norm_sqr()).sum::<f64>());
        if norm == 0.0 {
            return 0.0;
        }
        let vnorm = libm::sqrt(v.iter().map(|c| c.norm_sqr()).sum::<f64>());
        let next = norm / vnorm;
        v = w.into_iter().map(|c| c / norm).collect();
        if libm::fabs(next - lambda) <= 1e-14 * next {
            return next;
        }
        lambda = next;
    }
    lambda
}
