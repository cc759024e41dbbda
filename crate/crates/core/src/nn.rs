//! Fully connected network `R^3 -> R^2` (real and imaginary pressure) with
//! exact input derivatives and exact parameter gradients of the
//! physics-informed loss.
//!
//! Each layer computes `a = act(W h + b)`. Alongside the value, the forward
//! sweep carries the input Jacobian `J = dh/dx` (3 columns) and the input
//! Laplacian `L = sum_k d^2 h / dx_k^2`, using
//!
//! ```text
//! Jz = W Jh                 Lz = W Lh
//! Ja = act'(z) Jz           La = act''(z) |Jz|^2 + act'(z) Lz
//! ```
//!
//! which is exact: the Laplacian of a composition only needs the gradient and
//! Laplacian of the inner map. The reverse sweep differentiates these
//! recurrences with respect to `W` and `b`, which gives the mixed second-order
//! terms the PDE and boundary losses need.

use alloc::vec;
use alloc::vec::Vec;

use crate::geom::CartPoint;
use crate::rng::Xoshiro256;
use crate::train::LossWeights;
use crate::{Complex, Error, Result};

pub const INPUT_DIM: usize = 3;
pub const OUTPUT_DIM: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Activation {
    #[default]
    Tanh,
    Identity,
}

impl Activation {
    /// `(act, act', act'', act''')` at `z`.
    #[inline]
    fn eval(self, z: f64) -> [f64; 4] {
        match self {
            Activation::Tanh => {
                let t = libm::tanh(z);
                let d1 = 1.0 - t * t;
                [t, d1, -2.0 * t * d1, -2.0 * d1 * (1.0 - 3.0 * t * t)]
            }
            Activation::Identity => [z, 1.0, 0.0, 0.0],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Tanh => "tanh",
            Activation::Identity => "identity",
        }
    }
}

/// Network shape. Input is always `(x, y, z)`, output always `(Re P, Im P)`;
/// the output layer is linear.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MlpArch {
    pub hidden_layers: usize,
    pub hidden_width: usize,
    pub activation: Activation,
}

impl Default for MlpArch {
    /// Three hidden layers of four tanh units.
    fn default() -> Self {
        Self {
            hidden_layers: 3,
            hidden_width: 4,
            activation: Activation::Tanh,
        }
    }
}

impl MlpArch {
    pub fn validate(&self) -> Result<()> {
        if self.hidden_layers > 0 && self.hidden_width == 0 {
            return Err(Error::Domain("hidden width must be at least 1"));
        }
        Ok(())
    }

    /// `(fan_in, fan_out)` for every layer, output layer last.
    pub fn layer_dims(&self) -> Vec<(usize, usize)> {
        let mut dims = Vec::with_capacity(self.hidden_layers + 1);
        let mut fan_in = INPUT_DIM;
        for _ in 0..self.hidden_layers {
            dims.push((fan_in, self.hidden_width));
            fan_in = self.hidden_width;
        }
        dims.push((fan_in, OUTPUT_DIM));
        dims
    }

    pub fn param_count(&self) -> usize {
        self.layer_dims().iter().map(|(i, o)| (i + 1) * o).sum()
    }

    fn max_width(&self) -> usize {
        self.hidden_width.max(INPUT_DIM).max(OUTPUT_DIM)
    }
}

/// Flat parameter vector. Per layer: the `fan_out x fan_in` weight matrix in
/// row-major order, then the `fan_out` biases.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams {
    pub arch: MlpArch,
    pub values: Vec<f64>,
}

impl MlpParams {
    pub fn zeros(arch: MlpArch) -> Self {
        Self {
            arch,
            values: vec![0.0; arch.param_count()],
        }
    }

    pub fn from_values(arch: MlpArch, values: Vec<f64>) -> Result<Self> {
        arch.validate()?;
        if values.len() != arch.param_count() {
            return Err(Error::Shape {
                what: "parameter vector",
                expected: arch.param_count(),
                found: values.len(),
            });
        }
        Ok(Self { arch, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(offset of W, offset of b, fan_in, fan_out)` for each layer.
    pub fn layout(&self) -> Vec<(usize, usize, usize, usize)> {
        let mut offset = 0;
        self.arch
            .layer_dims()
            .into_iter()
            .map(|(i, o)| {
                let w = offset;
                let b = w + i * o;
                offset = b + o;
                (w, b, i, o)
            })
            .collect()
    }
}

/// Glorot-uniform weights `U(-s, s)`, `s = sqrt(6 / (fan_in + fan_out))`,
/// zero biases. Weights are drawn in storage order from one generator.
pub fn init_params(arch: MlpArch, seed: u64) -> Result<MlpParams> {
    arch.validate()?;
    let mut params = MlpParams::zeros(arch);
    let mut rng = Xoshiro256::seed_from_u64(seed);
    for (w, _b, fan_in, fan_out) in params.layout() {
        let s = libm::sqrt(6.0 / (fan_in + fan_out) as f64);
        for v in &mut params.values[w..w + fan_in * fan_out] {
            *v = rng.uniform(-s, s);
        }
    }
    Ok(params)
}

/// Value, input gradient and input Laplacian of both outputs at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputDerivatives {
    pub value: [f64; OUTPUT_DIM],
    /// `gradient[j][i] = d out_j / d x_i`.
    pub gradient: [[f64; INPUT_DIM]; OUTPUT_DIM],
    pub laplacian: [f64; OUTPUT_DIM],
}

impl InputDerivatives {
    pub fn value_complex(&self) -> Complex {
        Complex::new(self.value[0], self.value[1])
    }

    /// Radial-direction derivative scaled by `|x|`: `x . grad out_j`.
    pub fn x_dot_gradient(&self, x: CartPoint) -> [f64; OUTPUT_DIM] {
        let xa = x.to_array();
        let mut out = [0.0; OUTPUT_DIM];
        for (o, g) in out.iter_mut().zip(&self.gradient) {
            *o = g.iter().zip(&xa).map(|(a, b)| a * b).sum();
        }
        out
    }
}

/// Plain forward pass.
pub fn forward(params: &MlpParams, x: CartPoint) -> [f64; OUTPUT_DIM] {
    let layout = params.layout();
    let last = layout.len() - 1;
    let mut h: Vec<f64> = x.to_array().to_vec();
    for (l, &(w, b, fan_in, fan_out)) in layout.iter().enumerate() {
        let mut next = vec![0.0; fan_out];
        for (i, out) in next.iter_mut().enumerate() {
            let row = &params.values[w + i * fan_in..w + (i + 1) * fan_in];
            let z = params.values[b + i] + row.iter().zip(&h).map(|(a, c)| a * c).sum::<f64>();
            *out = if l == last {
                z
            } else {
                params.arch.activation.eval(z)[0]
            };
        }
        h = next;
    }
    [h[0], h[1]]
}

/// Per-layer values kept by the forward sweep for the reverse sweep.
#[derive(Debug, Clone)]
struct LayerTape {
    /// activation derivatives `act', act'', act'''` at `z`, per unit
    d: Vec<[f64; 3]>,
    jz: Vec<[f64; 3]>,
    lz: Vec<f64>,
    // layer outputs
    a: Vec<f64>,
    ja: Vec<[f64; 3]>,
    la: Vec<f64>,
}

impl LayerTape {
    fn new(width: usize) -> Self {
        Self {
            d: vec![[0.0; 3]; width],
            jz: vec![[0.0; 3]; width],
            lz: vec![0.0; width],
            a: vec![0.0; width],
            ja: vec![[0.0; 3]; width],
            la: vec![0.0; width],
        }
    }
}

/// Reusable buffers for derivative sweeps over many points.
#[derive(Debug, Clone)]
pub struct Workspace {
    layout: Vec<(usize, usize, usize, usize)>,
    tapes: Vec<LayerTape>,
    input: LayerTape,
    // adjoint buffers
    abar: Vec<f64>,
    jabar: Vec<[f64; 3]>,
    labar: Vec<f64>,
    zbar: Vec<f64>,
    jzbar: Vec<[f64; 3]>,
    lzbar: Vec<f64>,
}

impl Workspace {
    pub fn new(params: &MlpParams) -> Self {
        let layout = params.layout();
        let tapes = layout.iter().map(|&(_, _, _, o)| LayerTape::new(o)).collect();
        let mut input = LayerTape::new(INPUT_DIM);
        for i in 0..INPUT_DIM {
            input.ja[i][i] = 1.0;
        }
        let w = params.arch.max_width();
        Self {
            layout,
            tapes,
            input,
            abar: vec![0.0; w],
            jabar: vec![[0.0; 3]; w],
            labar: vec![0.0; w],
            zbar: vec![0.0; w],
            jzbar: vec![[0.0; 3]; w],
            lzbar: vec![0.0; w],
        }
    }

    fn sweep(&mut self, params: &MlpParams, x: CartPoint) -> InputDerivatives {
        self.input.a.copy_from_slice(&x.to_array());
        let last = self.layout.len() - 1;
        for l in 0..self.layout.len() {
            let (w, b, fan_in, fan_out) = self.layout[l];
            let (before, rest) = self.tapes.split_at_mut(l);
            let prev = if l == 0 { &self.input } else { &before[l - 1] };
            let cur = &mut rest[0];
            for i in 0..fan_out {
                let row = &params.values[w + i * fan_in..w + (i + 1) * fan_in];
                let mut z = params.values[b + i];
                let mut jz = [0.0; 3];
                let mut lz = 0.0;
                for (j, &wij) in row.iter().enumerate() {
                    z += wij * prev.a[j];
                    for k in 0..3 {
                        jz[k] += wij * prev.ja[j][k];
                    }
                    lz += wij * prev.la[j];
                }
                let act = if l == last {
                    Activation::Identity
                } else {
                    params.arch.activation
                };
                let [s, d1, d2, d3] = act.eval(z);
                let jz2 = jz[0] * jz[0] + jz[1] * jz[1] + jz[2] * jz[2];
                cur.d[i] = [d1, d2, d3];
                cur.jz[i] = jz;
                cur.lz[i] = lz;
                cur.a[i] = s;
                cur.ja[i] = [d1 * jz[0], d1 * jz[1], d1 * jz[2]];
                cur.la[i] = d2 * jz2 + d1 * lz;
            }
        }
        let out = &self.tapes[last];
        InputDerivatives {
            value: [out.a[0], out.a[1]],
            gradient: [out.ja[0], out.ja[1]],
            laplacian: [out.la[0], out.la[1]],
        }
    }

    /// Accumulates into `grad` the parameter gradient of
    /// `sum_j vbar_j out_j + sum_jk gbar_jk dout_j/dx_k + sum_j lbar_j Lap out_j`
    /// at the point of the last [`Workspace::sweep`].
    fn backprop(
        &mut self,
        params: &MlpParams,
        vbar: [f64; OUTPUT_DIM],
        gbar: [[f64; 3]; OUTPUT_DIM],
        lbar: [f64; OUTPUT_DIM],
        grad: &mut [f64],
    ) {
        let last = self.layout.len() - 1;
        for j in 0..OUTPUT_DIM {
            self.abar[j] = vbar[j];
            self.jabar[j] = gbar[j];
            self.labar[j] = lbar[j];
        }
        for l in (0..=last).rev() {
            let (w, b, fan_in, fan_out) = self.layout[l];
            let tape = &self.tapes[l];
            // through the activation
            for i in 0..fan_out {
                let [d1, d2, d3] = tape.d[i];
                let jz = tape.jz[i];
                let jz2 = jz[0] * jz[0] + jz[1] * jz[1] + jz[2] * jz[2];
                let ab = self.abar[i];
                let jab = self.jabar[i];
                let lab = self.labar[i];
                let mut zb = d1 * ab + (d3 * jz2 + d2 * tape.lz[i]) * lab;
                let mut jzb = [0.0; 3];
                for k in 0..3 {
                    zb += d2 * jz[k] * jab[k];
                    jzb[k] = d1 * jab[k] + 2.0 * d2 * jz[k] * lab;
                }
                self.zbar[i] = zb;
                self.jzbar[i] = jzb;
                self.lzbar[i] = d1 * lab;
            }
            // through the affine map
            let prev = if l == 0 { &self.input } else { &self.tapes[l - 1] };
            for i in 0..fan_out {
                let (zb, jzb, lzb) = (self.zbar[i], self.jzbar[i], self.lzbar[i]);
                grad[b + i] += zb;
                let row = &mut grad[w + i * fan_in..w + (i + 1) * fan_in];
                for (j, g) in row.iter_mut().enumerate() {
                    let pj = prev.ja[j];
                    *g += zb * prev.a[j]
                        + jzb[0] * pj[0]
                        + jzb[1] * pj[1]
                        + jzb[2] * pj[2]
                        + lzb * prev.la[j];
                }
            }
            if l > 0 {
                for j in 0..fan_in {
                    let mut ab = 0.0;
                    let mut jab = [0.0; 3];
                    let mut lab = 0.0;
                    for i in 0..fan_out {
                        let wij = params.values[w + i * fan_in + j];
                        ab += wij * self.zbar[i];
                        for k in 0..3 {
                            jab[k] += wij * self.jzbar[i][k];
                        }
                        lab += wij * self.lzbar[i];
                    }
                    self.abar[j] = ab;
                    self.jabar[j] = jab;
                    self.labar[j] = lab;
                }
            }
        }
    }
}

/// Exact value, gradient and Laplacian with respect to the input.
pub fn input_derivatives(params: &MlpParams, x: CartPoint) -> InputDerivatives {
    Workspace::new(params).sweep(params, x)
}

/// Which wavenumber factor multiplies the field in the Helmholtz residual
/// `Lap(Phi) + kappa Phi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HelmholtzForm {
    /// `kappa = k^2 = (omega / c)^2`.
    #[default]
    Standard,
    /// `kappa = (c / omega)^2 = 1 / k^2`, the inverted coefficient, kept for
    /// literal reproduction runs.
    InvertedCoefficient,
}

impl HelmholtzForm {
    pub fn coefficient(self, k: f64) -> f64 {
        match self {
            HelmholtzForm::Standard => k * k,
            HelmholtzForm::InvertedCoefficient => 1.0 / (k * k),
        }
    }
}

/// Point sets and targets for one evaluation of the three-term loss.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainingBatch {
    pub data_points: Vec<CartPoint>,
    pub data_values: Vec<Complex>,
    pub pde_points: Vec<CartPoint>,
    pub bc_points: Vec<CartPoint>,
}

impl TrainingBatch {
    fn validate(&self) -> Result<()> {
        if self.data_points.is_empty() {
            return Err(Error::Domain("empty data batch"));
        }
        if self.data_points.len() != self.data_values.len() {
            return Err(Error::Shape {
                what: "data values",
                expected: self.data_points.len(),
                found: self.data_values.len(),
            });
        }
        Ok(())
    }
}

/// Physics settings of the loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Physics {
    pub k: f64,
    pub form: HelmholtzForm,
}

impl Physics {
    pub fn new(k: f64) -> Self {
        Self {
            k,
            form: HelmholtzForm::Standard,
        }
    }
}

/// Unweighted loss components.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LossTerms {
    /// `(1/Q) sum |P - Phi|^2`
    pub data: f64,
    /// `(1/D) sum |Lap Phi + kappa Phi|^2`
    pub pde: f64,
    /// `(1/B) sum |x_b . J|^2`
    pub bc: f64,
}

impl LossTerms {
    pub fn weighted(&self, w: &LossWeights) -> f64 {
        w.lambda1 * self.data + w.lambda2 * self.pde + w.lambda3 * self.bc
    }
}

/// The three loss components.
pub fn loss_terms(params: &MlpParams, batch: &TrainingBatch, physics: Physics) -> Result<LossTerms> {
    eval_loss(params, batch, physics, None)
}

/// Gradient of `lambda1 L_data + lambda2 L_pde + lambda3 L_bc` with respect to
/// every parameter, in [`MlpParams`] order.
pub fn param_gradient(
    params: &MlpParams,
    batch: &TrainingBatch,
    physics: Physics,
    weights: &LossWeights,
) -> Result<Vec<f64>> {
    let mut grad = vec![0.0; params.len()];
    eval_loss(params, batch, physics, Some((weights, &mut grad)))?;
    Ok(grad)
}

/// Loss components and weighted gradient in one pass.
pub fn loss_and_gradient(
    params: &MlpParams,
    batch: &TrainingBatch,
    physics: Physics,
    weights: &LossWeights,
) -> Result<(LossTerms, Vec<f64>)> {
    let mut grad = vec![0.0; params.len()];
    let terms = eval_loss(params, batch, physics, Some((weights, &mut grad)))?;
    Ok((terms, grad))
}

fn eval_loss(
    params: &MlpParams,
    batch: &TrainingBatch,
    physics: Physics,
    mut grad: Option<(&LossWeights, &mut Vec<f64>)>,
) -> Result<LossTerms> {
    batch.validate()?;
    if !(physics.k > 0.0 && physics.k.is_finite()) {
        return Err(Error::Domain("wavenumber must be positive"));
    }
    let kappa = physics.form.coefficient(physics.k);
    let mut ws = Workspace::new(params);
    let mut terms = LossTerms::default();
    let zero_g = [[0.0; 3]; OUTPUT_DIM];

    let q = batch.data_points.len() as f64;
    for (x, target) in batch.data_points.iter().zip(&batch.data_values) {
        let d = ws.sweep(params, *x);
        let e = [d.value[0] - target.re, d.value[1] - target.im];
        terms.data += (e[0] * e[0] + e[1] * e[1]) / q;
        if let Some((w, g)) = grad.as_mut() {
            let s = 2.0 * w.lambda1 / q;
            ws.backprop(params, [s * e[0], s * e[1]], zero_g, [0.0; 2], g);
        }
    }

    let dn = batch.pde_points.len() as f64;
    for x in &batch.pde_points {
        let d = ws.sweep(params, *x);
        let r = [
            d.laplacian[0] + kappa * d.value[0],
            d.laplacian[1] + kappa * d.value[1],
        ];
        terms.pde += (r[0] * r[0] + r[1] * r[1]) / dn;
        if let Some((w, g)) = grad.as_mut() {
            let s = 2.0 * w.lambda2 / dn;
            ws.backprop(
                params,
                [s * kappa * r[0], s * kappa * r[1]],
                zero_g,
                [s * r[0], s * r[1]],
                g,
            );
        }
    }

    let bn = batch.bc_points.len() as f64;
    for x in &batch.bc_points {
        let d = ws.sweep(params, *x);
        let radial = d.x_dot_gradient(*x);
        terms.bc += (radial[0] * radial[0] + radial[1] * radial[1]) / bn;
        if let Some((w, g)) = grad.as_mut() {
            let s = 2.0 * w.lambda3 / bn;
            let xa = x.to_array();
            let mut gbar = [[0.0; 3]; OUTPUT_DIM];
            for j in 0..OUTPUT_DIM {
                for k in 0..3 {
                    gbar[j][k] = s * radial[j] * xa[k];
                }
            }
            ws.backprop(params, [0.0; 2], gbar, [0.0; 2], g);
        }
    }

    if !(terms.data.is_finite() && terms.pde.is_finite() && terms.bc.is_finite()) {
        return Err(Error::Numerical("non-finite loss"));
    }
    Ok(terms)
}
