//! Sum-product GAMP with scalar step sizes, damping and noise scaling.
//!
//! One iteration runs the output-node update followed by the input-node
//! update:
//!
//! ```text
//! μp   = mean(μx)
//! p̂    = F x̂ − μp ŝ
//! ẑ,μz = posterior mean/variance of z under N(p̂, μp) and y = f(z) + N(0, α μw)
//! ŝ    = (1−β) ŝ + β (ẑ − p̂)/μp
//! μs   = (1−β) μs + β (1 − μz/μp)/μp
//! x̃    = (1−β) x̃ + β x̂
//! μr   = 1 / mean(μs)
//! r̂    = x̃ + μr Fᴴ ŝ
//! x̂,μx = mean/variance of the constellation posterior P_m ∝ exp(−(d_m − r̂)²/2μr)
//! ```
//!
//! All vectors live in the transform's real embedding, so the complex DFT
//! with a Cartesian nonlinearity runs as the real algorithm on `2N` entries.

pub mod posterior;

use crate::modem::Constellation;
use crate::nonlinearity::{AffinePiece, Profile};
use crate::transforms::Transform;

pub use posterior::{GridSpec, ZPosterior, VAR_FLOOR};

/// `μp` above this marks the iteration as diverged.
pub const DIVERGENCE_VAR: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParamError {
    #[error("alpha must lie in (0, 1], got {0}")]
    Alpha(f64),
    #[error("beta must lie in (0, 1], got {0}")]
    Beta(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GampParams {
    /// Noise scaling factor.
    pub alpha: f64,
    /// Damping factor.
    pub beta: f64,
}

impl GampParams {
    /// Undamped, unscaled recursion.
    pub const CONVENTIONAL: Self = Self {
        alpha: 1.0,
        beta: 1.0,
    };
    /// Faster-converging scaled and damped settings.
    pub const MODIFIED: Self = Self {
        alpha: 0.71,
        beta: 0.875,
    };

    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(ParamError::Alpha(self.alpha));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(ParamError::Beta(self.beta));
        }
        Ok(())
    }
}

/// How the scalar output posterior is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum PosteriorMethod {
    #[default]
    ClosedForm,
    Grid(GridSpec),
}

/// Per-iteration decoder state.
#[derive(Debug, Clone, PartialEq)]
pub struct GampState {
    pub x_hat: Vec<f64>,
    pub mu_x: Vec<f64>,
    pub x_tilde: Vec<f64>,
    pub s_hat: Vec<f64>,
    pub mu_s: Vec<f64>,
    pub p_hat: Vec<f64>,
    pub mu_p: f64,
    pub r_hat: Vec<f64>,
    pub mu_r: f64,
    pub z_hat: Vec<f64>,
    pub mu_z: Vec<f64>,
    /// Iterations completed.
    pub t: usize,
}

impl GampState {
    /// Cold start: `x̂ = 0`, `x̃ = 0`, `μx = 1`, `ŝ = 0`, `μs = 0`.
    pub fn new(dim: usize) -> Self {
        Self {
            x_hat: vec![0.0; dim],
            mu_x: vec![1.0; dim],
            x_tilde: vec![0.0; dim],
            s_hat: vec![0.0; dim],
            mu_s: vec![0.0; dim],
            p_hat: vec![0.0; dim],
            mu_p: 1.0,
            r_hat: vec![0.0; dim],
            mu_r: 1.0,
            z_hat: vec![0.0; dim],
            mu_z: vec![0.0; dim],
            t: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.x_hat.len()
    }

    pub fn is_finite(&self) -> bool {
        let vecs = [
            &self.x_hat,
            &self.mu_x,
            &self.x_tilde,
            &self.s_hat,
            &self.mu_s,
            &self.p_hat,
            &self.r_hat,
            &self.z_hat,
            &self.mu_z,
        ];
        self.mu_p.is_finite()
            && self.mu_r.is_finite()
            && vecs.iter().all(|v| v.iter().all(|x| x.is_finite()))
    }
}

/// Returned when an iteration produced non-finite values or `μp` blew up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("GAMP iteration diverged")]
pub struct Diverged;

/// GAMP bound to one transform, nonlinearity and constellation.
#[derive(Debug, Clone)]
pub struct Gamp<'a> {
    transform: &'a Transform,
    profile: &'a Profile,
    constellation: &'a Constellation,
    pieces: Vec<AffinePiece>,
    breakpoints: Vec<f64>,
    method: PosteriorMethod,
}

impl<'a> Gamp<'a> {
    pub fn new(
        transform: &'a Transform,
        profile: &'a Profile,
        constellation: &'a Constellation,
    ) -> Self {
        Self {
            transform,
            profile,
            constellation,
            pieces: profile.pieces(),
            breakpoints: profile.breakpoints(),
            method: PosteriorMethod::ClosedForm,
        }
    }

    pub fn with_method(mut self, method: PosteriorMethod) -> Self {
        self.method = method;
        self
    }

    pub fn dim(&self) -> usize {
        self.transform.real_dim()
    }

    pub fn posterior_z(&self, y: f64, p: f64, var_p: f64, var_w: f64) -> ZPosterior {
        match &self.method {
            PosteriorMethod::ClosedForm => posterior::closed_form(y, p, var_p, var_w, &self.pieces),
            PosteriorMethod::Grid(spec) => {
                posterior::grid(y, p, var_p, var_w, self.profile, &self.breakpoints, spec)
            }
        }
    }

    /// Output-node update. `noise_var` is the channel `μw` before scaling.
    pub fn output_update(
        &self,
        state: &mut GampState,
        y: &[f64],
        noise_var: f64,
        params: &GampParams,
    ) {
        assert_eq!(y.len(), state.dim(), "observation length");
        let beta = params.beta;
        let var_w = params.alpha * noise_var;

        state.mu_p = mean(&state.mu_x).max(VAR_FLOOR);
        let mu_p = state.mu_p;

        state.p_hat.copy_from_slice(&state.x_hat);
        self.transform.forward_real(&mut state.p_hat);
        for (p, s) in state.p_hat.iter_mut().zip(&state.s_hat) {
            *p -= mu_p * s;
        }

        for n in 0..y.len() {
            let p = state.p_hat[n];
            let post = self.posterior_z(y[n], p, mu_p, var_w);
            state.z_hat[n] = post.mean;
            state.mu_z[n] = post.var;
            let s_new = (post.mean - p) / mu_p;
            let mu_s_new = (1.0 - post.var / mu_p) / mu_p;
            state.s_hat[n] = (1.0 - beta) * state.s_hat[n] + beta * s_new;
            state.mu_s[n] = (1.0 - beta) * state.mu_s[n] + beta * mu_s_new;
        }
    }

    /// Input-node update; advances the iteration counter.
    pub fn input_update(&self, state: &mut GampState, params: &GampParams) {
        let beta = params.beta;
        for (xt, xh) in state.x_tilde.iter_mut().zip(&state.x_hat) {
            *xt = (1.0 - beta) * *xt + beta * xh;
        }
        state.mu_r = mean(&state.mu_s).max(VAR_FLOOR).recip().max(VAR_FLOOR);
        let mu_r = state.mu_r;

        state.r_hat.copy_from_slice(&state.s_hat);
        self.transform.adjoint_real(&mut state.r_hat);
        for (r, xt) in state.r_hat.iter_mut().zip(&state.x_tilde) {
            *r = xt + mu_r * *r;
        }

        let points = self.constellation.points();
        for k in 0..state.dim() {
            let (m, v) = symbol_posterior(points, state.r_hat[k], mu_r);
            state.x_hat[k] = m;
            state.mu_x[k] = v.max(VAR_FLOOR);
        }
        state.t += 1;
    }

    /// One full iteration.
    pub fn iterate(
        &self,
        state: &mut GampState,
        y: &[f64],
        noise_var: f64,
        params: &GampParams,
    ) -> Result<(), Diverged> {
        self.output_update(state, y, noise_var, params);
        self.input_update(state, params);
        if state.mu_p > DIVERGENCE_VAR || !state.is_finite() {
            Err(Diverged)
        } else {
            Ok(())
        }
    }
}

/// Mean and variance of the discrete posterior `P_m ∝ exp(−(d_m − r)²/2μr)`.
pub fn symbol_posterior(points: &[f64], r: f64, mu_r: f64) -> (f64, f64) {
    let logits = points.iter().map(|d| -(d - r) * (d - r) / (2.0 * mu_r));
    let top = logits.clone().fold(f64::NEG_INFINITY, f64::max);
    let (mut z, mut m1) = (0.0, 0.0);
    for (d, l) in points.iter().zip(logits.clone()) {
        let w = (l - top).exp();
        z += w;
        m1 += w * d;
    }
    let mean = m1 / z;
    let var = points
        .iter()
        .zip(logits)
        .map(|(d, l)| (l - top).exp() * (d - mean) * (d - mean))
        .sum::<f64>()
        / z;
    (mean, var)
}

// Fixed left-to-right order keeps results independent of any threading.
fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}
