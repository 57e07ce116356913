//! PAPR of conventional and pre-coded OFDM symbols.
//!
//! Conventional: `N` i.i.d. 4-QAM subcarrier values. Pre-coded: 4-QAM
//! payload (unit variance per component) passed through the orthogonal
//! transform and the Cartesian nonlinearity, then used as subcarrier values.
//! Either way the subcarriers go through an inverse DFT, optionally
//! zero-padded to `L·N` points for `L`-times oversampling.

use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::frame_rng;
use crate::nonlinearity::Profile;
use crate::transforms::{Transform, TransformError, TransformKind};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PaprError {
    #[error("invalid papr field `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },
    #[error(transparent)]
    Transform(#[from] TransformError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PaprMode {
    ConventionalOfdm,
    Precoded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PaprConfig {
    pub n: usize,
    /// 1 (Nyquist) or 4.
    pub oversampling: usize,
    pub mode: PaprMode,
    pub profile: Profile,
    /// Pre-coding transform; real kinds act on each component separately.
    pub precoder: TransformKind,
    pub frames: usize,
    pub master_seed: u64,
}

impl PaprConfig {
    pub fn new(n: usize, oversampling: usize, mode: PaprMode, profile: Profile) -> Self {
        Self {
            n,
            oversampling,
            mode,
            profile,
            precoder: TransformKind::ComplexDft,
            frames: 20_000,
            master_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), PaprError> {
        if self.n < 2 || !self.n.is_power_of_two() {
            return Err(PaprError::Invalid {
                field: "N",
                reason: format!("{} is not a power of two >= 2", self.n),
            });
        }
        if !matches!(self.oversampling, 1 | 4) {
            return Err(PaprError::Invalid {
                field: "oversampling",
                reason: format!("must be 1 or 4, got {}", self.oversampling),
            });
        }
        if self.frames == 0 {
            return Err(PaprError::Invalid {
                field: "frames",
                reason: "must be positive".into(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CcdfPoint {
    pub threshold_db: f64,
    pub ccdf: f64,
}

/// Planned transforms for one PAPR configuration.
pub struct PaprSimulator {
    config: PaprConfig,
    precoder: Transform,
    ifft: Arc<dyn Fft<f64>>,
}

impl PaprSimulator {
    pub fn new(config: PaprConfig) -> Result<Self, PaprError> {
        config.validate()?;
        let precoder = Transform::new(config.precoder, config.n)?;
        let ifft = FftPlanner::new().plan_fft_inverse(config.n * config.oversampling);
        Ok(Self {
            config,
            precoder,
            ifft,
        })
    }

    pub fn config(&self) -> &PaprConfig {
        &self.config
    }

    /// Subcarrier values of one OFDM symbol.
    pub fn subcarriers<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Complex64> {
        let n = self.config.n;
        let mut sign = || if rng.random::<bool>() { 1.0 } else { -1.0 };
        match self.config.mode {
            PaprMode::ConventionalOfdm => {
                let a = std::f64::consts::FRAC_1_SQRT_2;
                (0..n)
                    .map(|_| Complex64::new(a * sign(), a * sign()))
                    .collect()
            }
            PaprMode::Precoded => {
                let x: Vec<Complex64> = (0..n).map(|_| Complex64::new(sign(), sign())).collect();
                let z = if self.config.precoder.is_complex() {
                    self.precoder
                        .forward_complex(&x)
                        .expect("length matches planned size")
                } else {
                    let mut re: Vec<f64> = x.iter().map(|v| v.re).collect();
                    let mut im: Vec<f64> = x.iter().map(|v| v.im).collect();
                    self.precoder.forward_real(&mut re);
                    self.precoder.forward_real(&mut im);
                    re.into_iter()
                        .zip(im)
                        .map(|(r, i)| Complex64::new(r, i))
                        .collect()
                };
                z.into_iter()
                    .map(|v| self.config.profile.eval_complex(v))
                    .collect()
            }
        }
    }

    /// PAPR (dB) of one randomly drawn symbol.
    pub fn papr_frame<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let x = self.subcarriers(rng);
        papr_with(&x, self.config.oversampling, self.ifft.as_ref())
    }
}

/// PAPR (dB) of the time-domain signal carried by `subcarriers`, sampled
/// `oversampling` times faster than Nyquist.
pub fn papr_db(subcarriers: &[Complex64], oversampling: usize) -> f64 {
    let ifft = FftPlanner::new().plan_fft_inverse(subcarriers.len() * oversampling);
    papr_with(subcarriers, oversampling, ifft.as_ref())
}

fn papr_with(x: &[Complex64], oversampling: usize, ifft: &dyn Fft<f64>) -> f64 {
    let n = x.len();
    let len = n * oversampling;
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    // signed-frequency placement: upper half of the band maps to the top
    let half = n / 2;
    buf[..half].copy_from_slice(&x[..half]);
    buf[len - (n - half)..].copy_from_slice(&x[half..]);
    ifft.process(&mut buf);
    let (mut peak, mut total) = (0.0f64, 0.0);
    for v in &buf {
        let p = v.norm_sqr();
        peak = peak.max(p);
        total += p;
    }
    10.0 * (peak / (total / len as f64)).log10()
}

/// Per-frame PAPR values in dB, frame `i` seeded from `(master_seed, i)`.
pub fn papr_samples(config: &PaprConfig) -> Result<Vec<f64>, PaprError> {
    let sim = PaprSimulator::new(config.clone())?;
    Ok((0..config.frames as u64)
        .into_par_iter()
        .map(|i| sim.papr_frame(&mut frame_rng(config.master_seed, u64::MAX, i)))
        .collect())
}

/// Empirical CCDF `P(PAPR > γ)` on a 0.1 dB grid from 0 dB up to the
/// largest observed value.
pub fn papr_ccdf(config: &PaprConfig) -> Result<Vec<CcdfPoint>, PaprError> {
    let mut samples = papr_samples(config)?;
    samples.sort_by(f64::total_cmp);
    let top = samples.last().copied().unwrap_or(0.0);
    let steps = (top / 0.1).ceil() as usize + 1;
    let total = samples.len() as f64;
    Ok((0..=steps)
        .map(|i| {
            let threshold_db = i as f64 / 10.0;
            let above = samples.len() - samples.partition_point(|&s| s <= threshold_db);
            CcdfPoint {
                threshold_db,
                ccdf: above as f64 / total,
            }
        })
        .collect())
}

/// PAPR level (dB) exceeded by a fraction `prob` of the samples, taking the
/// midpoint between the two order statistics around the crossing.
pub fn ccdf_quantile(samples: &[f64], prob: f64) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    let k = ((prob * s.len() as f64).round() as usize).clamp(1, s.len() - 1);
    0.5 * (s[k - 1] + s[k])
}

/// `1 − (1 − e^{−γ})^N` for a Nyquist-sampled OFDM symbol with Gaussian
/// samples; `γ` in dB.
pub fn analytic_nyquist_ccdf(n: usize, papr_db: f64) -> f64 {
    let gamma = 10f64.powf(papr_db / 10.0);
    -(n as f64 * (-(-gamma).exp()).ln_1p()).exp_m1()
}

/// Inverse of [`analytic_nyquist_ccdf`].
pub fn analytic_nyquist_papr_db(n: usize, prob: f64) -> f64 {
    let tail = -((-prob).ln_1p() / n as f64).exp_m1();
    10.0 * (-tail.ln()).log10()
}
