//! Frame decoder: two GAMP phases with a full state reset between them,
//! CRC-based early stopping and minimum-distance fallback selection.
//!
//! Phase 1 runs `t_max/2` iterations with the modified parameters. If no
//! iteration yields a CRC-valid hard decision, the state is reset to the cold
//! start and phase 2 runs `t_max/2` iterations with the conventional
//! parameters. After every iteration the hard decision is CRC-checked; if it
//! fails, its waveform distance `E(t) = ‖y − f(F x̂_hard)‖²` is recorded. When
//! no iteration passes the CRC, the hard decision with the smallest `E(t)`
//! over both phases is returned.

use serde::{Deserialize, Serialize};

use crate::crc::crc_check;
use crate::gamp::{Gamp, GampParams, GampState, ParamError, PosteriorMethod};
use crate::modem::{Constellation, Modem};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PolicyError {
    #[error("t_max must be a positive even number, got {0}")]
    TMax(usize),
    #[error("phase {phase}: {source}")]
    Params {
        phase: u8,
        #[source]
        source: ParamError,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecodePolicy {
    pub phase1: GampParams,
    pub phase2: GampParams,
    /// Total iteration budget, split equally between the phases.
    pub t_max: usize,
}

impl Default for DecodePolicy {
    fn default() -> Self {
        Self {
            phase1: GampParams::MODIFIED,
            phase2: GampParams::CONVENTIONAL,
            t_max: 100,
        }
    }
}

impl DecodePolicy {
    pub fn validate(&self) -> Result<(), PolicyError> {
        if self.t_max == 0 || self.t_max % 2 != 0 {
            return Err(PolicyError::TMax(self.t_max));
        }
        self.phase1
            .validate()
            .map_err(|source| PolicyError::Params { phase: 1, source })?;
        self.phase2
            .validate()
            .map_err(|source| PolicyError::Params { phase: 2, source })?;
        Ok(())
    }

    pub fn phase_budget(&self) -> usize {
        self.t_max / 2
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameResult {
    /// Decoded frame bits, payload followed by CRC.
    pub frame_bits: Vec<u8>,
    pub payload_len: usize,
    pub crc_ok: bool,
    pub iterations_used: usize,
    pub phase2_used: bool,
    /// Smallest recorded `E(t)` and the (1-based, cumulative) iteration it
    /// came from; `inf` and 0 when nothing was recorded.
    pub best_distance: f64,
    pub best_iteration: usize,
    /// `E(t)` for every CRC-failing iteration, in order.
    pub distances: Vec<f64>,
}

impl FrameResult {
    pub fn payload(&self) -> &[u8] {
        &self.frame_bits[..self.payload_len]
    }
}

/// Nearest constellation point for every entry of `x̂`.
pub fn hard_decide(state: &GampState, constellation: &Constellation) -> Vec<f64> {
    state
        .x_hat
        .iter()
        .map(|&v| constellation.hard_decide(v))
        .collect()
}

/// `‖y − f(F x)‖²` for hard-decided symbols `x`.
pub fn euclidean_distance(y: &[f64], symbols: &[f64], modem: &Modem) -> f64 {
    modem
        .waveform(symbols)
        .iter()
        .zip(y)
        .map(|(s, y)| (y - s) * (y - s))
        .sum()
}

#[derive(Debug, Clone)]
pub struct Decoder<'a> {
    modem: &'a Modem,
    policy: DecodePolicy,
    gamp: Gamp<'a>,
}

impl<'a> Decoder<'a> {
    pub fn new(modem: &'a Modem, policy: DecodePolicy) -> Result<Self, PolicyError> {
        policy.validate()?;
        let gamp = Gamp::new(modem.transform(), modem.profile(), modem.constellation());
        Ok(Self {
            modem,
            policy,
            gamp,
        })
    }

    pub fn with_method(mut self, method: PosteriorMethod) -> Self {
        self.gamp = self.gamp.with_method(method);
        self
    }

    pub fn policy(&self) -> &DecodePolicy {
        &self.policy
    }

    pub fn gamp(&self) -> &Gamp<'a> {
        &self.gamp
    }

    pub fn decode_frame(&self, y: &[f64], noise_var: f64) -> FrameResult {
        let constellation = self.modem.constellation();
        let payload_len = self.modem.config().payload_bits();
        let dim = self.gamp.dim();
        let mut bits = Vec::with_capacity(self.modem.config().frame_bits());
        let mut best: Option<(f64, Vec<f64>, usize)> = None;
        let mut distances = Vec::new();
        let mut iterations = 0;
        let mut phase2_used = false;
        let mut last_hard = vec![constellation.points()[0]; dim];

        for (phase, params) in [self.policy.phase1, self.policy.phase2].iter().enumerate() {
            if phase == 1 {
                phase2_used = true;
            }
            let mut state = GampState::new(dim);
            for _ in 0..self.policy.phase_budget() {
                iterations += 1;
                if self.gamp.iterate(&mut state, y, noise_var, params).is_err() {
                    break;
                }
                let hard = hard_decide(&state, constellation);
                constellation.hard_demap_into(&hard, &mut bits);
                if crc_check(&bits) {
                    return FrameResult {
                        frame_bits: bits,
                        payload_len,
                        crc_ok: true,
                        iterations_used: iterations,
                        phase2_used,
                        best_distance: best.as_ref().map_or(f64::INFINITY, |b| b.0),
                        best_iteration: best.as_ref().map_or(0, |b| b.2),
                        distances,
                    };
                }
                let e = euclidean_distance(y, &hard, self.modem);
                distances.push(e);
                if best.as_ref().is_none_or(|b| e < b.0) {
                    best = Some((e, hard.clone(), iterations));
                }
                last_hard = hard;
            }
        }

        let (best_distance, symbols, best_iteration) =
            best.unwrap_or((f64::INFINITY, last_hard, 0));
        FrameResult {
            frame_bits: constellation.hard_demap(&symbols),
            payload_len,
            crc_ok: false,
            iterations_used: iterations,
            phase2_used,
            best_distance,
            best_iteration,
            distances,
        }
    }
}
