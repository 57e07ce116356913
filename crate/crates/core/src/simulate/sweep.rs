//! BER/FER sweep over an Eb/N0 grid.

use std::io::{self, Write};
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;

use super::{frame_rng, with_threads};
use crate::crc::crc_append;
use crate::decoder::{DecodePolicy, Decoder, PolicyError};
use crate::gamp::PosteriorMethod;
use crate::modem::{awgn, FrameConfig, Modem, ModemError};

/// Frames decoded between stop-rule checks. Fixed so that the set of frames
/// counted never depends on the worker count.
const BATCH: u64 = 32;

pub const CSV_HEADER: &str =
    "ebn0_db,frames,bits,bit_errors,frame_errors,ber,fer,avg_iterations,phase2_fraction,wall_time_s";

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("invalid sweep field `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },
    #[error(transparent)]
    Modem(#[from] ModemError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
}

/// Per-point stopping rule; whichever bound is hit first ends the point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopRule {
    pub min_frame_errors: u64,
    pub max_frames: u64,
    pub max_bits: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            min_frame_errors: 100,
            max_frames: 100_000,
            max_bits: u64::MAX,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub frame: FrameConfig,
    pub policy: DecodePolicy,
    pub ebn0_grid: Vec<f64>,
    pub stop: StopRule,
    pub master_seed: u64,
    pub posterior: PosteriorMethod,
}

impl SweepConfig {
    pub fn new(frame: FrameConfig, ebn0_grid: Vec<f64>) -> Self {
        Self {
            frame,
            policy: DecodePolicy::default(),
            ebn0_grid,
            stop: StopRule::default(),
            master_seed: 0,
            posterior: PosteriorMethod::ClosedForm,
        }
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        self.frame.validate()?;
        self.policy.validate()?;
        let invalid = |field, reason: &str| SweepError::Invalid {
            field,
            reason: reason.to_string(),
        };
        if self.ebn0_grid.is_empty() {
            return Err(invalid("ebn0_grid", "must not be empty"));
        }
        if self.ebn0_grid.iter().any(|v| !v.is_finite()) {
            return Err(invalid("ebn0_grid", "entries must be finite"));
        }
        if self.stop.min_frame_errors == 0 {
            return Err(invalid("min_frame_errors", "must be positive"));
        }
        if self.stop.max_frames == 0 {
            return Err(invalid("max_frames", "must be positive"));
        }
        if self.stop.max_bits == 0 {
            return Err(invalid("max_bits", "must be positive"));
        }
        Ok(())
    }

    /// Spectral efficiency in bit/s/Hz (two real dimensions per Hz).
    pub fn spectral_efficiency(&self) -> f64 {
        let modem_bits = self.frame.frame_bits() as f64 / self.frame.real_dim() as f64;
        2.0 * modem_bits
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub ebn0_db: f64,
    pub frames: u64,
    pub bits: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    pub ber: f64,
    pub fer: f64,
    pub avg_iterations: f64,
    pub phase2_fraction: f64,
    pub wall_time: Duration,
}

impl SweepRow {
    /// Equality of everything except wall time.
    pub fn same_counts(&self, other: &Self) -> bool {
        Self {
            wall_time: Duration::ZERO,
            ..self.clone()
        } == Self {
            wall_time: Duration::ZERO,
            ..other.clone()
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct FrameOutcome {
    bit_errors: u64,
    iterations: u64,
    phase2: bool,
}

#[derive(Debug, Default)]
struct Tally {
    frames: u64,
    bits: u64,
    bit_errors: u64,
    frame_errors: u64,
    iterations: u64,
    phase2: u64,
}

impl Tally {
    fn add(&mut self, o: &FrameOutcome, payload_bits: u64) {
        self.frames += 1;
        self.bits += payload_bits;
        self.bit_errors += o.bit_errors;
        self.frame_errors += u64::from(o.bit_errors > 0);
        self.iterations += o.iterations;
        self.phase2 += u64::from(o.phase2);
    }

    fn done(&self, stop: &StopRule) -> bool {
        self.frame_errors >= stop.min_frame_errors
            || self.frames >= stop.max_frames
            || self.bits >= stop.max_bits
    }
}

/// Run the sweep on the current rayon pool.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>, SweepError> {
    cfg.validate()?;
    let modem = Modem::new(cfg.frame.clone())?;
    let decoder = Decoder::new(&modem, cfg.policy)?.with_method(cfg.posterior);
    let payload_bits = cfg.frame.payload_bits();

    let mut rows = Vec::with_capacity(cfg.ebn0_grid.len());
    for (point, &ebn0_db) in cfg.ebn0_grid.iter().enumerate() {
        let start = Instant::now();
        let noise_var = modem.noise_variance(ebn0_db)?;
        let mut tally = Tally::default();
        let mut next = 0u64;
        'point: loop {
            let outcomes: Vec<FrameOutcome> = (next..next + BATCH)
                .into_par_iter()
                .map(|index| {
                    let mut rng = frame_rng(cfg.master_seed, point as u64, index);
                    simulate_frame(&modem, &decoder, noise_var, payload_bits, &mut rng)
                })
                .collect();
            for o in &outcomes {
                tally.add(o, payload_bits as u64);
                if tally.done(&cfg.stop) {
                    break 'point;
                }
            }
            next += BATCH;
        }
        let frames = tally.frames as f64;
        rows.push(SweepRow {
            ebn0_db,
            frames: tally.frames,
            bits: tally.bits,
            bit_errors: tally.bit_errors,
            frame_errors: tally.frame_errors,
            ber: tally.bit_errors as f64 / tally.bits as f64,
            fer: tally.frame_errors as f64 / frames,
            avg_iterations: tally.iterations as f64 / frames,
            phase2_fraction: tally.phase2 as f64 / frames,
            wall_time: start.elapsed(),
        });
    }
    Ok(rows)
}

/// Run the sweep on a dedicated pool of `threads` workers (0 = all cores).
pub fn run_sweep_threads(cfg: &SweepConfig, threads: usize) -> Result<Vec<SweepRow>, SweepError> {
    with_threads(threads, || run_sweep(cfg))
}

fn simulate_frame<R: Rng>(
    modem: &Modem,
    decoder: &Decoder<'_>,
    noise_var: f64,
    payload_bits: usize,
    rng: &mut R,
) -> FrameOutcome {
    let payload: Vec<u8> = (0..payload_bits).map(|_| rng.random::<u8>() & 1).collect();
    let frame = crc_append(&payload);
    let s = modem
        .encode_frame(&frame)
        .expect("frame length matches a validated config");
    let y = awgn(&s, noise_var, rng);
    let result = decoder.decode_frame(&y, noise_var);
    let bit_errors = result
        .payload()
        .iter()
        .zip(&payload)
        .filter(|(a, b)| a != b)
        .count() as u64;
    FrameOutcome {
        bit_errors,
        iterations: result.iterations_used as u64,
        phase2: result.phase2_used,
    }
}

/// Write sweep rows as CSV. Wall time is only written when `timing` is set;
/// otherwise the column is left empty so output is reproducible byte for byte.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W, timing: bool) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        let wall = if timing {
            format!("{:.3}", r.wall_time.as_secs_f64())
        } else {
            String::new()
        };
        writeln!(
            out,
            "{},{},{},{},{},{:.6e},{:.6e},{:.4},{:.6},{}",
            r.ebn0_db,
            r.frames,
            r.bits,
            r.bit_errors,
            r.frame_errors,
            r.ber,
            r.fer,
            r.avg_iterations,
            r.phase2_fraction,
            wall
        )?;
    }
    Ok(())
}
