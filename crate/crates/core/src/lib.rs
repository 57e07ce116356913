//! Joint coding and modulation by an orthogonal transform followed by a
//! memoryless piecewise-linear nonlinearity, decoded with sum-product GAMP.
//!
//! The transmitter maps bits to symbols `x`, computes `z = F x` with an
//! orthonormal transform and sends `s = f(z)`. The receiver runs a two-phase
//! GAMP schedule with CRC early stopping. [`simulate`] holds the Monte Carlo
//! BER and PAPR experiments; [`cli`] the command-line front end.

pub mod cli;
pub mod config;
pub mod crc;
pub mod decoder;
pub mod gamp;
pub mod gaussian;
pub mod modem;
pub mod nonlinearity;
pub mod selftest;
pub mod simulate;
pub mod transforms;

pub use rustfft::num_complex::Complex64;

pub use config::{parse_ber_config, parse_papr_config, ConfigError};
pub use decoder::{DecodePolicy, Decoder, FrameResult};
pub use gamp::{Gamp, GampParams, GampState, PosteriorMethod};
pub use modem::{ConstellationKind, FrameConfig, Modem};
pub use nonlinearity::{PiecewiseLinear, Profile};
pub use transforms::{Transform, TransformKind};
