//! Bit/symbol mapping, frame encoding `s = f(F x)`, the AWGN channel and the
//! Eb/N0 to noise-variance mapping.
//!
//! All signals live in the transform's real embedding: `N` reals for the WHT
//! and real DFT, `2N` interleaved reals for the complex DFT. Constellations
//! are described per real dimension; 4-QAM is two independent 2-PAM
//! components.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::crc::CRC_BITS;
use crate::nonlinearity::Profile;
use crate::transforms::{Transform, TransformError, TransformKind};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModemError {
    #[error("expected {expected} bits, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("{constellation} symbols cannot be carried by the {transform} transform")]
    Incompatible {
        constellation: ConstellationKind,
        transform: TransformKind,
    },
    #[error("frame of {frame_bits} bits leaves no room for payload after the {CRC_BITS}-bit CRC")]
    NoPayload { frame_bits: usize },
    #[error("nonlinearity output power {0} is not positive")]
    NonPositivePower(f64),
    #[error(transparent)]
    Transform(#[from] TransformError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstellationKind {
    #[serde(rename = "2pam")]
    Pam2,
    #[serde(rename = "4pam")]
    Pam4,
    #[serde(rename = "4qam")]
    Qam4,
}

impl std::fmt::Display for ConstellationKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ConstellationKind::Pam2 => "2pam",
            ConstellationKind::Pam4 => "4pam",
            ConstellationKind::Qam4 => "4qam",
        })
    }
}

/// Per-dimension alphabet with bit labels (most significant bit first).
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    kind: ConstellationKind,
    points: Vec<f64>,
    labels: Vec<u8>,
    bits_per_dim: usize,
}

impl Constellation {
    pub fn new(kind: ConstellationKind) -> Self {
        match kind {
            ConstellationKind::Pam2 | ConstellationKind::Qam4 => Self {
                kind,
                points: vec![-1.0, 1.0],
                labels: vec![0, 1],
                bits_per_dim: 1,
            },
            ConstellationKind::Pam4 => {
                let s = 1.0 / 5f64.sqrt();
                Self {
                    kind,
                    points: vec![-3.0 * s, -s, s, 3.0 * s],
                    // Gray: 00, 01, 11, 10
                    labels: vec![0b00, 0b01, 0b11, 0b10],
                    bits_per_dim: 2,
                }
            }
        }
    }

    pub fn kind(&self) -> ConstellationKind {
        self.kind
    }

    /// Ascending real alphabet `{d_m}`.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn bits_per_dim(&self) -> usize {
        self.bits_per_dim
    }

    /// Bits per transmitted (possibly complex) symbol.
    pub fn bits_per_symbol(&self) -> usize {
        match self.kind {
            ConstellationKind::Qam4 => 2 * self.bits_per_dim,
            _ => self.bits_per_dim,
        }
    }

    pub fn is_complex(&self) -> bool {
        self.kind == ConstellationKind::Qam4
    }

    /// Index of the nearest point; ties go to the more negative point.
    pub fn nearest(&self, v: f64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (m, &d) in self.points.iter().enumerate() {
            let dist = (v - d).abs();
            if dist < best_d {
                best = m;
                best_d = dist;
            }
        }
        best
    }

    pub fn hard_decide(&self, v: f64) -> f64 {
        self.points[self.nearest(v)]
    }

    pub fn map_bits(&self, bits: &[u8]) -> Result<Vec<f64>, ModemError> {
        let k = self.bits_per_dim;
        if bits.len() % k != 0 {
            return Err(ModemError::LengthMismatch {
                expected: bits.len().div_ceil(k) * k,
                actual: bits.len(),
            });
        }
        Ok(bits
            .chunks_exact(k)
            .map(|chunk| {
                let label = chunk.iter().fold(0u8, |acc, &b| (acc << 1) | (b & 1));
                let m = self
                    .labels
                    .iter()
                    .position(|&l| l == label)
                    .expect("every label value is assigned");
                self.points[m]
            })
            .collect())
    }

    /// Nearest-point labels for arbitrary real values.
    pub fn hard_demap(&self, values: &[f64]) -> Vec<u8> {
        let mut bits = Vec::with_capacity(values.len() * self.bits_per_dim);
        self.hard_demap_into(values, &mut bits);
        bits
    }

    pub fn hard_demap_into(&self, values: &[f64], bits: &mut Vec<u8>) {
        bits.clear();
        let k = self.bits_per_dim;
        for &v in values {
            let label = self.labels[self.nearest(v)];
            bits.extend((0..k).rev().map(|i| (label >> i) & 1));
        }
    }
}

/// Everything that defines one transmitted frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameConfig {
    pub n: usize,
    pub transform: TransformKind,
    pub profile: Profile,
    pub constellation: ConstellationKind,
}

impl FrameConfig {
    pub fn validate(&self) -> Result<(), ModemError> {
        if self.n == 0 || !self.n.is_power_of_two() {
            return Err(TransformError::NotPowerOfTwo(self.n).into());
        }
        let complex = self.constellation == ConstellationKind::Qam4;
        if complex != self.transform.is_complex() {
            return Err(ModemError::Incompatible {
                constellation: self.constellation,
                transform: self.transform,
            });
        }
        if self.frame_bits() <= CRC_BITS {
            return Err(ModemError::NoPayload {
                frame_bits: self.frame_bits(),
            });
        }
        Ok(())
    }

    pub fn real_dim(&self) -> usize {
        if self.transform.is_complex() {
            2 * self.n
        } else {
            self.n
        }
    }

    pub fn frame_bits(&self) -> usize {
        self.real_dim() * Constellation::new(self.constellation).bits_per_dim()
    }

    pub fn payload_bits(&self) -> usize {
        self.frame_bits().saturating_sub(CRC_BITS)
    }
}

/// A validated frame configuration with its planned transform.
#[derive(Debug, Clone)]
pub struct Modem {
    config: FrameConfig,
    transform: Transform,
    constellation: Constellation,
    output_power: f64,
}

impl Modem {
    pub fn new(config: FrameConfig) -> Result<Self, ModemError> {
        config.validate()?;
        let transform = Transform::new(config.transform, config.n)?;
        let constellation = Constellation::new(config.constellation);
        let output_power = config.profile.output_power();
        Ok(Self {
            config,
            transform,
            constellation,
            output_power,
        })
    }

    pub fn config(&self) -> &FrameConfig {
        &self.config
    }

    pub fn transform(&self) -> &Transform {
        &self.transform
    }

    pub fn constellation(&self) -> &Constellation {
        &self.constellation
    }

    pub fn profile(&self) -> &Profile {
        &self.config.profile
    }

    /// `E[f(Z)²]` per real dimension.
    pub fn output_power(&self) -> f64 {
        self.output_power
    }

    /// `f(F x)` for symbols already in the real embedding.
    pub fn waveform(&self, symbols: &[f64]) -> Vec<f64> {
        let mut s = symbols.to_vec();
        self.transform.forward_real(&mut s);
        for v in &mut s {
            *v = self.config.profile.eval(*v);
        }
        s
    }

    /// Map frame bits (payload and CRC) to the transmitted waveform.
    pub fn encode_frame(&self, frame_bits: &[u8]) -> Result<Vec<f64>, ModemError> {
        let expected = self.config.frame_bits();
        if frame_bits.len() != expected {
            return Err(ModemError::LengthMismatch {
                expected,
                actual: frame_bits.len(),
            });
        }
        let x = self.constellation.map_bits(frame_bits)?;
        Ok(self.waveform(&x))
    }

    pub fn noise_variance(&self, ebn0_db: f64) -> Result<f64, ModemError> {
        noise_variance_for(
            ebn0_db,
            self.constellation.bits_per_dim(),
            self.output_power,
        )
    }
}

/// Noise variance per real dimension for a given Eb/N0.
///
/// `μw = P_s / (2·ρ·10^(Eb/N0 / 10))` where `P_s` is the nonlinearity output
/// power and `ρ` the number of bits per real dimension. All transmitted bits,
/// CRC included, count towards Eb.
pub fn noise_variance(
    ebn0_db: f64,
    constellation: ConstellationKind,
    profile: &Profile,
) -> Result<f64, ModemError> {
    noise_variance_for(
        ebn0_db,
        Constellation::new(constellation).bits_per_dim(),
        profile.output_power(),
    )
}

fn noise_variance_for(ebn0_db: f64, bits_per_dim: usize, power: f64) -> Result<f64, ModemError> {
    if !(power > 0.0) {
        return Err(ModemError::NonPositivePower(power));
    }
    let ebn0 = 10f64.powf(ebn0_db / 10.0);
    Ok(power / (2.0 * bits_per_dim as f64 * ebn0))
}

/// `y = s + w` with `w` i.i.d. `N(0, variance)` per real dimension.
pub fn awgn<R: Rng + ?Sized>(s: &[f64], variance: f64, rng: &mut R) -> Vec<f64> {
    let sigma = variance.max(0.0).sqrt();
    s.iter()
        .map(|&v| {
            let w: f64 = rng.sample(StandardNormal);
            v + sigma * w
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pam2_mapping_and_demap() {
        let c = Constellation::new(ConstellationKind::Pam2);
        assert_eq!(c.map_bits(&[0, 1]).unwrap(), vec![-1.0, 1.0]);
        assert_eq!(c.hard_demap(&[-0.2]), vec![0]);
        assert_eq!(c.hard_demap(&[0.0]), vec![0]);
    }

    #[test]
    fn pam4_gray_mapping() {
        let c = Constellation::new(ConstellationKind::Pam4);
        let s = 1.0 / 5f64.sqrt();
        let x = c.map_bits(&[0, 0, 0, 1, 1, 1, 1, 0]).unwrap();
        assert_eq!(x, vec![-3.0 * s, -s, s, 3.0 * s]);
        // adjacent points differ in exactly one bit
        for w in c.labels().windows(2) {
            assert_eq!((w[0] ^ w[1]).count_ones(), 1);
        }
        assert_eq!(c.hard_decide(-0.5 * s), -s);
    }

    #[test]
    fn unit_energy_per_dimension() {
        for kind in [
            ConstellationKind::Pam2,
            ConstellationKind::Pam4,
            ConstellationKind::Qam4,
        ] {
            let c = Constellation::new(kind);
            let e: f64 = c.points().iter().map(|d| d * d).sum::<f64>() / c.points().len() as f64;
            assert!((e - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn map_rejects_ragged_bits() {
        let c = Constellation::new(ConstellationKind::Pam4);
        assert!(matches!(
            c.map_bits(&[0, 1, 1]),
            Err(ModemError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn noise_variance_examples() {
        let id = Profile::Identity;
        let v = noise_variance(0.0, ConstellationKind::Pam2, &id).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        let v = noise_variance(0.0, ConstellationKind::Pam4, &id).unwrap();
        assert!((v - 0.25).abs() < 1e-15);
        let v = noise_variance(0.0, ConstellationKind::Qam4, &id).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn frame_config_validation() {
        let mut cfg = FrameConfig {
            n: 64,
            transform: TransformKind::Wht,
            profile: Profile::Identity,
            constellation: ConstellationKind::Pam2,
        };
        assert!(cfg.validate().is_ok());
        assert_eq!(cfg.payload_bits(), 32);
        cfg.n = 32;
        assert!(matches!(cfg.validate(), Err(ModemError::NoPayload { .. })));
        cfg.n = 64;
        cfg.constellation = ConstellationKind::Qam4;
        assert!(matches!(
            cfg.validate(),
            Err(ModemError::Incompatible { .. })
        ));
        cfg.transform = TransformKind::ComplexDft;
        assert!(cfg.validate().is_ok());
        assert_eq!(cfg.frame_bits(), 128);
        cfg.n = 48;
        assert!(matches!(cfg.validate(), Err(ModemError::Transform(_))));
    }

    #[test]
    fn identity_waveform_preserves_energy() {
        let modem = Modem::new(FrameConfig {
            n: 256,
            transform: TransformKind::RealDft,
            profile: Profile::Identity,
            constellation: ConstellationKind::Pam2,
        })
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let bits: Vec<u8> = (0..256).map(|_| rng.random_range(0..2)).collect();
        let s = modem.encode_frame(&bits).unwrap();
        let e: f64 = s.iter().map(|v| v * v).sum();
        assert!((e - 256.0).abs() < 1e-9);
        assert!(modem.encode_frame(&bits[..10]).is_err());
    }

    #[test]
    fn awgn_is_seed_deterministic_and_vanishes_at_zero_variance() {
        let s = vec![0.5; 64];
        let a = awgn(&s, 0.3, &mut ChaCha8Rng::seed_from_u64(9));
        let b = awgn(&s, 0.3, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
        assert_eq!(awgn(&s, 0.0, &mut ChaCha8Rng::seed_from_u64(9)), s);
    }
}
