//! Orthonormal block transforms: Walsh-Hadamard, real DFT and complex DFT.
//!
//! Every transform is scaled so that `F Fᴴ = I`. Real transforms act on `N`
//! reals. The complex DFT acts on `N` complex values; through the `*_real`
//! entry points it is also exposed as a real-linear map on `2N` reals stored
//! interleaved as `[re0, im0, re1, im1, ...]`, which is the layout the
//! decoder works in.

use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TransformError {
    #[error("transform size {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("expected a vector of length {expected}, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },
    #[error("{0} transform does not accept {1} input")]
    Domain(TransformKind, &'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    Wht,
    RealDft,
    ComplexDft,
}

impl TransformKind {
    pub fn is_complex(self) -> bool {
        matches!(self, TransformKind::ComplexDft)
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TransformKind::Wht => "wht",
            TransformKind::RealDft => "real_dft",
            TransformKind::ComplexDft => "complex_dft",
        })
    }
}

/// Summary of `|F_{n,k}|²` over all entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagnitudeProfile {
    pub uniform: bool,
    /// Common value when uniform, otherwise the mean `1/N`.
    pub value: f64,
    pub min: f64,
    pub max: f64,
}

/// A planned transform of fixed kind and size.
#[derive(Clone)]
pub struct Transform {
    kind: TransformKind,
    n: usize,
    fwd: Option<Arc<dyn Fft<f64>>>,
    inv: Option<Arc<dyn Fft<f64>>>,
}

impl fmt::Debug for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Transform")
            .field("kind", &self.kind)
            .field("n", &self.n)
            .finish()
    }
}

impl Transform {
    pub fn new(kind: TransformKind, n: usize) -> Result<Self, TransformError> {
        if n == 0 || !n.is_power_of_two() {
            return Err(TransformError::NotPowerOfTwo(n));
        }
        let (fwd, inv) = match kind {
            TransformKind::Wht => (None, None),
            _ => {
                let mut planner = FftPlanner::new();
                (
                    Some(planner.plan_fft_forward(n)),
                    Some(planner.plan_fft_inverse(n)),
                )
            }
        };
        Ok(Self { kind, n, fwd, inv })
    }

    pub fn kind(&self) -> TransformKind {
        self.kind
    }

    /// Number of input symbols `N`.
    pub fn size(&self) -> usize {
        self.n
    }

    /// Length of the real embedding: `N`, or `2N` for the complex DFT.
    pub fn real_dim(&self) -> usize {
        if self.kind.is_complex() {
            2 * self.n
        } else {
            self.n
        }
    }

    /// `z = F x` for the real transforms.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>, TransformError> {
        self.check_real(x.len())?;
        let mut z = x.to_vec();
        self.forward_real(&mut z);
        Ok(z)
    }

    /// `x = Fᵀ z` for the real transforms.
    pub fn adjoint(&self, z: &[f64]) -> Result<Vec<f64>, TransformError> {
        self.check_real(z.len())?;
        let mut x = z.to_vec();
        self.adjoint_real(&mut x);
        Ok(x)
    }

    pub fn forward_complex(&self, x: &[Complex64]) -> Result<Vec<Complex64>, TransformError> {
        self.check_complex(x.len())?;
        let mut z = x.to_vec();
        self.fft_scaled(&mut z, true);
        Ok(z)
    }

    pub fn adjoint_complex(&self, z: &[Complex64]) -> Result<Vec<Complex64>, TransformError> {
        self.check_complex(z.len())?;
        let mut x = z.to_vec();
        self.fft_scaled(&mut x, false);
        Ok(x)
    }

    /// In-place forward transform on the real embedding.
    ///
    /// # Panics
    /// If `buf.len() != self.real_dim()`.
    pub fn forward_real(&self, buf: &mut [f64]) {
        assert_eq!(buf.len(), self.real_dim(), "transform buffer length");
        match self.kind {
            TransformKind::Wht => fwht(buf),
            TransformKind::RealDft => self.real_dft_forward(buf),
            TransformKind::ComplexDft => self.complex_in_real(buf, true),
        }
    }

    /// In-place adjoint transform on the real embedding.
    ///
    /// # Panics
    /// If `buf.len() != self.real_dim()`.
    pub fn adjoint_real(&self, buf: &mut [f64]) {
        assert_eq!(buf.len(), self.real_dim(), "transform buffer length");
        match self.kind {
            TransformKind::Wht => fwht(buf),
            TransformKind::RealDft => self.real_dft_adjoint(buf),
            TransformKind::ComplexDft => self.complex_in_real(buf, false),
        }
    }

    pub fn magnitude_profile(&self) -> MagnitudeProfile {
        let n = self.n as f64;
        match self.kind {
            TransformKind::Wht | TransformKind::ComplexDft => MagnitudeProfile {
                uniform: true,
                value: 1.0 / n,
                min: 1.0 / n,
                max: 1.0 / n,
            },
            TransformKind::RealDft => {
                let (mut min, mut max) = (f64::INFINITY, 0.0f64);
                for row in 0..self.n {
                    for col in 0..self.n {
                        let v = real_dft_entry(self.n, row, col).powi(2);
                        min = min.min(v);
                        max = max.max(v);
                    }
                }
                MagnitudeProfile {
                    uniform: max - min <= 1e-12 * max,
                    value: 1.0 / n,
                    min,
                    max,
                }
            }
        }
    }

    fn check_real(&self, len: usize) -> Result<(), TransformError> {
        if self.kind.is_complex() {
            return Err(TransformError::Domain(self.kind, "real"));
        }
        check_len(self.n, len)
    }

    fn check_complex(&self, len: usize) -> Result<(), TransformError> {
        if !self.kind.is_complex() {
            return Err(TransformError::Domain(self.kind, "complex"));
        }
        check_len(self.n, len)
    }

    fn fft_scaled(&self, buf: &mut [Complex64], forward: bool) {
        let plan = if forward { &self.fwd } else { &self.inv };
        plan.as_ref().expect("fft plan").process(buf);
        let scale = 1.0 / (self.n as f64).sqrt();
        buf.iter_mut().for_each(|v| *v *= scale);
    }

    fn complex_in_real(&self, buf: &mut [f64], forward: bool) {
        let mut tmp: Vec<Complex64> = buf
            .chunks_exact(2)
            .map(|c| Complex64::new(c[0], c[1]))
            .collect();
        self.fft_scaled(&mut tmp, forward);
        for (c, v) in buf.chunks_exact_mut(2).zip(&tmp) {
            c[0] = v.re;
            c[1] = v.im;
        }
    }

    // Rows: 1/sqrt(N); sqrt(2/N)cos(2πkn/N), sqrt(2/N)sin(2πkn/N) for
    // k = 1..N/2-1; (-1)^n/sqrt(N).
    fn real_dft_forward(&self, buf: &mut [f64]) {
        let n = self.n;
        if n == 1 {
            return;
        }
        let mut spec: Vec<Complex64> = buf.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fwd.as_ref().expect("fft plan").process(&mut spec);
        let s0 = 1.0 / (n as f64).sqrt();
        let s1 = (2.0 / n as f64).sqrt();
        buf[0] = spec[0].re * s0;
        for k in 1..n / 2 {
            buf[2 * k - 1] = spec[k].re * s1;
            buf[2 * k] = -spec[k].im * s1;
        }
        buf[n - 1] = spec[n / 2].re * s0;
    }

    fn real_dft_adjoint(&self, buf: &mut [f64]) {
        let n = self.n;
        if n == 1 {
            return;
        }
        let s0 = 1.0 / (n as f64).sqrt();
        let s1 = (2.0 / n as f64).sqrt();
        let mut spec = vec![Complex64::new(0.0, 0.0); n];
        spec[0] = Complex64::new(buf[0] * s0, 0.0);
        for k in 1..n / 2 {
            spec[k] = Complex64::new(buf[2 * k - 1] * s1, -buf[2 * k] * s1);
        }
        spec[n / 2] = Complex64::new(buf[n - 1] * s0, 0.0);
        self.inv.as_ref().expect("fft plan").process(&mut spec);
        for (b, v) in buf.iter_mut().zip(&spec) {
            *b = v.re;
        }
    }
}

fn check_len(expected: usize, actual: usize) -> Result<(), TransformError> {
    if expected == actual {
        Ok(())
    } else {
        Err(TransformError::SizeMismatch { expected, actual })
    }
}

/// Entry `(row, col)` of the orthonormal real DFT matrix.
pub fn real_dft_entry(n: usize, row: usize, col: usize) -> f64 {
    let nf = n as f64;
    if n == 1 {
        return 1.0;
    }
    if row == 0 {
        1.0 / nf.sqrt()
    } else if row == n - 1 {
        if col % 2 == 0 {
            1.0 / nf.sqrt()
        } else {
            -1.0 / nf.sqrt()
        }
    } else {
        let k = (row + 1) / 2;
        let theta = 2.0 * std::f64::consts::PI * (k * col % n) as f64 / nf;
        let s = (2.0 / nf).sqrt();
        if row % 2 == 1 {
            s * theta.cos()
        } else {
            s * theta.sin()
        }
    }
}

/// In-place Sylvester-ordered Walsh-Hadamard transform scaled by `1/sqrt(N)`.
pub fn fwht(buf: &mut [f64]) {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in buf.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
    let scale = 1.0 / (n as f64).sqrt();
    buf.iter_mut().for_each(|v| *v *= scale);
}
