//! Memoryless odd piecewise-linear nonlinearities.
//!
//! A profile is stored in normalized form: slopes `a_norm`, offsets `b`,
//! thresholds `t_norm` (first entry 0) and a scale `g0`. With `u = g0·|z|`
//! and `i` the segment satisfying `t_norm[i] ≤ u < t_norm[i+1]` (the last
//! segment is unbounded),
//!
//! ```text
//! f(z) = sgn(z) · (a_norm[i]·u + b[i])
//! ```
//!
//! A sample lying exactly on a threshold belongs to the upper segment.

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::gaussian;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProfileError {
    #[error("invalid profile field `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },
    #[error("profile document: {0}")]
    Parse(String),
    #[error("unknown profile `{0}`")]
    Unknown(String),
}

fn invalid(field: &'static str, reason: impl Into<String>) -> ProfileError {
    ProfileError::Invalid {
        field,
        reason: reason.into(),
    }
}

/// Piecewise-linear profile in tabulated form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PiecewiseLinear {
    pub name: String,
    pub a_norm: Vec<f64>,
    pub b: Vec<f64>,
    #[serde(rename = "T_norm")]
    pub t_norm: Vec<f64>,
    #[serde(rename = "G0")]
    pub g0: f64,
}

impl PiecewiseLinear {
    pub fn new(
        name: impl Into<String>,
        a_norm: Vec<f64>,
        b: Vec<f64>,
        t_norm: Vec<f64>,
        g0: f64,
    ) -> Result<Self, ProfileError> {
        let p = Self {
            name: name.into(),
            a_norm,
            b,
            t_norm,
            g0,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parse and validate a JSON profile document.
    pub fn from_json(doc: &str) -> Result<Self, ProfileError> {
        let p: Self = serde_json::from_str(doc).map_err(|e| ProfileError::Parse(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ProfileError> {
        let k = self.t_norm.len();
        if k == 0 {
            return Err(invalid("T_norm", "at least one segment is required"));
        }
        if self.a_norm.len() != k {
            return Err(invalid(
                "a_norm",
                format!("has {} entries, T_norm has {k}", self.a_norm.len()),
            ));
        }
        if self.b.len() != k {
            return Err(invalid(
                "b",
                format!("has {} entries, T_norm has {k}", self.b.len()),
            ));
        }
        if self.t_norm[0] != 0.0 {
            return Err(invalid("T_norm", "first threshold must be 0"));
        }
        if self.t_norm.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(invalid("T_norm", "thresholds must be strictly increasing"));
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        if !finite(&self.a_norm) {
            return Err(invalid("a_norm", "entries must be finite"));
        }
        if !finite(&self.b) {
            return Err(invalid("b", "entries must be finite"));
        }
        if !finite(&self.t_norm) {
            return Err(invalid("T_norm", "entries must be finite"));
        }
        if !(self.g0 > 0.0 && self.g0.is_finite()) {
            return Err(invalid("G0", "must be positive and finite"));
        }
        Ok(())
    }

    fn segment(&self, u: f64) -> usize {
        self.t_norm.partition_point(|&t| t <= u) - 1
    }

    pub fn eval(&self, z: f64) -> f64 {
        let u = self.g0 * z.abs();
        let i = self.segment(u);
        let mag = self.a_norm[i] * u + self.b[i];
        if z > 0.0 {
            mag
        } else if z < 0.0 {
            -mag
        } else {
            0.0
        }
    }
}

/// One affine piece `f(z) = slope·z + offset` on `lo < z < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffinePiece {
    pub lo: f64,
    pub hi: f64,
    pub slope: f64,
    pub offset: f64,
}

/// A memoryless nonlinearity.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    /// `f(z) = z`; the linear baseline.
    Identity,
    PiecewiseLinear(PiecewiseLinear),
}

impl Profile {
    pub fn name(&self) -> &str {
        match self {
            Profile::Identity => "identity",
            Profile::PiecewiseLinear(p) => &p.name,
        }
    }

    pub fn eval(&self, z: f64) -> f64 {
        match self {
            Profile::Identity => z,
            Profile::PiecewiseLinear(p) => p.eval(z),
        }
    }

    /// Cartesian application to real and imaginary parts.
    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        Complex64::new(self.eval(z.re), self.eval(z.im))
    }

    /// The real line split into affine pieces, ordered by `lo`.
    pub fn pieces(&self) -> Vec<AffinePiece> {
        match self {
            Profile::Identity => vec![AffinePiece {
                lo: f64::NEG_INFINITY,
                hi: f64::INFINITY,
                slope: 1.0,
                offset: 0.0,
            }],
            Profile::PiecewiseLinear(p) => {
                let k = p.t_norm.len();
                let edge = |i: usize| {
                    if i < k {
                        p.t_norm[i] / p.g0
                    } else {
                        f64::INFINITY
                    }
                };
                let mut out = Vec::with_capacity(2 * k);
                for i in (0..k).rev() {
                    out.push(AffinePiece {
                        lo: -edge(i + 1),
                        hi: -edge(i),
                        slope: p.a_norm[i] * p.g0,
                        offset: -p.b[i],
                    });
                }
                for i in 0..k {
                    out.push(AffinePiece {
                        lo: edge(i),
                        hi: edge(i + 1),
                        slope: p.a_norm[i] * p.g0,
                        offset: p.b[i],
                    });
                }
                out
            }
        }
    }

    /// Interior points where `f` may change slope or jump, ascending.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Profile::Identity => Vec::new(),
            Profile::PiecewiseLinear(p) => {
                let mut pts: Vec<f64> = p.t_norm[1..].iter().map(|t| -t / p.g0).rev().collect();
                pts.push(0.0);
                pts.extend(p.t_norm[1..].iter().map(|t| t / p.g0));
                pts
            }
        }
    }

    /// `E[f(Z)²]` for `Z ~ N(0, 1)`, in closed form over the affine pieces.
    pub fn output_power(&self) -> f64 {
        self.pieces()
            .iter()
            .map(|pc| {
                let t = gaussian::truncated(pc.lo, pc.hi);
                if t.ln_mass == f64::NEG_INFINITY {
                    return 0.0;
                }
                let m = pc.slope * t.mean + pc.offset;
                t.ln_mass.exp() * (m * m + pc.slope * pc.slope * t.var)
            })
            .sum()
    }

    /// Look up `identity` or a built-in profile (`table1_1` .. `table1_3`).
    pub fn by_name(name: &str) -> Result<Self, ProfileError> {
        if name == "identity" {
            return Ok(Profile::Identity);
        }
        builtin_profiles()
            .into_iter()
            .find(|p| p.name == name)
            .map(Profile::PiecewiseLinear)
            .ok_or_else(|| ProfileError::Unknown(name.to_string()))
    }
}

const SLOPES_1: [f64; 10] = [1.0, 2.0, 2.0, -2.0, -2.0, 2.0, 2.0, -2.0, -2.0, -0.5];
const THRESHOLDS_1: [f64; 10] = [0.0, 1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5, 2.75, 3.0];

/// The three reference nonlinearities.
pub fn builtin_profiles() -> Vec<PiecewiseLinear> {
    vec![
        PiecewiseLinear {
            name: "table1_1".into(),
            a_norm: SLOPES_1.to_vec(),
            b: vec![0.0, -2.0, -2.5, 4.0, 4.5, -4.0, -4.5, 6.0, 6.5, 2.5],
            t_norm: THRESHOLDS_1.to_vec(),
            g0: 0.53,
        },
        PiecewiseLinear {
            name: "table1_2".into(),
            a_norm: SLOPES_1.to_vec(),
            b: vec![0.0, -2.0, -3.5, 4.0, 3.5, -4.0, -4.5, 6.0, 6.5, 2.5],
            t_norm: THRESHOLDS_1.to_vec(),
            g0: 0.5125,
        },
        PiecewiseLinear {
            name: "table1_3".into(),
            a_norm: vec![1.25, 2.0, 2.0, -2.0, -2.0, 2.0, 2.0, -2.0, -2.0, -0.5],
            b: vec![0.0, -1.6, -3.1, 3.6, 3.1, -3.6, -4.1, 5.6, 6.1, 2.4],
            t_norm: vec![0.0, 0.8, 1.05, 1.3, 1.55, 1.8, 2.05, 2.3, 2.55, 2.8],
            g0: 0.415,
        },
    ]
}
