//! Standard-normal helpers: scaled complementary error function, log tail
//! probabilities and truncated-normal moments.
//!
//! Everything here works in the log domain or with scaled functions so that
//! intervals far out in a tail keep full relative precision.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;

/// Scaled complementary error function `exp(x²)·erfc(x)`.
pub fn erfcx(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 * (x * x).exp() - erfcx(-x);
    }
    if x < 26.0 {
        return (x * x).exp() * libm::erfc(x);
    }
    // Asymptotic expansion; at x >= 26 the terms shrink by > 1000x each.
    let inv2x2 = 1.0 / (2.0 * x * x);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..8 {
        term *= -((2 * k - 1) as f64) * inv2x2;
        sum += term;
    }
    sum / (x * PI.sqrt())
}

/// Standard normal density.
pub fn pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Upper tail `Q(x) = P(Z > x)`.
pub fn q(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// Lower tail `Φ(x) = P(Z ≤ x)`.
pub fn cdf(x: f64) -> f64 {
    q(-x)
}

/// `ln Q(x)`, accurate deep into the upper tail.
pub fn ln_q(x: f64) -> f64 {
    if x == f64::INFINITY {
        f64::NEG_INFINITY
    } else if x >= 0.0 {
        (0.5 * erfcx(x * FRAC_1_SQRT_2)).ln() - 0.5 * x * x
    } else {
        (-q(-x)).ln_1p()
    }
}

/// Inverse Mills ratio `φ(x)/Q(x)` for `x ≥ 0`.
fn inv_mills(x: f64) -> f64 {
    SQRT_2_OVER_PI / erfcx(x * FRAC_1_SQRT_2)
}

/// Mass, mean and variance of a standard normal restricted to `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncated {
    /// `ln(Φ(b) − Φ(a))`.
    pub ln_mass: f64,
    pub mean: f64,
    pub var: f64,
}

/// Moments of `Z ~ N(0,1)` conditioned on `a ≤ Z ≤ b`. Either bound may be
/// infinite. Returns `ln_mass = -inf` for an empty interval.
pub fn truncated(a: f64, b: f64) -> Truncated {
    if !(a < b) {
        return Truncated {
            ln_mass: f64::NEG_INFINITY,
            mean: a,
            var: 0.0,
        };
    }
    if a >= 0.0 {
        upper_tail(a, b)
    } else if b <= 0.0 {
        let t = upper_tail(-b, -a);
        Truncated { mean: -t.mean, ..t }
    } else {
        let mass = 0.5 * (libm::erf(b * FRAC_1_SQRT_2) - libm::erf(a * FRAC_1_SQRT_2));
        let (pa, pb) = (pdf(a), pdf(b));
        let apa = if a.is_finite() { a * pa } else { 0.0 };
        let bpb = if b.is_finite() { b * pb } else { 0.0 };
        let mean = (pa - pb) / mass;
        let var = 1.0 + (apa - bpb) / mass - mean * mean;
        Truncated {
            ln_mass: mass.ln(),
            mean,
            var: var.max(0.0),
        }
    }
}

// 0 <= a < b <= inf
fn upper_tail(a: f64, b: f64) -> Truncated {
    let ln_qa = ln_q(a);
    let ha = inv_mills(a);
    // ratio = Q(b)/Q(a); keep = 1 - ratio without cancellation
    let (ratio, keep, rhb, rbhb) = if b.is_finite() {
        let gap = ln_q(b) - ln_qa;
        let ratio = gap.exp();
        let hb = inv_mills(b);
        (ratio, -gap.exp_m1(), ratio * hb, ratio * b * hb)
    } else {
        (0.0, 1.0, 0.0, 0.0)
    };
    let mean = (ha - rhb) / keep;
    let var = if a > 40.0 && ratio < 1e-30 {
        // one-sided deep tail: 1 - h(h - a) cancels badly, use the series
        let a2 = a * a;
        (1.0 - 6.0 / a2 + 50.0 / (a2 * a2)) / a2
    } else {
        1.0 + (a * ha - rbhb) / keep - mean * mean
    };
    Truncated {
        ln_mass: ln_qa + keep.ln(),
        mean,
        var: var.max(0.0),
    }
}
