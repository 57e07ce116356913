//! Scalar posterior of `z` given `y = f(z) + w`, `w ~ N(0, var_w)`, and the
//! Gaussian prior `z ~ N(p, var_p)`:
//!
//! ```text
//! π(z) ∝ exp(−(y − f(z))² / 2var_w) · exp(−(p − z)² / 2var_p)
//! ```
//!
//! Two independent evaluations are provided. [`closed_form`] integrates each
//! affine piece of `f` exactly with truncated-normal moments.
//! [`grid`] sums the integrand numerically on a uniform lattice and only
//! needs point evaluations of `f` plus its breakpoint locations.

use crate::gaussian;
use crate::nonlinearity::{AffinePiece, Profile};

/// Lower bound applied to every returned variance.
pub const VAR_FLOOR: f64 = 1e-12;

// Pieces farther than this from the prior mean (in prior standard deviations)
// are only integrated if their prior-mass bound is not negligible.
const NEAR_SIGMAS: f64 = 10.0;
// Relative mass below e^-40 is dropped.
const LN_NEGLIGIBLE: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZPosterior {
    pub mean: f64,
    pub var: f64,
}

/// Uniform-lattice integration settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Lattice points across the window.
    pub points: usize,
    /// Window half-width in prior standard deviations.
    pub half_width_sigmas: f64,
    /// Minimum window half-width.
    pub min_half_width: f64,
    /// Window is clipped to `[-clip, clip]`.
    pub clip: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            points: 1025,
            half_width_sigmas: 8.0,
            min_half_width: 0.1,
            clip: 12.0,
        }
    }
}

/// Log-domain running mixture of weighted Gaussian-moment components.
#[derive(Debug, Clone, Copy)]
struct Mixture {
    ln_weight: f64,
    mean: f64,
    var: f64,
}

impl Mixture {
    fn empty() -> Self {
        Self {
            ln_weight: f64::NEG_INFINITY,
            mean: 0.0,
            var: 0.0,
        }
    }

    fn push(&mut self, ln_w: f64, mean: f64, var: f64) {
        if ln_w.is_nan() || ln_w == f64::NEG_INFINITY {
            return;
        }
        if self.ln_weight == f64::NEG_INFINITY {
            *self = Self {
                ln_weight: ln_w,
                mean,
                var,
            };
            return;
        }
        let hi = self.ln_weight.max(ln_w);
        let total = hi + ((self.ln_weight - hi).exp() + (ln_w - hi).exp()).ln();
        let frac = (ln_w - total).exp();
        let delta = mean - self.mean;
        self.mean += frac * delta;
        self.var = (1.0 - frac) * self.var + frac * var + frac * (1.0 - frac) * delta * delta;
        self.ln_weight = total;
    }
}

/// Exact posterior moments by per-piece truncated-normal integration.
pub fn closed_form(y: f64, p: f64, var_p: f64, var_w: f64, pieces: &[AffinePiece]) -> ZPosterior {
    let sd_p = var_p.sqrt();
    let mut mix = Mixture::empty();
    let mut far = false;
    for pc in pieces {
        if gap_sigmas(pc, p, sd_p) <= NEAR_SIGMAS {
            let (ln_w, m, v) = piece_moments(pc, y, p, var_p, var_w);
            mix.push(ln_w, m, v);
        } else {
            far = true;
        }
    }
    if far {
        // ln_w of a piece is at most ln(sqrt(var_p)·Q(d)) <= 0.5 ln var_p - d²/2 - ln 2
        let cutoff = mix.ln_weight - LN_NEGLIGIBLE;
        for pc in pieces {
            let d = gap_sigmas(pc, p, sd_p);
            if d > NEAR_SIGMAS && 0.5 * var_p.ln() - 0.5 * d * d - std::f64::consts::LN_2 >= cutoff
            {
                let (ln_w, m, v) = piece_moments(pc, y, p, var_p, var_w);
                mix.push(ln_w, m, v);
            }
        }
    }
    if mix.ln_weight == f64::NEG_INFINITY {
        return ZPosterior {
            mean: p,
            var: var_p.max(VAR_FLOOR),
        };
    }
    ZPosterior {
        mean: mix.mean,
        var: mix.var.max(VAR_FLOOR),
    }
}

fn gap_sigmas(pc: &AffinePiece, p: f64, sd_p: f64) -> f64 {
    if p < pc.lo {
        (pc.lo - p) / sd_p
    } else if p > pc.hi {
        (p - pc.hi) / sd_p
    } else {
        0.0
    }
}

// Returns (ln weight, mean, variance) of the posterior restricted to one
// piece. The weight omits factors common to all pieces.
fn piece_moments(pc: &AffinePiece, y: f64, p: f64, var_p: f64, var_w: f64) -> (f64, f64, f64) {
    let c = pc.slope;
    let r = y - pc.offset;
    let precision = c * c / var_w + 1.0 / var_p;
    let m = (c * r / var_w + p / var_p) / precision;
    let sd = precision.sqrt().recip();
    let resid = r - c * m;
    let k = -0.5 * (resid * resid / var_w + (p - m) * (p - m) / var_p);
    let t = gaussian::truncated((pc.lo - m) / sd, (pc.hi - m) / sd);
    (k + sd.ln() + t.ln_mass, m + sd * t.mean, sd * sd * t.var)
}

/// Posterior moments by composite Simpson summation on a uniform lattice
/// whose cells are split at the breakpoints of `f`.
///
/// The lattice spacing is `window / (points - 1)`; each sub-interval between
/// breakpoints is sampled at (at most) that spacing. Values of `f` at
/// sub-interval ends are extrapolated from the two adjacent interior samples,
/// which is exact for affine pieces and avoids evaluating `f` on a jump.
pub fn grid(
    y: f64,
    p: f64,
    var_p: f64,
    var_w: f64,
    profile: &Profile,
    breakpoints: &[f64],
    spec: &GridSpec,
) -> ZPosterior {
    let half = spec.half_width_sigmas * var_p.sqrt().max(spec.min_half_width);
    let (mut lo, mut hi) = ((p - half).max(-spec.clip), (p + half).min(spec.clip));
    if lo >= hi {
        lo = p - half;
        hi = p + half;
    }
    let h = (hi - lo) / (spec.points.max(3) - 1) as f64;

    let mut cuts = Vec::with_capacity(breakpoints.len() + 2);
    cuts.push(lo);
    cuts.extend(breakpoints.iter().copied().filter(|&b| b > lo && b < hi));
    cuts.push(hi);

    // (z, weight, exponent)
    let mut nodes: Vec<(f64, f64, f64)> = Vec::with_capacity(spec.points + 8 * cuts.len());
    let exponent = |z: f64, fz: f64| {
        let e = y - fz;
        -(e * e) / (2.0 * var_w) - (p - z) * (p - z) / (2.0 * var_p)
    };
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mut m = ((b - a) / h).ceil() as usize;
        m = m.max(4);
        if m % 2 == 1 {
            m += 1;
        }
        let step = (b - a) / m as f64;
        let fz: Vec<f64> = (1..m).map(|j| profile.eval(a + j as f64 * step)).collect();
        let f_a = 2.0 * fz[0] - fz[1];
        let f_b = 2.0 * fz[m - 2] - fz[m - 3];
        let wt = step / 3.0;
        nodes.push((a, wt, exponent(a, f_a)));
        for j in 1..m {
            let z = a + j as f64 * step;
            let simpson = if j % 2 == 1 { 4.0 } else { 2.0 };
            nodes.push((z, simpson * wt, exponent(z, fz[j - 1])));
        }
        nodes.push((b, wt, exponent(b, f_b)));
    }

    let top = nodes.iter().map(|n| n.2).fold(f64::NEG_INFINITY, f64::max);
    let (mut s0, mut s1) = (0.0, 0.0);
    for &(z, w, e) in &nodes {
        let q = w * (e - top).exp();
        s0 += q;
        s1 += q * z;
    }
    let mean = s1 / s0;
    let s2: f64 = nodes
        .iter()
        .map(|&(z, w, e)| w * (e - top).exp() * (z - mean) * (z - mean))
        .sum();
    ZPosterior {
        mean,
        var: (s2 / s0).max(VAR_FLOOR),
    }
}
