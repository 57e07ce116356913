//! Built-in invariant suite run by `otm selftest`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::crc::crc32_bytes;
use crate::gamp::posterior::{closed_form, grid};
use crate::gamp::GridSpec;
use crate::gaussian;
use crate::modem::{ConstellationKind, FrameConfig};
use crate::nonlinearity::Profile;
use crate::simulate::{run_sweep, StopRule, SweepConfig};
use crate::transforms::{Transform, TransformKind};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Largest grid-vs-closed-form discrepancies over random tuples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossCheck {
    pub max_mean_diff: f64,
    pub max_rel_var_diff: f64,
}

/// Compare the two posterior evaluators on `tuples` random `(y, p, μp, μw)`
/// drawn around realistic decoder operating points.
pub fn posterior_cross_check(profile: &Profile, tuples: usize, seed: u64) -> CrossCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pieces = profile.pieces();
    let breaks = profile.breakpoints();
    let spec = GridSpec::default();
    let mut out = CrossCheck {
        max_mean_diff: 0.0,
        max_rel_var_diff: 0.0,
    };
    for _ in 0..tuples {
        let p = rng.random_range(-3.0..3.0);
        let vp = 10f64.powf(rng.random_range(-2.0..0.3));
        let vw = 10f64.powf(rng.random_range(-1.5..0.0));
        let z = p + vp.sqrt() * rng.random_range(-2.0..2.0);
        let y = profile.eval(z) + vw.sqrt() * rng.random_range(-2.0..2.0);
        let a = closed_form(y, p, vp, vw, &pieces);
        let b = grid(y, p, vp, vw, profile, &breaks, &spec);
        out.max_mean_diff = out.max_mean_diff.max((a.mean - b.mean).abs());
        out.max_rel_var_diff = out
            .max_rel_var_diff
            .max((a.var - b.var).abs() / a.var.abs().max(1e-300));
    }
    out
}

fn transform_round_trips() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for kind in [
        TransformKind::Wht,
        TransformKind::RealDft,
        TransformKind::ComplexDft,
    ] {
        for n in [8usize, 256, 1024] {
            let t = Transform::new(kind, n).expect("power-of-two size");
            let x: Vec<f64> = (0..t.real_dim())
                .map(|_| rng.random_range(-1.0..1.0))
                .collect();
            let mut buf = x.clone();
            t.forward_real(&mut buf);
            let e_in: f64 = x.iter().map(|v| v * v).sum();
            let e_out: f64 = buf.iter().map(|v| v * v).sum();
            worst = worst.max((e_in - e_out).abs() / e_in);
            t.adjoint_real(&mut buf);
            for (a, b) in x.iter().zip(&buf) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    Check {
        name: "transform round trips",
        passed: worst < 1e-10,
        detail: format!("max error {worst:.3e}"),
    }
}

fn posterior_agreement() -> Check {
    let mut worst = CrossCheck {
        max_mean_diff: 0.0,
        max_rel_var_diff: 0.0,
    };
    for (i, name) in ["table1_1", "table1_2", "table1_3"].iter().enumerate() {
        let profile = Profile::by_name(name).expect("built-in profile");
        let c = posterior_cross_check(&profile, 300, 100 + i as u64);
        worst.max_mean_diff = worst.max_mean_diff.max(c.max_mean_diff);
        worst.max_rel_var_diff = worst.max_rel_var_diff.max(c.max_rel_var_diff);
    }
    Check {
        name: "posterior grid vs closed form",
        passed: worst.max_mean_diff < 1e-5 && worst.max_rel_var_diff < 1e-4,
        detail: format!(
            "max |dmean| {:.3e}, max rel |dvar| {:.3e}",
            worst.max_mean_diff, worst.max_rel_var_diff
        ),
    }
}

fn crc_check_value() -> Check {
    let v = crc32_bytes(b"123456789");
    Check {
        name: "crc-32 check value",
        passed: v == 0xCBF4_3926,
        detail: format!("{v:#010x}"),
    }
}

fn identity_ber_point() -> Check {
    let ebn0_db = 4.0;
    let mut cfg = SweepConfig::new(
        FrameConfig {
            n: 256,
            transform: TransformKind::Wht,
            profile: Profile::Identity,
            constellation: ConstellationKind::Pam2,
        },
        vec![ebn0_db],
    );
    cfg.policy.t_max = 4;
    cfg.stop = StopRule {
        min_frame_errors: u64::MAX,
        max_frames: 800,
        max_bits: u64::MAX,
    };
    cfg.master_seed = 0x5e1f;
    let row = match run_sweep(&cfg) {
        Ok(rows) => rows[0].clone(),
        Err(e) => {
            return Check {
                name: "identity-profile BER",
                passed: false,
                detail: e.to_string(),
            }
        }
    };
    let expected = gaussian::q((2.0 * 10f64.powf(ebn0_db / 10.0)).sqrt());
    let sigma = (expected * (1.0 - expected) / row.bits as f64).sqrt();
    Check {
        name: "identity-profile BER",
        passed: (row.ber - expected).abs() <= 3.0 * sigma,
        detail: format!(
            "measured {:.4e}, expected {:.4e} +/- {:.1e} over {} bits",
            row.ber,
            expected,
            3.0 * sigma,
            row.bits
        ),
    }
}

/// Run every check in order.
pub fn run() -> Vec<Check> {
    vec![
        transform_round_trips(),
        posterior_agreement(),
        crc_check_value(),
        identity_ber_point(),
    ]
}
