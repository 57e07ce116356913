use otm::nonlinearity::{builtin_profiles, PiecewiseLinear, Profile, ProfileError};
use otm::Complex64;
use proptest::prelude::*;

// Monte Carlo estimates of E[f(Z)²] from 1e8 standard-normal draws, with
// their standard errors.
const MC_POWER: [(f64, f64); 3] = [
    (0.199_341_901_889_568_88, 2.33e-5),
    (0.199_924_339_978_413_1, 2.34e-5),
    (0.200_200_165_006_883_34, 2.34e-5),
];

fn table(i: usize) -> PiecewiseLinear {
    builtin_profiles()[i].clone()
}

// Independent segment lookup: linear scan for the last threshold <= u.
fn scan(p: &PiecewiseLinear, z: f64) -> f64 {
    let u = p.g0 * z.abs();
    let mut seg = 0;
    for (i, &t) in p.t_norm.iter().enumerate() {
        if t <= u {
            seg = i;
        }
    }
    if z == 0.0 {
        0.0
    } else {
        z.signum() * (p.a_norm[seg] * u + p.b[seg])
    }
}

proptest! {
    #[test]
    fn odd_symmetry(z in -20.0f64..20.0, i in 0usize..3) {
        let p = table(i);
        prop_assert_eq!(p.eval(-z), -p.eval(z));
    }

    #[test]
    fn matches_linear_scan(z in -20.0f64..20.0, i in 0usize..3) {
        let p = table(i);
        prop_assert!((p.eval(z) - scan(&p, z)).abs() <= 1e-12);
    }

    #[test]
    fn affine_inside_segments(z in 0.01f64..8.0, i in 0usize..3) {
        let p = table(i);
        let h = 1e-3;
        let u = p.g0 * z;
        let seg = p.t_norm.iter().rposition(|&t| t <= u).unwrap();
        let lo = p.t_norm[seg] / p.g0;
        let hi = p.t_norm.get(seg + 1).map_or(f64::INFINITY, |t| t / p.g0);
        prop_assume!(z - h > lo + 1e-9 && z + h < hi - 1e-9);
        let slope = (p.eval(z + h) - p.eval(z - h)) / (2.0 * h);
        prop_assert!((slope - p.g0 * p.a_norm[seg]).abs() < 1e-9);
    }

    #[test]
    fn cartesian_complex(re in -6.0f64..6.0, im in -6.0f64..6.0) {
        let p = Profile::PiecewiseLinear(table(0));
        let w = p.eval_complex(Complex64::new(re, im));
        prop_assert_eq!(w.re, p.eval(re));
        prop_assert_eq!(w.im, p.eval(im));
    }
}

#[test]
fn tabulated_examples() {
    let p1 = table(0);
    assert_eq!(p1.eval(0.0), 0.0);
    assert!(p1.eval(1.0 / 0.53).abs() < 1e-12);
    assert!(p1.eval(-1.0 / 0.53).abs() < 1e-12);
    let p3 = table(2);
    assert!((p3.eval(0.4 / 0.415) - 0.5).abs() < 1e-12);

    let p = builtin_profiles();
    assert_eq!(p[0].g0, 0.53);
    assert_eq!(p[1].g0, 0.5125);
    assert_eq!(p[2].g0, 0.415);
    assert_eq!(p[1].b[2], -3.5);
    assert_eq!(p[2].t_norm[1], 0.8);
    assert_eq!(
        p[0].a_norm,
        vec![1.0, 2.0, 2.0, -2.0, -2.0, 2.0, 2.0, -2.0, -2.0, -0.5]
    );
    assert_eq!(
        p[0].b,
        vec![0.0, -2.0, -2.5, 4.0, 4.5, -4.0, -4.5, 6.0, 6.5, 2.5]
    );
}

#[test]
fn complex_examples() {
    let p = Profile::PiecewiseLinear(table(0));
    assert_eq!(
        p.eval_complex(Complex64::new(0.0, 0.0)),
        Complex64::new(0.0, 0.0)
    );
    let w = p.eval_complex(Complex64::new(1.3, 0.0));
    assert_eq!(w, Complex64::new(p.eval(1.3), 0.0));
    let w = p.eval_complex(Complex64::new(2.2, 2.2));
    assert_eq!(w.re, w.im);
}

#[test]
fn output_power_matches_monte_carlo() {
    for (i, &(mc, se)) in MC_POWER.iter().enumerate() {
        let ps = Profile::PiecewiseLinear(table(i)).output_power();
        assert!((ps - mc).abs() <= 3.0 * se, "profile {i}: {ps} vs {mc}");
        assert!((ps - mc).abs() / mc < 1e-3);
    }
}

#[test]
fn output_power_trivial_profiles() {
    assert_eq!(Profile::Identity.output_power(), 1.0);
    let limiter = PiecewiseLinear::new("limiter", vec![0.0], vec![1.0], vec![0.0], 1.0).unwrap();
    assert!((Profile::PiecewiseLinear(limiter).output_power() - 1.0).abs() < 1e-12);
}

#[test]
fn output_power_matches_quadrature() {
    // composite Simpson on each segment of the standard-normal integral
    for i in 0..3 {
        let p = table(i);
        let mut cuts: Vec<f64> = p.t_norm.iter().map(|t| t / p.g0).collect();
        cuts.push(12.0);
        let mut total = 0.0;
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let m = 20_000;
            let h = (b - a) / m as f64;
            let g = |z: f64| {
                // stay strictly inside the segment
                let zz = z.clamp(a + 1e-12, b - 1e-12);
                let f = p.eval(zz);
                f * f * (-0.5 * z * z).exp()
            };
            let mut s = g(a) + g(b);
            for j in 1..m {
                s += if j % 2 == 1 { 4.0 } else { 2.0 } * g(a + j as f64 * h);
            }
            total += s * h / 3.0;
        }
        let quad = 2.0 * total / (2.0 * std::f64::consts::PI).sqrt();
        let ps = Profile::PiecewiseLinear(p).output_power();
        assert!((ps - quad).abs() / quad < 1e-8, "{ps} vs {quad}");
    }
}

#[test]
fn identity_is_exact() {
    for z in [-3.5, -1e-300, 0.0, 2.0, 1e200] {
        assert_eq!(Profile::Identity.eval(z), z);
    }
}

#[test]
fn validation_names_fields() {
    let bad = PiecewiseLinear::new("x", vec![1.0, 1.0], vec![0.0, 0.0], vec![0.0, 0.0], 1.0);
    assert!(matches!(
        bad,
        Err(ProfileError::Invalid {
            field: "T_norm",
            ..
        })
    ));
    let bad = PiecewiseLinear::new("x", vec![1.0], vec![0.0, 0.0], vec![0.0], 1.0);
    assert!(bad.is_err());
    let bad = PiecewiseLinear::new("x", vec![1.0], vec![0.0], vec![0.0], -1.0);
    assert!(matches!(
        bad,
        Err(ProfileError::Invalid { field: "G0", .. })
    ));
    let unknown = PiecewiseLinear::from_json(
        r#"{"name":"x","a_norm":[1],"b":[0],"T_norm":[0],"G0":1,"extra":2}"#,
    );
    assert!(matches!(unknown, Err(ProfileError::Parse(_))));
}

#[test]
fn json_round_trip() {
    for p in builtin_profiles() {
        let doc = serde_json::to_string(&p).unwrap();
        assert!(doc.contains("\"G0\""));
        assert_eq!(PiecewiseLinear::from_json(&doc).unwrap(), p);
    }
}
