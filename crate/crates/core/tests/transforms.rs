use std::f64::consts::PI;

use otm::transforms::{Transform, TransformError, TransformKind};
use otm::Complex64;
use proptest::prelude::*;

const KINDS: [TransformKind; 3] = [
    TransformKind::Wht,
    TransformKind::RealDft,
    TransformKind::ComplexDft,
];

fn hadamard(n: usize) -> Vec<Vec<f64>> {
    let s = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|r| {
            (0..n)
                .map(|c| if (r & c).count_ones() % 2 == 0 { s } else { -s })
                .collect()
        })
        .collect()
}

// Rows: constant, then cos/sin pairs, then the alternating row.
fn real_fourier(n: usize) -> Vec<Vec<f64>> {
    let nf = n as f64;
    let mut rows = vec![vec![1.0 / nf.sqrt(); n]];
    for k in 1..n / 2 {
        let w = |c: usize| 2.0 * PI * (k * c) as f64 / nf;
        rows.push((0..n).map(|c| (2.0 / nf).sqrt() * w(c).cos()).collect());
        rows.push((0..n).map(|c| (2.0 / nf).sqrt() * w(c).sin()).collect());
    }
    rows.push(
        (0..n)
            .map(|c| if c % 2 == 0 { 1.0 } else { -1.0 } / nf.sqrt())
            .collect(),
    );
    rows
}

fn matvec(m: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

fn dft_direct(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    let s = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(j, &v)| {
                    v * Complex64::from_polar(s, -2.0 * PI * ((k * j) % n) as f64 / n as f64)
                })
                .sum()
        })
        .collect()
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn vector(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, len)
}

fn sized_vector(max_log2: u32) -> impl Strategy<Value = (usize, Vec<f64>)> {
    (1..=max_log2).prop_flat_map(|k| {
        let n = 1usize << k;
        (Just(n), vector(2 * n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn energy_is_preserved((n, x) in sized_vector(12)) {
        for kind in KINDS {
            let t = Transform::new(kind, n).unwrap();
            let mut buf = x[..t.real_dim()].to_vec();
            let e = norm(&buf);
            t.forward_real(&mut buf);
            prop_assert!((norm(&buf) - e).abs() <= 1e-10 * e.max(1e-300), "{kind}");
        }
    }

    #[test]
    fn adjoint_undoes_forward((n, x) in sized_vector(12)) {
        for kind in KINDS {
            let t = Transform::new(kind, n).unwrap();
            let orig = &x[..t.real_dim()];
            let mut buf = orig.to_vec();
            t.forward_real(&mut buf);
            t.adjoint_real(&mut buf);
            for (a, b) in orig.iter().zip(&buf) {
                prop_assert!((a - b).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn wht_is_an_involution((n, x) in sized_vector(12)) {
        let t = Transform::new(TransformKind::Wht, n).unwrap();
        let orig = &x[..n];
        let twice = t.forward(&t.forward(orig).unwrap()).unwrap();
        for (a, b) in orig.iter().zip(&twice) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn fast_wht_matches_matrix((n, x) in sized_vector(6)) {
        let t = Transform::new(TransformKind::Wht, n).unwrap();
        let fast = t.forward(&x[..n]).unwrap();
        let direct = matvec(&hadamard(n), &x[..n]);
        for (a, b) in fast.iter().zip(&direct) {
            prop_assert!((a - b).abs() <= 1e-12 * 10.0 * (n as f64).sqrt());
        }
    }

    #[test]
    fn real_dft_matches_matrix((n, x) in sized_vector(7)) {
        let t = Transform::new(TransformKind::RealDft, n).unwrap();
        let fast = t.forward(&x[..n]).unwrap();
        let direct = matvec(&real_fourier(n), &x[..n]);
        for (a, b) in fast.iter().zip(&direct) {
            prop_assert!((a - b).abs() <= 1e-11);
        }
    }

    #[test]
    fn complex_dft_matches_matrix((n, x) in sized_vector(7)) {
        let t = Transform::new(TransformKind::ComplexDft, n).unwrap();
        let xc: Vec<Complex64> = x.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect();
        let fast = t.forward_complex(&xc).unwrap();
        for (a, b) in fast.iter().zip(dft_direct(&xc)) {
            prop_assert!((a - b).norm() <= 1e-11);
        }
        // interleaved real embedding agrees with the complex path
        let mut buf = x.clone();
        t.forward_real(&mut buf);
        for (k, z) in fast.iter().enumerate() {
            prop_assert!((buf[2 * k] - z.re).abs() <= 1e-12);
            prop_assert!((buf[2 * k + 1] - z.im).abs() <= 1e-12);
        }
        let back = t.forward_complex(&t.adjoint_complex(&xc).unwrap()).unwrap();
        for (a, b) in xc.iter().zip(&back) {
            prop_assert!((a - b).norm() <= 1e-12 * 10.0);
        }
    }
}

#[test]
fn real_dft_rows_are_orthonormal() {
    for n in [2usize, 8, 32] {
        let t = Transform::new(TransformKind::RealDft, n).unwrap();
        // columns of F are F applied to unit vectors
        let cols: Vec<Vec<f64>> = (0..n)
            .map(|j| {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                t.forward(&e).unwrap()
            })
            .collect();
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-12, "n={n} ({i},{j}) {dot}");
            }
        }
    }
}

#[test]
fn small_examples() {
    let t = Transform::new(TransformKind::Wht, 2).unwrap();
    let z = t.forward(&[1.0, 1.0]).unwrap();
    assert!((z[0] - 2f64.sqrt()).abs() < 1e-15 && z[1].abs() < 1e-15);

    let t = Transform::new(TransformKind::Wht, 4).unwrap();
    assert_eq!(t.forward(&[1.0, 0.0, 0.0, 0.0]).unwrap(), vec![0.5; 4]);

    let t = Transform::new(TransformKind::RealDft, 8).unwrap();
    let mut e = vec![0.0; 8];
    e[0] = 1.0;
    assert!((norm(&t.forward(&e).unwrap()) - 1.0).abs() < 1e-15);

    let t = Transform::new(TransformKind::ComplexDft, 4).unwrap();
    let mut z = vec![Complex64::new(0.0, 0.0); 4];
    z[0] = Complex64::new(1.0, 0.0);
    for v in t.adjoint_complex(&z).unwrap() {
        assert!((v - Complex64::new(0.5, 0.0)).norm() < 1e-15);
    }
}

#[test]
fn magnitude_profiles() {
    for kind in [TransformKind::Wht, TransformKind::ComplexDft] {
        let m = Transform::new(kind, 8).unwrap().magnitude_profile();
        assert!(m.uniform);
        assert_eq!(m.value, 0.125);
    }
    assert!(
        !Transform::new(TransformKind::RealDft, 8)
            .unwrap()
            .magnitude_profile()
            .uniform
    );
}

#[test]
fn errors() {
    assert_eq!(
        Transform::new(TransformKind::Wht, 12).unwrap_err(),
        TransformError::NotPowerOfTwo(12)
    );
    let t = Transform::new(TransformKind::Wht, 8).unwrap();
    assert_eq!(
        t.forward(&[0.0; 4]).unwrap_err(),
        TransformError::SizeMismatch {
            expected: 8,
            actual: 4
        }
    );
    assert!(t.forward_complex(&[Complex64::new(0.0, 0.0); 8]).is_err());
}
