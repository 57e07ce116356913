use otm::crc::{crc_append, crc_check};
use otm::decoder::{euclidean_distance, DecodePolicy, Decoder};
use otm::gamp::GampParams;
use otm::gaussian::q;
use otm::modem::{awgn, ConstellationKind, FrameConfig, Modem};
use otm::nonlinearity::Profile;
use otm::transforms::TransformKind;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn modem(n: usize, profile: &str) -> Modem {
    Modem::new(FrameConfig {
        n,
        transform: TransformKind::Wht,
        profile: Profile::by_name(profile).unwrap(),
        constellation: ConstellationKind::Pam2,
    })
    .unwrap()
}

fn random_frame(rng: &mut ChaCha8Rng, m: &Modem) -> Vec<u8> {
    let payload: Vec<u8> = (0..m.config().payload_bits())
        .map(|_| rng.random::<u8>() & 1)
        .collect();
    crc_append(&payload)
}

#[test]
fn noiseless_table_profiles_decode_in_phase_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for name in ["table1_1", "table1_2", "table1_3"] {
        let m = modem(1024, name);
        let dec = Decoder::new(&m, DecodePolicy::default()).unwrap();
        for _ in 0..20 {
            let frame = random_frame(&mut rng, &m);
            let y = m.encode_frame(&frame).unwrap();
            let r = dec.decode_frame(&y, 1e-6);
            assert!(r.crc_ok, "{name}");
            assert!(!r.phase2_used);
            assert_eq!(r.frame_bits, frame);
        }
    }
}

#[test]
fn noiseless_short_frames_mostly_decode() {
    // N = 64 is far from the large-system regime; most but not all frames converge
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for name in ["table1_1", "table1_2", "table1_3"] {
        let m = modem(64, name);
        let dec = Decoder::new(&m, DecodePolicy::default()).unwrap();
        let mut ok = 0;
        for _ in 0..100 {
            let frame = random_frame(&mut rng, &m);
            let r = dec.decode_frame(&m.encode_frame(&frame).unwrap(), 1e-6);
            if r.crc_ok {
                assert_eq!(r.frame_bits, frame);
                ok += 1;
            }
        }
        assert!(ok >= 60, "{name}: {ok}/100");
    }
}

#[test]
fn identity_at_8db_matches_matched_filter_frame_rate() {
    let m = modem(1024, "identity");
    let dec = Decoder::new(&m, DecodePolicy::default()).unwrap();
    let var = m.noise_variance(8.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut ok, mut iters) = (0, Vec::new());
    let frames = 400;
    for _ in 0..frames {
        let frame = random_frame(&mut rng, &m);
        let y = awgn(&m.encode_frame(&frame).unwrap(), var, &mut rng);
        let r = dec.decode_frame(&y, var);
        if r.crc_ok {
            ok += 1;
            iters.push(r.iterations_used);
        }
    }
    // every frame bit must be right: (1 − p)^1024 with p the uncoded bit error rate
    let p = q((2.0 * 10f64.powf(0.8)).sqrt());
    let want = (1.0 - p).powi(1024);
    let sigma = (want * (1.0 - want) / frames as f64).sqrt();
    let got = ok as f64 / frames as f64;
    assert!((got - want).abs() < 3.0 * sigma, "{got} vs {want}");
    iters.sort();
    assert!(iters[iters.len() / 2] <= 3);
}

#[test]
fn failing_frame_returns_minimum_distance_candidate() {
    let m = modem(256, "table1_1");
    let policy = DecodePolicy {
        t_max: 20,
        ..DecodePolicy::default()
    };
    let dec = Decoder::new(&m, policy).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    // pure noise: no CRC-consistent decision is reachable
    let y: Vec<f64> = (0..256).map(|_| rng.random_range(-2.0..2.0)).collect();
    let r = dec.decode_frame(&y, 0.1);
    assert!(!r.crc_ok);
    assert!(r.phase2_used);
    assert_eq!(r.iterations_used, 20);
    assert_eq!(r.distances.len(), 20);
    let min = r.distances.iter().copied().fold(f64::INFINITY, f64::min);
    assert_eq!(r.best_distance, min);
    assert_eq!(r.distances[r.best_iteration - 1], min);
    let symbols: Vec<f64> = m.constellation().map_bits(&r.frame_bits).unwrap();
    assert_eq!(euclidean_distance(&y, &symbols, &m), min);
    assert!(!crc_check(&r.frame_bits));
}

#[test]
fn phase_two_starts_from_a_clean_state() {
    let m = modem(256, "table1_1");
    let k = 8;
    let two_phase = Decoder::new(
        &m,
        DecodePolicy {
            t_max: 2 * k,
            ..DecodePolicy::default()
        },
    )
    .unwrap();
    let conventional = Decoder::new(
        &m,
        DecodePolicy {
            phase1: GampParams::CONVENTIONAL,
            phase2: GampParams::CONVENTIONAL,
            t_max: 2 * k,
        },
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let var = m.noise_variance(1.0).unwrap();
    let mut checked = 0;
    for _ in 0..20 {
        let frame = random_frame(&mut rng, &m);
        let y = awgn(&m.encode_frame(&frame).unwrap(), var, &mut rng);
        let a = two_phase.decode_frame(&y, var);
        if a.crc_ok {
            continue;
        }
        let b = conventional.decode_frame(&y, var);
        assert_eq!(&a.distances[k..], &b.distances[..k]);
        checked += 1;
    }
    assert!(checked > 0);
}

#[test]
fn iteration_budget_is_respected() {
    let m = modem(128, "table1_2");
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for t_max in [2, 6, 40] {
        let dec = Decoder::new(
            &m,
            DecodePolicy {
                t_max,
                ..DecodePolicy::default()
            },
        )
        .unwrap();
        for ebn0 in [0.0, 3.0, 8.0] {
            let var = m.noise_variance(ebn0).unwrap();
            let frame = random_frame(&mut rng, &m);
            let y = awgn(&m.encode_frame(&frame).unwrap(), var, &mut rng);
            let r = dec.decode_frame(&y, var);
            assert!(r.iterations_used <= t_max);
            assert_eq!(r.phase2_used, r.iterations_used > t_max / 2);
            if r.crc_ok {
                assert!(crc_check(&r.frame_bits));
                let s = m.encode_frame(&r.frame_bits).unwrap();
                assert_eq!(s.len(), 128);
            }
        }
    }
}

#[test]
fn distance_is_zero_for_truth_and_grows_with_a_flipped_symbol() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for name in ["identity", "table1_1"] {
        let m = modem(256, name);
        for _ in 0..1000 {
            let frame = random_frame(&mut rng, &m);
            let y = m.encode_frame(&frame).unwrap();
            let mut x = m.constellation().map_bits(&frame).unwrap();
            assert_eq!(euclidean_distance(&y, &x, &m), 0.0);
            let k = rng.random_range(0..x.len());
            x[k] = -x[k];
            assert!(euclidean_distance(&y, &x, &m) > 0.0, "{name}");
        }
    }
}
