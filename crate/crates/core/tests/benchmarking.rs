#![allow(clippy::needless_range_loop)]
use std::collections::HashMap;

use fluxonium::benchmarking::*;
use proptest::prelude::*;

type M3 = [[f64; 3]; 3];

/// Rotation by `angle` about x (axis 0) or y (axis 1), Bloch convention.
fn rot(axis: usize, angle: f64) -> M3 {
    let (c, s) = (angle.cos(), angle.sin());
    match axis {
        0 => [[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]],
        _ => [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]],
    }
}

fn mul(a: &M3, b: &M3) -> M3 {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

fn key(m: &M3) -> [i8; 9] {
    let mut k = [0i8; 9];
    for i in 0..3 {
        for j in 0..3 {
            k[3 * i + j] = m[i][j].round() as i8;
        }
    }
    k
}

const HALF_PI: f64 = std::f64::consts::FRAC_PI_2;
const PI: f64 = std::f64::consts::PI;

/// (name, rotation) for the eight physical generators, built independently
/// of the crate.
fn generators() -> Vec<(&'static str, M3)> {
    vec![
        ("X", rot(0, PI)),
        ("-X", rot(0, -PI)),
        ("Y", rot(1, PI)),
        ("-Y", rot(1, -PI)),
        ("X/2", rot(0, HALF_PI)),
        ("-X/2", rot(0, -HALF_PI)),
        ("Y/2", rot(1, HALF_PI)),
        ("-Y/2", rot(1, -HALF_PI)),
    ]
}

fn table_rotation(el: &CliffordElement) -> M3 {
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = el.rotation[i][j] as f64;
        }
    }
    m
}

#[test]
fn brute_force_minimal_decompositions() {
    // shortest generator string for every reachable rotation, lengths ≤ 3
    let gens = generators();
    let id = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let mut shortest: HashMap<[i8; 9], usize> = HashMap::new();
    shortest.insert(key(&id), 0);
    let mut frontier = vec![id];
    for len in 1..=3 {
        let mut next = vec![];
        for m in &frontier {
            for (_, g) in &gens {
                let p = mul(g, m);
                shortest.entry(key(&p)).or_insert_with(|| {
                    next.push(p);
                    len
                });
            }
        }
        frontier = next;
    }
    assert_eq!(shortest.len(), 24, "generators reach the whole group within 3 gates");
    let table = CliffordTable::get();
    for el in &table.elements {
        let k = key(&table_rotation(el));
        assert_eq!(shortest[&k], el.gate_count(), "element {}", el.index);
        // decomposition multiplies out to the stored rotation
        let mut m = id;
        for g in &el.decomposition {
            let r = gens.iter().find(|(n, _)| *n == g.name()).map(|(_, r)| *r).unwrap_or(id);
            m = mul(&r, &m);
        }
        assert_eq!(key(&m), k, "element {}", el.index);
    }
    let total: usize = table.elements.iter().map(|e| e.gate_count()).sum();
    assert_eq!(total, 44);
    assert!((gates_per_clifford() - 1.833).abs() < 5e-4);
}

#[test]
fn group_axioms() {
    let t = CliffordTable::get();
    let identity = t.elements.iter().position(|e| e.decomposition.iter().all(|g| *g == PhysicalGate::I)).unwrap();
    for a in 0..CLIFFORD_COUNT {
        assert_eq!(t.compose(a, identity), a);
        assert_eq!(t.compose(identity, a), a);
        assert_eq!(t.compose(a, t.inverse(a)), identity);
        for b in 0..CLIFFORD_COUNT {
            let c = t.compose(a, b);
            // composing a then b is R_b R_a
            let want = mul(&table_rotation(&t.elements[b]), &table_rotation(&t.elements[a]));
            assert_eq!(key(&table_rotation(&t.elements[c])), key(&want));
        }
    }
}

#[test]
fn noiseless_sequences_survive() {
    let cfg = RbConfig {
        lengths: vec![1, 5, 40, 200],
        n_random: 10,
        ..RbConfig::default()
    };
    let out = run_rb(&cfg).unwrap();
    for &v in &out.mean {
        assert!((v - 0.8).abs() < 1e-12, "{v}");
    }
    let pb = run_pb(&cfg).unwrap();
    assert!(pb.mean.iter().all(|&v| (v - 1.0).abs() < 1e-12));
}

#[test]
fn paper_fidelity_arithmetic() {
    let f = gate_fidelity(1.7e-4);
    assert!((f - 0.99991).abs() < 1e-5, "{f}");
    assert_eq!(clifford_error(1.0), 0.0);
}

#[test]
fn rb_recovers_analytic_depolarization() {
    let lambda = 1e-3;
    let p_true = analytic_clifford_depolarization(lambda);
    // oracle: average of (1 − λ)^pulses with 52 π/2 pulses over 24 elements
    let table = CliffordTable::get();
    let pulses: usize = table.elements.iter().map(|e| e.pulse_count()).sum();
    assert_eq!(pulses, 52);
    for seed in 0..4 {
        let cfg = RbConfig {
            noise: NoiseChannel::depolarizing(lambda).unwrap(),
            seed,
            ..RbConfig::default()
        };
        let rates = fit_rb(&run_rb(&cfg).unwrap()).unwrap();
        let r_true = clifford_error(p_true);
        assert!((rates.fit.decay / p_true - 1.0).abs() < 0.02);
        assert!((rates.r_cliff / r_true - 1.0).abs() < 0.02, "seed {seed}: {} vs {r_true}", rates.r_cliff);
    }
}

#[test]
fn pb_matches_rb_for_depolarizing_noise() {
    let cfg = RbConfig {
        noise: NoiseChannel::depolarizing(1e-3).unwrap(),
        seed: 3,
        ..RbConfig::default()
    };
    let rb = fit_rb(&run_rb(&cfg).unwrap()).unwrap();
    let pb = fit_pb(&run_pb(&cfg).unwrap()).unwrap();
    assert!((pb.r_dec_cliff / rb.r_cliff - 1.0).abs() < 0.05, "{} vs {}", pb.r_dec_cliff, rb.r_cliff);
}

#[test]
fn unitary_noise_has_unit_unitarity() {
    let cfg = RbConfig {
        noise: NoiseChannel::overrotation(0.02).unwrap(),
        ..RbConfig::default()
    };
    let pb = fit_pb(&run_pb(&cfg).unwrap()).unwrap();
    assert!((pb.fit.decay - 1.0).abs() < 1e-9, "{}", pb.fit.decay);
    assert!(pb.r_dec_cliff.abs() < 1e-9);
}

#[test]
fn interleaved_half_pi_gate_error() {
    let lambda = 1e-3;
    let base = RbConfig {
        noise: NoiseChannel::depolarizing(lambda).unwrap(),
        seed: 8,
        ..RbConfig::default()
    };
    let reference = fit_rb(&run_rb(&base).unwrap()).unwrap();
    let inter = fit_rb(
        &run_rb(&RbConfig {
            interleaved: Some(PhysicalGate::X2),
            ..base.clone()
        })
        .unwrap(),
    )
    .unwrap();
    let r_gate = interleaved_gate_error(inter.fit.decay, reference.fit.decay).unwrap();
    // one depolarizing pulse: r = λ/2
    assert!((r_gate / (0.5 * lambda) - 1.0).abs() < 0.15, "{r_gate}");
}

#[test]
fn shot_noise_rb_still_recovers_decay() {
    let cfg = RbConfig {
        noise: NoiseChannel::depolarizing(1e-3).unwrap(),
        shots: 2000,
        seed: 5,
        ..RbConfig::default()
    };
    let out = run_rb(&cfg).unwrap();
    assert!(out.stderr.iter().all(|&s| s > 0.0));
    let rates = fit_rb(&out).unwrap();
    let r_true = clifford_error(analytic_clifford_depolarization(1e-3));
    assert!((rates.r_cliff / r_true - 1.0).abs() < 0.1);
}

#[test]
fn runs_deterministic_per_seed() {
    let cfg = RbConfig {
        noise: NoiseChannel::amplitude_dephasing(1e-3, 1e-3).unwrap(),
        n_random: 8,
        shots: 100,
        seed: 42,
        ..RbConfig::default()
    };
    assert_eq!(run_rb(&cfg).unwrap(), run_rb(&cfg).unwrap());
    assert_eq!(run_pb(&cfg).unwrap(), run_pb(&cfg).unwrap());
    let other = RbConfig { seed: 43, ..cfg.clone() };
    assert_ne!(run_rb(&cfg).unwrap().mean, run_rb(&other).unwrap().mean);
}

#[test]
fn invalid_configs_rejected() {
    let bad_lengths = RbConfig {
        lengths: vec![10, 5],
        ..RbConfig::default()
    };
    assert!(run_rb(&bad_lengths).is_err());
    let pb_inter = RbConfig {
        interleaved: Some(PhysicalGate::X),
        ..RbConfig::default()
    };
    assert!(run_pb(&pb_inter).is_err());
    assert!(NoiseChannel::depolarizing(1.5).is_err());
    assert!(decoherence_rates(0.0).is_err());
}

#[test]
fn outcome_csv_layout() {
    let cfg = RbConfig {
        lengths: vec![1, 2, 3, 4],
        n_random: 2,
        ..RbConfig::default()
    };
    let out = run_rb(&cfg).unwrap();
    assert!(!out.lengths_are_defaults);
    let csv = out.to_csv();
    assert_eq!(csv.lines().next(), Some("m,mean,stderr"));
    assert_eq!(csv.lines().count(), 5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn incoherent_error_never_exceeds_total(lambda in 1e-4f64..1e-3, eps in 0.02f64..0.05, seed in 0u64..1000) {
        let cfg = RbConfig {
            noise: NoiseChannel { depolarizing: lambda, overrotation: eps, ..NoiseChannel::default() },
            seed,
            ..RbConfig::default()
        };
        let rb = fit_rb(&run_rb(&cfg).unwrap()).unwrap();
        let pb = fit_pb(&run_pb(&cfg).unwrap()).unwrap();
        prop_assert!(pb.r_dec_cliff <= rb.r_cliff, "{} > {}", pb.r_dec_cliff, rb.r_cliff);
    }

    #[test]
    fn gate_unitaries_match_rotations(k in 0usize..8) {
        let g = PhysicalGate::GENERATORS[k];
        let u = g.unitary();
        // SU(2): unit determinant
        let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
        prop_assert!((det.re - 1.0).abs() < 1e-12 && det.im.abs() < 1e-12);
        let want = generators().into_iter().find(|(n, _)| *n == g.name()).unwrap().1;
        let got = g.rotation();
        for i in 0..3 {
            for j in 0..3 {
                prop_assert!((got[(i, j)] - want[i][j]).abs() < 1e-12);
            }
        }
    }
}
