use std::sync::Arc;

use num_rational::BigRational;
use num_traits::FromPrimitive;
use poincare_gpt::composites::{
    behavior, binary_measurements, certify_entanglement, chsh_value, deterministic_chsh_bound,
    exact_chsh, in_max_tensor, is_separable, is_separable_exact, joint_to_float,
    max_tensor_vertices, maximize_chsh, maximize_chsh_exact, no_signalling_check,
    planar_qubit_measurement, singlet, singlet_tsirelson_scenario, tensor, two_qubit_gpt,
    JointState, MeasurementFamily, SeparabilityVerdict, DEFAULT_RESOLUTION,
};
use poincare_gpt::exact::{exact_frame_by_name, exact_polygon4};
use poincare_gpt::gpt::probability;
use poincare_gpt::{zoo, GptVector, TheorySpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn arc(name: &str) -> Arc<TheorySpec> {
    Arc::new(zoo::theory_by_name(name).unwrap())
}

// Largest CHSH value of any local deterministic strategy, by enumeration.
fn sixteen_strategies() -> f64 {
    let mut best = f64::MIN;
    for a0 in [-1.0, 1.0] {
        for a1 in [-1.0, 1.0] {
            for b0 in [-1.0, 1.0] {
                for b1 in [-1.0f64, 1.0] {
                    best = best.max(a0 * b0 + a0 * b1 + a1 * b0 - a1 * b1);
                }
            }
        }
    }
    best
}

#[test]
fn local_bound_matches_enumeration() {
    assert_eq!(deterministic_chsh_bound(), sixteen_strategies());
    assert_eq!(sixteen_strategies(), 2.0);
}

#[test]
fn exact_box_world_reaches_four_with_verified_witness() {
    let sq = exact_polygon4();
    let obs = sq.binary_observables();
    let (value, phi) = maximize_chsh_exact(&sq, &sq, &obs, &obs).unwrap();
    assert_eq!(value, BigRational::from_i64(4).unwrap());
    let verdict = is_separable_exact(&phi, &sq.states, &sq.states).unwrap();
    assert!(verdict.is_err(), "PR box must not decompose");

    let bw = arc("polygon:4");
    let float = JointState::new(joint_to_float(&phi, &sq, &sq), bw.clone(), bw.clone(), 1e-9).unwrap();
    assert!(in_max_tensor(&float, 1e-9, 0).unwrap());
    assert!(no_signalling_check(&float, 1e-9, 0).unwrap());
    match is_separable(&float, 1e-9, 0).unwrap() {
        SeparabilityVerdict::Entangled { witness } => {
            let on_phi: f64 = witness.iter().zip(float.vector()).map(|(w, x)| w * x).sum();
            assert!(on_phi > 0.0);
            for za in zoo::polygon_states(4).unwrap() {
                for zb in zoo::polygon_states(4).unwrap() {
                    let p = tensor(&za, &zb);
                    let v: f64 = witness.iter().zip(p.entries()).map(|(w, x)| w * x).sum();
                    assert!(v <= 1e-9);
                }
            }
        }
        other => panic!("expected a witness, got {other:?}"),
    }

    let fam = MeasurementFamily::all(&bw, &bw, 0);
    let opt = maximize_chsh(bw.clone(), bw, &fam, 0).unwrap();
    assert!((opt.value - 4.0).abs() < 1e-6);
}

#[test]
fn box_world_vertex_census() {
    let bw = arc("polygon:4");
    let verts = max_tensor_vertices(&bw, &bw, 1e-9).unwrap();
    assert_eq!(verts.len(), 24);
    let mut entangled = 0;
    for v in verts {
        let s = JointState::new(v, bw.clone(), bw.clone(), 1e-9).unwrap();
        assert!(in_max_tensor(&s, 1e-9, 0).unwrap());
        assert!(no_signalling_check(&s, 1e-9, 0).unwrap());
        if !is_separable(&s, 1e-9, 0).unwrap().is_separable() {
            entangled += 1;
        }
    }
    assert_eq!(entangled, 8);
}

#[test]
fn classical_sides_admit_no_entanglement() {
    for (a, b) in [("bit", "bit"), ("simplex:2", "simplex:2"), ("bit", "polygon:5")] {
        let (ta, tb) = (arc(a), arc(b));
        for v in max_tensor_vertices(&ta, &tb, 1e-9).unwrap() {
            let s = JointState::new(v, ta.clone(), tb.clone(), 1e-9).unwrap();
            assert!(is_separable(&s, 1e-9, 0).unwrap().is_separable(), "{a}/{b}");
        }
        let fam = MeasurementFamily::all(&ta, &tb, 0);
        assert!(maximize_chsh(ta, tb, &fam, 0).unwrap().value <= 2.0 + 1e-9);
    }
}

#[test]
fn exact_polygon_regressions() {
    let run = |a: &str, b: &str| {
        exact_chsh(&exact_frame_by_name(a).unwrap(), &exact_frame_by_name(b).unwrap()).unwrap()
    };
    let tri = run("polygon:3", "polygon:3");
    assert_eq!(tri.exact, "2");
    let hex = run("polygon:6", "polygon:6");
    assert_eq!(hex.exact, "3");
    let bit = run("bit", "polygon:4");
    assert_eq!(bit.value, 2.0);
    let sq = run("boxworld", "boxworld");
    assert_eq!(sq.exact, "4");
    assert!(exact_frame_by_name("polygon:5").is_err());
    assert!(exact_frame_by_name("ball:3").is_err());
}

#[test]
fn singlet_matches_closed_form_correlations() {
    let phi = singlet();
    // singlet: p(+, +) along unit a, b is (1 − a·b)/4
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let (ta, tb): (f64, f64) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let ma = planar_qubit_measurement(ta);
        let mb = planar_qubit_measurement(tb);
        let p = phi.pair(&ma.plus, &mb.plus).unwrap();
        assert!((p - 0.25 * (1.0 - (ta - tb).cos())).abs() < 1e-12);
    }
    let s = chsh_value(&singlet_tsirelson_scenario()).unwrap();
    assert!((s - 2.0 * 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn singlet_certified_by_chsh_witness() {
    let phi = singlet();
    let scenario = singlet_tsirelson_scenario();
    let r = certify_entanglement(&phi, Some(&scenario), 1e-9, DEFAULT_RESOLUTION).unwrap();
    assert!(r.entangled);
    assert_eq!(r.method, "chsh-witness");
    let bare = certify_entanglement(&phi, None, 1e-9, DEFAULT_RESOLUTION).unwrap();
    assert!(!bare.entangled);
    assert!(matches!(bare.separability, SeparabilityVerdict::Inconclusive { .. }));
    assert!(in_max_tensor(&phi, 1e-9, DEFAULT_RESOLUTION).unwrap());
}

#[test]
fn non_positive_two_qubit_data_rejected() {
    let t = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    assert!(two_qubit_gpt([0.0; 3], [0.0; 3], t, 1e-9).is_err());
}

#[test]
fn perturbed_behavior_signals() {
    let bw = arc("polygon:4");
    let z = zoo::polygon_states(4).unwrap();
    let phi = JointState::product(&z[0], &z[1], bw.clone(), bw.clone()).unwrap();
    let ms = binary_measurements(&bw, 0);
    let mut b = behavior(&phi, &ms, &ms).unwrap();
    assert!(b.is_no_signalling(1e-12));
    b.p[0] += 0.1;
    assert!(!b.is_no_signalling(1e-9));
    assert!((b.signalling_defect() - 0.1).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_pairing_factorizes(n in 3usize..9, i in 0usize..8, j in 0usize..8, k in 0usize..8, l in 0usize..8) {
        let st = zoo::polygon_states(n).unwrap();
        let ef = zoo::polygon_effects(n).unwrap();
        let (za, zb, ea, eb) = (&st[i % n], &st[j % n], &ef[k % n], &ef[l % n]);
        let joint = tensor(ea, eb).dot(&tensor(za, zb)).unwrap();
        let split = probability(ea, za).unwrap() * probability(eb, zb).unwrap();
        prop_assert!((joint - split).abs() < 1e-12);
        prop_assert_eq!(tensor(za, zb).entries()[1], zb.entries()[1]);
    }

    #[test]
    fn product_mixtures_are_separable_and_recover_marginals(seed: u64, n in 3usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = arc(&format!("polygon:{n}"));
        let st = zoo::polygon_states(n).unwrap();
        let mut acc = vec![0.0; (t.dim + 1) * (t.dim + 1)];
        let mut ma = vec![0.0; t.dim + 1];
        let weights: Vec<f64> = (0..3).map(|_| rng.gen_range(0.1..1.0)).collect();
        let total: f64 = weights.iter().sum();
        for w in &weights {
            let (za, zb) = (&st[rng.gen_range(0..n)], &st[rng.gen_range(0..n)]);
            for (x, y) in acc.iter_mut().zip(tensor(za, zb).entries()) {
                *x += w / total * y;
            }
            for (x, y) in ma.iter_mut().zip(za.entries()) {
                *x += w / total * y;
            }
        }
        let phi = JointState::new(acc, t.clone(), t, 1e-12).unwrap();
        prop_assert!(is_separable(&phi, 1e-9, 0).unwrap().is_separable());
        prop_assert!(in_max_tensor(&phi, 1e-9, 0).unwrap());
        let back = phi.marginal_a();
        prop_assert!(back.max_abs_diff(&GptVector::new(ma).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn mixing_with_separable_noise_lowers_chsh(lambda in 0.0f64..1.0) {
        let sq = exact_polygon4();
        let obs = sq.binary_observables();
        let (_, phi) = maximize_chsh_exact(&sq, &sq, &obs, &obs).unwrap();
        let pr = joint_to_float(&phi, &sq, &sq);
        let mut noise = vec![0.0; 9];
        noise[0] = 1.0;
        let mixed: Vec<f64> = pr.iter().zip(&noise).map(|(a, b)| lambda * a + (1.0 - lambda) * b).collect();
        let bw = arc("polygon:4");
        let state = JointState::new(mixed.clone(), bw.clone(), bw.clone(), 1e-9).unwrap();
        prop_assert!(in_max_tensor(&state, 1e-9, 0).unwrap());
        // PR box plus white noise is local exactly when CHSH = 4λ <= 2
        prop_assume!((lambda - 0.5).abs() > 1e-6);
        let ent = !is_separable(&state, 1e-9, 0).unwrap().is_separable();
        prop_assert_eq!(ent, lambda > 0.5);
    }
}
