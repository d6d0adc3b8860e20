//! Verification suites. Each returns one [`VerificationReport`] per check,
//! so that the harness can fail the run if any of them fails.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::sync::Arc;

use anyhow::{ensure, Context, Result};
use nalgebra::DVector;
use num_rational::BigRational;
use poincare_gpt::composites::{
    self, behavior, binary_measurements, certify_entanglement, chsh_value, deterministic_chsh_bound,
    exact_chsh, in_max_tensor, is_separable, is_separable_exact, max_tensor_vertices,
    maximize_chsh, maximize_chsh_exact, no_signalling_check, JointState, MeasurementFamily,
    DEFAULT_RESOLUTION,
};
use poincare_gpt::exact;
use poincare_gpt::minkowski::{self, interval, LorentzMatrix, PoincareTransform, SpacetimeVector};
use poincare_gpt::poincare_rep::{
    self, check_invariance, classical_pairing, ClassicalMomentumEffect, ClassicalMomentumState,
    FixedAction, RepPair, DEFAULT_P_TOL,
};
use poincare_gpt::rotation::{self, random_unit_vector};
use poincare_gpt::scalar::Scalar;
use poincare_gpt::zoo::{self, BlochVector};
use poincare_gpt::{oracle, GptVector, LinearMap, TheorySpec, VerificationReport};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// CHSH value reached by the triangle theory. It is a simplex, so the
/// optimum equals the local bound; recorded after the first exact run.
pub const POLYGON3_CHSH: f64 = 2.0;

#[derive(Clone, Debug, Serialize)]
pub struct Suite {
    pub suite: String,
    pub checks: Vec<VerificationReport>,
    pub pass: bool,
}

impl Suite {
    pub fn new(suite: impl Into<String>, checks: Vec<VerificationReport>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self { suite: suite.into(), checks, pass }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn to3(v: &DVector<f64>) -> [f64; 3] {
    [v[0], v[1], v[2]]
}

/// Exact `ε_i(ζ_j) = δ_ij` for the bit, the trit and small simplices, and
/// agreement of every exact frame with the float zoo.
pub fn distinguishability() -> Result<Vec<VerificationReport>> {
    let mut bit = VerificationReport::new("exact-bit", "bit effects pick out bit states exactly");
    bit.record_bool(exact::exact_bit().is_distinguishing());
    let mut trit = VerificationReport::new("exact-trit", "triangle effects pick out its vertices exactly");
    trit.record_bool(exact::exact_polygon3().is_distinguishing());
    let mut simplex = VerificationReport::new("exact-simplex", "simplex effects pick out vertices exactly, 2 to 7 outcomes");
    for n in 1..=6 {
        simplex.record_bool(exact::exact_simplex(n)?.is_distinguishing());
    }
    let mut frames = VerificationReport::new("exact-frames", "exact frames reproduce the float theories");
    frames.record(exact::frame_mismatch(
        &exact::exact_bit(),
        &zoo::classical_simplex(1)?,
        &zoo::simplex_effects(1),
    )?);
    for n in 2..=6 {
        frames.record(exact::frame_mismatch(
            &exact::exact_simplex(n)?,
            &zoo::classical_simplex(n)?,
            &zoo::simplex_effects(n),
        )?);
    }
    frames.record(exact::frame_mismatch(&exact::exact_polygon3(), &zoo::polygon_theory(3)?, &zoo::polygon_effects(3)?)?);
    frames.record(exact::frame_mismatch(&exact::exact_polygon4(), &zoo::polygon_theory(4)?, &zoo::polygon_effects(4)?)?);
    frames.record(exact::frame_mismatch(&exact::exact_polygon6(), &zoo::polygon_theory(6)?, &zoo::polygon_effects(6)?)?);
    Ok(vec![bit.finish(0.0), trit.finish(0.0), simplex.finish(0.0), frames.finish(1e-12)])
}

/// `R(jθ)` permutes states, labelled effects and complements by `i ↦ i + j`
/// and `R(jθ)⁻¹ = R(−jθ) = R((N − j)θ)`, for every `N` in `3..=max_n`.
pub fn polygon_symmetry(max_n: usize, tol: f64) -> Result<Vec<VerificationReport>> {
    let mut perm = VerificationReport::new("polygon-permutation", "R(j theta) z_i = z_(i+j mod N) on states and effects");
    let mut inv = VerificationReport::new("polygon-inverse", "R(j theta) R((N-j) theta) = I and R(j theta)^-1 = R(-j theta)");
    for n in 3..=max_n {
        let states = zoo::polygon_states(n)?;
        let effects = zoo::polygon_effects(n)?;
        let comps = zoo::polygon_complements(n)?;
        let id = LinearMap::identity(3);
        for j in -(n as i64)..=(n as i64) {
            let r = zoo::polygon_rotation(n, j)?;
            let r_ef = r.transpose_inverse().context("rotation is invertible")?;
            for i in 0..n {
                let target = (i as i64 + j).rem_euclid(n as i64) as usize;
                perm.record(r.apply(&states[i])?.max_abs_diff(&states[target])?);
                perm.record(r_ef.apply(&effects[i])?.max_abs_diff(&effects[target])?);
                if n % 2 == 1 {
                    perm.record(r_ef.apply(&comps[i])?.max_abs_diff(&comps[target])?);
                }
            }
            let back = zoo::polygon_rotation(n, n as i64 - j)?;
            inv.record(r.compose(&back)?.max_abs_diff(&id));
            let neg = zoo::polygon_rotation(n, -j)?;
            inv.record(r.inverse().context("rotation is invertible")?.max_abs_diff(&neg));
        }
    }
    Ok(vec![perm.finish(tol), inv.finish(tol)])
}

/// GPT pairing `½(1 + r·v)` against `tr(ρ_r E_v)` on random pure pairs.
pub fn bloch_consistency(samples: usize, seed: u64, tol: f64) -> Result<Vec<VerificationReport>> {
    let mut rng = rng(seed);
    let ball = zoo::euclidean_ball(3)?;
    let mut pairing = VerificationReport::new("bloch-pairing", "e_v(z) = tr(rho E_v) for pure qubit states and projectors");
    let mut embed = VerificationReport::new("bloch-embedding", "density operators map to ball states");
    for _ in 0..samples {
        let r = to3(&random_unit_vector(3, &mut rng));
        let v = to3(&random_unit_vector(3, &mut rng));
        let z = zoo::density_to_gpt(&BlochVector::new(r), 1e-12)?;
        embed.record_bool(ball.validate_state(&z, 1e-12)?.member);
        let e = zoo::ball_effect(&v, 1e-12)?;
        pairing.record((e.dot(&z)? - oracle::qubit_trace_probability(r, v)).abs());
    }
    Ok(vec![pairing.finish(tol), embed.finish(0.0)])
}

fn arc(name: &str) -> Result<Arc<TheorySpec>> {
    Ok(Arc::new(zoo::theory_by_name(name)?))
}

/// CHSH over box world and classical locals, the PR box's entanglement
/// certificate, the no-signalling polytope and negative controls.
pub fn chsh(tol: f64) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();

    // Exact optimum over the square theory, with the exact optimizer kept.
    let sq = exact::exact_polygon4();
    let obs = sq.binary_observables();
    let (value, phi) = maximize_chsh_exact(&sq, &sq, &obs, &obs)?;
    let mut exact_box = VerificationReport::new("boxworld-chsh-exact", "maximal CHSH violation 4 in box world, exact LP");
    exact_box.record((value - BigRational::from_int(4)).to_f64().abs());
    out.push(exact_box.finish(1e-6));

    let mut pr = VerificationReport::new("pr-box-entangled", "the CHSH optimizer admits no separable decomposition (verified Farkas witness)");
    pr.record_bool(is_separable_exact(&phi, &sq.states, &sq.states)?.is_err());
    out.push(pr.finish(0.0));

    let bw = arc("polygon:4")?;
    let phi_f = JointState::new(composites::joint_to_float(&phi, &sq, &sq), bw.clone(), bw.clone(), 1e-9)?;
    let mut pr_ns = VerificationReport::new("pr-box-no-signalling", "the optimizer lies in the maximal tensor product and does not signal");
    pr_ns.record_bool(in_max_tensor(&phi_f, tol, 0)?);
    pr_ns.record_bool(no_signalling_check(&phi_f, tol, 0)?);
    out.push(pr_ns.finish(0.0));

    let fam = MeasurementFamily::all(&bw, &bw, 0);
    let float_box = maximize_chsh(bw.clone(), bw.clone(), &fam, 0)?;
    let mut fb = VerificationReport::new("boxworld-chsh-float", "floating-point LP agrees with the exact optimum");
    fb.record((float_box.value - 4.0).abs());
    out.push(fb.finish(1e-6));

    let bit = arc("bit")?;
    let fam = MeasurementFamily::all(&bit, &bit, 0);
    let bit_opt = maximize_chsh(bit.clone(), bit.clone(), &fam, 0)?;
    let exact_bit = exact_chsh(&exact::exact_frame_by_name("bit")?, &exact::exact_frame_by_name("bit")?)?;
    let mut b = VerificationReport::new("bit-chsh", "classical bits reach the 16-strategy local bound 2");
    b.record((bit_opt.value - deterministic_chsh_bound()).abs());
    b.record((exact_bit.value - deterministic_chsh_bound()).abs());
    out.push(b.finish(1e-9));

    let tri = exact_chsh(&exact::exact_frame_by_name("polygon:3")?, &exact::exact_frame_by_name("polygon:3")?)?;
    let mut t = VerificationReport::new("polygon3-chsh", "triangle locals reach the recorded CHSH optimum");
    t.record((tri.value - POLYGON3_CHSH).abs());
    out.push(t.finish(1e-9));

    let verts = max_tensor_vertices(&bw, &bw, 1e-9)?;
    let mut nsv = VerificationReport::new("boxworld-vertices", "24 vertices of the box-world maximal tensor product, all no-signalling");
    nsv.record_bool(verts.len() == 24);
    let mut entangled = 0;
    for v in &verts {
        let s = JointState::new(v.clone(), bw.clone(), bw.clone(), 1e-9)?;
        nsv.record_bool(no_signalling_check(&s, tol, 0)?);
        if !is_separable(&s, tol, 0)?.is_separable() {
            entangled += 1;
        }
    }
    nsv.record_bool(entangled == 8);
    out.push(nsv.finish(0.0));

    let mut classical = VerificationReport::new("classical-no-entanglement", "every maximal-tensor vertex with a simplex side is separable; CHSH <= 2");
    for (a, b) in [("bit", "bit"), ("simplex:2", "bit"), ("simplex:2", "polygon:4")] {
        let (ta, tb) = (arc(a)?, arc(b)?);
        for v in max_tensor_vertices(&ta, &tb, 1e-9)? {
            let s = JointState::new(v, ta.clone(), tb.clone(), 1e-9)?;
            classical.record_bool(is_separable(&s, tol, 0)?.is_separable());
        }
        let fam = MeasurementFamily::all(&ta, &tb, 0);
        let opt = maximize_chsh(ta, tb, &fam, 0)?;
        classical.record_bool(opt.value <= 2.0 + 1e-9);
    }
    out.push(classical.finish(0.0));

    // Negative control: one behaviour entry moved by 0.1 must signal.
    let ma = binary_measurements(&bw, 0);
    let mut beh = behavior(&phi_f, &ma, &ma)?;
    beh.p[0] += 0.1;
    let mut neg = VerificationReport::new("signalling-detected", "a behaviour with one entry perturbed by 0.1 fails the no-signalling check");
    neg.record_bool(!beh.is_no_signalling(tol));
    out.push(neg.finish(0.0));

    Ok(out)
}

/// The singlet at the standard angles, against a Hilbert-space oracle, and
/// its entanglement certificate.
pub fn tsirelson(samples: usize, seed: u64, tol: f64) -> Result<Vec<VerificationReport>> {
    let scenario = composites::singlet_tsirelson_scenario();
    let s = chsh_value(&scenario)?;
    let rho = oracle::singlet_density();
    let h = FRAC_1_SQRT_2;
    // B's outcomes are swapped in the scenario, which negates its observables.
    let quantum = oracle::two_qubit_chsh(&rho, [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]], [[-h, 0.0, -h], [h, 0.0, -h]]);
    let mut value = VerificationReport::new("tsirelson-value", "singlet at standard angles reaches 2 sqrt 2, matching the quantum trace");
    value.record((s - quantum).abs());
    value.record((s - 2.0 * SQRT_2).abs());
    let mut pairing = VerificationReport::new("singlet-pairing", "joint pairings match tr(rho E_a x E_b)");
    let mut rng = rng(seed);
    for _ in 0..samples {
        let a = to3(&random_unit_vector(3, &mut rng));
        let b = to3(&random_unit_vector(3, &mut rng));
        let gpt = scenario.state.pair(&zoo::ball_effect(&a, 1e-12)?, &zoo::ball_effect(&b, 1e-12)?)?;
        pairing.record((gpt - oracle::two_qubit_trace_probability(&rho, a, b)).abs());
    }
    let cert = certify_entanglement(&scenario.state, Some(&scenario), tol, DEFAULT_RESOLUTION)?;
    let mut ent = VerificationReport::new("singlet-entangled", "no decomposition at K = 200 product samples; certified by the CHSH witness");
    ent.record_bool(cert.entangled && cert.method == "chsh-witness");
    Ok(vec![value.finish(1e-9), pairing.finish(1e-12), ent.finish(0.0)])
}

/// Random proper orthochronous Poincaré transforms preserve intervals and
/// the mass shell; composition and inverses behave. Each sampled `P` is
/// pushed onto `log`.
pub fn minkowski_checks(
    n: usize,
    mass: f64,
    samples: usize,
    seed: u64,
    tol: f64,
    log: &mut Vec<PoincareTransform>,
) -> Result<Vec<VerificationReport>> {
    ensure!(n >= 1, "n must be at least 1");
    let mut rng = rng(seed);
    let mut group = VerificationReport::new("proper-orthochronous", "sampled transforms are proper orthochronous Lorentz maps");
    let mut inv = VerificationReport::new("interval-invariance", "(x-y)^T eta (x-y) unchanged by P(a, Lambda)");
    let mut shell = VerificationReport::new("mass-shell", "p^T eta p = -m^2 preserved by Lambda");
    let mut law = VerificationReport::new("group-law", "P o P^-1 = I and (P3 P2) P1 = P3 (P2 P1)");
    let id = PoincareTransform::identity(n);
    for _ in 0..samples {
        let p = minkowski::random_poincare(n, 1.5, &mut rng);
        let q = minkowski::random_poincare(n, 1.5, &mut rng);
        let r = minkowski::random_poincare(n, 1.5, &mut rng);
        group.record(p.lambda.metric_defect());
        group.record_bool(p.lambda.is_proper_orthochronous(tol));
        let x = minkowski::random_spacetime(n, 5.0, &mut rng);
        let y = minkowski::random_spacetime(n, 5.0, &mut rng);
        inv.record((interval(&p.apply(&x)?, &p.apply(&y)?)? - interval(&x, &y)?).abs());
        let mom = minkowski::random_momentum(mass, n, 3.0, &mut rng)?;
        shell.record(mom.transformed(&p.lambda)?.shell_defect().abs());
        law.record(p.compose(&p.inverse())?.max_abs_diff(&id));
        let left = r.compose(&q)?.compose(&p)?;
        let right = r.compose(&q.compose(&p)?)?;
        law.record(left.max_abs_diff(&right));
        log.push(p);
    }
    Ok(vec![group.finish(tol), inv.finish(tol), shell.finish(tol), law.finish(tol)])
}

fn rotation_defect(w: &LorentzMatrix) -> f64 {
    let m = w.matrix();
    let n = w.n();
    let mut d = (m[(0, 0)] - 1.0).abs();
    for i in 1..=n {
        d = d.max(m[(0, i)].abs()).max(m[(i, 0)].abs());
    }
    let o = w.spatial_block();
    let ortho = (o.transpose() * &o - nalgebra::DMatrix::identity(n, n)).amax();
    d.max(ortho).max((o.determinant() - 1.0).abs())
}

/// The little-group element fixes `(0, p_rest)`, reduces to `P(0, O)` for
/// rotations, Wigner rotations lie in SO(n), and the induced maps compose.
/// Each little-group element built from a random `Λ` is pushed onto `log`.
pub fn little_group_checks(
    n: usize,
    mass: f64,
    samples: usize,
    seed: u64,
    tol: f64,
    log: &mut Vec<PoincareTransform>,
) -> Result<Vec<VerificationReport>> {
    ensure!(n >= 1, "n must be at least 1");
    let mut rng = rng(seed);
    let rest = minkowski::MassiveMomentum::at_rest(mass, n)?;
    let origin = SpacetimeVector::zero(n);
    let mut fixes = VerificationReport::new("little-group-fixes-rest", "W(a, x, Lambda, p) maps (0, p_rest) to itself");
    let mut reduce = VerificationReport::new("little-group-rotation", "Lambda = O gives W = P(0, O)");
    let mut so_n = VerificationReport::new("wigner-in-so-n", "Wigner rotations are block(1, O) with O in SO(n)");
    let mut internal = VerificationReport::new("induced-rotation-map", "induced internal map for Lambda = O equals block(1, O)");
    for _ in 0..samples {
        let a = minkowski::random_spacetime(n, 3.0, &mut rng);
        let x = minkowski::random_spacetime(n, 3.0, &mut rng);
        let lambda = minkowski::random_lorentz(n, 1.5, &mut rng);
        let p = minkowski::random_momentum(mass, n, 2.0, &mut rng)?;
        let w = minkowski::little_group_element(&a, &x, &lambda, &p, 1e-9)?;
        let (y, q) = w.apply_pair(&origin, &rest.p)?;
        fixes.record(y.max_abs_diff(&origin).max(q.max_abs_diff(&rest.p)));
        so_n.record(rotation_defect(&w.lambda));
        so_n.record(rotation_defect(&minkowski::wigner_rotation(&lambda, &p)?));
        log.push(w);

        let o = minkowski::random_rotation_lorentz(n, &mut rng);
        let wo = minkowski::little_group_element(&a, &x, &o, &p, 1e-9)?;
        reduce.record(wo.max_abs_diff(&PoincareTransform::lorentz(o.clone())));
        let m = poincare_rep::induced_internal_map(&a, &x, &o, &p, 1e-9)?;
        internal.record(m.max_abs_diff(&LinearMap::block(&o.spatial_block())?));
    }

    let mut comp = VerificationReport::new("wigner-composition", "W(L2, L1 p) W(L1, p) = W(L2 L1, p)");
    let pairs = samples.min(100);
    for _ in 0..pairs {
        let l1 = minkowski::random_lorentz(n, 1.0, &mut rng);
        let l2 = minkowski::random_lorentz(n, 1.0, &mut rng);
        let p = minkowski::random_momentum(mass, n, 2.0, &mut rng)?;
        let w1 = minkowski::wigner_rotation(&l1, &p)?;
        let w2 = minkowski::wigner_rotation(&l2, &p.transformed(&l1)?)?;
        let w12 = minkowski::wigner_rotation(&l2.compose(&l1)?, &p)?;
        comp.record(w2.compose(&w1)?.max_abs_diff(&w12));
    }
    Ok(vec![fixes.finish(tol), reduce.finish(tol), so_n.finish(tol), internal.finish(1e-10), comp.finish(1e-8)])
}

/// Probability invariance on ball internals, the detector sphere, a shear
/// negative control and the Kronecker momentum pairing.
pub fn invariance_checks(n: usize, mass: f64, samples: usize, seed: u64, tol: f64) -> Result<Vec<VerificationReport>> {
    ensure!(n >= 2, "ball internals need n >= 2");
    let mut out = vec![poincare_rep::ball_invariance_suite(n, samples, seed, tol)?];

    let mut rng = rng(seed ^ 0xde7e_c70d);
    let mut det = VerificationReport::new("detector-sphere", "P'(i) = P(i) for six axis detectors under random rotations");
    let mut total = VerificationReport::new("detector-total", "sum_i P(i) = 1");
    for _ in 0..samples {
        let z = GptVector::from_spatial(rotation::random_ball_point(3, &mut rng).as_slice())?;
        let o = rotation::random_rotation(3, &mut rng);
        let r = poincare_rep::detector_sphere_experiment(&z, &poincare_rep::axis_detectors(), &o, 1e-9)?;
        det.record(r.max_shift);
        total.record(r.total_defect);
    }
    out.push(det.finish(tol));
    out.push(total.finish(1e-12));

    let ball = zoo::euclidean_ball(2)?;
    let rest = minkowski::MassiveMomentum::at_rest(mass, 2)?;
    let pairs: Vec<_> = [([0.0, 1.0], [0.0, 0.9]), ([1.0, 0.0], [0.5, 0.5])]
        .iter()
        .map(|(v, z)| -> Result<_> {
            Ok((
                ClassicalMomentumEffect::new(rest.clone(), zoo::ball_effect(v, 1e-12)?, &ball, 1e-9)?,
                ClassicalMomentumState::new(rest.clone(), GptVector::from_spatial(z)?, &ball, 1e-9)?,
            ))
        })
        .collect::<Result<_>>()?;
    let shear = LinearMap::from_rows(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.4], vec![0.0, 0.0, 1.0]])?;
    let g = PoincareTransform::identity(2);
    let mut ctrl = VerificationReport::new("shear-control", "effects must move by the transpose-inverse; a shear applied to both breaks invariance");
    ctrl.record_bool(check_invariance(&pairs, &g, &FixedAction(RepPair::from_state(shear.clone())?), tol)?);
    ctrl.record_bool(!check_invariance(&pairs, &g, &FixedAction(RepPair { state: shear.clone(), effect: shear }), tol)?);
    out.push(ctrl.finish(0.0));

    let mut kron = VerificationReport::new("momentum-pairing", "pairings vanish exactly unless momentum labels agree");
    let theory = zoo::euclidean_ball(n)?;
    for _ in 0..samples {
        let p = minkowski::random_momentum(mass, n, 2.0, &mut rng)?;
        let q = minkowski::random_momentum(mass, n, 2.0, &mut rng)?;
        let z = GptVector::from_spatial(rotation::random_ball_point(n, &mut rng).as_slice())?;
        let e = zoo::ball_effect(random_unit_vector(n, &mut rng).as_slice(), 1e-12)?;
        let zs = ClassicalMomentumState::new(p.clone(), z.clone(), &theory, 1e-9)?;
        let same = ClassicalMomentumEffect::new(p, e.clone(), &theory, 1e-9)?;
        let other = ClassicalMomentumEffect::new(q, e.clone(), &theory, 1e-9)?;
        kron.record((classical_pairing(&same, &zs, DEFAULT_P_TOL)? - e.dot(&z)?).abs());
        kron.record(classical_pairing(&other, &zs, DEFAULT_P_TOL)?.abs());
    }
    out.push(kron.finish(0.0));
    Ok(out)
}

/// One `(N, k)` instance of the lattice-translation model.
pub fn toy_spacetime(big_n: usize, k: i64, tol: f64) -> Result<(poincare_rep::ToySpacetimeReport, Vec<VerificationReport>)> {
    let r = poincare_rep::toy_discrete_spacetime(big_n, k, tol)?;
    let mut nontrivial = VerificationReport::new("toy-nontrivial", "the translation representation is not the trivial one");
    nontrivial.record_bool(r.nontrivial);
    let mut perm = VerificationReport::new("toy-permutation", "T_k permutes the vertices z_i -> z_(i+k mod N)");
    for (i, j) in r.permutation.iter().enumerate() {
        perm.record_bool(*j == (i as i64 + k).rem_euclid(big_n as i64) as usize);
    }
    let checks = vec![r.homomorphism.clone(), r.invariance.clone(), nontrivial.finish(0.0), perm.finish(0.0)];
    Ok((r, checks))
}

/// Every `N` in `3..=max_n` with every `k` in `0..N`.
pub fn toy_spacetime_exhaustive(max_n: usize, tol: f64) -> Result<Vec<VerificationReport>> {
    let mut merged: Vec<VerificationReport> = Vec::new();
    for big_n in 3..=max_n {
        for k in 0..big_n as i64 {
            let (_, checks) = toy_spacetime(big_n, k, tol)?;
            if merged.is_empty() {
                merged = checks;
            } else {
                for (m, c) in merged.iter_mut().zip(&checks) {
                    m.merge(c);
                }
            }
        }
    }
    Ok(merged)
}

/// Orbit of `(1, e_n)` under sampled SO(n).
pub fn orbit(n: usize, samples: usize, seed: u64, tol: f64) -> Result<Vec<VerificationReport>> {
    let mut r = vec![0.0; n];
    r[n - 1] = 1.0;
    Ok(poincare_rep::orbit_ball_reconstruction(n, &r, samples, seed, tol)?)
}

/// Angle of the Wigner rotation for perpendicular boosts with `γ = √2`,
/// against the closed form.
pub fn thomas_wigner(tol: f64) -> Result<VerificationReport> {
    let p = minkowski::MassiveMomentum::from_spatial(1.0, &[1.0, 0.0, 0.0])?;
    let boost = minkowski::standard_boost(&minkowski::MassiveMomentum::from_spatial(1.0, &[0.0, 1.0, 0.0])?)?;
    let w = minkowski::wigner_rotation(&boost, &p)?;
    let mut r = VerificationReport::new("thomas-wigner-angle", "perpendicular boosts: cos theta = (g1 + g2)/(1 + g1 g2)");
    r.record((rotation::rotation_angle_3d(&w.spatial_block()) - oracle::perpendicular_wigner_angle(SQRT_2, SQRT_2)).abs());
    Ok(r.finish(tol))
}

/// Row of a CHSH scan.
#[derive(Clone, Debug, Serialize)]
pub struct ChshRow {
    pub scenario: String,
    pub locals_a: String,
    pub locals_b: String,
    pub chsh: f64,
    pub exact_chsh: String,
    pub separability: String,
    pub method: String,
    pub in_max_tensor: bool,
    pub no_signalling: bool,
}

/// Row and check for one scenario-file entry.
pub fn scenario_row(s: &composites::ScenarioFile, tol: f64) -> Result<(ChshRow, VerificationReport)> {
    let r = composites::evaluate_scenario(s, tol, DEFAULT_RESOLUTION)?;
    let mut check = VerificationReport::new(
        format!("chsh-scenario:{}", s.id),
        "state inside the maximal tensor product, non-signalling, CHSH <= 4, separable states obey CHSH <= 2",
    );
    check.record_bool(r.in_max_tensor);
    check.record_bool(r.no_signalling);
    check.record_bool(r.chsh <= 4.0 + tol);
    check.record_bool(!r.report.separability.is_separable() || r.chsh <= 2.0 + tol);
    let row = ChshRow {
        scenario: s.id.clone(),
        locals_a: s.local_a.clone(),
        locals_b: s.local_b.clone(),
        chsh: r.chsh,
        exact_chsh: String::new(),
        separability: r.report.separability.label().to_string(),
        method: r.report.method.to_string(),
        in_max_tensor: r.in_max_tensor,
        no_signalling: r.no_signalling,
    };
    Ok((row, check.finish(0.0)))
}

/// `A` or `A/B`.
pub fn parse_locals(pair: &str) -> (String, String) {
    match pair.split_once('/') {
        Some((a, b)) => (a.to_string(), b.to_string()),
        None => (pair.to_string(), pair.to_string()),
    }
}

/// Maximizes CHSH for one pair of locals. Polytope pairs use the LP over the
/// maximal tensor product (exact when both sides have an exact frame and
/// `exact` is set); `ball:3/ball:3` evaluates the singlet scenario.
pub fn chsh_scan_row(pair: &str, exact: bool, tol: f64) -> Result<(ChshRow, VerificationReport)> {
    let (na, nb) = parse_locals(pair);
    let (ta, tb) = (arc(&na)?, arc(&nb)?);
    let mut check = VerificationReport::new(
        format!("chsh-scan:{na}/{nb}"),
        "optimizer normalized, inside the maximal tensor product, non-signalling, CHSH <= 4",
    );
    let balls = ta.states.vertices().is_none() || tb.states.vertices().is_none();
    let (state, value, exact_str) = if balls {
        ensure!(
            na == "ball:3" && nb == "ball:3",
            "ball locals are only scanned as ball:3/ball:3 (singlet scenario)"
        );
        let s = composites::singlet_tsirelson_scenario();
        let v = chsh_value(&s)?;
        (s.state, v, String::new())
    } else if exact {
        let r = exact_chsh(&exact::exact_frame_by_name(&na)?, &exact::exact_frame_by_name(&nb)?)?;
        let state = JointState::new(r.state, ta.clone(), tb.clone(), 1e-9)?;
        (state, r.value, r.exact)
    } else {
        let fam = MeasurementFamily::all(&ta, &tb, 0);
        let opt = maximize_chsh(ta.clone(), tb.clone(), &fam, 0)?;
        (opt.state, opt.value, String::new())
    };
    let in_max = in_max_tensor(&state, tol, DEFAULT_RESOLUTION)?;
    let ns = no_signalling_check(&state, tol, if balls { 16 } else { 0 })?;
    let scenario = if balls { Some(composites::singlet_tsirelson_scenario()) } else { None };
    let cert = certify_entanglement(&state, scenario.as_ref(), tol, DEFAULT_RESOLUTION)?;
    check.record_bool(in_max);
    check.record_bool(ns);
    check.record_bool(value <= 4.0 + tol);
    check.record_bool(!cert.separability.is_separable() || value <= 2.0 + tol);
    let row = ChshRow {
        scenario: format!("{na}/{nb}"),
        locals_a: na,
        locals_b: nb,
        chsh: value,
        exact_chsh: exact_str,
        separability: if cert.entangled { "entangled".into() } else { cert.separability.label().into() },
        method: cert.method.into(),
        in_max_tensor: in_max,
        no_signalling: ns,
    };
    Ok((row, check.finish(0.0)))
}

/// Whether the named local has an exact frame.
pub fn has_exact_frame(name: &str) -> bool {
    exact::exact_frame_by_name(name).is_ok()
}
