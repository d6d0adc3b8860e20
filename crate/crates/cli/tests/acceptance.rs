//! Acceptance suite: ten criteria, each with its tolerance and time limit,
//! checked against oracles written here rather than taken from the library.
//! Prints one PASS/FAIL line per criterion and exits non-zero on any failure.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use nalgebra::{Complex, DMatrix};
use num_rational::BigRational;
use poincare_gpt::composites::{
    certify_entanglement, chsh_value, maximize_chsh, maximize_chsh_exact, singlet,
    singlet_tsirelson_scenario, MeasurementFamily, SeparabilityVerdict,
};
use poincare_gpt::exact;
use poincare_gpt::minkowski::{self, LorentzMatrix, PoincareTransform, SpacetimeVector};
use poincare_gpt::poincare_rep::{self, axis_detectors, detector_sphere_experiment};
use poincare_gpt::rotation;
use poincare_gpt::scalar::Scalar;
use poincare_gpt::zoo::{self, BlochVector};
use poincare_gpt::{GptVector, LinearMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

type C = Complex<f64>;

const SEED: u64 = 20_240_601;

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

fn pauli(i: usize) -> DMatrix<C> {
    let (o, z, im) = (c(1.0), c(0.0), C::new(0.0, 1.0));
    match i {
        0 => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        1 => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        2 => DMatrix::from_row_slice(2, 2, &[z, -im, im, z]),
        _ => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

fn dot_sigma(v: [f64; 3]) -> DMatrix<C> {
    pauli(1) * c(v[0]) + pauli(2) * c(v[1]) + pauli(3) * c(v[2])
}

/// `½(I + v·σ)`.
fn projector(v: [f64; 3]) -> DMatrix<C> {
    (pauli(0) + dot_sigma(v)) * c(0.5)
}

fn unit3<R: Rng>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 0.1 && n <= 1.0 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

fn minkowski_form(x: &[f64]) -> f64 {
    -x[0] * x[0] + x[1..].iter().map(|v| v * v).sum::<f64>()
}

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn distinguishability() -> Outcome {
    fn exact_identity<F: Scalar>(table: Vec<Vec<F>>) -> bool {
        table.iter().enumerate().all(|(i, row)| {
            row.iter().enumerate().all(|(j, p)| *p == if i == j { F::one() } else { F::zero() })
        })
    }
    let bit = exact_identity(exact::exact_bit().pairing_table());
    let trit = exact_identity(exact::exact_simplex(2).unwrap().pairing_table());
    let tri = exact_identity(exact::exact_polygon3().pairing_table());
    let sizes = exact::exact_bit().pairing_table().len() == 2 && exact::exact_polygon3().pairing_table().len() == 3;
    outcome(bit && trit && tri && sizes, format!("bit={bit} trit={trit} polygon3={tri}"))
}

fn polygon_symmetry() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 3..=12usize {
        let states = zoo::polygon_states(n).unwrap();
        let effects = zoo::polygon_effects(n).unwrap();
        let theta = 2.0 * std::f64::consts::PI / n as f64;
        for j in 0..n {
            let r = zoo::polygon_rotation(n, j as i64).unwrap();
            // R(jθ) against an explicit rotation matrix
            let (s, co) = (j as f64 * theta).sin_cos();
            let explicit = LinearMap::from_rows(vec![
                vec![1.0, 0.0, 0.0],
                vec![0.0, co, -s],
                vec![0.0, s, co],
            ])
            .unwrap();
            worst = worst.max(r.max_abs_diff(&explicit));
            let r_ef = r.transpose_inverse().unwrap();
            for i in 0..n {
                worst = worst.max(r.apply(&states[i]).unwrap().max_abs_diff(&states[(i + j) % n]).unwrap());
                worst = worst.max(r_ef.apply(&effects[i]).unwrap().max_abs_diff(&effects[(i + j) % n]).unwrap());
            }
            let inv = r.inverse().unwrap();
            worst = worst.max(inv.max_abs_diff(&zoo::polygon_rotation(n, (n - j) as i64).unwrap()));
            worst = worst.max(r.compose(&zoo::polygon_rotation(n, -(j as i64)).unwrap()).unwrap().max_abs_diff(&LinearMap::identity(3)));
        }
    }
    outcome(worst <= 1e-12, format!("worst deviation {worst:.2e}"))
}

fn bloch_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let r = unit3(&mut rng);
        let v = unit3(&mut rng);
        let z = zoo::density_to_gpt(&BlochVector::new(r), 1e-12).unwrap();
        let e = zoo::ball_effect(&v, 1e-12).unwrap();
        let quantum = (projector(r) * projector(v)).trace().re;
        worst = worst.max((e.dot(&z).unwrap() - quantum).abs());
    }
    outcome(worst <= 1e-12, format!("1000 pure pairs, worst {worst:.2e}"))
}

fn box_world_chsh() -> Outcome {
    let mut local_bound = f64::MIN;
    for s in 0..16u32 {
        let x = |k: u32| if s >> k & 1 == 1 { 1.0 } else { -1.0 };
        local_bound = local_bound.max(x(0) * x(2) + x(0) * x(3) + x(1) * x(2) - x(1) * x(3));
    }
    let sq = exact::exact_polygon4();
    let obs = sq.binary_observables();
    let (value, _) = maximize_chsh_exact(&sq, &sq, &obs, &obs).unwrap();
    let exact_dev = (value - BigRational::from_int(4)).to_f64().abs();
    let bit = Arc::new(zoo::theory_by_name("bit").unwrap());
    let fam = MeasurementFamily::all(&bit, &bit, 0);
    let bit_value = maximize_chsh(bit.clone(), bit, &fam, 0).unwrap().value;
    let ok = exact_dev <= 1e-6 && (bit_value - local_bound).abs() <= 1e-9 && local_bound == 2.0;
    outcome(ok, format!("box world {:.9}, bits {bit_value:.12}, 16-strategy bound {local_bound}", 4.0 - exact_dev))
}

fn tsirelson() -> Outcome {
    let scenario = singlet_tsirelson_scenario();
    let s = chsh_value(&scenario).unwrap();
    // singlet |ψ⁻⟩ = (|01⟩ − |10⟩)/√2
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let psi = DMatrix::from_column_slice(4, 1, &[c(0.0), c(h), c(-h), c(0.0)]);
    let rho = &psi * psi.adjoint();
    let e = |a: [f64; 3], b: [f64; 3]| (&rho * dot_sigma(a).kronecker(&dot_sigma(b))).trace().re;
    // A at 0 and π/2 from z in the x–z plane; B at ±π/4 with outcomes swapped
    let (a0, a1) = ([0.0, 0.0, 1.0], [1.0, 0.0, 0.0]);
    let (b0, b1) = ([-h, 0.0, -h], [h, 0.0, -h]);
    let quantum = e(a0, b0) + e(a0, b1) + e(a1, b0) - e(a1, b1);
    let value_ok = (s - quantum).abs() <= 1e-9 && (s - 2.0 * 2f64.sqrt()).abs() <= 1e-9;
    let report = certify_entanglement(&singlet(), Some(&scenario), 1e-9, 200).unwrap();
    // a positive L1 residual means no decomposition over the K=200 products
    let residual = match report.separability {
        SeparabilityVerdict::Inconclusive { residual, .. } => residual,
        _ => 0.0,
    };
    let ok = value_ok && residual > 1e-6 && report.entangled && report.method == "chsh-witness";
    outcome(ok, format!("S = {s:.12} (oracle {quantum:.12}), K=200 LP infeasible (L1 residual {residual:.4}), entangled via {}", report.method))
}

fn minkowski_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut interval, mut shell): (f64, f64) = (0.0, 0.0);
    for n in 2..=4 {
        for _ in 0..100 {
            let g = minkowski::random_poincare(n, 1.5, &mut rng);
            let ok = g.lambda.is_proper_orthochronous(1e-9);
            if !ok {
                return outcome(false, "sampled transform is not proper orthochronous");
            }
            let x = minkowski::random_spacetime(n, 5.0, &mut rng);
            let y = minkowski::random_spacetime(n, 5.0, &mut rng);
            let (gx, gy) = (g.apply(&x).unwrap(), g.apply(&y).unwrap());
            let before: Vec<f64> = x.entries().iter().zip(y.entries()).map(|(a, b)| a - b).collect();
            let after: Vec<f64> = gx.entries().iter().zip(gy.entries()).map(|(a, b)| a - b).collect();
            interval = interval.max((minkowski_form(&before) - minkowski_form(&after)).abs());
            let m = rng.gen_range(0.5..2.0);
            let p = minkowski::random_momentum(m, n, 3.0, &mut rng).unwrap();
            let q = g.lambda.apply(&p.p).unwrap();
            shell = shell.max((minkowski_form(q.entries()) + m * m).abs());
        }
    }
    outcome(interval <= 1e-9 && shell <= 1e-9, format!("interval {interval:.2e}, mass shell {shell:.2e}"))
}

fn rotation_defect(l: &LorentzMatrix) -> f64 {
    let m = l.matrix();
    let n = l.n();
    let mut d = (m[(0, 0)] - 1.0).abs();
    for k in 1..=n {
        d = d.max(m[(0, k)].abs()).max(m[(k, 0)].abs());
    }
    let o = l.spatial_block();
    d = d.max((o.transpose() * &o - DMatrix::identity(n, n)).amax());
    d.max((o.determinant() - 1.0).abs())
}

fn little_group() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut fixes, mut reduce, mut so_n, mut comp): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for n in 2..=4 {
        let origin = SpacetimeVector::zero(n);
        for _ in 0..200 {
            let m = rng.gen_range(0.5..2.0);
            let rest = minkowski::MassiveMomentum::at_rest(m, n).unwrap();
            let a = minkowski::random_spacetime(n, 3.0, &mut rng);
            let x = minkowski::random_spacetime(n, 3.0, &mut rng);
            let lambda = minkowski::random_lorentz(n, 1.5, &mut rng);
            let p = minkowski::random_momentum(m, n, 2.0, &mut rng).unwrap();
            let w = minkowski::little_group_element(&a, &x, &lambda, &p, 1e-9).unwrap();
            let (y, q) = w.apply_pair(&origin, &rest.p).unwrap();
            fixes = fixes.max(y.max_abs_diff(&origin)).max(q.max_abs_diff(&rest.p));
            so_n = so_n.max(rotation_defect(&minkowski::wigner_rotation(&lambda, &p).unwrap()));
            let o = minkowski::random_rotation_lorentz(n, &mut rng);
            let wo = minkowski::little_group_element(&a, &x, &o, &p, 1e-9).unwrap();
            reduce = reduce.max(wo.max_abs_diff(&PoincareTransform::lorentz(o)));
        }
        for _ in 0..100 {
            let l1 = minkowski::random_lorentz(n, 1.0, &mut rng);
            let l2 = minkowski::random_lorentz(n, 1.0, &mut rng);
            let p = minkowski::random_momentum(1.0, n, 2.0, &mut rng).unwrap();
            let w1 = minkowski::wigner_rotation(&l1, &p).unwrap();
            let w2 = minkowski::wigner_rotation(&l2, &p.transformed(&l1).unwrap()).unwrap();
            let w12 = minkowski::wigner_rotation(&l2.compose(&l1).unwrap(), &p).unwrap();
            comp = comp.max(w2.compose(&w1).unwrap().max_abs_diff(&w12));
        }
    }
    let ok = fixes <= 1e-9 && reduce <= 1e-9 && so_n <= 1e-9 && comp <= 1e-8;
    outcome(ok, format!("fixes {fixes:.2e}, rotation {reduce:.2e}, SO(n) {so_n:.2e}, composition {comp:.2e}"))
}

fn probability_invariance() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 2..=4 {
        let r = poincare_rep::ball_invariance_suite(n, 200, SEED, 1e-10).unwrap();
        if r.samples != 200 {
            return outcome(false, format!("n={n} ran {} triples", r.samples));
        }
        worst = worst.max(r.worst_deviation);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut shift, mut total): (f64, f64) = (0.0, 0.0);
    for _ in 0..200 {
        let z = GptVector::from_spatial(rotation::random_ball_point(3, &mut rng).as_slice()).unwrap();
        let o = rotation::random_rotation(3, &mut rng);
        let out = detector_sphere_experiment(&z, &axis_detectors(), &o, 1e-9).unwrap();
        shift = shift.max(out.max_shift);
        // each axis detector fires with (1 ± r_k)/6
        for (k, p) in out.before.iter().enumerate() {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            shift = shift.max((p - (1.0 + sign * z.spatial()[k / 2]) / 6.0).abs());
        }
        total = total.max((out.after.iter().sum::<f64>() - 1.0).abs()).max(out.total_defect);
    }
    let ok = worst <= 1e-10 && shift <= 1e-10 && total <= 1e-12;
    outcome(ok, format!("triples {worst:.2e}, detector shift {shift:.2e}, total {total:.2e}"))
}

fn toy_spacetime() -> Outcome {
    for n in 3..=12usize {
        let theta = 2.0 * std::f64::consts::PI / n as f64;
        for k in 0..n as i64 {
            let r = poincare_rep::toy_discrete_spacetime(n, k, 1e-12).unwrap();
            let angle_ok = (r.angle - k as f64 * theta).abs() < 1e-12;
            let perm_ok = r.permutation.iter().enumerate().all(|(i, &j)| j == (i + k as usize) % n);
            if !(r.pass && r.nontrivial && angle_ok && perm_ok) {
                return outcome(false, format!("N={n} k={k} failed"));
            }
        }
    }
    outcome(true, "N = 3..12, every k, nontrivial")
}

fn ball_orbit() -> Outcome {
    let reports = poincare_rep::orbit_ball_reconstruction(3, &[0.0, 0.0, 1.0], 200, SEED, 1e-10).unwrap();
    let failed: Vec<&str> = reports.iter().filter(|r| !r.pass).map(|r| r.check.as_str()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let o = LinearMap::block(&rotation::random_rotation(3, &mut rng)).unwrap();
        let z = o.apply(&GptVector::from_spatial(&[0.0, 0.0, 1.0]).unwrap()).unwrap();
        worst = worst.max((z.spatial_norm() - 1.0).abs());
        let e = GptVector::new(z.entries().iter().map(|x| 0.5 * x).collect()).unwrap();
        let anti = GptVector::from_spatial(&z.spatial().iter().map(|x| -x).collect::<Vec<_>>()).unwrap();
        // ½(1, r) on (1, r) and (1, −r): 1 and 0
        worst = worst.max((e.dot(&z).unwrap() - 1.0).abs()).max(e.dot(&anti).unwrap().abs());
        worst = worst.max((e.complement().dot(&anti).unwrap() - 1.0).abs());
    }
    let ok = failed.is_empty() && worst <= 1e-10;
    outcome(ok, format!("{} library checks, oracle worst {worst:.2e}, failed {failed:?}", reports.len()))
}

fn end_to_end() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_gptk")).arg("report").output().expect("gptk runs");
    let json: serde_json::Value = match serde_json::from_slice(&out.stdout) {
        Ok(v) => v,
        Err(e) => return outcome(false, format!("report is not JSON: {e}")),
    };
    let checks: usize = json["suites"].as_array().map_or(0, |s| {
        s.iter().map(|x| x["checks"].as_array().map_or(0, Vec::len)).sum()
    });
    let ok = out.status.success() && json["pass"] == true;
    outcome(ok, format!("gptk report: exit {:?}, {checks} checks", out.status.code()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1 distinguishability", Duration::from_secs(1), distinguishability),
        ("2 polygon symmetry", Duration::from_secs(5), polygon_symmetry),
        ("3 bloch consistency", Duration::from_secs(5), bloch_consistency),
        ("4 box world chsh", Duration::from_secs(60), box_world_chsh),
        ("5 tsirelson point", Duration::from_secs(60), tsirelson),
        ("6 minkowski invariance", Duration::from_secs(10), minkowski_invariance),
        ("7 little group", Duration::from_secs(30), little_group),
        ("8 probability invariance", Duration::from_secs(10), probability_invariance),
        ("9 toy spacetime", Duration::from_secs(5), toy_spacetime),
        ("10 ball orbit", Duration::from_secs(10), ball_orbit),
    ];
    let mut all = true;
    for (name, limit, check) in criteria {
        let start = Instant::now();
        let r = check();
        let took = start.elapsed();
        let pass = r.ok && took <= limit;
        all &= pass;
        println!(
            "criterion {name}: {} ({:.3}s, limit {}s) {}",
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            limit.as_secs(),
            r.detail
        );
    }
    let start = Instant::now();
    let r = end_to_end();
    all &= r.ok;
    println!(
        "end-to-end: {} ({:.3}s) {}",
        if r.ok { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64(),
        r.detail
    );
    if all {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILED");
        ExitCode::FAILURE
    }
}
