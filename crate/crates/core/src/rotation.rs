//! Orthogonal-group helpers: plane rotations, Householder reflections,
//! rotation-to-target, seeded Haar sampling, deterministic sphere points.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{GptError, Result};

/// Rotation by `angle` in the `(i, j)` coordinate plane of `R^n`.
pub fn plane_rotation(n: usize, i: usize, j: usize, angle: f64) -> DMatrix<f64> {
    let mut m = DMatrix::identity(n, n);
    let (s, c) = angle.sin_cos();
    m[(i, i)] = c;
    m[(j, j)] = c;
    m[(i, j)] = -s;
    m[(j, i)] = s;
    m
}

/// Reflection `I - 2 w wᵀ / wᵀw` through the hyperplane orthogonal to `w`.
pub fn householder(w: &DVector<f64>) -> DMatrix<f64> {
    let n = w.len();
    let norm2 = w.norm_squared();
    DMatrix::identity(n, n) - (w * w.transpose()) * (2.0 / norm2)
}

/// A rotation in SO(n) taking the unit vector `from` to the unit vector `to`,
/// built as a product of two Householder reflections.
///
/// When `from·to ≥ 0` the pair is `H(to)·H(from + to)`; otherwise
/// `H(w)·H(from − to)` with `w ⊥ to` chosen from the coordinate axis least
/// aligned with `to`. Both branches keep the reflected vector's norm at least
/// √2, so the construction stays well conditioned near `to = ±from`.
pub fn rotation_taking(from: &DVector<f64>, to: &DVector<f64>, tol: f64) -> Result<DMatrix<f64>> {
    let n = from.len();
    GptError::check_len(n, to.len())?;
    for v in [from, to] {
        if (v.norm() - 1.0).abs() > tol {
            return Err(GptError::Domain(format!(
                "expected a unit vector, norm is {}",
                v.norm()
            )));
        }
    }
    if from.dot(to) >= 0.0 {
        let w = from + to;
        return Ok(householder(to) * householder(&w));
    }
    if n < 2 {
        return Err(GptError::Domain(
            "SO(1) cannot reverse an axis".to_string(),
        ));
    }
    let k = (0..n)
        .min_by(|&a, &b| to[a].abs().total_cmp(&to[b].abs()))
        .expect("n >= 2");
    let mut w = -to * to[k];
    w[k] += 1.0;
    Ok(householder(&w) * householder(&(from - to)))
}

/// Seeded Haar-distributed element of SO(n): QR of a Gaussian matrix with
/// the sign of `R`'s diagonal folded into `Q`, then a column flip if needed.
pub fn random_rotation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    if n == 1 {
        return DMatrix::identity(1, 1);
    }
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            let col = -q.column(j);
            q.set_column(j, &col);
        }
    }
    if q.determinant() < 0.0 {
        let col = -q.column(0);
        q.set_column(0, &col);
    }
    q
}

/// A seeded Gaussian direction on the unit sphere of `R^n`.
pub fn random_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = v.norm();
        if norm > 1e-6 {
            return v / norm;
        }
    }
}

/// Seeded point uniformly distributed in the closed unit ball of `R^n`.
pub fn random_ball_point<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<f64> {
    let dir = random_unit_vector(n, rng);
    let radius: f64 = rng.gen::<f64>().powf(1.0 / n as f64);
    dir * radius
}

pub fn is_orthogonal(m: &DMatrix<f64>, tol: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    let n = m.nrows();
    let defect = m.transpose() * m - DMatrix::identity(n, n);
    defect.amax() <= tol
}

pub fn is_special_orthogonal(m: &DMatrix<f64>, tol: f64) -> bool {
    is_orthogonal(m, tol) && (m.determinant() - 1.0).abs() <= tol
}

/// Rotation angle of a 3×3 rotation from `cos θ = (tr − 1)/2`, with the
/// argument clamped to `[-1, 1]`.
pub fn rotation_angle_3d(m: &DMatrix<f64>) -> f64 {
    let c = ((m.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
    c.acos()
}

/// Deterministic point set on the unit sphere `S^{d-1}` of `R^d`.
///
/// `d = 1`: the two endpoints; `d = 2`: `k` equally spaced angles; `d = 3`:
/// the Fibonacci lattice; higher `d`: a fixed-seed Gaussian sample.
pub fn sphere_points(d: usize, k: usize) -> Vec<DVector<f64>> {
    match d {
        0 => Vec::new(),
        1 => vec![DVector::from_element(1, 1.0), DVector::from_element(1, -1.0)],
        2 => (0..k)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
                DVector::from_vec(vec![t.cos(), t.sin()])
            })
            .collect(),
        3 => fibonacci_sphere(k),
        _ => {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed_5afe);
            (0..k).map(|_| random_unit_vector(d, &mut rng)).collect()
        }
    }
}

/// Fibonacci lattice on `S²`.
pub fn fibonacci_sphere(k: usize) -> Vec<DVector<f64>> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..k)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / k as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            DVector::from_vec(vec![r * phi.cos(), r * phi.sin(), z])
        })
        .collect()
}

/// Largest angular gap between any sphere direction and the point set,
/// estimated against a finer reference lattice.
pub fn covering_radius(points: &[DVector<f64>], d: usize) -> f64 {
    let probes = sphere_points(d, (points.len() * 8).max(64));
    probes
        .iter()
        .map(|q| {
            points
                .iter()
                .map(|p| p.dot(q).clamp(-1.0, 1.0).acos())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn e(n: usize, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(n);
        v[i] = 1.0;
        v
    }

    #[test]
    fn rotation_taking_hits_target_and_is_special() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 2..6 {
            for _ in 0..50 {
                let a = random_unit_vector(n, &mut rng);
                let b = random_unit_vector(n, &mut rng);
                let q = rotation_taking(&a, &b, 1e-12).unwrap();
                assert!((&q * &a - &b).amax() < 1e-12);
                assert!(is_special_orthogonal(&q, 1e-12));
            }
        }
    }

    #[test]
    fn antipodal_axis_is_a_half_turn_in_first_plane() {
        let q = rotation_taking(&e(3, 0), &(-e(3, 0)), 1e-12).unwrap();
        let expected = DMatrix::from_diagonal(&DVector::from_vec(vec![-1.0, -1.0, 1.0]));
        assert!((q - expected).amax() < 1e-15);
    }

    #[test]
    fn identity_when_already_aligned() {
        let q = rotation_taking(&e(4, 0), &e(4, 0), 1e-12).unwrap();
        assert!((q - DMatrix::identity(4, 4)).amax() < 1e-15);
    }

    #[test]
    fn rejects_non_unit_and_so1_reversal() {
        let v = DVector::from_vec(vec![2.0, 0.0]);
        assert!(rotation_taking(&v, &e(2, 0), 1e-9).is_err());
        assert!(rotation_taking(&e(1, 0), &(-e(1, 0)), 1e-9).is_err());
    }

    #[test]
    fn haar_samples_are_rotations() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..7 {
            let q = random_rotation(n, &mut rng);
            assert!(is_special_orthogonal(&q, 1e-12), "n = {n}");
        }
    }

    #[test]
    fn angle_from_trace() {
        let r = plane_rotation(3, 0, 1, 0.7);
        assert!((rotation_angle_3d(&r) - 0.7).abs() < 1e-12);
        assert_eq!(rotation_angle_3d(&DMatrix::identity(3, 3)), 0.0);
    }

    #[test]
    fn fibonacci_points_are_unit() {
        let pts = fibonacci_sphere(200);
        assert_eq!(pts.len(), 200);
        assert!(pts.iter().all(|p| (p.norm() - 1.0).abs() < 1e-12));
        let r = covering_radius(&pts, 3);
        assert!(r > 0.0 && r < 0.2, "covering radius {r}");
    }
}
