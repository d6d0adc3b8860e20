//! Minkowski space `R^{1,n}` with metric `η = diag(−1, 1, …, 1)`, Lorentz
//! matrices, Poincaré transforms, standard boosts and little-group elements
//! for massive momenta.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GptError, Result};
use crate::rotation;

#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SpacetimeVector(DVector<f64>);

impl SpacetimeVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(GptError::param("spacetime vector needs a time component"));
        }
        if let Some(i) = entries.iter().position(|x| !x.is_finite()) {
            return Err(GptError::NonFinite(i));
        }
        Ok(Self(DVector::from_vec(entries)))
    }

    pub fn from_dvector(v: DVector<f64>) -> Result<Self> {
        Self::new(v.as_slice().to_vec())
    }

    pub fn zero(n: usize) -> Self {
        Self(DVector::zeros(n + 1))
    }

    /// `(t, x⃗)`.
    pub fn from_parts(t: f64, space: &[f64]) -> Result<Self> {
        let mut e = vec![t];
        e.extend_from_slice(space);
        Self::new(e)
    }

    /// Number of spatial dimensions.
    pub fn n(&self) -> usize {
        self.0.len() - 1
    }

    pub fn time(&self) -> f64 {
        self.0[0]
    }

    pub fn space(&self) -> DVector<f64> {
        self.0.rows(1, self.n()).clone_owned()
    }

    pub fn as_dvector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn entries(&self) -> &[f64] {
        self.0.as_slice()
    }

    /// `xᵀ η y`.
    pub fn minkowski_dot(&self, other: &Self) -> Result<f64> {
        GptError::check_len(self.0.len(), other.0.len())?;
        Ok(-self.0[0] * other.0[0] + self.0.rows(1, self.n()).dot(&other.0.rows(1, self.n())))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        GptError::check_len(self.0.len(), other.0.len())?;
        Ok(Self(&self.0 + &other.0))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        GptError::check_len(self.0.len(), other.0.len())?;
        Ok(Self(&self.0 - &other.0))
    }

    pub fn neg(&self) -> Self {
        Self(-&self.0)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.0.len() != other.0.len() {
            return f64::INFINITY;
        }
        (&self.0 - &other.0).amax()
    }
}

impl TryFrom<Vec<f64>> for SpacetimeVector {
    type Error = GptError;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SpacetimeVector> for Vec<f64> {
    fn from(v: SpacetimeVector) -> Self {
        v.0.as_slice().to_vec()
    }
}

impl fmt::Debug for SpacetimeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SpacetimeVector{:?}", self.0.as_slice())
    }
}

/// `η = diag(−1, 1, …, 1)` of size `1 + n`.
pub fn eta(n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::identity(n + 1, n + 1);
    m[(0, 0)] = -1.0;
    m
}

/// Signed squared interval `−(y₀ − x₀)² + Σ (y_i − x_i)²`.
pub fn interval(x: &SpacetimeVector, y: &SpacetimeVector) -> Result<f64> {
    let d = y.sub(x)?;
    d.minkowski_dot(&d)
}

#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct LorentzMatrix(DMatrix<f64>);

impl LorentzMatrix {
    /// Wraps a square finite matrix; group membership is checked separately
    /// by [`LorentzMatrix::is_lorentz`].
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(GptError::param("Lorentz matrix must be square and nonempty"));
        }
        if let Some(i) = m.iter().position(|x| !x.is_finite()) {
            return Err(GptError::NonFinite(i));
        }
        Ok(Self(m))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n + 1, n + 1))
    }

    /// `block(1, O)` for a spatial rotation `O`.
    pub fn rotation(o: &DMatrix<f64>) -> Result<Self> {
        let n = o.nrows();
        let mut m = DMatrix::identity(n + 1, n + 1);
        m.view_mut((1, 1), (n, n)).copy_from(o);
        Self::new(m)
    }

    pub fn n(&self) -> usize {
        self.0.nrows() - 1
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    /// The `n × n` spatial block.
    pub fn spatial_block(&self) -> DMatrix<f64> {
        self.0.view((1, 1), (self.n(), self.n())).clone_owned()
    }

    /// `max |ΛᵀηΛ − η|`.
    pub fn metric_defect(&self) -> f64 {
        let e = eta(self.n());
        (self.0.transpose() * &e * &self.0 - e).amax()
    }

    pub fn is_lorentz(&self, tol: f64) -> bool {
        self.metric_defect() <= tol
    }

    pub fn is_proper_orthochronous(&self, tol: f64) -> bool {
        self.is_lorentz(tol)
            && (self.0.determinant() - 1.0).abs() <= tol
            && self.0[(0, 0)] >= 1.0 - tol
    }

    /// `Λ⁻¹ = η Λᵀ η`, exact for Lorentz matrices.
    pub fn inverse(&self) -> Self {
        let e = eta(self.n());
        Self(&e * self.0.transpose() * &e)
    }

    /// `self · other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        GptError::check_len(self.0.nrows(), other.0.nrows())?;
        Ok(Self(&self.0 * &other.0))
    }

    pub fn apply(&self, x: &SpacetimeVector) -> Result<SpacetimeVector> {
        GptError::check_len(self.0.nrows(), x.0.len())?;
        Ok(SpacetimeVector(&self.0 * &x.0))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.0.shape() != other.0.shape() {
            return f64::INFINITY;
        }
        (&self.0 - &other.0).amax()
    }

    /// Whether the time axis is fixed (first row and column `(1, 0, …)`)
    /// and the spatial block lies in SO(n), all within `tol`.
    pub fn is_pure_rotation(&self, tol: f64) -> bool {
        let n = self.n();
        (self.0[(0, 0)] - 1.0).abs() <= tol
            && (1..=n).all(|i| self.0[(0, i)].abs() <= tol && self.0[(i, 0)].abs() <= tol)
            && rotation::is_special_orthogonal(&self.spatial_block(), tol)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.0.row_iter().map(|r| r.iter().copied().collect()).collect()
    }
}

impl TryFrom<Vec<Vec<f64>>> for LorentzMatrix {
    type Error = GptError;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        for r in &rows {
            GptError::check_len(n, r.len())?;
        }
        let flat: Vec<f64> = rows.into_iter().flatten().collect();
        Self::new(DMatrix::from_row_slice(n, n, &flat))
    }
}

impl From<LorentzMatrix> for Vec<Vec<f64>> {
    fn from(m: LorentzMatrix) -> Self {
        m.rows()
    }
}

impl fmt::Debug for LorentzMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LorentzMatrix{:?}", self.rows())
    }
}

/// `P(a, Λ): x ↦ Λx + a`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoincareTransform {
    pub a: SpacetimeVector,
    pub lambda: LorentzMatrix,
}

impl PoincareTransform {
    pub fn new(a: SpacetimeVector, lambda: LorentzMatrix) -> Result<Self> {
        GptError::check_len(lambda.n(), a.n())?;
        Ok(Self { a, lambda })
    }

    pub fn identity(n: usize) -> Self {
        Self { a: SpacetimeVector::zero(n), lambda: LorentzMatrix::identity(n) }
    }

    pub fn translation(a: SpacetimeVector) -> Self {
        let n = a.n();
        Self { a, lambda: LorentzMatrix::identity(n) }
    }

    pub fn lorentz(lambda: LorentzMatrix) -> Self {
        Self { a: SpacetimeVector::zero(lambda.n()), lambda }
    }

    pub fn n(&self) -> usize {
        self.a.n()
    }

    pub fn apply(&self, x: &SpacetimeVector) -> Result<SpacetimeVector> {
        self.lambda.apply(x)?.add(&self.a)
    }

    /// Action on a (position, momentum) pair: `(b, p) ↦ (Λb + a, Λp)`.
    pub fn apply_pair(
        &self,
        b: &SpacetimeVector,
        p: &SpacetimeVector,
    ) -> Result<(SpacetimeVector, SpacetimeVector)> {
        Ok((self.apply(b)?, self.lambda.apply(p)?))
    }

    /// `self ∘ first`: `P(a₂ + Λ₂a₁, Λ₂Λ₁)`.
    pub fn compose(&self, first: &PoincareTransform) -> Result<PoincareTransform> {
        GptError::check_len(self.n(), first.n())?;
        Ok(PoincareTransform {
            a: self.a.add(&self.lambda.apply(&first.a)?)?,
            lambda: self.lambda.compose(&first.lambda)?,
        })
    }

    /// `P(−Λ⁻¹a, Λ⁻¹)`.
    pub fn inverse(&self) -> PoincareTransform {
        let inv = self.lambda.inverse();
        let a = inv.apply(&self.a).expect("sizes agree").neg();
        PoincareTransform { a, lambda: inv }
    }

    pub fn max_abs_diff(&self, other: &PoincareTransform) -> f64 {
        self.a.max_abs_diff(&other.a).max(self.lambda.max_abs_diff(&other.lambda))
    }
}

pub fn apply_poincare(p: &PoincareTransform, x: &SpacetimeVector) -> Result<SpacetimeVector> {
    p.apply(x)
}

pub fn compose(p2: &PoincareTransform, p1: &PoincareTransform) -> Result<PoincareTransform> {
    p2.compose(p1)
}

/// A momentum on the mass shell `pᵀηp = −m²` with `p₀ > 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassiveMomentum {
    pub p: SpacetimeVector,
    pub m: f64,
}

impl MassiveMomentum {
    /// Validates `p` against the mass `m`.
    pub fn new(p: SpacetimeVector, m: f64, tol: f64) -> Result<Self> {
        if !(m > 0.0) {
            return Err(GptError::Domain(format!("mass must be positive, got {m}")));
        }
        if p.time() <= 0.0 {
            return Err(GptError::Domain("momentum must be future pointing".into()));
        }
        let shell = p.minkowski_dot(&p)? + m * m;
        if shell.abs() > tol * (1.0 + m * m) {
            return Err(GptError::Domain(format!("off the mass shell by {shell}")));
        }
        Ok(Self { p, m })
    }

    /// `(√(‖p⃗‖² + m²), p⃗)`.
    pub fn from_spatial(m: f64, space: &[f64]) -> Result<Self> {
        if !(m > 0.0) {
            return Err(GptError::Domain(format!("mass must be positive, got {m}")));
        }
        let e = (space.iter().map(|x| x * x).sum::<f64>() + m * m).sqrt();
        Ok(Self { p: SpacetimeVector::from_parts(e, space)?, m })
    }

    /// `p_rest = (m, 0, …, 0)`.
    pub fn at_rest(m: f64, n: usize) -> Result<Self> {
        Self::from_spatial(m, &vec![0.0; n])
    }

    pub fn n(&self) -> usize {
        self.p.n()
    }

    pub fn rest(&self) -> SpacetimeVector {
        let mut e = vec![0.0; self.n() + 1];
        e[0] = self.m;
        SpacetimeVector::new(e).expect("finite")
    }

    pub fn spatial_norm(&self) -> f64 {
        self.p.space().norm()
    }

    /// `γ = √(‖p⃗‖² + m²)/m`.
    pub fn gamma(&self) -> f64 {
        (self.spatial_norm().powi(2) + self.m * self.m).sqrt() / self.m
    }

    /// `Λp`, carrying the same mass.
    pub fn transformed(&self, lambda: &LorentzMatrix) -> Result<Self> {
        Ok(Self { p: lambda.apply(&self.p)?, m: self.m })
    }

    /// `pᵀηp + m²`.
    pub fn shell_defect(&self) -> f64 {
        self.p.minkowski_dot(&self.p).expect("same size") + self.m * self.m
    }
}

/// Pure boost `S(‖p⃗‖)` along the first spatial axis, taking `p_rest` to
/// `(γm, ‖p⃗‖, 0, …)`.
pub fn boost_x(p_norm: f64, m: f64, n: usize) -> Result<LorentzMatrix> {
    if !(m > 0.0) {
        return Err(GptError::Domain(format!("mass must be positive, got {m}")));
    }
    if !(p_norm >= 0.0) || !p_norm.is_finite() {
        return Err(GptError::Domain(format!("momentum magnitude {p_norm} is invalid")));
    }
    if n == 0 {
        return Err(GptError::param("boosts need at least one spatial axis"));
    }
    let gamma = (p_norm * p_norm + m * m).sqrt() / m;
    let s = p_norm / m;
    let mut b = DMatrix::identity(n + 1, n + 1);
    b[(0, 0)] = gamma;
    b[(1, 1)] = gamma;
    b[(0, 1)] = s;
    b[(1, 0)] = s;
    LorentzMatrix::new(b)
}

/// `Q(p̄) = block(1, Õ)` with `Õ ∈ SO(n)` and `Õ e₁ = p̄`.
pub fn rotation_to_axis(p_bar: &[f64], tol: f64) -> Result<LorentzMatrix> {
    let n = p_bar.len();
    let mut e1 = DVector::zeros(n);
    if n == 0 {
        return Err(GptError::param("no spatial axes"));
    }
    e1[0] = 1.0;
    let o = rotation::rotation_taking(&e1, &DVector::from_column_slice(p_bar), tol)?;
    LorentzMatrix::rotation(&o)
}

/// `Λ_{p_rest}(p) = Q(p̄) S(‖p⃗‖) Q(p̄)⁻¹`, the identity when `p⃗ = 0`.
///
/// For `n = 1` with `p₁ < 0` the boost is taken with negative parameter,
/// since SO(1) cannot turn the axis around.
pub fn standard_boost(p: &MassiveMomentum) -> Result<LorentzMatrix> {
    let n = p.n();
    let space = p.p.space();
    let norm = space.norm();
    if norm == 0.0 {
        return Ok(LorentzMatrix::identity(n));
    }
    if n == 1 {
        let mut b = boost_x(norm, p.m, 1)?.0;
        if space[0] < 0.0 {
            b[(0, 1)] = -b[(0, 1)];
            b[(1, 0)] = -b[(1, 0)];
        }
        return LorentzMatrix::new(b);
    }
    let p_bar = space / norm;
    let q = rotation_to_axis(p_bar.as_slice(), 1e-9)?;
    let s = boost_x(norm, p.m, n)?;
    q.compose(&s)?.compose(&q.inverse())
}

/// `W = Λ_{p_rest}(Λp)⁻¹ Λ Λ_{p_rest}(p)`.
pub fn wigner_rotation(lambda: &LorentzMatrix, p: &MassiveMomentum) -> Result<LorentzMatrix> {
    let lp = p.transformed(lambda)?;
    standard_boost(&lp)?
        .inverse()
        .compose(lambda)?
        .compose(&standard_boost(p)?)
}

/// The product
/// `P(−B(Λp)⁻¹(x+a), B(Λp)⁻¹) ∘ P(x+a−Λx, Λ) ∘ P(x, B(p))`, with `B` the
/// standard boost. It fixes the pair `(0, p_rest)`.
pub fn little_group_element(
    a: &SpacetimeVector,
    x: &SpacetimeVector,
    lambda: &LorentzMatrix,
    p: &MassiveMomentum,
    tol: f64,
) -> Result<PoincareTransform> {
    if !lambda.is_proper_orthochronous(tol) {
        return Err(GptError::Domain("Λ is not proper orthochronous".into()));
    }
    GptError::check_len(lambda.n(), p.n())?;
    let bp = standard_boost(p)?;
    let b_lp_inv = standard_boost(&p.transformed(lambda)?)?.inverse();
    let xa = x.add(a)?;
    let first = PoincareTransform::new(x.clone(), bp)?;
    let middle = PoincareTransform::new(xa.sub(&lambda.apply(x)?)?, lambda.clone())?;
    let last = PoincareTransform::new(b_lp_inv.apply(&xa)?.neg(), b_lp_inv)?;
    last.compose(&middle)?.compose(&first)
}

/// Seeded proper orthochronous Lorentz matrix `O₁ S(ρ) O₂` with Haar
/// rotations and rapidity `ρ` uniform in `[0, max_rapidity]`.
pub fn random_lorentz<R: Rng + ?Sized>(n: usize, max_rapidity: f64, rng: &mut R) -> LorentzMatrix {
    let o1 = LorentzMatrix::rotation(&rotation::random_rotation(n, rng)).expect("square");
    let o2 = LorentzMatrix::rotation(&rotation::random_rotation(n, rng)).expect("square");
    let rapidity = rng.gen_range(0.0..=max_rapidity);
    let s = boost_x(rapidity.sinh(), 1.0, n).expect("valid boost");
    o1.compose(&s).and_then(|m| m.compose(&o2)).expect("sizes agree")
}

pub fn random_rotation_lorentz<R: Rng + ?Sized>(n: usize, rng: &mut R) -> LorentzMatrix {
    LorentzMatrix::rotation(&rotation::random_rotation(n, rng)).expect("square")
}

pub fn random_spacetime<R: Rng + ?Sized>(n: usize, scale: f64, rng: &mut R) -> SpacetimeVector {
    SpacetimeVector::new((0..=n).map(|_| rng.gen_range(-scale..=scale)).collect())
        .expect("finite")
}

pub fn random_poincare<R: Rng + ?Sized>(
    n: usize,
    max_rapidity: f64,
    rng: &mut R,
) -> PoincareTransform {
    let lambda = random_lorentz(n, max_rapidity, rng);
    PoincareTransform { a: random_spacetime(n, 5.0, rng), lambda }
}

/// On-shell momentum with spatial components uniform in `[-max, max]`.
pub fn random_momentum<R: Rng + ?Sized>(
    m: f64,
    n: usize,
    max: f64,
    rng: &mut R,
) -> Result<MassiveMomentum> {
    let space: Vec<f64> = (0..n).map(|_| rng.gen_range(-max..=max)).collect();
    MassiveMomentum::from_spatial(m, &space)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sv(x: &[f64]) -> SpacetimeVector {
        SpacetimeVector::new(x.to_vec()).unwrap()
    }

    #[test]
    fn interval_signs() {
        let o = SpacetimeVector::zero(3);
        assert_eq!(interval(&o, &sv(&[1.0, 1.0, 0.0, 0.0])).unwrap(), 0.0);
        assert_eq!(interval(&o, &sv(&[1.0, 0.0, 0.0, 0.0])).unwrap(), -1.0);
        assert!(interval(&o, &sv(&[1.0, 0.0])).is_err());
    }

    #[test]
    fn classification() {
        let id = LorentzMatrix::identity(3);
        assert!(id.is_lorentz(1e-12) && id.is_proper_orthochronous(1e-12));
        let t_rev = LorentzMatrix::new(eta(3)).unwrap();
        assert!(t_rev.is_lorentz(1e-12));
        assert!(!t_rev.is_proper_orthochronous(1e-12));
        let mut p_inv = DMatrix::identity(4, 4);
        p_inv[(1, 1)] = -1.0;
        let p_inv = LorentzMatrix::new(p_inv).unwrap();
        assert!(p_inv.is_lorentz(1e-12) && !p_inv.is_proper_orthochronous(1e-12));
        let b = boost_x(1.0, 1.0, 3).unwrap();
        assert!(b.is_proper_orthochronous(1e-12));
        let mut shear = DMatrix::identity(4, 4);
        shear[(0, 1)] = 0.5;
        assert!(!LorentzMatrix::new(shear).unwrap().is_lorentz(1e-9));
    }

    #[test]
    fn boost_values() {
        assert_eq!(boost_x(0.0, 1.0, 3).unwrap(), LorentzMatrix::identity(3));
        let b = boost_x(1.0, 1.0, 3).unwrap();
        let moved = b.apply(&sv(&[1.0, 0.0, 0.0, 0.0])).unwrap();
        assert!(moved.max_abs_diff(&sv(&[2f64.sqrt(), 1.0, 0.0, 0.0])) < 1e-15);
        let mut flipped = b.matrix().clone();
        flipped[(0, 1)] = -flipped[(0, 1)];
        flipped[(1, 0)] = -flipped[(1, 0)];
        assert!(b.inverse().max_abs_diff(&LorentzMatrix::new(flipped).unwrap()) < 1e-10);
        assert!(boost_x(1.0, 0.0, 3).is_err());
        assert!(boost_x(-1.0, 1.0, 3).is_err());
    }

    #[test]
    fn translations_and_rotations_act_as_expected() {
        let x = sv(&[0.5, 1.0, 2.0, 3.0]);
        let a = sv(&[1.0, -1.0, 0.0, 2.0]);
        let t = PoincareTransform::translation(a.clone());
        assert!(t.apply(&x).unwrap().max_abs_diff(&x.add(&a).unwrap()) < 1e-15);
        let o = rotation::plane_rotation(3, 0, 2, 0.3);
        let r = PoincareTransform::lorentz(LorentzMatrix::rotation(&o).unwrap());
        let y = r.apply(&x).unwrap();
        assert_eq!(y.time(), 0.5);
        assert!((y.space() - &o * x.space()).amax() < 1e-15);
        let p = sv(&[2.0, 1.0, 1.0, 1.0]);
        let (b2, p2) = t.apply_pair(&x, &p).unwrap();
        assert_eq!(p2, p);
        assert!(b2.max_abs_diff(&x.add(&a).unwrap()) < 1e-15);
    }

    #[test]
    fn composition_inverse_and_translations() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = random_poincare(3, 1.5, &mut rng);
        let id = p.compose(&p.inverse()).unwrap();
        assert!(id.max_abs_diff(&PoincareTransform::identity(3)) < 1e-10);
        let t1 = PoincareTransform::translation(sv(&[1.0, 2.0, 3.0, 4.0]));
        let t2 = PoincareTransform::translation(sv(&[0.5, 0.5, -1.0, 0.0]));
        assert_eq!(t2.compose(&t1).unwrap().a, sv(&[1.5, 2.5, 2.0, 4.0]));
    }

    #[test]
    fn rotation_to_axis_cases() {
        assert_eq!(rotation_to_axis(&[1.0, 0.0, 0.0], 1e-12).unwrap(), LorentzMatrix::identity(3));
        let q = rotation_to_axis(&[-1.0, 0.0, 0.0], 1e-12).unwrap();
        let o = q.spatial_block();
        assert!((o.column(0) + DVector::from_vec(vec![1.0, 0.0, 0.0])).amax() < 1e-15);
        assert!((o.determinant() - 1.0).abs() < 1e-15);
        let q = rotation_to_axis(&[0.0, 1.0, 0.0], 1e-12).unwrap();
        let o = q.spatial_block();
        assert!((o.column(0) - DVector::from_vec(vec![0.0, 1.0, 0.0])).amax() < 1e-12);
        assert!(rotation::is_orthogonal(&o, 1e-12));
        assert!(rotation_to_axis(&[0.5, 0.0, 0.0], 1e-9).is_err());
    }

    #[test]
    fn standard_boost_reaches_target() {
        let rest = MassiveMomentum::at_rest(1.0, 3).unwrap();
        assert_eq!(standard_boost(&rest).unwrap(), LorentzMatrix::identity(3));
        let p = MassiveMomentum::new(sv(&[2f64.sqrt(), 0.0, 1.0, 0.0]), 1.0, 1e-12).unwrap();
        let b = standard_boost(&p).unwrap();
        assert!(b.apply(&p.rest()).unwrap().max_abs_diff(&p.p) < 1e-10);
        assert!(b.is_proper_orthochronous(1e-12));
        let q = MassiveMomentum::from_spatial(2.0, &[-0.7]).unwrap();
        let b = standard_boost(&q).unwrap();
        assert!(b.apply(&q.rest()).unwrap().max_abs_diff(&q.p) < 1e-12);
    }

    #[test]
    fn momentum_validation() {
        assert!(MassiveMomentum::new(sv(&[1.0, 1.0, 0.0, 0.0]), 1.0, 1e-9).is_err());
        assert!(MassiveMomentum::new(sv(&[-1.0, 0.0, 0.0, 0.0]), 1.0, 1e-9).is_err());
        assert!(MassiveMomentum::at_rest(0.0, 3).is_err());
        let p = MassiveMomentum::from_spatial(1.0, &[1.0, 0.0, 0.0]).unwrap();
        assert!((p.gamma() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn little_group_identity_and_rotation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = random_momentum(1.0, 3, 2.0, &mut rng).unwrap();
        let a = random_spacetime(3, 2.0, &mut rng);
        let x = random_spacetime(3, 2.0, &mut rng);
        let id = little_group_element(&a, &x, &LorentzMatrix::identity(3), &p, 1e-9).unwrap();
        assert!(id.a.max_abs_diff(&SpacetimeVector::zero(3)) < 1e-9);
        assert!(id.lambda.max_abs_diff(&LorentzMatrix::identity(3)) < 1e-9);
        let o = random_rotation_lorentz(3, &mut rng);
        let w = little_group_element(&a, &x, &o, &p, 1e-9).unwrap();
        assert!(w.max_abs_diff(&PoincareTransform::lorentz(o)) < 1e-9);
    }

    #[test]
    fn collinear_boost_gives_no_rotation() {
        let p = MassiveMomentum::from_spatial(1.0, &[0.3, 0.4, 0.0]).unwrap();
        let q = MassiveMomentum::from_spatial(1.0, &[0.6, 0.8, 0.0]).unwrap();
        let w = wigner_rotation(&standard_boost(&q).unwrap(), &p).unwrap();
        assert!(w.max_abs_diff(&LorentzMatrix::identity(3)) < 1e-12);
    }

    #[test]
    fn perpendicular_boosts_rotate() {
        // γ₁ = γ₂ = √2: p along x, Λ a boost along y.
        let p = MassiveMomentum::from_spatial(1.0, &[1.0, 0.0, 0.0]).unwrap();
        let lambda = standard_boost(&MassiveMomentum::from_spatial(1.0, &[0.0, 1.0, 0.0]).unwrap()).unwrap();
        let w = wigner_rotation(&lambda, &p).unwrap();
        assert!(w.is_pure_rotation(1e-12));
        let angle = rotation::rotation_angle_3d(&w.spatial_block());
        // cos θ = (γ₁ + γ₂) / (1 + γ₁γ₂) for perpendicular boosts
        let (g1, g2) = (2f64.sqrt(), 2f64.sqrt());
        let oracle = ((g1 + g2) / (1.0 + g1 * g2)).acos();
        assert!((angle - oracle).abs() < 1e-12, "{angle} vs {oracle}");
    }

    #[test]
    fn json_log_shape() {
        let t = PoincareTransform::identity(1);
        let j = serde_json::to_value(&t).unwrap();
        assert_eq!(j["a"], serde_json::json!([0.0, 0.0]));
        assert_eq!(j["lambda"], serde_json::json!([[1.0, 0.0], [0.0, 1.0]]));
        let back: PoincareTransform = serde_json::from_value(j).unwrap();
        assert_eq!(back, t);
    }
}
