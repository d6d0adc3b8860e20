//! Classical-momentum states and effects, internal representations of
//! spacetime symmetries, and the invariance checks built on them.
//!
//! A classical-momentum state pairs an on-shell momentum with a state of a
//! finite-dimensional internal theory. Pairings carry a Kronecker factor on
//! the momentum labels. Effects always transform by the transpose-inverse of
//! the state map, which is the linear choice that keeps every pairing fixed.

use std::f64::consts::PI;
use std::fmt::Debug;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{GptError, Result};
use crate::gpt::{ConvexSet, GptVector, LinearMap, TheorySpec};
use crate::minkowski::{
    self, LorentzMatrix, MassiveMomentum, PoincareTransform, SpacetimeVector,
};
use crate::report::VerificationReport;
use crate::rotation;
use crate::zoo;

/// Momentum labels closer than this (max norm) count as equal.
pub const DEFAULT_P_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassicalMomentumState {
    pub p: MassiveMomentum,
    pub internal: GptVector,
}

impl ClassicalMomentumState {
    pub fn new(p: MassiveMomentum, internal: GptVector, theory: &TheorySpec, tol: f64) -> Result<Self> {
        if !theory.validate_state(&internal, tol)?.member {
            return Err(GptError::Domain("internal vector is not a state".into()));
        }
        Ok(Self { p, internal })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassicalMomentumEffect {
    pub p_label: MassiveMomentum,
    pub internal: GptVector,
}

impl ClassicalMomentumEffect {
    pub fn new(
        p_label: MassiveMomentum,
        internal: GptVector,
        theory: &TheorySpec,
        tol: f64,
    ) -> Result<Self> {
        if !theory.is_normalized_effect(&internal, tol)? {
            return Err(GptError::Domain("internal vector is not a normalized effect".into()));
        }
        Ok(Self { p_label, internal })
    }
}

/// `ε·ζ` when the momentum labels agree within `p_tol`, else exactly 0.
pub fn classical_pairing(
    e: &ClassicalMomentumEffect,
    z: &ClassicalMomentumState,
    p_tol: f64,
) -> Result<f64> {
    GptError::check_len(e.internal.len(), z.internal.len())?;
    GptError::check_len(e.p_label.n(), z.p.n())?;
    if e.p_label.p.max_abs_diff(&z.p.p) <= p_tol {
        e.internal.dot(&z.internal)
    } else {
        Ok(0.0)
    }
}

/// A state map with its effect counterpart.
#[derive(Clone, Debug, PartialEq)]
pub struct RepPair {
    pub state: LinearMap,
    pub effect: LinearMap,
}

impl RepPair {
    /// Pairs `m` with `(m⁻¹)ᵀ`.
    pub fn from_state(m: LinearMap) -> Result<Self> {
        let effect = m
            .transpose_inverse()
            .ok_or_else(|| GptError::Domain("state map is not invertible".into()))?;
        Ok(Self { state: m, effect })
    }

    pub fn identity(size: usize) -> Self {
        Self { state: LinearMap::identity(size), effect: LinearMap::identity(size) }
    }
}

/// How a Poincaré transform acts on internal states of a particle with
/// momentum `p`.
pub trait InternalAction {
    fn maps(&self, g: &PoincareTransform, p: &MassiveMomentum) -> Result<RepPair>;
}

/// Every element acts as the identity.
#[derive(Clone, Copy, Debug)]
pub struct TrivialAction {
    pub dim: usize,
}

impl InternalAction for TrivialAction {
    fn maps(&self, _: &PoincareTransform, _: &MassiveMomentum) -> Result<RepPair> {
        Ok(RepPair::identity(self.dim + 1))
    }
}

/// Ball internals of dimension `n` rotated by the Wigner rotation
/// `Λ_{p_rest}(Λp)⁻¹ Λ Λ_{p_rest}(p)`.
#[derive(Clone, Copy, Debug)]
pub struct WignerAction;

impl InternalAction for WignerAction {
    fn maps(&self, g: &PoincareTransform, p: &MassiveMomentum) -> Result<RepPair> {
        let w = minkowski::wigner_rotation(&g.lambda, p)?;
        RepPair::from_state(LinearMap::block(&w.spatial_block())?)
    }
}

/// The same pair for every element; used to build counterexamples.
#[derive(Clone, Debug)]
pub struct FixedAction(pub RepPair);

impl InternalAction for FixedAction {
    fn maps(&self, _: &PoincareTransform, _: &MassiveMomentum) -> Result<RepPair> {
        Ok(self.0.clone())
    }
}

/// Toy lattice model on `1 + 1` dimensions: the translation
/// `T_k(t, x) = (t, x + k b)` acts on polygon internals as `R(kθ)`.
/// Undefined for transforms that are not such a translation.
#[derive(Clone, Copy, Debug)]
pub struct ToyTranslationAction {
    pub polygon: usize,
    pub spacing: f64,
}

impl ToyTranslationAction {
    pub fn step(&self, g: &PoincareTransform, tol: f64) -> Result<i64> {
        if g.n() != 1
            || !g.lambda.max_abs_diff(&LorentzMatrix::identity(1)).le(&tol)
            || g.a.time().abs() > tol
        {
            return Err(GptError::Domain("not a lattice translation".into()));
        }
        let k = g.a.entries()[1] / self.spacing;
        if (k - k.round()).abs() > tol {
            return Err(GptError::Domain(format!("translation by {k} lattice units")));
        }
        Ok(k.round() as i64)
    }
}

impl InternalAction for ToyTranslationAction {
    fn maps(&self, g: &PoincareTransform, _: &MassiveMomentum) -> Result<RepPair> {
        let k = self.step(g, 1e-9)?;
        RepPair::from_state(zoo::polygon_rotation(self.polygon, k)?)
    }
}

/// `(Λp, R^st_p(P) ζ)`.
pub fn transform_classical(
    g: &PoincareTransform,
    z: &ClassicalMomentumState,
    action: &dyn InternalAction,
) -> Result<ClassicalMomentumState> {
    let pair = action.maps(g, &z.p)?;
    Ok(ClassicalMomentumState {
        p: z.p.transformed(&g.lambda)?,
        internal: pair.state.apply(&z.internal)?,
    })
}

/// `(Λp, R^ef_p(P) ε)`.
pub fn transform_classical_effect(
    g: &PoincareTransform,
    e: &ClassicalMomentumEffect,
    action: &dyn InternalAction,
) -> Result<ClassicalMomentumEffect> {
    let pair = action.maps(g, &e.p_label)?;
    Ok(ClassicalMomentumEffect {
        p_label: e.p_label.transformed(&g.lambda)?,
        internal: pair.effect.apply(&e.internal)?,
    })
}

/// Largest `|Ê′[Z′] − Ê[Z]|` over the pairs after transforming both sides.
pub fn invariance_deviation(
    pairs: &[(ClassicalMomentumEffect, ClassicalMomentumState)],
    g: &PoincareTransform,
    action: &dyn InternalAction,
    p_tol: f64,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (e, z) in pairs {
        let before = classical_pairing(e, z, p_tol)?;
        let after = classical_pairing(
            &transform_classical_effect(g, e, action)?,
            &transform_classical(g, z, action)?,
            p_tol,
        )?;
        worst = worst.max((after - before).abs());
    }
    Ok(worst)
}

pub fn check_invariance(
    pairs: &[(ClassicalMomentumEffect, ClassicalMomentumState)],
    g: &PoincareTransform,
    action: &dyn InternalAction,
    tol: f64,
) -> Result<bool> {
    Ok(invariance_deviation(pairs, g, action, DEFAULT_P_TOL)? <= tol)
}

/// An abstract group: identity and composition.
pub trait Group {
    type Element: Clone + Debug;
    fn identity(&self) -> Self::Element;
    /// `g2 ∘ g1`.
    fn compose(&self, g2: &Self::Element, g1: &Self::Element) -> Self::Element;
}

/// Lattice translations `T_k`, `k ∈ Z`, composing by `k₁ + k₂`.
#[derive(Clone, Copy, Debug)]
pub struct LatticeTranslations {
    pub spacing: f64,
}

impl LatticeTranslations {
    /// `T_k` as a Poincaré transform of `1 + 1` dimensional spacetime.
    pub fn realize(&self, k: i64) -> PoincareTransform {
        PoincareTransform::translation(
            SpacetimeVector::new(vec![0.0, k as f64 * self.spacing]).expect("finite"),
        )
    }
}

impl Group for LatticeTranslations {
    type Element = i64;
    fn identity(&self) -> i64 {
        0
    }
    fn compose(&self, g2: &i64, g1: &i64) -> i64 {
        g2 + g1
    }
}

/// SO(n), elements stored as `block(1, O)` Lorentz matrices.
#[derive(Clone, Copy, Debug)]
pub struct Rotations {
    pub n: usize,
}

impl Group for Rotations {
    type Element = LorentzMatrix;
    fn identity(&self) -> LorentzMatrix {
        LorentzMatrix::identity(self.n)
    }
    fn compose(&self, g2: &LorentzMatrix, g1: &LorentzMatrix) -> LorentzMatrix {
        g2.compose(g1).expect("same size")
    }
}

pub trait Representation<G: Group> {
    fn pair(&self, g: &G::Element) -> Result<RepPair>;
}

/// A finite list of sampled elements of a group.
#[derive(Clone, Debug)]
pub struct GroupSample<G: Group> {
    pub group: G,
    pub elements: Vec<G::Element>,
}

impl GroupSample<Rotations> {
    pub fn seeded(n: usize, count: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let elements = (0..count)
            .map(|_| minkowski::random_rotation_lorentz(n, &mut rng))
            .collect();
        Self { group: Rotations { n }, elements }
    }
}

/// `T_k ↦ R((k + offset)θ)` on the `N`-gon. `offset = 0` is the
/// representation; any other offset breaks the homomorphism property.
#[derive(Clone, Copy, Debug)]
pub struct PolygonTranslationRep {
    pub polygon: usize,
    pub offset: i64,
}

impl Representation<LatticeTranslations> for PolygonTranslationRep {
    fn pair(&self, k: &i64) -> Result<RepPair> {
        RepPair::from_state(zoo::polygon_rotation(self.polygon, k + self.offset)?)
    }
}

/// `O ↦ block(1, O)` on ball internals of dimension `n`.
#[derive(Clone, Copy, Debug)]
pub struct FundamentalRep;

impl Representation<Rotations> for FundamentalRep {
    fn pair(&self, g: &LorentzMatrix) -> Result<RepPair> {
        RepPair::from_state(LinearMap::block(&g.spatial_block())?)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TrivialRep {
    pub dim: usize,
}

impl<G: Group> Representation<G> for TrivialRep {
    fn pair(&self, _: &G::Element) -> Result<RepPair> {
        Ok(RepPair::identity(self.dim + 1))
    }
}

/// Checks `R(g₂)R(g₁) = R(g₂∘g₁)` for all sampled pairs (state and effect
/// maps) and `R(e) = I`; reports the worst deviation and whether every map
/// was the identity.
pub fn check_representation<G: Group, R: Representation<G>>(
    sample: &GroupSample<G>,
    rep: &R,
    tol: f64,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new(
        "representation",
        "R(g2)R(g1) = R(g2 g1) and R(e) = I on sampled elements",
    );
    let e = rep.pair(&sample.group.identity())?;
    report.record(e.state.max_abs_diff(&LinearMap::identity(e.state.size())));
    report.record(e.effect.max_abs_diff(&LinearMap::identity(e.effect.size())));
    let maps: Vec<RepPair> = sample.elements.iter().map(|g| rep.pair(g)).collect::<Result<_>>()?;
    let mut trivial = true;
    for (g2, r2) in sample.elements.iter().zip(&maps) {
        trivial &= r2.state.is_identity(tol) && r2.effect.is_identity(tol);
        for (g1, r1) in sample.elements.iter().zip(&maps) {
            let composed = rep.pair(&sample.group.compose(g2, g1))?;
            let ds = r2.state.compose(&r1.state)?.max_abs_diff(&composed.state);
            let de = r2.effect.compose(&r1.effect)?.max_abs_diff(&composed.effect);
            report.record(ds.max(de));
        }
    }
    let mut report = report.finish(tol);
    report.trivial = Some(trivial);
    Ok(report)
}

/// Detector weights and outcome distributions before and after a rotation.
#[derive(Clone, Debug, Serialize)]
pub struct DetectorOutcome {
    pub weights: Vec<f64>,
    pub before: Vec<f64>,
    pub after: Vec<f64>,
    /// `max_i |P′(i) − P(i)|`.
    pub max_shift: f64,
    /// `|Σ_i P(i) − 1|`.
    pub total_defect: f64,
}

/// Detector effects `ε_i = w_i ½(1, v̂_i)` with minimum-norm weights solving
/// `Σ ε_i = u`. Fails if that system has residual above `1e-9` or a weight
/// falls outside `[0, 1]`.
pub fn detector_effects(detectors: &[[f64; 3]], tol: f64) -> Result<(Vec<f64>, Vec<GptVector>)> {
    let n = detectors.len();
    if n == 0 {
        return Err(GptError::param("no detectors"));
    }
    for d in detectors {
        let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > tol {
            return Err(GptError::Domain(format!("detector direction has norm {norm}")));
        }
    }
    let a = DMatrix::from_fn(4, n, |r, c| if r == 0 { 0.5 } else { 0.5 * detectors[c][r - 1] });
    let b = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
    let pinv = a
        .clone()
        .pseudo_inverse(1e-12)
        .map_err(|e| GptError::Internal(e.to_string()))?;
    let w = pinv * &b;
    let residual = (&a * &w - &b).amax();
    if residual > 1e-9 {
        return Err(GptError::Domain(format!(
            "detector effects cannot sum to the unit effect (residual {residual:.3e})"
        )));
    }
    if w.iter().any(|&x| x < -tol || x > 1.0 + tol) {
        return Err(GptError::Domain("detector weights leave [0, 1]".into()));
    }
    let effects = detectors
        .iter()
        .zip(w.iter())
        .map(|(d, &wi)| GptVector::new(vec![0.5 * wi, 0.5 * wi * d[0], 0.5 * wi * d[1], 0.5 * wi * d[2]]))
        .collect::<Result<Vec<_>>>()?;
    Ok((w.as_slice().to_vec(), effects))
}

/// Outcome distribution of a ball-(3) state on a set of detectors, computed
/// in the original frame and again after rotating both the state and the
/// detector effects by `o`.
pub fn detector_sphere_experiment(
    z: &GptVector,
    detectors: &[[f64; 3]],
    o: &DMatrix<f64>,
    tol: f64,
) -> Result<DetectorOutcome> {
    GptError::check_len(4, z.len())?;
    if !ConvexSet::ball(3).contains(z, tol)? {
        return Err(GptError::Domain("not a ball state".into()));
    }
    let (weights, effects) = detector_effects(detectors, tol)?;
    let pair = RepPair::from_state(LinearMap::block(o)?)?;
    let z2 = pair.state.apply(z)?;
    let mut before = Vec::with_capacity(effects.len());
    let mut after = Vec::with_capacity(effects.len());
    for e in &effects {
        before.push(e.dot(z)?);
        after.push(pair.effect.apply(e)?.dot(&z2)?);
    }
    let max_shift = before.iter().zip(&after).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let total_defect = (before.iter().sum::<f64>() - 1.0).abs();
    Ok(DetectorOutcome { weights, before, after, max_shift, total_defect })
}

/// The six detectors `±e_x, ±e_y, ±e_z`, in that order.
pub fn axis_detectors() -> Vec<[f64; 3]> {
    vec![
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
    ]
}

#[derive(Clone, Debug, Serialize)]
pub struct ToySpacetimeReport {
    pub polygon: usize,
    pub k: i64,
    /// Rotation angle assigned to `T_k`, in `[0, 2π)`.
    pub angle: f64,
    /// `perm[i] = j` when `R(kθ) ζ_i = ζ_j`.
    pub permutation: Vec<usize>,
    pub homomorphism: VerificationReport,
    pub invariance: VerificationReport,
    pub nontrivial: bool,
    pub pass: bool,
}

/// Assigns `R(kθ)` to the lattice translation `T_k` and verifies the
/// homomorphism property over `k₁, k₂ ∈ 0..N` plus invariance of every
/// effect/state pairing of the polygon theory under every `T_k`.
pub fn toy_discrete_spacetime(n: usize, k: i64, tol: f64) -> Result<ToySpacetimeReport> {
    let states = zoo::polygon_states(n)?;
    let theory = zoo::polygon_theory(n)?;
    let rk = zoo::polygon_rotation(n, k)?;
    let mut permutation = Vec::with_capacity(n);
    for z in &states {
        let image = rk.apply(z)?;
        let j = states
            .iter()
            .position(|w| w.max_abs_diff(&image).map(|d| d <= tol).unwrap_or(false))
            .ok_or_else(|| GptError::Internal("rotation does not permute the vertices".into()))?;
        permutation.push(j);
    }

    let lattice = LatticeTranslations { spacing: 1.0 };
    let sample = GroupSample { group: lattice, elements: (0..n as i64).collect() };
    let rep = PolygonTranslationRep { polygon: n, offset: 0 };
    let mut homomorphism = check_representation(&sample, &rep, tol)?;
    homomorphism.check = "toy-homomorphism".into();
    homomorphism.anchor = "k -> R(k theta) respects T_k1 T_k2 = T_(k1+k2)".into();
    let nontrivial = !homomorphism.trivial.unwrap_or(true);

    let action = ToyTranslationAction { polygon: n, spacing: lattice.spacing };
    let rest = MassiveMomentum::at_rest(1.0, 1)?;
    let effects = theory.effect_generators().expect("polygon effects").to_vec();
    let mut pairs = Vec::new();
    for e in &effects {
        for z in &states {
            pairs.push((
                ClassicalMomentumEffect::new(rest.clone(), e.clone(), &theory, tol)?,
                ClassicalMomentumState::new(rest.clone(), z.clone(), &theory, tol)?,
            ));
        }
    }
    let mut invariance = VerificationReport::new(
        "toy-invariance",
        "outcome probabilities unchanged under every lattice translation",
    );
    for j in 0..n as i64 {
        invariance.record(invariance_deviation(&pairs, &lattice.realize(j), &action, DEFAULT_P_TOL)?);
    }
    let invariance = invariance.finish(tol);
    let angle = 2.0 * PI * (k.rem_euclid(n as i64)) as f64 / n as f64;
    let pass = homomorphism.pass && invariance.pass && nontrivial;
    Ok(ToySpacetimeReport {
        polygon: n,
        k,
        angle,
        permutation,
        homomorphism,
        invariance,
        nontrivial,
        pass,
    })
}

/// Internal map `block(1, W̃)` induced on ball-(n) internals by the
/// little-group element built from `(a, x, Λ, p)`.
pub fn induced_internal_map(
    a: &SpacetimeVector,
    x: &SpacetimeVector,
    lambda: &LorentzMatrix,
    p: &MassiveMomentum,
    tol: f64,
) -> Result<LinearMap> {
    let g = minkowski::little_group_element(a, x, lambda, p, tol)?;
    LinearMap::block(&g.lambda.spatial_block())
}

/// Orbit of the pure ball state `(1, r)` under sampled SO(n): purity of the
/// orbit, membership and impurity of mixtures of orbit points, transitivity
/// via rotations built from `e₁`, and the effect orbit `½ O ζ`.
pub fn orbit_ball_reconstruction(
    n: usize,
    r: &[f64],
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<Vec<VerificationReport>> {
    if n < 2 {
        return Err(GptError::param("orbit reconstruction needs n >= 2"));
    }
    GptError::check_len(n, r.len())?;
    let theory = zoo::euclidean_ball(n)?;
    let seed_state = GptVector::from_spatial(r)?;
    if !theory.states.is_pure(&seed_state, tol)? {
        return Err(GptError::Domain("seed state must be pure".into()));
    }
    let sample = GroupSample::seeded(n, samples, seed);
    let rvec = DVector::from_column_slice(r);

    let mut purity = VerificationReport::new("orbit-purity", "rotated pure states stay on the sphere");
    let mut mixtures = VerificationReport::new("orbit-mixtures", "mixtures of orbit points are mixed members");
    let mut transit = VerificationReport::new("orbit-transitivity", "a rotation maps the seed to every orbit point");
    let mut effects = VerificationReport::new("effect-orbit", "rotated extremal effects stay normalized and extremal");
    let mut distinguish = VerificationReport::new("antipodal-distinguishability", "e_i(z_j) = delta_ij for antipodal pairs");

    let mut orbit = Vec::with_capacity(samples);
    for g in &sample.elements {
        let m = LinearMap::block(&g.spatial_block())?;
        let z = m.apply(&seed_state)?;
        purity.record((z.spatial_norm() - 1.0).abs());
        orbit.push(z.clone());

        // rotation_to_axis(q) · rotation_to_axis(r)⁻¹ takes r to q
        let to_q = minkowski::rotation_to_axis(z.spatial(), tol.max(1e-9))?;
        let to_r = minkowski::rotation_to_axis(r, tol.max(1e-9))?;
        let t = to_q.compose(&to_r.inverse())?.spatial_block();
        let q = DVector::from_column_slice(z.spatial());
        transit.record((t * &rvec - q).amax());

        let e = m.apply(&GptVector::new(
            std::iter::once(0.5).chain(r.iter().map(|x| 0.5 * x)).collect(),
        )?)?;
        let normalized = theory.is_normalized_effect(&e, tol)?;
        let extremal = (e.entries()[0] - 0.5).abs() + (e.spatial_norm() - 0.5).abs();
        effects.record(if normalized { extremal } else { 1.0 });

        let anti = GptVector::from_spatial(&z.spatial().iter().map(|x| -x).collect::<Vec<_>>())?;
        let pair = [z.clone(), anti];
        for i in 0..2 {
            let ei = pair[i].scale(0.5)?;
            for (j, zj) in pair.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                distinguish.record((ei.dot(zj)? - target).abs());
            }
        }
    }
    for w in orbit.windows(2) {
        let mix = crate::gpt::convex_mix(&[(0.5, w[0].clone()), (0.5, w[1].clone())], tol)?;
        let member = theory.states.contains(&mix, tol)?;
        let distinct = w[0].max_abs_diff(&w[1])? > 1e-6;
        let mixed = !theory.states.is_pure(&mix, tol).unwrap_or(true);
        mixtures.record_bool(member && (mixed || !distinct));
    }
    Ok(vec![
        purity.finish(tol),
        mixtures.finish(0.0),
        transit.finish(tol),
        effects.finish(tol),
        distinguish.finish(tol),
    ])
}

/// Seeded `(effect, state, rotation)` triples on ball-(n) internals at the
/// rest momentum, checked with the Wigner action.
pub fn ball_invariance_suite(n: usize, triples: usize, seed: u64, tol: f64) -> Result<VerificationReport> {
    let theory = zoo::euclidean_ball(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rest = MassiveMomentum::at_rest(1.0, n)?;
    let mut report = VerificationReport::new(
        format!("ball-invariance-n{n}"),
        "E'[Z'] = E[Z] under rotations with the fundamental action",
    );
    for _ in 0..triples {
        let z = GptVector::from_spatial(rotation::random_ball_point(n, &mut rng).as_slice())?;
        let v = rotation::random_unit_vector(n, &mut rng);
        let e = zoo::ball_effect(v.as_slice(), 1e-12)?;
        let o = minkowski::random_rotation_lorentz(n, &mut rng);
        let pair = (
            ClassicalMomentumEffect::new(rest.clone(), e, &theory, tol)?,
            ClassicalMomentumState::new(rest.clone(), z, &theory, tol)?,
        );
        report.record(invariance_deviation(
            &[pair],
            &PoincareTransform::lorentz(o),
            &WignerAction,
            DEFAULT_P_TOL,
        )?);
    }
    Ok(report.finish(tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ball_pair(theory: &TheorySpec, v: &[f64], z: &[f64]) -> (ClassicalMomentumEffect, ClassicalMomentumState) {
        let rest = MassiveMomentum::at_rest(1.0, theory.dim).unwrap();
        (
            ClassicalMomentumEffect::new(rest.clone(), zoo::ball_effect(v, 1e-12).unwrap(), theory, 1e-9).unwrap(),
            ClassicalMomentumState::new(rest, GptVector::from_spatial(z).unwrap(), theory, 1e-9).unwrap(),
        )
    }

    #[test]
    fn pairing_is_kronecker_in_momentum() {
        let bit = zoo::classical_simplex(1).unwrap();
        let p = MassiveMomentum::from_spatial(1.0, &[0.5, 0.0, 0.0]).unwrap();
        let q = MassiveMomentum::from_spatial(1.0, &[0.5, 0.1, 0.0]).unwrap();
        let z = ClassicalMomentumState::new(p.clone(), GptVector::new(vec![1.0, -1.0]).unwrap(), &bit, 1e-9).unwrap();
        let e0 = ClassicalMomentumEffect::new(p.clone(), GptVector::new(vec![0.5, -0.5]).unwrap(), &bit, 1e-9).unwrap();
        assert_eq!(classical_pairing(&e0, &z, DEFAULT_P_TOL).unwrap(), 1.0);
        let u = ClassicalMomentumEffect::new(p, GptVector::unit(1), &bit, 1e-9).unwrap();
        assert_eq!(classical_pairing(&u, &z, DEFAULT_P_TOL).unwrap(), 1.0);
        let other = ClassicalMomentumEffect::new(q, GptVector::unit(1), &bit, 1e-9).unwrap();
        assert_eq!(classical_pairing(&other, &z, DEFAULT_P_TOL).unwrap(), 0.0);
    }

    #[test]
    fn invalid_internals_rejected() {
        let bit = zoo::classical_simplex(1).unwrap();
        let p = MassiveMomentum::at_rest(1.0, 3).unwrap();
        assert!(ClassicalMomentumState::new(p.clone(), GptVector::new(vec![1.0, 2.0]).unwrap(), &bit, 1e-9).is_err());
        assert!(ClassicalMomentumEffect::new(p, GptVector::new(vec![1.0, 1.0]).unwrap(), &bit, 1e-9).is_err());
    }

    #[test]
    fn rotation_moves_momentum_and_internal_state() {
        let ball = zoo::euclidean_ball(3).unwrap();
        let p = MassiveMomentum::from_spatial(1.0, &[0.3, 0.0, 0.0]).unwrap();
        let o = rotation::plane_rotation(3, 0, 1, 0.8);
        let g = PoincareTransform::lorentz(LorentzMatrix::rotation(&o).unwrap());
        let z = ClassicalMomentumState::new(p.clone(), GptVector::from_spatial(&[0.0, 0.6, 0.0]).unwrap(), &ball, 1e-9).unwrap();
        let z2 = transform_classical(&g, &z, &WignerAction).unwrap();
        assert!(z2.p.p.max_abs_diff(&p.transformed(&g.lambda).unwrap().p) < 1e-15);
        let expected = &o * DVector::from_vec(vec![0.0, 0.6, 0.0]);
        assert!((DVector::from_column_slice(z2.internal.spatial()) - expected).amax() < 1e-12);
        let id = transform_classical(&PoincareTransform::identity(3), &z, &WignerAction).unwrap();
        assert!(id.internal.max_abs_diff(&z.internal).unwrap() < 1e-15);
    }

    #[test]
    fn translations_leave_everything_fixed() {
        let ball = zoo::euclidean_ball(3).unwrap();
        let p = MassiveMomentum::from_spatial(1.0, &[0.3, -0.2, 0.1]).unwrap();
        let z = ClassicalMomentumState::new(p, GptVector::from_spatial(&[0.1, 0.2, 0.3]).unwrap(), &ball, 1e-9).unwrap();
        let t = PoincareTransform::translation(SpacetimeVector::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap());
        let z2 = transform_classical(&t, &z, &TrivialAction { dim: 3 }).unwrap();
        assert_eq!(z2, z);
    }

    #[test]
    fn shear_with_mismatched_effect_map_breaks_invariance() {
        let ball = zoo::euclidean_ball(2).unwrap();
        let shear = LinearMap::from_rows(vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.4],
            vec![0.0, 0.0, 1.0],
        ])
        .unwrap();
        let pairs = vec![ball_pair(&ball, &[0.0, 1.0], &[0.0, 0.9]), ball_pair(&ball, &[1.0, 0.0], &[0.5, 0.5])];
        let g = PoincareTransform::identity(2);
        let good = FixedAction(RepPair::from_state(shear.clone()).unwrap());
        assert!(check_invariance(&pairs, &g, &good, 1e-12).unwrap());
        let bad = FixedAction(RepPair { state: shear.clone(), effect: shear });
        assert!(!check_invariance(&pairs, &g, &bad, 1e-6).unwrap());
    }

    #[test]
    fn representation_checks() {
        let lattice = LatticeTranslations { spacing: 1.0 };
        let sample = GroupSample { group: lattice, elements: (0..7).collect() };
        let good = check_representation(&sample, &PolygonTranslationRep { polygon: 7, offset: 0 }, 1e-12).unwrap();
        assert!(good.pass && good.trivial == Some(false));
        let bad = check_representation(&sample, &PolygonTranslationRep { polygon: 7, offset: 1 }, 1e-9).unwrap();
        assert!(!bad.pass);
        let triv = check_representation(&sample, &TrivialRep { dim: 2 }, 1e-12).unwrap();
        assert!(triv.pass && triv.trivial == Some(true));
        let rot = GroupSample::seeded(3, 10, 1);
        let fund = check_representation(&rot, &FundamentalRep, 1e-12).unwrap();
        assert!(fund.pass && fund.trivial == Some(false));
    }

    #[test]
    fn toy_action_rejects_non_lattice_transforms() {
        let act = ToyTranslationAction { polygon: 5, spacing: 1.0 };
        let rest = MassiveMomentum::at_rest(1.0, 1).unwrap();
        let half = PoincareTransform::translation(SpacetimeVector::new(vec![0.0, 0.5]).unwrap());
        assert!(act.maps(&half, &rest).is_err());
        let timeshift = PoincareTransform::translation(SpacetimeVector::new(vec![1.0, 1.0]).unwrap());
        assert!(act.maps(&timeshift, &rest).is_err());
    }

    #[test]
    fn detectors() {
        let anti = [[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]];
        let z = GptVector::from_spatial(&[0.0, 0.0, 1.0]).unwrap();
        let out = detector_sphere_experiment(&z, &anti, &DMatrix::identity(3, 3), 1e-9).unwrap();
        assert!((out.before[0] - 1.0).abs() < 1e-15 && out.before[1].abs() < 1e-15);

        let o = rotation::plane_rotation(3, 0, 2, 1.1);
        let out = detector_sphere_experiment(&z, &axis_detectors(), &o, 1e-9).unwrap();
        for w in &out.weights {
            assert!((w - 1.0 / 3.0).abs() < 1e-12);
        }
        let expected = [1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0, 0.0];
        for (p, q) in out.before.iter().zip(expected) {
            assert!((p - q).abs() < 1e-12);
        }
        assert!(out.max_shift < 1e-12 && out.total_defect < 1e-12);

        let lopsided = [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]];
        assert!(detector_effects(&lopsided, 1e-9).is_err());
    }

    #[test]
    fn toy_spacetime_five_two() {
        let r = toy_discrete_spacetime(5, 2, 1e-12).unwrap();
        assert_eq!(r.permutation, vec![2, 3, 4, 0, 1]);
        assert!((r.angle - 4.0 * PI / 5.0).abs() < 1e-15);
        assert!(r.pass && r.nontrivial);
        let full = toy_discrete_spacetime(5, 5, 1e-12).unwrap();
        assert_eq!(full.permutation, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn orbit_reports_pass() {
        let reports = orbit_ball_reconstruction(3, &[0.0, 0.0, 1.0], 50, 9, 1e-10).unwrap();
        for r in reports {
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn ball_invariance_small() {
        for n in 2..=4 {
            assert!(ball_invariance_suite(n, 20, 4, 1e-10).unwrap().pass);
        }
    }
}
