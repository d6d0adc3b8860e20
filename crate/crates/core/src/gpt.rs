//! States, effects, transformations and the probability pairing of a
//! finite-dimensional generalized probabilistic theory.
//!
//! Every vector lives in `R^{d+1}`; coordinate 0 carries normalization, so a
//! state is `(1, ζ̃)` and the unit effect is `u = (1, 0, …, 0)`.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{GptError, Result};
use crate::lp::{LpOutcome, LpProblem, Relation, Sense, VarDomain};
use crate::rotation;

/// Default absolute tolerance for geometric predicates.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Number of deterministic sphere points used when checking ball maps.
pub const BALL_MAP_SAMPLES: usize = 100;

#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct GptVector(Vec<f64>);

impl GptVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(GptError::param("a GPT vector needs at least one entry"));
        }
        if let Some(i) = entries.iter().position(|x| !x.is_finite()) {
            return Err(GptError::NonFinite(i));
        }
        Ok(Self(entries))
    }

    /// A vector in the state role: the first entry must be exactly 1.
    pub fn state(entries: Vec<f64>) -> Result<Self> {
        let v = Self::new(entries)?;
        if v.0[0] != 1.0 {
            return Err(GptError::NotNormalized(v.0[0]));
        }
        Ok(v)
    }

    /// The state `(1, spatial)`.
    pub fn from_spatial(spatial: &[f64]) -> Result<Self> {
        let mut entries = Vec::with_capacity(spatial.len() + 1);
        entries.push(1.0);
        entries.extend_from_slice(spatial);
        Self::new(entries)
    }

    /// `u = (1, 0, …, 0)` in `R^{d+1}`.
    pub fn unit(d: usize) -> Self {
        let mut e = vec![0.0; d + 1];
        e[0] = 1.0;
        Self(e)
    }

    /// The zero effect `ε_0`.
    pub fn zero(d: usize) -> Self {
        Self(vec![0.0; d + 1])
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<f64> {
        self.0
    }

    /// The Bloch-like part `ζ̃` (entries 1..).
    pub fn spatial(&self) -> &[f64] {
        &self.0[1..]
    }

    pub fn spatial_norm(&self) -> f64 {
        self.spatial().iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn to_dvector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.0)
    }

    pub fn from_dvector(v: &DVector<f64>) -> Result<Self> {
        Self::new(v.as_slice().to_vec())
    }

    pub fn dot(&self, other: &Self) -> Result<f64> {
        GptError::check_len(self.len(), other.len())?;
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum())
    }

    pub fn scale(&self, s: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|x| x * s).collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        GptError::check_len(self.len(), other.len())?;
        Self::new(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        GptError::check_len(self.len(), other.len())?;
        Self::new(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// `u − self`, the complementary effect.
    pub fn complement(&self) -> Self {
        let mut e: Vec<f64> = self.0.iter().map(|x| -x).collect();
        e[0] += 1.0;
        Self(e)
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        GptError::check_len(self.len(), other.len())?;
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

impl TryFrom<Vec<f64>> for GptVector {
    type Error = GptError;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<GptVector> for Vec<f64> {
    fn from(v: GptVector) -> Self {
        v.0
    }
}

impl fmt::Debug for GptVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GptVector{:?}", self.0)
    }
}

/// `ε · ζ`. The value is never clamped.
pub fn probability(effect: &GptVector, state: &GptVector) -> Result<f64> {
    effect.dot(state)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallDescriptor {
    pub dimension: usize,
    pub radius: f64,
}

impl BallDescriptor {
    pub fn unit(dimension: usize) -> Self {
        Self { dimension, radius: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConvexSet {
    Polytope { vertices: Vec<GptVector> },
    Ball(BallDescriptor),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MembershipReport {
    pub member: bool,
    /// `Some` when the boundary question was decided.
    pub boundary: Option<bool>,
    /// L1 distance to the set found by the membership LP (polytopes) or the
    /// radial excess `‖ṽ‖ − 1` clipped at zero (balls).
    pub residual: f64,
    /// Convex weights over the vertices, for polytope members.
    pub weights: Option<Vec<f64>>,
}

impl ConvexSet {
    pub fn polytope(vertices: Vec<GptVector>) -> Result<Self> {
        let set = ConvexSet::Polytope { vertices };
        set.check()?;
        Ok(set)
    }

    pub fn ball(d: usize) -> Self {
        ConvexSet::Ball(BallDescriptor::unit(d))
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexSet::Polytope { vertices } => vertices[0].dim(),
            ConvexSet::Ball(b) => b.dimension,
        }
    }

    pub fn vertices(&self) -> Option<&[GptVector]> {
        match self {
            ConvexSet::Polytope { vertices } => Some(vertices),
            ConvexSet::Ball(_) => None,
        }
    }

    fn check(&self) -> Result<()> {
        match self {
            ConvexSet::Polytope { vertices } => {
                let first = vertices
                    .first()
                    .ok_or_else(|| GptError::param("polytope needs at least one vertex"))?;
                for v in vertices {
                    GptError::check_len(first.len(), v.len())?;
                    if v.entries()[0] != 1.0 {
                        return Err(GptError::NotNormalized(v.entries()[0]));
                    }
                }
                Ok(())
            }
            ConvexSet::Ball(b) => {
                if b.radius != 1.0 {
                    return Err(GptError::param("only the unit ball is supported"));
                }
                Ok(())
            }
        }
    }

    /// Membership of `v` (any first entry) within `tol`.
    pub fn validate(&self, v: &GptVector, tol: f64) -> Result<MembershipReport> {
        GptError::check_len(self.dim() + 1, v.len())?;
        match self {
            ConvexSet::Ball(_) => {
                let norm = v.spatial_norm();
                let normalized = (v.entries()[0] - 1.0).abs() <= tol;
                let excess = (norm - 1.0).max(0.0);
                let member = normalized && norm <= 1.0 + tol;
                Ok(MembershipReport {
                    member,
                    boundary: Some(member && (norm - 1.0).abs() <= tol),
                    residual: excess + (v.entries()[0] - 1.0).abs(),
                    weights: None,
                })
            }
            ConvexSet::Polytope { vertices } => polytope_membership(vertices, v, tol),
        }
    }

    pub fn contains(&self, v: &GptVector, tol: f64) -> Result<bool> {
        Ok(self.validate(v, tol)?.member)
    }

    /// Whether `v` is an extreme point. Errors if `v` is not a member.
    pub fn is_pure(&self, v: &GptVector, tol: f64) -> Result<bool> {
        if !self.validate(v, tol)?.member {
            return Err(GptError::Domain("vector is not in the state space".into()));
        }
        Ok(match self {
            ConvexSet::Ball(_) => (v.spatial_norm() - 1.0).abs() <= tol,
            ConvexSet::Polytope { vertices } => vertices
                .iter()
                .any(|w| w.max_abs_diff(v).map(|e| e <= tol).unwrap_or(false)),
        })
    }
}

/// Convex-hull membership by minimising the L1 residual
/// `‖Σ λ_k v_k − v‖₁` over the simplex `λ ≥ 0, Σ λ = 1`. A zero optimum is
/// membership; a positive optimum is the distance that was found.
///
/// Boundary status comes from a second LP pushing `v` away from the vertex
/// centroid: `v` is on the boundary when it cannot move outward at all.
fn polytope_membership(
    vertices: &[GptVector],
    v: &GptVector,
    tol: f64,
) -> Result<MembershipReport> {
    let k = vertices.len();
    let n = v.len();
    // variables: λ (k), r⁺ (n), r⁻ (n)
    let nv = k + 2 * n;
    let mut objective = vec![0.0; nv];
    for c in objective.iter_mut().skip(k) {
        *c = 1.0;
    }
    let mut lp = LpProblem::new(nv, VarDomain::NonNeg, Sense::Minimize).with_objective(objective);
    for row in 0..n {
        let mut coeffs = vec![0.0; nv];
        for (j, vert) in vertices.iter().enumerate() {
            coeffs[j] = vert.entries()[row];
        }
        coeffs[k + row] = 1.0;
        coeffs[k + n + row] = -1.0;
        lp.add(coeffs, Relation::Eq, v.entries()[row])?;
    }
    let mut sum = vec![0.0; nv];
    for c in sum.iter_mut().take(k) {
        *c = 1.0;
    }
    lp.add(sum, Relation::Eq, 1.0)?;
    let sol = lp
        .solve()?
        .optimal()
        .ok_or_else(|| GptError::Internal("membership LP must be bounded and feasible".into()))?;
    let residual = sol.value.max(0.0);
    let member = residual <= tol;
    let boundary = if member {
        Some(outward_slack(vertices, v)? <= tol)
    } else {
        Some(false)
    };
    Ok(MembershipReport {
        member,
        boundary,
        residual,
        weights: member.then(|| sol.x[..k].to_vec()),
    })
}

/// Largest `t ∈ [0, 1]` with `v + t (v − c)` still in the hull, `c` the
/// vertex centroid.
fn outward_slack(vertices: &[GptVector], v: &GptVector) -> Result<f64> {
    let k = vertices.len();
    let n = v.len();
    let mut centroid = vec![0.0; n];
    for vert in vertices {
        for (c, x) in centroid.iter_mut().zip(vert.entries()) {
            *c += x / k as f64;
        }
    }
    let dir: Vec<f64> = v.entries().iter().zip(&centroid).map(|(a, b)| a - b).collect();
    if dir.iter().all(|x| x.abs() < 1e-15) {
        return Ok(1.0);
    }
    // variables: λ (k), t
    let mut objective = vec![0.0; k + 1];
    objective[k] = 1.0;
    let mut lp = LpProblem::new(k + 1, VarDomain::NonNeg, Sense::Maximize).with_objective(objective);
    for row in 0..n {
        let mut coeffs = vec![0.0; k + 1];
        for (j, vert) in vertices.iter().enumerate() {
            coeffs[j] = vert.entries()[row];
        }
        coeffs[k] = -dir[row];
        lp.add(coeffs, Relation::Eq, v.entries()[row])?;
    }
    let mut sum = vec![1.0; k + 1];
    sum[k] = 0.0;
    lp.add(sum, Relation::Eq, 1.0)?;
    let mut cap = vec![0.0; k + 1];
    cap[k] = 1.0;
    lp.add(cap, Relation::Le, 1.0)?;
    match lp.solve()? {
        LpOutcome::Optimal(s) => Ok(s.value),
        _ => Ok(0.0),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EffectSpace {
    /// Convex hull of the listed effects (which include `u` and `ε_0`).
    PolytopeHull { generators: Vec<GptVector> },
    /// Hull of `ε_0`, `u` and `½(1, ṽ)` for unit `ṽ`.
    BallDual(BallDescriptor),
}

impl EffectSpace {
    pub fn generators(&self) -> Option<&[GptVector]> {
        match self {
            EffectSpace::PolytopeHull { generators } => Some(generators),
            EffectSpace::BallDual(_) => None,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            EffectSpace::PolytopeHull { generators } => generators[0].dim(),
            EffectSpace::BallDual(b) => b.dimension,
        }
    }
}

/// Whether the theory's effect set is every normalized effect or a strict
/// subset of them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EffectConvention {
    AllNormalized,
    Restricted,
}

#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct LinearMap(DMatrix<f64>);

impl LinearMap {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(GptError::param("transformation matrix must be square"));
        }
        if let Some(i) = m.iter().position(|x| !x.is_finite()) {
            return Err(GptError::NonFinite(i));
        }
        Ok(Self(m))
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        for r in &rows {
            GptError::check_len(n, r.len())?;
        }
        let flat: Vec<f64> = rows.into_iter().flatten().collect();
        Self::new(DMatrix::from_row_slice(n, n, &flat))
    }

    pub fn identity(size: usize) -> Self {
        Self(DMatrix::identity(size, size))
    }

    /// `block(1, m̃)`: acts as `m̃` on `ζ̃` and fixes normalization.
    pub fn block(spatial: &DMatrix<f64>) -> Result<Self> {
        let n = spatial.nrows();
        let mut m = DMatrix::identity(n + 1, n + 1);
        m.view_mut((1, 1), (n, n)).copy_from(spatial);
        Self::new(m)
    }

    pub fn size(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.0
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }

    pub fn apply(&self, v: &GptVector) -> Result<GptVector> {
        GptError::check_len(self.size(), v.len())?;
        GptVector::from_dvector(&(&self.0 * v.to_dvector()))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinearMap) -> Result<LinearMap> {
        GptError::check_len(self.size(), other.size())?;
        Ok(LinearMap(&self.0 * &other.0))
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }

    pub fn inverse(&self) -> Option<LinearMap> {
        self.0.clone().try_inverse().map(LinearMap)
    }

    pub fn transpose(&self) -> LinearMap {
        LinearMap(self.0.transpose())
    }

    /// `(M⁻¹)ᵀ`, the map that keeps every pairing `ε·ζ` fixed when states go
    /// through `M`.
    pub fn transpose_inverse(&self) -> Option<LinearMap> {
        self.inverse().map(|m| m.transpose())
    }

    pub fn max_abs_diff(&self, other: &LinearMap) -> f64 {
        if self.size() != other.size() {
            return f64::INFINITY;
        }
        (&self.0 - &other.0).amax()
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.max_abs_diff(&LinearMap::identity(self.size())) <= tol
    }
}

impl TryFrom<Vec<Vec<f64>>> for LinearMap {
    type Error = GptError;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(rows)
    }
}

impl From<LinearMap> for Vec<Vec<f64>> {
    fn from(m: LinearMap) -> Self {
        m.rows()
    }
}

impl fmt::Debug for LinearMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LinearMap{:?}", self.rows())
    }
}

pub fn apply_map(m: &LinearMap, v: &GptVector) -> Result<GptVector> {
    m.apply(v)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheorySpec {
    pub name: String,
    #[serde(rename = "d")]
    pub dim: usize,
    pub states: ConvexSet,
    pub effects: EffectSpace,
    pub reversibles: Vec<LinearMap>,
    pub effect_convention: EffectConvention,
}

impl TheorySpec {
    pub fn new(
        name: impl Into<String>,
        states: ConvexSet,
        effects: EffectSpace,
        reversibles: Vec<LinearMap>,
        effect_convention: EffectConvention,
    ) -> Result<Self> {
        let spec = TheorySpec {
            name: name.into(),
            dim: states.dim(),
            states,
            effects,
            reversibles,
            effect_convention,
        };
        spec.check()?;
        Ok(spec)
    }

    /// Structural consistency: matching dimensions, `u` and `ε_0` among the
    /// effect generators.
    pub fn check(&self) -> Result<()> {
        self.states.check()?;
        GptError::check_len(self.dim, self.states.dim())?;
        GptError::check_len(self.dim, self.effects.dim())?;
        if let EffectSpace::PolytopeHull { generators } = &self.effects {
            for g in generators {
                GptError::check_len(self.dim + 1, g.len())?;
            }
            let has = |t: &GptVector| generators.iter().any(|g| g == t);
            if !has(&self.unit()) || !has(&self.zero_effect()) {
                return Err(GptError::param(
                    "effect generators must include the unit and zero effects",
                ));
            }
        }
        for m in &self.reversibles {
            GptError::check_len(self.dim + 1, m.size())?;
        }
        Ok(())
    }

    pub fn unit(&self) -> GptVector {
        GptVector::unit(self.dim)
    }

    pub fn zero_effect(&self) -> GptVector {
        GptVector::zero(self.dim)
    }

    pub fn validate_state(&self, v: &GptVector, tol: f64) -> Result<MembershipReport> {
        self.states.validate(v, tol)
    }

    /// `0 − tol ≤ e·ζ ≤ 1 + tol` on the whole state space.
    pub fn is_normalized_effect(&self, e: &GptVector, tol: f64) -> Result<bool> {
        is_normalized_effect(&self.states, e, tol)
    }

    pub fn is_reversible(&self, m: &LinearMap, tol: f64) -> Result<bool> {
        is_reversible(&self.states, m, tol)
    }

    /// Extremal effects of the polytope hull, or `None` for a ball dual.
    pub fn effect_generators(&self) -> Option<&[GptVector]> {
        self.effects.generators()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: TheorySpec = serde_json::from_str(s)?;
        spec.check()?;
        Ok(spec)
    }
}

pub fn is_normalized_effect(states: &ConvexSet, e: &GptVector, tol: f64) -> Result<bool> {
    GptError::check_len(states.dim() + 1, e.len())?;
    match states {
        ConvexSet::Ball(_) => {
            let e0 = e.entries()[0];
            let r = e.spatial_norm();
            Ok(e0 - r >= -tol && e0 + r <= 1.0 + tol)
        }
        ConvexSet::Polytope { vertices } => {
            for z in vertices {
                let p = e.dot(z)?;
                if p < -tol || p > 1.0 + tol {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Whether `m` is an invertible map with `m` and `m⁻¹` both sending every
/// extreme state into the state space.
///
/// Balls are checked algebraically (first row and column `(1, 0, …, 0)`,
/// orthogonal spatial block) and on a deterministic set of sphere points.
pub fn is_reversible(states: &ConvexSet, m: &LinearMap, tol: f64) -> Result<bool> {
    GptError::check_len(states.dim() + 1, m.size())?;
    if m.determinant().abs() <= tol {
        return Ok(false);
    }
    let inv = match m.inverse() {
        Some(inv) => inv,
        None => return Ok(false),
    };
    match states {
        ConvexSet::Polytope { vertices } => {
            for map in [m, &inv] {
                for z in vertices {
                    if !states.contains(&map.apply(z)?, tol)? {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
        ConvexSet::Ball(b) => {
            let d = b.dimension;
            let a = m.matrix();
            let frame_ok = (a[(0, 0)] - 1.0).abs() <= tol
                && (1..=d).all(|i| a[(0, i)].abs() <= tol && a[(i, 0)].abs() <= tol);
            let spatial = a.view((1, 1), (d, d)).clone_owned();
            if !frame_ok || !rotation::is_orthogonal(&spatial, tol) {
                return Ok(false);
            }
            for p in rotation::sphere_points(d, BALL_MAP_SAMPLES) {
                let z = GptVector::from_spatial(p.as_slice())?;
                for map in [m, &inv] {
                    let image = map.apply(&z)?;
                    if !states.contains(&image, tol)? || !states.is_pure(&image, tol)? {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
    }
}

/// `Σ q_j ζ_j` for nonnegative weights summing to 1 within `tol`.
///
/// The normalization entry of the result is set to exactly 1.
pub fn convex_mix(weighted: &[(f64, GptVector)], tol: f64) -> Result<GptVector> {
    let first = weighted
        .first()
        .ok_or_else(|| GptError::param("empty mixture"))?;
    let n = first.1.len();
    let mut total = 0.0;
    let mut acc = vec![0.0; n];
    for (q, z) in weighted {
        if !q.is_finite() || *q < -tol {
            return Err(GptError::param(format!("negative mixture weight {q}")));
        }
        GptError::check_len(n, z.len())?;
        if (z.entries()[0] - 1.0).abs() > tol {
            return Err(GptError::NotNormalized(z.entries()[0]));
        }
        total += q;
        for (a, x) in acc.iter_mut().zip(z.entries()) {
            *a += q * x;
        }
    }
    if (total - 1.0).abs() > tol {
        return Err(GptError::param(format!("mixture weights sum to {total}")));
    }
    acc[0] = 1.0;
    GptVector::new(acc)
}
