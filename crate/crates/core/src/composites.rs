//! Bipartite systems: Kronecker products (A-major), the minimal and maximal
//! tensor products, separability by LP, no-signalling behaviours and the
//! CHSH functional.

use std::sync::Arc;

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{GptError, Result};
use crate::exact::{ExactFrame, ExactLocal};
use crate::gpt::{ConvexSet, EffectSpace, GptVector, TheorySpec};
use crate::lp::{FarkasCertificate, LpOutcome, LpProblem, Relation, Sense, VarDomain};
use crate::rotation;
use crate::scalar::{self, Scalar};

/// Default number of sphere points standing in for a ball's extreme states
/// or effects.
pub const DEFAULT_RESOLUTION: usize = 200;

/// `x ⊗ y` with entry `(i, j)` at `i·len(y) + j`.
pub fn tensor(x: &GptVector, y: &GptVector) -> GptVector {
    GptVector::new(scalar::kron(x.entries(), y.entries())).expect("finite")
}

#[derive(Clone, Debug)]
pub struct JointState {
    vector: Vec<f64>,
    local_a: Arc<TheorySpec>,
    local_b: Arc<TheorySpec>,
}

impl JointState {
    /// Checks length and `(u ⊗ u)·φ = 1` within `tol`.
    pub fn new(
        vector: Vec<f64>,
        local_a: Arc<TheorySpec>,
        local_b: Arc<TheorySpec>,
        tol: f64,
    ) -> Result<Self> {
        GptError::check_len((local_a.dim + 1) * (local_b.dim + 1), vector.len())?;
        if let Some(i) = vector.iter().position(|x| !x.is_finite()) {
            return Err(GptError::NonFinite(i));
        }
        if (vector[0] - 1.0).abs() > tol {
            return Err(GptError::NotNormalized(vector[0]));
        }
        Ok(Self { vector, local_a, local_b })
    }

    pub fn product(
        za: &GptVector,
        zb: &GptVector,
        local_a: Arc<TheorySpec>,
        local_b: Arc<TheorySpec>,
    ) -> Result<Self> {
        Self::new(tensor(za, zb).into_entries(), local_a, local_b, 1e-12)
    }

    pub fn vector(&self) -> &[f64] {
        &self.vector
    }

    pub fn local_a(&self) -> &TheorySpec {
        &self.local_a
    }

    pub fn local_b(&self) -> &TheorySpec {
        &self.local_b
    }

    fn db(&self) -> usize {
        self.local_b.dim + 1
    }

    /// `(ε ⊗ ε′)·φ`.
    pub fn pair(&self, ea: &GptVector, eb: &GptVector) -> Result<f64> {
        GptError::check_len(self.local_a.dim + 1, ea.len())?;
        GptError::check_len(self.db(), eb.len())?;
        Ok(scalar::dot(&scalar::kron(ea.entries(), eb.entries()), &self.vector))
    }

    /// Contracting A with `u`: the reduced state of B.
    pub fn marginal_b(&self) -> GptVector {
        GptVector::new(self.vector[..self.db()].to_vec()).expect("finite")
    }

    /// Contracting B with `u`: the reduced state of A.
    pub fn marginal_a(&self) -> GptVector {
        let db = self.db();
        GptVector::new((0..=self.local_a.dim).map(|i| self.vector[i * db]).collect())
            .expect("finite")
    }

    /// The functional on B left after pairing A with `ea`.
    fn contract_a(&self, ea: &[f64]) -> Vec<f64> {
        let db = self.db();
        (0..db)
            .map(|j| ea.iter().enumerate().map(|(i, e)| e * self.vector[i * db + j]).sum())
            .collect()
    }
}

/// A binary measurement: two effects summing to the unit effect.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Measurement {
    pub plus: GptVector,
    pub minus: GptVector,
}

impl Measurement {
    pub fn new(plus: GptVector, minus: GptVector, tol: f64) -> Result<Self> {
        GptError::check_len(plus.len(), minus.len())?;
        let sum = plus.add(&minus)?;
        if sum.max_abs_diff(&GptVector::unit(plus.dim()))? > tol {
            return Err(GptError::param("measurement effects do not sum to the unit effect"));
        }
        Ok(Self { plus, minus })
    }

    /// `(e, u − e)`.
    pub fn from_effect(e: &GptVector) -> Self {
        Self { plus: e.clone(), minus: e.complement() }
    }

    /// Outcomes swapped.
    pub fn relabelled(&self) -> Self {
        Self { plus: self.minus.clone(), minus: self.plus.clone() }
    }

    /// `ε₊ − ε₋`, the ±1-valued observable.
    pub fn observable(&self) -> GptVector {
        self.plus.sub(&self.minus).expect("same length")
    }
}

#[derive(Clone, Debug)]
pub struct ChshScenario {
    pub a: [Measurement; 2],
    pub b: [Measurement; 2],
    pub state: JointState,
}

/// `E(a, b) = p(++) + p(−−) − p(+−) − p(−+)`.
pub fn correlator(state: &JointState, a: &Measurement, b: &Measurement) -> Result<f64> {
    state.pair(&a.observable(), &b.observable())
}

/// `S = E(a0,b0) + E(a0,b1) + E(a1,b0) − E(a1,b1)`.
pub fn chsh_value(s: &ChshScenario) -> Result<f64> {
    let tol = 1e-9;
    for m in s.a.iter().chain(&s.b) {
        Measurement::new(m.plus.clone(), m.minus.clone(), tol)?;
    }
    let e = |x: usize, y: usize| correlator(&s.state, &s.a[x], &s.b[y]);
    Ok(e(0, 0)? + e(0, 1)? + e(1, 0)? - e(1, 1)?)
}

/// Largest CHSH value over the 16 deterministic ±1 assignments.
pub fn deterministic_chsh_bound() -> f64 {
    let mut best = f64::NEG_INFINITY;
    for bits in 0..16u32 {
        let s = |k: u32| if bits & (1 << k) != 0 { 1.0 } else { -1.0 };
        let (a0, a1, b0, b1) = (s(0), s(1), s(2), s(3));
        best = best.max(a0 * b0 + a0 * b1 + a1 * b0 - a1 * b1);
    }
    best
}

/// Extreme states of a local system: polytope vertices, or `k` deterministic
/// sphere points for a ball.
pub fn extreme_states(t: &TheorySpec, k: usize) -> Vec<GptVector> {
    match &t.states {
        ConvexSet::Polytope { vertices } => vertices.clone(),
        ConvexSet::Ball(b) => rotation::sphere_points(b.dimension, k)
            .iter()
            .map(|p| GptVector::from_spatial(p.as_slice()).expect("finite"))
            .collect(),
    }
}

/// Effect generators: the polytope hull list, or `[0, u, ½(1, v_k)]` over
/// `k` sphere directions for a ball.
pub fn extreme_effects(t: &TheorySpec, k: usize) -> Vec<GptVector> {
    match &t.effects {
        EffectSpace::PolytopeHull { generators } => generators.clone(),
        EffectSpace::BallDual(b) => {
            let mut out = vec![GptVector::zero(b.dimension), GptVector::unit(b.dimension)];
            for p in rotation::sphere_points(b.dimension, k) {
                let mut e = vec![0.5];
                e.extend(p.iter().map(|x| 0.5 * x));
                out.push(GptVector::new(e).expect("finite"));
            }
            out
        }
    }
}

/// Binary measurements `(e, u − e)` for every generator other than `0` and
/// `u`.
pub fn binary_measurements(t: &TheorySpec, k: usize) -> Vec<Measurement> {
    let (zero, unit) = (GptVector::zero(t.dim), GptVector::unit(t.dim));
    extreme_effects(t, k)
        .iter()
        .filter(|e| **e != zero && **e != unit)
        .map(Measurement::from_effect)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SeparabilityVerdict {
    /// `φ = Σ w ζ_i ⊗ ζ′_j`, listed as `(i, j, w)` over the extreme points
    /// that were used.
    Separable { weights: Vec<(usize, usize, f64)> },
    /// No decomposition exists; `witness` is a functional with
    /// `witness·(ζ ⊗ ζ′) ≤ 0` on all products and `witness·φ > 0`.
    Entangled { witness: Vec<f64> },
    /// Only for ball locals: no decomposition over the `resolution`-point
    /// discretization; `residual` is the L1 distance to that hull.
    Inconclusive { resolution: usize, residual: f64, covering_radius: f64 },
}

impl SeparabilityVerdict {
    pub fn is_separable(&self) -> bool {
        matches!(self, SeparabilityVerdict::Separable { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            SeparabilityVerdict::Separable { .. } => "separable",
            SeparabilityVerdict::Entangled { .. } => "entangled",
            SeparabilityVerdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

fn product_columns(sa: &[GptVector], sb: &[GptVector]) -> Vec<(usize, usize, Vec<f64>)> {
    let mut cols = Vec::with_capacity(sa.len() * sb.len());
    for (i, a) in sa.iter().enumerate() {
        for (j, b) in sb.iter().enumerate() {
            cols.push((i, j, scalar::kron(a.entries(), b.entries())));
        }
    }
    cols
}

/// Membership of `φ` in the convex hull of products of local extreme states.
///
/// Polytope locals give a definite answer with a witness on failure. Ball
/// locals use `resolution` sphere points per ball and can only return
/// `Separable` or `Inconclusive`.
pub fn is_separable(phi: &JointState, tol: f64, resolution: usize) -> Result<SeparabilityVerdict> {
    let sa = extreme_states(phi.local_a(), resolution);
    let sb = extreme_states(phi.local_b(), resolution);
    let cols = product_columns(&sa, &sb);
    let rows = phi.vector.len();
    let balls = matches!(phi.local_a().states, ConvexSet::Ball(_))
        || matches!(phi.local_b().states, ConvexSet::Ball(_));

    if !balls {
        let mut lp = LpProblem::feasibility(cols.len(), VarDomain::NonNeg);
        for r in 0..rows {
            lp.add(cols.iter().map(|c| c.2[r]).collect(), Relation::Eq, phi.vector[r])?;
        }
        return Ok(match lp.solve()? {
            LpOutcome::Optimal(sol) => SeparabilityVerdict::Separable {
                weights: weights_from(&cols, &sol.x),
            },
            LpOutcome::Infeasible(cert) => SeparabilityVerdict::Entangled {
                witness: cert.multipliers,
            },
            LpOutcome::Unbounded => {
                return Err(GptError::Internal("feasibility LP reported unbounded".into()))
            }
        });
    }

    // L1 residual: min Σ (r⁺ + r⁻) s.t. Σ λ c + r⁺ − r⁻ = φ, λ, r ≥ 0.
    let k = cols.len();
    let nv = k + 2 * rows;
    let mut objective = vec![0.0; nv];
    for c in objective.iter_mut().skip(k) {
        *c = 1.0;
    }
    let mut lp = LpProblem::new(nv, VarDomain::NonNeg, Sense::Minimize).with_objective(objective);
    for r in 0..rows {
        let mut coeffs: Vec<f64> = cols.iter().map(|c| c.2[r]).collect();
        coeffs.resize(nv, 0.0);
        coeffs[k + r] = 1.0;
        coeffs[k + rows + r] = -1.0;
        lp.add(coeffs, Relation::Eq, phi.vector[r])?;
    }
    let sol = lp
        .solve()?
        .optimal()
        .ok_or_else(|| GptError::Internal("residual LP must have an optimum".into()))?;
    if sol.value <= tol {
        return Ok(SeparabilityVerdict::Separable { weights: weights_from(&cols, &sol.x[..k]) });
    }
    let radius = |t: &TheorySpec| match t.states {
        ConvexSet::Ball(b) => {
            let pts = rotation::sphere_points(b.dimension, resolution);
            rotation::covering_radius(&pts, b.dimension)
        }
        _ => 0.0,
    };
    Ok(SeparabilityVerdict::Inconclusive {
        resolution,
        residual: sol.value,
        covering_radius: radius(phi.local_a()).max(radius(phi.local_b())),
    })
}

fn weights_from(cols: &[(usize, usize, Vec<f64>)], x: &[f64]) -> Vec<(usize, usize, f64)> {
    cols.iter()
        .zip(x)
        .filter(|(_, w)| **w > 1e-12)
        .map(|(c, w)| (c.0, c.1, *w))
        .collect()
}

/// Exact separability over polytope locals given in an exact frame. On
/// failure the verified Farkas certificate is the entanglement witness.
pub fn is_separable_exact<F: Scalar>(
    phi: &[F],
    states_a: &[Vec<F>],
    states_b: &[Vec<F>],
) -> Result<std::result::Result<Vec<F>, FarkasCertificate<F>>> {
    let mut cols = Vec::new();
    for a in states_a {
        for b in states_b {
            cols.push(scalar::kron(a, b));
        }
    }
    GptError::check_len(cols[0].len(), phi.len())?;
    let mut lp = LpProblem::feasibility(cols.len(), VarDomain::NonNeg);
    for (r, target) in phi.iter().enumerate() {
        lp.add(cols.iter().map(|c| c[r].clone()).collect(), Relation::Eq, target.clone())?;
    }
    match lp.solve()? {
        LpOutcome::Optimal(sol) => Ok(Ok(sol.x)),
        LpOutcome::Infeasible(cert) => {
            if !cert.verify(&lp) {
                return Err(GptError::Internal("Farkas certificate failed verification".into()));
            }
            Ok(Err(cert))
        }
        LpOutcome::Unbounded => Err(GptError::Internal("feasibility LP reported unbounded".into())),
    }
}

/// Membership in the maximal tensor product: normalization plus
/// `(ε ⊗ ε′)·φ ≥ −tol` on all generator pairs. A ball on side B is handled in
/// closed form: the contracted functional `w` must satisfy `w₀ ≥ ‖w̃‖`.
/// A ball on side A is discretized with `resolution` effects.
pub fn in_max_tensor(phi: &JointState, tol: f64, resolution: usize) -> Result<bool> {
    if (phi.vector[0] - 1.0).abs() > tol {
        return Ok(false);
    }
    let ea = extreme_effects(phi.local_a(), resolution);
    match &phi.local_b().effects {
        EffectSpace::BallDual(_) => {
            for e in &ea {
                let w = phi.contract_a(e.entries());
                let tail = w[1..].iter().map(|x| x * x).sum::<f64>().sqrt();
                if w[0] < -tol || w[0] - tail < -tol {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        EffectSpace::PolytopeHull { generators } => {
            for e in &ea {
                for f in generators {
                    if phi.pair(e, f)? < -tol {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
    }
}

/// Joint outcome probabilities `p(a b | x y)` with `a, b ∈ {+, −}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Behavior {
    pub inputs_a: usize,
    pub inputs_b: usize,
    /// Indexed `[((x · inputs_b + y) · 2 + a) · 2 + b]`.
    pub p: Vec<f64>,
}

impl Behavior {
    pub fn index(&self, x: usize, y: usize, a: usize, b: usize) -> usize {
        ((x * self.inputs_b + y) * 2 + a) * 2 + b
    }

    pub fn get(&self, x: usize, y: usize, a: usize, b: usize) -> f64 {
        self.p[self.index(x, y, a, b)]
    }

    /// Largest change of a one-sided marginal across the other side's
    /// input choice.
    pub fn signalling_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for x in 0..self.inputs_a {
            for a in 0..2 {
                let m: Vec<f64> = (0..self.inputs_b)
                    .map(|y| self.get(x, y, a, 0) + self.get(x, y, a, 1))
                    .collect();
                worst = worst.max(spread(&m));
            }
        }
        for y in 0..self.inputs_b {
            for b in 0..2 {
                let m: Vec<f64> = (0..self.inputs_a)
                    .map(|x| self.get(x, y, 0, b) + self.get(x, y, 1, b))
                    .collect();
                worst = worst.max(spread(&m));
            }
        }
        worst
    }

    pub fn is_no_signalling(&self, tol: f64) -> bool {
        self.signalling_defect() <= tol
    }
}

fn spread(v: &[f64]) -> f64 {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    max - min
}

pub fn behavior(phi: &JointState, ma: &[Measurement], mb: &[Measurement]) -> Result<Behavior> {
    let mut p = Vec::with_capacity(ma.len() * mb.len() * 4);
    for x in ma {
        for y in mb {
            for ea in [&x.plus, &x.minus] {
                for eb in [&y.plus, &y.minus] {
                    p.push(phi.pair(ea, eb)?);
                }
            }
        }
    }
    Ok(Behavior { inputs_a: ma.len(), inputs_b: mb.len(), p })
}

/// Builds the behaviour of `φ` over every binary measurement from the local
/// effect generators and checks that each side's marginals ignore the other
/// side's input.
pub fn no_signalling_check(phi: &JointState, tol: f64, resolution: usize) -> Result<bool> {
    let ma = binary_measurements(phi.local_a(), resolution);
    let mb = binary_measurements(phi.local_b(), resolution);
    Ok(behavior(phi, &ma, &mb)?.is_no_signalling(tol))
}

/// Measurement choices per site for a CHSH search.
#[derive(Clone, Debug)]
pub struct MeasurementFamily {
    pub site_a: Vec<Measurement>,
    pub site_b: Vec<Measurement>,
}

impl MeasurementFamily {
    /// Every binary measurement built from the generators.
    pub fn all(a: &TheorySpec, b: &TheorySpec, resolution: usize) -> Self {
        Self { site_a: binary_measurements(a, resolution), site_b: binary_measurements(b, resolution) }
    }
}

#[derive(Clone, Debug)]
pub struct ChshOptimum {
    pub value: f64,
    pub state: JointState,
    /// Indices into the family: `[a0, a1]`, `[b0, b1]`.
    pub choice_a: [usize; 2],
    pub choice_b: [usize; 2],
}

/// Rows `ε ⊗ ε′` over generator pairs, zero rows and duplicates removed.
fn max_tensor_rows<F: Scalar>(ga: &[Vec<F>], gb: &[Vec<F>]) -> Vec<Vec<F>> {
    let mut rows: Vec<Vec<F>> = Vec::new();
    for a in ga {
        for b in gb {
            let r = scalar::kron(a, b);
            if r.iter().all(Scalar::is_zero) || rows.contains(&r) {
                continue;
            }
            rows.push(r);
        }
    }
    rows
}

fn chsh_objective<F: Scalar>(oa: [&[F]; 2], ob: [&[F]; 2]) -> Vec<F> {
    let mut obj = vec![F::zero(); oa[0].len() * ob[0].len()];
    for (x, ox) in oa.iter().enumerate() {
        for (y, oy) in ob.iter().enumerate() {
            let sign = if x == 1 && y == 1 { -F::one() } else { F::one() };
            for (o, k) in obj.iter_mut().zip(scalar::kron(ox, oy)) {
                *o = o.clone() + sign.clone() * k;
            }
        }
    }
    obj
}

fn solve_chsh_lp<F: Scalar>(rows: &[Vec<F>], objective: Vec<F>) -> Result<(F, Vec<F>)> {
    let n = objective.len();
    let mut lp = LpProblem::new(n, VarDomain::Free, Sense::Maximize).with_objective(objective);
    for r in rows {
        lp.add(r.clone(), Relation::Ge, F::zero())?;
    }
    let mut norm = vec![F::zero(); n];
    norm[0] = F::one();
    lp.add(norm, Relation::Eq, F::one())?;
    match lp.solve()? {
        LpOutcome::Optimal(s) => Ok((s.value, s.x)),
        _ => Err(GptError::Internal("CHSH LP over the maximal tensor product failed".into())),
    }
}

fn negation_map<F: Scalar>(obs: &[Vec<F>], is_neg: &dyn Fn(&[F], &[F]) -> bool) -> Vec<Option<usize>> {
    obs.iter()
        .map(|o| obs.iter().position(|p| is_neg(o, p)))
        .collect()
}

/// Smallest assignment `[a0, a1, b0, b1]` in the orbit of `t` under
/// `(a0, a1, b0, b1) → (a1, a0, b0, −b1)` and `(a0, a1, b0, b1) → (a0, −a1, b1, b0)`,
/// both of which leave CHSH unchanged.
fn orbit_min(t: [usize; 4], neg_a: &[usize], neg_b: &[usize]) -> [usize; 4] {
    let mut seen = vec![t];
    let mut i = 0;
    while i < seen.len() {
        let [a0, a1, b0, b1] = seen[i];
        for next in [[a1, a0, b0, neg_b[b1]], [a0, neg_a[a1], b1, b0]] {
            if !seen.contains(&next) {
                seen.push(next);
            }
        }
        i += 1;
    }
    seen.into_iter().min().expect("orbit contains t")
}

type ChshBest<F> = (F, Vec<F>, [usize; 2], [usize; 2]);

/// Maximum of the CHSH LP over measurement assignments.
///
/// Assignments with `a1 = ±a0` or `b1 = ±b0` give `S ≤ 2` and are only
/// solved if nothing else reaches 2. When both families are closed under
/// negation, one assignment per symmetry orbit is solved.
fn chsh_search<F: Scalar>(
    rows: &[Vec<F>],
    oa: &[Vec<F>],
    ob: &[Vec<F>],
    is_neg: &dyn Fn(&[F], &[F]) -> bool,
) -> Result<ChshBest<F>> {
    if oa.is_empty() || ob.is_empty() {
        return Err(GptError::param("empty measurement family"));
    }
    let (neg_a, neg_b) = (negation_map(oa, is_neg), negation_map(ob, is_neg));
    let closed: Option<(Vec<usize>, Vec<usize>)> =
        neg_a.iter().copied().collect::<Option<Vec<_>>>().zip(neg_b.iter().copied().collect());
    let mut primary = Vec::new();
    let mut degenerate = Vec::new();
    for a0 in 0..oa.len() {
        for a1 in 0..oa.len() {
            for b0 in 0..ob.len() {
                for b1 in 0..ob.len() {
                    let t = [a0, a1, b0, b1];
                    if a0 == a1 || neg_a[a0] == Some(a1) || b0 == b1 || neg_b[b0] == Some(b1) {
                        degenerate.push(t);
                    } else if closed.as_ref().is_none_or(|(na, nb)| orbit_min(t, na, nb) == t) {
                        primary.push(t);
                    }
                }
            }
        }
    }
    let visit = |ts: &[[usize; 4]], best: &mut Option<ChshBest<F>>| -> Result<()> {
        for &[a0, a1, b0, b1] in ts {
            let obj = chsh_objective([&oa[a0], &oa[a1]], [&ob[b0], &ob[b1]]);
            let (v, x) = solve_chsh_lp(rows, obj)?;
            if best.as_ref().is_none_or(|c| v.cmp_scalar(&c.0).is_gt()) {
                *best = Some((v, x, [a0, a1], [b0, b1]));
            }
        }
        Ok(())
    };
    let mut best = None;
    visit(&primary, &mut best)?;
    if best.as_ref().is_none_or(|b| b.0.cmp_scalar(&F::from_int(2)).is_lt()) {
        visit(&degenerate, &mut best)?;
    }
    Ok(best.expect("both families are nonempty"))
}

/// Maximises CHSH over the maximal tensor product, over every assignment of
/// family measurements to `(a0, a1, b0, b1)` up to the symmetries of the
/// functional.
pub fn maximize_chsh(
    local_a: Arc<TheorySpec>,
    local_b: Arc<TheorySpec>,
    family: &MeasurementFamily,
    resolution: usize,
) -> Result<ChshOptimum> {
    let ga: Vec<Vec<f64>> =
        extreme_effects(&local_a, resolution).into_iter().map(GptVector::into_entries).collect();
    let gb: Vec<Vec<f64>> =
        extreme_effects(&local_b, resolution).into_iter().map(GptVector::into_entries).collect();
    let rows = max_tensor_rows(&ga, &gb);
    let oa: Vec<Vec<f64>> = family.site_a.iter().map(|m| m.observable().into_entries()).collect();
    let ob: Vec<Vec<f64>> = family.site_b.iter().map(|m| m.observable().into_entries()).collect();
    let is_neg = |x: &[f64], y: &[f64]| x.iter().zip(y).all(|(a, b)| (a + b).abs() <= 1e-12);
    let (value, x, choice_a, choice_b) = chsh_search(&rows, &oa, &ob, &is_neg)?;
    Ok(ChshOptimum {
        value,
        state: JointState::new(x, local_a, local_b, 1e-7)?,
        choice_a,
        choice_b,
    })
}

/// Exact CHSH optimum over the maximal tensor product of two exact frames,
/// with the measurement observables given in frame coordinates.
pub fn maximize_chsh_exact<F: Scalar>(
    frame_a: &ExactFrame<F>,
    frame_b: &ExactFrame<F>,
    observables_a: &[Vec<F>],
    observables_b: &[Vec<F>],
) -> Result<(F, Vec<F>)> {
    let rows = max_tensor_rows(&frame_a.generators, &frame_b.generators);
    let is_neg = |x: &[F], y: &[F]| x.iter().zip(y).all(|(a, b)| (a.clone() + b.clone()).is_zero());
    let (v, x, _, _) = chsh_search(&rows, observables_a, observables_b, &is_neg)?;
    Ok((v, x))
}

/// Exact CHSH optimum, its printed form and the optimizer in zoo
/// coordinates.
#[derive(Clone, Debug, Serialize)]
pub struct ExactChsh {
    pub value: f64,
    pub exact: String,
    pub state: Vec<f64>,
}

/// [`maximize_chsh_exact`] over all binary observables of two registry
/// frames. Mixed pairs are solved over Q(√3).
pub fn exact_chsh(a: &ExactLocal, b: &ExactLocal) -> Result<ExactChsh> {
    fn run<F: Scalar + std::fmt::Display>(fa: &ExactFrame<F>, fb: &ExactFrame<F>) -> Result<ExactChsh> {
        let (v, x) =
            maximize_chsh_exact(fa, fb, &fa.binary_observables(), &fb.binary_observables())?;
        Ok(ExactChsh { value: v.to_f64(), exact: v.to_string(), state: joint_to_float(&x, fa, fb) })
    }
    match (a, b) {
        (ExactLocal::Rational(fa), ExactLocal::Rational(fb)) => run(fa, fb),
        _ => run(&a.to_sqrt3(), &b.to_sqrt3()),
    }
}

/// Maps a joint vector from exact-frame coordinates to zoo coordinates:
/// `φ = (M_A ⊗ M_B) φ'`.
pub fn joint_to_float<F: Scalar>(
    phi: &[F],
    frame_a: &ExactFrame<F>,
    frame_b: &ExactFrame<F>,
) -> Vec<f64> {
    let m = frame_a.to_float.kronecker(&frame_b.to_float);
    let x = nalgebra::DVector::from_vec(scalar::to_f64_vec(phi));
    (m * x).as_slice().to_vec()
}

/// Vertices of the maximal tensor product of two polytope theories, by
/// brute force over active constraint sets after pruning redundant rows.
pub fn max_tensor_vertices(a: &TheorySpec, b: &TheorySpec, tol: f64) -> Result<Vec<Vec<f64>>> {
    let ga: Vec<Vec<f64>> = a
        .effect_generators()
        .ok_or_else(|| GptError::param("vertex enumeration needs polytope effects"))?
        .iter()
        .map(|e| e.entries().to_vec())
        .collect();
    let gb: Vec<Vec<f64>> = b
        .effect_generators()
        .ok_or_else(|| GptError::param("vertex enumeration needs polytope effects"))?
        .iter()
        .map(|e| e.entries().to_vec())
        .collect();
    let mut rows = max_tensor_rows(&ga, &gb);
    let n = rows[0].len();
    let mut norm = vec![0.0; n];
    norm[0] = 1.0;

    // drop rows implied by the others
    let mut i = 0;
    while i < rows.len() {
        let target = rows[i].clone();
        let others: Vec<Vec<f64>> =
            rows.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, r)| r.clone()).collect();
        let mut lp = LpProblem::new(n, VarDomain::Free, Sense::Minimize).with_objective(target);
        for r in &others {
            lp.add(r.clone(), Relation::Ge, 0.0)?;
        }
        lp.add(norm.clone(), Relation::Eq, 1.0)?;
        let redundant = matches!(lp.solve()?, LpOutcome::Optimal(s) if s.value >= -tol);
        if redundant {
            rows.remove(i);
        } else {
            i += 1;
        }
    }

    let mut vertices: Vec<Vec<f64>> = Vec::new();
    let mut pick: Vec<usize> = (0..n - 1).collect();
    if rows.len() < n - 1 {
        return Err(GptError::Internal("maximal tensor product is unbounded".into()));
    }
    loop {
        let mut m: Vec<Vec<f64>> = pick.iter().map(|&k| rows[k].clone()).collect();
        m.push(norm.clone());
        let mut rhs = vec![0.0; n - 1];
        rhs.push(1.0);
        if let Some(x) = scalar::solve_square(&m, &rhs) {
            let feasible = rows.iter().all(|r| scalar::dot(r, &x) >= -tol);
            let fresh = vertices
                .iter()
                .all(|v| v.iter().zip(&x).any(|(p, q)| (p - q).abs() > 1e-7));
            if feasible && fresh {
                vertices.push(x);
            }
        }
        // next combination of n − 1 rows
        let k = pick.len();
        let mut j = k;
        while j > 0 && pick[j - 1] == rows.len() - k + j - 1 {
            j -= 1;
        }
        if j == 0 {
            break;
        }
        pick[j - 1] += 1;
        for t in j..k {
            pick[t] = pick[t - 1] + 1;
        }
    }
    Ok(vertices)
}

fn pauli(i: usize) -> DMatrix<Complex<f64>> {
    let c = |re: f64, im: f64| Complex::new(re, im);
    match i {
        0 => DMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(1., 0.)]),
        1 => DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]),
        2 => DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]),
        _ => DMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]),
    }
}

/// `ρ = ¼ Σ_{ij} φ_{ij} σ_i ⊗ σ_j` with `φ = (1, r_B; r_A, T)`.
pub fn two_qubit_density(ra: [f64; 3], rb: [f64; 3], t: [[f64; 3]; 3]) -> DMatrix<Complex<f64>> {
    let coeff = |i: usize, j: usize| match (i, j) {
        (0, 0) => 1.0,
        (0, j) => rb[j - 1],
        (i, 0) => ra[i - 1],
        (i, j) => t[i - 1][j - 1],
    };
    let mut rho = DMatrix::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            rho += pauli(i).kronecker(&pauli(j)) * Complex::new(coeff(i, j) / 4.0, 0.0);
        }
    }
    rho
}

/// The joint vector `(1, r_B; r_A, T)` (A-major) of a two-qubit state, after
/// checking that the density operator is positive semidefinite.
pub fn two_qubit_gpt(
    ra: [f64; 3],
    rb: [f64; 3],
    t: [[f64; 3]; 3],
    tol: f64,
) -> Result<JointState> {
    let rho = two_qubit_density(ra, rb, t);
    let min_eig = rho.symmetric_eigenvalues().min();
    if min_eig < -tol {
        return Err(GptError::Domain(format!(
            "correlation data is not a quantum state (eigenvalue {min_eig})"
        )));
    }
    let mut v = vec![1.0];
    v.extend_from_slice(&rb);
    for i in 0..3 {
        v.push(ra[i]);
        v.extend_from_slice(&t[i]);
    }
    let ball = Arc::new(crate::zoo::euclidean_ball(3)?);
    JointState::new(v, ball.clone(), ball, tol)
}

pub fn singlet() -> JointState {
    let t = [[-1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]];
    two_qubit_gpt([0.0; 3], [0.0; 3], t, 1e-12).expect("the singlet is a state")
}

/// Ball measurement along the direction at angle `angle` from the z axis in
/// the x–z plane.
pub fn planar_qubit_measurement(angle: f64) -> Measurement {
    let e = GptVector::new(vec![0.5, 0.5 * angle.sin(), 0.0, 0.5 * angle.cos()]).expect("finite");
    Measurement::from_effect(&e)
}

/// Singlet with A measuring at angles `0, π/2` and B at `π/4, −π/4`. Since
/// the singlet anticorrelates (`E(a, b) = −a·b`), B's outcomes are swapped so
/// that the scenario reaches `+2√2` rather than `−2√2`.
pub fn singlet_tsirelson_scenario() -> ChshScenario {
    use std::f64::consts::FRAC_PI_4;
    ChshScenario {
        a: [planar_qubit_measurement(0.0), planar_qubit_measurement(2.0 * FRAC_PI_4)],
        b: [
            planar_qubit_measurement(FRAC_PI_4).relabelled(),
            planar_qubit_measurement(-FRAC_PI_4).relabelled(),
        ],
        state: singlet(),
    }
}

/// Entanglement evidence for a joint state: the separability verdict plus,
/// when a scenario is supplied, its CHSH value. A value above the local bound
/// certifies entanglement even when the discretized LP is inconclusive.
#[derive(Clone, Debug, Serialize)]
pub struct EntanglementReport {
    pub separability: SeparabilityVerdict,
    pub chsh: Option<f64>,
    pub entangled: bool,
    /// `"lp-witness"`, `"chsh-witness"`, `"separable"` or `"inconclusive"`.
    pub method: &'static str,
}

pub fn certify_entanglement(
    phi: &JointState,
    scenario: Option<&ChshScenario>,
    tol: f64,
    resolution: usize,
) -> Result<EntanglementReport> {
    let separability = is_separable(phi, tol, resolution)?;
    let chsh = scenario.map(chsh_value).transpose()?;
    let (entangled, method) = match (&separability, chsh) {
        (SeparabilityVerdict::Separable { .. }, _) => (false, "separable"),
        (SeparabilityVerdict::Entangled { .. }, _) => (true, "lp-witness"),
        (_, Some(s)) if s > deterministic_chsh_bound() + tol => (true, "chsh-witness"),
        _ => (false, "inconclusive"),
    };
    Ok(EntanglementReport { separability, chsh, entangled, method })
}

/// One CHSH scenario as read from a scenario file. Measurements are indices
/// into each local's effect generators (for balls, the `resolution` sphere
/// directions after `0, u`); outcome `+` is that effect and `−` its
/// complement. Without `state`, the CHSH functional of these measurements is
/// maximised over the maximal tensor product.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub id: String,
    pub local_a: String,
    pub local_b: String,
    pub measurements_a: [usize; 2],
    pub measurements_b: [usize; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<Vec<f64>>,
}

impl ScenarioFile {
    /// A JSON array of scenarios, or a single scenario object.
    pub fn parse_many(json: &str) -> Result<Vec<ScenarioFile>> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum OneOrMany {
            Many(Vec<ScenarioFile>),
            One(ScenarioFile),
        }
        match serde_json::from_str(json).map_err(|e| GptError::param(format!("scenario file: {e}")))? {
            OneOrMany::Many(v) => Ok(v),
            OneOrMany::One(s) => Ok(vec![s]),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioOutcome {
    pub id: String,
    pub chsh: f64,
    pub state: Vec<f64>,
    pub report: EntanglementReport,
    pub in_max_tensor: bool,
    pub no_signalling: bool,
}

fn indexed_measurement(t: &TheorySpec, i: usize, resolution: usize) -> Result<Measurement> {
    let effects = extreme_effects(t, resolution);
    let e = effects.get(i).ok_or_else(|| {
        GptError::param(format!("effect index {i} out of range for {} ({} generators)", t.name, effects.len()))
    })?;
    Ok(Measurement::from_effect(e))
}

/// CHSH optimum over the maximal tensor product for fixed measurements.
pub fn maximize_chsh_fixed(
    local_a: Arc<TheorySpec>,
    local_b: Arc<TheorySpec>,
    a: &[Measurement; 2],
    b: &[Measurement; 2],
    resolution: usize,
) -> Result<(f64, JointState)> {
    let ga: Vec<Vec<f64>> =
        extreme_effects(&local_a, resolution).into_iter().map(GptVector::into_entries).collect();
    let gb: Vec<Vec<f64>> =
        extreme_effects(&local_b, resolution).into_iter().map(GptVector::into_entries).collect();
    let rows = max_tensor_rows(&ga, &gb);
    let (oa0, oa1) = (a[0].observable().into_entries(), a[1].observable().into_entries());
    let (ob0, ob1) = (b[0].observable().into_entries(), b[1].observable().into_entries());
    let (v, x) = solve_chsh_lp(&rows, chsh_objective([&oa0, &oa1], [&ob0, &ob1]))?;
    Ok((v, JointState::new(x, local_a, local_b, 1e-7)?))
}

/// Evaluates a scenario: CHSH of the given (or optimal) joint state,
/// membership in the maximal tensor product, no-signalling and the
/// entanglement verdict.
pub fn evaluate_scenario(s: &ScenarioFile, tol: f64, resolution: usize) -> Result<ScenarioOutcome> {
    let ta = Arc::new(crate::zoo::theory_by_name(&s.local_a)?);
    let tb = Arc::new(crate::zoo::theory_by_name(&s.local_b)?);
    let ma = [
        indexed_measurement(&ta, s.measurements_a[0], resolution)?,
        indexed_measurement(&ta, s.measurements_a[1], resolution)?,
    ];
    let mb = [
        indexed_measurement(&tb, s.measurements_b[0], resolution)?,
        indexed_measurement(&tb, s.measurements_b[1], resolution)?,
    ];
    let state = match &s.state {
        Some(v) => JointState::new(v.clone(), ta.clone(), tb.clone(), tol)?,
        None => maximize_chsh_fixed(ta.clone(), tb.clone(), &ma, &mb, resolution)?.1,
    };
    let balls = matches!(ta.states, ConvexSet::Ball(_)) || matches!(tb.states, ConvexSet::Ball(_));
    let scenario = ChshScenario { a: ma, b: mb, state: state.clone() };
    let chsh = chsh_value(&scenario)?;
    let in_max = in_max_tensor(&state, tol, resolution)?;
    let ns = no_signalling_check(&state, tol, if balls { 16 } else { 0 })?;
    let report = certify_entanglement(&state, Some(&scenario), tol, resolution)?;
    Ok(ScenarioOutcome {
        id: s.id.clone(),
        chsh,
        state: state.vector().to_vec(),
        report,
        in_max_tensor: in_max,
        no_signalling: ns,
    })
}
