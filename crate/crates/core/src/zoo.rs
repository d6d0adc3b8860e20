//! Example theories: classical simplices, regular polygons, Euclidean balls,
//! the Bloch-ball embedding of qubit density matrices, and box world.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GptError, Result};
use crate::gpt::{
    BallDescriptor, ConvexSet, EffectConvention, EffectSpace, GptVector, LinearMap, TheorySpec,
};
use crate::rotation;

/// Largest simplex order whose full normalized-effect hull (all subset sums)
/// is listed explicitly.
pub const MAX_SIMPLEX_N: usize = 12;

/// Polygon parameters: `r_N = √sec(π/N)`, `θ = 2π/N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolygonParams {
    pub n: usize,
    pub r: f64,
    pub theta: f64,
}

impl PolygonParams {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(GptError::param(format!("polygon order must be at least 3, got {n}")));
        }
        let r = (1.0 / (PI / n as f64).cos()).sqrt();
        Ok(Self { n, r, theta: 2.0 * PI / n as f64 })
    }
}

/// Vertex `i` of the regular simplex with `n + 1` vertices, centroid 0 and
/// circumradius 1, as a state `(1, v_i)`.
///
/// Coordinates come from the Helmert basis of the hyperplane `Σ x = 0` in
/// `R^{n+1}`, negated so that `n = 1` reproduces the bit with
/// `ζ_0 = (1, −1)`, `ζ_1 = (1, 1)`.
pub fn simplex_vertex(n: usize, i: usize) -> Vec<f64> {
    let scale = ((n + 1) as f64 / n as f64).sqrt();
    let centered = |j: usize| (if j == i { 1.0 } else { 0.0 }) - 1.0 / (n + 1) as f64;
    let mut out = vec![1.0];
    for k in 1..=n {
        let norm = ((k * (k + 1)) as f64).sqrt();
        let mut dot = 0.0;
        for j in 0..k {
            dot += centered(j);
        }
        dot -= k as f64 * centered(k);
        out.push(-scale * dot / norm);
    }
    out
}

/// The effects `ε_i = (1, n v_i)/(n + 1)` dual to [`simplex_vertex`].
pub fn simplex_effects(n: usize) -> Vec<GptVector> {
    (0..=n)
        .map(|i| {
            let v = simplex_vertex(n, i);
            let mut e: Vec<f64> = v.iter().map(|x| x * n as f64 / (n + 1) as f64).collect();
            e[0] = 1.0 / (n + 1) as f64;
            GptVector::new(e).expect("finite")
        })
        .collect()
}

pub fn simplex_states(n: usize) -> Vec<GptVector> {
    (0..=n)
        .map(|i| GptVector::new(simplex_vertex(n, i)).expect("finite"))
        .collect()
}

/// The linear map sending `ζ_i` to `ζ_{perm[i]}`, built as
/// `Σ_i ζ_{perm[i]} ε_iᵀ` so no matrix inversion is involved.
pub fn simplex_permutation(n: usize, perm: &[usize]) -> Result<LinearMap> {
    GptError::check_len(n + 1, perm.len())?;
    let states = simplex_states(n);
    let effects = simplex_effects(n);
    let mut m = DMatrix::zeros(n + 1, n + 1);
    for (i, &j) in perm.iter().enumerate() {
        if j > n {
            return Err(GptError::param(format!("permutation entry {j} out of range")));
        }
        m += states[j].to_dvector() * effects[i].to_dvector().transpose();
    }
    LinearMap::new(m)
}

/// Classical system with `n + 1` perfectly distinguishable pure states.
///
/// Effects are the full normalized set: every subset sum of the `ε_i`,
/// listed as `[0, u, ε_0, …, ε_n, remaining sums…]`. Reversibles are the
/// adjacent transpositions.
pub fn classical_simplex(n: usize) -> Result<TheorySpec> {
    if n == 0 {
        return Err(GptError::param("a single-state theory is trivial"));
    }
    if n > MAX_SIMPLEX_N {
        return Err(GptError::param(format!("simplex order above {MAX_SIMPLEX_N}")));
    }
    let atoms = simplex_effects(n);
    let mut generators = vec![GptVector::zero(n), GptVector::unit(n)];
    generators.extend(atoms.iter().cloned());
    let full = (1usize << (n + 1)) - 1;
    for mask in 1..full {
        if mask.count_ones() < 2 {
            continue;
        }
        let mut acc = GptVector::zero(n);
        for (i, a) in atoms.iter().enumerate() {
            if mask & (1 << i) != 0 {
                acc = acc.add(a)?;
            }
        }
        generators.push(acc);
    }
    let reversibles = (0..n)
        .map(|i| {
            let mut perm: Vec<usize> = (0..=n).collect();
            perm.swap(i, i + 1);
            simplex_permutation(n, &perm)
        })
        .collect::<Result<Vec<_>>>()?;
    let name = if n == 1 { "bit".to_string() } else { format!("simplex:{n}") };
    TheorySpec::new(
        name,
        ConvexSet::polytope(simplex_states(n))?,
        EffectSpace::PolytopeHull { generators },
        reversibles,
        EffectConvention::AllNormalized,
    )
}

pub fn polygon_state(p: &PolygonParams, i: usize) -> GptVector {
    let a = p.theta * (i + 1) as f64;
    GptVector::new(vec![1.0, p.r * a.cos(), p.r * a.sin()]).expect("finite")
}

pub fn polygon_states(n: usize) -> Result<Vec<GptVector>> {
    let p = PolygonParams::new(n)?;
    Ok((0..n).map(|i| polygon_state(&p, i)).collect())
}

/// The labelled extremal effects `ε_0 … ε_{N−1}`.
///
/// Even `N`: `½(1, r cos((2i+1)π/N), r sin((2i+1)π/N))`.
/// Odd `N`: `(1, r cos(2π(i+1)/N), r sin(2π(i+1)/N)) / (1 + r²)`; the
/// complements `u − ε_i` come from [`polygon_complements`].
pub fn polygon_effects(n: usize) -> Result<Vec<GptVector>> {
    let p = PolygonParams::new(n)?;
    Ok((0..n)
        .map(|i| {
            let entries = if n.is_multiple_of(2) {
                let a = (2 * i + 1) as f64 * PI / n as f64;
                vec![0.5, 0.5 * p.r * a.cos(), 0.5 * p.r * a.sin()]
            } else {
                let a = p.theta * (i + 1) as f64;
                let s = 1.0 / (1.0 + p.r * p.r);
                vec![s, s * p.r * a.cos(), s * p.r * a.sin()]
            };
            GptVector::new(entries).expect("finite")
        })
        .collect())
}

pub fn polygon_complements(n: usize) -> Result<Vec<GptVector>> {
    Ok(polygon_effects(n)?.iter().map(GptVector::complement).collect())
}

/// `block(1, rotation by jθ)`, with `j` reduced mod `N` first so that
/// `R(jθ)` and `R((j mod N)θ)` are the same matrix.
pub fn polygon_rotation(n: usize, j: i64) -> Result<LinearMap> {
    let p = PolygonParams::new(n)?;
    let k = j.rem_euclid(n as i64);
    let angle = p.theta * k as f64;
    LinearMap::block(&rotation::plane_rotation(2, 0, 1, angle))
}

/// Regular-polygon theory with `E = E_norm`. Effect generators are
/// `[0, u, ε_0, …, ε_{N−1}]`, followed for odd `N` by the complements.
pub fn polygon_theory(n: usize) -> Result<TheorySpec> {
    let mut generators = vec![GptVector::zero(2), GptVector::unit(2)];
    generators.extend(polygon_effects(n)?);
    if n % 2 == 1 {
        generators.extend(polygon_complements(n)?);
    }
    TheorySpec::new(
        format!("polygon:{n}"),
        ConvexSet::polytope(polygon_states(n)?)?,
        EffectSpace::PolytopeHull { generators },
        vec![polygon_rotation(n, 1)?],
        EffectConvention::AllNormalized,
    )
}

/// Hausdorff distance between the polygon state set and the unit disk:
/// the larger of the vertex overshoot and the gap between the disk and the
/// nearest edge.
pub fn polygon_disk_hausdorff(n: usize) -> Result<f64> {
    let states = polygon_states(n)?;
    let mut worst: f64 = 0.0;
    for (i, z) in states.iter().enumerate() {
        let next = &states[(i + 1) % n];
        worst = worst.max(z.spatial_norm() - 1.0);
        let mx = 0.5 * (z.spatial()[0] + next.spatial()[0]);
        let my = 0.5 * (z.spatial()[1] + next.spatial()[1]);
        worst = worst.max(1.0 - mx.hypot(my));
    }
    Ok(worst)
}

/// Euclidean `d`-ball theory. The reversible generators are the
/// coordinate-plane rotations by one radian, which generate a dense subgroup
/// of SO(d); use [`random_ball_reversible`] for Haar samples.
pub fn euclidean_ball(d: usize) -> Result<TheorySpec> {
    if d == 0 {
        return Err(GptError::param("a single-state theory is trivial"));
    }
    let mut reversibles = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            reversibles.push(LinearMap::block(&rotation::plane_rotation(d, i, j, 1.0))?);
        }
    }
    if reversibles.is_empty() {
        reversibles.push(LinearMap::identity(d + 1));
    }
    TheorySpec::new(
        format!("ball:{d}"),
        ConvexSet::ball(d),
        EffectSpace::BallDual(BallDescriptor::unit(d)),
        reversibles,
        EffectConvention::AllNormalized,
    )
}

/// The extremal ball effect `½(1, ṽ)` for a unit `ṽ`.
pub fn ball_effect(v: &[f64], tol: f64) -> Result<GptVector> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > tol {
        return Err(GptError::Domain(format!("direction has norm {norm}, expected 1")));
    }
    let mut e = vec![0.5];
    e.extend(v.iter().map(|x| 0.5 * x));
    GptVector::new(e)
}

pub fn random_ball_reversible<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<LinearMap> {
    LinearMap::block(&rotation::random_rotation(d, rng))
}

/// A ball reversible taking the pure state with spatial part `from` to the
/// one with spatial part `to`.
pub fn ball_rotation_taking(from: &[f64], to: &[f64], tol: f64) -> Result<LinearMap> {
    let q = rotation::rotation_taking(
        &DVector::from_column_slice(from),
        &DVector::from_column_slice(to),
        tol,
    )?;
    LinearMap::block(&q)
}

/// Coefficients `r` of `ρ = ½(I + r·σ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub r: [f64; 3],
}

impl BlochVector {
    pub fn new(r: [f64; 3]) -> Self {
        Self { r }
    }

    pub fn norm(&self) -> f64 {
        self.r.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// `ρ_r ↦ (1, r)`.
pub fn density_to_gpt(b: &BlochVector, tol: f64) -> Result<GptVector> {
    if b.norm() > 1.0 + tol {
        return Err(GptError::Domain(format!("Bloch vector norm {} exceeds 1", b.norm())));
    }
    GptVector::from_spatial(&b.r)
}

/// The square (N = 4 polygon) local system and its two binary measurements
/// per site, given as indices into [`polygon_effects`]`(4)`.
#[derive(Clone, Debug)]
pub struct BoxWorld {
    pub local: TheorySpec,
    pub measurements: [[usize; 2]; 2],
}

impl BoxWorld {
    /// Measurement `x` as a `(+, −)` effect pair.
    pub fn measurement(&self, x: usize) -> (GptVector, GptVector) {
        let e = polygon_effects(4).expect("N = 4 is valid");
        let [p, m] = self.measurements[x];
        (e[p].clone(), e[m].clone())
    }
}

pub fn box_world_pair() -> BoxWorld {
    let mut local = polygon_theory(4).expect("N = 4 is valid");
    local.name = "boxworld".to_string();
    BoxWorld { local, measurements: [[0, 2], [1, 3]] }
}

/// Registry lookup: `bit`, `simplex:N`, `polygon:N`, `ball:d`, `boxworld`.
pub fn theory_by_name(name: &str) -> Result<TheorySpec> {
    let parse = |arg: &str| -> Result<usize> {
        arg.parse::<usize>()
            .map_err(|_| GptError::UnknownTheory(name.to_string()))
    };
    match name.split_once(':') {
        None if name == "bit" => classical_simplex(1),
        None if name == "boxworld" => Ok(box_world_pair().local),
        Some(("simplex", n)) => classical_simplex(parse(n)?),
        Some(("polygon", n)) => polygon_theory(parse(n)?),
        Some(("ball", d)) => euclidean_ball(parse(d)?),
        _ => Err(GptError::UnknownTheory(name.to_string())),
    }
}
