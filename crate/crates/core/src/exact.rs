//! Exact-arithmetic copies of the zoo theories whose data lives in Q or in a
//! real quadratic field.
//!
//! Polygon coordinates involve `r_N = √sec(π/N)`, which is not in any single
//! quadratic field. The frames below therefore use the rescaled coordinates
//! `ζ' = L ζ`, `ε' = L⁻ᵀ ε` with `L = diag(1, 1/r_N, 1/r_N)`: states become
//! `(1, cos, sin)` and effects pick up a factor `r_N²`. Pairings are
//! unchanged, so every probability, LP optimum and feasibility verdict
//! computed in the frame is the one of the original theory.

use nalgebra::DMatrix;
use num_rational::BigRational;

use crate::error::{GptError, Result};
use crate::gpt::{GptVector, TheorySpec};
use crate::lp::{LpProblem, Relation, VarDomain};
use crate::scalar::{self, rat, QuadSurd, Scalar};
use crate::zoo;

pub type Q2 = QuadSurd<2>;
pub type Q3 = QuadSurd<3>;

/// A polytope theory written over an exact scalar, together with the
/// float matrix `M` relating it to the zoo coordinates:
/// `ζ_float = M ζ_exact` and `ε_float = M⁻ᵀ ε_exact`.
#[derive(Clone, Debug)]
pub struct ExactFrame<F> {
    pub name: String,
    pub states: Vec<Vec<F>>,
    /// Labelled extremal effects, in the order of the zoo constructor.
    pub effects: Vec<Vec<F>>,
    /// Full generator list of the effect hull, `[0, u, …]` as in the zoo.
    pub generators: Vec<Vec<F>>,
    pub to_float: DMatrix<f64>,
}

impl<F: Scalar> ExactFrame<F> {
    pub fn dim(&self) -> usize {
        self.states[0].len() - 1
    }

    /// `table[i][j] = ε_i · ζ_j` over the labelled effects.
    pub fn pairing_table(&self) -> Vec<Vec<F>> {
        self.effects
            .iter()
            .map(|e| self.states.iter().map(|z| scalar::dot(e, z)).collect())
            .collect()
    }

    /// Whether the labelled effects and states satisfy `ε_i(ζ_j) = δ_ij`
    /// with exact equality.
    pub fn is_distinguishing(&self) -> bool {
        self.pairing_table().iter().enumerate().all(|(i, row)| {
            row.iter().enumerate().all(|(j, p)| {
                let target = if i == j { F::one() } else { F::zero() };
                *p == target
            })
        })
    }

    pub fn contains(&self, v: &[F]) -> Result<bool> {
        exact_hull_contains(&self.states, v)
    }

    pub fn state_to_float(&self, v: &[F]) -> Result<GptVector> {
        let x = nalgebra::DVector::from_vec(scalar::to_f64_vec(v));
        GptVector::from_dvector(&(&self.to_float * x))
    }

    /// Observables `2g − u` for every generator other than `0` and `u`.
    pub fn binary_observables(&self) -> Vec<Vec<F>> {
        let two = F::from_int(2);
        self.generators
            .iter()
            .filter(|g| {
                let trivial = g.iter().skip(1).all(Scalar::is_zero);
                !(trivial && (g[0].is_zero() || g[0] == F::one()))
            })
            .map(|g| {
                let mut o: Vec<F> = g.iter().map(|x| two.clone() * x.clone()).collect();
                o[0] = o[0].clone() - F::one();
                o
            })
            .collect()
    }

    pub fn effect_to_float(&self, e: &[F]) -> Result<GptVector> {
        let inv = self
            .to_float
            .clone()
            .try_inverse()
            .ok_or_else(|| GptError::Internal("frame matrix is singular".into()))?;
        let x = nalgebra::DVector::from_vec(scalar::to_f64_vec(e));
        GptVector::from_dvector(&(inv.transpose() * x))
    }
}

/// Convex-hull membership decided by an LP over the exact scalar.
pub fn exact_hull_contains<F: Scalar>(vertices: &[Vec<F>], v: &[F]) -> Result<bool> {
    let k = vertices.len();
    for w in vertices {
        GptError::check_len(v.len(), w.len())?;
    }
    let mut lp = LpProblem::feasibility(k, VarDomain::NonNeg);
    for (row, target) in v.iter().enumerate() {
        lp.add(
            vertices.iter().map(|w| w[row].clone()).collect(),
            Relation::Eq,
            target.clone(),
        )?;
    }
    lp.add(vec![F::one(); k], Relation::Eq, F::one())?;
    Ok(lp.solve()?.is_feasible())
}

fn diag_frame(dim: usize, spatial: f64) -> DMatrix<f64> {
    let mut m = DMatrix::identity(dim + 1, dim + 1);
    for i in 1..=dim {
        m[(i, i)] = spatial;
    }
    m
}

fn with_unit_and_zero<F: Scalar>(dim: usize, labelled: &[Vec<F>]) -> Vec<Vec<F>> {
    let mut zero = vec![F::zero(); dim + 1];
    let mut unit = zero.clone();
    unit[0] = F::one();
    let mut out = vec![std::mem::take(&mut zero), unit];
    out.extend(labelled.iter().cloned());
    out
}

fn complement<F: Scalar>(e: &[F]) -> Vec<F> {
    let mut c: Vec<F> = e.iter().map(|x| -x.clone()).collect();
    c[0] = F::one() + c[0].clone();
    c
}

/// The classical bit in its native coordinates, which are already rational.
pub fn exact_bit() -> ExactFrame<BigRational> {
    let states = vec![vec![rat(1, 1), rat(-1, 1)], vec![rat(1, 1), rat(1, 1)]];
    let effects = vec![vec![rat(1, 2), rat(-1, 2)], vec![rat(1, 2), rat(1, 2)]];
    ExactFrame {
        name: "bit".into(),
        generators: with_unit_and_zero(1, &effects),
        states,
        effects,
        to_float: DMatrix::identity(2, 2),
    }
}

/// Classical simplex with `n + 1` outcomes in the rational frame
/// `ζ_0 = (1, 0)`, `ζ_i = (1, e_i)`; effects `ε_0 = (1, −1, …, −1)`,
/// `ε_i = (0, e_i)`. Generators include every subset sum, matching the zoo.
pub fn exact_simplex(n: usize) -> Result<ExactFrame<BigRational>> {
    if n == 0 || n > zoo::MAX_SIMPLEX_N {
        return Err(GptError::param(format!("simplex order {n} out of range")));
    }
    let mut states = Vec::with_capacity(n + 1);
    let mut effects = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut z = vec![rat(0, 1); n + 1];
        z[0] = rat(1, 1);
        let mut e = vec![rat(0, 1); n + 1];
        if i == 0 {
            e[0] = rat(1, 1);
            for x in e.iter_mut().skip(1) {
                *x = rat(-1, 1);
            }
        } else {
            z[i] = rat(1, 1);
            e[i] = rat(1, 1);
        }
        states.push(z);
        effects.push(e);
    }
    let mut generators = with_unit_and_zero(n, &effects);
    for mask in 1..(1usize << (n + 1)) - 1 {
        if mask.count_ones() < 2 {
            continue;
        }
        let mut acc = vec![rat(0, 1); n + 1];
        for (i, e) in effects.iter().enumerate() {
            if mask & (1 << i) != 0 {
                for (a, x) in acc.iter_mut().zip(e) {
                    *a = a.clone() + x.clone();
                }
            }
        }
        generators.push(acc);
    }
    // M = Z_float Z_exact⁻¹, columns of Z are the states.
    let zf = DMatrix::from_fn(n + 1, n + 1, |r, c| zoo::simplex_vertex(n, c)[r]);
    let ze = DMatrix::from_fn(n + 1, n + 1, |r, c| states[c][r].to_f64());
    let to_float = zf * ze
        .try_inverse()
        .ok_or_else(|| GptError::Internal("simplex frame is singular".into()))?;
    Ok(ExactFrame {
        name: if n == 1 { "simplex:1".into() } else { format!("simplex:{n}") },
        states,
        effects,
        generators,
        to_float,
    })
}

/// `cos(kπ/6)` in Q(√3).
fn cos_pi_6(k: i64) -> Q3 {
    match k.rem_euclid(12) {
        0 => Q3::from_int(1),
        1 | 11 => Q3::from_parts(0, 1, 1, 2),
        2 | 10 => Q3::from_ratio(1, 2),
        3 | 9 => Q3::zero(),
        4 | 8 => Q3::from_ratio(-1, 2),
        5 | 7 => Q3::from_parts(0, 1, -1, 2),
        _ => Q3::from_int(-1),
    }
}

/// `cos(kπ/4)` in Q(√2).
fn cos_pi_4(k: i64) -> Q2 {
    match k.rem_euclid(8) {
        0 => Q2::from_int(1),
        1 | 7 => Q2::from_parts(0, 1, 1, 2),
        2 | 6 => Q2::zero(),
        3 | 5 => Q2::from_parts(0, 1, -1, 2),
        _ => Q2::from_int(-1),
    }
}

/// Polygon frame over Q(√D) given `cos(k·unit)`, where a full turn is
/// `turn` units and `r² = sec(π/N)`.
fn polygon_frame<const D: i64>(
    n: usize,
    turn: i64,
    cos: fn(i64) -> QuadSurd<D>,
    r2: QuadSurd<D>,
) -> ExactFrame<QuadSurd<D>> {
    let sin = |k: i64| cos(k - turn / 4);
    let step = turn / n as i64;
    let states: Vec<Vec<QuadSurd<D>>> = (0..n as i64)
        .map(|i| vec![QuadSurd::one(), cos(step * (i + 1)), sin(step * (i + 1))])
        .collect();
    let effects: Vec<Vec<QuadSurd<D>>> = (0..n as i64)
        .map(|i| {
            if n.is_multiple_of(2) {
                let k = (2 * i + 1) * turn / (2 * n as i64);
                let half = QuadSurd::from_ratio(1, 2);
                vec![
                    half.clone(),
                    half.clone() * r2.clone() * cos(k),
                    half * r2.clone() * sin(k),
                ]
            } else {
                let k = step * (i + 1);
                let s = QuadSurd::one() / (QuadSurd::one() + r2.clone());
                vec![s.clone(), s.clone() * r2.clone() * cos(k), s * r2.clone() * sin(k)]
            }
        })
        .collect();
    let mut generators = with_unit_and_zero(2, &effects);
    if n % 2 == 1 {
        let comps: Vec<_> = effects.iter().map(|e| complement(e)).collect();
        generators.extend(comps);
    }
    let r = r2.to_f64().sqrt();
    ExactFrame {
        name: format!("polygon:{n}"),
        states,
        effects,
        generators,
        to_float: diag_frame(2, r),
    }
}

fn to_rational(v: &Q2) -> Result<BigRational> {
    if v.is_rational() {
        Ok(v.rational.clone())
    } else {
        Err(GptError::NoExactForm(format!("{v} is irrational")))
    }
}

fn map_frame<A, B>(
    f: &ExactFrame<A>,
    conv: impl Fn(&A) -> Result<B>,
) -> Result<ExactFrame<B>> {
    let map = |rows: &[Vec<A>]| -> Result<Vec<Vec<B>>> {
        rows.iter()
            .map(|r| r.iter().map(&conv).collect::<Result<Vec<B>>>())
            .collect()
    };
    Ok(ExactFrame {
        name: f.name.clone(),
        states: map(&f.states)?,
        effects: map(&f.effects)?,
        generators: map(&f.generators)?,
        to_float: f.to_float.clone(),
    })
}

/// Triangle (N = 3) in Q(√3).
pub fn exact_polygon3() -> ExactFrame<Q3> {
    polygon_frame(3, 12, cos_pi_6, Q3::from_int(2))
}

/// Square (N = 4) over Q: in the rescaled frame every coordinate is rational.
pub fn exact_polygon4() -> ExactFrame<BigRational> {
    let f = polygon_frame(4, 8, cos_pi_4, Q2::root());
    map_frame(&f, to_rational).expect("square frame is rational")
}

/// Hexagon (N = 6) in Q(√3), with `r² = 2/√3 = (2/3)√3`.
pub fn exact_polygon6() -> ExactFrame<Q3> {
    polygon_frame(6, 12, cos_pi_6, Q3::from_parts(0, 1, 2, 3))
}

/// An exact frame over whichever field its registry entry needs.
#[derive(Clone, Debug)]
pub enum ExactLocal {
    Rational(ExactFrame<BigRational>),
    Sqrt3(ExactFrame<Q3>),
}

impl ExactLocal {
    pub fn name(&self) -> &str {
        match self {
            ExactLocal::Rational(f) => &f.name,
            ExactLocal::Sqrt3(f) => &f.name,
        }
    }

    /// The same frame over Q(√3); rational frames embed unchanged.
    pub fn to_sqrt3(&self) -> ExactFrame<Q3> {
        match self {
            ExactLocal::Rational(f) => map_frame(f, |x| Ok(Q3::rational_part(x.clone())))
                .expect("embedding is total"),
            ExactLocal::Sqrt3(f) => f.clone(),
        }
    }
}

/// Registry of theories with an exact frame: `bit`, `simplex:N`,
/// `polygon:3`, `polygon:4`, `polygon:6` and `boxworld`.
pub fn exact_frame_by_name(name: &str) -> Result<ExactLocal> {
    let missing = || GptError::NoExactForm(name.to_string());
    match name {
        "bit" => Ok(ExactLocal::Rational(exact_bit())),
        "polygon:3" => Ok(ExactLocal::Sqrt3(exact_polygon3())),
        "polygon:4" | "boxworld" => Ok(ExactLocal::Rational(exact_polygon4())),
        "polygon:6" => Ok(ExactLocal::Sqrt3(exact_polygon6())),
        _ => match name.split_once(':') {
            Some(("simplex", n)) => {
                let n = n.parse::<usize>().map_err(|_| GptError::UnknownTheory(name.into()))?;
                Ok(ExactLocal::Rational(exact_simplex(n)?))
            }
            Some(("polygon", _)) | Some(("ball", _)) => Err(missing()),
            _ => Err(GptError::UnknownTheory(name.to_string())),
        },
    }
}

/// Float relative error between an exact frame and a zoo theory with
/// matching labels: max over states and labelled effects.
pub fn frame_mismatch<F: Scalar>(
    frame: &ExactFrame<F>,
    theory: &TheorySpec,
    labelled_effects: &[GptVector],
) -> Result<f64> {
    let verts = theory
        .states
        .vertices()
        .ok_or_else(|| GptError::param("frame comparison needs a polytope theory"))?;
    let mut worst: f64 = 0.0;
    for (z, w) in frame.states.iter().zip(verts) {
        worst = worst.max(frame.state_to_float(z)?.max_abs_diff(w)?);
    }
    for (e, w) in frame.effects.iter().zip(labelled_effects) {
        worst = worst.max(frame.effect_to_float(e)?.max_abs_diff(w)?);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_and_triangle_are_exactly_distinguishing() {
        assert!(exact_bit().is_distinguishing());
        assert!(exact_polygon3().is_distinguishing());
        for n in 1..=6 {
            assert!(exact_simplex(n).unwrap().is_distinguishing(), "n = {n}");
        }
    }

    #[test]
    fn square_and_hexagon_are_not_distinguishing_but_normalized() {
        for table in [
            exact_polygon4()
                .pairing_table()
                .into_iter()
                .flatten()
                .map(|x| x.to_f64())
                .collect::<Vec<_>>(),
            exact_polygon6()
                .pairing_table()
                .into_iter()
                .flatten()
                .map(|x| x.to_f64())
                .collect(),
        ] {
            assert!(table.iter().all(|&p| (-1e-15..=1.0 + 1e-15).contains(&p)));
        }
        // square: ε_0 = ½(1, 1, 1) in the rescaled frame
        let sq = exact_polygon4();
        assert_eq!(sq.effects[0], vec![rat(1, 2), rat(1, 2), rat(1, 2)]);
    }

    #[test]
    fn frames_match_float_zoo() {
        for (n, mismatch) in [
            (3, frame_mismatch(&exact_polygon3(), &zoo::polygon_theory(3).unwrap(), &zoo::polygon_effects(3).unwrap())),
            (4, frame_mismatch(&exact_polygon4(), &zoo::polygon_theory(4).unwrap(), &zoo::polygon_effects(4).unwrap())),
            (6, frame_mismatch(&exact_polygon6(), &zoo::polygon_theory(6).unwrap(), &zoo::polygon_effects(6).unwrap())),
        ] {
            assert!(mismatch.unwrap() < 1e-12, "polygon {n}");
        }
        for n in 1..=5 {
            let m = frame_mismatch(
                &exact_simplex(n).unwrap(),
                &zoo::classical_simplex(n).unwrap(),
                &zoo::simplex_effects(n),
            )
            .unwrap();
            assert!(m < 1e-12, "simplex {n}: {m}");
        }
        let m = frame_mismatch(&exact_bit(), &zoo::classical_simplex(1).unwrap(), &zoo::simplex_effects(1));
        assert_eq!(m.unwrap(), 0.0);
    }

    #[test]
    fn generator_lists_line_up_with_zoo() {
        assert_eq!(exact_polygon3().generators.len(), 8);
        assert_eq!(exact_polygon4().generators.len(), 6);
        assert_eq!(exact_simplex(2).unwrap().generators.len(), 8);
    }

    #[test]
    fn exact_membership() {
        let sq = exact_polygon4();
        assert!(sq.contains(&[rat(1, 1), rat(0, 1), rat(0, 1)]).unwrap());
        assert!(sq.contains(&[rat(1, 1), rat(1, 2), rat(1, 2)]).unwrap());
        assert!(!sq.contains(&[rat(1, 1), rat(1, 2), rat(2, 3)]).unwrap());
        let tri = exact_polygon3();
        // the centroid, and a point just outside an edge
        assert!(tri.contains(&[Q3::one(), Q3::zero(), Q3::zero()]).unwrap());
        assert!(!tri.contains(&[Q3::one(), Q3::from_ratio(-51, 100), Q3::zero()]).unwrap());
    }
}
