//! Reference computations that bypass the GPT machinery: Hilbert-space
//! traces for qubits and closed-form relativistic kinematics.

use nalgebra::{Complex, DMatrix};

type C = Complex<f64>;

fn pauli(i: usize) -> DMatrix<C> {
    let (o, z, im) = (C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 1.0));
    match i {
        0 => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        1 => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        2 => DMatrix::from_row_slice(2, 2, &[z, -im, im, z]),
        _ => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

/// `½(I + r·σ)`.
pub fn bloch_operator(r: [f64; 3]) -> DMatrix<C> {
    let mut m = pauli(0);
    for (k, x) in r.iter().enumerate() {
        m += pauli(k + 1) * C::new(*x, 0.0);
    }
    m * C::new(0.5, 0.0)
}

/// `tr(ρ_r E_v)` with `ρ_r = ½(I + r·σ)` and the projector `E_v = ½(I + v·σ)`.
pub fn qubit_trace_probability(r: [f64; 3], v: [f64; 3]) -> f64 {
    (bloch_operator(r) * bloch_operator(v)).trace().re
}

/// `tr(ρ (E_a ⊗ E_b))` for a 4×4 density operator.
pub fn two_qubit_trace_probability(rho: &DMatrix<C>, a: [f64; 3], b: [f64; 3]) -> f64 {
    (rho * bloch_operator(a).kronecker(&bloch_operator(b))).trace().re
}

/// Singlet `|ψ⁻⟩⟨ψ⁻|` built from its ket.
pub fn singlet_density() -> DMatrix<C> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = DMatrix::from_column_slice(
        4,
        1,
        &[C::new(0.0, 0.0), C::new(s, 0.0), C::new(-s, 0.0), C::new(0.0, 0.0)],
    );
    &psi * psi.adjoint()
}

/// CHSH value of a two-qubit density operator for measurement directions
/// `a0, a1` and `b0, b1`, from `E = tr(ρ (a·σ ⊗ b·σ))`.
pub fn two_qubit_chsh(rho: &DMatrix<C>, a: [[f64; 3]; 2], b: [[f64; 3]; 2]) -> f64 {
    let obs = |v: [f64; 3]| {
        let mut m = DMatrix::zeros(2, 2);
        for (k, x) in v.iter().enumerate() {
            m += pauli(k + 1) * C::new(*x, 0.0);
        }
        m
    };
    let e = |x: usize, y: usize| (rho * obs(a[x]).kronecker(&obs(b[y]))).trace().re;
    e(0, 0) + e(0, 1) + e(1, 0) - e(1, 1)
}

/// Rotation angle of the Wigner rotation produced by two perpendicular
/// boosts with Lorentz factors `γ₁`, `γ₂`:
/// `cos θ = (γ₁ + γ₂)/(1 + γ₁γ₂)`.
pub fn perpendicular_wigner_angle(g1: f64, g2: f64) -> f64 {
    ((g1 + g2) / (1.0 + g1 * g2)).clamp(-1.0, 1.0).acos()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthogonal_qubit_states() {
        assert!((qubit_trace_probability([0., 0., 1.], [0., 0., 1.]) - 1.0).abs() < 1e-15);
        assert!(qubit_trace_probability([0., 0., 1.], [0., 0., -1.]).abs() < 1e-15);
        assert!((qubit_trace_probability([1., 0., 0.], [0., 1., 0.]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn singlet_correlations() {
        let rho = singlet_density();
        assert!((rho.trace().re - 1.0).abs() < 1e-15);
        // E(a, b) = −a·b, so equal directions never agree
        assert!(two_qubit_trace_probability(&rho, [0., 0., 1.], [0., 0., 1.]).abs() < 1e-15);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = two_qubit_chsh(&rho, [[0., 0., 1.], [1., 0., 0.]], [[s, 0., s], [-s, 0., s]]);
        assert!((v.abs() - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    }
}
