//! Beam states in the two-qubit (polarization ⊗ spatial mode) picture.
//!
//! A first-order beam `E(r) = Σ A_ij e_i ψ_j(r)` is stored as the amplitude
//! vector `[A00, A01, A10, A11]`, where `i` indexes the polarization basis
//! `{e_x, e_y}` and `j` the spatial basis `{ψ10, ψ01}`.
//!
//! **Stokes ordering.** Stokes components follow the Pauli labels
//! `σ0 = I, σ1 = X, σ2 = Y, σ3 = Z`: `S1` is the diagonal/antidiagonal
//! contrast, `S2` the circular contrast and `S3` the horizontal/vertical
//! contrast. This is *not* the classical-optics layout where `S1` is H/V.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::algebra::{c, hermitian_eigenvalues4, kron, pauli_set, Complex2x2, Complex4x4, Real4x4, C64};

/// Eigenvalue floor used for positive-semidefinite checks.
pub const PSD_FLOOR: f64 = -1e-10;

/// Diagonal of the two-DoF Stokes matrix of the radially polarized beam.
pub const LAMBDA: [f64; 4] = [1.0, 1.0, -1.0, 1.0];

/// Amplitudes `[A00, A01, A10, A11]` of a first-order beam.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitAmplitudes(pub [C64; 4]);

impl TwoQubitAmplitudes {
    pub fn new(a: [C64; 4]) -> Self {
        Self(a)
    }

    pub fn zero() -> Self {
        Self([c(0.0, 0.0); 4])
    }

    /// `pol ⊗ spa` for a polarization Jones vector and a spatial mode vector.
    pub fn product(pol: [C64; 2], spa: [C64; 2]) -> Self {
        Self([pol[0] * spa[0], pol[0] * spa[1], pol[1] * spa[0], pol[1] * spa[1]])
    }

    /// Reshape into the 2×2 amplitude matrix `A` with rows indexed by polarization.
    pub fn amplitude_matrix(&self) -> Complex2x2 {
        let a = self.0;
        Complex2x2::new(a[0], a[1], a[2], a[3])
    }

    pub fn from_amplitude_matrix(m: &Complex2x2) -> Self {
        Self([m.0[0][0], m.0[0][1], m.0[1][0], m.0[1][1]])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= 1e-12
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm_sqr().sqrt();
        self.scale(c(1.0 / n, 0.0))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(std::array::from_fn(|k| self.0[k] + other.0[k]))
    }

    pub fn apply(&self, op: &Complex4x4) -> Self {
        Self(op.apply(&self.0))
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    /// `min_φ ‖self − e^{iφ} other‖`.
    pub fn distance_up_to_phase(&self, other: &Self) -> f64 {
        let ov = other.inner(self);
        let phase = if ov.norm() > 0.0 { ov / ov.norm() } else { c(1.0, 0.0) };
        let aligned = other.scale(phase);
        self.0
            .iter()
            .zip(aligned.0.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// The radially polarized beam `(e_x ψ10 + e_y ψ01)/√2`.
pub fn radial_beam() -> TwoQubitAmplitudes {
    let h = c(FRAC_1_SQRT_2, 0.0);
    let z = c(0.0, 0.0);
    TwoQubitAmplitudes([h, z, z, h])
}

/// Full 4×4 polarization-spatial coherency matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherencyMatrix4(pub Complex4x4);

/// Reduced 2×2 coherency matrix of a single degree of freedom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherencyMatrix2(pub Complex2x2);

impl CoherencyMatrix4 {
    pub fn power(&self) -> f64 {
        self.0.trace().re
    }

    pub fn is_hermitian(&self) -> bool {
        self.0.is_hermitian(1e-12)
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        hermitian_eigenvalues4(&self.0)
    }

    pub fn is_psd(&self) -> bool {
        self.eigenvalues()[0] >= PSD_FLOOR
    }

    /// Weighted sum `Σ w_k ρ_k`.
    pub fn mixture<'a>(parts: impl IntoIterator<Item = (f64, &'a CoherencyMatrix4)>) -> Self {
        let mut acc = Complex4x4::zero();
        for (w, rho) in parts {
            acc = acc + rho.0.scale(c(w, 0.0));
        }
        Self(acc)
    }

    /// `(T ⊗ W) ρ (T ⊗ W)†`.
    pub fn transformed(&self, op: &Complex4x4) -> Self {
        Self(*op * self.0 * op.dagger())
    }

    /// Inverse Liouville map `ρ = ¼ Σ S_μν σ_μ ⊗ σ_ν`.
    pub fn from_two_dof_stokes(s: &TwoDofStokes) -> Self {
        let p = pauli_set();
        let mut acc = Complex4x4::zero();
        for mu in 0..4 {
            for nu in 0..4 {
                acc = acc + kron(&p[mu], &p[nu]).scale(c(s.0[(mu, nu)] / 4.0, 0.0));
            }
        }
        Self(acc)
    }
}

impl CoherencyMatrix2 {
    pub fn power(&self) -> f64 {
        self.0.trace().re
    }

    pub fn is_psd(&self) -> bool {
        self.0.hermitian_eigenvalues().0 >= PSD_FLOOR
    }

    /// Pure state `|v⟩⟨v|`.
    pub fn pure(v: [C64; 2]) -> Self {
        Self(Complex2x2::from_fn(|i, j| v[i] * v[j].conj()))
    }

    /// Inverse Liouville map `ρ = ½ Σ S_μ σ_μ`.
    pub fn from_stokes(s: &StokesVector) -> Self {
        let p = pauli_set();
        let mut acc = Complex2x2::zero();
        for (mu, sigma) in p.iter().enumerate() {
            acc = acc + sigma.scale(c(s.0[mu] / 2.0, 0.0));
        }
        Self(acc)
    }
}

/// Single-DoF Stokes vector `(S0, S1, S2, S3)`, Pauli ordering.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StokesVector(pub [f64; 4]);

impl StokesVector {
    pub fn degree_of_polarization(&self) -> f64 {
        let s = self.0;
        (s[1] * s[1] + s[2] * s[2] + s[3] * s[3]).sqrt() / s[0]
    }

    pub fn is_physical(&self) -> bool {
        let s = self.0;
        s[0] >= 0.0 && s[1] * s[1] + s[2] * s[2] + s[3] * s[3] <= s[0] * s[0] + 1e-10
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0.iter().zip(other.0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Two-DoF Stokes parameters `S_μν = tr[ρ (σ_μ ⊗ σ_ν)]`, μ polarization, ν spatial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoDofStokes(pub Real4x4);

impl TwoDofStokes {
    pub fn lambda() -> [f64; 4] {
        LAMBDA
    }

    pub fn power(&self) -> f64 {
        self.0[(0, 0)]
    }
}

/// `ρ = |E⟩⟨E|`.
pub fn coherency_of(e: &TwoQubitAmplitudes) -> CoherencyMatrix4 {
    let a = e.0;
    CoherencyMatrix4(Complex4x4::from_fn(|k, l| a[k] * a[l].conj()))
}

/// Trace over the spatial qubit.
pub fn reduce_pol(rho: &CoherencyMatrix4) -> CoherencyMatrix2 {
    let r = &rho.0;
    CoherencyMatrix2(Complex2x2::from_fn(|i, k| r[(2 * i, 2 * k)] + r[(2 * i + 1, 2 * k + 1)]))
}

/// Trace over the polarization qubit.
pub fn reduce_spa(rho: &CoherencyMatrix4) -> CoherencyMatrix2 {
    let r = &rho.0;
    CoherencyMatrix2(Complex2x2::from_fn(|j, l| r[(j, l)] + r[(2 + j, 2 + l)]))
}

pub fn stokes_of(rho: &CoherencyMatrix2) -> StokesVector {
    let p = pauli_set();
    StokesVector(std::array::from_fn(|mu| (rho.0 * p[mu]).trace().re))
}

pub fn two_dof_stokes(rho: &CoherencyMatrix4) -> TwoDofStokes {
    let p = pauli_set();
    TwoDofStokes(Real4x4::from_fn(|mu, nu| (rho.0 * kron(&p[mu], &p[nu])).trace().re))
}

/// Schmidt coefficients (singular values of the amplitude matrix), largest first.
pub fn schmidt_coefficients(e: &TwoQubitAmplitudes) -> (f64, f64) {
    e.amplitude_matrix().singular_values()
}

/// Common single-qubit kets, valid for either degree of freedom.
pub mod kets {
    use super::*;

    const H: f64 = FRAC_1_SQRT_2;

    pub fn zero() -> [C64; 2] {
        [c(1.0, 0.0), c(0.0, 0.0)]
    }
    pub fn one() -> [C64; 2] {
        [c(0.0, 0.0), c(1.0, 0.0)]
    }
    pub fn plus() -> [C64; 2] {
        [c(H, 0.0), c(H, 0.0)]
    }
    pub fn minus() -> [C64; 2] {
        [c(H, 0.0), c(-H, 0.0)]
    }
    /// `(|0⟩ + i|1⟩)/√2`
    pub fn left() -> [C64; 2] {
        [c(H, 0.0), c(0.0, H)]
    }
    /// `(|0⟩ − i|1⟩)/√2`
    pub fn right() -> [C64; 2] {
        [c(H, 0.0), c(0.0, -H)]
    }

    /// The analyzer basis `{|0⟩, |1⟩, |+⟩, |L⟩}` indexed 0..3.
    pub fn analyzer(mu: usize) -> [C64; 2] {
        [zero(), one(), plus(), left()][mu]
    }
}
