//! Single-qubit optical elements.
//!
//! The same matrices model wave plates acting on polarization and
//! cylindrical-lens mode converters acting on the first-order spatial modes.
//! [`LocalOp`] tags a matrix with the degree of freedom it acts on so that a
//! wave plate cannot be applied to the spatial qubit by accident.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};
use std::marker::PhantomData;

use serde::{Deserialize, Serialize};

use crate::algebra::{c, invert4, kron, pauli_set, Complex2x2, Complex4x4, Real4x4, C64};
use crate::error::{Error, Result};
use crate::states::{kets, TwoQubitAmplitudes};

/// Retardance of a mode converter / wave plate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Retardance {
    /// Half-wave plate, π-converter.
    Pi,
    /// Quarter-wave plate, π/2-converter.
    HalfPi,
}

/// Converter with its axis horizontal, global phase included:
/// `U_π = e^{−iπ/2} diag(1, −1)`, `U_{π/2} = e^{−iπ/4} diag(1, i)`.
pub fn converter(phase: Retardance) -> Complex2x2 {
    match phase {
        Retardance::Pi => {
            let g = C64::from_polar(1.0, -FRAC_PI_2);
            Complex2x2::diag([g, -g])
        }
        Retardance::HalfPi => {
            let g = C64::from_polar(1.0, -FRAC_PI_4);
            Complex2x2::diag([g, g * c(0.0, 1.0)])
        }
    }
}

/// Rotation matrix `D(θ)`.
pub fn rotation(theta: f64) -> Complex2x2 {
    let (s, co) = theta.sin_cos();
    Complex2x2::new(c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0))
}

/// `D(θ) U D(−θ)`.
pub fn rotated(u: &Complex2x2, theta: f64) -> Complex2x2 {
    rotation(theta) * *u * rotation(-theta)
}

/// Projector `E_μ = |μ⟩⟨μ|` over `{|0⟩, |1⟩, |+⟩, |L⟩}`.
pub fn projector(mu: usize) -> Result<Complex2x2> {
    if mu > 3 {
        return Err(Error::IndexOutOfRange { index: mu, max: 3 });
    }
    let v = kets::analyzer(mu);
    Ok(Complex2x2::from_fn(|i, j| v[i] * v[j].conj()))
}

pub fn projector_set() -> [Complex2x2; 4] {
    std::array::from_fn(|mu| projector(mu).expect("mu < 4"))
}

/// `g_μα = tr(E_μ σ_α) / 2`.
pub fn coeff_g() -> Real4x4 {
    let e = projector_set();
    let s = pauli_set();
    Real4x4::from_fn(|mu, a| (e[mu] * s[a]).trace().re / 2.0)
}

/// `F = G⁻¹`, so that `σ_μ = Σ_α f_μα E_α`.
pub fn coeff_f() -> Real4x4 {
    invert4(&coeff_g()).expect("the analyzer projectors are linearly independent")
}

/// `E_2` or `E_3` realized as a rotated converter followed by `E_0`.
pub fn projector_via_converter(mu: usize) -> Result<Complex2x2> {
    let u = match mu {
        2 => rotated(&converter(Retardance::Pi), FRAC_PI_8),
        3 => rotated(&converter(Retardance::HalfPi), FRAC_PI_4),
        _ => return Err(Error::IndexOutOfRange { index: mu, max: 3 }),
    };
    Ok(u.dagger() * projector(0)? * u)
}

/// `(T ⊗ I₂)|E⟩`.
pub fn apply_to_pol(t: &Complex2x2, e: &TwoQubitAmplitudes) -> TwoQubitAmplitudes {
    TwoQubitAmplitudes::from_amplitude_matrix(&(*t * e.amplitude_matrix()))
}

/// `(I₂ ⊗ W)|E⟩`, i.e. `A' = A Wᵀ`.
pub fn apply_to_spa(w: &Complex2x2, e: &TwoQubitAmplitudes) -> TwoQubitAmplitudes {
    TwoQubitAmplitudes::from_amplitude_matrix(&(e.amplitude_matrix() * w.transpose()))
}

/// Degree of freedom marker.
pub trait Dof: Copy + std::fmt::Debug {
    const NAME: &'static str;
    fn embed(m: &Complex2x2) -> Complex4x4;
    fn act(m: &Complex2x2, e: &TwoQubitAmplitudes) -> TwoQubitAmplitudes;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Polarization;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Spatial;

impl Dof for Polarization {
    const NAME: &'static str = "polarization";
    fn embed(m: &Complex2x2) -> Complex4x4 {
        kron(m, &Complex2x2::identity())
    }
    fn act(m: &Complex2x2, e: &TwoQubitAmplitudes) -> TwoQubitAmplitudes {
        apply_to_pol(m, e)
    }
}

impl Dof for Spatial {
    const NAME: &'static str = "spatial";
    fn embed(m: &Complex2x2) -> Complex4x4 {
        kron(&Complex2x2::identity(), m)
    }
    fn act(m: &Complex2x2, e: &TwoQubitAmplitudes) -> TwoQubitAmplitudes {
        apply_to_spa(m, e)
    }
}

/// A 2×2 operator bound to one degree of freedom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalOp<D: Dof> {
    matrix: Complex2x2,
    _dof: PhantomData<D>,
}

pub type PolOp = LocalOp<Polarization>;
pub type SpaOp = LocalOp<Spatial>;

impl<D: Dof> LocalOp<D> {
    pub fn new(matrix: Complex2x2) -> Self {
        Self { matrix, _dof: PhantomData }
    }

    pub fn matrix(&self) -> &Complex2x2 {
        &self.matrix
    }

    pub fn apply(&self, e: &TwoQubitAmplitudes) -> TwoQubitAmplitudes {
        D::act(&self.matrix, e)
    }

    pub fn embedded(&self) -> Complex4x4 {
        D::embed(&self.matrix)
    }

    /// `next` applied after `self`.
    pub fn then(&self, next: &Self) -> Self {
        Self::new(next.matrix * self.matrix)
    }
}

/// A sample or bench element, as it appears in configuration files.
///
/// Angles are radians; the fast axis / transmission axis is measured from
/// the horizontal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ElementKind {
    HalfWaveConverter { theta: f64 },
    QuarterWaveConverter { theta: f64 },
    /// Optical rotator, `D(θ)`.
    Rotator { theta: f64 },
    /// Ideal linear polarizer, `D(θ) E_0 D(−θ)`.
    Polarizer { theta: f64 },
    CustomJones { jones: Complex2x2 },
}

impl ElementKind {
    pub fn jones(&self) -> Complex2x2 {
        match *self {
            ElementKind::HalfWaveConverter { theta } => rotated(&converter(Retardance::Pi), theta),
            ElementKind::QuarterWaveConverter { theta } => {
                rotated(&converter(Retardance::HalfPi), theta)
            }
            ElementKind::Rotator { theta } => rotation(theta),
            ElementKind::Polarizer { theta } => {
                rotated(&projector(0).expect("E0 exists"), theta)
            }
            ElementKind::CustomJones { jones } => jones,
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            ElementKind::HalfWaveConverter { theta }
            | ElementKind::QuarterWaveConverter { theta }
            | ElementKind::Rotator { theta }
            | ElementKind::Polarizer { theta } => theta.is_finite(),
            ElementKind::CustomJones { jones } => jones.is_finite(),
        }
    }
}

/// Compose elements in traversal order.
///
/// `[a, b]` means light crosses `a` first, so the result is `T_b · T_a`.
/// For example a horizontal polarizer followed by a half-wave plate at
/// 22.5° maps `e_x` to `−i e_+`, while the reverse order gives `−i e_x / √2`.
pub fn compose(elements: &[ElementKind]) -> Complex2x2 {
    elements
        .iter()
        .fold(Complex2x2::identity(), |acc, el| el.jones() * acc)
}

/// Neumaier summation; naive summation of 1e5 equal weights drifts by ~1e-12.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        comp += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    }
    sum + comp
}

/// Stochastic set of Jones matrices modelling a depolarizing sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepolarizingEnsemble {
    members: Vec<(f64, Complex2x2)>,
}

impl DepolarizingEnsemble {
    pub const WEIGHT_TOL: f64 = 1e-12;

    pub fn new(members: Vec<(f64, Complex2x2)>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidEnsemble("ensemble is empty".into()));
        }
        if let Some((w, _)) = members.iter().find(|(w, _)| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidEnsemble(format!("weight {w} is not a nonnegative number")));
        }
        if members.iter().any(|(_, t)| !t.is_finite()) {
            return Err(Error::InvalidEnsemble("non-finite Jones matrix".into()));
        }
        let total = compensated_sum(members.iter().map(|(w, _)| *w));
        if (total - 1.0).abs() > Self::WEIGHT_TOL {
            return Err(Error::InvalidEnsemble(format!("weights sum to {total}, expected 1")));
        }
        Ok(Self { members })
    }

    pub fn single(t: Complex2x2) -> Self {
        Self { members: vec![(1.0, t)] }
    }

    pub fn uniform(jones: Vec<Complex2x2>) -> Result<Self> {
        let n = jones.len();
        if n == 0 {
            return Err(Error::InvalidEnsemble("ensemble is empty".into()));
        }
        let w = 1.0 / n as f64;
        Self::new(jones.into_iter().map(|t| (w, t)).collect())
    }

    /// `n` Haar-random unitaries with uniform weights.
    pub fn haar<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        Self::uniform((0..n).map(|_| crate::sampling::haar_unitary(rng)).collect())
    }

    pub fn members(&self) -> &[(f64, Complex2x2)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}
