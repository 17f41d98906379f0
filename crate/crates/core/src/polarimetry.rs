//! Mueller matrix routes.
//!
//! Three independent ways of obtaining the Mueller matrix of a sample:
//!
//! * directly from its Jones matrix, `M_μν = ½ tr(σ_μ T σ_ν T†)`;
//! * the conventional four-probe scheme, `M = V' V⁻¹`;
//! * the single-shot scheme: a radially polarized probe, 16 intensities
//!   `I_αβ = tr[ρ' (E_α ⊗ E_β)]`, two-DoF Stokes `S' = F I Fᵀ`, and
//!   `M_μν = S'_μν λ_ν`.
//!
//! The postselected polarization basis of the single-shot scheme is
//! `{e_x, e_y, e_+, e_R}` while the analyzers use `{e_x, e_y, e_+, e_L}`.
//! No correction is needed for that: `S' = F I Fᵀ` works on the projections
//! `E_α ⊗ E_β` directly and the `λ` signs absorb the conjugation.

use serde::{Deserialize, Serialize};

use crate::algebra::{c, invert4, invert4_with, kron, pauli_set, Complex2x2, Matrix, Real4x4, C64, SINGULAR_DET};
use crate::elements::{apply_to_pol, coeff_f, projector_set, DepolarizingEnsemble};
use crate::error::{Error, Result};
use crate::states::{
    coherency_of, kets, radial_beam, stokes_of, CoherencyMatrix2, CoherencyMatrix4, StokesVector,
    TwoDofStokes, LAMBDA,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuellerMatrix(pub Real4x4);

impl MuellerMatrix {
    pub fn identity() -> Self {
        Self(Real4x4::identity())
    }

    pub fn max_abs_error(&self, reference: &Self) -> f64 {
        self.0.max_abs_diff(&reference.0)
    }

    pub fn frobenius_error(&self, reference: &Self) -> f64 {
        self.0.frobenius_diff(&reference.0)
    }

    pub fn apply(&self, s: &StokesVector) -> StokesVector {
        StokesVector(self.0.apply(&s.0))
    }
}

/// `M_μν = ½ tr(σ_μ T σ_ν T†)`.
pub fn mueller_from_jones(t: &Complex2x2) -> MuellerMatrix {
    let s = pauli_set();
    let td = t.dagger();
    let mut m = Real4x4::zero();
    let scale = t.frobenius().powi(2).max(1.0);
    for nu in 0..4 {
        let inner = *t * s[nu] * td;
        for mu in 0..4 {
            let z = (s[mu] * inner).trace() * 0.5;
            debug_assert!(!z.is_finite() || z.im.abs() <= 1e-12 * scale, "Mueller element has imaginary part {}", z.im);
            m[(mu, nu)] = z.re;
        }
    }
    MuellerMatrix(m)
}

/// Ensemble average `Σ_k w_k M(T_k)`, summed in member order.
pub fn mueller_depolarizing(ens: &DepolarizingEnsemble) -> MuellerMatrix {
    let m = ens
        .members()
        .iter()
        .fold(Real4x4::zero(), |acc, (w, t)| acc + mueller_from_jones(t).0.scale(*w));
    MuellerMatrix(m)
}

/// Four probe polarizations and the matrix `V` with columns `S(α)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeSet {
    probes: [[C64; 2]; 4],
    v: Real4x4,
}

impl ProbeSet {
    pub fn new(probes: [[C64; 2]; 4]) -> Result<Self> {
        let mut v = Real4x4::zero();
        for (a, p) in probes.iter().enumerate() {
            let s = stokes_of(&CoherencyMatrix2::pure(*p));
            for nu in 0..4 {
                v[(nu, a)] = s.0[nu];
            }
        }
        let det = crate::algebra::det4(&v);
        if !(det.abs() >= SINGULAR_DET) {
            return Err(Error::SingularMatrix { det, threshold: SINGULAR_DET });
        }
        Ok(Self { probes, v })
    }

    pub fn probes(&self) -> &[[C64; 2]; 4] {
        &self.probes
    }

    pub fn v(&self) -> &Real4x4 {
        &self.v
    }
}

/// Horizontal, vertical, diagonal and left-circular probes.
pub fn conventional_probe_set() -> ProbeSet {
    ProbeSet::new([kets::zero(), kets::one(), kets::plus(), kets::left()])
        .expect("canonical probes are independent")
}

fn output_stokes(jones: &[(f64, Complex2x2)], probe: &[C64; 2]) -> StokesVector {
    let rho = CoherencyMatrix2::pure(*probe);
    let mut acc = Complex2x2::zero();
    for (w, t) in jones {
        acc = acc + (*t * rho.0 * t.dagger()).scale(c(*w, 0.0));
    }
    stokes_of(&CoherencyMatrix2(acc))
}

fn reconstruct_from_outputs(members: &[(f64, Complex2x2)], probes: &ProbeSet) -> Result<MuellerMatrix> {
    let mut vp = Real4x4::zero();
    for (a, p) in probes.probes.iter().enumerate() {
        let s = output_stokes(members, p);
        for mu in 0..4 {
            vp[(mu, a)] = s.0[mu];
        }
    }
    Ok(MuellerMatrix(vp * invert4(&probes.v)?))
}

/// Conventional scheme: probe sequentially, `M = V' V⁻¹`.
pub fn conventional_reconstruct(t: &Complex2x2, probes: &ProbeSet) -> Result<MuellerMatrix> {
    reconstruct_from_outputs(&[(1.0, *t)], probes)
}

pub fn conventional_reconstruct_ensemble(
    ens: &DepolarizingEnsemble,
    probes: &ProbeSet,
) -> Result<MuellerMatrix> {
    reconstruct_from_outputs(ens.members(), probes)
}

/// Analyzer intensities of the conventional scheme: entry `(β, α)` is the
/// power of probe `α` after the sample, projected on analyzer state `β`.
pub fn conventional_intensities(ens: &DepolarizingEnsemble, probes: &ProbeSet) -> Real4x4 {
    let e = projector_set();
    let mut out = Real4x4::zero();
    for (a, p) in probes.probes.iter().enumerate() {
        let rho = CoherencyMatrix2::pure(*p);
        for (w, t) in ens.members() {
            let r = *t * rho.0 * t.dagger();
            for b in 0..4 {
                out[(b, a)] += w * (r * e[b]).trace().re;
            }
        }
    }
    out
}

/// Conventional scheme from measured analyzer intensities: `V' = F I`.
pub fn conventional_from_intensities(intensities: &Real4x4, probes: &ProbeSet) -> Result<MuellerMatrix> {
    let vp = coeff_f() * *intensities;
    Ok(MuellerMatrix(vp * invert4(&probes.v)?))
}

/// The 16 intensities `I_αβ`, α polarization analyzer, β spatial mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntensityMatrix(pub Real4x4);

impl IntensityMatrix {
    pub fn transmitted_power(&self) -> f64 {
        let i = &self.0;
        i[(0, 0)] + i[(0, 1)] + i[(1, 0)] + i[(1, 1)]
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0 .0.iter().flatten().all(|&x| x >= 0.0)
    }
}

/// `I_αβ = tr[ρ (E_α ⊗ E_β)]`.
pub fn abstract_intensities(rho: &CoherencyMatrix4) -> IntensityMatrix {
    let e = projector_set();
    IntensityMatrix(Real4x4::from_fn(|a, b| (rho.0 * kron(&e[a], &e[b])).trace().re))
}

/// `S_μν = [F I Fᵀ]_μν`.
pub fn intensities_to_two_dof_stokes(i: &IntensityMatrix) -> TwoDofStokes {
    let f = coeff_f();
    TwoDofStokes(f * i.0 * f.transpose())
}

/// The same map written out element by element.
pub fn two_dof_stokes_expanded(i: &IntensityMatrix) -> TwoDofStokes {
    let m = &i.0;
    let i_ = |a: usize, b: usize| m[(a, b)];
    let base = i_(0, 0) + i_(0, 1) + i_(1, 0) + i_(1, 1);
    let s = [
        [
            base,
            -i_(0, 0) - i_(0, 1) + 2.0 * i_(0, 2) - i_(1, 0) - i_(1, 1) + 2.0 * i_(1, 2),
            -i_(0, 0) - i_(0, 1) + 2.0 * i_(0, 3) - i_(1, 0) - i_(1, 1) + 2.0 * i_(1, 3),
            i_(0, 0) - i_(0, 1) + i_(1, 0) - i_(1, 1),
        ],
        [
            -base + 2.0 * (i_(2, 0) + i_(2, 1)),
            i_(0, 0) + i_(0, 1) - 2.0 * i_(0, 2) + i_(1, 0) + i_(1, 1)
                - 2.0 * (i_(1, 2) + i_(2, 0) + i_(2, 1) - 2.0 * i_(2, 2)),
            i_(0, 0) + i_(0, 1) - 2.0 * i_(0, 3) + i_(1, 0) + i_(1, 1)
                - 2.0 * (i_(1, 3) + i_(2, 0) + i_(2, 1) - 2.0 * i_(2, 3)),
            -i_(0, 0) + i_(0, 1) - i_(1, 0) + i_(1, 1) + 2.0 * i_(2, 0) - 2.0 * i_(2, 1),
        ],
        [
            -base + 2.0 * (i_(3, 0) + i_(3, 1)),
            i_(0, 0) + i_(0, 1) - 2.0 * i_(0, 2) + i_(1, 0) + i_(1, 1)
                - 2.0 * (i_(1, 2) + i_(3, 0) + i_(3, 1) - 2.0 * i_(3, 2)),
            i_(0, 0) + i_(0, 1) - 2.0 * i_(0, 3) + i_(1, 0) + i_(1, 1)
                - 2.0 * (i_(1, 3) + i_(3, 0) + i_(3, 1) - 2.0 * i_(3, 3)),
            -i_(0, 0) + i_(0, 1) - i_(1, 0) + i_(1, 1) + 2.0 * i_(3, 0) - 2.0 * i_(3, 1),
        ],
        [
            i_(0, 0) + i_(0, 1) - i_(1, 0) - i_(1, 1),
            -i_(0, 0) - i_(0, 1) + 2.0 * i_(0, 2) + i_(1, 0) + i_(1, 1) - 2.0 * i_(1, 2),
            -i_(0, 0) - i_(0, 1) + 2.0 * i_(0, 3) + i_(1, 0) + i_(1, 1) - 2.0 * i_(1, 3),
            i_(0, 0) - i_(0, 1) - i_(1, 0) + i_(1, 1),
        ],
    ];
    TwoDofStokes(Matrix(s))
}

/// `M_μν = S'_μν λ_ν`: flips the sign of column ν = 2.
pub fn two_dof_reconstruct(s: &TwoDofStokes) -> MuellerMatrix {
    MuellerMatrix(Real4x4::from_fn(|mu, nu| s.0[(mu, nu)] * LAMBDA[nu]))
}

/// Radial probe through `T`: `ρ' = (T ⊗ I) ρ_radial (T ⊗ I)†`.
pub fn probed_radial_state(t: &Complex2x2) -> CoherencyMatrix4 {
    coherency_of(&apply_to_pol(t, &radial_beam()))
}

pub fn probed_radial_ensemble(ens: &DepolarizingEnsemble) -> CoherencyMatrix4 {
    let parts: Vec<(f64, CoherencyMatrix4)> =
        ens.members().iter().map(|(w, t)| (*w, probed_radial_state(t))).collect();
    CoherencyMatrix4::mixture(parts.iter().map(|(w, r)| (*w, r)))
}

/// Single-shot reconstruction on ideal (abstract) intensities.
pub fn single_shot_mueller(t: &Complex2x2) -> MuellerMatrix {
    let i = abstract_intensities(&probed_radial_state(t));
    two_dof_reconstruct(&intensities_to_two_dof_stokes(&i))
}

/// Ordinary least squares over `(input, output)` Stokes pairs:
/// `M = (Σ S' Sᵀ)(Σ S Sᵀ)⁻¹`.
pub fn least_squares_mueller(pairs: &[(StokesVector, StokesVector)]) -> Result<MuellerMatrix> {
    let mut gram = Real4x4::zero();
    let mut cross = Real4x4::zero();
    for (s_in, s_out) in pairs {
        for i in 0..4 {
            for j in 0..4 {
                gram[(i, j)] += s_in.0[i] * s_in.0[j];
                cross[(i, j)] += s_out.0[i] * s_in.0[j];
            }
        }
    }
    let inv = invert4_with(&gram, SINGULAR_DET).map_err(|e| match e {
        Error::SingularMatrix { det, .. } => Error::RankDeficient { det },
        other => other,
    })?;
    Ok(MuellerMatrix(cross * inv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{det4, pauli};
    use crate::elements::{converter, projector, rotated, Retardance};
    use crate::sampling::{passive_jones, rng_from_seed};
    use std::f64::consts::FRAC_PI_8;

    #[test]
    fn mueller_examples() {
        assert!(mueller_from_jones(&Complex2x2::identity()).0.approx_eq(&Real4x4::identity(), 1e-15));
        // Pauli ordering: a horizontal HWP keeps S0 and S3 (H/V), flips S1 and S2.
        let hwp = mueller_from_jones(&converter(Retardance::Pi));
        assert!(hwp.0.approx_eq(&Real4x4::diag([1.0, -1.0, -1.0, 1.0]), 1e-15));
        let pol = mueller_from_jones(&projector(0).unwrap());
        let mut want = Real4x4::zero();
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            want[(i, j)] = 0.5;
        }
        assert!(pol.0.approx_eq(&want, 1e-15));
    }

    #[test]
    fn depolarizing_examples() {
        let t = rotated(&converter(Retardance::HalfPi), 0.3);
        let single = mueller_depolarizing(&DepolarizingEnsemble::single(t));
        assert!(single.0.approx_eq(&mueller_from_jones(&t).0, 0.0));
        let ens = DepolarizingEnsemble::new(vec![(0.5, Complex2x2::identity()), (0.5, pauli(3).unwrap())])
            .unwrap();
        let m = mueller_depolarizing(&ens);
        assert!(m.0.approx_eq(&Real4x4::diag([1.0, 0.0, 0.0, 1.0]), 1e-15));
    }

    #[test]
    fn canonical_probe_columns() {
        let p = conventional_probe_set();
        assert_eq!(p.v().col(0), [1.0, 0.0, 0.0, 1.0]);
        assert_eq!(p.v().col(1), [1.0, 0.0, 0.0, -1.0]);
        let c2 = p.v().col(2);
        let c3 = p.v().col(3);
        for (got, want) in c2.iter().zip([1.0, 1.0, 0.0, 0.0]).chain(c3.iter().zip([1.0, 0.0, 1.0, 0.0])) {
            assert!((got - want).abs() < 1e-15);
        }
        assert!((det4(p.v()) + 2.0).abs() < 1e-14);
    }

    #[test]
    fn degenerate_probes_rejected() {
        let r = ProbeSet::new([kets::zero(), kets::one(), kets::plus(), kets::minus()]);
        assert!(matches!(r, Err(Error::SingularMatrix { .. })));
    }

    #[test]
    fn conventional_matches_oracle() {
        let probes = conventional_probe_set();
        let m = conventional_reconstruct(&Complex2x2::identity(), &probes).unwrap();
        assert!(m.0.approx_eq(&Real4x4::identity(), 1e-14));
        let m = conventional_reconstruct(&converter(Retardance::Pi), &probes).unwrap();
        assert!(m.0.approx_eq(&Real4x4::diag([1.0, -1.0, -1.0, 1.0]), 1e-14));
        let mut rng = rng_from_seed(11);
        for _ in 0..50 {
            let t = passive_jones(&mut rng);
            let m = conventional_reconstruct(&t, &probes).unwrap();
            assert!(m.max_abs_error(&mueller_from_jones(&t)) < 1e-10);
            let i = conventional_intensities(&DepolarizingEnsemble::single(t), &probes);
            let m2 = conventional_from_intensities(&i, &probes).unwrap();
            assert!(m2.max_abs_error(&mueller_from_jones(&t)) < 1e-10);
        }
    }

    #[test]
    fn printed_formulas_examples() {
        let rho = coherency_of(&radial_beam());
        let i = abstract_intensities(&rho);
        let s = two_dof_stokes_expanded(&i);
        assert!(s.0.approx_eq(&Real4x4::diag(LAMBDA), 1e-15));
        let m = &i.0;
        assert_eq!(s.0[(0, 0)], m[(0, 0)] + m[(0, 1)] + m[(1, 0)] + m[(1, 1)]);
        assert!((i.transmitted_power() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sign_flip_examples() {
        let m = two_dof_reconstruct(&TwoDofStokes(Real4x4::diag(LAMBDA)));
        assert_eq!(m.0, Real4x4::identity());
        let t = rotated(&converter(Retardance::Pi), FRAC_PI_8);
        let oracle = mueller_from_jones(&t);
        let s = TwoDofStokes(Real4x4::from_fn(|mu, nu| oracle.0[(mu, nu)] * LAMBDA[nu]));
        assert_eq!(two_dof_reconstruct(&s).0, oracle.0);
        assert!(single_shot_mueller(&t).max_abs_error(&oracle) < 1e-10);
    }

    #[test]
    fn least_squares_examples() {
        let probes = conventional_probe_set();
        let mut rng = rng_from_seed(12);
        let t = passive_jones(&mut rng);
        let oracle = mueller_from_jones(&t);
        let pairs: Vec<_> = probes
            .probes()
            .iter()
            .map(|p| {
                let s_in = stokes_of(&CoherencyMatrix2::pure(*p));
                (s_in, oracle.apply(&s_in))
            })
            .collect();
        let conv = conventional_reconstruct(&t, &probes).unwrap();
        assert!(least_squares_mueller(&pairs).unwrap().max_abs_error(&conv) < 1e-12);
        let doubled: Vec<_> = pairs.iter().chain(pairs.iter()).copied().collect();
        assert!(least_squares_mueller(&doubled).unwrap().max_abs_error(&conv) < 1e-12);
        let deficient = vec![pairs[0], pairs[0], pairs[1], pairs[1]];
        assert!(matches!(least_squares_mueller(&deficient), Err(Error::RankDeficient { .. })));
    }
}
