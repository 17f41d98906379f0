//! Random states and Jones matrices, plus the reproducible RNG streams.
//!
//! All randomness goes through [`TrialRng`], ChaCha20 keyed by a 64-bit seed.
//! Independent substreams (one per Monte Carlo trial) are selected with the
//! ChaCha stream counter, so trial `k` draws the same numbers no matter how
//! many trials run or in which order they are evaluated.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::algebra::{c, Complex2x2, Complex4x4, C64};
use crate::states::{CoherencyMatrix4, TwoQubitAmplitudes};

pub type TrialRng = ChaCha20Rng;

pub fn rng_from_seed(seed: u64) -> TrialRng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Substream `stream` of the generator keyed by `seed`.
pub fn substream(seed: u64, stream: u64) -> TrialRng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard complex Gaussian, `E|z|² = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre<R: Rng + ?Sized>(rng: &mut R) -> Complex2x2 {
    Complex2x2::from_fn(|_, _| complex_gaussian(rng))
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of
/// `diag(R)` absorbed into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R) -> Complex2x2 {
    let z = ginibre(rng);
    let a0 = z.col(0);
    let a1 = z.col(1);
    let r00 = (a0[0].norm_sqr() + a0[1].norm_sqr()).sqrt();
    let q0 = [a0[0] / r00, a0[1] / r00];
    let r01 = q0[0].conj() * a1[0] + q0[1].conj() * a1[1];
    let v = [a1[0] - r01 * q0[0], a1[1] - r01 * q0[1]];
    let r11 = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    let q1 = [v[0] / r11, v[1] / r11];
    // R's diagonal is already real and positive here, so Q is Haar as is.
    Complex2x2::new(q0[0], q1[0], q0[1], q1[1])
}

/// Random passive Jones matrix: Ginibre entries rescaled so the largest
/// singular value is uniform in (0, 1].
pub fn passive_jones<R: Rng + ?Sized>(rng: &mut R) -> Complex2x2 {
    let z = ginibre(rng);
    let (smax, _) = z.singular_values();
    let target: f64 = 1.0 - rng.random::<f64>();
    z.scale(c(target / smax, 0.0))
}

/// Normalized random amplitude vector (uniform on the unit sphere of C⁴).
pub fn random_state<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitAmplitudes {
    TwoQubitAmplitudes(std::array::from_fn(|_| complex_gaussian(rng))).normalized()
}

/// Random mixed coherency matrix of unit trace: a random mixture of four
/// random pure states.
pub fn random_coherency<R: Rng + ?Sized>(rng: &mut R) -> CoherencyMatrix4 {
    let weights: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>());
    let total: f64 = weights.iter().sum();
    let mut acc = Complex4x4::zero();
    for w in weights {
        let e = random_state(rng);
        acc = acc + crate::states::coherency_of(&e).0.scale(c(w / total, 0.0));
    }
    CoherencyMatrix4(acc)
}

/// Random Hermitian 4×4 matrix (not necessarily PSD).
pub fn random_hermitian4<R: Rng + ?Sized>(rng: &mut R) -> Complex4x4 {
    let z = Complex4x4::from_fn(|_, _| complex_gaussian(rng));
    (z + z.dagger()).scale(c(0.5, 0.0))
}
