//! Fixtures shared by the benchmarks in `benches/`.

use radpol::sampling::{passive_jones, rng_from_seed};
use radpol::Complex2x2;

/// `n` reproducible passive Jones matrices.
pub fn passive_samples(n: usize, seed: u64) -> Vec<Complex2x2> {
    let mut rng = rng_from_seed(seed);
    (0..n).map(|_| passive_jones(&mut rng)).collect()
}

#[cfg(test)]
mod tests {
    #[test]
    fn fixtures_are_reproducible() {
        assert_eq!(super::passive_samples(4, 1), super::passive_samples(4, 1));
    }
}
