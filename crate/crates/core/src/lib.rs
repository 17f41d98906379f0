//! Mueller-matrix polarimetry with radially polarized probe beams.
//!
//! A radially polarized beam is a maximally entangled state of polarization
//! and first-order transverse modes. Sending it through a sample and
//! measuring all 16 polarization/spatial projections recovers the full
//! Mueller matrix in one shot. This crate models the algebra, the optical
//! bench at element level, and the transverse field maps.
//!
//! ```
//! use radpol::{bench_mueller, Sample};
//! use radpol::elements::ElementKind;
//! use radpol::polarimetry::mueller_from_jones;
//!
//! let t = ElementKind::QuarterWaveConverter { theta: 0.3 }.jones();
//! let measured = bench_mueller(&Sample::Jones(t))?;
//! assert!(measured.max_abs_error(&mueller_from_jones(&t)) < 1e-12);
//! # Ok::<(), radpol::Error>(())
//! ```

pub mod acceptance;
pub mod algebra;
pub mod bench_sim;
pub mod elements;
pub mod error;
pub mod fields;
pub mod polarimetry;
pub mod sampling;
pub mod states;

pub use algebra::{Complex2x2, Complex4x4, Real4x4, C64};
pub use bench_sim::{bench_mueller, calibrate, full_bench, noisy_readout, reconstruct, DetectorMap, NoiseSpec, Sample};
pub use elements::{DepolarizingEnsemble, ElementKind};
pub use error::{Error, Result};
pub use polarimetry::{IntensityMatrix, MuellerMatrix};
pub use states::{CoherencyMatrix4, StokesVector, TwoDofStokes, TwoQubitAmplitudes};
