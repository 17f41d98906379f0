//! Orchestration: compose the sample, run the schemes, collect metrics.
//!
//! Random numbers come from ChaCha20 (`rand_chacha`), seeded with the config
//! seed. Every trial owns a stream, `stream = level·2⁴⁰ + scheme·2³² + trial`,
//! so results do not depend on how trials are spread over threads. Haar
//! ensembles draw from stream `u64::MAX`.

use std::collections::BTreeMap;

use radpol::bench_sim::{full_bench, noisy_readout_with, reconstruct, DetectorMap, NoiseSpec, Sample};
use radpol::elements::{apply_to_pol, compose, DepolarizingEnsemble};
use radpol::fields::{render, FieldMap};
use radpol::polarimetry::{
    conventional_from_intensities, conventional_intensities, conventional_probe_set, mueller_depolarizing,
    MuellerMatrix,
};
use radpol::sampling::substream;
use radpol::states::radial_beam;
use radpol::{Complex2x2, Real4x4};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, SampleSpec, Scheme};
use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const RNG_NAME: &str = "ChaCha20 (rand_chacha 0.9), one stream per trial";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorMetrics {
    pub max_abs: f64,
    pub frobenius: f64,
}

impl ErrorMetrics {
    pub fn between(m: &MuellerMatrix, truth: &MuellerMatrix) -> Self {
        Self { max_abs: m.max_abs_error(truth), frobenius: m.frobenius_error(truth) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialStats {
    pub trials: usize,
    pub median_frobenius: f64,
    pub p5_frobenius: f64,
    pub p95_frobenius: f64,
    pub median_max_abs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
    pub rng: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRecord {
    pub mueller_true: Real4x4,
    /// Noiseless estimate, or the element-wise mean over noisy trials.
    pub mueller_hat: BTreeMap<String, Real4x4>,
    pub errors: BTreeMap<String, ErrorMetrics>,
    pub trial_stats: BTreeMap<String, TrialStats>,
    /// Noiseless bench readings, present when the bench scheme ran.
    pub detector_map: Option<DetectorMap>,
    /// Largest element-wise difference between noiseless estimates of the schemes run.
    pub cross_scheme_discrepancy: f64,
    pub seed: u64,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub sigma_rel: f64,
    pub scheme: String,
    pub stats: TrialStats,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub mueller_true: Real4x4,
    pub rows: Vec<SweepRow>,
    pub seed: u64,
    pub provenance: Provenance,
}

pub fn config_hash(config: &ExperimentConfig) -> String {
    let canonical = serde_json::to_vec(config).expect("config serializes");
    hex::encode(Sha256::digest(&canonical))
}

fn provenance(config: &ExperimentConfig) -> Provenance {
    Provenance {
        config_hash: config_hash(config),
        seed: config.seed,
        version: VERSION.to_string(),
        rng: RNG_NAME.to_string(),
    }
}

/// The sample as the bench sees it.
pub fn resolve_sample(config: &ExperimentConfig) -> Result<Sample, CliError> {
    Ok(match &config.sample {
        SampleSpec::Elements(els) => Sample::Jones(compose(els)),
        SampleSpec::Ensemble(e) => Sample::Ensemble(e.clone()),
        SampleSpec::Haar { members } => {
            let mut rng = substream(config.seed, u64::MAX);
            Sample::Ensemble(DepolarizingEnsemble::haar(*members, &mut rng)?)
        }
    })
}

fn trial_stream(level: u64, scheme: Scheme, trial: usize) -> u64 {
    let s = match scheme {
        Scheme::Oracle => 0,
        Scheme::Conventional => 1,
        Scheme::TwoDofBench => 2,
        Scheme::All => 3,
    };
    (level << 40) + (s << 32) + trial as u64
}

/// Map `f` over `0..n` on scoped threads; output order is index order.
pub fn parallel_map<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let workers = std::thread::available_parallelism().map_or(1, |p| p.get()).min(n.max(1));
    if workers <= 1 {
        return (0..n).map(f).collect();
    }
    let chunk = n.div_ceil(workers);
    let f = &f;
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| scope.spawn(move || (w * chunk..((w + 1) * chunk).min(n)).map(f).collect::<Vec<T>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

/// Everything a trial needs, computed once.
struct Context {
    ensemble: DepolarizingEnsemble,
    bench: DetectorMap,
    conventional: Real4x4,
}

impl Context {
    fn new(sample: &Sample) -> Self {
        let ensemble = sample.ensemble();
        let conventional = conventional_intensities(&ensemble, &conventional_probe_set());
        Self { bench: full_bench(sample), conventional, ensemble }
    }

    fn noiseless(&self, scheme: Scheme, truth: &MuellerMatrix) -> Result<MuellerMatrix, CliError> {
        Ok(match scheme {
            Scheme::Conventional => conventional_from_intensities(&self.conventional, &conventional_probe_set())?,
            Scheme::TwoDofBench => reconstruct(&self.bench)?,
            _ => *truth,
        })
    }

    fn noisy(&self, scheme: Scheme, noise: &NoiseSpec, seed: u64, stream: u64) -> Result<MuellerMatrix, CliError> {
        let mut rng = substream(seed, stream);
        Ok(match scheme {
            Scheme::Conventional => {
                let mut i = self.conventional;
                for r in 0..4 {
                    for c in 0..4 {
                        i[(r, c)] = noise.perturb(i[(r, c)], &mut rng);
                    }
                }
                conventional_from_intensities(&i, &conventional_probe_set())?
            }
            Scheme::TwoDofBench => reconstruct(&noisy_readout_with(&self.bench, noise, &mut rng)?)?,
            _ => unreachable!("only measured schemes have noisy trials"),
        })
    }
}

/// Linear-interpolation percentile of sorted data, `q` in [0, 1].
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn stats(errors: &[ErrorMetrics]) -> TrialStats {
    let mut fro: Vec<f64> = errors.iter().map(|e| e.frobenius).collect();
    let mut max: Vec<f64> = errors.iter().map(|e| e.max_abs).collect();
    fro.sort_by(f64::total_cmp);
    max.sort_by(f64::total_cmp);
    TrialStats {
        trials: errors.len(),
        median_frobenius: percentile(&fro, 0.5),
        p5_frobenius: percentile(&fro, 0.05),
        p95_frobenius: percentile(&fro, 0.95),
        median_max_abs: percentile(&max, 0.5),
    }
}

fn check_finite(m: &MuellerMatrix, what: &str) -> Result<(), CliError> {
    if m.0.is_finite() {
        Ok(())
    } else {
        Err(CliError::Numerical(format!("{what} produced a non-finite Mueller matrix")))
    }
}

fn run_trials(
    ctx: &Context,
    scheme: Scheme,
    noise: &NoiseSpec,
    config: &ExperimentConfig,
    level: u64,
    truth: &MuellerMatrix,
) -> Result<(Vec<MuellerMatrix>, Vec<ErrorMetrics>), CliError> {
    let results = parallel_map(config.trials, |t| ctx.noisy(scheme, noise, config.seed, trial_stream(level, scheme, t)));
    let estimates = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    for m in &estimates {
        check_finite(m, scheme.name())?;
    }
    let errors = estimates.iter().map(|m| ErrorMetrics::between(m, truth)).collect();
    Ok((estimates, errors))
}

pub fn run(config: &ExperimentConfig) -> Result<ResultRecord, CliError> {
    let sample = resolve_sample(config)?;
    let ctx = Context::new(&sample);
    let truth = mueller_depolarizing(&ctx.ensemble);
    check_finite(&truth, "sample")?;
    let schemes = config.scheme.expand();
    let noise = config.noise.filter(|n| !n.is_noiseless());

    let mut hats = BTreeMap::new();
    let mut errors = BTreeMap::new();
    let mut trial_stats = BTreeMap::new();
    let mut clean = Vec::new();
    for &scheme in &schemes {
        let m0 = ctx.noiseless(scheme, &truth)?;
        check_finite(&m0, scheme.name())?;
        clean.push(m0);
        let hat = match (&noise, scheme) {
            (Some(n), Scheme::Conventional | Scheme::TwoDofBench) => {
                let (estimates, errs) = run_trials(&ctx, scheme, n, config, 0, &truth)?;
                trial_stats.insert(scheme.name().to_string(), stats(&errs));
                let sum = estimates.iter().fold(Real4x4::zero(), |acc, m| acc + m.0);
                MuellerMatrix(sum.scale(1.0 / estimates.len() as f64))
            }
            _ => m0,
        };
        errors.insert(scheme.name().to_string(), ErrorMetrics::between(&hat, &truth));
        hats.insert(scheme.name().to_string(), hat.0);
    }
    let mut discrepancy = 0.0f64;
    for a in &clean {
        for b in &clean {
            discrepancy = discrepancy.max(a.max_abs_error(b));
        }
    }

    Ok(ResultRecord {
        mueller_true: truth.0,
        mueller_hat: hats,
        errors,
        trial_stats,
        detector_map: schemes.contains(&Scheme::TwoDofBench).then(|| ctx.bench.clone()),
        cross_scheme_discrepancy: discrepancy,
        seed: config.seed,
        provenance: provenance(config),
    })
}

/// Noise sweep over `config.sweep_sigmas`; the config's dark level and
/// photon budget are kept, `sigma_rel` is replaced level by level.
pub fn sweep(config: &ExperimentConfig) -> Result<SweepRecord, CliError> {
    let sample = resolve_sample(config)?;
    let ctx = Context::new(&sample);
    let truth = mueller_depolarizing(&ctx.ensemble);
    let base = config.noise.unwrap_or_default();
    let measured: Vec<Scheme> = config.scheme.expand().into_iter().filter(|s| *s != Scheme::Oracle).collect();
    if measured.is_empty() {
        return Err(CliError::Config(crate::config::ConfigError::Validation {
            field: "scheme".into(),
            message: "a sweep needs a measured scheme (conventional or two_dof_bench)".into(),
        }));
    }
    let mut rows = Vec::new();
    for (level, &sigma) in config.sweep_sigmas.iter().enumerate() {
        let noise = NoiseSpec { sigma_rel: sigma, ..base };
        noise.validate()?;
        for &scheme in &measured {
            let (_, errs) = run_trials(&ctx, scheme, &noise, config, level as u64, &truth)?;
            rows.push(SweepRow { sigma_rel: sigma, scheme: scheme.name().to_string(), stats: stats(&errs) });
        }
    }
    Ok(SweepRecord { mueller_true: truth.0, rows, seed: config.seed, provenance: provenance(config) })
}

/// Field after the sample for a radial probe. Needs a non-depolarizing sample.
pub fn render_output(config: &ExperimentConfig) -> Result<FieldMap, CliError> {
    let grid = config.render.unwrap_or_default();
    let t: Complex2x2 = match resolve_sample(config)? {
        Sample::Jones(t) => t,
        Sample::Ensemble(_) => {
            return Err(CliError::Config(crate::config::ConfigError::Validation {
                field: "sample".into(),
                message: "field maps need a non-depolarizing sample".into(),
            }))
        }
    };
    Ok(render(&apply_to_pol(&t, &radial_beam()), &grid))
}
