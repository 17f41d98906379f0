//! Experiment configuration in TOML.
//!
//! ```toml
//! seed = 7            # default 0
//! trials = 200        # default 1
//! scheme = "all"      # oracle | conventional | two_dof_bench | all (default)
//!
//! # Either a chain of elements, listed in the order light crosses them ...
//! [[sample]]
//! kind = "polarizer"  # hwp | qwp | rotator | polarizer | identity | jones
//! theta_deg = 0.0     # or theta_rad; required for angled elements
//!
//! [[sample]]
//! kind = "hwp"
//! theta_deg = 22.5
//!
//! # ... or a weighted ensemble of chains ...
//! # [[ensemble]]
//! # weight = 0.5
//! # elements = [{ kind = "identity" }]
//! #
//! # ... or a Haar-random ensemble with uniform weights.
//! # haar_members = 1000
//!
//! [noise]             # optional
//! sigma_rel = 1e-3
//! dark = 0.0
//! photons = 1e6       # optional
//!
//! [render]            # optional, defaults to 512x512 over ±3 w0
//! nx = 512
//! ny = 512
//! extent = 3.0
//!
//! [sweep]             # optional, used by `radpol sweep`
//! sigmas = [1e-2, 1e-3, 1e-4]
//! ```
//!
//! A `jones` element takes `re = [[a, b], [c, d]]` and `im = [[...]]`.
//! The two-element sample above first polarizes horizontally and then
//! rotates with a half-wave plate, so `T = T_hwp · T_pol` and `e_x → −i e_+`.

use std::fmt;

use radpol::fields::Grid;
use radpol::{Complex2x2, DepolarizingEnsemble, ElementKind, NoiseSpec, C64};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Oracle,
    Conventional,
    TwoDofBench,
    All,
}

impl Scheme {
    pub fn expand(self) -> Vec<Scheme> {
        match self {
            Scheme::All => vec![Scheme::Oracle, Scheme::Conventional, Scheme::TwoDofBench],
            s => vec![s],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Oracle => "oracle",
            Scheme::Conventional => "conventional",
            Scheme::TwoDofBench => "two_dof_bench",
            Scheme::All => "all",
        }
    }

    pub fn parse(s: &str) -> Option<Scheme> {
        [Scheme::Oracle, Scheme::Conventional, Scheme::TwoDofBench, Scheme::All]
            .into_iter()
            .find(|k| k.name() == s)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleSpec {
    Elements(Vec<ElementKind>),
    Ensemble(DepolarizingEnsemble),
    Haar { members: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub sample: SampleSpec,
    pub scheme: Scheme,
    pub noise: Option<NoiseSpec>,
    pub trials: usize,
    pub seed: u64,
    pub render: Option<Grid>,
    pub sweep_sigmas: Vec<f64>,
}

pub const DEFAULT_SWEEP: [f64; 3] = [1e-2, 1e-3, 1e-4];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid `{field}`: {message}")]
    Validation { field: String, message: String },
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Validation { field: field.into(), message: message.into() }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    seed: Option<u64>,
    trials: Option<i64>,
    scheme: Option<String>,
    sample: Option<Vec<RawElement>>,
    ensemble: Option<Vec<RawMember>>,
    haar_members: Option<i64>,
    noise: Option<NoiseSpec>,
    render: Option<RawGrid>,
    sweep: Option<RawSweep>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawElement {
    kind: String,
    theta_deg: Option<f64>,
    theta_rad: Option<f64>,
    re: Option<[[f64; 2]; 2]>,
    im: Option<[[f64; 2]; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMember {
    weight: f64,
    elements: Vec<RawElement>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    nx: Option<usize>,
    ny: Option<usize>,
    extent: Option<f64>,
    w0: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    sigmas: Vec<f64>,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |p| p + 1) + 1;
    (line, column)
}

impl RawElement {
    fn angle(&self, field: &str) -> Result<f64, ConfigError> {
        match (self.theta_deg, self.theta_rad) {
            (Some(d), None) => Ok(d.to_radians()),
            (None, Some(r)) => Ok(r),
            (Some(_), Some(_)) => Err(invalid(field, "give theta_deg or theta_rad, not both")),
            (None, None) => Err(invalid(field, format!("`{}` needs theta_deg or theta_rad", self.kind))),
        }
    }

    fn to_element(&self, field: &str) -> Result<ElementKind, ConfigError> {
        let angled = matches!(self.kind.as_str(), "hwp" | "qwp" | "rotator" | "polarizer");
        if !angled && (self.theta_deg.is_some() || self.theta_rad.is_some()) {
            return Err(invalid(field, format!("`{}` takes no angle", self.kind)));
        }
        if self.kind != "jones" && (self.re.is_some() || self.im.is_some()) {
            return Err(invalid(field, "re/im are only valid for kind = \"jones\""));
        }
        let el = match self.kind.as_str() {
            "hwp" => ElementKind::HalfWaveConverter { theta: self.angle(field)? },
            "qwp" => ElementKind::QuarterWaveConverter { theta: self.angle(field)? },
            "rotator" => ElementKind::Rotator { theta: self.angle(field)? },
            "polarizer" => ElementKind::Polarizer { theta: self.angle(field)? },
            "identity" => ElementKind::CustomJones { jones: Complex2x2::identity() },
            "jones" => {
                let re = self.re.ok_or_else(|| invalid(field, "jones element needs `re`"))?;
                let im = self.im.unwrap_or([[0.0; 2]; 2]);
                let jones = Complex2x2::from_fn(|i, j| C64::new(re[i][j], im[i][j]));
                ElementKind::CustomJones { jones }
            }
            other => return Err(invalid(field, format!("unknown element kind `{other}`"))),
        };
        if !el.is_finite() {
            return Err(invalid(field, "non-finite value"));
        }
        Ok(el)
    }
}

fn elements(raw: &[RawElement], field: &str) -> Result<Vec<ElementKind>, ConfigError> {
    if raw.is_empty() {
        return Err(invalid(field, "sample is empty"));
    }
    raw.iter().enumerate().map(|(k, e)| e.to_element(&format!("{field}[{k}]"))).collect()
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((0, 0), |s| line_col(text, s.start));
        ConfigError::Parse { line, column, message: e.message().to_string() }
    })?;

    let sources = [raw.sample.is_some(), raw.ensemble.is_some(), raw.haar_members.is_some()];
    if sources.iter().filter(|&&b| b).count() != 1 {
        return Err(invalid("sample", "give exactly one of [[sample]], [[ensemble]] or haar_members"));
    }
    let sample = if let Some(s) = &raw.sample {
        SampleSpec::Elements(elements(s, "sample")?)
    } else if let Some(members) = &raw.ensemble {
        if members.is_empty() {
            return Err(invalid("ensemble", "ensemble is empty"));
        }
        let mut parts = Vec::with_capacity(members.len());
        for (k, m) in members.iter().enumerate() {
            let field = format!("ensemble[{k}].elements");
            parts.push((m.weight, radpol::elements::compose(&elements(&m.elements, &field)?)));
        }
        SampleSpec::Ensemble(DepolarizingEnsemble::new(parts).map_err(|e| invalid("ensemble", e.to_string()))?)
    } else {
        let n = raw.haar_members.unwrap_or(0);
        if n < 1 {
            return Err(invalid("haar_members", format!("must be >= 1, got {n}")));
        }
        SampleSpec::Haar { members: n as usize }
    };

    let scheme = match raw.scheme.as_deref() {
        None => Scheme::All,
        Some(s) => Scheme::parse(s).ok_or_else(|| invalid("scheme", format!("unknown scheme `{s}`")))?,
    };
    let trials = raw.trials.unwrap_or(1);
    if trials < 1 {
        return Err(invalid("trials", format!("must be >= 1, got {trials}")));
    }
    if let Some(n) = &raw.noise {
        n.validate().map_err(|e| invalid("noise", e.to_string()))?;
    }
    let render = raw
        .render
        .map(|g| {
            let d = Grid::default();
            Grid::new(g.nx.unwrap_or(d.nx), g.ny.unwrap_or(d.ny), g.extent.unwrap_or(d.extent), g.w0.unwrap_or(d.w0))
                .map_err(|e| invalid("render", e.to_string()))
        })
        .transpose()?;
    let sweep_sigmas = match raw.sweep {
        Some(s) => {
            if s.sigmas.is_empty() || s.sigmas.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
                return Err(invalid("sweep.sigmas", "need a nonempty list of finite values >= 0"));
            }
            s.sigmas
        }
        None => DEFAULT_SWEEP.to_vec(),
    };

    Ok(ExperimentConfig {
        sample,
        scheme,
        noise: raw.noise,
        trials: trials as usize,
        seed: raw.seed.unwrap_or(0),
        render,
        sweep_sigmas,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_and_column() {
        assert_eq!(line_col("ab\ncd", 4), (2, 2));
        assert_eq!(line_col("ab", 0), (1, 1));
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in [Scheme::Oracle, Scheme::Conventional, Scheme::TwoDofBench, Scheme::All] {
            assert_eq!(Scheme::parse(s.name()), Some(s));
        }
        assert_eq!(Scheme::All.expand().len(), 3);
    }
}
