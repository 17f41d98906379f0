//! JSON and CSV writers. Both embed the config hash and seed.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use radpol::acceptance::Outcome;
use radpol::Real4x4;
use serde::Serialize;

use crate::error::CliError;
use crate::run::{ResultRecord, SweepRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("records serialize");
    s.push('\n');
    s
}

fn matrix_header() -> String {
    (0..4).flat_map(|i| (0..4).map(move |j| format!("m{i}{j}"))).collect::<Vec<_>>().join(",")
}

/// Shortest round-trip representation, switching to exponent form for tiny values.
fn num(v: f64) -> String {
    format!("{v:?}")
}

fn matrix_cells(m: &Real4x4) -> String {
    (0..4).flat_map(|i| (0..4).map(move |j| num(m[(i, j)]))).collect::<Vec<_>>().join(",")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn result_csv(r: &ResultRecord) -> String {
    let mut s = format!(
        "row,scheme,{},max_abs_error,frobenius_error,median_frobenius,p5_frobenius,p95_frobenius,cross_scheme_discrepancy,config_hash,seed\n",
        matrix_header()
    );
    let hash = &r.provenance.config_hash;
    let _ = writeln!(
        s,
        "mueller_true,,{},0,0,,,,{},{hash},{}",
        matrix_cells(&r.mueller_true),
        num(r.cross_scheme_discrepancy),
        r.seed
    );
    for (scheme, m) in &r.mueller_hat {
        let e = r.errors[scheme];
        let st = r.trial_stats.get(scheme);
        let _ = writeln!(
            s,
            "mueller_hat,{scheme},{},{},{},{},{},{},{},{hash},{}",
            matrix_cells(m),
            num(e.max_abs),
            num(e.frobenius),
            opt(st.map(|t| t.median_frobenius)),
            opt(st.map(|t| t.p5_frobenius)),
            opt(st.map(|t| t.p95_frobenius)),
            num(r.cross_scheme_discrepancy),
            r.seed
        );
    }
    s
}

pub fn sweep_csv(r: &SweepRecord) -> String {
    let mut s =
        String::from("sigma_rel,scheme,trials,median_frobenius,p5_frobenius,p95_frobenius,median_max_abs,config_hash,seed\n");
    for row in &r.rows {
        let t = row.stats;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            num(row.sigma_rel),
            row.scheme,
            t.trials,
            num(t.median_frobenius),
            num(t.p5_frobenius),
            num(t.p95_frobenius),
            num(t.median_max_abs),
            r.provenance.config_hash,
            r.seed
        );
    }
    s
}

pub fn outcomes_csv(outcomes: &[Outcome]) -> String {
    let mut s = String::from("id,passed,measured,tolerance,title\n");
    for o in outcomes {
        let _ = writeln!(s, "{},{},{},{},{}", o.id, o.passed, num(o.measured), num(o.tolerance), o.title);
    }
    s
}

pub fn render_result(r: &ResultRecord, format: Format) -> String {
    match format {
        Format::Json => json(r),
        Format::Csv => result_csv(r),
    }
}

pub fn render_sweep(r: &SweepRecord, format: Format) -> String {
    match format {
        Format::Json => json(r),
        Format::Csv => sweep_csv(r),
    }
}

pub fn render_outcomes(o: &[Outcome], format: Format) -> String {
    match format {
        Format::Json => json(&o),
        Format::Csv => outcomes_csv(o),
    }
}

/// Write to `path`, or to stdout when no path is given.
pub fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

pub fn emit_results(r: &ResultRecord, path: &Path, format: Format) -> Result<(), CliError> {
    write_output(Some(path), &render_result(r, format))
}
