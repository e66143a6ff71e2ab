//! Text formats: dataset CSV, fit-result blocks, key=value config files.
//!
//! Dataset CSV layout:
//!
//! ```text
//! # alpha_re=4
//! # alpha_im=0
//! # t=1
//! # eta=0.6
//! # n=3
//! # seed=7
//! # generator=chacha20-seed_from_u64/box-muller
//! phase,value
//! 0.123,1.5
//! ...
//! ```
//!
//! Floats are written with Rust's shortest round-trip formatting, so reading a
//! file back reproduces every sample bit for bit.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::channel::Probe;
use crate::error::DataError;
use crate::estimator::FitResult;
use crate::homodyne::{Dataset, QuadratureSample, Setup};

pub const DATASET_HEADER: &str = "phase,value";

pub fn dataset_to_csv(dataset: &Dataset) -> String {
    let s = &dataset.setup;
    let mut out = String::with_capacity(32 * dataset.len() + 200);
    let _ = writeln!(out, "# alpha_re={}", s.probe.re());
    let _ = writeln!(out, "# alpha_im={}", s.probe.im());
    let _ = writeln!(out, "# t={}", s.time);
    let _ = writeln!(out, "# eta={}", s.eta);
    let _ = writeln!(out, "# n={}", dataset.len());
    let _ = writeln!(out, "# seed={}", dataset.seed);
    let _ = writeln!(out, "# generator={}", dataset.generator);
    out.push_str(DATASET_HEADER);
    out.push('\n');
    for q in &dataset.samples {
        let _ = writeln!(out, "{},{}", q.phase, q.value);
    }
    out
}

fn parse_err(line: usize, msg: impl Into<String>) -> DataError {
    DataError::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_f64(line: usize, key: &str, raw: &str) -> Result<f64, DataError> {
    raw.trim().parse::<f64>().map_err(|_| {
        parse_err(
            line,
            format!("`{key}`: cannot parse `{}` as a number", raw.trim()),
        )
    })
}

pub fn dataset_from_csv(text: &str) -> Result<Dataset, DataError> {
    let mut meta: BTreeMap<String, (usize, String)> = BTreeMap::new();
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut saw_header = false;
    for (no, line) in lines.by_ref() {
        let trimmed = line.trim();
        if let Some(rest) = trimmed.strip_prefix('#') {
            let rest = rest.trim();
            if rest.is_empty() {
                continue;
            }
            let (k, v) = rest
                .split_once('=')
                .ok_or_else(|| parse_err(no, "metadata line must be `# key=value`"))?;
            meta.insert(k.trim().to_string(), (no, v.trim().to_string()));
            continue;
        }
        if trimmed.is_empty() {
            continue;
        }
        if trimmed != DATASET_HEADER {
            return Err(parse_err(
                no,
                format!("expected header `{DATASET_HEADER}`, found `{trimmed}`"),
            ));
        }
        saw_header = true;
        break;
    }
    if !saw_header {
        return Err(parse_err(0, format!("missing header `{DATASET_HEADER}`")));
    }

    let get = |key: &'static str| -> Result<(usize, &str), DataError> {
        meta.get(key)
            .map(|(l, v)| (*l, v.as_str()))
            .ok_or(DataError::MissingKey(key))
    };
    let num = |key: &'static str| -> Result<f64, DataError> {
        let (l, v) = get(key)?;
        parse_f64(l, key, v)
    };
    let probe = Probe::new(num("alpha_re")?, num("alpha_im")?)?;
    let setup = Setup::new(probe, num("t")?, num("eta")?).map_err(|e| {
        let line = get("eta").map(|(l, _)| l).unwrap_or(0);
        parse_err(line, e.to_string())
    })?;
    let (seed_line, seed_raw) = get("seed")?;
    let seed = seed_raw
        .parse::<u64>()
        .map_err(|_| parse_err(seed_line, format!("`seed`: cannot parse `{seed_raw}`")))?;
    let generator = get("generator")?.1.to_string();
    let (n_line, n_raw) = get("n")?;
    let n = n_raw
        .parse::<usize>()
        .map_err(|_| parse_err(n_line, format!("`n`: cannot parse `{n_raw}`")))?;

    let mut samples = Vec::with_capacity(n);
    for (no, line) in lines {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let (p, v) = trimmed
            .split_once(',')
            .ok_or_else(|| parse_err(no, "expected `phase,value`"))?;
        let phase = parse_f64(no, "phase", p)?;
        let value = parse_f64(no, "value", v)?;
        if !(0.0..PI).contains(&phase) {
            return Err(parse_err(no, format!("phase {phase} outside [0, π)")));
        }
        if !value.is_finite() {
            return Err(parse_err(no, "value must be finite"));
        }
        samples.push(QuadratureSample { phase, value });
    }
    if samples.is_empty() {
        return Err(parse_err(0, "dataset has no samples"));
    }
    if samples.len() != n {
        return Err(parse_err(
            n_line,
            format!("metadata says n={n} but {} samples follow", samples.len()),
        ));
    }
    Ok(Dataset {
        samples,
        setup,
        seed,
        generator,
    })
}

pub fn fit_result_block(fit: &FitResult) -> String {
    format!(
        "g1_hat={}\ng2_hat={}\ndg1={}\ndg2={}\nloglik={}\nconverged={}\niters={}\nseed={}\n",
        fit.gains_hat.g1(),
        fit.gains_hat.g2(),
        fit.err.0,
        fit.err.1,
        fit.loglik,
        fit.converged,
        fit.iters,
        fit.seed,
    )
}

/// Parses `key=value` lines. Blank lines and `#` comments are ignored; later
/// keys override earlier ones.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>, DataError> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let (k, v) = t
            .split_once('=')
            .ok_or_else(|| parse_err(i + 1, format!("expected `key=value`, found `{t}`")))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

/// Writes `contents` to `path` via a temporary file in the same directory so
/// the target never holds a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), DataError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| DataError::Io(e.error))?;
    Ok(())
}
