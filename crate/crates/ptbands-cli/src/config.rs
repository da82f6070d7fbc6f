//! Run configuration: command-line flags merged over an optional
//! key=value configuration file, then validated.

use crate::args::{CommonArgs, SpectrumArgs, VerifyArgs};
use anyhow::{anyhow, bail, Context, Result};
use ptbands::ModelParams;
use std::collections::HashMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn parse(s: &str) -> Result<Format> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => bail!("unknown format {other:?} (expected csv or json)"),
        }
    }
}

/// Values read from a `--config` file. Unknown keys are errors.
#[derive(Debug, Default)]
pub struct FileConfig {
    map: HashMap<String, String>,
}

const ALLOWED_KEYS: &[&str] = &[
    "l", "alpha", "a", "emin", "emax", "samples", "tol", "format", "out", "half-width", "force",
    "gnuplot", "verify",
];

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<FileConfig> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        let mut map = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("config line {}: expected key=value", lineno + 1))?;
            let key = key.trim().to_string();
            if !ALLOWED_KEYS.contains(&key.as_str()) {
                bail!("config line {}: unknown key {key:?}", lineno + 1);
            }
            map.insert(key, value.trim().to_string());
        }
        Ok(FileConfig { map })
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.map.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|e| anyhow!("config key {key}={raw:?}: {e}")),
        }
    }

    fn get_bool(&self, key: &str) -> Result<Option<bool>> {
        match self.map.get(key).map(String::as_str) {
            None => Ok(None),
            Some("true") | Some("1") => Ok(Some(true)),
            Some("false") | Some("0") => Ok(Some(false)),
            Some(other) => bail!("config key {key}={other:?}: expected true/false"),
        }
    }

    fn get_format(&self) -> Result<Option<Format>> {
        self.map.get("format").map(|s| Format::parse(s)).transpose()
    }

    fn get_path(&self, key: &str) -> Option<PathBuf> {
        self.map.get(key).map(PathBuf::from)
    }
}

fn params_from(l: Option<u32>, alpha: Option<f64>, a: Option<f64>) -> Result<ModelParams> {
    let l = l.ok_or_else(|| anyhow!("missing required parameter --l"))?;
    let alpha = alpha.ok_or_else(|| anyhow!("missing required parameter --alpha"))?;
    ModelParams::new(l, alpha, a.unwrap_or(1.0)).map_err(|e| anyhow!("{e}"))
}

/// Resolved configuration for `bands` and `dispersion`.
pub struct ScanConfig {
    pub params: ModelParams,
    pub emin: f64,
    pub emax: f64,
    pub samples: usize,
    pub tol: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub force: bool,
    pub gnuplot: bool,
}

pub fn resolve_scan(args: &CommonArgs, default_samples: usize) -> Result<ScanConfig> {
    let file = FileConfig::load(args.config.as_deref())?;
    let params = params_from(
        args.l.or(file.get("l")?),
        args.alpha.or(file.get("alpha")?),
        args.a.or(file.get("a")?),
    )?;
    let emin = args
        .emin
        .or(file.get("emin")?)
        .ok_or_else(|| anyhow!("missing required parameter --emin"))?;
    let emax = args
        .emax
        .or(file.get("emax")?)
        .ok_or_else(|| anyhow!("missing required parameter --emax"))?;
    if !(emin.is_finite() && emax.is_finite() && emin < emax) {
        bail!("energy window [{emin}, {emax}] must be finite with emin < emax");
    }
    let samples = args.samples.or(file.get("samples")?).unwrap_or(default_samples);
    if samples < 2 {
        bail!("--samples must be at least 2, got {samples}");
    }
    let tol = args.tol.or(file.get("tol")?).unwrap_or(1e-10);
    if !(tol.is_finite() && tol > 0.0) {
        bail!("--tol must be a positive real, got {tol}");
    }
    let format = match &args.format {
        Some(s) => Format::parse(s)?,
        None => file.get_format()?.unwrap_or(Format::Csv),
    };
    let out = args.out.clone().or_else(|| file.get_path("out"));
    let force = args.force || file.get_bool("force")?.unwrap_or(false);
    let gnuplot = args.gnuplot || file.get_bool("gnuplot")?.unwrap_or(false);
    if gnuplot && (out.is_none() || format != Format::Csv) {
        bail!("--gnuplot requires --out and csv format");
    }
    Ok(ScanConfig { params, emin, emax, samples, tol, format, out, force, gnuplot })
}

pub struct SpectrumConfig {
    pub params: ModelParams,
    pub verify: bool,
    pub tol: f64,
    pub half_width: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub gnuplot: bool,
}

pub fn resolve_spectrum(args: &SpectrumArgs) -> Result<SpectrumConfig> {
    let file = FileConfig::load(args.config.as_deref())?;
    let params = params_from(
        args.l.or(file.get("l")?),
        args.alpha.or(file.get("alpha")?),
        args.a.or(file.get("a")?),
    )?;
    let tol = args.tol.or(file.get("tol")?).unwrap_or(1e-8);
    if !(tol.is_finite() && tol > 0.0) {
        bail!("--tol must be a positive real, got {tol}");
    }
    let half_width =
        args.half_width.or(file.get("half-width")?).unwrap_or(12.0 / params.alpha());
    if half_width < 10.0 / params.alpha() {
        bail!("--half-width must be at least 10/alpha = {}", 10.0 / params.alpha());
    }
    let format = match &args.format {
        Some(s) => Format::parse(s)?,
        None => file.get_format()?.unwrap_or(Format::Csv),
    };
    let verify = args.verify || file.get_bool("verify")?.unwrap_or(false);
    let out = args.out.clone().or_else(|| file.get_path("out"));
    let gnuplot = args.gnuplot || file.get_bool("gnuplot")?.unwrap_or(false);
    if gnuplot && (out.is_none() || format != Format::Csv) {
        bail!("--gnuplot requires --out and csv format");
    }
    Ok(SpectrumConfig { params, verify, tol, half_width, format, out, gnuplot })
}

pub struct VerifyConfig {
    pub params: ModelParams,
    pub emin: f64,
    pub emax: f64,
    pub samples: usize,
    pub out: Option<PathBuf>,
}

pub fn resolve_verify(args: &VerifyArgs) -> Result<VerifyConfig> {
    let file = FileConfig::load(args.config.as_deref())?;
    let params = params_from(
        Some(args.l.or(file.get("l")?).unwrap_or(1)),
        Some(args.alpha.or(file.get("alpha")?).unwrap_or(1.0)),
        args.a.or(file.get("a")?),
    )?;
    let l = f64::from(params.l());
    let alpha = params.alpha();
    let a = params.a();
    let depth = 0.5 * alpha * alpha * l * l;
    // default window: span both signs, capped so the transfer matrix stays
    // well conditioned below the spectrum (2a·κ ≤ 6.5)
    let emin = args
        .emin
        .or(file.get("emin")?)
        .unwrap_or((1.35 * -depth).max(-5.28 / (a * a)));
    let emax = args.emax.or(file.get("emax")?).unwrap_or(10.0f64.max(alpha * alpha * l * l));
    if !(emin.is_finite() && emax.is_finite() && emin < emax) {
        bail!("energy window [{emin}, {emax}] must be finite with emin < emax");
    }
    let samples = args.samples.or(file.get("samples")?).unwrap_or(120);
    if samples < 2 {
        bail!("--samples must be at least 2, got {samples}");
    }
    let out = args.out.clone().or_else(|| file.get_path("out"));
    Ok(VerifyConfig { params, emin, emax, samples, out })
}
