//! Run configuration: scenario defaults, then a key-value file, then flags.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;

use crate::dirk::{step_count, SolverConfig};
use crate::error::{Error, Result};
use crate::scenarios::Scenario;

/// Environment variable holding the default output directory.
pub const OUT_DIR_ENV: &str = "IEQ_NLS_OUT_DIR";

const KEYS: [&str; 13] = [
    "scenario",
    "tableau",
    "n",
    "dt",
    "t_end",
    "beta",
    "domain",
    "out_dir",
    "record_every",
    "snapshot_times",
    "tol",
    "max_iters",
    "allow_nonconservative",
];

/// Flags shared by `run` and `longtime`. Each one overrides the config file.
#[derive(Args, Clone, Debug, Default)]
pub struct RunArgs {
    /// Key-value file (`key = value` per line, `#` comments).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub scenario: Option<String>,
    #[arg(long)]
    pub tableau: Option<String>,
    /// Nodes per axis.
    #[arg(short = 'n', long = "nodes")]
    pub n: Option<usize>,
    #[arg(long, value_parser = parse_scalar)]
    pub dt: Option<f64>,
    #[arg(long, value_parser = parse_scalar)]
    pub t_end: Option<f64>,
    #[arg(long, value_parser = parse_scalar, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// Interval `a,b` (both axes in 2D); `pi` multiples are accepted.
    #[arg(long, value_parser = parse_domain, allow_hyphen_values = true)]
    pub domain: Option<(f64, f64)>,
    /// Defaults to `$IEQ_NLS_OUT_DIR`, then `out`.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub record_every: Option<usize>,
    #[arg(long, value_delimiter = ',', value_parser = parse_scalar)]
    pub snapshot_times: Vec<f64>,
    #[arg(long, value_parser = parse_scalar)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub allow_nonconservative: bool,
}

/// Fully resolved settings of a single integration.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub scenario: String,
    pub tableau: String,
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    pub beta: Option<f64>,
    pub domain: Option<(f64, f64)>,
    pub out_dir: PathBuf,
    pub record_every: usize,
    pub snapshot_times: Vec<f64>,
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub allow_nonconservative: bool,
}

impl RunConfig {
    /// Defaults of `scenario` with tableau `dirk22`.
    pub fn for_scenario(scenario: &Scenario, record_every: usize) -> Self {
        Self {
            scenario: scenario.name.to_string(),
            tableau: "dirk22".into(),
            n: scenario.n,
            dt: scenario.dt,
            t_end: scenario.t_end,
            beta: None,
            domain: None,
            out_dir: default_out_dir(),
            record_every,
            snapshot_times: Vec::new(),
            tol: None,
            max_iters: None,
            allow_nonconservative: false,
        }
    }

    pub fn scenario(&self) -> Result<Scenario> {
        Scenario::by_name(&self.scenario)
    }

    pub fn beta(&self) -> Result<f64> {
        Ok(self.beta.unwrap_or(self.scenario()?.beta))
    }

    pub fn domain(&self) -> Result<(f64, f64)> {
        Ok(self.domain.unwrap_or(self.scenario()?.domain))
    }

    pub fn solver(&self) -> SolverConfig {
        let mut s = SolverConfig::default();
        if let Some(tol) = self.tol {
            s.tol = tol;
        }
        if let Some(m) = self.max_iters {
            s.max_iters = m;
        }
        s.allow_nonconservative = self.allow_nonconservative;
        s
    }

    pub fn steps(&self) -> Result<usize> {
        step_count(0.0, self.t_end, self.dt)
    }

    /// Step indices of the snapshot times, in the given order.
    pub fn snapshot_steps(&self) -> Result<Vec<usize>> {
        self.snapshot_times
            .iter()
            .map(|&t| {
                if !(0.0..=self.t_end).contains(&t) {
                    return Err(Error::Config(format!("snapshot time {t} outside [0, {}]", self.t_end)));
                }
                step_count(0.0, t, self.dt)
                    .map_err(|_| Error::Config(format!("snapshot time {t} is not a multiple of dt = {}", self.dt)))
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario()?;
        crate::dirk::registry(&self.tableau)?;
        if self.record_every == 0 {
            return Err(Error::Config("record_every must be at least 1".into()));
        }
        self.steps()?;
        self.snapshot_steps()?;
        self.solver().validate()
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::Config(format!("`{key}`: cannot parse `{value}` as {what}"));
        match key {
            "scenario" => self.scenario = value.to_string(),
            "tableau" => self.tableau = value.to_string(),
            "n" => self.n = value.parse().map_err(|_| bad("an integer"))?,
            "dt" => self.dt = parse_scalar(value).map_err(|_| bad("a number"))?,
            "t_end" => self.t_end = parse_scalar(value).map_err(|_| bad("a number"))?,
            "beta" => self.beta = Some(parse_scalar(value).map_err(|_| bad("a number"))?),
            "domain" => self.domain = Some(parse_domain(value).map_err(|_| bad("an interval a,b"))?),
            "out_dir" => self.out_dir = PathBuf::from(value),
            "record_every" => self.record_every = value.parse().map_err(|_| bad("an integer"))?,
            "snapshot_times" => {
                self.snapshot_times = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(parse_scalar)
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad("a list of times"))?
            }
            "tol" => self.tol = Some(parse_scalar(value).map_err(|_| bad("a number"))?),
            "max_iters" => self.max_iters = Some(value.parse().map_err(|_| bad("an integer"))?),
            "allow_nonconservative" => {
                self.allow_nonconservative = match value {
                    "true" | "1" | "yes" => true,
                    "false" | "0" | "no" => false,
                    _ => return Err(bad("a boolean")),
                }
            }
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }
}

fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("out"))
}

/// Parses `key = value` lines; blank lines and `#` comments are skipped.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
        let k = k.trim();
        if !KEYS.contains(&k) {
            return Err(Error::Config(format!("line {}: unknown key `{k}`", lineno + 1)));
        }
        if map.insert(k.to_string(), v.trim().to_string()).is_some() {
            return Err(Error::Config(format!("line {}: duplicate key `{k}`", lineno + 1)));
        }
    }
    Ok(map)
}

pub fn load_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config file {}: {e}", path.display())))?;
    parse_config_text(&text)
}

/// Merges scenario defaults, the optional config file and the flags, in that order.
pub fn resolve(args: &RunArgs, default_scenario: &str, default_record_every: usize) -> Result<RunConfig> {
    let file = match &args.config {
        Some(p) => load_config_file(p)?,
        None => BTreeMap::new(),
    };
    let name = args
        .scenario
        .clone()
        .or_else(|| file.get("scenario").cloned())
        .unwrap_or_else(|| default_scenario.to_string());
    let mut cfg = RunConfig::for_scenario(&Scenario::by_name(&name)?, default_record_every);
    for (k, v) in &file {
        cfg.set(k, v)?;
    }
    cfg.scenario = name;
    if let Some(v) = &args.tableau {
        cfg.tableau = v.clone();
    }
    if let Some(v) = args.n {
        cfg.n = v;
    }
    if let Some(v) = args.dt {
        cfg.dt = v;
    }
    if let Some(v) = args.t_end {
        cfg.t_end = v;
    }
    if args.beta.is_some() {
        cfg.beta = args.beta;
    }
    if args.domain.is_some() {
        cfg.domain = args.domain;
    }
    if let Some(v) = &args.out_dir {
        cfg.out_dir = v.clone();
    }
    if let Some(v) = args.record_every {
        cfg.record_every = v;
    }
    if !args.snapshot_times.is_empty() {
        cfg.snapshot_times = args.snapshot_times.clone();
    }
    if args.tol.is_some() {
        cfg.tol = args.tol;
    }
    if args.max_iters.is_some() {
        cfg.max_iters = args.max_iters;
    }
    cfg.allow_nonconservative |= args.allow_nonconservative;
    cfg.validate()?;
    Ok(cfg)
}

/// A float, optionally written as a multiple of `pi` (`pi`, `2pi`, `-0.5pi`).
pub fn parse_scalar(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    let value = match s.strip_suffix("pi") {
        Some("") => PI,
        Some("-") => -PI,
        Some(coef) => coef.trim_end_matches('*').parse::<f64>().map_err(|e| e.to_string())? * PI,
        None => s.parse::<f64>().map_err(|e| e.to_string())?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

pub fn parse_domain(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("`{s}`: expected `a,b`"))?;
    Ok((parse_scalar(a)?, parse_scalar(b)?))
}
