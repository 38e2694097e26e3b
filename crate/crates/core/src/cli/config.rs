//! Flat `key = value` experiment configuration.
//!
//! Lines are `key = value`; `#` starts a comment. Lists are comma separated
//! and optional values accept `auto`. Unknown keys are rejected.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::schema::{default_copies, SceneryKind, SchemaConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    WalkScaling,
    SchemaCf,
    LimitSelfsim,
    TailCheck,
    HolderCheck,
    FeasibleSweep,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::WalkScaling => "walk-scaling",
            Self::SchemaCf => "schema-cf",
            Self::LimitSelfsim => "limit-selfsim",
            Self::TailCheck => "tail-check",
            Self::HolderCheck => "holder-check",
            Self::FeasibleSweep => "feasible-sweep",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            Self::WalkScaling,
            Self::SchemaCf,
            Self::LimitSelfsim,
            Self::TailCheck,
            Self::HolderCheck,
            Self::FeasibleSweep,
        ]
        .into_iter()
        .find(|c| c.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{}config error{}: {message}", .key.as_ref().map(|k| format!("[{k}] ")).unwrap_or_default(), .line.map(|l| format!(" on line {l}")).unwrap_or_default())]
pub struct ConfigError {
    pub key: Option<String>,
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    pub fn new(message: impl Into<String>) -> Self {
        Self {
            key: None,
            line: None,
            message: message.into(),
        }
    }

    fn for_key(key: &str, message: impl Into<String>) -> Self {
        Self {
            key: Some(key.to_string()),
            line: None,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub command: Option<Command>,
    pub alpha: f64,
    pub beta: f64,
    pub sigma: f64,
    pub nu: f64,
    pub scenery: SceneryKind,
    pub n: usize,
    /// Schema copy count; `None` means `ceil(sqrt(n))`.
    pub copies: Option<usize>,
    pub times: Vec<f64>,
    pub thetas: Vec<f64>,
    pub replicas: usize,
    pub seed: u64,
    pub workers: usize,
    pub out: PathBuf,
    pub strict: bool,
    pub plots: bool,
    /// Horizons for walk-scaling.
    pub ns: Vec<usize>,
    /// Local-time fields used by Monte Carlo oracles.
    pub mc_reps: usize,
    /// Copies averaged in the limit process.
    pub m: usize,
    /// Horizon for tail-check.
    pub horizon: f64,
    pub h_t: Option<f64>,
    pub h_x: Option<f64>,
    /// Offset and lag for limit-selfsim.
    pub s: f64,
    pub t: f64,
    pub u_points: usize,
    pub min_exceedances: usize,
    pub hill_k: Option<usize>,
    pub moment_reps: usize,
    /// Dyadic levels `k` (grids `2^-k`) for holder-check.
    pub levels: Vec<u32>,
    /// Random pairs for feasible-sweep.
    pub sweep: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            command: None,
            alpha: 2.0,
            beta: 1.5,
            sigma: 1.0,
            nu: 0.0,
            scenery: SceneryKind::Stable,
            n: 4096,
            copies: None,
            times: vec![1.0],
            thetas: vec![0.25, 0.5, 1.0],
            replicas: 1000,
            seed: 1,
            workers: 1,
            out: PathBuf::from("rwrs-out"),
            strict: false,
            plots: true,
            ns: (8..=14).map(|k| 1usize << k).collect(),
            mc_reps: 10_000,
            m: 64,
            horizon: 1.0,
            h_t: None,
            h_x: None,
            s: 0.25,
            t: 0.5,
            u_points: 25,
            min_exceedances: 200,
            hill_k: None,
            moment_reps: 10_000,
            levels: vec![8, 10],
            sweep: 10_000,
        }
    }
}

const KEYS: &[&str] = &[
    "command",
    "alpha",
    "beta",
    "sigma",
    "nu",
    "scenery",
    "n",
    "copies",
    "times",
    "thetas",
    "replicas",
    "seed",
    "workers",
    "out",
    "strict",
    "plots",
    "ns",
    "mc_reps",
    "m",
    "horizon",
    "h_t",
    "h_x",
    "s",
    "t",
    "u_points",
    "min_exceedances",
    "hill_k",
    "moment_reps",
    "levels",
    "sweep",
];

fn parse_scalar<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value
        .trim()
        .parse()
        .map_err(|_| ConfigError::for_key(key, format!("cannot parse `{value}`")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, ConfigError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_scalar(key, s))
        .collect()
}

fn parse_auto<T: FromStr>(key: &str, value: &str) -> Result<Option<T>, ConfigError> {
    if value.trim() == "auto" {
        Ok(None)
    } else {
        parse_scalar(key, value).map(Some)
    }
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(ConfigError::for_key(key, format!("`{other}` is not a boolean"))),
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(", ")
}

fn auto<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map_or_else(|| "auto".to_string(), T::to_string)
}

impl ExperimentConfig {
    /// Sets one key from its text value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let v = value.trim();
        match key {
            "command" if v == "auto" => self.command = None,
            "command" => {
                self.command = Some(
                    Command::parse(v)
                        .ok_or_else(|| ConfigError::for_key(key, format!("unknown command `{v}`")))?,
                )
            }
            "alpha" => self.alpha = parse_scalar(key, v)?,
            "beta" => self.beta = parse_scalar(key, v)?,
            "sigma" => self.sigma = parse_scalar(key, v)?,
            "nu" => self.nu = parse_scalar(key, v)?,
            "scenery" => {
                self.scenery = SceneryKind::parse(v)
                    .ok_or_else(|| ConfigError::for_key(key, "expected stable, pareto or zero"))?
            }
            "n" => self.n = parse_scalar(key, v)?,
            "copies" => self.copies = parse_auto(key, v)?,
            "times" => self.times = parse_list(key, v)?,
            "thetas" => self.thetas = parse_list(key, v)?,
            "replicas" => self.replicas = parse_scalar(key, v)?,
            "seed" => self.seed = parse_scalar(key, v)?,
            "workers" => self.workers = parse_scalar(key, v)?,
            "out" => self.out = PathBuf::from(v),
            "strict" => self.strict = parse_bool(key, v)?,
            "plots" => self.plots = parse_bool(key, v)?,
            "ns" => self.ns = parse_list(key, v)?,
            "mc_reps" => self.mc_reps = parse_scalar(key, v)?,
            "m" => self.m = parse_scalar(key, v)?,
            "horizon" => self.horizon = parse_scalar(key, v)?,
            "h_t" => self.h_t = parse_auto(key, v)?,
            "h_x" => self.h_x = parse_auto(key, v)?,
            "s" => self.s = parse_scalar(key, v)?,
            "t" => self.t = parse_scalar(key, v)?,
            "u_points" => self.u_points = parse_scalar(key, v)?,
            "min_exceedances" => self.min_exceedances = parse_scalar(key, v)?,
            "hill_k" => self.hill_k = parse_auto(key, v)?,
            "moment_reps" => self.moment_reps = parse_scalar(key, v)?,
            "levels" => self.levels = parse_list(key, v)?,
            "sweep" => self.sweep = parse_scalar(key, v)?,
            _ => return Err(ConfigError::for_key(key, "unknown key")),
        }
        Ok(())
    }

    /// Applies `key = value` lines on top of the current values.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError {
                key: None,
                line: Some(i + 1),
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            self.set(key.trim(), value).map_err(|mut e| {
                e.line = Some(i + 1);
                e
            })?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        let mut c = Self::default();
        c.apply_text(text)?;
        Ok(c)
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new(format!("cannot read {}: {e}", path.display())))?;
        self.apply_text(&text)
    }

    /// Applies a `key=value` override.
    pub fn apply_assignment(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| ConfigError::new(format!("expected key=value, got `{assignment}`")))?;
        self.set(k.trim(), v)
    }

    fn value_of(&self, key: &str) -> String {
        match key {
            "command" => self.command.map_or_else(|| "auto".into(), |c| c.name().into()),
            "alpha" => self.alpha.to_string(),
            "beta" => self.beta.to_string(),
            "sigma" => self.sigma.to_string(),
            "nu" => self.nu.to_string(),
            "scenery" => self.scenery.name().into(),
            "n" => self.n.to_string(),
            "copies" => auto(&self.copies),
            "times" => join(&self.times),
            "thetas" => join(&self.thetas),
            "replicas" => self.replicas.to_string(),
            "seed" => self.seed.to_string(),
            "workers" => self.workers.to_string(),
            "out" => self.out.display().to_string(),
            "strict" => self.strict.to_string(),
            "plots" => self.plots.to_string(),
            "ns" => join(&self.ns),
            "mc_reps" => self.mc_reps.to_string(),
            "m" => self.m.to_string(),
            "horizon" => self.horizon.to_string(),
            "h_t" => auto(&self.h_t),
            "h_x" => auto(&self.h_x),
            "s" => self.s.to_string(),
            "t" => self.t.to_string(),
            "u_points" => self.u_points.to_string(),
            "min_exceedances" => self.min_exceedances.to_string(),
            "hill_k" => auto(&self.hill_k),
            "moment_reps" => self.moment_reps.to_string(),
            "levels" => join(&self.levels),
            "sweep" => self.sweep.to_string(),
            _ => unreachable!("unknown key {key}"),
        }
    }

    /// Canonical text form; parsing it back gives the same configuration.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        for key in KEYS {
            let _ = writeln!(s, "{key} = {}", self.value_of(key));
        }
        s
    }

    /// Canonical form without the keys that do not affect results.
    pub fn fingerprint_text(&self) -> String {
        let mut s = String::new();
        for key in KEYS {
            if matches!(*key, "workers" | "out" | "strict" | "plots") {
                continue;
            }
            let _ = writeln!(s, "{key} = {}", self.value_of(key));
        }
        s
    }

    pub fn schema(&self) -> SchemaConfig {
        SchemaConfig {
            alpha: self.alpha,
            beta: self.beta,
            sigma: self.sigma,
            nu: self.nu,
            scenery: self.scenery,
            n: self.n,
            copies: self.copies.unwrap_or_else(|| default_copies(self.n)),
            times: self.times.clone(),
            replicas: self.replicas,
            master_seed: self.seed,
        }
    }

    /// Checks everything `command` needs before any simulation starts.
    pub fn validate(&self, command: Command) -> Result<(), ConfigError> {
        let model = |e: crate::Error| ConfigError::new(e.to_string());
        if self.workers == 0 {
            return Err(ConfigError::for_key("workers", "must be at least 1"));
        }
        if self.replicas == 0 && command != Command::FeasibleSweep {
            return Err(ConfigError::for_key("replicas", "must be at least 1"));
        }
        let positive = |key: &str, v: Option<f64>| -> Result<(), ConfigError> {
            match v {
                Some(x) if !(x > 0.0 && x.is_finite()) => {
                    Err(ConfigError::for_key(key, "must be positive and finite"))
                }
                _ => Ok(()),
            }
        };
        positive("h_t", self.h_t)?;
        positive("h_x", self.h_x)?;
        match command {
            Command::WalkScaling => {
                crate::stable::WalkIncrementLaw::for_index(self.alpha).map_err(model)?;
                if self.ns.len() < 3 {
                    return Err(ConfigError::for_key("ns", "need at least three horizons"));
                }
                if self.ns[0] == 0 || self.ns.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(ConfigError::for_key("ns", "must be positive and strictly increasing"));
                }
            }
            Command::SchemaCf => {
                self.schema().validate().map_err(model)?;
                if self.thetas.is_empty() {
                    return Err(ConfigError::for_key("thetas", "need at least one value"));
                }
                if self.mc_reps < 2 {
                    return Err(ConfigError::for_key("mc_reps", "need at least two repetitions"));
                }
                if self.replicas < 2 {
                    return Err(ConfigError::for_key("replicas", "need at least two replicas"));
                }
            }
            Command::LimitSelfsim | Command::TailCheck | Command::HolderCheck => {
                self.limit_laws().map_err(model)?;
                if self.m == 0 {
                    return Err(ConfigError::for_key("m", "must be at least 1"));
                }
                match command {
                    Command::LimitSelfsim => {
                        if !(self.s >= 0.0 && self.t > 0.0 && (self.s + self.t).is_finite()) {
                            return Err(ConfigError::for_key("t", "need s >= 0 and t > 0"));
                        }
                        if self.replicas < 2 {
                            return Err(ConfigError::for_key("replicas", "need at least two replicas"));
                        }
                    }
                    Command::TailCheck => {
                        if !(self.beta > 0.0 && self.beta < 2.0) {
                            return Err(ConfigError::for_key("beta", "tail-check needs beta in (0, 2)"));
                        }
                        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
                            return Err(ConfigError::for_key("horizon", "must be positive"));
                        }
                        if self.u_points < 1 || self.moment_reps < 2 {
                            return Err(ConfigError::new("u_points >= 1 and moment_reps >= 2 required"));
                        }
                        let k = self.hill_k.unwrap_or(2);
                        if k < 2 || k >= self.replicas {
                            return Err(ConfigError::for_key("hill_k", "need 2 <= hill_k < replicas"));
                        }
                    }
                    _ => {
                        crate::limit::holder_epsilon(self.beta).map_err(model)?;
                        if self.beta >= 1.0 && self.nu != 0.0 {
                            return Err(ConfigError::for_key(
                                "nu",
                                "the Hölder bound for beta >= 1 needs nu = 0",
                            ));
                        }
                        if self.levels.is_empty() || self.levels.iter().any(|&l| l < 2 || l > 30) {
                            return Err(ConfigError::for_key("levels", "levels must lie in 2..=30"));
                        }
                    }
                }
            }
            Command::FeasibleSweep => {}
        }
        Ok(())
    }

    /// Laws of `Y(1)` and `W(1)` for the limit commands: the walk law is
    /// the symmetric stable law with unit scale.
    pub fn limit_laws(&self) -> crate::Result<(crate::StableLaw, crate::StableLaw)> {
        crate::schema::delta_exponent(self.alpha, self.beta)?;
        Ok((
            crate::StableLaw::symmetric(self.alpha, 1.0)?,
            crate::StableLaw::new(self.beta, self.sigma, self.nu)?,
        ))
    }
}
