//! Runtime configuration: built-in defaults, then a `key = value` file, then
//! `IIS_*` environment variables, then command-line flags.

use std::collections::HashMap;

use iis_core::{FlowParams, SamplerKind, SamplerSpec};

pub const DEFAULT_ADDR: &str = "127.0.0.1:8750";
pub const DEFAULT_THRESHOLD: f64 = 0.5;
pub const DEFAULT_K: usize = 9;
pub const DEFAULT_MAX_BODY: usize = 64 * 1024 * 1024;
/// Smallest body that can hold an IISV header.
pub const MIN_BODY: usize = 24;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    #[error("invalid value {value:?} for {key}")]
    BadValue { key: String, value: String },
    #[error("max_body_bytes must be at least {MIN_BODY}")]
    BodyTooSmall,
    #[error("workers must be at least 1")]
    NoWorkers,
    #[error("threshold must be finite and nonnegative")]
    BadThreshold,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ServiceConfig {
    pub listen_address: String,
    pub threshold: f64,
    /// Sampler used when a request does not name one.
    pub sampler: SamplerSpec,
    pub flow: FlowParams,
    pub max_body_bytes: usize,
    pub worker_count: usize,
    /// Requests allowed to wait for a worker before new ones get 503.
    pub queue_capacity: usize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ConfigBuilder::default()
            .build()
            .expect("defaults are valid")
    }
}

/// Layered, partially specified configuration.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigBuilder {
    pub listen_address: Option<String>,
    pub threshold: Option<f64>,
    pub sampler_kind: Option<SamplerKind>,
    pub sampler_k: Option<usize>,
    pub sampler_seed: Option<u64>,
    pub window_radius: Option<usize>,
    pub grid_stride: Option<usize>,
    pub min_eig: Option<f64>,
    pub max_body_bytes: Option<usize>,
    pub workers: Option<usize>,
    pub queue: Option<usize>,
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::BadValue {
        key: key.into(),
        value: value.into(),
    })
}

impl ConfigBuilder {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "listen_address" => self.listen_address = Some(value.to_string()),
            "threshold" => self.threshold = Some(parse(key, value)?),
            "sampler.kind" => self.sampler_kind = Some(parse(key, value)?),
            "sampler.k" => self.sampler_k = Some(parse(key, value)?),
            "sampler.seed" => self.sampler_seed = Some(parse(key, value)?),
            "flow.window_radius" => self.window_radius = Some(parse(key, value)?),
            "flow.grid_stride" => self.grid_stride = Some(parse(key, value)?),
            "flow.min_eig" => self.min_eig = Some(parse(key, value)?),
            "max_body_bytes" => self.max_body_bytes = Some(parse(key, value)?),
            "workers" => self.workers = Some(parse(key, value)?),
            "queue" => self.queue = Some(parse(key, value)?),
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    /// Applies a config file body. Blank lines and `#` comments are skipped.
    pub fn apply_file(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or(ConfigError::Syntax { line: i + 1 })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// Applies `IIS_ADDR`, `IIS_THRESHOLD`, `IIS_SAMPLER`, `IIS_K` and `IIS_MAX_BODY`.
    pub fn apply_env(&mut self, env: &HashMap<String, String>) -> Result<(), ConfigError> {
        for (var, key) in [
            ("IIS_ADDR", "listen_address"),
            ("IIS_THRESHOLD", "threshold"),
            ("IIS_SAMPLER", "sampler.kind"),
            ("IIS_K", "sampler.k"),
            ("IIS_MAX_BODY", "max_body_bytes"),
        ] {
            if let Some(value) = env.get(var) {
                self.set(key, value.trim())?;
            }
        }
        Ok(())
    }

    /// Overlays every value set in `other`.
    pub fn merge(&mut self, other: &ConfigBuilder) {
        macro_rules! take {
            ($($field:ident),*) => { $( if other.$field.is_some() { self.$field = other.$field.clone(); } )* };
        }
        take!(
            listen_address,
            threshold,
            sampler_kind,
            sampler_k,
            sampler_seed,
            window_radius,
            grid_stride,
            min_eig,
            max_body_bytes,
            workers,
            queue
        );
    }

    pub fn build(&self) -> Result<ServiceConfig, ConfigError> {
        let defaults = FlowParams::default();
        let flow = FlowParams::new(
            self.window_radius.unwrap_or(defaults.window_radius),
            self.grid_stride.unwrap_or(defaults.grid_stride),
            self.min_eig.unwrap_or(defaults.min_eigenvalue),
        );
        flow.validate().map_err(|e| ConfigError::BadValue {
            key: "flow".into(),
            value: e.to_string(),
        })?;
        let threshold = self.threshold.unwrap_or(DEFAULT_THRESHOLD);
        if !(threshold >= 0.0 && threshold.is_finite()) {
            return Err(ConfigError::BadThreshold);
        }
        let max_body_bytes = self.max_body_bytes.unwrap_or(DEFAULT_MAX_BODY);
        if max_body_bytes < MIN_BODY {
            return Err(ConfigError::BodyTooSmall);
        }
        let worker_count = match self.workers {
            Some(0) => return Err(ConfigError::NoWorkers),
            Some(n) => n,
            None => std::thread::available_parallelism().map_or(1, |n| n.get()),
        };
        Ok(ServiceConfig {
            listen_address: self
                .listen_address
                .clone()
                .unwrap_or_else(|| DEFAULT_ADDR.to_string()),
            threshold,
            sampler: SamplerSpec {
                kind: self.sampler_kind.unwrap_or(SamplerKind::Uniform),
                k: self.sampler_k.unwrap_or(DEFAULT_K),
                seed: self.sampler_seed,
            },
            flow,
            max_body_bytes,
            worker_count,
            queue_capacity: self.queue.unwrap_or(2 * worker_count),
        })
    }
}
