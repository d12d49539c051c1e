//! Declarative experiment configuration (TOML).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::decoder::{DecoderSpec, Loss, Penalty};
use crate::error::{Error, Result};
use crate::preprocess::PreprocessOptions;
use crate::simulate::SimulationConfig;
use crate::split::CvStrategy;
use crate::tuning::TuningStrategy;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    /// Output directory. Not part of the config hash.
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub data: DataSource,
    #[serde(default)]
    pub validation: ValidationConfig,
    #[serde(default = "DecoderSpec::defaults")]
    pub decoders: Vec<DecoderSpec>,
    #[serde(default = "TuningStrategy::defaults")]
    pub tuning: Vec<TuningStrategy>,
    #[serde(default = "CvStrategy::benchmark_defaults")]
    pub cv_strategies: Vec<CvStrategy>,
    #[serde(default)]
    pub cv_benchmark: CvBenchmarkConfig,
    #[serde(default)]
    pub preprocess: PreprocessOptions,
    /// Fill the `runtime` column with wall-clock seconds. Off by default
    /// because it makes outputs differ between runs.
    #[serde(default)]
    pub record_runtime: bool,
    /// Also write every CV split plan of the cv benchmark (large).
    #[serde(default)]
    pub write_plans: bool,
}

fn default_name() -> String {
    "experiment".into()
}

fn default_out() -> PathBuf {
    PathBuf::from("results")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSource {
    Simulation {
        #[serde(default = "default_mus")]
        mu: Vec<f64>,
        /// Base generator settings; `mu` and `seed` inside are overridden.
        #[serde(default)]
        simulation: SimulationConfig,
        /// The tuning benchmark draws one pool of `factor × n_train` samples
        /// in `factor × n_blocks` blocks per μ and splits it into
        /// decoding/validation sides.
        #[serde(default = "default_pool_factor")]
        tuning_pool_factor: usize,
    },
    Csv {
        tasks: Vec<CsvTask>,
    },
}

impl Default for DataSource {
    fn default() -> Self {
        DataSource::Simulation {
            mu: default_mus(),
            simulation: SimulationConfig::default(),
            tuning_pool_factor: default_pool_factor(),
        }
    }
}

fn default_mus() -> Vec<f64> {
    vec![0.05, 0.1, 0.2]
}

fn default_pool_factor() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsvTask {
    pub name: String,
    pub path: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidationConfig {
    pub n_repeats: usize,
    pub fraction: f64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self { n_repeats: 10, fraction: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CvBenchmarkConfig {
    pub n_repeats: usize,
    pub decoder: DecoderSpec,
}

impl Default for CvBenchmarkConfig {
    fn default() -> Self {
        Self {
            n_repeats: 100,
            decoder: DecoderSpec::new(Loss::Hinge, Penalty::L2, 1.0),
        }
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        toml::from_str("").expect("all fields have defaults")
    }
}

/// One unit of data the benchmarks iterate over.
#[derive(Debug, Clone, PartialEq)]
pub enum TaskSource {
    Simulated { mu: f64 },
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Task {
    pub name: String,
    pub source: TaskSource,
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    /// Parses and validates `path`. Relative CSV paths are resolved against
    /// the config file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::File {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let mut config = toml::from_str::<Self>(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if let DataSource::Csv { tasks } = &mut config.data {
            let base = path.parent().unwrap_or(Path::new("."));
            for t in tasks.iter_mut() {
                if t.path.is_relative() {
                    t.path = base.join(&t.path);
                }
            }
        }
        config.validate().map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.decoders.is_empty() {
            return bad("decoders: list is empty".into());
        }
        for (k, d) in self.decoders.iter().enumerate() {
            d.validate().map_err(|e| Error::Config(format!("decoders[{k}]: {e}")))?;
        }
        if self.tuning.is_empty() {
            return bad("tuning: list is empty".into());
        }
        for (k, s) in self.tuning.iter().enumerate() {
            s.validate().map_err(|e| Error::Config(format!("tuning[{k}]: {e}")))?;
        }
        let names: Vec<String> = self.tuning.iter().map(|s| s.name()).collect();
        if let Some(dup) = names.iter().enumerate().find(|(i, n)| names[..*i].contains(n)) {
            return bad(format!("tuning: duplicate strategy {}", dup.1));
        }
        if self.cv_strategies.is_empty() {
            return bad("cv_strategies: list is empty".into());
        }
        self.cv_benchmark
            .decoder
            .validate()
            .map_err(|e| Error::Config(format!("cv_benchmark.decoder: {e}")))?;
        if self.cv_benchmark.n_repeats == 0 {
            return bad("cv_benchmark.n_repeats must be positive".into());
        }
        if self.validation.n_repeats == 0 {
            return bad("validation.n_repeats must be positive".into());
        }
        if !(self.validation.fraction > 0.0 && self.validation.fraction < 1.0) {
            return bad(format!("validation.fraction {} not in (0, 1)", self.validation.fraction));
        }
        let f = self.preprocess.screen_fraction;
        if !(f > 0.0 && f <= 1.0) {
            return bad(format!("preprocess.screen_fraction {f} not in (0, 1]"));
        }
        match &self.data {
            DataSource::Simulation { mu, simulation, tuning_pool_factor } => {
                if mu.is_empty() {
                    return bad("data.mu: list is empty".into());
                }
                if *tuning_pool_factor == 0 {
                    return bad("data.tuning_pool_factor must be positive".into());
                }
                for &m in mu {
                    SimulationConfig { mu: m, ..simulation.clone() }.validate()?;
                }
            }
            DataSource::Csv { tasks } => {
                if tasks.is_empty() {
                    return bad("data.tasks: list is empty".into());
                }
                for t in tasks {
                    if !t.path.is_file() {
                        return Err(Error::File {
                            path: t.path.clone(),
                            message: "file not found".into(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn tasks(&self) -> Vec<Task> {
        match &self.data {
            DataSource::Simulation { mu, .. } => mu
                .iter()
                .map(|&m| Task { name: format!("mu={m}"), source: TaskSource::Simulated { mu: m } })
                .collect(),
            DataSource::Csv { tasks } => tasks
                .iter()
                .map(|t| Task { name: t.name.clone(), source: TaskSource::File(t.path.clone()) })
                .collect(),
        }
    }

    /// Canonical JSON: keys sorted, `out` removed.
    pub fn canonical_json(&self) -> Result<String> {
        let mut value = serde_json::to_value(self)?;
        if let Some(obj) = value.as_object_mut() {
            obj.remove("out");
        }
        // serde_json's default map is ordered by key
        Ok(serde_json::to_string(&value)?)
    }

    /// Hex SHA-256 of [`canonical_json`](Self::canonical_json).
    pub fn hash(&self) -> Result<String> {
        Ok(hex::encode(Sha256::digest(self.canonical_json()?.as_bytes())))
    }
}
