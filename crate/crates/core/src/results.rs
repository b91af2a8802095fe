//! Versioned JSON result files with a flat CSV twin.
//!
//! A [`ResultFile`] carries the full configuration that produced it (device,
//! shots, noise, every seed, grid and optimizer settings), so [`replay`] can
//! regenerate the payload and compare it byte for byte.
//!
//! ```text
//! {
//!   "format_version": 1,
//!   "created_at": "2026-01-01T00:00:00Z",
//!   "config": {"command": "qae_sweep", ...},
//!   "kind": "sweep" | "train" | "grid" | "run",
//!   "payload": {...}
//! }
//! ```

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algorithms::{
    classifier_train, decision_grid, qae_dataset, qae_sweep, qae_train, xor_dataset, AlgoError, ClassifierProblem,
    GridSource, QaeConfig, QaeMode, QaeProblem, Target, TrainReport, XorVariant,
};
use crate::backend::{Backend, BackendError, JobRequest, LocalBackend, RemoteBackend};
use crate::compiler::DeviceSpec;
use crate::numfmt::sig17;
use crate::optimize::{linspace, NelderMeadOptions, SweepResult};
use crate::simulator::{Bitstring, NoiseModel};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ResultError {
    #[error(transparent)]
    Algorithm(#[from] AlgoError),
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error("{0}")]
    Config(String),
    #[error("unsupported format_version {0}")]
    Version(u32),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed result file: {0}")]
    Json(#[from] serde_json::Error),
}

/// How circuits are executed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "type")]
pub enum BackendChoice {
    /// Exact probabilities; no shots.
    Exact,
    Local,
    Remote { url: String },
}

/// Execution settings shared by every command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecConfig {
    pub backend: BackendChoice,
    pub device: DeviceSpec,
    pub shots: usize,
    pub noise: Option<NoiseModel>,
    pub seed: u64,
}

impl ExecConfig {
    /// Build the execution target. `force_local` swaps a remote backend for
    /// the in-process one, which yields identical results.
    pub fn target(&self, force_local: bool) -> Result<Target, ResultError> {
        let local = || -> Arc<dyn Backend> { Arc::new(LocalBackend::new(self.device.clone(), None)) };
        let backend: Arc<dyn Backend> = match &self.backend {
            BackendChoice::Exact => return Ok(Target::Exact(self.device.clone())),
            BackendChoice::Local => local(),
            BackendChoice::Remote { .. } if force_local => local(),
            BackendChoice::Remote { url } => {
                let remote = RemoteBackend::connect(url)?;
                if remote.device() != &self.device {
                    return Err(ResultError::Config(format!(
                        "service at {url} runs device {}, config expects {}",
                        remote.device().name(),
                        self.device.name()
                    )));
                }
                Arc::new(remote)
            }
        };
        Ok(Target::sampled(backend, self.shots, self.noise)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaeDataConfig {
    pub n_points: usize,
    pub lo: f64,
    pub hi: f64,
    pub n_train: usize,
    pub seed: u64,
}

impl QaeDataConfig {
    pub fn standard(seed: u64) -> Self {
        QaeDataConfig { n_points: 40, lo: 0.0, hi: PI, n_train: 8, seed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XorDataConfig {
    pub per_cluster: usize,
    pub spread: f64,
    pub variant: XorVariant,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "command")]
pub enum RunConfig {
    QaeSweep {
        exec: ExecConfig,
        mode: QaeMode,
        data: QaeDataConfig,
        points: usize,
        lo: f64,
        hi: f64,
    },
    QaeTrain {
        exec: ExecConfig,
        mode: QaeMode,
        data: QaeDataConfig,
        x0: f64,
        options: NelderMeadOptions,
    },
    ClassifyTrain {
        exec: ExecConfig,
        data: XorDataConfig,
        w_init: (f64, f64),
        options: NelderMeadOptions,
    },
    ClassifyGrid {
        /// `None` evaluates the closed form.
        exec: Option<ExecConfig>,
        w0: f64,
        w1: f64,
        points: usize,
    },
    Run {
        exec: ExecConfig,
        program: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPayload {
    /// Shared θ0/θ1 axis over [−π, π].
    pub axis: Vec<f64>,
    /// `p1[i][j]` at (axis[i], axis[j]).
    pub p1: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub shots: usize,
    pub seed: u64,
    pub counts: BTreeMap<Bitstring, usize>,
    pub bitstrings: Vec<Bitstring>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "payload")]
pub enum Payload {
    Sweep(SweepResult),
    Train(TrainReport),
    Grid(GridPayload),
    Run(RunSummary),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub format_version: u32,
    pub created_at: chrono::DateTime<chrono::Utc>,
    pub config: RunConfig,
    #[serde(flatten)]
    pub payload: Payload,
}

/// Execute a configuration.
pub fn execute(config: &RunConfig, force_local: bool) -> Result<Payload, ResultError> {
    Ok(match config {
        RunConfig::QaeSweep { exec, mode, data, points, lo, hi } => {
            let problem = qae_problem(exec, *mode, data, force_local)?;
            Payload::Sweep(qae_sweep(&problem, *points, *lo, *hi)?)
        }
        RunConfig::QaeTrain { exec, mode, data, x0, options } => {
            let problem = qae_problem(exec, *mode, data, force_local)?;
            Payload::Train(qae_train(&problem, *x0, options)?)
        }
        RunConfig::ClassifyTrain { exec, data, w_init, options } => {
            let dataset = xor_dataset(data.per_cluster, data.spread, data.seed, data.variant)?;
            let problem = ClassifierProblem::new(dataset, exec.target(force_local)?, exec.seed)?;
            Payload::Train(classifier_train(&problem, *w_init, options)?)
        }
        RunConfig::ClassifyGrid { exec, w0, w1, points } => {
            let p1 = match exec {
                None => decision_grid((*w0, *w1), *points, GridSource::Analytic)?,
                Some(exec) => {
                    // the dataset is unused for grid evaluation
                    let dataset = xor_dataset(1, 0.0, exec.seed, XorVariant::Standard)?;
                    let problem = ClassifierProblem::new(dataset, exec.target(force_local)?, exec.seed)?;
                    decision_grid((*w0, *w1), *points, GridSource::Estimated(&problem))?
                }
            };
            Payload::Grid(GridPayload { axis: linspace(-PI, PI, *points), p1 })
        }
        RunConfig::Run { exec, program } => {
            let backend: Arc<dyn Backend> = match exec.target(force_local)? {
                Target::Sampled { backend, .. } => backend,
                Target::Exact(_) => return Err(ResultError::Config("run needs a local or remote backend".into())),
            };
            let request = JobRequest::new(program.clone(), exec.shots)
                .with_noise(exec.noise)
                .with_seed(exec.seed);
            let r = backend.execute(&request)?;
            let counts = r.counts();
            Payload::Run(RunSummary { shots: r.shots, seed: r.seed, counts, bitstrings: r.bitstrings })
        }
    })
}

fn qae_problem(exec: &ExecConfig, mode: QaeMode, data: &QaeDataConfig, force_local: bool) -> Result<QaeProblem, ResultError> {
    let dataset = qae_dataset(data.n_points, data.lo, data.hi, data.n_train, data.seed)?;
    Ok(QaeProblem::new(dataset, QaeConfig { mode, seed: exec.seed }, exec.target(force_local)?)?)
}

impl ResultFile {
    /// Run `config` and stamp the result with the current time.
    pub fn produce(config: RunConfig, force_local: bool) -> Result<Self, ResultError> {
        let payload = execute(&config, force_local)?;
        Ok(ResultFile { format_version: FORMAT_VERSION, created_at: chrono::Utc::now(), config, payload })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result files serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, ResultError> {
        let file: ResultFile = serde_json::from_str(text)?;
        if file.format_version != FORMAT_VERSION {
            return Err(ResultError::Version(file.format_version));
        }
        Ok(file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ResultError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ResultError::Io { path: path.into(), source })?;
        ResultFile::from_json(&text)
    }

    /// Write the JSON file and its CSV twin (same stem, `.csv`).
    pub fn save(&self, path: impl AsRef<Path>) -> Result<PathBuf, ResultError> {
        let path = path.as_ref();
        let io = |source| ResultError::Io { path: path.into(), source };
        std::fs::write(path, self.to_json() + "\n").map_err(io)?;
        let csv_path = path.with_extension("csv");
        std::fs::write(&csv_path, self.payload.to_csv())
            .map_err(|source| ResultError::Io { path: csv_path.clone(), source })?;
        Ok(csv_path)
    }

    pub fn payload_json(&self) -> String {
        serde_json::to_string(&self.payload).expect("payload serializes")
    }
}

/// Re-run a file's configuration and report whether the payload comes out
/// byte-identical. Returns the regenerated payload alongside.
pub fn replay(file: &ResultFile, force_local: bool) -> Result<(bool, Payload), ResultError> {
    let again = execute(&file.config, force_local)?;
    let same = serde_json::to_string(&again)? == file.payload_json();
    Ok((same, again))
}

impl Payload {
    /// Number of CSV data rows [`Payload::to_csv`] writes.
    pub fn rows(&self) -> usize {
        match self {
            Payload::Sweep(s) => s.grid.len(),
            Payload::Train(t) => t.optimize.trace.len(),
            Payload::Grid(g) => g.axis.len(),
            Payload::Run(r) => r.counts.len(),
        }
    }

    /// Flat CSV with a header row; numbers use 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match self {
            Payload::Sweep(s) => {
                out.push_str("theta,cost,stderr\n");
                for ((g, c), e) in s.grid.iter().zip(&s.costs).zip(&s.stderr) {
                    let _ = writeln!(out, "{},{},{}", sig17(*g), sig17(*c), sig17(*e));
                }
            }
            Payload::Train(t) => {
                let dim = t.optimize.best_params.len();
                let params: Vec<String> = (0..dim).map(|i| format!("x{i}")).collect();
                let _ = writeln!(out, "iteration,evals,cost,{}", params.join(","));
                for (i, p) in t.optimize.trace.iter().enumerate() {
                    let xs: Vec<String> = p.params.iter().map(|v| sig17(*v)).collect();
                    let _ = writeln!(out, "{i},{},{},{}", p.evals, sig17(p.cost), xs.join(","));
                }
            }
            Payload::Grid(g) => {
                let cols: Vec<String> = g.axis.iter().map(|v| sig17(*v)).collect();
                let _ = writeln!(out, "theta0\\theta1,{}", cols.join(","));
                for (t0, row) in g.axis.iter().zip(&g.p1) {
                    let vals: Vec<String> = row.iter().map(|v| sig17(*v)).collect();
                    let _ = writeln!(out, "{},{}", sig17(*t0), vals.join(","));
                }
            }
            Payload::Run(r) => {
                out.push_str("bitstring,count\n");
                for (b, n) in &r.counts {
                    let _ = writeln!(out, "{b},{n}");
                }
            }
        }
        out
    }
}
