use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hqc::algorithms::{QaeMode, XorVariant};
use hqc::backend::{serve, DEFAULT_SERVICE_URL, SERVICE_ENV};
use hqc::circuit::{parse_program, print_program, Circuit};
use hqc::compiler::{compile, DeviceSpec};
use hqc::optimize::NelderMeadOptions;
use hqc::results::{
    replay, BackendChoice, ExecConfig, Payload, QaeDataConfig, ResultFile, RunConfig, XorDataConfig,
};
use hqc::simulator::NoiseModel;

/// Hybrid quantum-classical experiment pipeline.
#[derive(Parser)]
#[command(name = "hqc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a .qp program for a device and print the result.
    Compile {
        program: PathBuf,
        #[arg(long, default_value = "agave8")]
        device: String,
        /// Write the compiled program here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Execute a program and write a result file.
    Run {
        program: PathBuf,
        #[command(flatten)]
        exec: ExecArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Start the job service.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8765")]
        addr: String,
        #[arg(long, default_value = "agave8")]
        device: String,
        #[command(flatten)]
        noise: NoiseArgs,
    },
    /// Quantum autoencoder experiments.
    Qae {
        #[command(subcommand)]
        command: QaeCommand,
    },
    /// XOR classifier experiments.
    Classify {
        #[command(subcommand)]
        command: ClassifyCommand,
    },
    /// Re-run a result file's configuration and compare payloads.
    Replay {
        file: PathBuf,
        /// Run remote configurations on the in-process simulator.
        #[arg(long)]
        local: bool,
    },
}

#[derive(Subcommand)]
enum QaeCommand {
    /// Training loss over an even grid of encoder angles.
    Sweep {
        #[command(flatten)]
        common: QaeArgs,
        #[arg(long, default_value_t = 50)]
        points: usize,
        #[arg(long, default_value_t = -std::f64::consts::PI, allow_hyphen_values = true)]
        lo: f64,
        #[arg(long, default_value_t = std::f64::consts::PI, allow_hyphen_values = true)]
        hi: f64,
    },
    /// Train the encoder angle with Nelder-Mead.
    Train {
        #[command(flatten)]
        common: QaeArgs,
        #[arg(long, default_value_t = std::f64::consts::PI / 1.2, allow_hyphen_values = true)]
        x0: f64,
        #[command(flatten)]
        optimizer: OptimizerArgs,
    },
}

#[derive(Subcommand)]
enum ClassifyCommand {
    /// Train (w0, w1) on an XOR dataset.
    Train {
        #[command(flatten)]
        exec: ExecArgs,
        #[arg(long, default_value_t = 10)]
        per_cluster: usize,
        #[arg(long, default_value_t = 0.3)]
        spread: f64,
        #[arg(long, value_enum, default_value_t = Variant::Standard)]
        variant: Variant,
        /// Dataset seed; defaults to --seed.
        #[arg(long)]
        data_seed: Option<u64>,
        #[arg(long, default_value_t = 0.1, allow_hyphen_values = true)]
        w0: f64,
        #[arg(long, default_value_t = 0.1, allow_hyphen_values = true)]
        w1: f64,
        #[command(flatten)]
        optimizer: OptimizerArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decision-boundary grid of p1 over [-pi, pi]^2.
    Grid {
        #[arg(long, allow_hyphen_values = true)]
        w0: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        w1: f64,
        #[arg(long, default_value_t = 41)]
        points: usize,
        /// Use the closed form unless a backend is given.
        #[arg(long)]
        backend: Option<BackendKind>,
        #[arg(long, default_value = "agave8")]
        device: String,
        #[arg(long, default_value_t = 10_000)]
        shots: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, env = SERVICE_ENV, default_value = DEFAULT_SERVICE_URL)]
        url: String,
        #[command(flatten)]
        noise: NoiseArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendKind {
    Exact,
    Local,
    Remote,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Halfway,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Standard,
    Shifted,
}

#[derive(Args)]
struct NoiseArgs {
    /// Depolarizing probability after each single-qubit gate.
    #[arg(long, default_value_t = 0.0)]
    p1: f64,
    /// Depolarizing probability after each two-qubit gate.
    #[arg(long, default_value_t = 0.0)]
    p2: f64,
    #[arg(long, default_value_t = 0.0)]
    readout_flip: f64,
}

impl NoiseArgs {
    fn model(&self) -> Result<Option<NoiseModel>, Failure> {
        if self.p1 == 0.0 && self.p2 == 0.0 && self.readout_flip == 0.0 {
            return Ok(None);
        }
        NoiseModel::new(self.p1, self.p2, self.readout_flip)
            .map(Some)
            .map_err(|e| Failure::Usage(e.to_string()))
    }
}

#[derive(Args)]
struct ExecArgs {
    #[arg(long, value_enum, default_value_t = BackendKind::Local)]
    backend: BackendKind,
    /// Device name or path to a device JSON file.
    #[arg(long, default_value = "agave8")]
    device: String,
    #[arg(long, default_value_t = 10_000)]
    shots: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Job service URL for --backend remote.
    #[arg(long, env = SERVICE_ENV, default_value = DEFAULT_SERVICE_URL)]
    url: String,
    #[command(flatten)]
    noise: NoiseArgs,
}

impl ExecArgs {
    fn config(&self) -> Result<ExecConfig, Failure> {
        exec_config(self.backend, &self.device, self.shots, self.seed, &self.url, &self.noise)
    }
}

fn exec_config(
    backend: BackendKind,
    device: &str,
    shots: usize,
    seed: u64,
    url: &str,
    noise: &NoiseArgs,
) -> Result<ExecConfig, Failure> {
    if shots == 0 {
        return Err(Failure::Usage("--shots must be positive".into()));
    }
    Ok(ExecConfig {
        backend: match backend {
            BackendKind::Exact => BackendChoice::Exact,
            BackendKind::Local => BackendChoice::Local,
            BackendKind::Remote => BackendChoice::Remote { url: url.to_string() },
        },
        device: load_device(device)?,
        shots,
        noise: noise.model()?,
        seed,
    })
}

#[derive(Args)]
struct QaeArgs {
    #[arg(long, value_enum, default_value_t = Mode::Halfway)]
    mode: Mode,
    #[command(flatten)]
    exec: ExecArgs,
    #[arg(long, default_value_t = 40)]
    data_points: usize,
    #[arg(long, default_value_t = 8)]
    train_points: usize,
    /// Train/test split seed; defaults to --seed.
    #[arg(long)]
    data_seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl QaeArgs {
    fn mode(&self) -> QaeMode {
        match self.mode {
            Mode::Halfway => QaeMode::Halfway,
            Mode::Full => QaeMode::Full,
        }
    }

    fn data(&self) -> QaeDataConfig {
        QaeDataConfig {
            n_points: self.data_points,
            n_train: self.train_points,
            ..QaeDataConfig::standard(self.data_seed.unwrap_or(self.exec.seed))
        }
    }
}

#[derive(Args)]
struct OptimizerArgs {
    #[arg(long, default_value_t = 200)]
    max_evals: usize,
    #[arg(long, default_value_t = 0.5)]
    initial_step: f64,
    #[arg(long, default_value_t = 1e-6)]
    xtol: f64,
    #[arg(long, default_value_t = 1e-8)]
    ftol: f64,
}

impl OptimizerArgs {
    fn options(&self) -> NelderMeadOptions {
        NelderMeadOptions {
            initial_step: self.initial_step,
            max_evals: self.max_evals,
            xtol: self.xtol,
            ftol: self.ftol,
            noise_floor: None,
        }
    }
}

enum Failure {
    /// Bad input: exit 2.
    Usage(String),
    /// Execution failed: exit 1.
    Exec(String),
}

fn exec_err(e: impl std::fmt::Display) -> Failure {
    Failure::Exec(e.to_string())
}

fn load_device(name: &str) -> Result<DeviceSpec, Failure> {
    DeviceSpec::resolve(name).map_err(|e| Failure::Usage(format!("device {name}: {e}")))
}

fn load_program(path: &Path) -> Result<(String, Circuit), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let circuit = parse_program(&text).map_err(|e| Failure::Usage(format!("{}:{e}", path.display())))?;
    Ok((text, circuit))
}

fn write_result(config: RunConfig, out: Option<PathBuf>, default_name: &str) -> Result<ResultFile, Failure> {
    let file = ResultFile::produce(config, false).map_err(exec_err)?;
    let path = out.unwrap_or_else(|| PathBuf::from(default_name));
    let csv = file.save(&path).map_err(exec_err)?;
    eprintln!("wrote {} and {}", path.display(), csv.display());
    Ok(file)
}

fn summarize(file: &ResultFile) {
    match &file.payload {
        Payload::Sweep(s) => {
            if let Some((theta, cost)) = s.argmin() {
                println!("points {}  min cost {cost:.6} at theta {theta:.6}", s.grid.len());
            }
        }
        Payload::Train(t) => {
            println!(
                "best {:?}  train loss {:.6}  evals {}  converged {}",
                t.optimize.best_params, t.train_loss, t.optimize.n_evals, t.optimize.converged
            );
            if let Some(test) = t.test_loss {
                println!("test loss {test:.6}");
            }
            if let Some(acc) = t.accuracy {
                println!("accuracy {acc:.4}");
            }
        }
        Payload::Grid(g) => println!("{0}x{0} grid", g.axis.len()),
        Payload::Run(r) => {
            for (b, n) in &r.counts {
                println!("{b} {n}");
            }
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Compile { program, device, out } => {
            let (_, circuit) = load_program(&program)?;
            let device = load_device(&device)?;
            let c = compile(&circuit, &device).map_err(exec_err)?;
            let mut text = format!("# device: {}\n# depth: {}\n# swaps: {}\n", device.name(), c.depth, c.swaps);
            let counts: Vec<String> = c.gate_counts.iter().map(|(k, n)| format!("{k}={n}")).collect();
            text += &format!("# gates: {}\n", counts.join(" "));
            if !c.initial_map.is_empty() {
                let map: Vec<String> = c.initial_map.iter().map(|(k, v)| format!("%{k}->{v}")).collect();
                text += &format!("# initial_map: {}\n", map.join(" "));
            }
            let perm: Vec<String> = c.final_permutation.iter().map(|p| p.to_string()).collect();
            text += &format!("# final_permutation: {}\n", perm.join(" "));
            text += &print_program(&c.circuit);
            match out {
                Some(path) => std::fs::write(&path, text).map_err(|e| exec_err(format!("{}: {e}", path.display())))?,
                None => print!("{text}"),
            }
        }
        Command::Run { program, exec, out } => {
            let (text, circuit) = load_program(&program)?;
            let exec = exec.config()?;
            let program = if circuit.is_physical() {
                text
            } else {
                print_program(&compile(&circuit, &exec.device).map_err(exec_err)?.circuit)
            };
            let file = write_result(RunConfig::Run { exec, program }, out, "run.json")?;
            summarize(&file);
        }
        Command::Serve { addr, device, noise } => {
            let device = load_device(&device)?;
            let handle = serve(&addr, device, noise.model()?).map_err(exec_err)?;
            eprintln!("serving on {}", handle.url());
            handle.wait();
        }
        Command::Qae { command } => {
            let (config, out, name) = match command {
                QaeCommand::Sweep { common, points, lo, hi } => (
                    RunConfig::QaeSweep {
                        exec: common.exec.config()?,
                        mode: common.mode(),
                        data: common.data(),
                        points,
                        lo,
                        hi,
                    },
                    common.out,
                    "qae-sweep.json",
                ),
                QaeCommand::Train { common, x0, optimizer } => (
                    RunConfig::QaeTrain {
                        exec: common.exec.config()?,
                        mode: common.mode(),
                        data: common.data(),
                        x0,
                        options: optimizer.options(),
                    },
                    common.out,
                    "qae-train.json",
                ),
            };
            summarize(&write_result(config, out, name)?);
        }
        Command::Classify { command } => {
            let (config, out, name) = match command {
                ClassifyCommand::Train { exec, per_cluster, spread, variant, data_seed, w0, w1, optimizer, out } => {
                    let data = XorDataConfig {
                        per_cluster,
                        spread,
                        variant: match variant {
                            Variant::Standard => XorVariant::Standard,
                            Variant::Shifted => XorVariant::Shifted,
                        },
                        seed: data_seed.unwrap_or(exec.seed),
                    };
                    let config = RunConfig::ClassifyTrain {
                        exec: exec.config()?,
                        data,
                        w_init: (w0, w1),
                        options: optimizer.options(),
                    };
                    (config, out, "classify-train.json")
                }
                ClassifyCommand::Grid { w0, w1, points, backend, device, shots, seed, url, noise, out } => {
                    let exec = match backend {
                        None => None,
                        Some(kind) => Some(exec_config(kind, &device, shots, seed, &url, &noise)?),
                    };
                    (RunConfig::ClassifyGrid { exec, w0, w1, points }, out, "classify-grid.json")
                }
            };
            summarize(&write_result(config, out, name)?);
        }
        Command::Replay { file, local } => {
            let original = ResultFile::load(&file).map_err(|e| Failure::Usage(e.to_string()))?;
            let (same, _) = replay(&original, local).map_err(exec_err)?;
            if !same {
                return Err(Failure::Exec(format!("{}: replayed payload differs", file.display())));
            }
            println!("{}: payload reproduced", file.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Exec(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
