use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{mean_stderr, AlgoError, Target, TrainReport};
use crate::circuit::{Circuit, GateKind, Instruction, Param};
use crate::compiler::{compile, CompiledCircuit};
use crate::optimize::{grid_sweep, linspace, nelder_mead, Estimate, NelderMeadOptions, OptimizeError, SweepResult};
use crate::seed::derive_seed;

pub const THETA: &str = "theta";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaeDataset {
    pub phis: Vec<f64>,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    pub seed: u64,
}

/// `n_points` angles spaced evenly over `[lo, hi]`, with `n_train` of them
/// drawn without replacement (by `seed`) for training and the rest for test.
pub fn qae_dataset(n_points: usize, lo: f64, hi: f64, n_train: usize, seed: u64) -> Result<QaeDataset, AlgoError> {
    if n_points < 2 || n_train == 0 || n_train >= n_points {
        return Err(AlgoError::Invalid(format!(
            "need 2 <= n_points and 1 <= n_train < n_points (got {n_points}, {n_train})"
        )));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(AlgoError::Invalid(format!("need finite lo < hi (got {lo}, {hi})")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = rand::seq::index::sample(&mut rng, n_points, n_train).into_vec();
    train.sort_unstable();
    let test = (0..n_points).filter(|i| train.binary_search(i).is_err()).collect();
    Ok(QaeDataset {
        phis: linspace(lo, hi, n_points),
        train_indices: train,
        test_indices: test,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QaeMode {
    /// Trash qubit measured right after encoding.
    Halfway,
    /// Encode, decode with a fresh qubit, undo the preparation, measure the
    /// reconstructed register.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subset {
    Train,
    Test,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QaeConfig {
    pub mode: QaeMode,
    /// Base seed for per-evaluation shot seeds.
    pub seed: u64,
}

/// The autoencoder circuit on abstract qubits `q0`, `q1` (trash) and, in
/// full mode, `q2` (refresh). Success is every measured bit reading 0.
pub fn qae_build_circuit(phi: f64, theta: Param, mode: QaeMode) -> Result<Circuit, AlgoError> {
    use GateKind::{CNOT, RY};
    let mut v = vec![
        Instruction::rotation(RY, phi, "q0"),
        Instruction::two(CNOT, "q0", "q1"),
        Instruction::two(CNOT, "q0", "q1"),
        Instruction::rotation(RY, theta.clone(), "q1"),
    ];
    match mode {
        QaeMode::Halfway => v.push(Instruction::measure("q1", 0)),
        QaeMode::Full => v.extend([
            Instruction::rotation(RY, -theta, "q2"),
            Instruction::two(CNOT, "q0", "q2"),
            Instruction::two(CNOT, "q0", "q2"),
            Instruction::rotation(RY, -phi, "q0"),
            Instruction::measure("q0", 0),
            Instruction::measure("q2", 1),
        ]),
    }
    Ok(Circuit::new(v)?)
}

/// A dataset, mode and target with every data point compiled once.
#[derive(Debug, Clone)]
pub struct QaeProblem {
    pub dataset: QaeDataset,
    pub config: QaeConfig,
    pub target: Target,
    compiled: Vec<CompiledCircuit>,
}

impl QaeProblem {
    pub fn new(dataset: QaeDataset, config: QaeConfig, target: Target) -> Result<Self, AlgoError> {
        let compiled = dataset
            .phis
            .iter()
            .map(|&phi| Ok(compile(&qae_build_circuit(phi, Param::symbol(THETA), config.mode)?, target.device())?))
            .collect::<Result<_, AlgoError>>()?;
        Ok(QaeProblem { dataset, config, target, compiled })
    }

    /// Compiled circuit for data point `index`, still symbolic in `theta`.
    pub fn compiled(&self, index: usize) -> &CompiledCircuit {
        &self.compiled[index]
    }

    fn indices(&self, subset: Subset) -> &[usize] {
        match subset {
            Subset::Train => &self.dataset.train_indices,
            Subset::Test => &self.dataset.test_indices,
        }
    }

    /// Success probability estimate for each point of `subset`.
    pub fn success_probabilities(&self, theta: f64, subset: Subset) -> Result<Vec<f64>, AlgoError> {
        let binding = BTreeMap::from([(THETA.to_string(), theta)]);
        self.indices(subset)
            .par_iter()
            .map(|&i| {
                let bound = self.compiled[i].circuit.bind_parameters(&binding)?;
                let seed = derive_seed(self.config.seed, &[theta.to_bits(), i as u64]);
                self.target.outcome_probability(&bound, 0, seed)
            })
            .collect()
    }

    /// Loss `−mean(success)` over `subset` and its binomial standard error.
    pub fn cost(&self, theta: f64, subset: Subset) -> Result<Estimate, AlgoError> {
        if self.indices(subset).is_empty() {
            return Err(AlgoError::Invalid(format!("{subset:?} subset is empty")));
        }
        let ps = self.success_probabilities(theta, subset)?;
        Ok(Estimate {
            value: -ps.iter().sum::<f64>() / ps.len() as f64,
            stderr: mean_stderr(&ps, self.target.shots()),
        })
    }
}

pub fn qae_cost(theta: f64, problem: &QaeProblem, subset: Subset) -> Result<Estimate, AlgoError> {
    problem.cost(theta, subset)
}

pub(crate) fn flatten<E: Into<AlgoError>>(e: OptimizeError<E>) -> AlgoError {
    match e {
        OptimizeError::Objective(inner) => inner.into(),
        OptimizeError::NonFinite { params, value } => {
            AlgoError::Optimize(format!("objective returned {value} at {params:?}"))
        }
        OptimizeError::InvalidOptions(m) => AlgoError::Optimize(m),
    }
}

/// Training loss on an inclusive grid of `points` angles over `[lo, hi]`.
pub fn qae_sweep(problem: &QaeProblem, points: usize, lo: f64, hi: f64) -> Result<SweepResult, AlgoError> {
    grid_sweep(|t| problem.cost(t, Subset::Train), lo, hi, points).map_err(flatten)
}

/// Minimize the training loss from `x0` with Nelder-Mead, then report the
/// training and test losses at the best angle. For sampled targets without
/// an explicit noise floor, the floor is the standard error at `x0`.
pub fn qae_train(problem: &QaeProblem, x0: f64, options: &NelderMeadOptions) -> Result<TrainReport, AlgoError> {
    let mut options = *options;
    if options.noise_floor.is_none() && problem.target.shots().is_some() {
        options.noise_floor = Some(problem.cost(x0, Subset::Train)?.stderr);
    }
    let result = nelder_mead(|x: &[f64]| problem.cost(x[0], Subset::Train).map(|e| e.value), &[x0], &options)
        .map_err(flatten)?;
    let best = result.best_params[0];
    let train = problem.cost(best, Subset::Train)?;
    let test = if problem.dataset.test_indices.is_empty() {
        None
    } else {
        Some(problem.cost(best, Subset::Test)?)
    };
    Ok(TrainReport {
        optimize: result,
        train_loss: train.value,
        train_stderr: train.stderr,
        test_loss: test.map(|e| e.value),
        test_stderr: test.map(|e| e.stderr),
        accuracy: None,
        target: problem.target.info(),
        seed: problem.config.seed,
    })
}
