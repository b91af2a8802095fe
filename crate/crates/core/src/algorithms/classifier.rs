use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::qae::flatten;
use super::{AlgoError, Target, TrainReport};
use crate::circuit::{Circuit, GateKind, Instruction, Param};
use crate::compiler::{compile, CompiledCircuit};
use crate::optimize::{linspace, nelder_mead, NelderMeadOptions};
use crate::seed::derive_seed;

pub const DEFAULT_EPS: f64 = 1e-6;
const SYMBOLS: [&str; 4] = ["theta0", "theta1", "w0", "w1"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum XorVariant {
    /// Class 0 around (−π/2, 0) and (π/2, π); class 1 around (−π/2, π) and (π/2, 0).
    Standard,
    /// Class 0 around (−π/2, −π/2) and (π/2, π/2); class 1 around (−π/2, π/2) and (π/2, −π/2).
    Shifted,
}

impl XorVariant {
    /// Cluster centers with their labels, class 0 first.
    pub fn centers(self) -> [((f64, f64), u8); 4] {
        let h = FRAC_PI_2;
        match self {
            XorVariant::Standard => [((-h, 0.0), 0), ((h, PI), 0), ((-h, PI), 1), ((h, 0.0), 1)],
            XorVariant::Shifted => [((-h, -h), 0), ((h, h), 0), ((-h, h), 1), ((h, -h), 1)],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XorDataset {
    pub points: Vec<(f64, f64)>,
    pub labels: Vec<u8>,
    pub centers: Vec<(f64, f64)>,
    pub variant: XorVariant,
    pub spread: f64,
    pub seed: u64,
}

/// `per_cluster` points drawn uniformly from the square of half-width
/// `spread` around each of the four centers, cluster by cluster.
pub fn xor_dataset(per_cluster: usize, spread: f64, seed: u64, variant: XorVariant) -> Result<XorDataset, AlgoError> {
    if per_cluster == 0 || !spread.is_finite() || spread < 0.0 {
        return Err(AlgoError::Invalid(format!(
            "need per_cluster >= 1 and finite spread >= 0 (got {per_cluster}, {spread})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut jitter = |c: f64| if spread > 0.0 { c + rng.random_range(-spread..=spread) } else { c };
    let mut points = Vec::with_capacity(4 * per_cluster);
    let mut labels = Vec::with_capacity(4 * per_cluster);
    for ((x, y), label) in variant.centers() {
        for _ in 0..per_cluster {
            let px = jitter(x);
            points.push((px, jitter(y)));
            labels.push(label);
        }
    }
    Ok(XorDataset {
        points,
        labels,
        centers: variant.centers().iter().map(|(c, _)| *c).collect(),
        variant,
        spread,
        seed,
    })
}

/// Encode (θ0, θ1) with RX on `q0` and `q1`, entangle with CZ, apply
/// RX(w0) ⊗ RX(w1) and measure `q0`.
pub fn classifier_circuit(theta0: Param, theta1: Param, w0: Param, w1: Param) -> Result<Circuit, AlgoError> {
    use GateKind::{CZ, RX};
    Ok(Circuit::new(vec![
        Instruction::rotation(RX, theta0, "q0"),
        Instruction::rotation(RX, theta1, "q1"),
        Instruction::two(CZ, "q0", "q1"),
        Instruction::rotation(RX, w0, "q0"),
        Instruction::rotation(RX, w1, "q1"),
        Instruction::measure("q0", 0),
    ])?)
}

/// Closed-form probability of reading 1 on the top qubit.
pub fn p1_analytic(theta0: f64, theta1: f64, w0: f64) -> f64 {
    let (c0, s0) = ((theta0 / 2.0).cos().powi(2), (theta0 / 2.0).sin().powi(2));
    let (cw, sw) = ((w0 / 2.0).cos().powi(2), (w0 / 2.0).sin().powi(2));
    let p = c0 * sw + s0 * cw + 0.5 * w0.sin() * theta0.sin() * theta1.cos();
    if (-1e-12..0.0).contains(&p) {
        0.0
    } else if (1.0..1.0 + 1e-12).contains(&p) {
        1.0
    } else {
        p
    }
}

/// `−(Σ_{label 1} ln p − Σ_{label 0} ln p)` with each `p` clamped to
/// `[eps, 1 − eps]`.
pub fn cross_entropy_loss(p1s: &[f64], labels: &[u8], eps: f64) -> Result<f64, AlgoError> {
    if p1s.len() != labels.len() {
        return Err(AlgoError::Invalid(format!(
            "{} probabilities for {} labels",
            p1s.len(),
            labels.len()
        )));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(AlgoError::Invalid(format!("eps must be in (0, 0.5), got {eps}")));
    }
    let mut sum = 0.0;
    for (&p, &label) in p1s.iter().zip(labels) {
        let log = p.clamp(eps, 1.0 - eps).ln();
        match label {
            1 => sum -= log,
            0 => sum += log,
            other => return Err(AlgoError::Invalid(format!("label {other} is not 0 or 1"))),
        }
    }
    Ok(sum)
}

/// Fraction of points whose thresholded `p1 > 0.5` matches the label.
pub fn accuracy(p1s: &[f64], labels: &[u8]) -> f64 {
    let hits = p1s.iter().zip(labels).filter(|(&p, &l)| u8::from(p > 0.5) == l).count();
    hits as f64 / labels.len().max(1) as f64
}

/// A dataset and target with the symbolic classifier compiled once.
#[derive(Debug, Clone)]
pub struct ClassifierProblem {
    pub dataset: XorDataset,
    pub target: Target,
    pub seed: u64,
    pub eps: f64,
    compiled: CompiledCircuit,
}

impl ClassifierProblem {
    pub fn new(dataset: XorDataset, target: Target, seed: u64) -> Result<Self, AlgoError> {
        let [t0, t1, w0, w1] = SYMBOLS.map(Param::symbol);
        let compiled = compile(&classifier_circuit(t0, t1, w0, w1)?, target.device())?;
        Ok(ClassifierProblem { dataset, target, seed, eps: DEFAULT_EPS, compiled })
    }

    pub fn compiled(&self) -> &CompiledCircuit {
        &self.compiled
    }

    /// Estimated `p1` at one input.
    pub fn p1(&self, theta: (f64, f64), w: (f64, f64)) -> Result<f64, AlgoError> {
        let values = [theta.0, theta.1, w.0, w.1];
        let binding: BTreeMap<String, f64> = SYMBOLS.iter().map(|s| s.to_string()).zip(values).collect();
        let bound = self.compiled.circuit.bind_parameters(&binding)?;
        let seed = derive_seed(self.seed, &values.map(f64::to_bits));
        self.target.outcome_probability(&bound, 1, seed)
    }

    pub fn p1s(&self, w: (f64, f64)) -> Result<Vec<f64>, AlgoError> {
        self.dataset.points.par_iter().map(|&t| self.p1(t, w)).collect()
    }

    pub fn loss(&self, w: (f64, f64)) -> Result<f64, AlgoError> {
        cross_entropy_loss(&self.p1s(w)?, &self.dataset.labels, self.eps)
    }

    pub fn accuracy(&self, w: (f64, f64)) -> Result<f64, AlgoError> {
        Ok(accuracy(&self.p1s(w)?, &self.dataset.labels))
    }
}

/// Minimize the cross-entropy over `(w0, w1)` from `w_init`.
pub fn classifier_train(
    problem: &ClassifierProblem,
    w_init: (f64, f64),
    options: &NelderMeadOptions,
) -> Result<TrainReport, AlgoError> {
    let result = nelder_mead(|w: &[f64]| problem.loss((w[0], w[1])), &[w_init.0, w_init.1], options)
        .map_err(flatten)?;
    let w = (result.best_params[0], result.best_params[1]);
    let p1s = problem.p1s(w)?;
    Ok(TrainReport {
        train_loss: cross_entropy_loss(&p1s, &problem.dataset.labels, problem.eps)?,
        train_stderr: 0.0,
        test_loss: None,
        test_stderr: None,
        accuracy: Some(accuracy(&p1s, &problem.dataset.labels)),
        optimize: result,
        target: problem.target.info(),
        seed: problem.seed,
    })
}

/// How [`decision_grid`] obtains `p1`.
#[derive(Debug, Clone, Copy)]
pub enum GridSource<'a> {
    Analytic,
    Estimated(&'a ClassifierProblem),
}

/// `p1` on a `grid × grid` inclusive lattice over `[−π, π]²`; row `i` is
/// the `i`-th θ0 value and column `j` the `j`-th θ1 value.
pub fn decision_grid(w: (f64, f64), grid: usize, source: GridSource<'_>) -> Result<Vec<Vec<f64>>, AlgoError> {
    if grid < 2 {
        return Err(AlgoError::Invalid(format!("grid must be at least 2, got {grid}")));
    }
    let axis = linspace(-PI, PI, grid);
    axis.par_iter()
        .map(|&t0| {
            axis.iter()
                .map(|&t1| match source {
                    GridSource::Analytic => Ok(p1_analytic(t0, t1, w.0)),
                    GridSource::Estimated(problem) => problem.p1((t0, t1), w),
                })
                .collect()
        })
        .collect()
}
