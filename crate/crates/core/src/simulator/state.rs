use std::collections::BTreeMap;

use num_complex::Complex64;

use super::SimError;
use crate::circuit::{single_qubit_matrix, two_qubit_matrix, Circuit, Mat2, Mat4, Param, Qubit};

/// Largest register [`run_statevector`] accepts.
pub const MAX_QUBITS: usize = 24;

/// Amplitudes over `n` qubits in little-endian order: bit `q` of an index is
/// the value of qubit `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// |0…0⟩ on `n` qubits.
    pub fn zero(n: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        StateVector { n, amps }
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Option<Self> {
        if !amps.len().is_power_of_two() {
            return None;
        }
        Some(StateVector {
            n: amps.len().trailing_zeros() as usize,
            amps,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }

    pub(crate) fn apply_1q(&mut self, m: &Mat2, q: usize) {
        let stride = 1usize << q;
        for base in (0..self.amps.len()).step_by(stride << 1) {
            for i in base..base + stride {
                let a = self.amps[i];
                let b = self.amps[i + stride];
                self.amps[i] = m[0][0] * a + m[0][1] * b;
                self.amps[i + stride] = m[1][0] * a + m[1][1] * b;
            }
        }
    }

    pub(crate) fn apply_2q(&mut self, m: &Mat4, q0: usize, q1: usize) {
        let (b0, b1) = (1usize << q0, 1usize << q1);
        let mask = b0 | b1;
        for i in 0..self.amps.len() {
            if i & mask != 0 {
                continue;
            }
            let idx = [i, i | b0, i | b1, i | b0 | b1];
            let v = idx.map(|k| self.amps[k]);
            for (r, &k) in idx.iter().enumerate() {
                self.amps[k] = m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2] + m[r][3] * v[3];
            }
        }
    }

    pub(crate) fn apply(&mut self, op: &Op) {
        match op {
            Op::One(m, q) => self.apply_1q(m, *q),
            Op::Two(m, a, b) => self.apply_2q(m, *a, *b),
        }
    }

    /// Marginal distribution over `qubits`; entry `k` has bit `j` equal to
    /// the value of `qubits[j]`.
    pub fn marginal(&self, qubits: &[usize]) -> Result<Vec<f64>, SimError> {
        if let Some(&q) = qubits.iter().find(|&&q| q >= self.n) {
            return Err(SimError::QubitOutOfRange { qubit: q, n: self.n });
        }
        let mut dist = vec![0.0; 1 << qubits.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let k = qubits
                .iter()
                .enumerate()
                .fold(0, |acc, (j, &q)| acc | (((i >> q) & 1) << j));
            dist[k] += p;
        }
        Ok(dist)
    }
}

/// A gate lowered to a matrix on dense qubit indices.
#[derive(Debug, Clone)]
pub(crate) enum Op {
    One(Mat2, usize),
    Two(Mat4, usize, usize),
}

impl Op {
    pub(crate) fn qubits(&self) -> usize {
        match self {
            Op::One(..) => 1,
            Op::Two(..) => 2,
        }
    }
}

/// Lower the non-measurement instructions of a bound, physical circuit,
/// renaming physical indices through `index`.
pub(crate) fn lower(circuit: &Circuit, index: impl Fn(usize) -> usize) -> Result<Vec<Op>, SimError> {
    circuit.require_physical()?;
    circuit.require_bound()?;
    let phys = |q: &Qubit| index(q.physical_index().expect("checked physical"));
    let ops = circuit
        .instructions()
        .iter()
        .filter(|i| !i.is_measure())
        .map(|i| match i.qubits.as_slice() {
            [q] => {
                let angle = match i.params.first() {
                    Some(Param::Const(v)) => *v,
                    _ => 0.0,
                };
                Op::One(single_qubit_matrix(i.kind, angle).expect("1q kind"), phys(q))
            }
            [a, b] => Op::Two(two_qubit_matrix(i.kind).expect("2q kind"), phys(a), phys(b)),
            _ => unreachable!("validated arity"),
        })
        .collect();
    Ok(ops)
}

/// Evolve |0…0⟩ through every gate of a bound, physical circuit.
/// Measurements are ignored. The register is one past the largest index.
pub fn run_statevector(circuit: &Circuit) -> Result<StateVector, SimError> {
    let ops = lower(circuit, |q| q)?;
    let n = circuit.physical_width();
    if n > MAX_QUBITS {
        return Err(SimError::TooManyQubits { got: n, limit: MAX_QUBITS });
    }
    let mut state = StateVector::zero(n);
    for op in &ops {
        state.apply(op);
    }
    Ok(state)
}

/// Non-zero marginal probabilities over `qubits`, keyed by bit pattern
/// (bit `j` of the key is the value of `qubits[j]`).
pub fn probabilities(state: &StateVector, qubits: &[usize]) -> Result<BTreeMap<usize, f64>, SimError> {
    Ok(state
        .marginal(qubits)?
        .into_iter()
        .enumerate()
        .filter(|(_, p)| *p > 0.0)
        .collect())
}
