use num_complex::Complex64;

use super::gates::{single_qubit_matrix, two_qubit_matrix};
use super::{Circuit, CircuitError, Param};

/// Widest circuit [`unitary_of`] will expand.
pub const MAX_UNITARY_QUBITS: usize = 10;

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Matrix { dim, data }
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "matrix must be square");
        Matrix {
            dim,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        Matrix { dim: n, data }
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.data[i * self.dim + j] * v[j]).sum())
            .collect()
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `|Tr(A†B)| / dim`: 1 exactly when the two agree up to a global phase.
    pub fn phase_fidelity(&self, other: &Matrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        let tr: Complex64 = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum();
        tr.norm() / self.dim as f64
    }

    /// Entrywise equality after removing the relative global phase.
    pub fn equal_up_to_phase(&self, other: &Matrix, tol: f64) -> bool {
        let Some(pivot) = (0..self.data.len()).max_by(|&a, &b| {
            self.data[a].norm().total_cmp(&self.data[b].norm())
        }) else {
            return true;
        };
        if other.data[pivot].norm() < 1e-15 {
            return false;
        }
        let phase = self.data[pivot] / other.data[pivot];
        let phase = phase / phase.norm();
        self.data
            .iter()
            .zip(&other.data)
            .all(|(a, b)| (a - b * phase).norm() <= tol)
    }
}

/// Full unitary of a bound, physical, measurement-free circuit in
/// little-endian order (qubit 0 is the least significant index bit). The
/// register width is one past the largest index used.
pub fn unitary_of(circuit: &Circuit) -> Result<Matrix, CircuitError> {
    unitary_of_width(circuit, circuit.physical_width())
}

/// As [`unitary_of`], over an explicit register width.
pub fn unitary_of_width(circuit: &Circuit, width: usize) -> Result<Matrix, CircuitError> {
    circuit.require_physical()?;
    circuit.require_bound()?;
    if circuit.instructions().iter().any(|i| i.is_measure()) {
        return Err(CircuitError::MeasurementPresent);
    }
    let width = width.max(circuit.physical_width());
    if width > MAX_UNITARY_QUBITS {
        return Err(CircuitError::TooManyQubits {
            got: width,
            limit: MAX_UNITARY_QUBITS,
        });
    }
    let dim = 1usize << width;
    let mut u = Matrix::identity(dim);
    for instr in circuit.instructions() {
        let qs: Vec<usize> = instr
            .qubits
            .iter()
            .map(|q| q.physical_index().expect("checked physical"))
            .collect();
        let local: Vec<Vec<Complex64>> = match qs.len() {
            1 => {
                let angle = match instr.params.first() {
                    Some(Param::Const(v)) => *v,
                    _ => 0.0,
                };
                let m = single_qubit_matrix(instr.kind, angle).expect("single-qubit kind");
                m.iter().map(|r| r.to_vec()).collect()
            }
            _ => {
                let m = two_qubit_matrix(instr.kind).expect("two-qubit kind");
                m.iter().map(|r| r.to_vec()).collect()
            }
        };
        u = apply_left(&local, &qs, &u);
    }
    Ok(u)
}

/// `G·U` for a gate `G` acting on `qubits`: row r of the result mixes the
/// rows of `U` that agree with r outside the gate qubits, weighted by the
/// local matrix entries addressed by the gate-qubit bits.
fn apply_left(local: &[Vec<Complex64>], qubits: &[usize], u: &Matrix) -> Matrix {
    let dim = u.dim;
    let gate_mask: usize = qubits.iter().map(|q| 1usize << q).sum();
    let local_index = |basis: usize| -> usize {
        qubits
            .iter()
            .enumerate()
            .map(|(k, q)| ((basis >> q) & 1) << k)
            .sum()
    };
    let with_local = |basis: usize, l: usize| -> usize {
        qubits
            .iter()
            .enumerate()
            .fold(basis & !gate_mask, |acc, (k, q)| acc | (((l >> k) & 1) << q))
    };
    let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
    for r in 0..dim {
        let lr = local_index(r);
        for (l, &g) in local[lr].iter().enumerate() {
            if g.norm_sqr() == 0.0 {
                continue;
            }
            let src = with_local(r, l);
            let src_row = &u.data[src * dim..(src + 1) * dim];
            for (out, &v) in data[r * dim..(r + 1) * dim].iter_mut().zip(src_row) {
                *out += g * v;
            }
        }
    }
    Matrix { dim, data }
}
