use num_complex::Complex64;

use super::GateKind;

/// Row-major 2×2 matrix.
pub type Mat2 = [[Complex64; 2]; 2];
/// Row-major 4×4 matrix over the local basis `b0 + 2·b1`, where `b0` is the
/// bit of the instruction's first qubit and `b1` of its second.
pub type Mat4 = [[Complex64; 4]; 4];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Matrix of a single-qubit gate. Rotations are `exp(-i·angle·P/2)`.
/// Returns `None` for two-qubit kinds and MEASURE.
pub fn single_qubit_matrix(kind: GateKind, angle: f64) -> Option<Mat2> {
    let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let m = match kind {
        GateKind::I => [[ONE, ZERO], [ZERO, ONE]],
        GateKind::X => [[ZERO, ONE], [ONE, ZERO]],
        GateKind::Y => [[ZERO, -I], [I, ZERO]],
        GateKind::Z => [[ONE, ZERO], [ZERO, -ONE]],
        GateKind::H => [
            [Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
            [Complex64::new(h, 0.0), Complex64::new(-h, 0.0)],
        ],
        GateKind::RX => [
            [Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
            [Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
        ],
        GateKind::RY => [
            [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
            [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
        ],
        GateKind::RZ => [
            [Complex64::new(c, -s), ZERO],
            [ZERO, Complex64::new(c, s)],
        ],
        GateKind::CNOT | GateKind::CZ | GateKind::SWAP | GateKind::MEASURE => return None,
    };
    Some(m)
}

/// Matrix of a two-qubit gate; CNOT controls on the first qubit.
pub fn two_qubit_matrix(kind: GateKind) -> Option<Mat4> {
    let mut m = [[ZERO; 4]; 4];
    match kind {
        GateKind::CNOT => {
            // |b0, b1> -> |b0, b1 ^ b0>: swaps local indices 1 and 3
            m[0][0] = ONE;
            m[3][1] = ONE;
            m[2][2] = ONE;
            m[1][3] = ONE;
        }
        GateKind::CZ => {
            m[0][0] = ONE;
            m[1][1] = ONE;
            m[2][2] = ONE;
            m[3][3] = -ONE;
        }
        GateKind::SWAP => {
            m[0][0] = ONE;
            m[2][1] = ONE;
            m[1][2] = ONE;
            m[3][3] = ONE;
        }
        _ => return None,
    }
    Some(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: &Mat2, b: &Mat2) -> bool {
        a.iter()
            .flatten()
            .zip(b.iter().flatten())
            .all(|(x, y)| (x - y).norm() < 1e-12)
    }

    fn scale(m: Mat2, k: Complex64) -> Mat2 {
        m.map(|row| row.map(|v| v * k))
    }

    #[test]
    fn rotation_by_pi_is_minus_i_pauli() {
        for (rot, pauli) in [
            (GateKind::RX, GateKind::X),
            (GateKind::RY, GateKind::Y),
            (GateKind::RZ, GateKind::Z),
        ] {
            let r = single_qubit_matrix(rot, PI).unwrap();
            let p = single_qubit_matrix(pauli, 0.0).unwrap();
            assert!(close(&r, &scale(p, -I)), "{rot}");
        }
    }

    #[test]
    fn two_qubit_kinds_have_no_single_matrix() {
        assert!(single_qubit_matrix(GateKind::CZ, 0.0).is_none());
        assert!(two_qubit_matrix(GateKind::H).is_none());
    }
}
