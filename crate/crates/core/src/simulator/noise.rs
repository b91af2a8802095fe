use serde::{Deserialize, Serialize};

use super::SimError;

/// Symmetric depolarizing noise with independent readout bit flips.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawNoise")]
pub struct NoiseModel {
    /// Probability of a random Pauli after each single-qubit gate.
    pub p1: f64,
    /// Probability of a random two-qubit Pauli after each two-qubit gate.
    pub p2: f64,
    /// Probability that a measured bit is reported flipped.
    pub readout_flip: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNoise {
    #[serde(default)]
    p1: f64,
    #[serde(default)]
    p2: f64,
    #[serde(default)]
    readout_flip: f64,
}

impl TryFrom<RawNoise> for NoiseModel {
    type Error = SimError;

    fn try_from(r: RawNoise) -> Result<Self, SimError> {
        NoiseModel::new(r.p1, r.p2, r.readout_flip)
    }
}

impl NoiseModel {
    pub fn new(p1: f64, p2: f64, readout_flip: f64) -> Result<Self, SimError> {
        for (name, value) in [("p1", p1), ("p2", p2), ("readout_flip", readout_flip)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(SimError::InvalidNoise { name, value });
            }
        }
        Ok(NoiseModel { p1, p2, readout_flip })
    }

    pub fn depolarizing(p: f64) -> Result<Self, SimError> {
        NoiseModel::new(p, p, 0.0)
    }

    pub fn readout(p: f64) -> Result<Self, SimError> {
        NoiseModel::new(0.0, 0.0, p)
    }

    pub(crate) fn has_gate_noise(&self) -> bool {
        self.p1 > 0.0 || self.p2 > 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range() {
        assert!(NoiseModel::new(0.1, 0.0, 0.0).is_ok());
        assert_eq!(
            NoiseModel::new(0.0, 1.5, 0.0),
            Err(SimError::InvalidNoise { name: "p2", value: 1.5 })
        );
        assert!(NoiseModel::new(0.0, 0.0, -0.1).is_err());
        assert!(NoiseModel::new(f64::NAN, 0.0, 0.0).is_err());
        assert!(serde_json::from_str::<NoiseModel>(r#"{"p1":2.0}"#).is_err());
        let n: NoiseModel = serde_json::from_str(r#"{"p1":0.01,"p2":0.02,"readout_flip":0.0}"#).unwrap();
        assert_eq!(n, NoiseModel::new(0.01, 0.02, 0.0).unwrap());
    }
}
