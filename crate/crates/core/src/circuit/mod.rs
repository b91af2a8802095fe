//! Parametric circuit representation.
//!
//! A [`Circuit`] is an ordered list of [`Instruction`]s over qubits that are
//! either abstract placeholders (`%q0`) or physical device indices (`3`).
//! Rotation angles are constants or named symbols that are bound later,
//! which lets a circuit be compiled once and re-parameterized many times.
//!
//! Circuits are validated on construction and immutable afterwards; every
//! transformation returns a new circuit.

mod gates;
mod text;
mod unitary;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

pub use gates::{single_qubit_matrix, two_qubit_matrix, Mat2, Mat4};
pub use text::{parse_program, print_program, ParseError, ParseErrorKind};
pub use unitary::{unitary_of, unitary_of_width, Matrix, MAX_UNITARY_QUBITS};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CircuitError {
    #[error("{kind} expects {expected} {what}, got {got}")]
    Arity {
        kind: GateKind,
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("{kind} acts on the same qubit {qubit} twice")]
    RepeatedQubit { kind: GateKind, qubit: Qubit },
    #[error("classical bit {0} is written by more than one MEASURE")]
    DuplicateClbit(usize),
    #[error("instruction {index} ({kind}) acts on qubit {qubit} after it was measured")]
    GateAfterMeasure {
        index: usize,
        kind: GateKind,
        qubit: Qubit,
    },
    #[error("circuit mixes abstract and physical qubit references")]
    MixedQubitRefs,
    #[error("`{0}` is not a valid identifier")]
    InvalidIdentifier(String),
    #[error("non-finite constant angle {0}")]
    NonFiniteAngle(f64),
    #[error("binding refers to unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("no physical index given for abstract qubit `{0}`")]
    MissingMapping(String),
    #[error("physical index {0} is the target of more than one abstract qubit")]
    DuplicateTarget(usize),
    #[error("circuit has no abstract qubits to assign")]
    NothingAbstract,
    #[error("symbol `{0}` is unbound")]
    UnboundSymbol(String),
    #[error("abstract qubit `{0}` has not been assigned a physical index")]
    AbstractQubit(String),
    #[error("circuit contains measurements")]
    MeasurementPresent,
    #[error("{got} qubits exceeds the limit of {limit}")]
    TooManyQubits { got: usize, limit: usize },
}

/// A qubit reference: an abstract placeholder name or a physical index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Qubit {
    Abstract(String),
    Physical(usize),
}

impl Qubit {
    pub fn physical_index(&self) -> Option<usize> {
        match self {
            Qubit::Physical(i) => Some(*i),
            Qubit::Abstract(_) => None,
        }
    }
}

impl From<usize> for Qubit {
    fn from(i: usize) -> Self {
        Qubit::Physical(i)
    }
}

impl From<&str> for Qubit {
    fn from(name: &str) -> Self {
        Qubit::Abstract(name.to_string())
    }
}

impl fmt::Display for Qubit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Qubit::Abstract(name) => write!(f, "%{name}"),
            Qubit::Physical(i) => write!(f, "{i}"),
        }
    }
}

/// A rotation angle in radians: a constant, or a (possibly negated) symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Param {
    Const(f64),
    Symbol { name: String, negated: bool },
}

impl Param {
    pub fn symbol(name: impl Into<String>) -> Self {
        Param::Symbol {
            name: name.into(),
            negated: false,
        }
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            Param::Const(v) => Some(*v),
            Param::Symbol { .. } => None,
        }
    }

    pub fn symbol_name(&self) -> Option<&str> {
        match self {
            Param::Symbol { name, .. } => Some(name),
            Param::Const(_) => None,
        }
    }

    /// Resolve against `binding`, leaving unknown symbols in place.
    fn bound(&self, binding: &BTreeMap<String, f64>) -> Param {
        match self {
            Param::Symbol { name, negated } => match binding.get(name) {
                Some(v) if *negated => Param::Const(-v),
                Some(v) => Param::Const(*v),
                None => self.clone(),
            },
            Param::Const(_) => self.clone(),
        }
    }
}

impl From<f64> for Param {
    fn from(v: f64) -> Self {
        Param::Const(v)
    }
}

impl std::ops::Neg for Param {
    type Output = Param;

    fn neg(self) -> Param {
        match self {
            Param::Const(v) => Param::Const(-v),
            Param::Symbol { name, negated } => Param::Symbol {
                name,
                negated: !negated,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateKind {
    I,
    X,
    Y,
    Z,
    H,
    RX,
    RY,
    RZ,
    CNOT,
    CZ,
    SWAP,
    MEASURE,
}

impl GateKind {
    pub const ALL: [GateKind; 12] = [
        GateKind::I,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::H,
        GateKind::RX,
        GateKind::RY,
        GateKind::RZ,
        GateKind::CNOT,
        GateKind::CZ,
        GateKind::SWAP,
        GateKind::MEASURE,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::I => "I",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::H => "H",
            GateKind::RX => "RX",
            GateKind::RY => "RY",
            GateKind::RZ => "RZ",
            GateKind::CNOT => "CNOT",
            GateKind::CZ => "CZ",
            GateKind::SWAP => "SWAP",
            GateKind::MEASURE => "MEASURE",
        }
    }

    pub fn from_name(name: &str) -> Option<GateKind> {
        GateKind::ALL.into_iter().find(|k| k.name() == name)
    }

    pub fn num_params(self) -> usize {
        match self {
            GateKind::RX | GateKind::RY | GateKind::RZ => 1,
            _ => 0,
        }
    }

    pub fn num_qubits(self) -> usize {
        match self {
            GateKind::CNOT | GateKind::CZ | GateKind::SWAP => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instruction {
    pub kind: GateKind,
    pub params: Vec<Param>,
    pub qubits: Vec<Qubit>,
    /// Classical bit written by a MEASURE; `None` for every other kind.
    pub clbit: Option<usize>,
}

impl Instruction {
    pub fn gate(kind: GateKind, params: Vec<Param>, qubits: Vec<Qubit>) -> Self {
        Instruction {
            kind,
            params,
            qubits,
            clbit: None,
        }
    }

    pub fn one(kind: GateKind, q: impl Into<Qubit>) -> Self {
        Self::gate(kind, vec![], vec![q.into()])
    }

    pub fn rotation(kind: GateKind, angle: impl Into<Param>, q: impl Into<Qubit>) -> Self {
        Self::gate(kind, vec![angle.into()], vec![q.into()])
    }

    pub fn two(kind: GateKind, a: impl Into<Qubit>, b: impl Into<Qubit>) -> Self {
        Self::gate(kind, vec![], vec![a.into(), b.into()])
    }

    pub fn measure(q: impl Into<Qubit>, clbit: usize) -> Self {
        Instruction {
            kind: GateKind::MEASURE,
            params: vec![],
            qubits: vec![q.into()],
            clbit: Some(clbit),
        }
    }

    pub fn is_measure(&self) -> bool {
        self.kind == GateKind::MEASURE
    }

    fn check_shape(&self) -> Result<(), CircuitError> {
        let arity = |what, expected, got| {
            if expected == got {
                Ok(())
            } else {
                Err(CircuitError::Arity {
                    kind: self.kind,
                    what,
                    expected,
                    got,
                })
            }
        };
        arity("parameters", self.kind.num_params(), self.params.len())?;
        arity("qubits", self.kind.num_qubits(), self.qubits.len())?;
        arity(
            "classical targets",
            usize::from(self.is_measure()),
            usize::from(self.clbit.is_some()),
        )?;
        if self.qubits.len() == 2 && self.qubits[0] == self.qubits[1] {
            return Err(CircuitError::RepeatedQubit {
                kind: self.kind,
                qubit: self.qubits[0].clone(),
            });
        }
        for q in &self.qubits {
            if let Qubit::Abstract(name) = q {
                check_identifier(name)?;
            }
        }
        for p in &self.params {
            match p {
                Param::Const(v) if !v.is_finite() => return Err(CircuitError::NonFiniteAngle(*v)),
                Param::Symbol { name, .. } => check_identifier(name)?,
                Param::Const(_) => {}
            }
        }
        Ok(())
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn check_identifier(s: &str) -> Result<(), CircuitError> {
    if is_identifier(s) {
        Ok(())
    } else {
        Err(CircuitError::InvalidIdentifier(s.to_string()))
    }
}

/// A validated, immutable instruction sequence.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Circuit {
    instructions: Vec<Instruction>,
}

impl Circuit {
    /// Validate and wrap an instruction list.
    pub fn new(instructions: Vec<Instruction>) -> Result<Self, CircuitError> {
        let mut measured: HashSet<&Qubit> = HashSet::new();
        let mut clbits = HashSet::new();
        let mut saw_abstract = false;
        let mut saw_physical = false;
        for (index, instr) in instructions.iter().enumerate() {
            instr.check_shape()?;
            for q in &instr.qubits {
                if measured.contains(q) {
                    return Err(CircuitError::GateAfterMeasure {
                        index,
                        kind: instr.kind,
                        qubit: q.clone(),
                    });
                }
                match q {
                    Qubit::Abstract(_) => saw_abstract = true,
                    Qubit::Physical(_) => saw_physical = true,
                }
            }
            if let Some(c) = instr.clbit {
                if !clbits.insert(c) {
                    return Err(CircuitError::DuplicateClbit(c));
                }
                measured.insert(&instr.qubits[0]);
            }
        }
        if saw_abstract && saw_physical {
            return Err(CircuitError::MixedQubitRefs);
        }
        Ok(Circuit { instructions })
    }

    pub fn empty() -> Self {
        Circuit::default()
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    /// Concatenate two circuits, re-validating the combined sequence.
    pub fn then(&self, other: &Circuit) -> Result<Circuit, CircuitError> {
        let mut all = self.instructions.clone();
        all.extend(other.instructions.iter().cloned());
        Circuit::new(all)
    }

    pub fn qubit_set(&self) -> BTreeSet<Qubit> {
        self.instructions
            .iter()
            .flat_map(|i| i.qubits.iter().cloned())
            .collect()
    }

    /// Abstract qubit names in order of first appearance.
    pub fn abstract_qubits(&self) -> Vec<String> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for q in self.instructions.iter().flat_map(|i| &i.qubits) {
            if let Qubit::Abstract(name) = q {
                if seen.insert(name.as_str()) {
                    out.push(name.clone());
                }
            }
        }
        out
    }

    pub fn is_physical(&self) -> bool {
        self.instructions
            .iter()
            .flat_map(|i| &i.qubits)
            .all(|q| matches!(q, Qubit::Physical(_)))
    }

    /// One past the largest physical index, or 0 when there are none.
    pub fn physical_width(&self) -> usize {
        self.instructions
            .iter()
            .flat_map(|i| &i.qubits)
            .filter_map(Qubit::physical_index)
            .map(|i| i + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn free_symbols(&self) -> BTreeSet<String> {
        self.instructions
            .iter()
            .flat_map(|i| &i.params)
            .filter_map(|p| p.symbol_name().map(str::to_string))
            .collect()
    }

    pub fn is_bound(&self) -> bool {
        self.instructions
            .iter()
            .flat_map(|i| &i.params)
            .all(|p| matches!(p, Param::Const(_)))
    }

    /// (qubit, classical bit) for every MEASURE, sorted by classical bit.
    pub fn measurements(&self) -> Vec<(Qubit, usize)> {
        let mut out: Vec<_> = self
            .instructions
            .iter()
            .filter_map(|i| i.clbit.map(|c| (i.qubits[0].clone(), c)))
            .collect();
        out.sort_by_key(|(_, c)| *c);
        out
    }

    pub fn without_measurements(&self) -> Circuit {
        Circuit {
            instructions: self
                .instructions
                .iter()
                .filter(|i| !i.is_measure())
                .cloned()
                .collect(),
        }
    }

    pub fn gate_counts(&self) -> BTreeMap<GateKind, usize> {
        let mut counts = BTreeMap::new();
        for i in &self.instructions {
            *counts.entry(i.kind).or_insert(0) += 1;
        }
        counts
    }

    /// Replace bound symbols by constants. Every key must name a free symbol.
    pub fn bind_parameters(&self, binding: &BTreeMap<String, f64>) -> Result<Circuit, CircuitError> {
        let free = self.free_symbols();
        if let Some(unknown) = binding.keys().find(|k| !free.contains(*k)) {
            return Err(CircuitError::UnknownSymbol(unknown.clone()));
        }
        if let Some((_, v)) = binding.iter().find(|(_, v)| !v.is_finite()) {
            return Err(CircuitError::NonFiniteAngle(*v));
        }
        let instructions = self
            .instructions
            .iter()
            .map(|i| Instruction {
                params: i.params.iter().map(|p| p.bound(binding)).collect(),
                ..i.clone()
            })
            .collect();
        Ok(Circuit { instructions })
    }

    /// Replace every abstract qubit by its physical index.
    pub fn assign_qubits(&self, mapping: &BTreeMap<String, usize>) -> Result<Circuit, CircuitError> {
        let names = self.abstract_qubits();
        if names.is_empty() {
            return Err(CircuitError::NothingAbstract);
        }
        let mut targets = HashSet::new();
        for &idx in mapping.values() {
            if !targets.insert(idx) {
                return Err(CircuitError::DuplicateTarget(idx));
            }
        }
        if let Some(missing) = names.iter().find(|n| !mapping.contains_key(*n)) {
            return Err(CircuitError::MissingMapping(missing.clone()));
        }
        let instructions = self
            .instructions
            .iter()
            .map(|i| Instruction {
                qubits: i
                    .qubits
                    .iter()
                    .map(|q| match q {
                        Qubit::Abstract(name) => Qubit::Physical(mapping[name]),
                        Qubit::Physical(_) => q.clone(),
                    })
                    .collect(),
                ..i.clone()
            })
            .collect();
        Ok(Circuit { instructions })
    }

    /// Greedy ASAP layering: each instruction lands one layer after the
    /// latest instruction sharing any of its qubits.
    pub fn depth(&self) -> usize {
        let mut frontier: HashMap<&Qubit, usize> = HashMap::new();
        let mut depth = 0;
        for instr in &self.instructions {
            let layer = instr
                .qubits
                .iter()
                .map(|q| frontier.get(q).copied().unwrap_or(0))
                .max()
                .unwrap_or(0)
                + 1;
            for q in &instr.qubits {
                frontier.insert(q, layer);
            }
            depth = depth.max(layer);
        }
        depth
    }

    /// Physical indices of a fully physical circuit, or the first offending abstract name.
    pub(crate) fn require_physical(&self) -> Result<(), CircuitError> {
        for q in self.instructions.iter().flat_map(|i| &i.qubits) {
            if let Qubit::Abstract(name) = q {
                return Err(CircuitError::AbstractQubit(name.clone()));
            }
        }
        Ok(())
    }

    pub(crate) fn require_bound(&self) -> Result<(), CircuitError> {
        match self.free_symbols().into_iter().next() {
            Some(name) => Err(CircuitError::UnboundSymbol(name)),
            None => Ok(()),
        }
    }
}

impl<'de> Deserialize<'de> for Circuit {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            instructions: Vec<Instruction>,
        }
        let raw = Raw::deserialize(d)?;
        Circuit::new(raw.instructions).map_err(serde::de::Error::custom)
    }
}

pub fn circuit_depth(circuit: &Circuit) -> usize {
    circuit.depth()
}

pub fn bind_parameters(
    circuit: &Circuit,
    binding: &BTreeMap<String, f64>,
) -> Result<Circuit, CircuitError> {
    circuit.bind_parameters(binding)
}

pub fn assign_qubits(
    circuit: &Circuit,
    mapping: &BTreeMap<String, usize>,
) -> Result<Circuit, CircuitError> {
    circuit.assign_qubits(mapping)
}
