//! Arithmetic circuit intermediate representation.
//!
//! A [`Circuit`] is a list of gates in topological order: every gate may only
//! reference gates defined before it, which makes cycles unrepresentable.
//! Gate ids are positive integers chosen by whoever built the circuit; the
//! passes in this crate always renumber their outputs `1..=n` in storage
//! order.

mod fanout;
mod shape;
mod stats;
mod text;

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

pub use fanout::{binarize_multiplications, normalize_leaf_fanout};
pub use shape::{check_shape, check_shapes, independent_children, ShapeReport, ShapeResult, ShapeSpec};
pub use stats::{circuit_stats, depths, formal_degree, formal_degrees, CircuitStats, GateCounts};
pub use text::{emit_circuit, parse_circuit};

/// Identifier of a gate, unique within one circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct GateId(pub u32);

impl fmt::Display for GateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GateKind {
    Input(String),
    Const(BigInt),
    /// Weighted addition `Σ w_i · child_i`.
    Add(Vec<(GateId, BigInt)>),
    /// `left - right`.
    Sub(GateId, GateId),
    Mul(Vec<GateId>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gate {
    pub id: GateId,
    pub kind: GateKind,
}

impl Gate {
    /// Child references in stored order, with multiplicity.
    pub fn children(&self) -> Vec<GateId> {
        match &self.kind {
            GateKind::Input(_) | GateKind::Const(_) => Vec::new(),
            GateKind::Add(terms) => terms.iter().map(|(c, _)| *c).collect(),
            GateKind::Sub(l, r) => vec![*l, *r],
            GateKind::Mul(cs) => cs.clone(),
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self.kind, GateKind::Input(_) | GateKind::Const(_))
    }

    pub fn is_mul(&self) -> bool {
        matches!(self.kind, GateKind::Mul(_))
    }

    /// Add or Sub.
    pub fn is_additive(&self) -> bool {
        matches!(self.kind, GateKind::Add(_) | GateKind::Sub(..))
    }

    /// A binary Add with both weights equal to one.
    pub fn is_ordinary_add(&self) -> bool {
        match &self.kind {
            GateKind::Add(terms) => terms.len() == 2 && terms.iter().all(|(_, w)| w.is_one()),
            _ => false,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: gate {gate} uses gate {child} before its definition")]
    UseBeforeDefinition { line: usize, gate: GateId, child: GateId },
    #[error("line {line}: duplicate gate id {id}")]
    DuplicateId { line: usize, id: GateId },
    #[error("line {line}: gate ids must be positive")]
    ZeroId { line: usize },
    #[error("line {line}: multiplication gate {gate} has arity {arity}, expected at least 2")]
    MulArity { line: usize, gate: GateId, arity: usize },
    #[error("line {line}: addition gate {gate} has no inputs")]
    EmptyAdd { line: usize, gate: GateId },
    #[error("output refers to unknown gate {0}")]
    UnknownOutput(GateId),
    #[error("circuit has no outputs")]
    NoOutputs,
}

/// An arithmetic circuit with one or more outputs.
#[derive(Debug, Clone)]
pub struct Circuit {
    name: String,
    gates: Vec<Gate>,
    outputs: Vec<GateId>,
    index: HashMap<GateId, usize>,
}

impl PartialEq for Circuit {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.gates == other.gates && self.outputs == other.outputs
    }
}

impl Eq for Circuit {}

impl Circuit {
    /// Validates and builds a circuit. Line numbers in errors are 1-based
    /// gate positions.
    pub fn new(
        name: impl Into<String>,
        gates: Vec<Gate>,
        outputs: Vec<GateId>,
    ) -> Result<Self, CircuitError> {
        let mut index = HashMap::with_capacity(gates.len());
        for (pos, gate) in gates.iter().enumerate() {
            let line = pos + 1;
            validate_gate(gate, line, &index)?;
            index.insert(gate.id, pos);
        }
        if outputs.is_empty() {
            return Err(CircuitError::NoOutputs);
        }
        if let Some(bad) = outputs.iter().find(|o| !index.contains_key(o)) {
            return Err(CircuitError::UnknownOutput(*bad));
        }
        Ok(Circuit {
            name: name.into(),
            gates,
            outputs,
            index,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn outputs(&self) -> &[GateId] {
        &self.outputs
    }

    /// Number of gates, input gates included.
    pub fn size(&self) -> usize {
        self.gates.len()
    }

    pub fn gate(&self, id: GateId) -> &Gate {
        &self.gates[self.index[&id]]
    }

    /// Storage position of a gate.
    pub fn position(&self, id: GateId) -> usize {
        self.index[&id]
    }

    pub fn output_positions(&self) -> Vec<usize> {
        self.outputs.iter().map(|o| self.index[o]).collect()
    }

    /// Children of every gate as storage positions, with multiplicity.
    pub fn child_positions(&self) -> Vec<Vec<usize>> {
        self.gates
            .iter()
            .map(|g| g.children().iter().map(|c| self.index[c]).collect())
            .collect()
    }

    /// Consumers of every gate as storage positions, one entry per edge.
    pub fn parent_positions(&self) -> Vec<Vec<usize>> {
        let mut parents = vec![Vec::new(); self.gates.len()];
        for (pos, children) in self.child_positions().into_iter().enumerate() {
            for c in children {
                parents[c].push(pos);
            }
        }
        parents
    }

    /// Sorted, deduplicated variable names.
    pub fn variables(&self) -> Vec<String> {
        let mut vars: Vec<String> = self
            .gates
            .iter()
            .filter_map(|g| match &g.kind {
                GateKind::Input(v) => Some(v.clone()),
                _ => None,
            })
            .collect();
        vars.sort();
        vars.dedup();
        vars
    }

    /// Storage positions reachable from the outputs.
    pub fn reachable(&self) -> Vec<bool> {
        let children = self.child_positions();
        let mut seen = vec![false; self.gates.len()];
        let mut stack = self.output_positions();
        while let Some(p) = stack.pop() {
            if std::mem::replace(&mut seen[p], true) {
                continue;
            }
            stack.extend(children[p].iter().copied());
        }
        seen
    }

    /// Drops gates unreachable from the outputs and renumbers `1..=n`.
    pub fn compact(&self) -> Circuit {
        let keep = self.reachable();
        let mut b = CircuitBuilder::new();
        let mut map: HashMap<GateId, GateId> = HashMap::new();
        for (gate, _) in self.gates.iter().zip(&keep).filter(|(_, k)| **k) {
            let id = b.push_mapped(&gate.kind, |c| map[&c]);
            map.insert(gate.id, id);
        }
        let outputs = self.outputs.iter().map(|o| map[o]).collect();
        b.finish(self.name.clone(), outputs)
    }
}

fn validate_gate(gate: &Gate, line: usize, seen: &HashMap<GateId, usize>) -> Result<(), CircuitError> {
    if gate.id.0 == 0 {
        return Err(CircuitError::ZeroId { line });
    }
    if seen.contains_key(&gate.id) {
        return Err(CircuitError::DuplicateId { line, id: gate.id });
    }
    match &gate.kind {
        GateKind::Mul(cs) if cs.len() < 2 => {
            return Err(CircuitError::MulArity {
                line,
                gate: gate.id,
                arity: cs.len(),
            })
        }
        GateKind::Add(ts) if ts.is_empty() => {
            return Err(CircuitError::EmptyAdd { line, gate: gate.id })
        }
        _ => {}
    }
    if let Some(child) = gate.children().into_iter().find(|c| !seen.contains_key(c)) {
        return Err(CircuitError::UseBeforeDefinition {
            line,
            gate: gate.id,
            child,
        });
    }
    Ok(())
}

/// Incremental construction of circuits with sequential ids.
///
/// Builder methods panic on malformed gates (unknown children, empty
/// additions, unary products): those are bugs in the calling pass, not input
/// errors.
#[derive(Debug, Default)]
pub struct CircuitBuilder {
    gates: Vec<Gate>,
}

impl CircuitBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn gate(&self, id: GateId) -> &Gate {
        &self.gates[id.0 as usize - 1]
    }

    fn push(&mut self, kind: GateKind) -> GateId {
        let id = GateId(self.gates.len() as u32 + 1);
        let gate = Gate { id, kind };
        for c in gate.children() {
            assert!(c.0 >= 1 && c.0 < id.0, "gate {id} references undefined gate {c}");
        }
        self.gates.push(gate);
        id
    }

    pub fn input(&mut self, name: impl Into<String>) -> GateId {
        self.push(GateKind::Input(name.into()))
    }

    pub fn constant(&mut self, value: impl Into<BigInt>) -> GateId {
        self.push(GateKind::Const(value.into()))
    }

    pub fn add(&mut self, terms: Vec<(GateId, BigInt)>) -> GateId {
        assert!(!terms.is_empty(), "empty addition");
        self.push(GateKind::Add(terms))
    }

    /// Unweighted addition of the given children.
    pub fn sum(&mut self, children: &[GateId]) -> GateId {
        self.add(children.iter().map(|&c| (c, BigInt::one())).collect())
    }

    pub fn sub(&mut self, left: GateId, right: GateId) -> GateId {
        self.push(GateKind::Sub(left, right))
    }

    pub fn mul(&mut self, children: Vec<GateId>) -> GateId {
        assert!(children.len() >= 2, "multiplication needs at least two inputs");
        self.push(GateKind::Mul(children))
    }

    /// Copies `kind` with its children renamed through `map`.
    pub fn push_mapped(&mut self, kind: &GateKind, mut map: impl FnMut(GateId) -> GateId) -> GateId {
        let kind = match kind {
            GateKind::Input(v) => GateKind::Input(v.clone()),
            GateKind::Const(c) => GateKind::Const(c.clone()),
            GateKind::Add(ts) => GateKind::Add(ts.iter().map(|(c, w)| (map(*c), w.clone())).collect()),
            GateKind::Sub(l, r) => GateKind::Sub(map(*l), map(*r)),
            GateKind::Mul(cs) => GateKind::Mul(cs.iter().map(|c| map(*c)).collect()),
        };
        self.push(kind)
    }

    pub fn finish(self, name: impl Into<String>, outputs: Vec<GateId>) -> Circuit {
        Circuit::new(name, self.gates, outputs).expect("builder produced an invalid circuit")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(id: u32, kind: GateKind) -> Gate {
        Gate { id: GateId(id), kind }
    }

    #[test]
    fn rejects_forward_reference() {
        let err = Circuit::new(
            "c",
            vec![g(1, GateKind::Mul(vec![GateId(1), GateId(1)]))],
            vec![GateId(1)],
        )
        .unwrap_err();
        assert!(matches!(err, CircuitError::UseBeforeDefinition { .. }));
    }

    #[test]
    fn rejects_duplicates_and_unary_products() {
        let x = g(1, GateKind::Input("x".into()));
        let err = Circuit::new("c", vec![x.clone(), x.clone()], vec![GateId(1)]).unwrap_err();
        assert!(matches!(err, CircuitError::DuplicateId { .. }));
        let err = Circuit::new(
            "c",
            vec![x, g(2, GateKind::Mul(vec![GateId(1)]))],
            vec![GateId(2)],
        )
        .unwrap_err();
        assert!(matches!(err, CircuitError::MulArity { arity: 1, .. }));
    }

    #[test]
    fn compact_drops_dead_gates() {
        let mut b = CircuitBuilder::new();
        let x = b.input("x");
        let y = b.input("y");
        let _dead = b.mul(vec![x, y]);
        let s = b.sum(&[x, y]);
        let c = b.finish("c", vec![s]).compact();
        assert_eq!(c.size(), 3);
        assert_eq!(c.outputs(), &[GateId(3)]);
    }
}
