//! Structural predicates used as pass pre- and postconditions.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{Circuit, GateId, GateKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ShapeSpec {
    /// Every addition is binary with unit weights and there are no subtractions.
    OrdinaryAdditionsOnly,
    BinaryMultiplicationsOnly,
    /// Input and constant gates feed at most one edge.
    InputFanoutAtMostOne,
    /// Constants in {-1, 0, 1} and unweighted additions.
    ConstantFree,
    /// Every multiplication is binary and has a child whose sub-circuit
    /// touches the rest of the circuit only through that one edge.
    WeaklySkew,
    /// Every multiplication is binary and has an input or constant child.
    Skew,
    /// Inputs of additions and subtractions are leaves or multiplications.
    AddFeedsOnlyMul,
    /// Every output is a sum of products of sums of products of leaves,
    /// where any level may be skipped.
    Depth4SigmaPiSigmaPi,
    /// Unweighted additions of any fan-in, binary multiplications, no
    /// subtraction and constants in {0, 1}.
    SemiUnbounded,
}

impl ShapeSpec {
    pub const ALL: [ShapeSpec; 9] = [
        ShapeSpec::OrdinaryAdditionsOnly,
        ShapeSpec::BinaryMultiplicationsOnly,
        ShapeSpec::InputFanoutAtMostOne,
        ShapeSpec::ConstantFree,
        ShapeSpec::WeaklySkew,
        ShapeSpec::Skew,
        ShapeSpec::AddFeedsOnlyMul,
        ShapeSpec::Depth4SigmaPiSigmaPi,
        ShapeSpec::SemiUnbounded,
    ];
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShapeResult {
    pub spec: ShapeSpec,
    pub ok: bool,
    /// First offending gate, when the predicate fails.
    pub witness: Option<GateId>,
}

impl ShapeResult {
    fn verdict(spec: ShapeSpec, witness: Option<GateId>) -> Self {
        ShapeResult {
            spec,
            ok: witness.is_none(),
            witness,
        }
    }
}

pub type ShapeReport = Vec<ShapeResult>;

pub fn check_shape(c: &Circuit, spec: ShapeSpec) -> ShapeResult {
    let gates = c.gates();
    let first = |pred: &dyn Fn(usize) -> bool| (0..gates.len()).find(|&p| pred(p)).map(|p| gates[p].id);
    let witness = match spec {
        ShapeSpec::OrdinaryAdditionsOnly => first(&|p| match gates[p].kind {
            GateKind::Add(_) => !gates[p].is_ordinary_add(),
            GateKind::Sub(..) => true,
            _ => false,
        }),
        ShapeSpec::BinaryMultiplicationsOnly => first(&|p| matches!(&gates[p].kind, GateKind::Mul(cs) if cs.len() != 2)),
        ShapeSpec::InputFanoutAtMostOne => {
            let parents = c.parent_positions();
            first(&|p| gates[p].is_leaf() && parents[p].len() > 1)
        }
        ShapeSpec::ConstantFree => first(&|p| match &gates[p].kind {
            GateKind::Const(k) => k.abs() > One::one(),
            GateKind::Add(ts) => ts.iter().any(|(_, w)| !w.is_one()),
            _ => false,
        }),
        ShapeSpec::WeaklySkew => {
            let indep = independent_children(c);
            first(&|p| gates[p].is_mul() && !indep[p].is_some_and(|[a, b]| a || b))
        }
        ShapeSpec::Skew => first(&|p| match &gates[p].kind {
            GateKind::Mul(cs) => cs.len() != 2 || !cs.iter().any(|ch| c.gate(*ch).is_leaf()),
            _ => false,
        }),
        ShapeSpec::AddFeedsOnlyMul => first(&|p| {
            gates[p].is_additive()
                && gates[p].children().iter().any(|ch| {
                    let g = c.gate(*ch);
                    !(g.is_leaf() || g.is_mul())
                })
        }),
        ShapeSpec::Depth4SigmaPiSigmaPi => depth4_violation(c),
        ShapeSpec::SemiUnbounded => first(&|p| match &gates[p].kind {
            GateKind::Const(k) => !(k.is_zero() || k.is_one()),
            GateKind::Add(ts) => ts.iter().any(|(_, w)| !w.is_one()),
            GateKind::Sub(..) => true,
            GateKind::Mul(cs) => cs.len() != 2,
            GateKind::Input(_) => false,
        }),
    };
    ShapeResult::verdict(spec, witness)
}

pub fn check_shapes(c: &Circuit, specs: &[ShapeSpec]) -> ShapeReport {
    specs.iter().map(|&s| check_shape(c, s)).collect()
}

/// For every binary multiplication (by storage position), whether each of its
/// two children roots an independent sub-circuit: one connected to the rest
/// of the circuit only by the edge into that multiplication. Outputs count as
/// external connections. Other gates map to `None`.
pub fn independent_children(c: &Circuit) -> Vec<Option<[bool; 2]>> {
    let children = c.child_positions();
    let parents = c.parent_positions();
    let mut is_output = vec![false; c.size()];
    for p in c.output_positions() {
        is_output[p] = true;
    }
    let mut in_sub = vec![usize::MAX; c.size()];
    let mut stamp = 0usize;

    let mut independent = |root: usize, mul: usize, stamp: usize| -> bool {
        if parents[root].len() != 1 || parents[root][0] != mul {
            return false;
        }
        let mut members = Vec::new();
        let mut stack = vec![root];
        while let Some(p) = stack.pop() {
            if in_sub[p] == stamp {
                continue;
            }
            in_sub[p] = stamp;
            members.push(p);
            stack.extend(children[p].iter().copied());
        }
        members
            .iter()
            .all(|&g| !is_output[g] && (g == root || parents[g].iter().all(|&q| in_sub[q] == stamp)))
    };

    (0..c.size())
        .map(|p| match &c.gates()[p].kind {
            GateKind::Mul(cs) if cs.len() == 2 => {
                let [l, r] = [children[p][0], children[p][1]];
                if l == r {
                    return Some([false, false]);
                }
                stamp += 2;
                let a = independent(l, p, stamp - 1);
                let b = independent(r, p, stamp);
                Some([a, b])
            }
            _ => None,
        })
        .collect()
}

fn depth4_violation(c: &Circuit) -> Option<GateId> {
    // fits[p][level]: gate p realizes the pattern suffix starting at `level`
    // of [Σ, Π, Σ, Π]; level 4 admits only leaves.
    let children = c.child_positions();
    let mut fits = vec![[false; 5]; c.size()];
    for (p, gate) in c.gates().iter().enumerate() {
        for level in (0..5).rev() {
            fits[p][level] = if gate.is_leaf() {
                true
            } else if level == 4 {
                false
            } else {
                let kind_matches = match gate.kind {
                    GateKind::Add(_) => level % 2 == 0,
                    GateKind::Mul(_) => level % 2 == 1,
                    _ => false,
                };
                (kind_matches && children[p].iter().all(|&ch| fits[ch][level + 1])) || fits[p][level + 1]
            };
        }
    }
    c.output_positions()
        .into_iter()
        .find(|&p| !fits[p][0])
        .map(|p| c.gates()[p].id)
}
