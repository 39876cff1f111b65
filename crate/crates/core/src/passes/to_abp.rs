use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{astats, cstats, PassError};
use crate::abp::{trim_or_zero, Abp, Edge, Label};
use crate::circuit::{check_shape, formal_degree, independent_children, Circuit, GateKind, ShapeSpec};
use crate::report::{BoundCheck, BoundSource, Magnitude, PassReport};

const PASS: &str = "weakly_skew_to_abp";

/// A branching program with one designated node per circuit output. The
/// polynomial of output `k` is the sum over paths from node 1 to
/// `outputs[k]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiAbp {
    pub abp: Abp,
    pub outputs: Vec<usize>,
}

/// Converts a weakly skew circuit whose additions read only leaves and
/// products into a branching program of at most `m + 1` nodes.
///
/// Single-output circuits yield a trimmed program whose sink is the output.
pub fn weakly_skew_to_abp(c: &Circuit) -> Result<(Abp, PassReport), PassError> {
    lower_single(c, false)
}

/// Multi-output variant. Nothing is trimmed, so node numbers stay aligned
/// with [`MultiAbp::outputs`].
pub fn weakly_skew_to_multi_abp(c: &Circuit) -> Result<(MultiAbp, PassReport), PassError> {
    let multi = lower(c, false)?;
    let report = report_for(c, &multi.abp);
    Ok((multi, report))
}

/// Boolean variant used by the semiring reduction: parallel weights are
/// clamped to 1.
pub(crate) fn weakly_skew_to_boolean_abp(c: &Circuit) -> Result<(Abp, PassReport), PassError> {
    lower_single(c, true)
}

fn lower_single(c: &Circuit, boolean: bool) -> Result<(Abp, PassReport), PassError> {
    if c.outputs().len() != 1 {
        return Err(super::precondition(PASS, format!("expected one output, found {}", c.outputs().len())));
    }
    let multi = lower(c, boolean)?;
    // Nodes past the output node cannot reach it.
    let sink = multi.outputs[0];
    let edges = multi.abp.edges().iter().filter(|e| e.to <= sink).cloned().collect();
    let truncated = Abp::new(c.name(), sink, edges)?;
    let abp = trim_or_zero(&truncated);
    let report = report_for(c, &abp);
    Ok((abp, report))
}

fn report_for(c: &Circuit, g: &Abp) -> PassReport {
    let (m, d) = (c.size() as u64, formal_degree(c));
    let mut report = PassReport::new(PASS, cstats(c), astats(g));
    report
        .check(BoundCheck::at_most("size", Magnitude::int(m + 1), g.nodes() as u64, BoundSource::Published))
        .check(BoundCheck::at_most("depth", Magnitude::int(3 * d - 1), g.depth() as u64, BoundSource::Published));
    report
}

struct Lowering<'a> {
    c: &'a Circuit,
    children: Vec<Vec<usize>>,
    private: Vec<Option<usize>>,
    boolean: bool,
    nodes: usize,
    edges: Vec<Edge>,
    node: Vec<Option<usize>>,
}

fn lower(c: &Circuit, boolean: bool) -> Result<MultiAbp, PassError> {
    let shape = check_shape(c, ShapeSpec::WeaklySkew);
    if let Some(w) = shape.witness {
        return Err(PassError::NotWeaklySkew(w));
    }
    let shape = check_shape(c, ShapeSpec::AddFeedsOnlyMul);
    if let Some(w) = shape.witness {
        return Err(PassError::AddInputCondition(w));
    }
    let private = independent_children(c)
        .into_iter()
        .map(|ind| ind.map(|[_, right]| if right { 1 } else { 0 }))
        .collect();
    let mut l = Lowering {
        c,
        children: c.child_positions(),
        private,
        boolean,
        nodes: 1,
        edges: Vec::new(),
        node: vec![None; c.size()],
    };
    let outputs = c.output_positions().into_iter().map(|p| l.node_of(p, 1)).collect();
    let abp = Abp::new(c.name(), l.nodes, l.edges)?;
    Ok(MultiAbp { abp, outputs })
}

impl Lowering<'_> {
    fn fresh(&mut self) -> usize {
        self.nodes += 1;
        self.nodes
    }

    fn edge(&mut self, from: usize, to: usize, label: Label) {
        self.edges.push(Edge { from, to, label });
    }

    /// Node whose source-to-node polynomial, measured from `sigma`, is the
    /// value of gate `p`.
    fn node_of(&mut self, p: usize, sigma: usize) -> usize {
        if let Some(n) = self.node[p] {
            return n;
        }
        let n = match &self.c.gates()[p].kind {
            GateKind::Input(x) => {
                let n = self.fresh();
                self.edge(sigma, n, Label::Var(x.clone()));
                n
            }
            GateKind::Const(k) => {
                let n = self.fresh();
                if !k.is_zero() {
                    self.edge(sigma, n, Label::Const(k.clone()));
                }
                n
            }
            GateKind::Mul(_) => {
                let which = self.private[p].expect("binary multiplication");
                let shared = self.node_of(self.children[p][1 - which], sigma);
                self.node_of(self.children[p][which], shared)
            }
            kind => {
                let weights: Vec<BigInt> = match kind {
                    GateKind::Add(ts) => ts.iter().map(|(_, w)| w.clone()).collect(),
                    _ => vec![BigInt::one(), -BigInt::one()],
                };
                let mut merged: BTreeMap<usize, BigInt> = BTreeMap::new();
                for (&ch, w) in self.children[p].clone().iter().zip(weights) {
                    let from = self.node_of(ch, sigma);
                    *merged.entry(from).or_default() += w;
                }
                let n = self.fresh();
                for (from, w) in merged {
                    if w.is_zero() {
                        continue;
                    }
                    let w = if self.boolean && w.is_positive() { BigInt::one() } else { w };
                    self.edge(from, n, Label::Const(w));
                }
                n
            }
        };
        self.node[p] = Some(n);
        n
    }
}
