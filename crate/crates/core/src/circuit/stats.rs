use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{Circuit, GateId, GateKind};

/// Formal degree of every gate in storage order.
///
/// Leaves have degree 1, additions and subtractions take the maximum over
/// their children, multiplications the sum. Saturates instead of
/// overflowing.
pub fn formal_degrees(c: &Circuit) -> Vec<u64> {
    let children = c.child_positions();
    let mut deg = vec![0u64; c.size()];
    for (pos, gate) in c.gates().iter().enumerate() {
        deg[pos] = match gate.kind {
            GateKind::Input(_) | GateKind::Const(_) => 1,
            GateKind::Add(_) | GateKind::Sub(..) => children[pos].iter().map(|&ch| deg[ch]).max().unwrap_or(1),
            GateKind::Mul(_) => children[pos].iter().fold(0u64, |acc, &ch| acc.saturating_add(deg[ch])),
        };
    }
    deg
}

/// Formal degree of the circuit: the maximum over its outputs.
pub fn formal_degree(c: &Circuit) -> u64 {
    let deg = formal_degrees(c);
    c.output_positions().into_iter().map(|p| deg[p]).max().unwrap_or(1)
}

/// Longest leaf-to-gate path, in edges, for every gate.
pub fn depths(c: &Circuit) -> Vec<usize> {
    let children = c.child_positions();
    let mut depth = vec![0usize; c.size()];
    for pos in 0..c.size() {
        depth[pos] = children[pos].iter().map(|&ch| depth[ch] + 1).max().unwrap_or(0);
    }
    depth
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCounts {
    pub input: usize,
    #[serde(rename = "const")]
    pub constant: usize,
    pub add: usize,
    pub sub: usize,
    pub mul: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitStats {
    pub size: usize,
    pub depth: usize,
    pub formal_degree: u64,
    pub counts: GateCounts,
    pub max_mul_fanin: usize,
    pub max_add_fanin: usize,
    #[serde(with = "crate::bigstr")]
    pub max_abs_constant: BigInt,
    /// Largest `Σ |w_i|` over addition gates; subtractions count as weight 2.
    #[serde(with = "crate::bigstr")]
    pub max_add_total_weight: BigInt,
}

pub fn circuit_stats(c: &Circuit) -> CircuitStats {
    let depth_of = depths(c);
    let mut counts = GateCounts::default();
    let mut max_mul_fanin = 0;
    let mut max_add_fanin = 0;
    let mut max_abs_constant = BigInt::zero();
    let mut max_add_total_weight = BigInt::zero();
    for gate in c.gates() {
        match &gate.kind {
            GateKind::Input(_) => counts.input += 1,
            GateKind::Const(k) => {
                counts.constant += 1;
                max_abs_constant = max_abs_constant.max(k.abs());
            }
            GateKind::Add(terms) => {
                counts.add += 1;
                max_add_fanin = max_add_fanin.max(terms.len());
                let total: BigInt = terms.iter().map(|(_, w)| w.abs()).sum();
                max_add_total_weight = max_add_total_weight.max(total);
            }
            GateKind::Sub(..) => {
                counts.sub += 1;
                max_add_fanin = max_add_fanin.max(2);
                max_add_total_weight = max_add_total_weight.max(BigInt::from(2));
            }
            GateKind::Mul(cs) => {
                counts.mul += 1;
                max_mul_fanin = max_mul_fanin.max(cs.len());
            }
        }
    }
    CircuitStats {
        size: c.size(),
        depth: c.output_positions().into_iter().map(|p| depth_of[p]).max().unwrap_or(0),
        formal_degree: formal_degree(c),
        counts,
        max_mul_fanin,
        max_add_fanin,
        max_abs_constant,
        max_add_total_weight,
    }
}

impl Circuit {
    /// Formal degree of one gate.
    pub fn gate_degree(&self, id: GateId) -> u64 {
        formal_degrees(self)[self.position(id)]
    }
}
