use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};

use super::{astats, cstats, PassError};
use crate::abp::{Abp, Label};
use crate::circuit::{circuit_stats, Circuit, CircuitBuilder, GateId};
use crate::report::{BoundCheck, BoundSource, Magnitude, PassReport};

const PASS: &str = "abp_to_logdepth";

/// Number of doubling stages needed to cover paths of length `depth`.
pub(crate) fn doubling_stages(depth: usize) -> u32 {
    if depth <= 1 {
        0
    } else {
        usize::BITS - (depth - 1).leading_zeros()
    }
}

/// Circuit with one output per node `j` computing the sum over all paths
/// from node 1 to `j`, in depth `2 * ceil(log2 depth)`.
///
/// Paths of every length are accumulated by doubling: if `U_n[j]` sums the
/// paths of length at most `n` and `P_n` is the `n`-th power of the
/// adjacency matrix, then `U_2n[j] = U_n[j] + sum_k U_n[k] * P_n[k][j]` and
/// `P_2n = P_n * P_n`.
pub fn abp_to_logdepth(g: &Abp) -> Result<(Circuit, PassReport), PassError> {
    let mut b = CircuitBuilder::new();
    let mut leaves: HashMap<Label, GateId> = HashMap::new();
    let per_node = logdepth_into(&mut b, g, &mut |b, label| {
        *leaves.entry(label.clone()).or_insert_with(|| match label {
            Label::Var(x) => b.input(x.clone()),
            Label::Const(k) => b.constant(k.clone()),
        })
    });
    let one = b.constant(1);
    let mut zero = None;
    let outputs: Vec<GateId> = (1..=g.nodes())
        .map(|v| match per_node[v] {
            _ if v == 1 => one,
            Some(id) => id,
            None => *zero.get_or_insert_with(|| b.constant(0)),
        })
        .collect();
    let out = b.finish(g.name(), outputs).compact();

    let stats = circuit_stats(&out);
    let longest = g.longest_from_source().into_iter().flatten().max().unwrap_or(0);
    let l = doubling_stages(longest);
    let m = BigUint::from(g.nodes());
    let mut report = PassReport::new(PASS, astats(g), cstats(&out));
    report
        .note("stages", l)
        .check(BoundCheck::at_most("depth", Magnitude::int(2 * l), stats.depth as u64, BoundSource::Published))
        .check(BoundCheck::at_most("mul_gates", Magnitude::int(m.pow(3) * l), stats.counts.mul as u64, BoundSource::Published))
        .check(BoundCheck::at_most(
            "add_gates",
            Magnitude::int(m.pow(2) * l),
            (stats.counts.add + stats.counts.sub) as u64,
            BoundSource::Published,
        ));
    Ok((out, report))
}

/// Emits the doubling construction for `g` into `b`, creating leaves through
/// `leaf`. Returns one gate per node (index 0 unused). Node 1 stands for the
/// constant 1 and is never materialized; `None` marks a node no path reaches.
pub fn logdepth_into(
    b: &mut CircuitBuilder,
    g: &Abp,
    leaf: &mut dyn FnMut(&mut CircuitBuilder, &Label) -> GateId,
) -> Vec<Option<GateId>> {
    let m = g.nodes();
    let longest = g.longest_from_source().into_iter().flatten().max().unwrap_or(0);
    let stages = doubling_stages(longest) as usize;

    // Stage-0 matrix: parallel edges become one addition.
    let mut grouped: HashMap<(usize, usize), Vec<GateId>> = HashMap::new();
    let mut order = Vec::new();
    for e in g.edges() {
        if matches!(&e.label, Label::Const(k) if *k == BigInt::from(0)) {
            continue;
        }
        let id = leaf(b, &e.label);
        let slot = grouped.entry((e.from, e.to)).or_default();
        if slot.is_empty() {
            order.push((e.from, e.to));
        }
        slot.push(id);
    }
    let mut base: Vec<Vec<Option<GateId>>> = vec![vec![None; m + 1]; m + 1];
    for (i, j) in order {
        let ids = &grouped[&(i, j)];
        base[i][j] = Some(if ids.len() == 1 { ids[0] } else { b.sum(ids) });
    }

    let mut powers = Powers {
        base,
        memo: HashMap::new(),
    };
    let mut u: Vec<Option<GateId>> = powers.base[1].clone();
    for s in 0..stages {
        let mut next = vec![None; m + 1];
        for j in 2..=m {
            let mut terms: Vec<GateId> = u[j].into_iter().collect();
            for (k, uk) in u.iter().enumerate().take(j).skip(2) {
                if let Some(uk) = *uk {
                    if let Some(pkj) = powers.entry(b, s, k, j) {
                        terms.push(b.mul(vec![uk, pkj]));
                    }
                }
            }
            next[j] = sum_of(b, terms);
        }
        u = next;
    }
    u[1] = None;
    u
}

fn sum_of(b: &mut CircuitBuilder, terms: Vec<GateId>) -> Option<GateId> {
    match terms.len() {
        0 => None,
        1 => Some(terms[0]),
        _ => Some(b.sum(&terms)),
    }
}

/// Entries of `A^(2^s)`, built on demand.
struct Powers {
    base: Vec<Vec<Option<GateId>>>,
    memo: HashMap<(usize, usize, usize), Option<GateId>>,
}

impl Powers {
    fn entry(&mut self, b: &mut CircuitBuilder, s: usize, i: usize, j: usize) -> Option<GateId> {
        if s == 0 {
            return self.base[i][j];
        }
        if j <= i + 1 {
            // Every edge goes forward, so a walk of length >= 2 needs j > i + 1.
            return None;
        }
        if let Some(&id) = self.memo.get(&(s, i, j)) {
            return id;
        }
        let mut terms = Vec::new();
        for k in i + 1..j {
            let Some(a) = self.entry(b, s - 1, i, k) else { continue };
            let Some(c) = self.entry(b, s - 1, k, j) else { continue };
            terms.push(b.mul(vec![a, c]));
        }
        let id = sum_of(b, terms);
        self.memo.insert((s, i, j), id);
        id
    }
}
