use std::collections::HashMap;

use num_bigint::BigUint;

use super::logdepth::doubling_stages;
use super::{collapse_additions, cstats, logdepth_into, weakly_skew_to_multi_abp, PassError};
use crate::abp::Label;
use crate::circuit::{
    binarize_multiplications, check_shape, circuit_stats, formal_degree, formal_degrees, Circuit, CircuitBuilder,
    GateId, GateKind, ShapeSpec,
};
use crate::report::{BoundCheck, BoundSource, Magnitude, PassReport};

const PASS: &str = "reduce_to_polylog";

/// Constant `K` in the depth bound `K (1 + ceil(log2 t)) (1 + floor(log2 d))`.
pub const POLYLOG_DEPTH_CONSTANT: u64 = 4;

/// Layer `floor(log2 fd)` of every non-leaf gate, by storage position.
pub fn degree_layers(c: &Circuit) -> Vec<Option<u32>> {
    formal_degrees(c)
        .into_iter()
        .zip(c.gates())
        .map(|(d, g)| (!g.is_leaf()).then(|| d.max(1).ilog2()))
        .collect()
}

fn ceil_log2(n: u64) -> u64 {
    if n <= 1 {
        0
    } else {
        (64 - (n - 1).leading_zeros()) as u64
    }
}

/// Polylogarithmic-depth circuit for `c`.
///
/// Gates are grouped into layers of formal degree `[2^i, 2^(i+1))`. Seen
/// from inside a layer, every lower-layer gate is an input, which makes the
/// layer skew. Each layer becomes a branching program with one node per
/// gate and is then evaluated by repeated doubling, reading its inputs from
/// the already emitted lower layers.
pub fn reduce_to_polylog(c: &Circuit) -> Result<(Circuit, PassReport), PassError> {
    let cb = binarize_multiplications(c);
    let (cc, collapse_report) = collapse_additions(&cb)?;
    let (t, d) = (cb.size() as u64, formal_degree(&cb));

    let layer = degree_layers(&cc);
    let reachable = cc.reachable();
    let children = cc.child_positions();
    let gates = cc.gates();
    let top = layer.iter().flatten().copied().max();

    let mut b = CircuitBuilder::new();
    let mut leaves: HashMap<Label, GateId> = HashMap::new();
    let mut global: Vec<Option<GateId>> = vec![None; cc.size()];
    let mut zero = None;
    let mut stages = vec![collapse_report];
    let mut layer_count = 0u64;

    for i in 0..=top.unwrap_or(0) {
        let members: Vec<usize> = (0..cc.size()).filter(|&p| reachable[p] && layer[p] == Some(i)).collect();
        if members.is_empty() {
            continue;
        }
        layer_count += 1;

        // Layer circuit: leaves and lower-layer gates become fresh inputs per use.
        let mut lb = CircuitBuilder::new();
        let mut local: HashMap<usize, GateId> = HashMap::new();
        let mut origin: HashMap<GateId, usize> = HashMap::new();
        for &p in &members {
            let mut ids = Vec::new();
            for &ch in &children[p] {
                let id = match layer[ch] {
                    Some(l) if l == i => local[&ch],
                    Some(_) => lb.input(format!("#{ch}")),
                    None => lb.push_mapped(&gates[ch].kind, |x| x),
                };
                ids.push(id);
            }
            let mut it = ids.into_iter();
            let id = lb.push_mapped(&gates[p].kind, |_| it.next().expect("child count"));
            local.insert(p, id);
            origin.insert(id, p);
        }
        let outputs: Vec<GateId> = members.iter().map(|p| local[p]).collect();
        let lc = lb.finish(format!("layer{i}"), outputs);
        let skew = check_shape(&lc, ShapeSpec::Skew);
        if let Some(w) = skew.witness {
            return Err(PassError::LayerNotSkew {
                layer: i,
                gate: gates[origin[&w]].id,
            });
        }

        let (multi, abp_report) = weakly_skew_to_multi_abp(&lc)?;
        let before = b.len();
        let per_node = logdepth_into(&mut b, &multi.abp, &mut |b, label| match label {
            Label::Var(x) if x.starts_with('#') => {
                let p: usize = x[1..].parse().expect("placeholder names a position");
                global[p].unwrap_or_else(|| *zero.get_or_insert_with(|| b.constant(0)))
            }
            other => *leaves.entry(other.clone()).or_insert_with(|| match other {
                Label::Var(x) => b.input(x.clone()),
                Label::Const(k) => b.constant(k.clone()),
            }),
        });
        let block = block_stats(&b, before);
        for (k, &p) in members.iter().enumerate() {
            global[p] = Some(match per_node[multi.outputs[k]] {
                Some(id) => id,
                None => *zero.get_or_insert_with(|| b.constant(0)),
            });
        }

        let g = &multi.abp;
        let longest = g.longest_from_source().into_iter().flatten().max().unwrap_or(0);
        let l = doubling_stages(longest) as u64;
        let m = BigUint::from(g.nodes());
        let mut r = PassReport::new(format!("layer {i}"), cstats(&lc), super::astats(g));
        r.stages.push(abp_report);
        r.note("stages", l)
            .check(BoundCheck::holds("skew", true, BoundSource::Published))
            .check(BoundCheck::at_most("block_depth", Magnitude::int(2 * l), block.depth, BoundSource::Published))
            .check(BoundCheck::at_most("block_mul_gates", Magnitude::int(m.pow(3) * l), block.muls, BoundSource::Published))
            .check(BoundCheck::at_most("block_add_gates", Magnitude::int(m.pow(2) * l), block.adds, BoundSource::Published));
        stages.push(r);
    }

    let outputs: Vec<GateId> = cc
        .output_positions()
        .into_iter()
        .map(|p| match global[p] {
            Some(id) => id,
            None => {
                // Leaf outputs live in no layer.
                let label = match &gates[p].kind {
                    GateKind::Input(x) => Label::Var(x.clone()),
                    GateKind::Const(k) => Label::Const(k.clone()),
                    _ => unreachable!("non-leaf gates are emitted with their layer"),
                };
                *leaves.entry(label.clone()).or_insert_with(|| match label {
                    Label::Var(x) => b.input(x),
                    Label::Const(k) => b.constant(k),
                })
            }
        })
        .collect();
    let out = b.finish(c.name(), outputs).compact();

    let stats = circuit_stats(&out);
    let depth_bound = POLYLOG_DEPTH_CONSTANT * (1 + ceil_log2(t)) * (1 + d.max(1).ilog2() as u64);
    let mut report = PassReport::new(PASS, cstats(c), cstats(&out));
    report.stages = stages;
    report
        .note("layers", layer_count)
        .check(BoundCheck::at_most("depth", Magnitude::int(depth_bound), stats.depth as u64, BoundSource::Convention))
        .check(BoundCheck::at_most(
            "layers",
            Magnitude::int(1 + d.max(1).ilog2() as u64),
            layer_count,
            BoundSource::Published,
        ));
    Ok((out, report))
}

struct BlockStats {
    depth: u64,
    muls: u64,
    adds: u64,
}

/// Depth and gate counts of the gates emitted after position `before`,
/// treating everything older as depth 0.
fn block_stats(b: &CircuitBuilder, before: usize) -> BlockStats {
    let mut depth: HashMap<GateId, u64> = HashMap::new();
    let mut s = BlockStats { depth: 0, muls: 0, adds: 0 };
    for n in before + 1..=b.len() {
        let id = GateId(n as u32);
        let g = b.gate(id);
        match g.kind {
            GateKind::Mul(_) => s.muls += 1,
            GateKind::Add(_) | GateKind::Sub(..) => s.adds += 1,
            _ => {}
        }
        let d = g.children().iter().map(|ch| depth.get(ch).map_or(0, |d| d + 1).max(1)).max().unwrap_or(0);
        depth.insert(id, d);
        s.depth = s.depth.max(d);
    }
    s
}
