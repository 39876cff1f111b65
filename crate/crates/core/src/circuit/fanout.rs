use std::collections::HashMap;

use super::{check_shape, Circuit, CircuitBuilder, GateId, GateKind, ShapeSpec};

/// Gives every use of an input or constant gate its own leaf.
///
/// Returns the circuit unchanged when no leaf has fan-out above one.
pub fn normalize_leaf_fanout(c: &Circuit) -> Circuit {
    if check_shape(c, ShapeSpec::InputFanoutAtMostOne).ok {
        return c.clone();
    }
    let mut b = CircuitBuilder::new();
    let mut map: HashMap<GateId, GateId> = HashMap::new();
    let mut used: HashMap<GateId, usize> = HashMap::new();
    for gate in c.gates() {
        if gate.is_leaf() {
            let id = b.push_mapped(&gate.kind, |x| x);
            map.insert(gate.id, id);
            continue;
        }
        // Resolve children first so fresh leaf copies precede their consumer.
        let mut resolved = Vec::new();
        for child in gate.children() {
            let leaf = c.gate(child);
            if leaf.is_leaf() {
                let n = used.entry(child).or_insert(0);
                *n += 1;
                if *n > 1 {
                    resolved.push(b.push_mapped(&leaf.kind, |x| x));
                    continue;
                }
            }
            resolved.push(map[&child]);
        }
        let mut it = resolved.into_iter();
        let id = b.push_mapped(&gate.kind, |_| it.next().expect("child count"));
        map.insert(gate.id, id);
    }
    let outputs = c.outputs().iter().map(|o| map[o]).collect();
    b.finish(c.name(), outputs)
}

/// Rewrites multiplications of arity above two as left-nested binary
/// products. Formal degree is unchanged.
pub fn binarize_multiplications(c: &Circuit) -> Circuit {
    if check_shape(c, ShapeSpec::BinaryMultiplicationsOnly).ok {
        return c.clone();
    }
    let mut b = CircuitBuilder::new();
    let mut map: HashMap<GateId, GateId> = HashMap::new();
    for gate in c.gates() {
        let id = match &gate.kind {
            GateKind::Mul(cs) => {
                let mut acc = map[&cs[0]];
                for ch in &cs[1..] {
                    acc = b.mul(vec![acc, map[ch]]);
                }
                acc
            }
            kind => b.push_mapped(kind, |x| map[&x]),
        };
        map.insert(gate.id, id);
    }
    let outputs = c.outputs().iter().map(|o| map[o]).collect();
    b.finish(c.name(), outputs)
}
