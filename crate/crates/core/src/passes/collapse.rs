use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{cstats, PassError};
use crate::circuit::{
    check_shape, circuit_stats, formal_degree, formal_degrees, Circuit, CircuitBuilder, GateId, GateKind, ShapeSpec,
};
use crate::report::{BoundCheck, BoundSource, Magnitude, PassReport};

const PASS: &str = "collapse_additions";

/// How repeated terms combine when additions are merged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AdditionSemantics {
    /// Integer coefficients accumulate.
    #[default]
    Ring,
    /// Coefficients are clamped to {0, 1}, matching OR over the boolean
    /// semiring. Subtractions and negative weights are rejected.
    Boolean,
}

/// Replaces every maximal addition/subtraction subcircuit by weighted
/// additions whose inputs are leaves or multiplications.
pub fn collapse_additions(c: &Circuit) -> Result<(Circuit, PassReport), PassError> {
    collapse_additions_with(c, AdditionSemantics::Ring)
}

pub fn collapse_additions_with(c: &Circuit, semantics: AdditionSemantics) -> Result<(Circuit, PassReport), PassError> {
    if semantics == AdditionSemantics::Boolean {
        for g in c.gates() {
            match &g.kind {
                GateKind::Sub(..) => {
                    return Err(PassError::StructureMismatch(format!("gate {} subtracts over the boolean semiring", g.id)))
                }
                GateKind::Add(ts) if ts.iter().any(|(_, w)| w.is_negative()) => {
                    return Err(PassError::StructureMismatch(format!("gate {} has a negative weight", g.id)))
                }
                _ => {}
            }
        }
    }

    let fd = formal_degrees(c);
    let children = c.child_positions();
    let gates = c.gates();
    let is_atom = |p: usize| !gates[p].is_additive();

    // Linear combination of atoms for every additive gate, zero coefficients kept.
    let mut combos: Vec<Option<BTreeMap<usize, BigInt>>> = vec![None; c.size()];
    for (p, g) in gates.iter().enumerate() {
        let signed_children: Vec<(usize, BigInt)> = match &g.kind {
            GateKind::Add(ts) => children[p].iter().zip(ts).map(|(&ch, (_, w))| (ch, w.clone())).collect(),
            GateKind::Sub(..) => vec![(children[p][0], BigInt::one()), (children[p][1], -BigInt::one())],
            _ => continue,
        };
        let mut combo: BTreeMap<usize, BigInt> = BTreeMap::new();
        for (ch, w) in signed_children {
            if is_atom(ch) {
                *combo.entry(ch).or_default() += w;
            } else {
                for (atom, k) in combos[ch].as_ref().expect("additive child processed") {
                    *combo.entry(*atom).or_default() += &w * k;
                }
            }
        }
        if semantics == AdditionSemantics::Boolean {
            for k in combo.values_mut() {
                *k = if k.is_positive() { BigInt::one() } else { BigInt::zero() };
            }
        }
        combos[p] = Some(combo);
    }

    let mut b = CircuitBuilder::new();
    let mut map: Vec<Option<GateId>> = vec![None; c.size()];
    let materialize = |b: &mut CircuitBuilder, map: &mut Vec<Option<GateId>>, p: usize| -> GateId {
        if let Some(id) = map[p] {
            return id;
        }
        let combo = combos[p].as_ref().expect("additive gate");
        let mut terms: Vec<(GateId, BigInt)> = combo
            .iter()
            .filter(|(_, k)| !k.is_zero())
            .map(|(&a, k)| (map[a].expect("atom emitted"), k.clone()))
            .collect();
        let kept_degree = combo.iter().filter(|(_, k)| !k.is_zero()).map(|(&a, _)| fd[a]).max().unwrap_or(0);
        if kept_degree < fd[p] {
            // Keep one zero-weight term so the formal degree does not drop.
            let (&a, _) = combo.iter().find(|(&a, _)| fd[a] == fd[p]).expect("degree witness");
            terms.push((map[a].expect("atom emitted"), BigInt::zero()));
            terms.sort_by_key(|(id, _)| *id);
        }
        let id = if terms.len() == 1 && terms[0].1.is_one() { terms[0].0 } else { b.add(terms) };
        map[p] = Some(id);
        id
    };

    for (p, g) in gates.iter().enumerate() {
        match &g.kind {
            GateKind::Input(_) | GateKind::Const(_) => map[p] = Some(b.push_mapped(&g.kind, |x| x)),
            GateKind::Mul(_) => {
                let ids: Vec<GateId> = children[p]
                    .iter()
                    .map(|&ch| if is_atom(ch) { map[ch].expect("atom emitted") } else { materialize(&mut b, &mut map, ch) })
                    .collect();
                map[p] = Some(b.mul(ids));
            }
            _ => {}
        }
    }
    let outputs: Vec<GateId> = c
        .output_positions()
        .into_iter()
        .map(|p| if is_atom(p) { map[p].expect("atom emitted") } else { materialize(&mut b, &mut map, p) })
        .collect();
    let out = b.finish(c.name(), outputs);

    let s = gates.iter().filter(|g| g.is_additive()).count() as u64;
    let m = gates.iter().filter(|g| g.is_mul()).count() as u64;
    let ordinary = gates.iter().all(|g| !g.is_additive() || g.is_ordinary_add() || matches!(g.kind, GateKind::Sub(..)));
    let stats = circuit_stats(&out);
    let degrees_equal = {
        let fo = formal_degrees(&out);
        c.output_positions()
            .iter()
            .zip(out.output_positions())
            .all(|(&a, b)| fd[a] == fo[b])
    };
    let mut report = PassReport::new(PASS, cstats(c), cstats(&out));
    report
        .check(BoundCheck::at_most("add_gates", Magnitude::int(s), (stats.counts.add + stats.counts.sub) as u64, BoundSource::Published))
        .check(BoundCheck::equals("mul_gates", m, stats.counts.mul as u64, BoundSource::Published))
        .check(BoundCheck::equals("formal_degree", formal_degree(c), formal_degree(&out), BoundSource::Published))
        .check(BoundCheck::holds("output_degrees_preserved", degrees_equal, BoundSource::Published))
        .check(BoundCheck::holds(
            "add_feeds_only_mul",
            check_shape(&out, ShapeSpec::AddFeedsOnlyMul).ok,
            BoundSource::Published,
        ));
    if ordinary {
        report.check(BoundCheck::at_most(
            "add_total_weight",
            Magnitude::pow2(s),
            stats.max_add_total_weight.magnitude().clone(),
            BoundSource::Published,
        ));
    }
    Ok((out, report))
}
