use std::collections::HashMap;

use super::{collapse_additions, cstats, precondition, PassError};
use crate::circuit::{
    check_shape, circuit_stats, formal_degree, formal_degrees, independent_children, Circuit, CircuitBuilder, GateId,
    GateKind, ShapeSpec,
};
use crate::report::{BoundCheck, BoundSource, Magnitude, PassReport};

const PASS: &str = "to_weakly_skew";

/// Rewrites `c` into an equivalent weakly skew circuit.
///
/// For every multiplication one input is made private: its whole
/// sub-circuit is copied into a fresh scope that nothing else references.
/// An input that is already independent is preferred; otherwise the input
/// of smaller formal degree is chosen, then the smaller sub-circuit, then
/// the smaller gate id. Additions are collapsed first when needed.
pub fn to_weakly_skew(c: &Circuit) -> Result<(Circuit, PassReport), PassError> {
    if let Some(g) = c.gates().iter().find(|g| matches!(&g.kind, GateKind::Mul(cs) if cs.len() != 2)) {
        return Err(precondition(PASS, format!("multiplication gate {} is not binary", g.id)));
    }
    let mut stages = Vec::new();
    let collapsed;
    let cc = if check_shape(c, ShapeSpec::AddFeedsOnlyMul).ok {
        c
    } else {
        let (out, report) = collapse_additions(c)?;
        stages.push(report);
        collapsed = out;
        &collapsed
    };

    let private = choose_private_children(cc);
    let children = cc.child_positions();
    let mut builder = Builder {
        c: cc,
        children: &children,
        private: &private,
        b: CircuitBuilder::new(),
        memo: HashMap::new(),
        scopes: 0,
    };
    let outputs: Vec<GateId> = cc.output_positions().into_iter().map(|p| builder.build(p, 0)).collect();
    let out = builder.b.finish(c.name(), outputs);

    let t = c.size() as u64;
    let d = formal_degree(c);
    let ordinary = c
        .gates()
        .iter()
        .all(|g| !g.is_additive() || g.is_ordinary_add() || matches!(g.kind, GateKind::Sub(..)));
    let mut report = PassReport::new(PASS, cstats(c), cstats(&out));
    report.stages = stages;
    report
        .check(BoundCheck::at_most("size", Magnitude::pow_log2(t, 2 * d), out.size() as u64, BoundSource::Published))
        .check(BoundCheck::equals("formal_degree", d, formal_degree(&out), BoundSource::Published))
        .check(BoundCheck::holds("weakly_skew", check_shape(&out, ShapeSpec::WeaklySkew).ok, BoundSource::Published))
        .check(BoundCheck::holds(
            "add_feeds_only_mul",
            check_shape(&out, ShapeSpec::AddFeedsOnlyMul).ok,
            BoundSource::Published,
        ));
    if ordinary {
        report.check(BoundCheck::at_most(
            "add_total_weight",
            Magnitude::pow2(t),
            circuit_stats(&out).max_add_total_weight.magnitude().clone(),
            BoundSource::Published,
        ));
    }
    Ok((out, report))
}

/// Index (0 or 1) of the input to privatize, for every multiplication.
fn choose_private_children(c: &Circuit) -> Vec<Option<usize>> {
    let indep = independent_children(c);
    let fd = formal_degrees(c);
    let children = c.child_positions();
    let mut sizes: HashMap<usize, usize> = HashMap::new();
    let mut sub_size = |root: usize| -> usize {
        *sizes.entry(root).or_insert_with(|| {
            let mut seen = vec![false; children.len()];
            let mut stack = vec![root];
            let mut n = 0;
            while let Some(p) = stack.pop() {
                if !std::mem::replace(&mut seen[p], true) {
                    n += 1;
                    stack.extend(&children[p]);
                }
            }
            n
        })
    };
    (0..c.size())
        .map(|p| {
            let [a, b] = indep[p]?;
            let (l, r) = (children[p][0], children[p][1]);
            Some(match (a, b) {
                (true, false) => 0,
                (false, true) => 1,
                _ => {
                    let key_l = (fd[l], sub_size(l), c.gates()[l].id);
                    let key_r = (fd[r], sub_size(r), c.gates()[r].id);
                    if key_r < key_l {
                        1
                    } else {
                        0
                    }
                }
            })
        })
        .collect()
}

struct Builder<'a> {
    c: &'a Circuit,
    children: &'a [Vec<usize>],
    private: &'a [Option<usize>],
    b: CircuitBuilder,
    memo: HashMap<(usize, u32), GateId>,
    scopes: u32,
}

impl Builder<'_> {
    fn build(&mut self, p: usize, scope: u32) -> GateId {
        if let Some(&id) = self.memo.get(&(p, scope)) {
            return id;
        }
        let gate = &self.c.gates()[p];
        let id = match &gate.kind {
            GateKind::Mul(_) => {
                let which = self.private[p].expect("binary multiplication");
                let shared = self.build(self.children[p][1 - which], scope);
                self.scopes += 1;
                let fresh = self.scopes;
                let private = self.build(self.children[p][which], fresh);
                let mut ids = [shared, shared];
                ids[which] = private;
                self.b.mul(ids.to_vec())
            }
            kind => {
                let ids: Vec<GateId> = self.children[p].iter().map(|&ch| self.build(ch, scope)).collect();
                let mut it = ids.into_iter();
                self.b.push_mapped(kind, |_| it.next().expect("child count"))
            }
        };
        self.memo.insert((p, scope), id);
        id
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_circuit;
    use crate::poly::{equiv_exact, expand_to_poly, DEFAULT_MONOMIAL_CAP};

    #[test]
    fn shared_square_is_duplicated() {
        let c = parse_circuit("gate 1 input x\ngate 2 input y\ngate 3 add 1 2\ngate 4 mul 3 3\noutput 4").unwrap();
        let (out, report) = to_weakly_skew(&c).unwrap();
        assert_eq!(out.size(), 7);
        assert_eq!(report.bound("size").unwrap().claimed, "<= 16");
        assert!(report.all_ok(), "{report:?}");
        assert_eq!(expand_to_poly(&out, DEFAULT_MONOMIAL_CAP).unwrap()[0].to_string(), "x^2 + 2*x*y + y^2");
    }

    #[test]
    fn weakly_skew_input_is_preserved() {
        let c = parse_circuit(
            "gate 1 input x\ngate 2 input y\ngate 3 add 1 2\n\
             gate 4 input x\ngate 5 input y\ngate 6 add 4 5\ngate 7 mul 3 6\noutput 7",
        )
        .unwrap();
        let (out, report) = to_weakly_skew(&c).unwrap();
        assert!(report.all_ok());
        assert_eq!(out.size(), c.size());
        assert!(equiv_exact(&c, &out, DEFAULT_MONOMIAL_CAP).unwrap());
    }

    #[test]
    fn smaller_degree_input_is_privatized() {
        // g = x*x (degree 2) is shared by both products; z (degree 1) is private.
        let c = parse_circuit(
            "gate 1 input x\ngate 2 input z\ngate 3 mul 1 1\ngate 4 add 3 2\ngate 5 mul 4 2\ngate 6 mul 4 3\n\
             gate 7 add 5 6\noutput 7",
        )
        .unwrap();
        let (out, report) = to_weakly_skew(&c).unwrap();
        assert!(report.all_ok(), "{report:?}");
        assert!(equiv_exact(&c, &out, DEFAULT_MONOMIAL_CAP).unwrap());
    }

    #[test]
    fn rejects_wide_products() {
        let c = parse_circuit("gate 1 input a\ngate 2 input b\ngate 3 input c\ngate 4 mul 1 2 3\noutput 4").unwrap();
        assert!(matches!(to_weakly_skew(&c), Err(PassError::PreconditionViolated { .. })));
    }
}
