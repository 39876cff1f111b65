use num_traits::{One, Signed, Zero};

use super::{cstats, precondition, PassError};
use crate::circuit::{check_shape, formal_degree, Circuit, CircuitBuilder, GateId, GateKind, ShapeSpec};
use crate::report::{BoundCheck, BoundSource, Magnitude, PassReport};

const PASS: &str = "eliminate_subtractions";

type Component = Option<GateId>;

fn add2(b: &mut CircuitBuilder, x: Component, y: Component) -> Component {
    match (x, y) {
        (Some(x), Some(y)) => Some(b.sum(&[x, y])),
        (x, None) => x,
        (None, y) => y,
    }
}

fn mul2(b: &mut CircuitBuilder, x: Component, y: Component) -> Component {
    Some(b.mul(vec![x?, y?]))
}

/// Rewrites a constant-free circuit with subtractions into one using only
/// additions and multiplications.
///
/// Every gate becomes a pair `(pos, neg)` with `value = pos - neg`;
/// components that are identically zero are not materialized. Each output
/// is finally realized as `pos + (-1) * neg`.
pub fn eliminate_subtractions(c: &Circuit) -> Result<(Circuit, PassReport), PassError> {
    for g in c.gates() {
        match &g.kind {
            GateKind::Mul(cs) if cs.len() != 2 => {
                return Err(precondition(PASS, format!("multiplication gate {} is not binary", g.id)))
            }
            GateKind::Add(ts) if ts.iter().any(|(_, w)| !w.is_one()) => {
                return Err(precondition(PASS, format!("addition gate {} is weighted", g.id)))
            }
            GateKind::Const(k) if k.abs() > One::one() => {
                return Err(precondition(PASS, format!("constant {k} at gate {} is not in {{-1, 0, 1}}", g.id)))
            }
            _ => {}
        }
    }

    let mut b = CircuitBuilder::new();
    let mut pairs: Vec<(Component, Component)> = Vec::with_capacity(c.size());
    let children = c.child_positions();
    for (p, g) in c.gates().iter().enumerate() {
        let ch = &children[p];
        let pair = match &g.kind {
            GateKind::Input(x) => (Some(b.input(x.clone())), None),
            GateKind::Const(k) if k.is_zero() => (None, None),
            GateKind::Const(k) => (Some(b.constant(k.clone())), None),
            GateKind::Add(_) => ch.iter().fold((None, None), |(pos, neg), &x| {
                let pos = add2(&mut b, pos, pairs[x].0);
                let neg = add2(&mut b, neg, pairs[x].1);
                (pos, neg)
            }),
            GateKind::Sub(..) => {
                let (l, r) = (pairs[ch[0]], pairs[ch[1]]);
                (add2(&mut b, l.0, r.1), add2(&mut b, l.1, r.0))
            }
            GateKind::Mul(_) => {
                let (l, r) = (pairs[ch[0]], pairs[ch[1]]);
                let pp = mul2(&mut b, l.0, r.0);
                let nn = mul2(&mut b, l.1, r.1);
                let pos = add2(&mut b, pp, nn);
                let pn = mul2(&mut b, l.0, r.1);
                let np = mul2(&mut b, l.1, r.0);
                let neg = add2(&mut b, pn, np);
                (pos, neg)
            }
        };
        pairs.push(pair);
    }

    let mut minus_one = None;
    let mut zero = None;
    let mut outputs = Vec::new();
    for p in c.output_positions() {
        let out = match pairs[p] {
            (Some(pos), None) => pos,
            (None, None) => *zero.get_or_insert_with(|| b.constant(0)),
            (pos, Some(neg)) => {
                let m1 = *minus_one.get_or_insert_with(|| b.constant(-1));
                let scaled = b.mul(vec![m1, neg]);
                match pos {
                    Some(pos) => b.sum(&[pos, scaled]),
                    None => scaled,
                }
            }
        };
        outputs.push(out);
    }
    let out = b.finish(c.name(), outputs).compact();

    let (t, d, k) = (c.size() as u64, formal_degree(c), c.outputs().len() as u64);
    let mut report = PassReport::new(PASS, cstats(c), cstats(&out));
    let size_source = if k == 1 { BoundSource::Published } else { BoundSource::Convention };
    report
        .check(BoundCheck::at_most("size", Magnitude::int(6 * t + 3 * k), out.size() as u64, size_source))
        .check(BoundCheck::at_most("formal_degree", Magnitude::int(d + 1), formal_degree(&out), BoundSource::Published))
        .check(BoundCheck::holds(
            "constant_free",
            check_shape(&out, ShapeSpec::ConstantFree).ok,
            BoundSource::Published,
        ))
        .check(BoundCheck::holds(
            "ordinary_additions_only",
            check_shape(&out, ShapeSpec::OrdinaryAdditionsOnly).ok,
            BoundSource::Published,
        ));
    Ok((out, report))
}
