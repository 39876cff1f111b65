use std::collections::{BTreeSet, HashMap};

use num_traits::Signed;
use serde::Serialize;

use super::to_abp::weakly_skew_to_boolean_abp;
use super::{
    abp_to_depth_2delta, collapse_additions_with, cstats, precondition, to_weakly_skew, AdditionSemantics, PassError,
};
use crate::circuit::{check_shape, Circuit, GateKind, ShapeSpec};
use crate::poly::{eval_semiring, Boolean};
use crate::report::{BoundCheck, BoundSource, PassReport};

const PASS: &str = "reduce_boolean";

/// Largest number of base variables enumerated exhaustively.
pub const MAX_TRUTH_TABLE_VARS: usize = 12;

/// Exhaustive truth table. Inputs named `~x` are the complement of `x`.
/// Row `r` sets the `k`-th variable (in sorted order) to bit `n - 1 - k`
/// of `r`; `outputs[o][r]` is output `o` on that row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TruthTable {
    pub variables: Vec<String>,
    pub outputs: Vec<Vec<bool>>,
}

fn base_variables(c: &Circuit) -> BTreeSet<String> {
    c.variables().into_iter().map(|v| v.strip_prefix('~').unwrap_or(&v).to_string()).collect()
}

pub fn truth_table(c: &Circuit) -> Result<TruthTable, PassError> {
    let vars: Vec<String> = base_variables(c).into_iter().collect();
    truth_table_over(c, &vars)
}

fn truth_table_over(c: &Circuit, vars: &[String]) -> Result<TruthTable, PassError> {
    let n = vars.len();
    if n > MAX_TRUTH_TABLE_VARS {
        return Err(precondition(
            "truth_table",
            format!("{n} variables exceed the exhaustive limit of {MAX_TRUTH_TABLE_VARS}"),
        ));
    }
    let mut outputs = vec![Vec::with_capacity(1 << n); c.outputs().len()];
    for row in 0..1usize << n {
        let mut at: HashMap<String, bool> = HashMap::with_capacity(2 * n);
        for (k, v) in vars.iter().enumerate() {
            let bit = row >> (n - 1 - k) & 1 == 1;
            at.insert(v.clone(), bit);
            at.insert(format!("~{v}"), !bit);
        }
        for (o, val) in eval_semiring(c, &at, &Boolean)?.into_iter().enumerate() {
            outputs[o].push(val);
        }
    }
    Ok(TruthTable {
        variables: vars.to_vec(),
        outputs,
    })
}

/// Constant-depth boolean circuit for a semi-unbounded circuit over the
/// boolean semiring, where additions play OR and products play AND.
///
/// The circuit goes through the branching-program route with every weight
/// kept in {0, 1}, then through `delta` cascaded powering stages. The result
/// is checked against the input by exhaustive truth table.
pub fn reduce_boolean(c: &Circuit, delta: usize) -> Result<(Circuit, PassReport), PassError> {
    if delta < 2 {
        return Err(PassError::InvalidDelta(delta));
    }
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
    let shape = check_shape(c, ShapeSpec::SemiUnbounded);
    if let Some(w) = shape.witness {
        return Err(precondition(PASS, format!("gate {w} breaks the semi-unbounded shape")));
    }

    let (collapsed, collapse_report) = collapse_additions_with(c, AdditionSemantics::Boolean)?;
    let (ws, ws_report) = to_weakly_skew(&collapsed)?;
    let (g, abp_report) = weakly_skew_to_boolean_abp(&ws)?;
    let (out, depth_report) = abp_to_depth_2delta(&g, delta)?;

    let vars: Vec<String> = base_variables(c).union(&base_variables(&out)).cloned().collect();
    let same = truth_table_over(c, &vars)? == truth_table_over(&out, &vars)?;
    let mut report = PassReport::new(PASS, cstats(c), cstats(&out));
    report.stages = vec![collapse_report, ws_report, abp_report, depth_report];
    report
        .note("rows", 1usize << vars.len())
        .check(BoundCheck::holds("truth_table_equal", same, BoundSource::Published));
    Ok((out, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{circuit_stats, parse_circuit};

    #[test]
    fn or_of_ands() {
        let c = parse_circuit(
            "gate 1 input x1\ngate 2 input x2\ngate 3 input x3\ngate 4 mul 1 2\ngate 5 mul 2 3\ngate 6 add 4 5\noutput 6",
        )
        .unwrap();
        let (out, report) = reduce_boolean(&c, 2).unwrap();
        assert!(report.all_ok(), "{report:#?}");
        assert!(circuit_stats(&out).depth <= 4);
        let tt = truth_table(&out).unwrap();
        assert_eq!(tt.outputs[0], vec![false, false, false, true, false, false, true, true]);
    }

    #[test]
    fn single_and() {
        let c = parse_circuit("gate 1 input x1\ngate 2 input x2\ngate 3 mul 1 2\noutput 3").unwrap();
        assert_eq!(truth_table(&c).unwrap().outputs[0], vec![false, false, false, true]);
        let (out, report) = reduce_boolean(&c, 2).unwrap();
        assert!(report.all_ok());
        assert_eq!(truth_table(&out).unwrap().outputs[0], vec![false, false, false, true]);
    }

    #[test]
    fn complemented_literals() {
        // x1 AND NOT x1 is always false; x1 OR NOT x1 always true.
        let c = parse_circuit("gate 1 input x1\ngate 2 input ~x1\ngate 3 mul 1 2\ngate 4 add 1 2\noutput 3\noutput 4").unwrap();
        let tt = truth_table(&c).unwrap();
        assert_eq!(tt.outputs, vec![vec![false, false], vec![true, true]]);
    }

    #[test]
    fn rejects_subtraction_and_small_delta() {
        let c = parse_circuit("gate 1 input x1\ngate 2 input x2\ngate 3 sub 1 2\noutput 3").unwrap();
        assert!(matches!(reduce_boolean(&c, 2), Err(PassError::StructureMismatch(_))));
        let c = parse_circuit("gate 1 input x1\noutput 1").unwrap();
        assert_eq!(reduce_boolean(&c, 1).unwrap_err(), PassError::InvalidDelta(1));
    }
}
