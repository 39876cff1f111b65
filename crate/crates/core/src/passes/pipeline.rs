use num_bigint::BigUint;
use num_traits::Signed;

use super::depth4::abp_to_depth4_with;
use super::{
    abp_to_depth_2delta, collapse_additions, cstats, precondition, reduce_boolean, reduce_to_polylog, to_weakly_skew,
    weakly_skew_to_abp, Depth4Mode, PassError,
};
use crate::abp::{Abp, Label};
use crate::circuit::{
    binarize_multiplications, check_shape, circuit_stats, formal_degree, Circuit, GateKind, ShapeSpec,
};
use crate::poly::{equiv_exact, equiv_random, monomial_cap};
use crate::report::{BoundCheck, BoundSource, Exponent, Magnitude, PassReport};

/// What a pipeline produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Depth4Circuit,
    Depth4Formula,
    /// Depth at most `2 * delta`, `delta >= 2`.
    Depth2Delta(usize),
    Polylog,
    /// Boolean circuit of depth at most `2 * delta`.
    BooleanConstantDepth(usize),
}

/// How the pipeline output is checked against its input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verify {
    Exact,
    Random { trials: usize, seed: u64 },
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineConfig {
    pub target: Target,
    pub prune_zero_terms: bool,
    pub verify: Verify,
}

impl PipelineConfig {
    pub fn new(target: Target) -> Self {
        PipelineConfig {
            target,
            prune_zero_terms: true,
            verify: Verify::Exact,
        }
    }

    pub fn with_verify(mut self, verify: Verify) -> Self {
        self.verify = verify;
        self
    }

    pub fn with_prune_zero_terms(mut self, prune: bool) -> Self {
        self.prune_zero_terms = prune;
        self
    }
}

/// Constant-free with every addition ordinary; subtractions allowed.
fn ordinary_constant_free(c: &Circuit) -> bool {
    check_shape(c, ShapeSpec::ConstantFree).ok
        && c.gates().iter().all(|g| match &g.kind {
            GateKind::Add(ts) => ts.len() == 2,
            _ => true,
        })
}

fn require_binary(c: &Circuit, pass: &'static str) -> Result<(), PassError> {
    if let Some(g) = c.gates().iter().find(|g| matches!(&g.kind, GateKind::Mul(cs) if cs.len() != 2)) {
        return Err(precondition(pass, format!("multiplication gate {} is not binary", g.id)));
    }
    Ok(())
}

fn max_abs_label(g: &Abp) -> BigUint {
    g.edges()
        .iter()
        .filter_map(|e| match &e.label {
            Label::Const(k) => Some(k.abs().magnitude().clone()),
            Label::Var(_) => None,
        })
        .max()
        .unwrap_or_default()
}

/// Circuit to branching program: weakly skew rewrite, then lowering.
pub fn circuit_to_abp(c: &Circuit) -> Result<(Abp, PassReport), PassError> {
    require_binary(c, "circuit_to_abp")?;
    let (ws, ws_report) = to_weakly_skew(c)?;
    let (g, abp_report) = weakly_skew_to_abp(&ws)?;

    let (t, d) = (c.size() as u64, formal_degree(c));
    let mut report = PassReport::new("circuit_to_abp", cstats(c), super::astats(&g));
    report.stages = vec![ws_report, abp_report];
    report
        .check(BoundCheck::at_most("size", Magnitude::pow_log2(t, 2 * d).plus(1), g.nodes() as u64, BoundSource::Published))
        .check(BoundCheck::at_most("depth", Magnitude::int(3 * d - 1), g.depth() as u64, BoundSource::Published));
    if ordinary_constant_free(c) {
        report.check(BoundCheck::at_most("edge_constants", Magnitude::pow2(t), max_abs_label(&g), BoundSource::Published));
    }
    Ok((g, report))
}

/// Branching program for `c` (binary products), taking the weakly skew
/// shortcut when it applies. Returns the program, its report and the
/// quantity `T` bounding the program size.
fn to_program(c: &Circuit) -> Result<(Abp, PassReport, Magnitude), PassError> {
    let t = c.size() as u64;
    if check_shape(c, ShapeSpec::WeaklySkew).ok {
        let (cc, stage) = if check_shape(c, ShapeSpec::AddFeedsOnlyMul).ok {
            (c.clone(), None)
        } else {
            let (cc, r) = collapse_additions(c)?;
            (cc, Some(r))
        };
        if check_shape(&cc, ShapeSpec::WeaklySkew).ok {
            let (g, mut r) = weakly_skew_to_abp(&cc)?;
            if let Some(s) = stage {
                r.stages.insert(0, s);
            }
            r.note("path", "weakly_skew");
            return Ok((g, r, Magnitude::int(t + 1)));
        }
    }
    let (g, r) = circuit_to_abp(c)?;
    Ok((g, r, Magnitude::pow_log2(t, 2 * formal_degree(c)).plus(1)))
}

/// Depth-4 circuit or formula for `c`, with every size bound checked and
/// the result verified as configured.
pub fn reduce_to_depth4(c: &Circuit, cfg: &PipelineConfig) -> Result<(Circuit, PassReport), PassError> {
    let mode = match cfg.target {
        Target::Depth4Circuit => Depth4Mode::Circuit,
        Target::Depth4Formula => Depth4Mode::Formula,
        other => return Err(precondition("reduce_to_depth4", format!("target {other:?} is not depth 4"))),
    };
    let cb = binarize_multiplications(c);
    let (g, program_report, big_t) = to_program(&cb)?;
    let (out, d4_report) = abp_to_depth4_with(&g, mode, cfg.prune_zero_terms)?;

    let (t, d) = (cb.size() as u64, formal_degree(&cb));
    let stats = circuit_stats(&out);
    let root = Exponent::sqrt(3 * d);
    let (add_bound, mul_bound) = match mode {
        Depth4Mode::Circuit => (big_t.clone().pow(Exponent::Int(2)).plus(1), big_t.pow(root.plus(2)).times(2)),
        Depth4Mode::Formula => (big_t.clone().pow(root).plus(1), big_t.pow(root.times(2)).times(2)),
    };
    let fanin_bound = (3 * d).isqrt() + 1;
    let mut report = PassReport::new("reduce_to_depth4", cstats(c), cstats(&out));
    report.stages = vec![program_report, d4_report];
    report
        .check(BoundCheck::at_most("add_gates", add_bound, (stats.counts.add + stats.counts.sub) as u64, BoundSource::Published))
        .check(BoundCheck::at_most("mul_gates", mul_bound, stats.counts.mul as u64, BoundSource::Published))
        .check(BoundCheck::at_most("mul_fanin", Magnitude::int(fanin_bound), stats.max_mul_fanin as u64, BoundSource::Published))
        .check(BoundCheck::holds(
            "depth4_shape",
            check_shape(&out, ShapeSpec::Depth4SigmaPiSigmaPi).ok,
            BoundSource::Published,
        ));
    if ordinary_constant_free(&cb) {
        report.check(BoundCheck::at_most(
            "constants",
            Magnitude::pow2(t),
            stats.max_abs_constant.magnitude().clone(),
            BoundSource::Published,
        ));
    }
    verify(c, &out, cfg.verify, &mut report)?;
    Ok((out, report))
}

fn verify(input: &Circuit, out: &Circuit, how: Verify, report: &mut PassReport) -> Result<(), PassError> {
    match how {
        Verify::Exact => {
            let ok = equiv_exact(input, out, monomial_cap())?;
            report.check(BoundCheck::holds("equivalent", ok, BoundSource::Published));
        }
        Verify::Random { trials, seed } => {
            let verdict = equiv_random(input, out, trials, seed)?;
            report.note("verdict", serde_json::to_string(&verdict).expect("verdicts serialize"));
            report.check(BoundCheck::holds("equivalent", verdict.is_equivalent(), BoundSource::Published));
        }
        Verify::None => {}
    }
    Ok(())
}

/// Runs the pipeline selected by `cfg.target`.
pub fn run_pipeline(c: &Circuit, cfg: &PipelineConfig) -> Result<(Circuit, PassReport), PassError> {
    match cfg.target {
        Target::Depth4Circuit | Target::Depth4Formula => reduce_to_depth4(c, cfg),
        Target::Depth2Delta(delta) => {
            if delta < 2 {
                return Err(PassError::InvalidDelta(delta));
            }
            let cb = binarize_multiplications(c);
            let (g, program_report, _) = to_program(&cb)?;
            let (out, stage) = abp_to_depth_2delta(&g, delta)?;
            let mut report = PassReport::new("reduce_to_depth_2delta", cstats(c), cstats(&out));
            report.stages = vec![program_report, stage];
            verify(c, &out, cfg.verify, &mut report)?;
            Ok((out, report))
        }
        Target::Polylog => {
            let (out, mut report) = reduce_to_polylog(c)?;
            verify(c, &out, cfg.verify, &mut report)?;
            Ok((out, report))
        }
        // Boolean equivalence is checked by truth table inside the pass.
        Target::BooleanConstantDepth(delta) => reduce_boolean(c, delta),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_circuit;
    use crate::poly::{expand_to_poly, DEFAULT_MONOMIAL_CAP};

    fn power(k: usize) -> Circuit {
        let mut text = String::from("gate 1 input x\n");
        for i in 1..=k {
            text += &format!("gate {} mul {} {}\n", i + 1, i, i);
        }
        text += &format!("output {}", k + 1);
        parse_circuit(&text).unwrap()
    }

    #[test]
    fn difference_program() {
        let c = parse_circuit("gate 1 input x\ngate 2 input y\ngate 3 sub 1 2\noutput 3").unwrap();
        let (g, report) = circuit_to_abp(&c).unwrap();
        assert!(g.depth() <= 2);
        assert!(report.all_ok(), "{report:?}");
        assert_eq!(max_abs_label(&g), BigUint::from(1u32));
        assert_eq!(expand_to_poly(&g, DEFAULT_MONOMIAL_CAP).unwrap()[0].to_string(), "x - y");
    }

    #[test]
    fn fourth_power_program() {
        let (g, report) = circuit_to_abp(&power(2)).unwrap();
        assert_eq!(report.bound("size").unwrap().claimed, "<= 28");
        assert!(g.nodes() <= 28 && g.depth() <= 11);
        assert!(report.all_ok());
        assert_eq!(expand_to_poly(&g, DEFAULT_MONOMIAL_CAP).unwrap()[0].to_string(), "x^4");
    }

    #[test]
    fn eighth_power_in_depth_four() {
        let cfg = PipelineConfig::new(Target::Depth4Circuit);
        let (out, report) = reduce_to_depth4(&power(3), &cfg).unwrap();
        assert!(report.all_ok(), "{report:#?}");
        assert!(circuit_stats(&out).max_mul_fanin <= 5);
        let at = [("x".to_string(), num_bigint::BigInt::from(2))].into();
        let v = crate::poly::eval_semiring(&out, &at, &crate::poly::Integers).unwrap();
        assert_eq!(v[0], 256.into());
    }

    #[test]
    fn formula_target_and_random_verification() {
        let cfg = PipelineConfig::new(Target::Depth4Formula).with_verify(Verify::Random { trials: 5, seed: 3 });
        let c = parse_circuit("gate 1 input x\ngate 2 input y\ngate 3 add 1 2\ngate 4 mul 3 3\noutput 4").unwrap();
        let (out, report) = reduce_to_depth4(&c, &cfg).unwrap();
        assert!(report.all_ok(), "{report:#?}");
        assert!(equiv_exact(&c, &out, DEFAULT_MONOMIAL_CAP).unwrap());
    }

    #[test]
    fn weakly_skew_inputs_take_the_shortcut() {
        let c = parse_circuit(
            "gate 1 input x\ngate 2 input y\ngate 3 add 1 2\ngate 4 input x\ngate 5 input y\ngate 6 add 4 5\n\
             gate 7 mul 3 6\noutput 7",
        )
        .unwrap();
        let (_, report) = reduce_to_depth4(&c, &PipelineConfig::new(Target::Depth4Circuit)).unwrap();
        assert_eq!(report.stages[0].notes["path"], "weakly_skew");
        assert!(report.all_ok());
    }
}
