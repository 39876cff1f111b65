use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use super::{cstats, precondition, PassError};
use crate::circuit::{check_shape, formal_degree, Circuit, CircuitBuilder, GateId, GateKind, ShapeSpec};
use crate::poly::{eval_gates, expand_to_poly, monomial_cap, Integers};
use crate::report::{BoundCheck, BoundSource, Magnitude, PassReport};

const PASS: &str = "homogenize";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomogenizeMode {
    /// Degree-0 factors become unary weighted additions.
    Vp,
    /// Degree-0 factors become doubling chains, keeping the circuit
    /// constant-free.
    Vp0,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HomogenizeOptions {
    /// True degree of the output, computed with the oracle when absent.
    pub degree: Option<u64>,
    pub max_degree: u64,
    pub cap: usize,
}

impl Default for HomogenizeOptions {
    fn default() -> Self {
        HomogenizeOptions {
            degree: None,
            max_degree: 256,
            cap: monomial_cap(),
        }
    }
}

/// Result of homogenization before dead gates are removed.
#[derive(Debug, Clone)]
pub struct Homogenized {
    pub circuit: Circuit,
    /// Target degree `D`.
    pub degree: u64,
    /// For each input gate position, the gate computing its degree-`i`
    /// component at index `i` (index 0 is always `None`).
    pub components: Vec<Vec<Option<GateId>>>,
    /// Constant term of each input gate.
    pub constants: Vec<BigInt>,
}

struct Emitter {
    b: CircuitBuilder,
    mode: HomogenizeMode,
    zero: Option<GateId>,
}

/// A gate with a sign; negative terms are subtracted.
type Term = (GateId, bool);

impl Emitter {
    /// `k * g`, or `None` when `k = 0`.
    fn scale(&mut self, g: GateId, k: &BigInt) -> Option<Term> {
        if k.is_zero() {
            return None;
        }
        match self.mode {
            HomogenizeMode::Vp if k.is_one() => Some((g, false)),
            HomogenizeMode::Vp => Some((self.b.add(vec![(g, k.clone())]), false)),
            HomogenizeMode::Vp0 => Some((self.double_and_add(g, k.magnitude()), k.is_negative())),
        }
    }

    /// `n * g` with most-significant-bit-first doublings and additions.
    fn double_and_add(&mut self, g: GateId, n: &BigUint) -> GateId {
        let mut acc = g;
        for i in (0..n.bits() - 1).rev() {
            acc = self.b.sum(&[acc, acc]);
            if n.bit(i) {
                acc = self.b.sum(&[acc, g]);
            }
        }
        acc
    }

    /// Sum of signed terms using binary additions and subtractions.
    fn combine(&mut self, terms: &[Term]) -> Option<GateId> {
        let first = terms.iter().position(|(_, neg)| !neg);
        let mut acc = first.map(|i| terms[i].0);
        for (i, &(g, neg)) in terms.iter().enumerate() {
            if Some(i) == first {
                continue;
            }
            acc = Some(match (acc, neg) {
                (Some(a), false) => self.b.sum(&[a, g]),
                (Some(a), true) => self.b.sub(a, g),
                (None, _) => {
                    let z = *self.zero.get_or_insert_with(|| self.b.constant(0));
                    self.b.sub(z, g)
                }
            });
        }
        acc
    }

    fn negate_term(&mut self, g: GateId) -> Term {
        match self.mode {
            HomogenizeMode::Vp => (self.b.add(vec![(g, -BigInt::one())]), false),
            HomogenizeMode::Vp0 => (g, true),
        }
    }
}

/// Rewrites `c` so that every gate computes homogeneous components of degree
/// `1..=D`, where `D` is the true degree of the output. Formal degree of the
/// result equals `D` (or 1 when the output is constant).
pub fn homogenize(c: &Circuit, mode: HomogenizeMode) -> Result<(Circuit, PassReport), PassError> {
    homogenize_with(c, mode, HomogenizeOptions::default())
}

pub fn homogenize_with(
    c: &Circuit,
    mode: HomogenizeMode,
    opts: HomogenizeOptions,
) -> Result<(Circuit, PassReport), PassError> {
    let h = homogenize_components(c, mode, opts)?;
    let out = h.circuit.compact();
    let t = c.size() as u64;
    let d_target = h.degree;
    let mut report = PassReport::new(PASS, cstats(c), cstats(&out));
    report.note("mode", format!("{mode:?}").to_lowercase());
    report.note("true_degree", d_target);
    report
        .check(BoundCheck::equals(
            "formal_degree",
            d_target.max(1),
            formal_degree(&out),
            BoundSource::Published,
        ))
        .check(BoundCheck::at_most(
            "size",
            Magnitude::int(10 * t * (d_target + 1) * (d_target + 1)),
            out.size() as u64,
            BoundSource::Convention,
        ));
    match mode {
        HomogenizeMode::Vp => {
            let shaped = out.gates().iter().all(|g| match &g.kind {
                GateKind::Add(ts) => ts.len() == 1 || g.is_ordinary_add(),
                GateKind::Sub(..) => false,
                _ => true,
            });
            report.check(BoundCheck::holds("unary_weighted_or_binary_additions", shaped, BoundSource::Published));
        }
        HomogenizeMode::Vp0 => {
            report.check(BoundCheck::holds(
                "constant_free",
                check_shape(&out, ShapeSpec::ConstantFree).ok,
                BoundSource::Published,
            ));
        }
    }
    Ok((out, report))
}

pub fn homogenize_components(c: &Circuit, mode: HomogenizeMode, opts: HomogenizeOptions) -> Result<Homogenized, PassError> {
    if mode == HomogenizeMode::Vp0 {
        // Weights of -1 are differences, so they keep the circuit constant-free.
        let unit = |k: &BigInt| k.abs() <= BigInt::one();
        if let Some(g) = c.gates().iter().find(|g| match &g.kind {
            GateKind::Const(k) => !unit(k),
            GateKind::Add(ts) => ts.iter().any(|(_, w)| !unit(w)),
            _ => false,
        }) {
            return Err(precondition(PASS, format!("gate {} is not constant-free", g.id)));
        }
    }
    let degree = match opts.degree {
        Some(d) => d,
        None => expand_to_poly(c, opts.cap)?
            .iter()
            .filter_map(|p| p.degree())
            .max()
            .unwrap_or(0) as u64,
    };
    if degree > opts.max_degree {
        return Err(PassError::DegreeOverflow {
            degree,
            limit: opts.max_degree,
        });
    }
    let dd = degree as usize;
    let constants = eval_gates(c, &Integers, &|_| Some(BigInt::zero()))?;

    let mut e = Emitter {
        b: CircuitBuilder::new(),
        mode,
        zero: None,
    };
    let children = c.child_positions();
    let mut comps: Vec<Vec<Option<GateId>>> = Vec::with_capacity(c.size());
    for (p, g) in c.gates().iter().enumerate() {
        let ch = &children[p];
        let mut cur = vec![None; dd + 1];
        match &g.kind {
            GateKind::Input(x) => {
                if dd >= 1 {
                    cur[1] = Some(e.b.input(x.clone()));
                }
            }
            GateKind::Const(_) => {}
            GateKind::Add(ts) => {
                for (i, slot) in cur.iter_mut().enumerate().skip(1) {
                    let mut terms = Vec::new();
                    for (&chp, (_, w)) in ch.iter().zip(ts) {
                        if let Some(gi) = comps[chp][i] {
                            terms.extend(e.scale(gi, w));
                        }
                    }
                    *slot = e.combine(&terms);
                }
            }
            GateKind::Sub(..) => {
                for (i, slot) in cur.iter_mut().enumerate().skip(1) {
                    let mut terms = Vec::new();
                    if let Some(a) = comps[ch[0]][i] {
                        terms.push((a, false));
                    }
                    if let Some(bi) = comps[ch[1]][i] {
                        terms.push(e.negate_term(bi));
                    }
                    *slot = e.combine(&terms);
                }
            }
            GateKind::Mul(_) => {
                let mut acc = comps[ch[0]].clone();
                let mut acc0 = constants[ch[0]].clone();
                for &r in &ch[1..] {
                    let (rc, r0) = (&comps[r], &constants[r]);
                    let mut next = vec![None; dd + 1];
                    for (k, slot) in next.iter_mut().enumerate().skip(1) {
                        let mut terms = Vec::new();
                        for i in 1..k {
                            if let (Some(a), Some(b)) = (acc[i], rc[k - i]) {
                                terms.push((e.b.mul(vec![a, b]), false));
                            }
                        }
                        if let Some(bk) = rc[k] {
                            terms.extend(e.scale(bk, &acc0));
                        }
                        if let Some(ak) = acc[k] {
                            terms.extend(e.scale(ak, r0));
                        }
                        *slot = e.combine(&terms);
                    }
                    acc = next;
                    acc0 = &acc0 * r0;
                }
                cur = acc;
            }
        }
        comps.push(cur);
    }

    let mut outputs = Vec::new();
    for p in c.output_positions() {
        let mut terms: Vec<Term> = comps[p].iter().flatten().map(|&g| (g, false)).collect();
        let c0 = &constants[p];
        if !c0.is_zero() {
            match mode {
                HomogenizeMode::Vp => terms.push((e.b.constant(c0.clone()), false)),
                HomogenizeMode::Vp0 => {
                    let one = e.b.constant(1);
                    terms.extend(e.scale(one, c0));
                }
            }
        }
        let out = match e.combine(&terms) {
            Some(g) => g,
            None => *e.zero.get_or_insert_with(|| e.b.constant(0)),
        };
        outputs.push(out);
    }
    Ok(Homogenized {
        circuit: e.b.finish(c.name(), outputs),
        degree,
        components: comps,
        constants,
    })
}

/// For a variable-free, constant-free circuit of size `t` and formal degree
/// `d`, checks that every output has magnitude at most `2^{t d}`. Returns
/// `None` when the circuit has variables or constants outside {-1, 0, 1}.
pub fn constant_size_check(c: &Circuit) -> Option<BoundCheck> {
    if !c.variables().is_empty() || !check_shape(c, ShapeSpec::ConstantFree).ok {
        return None;
    }
    let vals = eval_gates(c, &Integers, &|_| None).ok()?;
    let largest = c
        .output_positions()
        .into_iter()
        .map(|p| vals[p].magnitude().clone())
        .max()
        .unwrap_or_default();
    let bound = Magnitude::pow2(c.size() as u64 * formal_degree(c));
    Some(BoundCheck::at_most("output_magnitude", bound, largest, BoundSource::Published))
}
