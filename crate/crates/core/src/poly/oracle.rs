use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use super::{ModPrime, Semiring, SparsePoly};
use crate::abp::{Abp, Label};
use crate::circuit::{formal_degree, Circuit, GateKind};

pub const DEFAULT_MONOMIAL_CAP: usize = 1_000_000;

/// The monomial cap from `CHASM_MONOMIAL_CAP`, or the default.
pub fn monomial_cap() -> usize {
    std::env::var("CHASM_MONOMIAL_CAP")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n| n > 0)
        .unwrap_or(DEFAULT_MONOMIAL_CAP)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{at} expands to {monomials} monomials, above the cap")]
    CapExceeded { at: String, monomials: usize },
    #[error("structure mismatch: {0}")]
    StructureMismatch(String),
    #[error("no value assigned to variable {0}")]
    Unassigned(String),
    #[error("output counts differ: {left} vs {right}")]
    OutputCountMismatch { left: usize, right: usize },
}

/// Anything with polynomial semantics: circuits (one polynomial per output)
/// and branching programs (the sink polynomial).
pub trait PolySource {
    fn source_variables(&self) -> Vec<String>;
    /// Upper bound on the total degree of every computed polynomial.
    fn degree_bound(&self) -> u64;
    fn expand_over(&self, vars: &Arc<[String]>, cap: usize) -> Result<Vec<SparsePoly>, OracleError>;
    fn eval_with<S: Semiring>(
        &self,
        s: &S,
        leaf: &dyn Fn(&str) -> Option<S::Elem>,
    ) -> Result<Vec<S::Elem>, OracleError>;
}

fn check_cap(p: &SparsePoly, cap: usize, at: impl FnOnce() -> String) -> Result<(), OracleError> {
    if p.len() > cap {
        Err(OracleError::CapExceeded { at: at(), monomials: p.len() })
    } else {
        Ok(())
    }
}

/// Expanded polynomial of every gate, by storage position.
pub fn expand_gates(c: &Circuit, vars: &Arc<[String]>, cap: usize) -> Result<Vec<SparsePoly>, OracleError> {
    let mut polys: Vec<SparsePoly> = Vec::with_capacity(c.size());
    let children = c.child_positions();
    for (p, gate) in c.gates().iter().enumerate() {
        let poly = match &gate.kind {
            GateKind::Input(v) => SparsePoly::var(vars, v),
            GateKind::Const(k) => SparsePoly::constant(vars, k.clone()),
            GateKind::Add(terms) => {
                let mut acc = SparsePoly::zero(vars);
                for ((_, w), &ch) in terms.iter().zip(&children[p]) {
                    acc = if w.is_one() { &acc + &polys[ch] } else { &acc + &polys[ch].scale(w) };
                }
                acc
            }
            GateKind::Sub(..) => &polys[children[p][0]] - &polys[children[p][1]],
            GateKind::Mul(_) => {
                let mut acc = polys[children[p][0]].clone();
                for &ch in &children[p][1..] {
                    acc = &acc * &polys[ch];
                    check_cap(&acc, cap, || format!("gate {}", gate.id))?;
                }
                acc
            }
        };
        check_cap(&poly, cap, || format!("gate {}", gate.id))?;
        polys.push(poly);
    }
    Ok(polys)
}

/// Expanded polynomial at every node of a branching program, computed as the
/// sum over source-to-node paths (index 0 unused, node 1 maps to 1).
pub fn expand_abp_nodes(g: &Abp, vars: &Arc<[String]>, cap: usize) -> Result<Vec<SparsePoly>, OracleError> {
    let mut vals = vec![SparsePoly::zero(vars); g.nodes() + 1];
    vals[1] = SparsePoly::one(vars);
    let incoming = g.incoming();
    for v in 2..=g.nodes() {
        let mut acc = SparsePoly::zero(vars);
        for &ei in &incoming[v] {
            let e = &g.edges()[ei];
            if vals[e.from].is_zero() {
                continue;
            }
            let term = match &e.label {
                Label::Var(x) => &vals[e.from] * &SparsePoly::var(vars, x),
                Label::Const(k) => vals[e.from].scale(k),
            };
            acc = &acc + &term;
        }
        check_cap(&acc, cap, || format!("node {v}"))?;
        vals[v] = acc;
    }
    Ok(vals)
}

/// Value of every node under a semiring, by the topological path-sum
/// recurrence (index 0 unused).
pub fn eval_abp_nodes<S: Semiring>(
    g: &Abp,
    s: &S,
    leaf: &dyn Fn(&str) -> Option<S::Elem>,
) -> Result<Vec<S::Elem>, OracleError> {
    let mut vals = vec![s.zero(); g.nodes() + 1];
    vals[1] = s.one();
    let incoming = g.incoming();
    for v in 2..=g.nodes() {
        let mut acc = s.zero();
        for &ei in &incoming[v] {
            let e = &g.edges()[ei];
            let w = match &e.label {
                Label::Var(x) => leaf(x).ok_or_else(|| OracleError::Unassigned(x.clone()))?,
                Label::Const(k) => embed(s, k)?,
            };
            acc = s.add(&acc, &s.mul(&vals[e.from], &w));
        }
        vals[v] = acc;
    }
    Ok(vals)
}

fn embed<S: Semiring>(s: &S, k: &BigInt) -> Result<S::Elem, OracleError> {
    s.embed(k)
        .ok_or_else(|| OracleError::StructureMismatch(format!("constant {k} has no image in the {} semiring", s.name())))
}

/// Value of every gate under a semiring, by storage position.
pub fn eval_gates<S: Semiring>(
    c: &Circuit,
    s: &S,
    leaf: &dyn Fn(&str) -> Option<S::Elem>,
) -> Result<Vec<S::Elem>, OracleError> {
    let children = c.child_positions();
    let mut vals: Vec<S::Elem> = Vec::with_capacity(c.size());
    for (p, gate) in c.gates().iter().enumerate() {
        let v = match &gate.kind {
            GateKind::Input(x) => leaf(x).ok_or_else(|| OracleError::Unassigned(x.clone()))?,
            GateKind::Const(k) => embed(s, k)?,
            GateKind::Add(terms) => {
                let mut acc = s.zero();
                for ((_, w), &ch) in terms.iter().zip(&children[p]) {
                    let term = if w.is_one() {
                        vals[ch].clone()
                    } else if w.is_zero() {
                        continue;
                    } else {
                        let w = s.embed(w).ok_or_else(|| {
                            OracleError::StructureMismatch(format!("gate {} has weight {w}, which needs a ring", gate.id))
                        })?;
                        s.mul(&w, &vals[ch])
                    };
                    acc = s.add(&acc, &term);
                }
                acc
            }
            GateKind::Sub(..) => {
                let neg = s.neg(&vals[children[p][1]]).ok_or_else(|| {
                    OracleError::StructureMismatch(format!("gate {} subtracts over the {} semiring", gate.id, s.name()))
                })?;
                s.add(&vals[children[p][0]], &neg)
            }
            GateKind::Mul(_) => children[p][1..]
                .iter()
                .fold(vals[children[p][0]].clone(), |acc, &ch| s.mul(&acc, &vals[ch])),
        };
        vals.push(v);
    }
    Ok(vals)
}

impl PolySource for Circuit {
    fn source_variables(&self) -> Vec<String> {
        self.variables()
    }

    fn degree_bound(&self) -> u64 {
        formal_degree(self)
    }

    fn expand_over(&self, vars: &Arc<[String]>, cap: usize) -> Result<Vec<SparsePoly>, OracleError> {
        let polys = expand_gates(self, vars, cap)?;
        Ok(self.output_positions().into_iter().map(|p| polys[p].clone()).collect())
    }

    fn eval_with<S: Semiring>(
        &self,
        s: &S,
        leaf: &dyn Fn(&str) -> Option<S::Elem>,
    ) -> Result<Vec<S::Elem>, OracleError> {
        let vals = eval_gates(self, s, leaf)?;
        Ok(self.output_positions().into_iter().map(|p| vals[p].clone()).collect())
    }
}

impl PolySource for Abp {
    fn source_variables(&self) -> Vec<String> {
        self.variables()
    }

    fn degree_bound(&self) -> u64 {
        self.depth() as u64
    }

    fn expand_over(&self, vars: &Arc<[String]>, cap: usize) -> Result<Vec<SparsePoly>, OracleError> {
        let mut nodes = expand_abp_nodes(self, vars, cap)?;
        Ok(vec![nodes.swap_remove(self.sink())])
    }

    fn eval_with<S: Semiring>(
        &self,
        s: &S,
        leaf: &dyn Fn(&str) -> Option<S::Elem>,
    ) -> Result<Vec<S::Elem>, OracleError> {
        let mut vals = eval_abp_nodes(self, s, leaf)?;
        Ok(vec![vals.swap_remove(self.sink())])
    }
}

pub fn shared_vars(lists: &[Vec<String>]) -> Arc<[String]> {
    let mut all: Vec<String> = lists.iter().flatten().cloned().collect();
    all.sort();
    all.dedup();
    all.into()
}

/// Exact expansion of every output over the object's own variables.
pub fn expand_to_poly<P: PolySource + ?Sized>(obj: &P, cap: usize) -> Result<Vec<SparsePoly>, OracleError> {
    obj.expand_over(&shared_vars(&[obj.source_variables()]), cap)
}

/// Evaluates every output at `assignment` over `s`.
pub fn eval_semiring<P: PolySource + ?Sized, S: Semiring>(
    obj: &P,
    assignment: &HashMap<String, S::Elem>,
    s: &S,
) -> Result<Vec<S::Elem>, OracleError> {
    obj.eval_with(s, &|x| assignment.get(x).cloned())
}

/// True iff both objects expand to the same polynomials term by term.
pub fn equiv_exact<A: PolySource + ?Sized, B: PolySource + ?Sized>(a: &A, b: &B, cap: usize) -> Result<bool, OracleError> {
    let vars = shared_vars(&[a.source_variables(), b.source_variables()]);
    let pa = a.expand_over(&vars, cap)?;
    let pb = b.expand_over(&vars, cap)?;
    if pa.len() != pb.len() {
        return Err(OracleError::OutputCountMismatch {
            left: pa.len(),
            right: pb.len(),
        });
    }
    Ok(pa == pb)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Equivalent {
        trials: usize,
        degree_bound: u64,
        /// Upper bound `(D/p)^trials` on the chance of a false positive.
        failure_probability: f64,
    },
    Distinct {
        trial: usize,
        output: usize,
        point: BTreeMap<String, u64>,
        left: u64,
        right: u64,
    },
}

impl Verdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Verdict::Equivalent { .. })
    }
}

/// Schwartz-Zippel test modulo 2^61 - 1. Trial `i` draws its point from its
/// own ChaCha stream, so results do not depend on evaluation order.
pub fn equiv_random<A: PolySource + ?Sized, B: PolySource + ?Sized>(
    a: &A,
    b: &B,
    trials: usize,
    seed: u64,
) -> Result<Verdict, OracleError> {
    let vars = shared_vars(&[a.source_variables(), b.source_variables()]);
    let index: HashMap<&str, usize> = vars.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let degree = a.degree_bound().max(b.degree_bound());
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial as u64);
        let point: Vec<u64> = vars.iter().map(|_| rng.random_range(0..ModPrime::MODULUS)).collect();
        let leaf = |x: &str| index.get(x).map(|&i| point[i]);
        let va = a.eval_with(&ModPrime, &leaf)?;
        let vb = b.eval_with(&ModPrime, &leaf)?;
        if va.len() != vb.len() {
            return Err(OracleError::OutputCountMismatch {
                left: va.len(),
                right: vb.len(),
            });
        }
        if let Some(output) = (0..va.len()).find(|&o| va[o] != vb[o]) {
            return Ok(Verdict::Distinct {
                trial,
                output,
                point: vars.iter().cloned().zip(point.iter().copied()).collect(),
                left: va[output],
                right: vb[output],
            });
        }
    }
    let ratio = degree as f64 / ModPrime::MODULUS as f64;
    Ok(Verdict::Equivalent {
        trials,
        degree_bound: degree,
        failure_probability: ratio.powi(trials as i32),
    })
}
