//! Deterministic circuit generators for tests, benches and the CLI.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::circuit::{Circuit, CircuitBuilder, GateId};

/// A generator family and its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CorpusSpec {
    /// Depth-3 inclusion-exclusion formula for the `n x n` permanent.
    Ryser { n: usize },
    /// Entry `(1, 1)` of a product of `k` generic `n x n` matrices.
    Imm { n: usize, k: usize },
    /// `x` squared `k` times.
    Power { k: usize },
    /// Seeded random DAG with binary products, ordinary additions and
    /// subtractions, and formal degree at most `max_degree`.
    Random { vars: usize, size: usize, max_degree: u64, seed: u64 },
    /// Semi-unbounded circuit deciding whether node 1 reaches the last node
    /// of a seeded random DAG whose edges are labeled by literals.
    BoolReach { nodes: usize, seed: u64 },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid corpus parameters: {0}")]
pub struct CorpusError(String);

impl fmt::Display for CorpusSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            CorpusSpec::Ryser { n } => write!(f, "ryser{n}"),
            CorpusSpec::Imm { n, k } => write!(f, "imm{n}x{k}"),
            CorpusSpec::Power { k } => write!(f, "power{k}"),
            CorpusSpec::Random { vars, size, max_degree, seed } => write!(f, "random_v{vars}_s{size}_d{max_degree}_{seed}"),
            CorpusSpec::BoolReach { nodes, seed } => write!(f, "reach{nodes}_{seed}"),
        }
    }
}

impl CorpusSpec {
    pub fn validate(&self) -> Result<(), CorpusError> {
        let bad = |msg: String| Err(CorpusError(msg));
        match *self {
            CorpusSpec::Ryser { n: 0 } => bad("ryser needs n >= 1".into()),
            CorpusSpec::Imm { n, k } if n == 0 || k == 0 => bad("imm needs n >= 1 and k >= 1".into()),
            CorpusSpec::Power { k: 0 } => bad("power needs k >= 1".into()),
            CorpusSpec::Random { vars, size, max_degree, .. } => {
                let leaves = vars.max(1) + 1;
                if max_degree == 0 {
                    bad("random needs max_degree >= 1".into())
                } else if size < leaves {
                    bad(format!("random with {vars} variables needs size >= {leaves}"))
                } else {
                    Ok(())
                }
            }
            CorpusSpec::BoolReach { nodes, .. } if nodes < 2 => bad("bool_reach needs at least 2 nodes".into()),
            _ => Ok(()),
        }
    }
}

/// Builds the circuit described by `spec`. Equal specs give equal circuits.
pub fn gen_corpus(spec: &CorpusSpec) -> Result<Circuit, CorpusError> {
    spec.validate()?;
    let name = spec.to_string();
    Ok(match *spec {
        CorpusSpec::Ryser { n } => gen_ryser(n, name),
        CorpusSpec::Imm { n, k } => gen_imm(n, k, name),
        CorpusSpec::Power { k } => gen_power(k, name),
        CorpusSpec::Random { vars, size, max_degree, seed } => gen_random(vars, size, max_degree, seed, name),
        CorpusSpec::BoolReach { nodes, seed } => gen_bool_reach(nodes, seed, name),
    })
}

fn sign(negative: bool) -> BigInt {
    BigInt::from(if negative { -1 } else { 1 })
}

fn gen_ryser(n: usize, name: String) -> Circuit {
    let mut b = CircuitBuilder::new();
    let a: Vec<Vec<GateId>> = (1..=n).map(|i| (1..=n).map(|j| b.input(format!("a{i}_{j}"))).collect()).collect();
    let mut terms = Vec::new();
    for s in 1usize..1 << n {
        let cols: Vec<usize> = (0..n).filter(|j| s >> j & 1 == 1).collect();
        let rows: Vec<GateId> = a
            .iter()
            .map(|row| match cols.as_slice() {
                [j] => row[*j],
                _ => b.sum(&cols.iter().map(|&j| row[j]).collect::<Vec<_>>()),
            })
            .collect();
        let prod = if n == 1 { rows[0] } else { b.mul(rows) };
        terms.push((prod, sign((n - cols.len()) % 2 == 1)));
    }
    let out = b.add(terms);
    b.finish(name, vec![out])
}

fn gen_imm(n: usize, k: usize, name: String) -> Circuit {
    let mut b = CircuitBuilder::new();
    let mats: Vec<Vec<Vec<GateId>>> = (1..=k)
        .map(|l| (1..=n).map(|r| (1..=n).map(|c| b.input(format!("a{l}_{r}_{c}"))).collect()).collect())
        .collect();
    let mut row = mats[0][0].clone();
    for (l, m) in mats.iter().enumerate().skip(1) {
        let cols = if l + 1 == k { 1 } else { n };
        row = (0..cols)
            .map(|c| {
                let prods: Vec<GateId> = (0..n).map(|r| b.mul(vec![row[r], m[r][c]])).collect();
                prods.into_iter().reduce(|acc, p| b.sum(&[acc, p])).expect("n >= 1")
            })
            .collect();
    }
    b.finish(name, vec![row[0]])
}

fn gen_power(k: usize, name: String) -> Circuit {
    let mut b = CircuitBuilder::new();
    let mut g = b.input("x");
    for _ in 0..k {
        g = b.mul(vec![g, g]);
    }
    b.finish(name, vec![g])
}

fn gen_random(vars: usize, size: usize, max_degree: u64, seed: u64, name: String) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = CircuitBuilder::new();
    let mut degree: Vec<u64> = Vec::with_capacity(size);
    for v in 1..=vars {
        b.input(format!("x{v}"));
        degree.push(1);
    }
    if vars == 0 {
        b.constant(1);
        b.constant(-1);
        degree.extend([1, 1]);
    } else {
        b.constant(if rng.random_bool(0.5) { 1 } else { -1 });
        degree.push(1);
    }
    while b.len() < size {
        let last = b.len();
        let pick = |rng: &mut ChaCha8Rng| GateId(rng.random_range(1..=last as u32));
        let choose = |rng: &mut ChaCha8Rng| {
            let a = if rng.random_bool(0.5) { GateId(last as u32) } else { pick(rng) };
            (a, pick(rng))
        };
        let op = rng.random_range(0..3);
        let (mut x, mut y) = choose(&mut rng);
        let deg = |g: GateId| degree[g.0 as usize - 1];
        let mut product = op == 0;
        if product {
            // Reject pairs that would exceed the degree cap; give up after a few tries.
            let mut tries = 0;
            while deg(x) + deg(y) > max_degree && tries < 8 {
                (x, y) = choose(&mut rng);
                tries += 1;
            }
            product = deg(x) + deg(y) <= max_degree;
        }
        let (dx, dy) = (deg(x), deg(y));
        if product {
            b.mul(vec![x, y]);
            degree.push(dx + dy);
        } else {
            if op == 2 {
                b.sub(x, y);
            } else {
                b.sum(&[x, y]);
            }
            degree.push(dx.max(dy));
        }
    }
    let out = GateId(b.len() as u32);
    b.finish(name, vec![out])
}

/// Number of literals over which `bool_reach(nodes, _)` labels its edges.
pub fn bool_reach_literals(nodes: usize) -> usize {
    nodes.min(10)
}

fn gen_bool_reach(nodes: usize, seed: u64, name: String) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = bool_reach_literals(nodes);
    let mut b = CircuitBuilder::new();
    let mut literals: HashMap<(usize, bool), GateId> = HashMap::new();
    let mut base: HashMap<(usize, usize), GateId> = HashMap::new();
    for i in 1..=nodes {
        for j in i + 1..=nodes {
            if rng.random_bool(0.5) {
                let lit = (rng.random_range(1..=n), rng.random_bool(0.5));
                let id = *literals.entry(lit).or_insert_with(|| {
                    b.input(if lit.1 { format!("~x{}", lit.0) } else { format!("x{}", lit.0) })
                });
                base.insert((i, j), id);
            }
        }
    }
    if !has_path(&base, nodes) {
        let lit = (rng.random_range(1..=n), false);
        let id = *literals.entry(lit).or_insert_with(|| b.input(format!("x{}", lit.0)));
        base.insert((1, nodes), id);
    }
    // Squarings needed so that paths of nodes - 1 edges are covered.
    let stages = (nodes - 1).next_power_of_two().trailing_zeros() as usize;
    let mut reach = Reach {
        base,
        memo: HashMap::new(),
    };
    let out = reach.entry(&mut b, stages, 1, nodes).expect("node 1 reaches the last node");
    b.finish(name, vec![out])
}

fn has_path(edges: &HashMap<(usize, usize), GateId>, nodes: usize) -> bool {
    let mut seen = vec![false; nodes + 1];
    seen[1] = true;
    for j in 2..=nodes {
        seen[j] = (1..j).any(|i| seen[i] && edges.contains_key(&(i, j)));
    }
    seen[nodes]
}

/// Entries of the reachability relation for paths of at most `2^s` edges.
struct Reach {
    base: HashMap<(usize, usize), GateId>,
    memo: HashMap<(usize, usize, usize), Option<GateId>>,
}

impl Reach {
    fn entry(&mut self, b: &mut CircuitBuilder, s: usize, i: usize, j: usize) -> Option<GateId> {
        if s == 0 {
            return self.base.get(&(i, j)).copied();
        }
        if let Some(&id) = self.memo.get(&(s, i, j)) {
            return id;
        }
        let mut terms: Vec<GateId> = self.entry(b, s - 1, i, j).into_iter().collect();
        for l in i + 1..j {
            let Some(x) = self.entry(b, s - 1, i, l) else { continue };
            let Some(y) = self.entry(b, s - 1, l, j) else { continue };
            terms.push(b.mul(vec![x, y]));
        }
        let id = match terms.len() {
            0 => None,
            1 => Some(terms[0]),
            _ => Some(b.sum(&terms)),
        };
        self.memo.insert((s, i, j), id);
        id
    }
}

/// Corpus swept by the acceptance checks: two seeded random families of
/// 150 circuits each, plus permanents, iterated products and powers.
pub fn standard_corpus() -> Vec<CorpusSpec> {
    let mut specs = Vec::new();
    specs.extend((2..=4).map(|n| CorpusSpec::Ryser { n }));
    specs.extend((2..=4).map(|k| CorpusSpec::Imm { n: 2, k }));
    specs.extend((1..=4).map(|k| CorpusSpec::Power { k }));
    for seed in 0..150 {
        specs.push(CorpusSpec::Random {
            vars: 3,
            size: 20,
            max_degree: 6,
            seed,
        });
    }
    for seed in 0..150 {
        specs.push(CorpusSpec::Random {
            vars: (seed % 5) as usize,
            size: 16 + (seed % 25) as usize,
            max_degree: 10,
            seed: 1000 + seed,
        });
    }
    specs
}

/// Semi-unbounded boolean circuits for the flattening checks.
pub fn boolean_corpus() -> Vec<CorpusSpec> {
    (0..24).map(|i| CorpusSpec::BoolReach { nodes: 3 + i % 4, seed: i as u64 }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{check_shape, circuit_stats, emit_circuit, ShapeSpec};
    use crate::poly::{expand_to_poly, DEFAULT_MONOMIAL_CAP};

    #[test]
    fn power_stats() {
        let c = gen_corpus(&CorpusSpec::Power { k: 3 }).unwrap();
        let s = circuit_stats(&c);
        assert_eq!((s.size, s.formal_degree), (4, 8));
    }

    #[test]
    fn ryser_two() {
        let c = gen_corpus(&CorpusSpec::Ryser { n: 2 }).unwrap();
        let p = &expand_to_poly(&c, DEFAULT_MONOMIAL_CAP).unwrap()[0];
        assert_eq!(p.to_string(), "a1_1*a2_2 + a1_2*a2_1");
        let s = circuit_stats(&c);
        assert_eq!((s.depth, s.formal_degree), (3, 2));
    }

    #[test]
    fn random_is_deterministic_and_capped() {
        let spec = CorpusSpec::Random {
            vars: 3,
            size: 20,
            max_degree: 6,
            seed: 7,
        };
        let a = emit_circuit(&gen_corpus(&spec).unwrap());
        assert_eq!(a, emit_circuit(&gen_corpus(&spec).unwrap()));
        for seed in 0..50 {
            let c = gen_corpus(&CorpusSpec::Random {
                vars: 3,
                size: 20,
                max_degree: 6,
                seed,
            })
            .unwrap();
            let s = circuit_stats(&c);
            assert_eq!(s.size, 20);
            assert!(s.formal_degree <= 6);
        }
    }

    #[test]
    fn reach_is_semi_unbounded() {
        for spec in boolean_corpus() {
            let c = gen_corpus(&spec).unwrap();
            assert!(check_shape(&c, ShapeSpec::SemiUnbounded).ok, "{spec}");
        }
    }

    #[test]
    fn invalid_parameters() {
        assert!(gen_corpus(&CorpusSpec::Ryser { n: 0 }).is_err());
        assert!(gen_corpus(&CorpusSpec::Random { vars: 4, size: 3, max_degree: 2, seed: 0 }).is_err());
        assert!(gen_corpus(&CorpusSpec::BoolReach { nodes: 1, seed: 0 }).is_err());
    }

    #[test]
    fn corpus_is_large_enough() {
        assert!(standard_corpus().len() >= 200);
    }
}
