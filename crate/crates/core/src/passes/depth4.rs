use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};

use super::{astats, cstats, PassError};
use crate::abp::{abp_to_matrix, Abp, Entry, LabeledMatrix};
use crate::circuit::{check_shape, circuit_stats, Circuit, CircuitBuilder, GateId, ShapeSpec};
use crate::report::{BoundCheck, BoundSource, Magnitude, PassReport};

/// Whether intermediate matrix entries are shared or recomputed per use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Depth4Mode {
    /// Every entry and leaf is built once and reused.
    #[default]
    Circuit,
    /// Every gate has fan-out at most one.
    Formula,
}

/// Depth-4 circuit computing the program's polynomial as the `(1, m)` entry
/// of `(M^q)^q` with `q = ceil(sqrt(depth))`, zero terms pruned.
pub fn abp_to_depth4(g: &Abp, mode: Depth4Mode) -> Result<(Circuit, PassReport), PassError> {
    abp_to_depth4_with(g, mode, true)
}

/// Like [`abp_to_depth4`]. With `prune_zero_terms` off every walk is
/// expanded, zero entries included, which reproduces the dense gate counts.
pub fn abp_to_depth4_with(g: &Abp, mode: Depth4Mode, prune_zero_terms: bool) -> Result<(Circuit, PassReport), PassError> {
    let pass = match mode {
        Depth4Mode::Circuit => "abp_to_depth4(circuit)",
        Depth4Mode::Formula => "abp_to_depth4(formula)",
    };
    let (out, q) = build(g, 2, mode, prune_zero_terms)?;
    let m = BigUint::from(g.nodes());
    let stats = circuit_stats(&out);
    let (adds, muls) = ((stats.counts.add + stats.counts.sub) as u64, stats.counts.mul as u64);
    let (add_bound, mul_bound) = match mode {
        Depth4Mode::Circuit => (m.pow(2) + 1u32, m.pow(q + 1) + m.pow(q.saturating_sub(1))),
        Depth4Mode::Formula => {
            let a = m.pow(q.saturating_sub(1));
            (&a + 1u32, &a + m.pow(2 * q.saturating_sub(1)))
        }
    };
    let mut report = PassReport::new(pass, astats(g), cstats(&out));
    report
        .note("q", q)
        .check(BoundCheck::at_most("add_gates", Magnitude::int(add_bound), adds, BoundSource::Published))
        .check(BoundCheck::at_most("mul_gates", Magnitude::int(mul_bound), muls, BoundSource::Published))
        .check(BoundCheck::holds("mul_fanin_exact", mul_fanin_is(&out, q as usize), BoundSource::Published))
        .check(BoundCheck::holds(
            "depth4_shape",
            check_shape(&out, ShapeSpec::Depth4SigmaPiSigmaPi).ok,
            BoundSource::Published,
        ));
    if mode == Depth4Mode::Formula {
        report.check(BoundCheck::holds("fanout_at_most_one", is_formula(&out), BoundSource::Published));
    }
    Ok((out, report))
}

/// Circuit of depth at most `2 * delta` built from `delta` cascaded
/// powering stages, each raising the current matrix to the smallest power
/// `r` with `r^delta >= depth`.
pub fn abp_to_depth_2delta(g: &Abp, delta: usize) -> Result<(Circuit, PassReport), PassError> {
    if delta < 2 {
        return Err(PassError::InvalidDelta(delta));
    }
    let (out, r) = build(g, delta, Depth4Mode::Circuit, true)?;
    let stats = circuit_stats(&out);
    let mut report = PassReport::new("abp_to_depth_2delta", astats(g), cstats(&out));
    report
        .note("delta", delta)
        .note("stage_power", r)
        .check(BoundCheck::at_most("depth", Magnitude::int(2 * delta as u64), stats.depth as u64, BoundSource::Published));
    if g.nodes() > 1 && out.size() > 0 {
        let exponent = (out.size() as f64).ln() / (g.nodes() as f64).ln();
        report.note("log_m_size", format!("{exponent:.4}"));
    }
    Ok((out, report))
}

fn mul_fanin_is(c: &Circuit, q: usize) -> bool {
    c.gates().iter().all(|g| !g.is_mul() || g.children().len() == q)
}

fn is_formula(c: &Circuit) -> bool {
    c.parent_positions().iter().all(|ps| ps.len() <= 1)
}

/// Smallest `r >= 1` with `r^stages >= depth`.
pub(crate) fn stage_power(depth: usize, stages: usize) -> usize {
    let mut r = 1usize;
    while r.checked_pow(stages as u32).is_some_and(|v| v < depth) {
        r += 1;
    }
    r
}

fn build(g: &Abp, stages: usize, mode: Depth4Mode, prune: bool) -> Result<(Circuit, u32), PassError> {
    let mat = abp_to_matrix(g)?;
    if g.is_zero_program() {
        let mut b = CircuitBuilder::new();
        let z = b.constant(0);
        return Ok((b.finish(g.name(), vec![z]), 0));
    }
    let r = stage_power(g.depth(), stages);
    let m = mat.dim();
    let mut supports = vec![(1..=m).map(|i| (1..=m).map(|j| !mat.get(i, j).is_zero()).collect()).collect::<Vec<Vec<bool>>>()];
    for s in 1..stages {
        supports.push(bool_power(&supports[s - 1], r));
    }
    let mut e = Engine {
        mat: &mat,
        m,
        r,
        mode,
        prune,
        supports,
        b: CircuitBuilder::new(),
        leaves: HashMap::new(),
        entries: HashMap::new(),
    };
    let out = e.entry(stages, 1, m);
    Ok((e.b.finish(g.name(), vec![out]), r as u32))
}

fn bool_power(s: &[Vec<bool>], r: usize) -> Vec<Vec<bool>> {
    let m = s.len();
    let mut acc: Vec<Vec<bool>> = (0..m).map(|i| (0..m).map(|j| i == j).collect()).collect();
    for _ in 0..r {
        acc = (0..m)
            .map(|i| (0..m).map(|j| (0..m).any(|k| acc[i][k] && s[k][j])).collect())
            .collect();
    }
    acc
}

struct Engine<'a> {
    mat: &'a LabeledMatrix,
    m: usize,
    r: usize,
    mode: Depth4Mode,
    prune: bool,
    /// `supports[s]`: structurally nonzero entries of the stage-`s` matrix.
    supports: Vec<Vec<Vec<bool>>>,
    b: CircuitBuilder,
    leaves: HashMap<Entry, GateId>,
    entries: HashMap<(usize, usize, usize), GateId>,
}

impl Engine<'_> {
    fn leaf(&mut self, i: usize, j: usize) -> GateId {
        let e = self.mat.get(i, j).clone();
        if self.mode == Depth4Mode::Circuit {
            if let Some(&id) = self.leaves.get(&e) {
                return id;
            }
        }
        let id = match &e {
            Entry::Zero => self.b.constant(0),
            Entry::One => self.b.constant(1),
            Entry::Var(v) => self.b.input(v.clone()),
            Entry::Const(k) => self.b.constant(k.clone()),
        };
        if self.mode == Depth4Mode::Circuit {
            self.leaves.insert(e, id);
        }
        id
    }

    /// Gate for entry `(i, j)` of the stage-`s` matrix (1-based).
    fn entry(&mut self, s: usize, i: usize, j: usize) -> GateId {
        if s == 0 {
            return self.leaf(i, j);
        }
        if self.mode == Depth4Mode::Circuit {
            if let Some(&id) = self.entries.get(&(s, i, j)) {
                return id;
            }
        }
        let walks = self.walks(s - 1, i, j);
        let mut terms = Vec::with_capacity(walks.len());
        for w in &walks {
            let factors: Vec<GateId> = w.windows(2).map(|p| self.entry(s - 1, p[0], p[1])).collect();
            terms.push(if factors.len() == 1 { factors[0] } else { self.b.mul(factors) });
        }
        let id = match terms.len() {
            0 => self.b.constant(0),
            1 => terms[0],
            _ => self.b.add(terms.into_iter().map(|t| (t, BigInt::from(1))).collect()),
        };
        if self.mode == Depth4Mode::Circuit {
            self.entries.insert((s, i, j), id);
        }
        id
    }

    /// Walks `i = k0, k1, .., kr = j` through the stage-`s` matrix, in
    /// lexicographic order. With pruning only walks over nonzero entries.
    fn walks(&self, s: usize, i: usize, j: usize) -> Vec<Vec<usize>> {
        let (m, r) = (self.m, self.r);
        let sup = &self.supports[s];
        // reach[l][k]: node k reaches j in exactly l steps.
        let mut reach = vec![vec![true; m + 1]; r + 1];
        if self.prune {
            reach[0] = (0..=m).map(|k| k == j).collect();
            for l in 1..=r {
                reach[l] = (0..=m).map(|k| k >= 1 && (1..=m).any(|n| sup[k - 1][n - 1] && reach[l - 1][n])).collect();
            }
        }
        let mut out = Vec::new();
        let mut walk = vec![i];
        extend_walks(&mut walk, r, j, self.prune.then_some(sup.as_slice()), &reach, &mut out);
        out
    }
}

fn extend_walks(
    walk: &mut Vec<usize>,
    r: usize,
    j: usize,
    sup: Option<&[Vec<bool>]>,
    reach: &[Vec<bool>],
    out: &mut Vec<Vec<usize>>,
) {
    let left = r + 1 - walk.len();
    let cur = *walk.last().expect("walk starts at i");
    if left == 0 {
        if cur == j {
            out.push(walk.clone());
        }
        return;
    }
    let m = reach[0].len() - 1;
    for n in 1..=m {
        if left == 1 && n != j {
            continue;
        }
        if let Some(sup) = sup {
            if !(sup[cur - 1][n - 1] && reach[left - 1][n]) {
                continue;
            }
        }
        walk.push(n);
        extend_walks(walk, r, j, sup, reach, out);
        walk.pop();
    }
}
