//! Arithmetic branching programs.
//!
//! Nodes are numbered `1..=m` in a topological order fixed at construction:
//! every edge goes from a smaller to a larger node. The source is node 1 and
//! the sink is node `m`.

mod matrix;
mod text;

use std::fmt;

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

pub use matrix::{abp_to_matrix, matrix_power, Entry, LabeledMatrix};
pub use text::{emit_abp, parse_abp};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Label {
    Var(String),
    Const(BigInt),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Var(v) => write!(f, "var {v}"),
            Label::Const(c) => write!(f, "const {c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub label: Label,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbpError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("a branching program needs at least one node")]
    NoNodes,
    #[error("edge {from}->{to} leaves the node range 1..={nodes}")]
    NodeOutOfRange { from: usize, to: usize, nodes: usize },
    #[error("edge {from}->{to} does not follow the topological numbering")]
    BackwardEdge { from: usize, to: usize },
    #[error("no path from source to sink")]
    EmptyProgram,
    #[error("branching program is not trimmed: node {0} lies on no source-sink path")]
    NotTrimmed(usize),
    #[error("parallel edges {from}->{to} cannot share one matrix entry")]
    ParallelEdges { from: usize, to: usize },
}

/// An edge-labelled DAG whose polynomial is the sum over source-sink paths
/// of the product of edge labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Abp {
    name: String,
    nodes: usize,
    edges: Vec<Edge>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AbpStats {
    pub size: usize,
    pub depth: usize,
    pub edges: usize,
    pub trimmed: bool,
}

impl Abp {
    pub fn new(name: impl Into<String>, nodes: usize, edges: Vec<Edge>) -> Result<Self, AbpError> {
        if nodes == 0 {
            return Err(AbpError::NoNodes);
        }
        for e in &edges {
            if e.from == 0 || e.to == 0 || e.from > nodes || e.to > nodes {
                return Err(AbpError::NodeOutOfRange {
                    from: e.from,
                    to: e.to,
                    nodes,
                });
            }
            if e.from >= e.to {
                return Err(AbpError::BackwardEdge { from: e.from, to: e.to });
            }
        }
        Ok(Abp {
            name: name.into(),
            nodes,
            edges,
        })
    }

    /// The program with two nodes and no edges, computing 0.
    pub fn zero(name: impl Into<String>) -> Self {
        Abp {
            name: name.into(),
            nodes: 2,
            edges: Vec::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn sink(&self) -> usize {
        self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_zero_program(&self) -> bool {
        self.nodes == 2 && self.edges.is_empty()
    }

    /// Sorted list of variable names appearing on edges.
    pub fn variables(&self) -> Vec<String> {
        let mut vs: Vec<String> = self
            .edges
            .iter()
            .filter_map(|e| match &e.label {
                Label::Var(v) => Some(v.clone()),
                Label::Const(_) => None,
            })
            .collect();
        vs.sort();
        vs.dedup();
        vs
    }

    /// Incoming edge indices per node (index 0 unused).
    pub fn incoming(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.nodes + 1];
        for (i, e) in self.edges.iter().enumerate() {
            inc[e.to].push(i);
        }
        inc
    }

    /// Longest path length from the source to every node, `None` where
    /// unreachable.
    pub fn longest_from_source(&self) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.nodes + 1];
        dist[1] = Some(0);
        let mut order: Vec<&Edge> = self.edges.iter().collect();
        order.sort_by_key(|e| e.from);
        for e in order {
            if let Some(d) = dist[e.from] {
                dist[e.to] = Some(dist[e.to].map_or(d + 1, |x: usize| x.max(d + 1)));
            }
        }
        dist
    }

    /// Length of the longest source-sink path, 0 when there is none.
    pub fn depth(&self) -> usize {
        self.longest_from_source()[self.nodes].unwrap_or(0)
    }

    /// Nodes lying on at least one source-sink path (index 0 unused).
    pub fn useful_nodes(&self) -> Vec<bool> {
        let mut fwd = vec![false; self.nodes + 1];
        let mut bwd = vec![false; self.nodes + 1];
        fwd[1] = true;
        bwd[self.nodes] = true;
        let mut sorted: Vec<&Edge> = self.edges.iter().collect();
        sorted.sort_by_key(|e| e.from);
        for e in &sorted {
            if fwd[e.from] {
                fwd[e.to] = true;
            }
        }
        for e in sorted.iter().rev() {
            if bwd[e.to] {
                bwd[e.from] = true;
            }
        }
        let mut both: Vec<bool> = fwd.iter().zip(&bwd).map(|(a, b)| *a && *b).collect();
        both[0] = false;
        // The source and sink only count when they are connected.
        if !both[1] {
            both.iter_mut().for_each(|b| *b = false);
        }
        both
    }

    pub fn is_trimmed(&self) -> bool {
        self.first_untrimmed().is_none()
    }

    fn first_untrimmed(&self) -> Option<usize> {
        if self.is_zero_program() {
            return None;
        }
        let useful = self.useful_nodes();
        (1..=self.nodes).find(|&v| !useful[v])
    }

    pub(crate) fn require_trimmed(&self) -> Result<(), AbpError> {
        match self.first_untrimmed() {
            Some(v) => Err(AbpError::NotTrimmed(v)),
            None => Ok(()),
        }
    }
}

pub fn abp_stats(g: &Abp) -> AbpStats {
    AbpStats {
        size: g.nodes,
        depth: g.depth(),
        edges: g.edges.len(),
        trimmed: g.is_trimmed(),
    }
}

/// Removes every node that lies on no source-sink path, keeping the relative
/// order of the remaining nodes.
pub fn trim(g: &Abp) -> Result<Abp, AbpError> {
    let useful = g.useful_nodes();
    if g.nodes == 1 || !useful[1] {
        return Err(AbpError::EmptyProgram);
    }
    let mut renum = vec![0; g.nodes + 1];
    let mut next = 0;
    for v in 1..=g.nodes {
        if useful[v] {
            next += 1;
            renum[v] = next;
        }
    }
    let edges = g
        .edges
        .iter()
        .filter(|e| useful[e.from] && useful[e.to])
        .map(|e| Edge {
            from: renum[e.from],
            to: renum[e.to],
            label: e.label.clone(),
        })
        .collect();
    Ok(Abp {
        name: g.name.clone(),
        nodes: next,
        edges,
    })
}

/// Like [`trim`], but returns the zero program when no source-sink path exists.
pub fn trim_or_zero(g: &Abp) -> Abp {
    trim(g).unwrap_or_else(|_| Abp::zero(g.name.clone()))
}
