//! `abp <name> nodes <m>` followed by `edge <u> <v> var <x>` or
//! `edge <u> <v> const <c>` lines.

use std::fmt::Write;

use super::{Abp, AbpError, Edge, Label};

pub fn parse_abp(text: &str) -> Result<Abp, AbpError> {
    let mut header: Option<(String, usize)> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let tokens: Vec<&str> = raw.split('#').next().unwrap_or("").split_whitespace().collect();
        let syntax = |message: &str| AbpError::Syntax {
            line,
            message: message.to_string(),
        };
        match tokens.as_slice() {
            [] => {}
            ["abp", name, "nodes", m] => {
                if header.is_some() {
                    return Err(syntax("duplicate header"));
                }
                let m = m.parse().map_err(|_| syntax("node count must be a positive integer"))?;
                header = Some((name.to_string(), m));
            }
            ["edge", u, v, kind, value] => {
                if header.is_none() {
                    return Err(syntax("edge before `abp` header"));
                }
                let from = u.parse().map_err(|_| syntax("bad source node"))?;
                let to = v.parse().map_err(|_| syntax("bad target node"))?;
                let label = match *kind {
                    "var" => Label::Var(value.to_string()),
                    "const" => Label::Const(value.parse().map_err(|_| syntax("bad integer constant"))?),
                    _ => return Err(syntax("edge label must be `var` or `const`")),
                };
                edges.push(Edge { from, to, label });
            }
            _ => return Err(syntax("expected `abp <name> nodes <m>` or `edge <u> <v> var|const <x>`")),
        }
    }
    let (name, nodes) = header.ok_or(AbpError::Syntax {
        line: 1,
        message: "missing `abp` header".into(),
    })?;
    Abp::new(name, nodes, edges)
}

pub fn emit_abp(g: &Abp) -> String {
    let mut out = format!("abp {} nodes {}\n", g.name(), g.nodes());
    for e in g.edges() {
        writeln!(out, "edge {} {} {}", e.from, e.to, e.label).unwrap();
    }
    out
}
