//! Line-oriented circuit text format.
//!
//! ```text
//! circuit diff
//! gate 1 input x
//! gate 2 input y
//! gate 3 add 1 2:-2
//! output 3
//! ```
//!
//! `#` starts a comment. The `circuit` header is optional on input and always
//! written on output. Omitted addition weights default to 1.

use std::fmt::Write;

use num_bigint::BigInt;
use num_traits::One;

use super::{Circuit, CircuitError, Gate, GateId, GateKind};

const DEFAULT_NAME: &str = "circuit";

pub fn parse_circuit(text: &str) -> Result<Circuit, CircuitError> {
    let mut name: Option<String> = None;
    let mut gates = Vec::new();
    let mut outputs = Vec::new();
    let mut gate_lines = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let Some(&head) = tokens.first() else { continue };
        let syntax = |message: String| CircuitError::Syntax { line, message };
        match head {
            "circuit" => {
                if name.is_some() || !gates.is_empty() || !outputs.is_empty() {
                    return Err(syntax("`circuit` header must come first".into()));
                }
                if tokens.len() != 2 {
                    return Err(syntax("expected `circuit <name>`".into()));
                }
                name = Some(tokens[1].to_string());
            }
            "gate" => {
                if !outputs.is_empty() {
                    return Err(syntax("gate after output declarations".into()));
                }
                gates.push(parse_gate(&tokens, line)?);
                gate_lines.push(line);
            }
            "output" => {
                if tokens.len() != 2 {
                    return Err(syntax("expected `output <id>`".into()));
                }
                outputs.push(parse_id(tokens[1], line)?);
            }
            other => return Err(syntax(format!("unknown directive `{other}`"))),
        }
    }

    // Map gate-position line numbers in validation errors back to source lines.
    Circuit::new(name.unwrap_or_else(|| DEFAULT_NAME.to_string()), gates, outputs).map_err(|e| {
        let fix = |l: usize| gate_lines.get(l - 1).copied().unwrap_or(l);
        match e {
            CircuitError::UseBeforeDefinition { line, gate, child } => {
                CircuitError::UseBeforeDefinition { line: fix(line), gate, child }
            }
            CircuitError::DuplicateId { line, id } => CircuitError::DuplicateId { line: fix(line), id },
            CircuitError::ZeroId { line } => CircuitError::ZeroId { line: fix(line) },
            CircuitError::MulArity { line, gate, arity } => {
                CircuitError::MulArity { line: fix(line), gate, arity }
            }
            CircuitError::EmptyAdd { line, gate } => CircuitError::EmptyAdd { line: fix(line), gate },
            other => other,
        }
    })
}

fn parse_id(tok: &str, line: usize) -> Result<GateId, CircuitError> {
    tok.parse::<u32>().map(GateId).map_err(|_| CircuitError::Syntax {
        line,
        message: format!("invalid gate id `{tok}`"),
    })
}

fn parse_int(tok: &str, line: usize) -> Result<BigInt, CircuitError> {
    tok.parse::<BigInt>().map_err(|_| CircuitError::Syntax {
        line,
        message: format!("invalid integer `{tok}`"),
    })
}

fn parse_gate(tokens: &[&str], line: usize) -> Result<Gate, CircuitError> {
    let syntax = |message: &str| CircuitError::Syntax {
        line,
        message: message.to_string(),
    };
    if tokens.len() < 3 {
        return Err(syntax("expected `gate <id> <kind> ...`"));
    }
    let id = parse_id(tokens[1], line)?;
    let args = &tokens[3..];
    let kind = match tokens[2] {
        "input" => match args {
            [v] => GateKind::Input(v.to_string()),
            _ => return Err(syntax("expected `input <varname>`")),
        },
        "const" => match args {
            [c] => GateKind::Const(parse_int(c, line)?),
            _ => return Err(syntax("expected `const <integer>`")),
        },
        "add" => {
            let terms = args
                .iter()
                .map(|a| match a.split_once(':') {
                    Some((c, w)) => Ok((parse_id(c, line)?, parse_int(w, line)?)),
                    None => Ok((parse_id(a, line)?, BigInt::one())),
                })
                .collect::<Result<Vec<_>, _>>()?;
            GateKind::Add(terms)
        }
        "sub" => match args {
            [l, r] => GateKind::Sub(parse_id(l, line)?, parse_id(r, line)?),
            _ => return Err(syntax("expected `sub <child> <child>`")),
        },
        "mul" => GateKind::Mul(args.iter().map(|a| parse_id(a, line)).collect::<Result<_, _>>()?),
        other => return Err(syntax(&format!("unknown gate kind `{other}`"))),
    };
    Ok(Gate { id, kind })
}

/// Canonical serialization: gates in stored order, children in stored order.
pub fn emit_circuit(c: &Circuit) -> String {
    let mut out = String::new();
    writeln!(out, "circuit {}", c.name()).unwrap();
    for gate in c.gates() {
        write!(out, "gate {} ", gate.id).unwrap();
        match &gate.kind {
            GateKind::Input(v) => write!(out, "input {v}"),
            GateKind::Const(k) => write!(out, "const {k}"),
            GateKind::Add(terms) => {
                out.push_str("add");
                for (child, w) in terms {
                    if w.is_one() {
                        write!(out, " {child}").unwrap();
                    } else {
                        write!(out, " {child}:{w}").unwrap();
                    }
                }
                Ok(())
            }
            GateKind::Sub(l, r) => write!(out, "sub {l} {r}"),
            GateKind::Mul(cs) => {
                out.push_str("mul");
                for child in cs {
                    write!(out, " {child}").unwrap();
                }
                Ok(())
            }
        }
        .unwrap();
        out.push('\n');
    }
    for o in c.outputs() {
        writeln!(out, "output {o}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_headerless_subtraction() {
        let c = parse_circuit("gate 1 input x\ngate 2 input y\ngate 3 sub 1 2\noutput 3").unwrap();
        assert_eq!(c.size(), 3);
        assert_eq!(c.name(), DEFAULT_NAME);
        assert_eq!(c.gate(GateId(3)).kind, GateKind::Sub(GateId(1), GateId(2)));
    }

    #[test]
    fn self_reference_is_use_before_definition() {
        let err = parse_circuit("gate 1 mul 1 1").unwrap_err();
        assert!(matches!(err, CircuitError::UseBeforeDefinition { line: 1, .. }), "{err:?}");
    }

    #[test]
    fn error_lines_point_at_source() {
        let err = parse_circuit("circuit c\n# comment\ngate 1 input x\n\ngate 2 mul 1\noutput 2").unwrap_err();
        assert_eq!(
            err,
            CircuitError::MulArity {
                line: 5,
                gate: GateId(2),
                arity: 1
            }
        );
        let err = parse_circuit("gate 1 input x\ngate 1 input y\noutput 1").unwrap_err();
        assert!(matches!(err, CircuitError::DuplicateId { line: 2, .. }));
        let err = parse_circuit("gate 1 frob x").unwrap_err();
        assert!(matches!(err, CircuitError::Syntax { line: 1, .. }));
    }

    #[test]
    fn emits_weighted_sum_canonically() {
        let text = "circuit s\ngate 1 input x\ngate 2 input y\ngate 3 add 1 2\noutput 3\n";
        let c = parse_circuit(text).unwrap();
        let emitted = emit_circuit(&c);
        assert_eq!(emitted, text);
        assert_eq!(emitted.lines().count(), 5);
        assert_eq!(emit_circuit(&c), emitted);

        let c = parse_circuit("gate 1 input x\ngate 2 input y\ngate 3 add 1:1 2:-2 # x - 2y\noutput 3").unwrap();
        assert!(emit_circuit(&c).contains("gate 3 add 1 2:-2\n"));
    }

    #[test]
    fn comments_and_whitespace_are_ignored() {
        let a = parse_circuit("circuit k\n  gate 1   const -7 # seven\n\noutput 1\n").unwrap();
        let b = parse_circuit(&emit_circuit(&a)).unwrap();
        assert_eq!(a, b);
    }
}
