//! OpenQASM-2-style listing of circuits, and a reader for the same grammar.

use std::fmt::Write as _;

use super::ir::{Circuit, Gate, Method};
use crate::error::{FableError, Result};
use crate::linalg::io::format_real;

pub fn emit_text(c: &Circuit) -> String {
    let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    if let Some(m) = c.meta.method {
        let _ = writeln!(out, "// method: {m}");
    }
    let _ = writeln!(out, "// alpha: {}", format_real(c.meta.alpha));
    let _ = writeln!(out, "// delta: {}", format_real(c.meta.delta));
    let _ = writeln!(out, "qreg q[{}];", c.width());
    for g in c.gates() {
        let _ = match *g {
            Gate::Ry { target, angle } => writeln!(out, "ry({}) q[{target}];", format_real(angle)),
            Gate::Cnot { control, target } => writeln!(out, "cx q[{control}],q[{target}];"),
            Gate::H { target } => writeln!(out, "h q[{target}];"),
            Gate::Swap { a, b } => writeln!(out, "swap q[{a}],q[{b}];"),
        };
    }
    out
}

fn qubit(tok: &str, line: usize) -> Result<usize> {
    tok.trim()
        .strip_prefix("q[")
        .and_then(|t| t.strip_suffix(']'))
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| FableError::Parse {
            line,
            message: format!("bad qubit reference {tok:?}"),
        })
}

fn two_qubits(args: &str, line: usize) -> Result<(usize, usize)> {
    let (a, b) = args.split_once(',').ok_or_else(|| FableError::Parse {
        line,
        message: format!("expected two qubits in {args:?}"),
    })?;
    Ok((qubit(a, line)?, qubit(b, line)?))
}

/// Reads text produced by [`emit_text`]. Metadata comments are restored
/// when present.
pub fn parse_text(text: &str) -> Result<Circuit> {
    let mut circuit: Option<Circuit> = None;
    let mut meta = super::ir::CircuitMeta::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with("OPENQASM") || l.starts_with("include") {
            continue;
        }
        if let Some(comment) = l.strip_prefix("//") {
            if let Some((key, value)) = comment.split_once(':') {
                let value = value.trim();
                let bad = |e: String| FableError::Parse { line, message: e };
                match key.trim() {
                    "method" => meta.method = Some(value.parse::<Method>().map_err(|e| bad(e.to_string()))?),
                    "alpha" => meta.alpha = value.parse().map_err(|e| bad(format!("alpha: {e}")))?,
                    "delta" => meta.delta = value.parse().map_err(|e| bad(format!("delta: {e}")))?,
                    _ => {}
                }
            }
            continue;
        }
        let stmt = l.strip_suffix(';').ok_or_else(|| FableError::Parse {
            line,
            message: "missing ';'".into(),
        })?;
        if let Some(rest) = stmt.strip_prefix("qreg") {
            if circuit.is_some() {
                return Err(FableError::Parse {
                    line,
                    message: "only one register is supported".into(),
                });
            }
            circuit = Some(Circuit::new(qubit(rest, line)?));
            continue;
        }
        let c = circuit.as_mut().ok_or_else(|| FableError::Parse {
            line,
            message: "gate before qreg declaration".into(),
        })?;
        let gate = if let Some(rest) = stmt.strip_prefix("ry(") {
            let (angle, target) = rest.split_once(')').ok_or_else(|| FableError::Parse {
                line,
                message: "unterminated ry angle".into(),
            })?;
            let angle = angle.trim().parse::<f64>().map_err(|e| FableError::Parse {
                line,
                message: format!("angle: {e}"),
            })?;
            Gate::Ry {
                target: qubit(target, line)?,
                angle,
            }
        } else if let Some(rest) = stmt.strip_prefix("cx ") {
            let (control, target) = two_qubits(rest, line)?;
            Gate::Cnot { control, target }
        } else if let Some(rest) = stmt.strip_prefix("h ") {
            Gate::H {
                target: qubit(rest, line)?,
            }
        } else if let Some(rest) = stmt.strip_prefix("swap ") {
            let (a, b) = two_qubits(rest, line)?;
            Gate::Swap { a, b }
        } else {
            return Err(FableError::Parse {
                line,
                message: format!("unsupported statement {stmt:?}"),
            });
        };
        c.push(gate).map_err(|e| FableError::Parse {
            line,
            message: e.to_string(),
        })?;
    }
    let mut c = circuit.ok_or(FableError::Parse {
        line: text.lines().count().max(1),
        message: "no qreg declaration".into(),
    })?;
    c.meta = meta;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn single_rotation_line() {
        let c = Circuit::from_gates(1, vec![Gate::Ry { target: 0, angle: FRAC_PI_2 }]).unwrap();
        let text = emit_text(&c);
        assert!(text.lines().any(|l| l == "ry(1.5707963267948966) q[0];"));
    }

    #[test]
    fn empty_circuit_is_header_only() {
        let text = emit_text(&Circuit::new(3));
        assert_eq!(
            text,
            "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n// alpha: 1.0\n// delta: 0.0\nqreg q[3];\n"
        );
    }

    #[test]
    fn round_trip_preserves_gates_and_meta() {
        let mut c = Circuit::from_gates(
            5,
            vec![
                Gate::H { target: 1 },
                Gate::Ry { target: 0, angle: -1.0e-20 },
                Gate::Cnot { control: 4, target: 0 },
                Gate::Swap { a: 1, b: 3 },
            ],
        )
        .unwrap();
        c.meta.method = Some(Method::SFable);
        c.meta.alpha = 0.123456789;
        c.meta.delta = 1e-3;
        assert_eq!(parse_text(&emit_text(&c)).unwrap(), c);
    }

    #[test]
    fn parse_errors() {
        for bad in [
            "ry(0.1) q[0];",
            "qreg q[2];\nry(0.1) q[2];",
            "qreg q[2];\nrz(0.1) q[0];",
            "qreg q[2];\ncx q[0] q[1];",
            "qreg q[2];\nh q[0]",
        ] {
            assert!(parse_text(bad).is_err(), "{bad:?} accepted");
        }
    }
}
