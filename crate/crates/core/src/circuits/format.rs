//! Plain-text circuit files.
//!
//! ```text
//! # comment
//! QUBITS 5
//! ROLE ancilla 0        # or: ROLE bell
//! REGA 1 2
//! REGB 3 4
//! H 0
//! CNOT 0 1
//! RZ 2 0.5
//! ```
//!
//! One gate per line. Gates are layered greedily unless the file contains
//! `LAYER` lines, in which case each gate belongs to the most recent
//! `LAYER` block and gates within a block must act on disjoint qubits.
//! `QUBITS` may be omitted, in which case the width is one more than the
//! largest qubit index used.

use std::fmt::Write as _;
use std::path::Path;

use super::{Circuit, Gate, Layout, SingleGate, TestKind};
use crate::error::{Error, Result};

struct Tok<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Tok<'_>> {
    let body = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in body.char_indices().chain(std::iter::once((body.len(), ' '))) {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(Tok { text: &body[s..i], column: body[..s].chars().count() + 1 });
                start = None;
            }
            _ => {}
        }
    }
    out
}

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

fn qubit(line: usize, t: &Tok) -> Result<usize> {
    t.text.parse().map_err(|_| err(line, t.column, format!("expected a qubit index, found `{}`", t.text)))
}

enum Item {
    Gate(Gate),
    Layer,
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut width = None;
    let mut role: Option<(TestKind, Option<usize>)> = None;
    let (mut reg_a, mut reg_b): (Option<Vec<usize>>, Option<Vec<usize>>) = (None, None);
    let mut items: Vec<(usize, Item)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let toks = tokens(raw);
        let Some(head) = toks.first() else { continue };
        let args = &toks[1..];
        let arity = |k: usize| -> Result<()> {
            if args.len() == k {
                Ok(())
            } else {
                let col = args.get(k).map_or(head.column, |t| t.column);
                Err(err(ln, col, format!("`{}` takes {k} argument(s), found {}", head.text, args.len())))
            }
        };
        let name = head.text.to_ascii_uppercase();
        match name.as_str() {
            "QUBITS" => {
                arity(1)?;
                width = Some(qubit(ln, &args[0])?);
            }
            "ROLE" => match args.first().map(|t| t.text.to_ascii_lowercase()).as_deref() {
                Some("bell") => {
                    arity(1)?;
                    role = Some((TestKind::Bell, None));
                }
                Some("ancilla") => {
                    arity(2)?;
                    role = Some((TestKind::Ancilla, Some(qubit(ln, &args[1])?)));
                }
                _ => return Err(err(ln, args.first().map_or(head.column, |t| t.column), "expected `bell` or `ancilla <q>`")),
            },
            "REGA" | "REGB" => {
                let qs = args.iter().map(|t| qubit(ln, t)).collect::<Result<Vec<_>>>()?;
                if name == "REGA" {
                    reg_a = Some(qs);
                } else {
                    reg_b = Some(qs);
                }
            }
            "LAYER" => {
                arity(0)?;
                items.push((ln, Item::Layer));
            }
            "CNOT" | "CX" => {
                arity(2)?;
                items.push((ln, Item::Gate(Gate::cnot(qubit(ln, &args[0])?, qubit(ln, &args[1])?))));
            }
            "RX" | "RY" | "RZ" => {
                arity(2)?;
                let q = qubit(ln, &args[0])?;
                let a: f64 = args[1].text.parse().map_err(|_| err(ln, args[1].column, format!("expected an angle, found `{}`", args[1].text)))?;
                let g = match name.as_str() {
                    "RX" => SingleGate::Rx(a),
                    "RY" => SingleGate::Ry(a),
                    _ => SingleGate::Rz(a),
                };
                items.push((ln, Item::Gate(Gate::single(g, q))));
            }
            other => {
                let g = match other {
                    "H" => SingleGate::H,
                    "X" => SingleGate::X,
                    "Y" => SingleGate::Y,
                    "Z" => SingleGate::Z,
                    "S" => SingleGate::S,
                    "SDG" => SingleGate::Sdg,
                    "T" => SingleGate::T,
                    "TDG" => SingleGate::Tdg,
                    _ => return Err(err(ln, head.column, format!("unknown gate or directive `{}`", head.text))),
                };
                arity(1)?;
                items.push((ln, Item::Gate(Gate::single(g, qubit(ln, &args[0])?))));
            }
        }
    }
    let max_q = items
        .iter()
        .filter_map(|(_, it)| match it {
            Item::Gate(g) => g.qubits().into_iter().max(),
            Item::Layer => None,
        })
        .max();
    let width = width.unwrap_or(max_q.map_or(0, |q| q + 1));
    let mut circ = Circuit::new(width);
    let explicit = items.iter().any(|(_, it)| matches!(it, Item::Layer));
    let locate = |ln: usize, e: Error| match e {
        Error::InvalidParameter(m) => err(ln, 1, m),
        other => other,
    };
    if explicit {
        let mut layer: Option<(usize, Vec<Gate>)> = None;
        for (ln, it) in items {
            match it {
                Item::Layer => {
                    if let Some((_, gates)) = layer.take() {
                        circ.push_layer(gates)?;
                    }
                    layer = Some((ln, Vec::new()));
                }
                Item::Gate(g) => match layer.as_mut() {
                    Some((_, gates)) => gates.push(g),
                    None => return Err(err(ln, 1, "gate before the first LAYER line")),
                },
            }
        }
        if let Some((ln, gates)) = layer {
            circ.push_layer(gates).map_err(|e| locate(ln, e))?;
        }
    } else {
        for (ln, it) in items {
            if let Item::Gate(g) = it {
                circ.push(g).map_err(|e| locate(ln, e))?;
            }
        }
    }
    if let Some((kind, ancilla)) = role {
        let (Some(reg_a), Some(reg_b)) = (reg_a, reg_b) else {
            return Err(err(0, 0, "ROLE requires REGA and REGB"));
        };
        circ.set_test(kind, Layout { reg_a, reg_b, ancilla })?;
    }
    Ok(circ)
}

/// Text form with explicit `LAYER` blocks, so that parsing reproduces the
/// circuit exactly.
pub fn write_circuit(circ: &Circuit) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "QUBITS {}", circ.width());
    if let Some((kind, layout)) = circ.test() {
        match kind {
            TestKind::Bell => s.push_str("ROLE bell\n"),
            TestKind::Ancilla => {
                let _ = writeln!(s, "ROLE ancilla {}", layout.ancilla.expect("ancilla test has an ancilla"));
            }
        }
        let join = |v: &[usize]| v.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(" ");
        let _ = writeln!(s, "REGA {}", join(&layout.reg_a));
        let _ = writeln!(s, "REGB {}", join(&layout.reg_b));
    }
    for layer in circ.layers() {
        s.push_str("LAYER\n");
        for g in layer {
            match g {
                Gate::Cnot { control, target } => {
                    let _ = writeln!(s, "CNOT {control} {target}");
                }
                Gate::Single { gate, qubit } => match gate.angle() {
                    Some(a) => {
                        let _ = writeln!(s, "{} {qubit} {a:?}", gate.name());
                    }
                    None => {
                        let _ = writeln!(s, "{} {qubit}", gate.name());
                    }
                },
            }
        }
    }
    s
}

pub fn load_circuit(path: impl AsRef<Path>) -> Result<Circuit> {
    parse_circuit(&std::fs::read_to_string(path)?)
}

pub fn save_circuit(circ: &Circuit, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, write_circuit(circ))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_layer_file() {
        let c = parse_circuit("# demo\nH 0\nCNOT 0 1\n").unwrap();
        assert_eq!(c.layers().len(), 2);
        assert_eq!(c.width(), 2);
    }

    #[test]
    fn overlapping_layer_is_rejected() {
        let e = parse_circuit("QUBITS 2\nLAYER\nH 0\nX 0\n").unwrap_err();
        assert!(matches!(e, Error::OverlappingGates { qubit: 0, .. }));
    }

    #[test]
    fn parse_errors_carry_position() {
        match parse_circuit("H 0\nCNOT 0 x\n").unwrap_err() {
            Error::Parse { line, column, .. } => assert_eq!((line, column), (2, 8)),
            e => panic!("unexpected {e:?}"),
        }
        match parse_circuit("FOO 1").unwrap_err() {
            Error::Parse { line, column, .. } => assert_eq!((line, column), (1, 1)),
            e => panic!("unexpected {e:?}"),
        }
        assert!(parse_circuit("QUBITS 1\nH 3\n").is_err());
    }

    #[test]
    fn round_trip() {
        let c = super::super::build_standard_swap_test(1, super::super::LayoutKind::Stacked).unwrap();
        let mut d = c.clone();
        d.push(Gate::single(SingleGate::Rz(0.1234567890123), 2)).unwrap();
        for circ in [c, d] {
            let back = parse_circuit(&write_circuit(&circ)).unwrap();
            assert_eq!(back, circ);
        }
    }
}
