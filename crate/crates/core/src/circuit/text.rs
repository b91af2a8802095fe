//! The `.qp` textual program format.
//!
//! One instruction per line, `#` starts a comment:
//!
//! ```text
//! RY(pi/2) %q0          # rotation on an abstract qubit
//! CNOT %q0 %q1
//! RZ(-%theta) 3         # symbolic angle on physical qubit 3
//! MEASURE %q1 -> 0
//! ```
//!
//! Constant angles may use numeric literals, `pi`, unary minus and division
//! by an integer literal. Printing always uses the canonical form: upper-case
//! gate names, single spaces, constants with 17 significant digits.

use std::collections::HashSet;
use std::fmt::{self, Write as _};

use super::{is_identifier, Circuit, CircuitError, GateKind, Instruction, Param, Qubit};
use crate::numfmt::sig17;

#[derive(Debug, Clone, PartialEq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownGate(String),
    Arity {
        gate: GateKind,
        what: &'static str,
        expected: usize,
        got: usize,
    },
    DuplicateClbit(usize),
    Invalid(CircuitError),
}

/// A parse failure at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: ", self.line, self.column)?;
        match &self.kind {
            ParseErrorKind::Syntax(msg) => write!(f, "syntax error: {msg}"),
            ParseErrorKind::UnknownGate(name) => write!(f, "unknown gate `{name}`"),
            ParseErrorKind::Arity {
                gate,
                what,
                expected,
                got,
            } => write!(f, "{gate} expects {expected} {what}, got {got}"),
            ParseErrorKind::DuplicateClbit(c) => {
                write!(f, "classical bit {c} is written by more than one MEASURE")
            }
            ParseErrorKind::Invalid(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Name(String),
    Int(u64),
    Float(f64),
    Percent,
    LParen,
    RParen,
    Comma,
    Minus,
    Slash,
    Arrow,
}

struct Lexed {
    tok: Tok,
    col: usize,
}

fn lex_line(line: &str, lineno: usize) -> Result<Vec<Lexed>, ParseError> {
    let err = |col: usize, msg: String| ParseError {
        line: lineno,
        column: col,
        kind: ParseErrorKind::Syntax(msg),
    };
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let simple = match c {
            '%' => Some(Tok::Percent),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            '/' => Some(Tok::Slash),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Lexed { tok, col });
            i += 1;
            continue;
        }
        if c == '-' {
            if chars.get(i + 1) == Some(&'>') {
                out.push(Lexed { tok: Tok::Arrow, col });
                i += 2;
            } else {
                out.push(Lexed { tok: Tok::Minus, col });
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let name: String = chars[start..i].iter().collect();
            out.push(Lexed {
                tok: Tok::Name(name),
                col,
            });
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let start = i;
            let mut is_float = false;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                is_float = true;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    is_float = true;
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let tok = if is_float {
                Tok::Float(
                    text.parse()
                        .map_err(|_| err(col, format!("malformed number `{text}`")))?,
                )
            } else {
                Tok::Int(
                    text.parse()
                        .map_err(|_| err(col, format!("malformed integer `{text}`")))?,
                )
            };
            out.push(Lexed { tok, col });
            continue;
        }
        return Err(err(col, format!("unexpected character `{c}`")));
    }
    Ok(out)
}

struct LineParser<'a> {
    toks: &'a [Lexed],
    pos: usize,
    line: usize,
    end_col: usize,
}

impl<'a> LineParser<'a> {
    fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |t| t.col)
    }

    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column: self.col(),
            kind: ParseErrorKind::Syntax(msg.into()),
        }
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.syntax(format!("expected {what}")))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Name(n)) if is_identifier(n) => {
                let n = n.clone();
                self.pos += 1;
                Ok(n)
            }
            _ => Err(self.syntax("expected identifier")),
        }
    }

    fn qubit(&mut self) -> Result<Qubit, ParseError> {
        match self.peek() {
            Some(Tok::Int(i)) => {
                let i = *i as usize;
                self.pos += 1;
                Ok(Qubit::Physical(i))
            }
            Some(Tok::Percent) => {
                self.pos += 1;
                Ok(Qubit::Abstract(self.ident()?))
            }
            _ => Err(self.syntax("expected qubit (integer or %name)")),
        }
    }

    fn expr(&mut self) -> Result<Param, ParseError> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            return Ok(-self.expr()?);
        }
        let col = self.col();
        let mut value = match self.next() {
            Some(Tok::Float(v)) => Param::Const(v),
            Some(Tok::Int(v)) => Param::Const(v as f64),
            Some(Tok::Name(n)) if n == "pi" => Param::Const(std::f64::consts::PI),
            Some(Tok::Percent) => Param::symbol(self.ident()?),
            _ => {
                self.pos -= 1;
                return Err(self.syntax("expected angle expression"));
            }
        };
        while self.peek() == Some(&Tok::Slash) {
            self.pos += 1;
            let divisor = match self.next() {
                Some(Tok::Int(d)) if d > 0 => d as f64,
                _ => {
                    self.pos -= 1;
                    return Err(self.syntax("expected positive integer divisor"));
                }
            };
            value = match value {
                Param::Const(v) => Param::Const(v / divisor),
                Param::Symbol { .. } => {
                    return Err(ParseError {
                        line: self.line,
                        column: col,
                        kind: ParseErrorKind::Syntax("symbols cannot be divided".into()),
                    })
                }
            };
        }
        Ok(value)
    }

    fn instruction(&mut self) -> Result<Instruction, ParseError> {
        let name_col = self.col();
        let name = match self.next() {
            Some(Tok::Name(n)) => n,
            _ => {
                self.pos -= 1;
                return Err(self.syntax("expected gate name"));
            }
        };
        let kind = GateKind::from_name(&name).ok_or(ParseError {
            line: self.line,
            column: name_col,
            kind: ParseErrorKind::UnknownGate(name.clone()),
        })?;
        let line = self.line;
        let arity = move |what, expected, got| ParseError {
            line,
            column: name_col,
            kind: ParseErrorKind::Arity {
                gate: kind,
                what,
                expected,
                got,
            },
        };

        if kind == GateKind::MEASURE {
            let q = self.qubit()?;
            self.expect(Tok::Arrow, "`->`")?;
            let c = match self.next() {
                Some(Tok::Int(c)) => c as usize,
                _ => {
                    self.pos -= 1;
                    return Err(self.syntax("expected classical bit index"));
                }
            };
            self.finish()?;
            return Ok(Instruction::measure(q, c));
        }

        let mut params = Vec::new();
        if self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            params.push(self.expr()?);
            while self.peek() == Some(&Tok::Comma) {
                self.pos += 1;
                params.push(self.expr()?);
            }
            self.expect(Tok::RParen, "`)`")?;
        }
        let mut qubits = Vec::new();
        while self.pos < self.toks.len() {
            qubits.push(self.qubit()?);
        }
        if params.len() != kind.num_params() {
            return Err(arity("parameters", kind.num_params(), params.len()));
        }
        if qubits.len() != kind.num_qubits() {
            return Err(arity("qubits", kind.num_qubits(), qubits.len()));
        }
        Ok(Instruction::gate(kind, params, qubits))
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.pos < self.toks.len() {
            Err(self.syntax("unexpected trailing input"))
        } else {
            Ok(())
        }
    }
}

/// Parse `.qp` program text into a validated circuit.
pub fn parse_program(text: &str) -> Result<Circuit, ParseError> {
    let mut instructions = Vec::new();
    let mut lines = Vec::new();
    let mut clbits = HashSet::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let toks = lex_line(line, lineno)?;
        if toks.is_empty() {
            continue;
        }
        let mut p = LineParser {
            toks: &toks,
            pos: 0,
            line: lineno,
            end_col: line.chars().count() + 1,
        };
        let instr = p.instruction()?;
        if let Some(c) = instr.clbit {
            if !clbits.insert(c) {
                return Err(ParseError {
                    line: lineno,
                    column: 1,
                    kind: ParseErrorKind::DuplicateClbit(c),
                });
            }
        }
        instructions.push(instr);
        lines.push(lineno);
    }
    Circuit::new(instructions).map_err(|e| {
        let line = match &e {
            CircuitError::GateAfterMeasure { index, .. } => lines[*index],
            _ => lines.first().copied().unwrap_or(1),
        };
        ParseError {
            line,
            column: 1,
            kind: ParseErrorKind::Invalid(e),
        }
    })
}

fn write_param(out: &mut String, p: &Param) {
    match p {
        Param::Const(v) => out.push_str(&sig17(*v)),
        Param::Symbol { name, negated } => {
            if *negated {
                out.push('-');
            }
            out.push('%');
            out.push_str(name);
        }
    }
}

/// Canonical text of a circuit, one newline-terminated line per instruction.
pub fn print_program(circuit: &Circuit) -> String {
    let mut out = String::new();
    for instr in circuit.instructions() {
        out.push_str(instr.kind.name());
        if !instr.params.is_empty() {
            out.push('(');
            for (k, p) in instr.params.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                write_param(&mut out, p);
            }
            out.push(')');
        }
        for q in &instr.qubits {
            let _ = write!(out, " {q}");
        }
        if let Some(c) = instr.clbit {
            let _ = write!(out, " -> {c}");
        }
        out.push('\n');
    }
    out
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_program(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn parses_abstract_program() {
        let c = parse_program("RY(1.5707963267948966) %q0\nCNOT %q0 %q1").unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.instructions()[0].params[0], Param::Const(FRAC_PI_2));
        assert_eq!(
            c.instructions()[1].qubits,
            vec![Qubit::Abstract("q0".into()), Qubit::Abstract("q1".into())]
        );
    }

    #[test]
    fn evaluates_constant_expressions() {
        let c = parse_program("RZ(pi/2) 3").unwrap();
        let i = &c.instructions()[0];
        assert_eq!(i.kind, GateKind::RZ);
        assert_eq!(i.params[0], Param::Const(std::f64::consts::FRAC_PI_2));
        assert_eq!(i.qubits[0], Qubit::Physical(3));
        let c = parse_program("RX(-pi/4) 0\nRX(2) 0\nRX(-%t) 0\nRX(1e-3) 0").unwrap();
        assert_eq!(c.instructions()[0].params[0], Param::Const(-std::f64::consts::FRAC_PI_4));
        assert_eq!(c.instructions()[1].params[0], Param::Const(2.0));
        assert_eq!(c.instructions()[2].params[0], -Param::symbol("t"));
        assert_eq!(c.instructions()[3].params[0], Param::Const(1e-3));
    }

    #[test]
    fn gate_after_measure_is_rejected() {
        let err = parse_program("MEASURE 0 -> 0\nX 0").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(matches!(
            err.kind,
            ParseErrorKind::Invalid(CircuitError::GateAfterMeasure { .. })
        ));
    }

    #[test]
    fn reports_positions() {
        let err = parse_program("H 0\nFOO 1").unwrap_err();
        assert_eq!((err.line, err.column), (2, 1));
        assert_eq!(err.kind, ParseErrorKind::UnknownGate("FOO".into()));

        let err = parse_program("RX(0.1 0").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Syntax(_)));
        assert_eq!((err.line, err.column), (1, 8));

        let err = parse_program("CNOT 0").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Arity { what: "qubits", expected: 2, got: 1, .. }));

        let err = parse_program("RX 0").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Arity { what: "parameters", .. }));

        let err = parse_program("MEASURE 0 -> 1\nMEASURE 1 -> 1").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::DuplicateClbit(1));
        assert_eq!(err.line, 2);

        let err = parse_program("RX(%t/2) 0").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Syntax(_)));

        let err = parse_program("X 0 $").unwrap_err();
        assert_eq!(err.column, 5);
    }

    #[test]
    fn comments_and_blank_lines() {
        let c = parse_program("# header\n\n  H 0   # trailing\n").unwrap();
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn prints_canonical_form() {
        assert_eq!(print_program(&Circuit::empty()), "");
        let c = Circuit::new(vec![
            Instruction::rotation(GateKind::RY, Param::symbol("theta"), "q1"),
            Instruction::rotation(GateKind::RZ, -Param::symbol("theta"), "q1"),
            Instruction::two(GateKind::CNOT, "q0", "q1"),
            Instruction::measure("q1", 0),
        ])
        .unwrap();
        assert_eq!(
            print_program(&c),
            "RY(%theta) %q1\nRZ(-%theta) %q1\nCNOT %q0 %q1\nMEASURE %q1 -> 0\n"
        );
        let c = parse_program("rz_like_comment # x\nRZ(pi/2) 3");
        assert!(c.is_err());
        let c = parse_program("RZ(pi/2) 3").unwrap();
        assert_eq!(print_program(&c), "RZ(1.5707963267948966) 3\n");
    }

    #[test]
    fn print_is_idempotent_on_canonical_text() {
        let src = "RY( pi / 3 ) %a\n  CZ %a %b\nMEASURE %b->0";
        let once = print_program(&parse_program(src).unwrap());
        let twice = print_program(&parse_program(&once).unwrap());
        assert_eq!(once, twice);
    }
}
