//! Gate-list boolean circuits and their canonical text form.
//!
//! ```text
//! INPUTS 2
//! IN 0
//! IN 1
//! AND 0 1
//! ```
//!
//! Gates are numbered from 0 in file order (the `INPUTS` header is not a
//! gate) and may only reference earlier gates. The last gate is the output.
//! Two circuits are the same circuit iff their canonical texts are equal.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    Input(usize),
    Const(bool),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::Input(i) => write!(f, "IN {i}"),
            Gate::Const(b) => write!(f, "CONST {}", u8::from(*b)),
            Gate::Not(g) => write!(f, "NOT {g}"),
            Gate::And(g, h) => write!(f, "AND {g} {h}"),
            Gate::Or(g, h) => write!(f, "OR {g} {h}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitError {
    #[error("circuit has {expected} inputs but {got} bits were supplied")]
    ArityMismatch { expected: usize, got: usize },
    #[error("malformed circuit at gate {gate}: {reason}")]
    Malformed { gate: usize, reason: String },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

fn malformed(gate: usize, reason: impl Into<String>) -> CircuitError {
    CircuitError::Malformed {
        gate,
        reason: reason.into(),
    }
}

/// A circuit description. Construction does not validate; use
/// [`Circuit::validate`] or parse from text.
#[derive(Clone, Debug)]
pub struct Circuit {
    num_inputs: usize,
    gates: Vec<Gate>,
    text: String,
}

impl PartialEq for Circuit {
    fn eq(&self, other: &Self) -> bool {
        self.text == other.text
    }
}

impl Eq for Circuit {}

impl Circuit {
    pub fn new(num_inputs: usize, gates: Vec<Gate>) -> Self {
        use fmt::Write;
        let mut text = format!("INPUTS {num_inputs}");
        for g in &gates {
            write!(text, "\n{g}").expect("writing to a String cannot fail");
        }
        Circuit {
            num_inputs,
            gates,
            text,
        }
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Gate count.
    pub fn size(&self) -> usize {
        self.gates.len()
    }

    /// Canonical serialization; lines separated by a single `\n`, no
    /// trailing newline.
    pub fn text(&self) -> &str {
        &self.text
    }

    /// Topological order, input range and non-emptiness.
    pub fn validate(&self) -> Result<(), CircuitError> {
        if self.gates.is_empty() {
            return Err(malformed(0, "no output gate"));
        }
        for (i, gate) in self.gates.iter().enumerate() {
            let earlier = |g: usize| {
                if g < i {
                    Ok(())
                } else {
                    Err(malformed(i, format!("operand {g} is not an earlier gate")))
                }
            };
            match *gate {
                Gate::Input(k) if k >= self.num_inputs => {
                    return Err(malformed(
                        i,
                        format!("input {k} out of range for {} inputs", self.num_inputs),
                    ))
                }
                Gate::Input(_) | Gate::Const(_) => {}
                Gate::Not(g) => earlier(g)?,
                Gate::And(g, h) | Gate::Or(g, h) => {
                    earlier(g)?;
                    earlier(h)?;
                }
            }
        }
        Ok(())
    }

    /// Well-formed with at most `max_gates` gates.
    pub fn is_valid_within(&self, max_gates: usize) -> bool {
        self.size() <= max_gates && self.validate().is_ok()
    }

    pub fn eval(&self, input: &[bool]) -> Result<bool, CircuitError> {
        if input.len() != self.num_inputs {
            return Err(CircuitError::ArityMismatch {
                expected: self.num_inputs,
                got: input.len(),
            });
        }
        self.validate()?;
        let mut values: Vec<bool> = Vec::with_capacity(self.gates.len());
        for gate in &self.gates {
            let v = match *gate {
                Gate::Input(k) => input[k],
                Gate::Const(b) => b,
                Gate::Not(g) => !values[g],
                Gate::And(g, h) => values[g] && values[h],
                Gate::Or(g, h) => values[g] || values[h],
            };
            values.push(v);
        }
        Ok(*values.last().expect("validated non-empty"))
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

fn parse_index(tok: Option<&str>, line: usize) -> Result<usize, CircuitError> {
    let tok = tok.ok_or_else(|| CircuitError::Parse {
        line,
        msg: "missing operand".into(),
    })?;
    tok.parse().map_err(|_| CircuitError::Parse {
        line,
        msg: format!("bad operand `{tok}`"),
    })
}

impl FromStr for Circuit {
    type Err = CircuitError;

    /// Parses the netlist format and validates the result. A single trailing
    /// newline is accepted; any other blank line is an error.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let body = s.strip_suffix('\n').unwrap_or(s);
        let mut lines = body.split('\n').enumerate().map(|(i, l)| (i + 1, l));
        let (_, header) = lines.next().expect("split yields at least one item");
        let num_inputs = match header.split_whitespace().collect::<Vec<_>>()[..] {
            ["INPUTS", u] => u.parse().map_err(|_| CircuitError::Parse {
                line: 1,
                msg: format!("bad input count `{u}`"),
            })?,
            _ => {
                return Err(CircuitError::Parse {
                    line: 1,
                    msg: "expected `INPUTS <u>`".into(),
                })
            }
        };
        let mut gates = Vec::new();
        for (n, line) in lines {
            let mut toks = line.split_whitespace();
            let gate = match toks.next() {
                Some("IN") => Gate::Input(parse_index(toks.next(), n)?),
                Some("CONST") => match toks.next() {
                    Some("0") => Gate::Const(false),
                    Some("1") => Gate::Const(true),
                    other => {
                        return Err(CircuitError::Parse {
                            line: n,
                            msg: format!("bad constant {other:?}"),
                        })
                    }
                },
                Some("NOT") => Gate::Not(parse_index(toks.next(), n)?),
                Some("AND") => Gate::And(parse_index(toks.next(), n)?, parse_index(toks.next(), n)?),
                Some("OR") => Gate::Or(parse_index(toks.next(), n)?, parse_index(toks.next(), n)?),
                other => {
                    return Err(CircuitError::Parse {
                        line: n,
                        msg: format!("unknown gate {other:?}"),
                    })
                }
            };
            if let Some(extra) = toks.next() {
                return Err(CircuitError::Parse {
                    line: n,
                    msg: format!("trailing token `{extra}`"),
                });
            }
            gates.push(gate);
        }
        let c = Circuit::new(num_inputs, gates);
        c.validate()?;
        Ok(c)
    }
}

/// Bit string written as `0`/`1` characters; index 0 is the first character.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Bits(pub Vec<bool>);

impl Bits {
    /// The `i`-th string of length `len` in lexicographic order.
    pub fn lexicographic(i: u64, len: usize) -> Self {
        Bits((0..len).map(|k| (i >> (len - 1 - k)) & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().chain(&other.0).copied().collect())
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Bits {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(format!("not a bit: {other:?}")),
            })
            .collect::<Result<_, _>>()
            .map(Bits)
    }
}
