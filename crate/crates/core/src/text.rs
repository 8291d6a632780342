//! Line-based text format for automata.
//!
//! ```text
//! nmda
//! alphabet: a b
//! states: q0 q1 q2
//! initial: q0
//! trans: q0 a q0 1 3
//! trans: q0 b q2 3/2 4
//! ```
//!
//! The first non-comment line declares the kind (`nmda`, `nda` or `dda`),
//! which is validated against the structure. Lines starting with `#` and blank
//! lines are ignored. Serialization writes states and letters in declaration
//! order and transitions in canonical order, so `serialize(parse(s)) == s` for
//! canonical input.

use std::fmt::Write as _;

use thiserror::Error;

use crate::automaton::{Automaton, AutomatonError, Kind, Transition};
use crate::rational::parse_rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(
        "line {line}: discount factor {factor} is not greater than 1 (every discount factor must be a rational > 1)"
    )]
    FactorNotAboveOne { line: usize, factor: String },
    #[error("line {line}: unknown {what} `{name}`")]
    UnknownReference {
        line: usize,
        what: &'static str,
        name: String,
    },
    #[error("missing `{0}` line")]
    MissingSection(&'static str),
    #[error(transparent)]
    Invalid(#[from] AutomatonError),
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

pub fn parse_automaton(text: &str) -> Result<Automaton, ParseError> {
    let mut kind = None;
    let mut alphabet: Option<Vec<String>> = None;
    let mut states: Option<Vec<String>> = None;
    let mut initial: Option<(usize, Vec<String>)> = None;
    let mut transitions = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if kind.is_none() {
            kind = Some(
                Kind::from_keyword(line)
                    .ok_or_else(|| syntax(line_no, format!("expected `nmda`, `nda` or `dda`, found `{line}`")))?,
            );
            continue;
        }
        let (key, rest) = line
            .split_once(':')
            .ok_or_else(|| syntax(line_no, format!("expected `key: ...`, found `{line}`")))?;
        let items: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
        let set_once = |slot: &mut Option<Vec<String>>, name: &str| {
            if slot.is_some() {
                return Err(syntax(line_no, format!("duplicate `{name}` line")));
            }
            *slot = Some(items.clone());
            Ok(())
        };
        match key.trim() {
            "alphabet" => set_once(&mut alphabet, "alphabet")?,
            "states" => set_once(&mut states, "states")?,
            "initial" => {
                if initial.is_some() {
                    return Err(syntax(line_no, "duplicate `initial` line"));
                }
                initial = Some((line_no, items));
            }
            "trans" => {
                if items.len() != 5 {
                    return Err(syntax(
                        line_no,
                        "expected `trans: <src> <letter> <dst> <weight> <factor>`",
                    ));
                }
                transitions.push((line_no, items));
            }
            other => return Err(syntax(line_no, format!("unknown key `{other}`"))),
        }
    }

    let kind = kind.ok_or(ParseError::MissingSection("kind"))?;
    let alphabet = alphabet.ok_or(ParseError::MissingSection("alphabet"))?;
    let states = states.ok_or(ParseError::MissingSection("states"))?;
    let (initial_line, initial_names) = initial.ok_or(ParseError::MissingSection("initial"))?;

    let state_ix = |line: usize, name: &str| {
        states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| ParseError::UnknownReference {
                line,
                what: "state",
                name: name.to_string(),
            })
    };
    let initial = initial_names
        .iter()
        .map(|n| state_ix(initial_line, n))
        .collect::<Result<Vec<_>, _>>()?;

    let mut parsed = Vec::with_capacity(transitions.len());
    for (line, items) in transitions {
        let source = state_ix(line, &items[0])?;
        let letter = alphabet
            .iter()
            .position(|a| *a == items[1])
            .ok_or_else(|| ParseError::UnknownReference {
                line,
                what: "letter",
                name: items[1].clone(),
            })?;
        let target = state_ix(line, &items[2])?;
        let weight = parse_rational(&items[3]).map_err(|e| syntax(line, e.to_string()))?;
        let factor = parse_rational(&items[4]).map_err(|e| syntax(line, e.to_string()))?;
        if factor <= num_traits::One::one() {
            return Err(ParseError::FactorNotAboveOne {
                line,
                factor: items[4].clone(),
            });
        }
        parsed.push(Transition {
            source,
            letter,
            target,
            weight,
            factor,
        });
    }

    let aut = Automaton::from_parts(alphabet, states, initial, parsed)?;
    Ok(aut.with_kind(kind)?)
}

pub fn serialize_automaton(aut: &Automaton) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", aut.kind());
    let _ = writeln!(out, "alphabet: {}", aut.alphabet().join(" "));
    let _ = writeln!(out, "states: {}", aut.states().join(" "));
    let initial: Vec<&str> = aut.initial().iter().map(|&q| aut.state_name(q)).collect();
    let _ = writeln!(out, "initial: {}", initial.join(" "));
    for t in aut.transitions() {
        let _ = writeln!(
            out,
            "trans: {} {} {} {} {}",
            aut.state_name(t.source),
            aut.letter_name(t.letter),
            aut.state_name(t.target),
            t.weight,
            t.factor
        );
    }
    out
}
