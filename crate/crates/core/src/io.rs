//! Line-based text formats for transducers and bimachines.
//!
//! Transducer files:
//!
//! ```text
//! # comments run to the end of the line
//! monoid free:xy
//! alphabet a b
//! states 2
//! initial 0
//! final 1
//! t 0 a "x" 1
//! t 1 - "" 1        # `-` reads no input
//! ```
//!
//! Bimachine files start with `BIM v1 <monoid>` and an `alphabet` line,
//! followed by `LEFT` and `RIGHT` sections (`states`, one `state` line per
//! subset, `start`, and `δ <from> <symbol> <to>` rows), a `PSI` section of
//! `<left> <symbol> <right> <value>` rows and an optional `EPS <value>` line.
//! Writers emit rows in a canonical order so that output round-trips
//! byte for byte.

use std::fmt::Write as _;

use crate::bimachine::{Bimachine, PsiTable};
use crate::error::{Error, Result};
use crate::fsa::{Dfa, InputAlphabet, StateSet, Transducer, Transition};
use crate::monoid::MonoidDescriptor;

/// A parsed transducer plus any non-fatal diagnostics.
#[derive(Debug, Clone)]
pub struct TransducerFile {
    pub transducer: Transducer,
    pub warnings: Vec<String>,
}

/// Drops a trailing comment: a `#` at the start of the line or after
/// whitespace, outside quoted words.
fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    let mut after_space = true;
    for (i, c) in line.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '#' if !quoted && after_space => return &line[..i],
            _ => {}
        }
        after_space = c.is_whitespace();
    }
    line
}

fn parse_index(token: &str, line: usize, what: &str) -> Result<usize> {
    token
        .parse()
        .map_err(|_| Error::parse(line, format!("expected {what}, found `{token}`")))
}

pub fn parse_transducer(text: &str) -> Result<TransducerFile> {
    let mut monoid: Option<MonoidDescriptor> = None;
    let mut alphabet: Option<InputAlphabet> = None;
    let mut states: Option<usize> = None;
    let mut initial: Vec<usize> = Vec::new();
    let mut finals: Vec<usize> = Vec::new();
    let mut transitions: Vec<(usize, Transition)> = Vec::new();

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = strip_comment(raw).trim();
        if content.is_empty() {
            continue;
        }
        let (keyword, rest) = content
            .split_once(char::is_whitespace)
            .map_or((content, ""), |(a, b)| (a, b.trim()));
        let state = |token: &str| -> Result<usize> {
            let q = parse_index(token, line, "a state index")?;
            match states {
                Some(n) if q < n => Ok(q),
                Some(n) => Err(Error::parse(line, format!("state {q} is not declared (states {n})"))),
                None => Err(Error::parse(line, "`states` must precede state references")),
            }
        };
        match keyword {
            "monoid" => {
                monoid = Some(MonoidDescriptor::parse(rest).map_err(|e| Error::parse(line, e.to_string()))?);
            }
            "alphabet" => {
                alphabet = Some(
                    InputAlphabet::new(rest.split_whitespace())
                        .map_err(|e| Error::parse(line, e.to_string()))?,
                );
            }
            "states" => states = Some(parse_index(rest, line, "a state count")?),
            "initial" => {
                for tok in rest.split_whitespace() {
                    initial.push(state(tok)?);
                }
            }
            "final" => {
                for tok in rest.split_whitespace() {
                    finals.push(state(tok)?);
                }
            }
            "t" => {
                let (Some(monoid), Some(alphabet)) = (&monoid, &alphabet) else {
                    return Err(Error::parse(line, "`monoid` and `alphabet` must precede transitions"));
                };
                let mut head = rest.splitn(3, char::is_whitespace);
                let (Some(src), Some(sym), Some(tail)) = (head.next(), head.next(), head.next()) else {
                    return Err(Error::parse(line, "expected `t <src> <sym|-> <value> <dst>`"));
                };
                let Some((value, dst)) = tail.trim().rsplit_once(char::is_whitespace) else {
                    return Err(Error::parse(line, "expected `t <src> <sym|-> <value> <dst>`"));
                };
                let input = match sym {
                    "-" => None,
                    s => Some(
                        alphabet
                            .lookup(s)
                            .ok_or_else(|| Error::parse(line, format!("undeclared input symbol `{s}`")))?,
                    ),
                };
                let output = monoid
                    .parse_value(value.trim())
                    .map_err(|e| Error::parse(line, e.to_string()))?;
                transitions.push((
                    line,
                    Transition {
                        source: state(src)?,
                        input,
                        output,
                        target: state(dst)?,
                    },
                ));
            }
            other => return Err(Error::parse(line, format!("unknown directive `{other}`"))),
        }
    }
    let missing = |what: &str| Error::parse(text.lines().count().max(1), format!("missing `{what}` line"));
    let monoid = monoid.ok_or_else(|| missing("monoid"))?;
    let alphabet = alphabet.ok_or_else(|| missing("alphabet"))?;
    let states = states.ok_or_else(|| missing("states"))?;

    let mut warnings = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut unique = Vec::new();
    for (line, tr) in transitions {
        if seen.insert(tr.clone()) {
            unique.push(tr);
        } else {
            let msg = format!("line {line}: duplicate transition ignored");
            log::warn!("{msg}");
            warnings.push(msg);
        }
    }
    let transducer = Transducer::new(alphabet, monoid, states, initial, finals, unique)?;
    Ok(TransducerFile { transducer, warnings })
}

pub fn write_transducer(t: &Transducer) -> String {
    let d = t.monoid();
    let mut out = String::new();
    let _ = writeln!(out, "monoid {d}");
    let _ = writeln!(out, "alphabet {}", t.alphabet().names().join(" "));
    let _ = writeln!(out, "states {}", t.num_states());
    let join = |qs: &[usize]| qs.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
    let _ = writeln!(out, "initial {}", join(t.initial()).trim_end());
    let _ = writeln!(out, "final {}", join(t.finals()).trim_end());
    for tr in t.transitions() {
        let sym = tr.input.map_or("-", |a| t.alphabet().name(a));
        let _ = writeln!(out, "t {} {sym} {} {}", tr.source, d.display(&tr.output), tr.target);
    }
    out
}

pub fn write_bimachine(b: &Bimachine) -> String {
    let d = b.monoid();
    let alphabet = b.alphabet();
    let mut out = String::new();
    let _ = writeln!(out, "BIM v1 {d}");
    let _ = writeln!(out, "alphabet {}", alphabet.names().join(" "));
    for (title, dfa) in [("LEFT", b.left()), ("RIGHT", b.right())] {
        let _ = writeln!(out, "{title}");
        let _ = writeln!(out, "states {}", dfa.num_states());
        for (k, set) in dfa.states().iter().enumerate() {
            let members: Vec<String> = set.iter().map(|q| q.to_string()).collect();
            let _ = writeln!(out, "state {k} {}", members.join(" ").trim_end());
        }
        if let Some(s) = dfa.start() {
            let _ = writeln!(out, "start {s}");
        }
        for k in 0..dfa.num_states() {
            for a in 0..dfa.num_symbols() {
                if let Some(to) = dfa.next(k, a) {
                    let _ = writeln!(out, "δ {k} {} {to}", alphabet.name(a));
                }
            }
        }
    }
    let _ = writeln!(out, "PSI");
    for (&(l, a, r), v) in b.psi() {
        let _ = writeln!(out, "{l} {} {r} {}", alphabet.name(a), d.display(v));
    }
    if let Some(v) = b.eps_output() {
        let _ = writeln!(out, "EPS {}", d.display(v));
    }
    out
}

#[derive(Default)]
struct DfaParts {
    states: Vec<Option<StateSet>>,
    start: Option<usize>,
    delta: Vec<(usize, usize, usize)>,
}

impl DfaParts {
    fn finish(self, symbols: usize, line: usize) -> Result<Dfa> {
        let n = self.states.len();
        let states = self
            .states
            .into_iter()
            .enumerate()
            .map(|(k, s)| s.ok_or_else(|| Error::parse(line, format!("state {k} has no subset line"))))
            .collect::<Result<Vec<_>>>()?;
        let mut delta = vec![None; n * symbols];
        for (from, a, to) in self.delta {
            if from >= n || to >= n {
                return Err(Error::parse(line, format!("transition {from} -> {to} leaves the state range")));
            }
            delta[from * symbols + a] = Some(to);
        }
        Dfa::from_parts(symbols, states, self.start, delta).map_err(|e| Error::parse(line, e.to_string()))
    }
}

pub fn parse_bimachine(text: &str) -> Result<Bimachine> {
    #[derive(PartialEq)]
    enum Section {
        Header,
        Left,
        Right,
        Psi,
    }
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim()));
    let (_, header) = lines
        .by_ref()
        .find(|(_, l)| !l.is_empty())
        .ok_or_else(|| Error::parse(1, "empty bimachine file"))?;
    let descriptor = header
        .strip_prefix("BIM v1 ")
        .ok_or_else(|| Error::parse(1, "expected `BIM v1 <monoid>` header"))?;
    let monoid = MonoidDescriptor::parse(descriptor.trim()).map_err(|e| Error::parse(1, e.to_string()))?;

    let mut alphabet: Option<InputAlphabet> = None;
    let mut section = Section::Header;
    let mut left = DfaParts::default();
    let mut right = DfaParts::default();
    let mut psi = PsiTable::new();
    let mut eps = None;
    let mut last_line = 1;
    for (line, content) in lines {
        last_line = line;
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let symbol = |name: &str| -> Result<usize> {
            alphabet
                .as_ref()
                .ok_or_else(|| Error::parse(line, "`alphabet` must come first"))?
                .lookup(name)
                .ok_or_else(|| Error::parse(line, format!("undeclared input symbol `{name}`")))
        };
        match tokens[0] {
            "alphabet" if section == Section::Header => {
                alphabet = Some(InputAlphabet::new(tokens[1..].iter().copied()).map_err(|e| Error::parse(line, e.to_string()))?);
                continue;
            }
            "LEFT" => {
                section = Section::Left;
                continue;
            }
            "RIGHT" => {
                section = Section::Right;
                continue;
            }
            "PSI" => {
                section = Section::Psi;
                continue;
            }
            "EPS" => {
                let value = content["EPS".len()..].trim();
                eps = Some(monoid.parse_value(value).map_err(|e| Error::parse(line, e.to_string()))?);
                continue;
            }
            _ => {}
        }
        let dfa = match section {
            Section::Left => &mut left,
            Section::Right => &mut right,
            Section::Psi => {
                if tokens.len() != 4 {
                    return Err(Error::parse(line, "expected `<left> <symbol> <right> <value>`"));
                }
                let l = parse_index(tokens[0], line, "a left state")?;
                let a = symbol(tokens[1])?;
                let r = parse_index(tokens[2], line, "a right state")?;
                let v = monoid.parse_value(tokens[3]).map_err(|e| Error::parse(line, e.to_string()))?;
                if psi.insert((l, a, r), v).is_some() {
                    return Err(Error::parse(line, "duplicate output entry"));
                }
                continue;
            }
            Section::Header => return Err(Error::parse(line, format!("unexpected `{}`", tokens[0]))),
        };
        match tokens[0] {
            "states" => {
                let n = parse_index(tokens.get(1).copied().unwrap_or(""), line, "a state count")?;
                dfa.states = vec![None; n];
            }
            "state" => {
                let k = parse_index(tokens.get(1).copied().unwrap_or(""), line, "a state index")?;
                let members = tokens[2..]
                    .iter()
                    .map(|t| parse_index(t, line, "a transducer state"))
                    .collect::<Result<Vec<_>>>()?;
                let slot = dfa
                    .states
                    .get_mut(k)
                    .ok_or_else(|| Error::parse(line, format!("state {k} out of range")))?;
                *slot = Some(StateSet::new(members));
            }
            "start" => dfa.start = Some(parse_index(tokens.get(1).copied().unwrap_or(""), line, "a state index")?),
            "δ" if tokens.len() == 4 => {
                let from = parse_index(tokens[1], line, "a state index")?;
                let a = symbol(tokens[2])?;
                let to = parse_index(tokens[3], line, "a state index")?;
                dfa.delta.push((from, a, to));
            }
            other => return Err(Error::parse(line, format!("unexpected `{other}`"))),
        }
    }
    let alphabet = alphabet.ok_or_else(|| Error::parse(last_line, "missing `alphabet` line"))?;
    let symbols = alphabet.len();
    let left = left.finish(symbols, last_line)?;
    let right = right.finish(symbols, last_line)?;
    Bimachine::new(monoid, alphabet, left, right, psi, eps).map_err(|e| Error::parse(last_line, e.to_string()))
}
