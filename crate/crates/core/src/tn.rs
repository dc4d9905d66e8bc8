//! The `T_n` family and the state-count benchmark built on it.
//!
//! `T_n` has a start state `s`, an intermediate layer `q_1 … q_n` and a final
//! state `f`, reads `a_1 … a_n` and writes unary output. Every accepted word
//! `α` (of length at least 2 — no shorter path reaches `f`) is mapped to
//! `1^{n|α|}`, but the paths realizing it shuffle the intermediate layer by
//! permutations, which blows up the classical construction while the
//! equalizer construction stays at `3 + 2^n + n` states.

use std::fmt::{self, Write as _};

use crate::classical::classical_compile;
use crate::compile::{compile, CompileOptions, CompileStats};
use crate::error::{Error, Result};
use crate::fsa::{InputAlphabet, Transducer, Transition};
use crate::monoid::{MonoidDescriptor, MonoidValue};

/// Builds `T_n`. States: `s = 0`, `q_i = i` for `1 ≤ i ≤ n`, `f = n + 1`;
/// input symbol `a_j` has index `j − 1`.
pub fn make_tn(n: usize) -> Result<Transducer> {
    if n == 0 {
        return Err(Error::Precondition("T_n needs n ≥ 1".into()));
    }
    let alphabet = InputAlphabet::new((1..=n).map(|j| format!("a{j}")))?;
    let monoid = MonoidDescriptor::free("1")?;
    let ones = |k: usize| MonoidValue::word(vec![0; k]);
    let (s, f) = (0, n + 1);
    let mut transitions = Vec::new();
    let mut push = |source, j: usize, output, target| {
        transitions.push(Transition {
            source,
            input: Some(j - 1),
            output,
            target,
        })
    };
    for i in 1..=n {
        for j in 1..=n {
            push(s, j, ones(i - 1), i);
        }
    }
    for i in 1..=n {
        for j in 1..=n {
            let (out, target) = if i == 1 {
                (n + j - 1, j)
            } else if i == j {
                (n - j + 1, 1)
            } else {
                (n, i)
            };
            push(i, j, ones(out), target);
        }
    }
    for i in 1..=n {
        for j in 1..=i {
            push(i, j, ones(2 * n - i + 1), f);
        }
    }
    Transducer::new(alphabet, monoid, n + 2, [s], [f], transitions)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Mge,
    Classical,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Mge => "mge",
            Method::Classical => "classical",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchLimits {
    /// Largest `n` attempted with the equalizer construction.
    pub mge: usize,
    /// Largest `n` attempted with the classical construction.
    pub classical: usize,
    /// Cap on power-set sizes; exceeding it marks the row skipped.
    pub max_states: Option<usize>,
}

impl Default for BenchLimits {
    fn default() -> Self {
        BenchLimits {
            mge: 8,
            classical: 7,
            max_states: None,
        }
    }
}

#[derive(Debug, Clone)]
pub enum RowOutcome {
    Built(CompileStats),
    Skipped(String),
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub n: usize,
    pub method: Method,
    pub outcome: RowOutcome,
}

#[derive(Debug, Clone, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

const COLUMNS: [&str; 7] = [
    "n",
    "method",
    "left_states",
    "right_states",
    "intermediate_states",
    "psi_entries",
    "build_ms",
];

impl BenchRow {
    fn cells(&self) -> [String; 7] {
        let (n, method) = (self.n.to_string(), self.method.to_string());
        match &self.outcome {
            RowOutcome::Built(s) => [
                n,
                method,
                s.left_states.to_string(),
                s.right_states.to_string(),
                s.intermediate_states.map_or("-".into(), |v| v.to_string()),
                s.psi_entries.to_string(),
                format!("{:.1}", s.build_ms),
            ],
            RowOutcome::Skipped(_) => [
                n,
                method,
                "skipped".into(),
                "-".into(),
                "-".into(),
                "-".into(),
                "-".into(),
            ],
        }
    }
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = COLUMNS.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.cells().join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_table(&self) -> String {
        let cells: Vec<[String; 7]> = self.rows.iter().map(BenchRow::cells).collect();
        let mut widths = COLUMNS.map(str::len);
        for row in &cells {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.len());
            }
        }
        let mut out = String::new();
        let line = |out: &mut String, row: &[String]| {
            let padded: Vec<String> = row
                .iter()
                .zip(widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect();
            let _ = writeln!(out, "{}", padded.join("  ").trim_end());
        };
        line(&mut out, &COLUMNS.map(String::from));
        for row in &cells {
            line(&mut out, row);
        }
        for row in &self.rows {
            if let RowOutcome::Skipped(reason) = &row.outcome {
                let _ = writeln!(out, "# n={} {}: {reason}", row.n, row.method);
            }
        }
        out
    }
}

/// Compiles `T_1 … T_max_n` with each requested method. Rows beyond a
/// method's limit, or whose construction exceeds the state cap, are marked
/// skipped rather than aborting the run.
pub fn run_bench(max_n: usize, methods: &[Method], limits: &BenchLimits) -> Result<BenchReport> {
    let mut methods = methods.to_vec();
    methods.sort();
    methods.dedup();
    let options = CompileOptions {
        max_states: limits.max_states,
        ..CompileOptions::default()
    };
    let mut report = BenchReport::default();
    for n in 1..=max_n {
        let t = make_tn(n)?;
        for &method in &methods {
            let limit = match method {
                Method::Mge => limits.mge,
                Method::Classical => limits.classical,
            };
            let outcome = if n > limit {
                RowOutcome::Skipped(format!("n exceeds the safety limit {limit}"))
            } else {
                let built = match method {
                    Method::Mge => compile(&t, &options),
                    Method::Classical => classical_compile(&t, &options),
                };
                match built {
                    Ok(c) => RowOutcome::Built(c.stats),
                    Err(e @ Error::StateLimit { .. }) => RowOutcome::Skipped(e.to_string()),
                    Err(e) => return Err(e),
                }
            };
            log::info!("T_{n} {method}: {outcome:?}");
            report.rows.push(BenchRow { n, method, outcome });
        }
    }
    Ok(report)
}
