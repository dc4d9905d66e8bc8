//! Deciding whether a transducer defines a partial function.
//!
//! The procedure trims the transducer, rejects non-unit ε-cycles and
//! ambiguous ε-outputs, then checks the squared automaton against its
//! valuation: every useful pair must carry an equalizer, every pair
//! transition must preserve it, and final pairs must be balanced.

use std::collections::BTreeSet;
use std::fmt;

use crate::fsa::{enumerate_outputs, trim, Transducer};
use crate::monoid::{MgeMonoid, MonoidValue};
use crate::squared::{coaccessible, squared, squared_eps, valuation, Pair, SquaredAutomaton, Valuation};
use crate::error::Result;

/// Why a transducer is not functional. States are numbered as in the
/// transducer passed to [`test_functionality`]; values are rendered literals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    NonunitEpsCycle { state: usize },
    AmbiguousEpsOutput { outputs: Vec<String> },
    NonEqualizable { pair: Pair, rho: (String, String) },
    Condition2 { from: Pair, to: Pair, left: String, right: String },
    NonunitFinal { pair: Pair, nu: (String, String) },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::NonunitEpsCycle { state } => {
                write!(f, "ε-cycle with non-unit output through state {state}")
            }
            Witness::AmbiguousEpsOutput { outputs } => {
                write!(f, "empty input has several outputs: {}", outputs.join(", "))
            }
            Witness::NonEqualizable { pair, rho } => write!(
                f,
                "outputs ({},{}) at pair ({},{}) cannot be equalized",
                rho.0, rho.1, pair.0, pair.1
            ),
            Witness::Condition2 { from, to, left, right } => write!(
                f,
                "transition ({},{}) -> ({},{}) breaks the equalizer: {} != {}",
                from.0, from.1, to.0, to.1, left, right
            ),
            Witness::NonunitFinal { pair, nu } => write!(
                f,
                "final pair ({},{}) is unbalanced: ({},{})",
                pair.0, pair.1, nu.0, nu.1
            ),
        }
    }
}

/// Outcome of [`test_functionality`], keeping the intermediate structures
/// for reuse by the compiler.
#[derive(Debug, Clone)]
pub struct FunctionalityVerdict {
    witness: Option<Witness>,
    trimmed: Transducer,
    eps_output: Option<MonoidValue>,
    analysis: Option<(SquaredAutomaton, Vec<bool>, Valuation)>,
}

impl FunctionalityVerdict {
    pub fn is_functional(&self) -> bool {
        self.witness.is_none()
    }

    pub fn witness(&self) -> Option<&Witness> {
        self.witness.as_ref()
    }

    /// The trimmed transducer the analysis ran on.
    pub fn trimmed(&self) -> &Transducer {
        &self.trimmed
    }

    /// The output for the empty input, when it is in the domain.
    pub fn eps_output(&self) -> Option<&MonoidValue> {
        self.eps_output.as_ref()
    }

    pub fn squared(&self) -> Option<&SquaredAutomaton> {
        self.analysis.as_ref().map(|a| &a.0)
    }

    pub fn coaccessible(&self) -> Option<&[bool]> {
        self.analysis.as_ref().map(|a| a.1.as_slice())
    }

    pub fn valuation(&self) -> Option<&Valuation> {
        self.analysis.as_ref().map(|a| &a.2)
    }
}

/// Checks that every ε-cycle of `t` has output `e`; on failure returns a
/// state on an offending cycle.
///
/// Within each strongly connected component of the ε-graph, a traversal from
/// every member assigns each reached state the output of the first path found.
/// With right cancellation, all ε-cycles are trivial exactly when no second
/// path disagrees and every return to the origin yields `e`.
pub fn eps_cycle_check(t: &Transducer) -> std::result::Result<(), usize> {
    let n = t.num_states();
    let d = t.monoid();
    let mut eps_out: Vec<Vec<(usize, &MonoidValue)>> = vec![Vec::new(); n];
    for tr in t.transitions() {
        if tr.input.is_none() {
            eps_out[tr.source].push((tr.target, &tr.output));
        }
    }
    if eps_out.iter().all(Vec::is_empty) {
        return Ok(());
    }
    let reach: Vec<Vec<bool>> = (0..n).map(|q| reachable(q, &eps_out)).collect();
    let same_scc = |p: usize, q: usize| reach[p][q] && reach[q][p];
    for origin in 0..n {
        let on_cycle = eps_out[origin].iter().any(|&(r, _)| reach[r][origin]);
        if !on_cycle {
            continue;
        }
        let mut potential: Vec<Option<MonoidValue>> = vec![None; n];
        potential[origin] = Some(d.unit());
        let mut stack = vec![origin];
        while let Some(u) = stack.pop() {
            let pu = potential[u].clone().expect("visited states have a potential");
            for &(v, m) in &eps_out[u] {
                if !same_scc(origin, v) {
                    continue;
                }
                let candidate = d.op(&pu, m).expect("validated transducer");
                if v == origin {
                    if !d.is_unit(&candidate) {
                        return Err(origin);
                    }
                    continue;
                }
                match &potential[v] {
                    Some(existing) if *existing != candidate => return Err(origin),
                    Some(_) => {}
                    None => {
                        potential[v] = Some(candidate);
                        stack.push(v);
                    }
                }
            }
        }
    }
    Ok(())
}

fn reachable(from: usize, adj: &[Vec<(usize, &MonoidValue)>]) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    seen[from] = true;
    let mut stack = vec![from];
    while let Some(q) = stack.pop() {
        for &(r, _) in &adj[q] {
            if !seen[r] {
                seen[r] = true;
                stack.push(r);
            }
        }
    }
    seen
}

/// Outputs of successful paths reading the empty word. Finite once
/// [`eps_cycle_check`] has passed, since every such output is then produced
/// by a simple path.
pub fn eps_language(t: &Transducer) -> BTreeSet<MonoidValue> {
    enumerate_outputs(t, &[], t.num_states())
}

/// Runs the full decision procedure.
pub fn test_functionality(t: &Transducer) -> Result<FunctionalityVerdict> {
    let (trimmed, map) = trim(t);
    let mut original = vec![0; trimmed.num_states()];
    for (old, new) in map.iter().enumerate() {
        if let Some(new) = *new {
            original[new] = old;
        }
    }
    let d = trimmed.monoid().clone();
    let show = |v: &MonoidValue| d.display(v).to_string();
    let verdict = |witness, eps_output, analysis| FunctionalityVerdict {
        witness,
        trimmed: trimmed.clone(),
        eps_output,
        analysis,
    };

    if let Err(q) = eps_cycle_check(&trimmed) {
        return Ok(verdict(Some(Witness::NonunitEpsCycle { state: original[q] }), None, None));
    }
    let eps = eps_language(&trimmed);
    if eps.len() > 1 {
        let outputs = eps.iter().map(show).collect();
        return Ok(verdict(Some(Witness::AmbiguousEpsOutput { outputs }), None, None));
    }
    let eps_output = eps.into_iter().next();

    let sq = if trimmed.is_real_time() {
        squared(&trimmed)?
    } else {
        squared_eps(&trimmed)
    };
    let co = coaccessible(&sq);
    let val = valuation(&d, &sq, &co)?;
    let orig_pair = |k: usize| {
        let (p1, p2) = sq.pair(k);
        (original[p1], original[p2])
    };

    let mut witness = None;
    for k in 0..sq.num_pairs() {
        if co[k] && val.nu(k).is_none() {
            let rho = val.rho(k).expect("useful pairs carry rho");
            witness = Some(Witness::NonEqualizable {
                pair: orig_pair(k),
                rho: (show(&rho.0), show(&rho.1)),
            });
            break;
        }
    }
    if witness.is_none() {
        'transitions: for tr in sq.transitions() {
            if !(co[tr.source] && co[tr.target]) {
                continue;
            }
            let (x1, x2) = val.rho(tr.source).expect("useful pairs carry rho");
            let (y1, y2) = val.nu(tr.target).expect("checked above");
            let left = d.op(&d.op(x1, &tr.outputs.0)?, y1)?;
            let right = d.op(&d.op(x2, &tr.outputs.1)?, y2)?;
            if left != right {
                witness = Some(Witness::Condition2 {
                    from: orig_pair(tr.source),
                    to: orig_pair(tr.target),
                    left: show(&left),
                    right: show(&right),
                });
                break 'transitions;
            }
        }
    }
    if witness.is_none() {
        for &f in sq.finals() {
            let nu = val.nu(f).expect("final pairs are useful");
            if !(d.is_unit(&nu.0) && d.is_unit(&nu.1)) {
                witness = Some(Witness::NonunitFinal {
                    pair: orig_pair(f),
                    nu: (show(&nu.0), show(&nu.1)),
                });
                break;
            }
        }
    }
    Ok(verdict(witness, eps_output, Some((sq, co, val))))
}
