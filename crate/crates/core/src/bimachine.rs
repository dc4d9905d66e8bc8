use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fsa::{Dfa, InputAlphabet, Symbol};
use crate::monoid::{MgeMonoid, MonoidDescriptor, MonoidValue};

/// Output table keyed by `(left state, symbol, right state)`.
pub type PsiTable = BTreeMap<(usize, Symbol, usize), MonoidValue>;

/// A deterministic two-way device: a left automaton reads the prefix, a right
/// automaton reads the reversed suffix, and `ψ` emits one output per symbol
/// from the pair of states surrounding it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bimachine {
    monoid: MonoidDescriptor,
    alphabet: InputAlphabet,
    left: Dfa,
    right: Dfa,
    psi: PsiTable,
    eps_output: Option<MonoidValue>,
}

impl Bimachine {
    pub fn new(
        monoid: MonoidDescriptor,
        alphabet: InputAlphabet,
        left: Dfa,
        right: Dfa,
        psi: PsiTable,
        eps_output: Option<MonoidValue>,
    ) -> Result<Self> {
        if left.num_symbols() != alphabet.len() || right.num_symbols() != alphabet.len() {
            return Err(Error::Inconsistent(
                "automata and bimachine disagree on the alphabet size".into(),
            ));
        }
        for (&(l, a, r), v) in &psi {
            if l >= left.num_states() || r >= right.num_states() || a >= alphabet.len() {
                return Err(Error::Inconsistent(format!(
                    "output entry ({l}, {a}, {r}) references an unknown state or symbol"
                )));
            }
            if !monoid.contains(v) {
                return Err(Error::Inconsistent(format!(
                    "output entry ({l}, {a}, {r}) is not an element of {monoid}"
                )));
            }
        }
        if eps_output.as_ref().is_some_and(|v| !monoid.contains(v)) {
            return Err(Error::Inconsistent(format!(
                "empty-word output is not an element of {monoid}"
            )));
        }
        Ok(Bimachine {
            monoid,
            alphabet,
            left,
            right,
            psi,
            eps_output,
        })
    }

    pub fn monoid(&self) -> &MonoidDescriptor {
        &self.monoid
    }

    pub fn alphabet(&self) -> &InputAlphabet {
        &self.alphabet
    }

    pub fn left(&self) -> &Dfa {
        &self.left
    }

    pub fn right(&self) -> &Dfa {
        &self.right
    }

    pub fn psi(&self) -> &PsiTable {
        &self.psi
    }

    pub fn eps_output(&self) -> Option<&MonoidValue> {
        self.eps_output.as_ref()
    }

    /// Computes the output for `word`, or `None` when the word is outside the
    /// domain.
    ///
    /// The right automaton runs first over the reversed word so that every
    /// position knows the right state of its suffix; the left pass then emits
    /// `ψ(l_{i-1}, a_i, r_i)` left to right.
    pub fn evaluate(&self, word: &[Symbol]) -> Result<Option<MonoidValue>> {
        self.check_symbols(word)?;
        if word.is_empty() {
            return Ok(self.eps_output.clone());
        }
        let Some(right_states) = self.right_run(word) else {
            return Ok(None);
        };
        let Some(mut l) = self.left.start() else {
            return Ok(None);
        };
        let mut acc = self.monoid.unit();
        for (i, &a) in word.iter().enumerate() {
            let Some(out) = self.psi.get(&(l, a, right_states[i + 1])) else {
                return Ok(None);
            };
            acc = self.monoid.op(&acc, out)?;
            match self.left.next(l, a) {
                Some(next) => l = next,
                None if i + 1 == word.len() => {}
                None => return Ok(None),
            }
        }
        Ok(Some(acc))
    }

    /// Like [`evaluate`](Self::evaluate) but takes a word spelled with symbol
    /// names.
    pub fn evaluate_str(&self, word: &str) -> Result<Option<MonoidValue>> {
        let word = self.alphabet.tokenize(word)?;
        self.evaluate(&word)
    }

    pub fn domain_contains(&self, word: &[Symbol]) -> Result<bool> {
        Ok(self.evaluate(word)?.is_some())
    }

    /// The extended output function `ψ*(l, word, r)` by its recursive
    /// definition: `ψ*(l, ε, r) = e` and
    /// `ψ*(l, tσ, r) = ψ*(l, t, δ_R(r, σ)) ∘ ψ(δ_L*(l, t), σ, r)`.
    pub fn psi_star(&self, l: usize, word: &[Symbol], r: usize) -> Option<MonoidValue> {
        let Some((&sigma, prefix)) = word.split_last() else {
            return Some(self.monoid.unit());
        };
        let r_prev = self.right.next(r, sigma)?;
        let head = self.psi_star(l, prefix, r_prev)?;
        let l_last = prefix
            .iter()
            .try_fold(l, |s, &a| self.left.next(s, a))?;
        let tail = self.psi.get(&(l_last, sigma, r))?;
        self.monoid.op(&head, tail).ok()
    }

    /// `r[i]` is the right state after reading `word[i..]` reversed.
    fn right_run(&self, word: &[Symbol]) -> Option<Vec<usize>> {
        let mut states = vec![0; word.len() + 1];
        states[word.len()] = self.right.start()?;
        for i in (0..word.len()).rev() {
            states[i] = match self.right.next(states[i + 1], word[i]) {
                Some(r) => r,
                // position 0 never needs its right state
                None if i == 0 => usize::MAX,
                None => return None,
            };
        }
        Some(states)
    }

    fn check_symbols(&self, word: &[Symbol]) -> Result<()> {
        match word.iter().find(|&&a| a >= self.alphabet.len()) {
            Some(a) => Err(Error::UnknownSymbol(format!("#{a}"))),
            None => Ok(()),
        }
    }
}
