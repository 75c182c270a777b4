//! Deterministic automata recognising subshift languages.
//!
//! Every presentation is reduced to a start state and a partial transition
//! function on 0-based symbols. A word is in the language iff it can be read
//! from the start state. Reading `μ` and then `w` succeeds iff `w` can be read
//! from the state reached after `μ`, which is what the Krieger-cover code
//! relies on.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::matrix::ZeroOneMatrix;

use super::beta::DigitSequence;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Automaton {
    Full { alphabet: usize },
    /// States `0..d` are "last symbol read"; state `d` is the start.
    Sft { matrix: ZeroOneMatrix },
    Factor(FactorAutomaton),
    /// State `k` means the word read so far ends with `d*_1 … d*_k`.
    Beta { expansion: DigitSequence },
}

impl Automaton {
    pub(crate) fn start(&self) -> usize {
        match self {
            Automaton::Full { .. } => 0,
            Automaton::Sft { matrix } => matrix.dim(),
            Automaton::Factor(f) => f.root,
            Automaton::Beta { .. } => 0,
        }
    }

    /// `None` when the symbol cannot be read from `state`.
    pub(crate) fn step(&self, state: usize, symbol: usize) -> Result<Option<usize>> {
        Ok(match self {
            Automaton::Full { .. } => Some(0),
            Automaton::Sft { matrix } => {
                if state == matrix.dim() || matrix.allows(state, symbol) {
                    Some(symbol)
                } else {
                    None
                }
            }
            Automaton::Factor(f) => f.step(state, symbol),
            Automaton::Beta { expansion } => {
                let bound = expansion.digit(state).ok_or(Error::DigitDepthExceeded {
                    needed: state + 1,
                    available: expansion.digits.len(),
                })? as usize;
                match symbol.cmp(&bound) {
                    std::cmp::Ordering::Less => Some(0),
                    std::cmp::Ordering::Equal => Some(beta_state(expansion, state + 1)),
                    std::cmp::Ordering::Greater => None,
                }
            }
        })
    }

    /// Whether the start state itself has an infinite future.
    pub(crate) fn is_nonempty(&self) -> bool {
        match self {
            Automaton::Factor(f) => f.live[f.root],
            _ => true,
        }
    }

    pub(crate) fn run(&self, from: usize, word: &[usize]) -> Result<Option<usize>> {
        let mut state = from;
        for &s in word {
            match self.step(state, s)? {
                Some(next) => state = next,
                None => return Ok(None),
            }
        }
        Ok(Some(state))
    }
}

/// Folds state `k` back into the first period once the tail is periodic;
/// both states have the same future.
fn beta_state(expansion: &DigitSequence, k: usize) -> usize {
    match expansion.periodicity {
        Some(p) if k >= p.preperiod + p.period => p.preperiod + (k - p.preperiod) % p.period,
        _ => k,
    }
}

/// Aho-Corasick automaton over a set of forbidden factors, with every state
/// that has no infinite continuation removed.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct FactorAutomaton {
    root: usize,
    delta: Vec<Vec<usize>>,
    live: Vec<bool>,
}

impl FactorAutomaton {
    /// `patterns` are over `0..alphabet` and nonempty.
    pub(crate) fn new(alphabet: usize, patterns: &[Vec<usize>]) -> Self {
        let mut children: Vec<Vec<Option<usize>>> = vec![vec![None; alphabet]];
        let mut matched = vec![false];
        for p in patterns {
            let mut node = 0;
            for &s in p {
                node = match children[node][s] {
                    Some(n) => n,
                    None => {
                        children.push(vec![None; alphabet]);
                        matched.push(false);
                        let n = children.len() - 1;
                        children[node][s] = Some(n);
                        n
                    }
                };
            }
            matched[node] = true;
        }

        let n = children.len();
        let mut delta = vec![vec![0usize; alphabet]; n];
        let mut fail = vec![0usize; n];
        let mut queue = VecDeque::new();
        for s in 0..alphabet {
            match children[0][s] {
                Some(c) => {
                    delta[0][s] = c;
                    queue.push_back(c);
                }
                None => delta[0][s] = 0,
            }
        }
        while let Some(v) = queue.pop_front() {
            matched[v] = matched[v] || matched[fail[v]];
            for s in 0..alphabet {
                match children[v][s] {
                    Some(c) => {
                        fail[c] = delta[fail[v]][s];
                        delta[v][s] = c;
                        queue.push_back(c);
                    }
                    None => delta[v][s] = delta[fail[v]][s],
                }
            }
        }

        // Greatest set of unmatched states each having a successor in the set.
        let mut live: Vec<bool> = matched.iter().map(|m| !m).collect();
        loop {
            let mut changed = false;
            for v in 0..n {
                if live[v] && !delta[v].iter().any(|&w| live[w]) {
                    live[v] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        Self { root: 0, delta, live }
    }

    fn step(&self, state: usize, symbol: usize) -> Option<usize> {
        let next = self.delta[state][symbol];
        self.live[next].then_some(next)
    }
}
