//! One-sided subshifts: presentations, admissibility, word counts and
//! topological entropy.
//!
//! Symbols are 1-based (`1..=d`) everywhere in the public API. β-shift digits
//! `0..⌈β⌉−1` map to symbols by adding one.

mod automaton;
pub mod beta;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ZeroOneMatrix;
use crate::spectral::{spectral_radius, PerronOptions};

pub(crate) use automaton::Automaton;
use automaton::FactorAutomaton;
pub use beta::{beta_expansion_of_one, BetaExpansion, BetaOptions, DigitSequence, Periodicity};

/// Finite word over `{1, …, d}`. The empty word is allowed.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(symbols: Vec<usize>) -> Self {
        Word(symbols)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// From β-expansion digits `0..` to symbols `1..`.
    pub fn from_digits(digits: &[u32]) -> Self {
        Word(digits.iter().map(|&d| d as usize + 1).collect())
    }

    pub fn to_digits(&self) -> Vec<u32> {
        self.0.iter().map(|&s| (s - 1) as u32).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[usize] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut s = self.0.clone();
        s.extend_from_slice(&other.0);
        Word(s)
    }

    pub fn check_alphabet(&self, alphabet: usize) -> Result<()> {
        match self.0.iter().find(|&&s| s == 0 || s > alphabet) {
            Some(&symbol) => Err(Error::SymbolOutOfRange { symbol, alphabet }),
            None => Ok(()),
        }
    }

    fn zero_based(&self) -> Vec<usize> {
        self.0.iter().map(|s| s - 1).collect()
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<Vec<usize>> for Word {
    fn from(v: Vec<usize>) -> Self {
        Word(v)
    }
}

impl<const N: usize> From<[usize; N]> for Word {
    fn from(v: [usize; N]) -> Self {
        Word(v.to_vec())
    }
}

/// Canonical order for word lists: shorter first, then lexicographic.
pub fn shortlex(a: &Word, b: &Word) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

#[derive(Debug, Clone, PartialEq)]
pub enum SubshiftKind {
    Full { alphabet: usize },
    Sft(ZeroOneMatrix),
    Forbidden { alphabet: usize, words: Vec<Word> },
    Beta { beta: f64, digit_depth: usize },
}

/// A validated one-sided subshift together with the automaton that
/// recognises its language.
#[derive(Debug, Clone, PartialEq)]
pub struct SubshiftSpec {
    kind: SubshiftKind,
    alphabet: usize,
    expansion: Option<BetaExpansion>,
    automaton: Automaton,
}

impl SubshiftSpec {
    pub fn full(alphabet: usize) -> Result<Self> {
        if alphabet == 0 {
            return Err(Error::InvalidSpec("alphabet must have at least one symbol".into()));
        }
        Ok(Self {
            kind: SubshiftKind::Full { alphabet },
            alphabet,
            expansion: None,
            automaton: Automaton::Full { alphabet },
        })
    }

    /// Markov subshift of a 0/1 matrix with no zero row or column.
    pub fn sft(matrix: ZeroOneMatrix) -> Result<Self> {
        matrix.check_no_zero_lines()?;
        Ok(Self {
            alphabet: matrix.dim(),
            automaton: Automaton::Sft {
                matrix: matrix.clone(),
            },
            kind: SubshiftKind::Sft(matrix),
            expansion: None,
        })
    }

    /// Sequences avoiding every listed word as a factor.
    pub fn forbidden(alphabet: usize, words: Vec<Word>) -> Result<Self> {
        if alphabet == 0 {
            return Err(Error::InvalidSpec("alphabet must have at least one symbol".into()));
        }
        for (i, w) in words.iter().enumerate() {
            if w.is_empty() {
                return Err(Error::InvalidSpec(format!("forbidden word {i} is empty")));
            }
            w.check_alphabet(alphabet)?;
        }
        let patterns: Vec<Vec<usize>> = words.iter().map(Word::zero_based).collect();
        Ok(Self {
            automaton: Automaton::Factor(FactorAutomaton::new(alphabet, &patterns)),
            kind: SubshiftKind::Forbidden { alphabet, words },
            alphabet,
            expansion: None,
        })
    }

    pub fn beta(beta: f64, digit_depth: usize) -> Result<Self> {
        Self::beta_with(beta, digit_depth, &BetaOptions::default())
    }

    pub fn beta_with(beta: f64, digit_depth: usize, opts: &BetaOptions) -> Result<Self> {
        let expansion = beta_expansion_of_one(beta, digit_depth, opts)?;
        Ok(Self {
            alphabet: expansion.alphabet_size(),
            automaton: Automaton::Beta {
                expansion: expansion.quasi_greedy.clone(),
            },
            kind: SubshiftKind::Beta { beta, digit_depth },
            expansion: Some(expansion),
        })
    }

    /// The even shift (runs of `1` between two `2`s have even length),
    /// approximated by forbidding `2 1^k 2` for odd `k` with `k + 2 ≤ cap`.
    pub fn even_shift(cap: usize) -> Result<Self> {
        let words = (1..)
            .step_by(2)
            .take_while(|k| k + 2 <= cap)
            .map(|k| {
                let mut w = vec![2];
                w.extend(std::iter::repeat_n(1, k));
                w.push(2);
                Word(w)
            })
            .collect();
        Self::forbidden(2, words)
    }

    pub fn kind(&self) -> &SubshiftKind {
        &self.kind
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet
    }

    pub fn beta_expansion(&self) -> Option<&BetaExpansion> {
        self.expansion.as_ref()
    }

    pub(crate) fn automaton(&self) -> &Automaton {
        &self.automaton
    }

    pub fn is_empty(&self) -> bool {
        !self.automaton.is_nonempty()
    }

    /// Length of the longest forbidden word, for truncated presentations.
    pub fn forbidden_length_cap(&self) -> Option<usize> {
        match &self.kind {
            SubshiftKind::Forbidden { words, .. } => words.iter().map(Word::len).max(),
            _ => None,
        }
    }

    /// Transition matrix when the language is Markov with respect to single
    /// symbols (full shifts and SFTs).
    pub fn transition_matrix(&self) -> Option<ZeroOneMatrix> {
        match &self.kind {
            SubshiftKind::Full { alphabet } => Some(ZeroOneMatrix::ones(*alphabet)),
            SubshiftKind::Sft(a) => Some(a.clone()),
            _ => None,
        }
    }

    /// Symbols `1..=d` as 0-based indices and the state reached; `None` if the
    /// word cannot be read.
    pub(crate) fn run_from(&self, state: usize, word: &Word) -> Result<Option<usize>> {
        self.automaton.run(state, &word.zero_based())
    }
}

/// Does `w` occur in some point of the subshift?
pub fn admissible(w: &Word, spec: &SubshiftSpec) -> Result<bool> {
    w.check_alphabet(spec.alphabet)?;
    if spec.is_empty() {
        return Ok(false);
    }
    match &spec.kind {
        SubshiftKind::Full { .. } => Ok(true),
        SubshiftKind::Sft(a) => Ok(w.0.windows(2).all(|p| a.allows(p[0] - 1, p[1] - 1))),
        SubshiftKind::Forbidden { .. } => Ok(spec.run_from(spec.automaton.start(), w)?.is_some()),
        SubshiftKind::Beta { .. } => {
            let expansion = spec.expansion.as_ref().expect("beta spec carries its expansion");
            beta_admissible(&w.to_digits(), &expansion.quasi_greedy)
        }
    }
}

/// Parry's criterion: every suffix is lexicographically at most the prefix of
/// `d*(β)` of the same length.
fn beta_admissible(digits: &[u32], quasi_greedy: &DigitSequence) -> Result<bool> {
    let bound = quasi_greedy.prefix(digits.len())?;
    Ok((0..digits.len()).all(|k| digits[k..] <= bound[..digits.len() - k]))
}

/// All admissible words of length `n`, in lexicographic order.
pub fn admissible_words(spec: &SubshiftSpec, n: usize) -> Result<Vec<Word>> {
    fn extend(
        spec: &SubshiftSpec,
        state: usize,
        prefix: &mut Vec<usize>,
        n: usize,
        out: &mut Vec<Word>,
    ) -> Result<()> {
        if prefix.len() == n {
            out.push(Word(prefix.iter().map(|s| s + 1).collect()));
            return Ok(());
        }
        for s in 0..spec.alphabet {
            if let Some(next) = spec.automaton.step(state, s)? {
                prefix.push(s);
                extend(spec, next, prefix, n, out)?;
                prefix.pop();
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    if !spec.is_empty() {
        extend(spec, spec.automaton.start(), &mut Vec::with_capacity(n), n, &mut out)?;
    }
    Ok(out)
}

/// `θ_n`, the number of admissible words of length `n` (`θ_0 = 1`).
pub fn count_words(spec: &SubshiftSpec, n: usize) -> Result<BigUint> {
    Ok(count_words_upto(spec, n)?.pop().expect("θ_0 is always present"))
}

/// `θ_0, …, θ_{n_max}` in one pass.
pub fn count_words_upto(spec: &SubshiftSpec, n_max: usize) -> Result<Vec<BigUint>> {
    let mut out = vec![BigUint::from(1u32)];
    if n_max == 0 {
        return Ok(out);
    }
    if spec.is_empty() {
        out.extend(std::iter::repeat_n(BigUint::zero(), n_max));
        return Ok(out);
    }
    match &spec.kind {
        SubshiftKind::Full { alphabet } => {
            let d = BigUint::from(*alphabet);
            for _ in 0..n_max {
                let next = out.last().unwrap() * &d;
                out.push(next);
            }
        }
        SubshiftKind::Sft(a) => {
            // paths ending at each symbol: 1ᵀ A^{n−1}
            let d = a.dim();
            let mut row = vec![BigUint::from(1u32); d];
            out.push(row.iter().sum());
            for _ in 1..n_max {
                let mut next = vec![BigUint::zero(); d];
                for (i, ri) in row.iter().enumerate() {
                    for (k, nk) in next.iter_mut().enumerate() {
                        if a.allows(i, k) {
                            *nk += ri;
                        }
                    }
                }
                row = next;
                out.push(row.iter().sum());
            }
        }
        SubshiftKind::Forbidden { .. } | SubshiftKind::Beta { .. } => {
            let automaton = &spec.automaton;
            let mut frontier: BTreeMap<usize, BigUint> = BTreeMap::new();
            frontier.insert(automaton.start(), BigUint::from(1u32));
            for _ in 0..n_max {
                let mut next: BTreeMap<usize, BigUint> = BTreeMap::new();
                for (&state, count) in &frontier {
                    for s in 0..spec.alphabet {
                        if let Some(t) = automaton.step(state, s)? {
                            *next.entry(t).or_default() += count;
                        }
                    }
                }
                out.push(next.values().sum());
                frontier = next;
            }
        }
    }
    Ok(out)
}

/// How the word counts were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountingMethod {
    Closed,
    TransferMatrix,
    FactorAutomaton,
    BetaFollower,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyEstimate {
    /// `θ_1, …, θ_{n_max}`.
    pub theta: Vec<BigUint>,
    /// `(1/n) log θ_n` for `n = 1..=n_max`.
    pub log_rates: Vec<f64>,
    pub extrapolated: f64,
    pub exact: Option<f64>,
    pub method: CountingMethod,
}

/// Natural logarithm of an arbitrarily large positive integer.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits").ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().expect("fits").ln() + shift as f64 * std::f64::consts::LN_2
}

/// Estimates `h_top = lim (1/n) log θ_n`.
///
/// The estimate is the smaller of `min_n (1/n) log θ_n`, which bounds the
/// limit from above because the counts are submultiplicative, and the slope
/// of `log θ_n` over the upper half of the window, which removes the `C/n`
/// bias of the plain rates.
pub fn topological_entropy(spec: &SubshiftSpec, n_max: usize) -> Result<EntropyEstimate> {
    if n_max < 2 {
        return Err(Error::InvalidArgument("n_max must be at least 2".into()));
    }
    let mut counts = count_words_upto(spec, n_max)?;
    if counts[1].is_zero() {
        return Err(Error::EmptySubshift);
    }
    counts.remove(0);
    let logs: Vec<f64> = counts.iter().map(ln_biguint).collect();
    let log_rates: Vec<f64> = logs.iter().enumerate().map(|(i, l)| l / (i + 1) as f64).collect();
    let fekete = log_rates.iter().cloned().fold(f64::INFINITY, f64::min);
    let mid = n_max.div_ceil(2);
    let slope = (logs[n_max - 1] - logs[mid - 1]) / (n_max - mid) as f64;
    let extrapolated = fekete.min(slope);

    let (exact, method) = match &spec.kind {
        SubshiftKind::Full { alphabet } => (Some((*alphabet as f64).ln()), CountingMethod::Closed),
        SubshiftKind::Sft(a) => (Some(sft_entropy_exact(a)?), CountingMethod::TransferMatrix),
        SubshiftKind::Forbidden { .. } => (None, CountingMethod::FactorAutomaton),
        SubshiftKind::Beta { .. } => (None, CountingMethod::BetaFollower),
    };
    Ok(EntropyEstimate {
        theta: counts,
        log_rates,
        extrapolated,
        exact,
        method,
    })
}

/// `log r(A)`, the entropy of the Markov subshift of `A`.
pub fn sft_entropy_exact(a: &ZeroOneMatrix) -> Result<f64> {
    a.check_no_zero_lines()?;
    Ok(spectral_radius(&a.to_nonnegative(), &PerronOptions::default())?.ln())
}
