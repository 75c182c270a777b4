//! l-past equivalence, the class counts `dim Q_l = |Ω_l|`, sofic detection
//! and the entropy bracket built on them.
//!
//! A one-sided point is proxied by its prefix of length `m` (the depth).
//! Reading a past word `μ` leaves the recognising automaton in a state `s(μ)`,
//! and `μw` is admissible iff `w` can be read from `s(μ)`. The predecessor set
//! of `w` is therefore encoded by the subset of states
//! `{ s(μ) : |μ| ≤ l }` from which `w` can be read, and distinct subsets give
//! distinct predecessor sets. Class counts are computed by running all those
//! states in lockstep, which avoids enumerating words.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subshift::{admissible, admissible_words, shortlex, topological_entropy, SubshiftSpec, Word};

/// Admissible words of length at most `l` with the automaton state each one
/// leads to, in shortlex order.
fn past_words(spec: &SubshiftSpec, l: usize) -> Result<Vec<(Word, usize)>> {
    let automaton = spec.automaton();
    let mut out = vec![(Word::empty(), automaton.start())];
    let mut frontier = out.clone();
    for _ in 0..l {
        let mut next = Vec::new();
        for (w, state) in &frontier {
            for s in 0..spec.alphabet_size() {
                if let Some(t) = automaton.step(*state, s)? {
                    let mut symbols = w.symbols().to_vec();
                    symbols.push(s + 1);
                    next.push((Word::new(symbols), t));
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    Ok(out)
}

/// `Λ_l(w)`: admissible `μ` with `|μ| ≤ l` and `μw` admissible, shortlex
/// sorted. Always contains the empty word.
pub fn predecessor_set(w: &Word, l: usize, spec: &SubshiftSpec) -> Result<Vec<Word>> {
    if w.is_empty() {
        return Err(Error::InvalidArgument("predecessor sets need a nonempty word".into()));
    }
    if !admissible(w, spec)? {
        return Err(Error::InadmissibleWord(w.symbols().to_vec()));
    }
    let mut out = Vec::new();
    for (mu, state) in past_words(spec, l)? {
        if spec.run_from(state, w)?.is_some() {
            out.push(mu);
        }
    }
    out.sort_by(shortlex);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PastClass {
    /// Lexicographically smallest member.
    pub representative: Word,
    pub members: Vec<Word>,
    pub predecessors: Vec<Word>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PastPartition {
    pub l: usize,
    pub depth: usize,
    pub classes: Vec<PastClass>,
    pub class_count: usize,
    /// Class count unchanged between depth `m − 1` and `m`.
    pub stabilized: bool,
}

/// Partition of the admissible words of length `depth` into l-past
/// equivalence classes.
pub fn omega_l(spec: &SubshiftSpec, l: usize, depth: usize) -> Result<PastPartition> {
    if depth < l.max(1) {
        return Err(Error::InvalidArgument(format!(
            "depth {depth} must be at least max(l, 1) = {}",
            l.max(1)
        )));
    }
    let words = admissible_words(spec, depth)?;
    if words.is_empty() {
        return Err(Error::EmptySubshift);
    }
    let past = past_words(spec, l)?;
    let mut groups: BTreeMap<Vec<bool>, Vec<Word>> = BTreeMap::new();
    for w in words {
        let mut key = Vec::with_capacity(past.len());
        for (_, state) in &past {
            key.push(spec.run_from(*state, &w)?.is_some());
        }
        groups.entry(key).or_default().push(w);
    }
    let mut classes: Vec<PastClass> = groups
        .into_iter()
        .map(|(key, members)| {
            let mut predecessors: Vec<Word> = past
                .iter()
                .zip(&key)
                .filter(|(_, &alive)| alive)
                .map(|((mu, _), _)| mu.clone())
                .collect();
            predecessors.sort_by(shortlex);
            PastClass {
                representative: members[0].clone(),
                members,
                predecessors,
            }
        })
        .collect();
    classes.sort_by(|a, b| a.representative.cmp(&b.representative));
    let counts = class_counts(spec, l, depth)?;
    Ok(PastPartition {
        l,
        depth,
        class_count: classes.len(),
        stabilized: counts[depth] == counts[depth - 1],
        classes,
    })
}

const DEAD: u32 = u32::MAX;

/// Automaton states renumbered densely, with transitions filled in on demand.
struct DenseAutomaton<'a> {
    spec: &'a SubshiftSpec,
    ids: HashMap<usize, u32>,
    states: Vec<usize>,
    table: Vec<Option<u32>>,
    known: Vec<bool>,
}

impl<'a> DenseAutomaton<'a> {
    fn new(spec: &'a SubshiftSpec) -> Self {
        Self {
            spec,
            ids: HashMap::new(),
            states: Vec::new(),
            table: Vec::new(),
            known: Vec::new(),
        }
    }

    fn id(&mut self, state: usize) -> u32 {
        if let Some(&id) = self.ids.get(&state) {
            return id;
        }
        let id = self.states.len() as u32;
        self.ids.insert(state, id);
        self.states.push(state);
        let d = self.spec.alphabet_size();
        self.table.extend(std::iter::repeat_n(None, d));
        self.known.extend(std::iter::repeat_n(false, d));
        id
    }

    fn step(&mut self, id: u32, symbol: usize) -> Result<u32> {
        let slot = id as usize * self.spec.alphabet_size() + symbol;
        if !self.known[slot] {
            let next = self.spec.automaton().step(self.states[id as usize], symbol)?;
            self.table[slot] = next.map(|t| self.id(t));
            self.known[slot] = true;
        }
        Ok(self.table[slot].unwrap_or(DEAD))
    }
}

/// `table[l][m]`: number of l-past classes among admissible words of length
/// `m`, for `l = 0..=l_max` and `m = 0..=max_depth`.
///
/// The past states for `l` are a prefix (in breadth-first order) of those for
/// `l_max`, so one lockstep run serves every `l`: the class count for `l` is
/// the number of distinct length-`k_l` prefixes of the liveness masks, read off
/// the longest common prefixes of the sorted masks.
pub fn class_count_table(spec: &SubshiftSpec, l_max: usize, max_depth: usize) -> Result<Vec<Vec<usize>>> {
    let mut dense = DenseAutomaton::new(spec);
    let d = spec.alphabet_size();

    // breadth-first past states and the prefix length for each l
    let start = dense.id(spec.automaton().start());
    let mut past = vec![start];
    let mut seen: HashSet<u32> = HashSet::from([start]);
    let mut prefix_len = vec![1usize];
    let mut frontier = vec![start];
    for _ in 0..l_max {
        let mut next = Vec::new();
        for &q in &frontier {
            for s in 0..d {
                let t = dense.step(q, s)?;
                if t != DEAD && seen.insert(t) {
                    past.push(t);
                    next.push(t);
                }
            }
        }
        prefix_len.push(past.len());
        frontier = next;
    }

    let mut table = vec![Vec::with_capacity(max_depth + 1); l_max + 1];
    let mut tuples: HashSet<Vec<u32>> = HashSet::new();
    if !spec.is_empty() {
        tuples.insert(past.clone());
    }
    record_counts(&tuples, &prefix_len, &mut table);
    for _ in 0..max_depth {
        let mut next: HashSet<Vec<u32>> = HashSet::with_capacity(tuples.len() * 2);
        for tuple in &tuples {
            for s in 0..d {
                // component 0 follows the word itself from the start state
                if dense.step(tuple[0], s)? == DEAD {
                    continue;
                }
                let mut out = Vec::with_capacity(tuple.len());
                for &q in tuple {
                    out.push(if q == DEAD { DEAD } else { dense.step(q, s)? });
                }
                next.insert(out);
            }
        }
        tuples = next;
        record_counts(&tuples, &prefix_len, &mut table);
    }
    Ok(table)
}

fn record_counts(tuples: &HashSet<Vec<u32>>, prefix_len: &[usize], table: &mut [Vec<usize>]) {
    if tuples.is_empty() {
        table.iter_mut().for_each(|row| row.push(0));
        return;
    }
    let width = tuples.iter().next().map_or(0, Vec::len);
    let words = width.div_ceil(64);
    // component i lives in bit 63 − i % 64 so integer order is prefix order
    let mut masks: Vec<Vec<u64>> = tuples
        .iter()
        .map(|t| {
            let mut m = vec![0u64; words];
            for (i, &q) in t.iter().enumerate() {
                if q != DEAD {
                    m[i / 64] |= 1 << (63 - i % 64);
                }
            }
            m
        })
        .collect();
    masks.sort_unstable();
    let lcps: Vec<usize> = masks
        .windows(2)
        .map(|pair| {
            pair[0]
                .iter()
                .zip(&pair[1])
                .position(|(a, b)| a != b)
                .map_or(width, |w| w * 64 + (pair[0][w] ^ pair[1][w]).leading_zeros() as usize)
        })
        .collect();
    for (row, &k) in table.iter_mut().zip(prefix_len) {
        row.push(1 + lcps.iter().filter(|&&lcp| lcp < k).count());
    }
}

/// Number of l-past classes among admissible words of each length
/// `0..=max_depth`.
pub fn class_counts(spec: &SubshiftSpec, l: usize, max_depth: usize) -> Result<Vec<usize>> {
    Ok(class_count_table(spec, l, max_depth)?.swap_remove(l))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimQ {
    pub n: usize,
    pub depth: usize,
    pub count: usize,
    /// When false the count is only a lower bound.
    pub stabilized: bool,
}

/// `dim Q_n = |Ω_n|` at proxy depth `depth`.
pub fn dim_q(spec: &SubshiftSpec, n: usize, depth: usize) -> Result<DimQ> {
    if depth < n.max(1) {
        return Err(Error::InvalidArgument(format!(
            "depth {depth} must be at least max(n, 1) = {}",
            n.max(1)
        )));
    }
    let counts = class_counts(spec, n, depth)?;
    dim_from_row(n, depth, &counts)
}

fn dim_from_row(n: usize, depth: usize, counts: &[usize]) -> Result<DimQ> {
    if counts[depth] == 0 {
        return Err(Error::EmptySubshift);
    }
    Ok(DimQ {
        n,
        depth,
        count: counts[depth],
        stabilized: counts[depth] == counts[depth - 1],
    })
}

/// `dim_q(spec, n, depth_for(n))` for `n = 1..=n_max` from a single run.
fn dims_upto(spec: &SubshiftSpec, n_max: usize, depth_for: impl Fn(usize) -> usize) -> Result<Vec<DimQ>> {
    let max_depth = (1..=n_max).map(&depth_for).max().unwrap_or(1);
    let table = class_count_table(spec, n_max, max_depth)?;
    (1..=n_max)
        .map(|n| dim_from_row(n, depth_for(n), &table[n]))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoficReport {
    pub sofic_detected: bool,
    /// Class counts for `l = 1..=l_max`.
    pub counts: Vec<usize>,
    pub stabilized: Vec<bool>,
    /// Proxy depth used for each `l`.
    pub depths: Vec<usize>,
    /// Longest forbidden word, when the input is a truncated forbidden list.
    pub length_cap: Option<usize>,
}

/// Minimum length of the trailing window on which the counts must be constant.
pub const SOFIC_WINDOW: usize = 3;

fn bounded_tail(dims: &[DimQ]) -> bool {
    dims.len() >= SOFIC_WINDOW && {
        let tail = &dims[dims.len() - SOFIC_WINDOW..];
        tail.iter().all(|d| d.stabilized && d.count == tail[0].count)
    }
}

/// Semi-decision for soficity: `true` when the class counts are constant and
/// depth-stabilised on a trailing window; `false` means "not detected".
pub fn sofic_check(spec: &SubshiftSpec, l_max: usize, depth: usize) -> Result<SoficReport> {
    if l_max < 2 {
        return Err(Error::InvalidArgument("l_max must be at least 2".into()));
    }
    let dims = dims_upto(spec, l_max, |l| depth.max(l))?;
    Ok(SoficReport {
        sofic_detected: bounded_tail(&dims),
        counts: dims.iter().map(|d| d.count).collect(),
        stabilized: dims.iter().map(|d| d.stabilized).collect(),
        depths: dims.iter().map(|d| d.depth).collect(),
        length_cap: spec.forbidden_length_cap(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyBracket {
    pub lower: f64,
    pub upper: f64,
    /// `(2/n) log dim Q_n` for `n = 1..=n_max`.
    pub correction_sequence: Vec<f64>,
    pub dims: Vec<DimQ>,
    /// Counts constant on the trailing window, so the limsup of the
    /// correction is taken to be 0.
    pub bounded: bool,
}

/// Bracket `[h_top, h_top + 2 limsup (1/n) log dim Q_n]`.
///
/// `dim Q_n` is evaluated at proxy depth `max(depth, n + 1)`. With bounded
/// counts the correction vanishes in the limit and the bracket closes;
/// otherwise the upper end uses the smallest correction on the trailing
/// window.
pub fn entropy_bracket(spec: &SubshiftSpec, n_max: usize, depth: usize) -> Result<EntropyBracket> {
    if n_max < 4 {
        return Err(Error::InvalidArgument("n_max must be at least 4".into()));
    }
    let lower = topological_entropy(spec, n_max)?.extrapolated;
    let dims = dims_upto(spec, n_max, |n| depth.max(n + 1))?;
    let correction_sequence: Vec<f64> = dims
        .iter()
        .map(|d| 2.0 * (d.count as f64).ln() / d.n as f64)
        .collect();
    let bounded = bounded_tail(&dims);
    let upper = if bounded {
        lower
    } else {
        let tail = &correction_sequence[correction_sequence.len() - SOFIC_WINDOW..];
        lower + tail.iter().cloned().fold(f64::INFINITY, f64::min)
    };
    Ok(EntropyBracket {
        lower,
        upper,
        correction_sequence,
        dims,
        bounded,
    })
}
