//! Brute-force oracles shared by the integration suites. None of them goes
//! through the library's automata or spectral code.

#![allow(dead_code)]

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A subshift described the way a textbook would, for brute-force checks.
#[derive(Debug, Clone)]
pub enum Oracle {
    Full(usize),
    Sft(Vec<Vec<u8>>),
    Forbidden(usize, Vec<Vec<usize>>),
    Beta(f64),
}

impl Oracle {
    pub fn alphabet(&self) -> usize {
        match self {
            Oracle::Full(d) | Oracle::Forbidden(d, _) => *d,
            Oracle::Sft(a) => a.len(),
            Oracle::Beta(b) => b.ceil() as usize,
        }
    }

    /// Whether the 1-based word occurs in some point of the subshift.
    pub fn admissible(&self, w: &[usize]) -> bool {
        let d = self.alphabet();
        if w.iter().any(|&s| s == 0 || s > d) {
            return false;
        }
        match self {
            Oracle::Full(_) => true,
            Oracle::Sft(a) => w.windows(2).all(|p| a[p[0] - 1][p[1] - 1] == 1),
            Oracle::Forbidden(d, words) => right_extendable(*d, words, w),
            Oracle::Beta(beta) => beta_interval_nonempty(*beta, w),
        }
    }
}

fn contains_forbidden(words: &[Vec<usize>], w: &[usize]) -> bool {
    words
        .iter()
        .any(|f| f.len() <= w.len() && w.windows(f.len()).any(|x| x == f.as_slice()))
}

/// `w` avoids every forbidden word and extends to the right forever. With
/// forbidden words of length at most `L`, the future depends only on the last
/// `L − 1` symbols, so an extension by `d^{L−1} + 1` symbols revisits a
/// context and can be repeated.
fn right_extendable(d: usize, words: &[Vec<usize>], w: &[usize]) -> bool {
    if contains_forbidden(words, w) {
        return false;
    }
    let l = words.iter().map(Vec::len).max().unwrap_or(1).max(1);
    let budget = d.pow((l - 1) as u32) + 1;
    let mut memo = HashMap::new();
    extend(d, words, l, w.to_vec(), budget, &mut memo)
}

fn extend(
    d: usize,
    words: &[Vec<usize>],
    l: usize,
    w: Vec<usize>,
    budget: usize,
    memo: &mut HashMap<(Vec<usize>, usize), bool>,
) -> bool {
    if budget == 0 {
        return true;
    }
    let ctx = w[w.len().saturating_sub(l - 1)..].to_vec();
    if let Some(&r) = memo.get(&(ctx.clone(), budget)) {
        return r;
    }
    let mut ok = false;
    for s in 1..=d {
        let mut next = ctx.clone();
        next.push(s);
        // only the new suffix can create a forbidden factor
        if words.iter().any(|f| next.ends_with(f)) {
            continue;
        }
        if extend(d, words, l, next, budget - 1, memo) {
            ok = true;
            break;
        }
    }
    memo.insert((ctx, budget), ok);
    ok
}

/// Greedy β-expansions: the points of `[0, 1)` whose expansion starts with
/// the digits of `w` form an interval, tracked through the map
/// `x ↦ βx − digit`.
fn beta_interval_nonempty(beta: f64, w: &[usize]) -> bool {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for &s in w {
        let digit = (s - 1) as f64;
        let a = lo.max(digit / beta);
        let b = hi.min((digit + 1.0) / beta);
        if b - a <= 1e-9 {
            return false;
        }
        lo = beta * a - digit;
        hi = beta * b - digit;
    }
    true
}

/// Number of admissible words of length `n`, by depth-first enumeration of
/// admissible prefixes (languages are factorial, so pruning is exact).
pub fn brute_count(oracle: &Oracle, n: usize) -> u64 {
    fn go(o: &Oracle, w: &mut Vec<usize>, n: usize) -> u64 {
        if w.len() == n {
            return 1;
        }
        let mut total = 0;
        for s in 1..=o.alphabet() {
            w.push(s);
            if o.admissible(w) {
                total += go(o, w, n);
            }
            w.pop();
        }
        total
    }
    go(oracle, &mut Vec::new(), n)
}

pub fn brute_words(oracle: &Oracle, n: usize) -> Vec<Vec<usize>> {
    all_words(oracle.alphabet(), n)
        .into_iter()
        .filter(|w| oracle.admissible(w))
        .collect()
}

/// Every word of length `n` over `1..=d`, lexicographically.
pub fn all_words(d: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                (1..=d).map(move |s| {
                    let mut x = w.clone();
                    x.push(s);
                    x
                })
            })
            .collect();
    }
    out
}

/// `{ μ : |μ| ≤ l, μw admissible }` by exhaustive search, shortlex order.
pub fn brute_predecessors(oracle: &Oracle, w: &[usize], l: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for len in 0..=l {
        for mu in all_words(oracle.alphabet(), len) {
            let mut x = mu.clone();
            x.extend_from_slice(w);
            if oracle.admissible(&x) {
                out.push(mu);
            }
        }
    }
    out
}

/// `F_{n+2}`: golden-mean words of length `n`.
pub fn fibonacci_count(n: usize) -> u64 {
    let (mut a, mut b) = (1u64, 2u64);
    for _ in 1..n {
        (a, b) = (b, a + b);
    }
    if n == 0 {
        1
    } else {
        b
    }
}

/// Spectral radius of a nonnegative matrix by plain power iteration on
/// `A + I` (primitive for irreducible `A`), read off as a growth ratio.
pub fn power_radius(a: &[Vec<f64>]) -> f64 {
    let d = a.len();
    let mut x = vec![1.0; d];
    let mut ratio = 0.0;
    // fixed iteration count: the ratio can sit still for a few early steps
    for _ in 0..10_000 {
        let y: Vec<f64> = (0..d)
            .map(|i| x[i] + (0..d).map(|j| a[i][j] * x[j]).sum::<f64>())
            .collect();
        let norm = y.iter().cloned().fold(0.0, f64::max);
        ratio = norm / x.iter().cloned().fold(0.0, f64::max);
        x = y.iter().map(|v| v / norm).collect();
    }
    ratio - 1.0
}

/// `ε_n = Σ_{admissible μ, |μ| = n} Σ_j a_{μ_n j} t_j`, summed over words.
pub fn epsilon_by_words(a: &[Vec<u8>], t: &[f64], n: usize) -> f64 {
    let oracle = Oracle::Sft(a.to_vec());
    brute_words(&oracle, n)
        .iter()
        .map(|mu| {
            let last = mu[n - 1] - 1;
            (0..a.len()).filter(|&j| a[last][j] == 1).map(|j| t[j]).sum::<f64>()
        })
        .sum()
}

/// Irreducible 0/1 matrix: a random support plus the cycle `1 → 2 → … → d → 1`.
pub fn random_irreducible(d: usize, density: f64, rng: &mut ChaCha8Rng) -> Vec<Vec<u8>> {
    let mut a = vec![vec![0u8; d]; d];
    for (i, row) in a.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            if j == (i + 1) % d || rng.random::<f64>() < density {
                *x = 1;
            }
        }
    }
    a
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Strictly positive probability vector.
pub fn random_trace(d: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..d).map(|_| 0.05 + rng.random::<f64>()).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|x| x / s).collect()
}

pub fn as_f64(a: &[Vec<u8>]) -> Vec<Vec<f64>> {
    a.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect()
}
