//! Rényi expansion of 1 in base β and its quasi-greedy form.
//!
//! The recursion `x_0 = 1`, `d_k = ⌊β x_{k−1}⌋`, `x_k = β x_{k−1} − d_k` is
//! run in exact rational arithmetic on the shortest decimal representation of
//! the input. The input is treated as a finite-precision stand-in for β: when
//! `β x_{k−1}` lands within `snap_tolerance` of an integer the expansion is
//! declared terminating there, and a distance inside
//! `(snap_tolerance, certainty_margin]` is reported as an uncertain digit.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaOptions {
    pub snap_tolerance: f64,
    pub certainty_margin: f64,
}

impl Default for BetaOptions {
    fn default() -> Self {
        Self {
            snap_tolerance: 1e-9,
            certainty_margin: 1e-6,
        }
    }
}

/// `digits[preperiod..preperiod + period]` repeats forever.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Periodicity {
    pub preperiod: usize,
    pub period: usize,
}

/// Digit sequence with an optional periodic tail; digits beyond the computed
/// prefix are only available when the tail is known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DigitSequence {
    pub digits: Vec<u32>,
    pub periodicity: Option<Periodicity>,
}

impl DigitSequence {
    /// Digit at 0-based position `i`.
    pub fn digit(&self, i: usize) -> Option<u32> {
        if let Some(d) = self.digits.get(i) {
            return Some(*d);
        }
        let p = self.periodicity?;
        let j = p.preperiod + (i - p.preperiod) % p.period;
        self.digits.get(j).copied()
    }

    /// Number of digits that can be read, `None` when unbounded.
    pub fn available(&self) -> Option<usize> {
        match self.periodicity {
            Some(_) => None,
            None => Some(self.digits.len()),
        }
    }

    pub fn prefix(&self, n: usize) -> Result<Vec<u32>> {
        (0..n)
            .map(|i| {
                self.digit(i).ok_or(Error::DigitDepthExceeded {
                    needed: i + 1,
                    available: self.digits.len(),
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaExpansion {
    pub beta: f64,
    /// Greedy digits; when `terminating` the last one is nonzero and the
    /// expansion stops there.
    pub greedy: Vec<u32>,
    pub terminating: bool,
    /// Quasi-greedy expansion `d*(β)`, the one that governs admissibility.
    pub quasi_greedy: DigitSequence,
}

impl BetaExpansion {
    /// Eventual periodicity of `d*(β)` detected within the computed digits.
    pub fn periodicity(&self) -> Option<Periodicity> {
        self.quasi_greedy.periodicity
    }

    /// `⌈β⌉`, the number of digits `0..⌈β⌉−1`.
    pub fn alphabet_size(&self) -> usize {
        self.beta.ceil() as usize
    }
}

/// Exact rational value of the shortest decimal that round-trips to `x`.
fn decimal_rational(x: f64) -> BigRational {
    // f64's Display is the shortest round-trip form and never uses exponents.
    let text = format!("{x}");
    let (int_part, frac_part) = match text.split_once('.') {
        Some((i, f)) => (i, f),
        None => (text.as_str(), ""),
    };
    let digits: BigInt = format!("{int_part}{frac_part}")
        .parse()
        .expect("f64 display is a decimal literal");
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    BigRational::new(digits, denom)
}

pub fn beta_expansion_of_one(beta: f64, n_digits: usize, opts: &BetaOptions) -> Result<BetaExpansion> {
    if !beta.is_finite() || beta <= 1.0 {
        return Err(Error::InvalidBeta(beta));
    }
    if n_digits == 0 {
        return Err(Error::InvalidArgument("n_digits must be at least 1".into()));
    }
    let base = decimal_rational(beta);
    let mut x = BigRational::one();
    let mut orbit: Vec<f64> = vec![1.0];
    let mut greedy: Vec<u32> = Vec::new();

    for k in 1..=n_digits {
        let y = &base * &x;
        let floor = y.floor();
        let frac = &y - &floor;
        let digit = floor.to_integer().to_u32().expect("digit fits in u32");
        let frac_f = frac.to_f64().unwrap_or(0.0);
        let (near, snapped_digit) = if frac_f <= 1.0 - frac_f {
            (frac_f, digit)
        } else {
            (1.0 - frac_f, digit + 1)
        };
        if near <= opts.snap_tolerance {
            greedy.push(snapped_digit);
            // A snap to 0 at the very first digit cannot happen for β > 1.
            let m = greedy.len();
            let mut qg = greedy.clone();
            qg[m - 1] -= 1;
            let quasi_greedy = DigitSequence {
                digits: qg,
                periodicity: Some(Periodicity {
                    preperiod: 0,
                    period: m,
                }),
            };
            return Ok(BetaExpansion {
                beta,
                greedy,
                terminating: true,
                quasi_greedy: extend(quasi_greedy, n_digits),
            });
        }
        if near <= opts.certainty_margin {
            return Err(Error::UncertainDigit { index: k, distance: near });
        }
        greedy.push(digit);
        x = frac;
        if x.is_zero() {
            unreachable!("exact zero remainder is caught by the snap test");
        }
        let xf = x.to_f64().unwrap_or(0.0);
        if let Some(j) = orbit.iter().position(|&prev| (prev - xf).abs() <= opts.snap_tolerance) {
            // x_k ≈ x_j: digits j+1..=k repeat (1-based), i.e. 0-based j..k.
            let seq = DigitSequence {
                digits: greedy.clone(),
                periodicity: Some(Periodicity {
                    preperiod: j,
                    period: k - j,
                }),
            };
            return Ok(BetaExpansion {
                beta,
                greedy,
                terminating: false,
                quasi_greedy: extend(seq, n_digits),
            });
        }
        orbit.push(xf);
    }

    Ok(BetaExpansion {
        beta,
        greedy: greedy.clone(),
        terminating: false,
        quasi_greedy: DigitSequence {
            digits: greedy,
            periodicity: None,
        },
    })
}

fn extend(mut seq: DigitSequence, n: usize) -> DigitSequence {
    let full: Vec<u32> = (0..n.max(seq.digits.len()))
        .map(|i| seq.digit(i).expect("periodic"))
        .collect();
    seq.digits = full;
    seq
}
