//! Trace space of a Cuntz–Krieger system in its matrix model.
//!
//! A trace on the homogeneous subalgebra is a coherent sequence `(t_r)` of
//! nonnegative vectors with `A t_{r+1} = t_r`; only finite truncations
//! `t_0, …, t_R` are represented. The shift operators, their normalised
//! versions and the inverse temperatures are all expressed through `A`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{NonnegativeMatrix, SupportDigraph, ZeroOneMatrix};
use crate::spectral::{
    self, aperiodic, column_sum_powers, irreducible, perron_by_component, perron_vectors, PerronOptions, RadiusBracket,
};

pub const COHERENCE_TOL: f64 = 1e-9;
const SUM_TOL: f64 = 1e-12;

fn l1_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Values of a normalised trace on the minimal projections `P_1, …, P_d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct TraceVector(Vec<f64>);

impl TraceVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidTrace("empty vector".into()));
        }
        if let Some(i) = values.iter().position(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidTrace(format!("entry {} is {}", i + 1, values[i])));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidTrace(format!("entries sum to {sum}, not 1")));
        }
        Ok(Self(values))
    }

    /// Scales a nonnegative, nonzero vector to total mass 1.
    pub fn normalized(values: Vec<f64>) -> Result<Self> {
        let sum: f64 = values.iter().sum();
        if !(sum > 0.0 && sum.is_finite()) {
            return Err(Error::InvalidTrace(format!("cannot normalise a vector with sum {sum}")));
        }
        Self::new(values.into_iter().map(|x| x / sum).collect())
    }

    pub fn uniform(dim: usize) -> Self {
        Self(vec![1.0 / dim as f64; dim])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.0.iter().all(|&x| x > 0.0)
    }
}

impl TryFrom<Vec<f64>> for TraceVector {
    type Error = Error;
    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<TraceVector> for Vec<f64> {
    fn from(t: TraceVector) -> Self {
        t.0
    }
}

/// Truncation `t_0, …, t_R` of a coherent sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherentSequence {
    pub matrix: ZeroOneMatrix,
    pub levels: Vec<Vec<f64>>,
    /// `‖A t_{r+1} − t_r‖₁` for `r < R`.
    pub residuals: Vec<f64>,
    /// Whether `Σ t_0 = 1`.
    pub normalized: bool,
}

impl CoherentSequence {
    fn assemble(matrix: ZeroOneMatrix, levels: Vec<Vec<f64>>) -> Self {
        let residuals = levels
            .windows(2)
            .map(|w| l1_dist(&matrix.mul_vec(&w[1]), &w[0]))
            .collect();
        let normalized = (levels[0].iter().sum::<f64>() - 1.0).abs() <= SUM_TOL;
        Self {
            matrix,
            levels,
            residuals,
            normalized,
        }
    }

    /// Accepts given levels if every residual is within `tol`.
    pub fn from_levels(matrix: ZeroOneMatrix, levels: Vec<Vec<f64>>, tol: f64) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidTrace("a coherent sequence needs at least one level".into()));
        }
        for (r, level) in levels.iter().enumerate() {
            if level.len() != matrix.dim() {
                return Err(Error::InvalidTrace(format!(
                    "level {r} has length {}, expected {}",
                    level.len(),
                    matrix.dim()
                )));
            }
            if level.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(Error::InvalidTrace(format!("level {r} has a negative or non-finite entry")));
            }
        }
        let seq = Self::assemble(matrix, levels);
        if let Some(r) = seq.residuals.iter().position(|&e| e > tol) {
            return Err(Error::InvalidTrace(format!(
                "levels {r} and {} are not coherent (residual {:e})",
                r + 1,
                seq.residuals[r]
            )));
        }
        Ok(seq)
    }

    /// The coherent truncation generated from the deepest level:
    /// `t_r = A^{R−r} t_R`, rescaled so that `Σ t_0 = 1`.
    pub fn from_top(matrix: ZeroOneMatrix, top: &TraceVector, depth: usize) -> Result<Self> {
        check_dim(&matrix, top)?;
        let mut levels = vec![top.values().to_vec()];
        for _ in 0..depth {
            let next = matrix.mul_vec(levels.last().unwrap());
            levels.push(next);
        }
        levels.reverse();
        let total: f64 = levels[0].iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidTrace("A^R t_R vanishes".into()));
        }
        for level in &mut levels {
            level.iter_mut().for_each(|x| *x /= total);
        }
        Ok(Self::assemble(matrix, levels))
    }

    /// Extends `t_0` downwards by solving `A t_{r+1} = t_r` in the
    /// nonnegative least-squares sense. Residuals record how far each step
    /// is from exact coherence; nothing is rejected.
    pub fn extend_from(matrix: ZeroOneMatrix, t0: &TraceVector, depth: usize) -> Result<Self> {
        check_dim(&matrix, t0)?;
        let mut levels = vec![t0.values().to_vec()];
        for _ in 0..depth {
            let next = nnls(&matrix, levels.last().unwrap());
            levels.push(next);
        }
        Ok(Self::assemble(matrix, levels))
    }

    /// `R`, the index of the deepest level.
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }

    pub fn is_coherent(&self, tol: f64) -> bool {
        self.max_residual() <= tol
    }

    /// `Σ_k t_r(k) d_{r,k}` for each level, with `d_{r,k}` the column sums of
    /// `A^r` (`d_{0,k} = 1`). Constant, equal to `Σ t_0`, on coherent sequences.
    pub fn weighted_sums(&self) -> Result<Vec<f64>> {
        self.levels
            .iter()
            .enumerate()
            .map(|(r, level)| {
                let d = if r == 0 {
                    vec![1; level.len()]
                } else {
                    column_sum_powers(&self.matrix, r)?
                };
                Ok(level.iter().zip(d).map(|(t, d)| t * d as f64).sum())
            })
            .collect()
    }
}

fn check_dim(matrix: &ZeroOneMatrix, t: &TraceVector) -> Result<()> {
    if t.dim() != matrix.dim() {
        return Err(Error::InvalidTrace(format!(
            "trace has length {}, matrix has dimension {}",
            t.dim(),
            matrix.dim()
        )));
    }
    Ok(())
}

/// Projected coordinate descent for `min ‖A x − b‖₂` over `x ≥ 0`.
fn nnls(a: &ZeroOneMatrix, b: &[f64]) -> Vec<f64> {
    let d = a.dim();
    let col_norm: Vec<f64> = (0..d).map(|j| (0..d).filter(|&i| a.allows(i, j)).count() as f64).collect();
    let mut x = vec![0.0; d];
    let mut r: Vec<f64> = b.iter().map(|v| -v).collect(); // A x − b
    for _ in 0..20_000 {
        let mut moved = 0.0f64;
        for j in 0..d {
            if col_norm[j] == 0.0 {
                continue;
            }
            let g: f64 = (0..d).filter(|&i| a.allows(i, j)).map(|i| r[i]).sum();
            let new = (x[j] - g / col_norm[j]).max(0.0);
            let delta = new - x[j];
            if delta != 0.0 {
                for (i, ri) in r.iter_mut().enumerate() {
                    if a.allows(i, j) {
                        *ri += delta;
                    }
                }
                x[j] = new;
                moved = moved.max(delta.abs());
            }
        }
        if moved <= 1e-16 {
            break;
        }
    }
    x
}

/// `s′(t_0, t_1, …) = (A t_0, t_0, t_1, …)`, truncated to keep the depth.
pub fn s_prime(seq: &CoherentSequence) -> CoherentSequence {
    let mut levels = Vec::with_capacity(seq.levels.len());
    levels.push(seq.matrix.mul_vec(&seq.levels[0]));
    levels.extend(seq.levels[..seq.levels.len() - 1].iter().cloned());
    let mut residuals = Vec::with_capacity(seq.residuals.len());
    if !seq.residuals.is_empty() {
        residuals.push(0.0);
        residuals.extend_from_slice(&seq.residuals[..seq.residuals.len() - 1]);
    }
    let normalized = (levels[0].iter().sum::<f64>() - 1.0).abs() <= SUM_TOL;
    CoherentSequence {
        matrix: seq.matrix.clone(),
        levels,
        residuals,
        normalized,
    }
}

/// `t′(t_0, t_1, …) = (t_1, t_2, …)`.
pub fn t_prime(seq: &CoherentSequence) -> Result<CoherentSequence> {
    if seq.depth() == 0 {
        return Err(Error::InsufficientDepth { depth: 0, needed: 1 });
    }
    let levels = seq.levels[1..].to_vec();
    let normalized = (levels[0].iter().sum::<f64>() - 1.0).abs() <= SUM_TOL;
    Ok(CoherentSequence {
        matrix: seq.matrix.clone(),
        levels,
        residuals: seq.residuals[1..].to_vec(),
        normalized,
    })
}

/// Iterates of `k`, which on `L_0` is `t ↦ A t / 1ᵀA t`. Returns `t_1, …, t_n`.
pub fn k_iterate(a: &ZeroOneMatrix, t: &TraceVector, n: usize) -> Result<Vec<TraceVector>> {
    if t.dim() != a.dim() {
        return Err(Error::InvalidTrace(format!(
            "trace has length {}, matrix has dimension {}",
            t.dim(),
            a.dim()
        )));
    }
    let mut out = Vec::with_capacity(n);
    let mut x = t.clone();
    for _ in 0..n {
        // cannot vanish when A has no zero column and t is a probability vector
        x = TraceVector::normalized(a.mul_vec(x.values()))?;
        out.push(x.clone());
    }
    Ok(out)
}

/// Applies `h` (shift and renormalise, `(t_r) ↦ (t_{r+1}) / Σ t_1`) `n` times.
pub fn h_iterate(seq: &CoherentSequence, n: usize) -> Result<CoherentSequence> {
    if seq.depth() < n {
        return Err(Error::InsufficientDepth {
            depth: seq.depth(),
            needed: n,
        });
    }
    let mut cur = seq.clone();
    for _ in 0..n {
        let mass: f64 = cur.levels[1].iter().sum();
        if mass <= 0.0 {
            return Err(Error::InvalidTrace("level 1 has zero mass".into()));
        }
        let mut next = t_prime(&cur)?;
        for level in &mut next.levels {
            level.iter_mut().for_each(|x| *x /= mass);
        }
        next.residuals.iter_mut().for_each(|e| *e /= mass);
        next.normalized = true;
        cur = next;
    }
    Ok(cur)
}

/// The KMS sequence `t_r = λ^{−r} t_0`, `t_0` the normalised right Perron
/// vector.
pub fn kms_eigen_sequence(a: &ZeroOneMatrix, depth: usize, opts: &PerronOptions) -> Result<CoherentSequence> {
    if !irreducible(a) {
        return Err(Error::Reducible);
    }
    let perron = perron_vectors(&a.to_nonnegative(), opts)?;
    Ok(geometric_sequence(a.clone(), &perron.u, perron.lambda, depth))
}

fn geometric_sequence(matrix: ZeroOneMatrix, t0: &[f64], lambda: f64, depth: usize) -> CoherentSequence {
    let levels = (0..=depth)
        .map(|r| {
            let scale = lambda.powi(-(r as i32));
            t0.iter().map(|x| x * scale).collect()
        })
        .collect();
    CoherentSequence::assemble(matrix, levels)
}

/// `ε_n(τ) = 1ᵀAⁿt` for `n = 1..=n_max`, kept in log space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSequence {
    pub log_epsilon: Vec<f64>,
    /// `(1/n) log ε_n`.
    pub rates: Vec<f64>,
}

impl EpsilonSequence {
    /// `ε_n`, which overflows to infinity for large `n`.
    pub fn epsilon(&self, n: usize) -> f64 {
        self.log_epsilon[n - 1].exp()
    }
}

pub fn epsilon_sequence(a: &ZeroOneMatrix, t: &TraceVector, n_max: usize) -> Result<EpsilonSequence> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    check_dim(a, t)?;
    let mut x = t.values().to_vec();
    let mut log_scale = 0.0;
    let mut log_epsilon = Vec::with_capacity(n_max);
    for _ in 0..n_max {
        x = a.mul_vec(&x);
        let sum: f64 = x.iter().sum();
        if sum == 0.0 {
            log_epsilon.push(f64::NEG_INFINITY);
            continue;
        }
        log_scale += sum.ln();
        log_epsilon.push(log_scale);
        x.iter_mut().for_each(|v| *v /= sum);
    }
    let rates = log_epsilon.iter().enumerate().map(|(i, l)| l / (i + 1) as f64).collect();
    Ok(EpsilonSequence { log_epsilon, rates })
}

/// Inverse temperature estimated from the growth of `ε_n(τ)`: the last rate
/// `(1/n_max) log ε_{n_max}`.
pub fn temperature_from_trace(a: &ZeroOneMatrix, t: &TraceVector, n_max: usize) -> Result<f64> {
    if !t.is_strictly_positive() {
        return Err(Error::InvalidTrace("trace must be strictly positive".into()));
    }
    let eps = epsilon_sequence(a, t, n_max)?;
    Ok(*eps.rates.last().unwrap())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KmsOptions {
    /// Depth `R` of the reported eigen-sequence.
    pub depth: usize,
    /// Reducible matrices give a `(β_min, β_max)` bracket instead of an error.
    pub reducible_mode: bool,
    pub perron: PerronOptions,
}

impl Default for KmsOptions {
    fn default() -> Self {
        Self {
            depth: 8,
            reducible_mode: false,
            perron: PerronOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KmsReport {
    pub lambda: f64,
    pub beta: f64,
    /// `None` in reducible mode.
    pub eigen_sequence: Option<CoherentSequence>,
    /// The homogeneous subalgebra has a unique trace when `A` is aperiodic.
    pub uniqueness_flag: bool,
    /// `(log r_min, log r_max)` over strongly connected components. Only
    /// candidates: the actual set of temperatures is a closed subset.
    pub bracket: Option<(f64, f64)>,
}

pub fn kms_temperature(a: &ZeroOneMatrix, opts: &KmsOptions) -> Result<KmsReport> {
    a.check_no_zero_lines()?;
    if irreducible(a) {
        let seq = kms_eigen_sequence(a, opts.depth, &opts.perron)?;
        let lambda = perron_vectors(&a.to_nonnegative(), &opts.perron)?.lambda;
        return Ok(KmsReport {
            lambda,
            beta: lambda.ln(),
            eigen_sequence: Some(seq),
            uniqueness_flag: aperiodic(a)?,
            bracket: None,
        });
    }
    if !opts.reducible_mode {
        return Err(Error::Reducible);
    }
    let spectra = perron_by_component(&a.to_nonnegative(), &opts.perron)?;
    Ok(KmsReport {
        lambda: spectra.max_radius,
        beta: spectra.max_radius.ln(),
        eigen_sequence: None,
        uniqueness_flag: false,
        bracket: Some((spectra.min_radius.ln(), spectra.max_radius.ln())),
    })
}

/// KMS data for a bimodule with nonnegative coefficient matrix `(λ_{j,k})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BimoduleKms {
    pub lambda: f64,
    pub beta: f64,
    /// Right Perron vector with `Σ v⁰ = 1`.
    pub v0: Vec<f64>,
    /// `v^r = λ^{−r} v⁰` for `r = 0..=depth`.
    pub sequence: Vec<Vec<f64>>,
}

pub fn bimodule_kms(lambda_matrix: &NonnegativeMatrix, depth: usize, opts: &PerronOptions) -> Result<BimoduleKms> {
    if !irreducible(lambda_matrix) {
        return Err(Error::Reducible);
    }
    let perron = perron_vectors(lambda_matrix, opts)?;
    let sequence = (0..=depth)
        .map(|r| {
            let scale = perron.lambda.powi(-(r as i32));
            perron.u.iter().map(|x| x * scale).collect()
        })
        .collect();
    Ok(BimoduleKms {
        lambda: perron.lambda,
        beta: perron.lambda.ln(),
        v0: perron.u,
        sequence,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemperatureSign {
    Positive,
    Tracial,
    Negative,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignReport {
    pub sign: TemperatureSign,
    /// `lim min_k (1ᵀAⁿ)_k^{1/n}` and `lim max_k (1ᵀAⁿ)_k^{1/n}`.
    pub lower_limit: f64,
    pub upper_limit: f64,
    /// Finite-`n` values of both sequences.
    pub bracket: RadiusBracket,
}

pub const SIGN_BRACKET_N: usize = 64;
const SIGN_TOL: f64 = 1e-9;

/// Sign of the inverse temperatures allowed by the growth of column sums.
///
/// Column `k` of `Aⁿ` grows like the largest Perron value among components
/// from which `k` is reachable, so both limits are read off the component
/// spectra.
pub fn temperature_sign(a: &NonnegativeMatrix, opts: &PerronOptions) -> Result<SignReport> {
    if let Some(i) = a.zero_row() {
        return Err(Error::ZeroRow(i));
    }
    if let Some(j) = a.zero_column() {
        return Err(Error::ZeroColumn(j));
    }
    let spectra = perron_by_component(a, opts)?;
    let d = a.dim();
    let succ = a.successors();
    let mut rate = vec![0.0f64; d];
    for comp in &spectra.components {
        let Some(p) = &comp.perron else { continue };
        let mut seen = vec![false; d];
        let mut stack = comp.vertices.clone();
        stack.iter().for_each(|&i| seen[i] = true);
        while let Some(i) = stack.pop() {
            rate[i] = rate[i].max(p.lambda);
            for &j in &succ[i] {
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    let lower = rate.iter().cloned().fold(f64::INFINITY, f64::min);
    let upper = spectra.max_radius;
    let sign = if lower > 1.0 + SIGN_TOL {
        TemperatureSign::Positive
    } else if upper < 1.0 - SIGN_TOL {
        TemperatureSign::Negative
    } else if (lower - 1.0).abs() <= SIGN_TOL && (upper - 1.0).abs() <= SIGN_TOL {
        TemperatureSign::Tracial
    } else {
        TemperatureSign::Mixed
    };
    Ok(SignReport {
        sign,
        lower_limit: lower,
        upper_limit: upper,
        bracket: spectral::spectral_radius_bracket_sequences(a, SIGN_BRACKET_N)?,
    })
}
