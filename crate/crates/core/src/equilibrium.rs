//! Markov measures on one-sided shifts of finite type: the Parry measure,
//! measure entropy, the resolvent route from the KMS state to an invariant
//! state, and a sampled check of the variational principle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{NonnegativeMatrix, ZeroOneMatrix};
use crate::spectral::{irreducible, perron_vectors, power_iterate, PerronData, PerronOptions};
use crate::subshift::Word;

const STOCHASTIC_TOL: f64 = 1e-12;
const CYLINDER_TOL: f64 = 1e-10;

/// Stationary Markov measure supported on the paths of `A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovMeasure {
    pub matrix: ZeroOneMatrix,
    /// Row-stochastic, positive exactly where `A` is 1.
    pub p: Vec<Vec<f64>>,
    pub pi: Vec<f64>,
    /// Present for the Parry measure.
    pub perron: Option<PerronData>,
}

impl MarkovMeasure {
    /// Markov measure with transition matrix `p`; the stationary vector is
    /// computed from the lazy chain `(P + I)/2`, which handles periodic `P`.
    pub fn new(matrix: ZeroOneMatrix, p: Vec<Vec<f64>>, opts: &PerronOptions) -> Result<Self> {
        let d = matrix.dim();
        if p.len() != d {
            return Err(Error::InvalidArgument(format!("P has {} rows, expected {d}", p.len())));
        }
        for (i, row) in p.iter().enumerate() {
            if row.len() != d {
                return Err(Error::NotSquare { row: i, len: row.len(), dim: d });
            }
            for (j, &x) in row.iter().enumerate() {
                if !x.is_finite() || x < 0.0 {
                    return Err(Error::InvalidEntry {
                        row: i,
                        col: j,
                        value: x,
                        reason: "transition probabilities must be nonnegative",
                    });
                }
                if (x > 0.0) != matrix.allows(i, j) {
                    return Err(Error::InvalidEntry {
                        row: i,
                        col: j,
                        value: x,
                        reason: "support must match the transition matrix",
                    });
                }
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::InvariantViolation(format!("row {} of P sums to {sum}", i + 1)));
            }
        }
        if !irreducible(&matrix) {
            return Err(Error::Reducible);
        }
        let pt = NonnegativeMatrix::new(p.clone())?;
        let (pi, _, _, _) = power_iterate(|x| pt.vec_mul(x), d, 1.0, opts, |_, tol| tol)?;
        Ok(Self {
            matrix,
            p,
            pi,
            perron: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// The maximal-entropy measure: `p_ij = a_ij u_j / (λ u_i)`, `π_i = u_i v_i`.
pub fn parry_measure(a: &ZeroOneMatrix, opts: &PerronOptions) -> Result<MarkovMeasure> {
    if !irreducible(a) {
        return Err(Error::Reducible);
    }
    let perron = perron_vectors(&a.to_nonnegative(), opts)?;
    let d = a.dim();
    let (lambda, u, v) = (perron.lambda, &perron.u, &perron.v);
    let p = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| if a.allows(i, j) { u[j] / (lambda * u[i]) } else { 0.0 })
                .collect()
        })
        .collect();
    let pi = u.iter().zip(v).map(|(x, y)| x * y).collect();
    Ok(MarkovMeasure {
        matrix: a.clone(),
        p,
        pi,
        perron: Some(perron),
    })
}

/// `μ[w] = π_{w_1} Π p_{w_k w_{k+1}}`.
pub fn cylinder_markov(m: &MarkovMeasure, w: &Word) -> Result<f64> {
    let idx = indices(m, w)?;
    Ok(idx.windows(2).fold(m.pi[idx[0]], |acc, e| acc * m.p[e[0]][e[1]]))
}

/// `μ[w] = v_{w_1} u_{w_r} Π a / λ^{r−1}`, only for measures carrying
/// Perron data.
pub fn cylinder_perron(m: &MarkovMeasure, w: &Word) -> Result<f64> {
    let perron = m
        .perron
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("measure carries no Perron data".into()))?;
    let idx = indices(m, w)?;
    if idx.windows(2).any(|e| !m.matrix.allows(e[0], e[1])) {
        return Ok(0.0);
    }
    let r = idx.len() as i32;
    Ok(perron.v[idx[0]] * perron.u[idx[idx.len() - 1]] * perron.lambda.powi(1 - r))
}

/// Cylinder measure. For the Parry measure both formulas are evaluated and
/// must agree.
pub fn cylinder(m: &MarkovMeasure, w: &Word) -> Result<f64> {
    let value = cylinder_markov(m, w)?;
    if m.perron.is_some() {
        let other = cylinder_perron(m, w)?;
        if (value - other).abs() > CYLINDER_TOL * value.max(other).max(1.0) {
            return Err(Error::InvariantViolation(format!(
                "cylinder formulas disagree on {:?}: {value} vs {other}",
                w.symbols()
            )));
        }
    }
    Ok(value)
}

fn indices(m: &MarkovMeasure, w: &Word) -> Result<Vec<usize>> {
    if w.is_empty() {
        return Err(Error::InvalidArgument("cylinder word must be nonempty".into()));
    }
    w.check_alphabet(m.dim())?;
    Ok(w.symbols().iter().map(|s| s - 1).collect())
}

/// `h = −Σ_i π_i Σ_j p_ij log p_ij` in nats, with `0 log 0 = 0`.
pub fn markov_entropy(m: &MarkovMeasure) -> f64 {
    let h: f64 = m
        .pi
        .iter()
        .zip(&m.p)
        .map(|(pi, row)| pi * row.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>())
        .sum();
    if h == 0.0 {
        0.0
    } else {
        -h
    }
}

/// `a_t = (t − λ)(tI − Aᵀ)⁻¹ 𝟙` together with its pairing `uᵀa_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolventVector {
    pub t: f64,
    pub a_t: Vec<f64>,
    pub pairing: f64,
}

impl ResolventVector {
    /// `a_t / Σ a_t`.
    pub fn normalized(&self) -> Vec<f64> {
        let s: f64 = self.a_t.iter().sum();
        self.a_t.iter().map(|x| x / s).collect()
    }
}

pub fn resolvent_vector(a: &NonnegativeMatrix, perron: &PerronData, t: f64) -> Result<ResolventVector> {
    if t.is_nan() || t <= perron.lambda {
        return Err(Error::InvalidArgument(format!(
            "t = {t} must exceed the spectral radius {}",
            perron.lambda
        )));
    }
    let d = a.dim();
    let system: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| if i == j { t } else { 0.0 } - a.get(j, i))
                .collect()
        })
        .collect();
    let x = solve(system, vec![1.0; d])?;
    let a_t: Vec<f64> = x.iter().map(|xi| (t - perron.lambda) * xi).collect();
    let pairing = perron.u.iter().zip(&a_t).map(|(u, a)| u * a).sum();
    Ok(ResolventVector { t, a_t, pairing })
}

/// Gaussian elimination with partial pivoting.
fn solve(mut m: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let d = b.len();
    let scale = m.iter().flatten().fold(0.0f64, |acc, x| acc.max(x.abs()));
    for col in 0..d {
        let pivot = (col..d)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        if m[pivot][col].abs() <= scale * 1e-14 {
            return Err(Error::Singular);
        }
        m.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..d {
            let f = m[row][col] / m[col][col];
            if f == 0.0 {
                continue;
            }
            let pivot_row = m[col].clone();
            for (x, p) in m[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= f * p;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; d];
    for row in (0..d).rev() {
        let s: f64 = (row + 1..d).map(|k| m[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / m[row][row];
    }
    Ok(x)
}

pub const DOMINANCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationalReport {
    pub log_radius: f64,
    pub parry_entropy: f64,
    /// Entropies of the sampled measures, in sample order.
    pub sample_entropies: Vec<f64>,
    /// Samples with entropy above `log r(A) + 1e-9`.
    pub violations: usize,
    pub max_sample_entropy: f64,
    /// Largest entropy in the ensemble including the Parry entry.
    pub max_entropy: f64,
    /// `log r(A) − max_entropy`.
    pub gap: f64,
    /// Every sample lies strictly below `log r(A)`.
    pub strict_dominance: bool,
}

/// Row-stochastic matrix supported on `A` with each row drawn from the
/// symmetric Dirichlet(1) law on its allowed positions.
pub fn sample_compatible_stochastic<R: Rng>(a: &ZeroOneMatrix, rng: &mut R) -> Vec<Vec<f64>> {
    let d = a.dim();
    (0..d)
        .map(|i| {
            let mut row: Vec<f64> = (0..d)
                .map(|j| if a.allows(i, j) { rng.sample::<f64, _>(Exp1).max(f64::MIN_POSITIVE) } else { 0.0 })
                .collect();
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|x| *x /= s);
            row
        })
        .collect()
}

/// Samples `n_samples` compatible Markov measures (sample `i` uses the
/// ChaCha stream `i` under `seed`) and compares their entropies with
/// `log r(A)`, attained by the Parry measure.
pub fn variational_scan(
    a: &ZeroOneMatrix,
    n_samples: usize,
    seed: u64,
    opts: &PerronOptions,
) -> Result<VariationalReport> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be at least 1".into()));
    }
    let parry = parry_measure(a, opts)?;
    let log_radius = parry.perron.as_ref().unwrap().lambda.ln();
    let parry_entropy = markov_entropy(&parry);
    let sample_entropies = (0..n_samples)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let p = sample_compatible_stochastic(a, &mut rng);
            Ok(markov_entropy(&MarkovMeasure::new(a.clone(), p, opts)?))
        })
        .collect::<Result<Vec<f64>>>()?;
    let violations = sample_entropies
        .iter()
        .filter(|&&h| h > log_radius + DOMINANCE_TOL)
        .count();
    let max_sample_entropy = sample_entropies.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let max_entropy = max_sample_entropy.max(parry_entropy);
    Ok(VariationalReport {
        log_radius,
        parry_entropy,
        violations,
        max_sample_entropy,
        max_entropy,
        gap: log_radius - max_entropy,
        strict_dominance: sample_entropies.iter().all(|&h| h < log_radius),
        sample_entropies,
    })
}
