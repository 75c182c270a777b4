//! Perron-Frobenius analytics for nonnegative matrices.
//!
//! Irreducibility and the period are read off the support digraph. The
//! spectral radius and the Perron eigenvectors come from power iteration
//! started at the uniform vector `1/d`. Periodic matrices are iterated as
//! `A + I`, which is primitive and has the same eigenvectors, and the
//! eigenvalue is read back from `A` itself.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{NonnegativeMatrix, SupportDigraph, ZeroOneMatrix};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerronOptions {
    /// Bound on the l1 eigen-residuals of accepted vectors.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PerronOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

impl PerronOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// Spectral radius with right and left Perron eigenvectors.
///
/// `u` is scaled so that `Σ u_i = 1` and `v` so that `Σ u_i v_i = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerronData {
    pub lambda: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub iterations: usize,
    /// `max(‖Au − λu‖₁, ‖Aᵀv − λv‖₁)`.
    pub residual: f64,
}

/// Strongly connected components (Tarjan). Each component is sorted and the
/// list is ordered by smallest vertex.
pub fn strongly_connected_components<M: SupportDigraph + ?Sized>(m: &M) -> Vec<Vec<usize>> {
    struct State {
        next_index: usize,
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        comps: Vec<Vec<usize>>,
    }

    fn visit(v: usize, succ: &[Vec<usize>], st: &mut State) {
        st.index[v] = Some(st.next_index);
        st.low[v] = st.next_index;
        st.next_index += 1;
        st.stack.push(v);
        st.on_stack[v] = true;
        for &w in &succ[v] {
            match st.index[w] {
                None => {
                    visit(w, succ, st);
                    st.low[v] = st.low[v].min(st.low[w]);
                }
                Some(iw) if st.on_stack[w] => st.low[v] = st.low[v].min(iw),
                Some(_) => {}
            }
        }
        if Some(st.low[v]) == st.index[v] {
            let mut comp = Vec::new();
            loop {
                let w = st.stack.pop().expect("tarjan stack underflow");
                st.on_stack[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            comp.sort_unstable();
            st.comps.push(comp);
        }
    }

    let d = m.dim();
    let succ = m.successors();
    let mut st = State {
        next_index: 0,
        index: vec![None; d],
        low: vec![0; d],
        on_stack: vec![false; d],
        stack: Vec::new(),
        comps: Vec::new(),
    };
    for v in 0..d {
        if st.index[v].is_none() {
            visit(v, &succ, &mut st);
        }
    }
    st.comps.sort_by_key(|c| c[0]);
    st.comps
}

/// True iff the support digraph is strongly connected.
pub fn irreducible<M: SupportDigraph + ?Sized>(m: &M) -> bool {
    let d = m.dim();
    if d == 0 {
        return false;
    }
    let succ = m.successors();
    let mut pred = vec![Vec::new(); d];
    for (i, s) in succ.iter().enumerate() {
        for &j in s {
            pred[j].push(i);
        }
    }
    reaches_all(&succ) && reaches_all(&pred)
}

fn reaches_all(adj: &[Vec<usize>]) -> bool {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Period of an irreducible matrix: gcd of the cycle lengths of its support.
///
/// Computed from BFS levels: the gcd of `level(i) + 1 − level(j)` over all
/// edges `i -> j`.
pub fn period<M: SupportDigraph + ?Sized>(m: &M) -> Result<usize> {
    if !irreducible(m) {
        return Err(Error::Reducible);
    }
    let succ = m.successors();
    let d = succ.len();
    let mut level: Vec<Option<i64>> = vec![None; d];
    level[0] = Some(0);
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        for &w in &succ[v] {
            if level[w].is_none() {
                level[w] = Some(level[v].unwrap() + 1);
                queue.push_back(w);
            }
        }
    }
    let mut g: u64 = 0;
    for (i, s) in succ.iter().enumerate() {
        for &j in s {
            let diff = (level[i].unwrap() + 1 - level[j].unwrap()).unsigned_abs();
            g = num_integer::gcd(g, diff);
        }
    }
    // g == 0 only for a single vertex without a self-loop: no cycles at all.
    Ok(g as usize)
}

/// Errors with [`Error::Reducible`] when the precondition fails.
pub fn aperiodic<M: SupportDigraph + ?Sized>(m: &M) -> Result<bool> {
    Ok(period(m)? == 1)
}

fn has_cycle(comp: &[usize], m: &NonnegativeMatrix) -> bool {
    comp.len() > 1 || m.get(comp[0], comp[0]) > 0.0
}

/// Power iteration for the normalised (`Σx = 1`) positive eigenvector of an
/// irreducible matrix, applied through `apply`. Iterates on `apply + shift·I`.
pub(crate) fn power_iterate(
    apply: impl Fn(&[f64]) -> Vec<f64>,
    d: usize,
    shift: f64,
    opts: &PerronOptions,
    accept: impl Fn(&[f64], f64) -> f64,
) -> Result<(Vec<f64>, f64, usize, f64)> {
    let mut x = vec![1.0 / d as f64; d];
    let mut residual = f64::INFINITY;
    for it in 0..=opts.max_iter {
        let y = apply(&x);
        let lambda: f64 = y.iter().sum();
        if lambda <= 0.0 {
            return Err(Error::ZeroSpectralRadius);
        }
        residual = y.iter().zip(&x).map(|(a, b)| (a - lambda * b).abs()).sum();
        if residual <= accept(&x, opts.tol) {
            return Ok((x, lambda, it, residual));
        }
        let norm = lambda + shift;
        x = y
            .iter()
            .zip(&x)
            .map(|(a, b)| (a + shift * b) / norm)
            .collect();
    }
    Err(Error::NotConverged {
        iterations: opts.max_iter,
        residual,
        last_iterate: x,
    })
}

/// Perron data of an irreducible matrix.
pub fn perron_vectors(a: &NonnegativeMatrix, opts: &PerronOptions) -> Result<PerronData> {
    if a.is_zero() {
        return Err(Error::ZeroSpectralRadius);
    }
    let shift = if period(a)? == 1 { 0.0 } else { 1.0 };
    let d = a.dim();
    let (u, _, it_u, _) = power_iterate(|x| a.mul_vec(x), d, shift, opts, |_, tol| tol)?;
    // The left vector is rescaled by 1/Σ u_i x_i afterwards, so its
    // normalised residual has to be correspondingly smaller.
    let (v_raw, _, it_v, _) = power_iterate(|x| a.vec_mul(x), d, shift, opts, |x, tol| {
        let pairing: f64 = u.iter().zip(x).map(|(p, q)| p * q).sum();
        tol * pairing
    })?;
    let pairing: f64 = u.iter().zip(&v_raw).map(|(p, q)| p * q).sum();
    let v: Vec<f64> = v_raw.iter().map(|x| x / pairing).collect();
    // two-sided Rayleigh quotient: second-order accurate in both vectors
    let au = a.mul_vec(&u);
    let lambda: f64 = v.iter().zip(&au).map(|(p, q)| p * q).sum();
    let res_u: f64 = au.iter().zip(&u).map(|(p, q)| (p - lambda * q).abs()).sum();
    let at_v = a.vec_mul(&v);
    let res_v: f64 = at_v.iter().zip(&v).map(|(p, q)| (p - lambda * q).abs()).sum();
    Ok(PerronData {
        lambda,
        u,
        v,
        iterations: it_u + it_v,
        residual: res_u.max(res_v),
    })
}

/// Spectral radius. Reducible matrices are handled through their strongly
/// connected components.
pub fn spectral_radius(a: &NonnegativeMatrix, opts: &PerronOptions) -> Result<f64> {
    if a.is_zero() {
        return Err(Error::ZeroSpectralRadius);
    }
    if irreducible(a) {
        return perron_vectors(a, opts).map(|p| p.lambda);
    }
    let spectra = perron_by_component(a, opts)?;
    Ok(spectra.max_radius)
}

/// Perron data of one strongly connected component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentPerron {
    pub vertices: Vec<usize>,
    /// `None` for a component without cycles (a lone vertex, no self-loop).
    pub perron: Option<PerronData>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentSpectra {
    pub components: Vec<ComponentPerron>,
    /// Smallest and largest Perron eigenvalue over components with cycles.
    pub min_radius: f64,
    pub max_radius: f64,
}

/// Per-component Perron data for a possibly reducible matrix.
pub fn perron_by_component(a: &NonnegativeMatrix, opts: &PerronOptions) -> Result<ComponentSpectra> {
    let mut components = Vec::new();
    let mut min_radius = f64::INFINITY;
    let mut max_radius = 0.0f64;
    for comp in strongly_connected_components(a) {
        let perron = if has_cycle(&comp, a) {
            let data = perron_vectors(&a.submatrix(&comp), opts)?;
            min_radius = min_radius.min(data.lambda);
            max_radius = max_radius.max(data.lambda);
            Some(data)
        } else {
            None
        };
        components.push(ComponentPerron {
            vertices: comp,
            perron,
        });
    }
    if max_radius == 0.0 {
        return Err(Error::ZeroSpectralRadius);
    }
    Ok(ComponentSpectra {
        components,
        min_radius,
        max_radius,
    })
}

/// `d_{r,k} = Σ_i (A^r)[i][k]`, exactly.
pub fn column_sum_powers(a: &ZeroOneMatrix, r: usize) -> Result<Vec<u64>> {
    if r == 0 {
        return Err(Error::InvalidArgument("power r must be at least 1".into()));
    }
    let d = a.dim();
    // row vector 1ᵀ A^k
    let mut row = vec![1u64; d];
    for _ in 0..r {
        let mut next = vec![0u64; d];
        for (i, &ri) in row.iter().enumerate() {
            for (k, n) in next.iter_mut().enumerate() {
                if a.allows(i, k) {
                    *n = n.checked_add(ri).ok_or(Error::Overflow("column sums of A^r"))?;
                }
            }
        }
        row = next;
    }
    Ok(row)
}

/// `(min_k (1ᵀAⁿ)_k)^{1/n}` and `(max_k (1ᵀAⁿ)_k)^{1/n}` for `n = 1..=n_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusBracket {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

pub fn spectral_radius_bracket_sequences(a: &NonnegativeMatrix, n_max: usize) -> Result<RadiusBracket> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let d = a.dim();
    let mut row = vec![1.0; d];
    let mut log_scale = 0.0;
    let mut lower = Vec::with_capacity(n_max);
    let mut upper = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        row = a.vec_mul(&row);
        let max = row.iter().cloned().fold(0.0, f64::max);
        let min = row.iter().cloned().fold(f64::INFINITY, f64::min);
        let nf = n as f64;
        if max == 0.0 {
            lower.push(0.0);
            upper.push(0.0);
            continue;
        }
        upper.push(((max.ln() + log_scale) / nf).exp());
        lower.push(if min == 0.0 {
            0.0
        } else {
            ((min.ln() + log_scale) / nf).exp()
        });
        log_scale += max.ln();
        row.iter_mut().for_each(|x| *x /= max);
    }
    Ok(RadiusBracket { lower, upper })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> NonnegativeMatrix {
        ZeroOneMatrix::golden_mean().to_nonnegative()
    }

    const PHI: f64 = 1.618_033_988_749_895;

    #[test]
    fn irreducibility_examples() {
        let two_cycle = ZeroOneMatrix::cycle(2);
        assert!(irreducible(&two_cycle));
        let upper = ZeroOneMatrix::new(vec![vec![1, 1], vec![0, 1]]).unwrap();
        assert!(!irreducible(&upper));
        assert!(irreducible(&ZeroOneMatrix::golden_mean()));
    }

    #[test]
    fn aperiodicity_examples() {
        assert_eq!(aperiodic(&ZeroOneMatrix::cycle(2)), Ok(false));
        assert_eq!(aperiodic(&ZeroOneMatrix::golden_mean()), Ok(true));
        assert_eq!(period(&ZeroOneMatrix::cycle(3)), Ok(3));
        let upper = ZeroOneMatrix::new(vec![vec![1, 1], vec![0, 1]]).unwrap();
        assert_eq!(aperiodic(&upper), Err(Error::Reducible));
    }

    #[test]
    fn radius_examples() {
        let opts = PerronOptions::default();
        assert!((spectral_radius(&golden(), &opts).unwrap() - PHI).abs() < 1e-12);
        for d in 1..6 {
            assert!((spectral_radius(&NonnegativeMatrix::identity(d), &opts).unwrap() - 1.0).abs() < 1e-12);
            assert!((spectral_radius(&NonnegativeMatrix::ones(d), &opts).unwrap() - d as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn permutation_radius_is_exactly_one() {
        let opts = PerronOptions::default();
        for perm in [vec![1, 0], vec![1, 2, 0], vec![1, 0, 3, 4, 2]] {
            let a = ZeroOneMatrix::permutation(&perm).unwrap().to_nonnegative();
            assert_eq!(spectral_radius(&a, &opts).unwrap(), 1.0);
        }
    }

    #[test]
    fn zero_matrix_rejected() {
        let z = NonnegativeMatrix::new(vec![vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(spectral_radius(&z, &PerronOptions::default()), Err(Error::ZeroSpectralRadius));
        let nil = NonnegativeMatrix::new(vec![vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(spectral_radius(&nil, &PerronOptions::default()), Err(Error::ZeroSpectralRadius));
    }

    #[test]
    fn non_convergence_reports_last_iterate() {
        let opts = PerronOptions { tol: 1e-12, max_iter: 2 };
        let a = NonnegativeMatrix::new(vec![vec![1.0, 1.0, 0.0], vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 0.3]]).unwrap();
        match perron_vectors(&a, &opts) {
            Err(Error::NotConverged { iterations, last_iterate, residual }) => {
                assert_eq!(iterations, 2);
                assert_eq!(last_iterate.len(), 3);
                assert!(residual > 1e-12);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn perron_examples() {
        let opts = PerronOptions::default();
        let p = perron_vectors(&NonnegativeMatrix::ones(2), &opts).unwrap();
        assert!((p.lambda - 2.0).abs() < 1e-12);
        assert_eq!(p.u, vec![0.5, 0.5]);
        assert!(p.v.iter().all(|x| (x - 1.0).abs() < 1e-12));

        let p = perron_vectors(&ZeroOneMatrix::cycle(2).to_nonnegative(), &opts).unwrap();
        assert_eq!(p.lambda, 1.0);
        assert_eq!(p.u, vec![0.5, 0.5]);
        assert_eq!(p.v, vec![1.0, 1.0]);

        // golden mean: u = (φ, 1)/(φ + 1), v = c(φ, 1) with c = φ²/(φ² + 1)
        let p = perron_vectors(&golden(), &opts).unwrap();
        let c = PHI * PHI / (PHI * PHI + 1.0);
        assert!((p.lambda - PHI).abs() < 1e-12);
        assert!((p.u[0] - PHI / (PHI + 1.0)).abs() < 1e-12);
        assert!((p.u[1] - 1.0 / (PHI + 1.0)).abs() < 1e-12);
        assert!((p.v[0] - c * PHI).abs() < 1e-12);
        assert!((p.v[1] - c).abs() < 1e-12);
        assert!(p.residual <= 1e-12);
    }

    #[test]
    fn reducible_input_rejected_without_component_mode() {
        let a = ZeroOneMatrix::new(vec![vec![1, 1], vec![0, 1]]).unwrap().to_nonnegative();
        assert_eq!(perron_vectors(&a, &PerronOptions::default()), Err(Error::Reducible));
    }

    #[test]
    fn component_mode_reports_extremes() {
        let a = ZeroOneMatrix::block_diagonal(&[ZeroOneMatrix::ones(2), ZeroOneMatrix::ones(3)]).to_nonnegative();
        let s = perron_by_component(&a, &PerronOptions::default()).unwrap();
        assert_eq!(s.components.len(), 2);
        assert!((s.min_radius - 2.0).abs() < 1e-12);
        assert!((s.max_radius - 3.0).abs() < 1e-12);
        assert!((spectral_radius(&a, &PerronOptions::default()).unwrap() - 3.0).abs() < 1e-12);

        // transient vertex with no cycle
        let b = ZeroOneMatrix::new(vec![vec![0, 1], vec![0, 1]]).unwrap().to_nonnegative();
        let s = perron_by_component(&b, &PerronOptions::default()).unwrap();
        assert!(s.components.iter().any(|c| c.perron.is_none()));
        assert_eq!(s.max_radius, 1.0);
    }

    #[test]
    fn column_sums() {
        // ones(2)^3 = 4·ones, so each column sums to 8
        assert_eq!(column_sum_powers(&ZeroOneMatrix::ones(2), 3).unwrap(), vec![8, 8]);
        assert_eq!(column_sum_powers(&ZeroOneMatrix::ones(2), 2).unwrap(), vec![4, 4]);
        assert_eq!(column_sum_powers(&ZeroOneMatrix::identity(4), 7).unwrap(), vec![1; 4]);
        assert_eq!(column_sum_powers(&ZeroOneMatrix::golden_mean(), 2).unwrap(), vec![3, 2]);
        assert_eq!(
            column_sum_powers(&ZeroOneMatrix::ones(4), 40),
            Err(Error::Overflow("column sums of A^r"))
        );
        assert!(column_sum_powers(&ZeroOneMatrix::ones(2), 0).is_err());
    }

    #[test]
    fn bracket_examples() {
        let b = spectral_radius_bracket_sequences(&NonnegativeMatrix::identity(3), 5).unwrap();
        assert!(b.lower.iter().chain(&b.upper).all(|&x| (x - 1.0).abs() < 1e-15));
        let b = spectral_radius_bracket_sequences(&golden(), 2).unwrap();
        assert!((b.lower[1] - 2f64.sqrt()).abs() < 1e-14);
        assert!((b.upper[1] - 3f64.sqrt()).abs() < 1e-14);
        let b = spectral_radius_bracket_sequences(&NonnegativeMatrix::ones(4), 6).unwrap();
        assert!(b.lower.iter().chain(&b.upper).all(|&x| (x - 4.0).abs() < 1e-12));
    }
}
