//! Acceptance suite: one PASS/FAIL line per criterion, each with its time
//! budget. Runs as a plain binary so the lines always reach the output.

mod common;

use std::panic;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use symdyn::equilibrium::{cylinder, markov_entropy, parry_measure, resolvent_vector, variational_scan};
use symdyn::krieger::{dim_q, entropy_bracket, predecessor_set};
use symdyn::spectral::{perron_vectors, spectral_radius, PerronOptions};
use symdyn::subshift::{count_words, topological_entropy};
use symdyn::tracespace::{
    h_iterate, kms_eigen_sequence, kms_temperature, s_prime, t_prime, temperature_from_trace, CoherentSequence,
    KmsOptions, TraceVector,
};
use symdyn::{SubshiftSpec, Word, ZeroOneMatrix};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn opts() -> PerronOptions {
    PerronOptions::default()
}

fn zo(rows: &[Vec<u8>]) -> ZeroOneMatrix {
    ZeroOneMatrix::new(rows.to_vec()).unwrap()
}

/// Random irreducible test matrices, reproducible from the seed.
fn random_matrices(count: usize, d_range: std::ops::RangeInclusive<usize>, seed: u64) -> Vec<Vec<Vec<u8>>> {
    let mut r = rng(seed);
    let span = d_range.end() - d_range.start() + 1;
    (0..count)
        .map(|i| random_irreducible(d_range.start() + i % span, 0.35, &mut r))
        .collect()
}

const PHI: f64 = 1.618_033_988_749_895;

fn cuntz_shadow() -> Outcome {
    let mut worst = 0.0f64;
    for d in 2..=6 {
        let ln_d = (d as f64).ln();
        let kms = kms_temperature(&ZeroOneMatrix::ones(d), &KmsOptions::default()).map_err(|e| e.to_string())?;
        let sft = topological_entropy(&SubshiftSpec::sft(ZeroOneMatrix::ones(d)).unwrap(), 8).unwrap();
        let full = topological_entropy(&SubshiftSpec::full(d).unwrap(), 8).unwrap();
        for (what, x) in [("kms.beta", kms.beta), ("sft exact", sft.exact.unwrap()), ("full exact", full.exact.unwrap())] {
            let err = (x - ln_d).abs();
            ensure!(err <= 1e-12, "d = {d}: {what} = {x}, off by {err:e}");
            worst = worst.max(err);
        }
    }
    Ok(format!("d = 2..6, max |β − log d| = {worst:.1e}"))
}

fn golden_end_to_end() -> Outcome {
    let g = ZeroOneMatrix::golden_mean();
    let radius = spectral_radius(&g.to_nonnegative(), &opts()).unwrap();
    ensure!((radius - PHI).abs() <= 1e-10, "radius {radius}");
    let est = topological_entropy(&SubshiftSpec::sft(g.clone()).unwrap(), 30).unwrap();
    let ext_err = (est.extrapolated - PHI.ln()).abs();
    ensure!(ext_err <= 5e-3, "extrapolated entropy {} off by {ext_err:e}", est.extrapolated);
    let parry = markov_entropy(&parry_measure(&g, &opts()).unwrap());
    ensure!((parry - PHI.ln()).abs() <= 1e-9, "parry entropy {parry}");
    let beta = kms_temperature(&g, &KmsOptions::default()).unwrap().beta;
    ensure!((beta - radius.ln()).abs() <= 1e-10, "kms.beta {beta} vs log radius");
    ensure!((beta - parry).abs() <= 1e-9, "kms.beta {beta} vs parry {parry}");
    ensure!((beta - est.extrapolated).abs() <= 5e-3, "kms.beta vs extrapolated");
    Ok(format!(
        "radius err {:.1e}, extrapolated err {ext_err:.1e}, parry err {:.1e}",
        (radius - PHI).abs(),
        (parry - PHI.ln()).abs()
    ))
}

fn temperature_from_traces() -> Outcome {
    let mut r = rng(64);
    let mut worst = 0.0f64;
    for (i, a) in random_matrices(5, 2..=6, 6).iter().enumerate() {
        let log_r = power_radius(&as_f64(a)).ln();
        for _ in 0..3 {
            let t = TraceVector::new(random_trace(a.len(), &mut r)).unwrap();
            let beta = temperature_from_trace(&zo(a), &t, 300).unwrap();
            let err = (beta - log_r).abs();
            ensure!(err < 1e-2, "matrix {i}: (1/n) log ε_n = {beta} vs log r = {log_r}");
            worst = worst.max(err);
        }
    }
    Ok(format!("5 matrices × 3 traces, max error {worst:.2e} at n = 300"))
}

fn variational_dominance() -> Outcome {
    let mut matrices = vec![
        ZeroOneMatrix::golden_mean(),
        ZeroOneMatrix::ones(2),
        ZeroOneMatrix::cycle(3),
    ];
    matrices.extend(random_matrices(3, 3..=5, 4).iter().map(|a| zo(a)));
    let mut worst_gap = 0.0f64;
    for (i, a) in matrices.iter().enumerate() {
        let rep = variational_scan(a, 1000, 2024 + i as u64, &opts()).unwrap();
        let log_r = power_radius(&a.to_nonnegative().rows()).ln();
        ensure!(rep.violations == 0, "matrix {i}: {} violations", rep.violations);
        ensure!(rep.sample_entropies.len() == 1000, "matrix {i}: wrong sample count");
        let parry_err = (rep.parry_entropy - log_r).abs();
        ensure!(parry_err <= 1e-9, "matrix {i}: parry entropy off by {parry_err:e}");
        worst_gap = worst_gap.max(parry_err);
    }
    Ok(format!(
        "{} matrices × 1000 samples, 0 violations, max |h_parry − log r| = {worst_gap:.1e}",
        matrices.len()
    ))
}

fn resolvent_limit() -> Outcome {
    let mut matrices = vec![ZeroOneMatrix::golden_mean().to_nonnegative()];
    matrices.extend(random_matrices(2, 3..=4, 5).iter().map(|a| zo(a).to_nonnegative()));
    let mut last_dist = 0.0f64;
    for (i, a) in matrices.iter().enumerate() {
        let p = perron_vectors(a, &opts()).unwrap();
        let v_sum: f64 = p.v.iter().sum();
        let mut prev = f64::INFINITY;
        for dt in [0.5, 0.1, 0.01, 1e-4] {
            let r = resolvent_vector(a, &p, p.lambda + dt).unwrap();
            if dt >= 0.01 {
                ensure!((r.pairing - 1.0).abs() <= 1e-10, "matrix {i}: pairing {} at λ+{dt}", r.pairing);
            }
            let dist: f64 = r.normalized().iter().zip(&p.v).map(|(x, v)| (x - v / v_sum).abs()).sum();
            ensure!(dist < prev, "matrix {i}: distance not decreasing at λ+{dt}");
            prev = dist;
        }
        ensure!(prev < 1e-3, "matrix {i}: distance {prev:e} at λ+1e-4");
        last_dist = last_dist.max(prev);
    }
    Ok(format!("pairing within 1e-10, max distance at λ+1e-4 = {last_dist:.1e}"))
}

/// Distinct brute-force predecessor sets among admissible words of length `depth`.
fn brute_class_count(oracle: &Oracle, l: usize, depth: usize) -> usize {
    let mut sets: Vec<Vec<Vec<usize>>> = brute_words(oracle, depth)
        .iter()
        .map(|w| brute_predecessors(oracle, w, l))
        .collect();
    sets.sort();
    sets.dedup();
    sets.len()
}

fn krieger_counts() -> Outcome {
    for d in 1..=4 {
        let spec = SubshiftSpec::full(d).unwrap();
        for l in 0..=8 {
            let q = dim_q(&spec, l, 12).unwrap();
            ensure!(q.count == 1 && q.stabilized, "Full({d}), l = {l}: {q:?}");
        }
    }
    let golden = SubshiftSpec::sft(ZeroOneMatrix::golden_mean()).unwrap();
    let golden_oracle = Oracle::Sft(vec![vec![1, 1], vec![1, 0]]);
    for l in 1..=8 {
        let q = dim_q(&golden, l, 12).unwrap();
        ensure!(q.count == 2 && q.stabilized, "golden mean, l = {l}: {q:?}");
        ensure!(brute_class_count(&golden_oracle, l, 12) == 2, "golden mean oracle, l = {l}");
    }
    let beta = SubshiftSpec::beta(1.7, 64).unwrap();
    let beta_oracle = Oracle::Beta(1.7);
    let mut counts = Vec::new();
    for l in 1..=8 {
        let q = dim_q(&beta, l, 12).unwrap();
        ensure!(q.count == l + 1, "Beta(1.7), l = {l}: count {}", q.count);
        let brute = brute_class_count(&beta_oracle, l, 12);
        ensure!(brute == q.count, "Beta(1.7), l = {l}: oracle {brute} vs {}", q.count);
        counts.push(q.count);
    }
    Ok(format!("Full: 1, golden mean: 2, Beta(1.7) l = 1..8: {counts:?} (oracle agrees)"))
}

fn entropy_brackets() -> Outcome {
    let mut r = rng(7);
    let sofic = vec![
        ("golden mean", SubshiftSpec::sft(ZeroOneMatrix::golden_mean()).unwrap()),
        ("Full(2)", SubshiftSpec::full(2).unwrap()),
        ("Full(3)", SubshiftSpec::full(3).unwrap()),
        ("random SFT", SubshiftSpec::sft(zo(&random_irreducible(4, 0.35, &mut r))).unwrap()),
        ("forbid 11", SubshiftSpec::forbidden(2, vec![Word::from([1, 1])]).unwrap()),
        ("even shift, cap 7", SubshiftSpec::even_shift(7).unwrap()),
    ];
    for (name, spec) in &sofic {
        let b = entropy_bracket(spec, 16, 16).unwrap();
        ensure!(b.bounded && b.upper == b.lower, "{name}: width {}", b.upper - b.lower);
    }
    // words of length 101 need that many digits of the expansion of 1
    let beta = SubshiftSpec::beta(1.7, 256).unwrap();
    let b = entropy_bracket(&beta, 100, 12).unwrap();
    let dim = b.dims[99];
    let corr = b.correction_sequence[99];
    ensure!(dim.count == 101 && dim.stabilized, "Beta(1.7): dim Q_100 = {dim:?}");
    ensure!(corr < 0.1, "Beta(1.7): correction {corr} at n = 100");
    Ok(format!(
        "{} sofic inputs with width 0; Beta(1.7) dim Q_100 = 101, correction {corr:.4}",
        sofic.len()
    ))
}

fn structural_identities() -> Outcome {
    let mut r = rng(8);
    let mut matrices = vec![ZeroOneMatrix::golden_mean(), ZeroOneMatrix::ones(3), ZeroOneMatrix::cycle(3)];
    matrices.extend(random_matrices(2, 3..=4, 9).iter().map(|a| zo(a)));
    let mut worst_h = 0.0f64;
    let mut worst_norm = 0.0f64;
    for (i, a) in matrices.iter().enumerate() {
        let eigen = kms_eigen_sequence(a, 10, &opts()).unwrap();
        let top = TraceVector::new(random_trace(a.dim(), &mut r)).unwrap();
        let generic = CoherentSequence::from_top(a.clone(), &top, 10).unwrap();
        for seq in [&eigen, &generic] {
            let ts = t_prime(&s_prime(seq)).unwrap();
            ensure!(ts.levels == seq.levels[..seq.levels.len() - 1], "matrix {i}: t′∘s′ is not the truncation");
            let st = s_prime(&t_prime(seq).unwrap());
            let tol = seq.max_residual();
            for (x, y) in st.levels.iter().zip(&seq.levels) {
                let diff: f64 = x.iter().zip(y).map(|(p, q)| (p - q).abs()).sum();
                ensure!(diff <= tol, "matrix {i}: s′∘t′ differs by {diff:e} (coherence residual {tol:e})");
            }
            let sums = seq.weighted_sums().unwrap();
            for s in &sums {
                let err = (s - sums[0]).abs();
                ensure!(err <= 1e-9, "matrix {i}: weighted sums vary by {err:e}");
                worst_norm = worst_norm.max(err);
            }
        }
        let h = h_iterate(&eigen, 1).unwrap();
        for (x, y) in h.levels.iter().zip(&eigen.levels) {
            let diff: f64 = x.iter().zip(y).map(|(p, q)| (p - q).abs()).sum();
            ensure!(diff <= 1e-12, "matrix {i}: h moves the eigen-sequence by {diff:e}");
            worst_h = worst_h.max(diff);
        }
    }
    // an exactly representable coherent sequence: both round-trips are exact
    let halves: Vec<Vec<f64>> = (0..6).map(|r| vec![0.5 / 2f64.powi(r); 2]).collect();
    let exact = CoherentSequence::from_levels(ZeroOneMatrix::ones(2), halves, 0.0).unwrap();
    let truncated = CoherentSequence::from_levels(ZeroOneMatrix::ones(2), exact.levels[..5].to_vec(), 0.0).unwrap();
    ensure!(s_prime(&t_prime(&exact).unwrap()) == truncated, "s′∘t′ not exact on dyadic sequence");
    Ok(format!(
        "round-trips exact, h fixed point to {worst_h:.1e}, weighted sums constant to {worst_norm:.1e}"
    ))
}

fn oracle_equivalence() -> Outcome {
    let mut r = rng(10);
    let mut cases: Vec<(String, SubshiftSpec, Oracle)> = Vec::new();
    for d in 1..=3 {
        cases.push((format!("Full({d})"), SubshiftSpec::full(d).unwrap(), Oracle::Full(d)));
    }
    let mut sfts = vec![vec![vec![1, 1], vec![1, 0]], vec![vec![1, 1, 0], vec![0, 1, 1], vec![0, 0, 1]]];
    sfts.push(random_irreducible(3, 0.4, &mut r));
    sfts.push(random_irreducible(2, 0.5, &mut r));
    for a in sfts {
        cases.push((format!("SFT {a:?}"), SubshiftSpec::sft(zo(&a)).unwrap(), Oracle::Sft(a)));
    }
    let forbidden: Vec<(usize, Vec<Vec<usize>>)> = vec![
        (2, vec![vec![1, 1]]),
        (2, vec![vec![2, 1, 2], vec![2, 1, 1, 1, 2], vec![2, 1, 1, 1, 1, 1, 2]]),
        (2, vec![vec![1, 1], vec![1, 2]]),
        (2, vec![vec![1, 2, 1], vec![2, 2]]),
        (3, vec![vec![1, 2], vec![2, 3, 1], vec![3, 3, 3]]),
        (3, vec![vec![1, 1], vec![2, 2], vec![3, 3], vec![1, 2, 3]]),
    ];
    for (d, words) in forbidden {
        let spec = SubshiftSpec::forbidden(d, words.iter().map(|w| Word::new(w.clone())).collect()).unwrap();
        cases.push((format!("Forbidden({d}, {words:?})"), spec, Oracle::Forbidden(d, words)));
    }
    for beta in [1.3, 1.7, PHI, 1.839_286_755_214_161, 2.0, 2.5] {
        cases.push((format!("Beta({beta})"), SubshiftSpec::beta(beta, 64).unwrap(), Oracle::Beta(beta)));
    }
    for (name, spec, oracle) in &cases {
        for n in 1..=12 {
            let lib = count_words(spec, n).unwrap();
            let brute = brute_count(oracle, n);
            ensure!(lib == brute.into(), "{name}: θ_{n} = {lib} vs brute force {brute}");
        }
    }
    // golden mean counts against the Fibonacci numbers
    let golden = SubshiftSpec::sft(ZeroOneMatrix::golden_mean()).unwrap();
    for n in 1..=40 {
        ensure!(count_words(&golden, n).unwrap() == fibonacci_count(n).into(), "golden θ_{n}");
    }

    let mut checked = 0usize;
    for (name, spec, oracle) in &cases {
        let max_len = if oracle.alphabet() == 3 { 6 } else { 8 };
        for len in 1..=max_len {
            for w in brute_words(oracle, len) {
                let all = brute_predecessors(oracle, &w, 4);
                for l in 0..=4 {
                    let lib: Vec<Vec<usize>> = predecessor_set(&Word::new(w.clone()), l, spec)
                        .unwrap()
                        .iter()
                        .map(|m| m.symbols().to_vec())
                        .collect();
                    let brute: Vec<Vec<usize>> = all.iter().filter(|m| m.len() <= l).cloned().collect();
                    ensure!(lib == brute, "{name}: predecessors of {w:?} at l = {l}");
                    checked += 1;
                }
            }
        }
    }
    Ok(format!(
        "{} presentations, θ_n for n ≤ 12 and {checked} predecessor sets match",
        cases.len()
    ))
}

fn measure_consistency() -> Outcome {
    let mut matrices = vec![vec![vec![1u8, 1], vec![1, 0]]];
    matrices.extend(random_matrices(3, 3..=4, 11));
    let mut worst = 0.0f64;
    let mut words_checked = 0usize;
    for (i, a) in matrices.iter().enumerate() {
        let m = parry_measure(&zo(a), &opts()).unwrap();
        let oracle = Oracle::Sft(a.clone());
        let d = a.len();
        let cyl = |w: &[usize]| cylinder(&m, &Word::new(w.to_vec())).unwrap();
        for len in 1..=7 {
            for w in all_words(d, len) {
                let c = cyl(&w);
                ensure!((c > 0.0) == oracle.admissible(&w), "matrix {i}: support of {w:?}");
                if c == 0.0 {
                    continue;
                }
                let right: f64 = (1..=d).map(|j| cyl(&[w.as_slice(), &[j]].concat())).sum();
                let left: f64 = (1..=d).map(|j| cyl(&[&[j], w.as_slice()].concat())).sum();
                let err = (right - c).abs().max((left - c).abs());
                ensure!(err <= 1e-10, "matrix {i}: {w:?} consistency error {err:e}");
                worst = worst.max(err);
                words_checked += 1;
            }
        }
    }
    Ok(format!(
        "{words_checked} cylinders up to length 8, max error {worst:.1e}"
    ))
}

struct Criterion {
    id: u8,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "Cuntz algebra temperatures", budget: Duration::from_secs(1), run: cuntz_shadow },
        Criterion { id: 2, name: "golden mean end to end", budget: Duration::from_secs(5), run: golden_end_to_end },
        Criterion { id: 3, name: "temperature from trace growth", budget: Duration::from_secs(5), run: temperature_from_traces },
        Criterion { id: 4, name: "variational dominance", budget: Duration::from_secs(30), run: variational_dominance },
        Criterion { id: 5, name: "resolvent construction", budget: Duration::from_secs(1), run: resolvent_limit },
        Criterion { id: 6, name: "Krieger class counts", budget: Duration::from_secs(60), run: krieger_counts },
        Criterion { id: 7, name: "entropy bracket", budget: Duration::from_secs(10), run: entropy_brackets },
        Criterion { id: 8, name: "structural identities", budget: Duration::from_secs(1), run: structural_identities },
        Criterion { id: 9, name: "oracle equivalence", budget: Duration::from_secs(60), run: oracle_equivalence },
        Criterion { id: 10, name: "measure consistency", budget: Duration::from_secs(5), run: measure_consistency },
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(c.run).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= c.budget => (true, d),
            Ok(d) => (false, format!("{d}; over the time budget")),
            Err(d) => (false, d),
        };
        failed += usize::from(!ok);
        println!(
            "{} criterion {:>2} {}: {} [{:.3}s / {}s]",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            detail,
            elapsed.as_secs_f64(),
            c.budget.as_secs()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
