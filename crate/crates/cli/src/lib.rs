//! Command-line front end: reads an input document, runs the requested
//! analyses and assembles an [`AnalysisReport`].

pub mod input;
pub mod report;

use std::fmt;

use symdyn::equilibrium::{markov_entropy, parry_measure, resolvent_vector, variational_scan};
use symdyn::krieger::{entropy_bracket, sofic_check};
use symdyn::spectral::{irreducible, perron_vectors, spectral_radius, PerronOptions};
use symdyn::subshift::{topological_entropy, SubshiftKind};
use symdyn::tracespace::{bimodule_kms, kms_temperature, temperature_sign, KmsOptions};
use symdyn::NonnegativeMatrix;
use thiserror::Error;

pub use input::{parse_spec, InputDoc, ParsedInput, Target};
pub use report::*;

pub const EXIT_OK: i32 = 0;
pub const EXIT_BAD_INPUT: i32 = 1;
pub const EXIT_INVARIANT: i32 = 2;

const PAIRING_TOL: f64 = 1e-10;
const PARRY_TOL: f64 = 1e-9;
const RESOLVENT_OFFSETS: [f64; 4] = [0.5, 0.1, 0.01, 1e-4];

#[derive(Debug, Error)]
pub enum CliError {
    /// The input or the flags are unusable: exit 1.
    #[error("{0}")]
    Input(String),
    /// A computed result violates an identity it must satisfy: exit 2.
    #[error("invariant failure: {0}")]
    Invariant(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invariant(_) => EXIT_INVARIANT,
            CliError::Input(_) | CliError::Io(_) => EXIT_BAD_INPUT,
        }
    }
}

fn core_err(context: &str) -> impl Fn(symdyn::Error) -> CliError + '_ {
    move |e| match e {
        symdyn::Error::InvariantViolation(_) | symdyn::Error::NotConverged { .. } => {
            CliError::Invariant(format!("{context}: {e}"))
        }
        _ => CliError::Input(format!("{context}: {e}")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Entropy,
    Kms,
    Parry,
    Krieger,
    Bracket,
    Variational,
    Resolvent,
    All,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Command::Entropy => "entropy",
            Command::Kms => "kms",
            Command::Parry => "parry",
            Command::Krieger => "krieger",
            Command::Bracket => "bracket",
            Command::Variational => "variational",
            Command::Resolvent => "resolvent",
            Command::All => "all",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub max_n: usize,
    pub depth: usize,
    pub tol: f64,
    pub samples: usize,
    pub seed: u64,
    pub reducible_mode: bool,
    pub timestamp: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            max_n: 30,
            depth: 12,
            tol: 1e-12,
            samples: 1000,
            seed: 0,
            reducible_mode: false,
            timestamp: true,
        }
    }
}

impl RunOptions {
    fn perron(&self) -> PerronOptions {
        PerronOptions::with_tol(self.tol)
    }

    fn validate(&self) -> Result<(), CliError> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::Input(format!("--tol: must be a positive number, got {}", self.tol)));
        }
        if self.max_n < 4 {
            return Err(CliError::Input(format!("--max-n: must be at least 4, got {}", self.max_n)));
        }
        if self.depth == 0 {
            return Err(CliError::Input("--depth: must be at least 1".into()));
        }
        if self.samples == 0 {
            return Err(CliError::Input("--samples: must be at least 1".into()));
        }
        Ok(())
    }
}

/// Outcome of one section: computed, or not applicable to this input.
enum Section<T> {
    Done(T),
    Skipped(String),
}

struct Runner<'a> {
    input: &'a ParsedInput,
    opts: &'a RunOptions,
    warnings: Vec<String>,
}

pub fn run(command: Command, input: &ParsedInput, opts: &RunOptions) -> Result<AnalysisReport, CliError> {
    opts.validate()?;
    let mut runner = Runner {
        input,
        opts,
        warnings: Vec::new(),
    };
    let all = command == Command::All;
    let wants = |c: Command| all || command == c;
    let mut results = Results::default();

    macro_rules! section {
        ($cmd:expr, $field:ident, $method:ident) => {
            if wants($cmd) {
                match runner.$method()? {
                    Section::Done(s) => results.$field = Some(s),
                    Section::Skipped(why) if all => runner.warnings.push(format!("{}: skipped, {why}", $cmd)),
                    Section::Skipped(why) => return Err(CliError::Input(format!("{}: {why}", $cmd))),
                }
            }
        };
    }
    section!(Command::Entropy, entropy, entropy);
    section!(Command::Kms, kms, kms);
    section!(Command::Parry, parry, parry);
    section!(Command::Krieger, krieger, krieger);
    section!(Command::Bracket, bracket, bracket);
    section!(Command::Variational, variational, variational);
    section!(Command::Resolvent, resolvent, resolvent);

    if let (Some(e), Some(k)) = (&results.entropy, &results.kms) {
        if let Some(exact) = e.exact {
            if k.bracket.is_none() && exact != k.beta {
                return Err(CliError::Invariant(format!(
                    "kms.beta = {} differs from entropy.exact = {exact}",
                    k.beta
                )));
            }
        }
    }

    Ok(AnalysisReport {
        input_echo: input.doc.clone(),
        results,
        provenance: Provenance {
            tool: "symdyn".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.to_string(),
            seed: opts.seed,
            tol: opts.tol,
            max_n: opts.max_n,
            depth: opts.depth,
            samples: opts.samples,
            reducible_mode: opts.reducible_mode,
            timestamp: opts
                .timestamp
                .then(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)),
        },
        warnings: runner.warnings,
    })
}

impl Runner<'_> {
    /// The irreducible 0/1 matrix behind `full`/`sft` inputs, or why there is none.
    fn irreducible_matrix(&self) -> Result<symdyn::ZeroOneMatrix, String> {
        let a = self
            .input
            .transition_matrix()
            .ok_or_else(|| "needs a full or sft input".to_string())?;
        if !irreducible(&a) {
            return Err("needs an irreducible transition matrix".into());
        }
        Ok(a)
    }

    fn entropy(&mut self) -> Result<Section<EntropySection>, CliError> {
        let Some(spec) = self.input.subshift() else {
            return Ok(Section::Skipped("needs a subshift input".into()));
        };
        let est = topological_entropy(spec, self.opts.max_n).map_err(core_err("entropy"))?;
        // recomputed with the requested tolerance so it matches kms.beta
        let exact = match spec.kind() {
            SubshiftKind::Sft(a) => {
                Some(spectral_radius(&a.to_nonnegative(), &self.opts.perron()).map_err(core_err("entropy"))?.ln())
            }
            _ => est.exact,
        };
        Ok(Section::Done(EntropySection {
            n_max: self.opts.max_n,
            method: est.method,
            theta: est.theta.iter().map(|t| t.to_string()).collect(),
            log_rates: est.log_rates,
            extrapolated: est.extrapolated,
            exact,
        }))
    }

    fn kms(&mut self) -> Result<Section<KmsSection>, CliError> {
        let perron = self.opts.perron();
        let err = core_err("kms");
        if let Target::Matrix(m) = &self.input.target {
            let b = bimodule_kms(m, self.opts.depth, &perron).map_err(&err)?;
            let sign = temperature_sign(m, &perron).map_err(&err)?;
            return Ok(Section::Done(KmsSection {
                kind: KmsKind::Bimodule,
                tol: self.opts.tol,
                depth: self.opts.depth,
                reducible_mode: self.opts.reducible_mode,
                lambda: b.lambda,
                beta: b.beta,
                uniqueness_flag: symdyn::spectral::aperiodic(m).map_err(&err)?,
                bracket: None,
                eigen_sequence: Some(b.sequence),
                max_residual: None,
                sign,
            }));
        }
        let Some(a) = self.input.transition_matrix() else {
            return Ok(Section::Skipped("needs a full, sft or matrix input".into()));
        };
        let report = kms_temperature(
            &a,
            &KmsOptions {
                depth: self.opts.depth,
                reducible_mode: self.opts.reducible_mode,
                perron,
            },
        )
        .map_err(&err)?;
        if report.bracket.is_some() {
            self.warnings
                .push("kms: reducible mode, the bracket endpoints are candidate temperatures only".into());
        }
        let sign = temperature_sign(&a.to_nonnegative(), &perron).map_err(&err)?;
        Ok(Section::Done(KmsSection {
            kind: KmsKind::CuntzKrieger,
            tol: self.opts.tol,
            depth: self.opts.depth,
            reducible_mode: self.opts.reducible_mode,
            lambda: report.lambda,
            beta: report.beta,
            uniqueness_flag: report.uniqueness_flag,
            bracket: report.bracket,
            max_residual: report.eigen_sequence.as_ref().map(|s| s.max_residual()),
            eigen_sequence: report.eigen_sequence.map(|s| s.levels),
            sign,
        }))
    }

    fn parry(&mut self) -> Result<Section<ParrySection>, CliError> {
        let a = match self.irreducible_matrix() {
            Ok(a) => a,
            Err(why) => return Ok(Section::Skipped(why)),
        };
        let m = parry_measure(&a, &self.opts.perron()).map_err(core_err("parry"))?;
        let lambda = m.perron.as_ref().map(|p| p.lambda).unwrap_or(f64::NAN);
        let entropy = markov_entropy(&m);
        if (entropy - lambda.ln()).abs() > PARRY_TOL {
            return Err(CliError::Invariant(format!(
                "parry: entropy {entropy} differs from log λ = {}",
                lambda.ln()
            )));
        }
        Ok(Section::Done(ParrySection {
            tol: self.opts.tol,
            lambda,
            log_lambda: lambda.ln(),
            p: m.p,
            pi: m.pi,
            entropy,
        }))
    }

    fn krieger(&mut self) -> Result<Section<KriegerSection>, CliError> {
        let Some(spec) = self.input.subshift() else {
            return Ok(Section::Skipped("needs a subshift input".into()));
        };
        let r = sofic_check(spec, self.opts.max_n, self.opts.depth).map_err(core_err("krieger"))?;
        if let Some(l) = r.stabilized.iter().position(|s| !s) {
            self.warnings.push(format!(
                "krieger: stabilization not reached from l = {} on; counts there are lower bounds",
                l + 1
            ));
        }
        Ok(Section::Done(KriegerSection {
            l_max: self.opts.max_n,
            depth: self.opts.depth,
            sofic_detected: r.sofic_detected,
            counts: r.counts,
            stabilized: r.stabilized,
            depths: r.depths,
            length_cap: r.length_cap,
        }))
    }

    fn bracket(&mut self) -> Result<Section<BracketSection>, CliError> {
        let Some(spec) = self.input.subshift() else {
            return Ok(Section::Skipped("needs a subshift input".into()));
        };
        let b = entropy_bracket(spec, self.opts.max_n, self.opts.depth).map_err(core_err("bracket"))?;
        if !b.bounded {
            self.warnings.push(
                "bracket: class counts not bounded on the window; the upper end uses the finite-n correction".into(),
            );
        }
        Ok(Section::Done(BracketSection {
            n_max: self.opts.max_n,
            depth: self.opts.depth,
            lower: b.lower,
            upper: b.upper,
            width: b.upper - b.lower,
            bounded: b.bounded,
            correction_sequence: b.correction_sequence,
            dims: b.dims,
        }))
    }

    fn variational(&mut self) -> Result<Section<VariationalSection>, CliError> {
        let a = match self.irreducible_matrix() {
            Ok(a) => a,
            Err(why) => return Ok(Section::Skipped(why)),
        };
        let r = variational_scan(&a, self.opts.samples, self.opts.seed, &self.opts.perron())
            .map_err(core_err("variational"))?;
        if r.violations > 0 {
            return Err(CliError::Invariant(format!(
                "variational: {} sampled measures exceed log r(A) = {}",
                r.violations, r.log_radius
            )));
        }
        Ok(Section::Done(VariationalSection {
            samples: self.opts.samples,
            seed: self.opts.seed,
            tol: self.opts.tol,
            log_radius: r.log_radius,
            parry_entropy: r.parry_entropy,
            violations: r.violations,
            max_sample_entropy: r.max_sample_entropy,
            max_entropy: r.max_entropy,
            gap: r.gap,
            strict_dominance: r.strict_dominance,
            sample_entropies: r.sample_entropies,
        }))
    }

    fn resolvent(&mut self) -> Result<Section<ResolventSection>, CliError> {
        let m: NonnegativeMatrix = match &self.input.target {
            Target::Matrix(m) if irreducible(m) => m.clone(),
            Target::Matrix(_) => return Ok(Section::Skipped("needs an irreducible matrix".into())),
            Target::Subshift(_) => match self.irreducible_matrix() {
                Ok(a) => a.to_nonnegative(),
                Err(why) => return Ok(Section::Skipped(why)),
            },
        };
        let err = core_err("resolvent");
        let perron = perron_vectors(&m, &self.opts.perron()).map_err(&err)?;
        let v_sum: f64 = perron.v.iter().sum();
        let v_normalized: Vec<f64> = perron.v.iter().map(|x| x / v_sum).collect();
        let mut points = Vec::new();
        for dt in RESOLVENT_OFFSETS {
            let r = resolvent_vector(&m, &perron, perron.lambda + dt).map_err(&err)?;
            if (r.pairing - 1.0).abs() > PAIRING_TOL {
                return Err(CliError::Invariant(format!(
                    "resolvent: pairing uᵀa_t = {} at t = {}",
                    r.pairing, r.t
                )));
            }
            let distance = r.normalized().iter().zip(&v_normalized).map(|(a, b)| (a - b).abs()).sum();
            points.push(ResolventPoint {
                t: r.t,
                a_t: r.a_t,
                pairing: r.pairing,
                distance,
            });
        }
        let monotone = points.windows(2).all(|w| w[1].distance <= w[0].distance);
        Ok(Section::Done(ResolventSection {
            tol: self.opts.tol,
            lambda: perron.lambda,
            v_normalized,
            points,
            monotone,
        }))
    }
}

/// Pretty JSON with a trailing newline.
pub fn render(report: &AnalysisReport) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("reports contain only finite numbers");
    text.push('\n');
    text
}
