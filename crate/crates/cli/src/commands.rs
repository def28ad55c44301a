//! `gen`, `analyze` and `witness`.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use nalgebra::DMatrix;
use statewit::biconcurrence::{build_biconcurrence, BiconcurrenceMatrix};
use statewit::optimize::{analyze, Analysis, OptimizerConfig, Verdict};
use statewit::states::{self, eigendecomposition_subnormalized, BipartiteState};
use statewit::witness::{self, example_witness, norm_upper_bound, strictify, witness_for, StructuredOperator, WitnessParams};
use statewit::{io, tensor};

use crate::cli::{AnalyzeArgs, Family, GenArgs, OperatorChoice, OutputFlags, WitnessAction, WitnessArgs};
use crate::report::{Estimate, InputDescriptor, Minima, Parameters, RunReport, Timings, WitnessSummary};
use crate::{CliError, CliResult, EXIT_ENTANGLED, EXIT_INCONCLUSIVE, EXIT_SEPARABLE};

/// Reads a state file; I/O failures and malformed contents are told apart.
pub fn load_state(path: &Path) -> CliResult<BipartiteState> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Unreadable { path: path.into(), source })?;
    io::state_from_json(&text).map_err(|e| CliError::Malformed { path: path.into(), reason: e.to_string() })
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|source| CliError::Unwritable { path: path.into(), source })
}

fn write_out(out: Option<&Path>, contents: &str) -> CliResult<()> {
    match out {
        Some(path) => write_file(path, contents),
        None => std::io::stdout()
            .write_all(contents.as_bytes())
            .map_err(|source| CliError::Unwritable { path: "<stdout>".into(), source }),
    }
}

pub fn generate(family: &Family) -> CliResult<BipartiteState> {
    Ok(match *family {
        Family::Bell => states::bell_state(),
        Family::Werner { p } => states::werner_state(p)?,
        Family::Separable { k, seed, da, db } => states::random_separable(da, db, k, seed)?.0,
        Family::Random { rank, seed, da, db } => states::random_state(da, db, rank, seed)?,
    })
}

pub fn cmd_gen(args: &GenArgs) -> CliResult<i32> {
    let state = generate(&args.family)?;
    write_out(args.out.as_deref(), &io::state_to_json(&state))?;
    Ok(0)
}

pub fn exit_code(verdict: &Verdict) -> i32 {
    match verdict {
        Verdict::SeparableCertified { .. } => EXIT_SEPARABLE,
        Verdict::EntangledIndicated { .. } => EXIT_ENTANGLED,
        Verdict::Inconclusive { .. } => EXIT_INCONCLUSIVE,
    }
}

/// Extended B of a state at `k` (default d^2 - 1).
fn extended_b(state: &BipartiteState, k: Option<usize>) -> CliResult<BiconcurrenceMatrix> {
    let b = build_biconcurrence(&eigendecomposition_subnormalized(state));
    Ok(b.extend(k.unwrap_or(state.default_extension()))?)
}

/// C and epsilon as the pipeline resolves them for an extension of size `n`.
fn resolved(params: &WitnessParams, norm_b: f64, n: usize) -> WitnessParams {
    let c = params.c.unwrap_or(2.0 * norm_upper_bound(params, norm_b, n));
    WitnessParams { c: Some(c), epsilon: Some(params.epsilon.unwrap_or(1e-3 * c)), ..*params }
}

fn analysis_notes(analysis: &Analysis, params: &WitnessParams, cfg: &OptimizerConfig, bound: f64) -> Vec<String> {
    let mut notes = Vec::new();
    if let Some(reason) = &analysis.short_circuit {
        notes.push(format!("{reason}: certified directly without optimization"));
    }
    if analysis.n != analysis.n_default {
        notes.push(format!(
            "K = {} truncates the extension N = {}; only a separable certificate is conclusive at this size",
            analysis.n, analysis.n_default
        ));
    }
    if analysis.verdict.is_entangled() {
        notes.push(
            "entangled verdict rests on a nonconvex multistart minimization; it is evidence, not a proof".into(),
        );
    }
    if cfg.zero_tol != OptimizerConfig::default().zero_tol {
        notes.push(format!(
            "zero tolerance {:e} differs from the default {:e}; verdicts near the separability boundary depend on it",
            cfg.zero_tol,
            OptimizerConfig::default().zero_tol
        ));
    }
    if let Some(c) = params.c {
        if c <= bound {
            notes.push(format!("C = {c:e} is at or below the norm bound {bound:e}; it was checked against an estimate of ||Y||"));
        }
    }
    notes
}

fn finish_report(report: &RunReport, output: &OutputFlags, summary: &str) -> CliResult<()> {
    let json = report.to_json();
    if let Some(path) = &output.json_out {
        write_file(path, &json)?;
    }
    write_out(None, if output.json { &json } else { summary })
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> CliResult<i32> {
    let start = Instant::now();
    let state = load_state(&args.state)?;
    let params = args.witness.params();
    let cfg = args.optimizer.config();
    let analysis = analyze(&state, &params, &cfg, args.witness.k)?;

    let norm_b = extended_b(&state, Some(analysis.n))?.norm();
    let bound = norm_upper_bound(&params, norm_b, analysis.n);
    let shown = resolved(&params, norm_b, analysis.n);
    let input = InputDescriptor::file(&args.state.display().to_string(), [state.da(), state.db()], analysis.base_rank);
    let mut report = RunReport::new("analyze", input, Parameters::new(&shown, &cfg, args.witness.k, analysis.n));
    report.notes = analysis_notes(&analysis, &params, &cfg, bound);
    report.verdict = Some(analysis.verdict.clone());
    report.minima = Some(Minima {
        unitary: analysis.unitary.as_ref().map(|r| r.summary()),
        vector_sets: analysis.vector_sets.as_ref().map(|r| r.summary()),
        short_circuit: analysis.short_circuit.clone(),
    });
    report.certificate = analysis.certificate.clone();
    if args.output.timings {
        report.timings = Some(Timings { total_seconds: start.elapsed().as_secs_f64() });
    }

    let mut summary = format!("verdict: {}\n", analysis.verdict.label());
    match &analysis.verdict {
        Verdict::EntangledIndicated { value } => summary += &format!("minimum: {}\n", io::format_sci(*value)),
        Verdict::Inconclusive { reason } => summary += &format!("reason: {reason}\n"),
        Verdict::SeparableCertified { certificate } => {
            summary += &format!(
                "certificate: {} product terms, residual {}\n",
                certificate.terms,
                io::format_sci(certificate.residual_trace_norm)
            )
        }
    }
    for note in &report.notes {
        summary += &format!("note: {note}\n");
    }
    finish_report(&report, &args.output, &summary)?;
    Ok(exit_code(&analysis.verdict))
}

/// The operators a `witness` invocation can address.
struct WitnessSource {
    input: InputDescriptor,
    n: usize,
    params: Option<WitnessParams>,
    norm_b: Option<f64>,
    c: Option<f64>,
    epsilon: Option<f64>,
    /// Selected operator and a triangle bound on its norm.
    operator: (String, StructuredOperator, f64),
    /// The witness itself, written by `build`.
    witness: StructuredOperator,
}

fn witness_source(args: &WitnessArgs) -> CliResult<WitnessSource> {
    let params = args.witness.params();
    if args.example {
        let n = args.n.expect("required by clap");
        if args.operator != OperatorChoice::W {
            return Err(CliError::Usage("--example provides only the witness itself (--operator w)".into()));
        }
        let bound = 1.0 + 1.0 / n as f64;
        let w = example_witness(n)?;
        return Ok(WitnessSource {
            input: InputDescriptor::synthetic("example"),
            n,
            params: None,
            norm_b: None,
            c: None,
            epsilon: None,
            operator: ("example".into(), w.clone(), bound),
            witness: w,
        });
    }
    let (input, b) = if args.zero_b {
        let n = args.n.expect("required by clap");
        let zero = BiconcurrenceMatrix::from_entries(DMatrix::zeros(1, 1), 1, 1)?;
        (InputDescriptor::synthetic("zero-b"), zero.extend(n)?)
    } else {
        let path = args.state.as_ref().expect("required by clap");
        let state = load_state(path)?;
        let b = extended_b(&state, args.witness.k.or(args.n))?;
        let input = InputDescriptor::file(&path.display().to_string(), [state.da(), state.db()], b.base_rank());
        (input, b)
    };
    let build = witness_for(&b, &params, args.seed)?;
    let epsilon = params.epsilon.unwrap_or(1e-3 * build.c);
    let operator = match args.operator {
        OperatorChoice::A => ("A".to_string(), build.a, build.bound),
        OperatorChoice::Y => ("Y".to_string(), build.y, build.bound),
        OperatorChoice::W => ("W".to_string(), build.w.clone(), build.bound + build.c),
        OperatorChoice::WPlus => ("W+".to_string(), strictify(&build.w, epsilon)?, build.bound + build.c + epsilon),
    };
    Ok(WitnessSource {
        input,
        n: b.dim(),
        params: Some(params),
        norm_b: Some(build.norm_b),
        c: Some(build.c),
        epsilon: Some(epsilon),
        operator,
        witness: build.w,
    })
}

pub fn cmd_witness(args: &WitnessArgs) -> CliResult<i32> {
    let start = Instant::now();
    let src = witness_source(args)?;
    let (name, op, op_bound) = &src.operator;
    let mut summary = WitnessSummary {
        operator: name.clone(),
        n: src.n,
        terms: op.terms().len(),
        norm_b: src.norm_b,
        bound: *op_bound,
        c: src.c,
        epsilon: src.epsilon,
        norm: None,
        eigenvalues: None,
        min_eigenvalue: None,
        output: None,
    };
    let mut text = format!("operator: {name} (N = {}, {} terms)\n", src.n, op.terms().len());
    match args.action {
        WitnessAction::Build | WitnessAction::Export => {
            let (label, target) = match args.action {
                WitnessAction::Build if args.example => ("example", &src.witness),
                WitnessAction::Build => ("W", &src.witness),
                _ => (name.as_str(), op),
            };
            write_out(args.out.as_deref(), &io::to_json_pretty(&target.to_json()))?;
            summary.operator = label.to_string();
            summary.terms = target.terms().len();
            summary.output = args.out.as_ref().map(|p| p.display().to_string());
            if args.out.is_none() {
                // The operator went to stdout; keep it parseable.
                text.clear();
            }
        }
        WitnessAction::Norm => {
            let est = op.norm_matfree(args.tol, args.seed)?;
            text += &format!("norm: {} (residual {})\n", io::format_sci(est.value), io::format_sci(est.residual));
            text += &format!("triangle bound: {}\n", io::format_sci(*op_bound));
            summary.norm = Some(Estimate::from(est));
        }
        WitnessAction::Spectrum => {
            if src.n <= witness::DENSE_MAX_N {
                let ev: Vec<f64> = tensor::eigenvalues(&op.to_dense()?)?.iter().copied().collect();
                let min = ev.iter().copied().fold(f64::INFINITY, f64::min);
                let max = ev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                text += &format!("min eigenvalue: {}\nmax eigenvalue: {}\n", io::format_sci(min), io::format_sci(max));
                summary.eigenvalues = Some(ev);
            } else {
                let est = op.min_eigenvalue_matfree(args.tol, args.seed)?;
                text += &format!("min eigenvalue (estimate): {}\n", io::format_sci(est.value));
                summary.min_eigenvalue = Some(Estimate::from(est));
            }
        }
    }

    let cfg = OptimizerConfig { seed: args.seed, ..OptimizerConfig::default() };
    let wp = src.params.map(|p| WitnessParams { c: src.c, epsilon: src.epsilon, ..p }).unwrap_or(WitnessParams {
        alpha: 0.0,
        beta: 0.0,
        gamma: 0.0,
        c: None,
        epsilon: None,
    });
    let mut report = RunReport::new("witness", src.input, Parameters::new(&wp, &cfg, args.witness.k, src.n));
    if args.example {
        report.notes.push("example witness I (x) V~ - (V (x) V~)/N; construction weights do not apply".into());
    }
    report.witness = Some(summary);
    if args.output.timings {
        report.timings = Some(Timings { total_seconds: start.elapsed().as_secs_f64() });
    }
    finish_report(&report, &args.output, &text)?;
    Ok(0)
}

/// Reads an operator written by `witness build` or `witness export`.
pub fn load_witness(path: &Path) -> CliResult<StructuredOperator> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Unreadable { path: path.into(), source })?;
    let malformed = |reason: String| CliError::Malformed { path: path.into(), reason };
    let json = serde_json::from_str(&text).map_err(|e| malformed(e.to_string()))?;
    StructuredOperator::from_json(&json).map_err(|e| malformed(e.to_string()))
}
