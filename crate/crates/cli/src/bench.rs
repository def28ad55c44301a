//! Verdict-versus-PPT benchmark.
//!
//! The corpus is a function of the master seed alone: separable state `i` is
//! a mixture of `1 + i % 6` products drawn from stream `2i`, NPT state `t` is
//! the `t`-th entry of a random-state sequence (rank `1 + t % d`, stream
//! `2t + 1`) filtered to a negative partial transpose. Rows are analysed in
//! parallel and written in corpus order.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use statewit::optimize::{analyze, OptimizerConfig, Verdict};
use statewit::rng::derive_seed;
use statewit::states::{self, ppt_check, BipartiteState, PptVerdict};
use statewit::witness::WitnessParams;
use statewit::io::format_sci;

use crate::cli::BenchArgs;
use crate::commands::write_file;
use crate::{CliError, CliResult};

pub const HEADER: [&str; 15] = [
    "index",
    "family",
    "parameter",
    "seed",
    "ppt_min_eig",
    "ppt_verdict",
    "ppt_exact",
    "verdict",
    "agrees",
    "unitary_min",
    "vector_set_min",
    "diagonal_min",
    "margin",
    "certificate_residual",
    "max_second_schmidt",
];

/// Werner parameters of the sweep, 0.05 to 0.95.
pub fn werner_grid() -> Vec<f64> {
    (1..20).map(|k| k as f64 / 20.0).collect()
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub family: &'static str,
    /// k for separable, rank for random, p for Werner.
    pub parameter: f64,
    pub seed: u64,
    pub state: BipartiteState,
}

pub fn separable_corpus(count: usize, da: usize, db: usize, seed: u64) -> CliResult<Vec<CorpusEntry>> {
    (0..count)
        .map(|i| {
            let k = 1 + i % 6;
            let s = derive_seed(seed, 2 * i as u64);
            Ok(CorpusEntry { family: "separable", parameter: k as f64, seed: s, state: states::random_separable(da, db, k, s)?.0 })
        })
        .collect()
}

pub fn npt_corpus(count: usize, da: usize, db: usize, seed: u64) -> CliResult<Vec<CorpusEntry>> {
    let d = da * db;
    let mut out = Vec::with_capacity(count);
    let mut t = 0u64;
    while out.len() < count {
        let rank = 1 + (t as usize) % d;
        let s = derive_seed(seed, 2 * t + 1);
        let state = states::random_state(da, db, rank, s)?;
        if ppt_check(&state).verdict == PptVerdict::Npt {
            out.push(CorpusEntry { family: "npt", parameter: rank as f64, seed: s, state });
        }
        t += 1;
        if t > 1000 * (count as u64 + 1) {
            return Err(CliError::Usage(format!("could not draw {count} NPT states at {da}x{db}")));
        }
    }
    Ok(out)
}

pub fn werner_corpus() -> CliResult<Vec<CorpusEntry>> {
    werner_grid()
        .into_iter()
        .map(|p| Ok(CorpusEntry { family: "werner", parameter: p, seed: 0, state: states::werner_state(p)? }))
        .collect()
}

#[derive(Clone, Debug)]
pub struct BenchRow {
    pub index: usize,
    pub family: &'static str,
    pub parameter: f64,
    pub seed: u64,
    pub ppt_min_eig: f64,
    pub ppt_npt: bool,
    pub ppt_exact: bool,
    pub verdict: Verdict,
    pub unitary_min: Option<f64>,
    pub vector_set_min: Option<f64>,
    pub zero_tol: f64,
    pub certificate_residual: Option<f64>,
    pub max_second_schmidt: Option<f64>,
    pub runtime_ms: f64,
}

impl BenchRow {
    /// Witness verdict matches the PPT oracle; an inconclusive verdict never does.
    pub fn agrees(&self) -> bool {
        match self.verdict {
            Verdict::SeparableCertified { .. } => !self.ppt_npt,
            Verdict::EntangledIndicated { .. } => self.ppt_npt,
            Verdict::Inconclusive { .. } => false,
        }
    }

    /// Smaller of the two optimizer minima; 0 for states certified without optimization.
    pub fn diagonal_min(&self) -> f64 {
        match (self.unitary_min, self.vector_set_min) {
            (None, None) => 0.0,
            (a, b) => a.unwrap_or(f64::INFINITY).min(b.unwrap_or(f64::INFINITY)),
        }
    }

    /// Diagonal minimum minus the zero tolerance; changes sign at the verdict boundary.
    pub fn margin(&self) -> f64 {
        self.diagonal_min() - self.zero_tol
    }

    fn record(&self, timings: bool) -> Vec<String> {
        let opt = |x: Option<f64>| x.map(format_sci).unwrap_or_default();
        let mut rec = vec![
            self.index.to_string(),
            self.family.to_string(),
            format_sci(self.parameter),
            self.seed.to_string(),
            format_sci(self.ppt_min_eig),
            if self.ppt_npt { "npt" } else { "ppt" }.to_string(),
            self.ppt_exact.to_string(),
            self.verdict.label().to_string(),
            self.agrees().to_string(),
            opt(self.unitary_min),
            opt(self.vector_set_min),
            format_sci(self.diagonal_min()),
            format_sci(self.margin()),
            opt(self.certificate_residual),
            opt(self.max_second_schmidt),
        ];
        if timings {
            rec.push(format!("{:.3}", self.runtime_ms));
        }
        rec
    }
}

/// Analyses one entry; the optimizer seed is taken from the entry.
pub fn run_entry(index: usize, entry: &CorpusEntry, params: &WitnessParams, cfg: &OptimizerConfig) -> CliResult<BenchRow> {
    let start = Instant::now();
    let ppt = ppt_check(&entry.state);
    let cfg = OptimizerConfig { seed: derive_seed(cfg.seed ^ entry.seed, index as u64), ..*cfg };
    let analysis = analyze(&entry.state, params, &cfg, None)?;
    Ok(BenchRow {
        index,
        family: entry.family,
        parameter: entry.parameter,
        seed: entry.seed,
        ppt_min_eig: ppt.min_eig,
        ppt_npt: ppt.verdict == PptVerdict::Npt,
        ppt_exact: ppt.exact,
        verdict: analysis.verdict,
        unitary_min: analysis.unitary.as_ref().map(|r| r.value),
        vector_set_min: analysis.vector_sets.as_ref().map(|r| r.value),
        zero_tol: cfg.zero_tol,
        certificate_residual: analysis.certificate.as_ref().map(|c| c.residual_trace_norm),
        max_second_schmidt: analysis.certificate.as_ref().map(|c| c.max_second_schmidt),
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

pub fn run_corpus(entries: &[CorpusEntry], params: &WitnessParams, cfg: &OptimizerConfig) -> CliResult<Vec<BenchRow>> {
    entries.par_iter().enumerate().map(|(i, e)| run_entry(i, e, params, cfg)).collect()
}

pub fn to_csv(rows: &[BenchRow], timings: bool) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = HEADER.to_vec();
    if timings {
        header.push("runtime_ms");
    }
    w.write_record(&header)?;
    for row in rows {
        w.write_record(row.record(timings))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv of ASCII fields"))
}

/// Fraction of rows agreeing with the oracle; 1 for an empty corpus.
pub fn agreement_rate(rows: &[BenchRow]) -> f64 {
    if rows.is_empty() {
        return 1.0;
    }
    rows.iter().filter(|r| r.agrees()).count() as f64 / rows.len() as f64
}

pub fn corpus_for(args: &BenchArgs) -> CliResult<Vec<CorpusEntry>> {
    let (da, db) = args.dims;
    let mut entries = Vec::new();
    if !args.werner_only {
        entries.extend(separable_corpus(args.count, da, db, args.optimizer.seed)?);
        entries.extend(npt_corpus(args.count, da, db, args.optimizer.seed)?);
    }
    if args.werner || args.werner_only {
        if (da, db) != (2, 2) {
            return Err(CliError::Usage("the Werner sweep is defined for 2x2".into()));
        }
        entries.extend(werner_corpus()?);
    }
    Ok(entries)
}

pub fn cmd_bench(args: &BenchArgs) -> CliResult<i32> {
    let (da, db) = args.dims;
    let entries = corpus_for(args)?;
    let rows = run_corpus(&entries, &args.witness.params(), &args.optimizer.config())?;
    let csv = to_csv(&rows, args.timings)?;
    let agreed = rows.iter().filter(|r| r.agrees()).count();
    let mut summary = format!(
        "{agreed}/{} rows agree with the PPT oracle ({:.1}%)\n",
        rows.len(),
        100.0 * agreement_rate(&rows)
    );
    if da * db > 6 {
        summary += "note: PPT is not equivalent to separability above dimension 6; agreement is not a correctness score\n";
    }
    match &args.out_csv {
        Some(path) => {
            write_file(path, &csv)?;
            print!("{summary}");
        }
        None => {
            print!("{csv}");
            eprint!("{summary}");
        }
    }
    std::io::stdout().flush().ok();
    Ok(0)
}
