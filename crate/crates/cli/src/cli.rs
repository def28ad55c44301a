//! Argument definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use statewit::optimize::OptimizerConfig;
use statewit::witness::WitnessParams;

#[derive(Debug, Parser)]
#[command(name = "statewit", version, about = "Separability testing through an explicitly constructed state witness")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a state file for a reference family.
    Gen(GenArgs),
    /// Run the separability pipeline on a state file.
    Analyze(AnalyzeArgs),
    /// Build, export or inspect the witness of a state.
    Witness(WitnessArgs),
    /// Compare verdicts with the PPT oracle on a seeded corpus.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(subcommand)]
    pub family: Family,
    /// Output path; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Subcommand)]
pub enum Family {
    /// The singlet |psi-><psi-|.
    Bell,
    /// p |psi-><psi-| + (1 - p) I/4.
    Werner {
        #[arg(long)]
        p: f64,
    },
    /// Random mixture of k product states.
    Separable {
        #[arg(long)]
        k: usize,
        #[arg(long, env = crate::SEED_ENV, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        da: usize,
        #[arg(long, default_value_t = 2)]
        db: usize,
    },
    /// Random state of the given rank (induced measure).
    Random {
        #[arg(long)]
        rank: usize,
        #[arg(long, env = crate::SEED_ENV, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        da: usize,
        #[arg(long, default_value_t = 2)]
        db: usize,
    },
}

/// Witness construction parameters.
#[derive(Clone, Debug, Args)]
pub struct WitnessFlags {
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Weight of P_asym in W; defaults to twice the norm bound on Y.
    #[arg(long = "C")]
    pub c: Option<f64>,
    /// Strictification weight; defaults to 1e-3 C.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Extension dimension N; defaults to d^2 - 1.
    #[arg(long = "K")]
    pub k: Option<usize>,
}

impl WitnessFlags {
    pub fn params(&self) -> WitnessParams {
        WitnessParams { alpha: self.alpha, beta: self.beta, gamma: self.gamma, c: self.c, epsilon: self.epsilon }
    }
}

/// Optimizer parameters.
#[derive(Clone, Debug, Args)]
pub struct OptimizerFlags {
    #[arg(long, default_value_t = OptimizerConfig::default().restarts)]
    pub restarts: usize,
    #[arg(long, default_value_t = OptimizerConfig::default().max_iters)]
    pub max_iters: usize,
    #[arg(long, env = crate::SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    /// Minima below this count as zero.
    #[arg(long, default_value_t = OptimizerConfig::default().zero_tol)]
    pub zero_tol: f64,
}

impl OptimizerFlags {
    pub fn config(&self) -> OptimizerConfig {
        OptimizerConfig {
            restarts: self.restarts,
            max_iters: self.max_iters,
            seed: self.seed,
            zero_tol: self.zero_tol,
            ..OptimizerConfig::default()
        }
    }
}

#[derive(Clone, Debug, Args)]
pub struct OutputFlags {
    /// Also write the report to this path.
    #[arg(long)]
    pub json_out: Option<PathBuf>,
    /// Print the full report on stdout instead of a summary.
    #[arg(long)]
    pub json: bool,
    /// Record wall-clock timings (makes output run-dependent).
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub state: PathBuf,
    #[command(flatten)]
    pub witness: WitnessFlags,
    #[command(flatten)]
    pub optimizer: OptimizerFlags,
    #[command(flatten)]
    pub output: OutputFlags,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WitnessAction {
    /// Write W to --out.
    Build,
    /// Matrix-free norm of the selected operator and the triangle bound.
    Norm,
    /// Dense eigenvalues for N <= 6, else a minimum-eigenvalue estimate.
    Spectrum,
    /// Write the selected operator to --out.
    Export,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OperatorChoice {
    A,
    Y,
    W,
    /// W + epsilon P_asym.
    WPlus,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    pub action: WitnessAction,
    /// State file; alternatively use --example or --zero-b.
    #[arg(required_unless_present_any = ["example", "zero_b"], conflicts_with_all = ["example", "zero_b"])]
    pub state: Option<PathBuf>,
    /// The example witness I (x) V~ - (V (x) V~)/N at dimension --n.
    #[arg(long, requires = "n", conflicts_with = "zero_b")]
    pub example: bool,
    /// Pipeline operators for B = 0 at dimension --n.
    #[arg(long, requires = "n")]
    pub zero_b: bool,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_enum, default_value_t = OperatorChoice::W)]
    pub operator: OperatorChoice,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Relative tolerance of the matrix-free iterations.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, env = crate::SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub witness: WitnessFlags,
    #[command(flatten)]
    pub output: OutputFlags,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// States per class: this many separable and this many NPT states.
    #[arg(long, default_value_t = 50)]
    pub count: usize,
    /// Local dimensions as dAxdB.
    #[arg(long, default_value = "2x2", value_parser = parse_dims)]
    pub dims: (usize, usize),
    /// Also append the Werner sweep p = 0.05, 0.10, ..., 0.95 (2x2 only).
    #[arg(long)]
    pub werner: bool,
    /// Run only the Werner sweep.
    #[arg(long, conflicts_with = "werner")]
    pub werner_only: bool,
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
    #[command(flatten)]
    pub witness: WitnessFlags,
    #[command(flatten)]
    pub optimizer: OptimizerFlags,
    /// Add a runtime column (makes output run-dependent).
    #[arg(long)]
    pub timings: bool,
}

fn parse_dims(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected dAxdB, got {s:?}"))?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    let (da, db) = (parse(a)?, parse(b)?);
    if da < 2 || db < 2 {
        return Err(format!("local dimensions must be at least 2, got {da}x{db}"));
    }
    Ok((da, db))
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn dims_parser() {
        assert_eq!(parse_dims("2x3"), Ok((2, 3)));
        assert!(parse_dims("2").is_err());
        assert!(parse_dims("1x4").is_err());
    }

    #[test]
    fn shared_flags_reach_the_config() {
        let cli = Cli::try_parse_from(["statewit", "analyze", "s.json", "--K", "5", "--zero-tol", "1e-2", "--C", "7", "--seed", "3"])
            .unwrap();
        let Command::Analyze(a) = cli.command else { panic!() };
        assert_eq!(a.witness.k, Some(5));
        assert_eq!(a.witness.params().c, Some(7.0));
        let cfg = a.optimizer.config();
        assert_eq!((cfg.zero_tol, cfg.seed), (1e-2, 3));
    }
}
