//! The JSON report shared by `analyze` and `witness`.
//!
//! Floats use the 17-digit format of [`statewit::io`], so a report read back
//! with [`RunReport::from_json`] compares equal to the one written. Wall-clock
//! timings are only included when requested, which keeps reports from
//! identical runs byte-identical.

use serde::{Deserialize, Serialize};
use statewit::biconcurrence::CertificateReport;
use statewit::io::{self, opt_sci17, sci17, vec_sci17};
use statewit::optimize::{MinimizationSummary, OptimizerConfig, Verdict};
use statewit::tensor::SpectralEstimate;
use statewit::witness::WitnessParams;

pub const TOOL: &str = "statewit";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub input: InputDescriptor,
    pub parameters: Parameters,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minima: Option<Minima>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl RunReport {
    pub fn new(command: &str, input: InputDescriptor, parameters: Parameters) -> Self {
        Self {
            tool: TOOL.to_string(),
            version: VERSION.to_string(),
            command: command.to_string(),
            input,
            parameters,
            verdict: None,
            minima: None,
            certificate: None,
            witness: None,
            notes: Vec::new(),
            timings: None,
        }
    }

    pub fn to_json(&self) -> String {
        io::to_json_pretty(self)
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

/// Where the analysed object came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputDescriptor {
    /// `file`, `example` or `zero-b`.
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<[usize; 2]>,
    /// Rank of the state, i.e. the base size r of B.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
}

impl InputDescriptor {
    pub fn file(path: &str, dims: [usize; 2], rank: usize) -> Self {
        Self { source: "file".into(), path: Some(path.into()), dims: Some(dims), rank: Some(rank) }
    }

    pub fn synthetic(source: &str) -> Self {
        Self { source: source.into(), path: None, dims: None, rank: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    #[serde(with = "sci17")]
    pub alpha: f64,
    #[serde(with = "sci17")]
    pub beta: f64,
    #[serde(with = "sci17")]
    pub gamma: f64,
    #[serde(rename = "C", with = "opt_sci17")]
    pub c: Option<f64>,
    #[serde(with = "opt_sci17")]
    pub epsilon: Option<f64>,
    /// Requested extension; `null` means the default N = d^2 - 1.
    #[serde(rename = "K")]
    pub k: Option<usize>,
    /// Extension actually used.
    #[serde(rename = "N")]
    pub n: usize,
    pub seed: u64,
    pub restarts: usize,
    pub max_iters: usize,
    #[serde(with = "sci17")]
    pub grad_tol: f64,
    #[serde(with = "sci17")]
    pub value_tol: f64,
    #[serde(with = "sci17")]
    pub zero_tol: f64,
    #[serde(with = "sci17")]
    pub certificate_tol: f64,
}

impl Parameters {
    pub fn new(w: &WitnessParams, cfg: &OptimizerConfig, k: Option<usize>, n: usize) -> Self {
        Self {
            alpha: w.alpha,
            beta: w.beta,
            gamma: w.gamma,
            c: w.c,
            epsilon: w.epsilon,
            k,
            n,
            seed: cfg.seed,
            restarts: cfg.restarts,
            max_iters: cfg.max_iters,
            grad_tol: cfg.grad_tol,
            value_tol: cfg.value_tol,
            zero_tol: cfg.zero_tol,
            certificate_tol: statewit::biconcurrence::CERTIFICATE_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Minima {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unitary: Option<MinimizationSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector_sets: Option<MinimizationSummary>,
    /// Set when a trivial state was answered without optimization.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub short_circuit: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    #[serde(with = "sci17")]
    pub value: f64,
    #[serde(with = "sci17")]
    pub residual: f64,
    pub iterations: usize,
}

impl From<SpectralEstimate> for Estimate {
    fn from(e: SpectralEstimate) -> Self {
        Self { value: e.value, residual: e.residual, iterations: e.iterations }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessSummary {
    /// Which operator the numbers refer to (`A`, `Y`, `W`, `W+`, `example`).
    pub operator: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub terms: usize,
    #[serde(default, with = "opt_sci17", skip_serializing_if = "Option::is_none")]
    pub norm_b: Option<f64>,
    /// Triangle-inequality bound on the norm.
    #[serde(with = "sci17")]
    pub bound: f64,
    #[serde(rename = "C", default, with = "opt_sci17", skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, with = "opt_sci17", skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm: Option<Estimate>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_vec_sci17")]
    pub eigenvalues: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_eigenvalue: Option<Estimate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

mod opt_vec_sci17 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Option<Vec<f64>>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => super::vec_sci17::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<f64>>, D::Error> {
        Ok(Option::<Vec<Option<f64>>>::deserialize(d)?
            .map(|v| v.into_iter().map(|x| x.unwrap_or(f64::NAN)).collect()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    #[serde(with = "sci17")]
    pub total_seconds: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use statewit::optimize::analyze;
    use statewit::states::{random_separable, werner_state};

    fn report_for(state: &statewit::states::BipartiteState, seed: u64) -> RunReport {
        let cfg = OptimizerConfig { restarts: 3, ..OptimizerConfig::with_seed(seed) };
        let params = WitnessParams { c: Some(1.0 / 3.0), ..WitnessParams::default() };
        let a = analyze(state, &params, &cfg, None).unwrap();
        let mut r = RunReport::new("analyze", InputDescriptor::file("x.json", [2, 2], a.base_rank), Parameters::new(&params, &cfg, None, a.n));
        r.verdict = Some(a.verdict);
        r.minima = Some(Minima {
            unitary: a.unitary.map(|m| m.summary()),
            vector_sets: a.vector_sets.map(|m| m.summary()),
            short_circuit: a.short_circuit,
        });
        r.certificate = a.certificate;
        r.notes.push("n".into());
        r.timings = Some(Timings { total_seconds: 0.1 + 0.2 });
        r
    }

    #[test]
    fn report_round_trip_is_lossless() {
        for r in [report_for(&werner_state(0.7).unwrap(), 1), report_for(&random_separable(2, 2, 2, 4).unwrap().0, 2)] {
            let text = r.to_json();
            let back = RunReport::from_json(&text).unwrap();
            assert_eq!(back, r);
            assert_eq!(back.to_json(), text);
        }
    }

    #[test]
    fn witness_summary_round_trip() {
        let mut r = RunReport::new("witness", InputDescriptor::synthetic("example"), Parameters::new(&WitnessParams::default(), &OptimizerConfig::default(), Some(4), 4));
        r.witness = Some(WitnessSummary {
            operator: "example".into(),
            n: 4,
            terms: 2,
            norm_b: None,
            bound: 1.25,
            c: Some(std::f64::consts::PI),
            epsilon: None,
            norm: Some(Estimate { value: 1.0 / 3.0, residual: 1e-17, iterations: 9 }),
            eigenvalues: Some(vec![-1.25, 0.1, 1.0 / 7.0]),
            min_eigenvalue: None,
            output: Some("w.json".into()),
        });
        let back = RunReport::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }
}
