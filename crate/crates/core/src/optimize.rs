//! Minimizers and the separability verdict.
//!
//! * [`minimize_over_unitaries`]: sum_m [(U (x) U) B (U (x) U)^dag]_{mm,mm} over
//!   the unitary group, by Riemannian gradient descent (skew-Hermitian
//!   projection, QR retraction, Barzilai-Borwein trial step, Armijo
//!   backtracking).
//! * [`minimize_vector_sets`]: alpha G0 + beta G1 + gamma G2 over K vectors
//!   with sum_i |x_i|^2 = 1, the same scheme on the unit sphere.
//! * [`alternating_product_min`]: <uv|S|uv> over unit u, v by alternating
//!   smallest-eigenvector updates.
//! * [`separability_verdict`]: the full pipeline.
//!
//! Restarts run in parallel with seeds `derive_seed(cfg.seed, restart)` and
//! are merged by (value, restart index), so results do not depend on
//! scheduling.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::biconcurrence::{
    self, basis_objective, build_biconcurrence, certify, objective, objective_gradient, BiconcurrenceMatrix,
    CertificateReport, PenaltyWeights, VectorSet, CERTIFICATE_TOL,
};
use crate::error::{Error, Result};
use crate::io;
use crate::rng::{complex_normal, complex_normal_vector, derive_seed, rng_from};
use crate::states::{eigendecomposition_subnormalized, schmidt_coefficients, BipartiteState, ProductEnsemble};
use crate::tensor;
use crate::witness::{StructuredOperator, WitnessParams};
use crate::{ComplexMatrix, Ket, C64};

/// Entries of B below this are rounding noise of an exactly vanishing B.
const NEGLIGIBLE_B: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iters: usize,
    /// Stop when the Riemannian gradient norm falls below this.
    pub grad_tol: f64,
    /// Stop when the objective falls below this.
    pub value_tol: f64,
    /// Minima below this count as zero.
    pub zero_tol: f64,
    pub seed: u64,
    /// Trial step of the first iteration.
    pub initial_step: f64,
    /// Step shrink factor during backtracking.
    pub backtrack: f64,
    /// Sufficient-decrease constant.
    pub armijo: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 16,
            max_iters: 2000,
            grad_tol: 1e-9,
            value_tol: 1e-30,
            zero_tol: 1e-8,
            seed: 0,
            initial_step: 1.0,
            backtrack: 0.5,
            armijo: 1e-4,
        }
    }
}

impl OptimizerConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [self.grad_tol, self.value_tol, self.zero_tol, self.initial_step, self.armijo]
            .iter()
            .all(|x| x.is_finite() && *x > 0.0);
        if !positive || self.restarts == 0 || !(self.backtrack > 0.0 && self.backtrack < 1.0) || self.armijo >= 1.0 {
            return Err(Error::InvalidParameter(format!("invalid optimizer configuration {self:?}")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Minimizer {
    Unitary(ComplexMatrix),
    Vectors(VectorSet),
    /// Unit vector u of a diagonal form <uu|X|uu>.
    Vector(Ket),
    Pair { u: Ket, v: Ket },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinimizationResult {
    pub value: f64,
    pub minimizer: Minimizer,
    pub converged: bool,
    /// Iterations of the winning restart.
    pub iterations: usize,
    pub best_restart: usize,
    pub restart_values: Vec<f64>,
    /// Accepted objective values of the winning restart.
    pub history: Vec<f64>,
}

impl MinimizationResult {
    pub fn summary(&self) -> MinimizationSummary {
        MinimizationSummary {
            value: self.value,
            converged: self.converged,
            iterations: self.iterations,
            best_restart: self.best_restart,
            restart_values: self.restart_values.clone(),
        }
    }
}

/// Serializable part of a [`MinimizationResult`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimizationSummary {
    #[serde(with = "io::sci17")]
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
    pub best_restart: usize,
    #[serde(with = "io::vec_sci17")]
    pub restart_values: Vec<f64>,
}

/// Haar-random unitary (QR of a complex Ginibre matrix with phase fix).
pub fn haar_unitary<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = DMatrix::from_fn(n, n, |_, _| complex_normal(rng));
    qr_retract(g)
}

/// Unitary Q of m = QR with diag(R) > 0.
fn qr_retract(m: ComplexMatrix) -> ComplexMatrix {
    let qr = m.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..q.ncols() {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

fn skew(m: &ComplexMatrix) -> ComplexMatrix {
    (m - m.adjoint()) * C64::new(0.5, 0.0)
}

fn real_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// Search space of [`descend`].
trait Manifold: Sync {
    /// Riemannian gradient from a Euclidean one, as an ambient matrix.
    fn project(&self, x: &ComplexMatrix, egrad: &ComplexMatrix) -> ComplexMatrix;
    /// Retraction of x + step.
    fn retract(&self, x: &ComplexMatrix, step: &ComplexMatrix) -> ComplexMatrix;
}

struct UnitaryGroup;

impl Manifold for UnitaryGroup {
    fn project(&self, x: &ComplexMatrix, egrad: &ComplexMatrix) -> ComplexMatrix {
        skew(&(egrad * x.adjoint())) * x
    }

    fn retract(&self, x: &ComplexMatrix, step: &ComplexMatrix) -> ComplexMatrix {
        qr_retract(x + step)
    }
}

struct Sphere;

impl Manifold for Sphere {
    fn project(&self, x: &ComplexMatrix, egrad: &ComplexMatrix) -> ComplexMatrix {
        egrad - x * C64::new(real_inner(x, egrad), 0.0)
    }

    fn retract(&self, x: &ComplexMatrix, step: &ComplexMatrix) -> ComplexMatrix {
        let y = x + step;
        let n = y.norm();
        y / C64::new(n, 0.0)
    }
}

struct Run {
    x: ComplexMatrix,
    value: f64,
    converged: bool,
    iterations: usize,
    history: Vec<f64>,
}

/// Monotone Riemannian gradient descent with BB trial steps. `nonnegative`
/// enables the `value_tol` stop, which only makes sense for objectives
/// bounded below by zero.
fn descend<M, F>(manifold: &M, x0: ComplexMatrix, value_and_grad: &F, cfg: &OptimizerConfig, nonnegative: bool) -> Run
where
    M: Manifold,
    F: Fn(&ComplexMatrix) -> (f64, ComplexMatrix),
{
    let mut x = x0;
    let (mut f, eg) = value_and_grad(&x);
    let mut g = manifold.project(&x, &eg);
    let mut history = vec![f];
    let mut step = cfg.initial_step;
    let mut prev: Option<(ComplexMatrix, ComplexMatrix)> = None;
    let small = |f: f64| nonnegative && f < cfg.value_tol;
    for it in 0..cfg.max_iters {
        let gg = real_inner(&g, &g);
        if gg.sqrt() < cfg.grad_tol || small(f) {
            return Run { x, value: f, converged: true, iterations: it, history };
        }
        if let Some((px, pg)) = &prev {
            let s = &x - px;
            let y = &g - pg;
            let sy = real_inner(&s, &y);
            if sy.abs() > 0.0 {
                step = (real_inner(&s, &s) / sy).abs();
            }
        }
        step = step.clamp(1e-10, 1e10);
        let accepted = loop {
            let candidate = manifold.retract(&x, &(&g * C64::new(-step, 0.0)));
            let (fc, egc) = value_and_grad(&candidate);
            if fc <= f - cfg.armijo * step * gg {
                break Some((candidate, fc, egc));
            }
            step *= cfg.backtrack;
            if step < 1e-20 {
                break None;
            }
        };
        let Some((candidate, fc, egc)) = accepted else {
            return Run { x, value: f, converged: gg.sqrt() < cfg.grad_tol.sqrt(), iterations: it, history };
        };
        let gc = manifold.project(&candidate, &egc);
        prev = Some((std::mem::replace(&mut x, candidate), std::mem::replace(&mut g, gc)));
        f = fc;
        history.push(f);
    }
    let converged = real_inner(&g, &g).sqrt() < cfg.grad_tol || small(f);
    Run { x, value: f, converged, iterations: cfg.max_iters, history }
}

/// Best of the runs by (value, index).
fn best_of(runs: &[Run]) -> usize {
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.value < runs[best].value {
            best = i;
        }
    }
    best
}

fn multistart<M, F, I>(
    manifold: &M,
    init: I,
    value_and_grad: &F,
    cfg: &OptimizerConfig,
    nonnegative: bool,
) -> Result<(Vec<Run>, usize)>
where
    M: Manifold,
    F: Fn(&ComplexMatrix) -> (f64, ComplexMatrix) + Sync,
    I: Fn(u64) -> ComplexMatrix + Sync,
{
    cfg.validate()?;
    let runs: Vec<Run> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| descend(manifold, init(derive_seed(cfg.seed, r as u64)), value_and_grad, cfg, nonnegative))
        .collect();
    let best = best_of(&runs);
    Ok((runs, best))
}

/// Euclidean gradient of U -> G0(conj rows of U) in the sense
/// df = Re <E, dU>_F.
fn basis_euclidean_gradient(b: &BiconcurrenceMatrix, u: &ComplexMatrix) -> ComplexMatrix {
    let n = u.nrows();
    let mut e = DMatrix::zeros(n, n);
    for m in 0..n {
        let x = u.row(m).transpose().map(|z| z.conj());
        let g = b.diagonal_form_gradient(&x);
        for a in 0..n {
            e[(m, a)] = g[a].conj();
        }
    }
    e
}

fn basis_value(b: &BiconcurrenceMatrix, u: &ComplexMatrix) -> f64 {
    (0..u.nrows()).map(|m| b.diagonal_form(&u.row(m).transpose().map(|z| z.conj()))).sum()
}

/// Riemannian gradient of the basis objective at U: skew(E U^dag) U.
pub fn basis_riemannian_gradient(b: &BiconcurrenceMatrix, u: &ComplexMatrix) -> ComplexMatrix {
    UnitaryGroup.project(u, &basis_euclidean_gradient(b, u))
}

pub fn minimize_over_unitaries(b: &BiconcurrenceMatrix, cfg: &OptimizerConfig) -> Result<MinimizationResult> {
    cfg.validate()?;
    let n = b.dim();
    if b.entries().iter().all(|z| z.norm() <= NEGLIGIBLE_B) {
        let u = tensor::identity(n);
        let value = basis_value(b, &u);
        return Ok(MinimizationResult {
            value,
            minimizer: Minimizer::Unitary(u),
            converged: true,
            iterations: 0,
            best_restart: 0,
            restart_values: vec![value; cfg.restarts],
            history: vec![value],
        });
    }
    let vg = |u: &ComplexMatrix| (basis_value(b, u), basis_euclidean_gradient(b, u));
    let init = |seed: u64| haar_unitary(n, &mut rng_from(seed));
    let (runs, best) = multistart(&UnitaryGroup, init, &vg, cfg, true)?;
    let run = &runs[best];
    let value = basis_objective(b, &run.x)?;
    Ok(MinimizationResult {
        value,
        minimizer: Minimizer::Unitary(run.x.clone()),
        converged: run.converged,
        iterations: run.iterations,
        best_restart: best,
        restart_values: runs.iter().map(|r| r.value).collect(),
        history: run.history.clone(),
    })
}

fn columns_to_set(x: &ComplexMatrix) -> VectorSet {
    VectorSet::new((0..x.ncols()).map(|i| x.column(i).into_owned()).collect()).expect("nonempty")
}

fn set_to_columns(grads: &[Ket]) -> ComplexMatrix {
    DMatrix::from_fn(grads[0].len(), grads.len(), |m, i| grads[i][m])
}

/// alpha G0 + beta G1 + gamma G2 over K vectors in C^N with total squared
/// norm one.
pub fn minimize_vector_sets(
    b: &BiconcurrenceMatrix,
    params: &WitnessParams,
    cfg: &OptimizerConfig,
    k: usize,
) -> Result<MinimizationResult> {
    cfg.validate()?;
    let w = params.weights();
    w.validate()?;
    let n = b.dim();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("K must lie in 1..={n}, got {k}")));
    }
    let vg = |x: &ComplexMatrix| {
        let xs = columns_to_set(x);
        let v = objective(b, &xs, w).expect("validated");
        (v, set_to_columns(&objective_gradient(b, &xs, w).expect("validated")))
    };
    let init = |seed: u64| {
        let mut rng = rng_from(seed);
        let x = DMatrix::from_fn(n, k, |_, _| complex_normal(&mut rng));
        let nrm = x.norm();
        x / C64::new(nrm, 0.0)
    };
    let (runs, best) = multistart(&Sphere, init, &vg, cfg, true)?;
    let run = &runs[best];
    let xs = columns_to_set(&run.x);
    let value = objective(b, &xs, w)?;
    Ok(MinimizationResult {
        value,
        minimizer: Minimizer::Vectors(xs),
        converged: run.converged,
        iterations: run.iterations,
        best_restart: best,
        restart_values: runs.iter().map(|r| r.value).collect(),
        history: run.history.clone(),
    })
}

fn sphere_minimize<F>(dim: usize, value_and_grad: &F, cfg: &OptimizerConfig, nonnegative: bool) -> Result<MinimizationResult>
where
    F: Fn(&Ket) -> (f64, Ket) + Sync,
{
    let vg = |x: &ComplexMatrix| {
        let (v, g) = value_and_grad(&x.column(0).into_owned());
        (v, DMatrix::from_column_slice(dim, 1, g.as_slice()))
    };
    let init = |seed: u64| {
        let v = complex_normal_vector(&mut rng_from(seed), dim);
        let nrm = v.norm();
        DMatrix::from_column_slice(dim, 1, (v / C64::new(nrm, 0.0)).as_slice())
    };
    let (runs, best) = multistart(&Sphere, init, &vg, cfg, nonnegative)?;
    let run = &runs[best];
    let u = run.x.column(0).into_owned();
    Ok(MinimizationResult {
        value: value_and_grad(&u).0,
        minimizer: Minimizer::Vector(u),
        converged: run.converged,
        iterations: run.iterations,
        best_restart: best,
        restart_values: runs.iter().map(|r| r.value).collect(),
        history: run.history.clone(),
    })
}

/// inf over unit u in C^m of <uu|X|uu> for a dense X on C^m (x) C^m.
pub fn minimize_dense_diagonal(x: &ComplexMatrix, m: usize, cfg: &OptimizerConfig) -> Result<MinimizationResult> {
    if x.nrows() != m * m || x.ncols() != m * m {
        return Err(Error::Dimension(format!("X is {}x{}, expected {1}x{1}", x.nrows(), m * m)));
    }
    let vg = |u: &Ket| {
        let uu = tensor::kron_vec(u, u);
        let y = x * &uu;
        let g = Ket::from_fn(m, |a, _| {
            (0..m).map(|b| u[b].conj() * (y[a * m + b] + y[b * m + a])).sum::<C64>() * 2.0
        });
        (uu.dotc(&y).re, g)
    };
    sphere_minimize(m, &vg, cfg, false)
}

/// inf over unit u in C^N (x) C^N of <uu|S|uu>.
pub fn minimize_diagonal(s: &StructuredOperator, cfg: &OptimizerConfig) -> Result<MinimizationResult> {
    let n = s.dim();
    let vg = |u: &Ket| {
        let m2 = s.reduced_operator(u).expect("dimension checked");
        let m1 = s.reduced_operator_first(u).expect("dimension checked");
        let value = u.dotc(&(&m2 * u)).re;
        (value, (m1 * u + m2 * u) * C64::new(2.0, 0.0))
    };
    sphere_minimize(n * n, &vg, cfg, false)
}

fn smallest_eigenpair(m: &ComplexMatrix) -> Result<(f64, Ket)> {
    let (vals, vecs) = tensor::eigh(m)?;
    Ok((vals[0], vecs.column(0).into_owned()))
}

/// (value, u, v, converged, iterations, history) of one alternating run.
type PairRun = (f64, Ket, Ket, bool, usize, Vec<f64>);

/// inf over unit u, v of <uv|S|uv> by alternating exact minimization in v
/// and u.
pub fn alternating_product_min(s: &StructuredOperator, cfg: &OptimizerConfig) -> Result<MinimizationResult> {
    cfg.validate()?;
    let d = s.dim() * s.dim();
    let runs: Vec<Result<PairRun>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng_from(derive_seed(cfg.seed, r as u64));
            let unit = |v: Ket| {
                let n = v.norm();
                v / C64::new(n, 0.0)
            };
            let mut u = unit(complex_normal_vector(&mut rng, d));
            let mut v = unit(complex_normal_vector(&mut rng, d));
            let mut value = s.expectation(&u, &v)?;
            let mut history = vec![value];
            let mut converged = false;
            let mut iterations = 0;
            for it in 0..cfg.max_iters {
                iterations = it + 1;
                let (lv, nv) = smallest_eigenpair(&s.reduced_operator(&u)?)?;
                v = nv;
                history.push(lv);
                let (lu, nu) = smallest_eigenpair(&s.reduced_operator_first(&v)?)?;
                u = nu;
                history.push(lu);
                let drop = value - lu;
                value = lu;
                if drop.abs() <= cfg.value_tol.max(1e-14 * value.abs().max(1e-2)) {
                    converged = true;
                    break;
                }
            }
            Ok((s.expectation(&u, &v)?, u, v, converged, iterations, history))
        })
        .collect();
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.0 < runs[best].0 {
            best = i;
        }
    }
    let (value, u, v, converged, iterations, history) = runs[best].clone();
    Ok(MinimizationResult {
        value,
        minimizer: Minimizer::Pair { u, v },
        converged,
        iterations,
        best_restart: best,
        restart_values: runs.iter().map(|r| r.0).collect(),
        history,
    })
}

/// Point at which [`gradient_check`] compares analytic and numerical slopes.
pub enum GradientTarget<'a> {
    /// Basis objective at a unitary; directions are skew-Hermitian generators.
    Basis { b: &'a BiconcurrenceMatrix, u: &'a ComplexMatrix },
    /// Penalty objective at an arbitrary vector set.
    VectorSets { b: &'a BiconcurrenceMatrix, xs: &'a VectorSet, weights: PenaltyWeights },
}

/// Max relative error between the analytic directional derivative and a
/// central difference with step `h` over 20 random directions.
pub fn gradient_check(target: &GradientTarget, h: f64, seed: u64) -> Result<f64> {
    let mut rng = rng_from(seed);
    let mut worst = 0.0f64;
    let rel = |a: f64, fd: f64| (a - fd).abs() / a.abs().max(fd.abs()).max(1e-300);
    for _ in 0..20 {
        let (analytic, fd) = match target {
            GradientTarget::Basis { b, u } => {
                let n = u.nrows();
                let omega = skew(&DMatrix::from_fn(n, n, |_, _| complex_normal(&mut rng)));
                let grad = basis_riemannian_gradient(b, u);
                let analytic = real_inner(&(grad * u.adjoint()), &omega);
                // Cayley curve through U with velocity omega U
                let cayley = |t: f64| -> Result<ComplexMatrix> {
                    let half = &omega * C64::new(t / 2.0, 0.0);
                    let inv = (tensor::identity(n) - &half)
                        .try_inverse()
                        .ok_or_else(|| Error::InvalidParameter("singular Cayley factor".into()))?;
                    Ok(inv * (tensor::identity(n) + half) * *u)
                };
                let fd = (basis_objective(b, &cayley(h)?)? - basis_objective(b, &cayley(-h)?)?) / (2.0 * h);
                (analytic, fd)
            }
            GradientTarget::VectorSets { b, xs, weights } => {
                let dirs: Vec<Ket> = (0..xs.len()).map(|_| complex_normal_vector(&mut rng, xs.dim())).collect();
                let grads = objective_gradient(b, xs, *weights)?;
                let analytic: f64 = grads.iter().zip(&dirs).map(|(g, d)| g.dotc(d).re).sum();
                let shifted = |t: f64| {
                    VectorSet::new(xs.vectors().iter().zip(&dirs).map(|(x, d)| x + d * C64::new(t, 0.0)).collect())
                };
                let fd = (objective(b, &shifted(h)?, *weights)? - objective(b, &shifted(-h)?, *weights)?) / (2.0 * h);
                (analytic, fd)
            }
        };
        worst = worst.max(rel(analytic, fd));
    }
    Ok(worst)
}

/// Outcome of [`separability_verdict`]. `EntangledIndicated` rests on a
/// nonconvex minimization and can be wrong if every restart ends in a
/// spurious local minimum; `SeparableCertified` is backed by an explicit
/// product decomposition that passed [`biconcurrence::verify_certificate`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Verdict {
    SeparableCertified { certificate: CertificateReport },
    EntangledIndicated {
        #[serde(with = "io::sci17")]
        value: f64,
    },
    Inconclusive { reason: String },
}

impl Verdict {
    pub fn is_separable(&self) -> bool {
        matches!(self, Self::SeparableCertified { .. })
    }

    pub fn is_entangled(&self) -> bool {
        matches!(self, Self::EntangledIndicated { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::SeparableCertified { .. } => "separable",
            Self::EntangledIndicated { .. } => "entangled",
            Self::Inconclusive { .. } => "inconclusive",
        }
    }
}

/// Full record of one analysis.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub verdict: Verdict,
    /// Dimension N the biconcurrence matrix was extended to.
    pub n: usize,
    /// Default extension d^2 - 1.
    pub n_default: usize,
    pub base_rank: usize,
    pub unitary: Option<MinimizationResult>,
    pub vector_sets: Option<MinimizationResult>,
    /// Product ensemble behind a separable verdict.
    pub ensemble: Option<ProductEnsemble>,
    /// Best certificate check attempted, passed or not.
    pub certificate: Option<CertificateReport>,
    pub short_circuit: Option<String>,
}


impl Analysis {
    /// A product input `u` in C^N (x) C^N that makes `<uu|W|uu>` small: the
    /// unitary minimizer scaled by 1/sqrt(N), where G1 and G2 vanish and the
    /// value is alpha * G0 / N^2, or else the vector-set minimizer.
    pub fn witness_minimizer(&self) -> Option<Ket> {
        if let Some(Minimizer::Unitary(u)) = self.unitary.as_ref().map(|r| &r.minimizer) {
            let scale = C64::new(1.0 / (u.nrows() as f64).sqrt(), 0.0);
            let xs = VectorSet::from_unitary(u).ok()?;
            return VectorSet::new(xs.into_vectors().into_iter().map(|x| x * scale).collect()).ok()?.assemble().ok();
        }
        match self.vector_sets.as_ref().map(|r| &r.minimizer) {
            Some(Minimizer::Vectors(xs)) => xs.assemble().ok(),
            _ => None,
        }
    }
}

fn short_circuit(state: &BipartiteState) -> Result<Option<Analysis>> {
    let (da, db) = (state.da(), state.db());
    let n_default = state.default_extension();
    let dec = eigendecomposition_subnormalized(state);
    let (candidates, reason) = if dec.len() == 1 {
        let coeffs = schmidt_coefficients(&dec.vectors[0], da, db)?;
        if coeffs.get(1).copied().unwrap_or(0.0) > 1e-12 {
            return Ok(None);
        }
        (dec.vectors.clone(), "pure product state")
    } else if state.is_maximally_mixed(1e-12) {
        let d = da * db;
        let w = C64::new(1.0 / (d as f64).sqrt(), 0.0);
        ((0..d).map(|k| Ket::from_fn(d, |j, _| if j == k { w } else { C64::new(0.0, 0.0) })).collect(), "maximally mixed state")
    } else {
        return Ok(None);
    };
    let cert = biconcurrence::verify_candidates(state, &candidates, CERTIFICATE_TOL)?;
    if !cert.report.passed {
        return Ok(None);
    }
    Ok(Some(Analysis {
        verdict: Verdict::SeparableCertified { certificate: cert.report.clone() },
        n: n_default,
        n_default,
        base_rank: dec.len(),
        unitary: None,
        vector_sets: None,
        ensemble: Some(cert.ensemble),
        certificate: Some(cert.report),
        short_circuit: Some(reason.to_string()),
    }))
}

/// Runs the pipeline. `k` replaces the extension N = d^2 - 1 by K (vectors
/// then live in C^K); with K < d^2 - 1 only a separable certificate is
/// conclusive.
pub fn analyze(state: &BipartiteState, params: &WitnessParams, cfg: &OptimizerConfig, k: Option<usize>) -> Result<Analysis> {
    cfg.validate()?;
    params.validate()?;
    if let Some(done) = short_circuit(state)? {
        return Ok(done);
    }
    let n_default = state.default_extension();
    let n = k.unwrap_or(n_default);
    let dec = eigendecomposition_subnormalized(state);
    let r = dec.len();
    if n < r || n == 0 {
        return Err(Error::InvalidParameter(format!("K = {n} is below the rank {r} of the state")));
    }
    let b = build_biconcurrence(&dec).extend(n)?;
    let unitary = minimize_over_unitaries(&b, cfg)?;
    let vector_sets = minimize_vector_sets(&b, params, cfg, n)?;

    let mut attempts: Vec<VectorSet> = Vec::new();
    if unitary.value < cfg.zero_tol {
        if let Minimizer::Unitary(u) = &unitary.minimizer {
            attempts.push(VectorSet::from_unitary(u)?);
        }
    }
    if vector_sets.value < cfg.zero_tol {
        if let Minimizer::Vectors(xs) = &vector_sets.minimizer {
            attempts.push(VectorSet::from_rows(&tensor::polar_factor(&xs.to_rows()))?);
        }
    }
    let mut best: Option<biconcurrence::Certificate> = None;
    for xs in &attempts {
        let mut cert = certify(state, &dec, xs, CERTIFICATE_TOL)?;
        if !cert.report.passed {
            let polished = certify(state, &dec, &biconcurrence::polish_basis(state, &dec, xs)?, CERTIFICATE_TOL)?;
            if polished.report.passed || polished.report.residual_trace_norm < cert.report.residual_trace_norm {
                cert = polished;
            }
        }
        let better = best.as_ref().is_none_or(|b| {
            cert.report.passed && !b.report.passed
                || cert.report.passed == b.report.passed && cert.report.residual_trace_norm < b.report.residual_trace_norm
        });
        if better {
            best = Some(cert);
        }
    }

    let evidence = 10.0 * cfg.zero_tol;
    let verdict = match &best {
        Some(cert) if cert.report.passed => Verdict::SeparableCertified { certificate: cert.report.clone() },
        _ if n == n_default && unitary.restart_values.iter().all(|v| *v > evidence) => {
            Verdict::EntangledIndicated { value: unitary.value }
        }
        Some(cert) => Verdict::Inconclusive {
            reason: format!(
                "minimum below zero tolerance but certificate failed (residual {:e}, second Schmidt coefficient {:e})",
                cert.report.residual_trace_norm, cert.report.max_second_schmidt
            ),
        },
        None if n != n_default => Verdict::Inconclusive {
            reason: format!("no certificate found at K = {n}; entanglement evidence needs K = {n_default}"),
        },
        None => Verdict::Inconclusive {
            reason: format!("some restart values lie between the zero tolerance {:e} and {:e}", cfg.zero_tol, evidence),
        },
    };
    let passed = best.as_ref().is_some_and(|c| c.report.passed);
    Ok(Analysis {
        verdict,
        n,
        n_default,
        base_rank: r,
        unitary: Some(unitary),
        vector_sets: Some(vector_sets),
        ensemble: best.as_ref().filter(|_| passed).map(|c| c.ensemble.clone()),
        certificate: best.map(|c| c.report),
        short_circuit: None,
    })
}

pub fn separability_verdict(state: &BipartiteState, params: &WitnessParams, cfg: &OptimizerConfig) -> Result<Verdict> {
    Ok(analyze(state, params, cfg, None)?.verdict)
}
