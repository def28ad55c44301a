//! The biconcurrence matrix `B`, the penalty forms G0/G1/G2 and separability
//! certificates.
//!
//! For a decomposition rho = sum_n |psi_n><psi_n| of length r,
//!
//! ```text
//! B[(m,mu),(n,nu)] = <psi_m|<psi_mu| P_asym(A,A') (x) P_asym(B,B') |psi_n>|psi_nu>
//! ```
//!
//! `B` is stored at its base size r^2 x r^2. After [`BiconcurrenceMatrix::extend`]
//! to dimension `N` it acts on C^N (x) C^N with every index >= r treated as a
//! zero row/column; nothing of size N^2 is ever allocated.
//!
//! Basis convention: a vector set `x_1..x_K` in C^N selects the candidate
//! decomposition `phi_i = sum_n x_i[n] psi_n`, and `G0 = sum_i <x_i x_i|B|x_i x_i>`
//! is the sum of the biconcurrences of the `phi_i`. For a unitary `U` the
//! basis is `x_m = conj(row m of U)`, which makes
//! `sum_m [(U (x) U) B (U (x) U)^dag]_{mm,mm}` equal to G0.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{self, MatrixJson};
use crate::states::{schmidt_rank_one, BipartiteState, ProductEnsemble, ProductTerm, PureDecomposition};
use crate::tensor::{self, LegShape};
use crate::{ComplexMatrix, Ket, C64};

/// Objective value below which a certificate is attempted.
pub const CERTIFICATE_THRESHOLD: f64 = 1e-8;
/// Default tolerance of [`verify_certificate`].
pub const CERTIFICATE_TOL: f64 = 1e-6;
/// Eigenvalues of rho^TB below this count as zero when polishing.
const PT_KERNEL_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct BiconcurrenceMatrix {
    base_rank: usize,
    n: usize,
    da: usize,
    db: usize,
    entries: ComplexMatrix,
}

impl BiconcurrenceMatrix {
    /// Wraps an r^2 x r^2 Hermitian matrix as given.
    pub fn from_entries(entries: ComplexMatrix, da: usize, db: usize) -> Result<Self> {
        let side = entries.nrows();
        let r = (side as f64).sqrt().round() as usize;
        if r == 0 || r * r != side || entries.ncols() != side {
            return Err(Error::Dimension(format!("{}x{} is not an r^2 x r^2 matrix", side, entries.ncols())));
        }
        let scale = entries.iter().fold(1.0f64, |acc, z| acc.max(z.norm()));
        let dev = tensor::hermitian_deviation(&entries);
        if dev > tensor::HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self { base_rank: r, n: r, da, db, entries })
    }

    pub fn base_rank(&self) -> usize {
        self.base_rank
    }

    /// Extended dimension N.
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn da(&self) -> usize {
        self.da
    }

    pub fn db(&self) -> usize {
        self.db
    }

    /// Base r^2 x r^2 block, index (m * r + mu, n * r + nu).
    pub fn entries(&self) -> &ComplexMatrix {
        &self.entries
    }

    /// Logical zero padding to C^N (x) C^N.
    pub fn extend(&self, n: usize) -> Result<Self> {
        if n < self.base_rank {
            return Err(Error::InvalidParameter(format!(
                "cannot extend a rank-{} biconcurrence matrix to N = {n}",
                self.base_rank
            )));
        }
        Ok(Self { n, ..self.clone() })
    }

    pub fn element(&self, m: usize, mu: usize, n: usize, nu: usize) -> C64 {
        let r = self.base_rank;
        if m < r && mu < r && n < r && nu < r {
            self.entries[(m * r + mu, n * r + nu)]
        } else {
            C64::new(0.0, 0.0)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|z| z.norm() == 0.0)
    }

    /// ||B||_inf; zero padding does not change it.
    pub fn norm(&self) -> f64 {
        tensor::operator_norm(&self.entries).expect("B is Hermitian")
    }

    /// Materialized N^2 x N^2 matrix.
    pub fn padded_dense(&self) -> ComplexMatrix {
        let (n, r) = (self.n, self.base_rank);
        let mut out = DMatrix::zeros(n * n, n * n);
        for a in 0..r * r {
            for b in 0..r * r {
                out[((a / r) * n + a % r, (b / r) * n + b % r)] = self.entries[(a, b)];
            }
        }
        out
    }

    /// The first `base_rank` coordinates of `x`, tensored with themselves.
    fn doubled(&self, x: &Ket) -> Ket {
        let r = self.base_rank;
        Ket::from_fn(r * r, |k, _| x[k / r] * x[k % r])
    }

    /// <x x|B|x x>.
    pub fn diagonal_form(&self, x: &Ket) -> f64 {
        let xx = self.doubled(x);
        xx.dotc(&(&self.entries * &xx)).re
    }

    /// Real gradient of `diagonal_form`: d f = Re <grad, dx>.
    pub fn diagonal_form_gradient(&self, x: &Ket) -> Ket {
        let r = self.base_rank;
        let bxx = &self.entries * self.doubled(x);
        let mut g = Ket::zeros(x.len());
        for m in 0..r {
            let mut acc = C64::new(0.0, 0.0);
            for b in 0..r {
                acc += x[b].conj() * (bxx[m * r + b] + bxx[b * r + m]);
            }
            g[m] = acc * 2.0;
        }
        g
    }

    pub fn to_json(&self) -> BiconcurrenceJson {
        BiconcurrenceJson {
            base_rank: self.base_rank,
            n: self.n,
            da: self.da,
            db: self.db,
            matrix: MatrixJson::from_matrix(&self.entries),
        }
    }

    pub fn from_json(j: &BiconcurrenceJson) -> Result<Self> {
        let b = Self::from_entries(j.matrix.to_matrix()?, j.da, j.db)?;
        if b.base_rank != j.base_rank {
            return Err(Error::Format(format!("base_rank {} does not match a {}x{} matrix", j.base_rank, j.matrix.rows, j.matrix.cols)));
        }
        b.extend(j.n)
    }
}

/// Export layout of a biconcurrence matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiconcurrenceJson {
    pub base_rank: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "dA")]
    pub da: usize,
    #[serde(rename = "dB")]
    pub db: usize,
    pub matrix: MatrixJson,
}

/// B from a decomposition, by contracting psi_m (x) psi_mu against
/// P_asym(A,A') (x) P_asym(B,B') reordered to the (A, B, A', B') legs.
pub fn build_biconcurrence(dec: &PureDecomposition) -> BiconcurrenceMatrix {
    let (da, db) = (dec.da, dec.db);
    let d = da * db;
    let r = dec.len();
    let projector = tensor::kron(&tensor::antisym_projector(da), &tensor::antisym_projector(db));
    let shape = LegShape::new(vec![da, da, db, db]).expect("positive dims");
    let projector = tensor::permute_legs(&projector, &shape, &[0, 2, 1, 3]).expect("valid permutation");

    let pairs = DMatrix::from_fn(d * d, r * r, |row, col| {
        dec.vectors[col / r][row / d] * dec.vectors[col % r][row % d]
    });
    let entries = pairs.adjoint() * (&projector * &pairs);
    let entries = (&entries + entries.adjoint()) * C64::new(0.5, 0.0);
    BiconcurrenceMatrix { base_rank: r, n: r, da, db, entries }
}

/// Vectors x_1..x_K of a common dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorSet {
    vectors: Vec<Ket>,
    dim: usize,
}

impl VectorSet {
    pub fn new(vectors: Vec<Ket>) -> Result<Self> {
        let dim = vectors.first().map(|v| v.len()).ok_or_else(|| Error::InvalidParameter("empty vector set".into()))?;
        if dim == 0 || vectors.iter().any(|v| v.len() != dim) {
            return Err(Error::Dimension("vectors of a set must share one positive dimension".into()));
        }
        Ok(Self { vectors, dim })
    }

    /// Rows of `m` as vectors.
    pub fn from_rows(m: &ComplexMatrix) -> Result<Self> {
        Self::new((0..m.nrows()).map(|i| m.row(i).transpose()).collect())
    }

    /// The basis represented by a unitary: x_m = conj(row m of U).
    pub fn from_unitary(u: &ComplexMatrix) -> Result<Self> {
        Self::from_rows(&u.conjugate())
    }

    /// Reads u in C^N (x) C^N as x_i[m] = u[m * N + i].
    pub fn from_product_vector(u: &Ket, n: usize) -> Result<Self> {
        if u.len() != n * n {
            return Err(Error::Dimension(format!("vector of length {} is not in C^{n} (x) C^{n}", u.len())));
        }
        Self::new((0..n).map(|i| Ket::from_fn(n, |m, _| u[m * n + i])).collect())
    }

    pub fn vectors(&self) -> &[Ket] {
        &self.vectors
    }

    pub fn into_vectors(self) -> Vec<Ket> {
        self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Matrix whose rows are the vectors.
    pub fn to_rows(&self) -> ComplexMatrix {
        DMatrix::from_fn(self.len(), self.dim, |i, m| self.vectors[i][m])
    }

    /// u = sum_i x_i (x) |i> in C^N (x) C^N; sets with K < N are padded with
    /// zero vectors.
    pub fn assemble(&self) -> Result<Ket> {
        let n = self.dim;
        if self.len() > n {
            return Err(Error::Dimension(format!("{} vectors do not fit into C^{n} (x) C^{n}", self.len())));
        }
        Ok(Ket::from_fn(n * n, |k, _| {
            let (m, i) = (k / n, k % n);
            self.vectors.get(i).map_or(C64::new(0.0, 0.0), |x| x[m])
        }))
    }

    pub fn total_norm_squared(&self) -> f64 {
        self.vectors.iter().map(|x| x.norm_squared()).sum()
    }
}

fn check_dims(b: &BiconcurrenceMatrix, xs: &VectorSet) -> Result<()> {
    if xs.dim() != b.dim() {
        return Err(Error::Dimension(format!("vectors live in C^{} but B is extended to N = {}", xs.dim(), b.dim())));
    }
    Ok(())
}

/// G0 = sum_i <x_i x_i|B|x_i x_i>.
pub fn g0(b: &BiconcurrenceMatrix, xs: &VectorSet) -> Result<f64> {
    check_dims(b, xs)?;
    Ok(xs.vectors().iter().map(|x| b.diagonal_form(x)).sum())
}

/// G1 = sum_{i != j} |<x_i|x_j>|^2.
pub fn g1(xs: &VectorSet) -> f64 {
    let v = xs.vectors();
    let mut total = 0.0;
    for i in 0..v.len() {
        for j in 0..v.len() {
            if i != j {
                total += v[i].dotc(&v[j]).norm_sqr();
            }
        }
    }
    total
}

/// G2 = sum_i (S/K - ||x_i||^2)^2 with S = sum_j ||x_j||^2 and K = |xs|.
pub fn g2(xs: &VectorSet) -> f64 {
    let norms: Vec<f64> = xs.vectors().iter().map(|x| x.norm_squared()).collect();
    let mean = norms.iter().sum::<f64>() / norms.len() as f64;
    norms.iter().map(|n| (mean - n).powi(2)).sum()
}

/// Positive weights (alpha, beta, gamma) of the combined penalty.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PenaltyWeights {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for PenaltyWeights {
    fn default() -> Self {
        Self { alpha: 1.0, beta: 1.0, gamma: 1.0 }
    }
}

impl PenaltyWeights {
    pub fn validate(&self) -> Result<()> {
        let ok = [self.alpha, self.beta, self.gamma].iter().all(|w| w.is_finite() && *w > 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "alpha, beta, gamma must be positive, got ({}, {}, {})",
                self.alpha, self.beta, self.gamma
            )))
        }
    }
}

/// alpha G0 + beta G1 + gamma G2.
pub fn objective(b: &BiconcurrenceMatrix, xs: &VectorSet, w: PenaltyWeights) -> Result<f64> {
    w.validate()?;
    Ok(w.alpha * g0(b, xs)? + w.beta * g1(xs) + w.gamma * g2(xs))
}

/// Real gradient of [`objective`], one entry per vector.
pub fn objective_gradient(b: &BiconcurrenceMatrix, xs: &VectorSet, w: PenaltyWeights) -> Result<Vec<Ket>> {
    w.validate()?;
    check_dims(b, xs)?;
    let v = xs.vectors();
    let k = v.len() as f64;
    let norms: Vec<f64> = v.iter().map(|x| x.norm_squared()).collect();
    let mean = norms.iter().sum::<f64>() / k;
    let gram = DMatrix::from_fn(v.len(), v.len(), |i, j| v[i].dotc(&v[j]));
    Ok((0..v.len())
        .map(|i| {
            let mut g = b.diagonal_form_gradient(&v[i]) * C64::new(w.alpha, 0.0);
            for j in 0..v.len() {
                if j != i {
                    // d/d conj(x_i) of 2 |<x_i|x_j>|^2 is 2 x_j <x_j|x_i>
                    g += &v[j] * (gram[(j, i)] * (4.0 * w.beta));
                }
            }
            g += &v[i] * C64::new(4.0 * w.gamma * (norms[i] - mean), 0.0);
            g
        })
        .collect())
}

pub fn unitarity_deviation(u: &ComplexMatrix) -> f64 {
    let n = u.nrows();
    tensor::max_abs_diff(&(u * u.adjoint()), &tensor::identity(n))
}

/// sum_m [(U (x) U) B (U (x) U)^dag]_{mm,mm}.
pub fn basis_objective(b: &BiconcurrenceMatrix, u: &ComplexMatrix) -> Result<f64> {
    if u.nrows() != b.dim() || u.ncols() != b.dim() {
        return Err(Error::Dimension(format!("unitary is {}x{}, B is extended to N = {}", u.nrows(), u.ncols(), b.dim())));
    }
    let dev = unitarity_deviation(u);
    if dev > 1e-10 {
        return Err(Error::NotUnitary(dev));
    }
    g0(b, &VectorSet::from_unitary(u)?)
}

/// Outcome of an independent certificate check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    /// ||rho - sum_i w_i |a_i b_i><a_i b_i| ||_Tr
    #[serde(with = "io::sci17")]
    pub residual_trace_norm: f64,
    /// Largest second Schmidt coefficient over the checked vectors (absolute,
    /// in the normalization where the vectors decompose a unit-trace state).
    #[serde(with = "io::sci17")]
    pub max_second_schmidt: f64,
    pub terms: usize,
    #[serde(with = "io::sci17")]
    pub tol: f64,
    pub passed: bool,
}

fn second_schmidt(v: &Ket, da: usize, db: usize) -> Result<f64> {
    Ok(crate::states::schmidt_coefficients(v, da, db)?.get(1).copied().unwrap_or(0.0))
}

/// Checks a product ensemble against a state without reference to how the
/// ensemble was produced.
pub fn verify_certificate(state: &BipartiteState, ens: &ProductEnsemble, tol: f64) -> Result<CertificateReport> {
    if ens.da != state.da() || ens.db != state.db() {
        return Err(Error::Dimension(format!(
            "ensemble dims [{}, {}] differ from state dims [{}, {}]",
            ens.da,
            ens.db,
            state.da(),
            state.db()
        )));
    }
    let mut max_second = 0.0f64;
    for t in &ens.terms {
        if t.a.len() != ens.da || t.b.len() != ens.db || t.weight.is_nan() || t.weight < 0.0 {
            return Err(Error::Certificate("malformed ensemble term".into()));
        }
        max_second = max_second.max(second_schmidt(&t.ket(), ens.da, ens.db)?);
    }
    let residual = tensor::trace_norm(&(state.rho() - ens.mixture()))?;
    Ok(CertificateReport {
        residual_trace_norm: residual,
        max_second_schmidt: max_second,
        terms: ens.terms.len(),
        tol,
        passed: residual < tol && max_second < tol,
    })
}

/// Candidate vectors with their best product approximations and the check.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub candidates: Vec<Ket>,
    pub ensemble: ProductEnsemble,
    pub report: CertificateReport,
}

/// Rank-one truncation of every candidate, followed by [`verify_certificate`].
/// The Schmidt figure in the report is taken over the candidates themselves.
pub fn verify_candidates(state: &BipartiteState, candidates: &[Ket], tol: f64) -> Result<Certificate> {
    let (da, db) = (state.da(), state.db());
    let mut terms = Vec::new();
    let mut max_second = 0.0f64;
    for phi in candidates {
        let (s1, a, b, coeffs) = schmidt_rank_one(phi, da, db)?;
        max_second = max_second.max(coeffs.get(1).copied().unwrap_or(0.0));
        if s1 > 0.0 {
            terms.push(ProductTerm { a, b, weight: s1 * s1 });
        }
    }
    let ensemble = ProductEnsemble { da, db, terms };
    let mut report = verify_certificate(state, &ensemble, tol)?;
    report.max_second_schmidt = report.max_second_schmidt.max(max_second);
    report.passed = report.residual_trace_norm < tol && report.max_second_schmidt < tol;
    Ok(Certificate { candidates: candidates.to_vec(), ensemble, report })
}

/// phi_i = sum_n x_i[n] psi_n.
pub fn candidate_vectors(dec: &PureDecomposition, xs: &VectorSet) -> Result<Vec<Ket>> {
    let r = dec.len();
    if xs.dim() < r {
        return Err(Error::Dimension(format!("basis of dimension {} is shorter than the decomposition ({r})", xs.dim())));
    }
    let d = dec.da * dec.db;
    Ok(xs
        .vectors()
        .iter()
        .map(|x| dec.vectors.iter().enumerate().fold(Ket::zeros(d), |acc, (n, psi)| acc + psi * x[n]))
        .collect())
}

/// Candidate decomposition read from a basis, truncated to products and
/// verified; the result is returned whether or not the check passed.
pub fn certify(state: &BipartiteState, dec: &PureDecomposition, xs: &VectorSet, tol: f64) -> Result<Certificate> {
    verify_candidates(state, &candidate_vectors(dec, xs)?, tol)
}

/// Refines a nearly separable basis so that its candidates become products to
/// working precision.
///
/// Gradient descent on G0 slows to a crawl near 1e-12 on some states, which
/// leaves second Schmidt coefficients near 1e-6. This runs Levenberg-Marquardt
/// on the coordinates `x_i[0..r]` with two residual blocks: every 2x2 minor of
/// each candidate reshaped to dA x dB (all vanish exactly on products), and
/// `X^dag X - I`. The result is projected back to an exact basis by the polar
/// factor, so [`certify`] still judges genuine candidates.
///
/// When rho^TB is singular (a state on the PPT boundary) products can only be
/// used along directions with `(|phi><phi|)^TB v = 0` for `v` in its kernel.
/// The minors see departures from that set only at second order, so those
/// vectors are added as a third block; every exact product decomposition
/// satisfies it.
pub fn polish_basis(state: &BipartiteState, dec: &PureDecomposition, xs: &VectorSet) -> Result<VectorSet> {
    let (da, db) = (dec.da, dec.db);
    if state.da() != da || state.db() != db {
        return Err(Error::Dimension("state and decomposition differ in shape".into()));
    }
    let (evals, evecs) = tensor::eigh(&state.partial_transpose_b())?;
    let kernel: Vec<Ket> =
        (0..evals.len()).filter(|&j| evals[j].abs() < PT_KERNEL_TOL).map(|j| evecs.column(j).into_owned()).collect();
    let r = dec.len();
    let k = xs.len();
    if xs.dim() < r {
        return Err(Error::Dimension(format!("basis of dimension {} is shorter than the decomposition ({r})", xs.dim())));
    }
    let residuals = |x: &[C64]| -> nalgebra::DVector<f64> {
        let mut out = Vec::new();
        for i in 0..k {
            let phi = (0..r).fold(Ket::zeros(da * db), |acc, n| acc + &dec.vectors[n] * x[i * r + n]);
            let m = |a: usize, b: usize| phi[a * db + b];
            for a in 0..da {
                for a2 in a + 1..da {
                    for b in 0..db {
                        for b2 in b + 1..db {
                            let minor = m(a, b) * m(a2, b2) - m(a, b2) * m(a2, b);
                            out.extend([minor.re, minor.im]);
                        }
                    }
                }
            }
            for v in &kernel {
                for a in 0..da {
                    for b in 0..db {
                        let mut z = C64::new(0.0, 0.0);
                        for a2 in 0..da {
                            for b2 in 0..db {
                                z += m(a, b2) * m(a2, b).conj() * v[a2 * db + b2];
                            }
                        }
                        out.extend([z.re, z.im]);
                    }
                }
            }
        }
        for n in 0..r {
            for n2 in n..r {
                let mut g = (0..k).map(|i| x[i * r + n].conj() * x[i * r + n2]).sum::<C64>();
                if n == n2 {
                    g -= 1.0;
                }
                out.extend([g.re, g.im]);
            }
        }
        nalgebra::DVector::from_vec(out)
    };

    let mut x: Vec<C64> = xs.vectors().iter().flat_map(|v| v.iter().take(r).copied()).collect();
    let params = 2 * x.len();
    let mut res = residuals(&x);
    let mut cost = res.norm();
    let mut lambda = 1.0;
    for _ in 0..100 {
        if cost < 1e-15 {
            break;
        }
        // Every block is quadratic in the real parameters, so central
        // differences give the Jacobian exactly up to rounding.
        let mut jac = DMatrix::<f64>::zeros(res.len(), params);
        for p in 0..params {
            let unit = if p % 2 == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 1.0) };
            let mut plus = x.clone();
            plus[p / 2] += unit;
            let mut minus = x.clone();
            minus[p / 2] -= unit;
            jac.set_column(p, &((residuals(&plus) - residuals(&minus)) * 0.5));
        }
        // Solve the smaller of the two equivalent damped normal systems.
        let wide = jac.nrows() <= jac.ncols();
        let gram = if wide { &jac * jac.transpose() } else { jac.transpose() * &jac };
        let rhs = if wide { res.clone() } else { jac.transpose() * &res };
        let mut accepted = false;
        for _ in 0..40 {
            let sys = &gram + DMatrix::<f64>::identity(gram.nrows(), gram.nrows()) * (lambda * cost);
            let Some(y) = sys.cholesky().map(|ch| ch.solve(&rhs)) else {
                lambda *= 4.0;
                continue;
            };
            let step = if wide { -(jac.transpose() * y) } else { -y };
            let trial: Vec<C64> = x.iter().enumerate().map(|(j, z)| z + C64::new(step[2 * j], step[2 * j + 1])).collect();
            let trial_res = residuals(&trial);
            let trial_cost = trial_res.norm();
            if trial_cost < cost {
                x = trial;
                res = trial_res;
                cost = trial_cost;
                lambda = (lambda / 10.0).max(1e-12);
                accepted = true;
                break;
            }
            lambda *= 4.0;
        }
        if !accepted {
            break;
        }
    }

    let coords = DMatrix::from_fn(k, r, |i, n| x[i * r + n]);
    let isometry = tensor::polar_factor(&coords);
    // Complete to a full basis with the remaining coordinates of the input.
    let mut full = xs.to_rows();
    full.columns_mut(0, r).copy_from(&isometry);
    let qr = full.qr();
    let (mut q, upper) = (qr.q(), qr.r());
    // Undo the phases QR puts on the leading columns.
    for j in 0..q.ncols().min(upper.nrows()) {
        let z = upper[(j, j)];
        if z.norm() > 0.0 {
            let col = q.column(j) * (z / z.norm());
            q.set_column(j, &col);
        }
    }
    VectorSet::from_rows(&q)
}

/// Like [`certify`], but a failed check is an error.
pub fn decomposition_from_basis(
    state: &BipartiteState,
    dec: &PureDecomposition,
    xs: &VectorSet,
    tol: f64,
) -> Result<Certificate> {
    let cert = certify(state, dec, xs, tol)?;
    if cert.report.passed {
        Ok(cert)
    } else {
        Err(Error::Certificate(format!(
            "residual {:e}, max second Schmidt coefficient {:e} (tolerance {:e})",
            cert.report.residual_trace_norm, cert.report.max_second_schmidt, tol
        )))
    }
}
