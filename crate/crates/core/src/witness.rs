//! Structured operators on H (x) H~ (x) H (x) H~ with H = H~ = C^N.
//!
//! Every operator here is a real combination of products `h (x) t` where `h`
//! acts on the pair of H legs and `t` on the pair of H~ legs, each drawn from a
//! small family ([`PairOp`]). Expectation values, reduced operators and
//! matrix-vector products are evaluated term by term, so nothing of size N^4
//! is formed unless [`StructuredOperator::to_dense`] is asked for.
//!
//! Canonical leg order of the full space is (H1, H~1, H2, H~2): the flat index
//! of |m, i, n, k> is ((m * N + i) * N + n) * N + k. A vector u in H (x) H~ is
//! read as u = sum_i x_i (x) |i>, i.e. u[m * N + i] = x_i[m].
//!
//! Operators built here:
//!
//! ```text
//! A      = alpha B (x) P~cl + beta (I (x) V~ - I (x) P~cl) + gamma (I (x) P~cl - I (x) I~ / N)
//! Y      = P_sym A P_sym,     P_sym  = (1 + V (x) V~) / 2
//! W      = Y + C P_asym,      P_asym = (1 - V (x) V~) / 2
//! W_ex   = I (x) V~ - (V (x) V~) / N
//! ```

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::biconcurrence::{BiconcurrenceMatrix, PenaltyWeights, VectorSet};
use crate::error::{Error, Result};
use crate::io::{self, MatrixJson};
use crate::rng::{complex_normal_vector, derive_seed, rng_from};
use crate::tensor::{self, LegShape, SpectralEstimate};
use crate::{ComplexMatrix, Ket, C64};

/// Largest N for which [`StructuredOperator::to_dense`] materializes N^4 x N^4.
pub const DENSE_MAX_N: usize = 6;
/// Leg order tag used in exports.
pub const LEG_ORDER: &str = "H1,T1,H2,T2";

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Operator on a pair of C^N legs.
#[derive(Clone, Debug, PartialEq)]
pub enum PairOp {
    Identity,
    /// |ab> -> |ba>
    Swap,
    /// sum_k |kk><kk|
    Classical,
    /// `mat` on C^base (x) C^base, zero-padded to C^N (x) C^N.
    Block { base: usize, mat: ComplexMatrix },
}

fn block_index(a: usize, b: usize, r: usize) -> usize {
    a * r + b
}

impl PairOp {
    pub fn block(mat: ComplexMatrix) -> Result<Self> {
        let side = mat.nrows();
        let base = (side as f64).sqrt().round() as usize;
        if base == 0 || base * base != side || mat.ncols() != side {
            return Err(Error::Dimension(format!("{}x{} is not an operator on a pair of legs", side, mat.ncols())));
        }
        Ok(Self::Block { base, mat })
    }

    fn base(&self) -> usize {
        match self {
            Self::Block { base, .. } => *base,
            _ => 0,
        }
    }

    /// <ab|op|cd> for a, b, c, d in C^N.
    pub fn pair_elem(&self, a: &Ket, b: &Ket, c: &Ket, d: &Ket) -> C64 {
        match self {
            Self::Identity => a.dotc(c) * b.dotc(d),
            Self::Swap => a.dotc(d) * b.dotc(c),
            Self::Classical => (0..a.len()).map(|k| (a[k] * b[k]).conj() * c[k] * d[k]).sum(),
            Self::Block { base, mat } => {
                let r = *base;
                let bra = Ket::from_fn(r * r, |k, _| a[k / r] * b[k % r]);
                let ket = Ket::from_fn(r * r, |k, _| c[k / r] * d[k % r]);
                bra.dotc(&(mat * ket))
            }
        }
    }

    /// R with <ab|op|cd> = <b|R|d>.
    pub fn reduce_second(&self, a: &Ket, c: &Ket) -> ComplexMatrix {
        let n = a.len();
        match self {
            Self::Identity => tensor::identity(n) * a.dotc(c),
            Self::Swap => c * a.adjoint(),
            Self::Classical => DMatrix::from_diagonal(&Ket::from_fn(n, |k, _| a[k].conj() * c[k])),
            Self::Block { base, mat } => {
                let r = *base;
                let mut out = DMatrix::zeros(n, n);
                for m in 0..r {
                    for nn in 0..r {
                        let w = a[m].conj() * c[nn];
                        if w == ZERO {
                            continue;
                        }
                        for mu in 0..r {
                            for nu in 0..r {
                                out[(mu, nu)] += w * mat[(block_index(m, mu, r), block_index(nn, nu, r))];
                            }
                        }
                    }
                }
                out
            }
        }
    }

    fn swap_block_rows(mat: &ComplexMatrix, r: usize) -> ComplexMatrix {
        DMatrix::from_fn(r * r, r * r, |row, col| mat[((row % r) * r + row / r, col)])
    }

    fn swap_block_cols(mat: &ComplexMatrix, r: usize) -> ComplexMatrix {
        DMatrix::from_fn(r * r, r * r, |row, col| mat[(row, (col % r) * r + col / r)])
    }

    /// Swap * op.
    pub fn swap_left(&self) -> Self {
        match self {
            Self::Identity => Self::Swap,
            Self::Swap => Self::Identity,
            Self::Classical => Self::Classical,
            Self::Block { base, mat } => Self::Block { base: *base, mat: Self::swap_block_rows(mat, *base) },
        }
    }

    /// op * Swap.
    pub fn swap_right(&self) -> Self {
        match self {
            Self::Identity => Self::Swap,
            Self::Swap => Self::Identity,
            Self::Classical => Self::Classical,
            Self::Block { base, mat } => Self::Block { base: *base, mat: Self::swap_block_cols(mat, *base) },
        }
    }

    /// Nonzero entries (row, col, value) in the C^N (x) C^N basis.
    pub fn entries(&self, n: usize) -> Vec<(usize, usize, C64)> {
        let one = C64::new(1.0, 0.0);
        match self {
            Self::Identity => (0..n * n).map(|k| (k, k, one)).collect(),
            Self::Swap => (0..n * n).map(|k| (k, (k % n) * n + k / n, one)).collect(),
            Self::Classical => (0..n).map(|k| (k * n + k, k * n + k, one)).collect(),
            Self::Block { base, mat } => {
                let r = *base;
                let mut out = Vec::new();
                for row in 0..r * r {
                    for col in 0..r * r {
                        let v = mat[(row, col)];
                        if v != ZERO {
                            out.push(((row / r) * n + row % r, (col / r) * n + col % r, v));
                        }
                    }
                }
                out
            }
        }
    }

    pub fn to_dense(&self, n: usize) -> ComplexMatrix {
        let mut out = DMatrix::zeros(n * n, n * n);
        for (r, c, v) in self.entries(n) {
            out[(r, c)] += v;
        }
        out
    }

    /// op * m for m with N^2 rows.
    fn apply_rows(&self, m: &ComplexMatrix, n: usize) -> ComplexMatrix {
        match self {
            Self::Identity => m.clone(),
            Self::Swap => DMatrix::from_fn(m.nrows(), m.ncols(), |row, col| m[((row % n) * n + row / n, col)]),
            Self::Classical => {
                DMatrix::from_fn(m.nrows(), m.ncols(), |row, col| if row / n == row % n { m[(row, col)] } else { ZERO })
            }
            Self::Block { base, mat } => {
                let r = *base;
                let sub = DMatrix::from_fn(r * r, m.ncols(), |k, col| m[((k / r) * n + k % r, col)]);
                let prod = mat * sub;
                let mut out = DMatrix::zeros(m.nrows(), m.ncols());
                for k in 0..r * r {
                    out.row_mut((k / r) * n + k % r).copy_from(&prod.row(k));
                }
                out
            }
        }
    }

    /// Recognizes the named operators in a dense N^2 x N^2 matrix.
    pub fn from_dense(m: &ComplexMatrix, n: usize) -> Result<Self> {
        if m.nrows() != n * n || m.ncols() != n * n {
            return Err(Error::Dimension(format!("expected {0}x{0}, got {1}x{2}", n * n, m.nrows(), m.ncols())));
        }
        for op in [Self::Identity, Self::Swap, Self::Classical] {
            if op.to_dense(n) == *m {
                return Ok(op);
            }
        }
        Ok(Self::Block { base: n, mat: m.clone() })
    }

    fn padded_to(&self, r: usize) -> ComplexMatrix {
        match self {
            Self::Block { base, mat } => {
                let b = *base;
                let mut out = DMatrix::zeros(r * r, r * r);
                for row in 0..b * b {
                    for col in 0..b * b {
                        out[((row / b) * r + row % b, (col / b) * r + col % b)] = mat[(row, col)];
                    }
                }
                out
            }
            other => other.to_dense(r),
        }
    }
}

/// One term `coeff * h (x) t`.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coeff: f64,
    pub h: PairOp,
    pub t: PairOp,
}

impl Term {
    pub fn new(coeff: f64, h: PairOp, t: PairOp) -> Self {
        Self { coeff, h, t }
    }
}

/// Real combination of `h (x) t` products on the four-leg space.
#[derive(Clone, Debug, PartialEq)]
pub struct StructuredOperator {
    n: usize,
    terms: Vec<Term>,
}

fn check_vectors(xs: &[Ket], n: usize) -> Result<()> {
    if xs.len() != n || xs.iter().any(|x| x.len() != n) {
        return Err(Error::Dimension(format!("expected {n} vectors in C^{n}")));
    }
    Ok(())
}

fn split_ket(u: &Ket, n: usize) -> Result<Vec<Ket>> {
    Ok(VectorSet::from_product_vector(u, n)?.into_vectors())
}

fn pad_set(xs: &VectorSet, n: usize) -> Result<Vec<Ket>> {
    if xs.dim() != n || xs.len() > n {
        return Err(Error::Dimension(format!("vector set of {} vectors in C^{} does not fit N = {n}", xs.len(), xs.dim())));
    }
    let mut v = xs.vectors().to_vec();
    v.resize(n, Ket::zeros(n));
    Ok(v)
}

impl StructuredOperator {
    pub fn new(n: usize, terms: Vec<Term>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension("N must be positive".into()));
        }
        for t in &terms {
            if !t.coeff.is_finite() {
                return Err(Error::InvalidParameter("non-finite coefficient".into()));
            }
            if t.h.base() > n || t.t.base() > n {
                return Err(Error::Dimension(format!("block larger than N = {n}")));
            }
        }
        Ok(Self { n, terms }.canonical())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Merges repeated terms, sums block terms that share their H~ factor and
    /// drops zero terms.
    fn canonical(self) -> Self {
        let mut merged: Vec<Term> = Vec::new();
        for term in self.terms {
            if let Some(existing) = merged.iter_mut().find(|e| e.h == term.h && e.t == term.t) {
                existing.coeff += term.coeff;
                continue;
            }
            if matches!(term.h, PairOp::Block { .. }) {
                if let Some(existing) =
                    merged.iter_mut().find(|e| e.t == term.t && matches!(e.h, PairOp::Block { .. }))
                {
                    let r = existing.h.base().max(term.h.base());
                    let sum = existing.h.padded_to(r) * C64::new(existing.coeff, 0.0)
                        + term.h.padded_to(r) * C64::new(term.coeff, 0.0);
                    existing.h = PairOp::Block { base: r, mat: sum };
                    existing.coeff = 1.0;
                    continue;
                }
            }
            merged.push(term);
        }
        merged.retain(|t| {
            t.coeff != 0.0
                && match &t.h {
                    PairOp::Block { mat, .. } => mat.iter().any(|z| *z != ZERO),
                    _ => true,
                }
        });
        Self { n: self.n, terms: merged }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Dimension(format!("N = {} vs N = {}", self.n, other.n)));
        }
        Self::new(self.n, self.terms.iter().chain(&other.terms).cloned().collect())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { n: self.n, terms: self.terms.iter().map(|t| Term::new(t.coeff * s, t.h.clone(), t.t.clone())).collect() }
            .canonical()
    }

    /// (V (x) V~) S.
    pub fn swap_big_left(&self) -> Self {
        Self { n: self.n, terms: self.terms.iter().map(|t| Term::new(t.coeff, t.h.swap_left(), t.t.swap_left())).collect() }
            .canonical()
    }

    /// S (V (x) V~).
    pub fn swap_big_right(&self) -> Self {
        Self { n: self.n, terms: self.terms.iter().map(|t| Term::new(t.coeff, t.h.swap_right(), t.t.swap_right())).collect() }
            .canonical()
    }

    /// (V (x) V~) S (V (x) V~), which exchanges the two tensor slots.
    fn slots_exchanged(&self) -> Self {
        self.swap_big_left().swap_big_right()
    }

    fn expectation_sets(&self, xs: &[Ket], ys: &[Ket]) -> f64 {
        let n = self.n;
        let mut total = ZERO;
        for term in &self.terms {
            let mut acc = ZERO;
            for (row, col, tv) in term.t.entries(n) {
                let (i, j, k, l) = (row / n, row % n, col / n, col % n);
                acc += tv * term.h.pair_elem(&xs[i], &ys[j], &xs[k], &ys[l]);
            }
            total += acc * term.coeff;
        }
        total.re
    }

    /// <uv|S|uv> for u = sum_i x_i (x) |i>, v = sum_j y_j (x) |j>; sets with
    /// fewer than N vectors are padded with zeros.
    pub fn expectation_product(&self, xs: &VectorSet, ys: &VectorSet) -> Result<f64> {
        Ok(self.expectation_sets(&pad_set(xs, self.n)?, &pad_set(ys, self.n)?))
    }

    /// <uv|S|uv> for u, v in C^N (x) C^N.
    pub fn expectation(&self, u: &Ket, v: &Ket) -> Result<f64> {
        Ok(self.expectation_sets(&split_ket(u, self.n)?, &split_ket(v, self.n)?))
    }

    fn reduce_sets(&self, xs: &[Ket]) -> ComplexMatrix {
        let n = self.n;
        let mut out = DMatrix::zeros(n * n, n * n);
        for term in &self.terms {
            let mut cache: Vec<Option<ComplexMatrix>> = vec![None; n * n];
            for (row, col, tv) in term.t.entries(n) {
                let (i, j, k, l) = (row / n, row % n, col / n, col % n);
                let r = cache[i * n + k].get_or_insert_with(|| term.h.reduce_second(&xs[i], &xs[k]));
                let w = tv * term.coeff;
                for mu in 0..n {
                    for nu in 0..n {
                        out[(mu * n + j, nu * n + l)] += w * r[(mu, nu)];
                    }
                }
            }
        }
        (&out + out.adjoint()) * C64::new(0.5, 0.0)
    }

    /// M_u with <v|M_u|v> = <uv|S|uv> for every v.
    pub fn reduced_operator(&self, u: &Ket) -> Result<ComplexMatrix> {
        let xs = split_ket(u, self.n)?;
        check_vectors(&xs, self.n)?;
        Ok(self.reduce_sets(&xs))
    }

    /// M'_v with <u|M'_v|u> = <uv|S|uv> for every u.
    pub fn reduced_operator_first(&self, v: &Ket) -> Result<ComplexMatrix> {
        self.slots_exchanged().reduced_operator(v)
    }

    /// S w for w in the four-leg space.
    pub fn matvec(&self, w: &Ket) -> Result<Ket> {
        let n = self.n;
        let nn = n * n;
        if w.len() != nn * nn {
            return Err(Error::Dimension(format!("vector of length {} for N = {n}", w.len())));
        }
        // wm[(m, n'), (i, k)] = w[m, i, n', k]
        let flat = |m: usize, i: usize, a: usize, k: usize| ((m * n + i) * n + a) * n + k;
        let wm = DMatrix::from_fn(nn, nn, |row, col| w[flat(row / n, col / n, row % n, col % n)]);
        let mut out = DMatrix::<C64>::zeros(nn, nn);
        for term in &self.terms {
            let right = term.t.apply_rows(&wm.transpose(), n).transpose();
            out += term.h.apply_rows(&right, n) * C64::new(term.coeff, 0.0);
        }
        let mut result = Ket::zeros(nn * nn);
        for row in 0..nn {
            for col in 0..nn {
                result[flat(row / n, col / n, row % n, col % n)] = out[(row, col)];
            }
        }
        Ok(result)
    }

    pub fn to_dense(&self) -> Result<ComplexMatrix> {
        let n = self.n;
        if n > DENSE_MAX_N {
            return Err(Error::TooLarge(format!("dense realization needs N <= {DENSE_MAX_N}, got {n}")));
        }
        let shape = LegShape::new(vec![n, n, n, n])?;
        let mut out = DMatrix::zeros(n.pow(4), n.pow(4));
        for term in &self.terms {
            let k = tensor::kron(&term.h.to_dense(n), &term.t.to_dense(n));
            out += tensor::permute_legs(&k, &shape, &[0, 2, 1, 3])? * C64::new(term.coeff, 0.0);
        }
        Ok(out)
    }

    /// Matrix-free ||S||_inf.
    pub fn norm_matfree(&self, tol: f64, seed: u64) -> Result<SpectralEstimate> {
        let apply = |w: &Ket| self.matvec(w).expect("dimension checked");
        tensor::operator_norm_matfree(&apply, self.n.pow(4), tol, seed)
    }

    /// Matrix-free smallest eigenvalue.
    pub fn min_eigenvalue_matfree(&self, tol: f64, seed: u64) -> Result<SpectralEstimate> {
        let apply = |w: &Ket| self.matvec(w).expect("dimension checked");
        tensor::min_eigenvalue_matfree(&apply, self.n.pow(4), tol, seed)
    }

    pub fn to_json(&self) -> WitnessJson {
        WitnessJson {
            n: self.n,
            leg_order: LEG_ORDER.to_string(),
            terms: self
                .terms
                .iter()
                .map(|t| TermJson {
                    coeff: t.coeff,
                    m_h: MatrixJson::from_matrix(&t.h.to_dense(self.n)),
                    m_t: MatrixJson::from_matrix(&t.t.to_dense(self.n)),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &WitnessJson) -> Result<Self> {
        if j.leg_order != LEG_ORDER {
            return Err(Error::Format(format!("unsupported leg order {:?}", j.leg_order)));
        }
        let terms = j
            .terms
            .iter()
            .map(|t| {
                Ok(Term::new(
                    t.coeff,
                    PairOp::from_dense(&t.m_h.to_matrix()?, j.n)?,
                    PairOp::from_dense(&t.m_t.to_matrix()?, j.n)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(j.n, terms)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    #[serde(with = "io::sci17")]
    pub coeff: f64,
    #[serde(rename = "M_H")]
    pub m_h: MatrixJson,
    #[serde(rename = "M_T")]
    pub m_t: MatrixJson,
}

/// Export layout of a structured operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessJson {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "legOrder")]
    pub leg_order: String,
    pub terms: Vec<TermJson>,
}

/// Parameters of the witness construction. `c` and `epsilon` default to
/// `2 * norm_upper_bound` and `1e-3 * C`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub c: Option<f64>,
    pub epsilon: Option<f64>,
}

impl Default for WitnessParams {
    fn default() -> Self {
        Self { alpha: 1.0, beta: 1.0, gamma: 1.0, c: None, epsilon: None }
    }
}

impl WitnessParams {
    pub fn weights(&self) -> PenaltyWeights {
        PenaltyWeights { alpha: self.alpha, beta: self.beta, gamma: self.gamma }
    }

    pub fn validate(&self) -> Result<()> {
        self.weights().validate()?;
        for (name, v) in [("C", self.c), ("epsilon", self.epsilon)] {
            if let Some(v) = v {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::InvalidParameter(format!("{name} must be nonnegative, got {v}")));
                }
            }
        }
        Ok(())
    }
}

fn op(n: usize, terms: Vec<Term>) -> StructuredOperator {
    StructuredOperator::new(n, terms).expect("valid construction")
}

/// I (x) I~ on the four-leg space.
pub fn identity_big(n: usize) -> StructuredOperator {
    op(n, vec![Term::new(1.0, PairOp::Identity, PairOp::Identity)])
}

/// V (x) V~, the exchange of the two (H, H~) slots.
pub fn swap_big(n: usize) -> StructuredOperator {
    op(n, vec![Term::new(1.0, PairOp::Swap, PairOp::Swap)])
}

pub fn p_asym_big(n: usize) -> StructuredOperator {
    op(n, vec![Term::new(0.5, PairOp::Identity, PairOp::Identity), Term::new(-0.5, PairOp::Swap, PairOp::Swap)])
}

pub fn p_sym_big(n: usize) -> StructuredOperator {
    op(n, vec![Term::new(0.5, PairOp::Identity, PairOp::Identity), Term::new(0.5, PairOp::Swap, PairOp::Swap)])
}

pub fn build_a(b: &BiconcurrenceMatrix, p: &WitnessParams) -> Result<StructuredOperator> {
    p.validate()?;
    let n = b.dim();
    let mut terms = vec![
        Term::new(p.beta, PairOp::Identity, PairOp::Swap),
        Term::new(p.gamma - p.beta, PairOp::Identity, PairOp::Classical),
        Term::new(-p.gamma / n as f64, PairOp::Identity, PairOp::Identity),
    ];
    if !b.is_zero() {
        terms.insert(0, Term::new(p.alpha, PairOp::block(b.entries().clone())?, PairOp::Classical));
    }
    StructuredOperator::new(n, terms)
}

/// P_sym A P_sym = (A + V A + A V + V A V) / 4 with V = V (x) V~.
pub fn symmetrize(a: &StructuredOperator) -> StructuredOperator {
    let left = a.swap_big_left();
    let terms = a
        .terms()
        .iter()
        .chain(left.terms())
        .chain(a.swap_big_right().terms())
        .chain(left.swap_big_right().terms())
        .cloned()
        .collect();
    op(a.dim(), terms).scale(0.25)
}

/// alpha ||B|| + beta + gamma (1 - 1/N) >= ||A|| >= ||Y||.
pub fn norm_upper_bound(p: &WitnessParams, norm_b: f64, n: usize) -> f64 {
    let nf = n as f64;
    p.alpha * norm_b + p.beta + p.gamma * (1.0 - 1.0 / nf).max(1.0 / nf)
}

/// Y + C P_asym; `y_norm` must be ||Y||_inf or an upper bound on it.
pub fn build_witness(y: &StructuredOperator, c: f64, y_norm: f64) -> Result<StructuredOperator> {
    if c.is_nan() || c <= y_norm {
        return Err(Error::InvalidParameter(format!("C = {c} must exceed ||Y|| = {y_norm}")));
    }
    y.add(&p_asym_big(y.dim()).scale(c))
}

/// S + epsilon P_asym.
pub fn strictify(s: &StructuredOperator, epsilon: f64) -> Result<StructuredOperator> {
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be nonnegative, got {epsilon}")));
    }
    s.add(&p_asym_big(s.dim()).scale(epsilon))
}

/// A for B = 0 and beta = gamma = 1: I (x) V~ - I (x) I~ / N.
pub fn example_a12(n: usize) -> StructuredOperator {
    op(n, vec![Term::new(1.0, PairOp::Identity, PairOp::Swap), Term::new(-1.0 / n as f64, PairOp::Identity, PairOp::Identity)])
}

/// I (x) V~ - (V (x) V~) / N.
pub fn example_witness(n: usize) -> Result<StructuredOperator> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("example witness needs N >= 2, got {n}")));
    }
    Ok(op(n, vec![Term::new(1.0, PairOp::Identity, PairOp::Swap), Term::new(-1.0 / n as f64, PairOp::Swap, PairOp::Swap)]))
}

/// Everything produced on the way from B to W.
#[derive(Clone, Debug)]
pub struct WitnessBuild {
    pub a: StructuredOperator,
    pub y: StructuredOperator,
    pub w: StructuredOperator,
    pub norm_b: f64,
    /// Triangle-inequality bound on ||Y||.
    pub bound: f64,
    pub c: f64,
}

/// A, Y and W for an extended B. An explicit `C` at or below the bound is
/// checked against a matrix-free estimate of ||Y||.
pub fn witness_for(b: &BiconcurrenceMatrix, p: &WitnessParams, seed: u64) -> Result<WitnessBuild> {
    p.validate()?;
    let a = build_a(b, p)?;
    let y = symmetrize(&a);
    let norm_b = b.norm();
    let bound = norm_upper_bound(p, norm_b, b.dim());
    let c = p.c.unwrap_or(2.0 * bound);
    let y_norm = if c > bound { bound } else { y.norm_matfree(1e-10, seed)?.value };
    let w = build_witness(&y, c, y_norm)?;
    Ok(WitnessBuild { a, y, w, norm_b, bound, c })
}

/// Outcome of [`lemma_check`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub dim: usize,
    #[serde(with = "io::sci17")]
    pub c: f64,
    /// max |X - P_sym X P_sym|
    #[serde(with = "io::sci17")]
    pub symmetry_deviation: f64,
    /// Optimized inf_u <uu|X|uu> over unit u.
    #[serde(with = "io::sci17")]
    pub diagonal_min: f64,
    /// Smallest sampled <uu|X|uu>.
    #[serde(with = "io::sci17")]
    pub sampled_diagonal_min: f64,
    /// Smallest sampled <uv|X + C P_asym|uv>.
    #[serde(with = "io::sci17")]
    pub part_i_min: f64,
    /// Smallest sampled <uv|X + 2C P_asym|uv> - diagonal_min.
    #[serde(with = "io::sci17")]
    pub part_ii_gap: f64,
    pub samples: usize,
    pub preconditions_hold: bool,
    pub part_i_holds: bool,
    pub part_ii_holds: bool,
}

fn dense_product_value(x: &ComplexMatrix, u: &Ket, v: &Ket) -> f64 {
    let uv = tensor::kron_vec(u, v);
    uv.dotc(&(x * &uv)).re
}

/// <uv|P_asym|uv> = (|u|^2 |v|^2 - |<u|v>|^2) / 2.
fn p_asym_value(u: &Ket, v: &Ket) -> f64 {
    0.5 * (u.norm_squared() * v.norm_squared() - u.dotc(v).norm_sqr())
}

fn unit(v: Ket) -> Ket {
    let n = v.norm();
    v / C64::new(n, 0.0)
}

/// Samples the two product-vector inequalities for X_C = X + C P_asym on
/// C^m (x) C^m. Half the pairs are independent, half are small perturbations
/// of each other, where the bound is tight.
pub fn lemma_check(x: &ComplexMatrix, m: usize, c: f64, samples: usize, seed: u64) -> Result<LemmaReport> {
    if x.nrows() != m * m || x.ncols() != m * m {
        return Err(Error::Dimension(format!("X is {}x{}, expected an operator on C^{m} (x) C^{m}", x.nrows(), x.ncols())));
    }
    let x = tensor::hermitian_part(x)?;
    let psym = (tensor::identity(m * m) + tensor::swap_operator(m)) * C64::new(0.5, 0.0);
    let symmetry_deviation = tensor::max_abs_diff(&x, &(&psym * &x * &psym));
    let diag = crate::optimize::minimize_dense_diagonal(&x, m, &crate::optimize::OptimizerConfig::with_seed(seed))?;
    let diagonal_min = diag.value;

    let mut rng = rng_from(derive_seed(seed, 1));
    let mut sampled_diagonal_min = f64::INFINITY;
    let mut part_i_min = f64::INFINITY;
    let mut part_ii_gap = f64::INFINITY;
    for s in 0..samples {
        let u = unit(complex_normal_vector(&mut rng, m));
        let v = if s % 2 == 0 {
            unit(complex_normal_vector(&mut rng, m))
        } else {
            let scale = 10f64.powf(-rng.random_range(0.0..6.0));
            unit(&u + complex_normal_vector(&mut rng, m) * C64::new(scale, 0.0))
        };
        sampled_diagonal_min = sampled_diagonal_min.min(dense_product_value(&x, &u, &u));
        let base = dense_product_value(&x, &u, &v);
        let pa = p_asym_value(&u, &v);
        part_i_min = part_i_min.min(base + c * pa);
        part_ii_gap = part_ii_gap.min(base + 2.0 * c * pa - diagonal_min);
    }
    let preconditions_hold = symmetry_deviation <= 1e-10 && sampled_diagonal_min >= -1e-10 && diagonal_min >= -1e-10;
    Ok(LemmaReport {
        dim: m,
        c,
        symmetry_deviation,
        diagonal_min,
        sampled_diagonal_min,
        part_i_min,
        part_ii_gap,
        samples,
        preconditions_hold,
        part_i_holds: part_i_min >= -1e-12,
        part_ii_holds: part_ii_gap >= -1e-8,
    })
}

/// X = P_sym H P_sym - m P_sym + shift P_sym for a seeded random Hermitian H,
/// with m the optimized diagonal minimum of P_sym H P_sym when it is negative.
/// Such X satisfies the Lemma hypotheses and has diagonal infimum `shift`.
pub fn manufacture_lemma_operator(m: usize, shift: f64, seed: u64) -> Result<ComplexMatrix> {
    let mut rng = rng_from(seed);
    let d = m * m;
    let g = DMatrix::from_fn(d, d, |_, _| crate::rng::complex_normal(&mut rng));
    let h = (&g + g.adjoint()) * C64::new(0.5 / (d as f64).sqrt(), 0.0);
    let psym = (tensor::identity(d) + tensor::swap_operator(m)) * C64::new(0.5, 0.0);
    let sym = &psym * h * &psym;
    let sym = (&sym + sym.adjoint()) * C64::new(0.5, 0.0);
    let cfg = crate::optimize::OptimizerConfig { restarts: 32, ..crate::optimize::OptimizerConfig::with_seed(derive_seed(seed, 7)) };
    let min = crate::optimize::minimize_dense_diagonal(&sym, m, &cfg)?.value.min(0.0);
    Ok(sym + psym * C64::new(shift - min, 0.0))
}
