//! Dense complex linear algebra on tensor-product spaces.
//!
//! Index convention: a space with legs of dimensions `[d0, d1, ..., dk]` is
//! indexed row-major over the leg indices, i.e. the flat index of
//! `(i0, i1, ..., ik)` is `((i0 * d1 + i1) * d2 + i2) ...`. The first leg is
//! the most significant one. Every module in the crate follows this layout,
//! and the JSON formats serialize matrices row-major in the same order.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::rng::{complex_normal_vector, derive_seed, rng_from};
use crate::{ComplexMatrix, Ket, C64};

/// Absolute tolerance for treating a matrix as Hermitian, scaled by
/// `max(1, max|M_ij|)`.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Dimensions of the tensor factors ("legs") of a square matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LegShape {
    dims: Vec<usize>,
}

impl LegShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::Legs(format!("leg dimensions must be positive, got {dims:?}")));
        }
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    fn check(&self, m: &ComplexMatrix) -> Result<()> {
        let n = self.total();
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::Dimension(format!(
                "leg shape {:?} (total {n}) does not match {}x{} matrix",
                self.dims,
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(())
    }

    fn unflatten(&self, mut flat: usize, out: &mut [usize]) {
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = flat % d;
            flat /= d;
        }
    }

    fn flatten(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.dims).fold(0, |acc, (&i, &d)| acc * d + i)
    }
}

pub fn identity(m: usize) -> ComplexMatrix {
    DMatrix::identity(m, m)
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &Ket, b: &Ket) -> Ket {
    a.kronecker(b)
}

/// Swap operator on C^m (x) C^m: |i>|j> -> |j>|i>.
pub fn swap_operator(m: usize) -> ComplexMatrix {
    let mut out = DMatrix::zeros(m * m, m * m);
    for i in 0..m {
        for j in 0..m {
            out[(j * m + i, i * m + j)] = C64::new(1.0, 0.0);
        }
    }
    out
}

/// Projector onto span{|i>|i>} on C^m (x) C^m.
pub fn classical_projector(m: usize) -> ComplexMatrix {
    let mut out = DMatrix::zeros(m * m, m * m);
    for i in 0..m {
        out[(i * m + i, i * m + i)] = C64::new(1.0, 0.0);
    }
    out
}

/// (I - V) / 2 on C^m (x) C^m.
pub fn antisym_projector(m: usize) -> ComplexMatrix {
    (identity(m * m) - swap_operator(m)) * C64::new(0.5, 0.0)
}

/// (I + V) / 2 on C^m (x) C^m.
pub fn sym_projector(m: usize) -> ComplexMatrix {
    (identity(m * m) + swap_operator(m)) * C64::new(0.5, 0.0)
}

/// Conjugates `m` by the permutation of tensor factors that puts old leg
/// `perm[k]` in position `k`. The result lives on legs `dims[perm[k]]`.
pub fn permute_legs(m: &ComplexMatrix, shape: &LegShape, perm: &[usize]) -> Result<ComplexMatrix> {
    shape.check(m)?;
    let k = shape.len();
    let mut seen = vec![false; k];
    if perm.len() != k || perm.iter().any(|&p| p >= k || std::mem::replace(&mut seen[p], true)) {
        return Err(Error::Legs(format!("{perm:?} is not a permutation of {k} legs")));
    }
    let new_shape = LegShape::new(perm.iter().map(|&p| shape.dims[p]).collect())?;
    let n = shape.total();
    let mut old_idx = vec![0; k];
    let mut new_idx = vec![0; k];
    let map: Vec<usize> = (0..n)
        .map(|flat| {
            shape.unflatten(flat, &mut old_idx);
            for (slot, &p) in new_idx.iter_mut().zip(perm) {
                *slot = old_idx[p];
            }
            new_shape.flatten(&new_idx)
        })
        .collect();
    let mut out = DMatrix::zeros(n, n);
    for c in 0..n {
        for r in 0..n {
            out[(map[r], map[c])] = m[(r, c)];
        }
    }
    Ok(out)
}

fn check_legs(shape: &LegShape, legs: &[usize]) -> Result<Vec<bool>> {
    let mut mask = vec![false; shape.len()];
    for &l in legs {
        if l >= shape.len() || mask[l] {
            return Err(Error::Legs(format!(
                "leg {l} is out of range or repeated for shape {:?}",
                shape.dims
            )));
        }
        mask[l] = true;
    }
    Ok(mask)
}

/// Traces out `legs`; the remaining legs keep their relative order.
pub fn partial_trace(m: &ComplexMatrix, shape: &LegShape, legs: &[usize]) -> Result<ComplexMatrix> {
    shape.check(m)?;
    let mask = check_legs(shape, legs)?;
    let kept: Vec<usize> = (0..shape.len()).filter(|&l| !mask[l]).collect();
    let traced: Vec<usize> = (0..shape.len()).filter(|&l| mask[l]).collect();
    let kept_dim: usize = kept.iter().map(|&l| shape.dims[l]).product();
    let traced_dim: usize = traced.iter().map(|&l| shape.dims[l]).product();

    // offset of each kept / traced sub-index inside the full flat index
    let stride = |l: usize| -> usize { shape.dims[l + 1..].iter().product() };
    let offsets = |group: &[usize], count: usize| -> Vec<usize> {
        (0..count)
            .map(|mut flat| {
                let mut off = 0;
                for &l in group.iter().rev() {
                    off += (flat % shape.dims[l]) * stride(l);
                    flat /= shape.dims[l];
                }
                off
            })
            .collect()
    };
    let kept_off = offsets(&kept, kept_dim);
    let traced_off = offsets(&traced, traced_dim);

    let mut out = DMatrix::zeros(kept_dim, kept_dim);
    for c in 0..kept_dim {
        for r in 0..kept_dim {
            out[(r, c)] = traced_off
                .iter()
                .map(|&t| m[(kept_off[r] + t, kept_off[c] + t)])
                .sum();
        }
    }
    Ok(out)
}

/// Transposes the row and column indices of `legs`.
pub fn partial_transpose(m: &ComplexMatrix, shape: &LegShape, legs: &[usize]) -> Result<ComplexMatrix> {
    shape.check(m)?;
    let mask = check_legs(shape, legs)?;
    let n = shape.total();
    let k = shape.len();
    let mut ri = vec![0; k];
    let mut ci = vec![0; k];
    let mut out = DMatrix::zeros(n, n);
    for c in 0..n {
        for r in 0..n {
            shape.unflatten(r, &mut ri);
            shape.unflatten(c, &mut ci);
            for l in 0..k {
                if mask[l] {
                    std::mem::swap(&mut ri[l], &mut ci[l]);
                }
            }
            out[(shape.flatten(&ri), shape.flatten(&ci))] = m[(r, c)];
        }
    }
    Ok(out)
}

/// max |M - M^dag|.
pub fn hermitian_deviation(m: &ComplexMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for c in 0..m.ncols() {
        for r in 0..=c.min(m.nrows().saturating_sub(1)) {
            worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    worst
}

/// Checks Hermiticity (within [`HERMITIAN_TOL`]) and returns (M + M^dag)/2.
pub fn hermitian_part(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::Dimension(format!("expected a square matrix, got {}x{}", m.nrows(), m.ncols())));
    }
    let scale = m.iter().fold(1.0f64, |acc, z| acc.max(z.norm()));
    let dev = hermitian_deviation(m);
    if dev > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian(dev));
    }
    Ok((m + m.adjoint()) * C64::new(0.5, 0.0))
}

/// Eigenvalues (ascending) and matching eigenvectors (columns) of a Hermitian matrix.
pub fn eigh(m: &ComplexMatrix) -> Result<(DVector<f64>, ComplexMatrix)> {
    let h = hermitian_part(m)?;
    let eig = SymmetricEigen::new(h);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_fn(n, |i, _| eig.eigenvalues[order[i]]);
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<DVector<f64>> {
    let h = hermitian_part(m)?;
    let mut vals: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    Ok(DVector::from_vec(vals))
}

pub fn operator_norm(m: &ComplexMatrix) -> Result<f64> {
    let vals = eigenvalues(m)?;
    Ok(vals.iter().fold(0.0f64, |acc, v| acc.max(v.abs())))
}

pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(eigenvalues(m)?[0])
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(eigenvalues(m)?.iter().map(|v| v.abs()).sum())
}

/// Thin singular value decomposition `m = u diag(s) v_t` with `s` descending.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub s: DVector<f64>,
    pub v_t: ComplexMatrix,
}

/// One-sided Jacobi SVD.
///
/// nalgebra's complex SVD returns wrong factors for some rank-deficient inputs
/// (rank-one 15 x 3 matrices reconstruct with O(1) error), and rank-deficient
/// inputs are exactly the product vectors and near-isometries used here.
/// Columns belonging to zero singular values are completed to an orthonormal
/// set.
pub fn svd(m: &ComplexMatrix) -> Svd {
    if m.nrows() < m.ncols() {
        let t = svd(&m.adjoint());
        return Svd { u: t.v_t.adjoint(), s: t.s, v_t: t.u.adjoint() };
    }
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let mut v = identity(cols);
    for _ in 0..80 {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dotc(&a.column(q));
                if gamma.norm() <= f64::EPSILON * (alpha * beta).sqrt() || gamma.norm() == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = gamma / gamma.norm();
                let zeta = (beta - alpha) / (2.0 * gamma.norm());
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = c * t;
                for mat in [&mut a, &mut v] {
                    for i in 0..mat.nrows() {
                        let (xp, xq) = (mat[(i, p)], mat[(i, q)] * phase.conj());
                        mat[(i, p)] = xp * c - xq * sn;
                        mat[(i, q)] = xp * sn + xq * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..cols).map(|j| a.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let scale = norms.iter().copied().fold(0.0, f64::max);
    let mut u = ComplexMatrix::zeros(rows, cols);
    let mut vs = ComplexMatrix::zeros(cols, cols);
    let mut filled = 0;
    for (k, &j) in order.iter().enumerate() {
        vs.set_column(k, &v.column(j));
        if norms[j] > scale * 1e-300 && norms[j] > 0.0 {
            u.set_column(k, &(a.column(j) / C64::new(norms[j], 0.0)));
            filled = k + 1;
        }
    }
    // Complete u from the standard basis where the singular value vanished.
    let mut e = 0;
    for k in filled..cols {
        loop {
            let mut w = Ket::zeros(rows);
            w[e] = C64::new(1.0, 0.0);
            e += 1;
            for j in 0..k {
                let proj = u.column(j).dotc(&w);
                w -= u.column(j) * proj;
            }
            let n = w.norm();
            if n > 0.5 {
                u.set_column(k, &(w / C64::new(n, 0.0)));
                break;
            }
        }
    }
    let s = DVector::from_iterator(cols, order.iter().map(|&j| norms[j]));
    Svd { u, s, v_t: vs.adjoint() }
}

/// The unitary (or isometry) closest to `m`: the polar factor `u v_t`.
pub fn polar_factor(m: &ComplexMatrix) -> ComplexMatrix {
    let d = svd(m);
    d.u * d.v_t
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in max_abs_diff");
    a.iter().zip(b.iter()).fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

/// An eigenvalue estimate certified by its residual.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralEstimate {
    pub value: f64,
    /// ||M v - value v|| for the unit vector v that produced `value`.
    pub residual: f64,
    pub iterations: usize,
}

/// Iteration cap for the matrix-free eigen-solvers.
pub const POWER_MAX_ITERS: usize = 20_000;

fn dominant_eigenpair<F>(apply: &F, start: Ket, tol: f64, max_iters: usize) -> Result<SpectralEstimate>
where
    F: Fn(&Ket) -> Ket + ?Sized,
{
    let mut v = start;
    let nv = v.norm();
    if nv == 0.0 {
        return Err(Error::InvalidParameter("zero start vector".into()));
    }
    v /= C64::new(nv, 0.0);
    let mut last_residual = f64::INFINITY;
    for it in 1..=max_iters {
        let w = apply(&v);
        let lambda = v.dotc(&w).re;
        let residual = (&w - &v * C64::new(lambda, 0.0)).norm();
        last_residual = residual;
        if residual <= tol * lambda.abs() || w.norm() == 0.0 {
            return Ok(SpectralEstimate { value: lambda, residual, iterations: it });
        }
        let mu = w.norm();
        // Eigenvalues +l and -l of equal magnitude make plain iteration
        // oscillate; (M +- mu) v separates the two components.
        if it % 8 == 0 {
            for sign in [1.0, -1.0] {
                let mut z = &w + &v * C64::new(sign * mu, 0.0);
                let nz = z.norm();
                if nz <= 1e-6 * mu {
                    continue;
                }
                z /= C64::new(nz, 0.0);
                let mz = apply(&z);
                let l = z.dotc(&mz).re;
                let r = (&mz - &z * C64::new(l, 0.0)).norm();
                if r <= tol * l.abs() && l.abs() >= mu * (1.0 - 10.0 * tol) {
                    return Ok(SpectralEstimate { value: l, residual: r, iterations: it });
                }
            }
        }
        v = w / C64::new(mu, 0.0);
    }
    Err(Error::NonConvergence { iterations: max_iters, residual: last_residual })
}

/// Spectral norm of a Hermitian operator given only by its action.
///
/// Power iteration from a seeded random start plus one deterministic restart
/// orthogonal to it; the larger certified magnitude wins. An estimate is
/// accepted only once `||M v - l v|| <= tol * |l|`.
pub fn operator_norm_matfree<F>(apply: &F, dim: usize, tol: f64, seed: u64) -> Result<SpectralEstimate>
where
    F: Fn(&Ket) -> Ket + ?Sized,
{
    if dim == 0 {
        return Err(Error::Dimension("zero-dimensional operator".into()));
    }
    let mut rng = rng_from(derive_seed(seed, 0));
    let first = complex_normal_vector(&mut rng, dim);
    // deterministic second start: a fixed ramp, orthogonalized against the first
    let unit = &first / C64::new(first.norm(), 0.0);
    let ramp = Ket::from_fn(dim, |i, _| C64::new(1.0 + i as f64, 0.5 * ((i % 7) as f64)));
    let mut second = &ramp - &unit * unit.dotc(&ramp);
    if second.norm() < 1e-12 {
        second = Ket::from_fn(dim, |i, _| if i == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
    }

    let a = dominant_eigenpair(apply, first, tol, POWER_MAX_ITERS);
    let b = dominant_eigenpair(apply, second, tol, POWER_MAX_ITERS);
    match (a, b) {
        (Ok(x), Ok(y)) => {
            let pick = if y.value.abs() > x.value.abs() { y } else { x };
            Ok(SpectralEstimate { value: pick.value.abs(), ..pick })
        }
        (Ok(x), Err(_)) | (Err(_), Ok(x)) => Ok(SpectralEstimate { value: x.value.abs(), ..x }),
        (Err(e), Err(_)) => Err(e),
    }
}

/// Smallest eigenvalue of a Hermitian operator given only by its action.
///
/// Runs [`operator_norm_matfree`] for a shift `s >= lambda_max`, then power
/// iteration on `s - M`. The returned residual refers to `M` and is certified
/// against `tol * s`.
pub fn min_eigenvalue_matfree<F>(apply: &F, dim: usize, tol: f64, seed: u64) -> Result<SpectralEstimate>
where
    F: Fn(&Ket) -> Ket + ?Sized,
{
    let norm = operator_norm_matfree(apply, dim, tol, seed)?.value;
    if norm == 0.0 {
        return Ok(SpectralEstimate { value: 0.0, residual: 0.0, iterations: 0 });
    }
    let shift = norm * (1.0 + 1e-3);
    let shifted = |x: &Ket| -> Ket { x * C64::new(shift, 0.0) - apply(x) };
    let mut rng = rng_from(derive_seed(seed, 1));
    let start = complex_normal_vector(&mut rng, dim);
    // residual relative to the shift rather than to s - lambda_min
    let rel = tol * norm / (2.0 * shift);
    let est = dominant_eigenpair(&shifted, start, rel, POWER_MAX_ITERS)?;
    Ok(SpectralEstimate { value: shift - est.value, residual: est.residual, iterations: est.iterations })
}
