//! Bipartite states, pure-state decompositions and reference ensembles.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{complex_normal, complex_normal_vector, derive_seed, rng_from};
use crate::tensor::{self, LegShape};
use crate::{ComplexMatrix, Ket, C64};

/// Eigenvalues at or below this are dropped from decompositions.
pub const EIGEN_CUTOFF: f64 = 1e-12;
/// Below this the PPT oracle reports a negative partial transpose.
pub const PPT_TOL: f64 = 1e-10;

/// Density matrix on C^dA (x) C^dB.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteState {
    da: usize,
    db: usize,
    rho: ComplexMatrix,
}

impl BipartiteState {
    /// Validates Hermiticity (1e-12), unit trace (1e-10) and positivity
    /// (eigenvalues >= -1e-10).
    pub fn new(da: usize, db: usize, rho: ComplexMatrix) -> Result<Self> {
        if da == 0 || db == 0 {
            return Err(Error::InvalidState("subsystem dimensions must be positive".into()));
        }
        let d = da * db;
        if rho.nrows() != d || rho.ncols() != d {
            return Err(Error::InvalidState(format!(
                "expected a {d}x{d} matrix for dims [{da}, {db}], got {}x{}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        let rho = tensor::hermitian_part(&rho).map_err(|e| Error::InvalidState(e.to_string()))?;
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let min = tensor::min_eigenvalue(&rho)?;
        if min < -1e-10 {
            return Err(Error::InvalidState(format!("not positive semidefinite (min eigenvalue {min:e})")));
        }
        Ok(Self { da, db, rho })
    }

    pub fn from_ket(da: usize, db: usize, psi: &Ket) -> Result<Self> {
        let n = psi.norm();
        if n == 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let unit = psi / C64::new(n, 0.0);
        Self::new(da, db, &unit * unit.adjoint())
    }

    pub fn da(&self) -> usize {
        self.da
    }

    pub fn db(&self) -> usize {
        self.db
    }

    pub fn dim(&self) -> usize {
        self.da * self.db
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn shape(&self) -> LegShape {
        LegShape::new(vec![self.da, self.db]).expect("positive dims")
    }

    /// Default extension dimension `(dA dB)^2 - 1`.
    pub fn default_extension(&self) -> usize {
        self.dim() * self.dim() - 1
    }

    pub fn partial_transpose_b(&self) -> ComplexMatrix {
        tensor::partial_transpose(&self.rho, &self.shape(), &[1]).expect("shape matches")
    }

    pub fn is_maximally_mixed(&self, tol: f64) -> bool {
        let d = self.dim() as f64;
        tensor::max_abs_diff(&self.rho, &(tensor::identity(self.dim()) / C64::new(d, 0.0))) <= tol
    }
}

/// Subnormalized vectors with rho = sum_i |psi_i><psi_i|.
#[derive(Clone, Debug, PartialEq)]
pub struct PureDecomposition {
    pub da: usize,
    pub db: usize,
    pub vectors: Vec<Ket>,
}

impl PureDecomposition {
    pub fn new(da: usize, db: usize, vectors: Vec<Ket>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::InvalidState("empty decomposition".into()));
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != da * db) {
            return Err(Error::Dimension(format!("vector of length {} in a {}x{} decomposition", v.len(), da, db)));
        }
        Ok(Self { da, db, vectors })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.da * self.db;
        self.vectors.iter().fold(DMatrix::zeros(d, d), |acc, v| acc + v * v.adjoint())
    }

    /// psi'_j = sum_n w[(j, n)] psi_n. Another decomposition of the same state
    /// whenever `w` has orthonormal columns.
    pub fn remix(&self, w: &ComplexMatrix) -> Result<Self> {
        if w.ncols() != self.len() {
            return Err(Error::Dimension(format!("mixing matrix has {} columns for {} vectors", w.ncols(), self.len())));
        }
        let d = self.da * self.db;
        let vectors = (0..w.nrows())
            .map(|j| {
                self.vectors
                    .iter()
                    .enumerate()
                    .fold(Ket::zeros(d), |acc, (n, psi)| acc + psi * w[(j, n)])
            })
            .collect();
        Self::new(self.da, self.db, vectors)
    }
}

/// One term `weight |a><a| (x) |b><b|` with unit `a`, `b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductTerm {
    #[serde(with = "crate::io::ket_serde")]
    pub a: Ket,
    #[serde(with = "crate::io::ket_serde")]
    pub b: Ket,
    #[serde(with = "crate::io::sci17")]
    pub weight: f64,
}

impl ProductTerm {
    pub fn ket(&self) -> Ket {
        tensor::kron_vec(&self.a, &self.b) * C64::new(self.weight.sqrt(), 0.0)
    }
}

/// A finite mixture of product projectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductEnsemble {
    pub da: usize,
    pub db: usize,
    pub terms: Vec<ProductTerm>,
}

impl ProductEnsemble {
    pub fn empty(da: usize, db: usize) -> Self {
        Self { da, db, terms: Vec::new() }
    }

    pub fn total_weight(&self) -> f64 {
        self.terms.iter().map(|t| t.weight).sum()
    }

    pub fn mixture(&self) -> ComplexMatrix {
        let d = self.da * self.db;
        self.terms.iter().fold(DMatrix::zeros(d, d), |acc, t| {
            let k = t.ket();
            acc + &k * k.adjoint()
        })
    }
}

/// psi_i = sqrt(lambda_i) v_i over eigenpairs with lambda_i > 1e-12, in
/// descending eigenvalue order.
pub fn eigendecomposition_subnormalized(state: &BipartiteState) -> PureDecomposition {
    let (vals, vecs) = tensor::eigh(state.rho()).expect("state is Hermitian");
    let vectors: Vec<Ket> = (0..vals.len())
        .rev()
        .filter(|&i| vals[i] > EIGEN_CUTOFF)
        .map(|i| vecs.column(i) * C64::new(vals[i].sqrt(), 0.0))
        .collect();
    PureDecomposition { da: state.da(), db: state.db(), vectors }
}

/// Singlet (|01> - |10>)/sqrt(2).
pub fn singlet_vector() -> Ket {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Ket::from_vec(vec![C64::new(0.0, 0.0), C64::new(s, 0.0), C64::new(-s, 0.0), C64::new(0.0, 0.0)])
}

/// Projector onto the singlet.
pub fn bell_state() -> BipartiteState {
    BipartiteState::from_ket(2, 2, &singlet_vector()).expect("valid state")
}

/// p * singlet + (1 - p) * I/4.
pub fn werner_state(p: f64) -> Result<BipartiteState> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("Werner weight p = {p} is outside [0, 1]")));
    }
    let bell = bell_state();
    let rho = bell.rho() * C64::new(p, 0.0) + tensor::identity(4) * C64::new((1.0 - p) / 4.0, 0.0);
    BipartiteState::new(2, 2, rho)
}

pub fn maximally_mixed(da: usize, db: usize) -> Result<BipartiteState> {
    let d = da * db;
    BipartiteState::new(da, db, tensor::identity(d) / C64::new(d as f64, 0.0))
}

pub fn product_state(a: &Ket, b: &Ket) -> Result<BipartiteState> {
    BipartiteState::from_ket(a.len(), b.len(), &tensor::kron_vec(a, b))
}

/// Haar-random unit vector in C^d.
pub fn random_ket(d: usize, seed: u64) -> Ket {
    let mut rng = rng_from(seed);
    haar_ket(&mut rng, d)
}

pub(crate) fn haar_ket<R: rand::Rng + ?Sized>(rng: &mut R, d: usize) -> Ket {
    loop {
        let v = complex_normal_vector(rng, d);
        let n = v.norm();
        if n > 1e-300 {
            return v / C64::new(n, 0.0);
        }
    }
}

/// |a>|b> with independent Haar-random factors.
pub fn random_product_vector(da: usize, db: usize, seed: u64) -> Ket {
    let mut rng = rng_from(seed);
    let a = haar_ket(&mut rng, da);
    let b = haar_ket(&mut rng, db);
    tensor::kron_vec(&a, &b)
}

/// Ginibre-induced density matrix G G^dag / Tr(G G^dag) with G of size d x rank.
pub fn random_density(d: usize, rank: usize, seed: u64) -> Result<ComplexMatrix> {
    if rank == 0 || rank > d {
        return Err(Error::InvalidParameter(format!("rank {rank} must lie in 1..={d}")));
    }
    let mut rng = rng_from(seed);
    let g = DMatrix::from_fn(d, rank, |_, _| complex_normal(&mut rng));
    let rho = &g * g.adjoint();
    let tr = rho.trace().re;
    Ok(rho / C64::new(tr, 0.0))
}

/// Random state on C^dA (x) C^dB from [`random_density`].
pub fn random_state(da: usize, db: usize, rank: usize, seed: u64) -> Result<BipartiteState> {
    BipartiteState::new(da, db, random_density(da * db, rank, seed)?)
}

/// Convex mixture of `k` Haar-random product projectors with uniformly drawn,
/// normalized weights. Term `j` is drawn from stream `j` of `seed`.
pub fn random_separable(da: usize, db: usize, k: usize, seed: u64) -> Result<(BipartiteState, ProductEnsemble)> {
    use rand::Rng;
    if k == 0 {
        return Err(Error::InvalidParameter("a separable mixture needs k >= 1 terms".into()));
    }
    let mut terms: Vec<ProductTerm> = (0..k)
        .map(|j| {
            let mut rng = rng_from(derive_seed(seed, j as u64));
            let a = haar_ket(&mut rng, da);
            let b = haar_ket(&mut rng, db);
            let weight: f64 = rng.random_range(0.05..1.0);
            ProductTerm { a, b, weight }
        })
        .collect();
    let total: f64 = terms.iter().map(|t| t.weight).sum();
    for t in &mut terms {
        t.weight /= total;
    }
    let ens = ProductEnsemble { da, db, terms };
    let state = BipartiteState::new(da, db, ens.mixture())?;
    Ok((state, ens))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PptVerdict {
    Ppt,
    Npt,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PptReport {
    pub min_eig: f64,
    pub verdict: PptVerdict,
    /// PPT is equivalent to separability when dA * dB <= 6.
    pub exact: bool,
}

/// Smallest eigenvalue of the partial transpose on B.
pub fn ppt_check(state: &BipartiteState) -> PptReport {
    let min_eig = tensor::min_eigenvalue(&state.partial_transpose_b()).expect("partial transpose is Hermitian");
    PptReport {
        min_eig,
        verdict: if min_eig < -PPT_TOL { PptVerdict::Npt } else { PptVerdict::Ppt },
        exact: state.dim() <= 6,
    }
}

/// Singular values (descending) of the dA x dB reshaping of `v`.
pub fn schmidt_coefficients(v: &Ket, da: usize, db: usize) -> Result<Vec<f64>> {
    let m = schmidt_matrix(v, da, db)?;
    Ok(tensor::svd(&m).s.iter().copied().collect())
}

fn schmidt_matrix(v: &Ket, da: usize, db: usize) -> Result<ComplexMatrix> {
    if v.len() != da * db {
        return Err(Error::Dimension(format!("vector of length {} is not in C^{da} (x) C^{db}", v.len())));
    }
    Ok(DMatrix::from_fn(da, db, |a, b| v[a * db + b]))
}

/// Best product approximation: (sigma_1, a, b) with v ~ sigma_1 |a>|b>, and
/// the full list of Schmidt coefficients.
pub fn schmidt_rank_one(v: &Ket, da: usize, db: usize) -> Result<(f64, Ket, Ket, Vec<f64>)> {
    let m = schmidt_matrix(v, da, db)?;
    let d = tensor::svd(&m);
    let a: Ket = d.u.column(0).into_owned();
    let b: Ket = DVector::from_fn(db, |j, _| d.v_t[(0, j)]);
    let coeffs: Vec<f64> = d.s.iter().copied().collect();
    Ok((coeffs[0], a, b, coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_validation() {
        assert!(BipartiteState::new(2, 2, tensor::identity(4)).is_err());
        assert!(BipartiteState::new(2, 3, tensor::identity(4) / C64::new(4.0, 0.0)).is_err());
        let mut neg = DMatrix::zeros(4, 4);
        neg[(0, 0)] = C64::new(1.5, 0.0);
        neg[(1, 1)] = C64::new(-0.5, 0.0);
        assert!(BipartiteState::new(2, 2, neg).is_err());
        let mut herm = tensor::identity(4) / C64::new(4.0, 0.0);
        herm[(0, 1)] = C64::new(0.0, 0.1);
        assert!(BipartiteState::new(2, 2, herm).is_err());
    }

    #[test]
    fn eigendecomposition_of_pure_state() {
        let psi = random_ket(4, 3);
        let state = BipartiteState::from_ket(2, 2, &psi).unwrap();
        let dec = eigendecomposition_subnormalized(&state);
        assert_eq!(dec.len(), 1);
        let overlap = dec.vectors[0].dotc(&psi).norm();
        assert!((overlap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigendecomposition_of_maximally_mixed() {
        let dec = eigendecomposition_subnormalized(&maximally_mixed(2, 2).unwrap());
        assert_eq!(dec.len(), 4);
        for v in &dec.vectors {
            assert!((v.norm_squared() - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn eigendecomposition_of_werner() {
        let state = werner_state(0.6).unwrap();
        let dec = eigendecomposition_subnormalized(&state);
        assert_eq!(dec.len(), 4);
        let total: f64 = dec.vectors.iter().map(|v| v.norm_squared()).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(tensor::max_abs_diff(&dec.reconstruct(), state.rho()) < 1e-10);
        // oracle: spectrum of the Werner state is {(1+3p)/4, (1-p)/4 x3}
        let mut norms: Vec<f64> = dec.vectors.iter().map(|v| v.norm_squared()).collect();
        norms.sort_by(f64::total_cmp);
        for (n, e) in norms.iter().zip([0.1, 0.1, 0.1, 0.7]) {
            assert!((n - e).abs() < 1e-12);
        }
    }

    #[test]
    fn werner_family() {
        assert!(tensor::max_abs_diff(werner_state(0.0).unwrap().rho(), &(tensor::identity(4) / C64::new(4.0, 0.0))) < 1e-15);
        assert!(tensor::max_abs_diff(werner_state(1.0).unwrap().rho(), bell_state().rho()) < 1e-15);
        assert!(werner_state(1.2).is_err());
        assert!(werner_state(-0.1).is_err());
        for i in 0..=10 {
            let p = i as f64 / 10.0;
            let r = ppt_check(&werner_state(p).unwrap());
            assert!((r.min_eig - (1.0 - 3.0 * p) / 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ppt_oracle_reference_values() {
        let bell = ppt_check(&bell_state());
        assert!((bell.min_eig + 0.5).abs() < 1e-12);
        assert_eq!(bell.verdict, PptVerdict::Npt);
        assert!(bell.exact);
        let third = ppt_check(&werner_state(1.0 / 3.0).unwrap());
        assert!(third.min_eig.abs() < 1e-12);
        assert_eq!(third.verdict, PptVerdict::Ppt);
    }

    #[test]
    fn random_separable_states_are_ppt() {
        let (state, ens) = random_separable(2, 2, 1, 5).unwrap();
        assert_eq!(ens.terms.len(), 1);
        assert_eq!(ppt_check(&state).verdict, PptVerdict::Ppt);
        for seed in 0..50 {
            let k = 1 + (seed as usize % 6);
            let (state, ens) = random_separable(2, 2, k, seed).unwrap();
            let r = ppt_check(&state);
            assert!(r.min_eig >= -1e-12, "seed {seed}: {}", r.min_eig);
            assert_eq!(r.verdict, PptVerdict::Ppt);
            assert!(tensor::max_abs_diff(&ens.mixture(), state.rho()) < 1e-12);
            assert!((ens.total_weight() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn random_density_contract() {
        let rho = random_density(6, 6, 17).unwrap();
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
        assert!(tensor::min_eigenvalue(&rho).unwrap() > -1e-12);
        assert_eq!(rho, random_density(6, 6, 17).unwrap());
        let low = random_density(4, 2, 3).unwrap();
        let vals = tensor::eigenvalues(&low).unwrap();
        assert!(vals[0].abs() < 1e-12 && vals[1].abs() < 1e-12);
        assert!(random_density(4, 5, 0).is_err());
        assert_eq!(random_ket(5, 8), random_ket(5, 8));
        assert_eq!(random_product_vector(2, 3, 8), random_product_vector(2, 3, 8));
    }

    #[test]
    fn schmidt_reference_values() {
        let p = random_product_vector(2, 3, 4);
        let s = schmidt_coefficients(&p, 2, 3).unwrap();
        assert!((s[0] - 1.0).abs() < 1e-12 && s[1] < 1e-12);
        let b = schmidt_coefficients(&singlet_vector(), 2, 2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((b[0] - h).abs() < 1e-12 && (b[1] - h).abs() < 1e-12);
        let v = complex_normal_vector(&mut rng_from(2), 6);
        let s = schmidt_coefficients(&v, 3, 2).unwrap();
        let sum: f64 = s.iter().map(|x| x * x).sum();
        assert!((sum - v.norm_squared()).abs() < 1e-12);
        assert!(schmidt_coefficients(&v, 2, 2).is_err());
    }

    #[test]
    fn rank_one_truncation_of_product() {
        let a = random_ket(2, 1);
        let b = random_ket(3, 2);
        let v = tensor::kron_vec(&a, &b) * C64::new(0.5, 0.0);
        let (s, ta, tb, _) = schmidt_rank_one(&v, 2, 3).unwrap();
        let back = tensor::kron_vec(&ta, &tb) * C64::new(s, 0.0);
        assert!((back - v).norm() < 1e-12);
    }

    #[test]
    fn ppt_of_double_partial_transpose() {
        let state = random_state(2, 2, 3, 12).unwrap();
        let twice = tensor::partial_transpose(&state.partial_transpose_b(), &state.shape(), &[1]).unwrap();
        let floor = tensor::min_eigenvalue(state.rho()).unwrap();
        assert!((tensor::min_eigenvalue(&twice).unwrap() - floor).abs() < 1e-12);
    }
}
