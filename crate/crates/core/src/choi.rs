//! Witnesses as linear maps.
//!
//! A Hermitian W on C^m (x) C^m defines
//!
//! ```text
//! Lambda(sigma) = Tr_1[W^T (sigma^T (x) I)],   Lambda(sigma)[k,l] = sum_ij W[(i,l),(j,k)] sigma[j,i]
//! ```
//!
//! chosen so that `<v*|Lambda(|u><u|)|v*> = <uv|W|uv>`: W is nonnegative on
//! product vectors exactly when Lambda is positive, and W vanishes on some
//! product vector exactly when some pure input is mapped to a singular
//! output. For real W this agrees with Tr_1[W (sigma^T (x) I)].

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io;
use crate::rng::{complex_normal_vector, derive_seed, rng_from};
use crate::tensor;
use crate::witness::StructuredOperator;
use crate::{ComplexMatrix, Ket, C64};

pub const CONVENTION: &str = "Tr_1[W^T (sigma^T (x) I)]";
/// Largest input dimension for dense conversions.
pub const DENSE_MAX_DIM: usize = 36;

/// Linear map on matrices stored as a superoperator:
/// `Lambda(sigma)[k,l] = sum_ij coeffs[(k*out + l), (i*in + j)] sigma[i,j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMapOnOperators {
    pub in_dim: usize,
    pub out_dim: usize,
    pub coeffs: ComplexMatrix,
    pub convention: &'static str,
}

impl LinearMapOnOperators {
    pub fn apply(&self, sigma: &ComplexMatrix) -> Result<ComplexMatrix> {
        if sigma.nrows() != self.in_dim || sigma.ncols() != self.in_dim {
            return Err(Error::Dimension(format!("map input is {0}x{0}, got {1}x{2}", self.in_dim, sigma.nrows(), sigma.ncols())));
        }
        let flat = Ket::from_fn(self.in_dim * self.in_dim, |k, _| sigma[(k / self.in_dim, k % self.in_dim)]);
        let out = &self.coeffs * flat;
        Ok(DMatrix::from_fn(self.out_dim, self.out_dim, |k, l| out[k * self.out_dim + l]))
    }

    /// W with `witness_to_map(W) = self`: the transpose of
    /// sum_ij |i><j| (x) Lambda(|i><j|).
    pub fn choi(&self) -> Result<ComplexMatrix> {
        let (di, dout) = (self.in_dim, self.out_dim);
        let mut j = DMatrix::zeros(di * dout, di * dout);
        for i in 0..di {
            for jj in 0..di {
                let mut e = DMatrix::zeros(di, di);
                e[(i, jj)] = C64::new(1.0, 0.0);
                let out = self.apply(&e)?;
                for k in 0..dout {
                    for l in 0..dout {
                        j[(i * dout + k, jj * dout + l)] = out[(k, l)];
                    }
                }
            }
        }
        Ok(j.transpose())
    }
}

/// Dense conversion of a Hermitian W on C^m (x) C^m.
pub fn witness_to_map(w: &ComplexMatrix, m: usize) -> Result<LinearMapOnOperators> {
    if m > DENSE_MAX_DIM {
        return Err(Error::TooLarge(format!("dense maps need m <= {DENSE_MAX_DIM}, got {m}")));
    }
    if w.nrows() != m * m || w.ncols() != m * m {
        return Err(Error::Dimension(format!("W is {}x{}, expected {1}x{1}", w.nrows(), m * m)));
    }
    let w = tensor::hermitian_part(w)?;
    let mut coeffs = DMatrix::zeros(m * m, m * m);
    for i in 0..m {
        for l in 0..m {
            for j in 0..m {
                for k in 0..m {
                    // sigma[j,i] contributes W[(i,l),(j,k)] to Lambda[k,l]
                    coeffs[(k * m + l, j * m + i)] = w[(i * m + l, j * m + k)];
                }
            }
        }
    }
    Ok(LinearMapOnOperators { in_dim: m, out_dim: m, coeffs, convention: CONVENTION })
}

/// Dense conversion of a structured witness (N <= 6).
pub fn structured_to_map(w: &StructuredOperator) -> Result<LinearMapOnOperators> {
    let n = w.dim();
    witness_to_map(&w.to_dense()?, n * n)
}

/// Lambda(sigma) for a structured W without forming W; sigma acts on
/// H (x) H~ = C^N (x) C^N.
pub fn apply_map_structured(w: &StructuredOperator, sigma: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = w.dim();
    let d = n * n;
    if sigma.nrows() != d || sigma.ncols() != d {
        return Err(Error::Dimension(format!("sigma is {}x{}, expected {d}x{d}", sigma.nrows(), sigma.ncols())));
    }
    let mut out = DMatrix::zeros(d, d);
    for term in w.terms() {
        let hs = term.h.entries(n);
        let ts = term.t.entries(n);
        // W[(I,L),(J,K)] with I = (m,i), L = (n2,k2), J = (m',i'), K = (n1,k1)
        // gets h[(m,n2),(m',n1)] t[(i,k2),(i',k1)].
        for &(hr, hc, hv) in &hs {
            let (m, n2, mp, n1) = (hr / n, hr % n, hc / n, hc % n);
            for &(tr, tc, tv) in &ts {
                let (i, k2, ip, k1) = (tr / n, tr % n, tc / n, tc % n);
                out[(n1 * n + k1, n2 * n + k2)] += hv * tv * term.coeff * sigma[(mp * n + ip, m * n + i)];
            }
        }
    }
    Ok(out)
}

/// Outcome of [`fully_mixing_probe`]. Sampling can only indicate the
/// property: a positive minimum over finitely many inputs does not exclude a
/// singular output elsewhere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FullyMixingReport {
    pub samples: usize,
    /// Smallest eigenvalue of Lambda(|u><u|) over the sampled unit u.
    #[serde(with = "io::sci17")]
    pub min_sampled: f64,
    /// Same quantity at the supplied minimizing input.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "io::opt_sci17")]
    pub at_minimizer: Option<f64>,
    /// min_sampled > 0.
    pub fully_mixing_indicated: bool,
}

/// lambda_min(Lambda(|u><u|)) for unit u.
pub fn output_min_eigenvalue(w: &StructuredOperator, u: &Ket) -> Result<f64> {
    let nrm = u.norm();
    let u = u / C64::new(nrm, 0.0);
    let out = apply_map_structured(w, &(&u * u.adjoint()))?;
    tensor::min_eigenvalue(&tensor::hermitian_part(&out)?)
}

pub fn fully_mixing_probe(
    w: &StructuredOperator,
    samples: usize,
    seed: u64,
    minimizer: Option<&Ket>,
) -> Result<FullyMixingReport> {
    let d = w.dim() * w.dim();
    let values = (0..samples)
        .into_par_iter()
        .map(|s| output_min_eigenvalue(w, &complex_normal_vector(&mut rng_from(derive_seed(seed, s as u64)), d)))
        .collect::<Result<Vec<f64>>>()?;
    let min_sampled = values.iter().copied().fold(f64::INFINITY, f64::min);
    let at_minimizer = minimizer.map(|u| output_min_eigenvalue(w, u)).transpose()?;
    Ok(FullyMixingReport { samples, min_sampled, at_minimizer, fully_mixing_indicated: min_sampled > 0.0 })
}
