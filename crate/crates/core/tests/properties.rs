//! Cross-module invariants, checked on seeded random inputs.

use nalgebra::DMatrix;
use proptest::prelude::*;
use statewit::biconcurrence::{build_biconcurrence, g1, g2, VectorSet};
use statewit::optimize::{alternating_product_min, haar_unitary, minimize_diagonal, minimize_over_unitaries, OptimizerConfig};
use statewit::rng::{complex_normal, rng_from};
use statewit::states::{self, eigendecomposition_subnormalized, ppt_check, random_ket, BipartiteState, PptVerdict};
use statewit::tensor::{self, LegShape};
use statewit::witness::{strictify, witness_for, WitnessParams};
use statewit::{ComplexMatrix, Ket, C64};

fn random_matrix(r: usize, c: usize, seed: u64) -> ComplexMatrix {
    let mut rng = rng_from(seed);
    DMatrix::from_fn(r, c, |_, _| complex_normal(&mut rng))
}

fn is_valid_state(s: &BipartiteState) -> bool {
    let rho = s.rho();
    let trace_ok = (rho.trace().re - 1.0).abs() < 1e-12 && rho.trace().im.abs() < 1e-12;
    trace_ok && tensor::hermitian_deviation(rho) < 1e-12 && tensor::min_eigenvalue(rho).unwrap() > -1e-12
}

fn unit(v: Ket) -> Ket {
    let n = v.norm();
    v / C64::new(n, 0.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kron_is_associative(seed in any::<u64>(), a in 1usize..4, b in 1usize..4, c in 1usize..4) {
        let (x, y, z) = (random_matrix(a, a, seed), random_matrix(b, b, seed ^ 1), random_matrix(c, c, seed ^ 2));
        let left = tensor::kron(&tensor::kron(&x, &y), &z);
        let right = tensor::kron(&x, &tensor::kron(&y, &z));
        prop_assert!(tensor::max_abs_diff(&left, &right) < 1e-12);
    }

    #[test]
    fn tracing_every_leg_gives_the_trace(seed in any::<u64>(), da in 2usize..4, db in 2usize..4, rank in 1usize..5) {
        let rho = states::random_density(da * db, rank, seed).unwrap();
        let shape = LegShape::new(vec![da, db]).unwrap();
        let t = tensor::partial_trace(&rho, &shape, &[0, 1]).unwrap();
        prop_assert_eq!(t.shape(), (1, 1));
        prop_assert!((t[(0, 0)] - rho.trace()).norm() < 1e-12);
    }

    #[test]
    fn generators_produce_valid_states(seed in any::<u64>(), k in 1usize..7, rank in 1usize..5, p in 0.0f64..=1.0) {
        prop_assert!(is_valid_state(&states::random_separable(2, 3, k, seed).unwrap().0));
        prop_assert!(is_valid_state(&states::random_state(2, 2, rank, seed).unwrap()));
        prop_assert!(is_valid_state(&states::werner_state(p).unwrap()));
        let prod = states::product_state(&random_ket(2, seed), &random_ket(3, seed ^ 5)).unwrap();
        prop_assert!(is_valid_state(&prod));
        prop_assert_eq!(ppt_check(&prod).verdict, PptVerdict::Ppt);
    }

    #[test]
    fn penalties_vanish_exactly_on_balanced_orthonormal_sets(seed in any::<u64>(), n in 2usize..7, scale in 0.1f64..3.0, eps in 1e-4f64..1e-1) {
        let u = haar_unitary(n, &mut rng_from(seed));
        let xs = VectorSet::new(VectorSet::from_unitary(&u).unwrap().into_vectors().into_iter().map(|x| x * C64::new(scale, 0.0)).collect()).unwrap();
        prop_assert!(g1(&xs) < 1e-24 * scale.powi(4) + 1e-26);
        prop_assert!(g2(&xs) < 1e-24 * scale.powi(4) + 1e-26);

        // tilt one vector toward another: orthogonality breaks
        let mut v = xs.vectors().to_vec();
        let shifted = &v[0] + &v[1] * C64::new(eps, 0.0);
        v[0] = shifted;
        prop_assert!(g1(&VectorSet::new(v).unwrap()) > 0.0);

        // rescale one vector: norm balance breaks
        let mut v = xs.vectors().to_vec();
        v[0] *= C64::new(1.0 + eps, 0.0);
        prop_assert!(g2(&VectorSet::new(v).unwrap()) > 0.0);
    }
}

/// Remixing the pure-state decomposition by an isometry leaves the optimized
/// basis objective unchanged once both are extended to the same N.
#[test]
fn basis_minimum_is_decomposition_independent() {
    for seed in 0..3u64 {
        let state = states::random_state(2, 2, 2, 40 + seed).unwrap();
        let dec = eigendecomposition_subnormalized(&state);
        let q = random_matrix(3, dec.len(), 50 + seed).qr().q();
        let other = dec.remix(&q).unwrap();
        assert!(tensor::max_abs_diff(&other.reconstruct(), state.rho()) < 1e-12);
        let cfg = OptimizerConfig { restarts: 8, ..OptimizerConfig::with_seed(seed) };
        let a = minimize_over_unitaries(&build_biconcurrence(&dec).extend(15).unwrap(), &cfg).unwrap().value;
        let b = minimize_over_unitaries(&build_biconcurrence(&other).extend(15).unwrap(), &cfg).unwrap().value;
        assert!((a - b).abs() < 1e-6, "seed {seed}: {a} vs {b}");
        assert!(a > 1e-4, "entangled state should have a positive minimum, got {a}");
    }
}

/// <uv|W|uv> never falls below the optimized diagonal minimum of W. The
/// extension is kept at N = 5 so the alternating product minimizer stays cheap.
#[test]
fn off_diagonal_products_stay_above_the_diagonal_minimum() {
    let state = states::random_state(2, 2, 2, 7).unwrap();
    let b = build_biconcurrence(&eigendecomposition_subnormalized(&state)).extend(5).unwrap();
    let w = witness_for(&b, &WitnessParams::default(), 1).unwrap().w;
    let cfg = OptimizerConfig { restarts: 8, ..OptimizerConfig::with_seed(2) };
    let diag = minimize_diagonal(&w, &cfg).unwrap().value;
    let d = w.dim() * w.dim();
    let mut rng = rng_from(3);
    let mut worst = f64::INFINITY;
    for s in 0..10_000 {
        let u = unit(Ket::from_fn(d, |_, _| complex_normal(&mut rng)));
        let v = if s % 2 == 0 {
            unit(Ket::from_fn(d, |_, _| complex_normal(&mut rng)))
        } else {
            let scale = 10f64.powf(-4.0 * s as f64 / 10_000.0);
            unit(&u + Ket::from_fn(d, |_, _| complex_normal(&mut rng)) * C64::new(scale, 0.0))
        };
        worst = worst.min(w.expectation(&u, &v).unwrap() - diag);
    }
    assert!(worst >= -1e-8, "gap {worst}");
    // the product infimum coincides with the diagonal one
    let product = alternating_product_min(&w, &cfg).unwrap().value;
    assert!(product >= diag - 1e-8, "{product} < {diag}");
}

/// The strictified witness of a separable state is positive on distinct
/// product pairs, including pairs close to each other.
#[test]
fn strictified_witness_is_positive_off_the_diagonal() {
    let (state, _) = states::random_separable(2, 2, 3, 19).unwrap();
    let b = build_biconcurrence(&eigendecomposition_subnormalized(&state)).extend(15).unwrap();
    let build = witness_for(&b, &WitnessParams::default(), 1).unwrap();
    let wp = strictify(&build.w, 1e-3 * build.c).unwrap();
    let d = wp.dim() * wp.dim();
    let mut rng = rng_from(4);
    for s in 0..400 {
        let u = unit(Ket::from_fn(d, |_, _| complex_normal(&mut rng)));
        let scale = 10f64.powf(-3.0 * s as f64 / 400.0);
        let v = unit(&u + Ket::from_fn(d, |_, _| complex_normal(&mut rng)) * C64::new(scale, 0.0));
        assert!(wp.expectation(&u, &v).unwrap() > 0.0, "sample {s}");
    }
}
