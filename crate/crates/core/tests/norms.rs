use irnorm_core::benchmarks::benchmark_loops;
use irnorm_core::{
    closed_loop, h1_from_ir, h2_from_ir, hinf_from_ir, norms_from_ir, toeplitz_matvec,
    ImpulseResponse,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn dense_toeplitz(g: &[f64]) -> DMatrix<f64> {
    let n = g.len();
    DMatrix::from_fn(n, n, |i, j| if i >= j { g[i - j] } else { 0.0 })
}

fn dense_sigma_max(g: &[f64]) -> f64 {
    dense_toeplitz(g).singular_values().max()
}

fn ir(g: Vec<f64>) -> ImpulseResponse {
    ImpulseResponse::new(g).unwrap()
}

fn random_ir() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0..2.0f64, 1..=31)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn spectral_norm_matches_dense_svd(g in random_ir()) {
        let expected = dense_sigma_max(&g);
        let got = hinf_from_ir(&ir(g)).unwrap();
        prop_assert!((got - expected).abs() <= 1e-8 * expected.max(1e-300), "{got} vs {expected}");
    }

    #[test]
    fn norm_ordering(g in prop::collection::vec(-5.0..5.0f64, 1..=101)) {
        let n = norms_from_ir(&ir(g)).unwrap();
        prop_assert!(n.h2 <= n.hinf * (1.0 + 1e-9) + 1e-12);
        prop_assert!(n.hinf <= n.h1 * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn homogeneity(g in random_ir(), a in -10.0..10.0f64) {
        let base = norms_from_ir(&ir(g.clone())).unwrap();
        let scaled = norms_from_ir(&ir(g.iter().map(|x| a * x).collect())).unwrap();
        let tol = 1e-9 * a.abs().max(1.0) * base.h1.max(1.0);
        prop_assert!((scaled.h1 - a.abs() * base.h1).abs() <= tol);
        prop_assert!((scaled.h2 - a.abs() * base.h2).abs() <= tol);
        prop_assert!((scaled.hinf - a.abs() * base.hinf).abs() <= tol);
    }
}

#[test]
fn ordering_on_a_thousand_irs() {
    let mut state = 0x2545_f491_4f6c_dd1du64;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    };
    for _ in 0..1000 {
        let len = 1 + ((next() + 1.0) * 50.0) as usize;
        let g: Vec<f64> = (0..len).map(|_| next()).collect();
        let n = norms_from_ir(&ir(g)).unwrap();
        assert!(n.h2 <= n.hinf * (1.0 + 1e-9));
        assert!(n.hinf <= n.h1 * (1.0 + 1e-9));
    }
}

#[test]
fn toeplitz_product_matches_dense() {
    let g = vec![1.0, -0.5, 0.25, 2.0, 0.0, -1.5];
    let u = vec![0.3, -1.0, 2.0, 0.5, 0.25, -0.75];
    let dense = dense_toeplitz(&g) * nalgebra::DVector::from_vec(u.clone());
    let got = toeplitz_matvec(&ir(g), &u).unwrap();
    for (a, b) in got.iter().zip(dense.iter()) {
        assert!((a - b).abs() <= 1e-14);
    }
    assert!(toeplitz_matvec(&ir(vec![1.0, 2.0]), &[1.0]).is_err());
}

#[test]
fn signal_norms_by_hand() {
    let g = ir(vec![3.0, -4.0]);
    assert_eq!(h1_from_ir(&g), 7.0);
    assert_eq!(h2_from_ir(&g), 5.0);
}

#[test]
fn finite_section_of_benchmark_loops() {
    for (i, l) in benchmark_loops().iter().enumerate() {
        let (s, _) = closed_loop(&l.plant, &l.controller).unwrap();
        let hinf = s.true_norms().unwrap().hinf;
        let mut previous = 0.0;
        for m in [10, 20, 50, 100] {
            let est = hinf_from_ir(&s.impulse_response(m)).unwrap();
            assert!(est >= previous - 1e-12, "loop {} not monotone at M={m}", i + 1);
            assert!(est <= hinf + 1e-9, "loop {} exceeds peak at M={m}", i + 1);
            previous = est;
        }
    }
}

#[test]
fn loop_one_truncated_norms() {
    let l = &benchmark_loops()[0];
    let (s, _) = closed_loop(&l.plant, &l.controller).unwrap();
    let n = norms_from_ir(&s.impulse_response(100)).unwrap();
    assert!((n.h1 - 2.0000).abs() <= 1e-3, "{n:?}");
    assert!((n.h2 - 1.0511).abs() <= 1e-3, "{n:?}");
    assert!((n.hinf - 1.1049).abs() <= 2e-3, "{n:?}");
    assert!(n.hinf <= 1.1049 + 1e-9);
}
