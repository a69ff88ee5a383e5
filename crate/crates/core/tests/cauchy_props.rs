use dctplus::cauchy::{cauchy_matrix, compose_rank_k, CauchyFactorization};
use dctplus::graph::{apply_rank_one, path_laplacian, RankOneUpdate};
use dctplus::linalg::{norm2, DenseMatrix};
use dctplus::spectral::{column_sign, dense_eigh, path_spectrum};
use proptest::prelude::*;

fn update(max_n: usize) -> impl Strategy<Value = RankOneUpdate> {
    (4usize..max_n).prop_flat_map(|n| {
        (
            prop_oneof![-2.0f64..-0.1, 0.1f64..2.0],
            prop::collection::vec(-1.0f64..1.0, n),
        )
            .prop_filter_map("nonzero v", |(rho, v)| RankOneUpdate::new(rho, v).ok())
    })
}

/// Column signs of `x` aligned with the spectral convention.
fn canonical(x: &DenseMatrix) -> DenseMatrix {
    let mut y = x.clone();
    for k in 0..x.cols() {
        let col = x.column(k);
        let s = column_sign(&col);
        y.set_column(k, &col.iter().map(|v| v * s).collect::<Vec<_>>());
    }
    y
}

fn dense_basis(updates: &[RankOneUpdate]) -> DenseMatrix {
    let n = updates[0].n();
    let mut l = path_laplacian(n).unwrap();
    for u in updates {
        l = apply_rank_one(&l, u).unwrap();
    }
    dense_eigh(&l).unwrap().u
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn antisymmetry(mu in prop::collection::vec(0.5f64..1.0, 1..6), lambda in prop::collection::vec(2.0f64..3.0, 1..6)) {
        let c = cauchy_matrix(&mu, &lambda).unwrap();
        let ct = cauchy_matrix(&lambda, &mu).unwrap();
        for i in 0..mu.len() {
            for j in 0..lambda.len() {
                prop_assert_eq!(c[(i, j)], -ct[(j, i)]);
            }
        }
    }

    #[test]
    fn factorized_product_equals_basis_transpose(u in update(64), seed in 0u64..1000) {
        let base = path_spectrum(u.n()).unwrap();
        let f = CauchyFactorization::new(&base, &u).unwrap();
        let x = f.synthesize_basis(&base).unwrap();
        let s: Vec<f64> = (0..u.n()).map(|i| ((i as u64 * 31 + seed) % 17) as f64 - 8.0).collect();
        let via_stages = f.coefficients(&base.u.transpose_mul_vec(&s).unwrap()).unwrap();
        let dense = x.transpose_mul_vec(&s).unwrap();
        let err: Vec<f64> = via_stages.iter().zip(&dense).map(|(a, b)| a - b).collect();
        prop_assert!(norm2(&err) <= 1e-10 * norm2(&s));
    }

    #[test]
    fn eigen_residual(u in update(64)) {
        let n = u.n();
        let base = path_spectrum(n).unwrap();
        let f = CauchyFactorization::new(&base, &u).unwrap();
        let x = f.synthesize_basis(&base).unwrap();
        let l = apply_rank_one(&path_laplacian(n).unwrap(), &u).unwrap();
        let lx = l.matrix().matmul(&x).unwrap();
        let xd = DenseMatrix::from_fn(n, n, |i, k| x[(i, k)] * f.mu()[k]);
        let diff = DenseMatrix::from_fn(n, n, |i, k| lx[(i, k)] - xd[(i, k)]);
        prop_assert!(diff.frobenius_norm() <= 1e-8 * l.matrix().frobenius_norm() * (n as f64).sqrt());
    }

    #[test]
    fn rank_k_matches_dense(updates in (4usize..32).prop_flat_map(|n| prop::collection::vec(
        (prop_oneof![-1.5f64..-0.2, 0.2f64..1.5], prop::collection::vec(-1.0f64..1.0, n)), 1..=3))) {
        let updates: Vec<RankOneUpdate> = updates.into_iter().map(|(r, v)| RankOneUpdate::new(r, v).unwrap()).collect();
        let base = path_spectrum(updates[0].n()).unwrap();
        let chain = compose_rank_k(&base, &updates).unwrap();
        let x = canonical(&chain.synthesize_basis().unwrap());
        prop_assert!(x.max_abs_diff(&dense_basis(&updates)) <= 1e-8);
    }
}

#[test]
fn rank_two_self_loops_at_both_ends() {
    let n = 8;
    let updates = [
        RankOneUpdate::self_loop(n, 0, 1.0).unwrap(),
        RankOneUpdate::self_loop(n, n - 1, 1.0).unwrap(),
    ];
    let chain = compose_rank_k(&path_spectrum(n).unwrap(), &updates).unwrap();
    let x = canonical(&chain.synthesize_basis().unwrap());
    assert!(x.max_abs_diff(&dense_basis(&updates)) <= 1e-8);
}

#[test]
fn cancelling_updates_recover_the_base() {
    let n = 8;
    let u = RankOneUpdate::self_loop(n, 2, 1.3).unwrap();
    let base = path_spectrum(n).unwrap();
    let chain = compose_rank_k(&base, &[u.clone(), u.negated()]).unwrap();
    let s: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).cos()).collect();
    let want = base.u.transpose_mul_vec(&s).unwrap();
    let got = chain.forward(&s).unwrap();
    for (k, (a, b)) in got.iter().zip(&want).enumerate() {
        assert!((a.abs() - b.abs()).abs() <= 1e-8, "coefficient {k}: {a} vs {b}");
    }
}
