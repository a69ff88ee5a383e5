use dctplus::graph::{apply_rank_one, path_laplacian, RankOneUpdate};
use dctplus::spectral::{dense_eigh, path_spectrum, Column, PerturbedSpectrum, DEFAULT_DEFLATION_TOL};
use dctplus::trig::dct2;
use proptest::prelude::*;

fn update() -> impl Strategy<Value = RankOneUpdate> {
    (4usize..64).prop_flat_map(|n| {
        (
            prop_oneof![-3.0f64..-0.05, 0.05f64..3.0],
            prop::collection::vec(-1.0f64..1.0, n),
        )
            .prop_filter_map("nonzero v", |(rho, v)| RankOneUpdate::new(rho, v).ok())
    })
}

fn spectrum(u: &RankOneUpdate) -> PerturbedSpectrum {
    let lambda = path_spectrum(u.n()).unwrap().lambda;
    PerturbedSpectrum::new(&lambda, &dct2(u.v()).unwrap(), u.rho(), DEFAULT_DEFLATION_TOL).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn roots_interlace_their_poles(u in update()) {
        let sp = spectrum(&u);
        let kept = &sp.deflation.kept;
        let mut roots: Vec<usize> = (0..sp.roots.len()).collect();
        roots.sort_by(|&a, &b| sp.roots[a].value.total_cmp(&sp.roots[b].value));
        prop_assert_eq!(roots.len(), kept.len());
        for (i, &r) in roots.iter().enumerate() {
            // ρ > 0: λ_(i) < μ_(i) < λ_(i+1); ρ < 0: λ_(i−1) < μ_(i) < λ_(i).
            let (lo, hi) = if u.rho() > 0.0 {
                (Some(kept[i]), kept.get(i + 1).copied())
            } else {
                (i.checked_sub(1).map(|p| kept[p]), Some(kept[i]))
            };
            if let Some(j) = lo {
                prop_assert!(sp.gap(r, j) > 0.0);
            }
            if let Some(j) = hi {
                prop_assert!(sp.gap(r, j) < 0.0);
            }
        }
    }

    #[test]
    fn trace_identity(u in update()) {
        let sp = spectrum(&u);
        let v2: f64 = u.v().iter().map(|x| x * x).sum();
        let lhs: f64 = sp.mu.iter().sum();
        let rhs: f64 = sp.lambda.iter().sum::<f64>() + u.rho() * v2;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (4.0 + u.rho().abs() * v2) * u.n() as f64);
    }

    #[test]
    fn eigenvalues_match_dense_solver(u in update()) {
        let sp = spectrum(&u);
        let l = apply_rank_one(&path_laplacian(u.n()).unwrap(), &u).unwrap();
        let dense = dense_eigh(&l).unwrap();
        for (a, b) in sp.mu.iter().zip(&dense.lambda) {
            prop_assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
        }
        prop_assert_eq!(sp.columns.iter().filter(|c| matches!(c, Column::Root(_))).count(), sp.roots.len());
    }
}

#[test]
fn path_basis_is_orthonormal() {
    for n in [2, 3, 8, 31, 64, 256] {
        let b = path_spectrum(n).unwrap();
        assert!(b.u.orthonormality_error() <= 1e-12 * n as f64);
    }
}
