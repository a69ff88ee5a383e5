use dctplus::nfst::{nfst_adjoint, nfst_direct, nfst_exec, plan_nfst, NfstScratch};
use proptest::prelude::*;
use std::f64::consts::PI;
use std::time::Instant;

fn l1(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

fn case() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1usize..200, 1usize..60).prop_flat_map(|(m, t)| {
        (
            prop::collection::vec(-1.0f64..1.0, m),
            prop::collection::vec(1e-6f64..(PI - 1e-6), t),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn error_contract((c, theta) in case(), digits in prop::sample::select(vec![6, 9, 12])) {
        let eps = 10f64.powi(-digits);
        let plan = plan_nfst(&theta, c.len(), eps).unwrap();
        let fast = nfst_exec(&plan, &c).unwrap();
        let exact = nfst_direct(&theta, &c);
        let bound = eps * l1(&c);
        for (f, e) in fast.iter().zip(&exact) {
            prop_assert!((f - e).abs() <= bound);
        }
    }

    #[test]
    fn linearity((c, theta) in case(), alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
        let eps = 1e-9;
        let c2: Vec<f64> = c.iter().rev().copied().collect();
        let plan = plan_nfst(&theta, c.len(), eps).unwrap();
        let mix: Vec<f64> = c.iter().zip(&c2).map(|(a, b)| alpha * a + beta * b).collect();
        let lhs = nfst_exec(&plan, &mix).unwrap();
        let e1 = nfst_exec(&plan, &c).unwrap();
        let e2 = nfst_exec(&plan, &c2).unwrap();
        let tol = 2.0 * eps * (alpha.abs() * l1(&c) + beta.abs() * l1(&c2));
        for ((l, a), b) in lhs.iter().zip(&e1).zip(&e2) {
            prop_assert!((l - (alpha * a + beta * b)).abs() <= tol);
        }
    }

    #[test]
    fn adjoint_identity((c, theta) in case()) {
        let eps = 1e-12;
        let v: Vec<f64> = theta.iter().map(|t| (3.0 * t).cos()).collect();
        let plan = plan_nfst(&theta, c.len(), eps).unwrap();
        let fc = nfst_exec(&plan, &c).unwrap();
        let av = nfst_adjoint(&plan, &v).unwrap();
        let lhs: f64 = fc.iter().zip(&v).map(|(a, b)| a * b).sum();
        let rhs: f64 = c.iter().zip(&av).map(|(a, b)| a * b).sum();
        prop_assert!((lhs - rhs).abs() <= eps * l1(&c) * l1(&v));
    }
}

fn best_time(plan: &dctplus::nfst::NfstPlan, c: &[f64]) -> f64 {
    let mut out = vec![0.0; plan.theta().len()];
    let mut scratch = NfstScratch::new();
    let mut best = f64::INFINITY;
    for _ in 0..15 {
        let start = Instant::now();
        for _ in 0..20 {
            plan.exec_into(c, &mut out, &mut scratch).unwrap();
            std::hint::black_box(&out);
        }
        best = best.min(start.elapsed().as_secs_f64());
    }
    best
}

#[test]
fn runtime_grows_near_linearly_in_m() {
    let theta: Vec<f64> = (0..512).map(|i| (i as f64 + 0.5) * PI / 512.0).collect();
    let small = plan_nfst(&theta, 1024, 1e-12).unwrap();
    let large = plan_nfst(&theta, 2048, 1e-12).unwrap();
    let t1 = best_time(&small, &vec![0.5; 1024]);
    let t2 = best_time(&large, &vec![0.5; 2048]);
    assert!(t2 / t1 <= 2.6, "doubling m scaled runtime by {}", t2 / t1);
}
