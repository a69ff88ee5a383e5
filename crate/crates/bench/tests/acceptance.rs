//! Acceptance gate. Runs every criterion in sequence, prints one line each and
//! exits non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use dctplus::cauchy::compose_rank_k;
use dctplus::graph::{apply_rank_one, path_laplacian, RankOneUpdate};
use dctplus::linalg::{norm2, DenseMatrix};
use dctplus::nfst::{nfst_direct, nfst_exec, plan_nfst};
use dctplus::prune::{plan_pruned, EnsembleOutput, EnsembleWorkspace};
use dctplus::spectral::{column_sign, dense_eigh, path_spectrum, PerturbedSpectrum, DEFAULT_DEFLATION_TOL};
use dctplus::trig::dct2;
use dctplus_bench::config::default_updates;
use dctplus_bench::experiments::{crossover, run_accuracy, run_prune, run_runtime, AccuracyCell};
use dctplus_bench::signal::ArSignalSource;
use dctplus_bench::{BenchConfig, Mode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn random_update(rng: &mut ChaCha8Rng, n: usize) -> RankOneUpdate {
    let rho = if rng.random_bool(0.5) {
        -rng.random_range(0.05..2.0)
    } else {
        rng.random_range(0.05..3.0)
    };
    match rng.random_range(0..3) {
        0 => RankOneUpdate::self_loop(n, rng.random_range(0..n), rho).unwrap(),
        1 => {
            let i = rng.random_range(0..n);
            let j = (i + rng.random_range(1..n)) % n;
            // Negative edge deltas must stay above −1 on existing edges.
            let w = if i.abs_diff(j) == 1 { rho.max(-0.9) } else { rho };
            RankOneUpdate::edge(n, i, j, w).unwrap()
        }
        _ => loop {
            let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            if let Ok(u) = RankOneUpdate::new(rho, v) {
                break u;
            }
        },
    }
}

fn perturbed(u: &RankOneUpdate) -> PerturbedSpectrum {
    let lambda = path_spectrum(u.n()).unwrap().lambda;
    PerturbedSpectrum::new(&lambda, &dct2(u.v()).unwrap(), u.rho(), DEFAULT_DEFLATION_TOL).unwrap()
}

fn canonical(x: &DenseMatrix) -> DenseMatrix {
    let mut y = x.clone();
    for k in 0..x.cols() {
        let col = x.column(k);
        let s = column_sign(&col);
        y.set_column(k, &col.iter().map(|v| v * s).collect::<Vec<_>>());
    }
    y
}

fn accuracy(cells: &[AccuracyCell], secs: f64) -> Outcome {
    let worst = cells.iter().map(|c| c.mean_snr_db).fold(f64::INFINITY, f64::min);
    outcome(
        worst >= 100.0 && secs < 120.0 && cells.len() == 18,
        format!("min cell mean SNR {worst:.1} dB over {} cells in {secs:.1} s", cells.len()),
    )
}

fn round_trip(cells: &[AccuracyCell]) -> Outcome {
    let worst = cells.iter().map(|c| c.min_roundtrip_db).fold(f64::INFINITY, f64::min);
    outcome(worst >= 100.0, format!("min round-trip SNR {worst:.1} dB"))
}

fn orthonormality(cells: &[AccuracyCell]) -> Outcome {
    let orth = cells.iter().map(|c| c.orthonormality).fold(0.0, f64::max);
    let pars = cells.iter().map(|c| c.parseval_dev).fold(0.0, f64::max);
    outcome(
        orth <= 1e-9 && pars <= 1e-5,
        format!("max |XtX - I| {orth:.2e}, max Parseval deviation {pars:.2e}"),
    )
}

fn interleaving(rng: &mut ChaCha8Rng) -> Outcome {
    let mut violations = 0;
    let mut negative = 0;
    for _ in 0..500 {
        let n = rng.random_range(4..=64);
        let u = random_update(rng, n);
        negative += usize::from(u.rho() < 0.0);
        let sp = perturbed(&u);
        let kept = &sp.deflation.kept;
        let mut order: Vec<usize> = (0..sp.roots.len()).collect();
        order.sort_by(|&a, &b| sp.roots[a].value.total_cmp(&sp.roots[b].value));
        for (i, &r) in order.iter().enumerate() {
            let (lo, hi) = if u.rho() > 0.0 {
                (Some(kept[i]), kept.get(i + 1).copied())
            } else {
                (i.checked_sub(1).map(|p| kept[p]), Some(kept[i]))
            };
            let bad_lo = lo.is_some_and(|j| sp.gap(r, j) <= 0.0);
            let bad_hi = hi.is_some_and(|j| sp.gap(r, j) >= 0.0);
            violations += usize::from(bad_lo || bad_hi);
        }
    }
    outcome(
        violations == 0 && negative > 0,
        format!("{violations} violations over 500 updates ({negative} with negative weight)"),
    )
}

fn oracle_equivalence(rng: &mut ChaCha8Rng) -> Outcome {
    let mut eig_err: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.random_range(4..=64);
        let u = random_update(rng, n);
        let mut mu = perturbed(&u).mu;
        mu.sort_by(f64::total_cmp);
        let l = apply_rank_one(&path_laplacian(n).unwrap(), &u).unwrap();
        let dense = dense_eigh(&l).unwrap().lambda;
        for (a, b) in mu.iter().zip(&dense) {
            eig_err = eig_err.max((a - b).abs());
        }
    }
    let mut coeff_err: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(4..=32);
        let k = rng.random_range(1..=3);
        let updates: Vec<RankOneUpdate> = (0..k).map(|_| random_update(rng, n)).collect();
        let chain = match compose_rank_k(&path_spectrum(n).unwrap(), &updates) {
            Ok(c) => c,
            Err(e) => return outcome(false, format!("rank-{k} composition failed: {e}")),
        };
        let mut l = path_laplacian(n).unwrap();
        for u in &updates {
            l = apply_rank_one(&l, u).unwrap();
        }
        let x = canonical(&chain.synthesize_basis().unwrap());
        let dense = dense_eigh(&l).unwrap().u;
        let s: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let p = x.transpose_mul_vec(&s).unwrap();
        let q = dense.transpose_mul_vec(&s).unwrap();
        coeff_err = coeff_err.max(x.max_abs_diff(&dense));
        coeff_err = coeff_err.max(p.iter().zip(&q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
    }
    outcome(
        eig_err <= 1e-9 && coeff_err <= 1e-8,
        format!("eigenvalue error {eig_err:.2e}, rank-k coefficient error {coeff_err:.2e}"),
    )
}

fn nfst_contract(rng: &mut ChaCha8Rng) -> Outcome {
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for eps in [1e-6, 1e-9, 1e-12] {
        for _ in 0..1000 {
            let m = rng.random_range(1..=255);
            let t = rng.random_range(1..=64);
            let c: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
            let theta: Vec<f64> = (0..t)
                .map(|_| rng.random_range(1e-9..std::f64::consts::PI - 1e-9))
                .collect();
            let plan = plan_nfst(&theta, m, eps).unwrap();
            let fast = nfst_exec(&plan, &c).unwrap();
            let exact = nfst_direct(&theta, &c);
            let l1: f64 = c.iter().map(|v| v.abs()).sum();
            let err = fast.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            worst = worst.max(err / (eps * l1));
            violations += usize::from(err > eps * l1);
        }
    }
    outcome(
        violations == 0,
        format!("{violations} violations over 3000 cases, worst error {worst:.3} of the budget"),
    )
}

fn pruning_bound() -> Outcome {
    let n = 32;
    let updates: Vec<RankOneUpdate> = default_updates()[..2].iter().map(|k| k.to_update(n).unwrap()).collect();
    let signals = ArSignalSource::new(0.99, 7).unwrap().batch(n, 1000);
    let mut checked = 0;
    let mut violations = 0;
    let mut tightest: f64 = 0.0;
    for cp in [8, 16, 24] {
        let plan = plan_pruned(n, &updates, cp, f64::INFINITY, 1e-12).unwrap();
        let mut ws = EnsembleWorkspace::new();
        let mut out = EnsembleOutput::zeros(plan.k(), n);
        let mut exact = EnsembleOutput::zeros(plan.k(), n);
        for s in &signals {
            plan.forward_all_into(s, &mut out, true, &mut ws).unwrap();
            plan.forward_all_direct_into(s, &mut exact, &mut ws).unwrap();
            for r in 1..plan.k() {
                let d: Vec<f64> = out.coeffs[r].iter().zip(&exact.coeffs[r]).map(|(a, b)| a - b).collect();
                let err = norm2(&d);
                checked += 1;
                violations += usize::from(err > out.bounds[r] * (1.0 + 1e-9) + 1e-12);
                if out.bounds[r] > 0.0 {
                    tightest = tightest.max(err / out.bounds[r]);
                }
            }
        }
    }
    outcome(
        violations == 0,
        format!("{violations} violations over {checked} member transforms, max error/bound {tightest:.3}"),
    )
}

fn scaling() -> Outcome {
    let cfg = BenchConfig::new(Mode::Runtime);
    let cells = run_runtime(&cfg).unwrap();
    let (n_min, n_max) = (cfg.sizes[0], *cfg.sizes.last().unwrap());
    let log_growth = (n_max as f64).log2() / (n_min as f64).log2();
    let quad_growth = (n_max as f64 / n_min as f64) / log_growth;
    let mut pass = true;
    let mut parts = Vec::new();
    for u in &cfg.updates {
        let row: Vec<_> = cells.iter().filter(|c| c.update == *u).collect();
        let lo = row.iter().map(|c| c.fast_ratio()).fold(f64::INFINITY, f64::min);
        let hi = row.iter().map(|c| c.fast_ratio()).fold(0.0, f64::max);
        let first = row.iter().find(|c| c.n == n_min).unwrap();
        let last = row.iter().find(|c| c.n == n_max).unwrap();
        let fast_growth = last.fast_ratio() / first.fast_ratio();
        let nmvp_growth = last.nmvp_ratio() / first.nmvp_ratio();
        let cross = crossover(&cells, u);
        pass &= lo >= 4.0
            && hi <= 16.0
            && fast_growth <= log_growth
            && nmvp_growth >= quad_growth
            && cross.is_some_and(|c| c <= 256);
        parts.push(format!(
            "fast/dct {lo:.1}..{hi:.1} (growth {fast_growth:.2}), nmvp growth {nmvp_growth:.1}, crossover {}",
            cross.map_or("none".into(), |c| c.to_string())
        ));
    }
    outcome(pass, parts.join("; "))
}

fn pruning_speedup() -> Outcome {
    let cfg = BenchConfig::new(Mode::Prune);
    let cells = run_prune(&cfg).unwrap();
    let best = cells.iter().filter(|c| c.speedup() >= 1.2 && c.psnr_db >= 40.0).max_by(|a, b| a.speedup().total_cmp(&b.speedup()));
    let summary: Vec<String> = cells
        .iter()
        .map(|c| format!("cp={} {:.2}x/{:.1}dB", c.cp, c.speedup(), c.psnr_db))
        .collect();
    outcome(best.is_some(), summary.join(", "))
}

fn main() -> ExitCode {
    let mut rng = ChaCha8Rng::seed_from_u64(20240611);
    let start = Instant::now();
    let cells = run_accuracy(&BenchConfig::new(Mode::Accuracy)).unwrap();
    let secs = start.elapsed().as_secs_f64();

    let results: Vec<(&str, Outcome)> = vec![
        ("accuracy", accuracy(&cells, secs)),
        ("round trip", round_trip(&cells)),
        ("orthonormality and Parseval", orthonormality(&cells)),
        ("strict interleaving", interleaving(&mut rng)),
        ("oracle equivalence", oracle_equivalence(&mut rng)),
        ("NFST error contract", nfst_contract(&mut rng)),
        ("pruning error bound", pruning_bound()),
        ("runtime scaling", scaling()),
        ("pruning speedup", pruning_speedup()),
    ];
    let mut failed = 0;
    for (i, (name, o)) in results.iter().enumerate() {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {}: {name}: {}", i + 1, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
