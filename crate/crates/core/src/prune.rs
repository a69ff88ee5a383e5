//! Shared-DCT ensembles of DCT+ transforms with truncated Cauchy stages, and
//! transform selection over the ensemble.
//!
//! Member 0 is the plain DCT. Every other member `r` has a DCT-domain transfer
//! matrix `T_r = X_rᵀU`; pruning keeps only its upper-left `c_p × c_p` block,
//! with error at most `‖s_d[c_p..]‖ + ‖T_hl s_d[..c_p]‖`.

use crate::error::{check_len, Error, Result};
use crate::fast::{plan_dctplus, DctPlusPlan, DctPlusWorkspace};
use crate::graph::{path_quadratic_form, RankOneUpdate};
use crate::linalg::{norm2, DenseMatrix};
use crate::trig::{DctPlan, TrigScratch};

/// Implementation used for a member when the signal is not pruned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DirectMethod {
    #[default]
    Fast,
    Nmvp,
}

#[derive(Debug)]
struct Member {
    plan: DctPlusPlan,
    block: DenseMatrix,
    lower: DenseMatrix,
    direct: DirectMethod,
}

#[derive(Debug)]
pub struct PrunedEnsemblePlan {
    n: usize,
    cp: usize,
    threshold: f64,
    dct: DctPlan,
    members: Vec<Member>,
}

/// Coefficients of every ensemble member for one signal.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleOutput {
    pub coeffs: Vec<Vec<f64>>,
    /// Error bound per member; zero for members computed exactly.
    pub bounds: Vec<f64>,
    pub pruned: bool,
}

impl EnsembleOutput {
    /// Zeroed output for `k` transforms of length `n`.
    pub fn zeros(k: usize, n: usize) -> Self {
        Self {
            coeffs: vec![vec![0.0; n]; k],
            bounds: vec![0.0; k],
            pruned: false,
        }
    }
}

#[derive(Debug, Default, Clone)]
pub struct EnsembleWorkspace {
    sd: Vec<f64>,
    trig: TrigScratch,
    inner: DctPlusWorkspace,
}

impl EnsembleWorkspace {
    pub fn new() -> Self {
        Self::default()
    }
}

/// Plans an ensemble of `updates.len() + 1` transforms.
pub fn plan_pruned(
    n: usize,
    updates: &[RankOneUpdate],
    cp: usize,
    threshold: f64,
    epsilon: f64,
) -> Result<PrunedEnsemblePlan> {
    if cp == 0 || cp > n {
        return Err(Error::OutOfRange(format!("keep count {cp} must lie in 1..={n}")));
    }
    if threshold.is_nan() {
        return Err(Error::OutOfRange("threshold is NaN".into()));
    }
    let members = updates
        .iter()
        .map(|u| {
            let plan = plan_dctplus(n, u, epsilon)?;
            let t = plan.factorization().transfer_matrix();
            let block = DenseMatrix::from_fn(cp, cp, |i, j| t[(i, j)]);
            let lower = DenseMatrix::from_fn(n - cp, cp, |i, j| t[(cp + i, j)]);
            Ok(Member {
                plan,
                block,
                lower,
                direct: DirectMethod::Fast,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PrunedEnsemblePlan {
        n,
        cp,
        threshold,
        dct: DctPlan::new(n)?,
        members,
    })
}

/// Smallest threshold at which a `fraction` of `signals` would be pruned.
pub fn calibrate_threshold(signals: &[Vec<f64>], fraction: f64) -> Result<f64> {
    if signals.is_empty() || !(0.0..=1.0).contains(&fraction) {
        return Err(Error::OutOfRange(
            "calibration needs signals and a fraction in [0, 1]".into(),
        ));
    }
    let mut q: Vec<f64> = signals.iter().map(|s| path_quadratic_form(s)).collect();
    q.sort_by(f64::total_cmp);
    let idx = ((fraction * q.len() as f64).ceil() as usize).clamp(1, q.len()) - 1;
    Ok(q[idx])
}

/// `ℓ₁` norm, the default selection cost.
pub fn l1_cost(p: &[f64]) -> f64 {
    p.iter().map(|x| x.abs()).sum()
}

impl PrunedEnsemblePlan {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cp(&self) -> usize {
        self.cp
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Number of transforms, the plain DCT included.
    pub fn k(&self) -> usize {
        self.members.len() + 1
    }

    /// Plan of member `r ≥ 1`.
    pub fn member_plan(&self, r: usize) -> Option<&DctPlusPlan> {
        r.checked_sub(1).and_then(|i| self.members.get(i)).map(|m| &m.plan)
    }

    pub fn set_direct_method(&mut self, r: usize, method: DirectMethod) -> Result<()> {
        let k = self.k();
        let m = r
            .checked_sub(1)
            .and_then(|i| self.members.get_mut(i))
            .ok_or(Error::IndexOutOfRange { index: r, n: k })?;
        m.direct = method;
        Ok(())
    }

    pub fn direct_method(&self, r: usize) -> Option<DirectMethod> {
        r.checked_sub(1).and_then(|i| self.members.get(i)).map(|m| m.direct)
    }

    /// Whether `s` takes the truncated path.
    pub fn should_prune(&self, s: &[f64]) -> bool {
        path_quadratic_form(s) <= self.threshold
    }

    /// All `k` transforms of `s`, pruned when `s` is smooth enough.
    pub fn forward_all(&self, s: &[f64]) -> Result<EnsembleOutput> {
        let mut out = EnsembleOutput::zeros(self.k(), self.n);
        self.forward_all_into(s, &mut out, true, &mut EnsembleWorkspace::new())?;
        Ok(out)
    }

    /// Writes every member's coefficients into `out`. Bounds are only
    /// evaluated when `with_bounds` is set.
    pub fn forward_all_into(
        &self,
        s: &[f64],
        out: &mut EnsembleOutput,
        with_bounds: bool,
        ws: &mut EnsembleWorkspace,
    ) -> Result<()> {
        let n = self.n;
        let cp = self.cp;
        check_len(n, s.len())?;
        check_len(self.k(), out.coeffs.len())?;
        out.bounds.resize(self.k(), 0.0);
        ws.sd.resize(n, 0.0);
        self.dct.dct2_into(s, &mut ws.sd, &mut ws.trig)?;
        out.coeffs[0].copy_from_slice(&ws.sd);
        out.bounds[0] = 0.0;
        out.pruned = self.should_prune(s);

        let tail = if out.pruned && with_bounds { norm2(&ws.sd[cp..]) } else { 0.0 };
        for (m, (p, bound)) in self
            .members
            .iter()
            .zip(out.coeffs[1..].iter_mut().zip(&mut out.bounds[1..]))
        {
            check_len(n, p.len())?;
            if out.pruned {
                let head = &ws.sd[..cp];
                for (i, pi) in p[..cp].iter_mut().enumerate() {
                    *pi = m.block.row(i).iter().zip(head).map(|(a, b)| a * b).sum();
                }
                p[cp..].fill(0.0);
                *bound = if with_bounds {
                    tail + norm2(&m.lower.mul_vec(head)?)
                } else {
                    0.0
                };
            } else {
                match m.direct {
                    DirectMethod::Fast => m.plan.forward_from_dct_into(&ws.sd, p, &mut ws.inner)?,
                    DirectMethod::Nmvp => m.plan.forward_nmvp_into(s, p)?,
                }
                *bound = 0.0;
            }
        }
        Ok(())
    }

    /// Every transform computed separately by its direct method, as a
    /// baseline for the shared pipeline.
    pub fn forward_all_direct_into(&self, s: &[f64], out: &mut EnsembleOutput, ws: &mut EnsembleWorkspace) -> Result<()> {
        check_len(self.n, s.len())?;
        check_len(self.k(), out.coeffs.len())?;
        self.dct.dct2_into(s, &mut out.coeffs[0], &mut ws.trig)?;
        for (m, p) in self.members.iter().zip(out.coeffs[1..].iter_mut()) {
            match m.direct {
                DirectMethod::Fast => m.plan.forward_into(s, p, &mut ws.inner)?,
                DirectMethod::Nmvp => m.plan.forward_nmvp_into(s, p)?,
            }
        }
        out.bounds.fill(0.0);
        out.pruned = false;
        Ok(())
    }

    /// All `k` transforms computed exactly, each with its direct method.
    pub fn forward_all_direct(&self, s: &[f64]) -> Result<Vec<Vec<f64>>> {
        let mut out = vec![self.dct.dct2(s)?];
        for m in &self.members {
            out.push(match m.direct {
                DirectMethod::Fast => m.plan.forward(s)?,
                DirectMethod::Nmvp => m.plan.forward_nmvp(s)?,
            });
        }
        Ok(out)
    }
}

/// Convenience wrapper for [`PrunedEnsemblePlan::forward_all`].
pub fn pruned_forward_all(plan: &PrunedEnsemblePlan, s: &[f64]) -> Result<EnsembleOutput> {
    plan.forward_all(s)
}

/// Index minimizing `cost` over the ensemble (ties go to the lower index),
/// with that member's coefficients.
pub fn rdo_select<F>(plan: &PrunedEnsemblePlan, s: &[f64], cost: F) -> Result<(usize, Vec<f64>)>
where
    F: Fn(&[f64]) -> f64,
{
    let out = plan.forward_all(s)?;
    let idx = select_index(&out, plan.cp(), &cost);
    Ok((idx, out.coeffs.into_iter().nth(idx).expect("index from ensemble")))
}

/// Member minimizing `cost`. On the pruned path every member is scored on
/// its first `cp` coefficients, so zeroed tails do not bias the choice.
pub fn select_index<F: Fn(&[f64]) -> f64>(out: &EnsembleOutput, cp: usize, cost: F) -> usize {
    let support = if out.pruned { cp } else { usize::MAX };
    let mut best = 0;
    let mut best_cost = f64::INFINITY;
    for (i, p) in out.coeffs.iter().enumerate() {
        let c = cost(&p[..support.min(p.len())]);
        if c < best_cost {
            best = i;
            best_cost = c;
        }
    }
    best
}

/// Selection over exactly computed coefficients, for comparison with
/// [`rdo_select`].
pub fn rdo_select_direct<F>(plan: &PrunedEnsemblePlan, s: &[f64], cost: F) -> Result<(usize, Vec<f64>)>
where
    F: Fn(&[f64]) -> f64,
{
    let out = EnsembleOutput {
        bounds: vec![0.0; plan.k()],
        coeffs: plan.forward_all_direct(s)?,
        pruned: false,
    };
    let idx = select_index(&out, plan.n(), &cost);
    Ok((idx, out.coeffs.into_iter().nth(idx).expect("index from ensemble")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn updates(n: usize) -> Vec<RankOneUpdate> {
        vec![
            RankOneUpdate::self_loop(n, 0, 1.5).unwrap(),
            RankOneUpdate::edge(n, 1, 2, 1.5).unwrap(),
        ]
    }

    fn wiggly(n: usize) -> Vec<f64> {
        (0..n).map(|i| ((i * 5 + 1) % 7) as f64 - 3.0).collect()
    }

    fn dist(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
    }

    #[test]
    fn rejects_bad_keep_count() {
        assert!(plan_pruned(8, &updates(8), 0, 1.0, 1e-12).is_err());
        assert!(plan_pruned(8, &updates(8), 9, 1.0, 1e-12).is_err());
    }

    #[test]
    fn full_keep_count_is_exact() {
        let n = 16;
        let plan = plan_pruned(n, &updates(n), n, f64::INFINITY, 1e-12).unwrap();
        let s = wiggly(n);
        let out = plan.forward_all(&s).unwrap();
        assert!(out.pruned);
        let direct = plan.forward_all_direct(&s).unwrap();
        for (p, q) in out.coeffs.iter().zip(&direct) {
            assert!(dist(p, q) < 1e-10);
        }
        assert!(out.bounds.iter().all(|b| b.abs() < 1e-12));
    }

    #[test]
    fn only_dct_member() {
        let plan = plan_pruned(8, &[], 4, 1.0, 1e-12).unwrap();
        assert_eq!(plan.k(), 1);
        let s = wiggly(8);
        assert_eq!(plan.forward_all(&s).unwrap().coeffs[0], crate::trig::dct2(&s).unwrap());
    }

    #[test]
    fn constant_signal_error_meets_its_bound() {
        let n = 16;
        let plan = plan_pruned(n, &updates(n), 4, 0.0, 1e-12).unwrap();
        let s = vec![1.5; n];
        let out = plan.forward_all(&s).unwrap();
        assert!(out.pruned);
        let direct = plan.forward_all_direct(&s).unwrap();
        for (r, (p, q)) in out.coeffs.iter().zip(&direct).enumerate() {
            // Only the lower-left term of the bound survives, and it is tight.
            let err = dist(p, q);
            assert!(err <= out.bounds[r] + 1e-12);
            assert!((err - out.bounds[r]).abs() < 1e-12);
        }
        assert_eq!(rdo_select(&plan, &s, l1_cost).unwrap().0, 0);
    }

    #[test]
    fn rough_signal_falls_back() {
        let n = 16;
        let mut plan = plan_pruned(n, &updates(n), 4, 1.0, 1e-12).unwrap();
        plan.set_direct_method(2, DirectMethod::Nmvp).unwrap();
        assert!(plan.set_direct_method(0, DirectMethod::Nmvp).is_err());
        let s = wiggly(n);
        let out = plan.forward_all(&s).unwrap();
        assert!(!out.pruned);
        let direct = plan.forward_all_direct(&s).unwrap();
        for (p, q) in out.coeffs.iter().zip(&direct) {
            assert!(dist(p, q) < 1e-10);
        }
    }

    #[test]
    fn bound_holds_at_half_keep() {
        let n = 32;
        let plan = plan_pruned(n, &updates(n), n / 2, f64::INFINITY, 1e-12).unwrap();
        for t in 0..20 {
            let s: Vec<f64> = (0..n)
                .map(|i| ((i as f64 + t as f64) * 0.2).sin() * (1.0 + t as f64 * 0.1))
                .collect();
            let out = plan.forward_all(&s).unwrap();
            let direct = plan.forward_all_direct(&s).unwrap();
            for r in 1..plan.k() {
                assert!(dist(&out.coeffs[r], &direct[r]) <= out.bounds[r] + 1e-12);
            }
        }
    }

    #[test]
    fn selects_member_with_sparse_representation() {
        let n = 16;
        let plan = plan_pruned(n, &updates(n), 8, -1.0, 1e-12).unwrap();
        for r in 1..plan.k() {
            let x = plan.member_plan(r).unwrap().basis();
            let s = x.column(1);
            assert_eq!(rdo_select(&plan, &s, l1_cost).unwrap().0, r);
            assert_eq!(rdo_select_direct(&plan, &s, l1_cost).unwrap().0, r);
        }
    }

    #[test]
    fn threshold_calibration() {
        let signals: Vec<Vec<f64>> = (0..10).map(|k| vec![0.0, k as f64]).collect();
        assert_eq!(calibrate_threshold(&signals, 0.7).unwrap(), 36.0);
        assert_eq!(calibrate_threshold(&signals, 1.0).unwrap(), 81.0);
        assert!(calibrate_threshold(&[], 0.5).is_err());
    }
}
