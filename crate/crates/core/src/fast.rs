//! Fast DCT+ forward and inverse transforms for a rank-one update of the path.
//!
//! For each secular root `μ ∈ (0, 4)` with `μ = 2 − 2cos θ`, the Cauchy sum
//! over the interior poles collapses to a sine series in `θ`:
//!
//! `Σ_{j≥1} w_j/(μ − λ_j) = −(1/(2 sin nθ)) Σ_k c_k sin(kθ)`,
//! `c = DST-I((−1)^{j+1} w_j / sin(jπ/n))`,
//!
//! which the NFST evaluates at every root at once. The pole `λ_0 = 0` and any
//! root outside `(0, 4)` are handled as explicit rows.

use crate::cauchy::CauchyFactorization;
use crate::error::{check_finite, check_len, Result};
use crate::graph::RankOneUpdate;
use crate::linalg::DenseMatrix;
use crate::nfst::{plan_nfst, NfstPlan, NfstScratch};
use crate::spectral::{path_spectrum, Column, SpectralBasis, DEFAULT_DEFLATION_TOL};
use crate::trig::{DctPlan, DstPlan, TrigScratch};
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Relative distance `|μ − λ| / λ_max` below which the plan uses the dense path.
pub const NEAR_POLE_TOL: f64 = 1e-10;

/// How [`DctPlusPlan::inverse_with`] evaluates the transposed Cauchy product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InverseMethod {
    #[default]
    Fast,
    Nmvp,
}

#[derive(Debug, Clone)]
struct FastRow {
    out: usize,
    /// `−a_r / (2 sin nθ_r)`.
    scale: f64,
    /// `a_r z_0 / μ_r`.
    dc: f64,
}

#[derive(Debug, Clone)]
struct DirectRow {
    out: usize,
    weights: Vec<f64>,
}

/// Precomputed state for the fast transform of one updated path graph.
#[derive(Debug)]
pub struct DctPlusPlan {
    n: usize,
    update: RankOneUpdate,
    epsilon: f64,
    base: SpectralBasis,
    factor: CauchyFactorization,
    dct: DctPlan,
    dst: DstPlan,
    hz: Vec<f64>,
    theta: Vec<f64>,
    fast_rows: Vec<FastRow>,
    direct_rows: Vec<DirectRow>,
    passed: Vec<(usize, usize)>,
    nfst: NfstPlan,
    slow_path: bool,
    dense_xt: OnceLock<DenseMatrix>,
}

/// Per-call buffers for [`DctPlusPlan`].
#[derive(Debug, Default, Clone)]
pub struct DctPlusWorkspace {
    sd: Vec<f64>,
    h: Vec<f64>,
    c: Vec<f64>,
    vals: Vec<f64>,
    trig: TrigScratch,
    nfst: NfstScratch,
}

impl DctPlusWorkspace {
    pub fn new() -> Self {
        Self::default()
    }
}

/// Builds the plan; setup is `O(n²)` from the normalizers.
pub fn plan_dctplus(n: usize, update: &RankOneUpdate, epsilon: f64) -> Result<DctPlusPlan> {
    check_len(n, update.n())?;
    let base = path_spectrum(n)?;
    let factor = CauchyFactorization::with_tolerance(&base, update, DEFAULT_DEFLATION_TOL)?;
    let sp = factor.spectrum();
    let lambda_max = base.lambda[n - 1];

    let hz: Vec<f64> = (1..n)
        .map(|j| {
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            sign * sp.z[j] / (j as f64 * PI / n as f64).sin()
        })
        .collect();

    let mut theta = Vec::new();
    let mut fast_rows = Vec::new();
    let mut direct_rows = Vec::new();
    let mut passed = Vec::new();
    let mut slow_path = false;
    for (out, col) in sp.columns.iter().enumerate() {
        match *col {
            Column::Passed(j) => passed.push((out, j)),
            Column::Root(r) => {
                let mu = sp.roots[r].value;
                let a = sp.a[r];
                if (0..n).any(|j| sp.gap(r, j).abs() < NEAR_POLE_TOL * lambda_max) {
                    slow_path = true;
                }
                if mu > 0.0 && mu < 4.0 {
                    let t = 2.0 * (mu.sqrt() / 2.0).asin();
                    theta.push(t);
                    fast_rows.push(FastRow {
                        out,
                        scale: -0.5 * a / (n as f64 * t).sin(),
                        dc: a * sp.z[0] / mu,
                    });
                } else {
                    let weights = (0..n)
                        .map(|j| if sp.z[j] == 0.0 { 0.0 } else { a * sp.z[j] / sp.gap(r, j) })
                        .collect();
                    direct_rows.push(DirectRow { out, weights });
                }
            }
        }
    }
    let nfst = plan_nfst(&theta, n - 1, epsilon)?;

    Ok(DctPlusPlan {
        n,
        update: update.clone(),
        epsilon,
        dct: DctPlan::new(n)?,
        dst: DstPlan::new(n)?,
        base,
        factor,
        hz,
        theta,
        fast_rows,
        direct_rows,
        passed,
        nfst,
        slow_path,
        dense_xt: OnceLock::new(),
    })
}

impl DctPlusPlan {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn update(&self) -> &RankOneUpdate {
        &self.update
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn factorization(&self) -> &CauchyFactorization {
        &self.factor
    }

    /// Updated eigenvalues in output order.
    pub fn mu(&self) -> &[f64] {
        self.factor.mu()
    }

    /// `cos θ` for the roots evaluated through the NFST.
    pub fn mu_tilde(&self) -> Vec<f64> {
        self.theta.iter().map(|t| t.cos()).collect()
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn nfst_plan(&self) -> &NfstPlan {
        &self.nfst
    }

    /// True when a root sits too close to a pole and the dense path is used.
    pub fn is_slow_path(&self) -> bool {
        self.slow_path
    }

    /// Dense `Xᵀ`, built on first use.
    pub fn dense_transpose(&self) -> &DenseMatrix {
        self.dense_xt.get_or_init(|| {
            self.factor
                .synthesize_basis(&self.base)
                .expect("plan dimensions are consistent")
                .transpose()
        })
    }

    /// Dense eigenbasis `X` (columns in output order).
    pub fn basis(&self) -> DenseMatrix {
        self.dense_transpose().transpose()
    }

    pub fn forward(&self, s: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.n];
        self.forward_into(s, &mut out, &mut DctPlusWorkspace::new())?;
        Ok(out)
    }

    /// `Xᵀ s` in `O(n log n + n log(1/ε))`.
    pub fn forward_into(&self, s: &[f64], out: &mut [f64], ws: &mut DctPlusWorkspace) -> Result<()> {
        let n = self.n;
        check_len(n, s.len())?;
        check_len(n, out.len())?;
        check_finite(s)?;
        if self.slow_path {
            return self.forward_nmvp_into(s, out);
        }
        let DctPlusWorkspace { sd, h, c, vals, trig, nfst } = ws;
        sd.resize(n, 0.0);
        self.dct.dct2_into(s, sd, trig)?;
        self.factor.rotate(sd);
        self.forward_from_coeffs(sd, out, h, c, vals, trig, nfst)
    }

    /// Same as [`DctPlusPlan::forward_into`] but starting from `dct2(s)`.
    pub fn forward_from_dct_into(&self, sd_in: &[f64], out: &mut [f64], ws: &mut DctPlusWorkspace) -> Result<()> {
        let n = self.n;
        check_len(n, sd_in.len())?;
        check_len(n, out.len())?;
        if self.slow_path {
            out.copy_from_slice(&self.factor.coefficients(sd_in)?);
            return Ok(());
        }
        let DctPlusWorkspace { sd, h, c, vals, trig, nfst } = ws;
        sd.clear();
        sd.extend_from_slice(sd_in);
        self.factor.rotate(sd);
        self.forward_from_coeffs(sd, out, h, c, vals, trig, nfst)
    }

    #[allow(clippy::too_many_arguments)]
    fn forward_from_coeffs(
        &self,
        sd: &[f64],
        out: &mut [f64],
        h: &mut Vec<f64>,
        c: &mut Vec<f64>,
        vals: &mut Vec<f64>,
        trig: &mut TrigScratch,
        nfst: &mut NfstScratch,
    ) -> Result<()> {
        let n = self.n;
        for &(o, j) in &self.passed {
            out[o] = sd[j];
        }
        for row in &self.direct_rows {
            out[row.out] = row.weights.iter().zip(sd).map(|(w, x)| w * x).sum();
        }
        if self.fast_rows.is_empty() {
            return Ok(());
        }
        h.clear();
        h.extend(self.hz.iter().zip(&sd[1..]).map(|(w, x)| w * x));
        c.resize(n - 1, 0.0);
        self.dst.dst1_into(h, c, trig)?;
        vals.resize(self.theta.len(), 0.0);
        self.nfst.exec_into(c, vals, nfst)?;
        for (row, v) in self.fast_rows.iter().zip(vals.iter()) {
            out[row.out] = row.scale * v + row.dc * sd[0];
        }
        Ok(())
    }

    /// Dense `Xᵀ s`; the accuracy oracle and naive baseline.
    pub fn forward_nmvp(&self, s: &[f64]) -> Result<Vec<f64>> {
        self.dense_transpose().mul_vec(s)
    }

    pub fn forward_nmvp_into(&self, s: &[f64], out: &mut [f64]) -> Result<()> {
        self.dense_transpose().mul_vec_into(s, out)
    }

    pub fn inverse(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.inverse_with(p, InverseMethod::Fast)
    }

    /// `X p`, the inverse of [`DctPlusPlan::forward`].
    pub fn inverse_with(&self, p: &[f64], method: InverseMethod) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.n];
        self.inverse_into(p, &mut out, method, &mut DctPlusWorkspace::new())?;
        Ok(out)
    }

    pub fn inverse_into(
        &self,
        p: &[f64],
        out: &mut [f64],
        method: InverseMethod,
        ws: &mut DctPlusWorkspace,
    ) -> Result<()> {
        let n = self.n;
        check_len(n, p.len())?;
        check_len(n, out.len())?;
        check_finite(p)?;
        if self.slow_path || method == InverseMethod::Nmvp {
            out.copy_from_slice(&self.dense_transpose().transpose_mul_vec(p)?);
            return Ok(());
        }
        let DctPlusWorkspace { sd, h, c, vals, trig, nfst } = ws;
        sd.clear();
        sd.resize(n, 0.0);
        for &(o, j) in &self.passed {
            sd[j] += p[o];
        }
        for row in &self.direct_rows {
            for (t, w) in sd.iter_mut().zip(&row.weights) {
                *t += p[row.out] * w;
            }
        }
        if !self.fast_rows.is_empty() {
            vals.clear();
            vals.extend(self.fast_rows.iter().map(|row| p[row.out] * row.scale));
            sd[0] += self.fast_rows.iter().map(|row| p[row.out] * row.dc).sum::<f64>();
            c.resize(n - 1, 0.0);
            self.nfst.adjoint_into(vals, c, nfst)?;
            h.resize(n - 1, 0.0);
            self.dst.dst1_into(c, h, trig)?;
            for ((t, w), x) in sd[1..].iter_mut().zip(&self.hz).zip(h.iter()) {
                *t += w * x;
            }
        }
        self.factor.unrotate(sd);
        self.dct.idct2_into(sd, out, trig)
    }
}
