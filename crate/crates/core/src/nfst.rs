//! Nonuniform fast sine transform.
//!
//! `S(θ) = Σ_{k=1}^{m} c_k sin(kθ)` is the odd part of a complex Fourier
//! series, so the usual Gaussian-gridding NUFFT applies with every stage kept
//! real: deconvolve the coefficients by the kernel's Fourier transform, take a
//! DST-I onto an oversampled uniform grid on `[0, π]`, then interpolate each
//! target from the `2w` nearest grid points of the odd periodic extension.
//! The grid carries `w` ghost cells on each side holding that extension, so
//! every target reads one contiguous window.

use crate::error::{check_len, Error, Result};
use crate::trig::{DstPlan, TrigScratch};
use std::f64::consts::PI;

/// Oversampling factor of the uniform grid.
pub const OVERSAMPLING: f64 = 2.0;

/// Half-width multiplier: `w = ceil(α · log10(1/ε))`.
pub const WIDTH_PER_DIGIT: f64 = 1.2;

const MIN_HALF_WIDTH: usize = 2;

#[derive(Debug, Clone)]
pub struct NfstPlan {
    m: usize,
    theta: Vec<f64>,
    epsilon: f64,
    half_width: usize,
    /// Grid has `L + 1` points `πj/L`, `j = 0..=L`.
    grid_len: usize,
    tau: f64,
    deconv: Vec<f64>,
    /// First padded-grid cell of each target's window.
    start: Vec<usize>,
    weight: Vec<f64>,
    dst: Option<DstPlan>,
}

/// Per-call buffers for [`NfstPlan`] execution.
#[derive(Debug, Default, Clone)]
pub struct NfstScratch {
    coeffs: Vec<f64>,
    grid: Vec<f64>,
    trig: TrigScratch,
}

impl NfstScratch {
    pub fn new() -> Self {
        Self::default()
    }
}

/// Smallest integer `≥ n` with no prime factors above 5.
fn next_smooth(n: usize) -> usize {
    let mut k = n.max(1);
    loop {
        let mut r = k;
        for p in [2, 3, 5] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return k;
        }
        k += 1;
    }
}

/// Kernel half-width (in grid points) used for precision `epsilon`.
pub fn half_width_for(epsilon: f64) -> usize {
    ((WIDTH_PER_DIGIT * (1.0 / epsilon).log10()).ceil() as usize).max(MIN_HALF_WIDTH)
}

/// Plans evaluation of `m`-term sine series at `theta`.
pub fn plan_nfst(theta: &[f64], m: usize, epsilon: f64) -> Result<NfstPlan> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::OutOfRange(format!("precision must lie in (0, 1), got {epsilon}")));
    }
    if let Some(t) = theta.iter().find(|t| !(**t > 0.0 && **t < PI)) {
        return Err(Error::OutOfRange(format!("angle {t} not inside (0, pi)")));
    }
    let w = half_width_for(epsilon);
    let grid_len = next_smooth(((OVERSAMPLING * (m + 1) as f64).ceil() as usize).max(m + 1).max(2));
    let modes = (2 * m + 1) as f64;
    let ratio = 2.0 * grid_len as f64 / modes;
    let tau = PI * w as f64 / (modes * modes * ratio * (ratio - 0.5));

    // 1/(2L·G_k) with G_k = sqrt(τ/π)·exp(−k²τ).
    let scale = (PI / tau).sqrt() / (2 * grid_len) as f64;
    let deconv = (1..=m).map(|k| scale * ((k * k) as f64 * tau).exp()).collect();

    let h = PI / grid_len as f64;
    let mut start = Vec::with_capacity(theta.len());
    let mut weight = Vec::with_capacity(2 * w * theta.len());
    for &x in theta {
        // x < π keeps the window inside the padded grid.
        let j0 = ((x / h).floor() as usize).min(grid_len - 1);
        start.push(j0 + 1);
        for j in (j0 as i64 - w as i64 + 1)..=(j0 as i64 + w as i64) {
            let d = x - j as f64 * h;
            weight.push((-d * d / (4.0 * tau)).exp());
        }
    }

    Ok(NfstPlan {
        m,
        theta: theta.to_vec(),
        epsilon,
        half_width: w,
        grid_len,
        tau,
        deconv,
        start,
        weight,
        dst: if m > 0 { Some(DstPlan::new(grid_len)?) } else { None },
    })
}

impl NfstPlan {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn oversampling(&self) -> f64 {
        OVERSAMPLING
    }

    /// Number of intervals `L` of the uniform grid on `[0, π]`.
    pub fn grid_len(&self) -> usize {
        self.grid_len
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Grid cell and sign that padded position `p` mirrors.
    fn fold(&self, p: usize) -> (usize, f64) {
        let l = self.grid_len as i64;
        let j = (p as i64 - self.half_width as i64).rem_euclid(2 * l);
        if j <= l {
            (j as usize, 1.0)
        } else {
            ((2 * l - j) as usize, -1.0)
        }
    }

    /// Values `Σ_k c_k sin(kθ_i)` written to `out`.
    pub fn exec_into(&self, c: &[f64], out: &mut [f64], scratch: &mut NfstScratch) -> Result<()> {
        check_len(self.m, c.len())?;
        check_len(self.theta.len(), out.len())?;
        let Some(dst) = &self.dst else {
            out.fill(0.0);
            return Ok(());
        };
        let l = self.grid_len;
        let w = self.half_width;
        let NfstScratch { coeffs, grid, trig } = scratch;
        coeffs.clear();
        coeffs.extend(c.iter().zip(&self.deconv).map(|(c, d)| c * d));
        coeffs.resize(l - 1, 0.0);
        grid.resize(l + 1 + 2 * w, 0.0);
        dst.scaled_into(coeffs, &mut grid[w + 1..w + l], 1.0, trig)?;
        grid[w] = 0.0;
        grid[w + l] = 0.0;
        for p in (0..w).chain(w + l + 1..l + 1 + 2 * w) {
            let (j, sign) = self.fold(p);
            grid[p] = sign * grid[w + j];
        }

        let taps = 2 * w;
        for ((o, &s), wts) in out.iter_mut().zip(&self.start).zip(self.weight.chunks_exact(taps)) {
            *o = grid[s..s + taps].iter().zip(wts).map(|(g, w)| g * w).sum();
        }
        Ok(())
    }

    /// Transpose map `b_k = Σ_i v_i sin(kθ_i)` written to `out`.
    pub fn adjoint_into(&self, v: &[f64], out: &mut [f64], scratch: &mut NfstScratch) -> Result<()> {
        check_len(self.theta.len(), v.len())?;
        check_len(self.m, out.len())?;
        let Some(dst) = &self.dst else {
            return Ok(());
        };
        let l = self.grid_len;
        let w = self.half_width;
        let taps = 2 * w;
        let NfstScratch { coeffs, grid, trig } = scratch;
        grid.clear();
        grid.resize(l + 1 + 2 * w, 0.0);
        for ((&vi, &s), wts) in v.iter().zip(&self.start).zip(self.weight.chunks_exact(taps)) {
            for (g, wt) in grid[s..s + taps].iter_mut().zip(wts) {
                *g += wt * vi;
            }
        }
        for p in (0..w).chain(w + l + 1..l + 1 + 2 * w) {
            let (j, sign) = self.fold(p);
            let ghost = grid[p];
            grid[w + j] += sign * ghost;
        }
        coeffs.resize(l - 1, 0.0);
        dst.scaled_into(&grid[w + 1..w + l], coeffs, 1.0, trig)?;
        for ((o, b), d) in out.iter_mut().zip(coeffs.iter()).zip(&self.deconv) {
            *o = b * d;
        }
        Ok(())
    }
}

pub fn nfst_exec(plan: &NfstPlan, c: &[f64]) -> Result<Vec<f64>> {
    let mut out = vec![0.0; plan.theta.len()];
    plan.exec_into(c, &mut out, &mut NfstScratch::new())?;
    Ok(out)
}

pub fn nfst_adjoint(plan: &NfstPlan, v: &[f64]) -> Result<Vec<f64>> {
    let mut out = vec![0.0; plan.m];
    plan.adjoint_into(v, &mut out, &mut NfstScratch::new())?;
    Ok(out)
}

/// Direct `O(m·|θ|)` summation.
pub fn nfst_direct(theta: &[f64], c: &[f64]) -> Vec<f64> {
    theta
        .iter()
        .map(|&t| c.iter().enumerate().map(|(k, &ck)| ck * ((k + 1) as f64 * t).sin()).sum())
        .collect()
}

/// Direct transpose `b_k = Σ_i v_i sin(kθ_i)`.
pub fn nfst_adjoint_direct(theta: &[f64], v: &[f64], m: usize) -> Vec<f64> {
    (1..=m)
        .map(|k| theta.iter().zip(v).map(|(&t, &vi)| vi * (k as f64 * t).sin()).sum())
        .collect()
}
