//! Cauchy matrices and the factorization of a rank-one updated eigenbasis,
//! `X = U · diag(z) · C(μ, λ)ᵀ · diag(a)`.
//!
//! The minus sign relating `C(λ, μ)` and `C(μ, λ)ᵀ` is absorbed into the
//! eigenvector signs: column `i` of `X` is `a_i U (μ_i I − Λ)⁻¹ z` with
//! `a_i > 0`, so the forward map is `Xᵀ = diag(a) C(μ, λ) diag(z) Uᵀ`.

use crate::error::{check_len, Error, Result};
use crate::graph::RankOneUpdate;
use crate::linalg::DenseMatrix;
use crate::spectral::{BasisKind, Column, PerturbedSpectrum, SpectralBasis, DEFAULT_DEFLATION_TOL};
use crate::trig::DctPlan;

const POLE_TOL: f64 = 1e-14;

/// `C_ij = 1/(μ_i − λ_j)`.
pub fn cauchy_matrix(mu: &[f64], lambda: &[f64]) -> Result<DenseMatrix> {
    let mut c = DenseMatrix::zeros(mu.len(), lambda.len());
    for (i, &m) in mu.iter().enumerate() {
        for (j, &l) in lambda.iter().enumerate() {
            let d = m - l;
            if d.abs() <= POLE_TOL {
                return Err(Error::PoleCollision { node: i, pole: j });
            }
            c[(i, j)] = 1.0 / d;
        }
    }
    Ok(c)
}

/// `p_i = Σ_j s_j/(μ_i − λ_j)` by direct summation.
pub fn cauchy_nmvp(mu: &[f64], lambda: &[f64], s: &[f64]) -> Result<Vec<f64>> {
    check_len(lambda.len(), s.len())?;
    mu.iter()
        .enumerate()
        .map(|(i, &m)| {
            let mut acc = 0.0;
            for (j, (&l, &sj)) in lambda.iter().zip(s).enumerate() {
                let d = m - l;
                if d.abs() <= POLE_TOL {
                    return Err(Error::PoleCollision { node: i, pole: j });
                }
                acc += sj / d;
            }
            Ok(acc)
        })
        .collect()
}

/// The Cauchy stage mapping coefficients in the base eigenbasis to
/// coefficients in the updated eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct CauchyFactorization {
    spectrum: PerturbedSpectrum,
}

impl CauchyFactorization {
    /// Factorizes `L̃ + ρvvᵀ` given the spectrum of `L̃`.
    pub fn new(base: &SpectralBasis, update: &RankOneUpdate) -> Result<Self> {
        Self::with_tolerance(base, update, DEFAULT_DEFLATION_TOL)
    }

    pub fn with_tolerance(base: &SpectralBasis, update: &RankOneUpdate, tau: f64) -> Result<Self> {
        check_len(base.n(), update.n())?;
        let z = match base.kind {
            BasisKind::Path => DctPlan::new(base.n())?.dct2(update.v())?,
            BasisKind::Dense => base.u.transpose_mul_vec(update.v())?,
        };
        Self::from_parts(&base.lambda, &z, update.rho(), tau)
    }

    /// Factorization from base eigenvalues `λ`, `z = Uᵀv` and `ρ`.
    pub fn from_parts(lambda: &[f64], z: &[f64], rho: f64, tau: f64) -> Result<Self> {
        Ok(Self {
            spectrum: PerturbedSpectrum::new(lambda, z, rho, tau)?,
        })
    }

    pub fn n(&self) -> usize {
        self.spectrum.n()
    }

    pub fn spectrum(&self) -> &PerturbedSpectrum {
        &self.spectrum
    }

    pub fn lambda(&self) -> &[f64] {
        &self.spectrum.lambda
    }

    /// Updated eigenvalues, ascending.
    pub fn mu(&self) -> &[f64] {
        &self.spectrum.mu
    }

    /// `z` in the rotated base basis (zero on deflated indices).
    pub fn z(&self) -> &[f64] {
        &self.spectrum.z
    }

    pub fn a(&self) -> &[f64] {
        &self.spectrum.a
    }

    pub fn columns(&self) -> &[Column] {
        &self.spectrum.columns
    }

    /// Moves base-basis coordinates into the deflation-rotated base basis.
    pub fn rotate(&self, x: &mut [f64]) {
        for g in &self.spectrum.deflation.rotations {
            g.rotate_coords(x);
        }
    }

    pub fn unrotate(&self, x: &mut [f64]) {
        for g in self.spectrum.deflation.rotations.iter().rev() {
            g.unrotate_coords(x);
        }
    }

    /// `Xᵀ U s` for base-domain coefficients `s`, with a dense Cauchy product.
    pub fn coefficients(&self, base_coeffs: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n(), base_coeffs.len())?;
        let sp = &self.spectrum;
        let mut s = base_coeffs.to_vec();
        self.rotate(&mut s);
        let zs: Vec<f64> = sp.z.iter().zip(&s).map(|(z, x)| z * x).collect();
        Ok(sp
            .columns
            .iter()
            .map(|col| match *col {
                Column::Passed(j) => s[j],
                Column::Root(r) => {
                    let mut acc = 0.0;
                    for (j, &w) in zs.iter().enumerate() {
                        if w != 0.0 {
                            acc += w / sp.gap(r, j);
                        }
                    }
                    sp.a[r] * acc
                }
            })
            .collect())
    }

    /// Inverse (transpose) of [`CauchyFactorization::coefficients`].
    pub fn base_coefficients(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n(), coeffs.len())?;
        let sp = &self.spectrum;
        let mut out = vec![0.0; self.n()];
        let mut acc = vec![0.0; self.n()];
        for (col, &p) in sp.columns.iter().zip(coeffs) {
            match *col {
                Column::Passed(j) => out[j] += p,
                Column::Root(r) => {
                    let y = sp.a[r] * p;
                    for (j, a) in acc.iter_mut().enumerate() {
                        if sp.z[j] != 0.0 {
                            *a += y / sp.gap(r, j);
                        }
                    }
                }
            }
        }
        for ((o, a), z) in out.iter_mut().zip(&acc).zip(&sp.z) {
            *o += a * z;
        }
        self.unrotate(&mut out);
        Ok(out)
    }

    /// Dense `T = Xᵀ U`, the base-to-updated coefficient map.
    pub fn transfer_matrix(&self) -> DenseMatrix {
        let n = self.n();
        let sp = &self.spectrum;
        let mut t = DenseMatrix::zeros(n, n);
        for (i, col) in sp.columns.iter().enumerate() {
            let row = t.row_mut(i);
            match *col {
                Column::Passed(j) => row[j] = 1.0,
                Column::Root(r) => {
                    for (j, x) in row.iter_mut().enumerate() {
                        if sp.z[j] != 0.0 {
                            *x = sp.a[r] * sp.z[j] / sp.gap(r, j);
                        }
                    }
                }
            }
            // row · Gᵀ
            for g in sp.deflation.rotations.iter().rev() {
                g.unrotate_coords(row);
            }
        }
        t
    }

    /// Dense updated eigenbasis `X = U Tᵀ` (columns are eigenvectors).
    pub fn synthesize_basis(&self, base: &SpectralBasis) -> Result<DenseMatrix> {
        check_len(self.n(), base.n())?;
        let t = self.transfer_matrix();
        match base.kind {
            BasisKind::Path => {
                let n = self.n();
                let plan = DctPlan::new(n)?;
                let mut x = DenseMatrix::zeros(n, n);
                for i in 0..n {
                    x.set_column(i, &plan.idct2(t.row(i))?);
                }
                Ok(x)
            }
            BasisKind::Dense => base.u.matmul(&t.transpose()),
        }
    }
}

/// Product of base transform and a chain of Cauchy stages, one per update:
/// `X_k = X_{k−1} · T_kᵀ`.
#[derive(Debug, Clone)]
pub struct RankKChain {
    base: SpectralBasis,
    stages: Vec<CauchyFactorization>,
}

/// Composes `updates` on top of `base`. The `z` of each stage is the previous
/// chain applied to that stage's update vector.
pub fn compose_rank_k(base: &SpectralBasis, updates: &[RankOneUpdate]) -> Result<RankKChain> {
    if updates.is_empty() {
        return Err(Error::InvalidSize("rank-k composition needs at least one update".into()));
    }
    let mut chain = RankKChain {
        base: base.clone(),
        stages: Vec::with_capacity(updates.len()),
    };
    for (k, update) in updates.iter().enumerate() {
        let stage_err = |e: Error| Error::Stage {
            stage: k,
            source: Box::new(e),
        };
        check_len(base.n(), update.n()).map_err(stage_err)?;
        let z = chain.forward(update.v()).map_err(stage_err)?;
        let lambda = chain.mu().to_vec();
        let stage = CauchyFactorization::from_parts(&lambda, &z, update.rho(), DEFAULT_DEFLATION_TOL)
            .map_err(stage_err)?;
        chain.stages.push(stage);
    }
    Ok(chain)
}

impl RankKChain {
    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn stages(&self) -> &[CauchyFactorization] {
        &self.stages
    }

    /// Eigenvalues after all stages, ascending.
    pub fn mu(&self) -> &[f64] {
        self.stages.last().map_or(&self.base.lambda, |s| s.mu())
    }

    fn base_forward(&self, s: &[f64]) -> Result<Vec<f64>> {
        match self.base.kind {
            BasisKind::Path => DctPlan::new(self.n())?.dct2(s),
            BasisKind::Dense => self.base.u.transpose_mul_vec(s),
        }
    }

    /// `X_kᵀ s`.
    pub fn forward(&self, s: &[f64]) -> Result<Vec<f64>> {
        let mut c = self.base_forward(s)?;
        for stage in &self.stages {
            c = stage.coefficients(&c)?;
        }
        Ok(c)
    }

    /// `X_k p`.
    pub fn inverse(&self, p: &[f64]) -> Result<Vec<f64>> {
        let mut c = p.to_vec();
        for stage in self.stages.iter().rev() {
            c = stage.base_coefficients(&c)?;
        }
        match self.base.kind {
            BasisKind::Path => DctPlan::new(self.n())?.idct2(&c),
            BasisKind::Dense => self.base.u.mul_vec(&c),
        }
    }

    /// Dense `X_k`.
    pub fn synthesize_basis(&self) -> Result<DenseMatrix> {
        let n = self.n();
        let mut x = DenseMatrix::zeros(n, n);
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            x.set_column(i, &self.inverse(&e)?);
        }
        Ok(x)
    }
}
