//! Spectra of the unperturbed and rank-one updated Laplacians.
//!
//! Perturbed eigenvalues are kept as `(origin, offset)` pairs, `μ = λ_origin + offset`,
//! with the origin the nearer pole of the root's interleaving bracket. Every
//! difference `μ_i − λ_j` is then formed as `offset − (λ_j − λ_origin)`, which
//! keeps full relative accuracy for roots hugging a pole.

use std::f64::consts::PI;

use crate::error::{check_len, Error, Result};
use crate::graph::GeneralizedLaplacian;
use crate::linalg::DenseMatrix;

/// Default deflation tolerance.
pub const DEFAULT_DEFLATION_TOL: f64 = 1e-12;

/// Iteration cap of the secular solver.
pub const SECULAR_MAX_ITER: usize = 200;

const SECULAR_RESIDUAL_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    /// Orthonormal DCT-II; products with `U` go through the fast DCT.
    Path,
    /// Eigenvectors from the dense solver.
    Dense,
}

/// Eigenvalues (ascending) with their orthonormal eigenvectors as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBasis {
    pub lambda: Vec<f64>,
    pub u: DenseMatrix,
    pub kind: BasisKind,
}

impl SpectralBasis {
    pub fn n(&self) -> usize {
        self.lambda.len()
    }
}

/// Closed-form spectrum of the unit path: `λ_k = 2 − 2cos(kπ/n)` and the
/// orthonormal DCT-II basis, `k = 0..n−1`.
pub fn path_spectrum(n: usize) -> Result<SpectralBasis> {
    if n < 2 {
        return Err(Error::InvalidSize(format!("path spectrum needs n >= 2, got {n}")));
    }
    let lambda = path_eigenvalues(n);
    let nf = n as f64;
    let u = DenseMatrix::from_fn(n, n, |j, k| {
        let ck = if k == 0 { (1.0 / nf).sqrt() } else { (2.0 / nf).sqrt() };
        ck * (PI * k as f64 * (2 * j + 1) as f64 / (2.0 * nf)).cos()
    });
    Ok(SpectralBasis {
        lambda,
        u,
        kind: BasisKind::Path,
    })
}

/// `2 − 2cos(kπ/n)`, evaluated as `4 sin²(kπ/2n)`.
pub fn path_eigenvalues(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let s = (PI * k as f64 / (2 * n) as f64).sin();
            4.0 * s * s
        })
        .collect()
}

/// Full symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Eigenvalues come back ascending; each eigenvector is signed so that its
/// largest-magnitude entry is positive (see [`canonicalize_column_signs`]).
pub fn dense_eigh(l: &GeneralizedLaplacian) -> Result<SpectralBasis> {
    jacobi_eigh(l.matrix())
}

pub fn jacobi_eigh(matrix: &DenseMatrix) -> Result<SpectralBasis> {
    if !matrix.is_square() {
        return Err(Error::DimensionMismatch {
            expected: matrix.rows(),
            got: matrix.cols(),
        });
    }
    let n = matrix.rows();
    let scale = matrix.max_abs();
    for i in 0..n {
        for j in i + 1..n {
            let diff = (matrix[(i, j)] - matrix[(j, i)]).abs();
            if diff > 1e-12 * scale {
                return Err(Error::NotSymmetric { i, j, diff });
            }
        }
    }
    let mut a = matrix.clone();
    let mut v = DenseMatrix::identity(n);
    let frob = a.frobenius_norm();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * frob || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].total_cmp(&a[(y, y)]));
    let lambda = order.iter().map(|&i| a[(i, i)]).collect();
    let mut u = DenseMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    canonicalize_column_signs(&mut u);
    Ok(SpectralBasis {
        lambda,
        u,
        kind: BasisKind::Dense,
    })
}

/// Flips columns so the largest-magnitude entry of each is positive. Ties
/// (within a relative 1e−9) resolve to the lowest row index.
pub fn canonicalize_column_signs(u: &mut DenseMatrix) {
    for k in 0..u.cols() {
        let col = u.column(k);
        if column_sign(&col) < 0.0 {
            let flipped: Vec<f64> = col.iter().map(|x| -x).collect();
            u.set_column(k, &flipped);
        }
    }
}

/// `±1` such that multiplying the column by it satisfies the sign convention.
pub fn column_sign(col: &[f64]) -> f64 {
    let peak = col.iter().map(|x| x.abs()).fold(0.0, f64::max);
    match col.iter().find(|x| x.abs() >= peak * (1.0 - 1e-9)) {
        Some(&x) if x < 0.0 => -1.0,
        _ => 1.0,
    }
}

/// A root of the secular equation stored relative to its nearest pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecularRoot {
    /// Index into the pole vector the root was solved against.
    pub origin: usize,
    /// `μ − λ_origin`.
    pub offset: f64,
    /// `μ` itself.
    pub value: f64,
}

impl SecularRoot {
    /// `μ − λ_j`, accurate even when `μ` is within rounding of `λ_j`.
    #[inline]
    pub fn gap(&self, lambda: &[f64], j: usize) -> f64 {
        if j == self.origin {
            self.offset
        } else {
            self.offset - (lambda[j] - lambda[self.origin])
        }
    }
}

/// Roots of `1 + ρ Σ_j z_j²/(λ_j − μ) = 0`, one per interleaving bracket,
/// ascending.
///
/// Requires strictly increasing `λ`, no zero `z_j` and `ρ ≠ 0`; deflate first
/// otherwise.
pub fn secular_eigenvalues(lambda: &[f64], z: &[f64], rho: f64) -> Result<Vec<SecularRoot>> {
    check_len(lambda.len(), z.len())?;
    if lambda.is_empty() {
        return Ok(Vec::new());
    }
    if !(rho.is_finite() && rho != 0.0) {
        return Err(Error::InvalidUpdate(format!("rho must be finite and nonzero, got {rho}")));
    }
    if let Some(j) = z.iter().position(|&x| x == 0.0) {
        return Err(Error::NeedsDeflation(format!("z[{j}] is zero")));
    }
    if let Some(j) = lambda.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::NeedsDeflation(format!(
            "eigenvalues {j} and {} are not strictly increasing",
            j + 1
        )));
    }
    if rho > 0.0 {
        secular_positive(lambda, z, rho)
    } else {
        // eig(L + ρvvᵀ) = −eig(−L + |ρ|vvᵀ)
        let n = lambda.len();
        let mirrored: Vec<f64> = lambda.iter().rev().map(|x| -x).collect();
        let zr: Vec<f64> = z.iter().rev().copied().collect();
        let roots = secular_positive(&mirrored, &zr, -rho)?;
        Ok(roots
            .into_iter()
            .rev()
            .map(|r| SecularRoot {
                origin: n - 1 - r.origin,
                offset: -r.offset,
                value: -r.value,
            })
            .collect())
    }
}

fn secular_positive(lambda: &[f64], z: &[f64], rho: f64) -> Result<Vec<SecularRoot>> {
    let n = lambda.len();
    let z2: Vec<f64> = z.iter().map(|x| x * x).collect();
    let znorm2: f64 = z2.iter().sum();
    let inv_rho = 1.0 / rho;
    let eval = |origin: usize, tau: f64| -> (f64, f64, f64) {
        let base = lambda[origin];
        let mut f = inv_rho;
        let mut df = 0.0;
        let mut mag = inv_rho.abs();
        for j in 0..n {
            let delta = if j == origin { 0.0 } else { lambda[j] - base };
            let d = delta - tau;
            let term = z2[j] / d;
            f += term;
            mag += term.abs();
            df += term / d;
        }
        (f, df, mag)
    };
    let mut roots = Vec::with_capacity(n);
    for i in 0..n {
        let (origin, mut lo, mut hi) = if i + 1 < n {
            let half = 0.5 * (lambda[i + 1] - lambda[i]);
            let (f_mid, _, _) = eval(i, half);
            if f_mid >= 0.0 {
                (i, 0.0, half)
            } else {
                (i + 1, -half, 0.0)
            }
        } else {
            // the root can sit exactly on rho‖z‖² (n = 1), so widen slightly
            (i, 0.0, rho * znorm2 * (1.0 + 1e-12))
        };
        let mut tau = 0.5 * (lo + hi);
        let mut converged = false;
        let mut last_width = hi - lo;
        for iter in 0..SECULAR_MAX_ITER {
            let (f, df, mag) = eval(origin, tau);
            if f.abs() <= SECULAR_RESIDUAL_TOL * mag {
                converged = true;
                // polish inside the bracket
                for _ in 0..2 {
                    let (f, df, _) = eval(origin, tau);
                    let next = tau - f / df;
                    if !(next > lo && next < hi) || f == 0.0 {
                        break;
                    }
                    tau = next;
                }
                break;
            }
            if f > 0.0 {
                hi = tau;
            } else {
                lo = tau;
            }
            let width = hi - lo;
            if width <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) || width == 0.0 {
                converged = true;
                break;
            }
            let newton = tau - f / df;
            let stalled = iter % 2 == 1 && width > 0.5 * last_width;
            if iter % 2 == 1 {
                last_width = width;
            }
            tau = if !stalled && newton > lo && newton < hi && newton.is_finite() {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if tau == lo || tau == hi {
                converged = true;
                tau = if f > 0.0 { lo.max(tau) } else { tau };
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence {
                root: i,
                iterations: SECULAR_MAX_ITER,
            });
        }
        roots.push(SecularRoot {
            origin,
            offset: tau,
            value: lambda[origin] + tau,
        });
    }
    Ok(roots)
}

/// Plane rotation mixing base eigenvectors `keep` and `drop` of a repeated
/// eigenvalue: `u_keep ← c u_keep + s u_drop`, `u_drop ← −s u_keep + c u_drop`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Givens {
    pub keep: usize,
    pub drop: usize,
    pub c: f64,
    pub s: f64,
}

impl Givens {
    /// Applies the rotation to coordinates expressed in the unrotated basis,
    /// yielding coordinates in the rotated one (`Gᵀ x`).
    pub fn rotate_coords(&self, x: &mut [f64]) {
        let (a, b) = (x[self.keep], x[self.drop]);
        x[self.keep] = self.c * a + self.s * b;
        x[self.drop] = -self.s * a + self.c * b;
    }

    /// Inverse of [`Givens::rotate_coords`] (`G x`).
    pub fn unrotate_coords(&self, x: &mut [f64]) {
        let (a, b) = (x[self.keep], x[self.drop]);
        x[self.keep] = self.c * a - self.s * b;
        x[self.drop] = self.s * a + self.c * b;
    }
}

/// Outcome of [`deflate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Deflation {
    /// Indices entering the secular equation, ascending.
    pub kept: Vec<usize>,
    /// Indices whose eigenpair is unchanged by the update, ascending.
    pub passed: Vec<usize>,
    /// Rotations applied, in order, to the base basis.
    pub rotations: Vec<Givens>,
    /// `z` in the rotated basis, with passed entries set to zero.
    pub z: Vec<f64>,
}

/// Splits off eigenpairs the update does not move: components with
/// `|z_j| ≤ τ‖z‖`, and all but one member of each cluster of eigenvalues
/// within `τ·max|λ|` (the cluster's `z` mass is rotated onto its first member).
pub fn deflate(lambda: &[f64], z: &[f64], tau: f64) -> Deflation {
    let n = lambda.len();
    let znorm = z.iter().map(|x| x * x).sum::<f64>().sqrt();
    let lam_scale = lambda.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let mut zd = z.to_vec();
    let mut is_passed: Vec<bool> = z.iter().map(|x| x.abs() <= tau * znorm).collect();
    let mut rotations = Vec::new();
    let mut rep: Option<usize> = None;
    for j in 0..n {
        if is_passed[j] {
            continue;
        }
        match rep {
            Some(k) if lambda[j] - lambda[k] <= tau * lam_scale => {
                let r = zd[k].hypot(zd[j]);
                let g = Givens {
                    keep: k,
                    drop: j,
                    c: zd[k] / r,
                    s: zd[j] / r,
                };
                zd[k] = r;
                zd[j] = 0.0;
                is_passed[j] = true;
                rotations.push(g);
            }
            _ => rep = Some(j),
        }
    }
    let mut kept = Vec::new();
    let mut passed = Vec::new();
    for j in 0..n {
        if is_passed[j] {
            zd[j] = 0.0;
            passed.push(j);
        } else {
            kept.push(j);
        }
    }
    Deflation {
        kept,
        passed,
        rotations,
        z: zd,
    }
}

/// Column normalizers `a_i = (Σ_j z_j²/(μ_i − λ_j)²)^(−1/2)`.
pub fn normalizers(lambda: &[f64], roots: &[SecularRoot], z: &[f64]) -> Result<Vec<f64>> {
    check_len(lambda.len(), z.len())?;
    roots
        .iter()
        .enumerate()
        .map(|(i, root)| {
            let mut acc = 0.0;
            for (j, &zj) in z.iter().enumerate() {
                if zj == 0.0 {
                    continue;
                }
                let g = root.gap(lambda, j);
                if g == 0.0 {
                    return Err(Error::PoleCollision { node: i, pole: j });
                }
                let t = zj / g;
                acc += t * t;
            }
            if acc == 0.0 {
                return Err(Error::NeedsDeflation(format!("root {i} has no support in z")));
            }
            Ok(1.0 / acc.sqrt())
        })
        .collect()
}

/// One output column of a perturbed spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    /// Secular root `r` (index into [`PerturbedSpectrum::roots`]).
    Root(usize),
    /// Base eigenpair `j` carried over by deflation.
    Passed(usize),
}

/// Eigenvalues, normalizers and deflation data of `L̃ + ρvvᵀ` relative to the
/// spectrum of `L̃`.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbedSpectrum {
    pub rho: f64,
    /// Base eigenvalues `λ`.
    pub lambda: Vec<f64>,
    /// `z = Uᵀv` in the (rotated) base basis; zero on passed indices.
    pub z: Vec<f64>,
    pub deflation: Deflation,
    /// Secular roots with origins indexing the full `lambda`.
    pub roots: Vec<SecularRoot>,
    /// Normalizers, one per root.
    pub a: Vec<f64>,
    /// Output columns sorted by ascending eigenvalue.
    pub columns: Vec<Column>,
    /// Eigenvalues of the updated matrix, ascending, aligned with `columns`.
    pub mu: Vec<f64>,
}

impl PerturbedSpectrum {
    /// Deflates, solves the secular equation and computes normalizers.
    pub fn new(lambda: &[f64], z: &[f64], rho: f64, tau: f64) -> Result<Self> {
        check_len(lambda.len(), z.len())?;
        if !(rho.is_finite() && rho != 0.0) {
            return Err(Error::InvalidUpdate(format!("rho must be finite and nonzero, got {rho}")));
        }
        let deflation = deflate(lambda, z, tau);
        let lam_kept: Vec<f64> = deflation.kept.iter().map(|&j| lambda[j]).collect();
        let z_kept: Vec<f64> = deflation.kept.iter().map(|&j| deflation.z[j]).collect();
        let roots: Vec<SecularRoot> = secular_eigenvalues(&lam_kept, &z_kept, rho)?
            .into_iter()
            .map(|r| SecularRoot {
                origin: deflation.kept[r.origin],
                ..r
            })
            .collect();
        let a = normalizers(lambda, &roots, &deflation.z)?;
        let mut columns: Vec<(f64, Column)> = roots
            .iter()
            .enumerate()
            .map(|(r, root)| (root.value, Column::Root(r)))
            .chain(deflation.passed.iter().map(|&j| (lambda[j], Column::Passed(j))))
            .collect();
        columns.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mu = columns.iter().map(|c| c.0).collect();
        Ok(Self {
            rho,
            lambda: lambda.to_vec(),
            z: deflation.z.clone(),
            roots,
            a,
            columns: columns.into_iter().map(|c| c.1).collect(),
            mu,
            deflation,
        })
    }

    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    /// `μ_r − λ_j` for root `r`.
    #[inline]
    pub fn gap(&self, r: usize, j: usize) -> f64 {
        self.roots[r].gap(&self.lambda, j)
    }
}
