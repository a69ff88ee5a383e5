//! FFT-backed trigonometric transforms.
//!
//! * [`DctPlan`]: orthonormal DCT-II (the GFT of the unit path) and its
//!   inverse, via Makhoul's reordering and one real FFT of length `n`.
//! * [`DstPlan`]: DST-I with an explicit factor 2,
//!   `c_ℓ = 2 Σ_{j=1}^{N} h_j sin(πℓj/(N+1))`, via a real FFT of the odd
//!   extension (length `2(N+1)`).

use std::f64::consts::PI;
use std::sync::Arc;

use realfft::num_complex::Complex64;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};

use crate::error::{check_len, Error, Result};

/// Reusable buffers for plan execution. Grows on demand; one per thread.
#[derive(Debug, Default, Clone)]
pub struct TrigScratch {
    real: Vec<f64>,
    spectrum: Vec<Complex64>,
    work: Vec<Complex64>,
}

impl TrigScratch {
    pub fn new() -> Self {
        Self::default()
    }

    fn ensure(&mut self, real: usize, spectrum: usize, work: usize) {
        if self.real.len() < real {
            self.real.resize(real, 0.0);
        }
        if self.spectrum.len() < spectrum {
            self.spectrum.resize(spectrum, Complex64::default());
        }
        if self.work.len() < work {
            self.work.resize(work, Complex64::default());
        }
    }
}

#[derive(Clone)]
pub struct DctPlan {
    n: usize,
    forward: Arc<dyn RealToComplex<f64>>,
    inverse: Arc<dyn ComplexToReal<f64>>,
    // e^{-iπk/(2n)} for k = 0..=n/2
    twiddles: Vec<Complex64>,
    // orthonormal output scale per coefficient
    scale: Vec<f64>,
}

impl std::fmt::Debug for DctPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DctPlan").field("n", &self.n).finish()
    }
}

impl DctPlan {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSize(format!("DCT needs n >= 2, got {n}")));
        }
        let mut planner = RealFftPlanner::<f64>::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let twiddles = (0..=n / 2)
            .map(|k| Complex64::from_polar(1.0, -PI * k as f64 / (2 * n) as f64))
            .collect();
        let base = (2.0 / n as f64).sqrt();
        let scale = (0..n)
            .map(|k| if k == 0 { base * std::f64::consts::FRAC_1_SQRT_2 } else { base })
            .collect();
        Ok(Self {
            n,
            forward,
            inverse,
            twiddles,
            scale,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn scratch_sizes(&self) -> (usize, usize, usize) {
        let work = self
            .forward
            .get_scratch_len()
            .max(self.inverse.get_scratch_len());
        (self.n, self.n / 2 + 1, work)
    }

    /// `Uᵀ s` for the orthonormal DCT-II basis.
    pub fn dct2(&self, s: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.n];
        self.dct2_into(s, &mut out, &mut TrigScratch::new())?;
        Ok(out)
    }

    pub fn dct2_into(&self, s: &[f64], out: &mut [f64], scratch: &mut TrigScratch) -> Result<()> {
        check_len(self.n, s.len())?;
        check_len(self.n, out.len())?;
        let n = self.n;
        let (r, c, w) = self.scratch_sizes();
        scratch.ensure(r, c, w);
        let TrigScratch { real, spectrum, work } = scratch;
        let v = &mut real[..n];
        let half = n.div_ceil(2);
        for j in 0..half {
            v[j] = s[2 * j];
        }
        for j in 0..n / 2 {
            v[n - 1 - j] = s[2 * j + 1];
        }
        let bins = &mut spectrum[..n / 2 + 1];
        self.forward
            .process_with_scratch(v, bins, &mut work[..self.forward.get_scratch_len()])
            .expect("buffer sizes fixed by plan");
        for k in 0..=n / 2 {
            let a = self.twiddles[k] * bins[k];
            out[k] = a.re * self.scale[k];
            if k > 0 && n - k != k {
                out[n - k] = -a.im * self.scale[n - k];
            }
        }
        Ok(())
    }

    /// `U p`, the exact inverse (and transpose) of [`DctPlan::dct2`].
    pub fn idct2(&self, p: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.n];
        self.idct2_into(p, &mut out, &mut TrigScratch::new())?;
        Ok(out)
    }

    pub fn idct2_into(&self, p: &[f64], out: &mut [f64], scratch: &mut TrigScratch) -> Result<()> {
        check_len(self.n, p.len())?;
        check_len(self.n, out.len())?;
        let n = self.n;
        let (r, c, w) = self.scratch_sizes();
        scratch.ensure(r, c, w);
        let TrigScratch { real, spectrum, work } = scratch;
        let bins = &mut spectrum[..n / 2 + 1];
        // Undo the orthonormal scale and the 1/n of the unnormalized inverse FFT.
        let inv_n = 1.0 / n as f64;
        for k in 0..=n / 2 {
            let xk = p[k] / self.scale[k];
            let xnk = if k == 0 { 0.0 } else { p[n - k] / self.scale[n - k] };
            bins[k] = self.twiddles[k].conj() * Complex64::new(xk, -xnk) * inv_n;
        }
        bins[0].im = 0.0;
        if n % 2 == 0 {
            bins[n / 2].im = 0.0;
        }
        let v = &mut real[..n];
        self.inverse
            .process_with_scratch(bins, v, &mut work[..self.inverse.get_scratch_len()])
            .expect("buffer sizes fixed by plan");
        let half = n.div_ceil(2);
        for j in 0..half {
            out[2 * j] = v[j];
        }
        for j in 0..n / 2 {
            out[2 * j + 1] = v[n - 1 - j];
        }
        Ok(())
    }
}

/// DST-I on vectors of length `n − 1` (the interior nodes `jπ/n`).
#[derive(Clone)]
pub struct DstPlan {
    n: usize,
    fft: Arc<dyn RealToComplex<f64>>,
}

impl std::fmt::Debug for DstPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DstPlan").field("n", &self.n).finish()
    }
}

impl DstPlan {
    /// Plan for inputs of length `n − 1`.
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSize(format!("DST-I needs n >= 2, got {n}")));
        }
        let fft = RealFftPlanner::<f64>::new().plan_fft_forward(2 * n);
        Ok(Self { n, fft })
    }

    /// Input/output length `n − 1`.
    pub fn len(&self) -> usize {
        self.n - 1
    }

    pub fn is_empty(&self) -> bool {
        self.n == 1
    }

    /// `c_ℓ = 2 Σ_j h_j sin(πℓj/n)`.
    pub fn dst1(&self, h: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.len()];
        self.dst1_into(h, &mut out, &mut TrigScratch::new())?;
        Ok(out)
    }

    pub fn dst1_into(&self, h: &[f64], out: &mut [f64], scratch: &mut TrigScratch) -> Result<()> {
        self.scaled_into(h, out, 2.0, scratch)
    }

    /// `out_ℓ = scale · Σ_j h_j sin(πℓj/n)`.
    pub(crate) fn scaled_into(&self, h: &[f64], out: &mut [f64], scale: f64, scratch: &mut TrigScratch) -> Result<()> {
        let m = self.len();
        check_len(m, h.len())?;
        check_len(m, out.len())?;
        let len = 2 * self.n;
        scratch.ensure(len, self.n + 1, self.fft.get_scratch_len());
        let TrigScratch { real, spectrum, work } = scratch;
        let y = &mut real[..len];
        y[0] = 0.0;
        y[self.n] = 0.0;
        for (j, &hj) in h.iter().enumerate() {
            y[j + 1] = hj;
            y[len - 1 - j] = -hj;
        }
        let bins = &mut spectrum[..self.n + 1];
        self.fft
            .process_with_scratch(y, bins, &mut work[..self.fft.get_scratch_len()])
            .expect("buffer sizes fixed by plan");
        // The spectrum of the odd extension is −2i Σ h_j sin(πkj/n).
        let factor = -0.5 * scale;
        for (o, z) in out.iter_mut().zip(&bins[1..]) {
            *o = factor * z.im;
        }
        Ok(())
    }
}

pub fn dct2(s: &[f64]) -> Result<Vec<f64>> {
    DctPlan::new(s.len())?.dct2(s)
}

pub fn idct2(p: &[f64]) -> Result<Vec<f64>> {
    DctPlan::new(p.len())?.idct2(p)
}

/// Factor-2 DST-I of a length-`(n−1)` vector.
pub fn dst1(h: &[f64]) -> Result<Vec<f64>> {
    DstPlan::new(h.len() + 1)?.dst1(h)
}

/// Chebyshev polynomial of the second kind, `U_m(cos θ) = sin((m+1)θ)/sin θ`.
pub fn chebyshev_u(m: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * x);
    if m == 0 {
        return prev;
    }
    for _ in 1..m {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Roots of `U_{n−1}`: `cos(kπ/n)` for `k = 1..n−1`, descending.
pub fn u_roots(n: usize) -> Vec<f64> {
    (1..n).map(|k| (PI * k as f64 / n as f64).cos()).collect()
}
