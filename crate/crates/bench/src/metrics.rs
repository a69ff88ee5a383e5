use crate::error::{BenchError, Result};

/// `10 log10(‖ref‖² / ‖ref − test‖²)`; `+∞` for an exact match.
pub fn snr_db(reference: &[f64], test: &[f64]) -> Result<f64> {
    if reference.len() != test.len() {
        return Err(BenchError::Metric(format!(
            "length mismatch: {} vs {}",
            reference.len(),
            test.len()
        )));
    }
    let signal: f64 = reference.iter().map(|x| x * x).sum();
    if signal == 0.0 {
        return Err(BenchError::Metric("reference signal is zero".into()));
    }
    let noise: f64 = reference.iter().zip(test).map(|(a, b)| (a - b).powi(2)).sum();
    if noise == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (signal / noise).log10())
}

/// `10 log10(peak² / mse)`; `+∞` when `mse` is zero.
pub fn psnr_db(peak: f64, mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (peak * peak / mse).log10()
    }
}

pub fn mse(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / a.len().max(1) as f64
}
