use crate::error::{BenchError, Result};
use crate::signal::DEFAULT_CORRELATION;
use dctplus::graph::UpdateKind;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Accuracy,
    Runtime,
    Prune,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Accuracy => "accuracy",
            Mode::Runtime => "runtime",
            Mode::Prune => "prune",
        }
    }
}

/// Self-loop on vertex 1, update of edge (2,3) and addition of edge (3,5),
/// all with weight 1.5.
pub fn default_updates() -> Vec<UpdateKind> {
    vec![
        UpdateKind::self_loop(0, 1.5),
        UpdateKind::edge(1, 2, 1.5),
        UpdateKind::edge(2, 4, 1.5),
    ]
}

/// Fraction of calibration signals that take the pruned path by default.
pub const DEFAULT_PRUNE_FRACTION: f64 = 0.7;

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub mode: Mode,
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub updates: Vec<UpdateKind>,
    pub epsilon: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    /// Keep counts for the pruning sweep; empty means `n/4, n/2, 3n/4, n`.
    pub cp: Vec<usize>,
    /// Pruning threshold; `None` calibrates to [`DEFAULT_PRUNE_FRACTION`].
    pub threshold: Option<f64>,
    pub correlation: f64,
}

impl BenchConfig {
    pub fn new(mode: Mode) -> Self {
        let (sizes, updates) = match mode {
            Mode::Prune => (vec![32], default_updates()[..2].to_vec()),
            _ => (vec![8, 16, 32, 64, 128, 256], default_updates()),
        };
        Self {
            mode,
            sizes,
            trials: 1000,
            updates,
            epsilon: 1e-12,
            seed: 2024,
            out: None,
            cp: Vec::new(),
            threshold: None,
            correlation: DEFAULT_CORRELATION,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(BenchError::Config(m));
        if self.sizes.is_empty() {
            return bad("at least one size is required".into());
        }
        if let Some(n) = self.sizes.iter().find(|&&n| n < 2) {
            return bad(format!("sizes must be at least 2, got {n}"));
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.updates.is_empty() {
            return bad("at least one update is required".into());
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad(format!("eps must lie in (0, 1), got {}", self.epsilon));
        }
        if !(self.correlation.abs() < 1.0) {
            return bad(format!("AR correlation must satisfy |r| < 1, got {}", self.correlation));
        }
        if self.threshold.is_some_and(f64::is_nan) {
            return bad("threshold is NaN".into());
        }
        if self.cp.contains(&0) {
            return bad("keep counts must be positive".into());
        }
        Ok(())
    }

    /// Keep counts swept for size `n`.
    pub fn keep_counts(&self, n: usize) -> Vec<usize> {
        if self.cp.is_empty() {
            let mut v: Vec<usize> = [n / 4, n / 2, 3 * n / 4, n].into_iter().filter(|&c| c >= 1).collect();
            v.dedup();
            v
        } else {
            self.cp.iter().copied().filter(|&c| c <= n).collect()
        }
    }

    /// Seed for an experiment cell, so cells are independent of sweep order.
    pub fn cell_seed(&self, n: usize, tag: u64) -> u64 {
        self.seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add((n as u64) << 16)
            .wrapping_add(tag)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        for m in [Mode::Accuracy, Mode::Runtime, Mode::Prune] {
            BenchConfig::new(m).validate().unwrap();
        }
        assert_eq!(BenchConfig::new(Mode::Prune).keep_counts(32), vec![8, 16, 24, 32]);
    }

    #[test]
    fn invalid_settings() {
        let mut c = BenchConfig::new(Mode::Accuracy);
        c.sizes = vec![1];
        assert!(c.validate().is_err());
        let mut c = BenchConfig::new(Mode::Accuracy);
        c.trials = 0;
        assert!(c.validate().is_err());
        let mut c = BenchConfig::new(Mode::Accuracy);
        c.epsilon = 2.0;
        assert!(c.validate().is_err());
    }
}
