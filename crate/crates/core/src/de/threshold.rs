//! Threshold searches over the defect probability and the test degree.

use serde::{Deserialize, Serialize};

use super::{de_iterate, DeConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdKind {
    /// Largest decodable defect probability at fixed rate.
    Gamma,
    /// Smallest decodable rate `d_v / d_c` at fixed defect probability.
    Omega,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub kind: ThresholdKind,
    /// Midpoint of the final bracket for `Gamma`; the smallest rate that
    /// succeeded for `Omega`. Plain probability or ratio, not percent.
    pub value: f64,
    /// `(lo, hi)`. For `Gamma`, DE succeeds at `lo` and fails at `hi`; for
    /// `Omega`, it fails at `lo` and succeeds at `hi`.
    pub bracket: (f64, f64),
    /// DE iterations of the successful probe at the bracket end.
    pub iters_at_threshold: usize,
    /// Number of DE runs spent.
    pub probes: usize,
    pub config: DeConfig,
}

/// Bisection on the defect probability over `[0, upper]`, assuming success
/// is monotone in it.
pub fn gamma_threshold(cfg: &DeConfig, upper: f64) -> Result<ThresholdResult> {
    cfg.validate()?;
    if !(upper > 0.0 && upper < 1.0) {
        return Err(Error::InvalidParam(format!("upper probe {upper} outside (0, 1)")));
    }
    let top = de_iterate(&cfg.with_gamma(upper))?;
    if top.success {
        return Err(Error::NoBracket(format!(
            "DE succeeds at the upper probe gamma = {upper}"
        )));
    }
    let (mut lo, mut hi) = (0.0, upper);
    let mut iters_lo = de_iterate(&cfg.with_gamma(0.0))?.iterations;
    let mut probes = 2;
    while hi - lo > cfg.bisection_tol {
        let mid = 0.5 * (lo + hi);
        let run = de_iterate(&cfg.with_gamma(mid))?;
        probes += 1;
        if run.success {
            lo = mid;
            iters_lo = run.iterations;
        } else {
            hi = mid;
        }
    }
    let value = 0.5 * (lo + hi);
    Ok(ThresholdResult {
        kind: ThresholdKind::Gamma,
        value,
        bracket: (lo, hi),
        iters_at_threshold: iters_lo,
        probes,
        config: cfg.with_gamma(value),
    })
}

/// Largest `d_c` (a multiple of `q`, at most `max_d_c`) for which DE
/// succeeds at `cfg.gamma`; `cfg.d_c` is ignored.
pub fn min_rate(cfg: &DeConfig, max_d_c: usize) -> Result<ThresholdResult> {
    let q = cfg.q;
    let probe = |k: usize| de_iterate(&cfg.with_d_c(k * q));
    cfg.with_d_c(q).validate()?;
    let first = probe(1)?;
    if !first.success {
        return Err(Error::NoBracket(format!(
            "DE fails even at d_c = q = {q} (gamma = {})",
            cfg.gamma
        )));
    }
    let mut probes = 1;
    let (mut good, mut good_iters) = (1usize, first.iterations);
    let mut bad = None;
    let mut k = 2usize;
    while bad.is_none() {
        if k * q > max_d_c {
            return Err(Error::NoBracket(format!(
                "DE still succeeds at d_c = {} (limit {max_d_c})",
                good * q
            )));
        }
        let run = probe(k)?;
        probes += 1;
        if run.success {
            good = k;
            good_iters = run.iterations;
            k = (2 * k).min(max_d_c / q + 1).max(k + 1);
        } else {
            bad = Some(k);
        }
    }
    let mut bad = bad.unwrap();
    while bad - good > 1 {
        let mid = (good + bad) / 2;
        let run = probe(mid)?;
        probes += 1;
        if run.success {
            good = mid;
            good_iters = run.iterations;
        } else {
            bad = mid;
        }
    }
    let d_v = cfg.d_v as f64;
    Ok(ThresholdResult {
        kind: ThresholdKind::Omega,
        value: d_v / (good * q) as f64,
        bracket: (d_v / (bad * q) as f64, d_v / (good * q) as f64),
        iters_at_threshold: good_iters,
        probes,
        config: cfg.with_d_c(good * q),
    })
}
