use thiserror::Error;

use super::metrics::DegreeDistribution;
use crate::scalar::Real;

/// Fitted `P(X = x) ~ x^(-alpha)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit<F> {
    pub alpha: F,
    pub r2: F,
    pub xmin: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FitError {
    #[error("need at least 3 distinct degrees >= {xmin}, found {found}")]
    TooFewDegrees { xmin: u64, found: usize },
    #[error("degenerate fit: {0}")]
    Degenerate(&'static str),
}

/// Least-squares line through `(log10 k, log10 P(X >= k))` for every distinct degree
/// `k >= xmin` (and `k >= 1`). The CCDF decays with exponent `alpha - 1`, so
/// `alpha = 1 - slope`.
pub fn fit_power_law<F: Real>(d: &DegreeDistribution, xmin: u64) -> Result<PowerLawFit<F>, FitError> {
    let xmin = xmin.max(1);
    let tail: Vec<(u64, u64)> = d.histogram.range(xmin..).map(|(k, c)| (*k, *c)).collect();
    if tail.len() < 3 {
        return Err(FitError::TooFewDegrees {
            xmin,
            found: tail.len(),
        });
    }
    let total: u64 = tail.iter().map(|(_, c)| c).sum();
    let total_f = F::from_u64_lossy(total);
    let mut remaining = total;
    let points: Vec<(F, F)> = tail
        .iter()
        .map(|&(k, c)| {
            let ccdf = F::from_u64_lossy(remaining) / total_f;
            remaining -= c;
            (F::from_u64_lossy(k).log10(), ccdf.log10())
        })
        .collect();
    let m = F::from_u64_lossy(points.len() as u64);
    let mx = points.iter().map(|p| p.0).sum::<F>() / m;
    let my = points.iter().map(|p| p.1).sum::<F>() / m;
    let sxx: F = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: F = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: F = points.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    if sxx <= F::zero() {
        return Err(FitError::Degenerate("no spread in degrees"));
    }
    let slope = sxy / sxx;
    let r2 = if syy > F::zero() {
        (sxy * sxy / (sxx * syy)).max(F::zero()).min(F::one())
    } else {
        F::zero()
    };
    let alpha = F::one() - slope;
    if alpha <= F::zero() {
        return Err(FitError::Degenerate("non-decreasing tail"));
    }
    Ok(PowerLawFit { alpha, r2, xmin })
}
