//! Log-log convergence fits.

use serde::Serialize;

use crate::error::{Error, Result};

/// Least-squares fit of `ln(error) = slope·ln(h) + intercept`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: Vec<(f64, f64)>,
}

pub fn fit_loglog(points: &[(f64, f64)]) -> Result<ConvergenceFit> {
    if points.len() < 2 {
        return Err(Error::InvalidArgument("a convergence fit needs at least two points".into()));
    }
    if let Some(&(h, e)) = points.iter().find(|(h, e)| !(*h > 0.0 && *e > 0.0 && h.is_finite() && e.is_finite())) {
        return Err(Error::InvalidArgument(format!(
            "convergence points must be positive and finite, got ({h}, {e})"
        )));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("convergence points share a single step size".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok(ConvergenceFit {
        slope,
        intercept: my - slope * mx,
        points: points.to_vec(),
    })
}
