use crate::error::{Error, Result};
use crate::trajectory::ErrorTrajectory;

/// Least-squares line through `(log k, log value)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Standard error of the mean.
pub fn std_error(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return f64::NAN;
    }
    let m = mean(values);
    let var = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}

/// Fits `log value = intercept + slope·log k`. Needs at least five positive points.
pub fn fit_log_log(ks: &[f64], values: &[f64]) -> Result<SlopeFit> {
    if ks.len() != values.len() {
        return Err(Error::Dimension { expected: ks.len(), got: values.len() });
    }
    let pts: Vec<(f64, f64)> =
        ks.iter().zip(values).filter(|(k, v)| **k > 0.0 && **v > 0.0).map(|(k, v)| (k.ln(), v.ln())).collect();
    if pts.len() < 5 {
        return Err(Error::InsufficientData(format!("slope fit needs 5 points, got {}", pts.len())));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("slope fit needs distinct k".into()));
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    Ok(SlopeFit { slope, intercept: my - slope * mx, r_squared, points: pts.len() })
}

/// Mean of `column` over trajectories at every `k` they all record.
pub fn mean_over_seeds(trajectories: &[ErrorTrajectory], column: &str) -> Result<Vec<(usize, f64)>> {
    let first = trajectories.first().ok_or_else(|| Error::InsufficientData("no trajectories".into()))?;
    let mut out = Vec::new();
    for row in &first.rows {
        let mut vals = Vec::with_capacity(trajectories.len());
        for t in trajectories {
            match t.at(row.k) {
                Some(r) => vals.push(column_value(t, r, column)?),
                None => break,
            }
        }
        if vals.len() == trajectories.len() {
            out.push((row.k, mean(&vals)));
        }
    }
    Ok(out)
}

/// Named value of a row; base columns and extras alike.
pub fn column_value(t: &ErrorTrajectory, row: &crate::trajectory::TrajectoryRow, column: &str) -> Result<f64> {
    match column {
        "err_x_scaled" => Ok(row.err_x),
        "err_theta_scaled_max" => Ok(row.err_theta),
        "gamma_max" => Ok(row.gamma_max),
        "alpha_max" => Ok(row.alpha_max),
        _ => t.extra(row, column).ok_or_else(|| Error::InvalidParameter(format!("no column {column:?}"))),
    }
}

/// Slope of the seed-averaged `column` against `k` over `window`.
/// Needs at least ten trajectories and five points in the window.
pub fn fit_rate_slope(trajectories: &[ErrorTrajectory], column: &str, window: (usize, usize)) -> Result<SlopeFit> {
    if trajectories.len() < 10 {
        return Err(Error::InsufficientData(format!("rate fit needs 10 seeds, got {}", trajectories.len())));
    }
    let pts: Vec<(usize, f64)> =
        mean_over_seeds(trajectories, column)?.into_iter().filter(|(k, _)| *k >= window.0 && *k <= window.1).collect();
    let ks: Vec<f64> = pts.iter().map(|p| p.0 as f64).collect();
    let vs: Vec<f64> = pts.iter().map(|p| p.1).collect();
    fit_log_log(&ks, &vs)
}
