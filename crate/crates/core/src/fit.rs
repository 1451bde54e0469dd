//! Ordinary least squares for scaling-law fits.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeastSquares {
    pub coefficients: Vec<f64>,
    /// Root-mean-square residual.
    pub residual_rms: f64,
    pub r_squared: f64,
}

/// Solve `min |X c - y|` where each entry of `rows` is one row of `X`.
pub fn least_squares(rows: &[Vec<f64>], y: &[f64]) -> Result<LeastSquares> {
    let m = rows.len();
    if m == 0 || m != y.len() {
        return Err(Error::Fit(format!("{m} rows for {} observations", y.len())));
    }
    let k = rows[0].len();
    if m < k {
        return Err(Error::Fit(format!("{m} observations for {k} unknowns")));
    }
    let x = DMatrix::from_fn(m, k, |i, j| rows[i][j]);
    let yv = DVector::from_column_slice(y);
    let svd = x.clone().svd(true, true);
    let c = svd
        .solve(&yv, 1e-12)
        .map_err(|e| Error::Fit(e.to_string()))?;
    let resid = &x * &c - &yv;
    let mean = y.iter().sum::<f64>() / m as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let ss_res = resid.norm_squared();
    let coefficients: Vec<f64> = c.iter().copied().collect();
    if coefficients.iter().any(|v| !v.is_finite()) {
        return Err(Error::Fit("non-finite coefficients".into()));
    }
    Ok(LeastSquares {
        coefficients,
        residual_rms: (ss_res / m as f64).sqrt(),
        r_squared: if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
    pub r_squared: f64,
}

/// Fit `y = slope * x + intercept`.
pub fn line(x: &[f64], y: &[f64]) -> Result<Line> {
    let rows: Vec<Vec<f64>> = x.iter().map(|&v| vec![v, 1.0]).collect();
    let f = least_squares(&rows, y)?;
    Ok(Line {
        slope: f.coefficients[0],
        intercept: f.coefficients[1],
        residual_rms: f.residual_rms,
        r_squared: f.r_squared,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_plane() {
        let rows: Vec<Vec<f64>> = (0..6)
            .map(|i| {
                let t = i as f64;
                vec![t, (t + 1.0).ln(), 1.0]
            })
            .collect();
        let y: Vec<f64> = rows.iter().map(|r| 2.0 * r[0] - 0.5 * r[1] + 3.0).collect();
        let f = least_squares(&rows, &y).unwrap();
        for (c, e) in f.coefficients.iter().zip([2.0, -0.5, 3.0]) {
            assert!((c - e).abs() < 1e-10);
        }
        assert!(f.residual_rms < 1e-10);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn line_fit_and_errors() {
        let l = line(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap();
        assert!((l.slope - 2.0).abs() < 1e-12 && (l.intercept - 1.0).abs() < 1e-12);
        assert!(line(&[1.0], &[1.0]).is_err());
        assert!(least_squares(&[], &[]).is_err());
    }
}
