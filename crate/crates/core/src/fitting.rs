//! Least-squares fit of `y(d) = a·d^b·e^{c·d}`.
//!
//! The model is linear after taking logs, `ln y = ln a + b ln d + c d`, so
//! the fit is ordinary least squares on the design `(1, ln d, d)`.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitResult {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// `ln y_i − (ln a + b ln d_i + c d_i)`.
    pub residuals: Vec<f64>,
    pub r_squared_log: f64,
    /// Standard errors of `(ln a, b, c)`; absent with only three points.
    pub std_errors: Option<[f64; 3]>,
    pub points: Vec<(f64, f64)>,
}

impl FitResult {
    pub fn eval(&self, d: f64) -> f64 {
        eval_model(self, d)
    }
}

/// `a·d^b·e^{cd}`.
pub fn eval_model(fit: &FitResult, d: f64) -> f64 {
    fit.a * d.powf(fit.b) * (fit.c * d).exp()
}

/// Solves `A x = rhs` for a 3×3 system by Gaussian elimination with partial
/// pivoting. `None` if a pivot falls below `tol`.
fn solve3(a: [[f64; 3]; 3], rhs: [f64; 3], tol: f64) -> Option<[f64; 3]> {
    let mut m = a;
    let mut v = rhs;
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap_or(col);
        if m[pivot][col].abs() <= tol {
            return None;
        }
        m.swap(col, pivot);
        v.swap(col, pivot);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] -= f * m[col][k];
            }
            v[row] -= f * v[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|k| m[row][k] * x[k]).sum();
        x[row] = (v[row] - tail) / m[row][row];
    }
    Some(x)
}

fn matvec(a: &[[f64; 3]; 3], x: &[f64; 3]) -> [f64; 3] {
    [0, 1, 2].map(|i| a[i][0] * x[0] + a[i][1] * x[1] + a[i][2] * x[2])
}

/// Fits `ln y = ln a + b ln d + c d` by ordinary least squares.
pub fn fit_power_exponential(points: &[(f64, f64)]) -> Result<FitResult> {
    for (index, &(d, y)) in points.iter().enumerate() {
        if !d.is_finite() || !y.is_finite() {
            return Err(Error::NonFiniteInput { index });
        }
        if d <= 0.0 {
            return Err(Error::NonPositive { index, value: d });
        }
        if y <= 0.0 {
            return Err(Error::NonPositive { index, value: y });
        }
    }
    let mut distinct: Vec<f64> = points.iter().map(|p| p.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::RankDeficient(format!(
            "need at least 3 distinct d values, got {}",
            distinct.len()
        )));
    }

    let rows: Vec<[f64; 3]> = points.iter().map(|&(d, _)| [1.0, d.ln(), d]).collect();
    let ly: Vec<f64> = points.iter().map(|&(_, y)| y.ln()).collect();
    let mut xtx = [[0.0; 3]; 3];
    let mut xty = [0.0; 3];
    for (x, &l) in rows.iter().zip(&ly) {
        for i in 0..3 {
            xty[i] += x[i] * l;
            for j in 0..3 {
                xtx[i][j] += x[i] * x[j];
            }
        }
    }
    let scale = xtx.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = scale * 1e-13;
    let singular = || Error::RankDeficient("design matrix (1, ln d, d) is singular".into());
    let mut beta = solve3(xtx, xty, tol).ok_or_else(singular)?;
    // One round of iterative refinement.
    let fitted = matvec(&xtx, &beta);
    let resid = [0, 1, 2].map(|i| xty[i] - fitted[i]);
    if let Some(corr) = solve3(xtx, resid, tol) {
        for i in 0..3 {
            beta[i] += corr[i];
        }
    }

    let residuals: Vec<f64> = rows
        .iter()
        .zip(&ly)
        .map(|(x, l)| l - (beta[0] * x[0] + beta[1] * x[1] + beta[2] * x[2]))
        .collect();
    let m = points.len() as f64;
    let mean = ly.iter().sum::<f64>() / m;
    let tss: f64 = ly.iter().map(|l| (l - mean).powi(2)).sum();
    let rss: f64 = residuals.iter().map(|r| r * r).sum();
    let r_squared_log = if tss > 0.0 { 1.0 - rss / tss } else { 1.0 };

    let std_errors = if points.len() > 3 {
        let sigma2 = rss / (m - 3.0);
        let mut se = [0.0; 3];
        for (j, s) in se.iter_mut().enumerate() {
            let mut e = [0.0; 3];
            e[j] = 1.0;
            let col = solve3(xtx, e, tol).ok_or_else(singular)?;
            *s = (sigma2 * col[j]).max(0.0).sqrt();
        }
        Some(se)
    } else {
        None
    };

    let fit = FitResult {
        a: beta[0].exp(),
        b: beta[1],
        c: beta[2],
        residuals,
        r_squared_log,
        std_errors,
        points: points.to_vec(),
    };
    if !(fit.a.is_finite() && fit.b.is_finite() && fit.c.is_finite()) {
        return Err(Error::NonFinite("fitted coefficients".into()));
    }
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(a: f64, b: f64, c: f64) -> impl Fn(f64) -> f64 {
        move |d: f64| a * d.powf(b) * (c * d).exp()
    }

    #[test]
    fn recovers_reference_coefficients() {
        let f = model(0.0015, -2.19, 1.02);
        let pts: Vec<(f64, f64)> = (2..=8).map(|d| (d as f64, f(d as f64))).collect();
        let fit = fit_power_exponential(&pts).unwrap();
        assert!(((fit.a - 0.0015) / 0.0015).abs() < 1e-10);
        assert!(((fit.b + 2.19) / 2.19).abs() < 1e-10);
        assert!(((fit.c - 1.02) / 1.02).abs() < 1e-10);
        assert!((fit.r_squared_log - 1.0).abs() < 1e-12);
        assert!(fit.std_errors.unwrap().iter().all(|s| *s < 1e-6));
    }

    #[test]
    fn constant_data() {
        let fit = fit_power_exponential(&[(2.0, 1.0), (3.0, 1.0), (4.0, 1.0)]).unwrap();
        assert!((fit.a - 1.0).abs() < 1e-12);
        assert!(fit.b.abs() < 1e-12);
        assert!(fit.c.abs() < 1e-12);
        assert!(fit.std_errors.is_none());
        assert_eq!(eval_model(&fit, 5.0).round(), 1.0);
    }

    #[test]
    fn rejects_bad_designs() {
        assert!(matches!(
            fit_power_exponential(&[(2.0, 1.0), (3.0, 1.0)]),
            Err(Error::RankDeficient(_))
        ));
        assert!(matches!(
            fit_power_exponential(&[(2.0, 1.0), (2.0, 2.0), (3.0, 1.0), (3.0, 5.0)]),
            Err(Error::RankDeficient(_))
        ));
        assert!(matches!(
            fit_power_exponential(&[(2.0, 1.0), (3.0, 0.0), (4.0, 1.0)]),
            Err(Error::NonPositive { index: 1, .. })
        ));
        assert!(fit_power_exponential(&[(2.0, 1.0), (3.0, f64::NAN), (4.0, 1.0)]).is_err());
    }

    #[test]
    fn reference_fit_at_eight() {
        let fit = FitResult {
            a: 0.0015,
            b: -2.19,
            c: 1.02,
            residuals: vec![],
            r_squared_log: 1.0,
            std_errors: None,
            points: vec![],
        };
        let v = eval_model(&fit, 8.0);
        let expected = 0.0015 * 8f64.powf(-2.19) * 8.16f64.exp();
        assert!((v - expected).abs() < 1e-15);
        assert!((v - 0.055).abs() < 0.002);
    }
}
