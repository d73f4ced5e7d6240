//! Autocorrelations, least squares, first-order autoregression with trend,
//! and the polynomial nonlinearity-in-mean test.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dependence::{DependenceReport, TestKind};
use crate::error::{invalid, Error, Result};
use crate::ingest::AnnualSeries;
use crate::stats;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcfResult {
    /// `rho[i - 1]` is the lag-`i` autocorrelation.
    pub rho: Vec<f64>,
    pub n: usize,
}

/// Sample autocorrelations of lags `1..=max_lag`, lag-0 denominator.
pub fn acf(s: &AnnualSeries, max_lag: usize) -> Result<AcfResult> {
    acf_values(s.complete()?, max_lag)
}

pub fn acf_values(y: &[f64], max_lag: usize) -> Result<AcfResult> {
    let n = y.len();
    if max_lag == 0 || max_lag >= n {
        return invalid(format!("max_lag must lie in 1..{n}, got {max_lag}"));
    }
    let m = stats::mean(y);
    let c: Vec<f64> = y.iter().map(|v| v - m).collect();
    let sums = stats::lagged_products(&c, max_lag);
    if sums[0] <= 0.0 || stats::is_constant(y) {
        return Err(Error::ZeroVariance);
    }
    Ok(AcfResult {
        rho: sums[1..].iter().map(|s| s / sums[0]).collect(),
        n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub rmse: f64,
    pub r2: f64,
    pub n: usize,
    pub residuals: Vec<f64>,
}

impl RegressionFit {
    pub fn ssr(&self) -> f64 {
        self.residuals.iter().map(|r| r * r).sum()
    }

    /// Two-sided t-test p-value for coefficient `i` (normal approximation
    /// is not used; Student t with n - k degrees of freedom).
    pub fn p_value(&self, i: usize) -> f64 {
        use statrs::distribution::{ContinuousCDF, StudentsT};
        let dof = (self.n - self.coefficients.len()) as f64;
        let t = self.coefficients[i] / self.std_errors[i];
        if !t.is_finite() {
            return 0.0;
        }
        let dist = StudentsT::new(0.0, 1.0, dof).expect("positive dof");
        2.0 * dist.sf(t.abs())
    }
}

/// Ordinary least squares of `y` on the columns of `x` (rows are
/// observations). Standard errors are the classical homoskedastic ones.
pub fn ols(y: &[f64], x: &DMatrix<f64>) -> Result<RegressionFit> {
    let n = y.len();
    let k = x.ncols();
    if x.nrows() != n {
        return invalid(format!(
            "design has {} rows for {n} observations",
            x.nrows()
        ));
    }
    if n <= k {
        return invalid(format!(
            "need more observations ({n}) than regressors ({k})"
        ));
    }
    let qr = x.clone().qr();
    let r = qr.r();
    for j in 0..k {
        let col_norm = x.column(j).norm();
        if col_norm == 0.0 || r[(j, j)].abs() <= 1e-10 * col_norm {
            return Err(Error::RankDeficient);
        }
    }
    let yv = DVector::from_column_slice(y);
    let qty = qr.q().transpose() * &yv;
    let beta = r.solve_upper_triangular(&qty).ok_or(Error::RankDeficient)?;
    let fitted = x * &beta;
    let residuals: Vec<f64> = (0..n).map(|i| y[i] - fitted[i]).collect();
    let ssr: f64 = residuals.iter().map(|e| e * e).sum();
    let sigma2 = ssr / (n - k) as f64;

    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or(Error::RankDeficient)?;
    let xtx_inv = &r_inv * r_inv.transpose();
    let std_errors = (0..k).map(|j| (sigma2 * xtx_inv[(j, j)]).sqrt()).collect();

    let sst = stats::centered_ss(y);
    let r2 = if sst > 0.0 {
        (1.0 - ssr / sst).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(RegressionFit {
        coefficients: beta.iter().copied().collect(),
        std_errors,
        rmse: sigma2.sqrt(),
        r2,
        n,
        residuals,
    })
}

/// Fit `y_t = alpha + beta * y_{t-1} + gamma * t`, with the trend counted
/// from 1 at the second observation. Coefficients are `[alpha, beta, gamma]`.
pub fn ar1_trend_fit(s: &AnnualSeries) -> Result<RegressionFit> {
    let y = s.complete()?;
    let n = y.len();
    if n < 10 {
        return invalid(format!(
            "AR(1) with trend needs at least 10 observations, got {n}"
        ));
    }
    let x = DMatrix::from_fn(n - 1, 3, |i, j| match j {
        0 => 1.0,
        1 => y[i],
        _ => (i + 1) as f64,
    });
    ols(&y[1..], &x)
}

/// AR(`order`) with intercept and no trend; returns the fit on
/// observations `order..n`.
pub fn ar_fit(y: &[f64], order: usize) -> Result<RegressionFit> {
    let n = y.len();
    if order == 0 || n <= 2 * order + 1 {
        return invalid(format!("cannot fit AR({order}) to {n} observations"));
    }
    let x = DMatrix::from_fn(n - order, order + 1, |i, j| {
        if j == 0 {
            1.0
        } else {
            y[order + i - j]
        }
    });
    ols(&y[order..], &x)
}

/// Indices of a maximal linearly independent prefix-greedy subset of the
/// columns, by modified Gram-Schmidt with a relative tolerance.
fn independent_columns(x: &DMatrix<f64>) -> Vec<usize> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut keep = Vec::new();
    for j in 0..x.ncols() {
        let col = x.column(j).into_owned();
        let norm = col.norm();
        if norm == 0.0 {
            continue;
        }
        let mut v = col;
        for q in &basis {
            let proj = q.dot(&v);
            v.axpy(-proj, q, 1.0);
        }
        let rem = v.norm();
        if rem > 1e-8 * norm {
            basis.push(v / rem);
            keep.push(j);
        }
    }
    keep
}

/// Polynomial (Taylor-expansion) test for neglected nonlinearity in the
/// conditional mean. Residuals of a linear AR(`order`) are regressed on
/// the AR regressors plus every second- and third-order product of the
/// lags; the statistic is `n * R^2` with chi-squared reference on the
/// number of added terms that survived the collinearity screen.
pub fn terasvirta_nonlinearity(s: &AnnualSeries, order: usize) -> Result<DependenceReport> {
    let y = s.complete()?;
    let n = y.len();
    if n < 30 {
        return invalid(format!(
            "nonlinearity test needs at least 30 observations, got {n}"
        ));
    }
    if order == 0 {
        return invalid("lag order must be at least 1");
    }
    if stats::is_constant(y) {
        return Err(Error::ZeroVariance);
    }
    let linear = ar_fit(y, order)?;
    let rows = n - order;
    let lag = |i: usize, l: usize| y[order + i - l];

    let mut columns: Vec<Vec<f64>> = Vec::new();
    columns.push(vec![1.0; rows]);
    for l in 1..=order {
        columns.push((0..rows).map(|i| lag(i, l)).collect());
    }
    let base = columns.len();
    for a in 1..=order {
        for b in a..=order {
            columns.push((0..rows).map(|i| lag(i, a) * lag(i, b)).collect());
        }
    }
    for a in 1..=order {
        for b in a..=order {
            for c in b..=order {
                columns.push(
                    (0..rows)
                        .map(|i| lag(i, a) * lag(i, b) * lag(i, c))
                        .collect(),
                );
            }
        }
    }
    let candidate_terms = columns.len() - base;
    let full = DMatrix::from_fn(rows, columns.len(), |i, j| columns[j][i]);
    let keep = independent_columns(&full);
    let added = keep.iter().filter(|&&j| j >= base).count();
    let dropped = candidate_terms - added;
    if added == 0 {
        return invalid("every nonlinear term is collinear with the linear regressors");
    }
    let aux = DMatrix::from_fn(rows, keep.len(), |i, j| full[(i, keep[j])]);
    let fit = ols(&linear.residuals, &aux)?;
    let stat = rows as f64 * fit.r2;
    let mut report = DependenceReport::new(
        TestKind::Nonlin,
        stat,
        stats::chi2_sf(stat, added as f64),
        s,
    );
    report.chosen_lag = Some(order);
    report.dof = Some(added as f64);
    report.dropped_terms = Some(dropped);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::rng::rng_stream;

    #[test]
    fn alternating_series_has_rho1_near_minus_one() {
        let y: Vec<f64> = (0..100)
            .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let r = acf_values(&y, 3).unwrap();
        assert!((r.rho[0] + 1.0).abs() < 2.0 / 100.0, "{}", r.rho[0]);
    }

    #[test]
    fn white_noise_rho1_is_small() {
        let y = rng_stream(11, 0).normals(10_000);
        let r = acf_values(&y, 1).unwrap();
        assert!(r.rho[0].abs() < 5.0 / 100.0);
    }

    #[test]
    fn acf_preconditions() {
        assert!(acf_values(&[1.0, 2.0, 3.0, 4.0], 4).is_err());
        assert_eq!(acf_values(&[2.0; 10], 2).unwrap_err(), Error::ZeroVariance);
    }

    fn with_intercept(x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(x.len(), 2, |i, j| if j == 0 { 1.0 } else { x[i] })
    }

    #[test]
    fn ols_exact_fit() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let fit = ols(&y, &with_intercept(&x)).unwrap();
        assert!((fit.coefficients[1] - 2.0).abs() < 1e-12);
        assert!(fit.coefficients[0].abs() < 1e-12);
        assert!((fit.r2 - 1.0).abs() < 1e-12);
        assert!(fit.rmse < 1e-12);
    }

    #[test]
    fn ols_hand_normal_equations() {
        // X'X = [[4, 4], [4, 6]], X'y = [8, 10] -> (intercept, slope) = (1, 1).
        let fit = ols(
            &[1.0, 2.0, 2.0, 3.0],
            &with_intercept(&[0.0, 1.0, 1.0, 2.0]),
        )
        .unwrap();
        assert!((fit.coefficients[0] - 1.0).abs() < 1e-12);
        assert!((fit.coefficients[1] - 1.0).abs() < 1e-12);
        // SSR = 0, so both standard errors vanish.
        assert!(fit.std_errors.iter().all(|s| *s < 1e-7));
    }

    #[test]
    fn ols_rejects_rank_deficiency() {
        let x = DMatrix::from_fn(6, 3, |i, j| if j == 0 { 1.0 } else { i as f64 });
        assert_eq!(ols(&[1.0; 6], &x).unwrap_err(), Error::RankDeficient);
        assert!(ols(&[1.0, 2.0], &with_intercept(&[1.0, 2.0])).is_err());
    }

    #[test]
    fn ols_residuals_are_orthogonal_to_design() {
        let mut rng = rng_stream(5, 0);
        let n = 80;
        let x = DMatrix::from_fn(n, 4, |_, j| if j == 0 { 1.0 } else { rng.normal() * 3.0 });
        let y: Vec<f64> = (0..n)
            .map(|i| x[(i, 1)] - 0.5 * x[(i, 2)] + rng.normal())
            .collect();
        let fit = ols(&y, &x).unwrap();
        for j in 0..4 {
            let dot: f64 = (0..n).map(|i| x[(i, j)] * fit.residuals[i]).sum();
            let scale = x.column(j).norm() * fit.ssr().sqrt();
            assert!(dot.abs() <= 1e-8 * scale, "column {j}: {dot}");
        }
    }

    #[test]
    fn ar1_recovers_coefficient() {
        let mut rng = rng_stream(7, 0);
        let mut y = vec![0.0; 10_000];
        for t in 1..y.len() {
            y[t] = 0.5 * y[t - 1] + rng.normal();
        }
        let fit = ar1_trend_fit(&AnnualSeries::from_values(y)).unwrap();
        assert!((fit.coefficients[1] - 0.5).abs() < 0.03);
    }

    #[test]
    fn ar1_pure_trend_and_constant() {
        let y: Vec<f64> = (1..=50).map(|t| 0.01 * t as f64).collect();
        let fit = ar1_trend_fit(&AnnualSeries::from_values(y));
        // The lag column is itself an exact trend, so the design is singular.
        assert_eq!(fit.unwrap_err(), Error::RankDeficient);

        let mut rng = rng_stream(8, 0);
        let y: Vec<f64> = (1..=50)
            .map(|t| 0.01 * t as f64 + 1e-3 * rng.normal())
            .collect();
        let fit = ar1_trend_fit(&AnnualSeries::from_values(y)).unwrap();
        assert!(fit.r2 > 0.99);

        let flat = AnnualSeries::from_values(vec![3.0; 20]);
        assert_eq!(ar1_trend_fit(&flat).unwrap_err(), Error::RankDeficient);
    }

    #[test]
    fn ar1_shift_only_moves_intercept() {
        let y = rng_stream(9, 0).normals(200);
        let shifted: Vec<f64> = y.iter().map(|v| v + 12.5).collect();
        let a = ar1_trend_fit(&AnnualSeries::from_values(y)).unwrap();
        let b = ar1_trend_fit(&AnnualSeries::from_values(shifted)).unwrap();
        assert!((a.coefficients[1] - b.coefficients[1]).abs() < 1e-8);
        assert!((a.coefficients[2] - b.coefficients[2]).abs() < 1e-8);
        assert!((a.coefficients[0] - b.coefficients[0]).abs() > 1.0);
    }

    #[test]
    fn nonlinearity_short_series_rejected() {
        let s = AnnualSeries::from_values(rng_stream(1, 0).normals(20));
        assert!(terasvirta_nonlinearity(&s, 1).is_err());
    }

    #[test]
    fn nonlinearity_reports_dof() {
        let s = AnnualSeries::from_values(rng_stream(1, 1).normals(300));
        let r = terasvirta_nonlinearity(&s, 2).unwrap();
        assert_eq!(r.dof, Some(7.0));
        assert_eq!(r.dropped_terms, Some(0));
        assert!((0.0..=1.0).contains(&r.p_value));
    }
}
