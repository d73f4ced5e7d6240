//! Local polynomial smoother with tricube weights on an equally spaced
//! index. At each position the `q = ceil(span * T)` nearest neighbours
//! define the bandwidth `d_max`, points get weight `(1 - (d / d_max)^3)^3`,
//! and a weighted polynomial fit is evaluated at the position itself.
//! Near the edges the neighbourhood simply becomes one-sided.

use nalgebra::{Matrix3, Vector3};

use super::{SmoothMethod, SmoothedSeries};
use crate::error::{invalid, Error, Result};
use crate::ingest::AnnualSeries;

pub fn loess_smooth(s: &AnnualSeries, span: f64, degree: usize) -> Result<SmoothedSeries> {
    let y = s.complete()?;
    let values = loess_values(y, span, degree)?;
    Ok(SmoothedSeries {
        source_name: s.name.clone(),
        method: SmoothMethod::Loess { span, degree },
        first_year: s.first_year,
        valid: vec![true; values.len()],
        values,
    })
}

/// Distance to the `q`-th nearest index of `i` among `0..n`.
pub(crate) fn neighbour_radius(i: usize, n: usize, q: usize) -> usize {
    let covered = |r: usize| i.min(r) + (n - 1 - i).min(r) + 1;
    let mut r = q / 2;
    while covered(r) < q {
        r += 1;
    }
    while r > 0 && covered(r - 1) >= q {
        r -= 1;
    }
    r
}

pub(crate) fn tricube(u: f64) -> f64 {
    if u >= 1.0 {
        0.0
    } else {
        let a = 1.0 - u * u * u;
        a * a * a
    }
}

pub fn loess_values(y: &[f64], span: f64, degree: usize) -> Result<Vec<f64>> {
    let n = y.len();
    if !(span > 0.0 && span <= 1.0) {
        return invalid(format!("span must lie in (0, 1], got {span}"));
    }
    if degree > 2 {
        return invalid("loess degree must be 0, 1 or 2");
    }
    let q = (span * n as f64).ceil() as usize;
    if q < degree + 2 {
        return invalid(format!(
            "smoothing window of {q} points is too small for degree {degree}"
        ));
    }
    let q = q.min(n);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let radius = neighbour_radius(i, n, q) as f64;
        let lo = i.saturating_sub(radius as usize);
        let hi = (i + radius as usize).min(n - 1);
        // Weighted moments of the centred, rescaled abscissa.
        let mut mom = [0.0f64; 5];
        let mut rhs = [0.0f64; 3];
        for (j, &yj) in y.iter().enumerate().take(hi + 1).skip(lo) {
            let d = (j as f64 - i as f64) / radius;
            let w = tricube(d.abs());
            if w == 0.0 {
                continue;
            }
            let mut p = w;
            for (k, m) in mom.iter_mut().enumerate() {
                *m += p;
                if k < 3 {
                    rhs[k] += p * yj;
                }
                p *= d;
            }
        }
        let fitted = match degree {
            0 => rhs[0] / mom[0],
            1 => {
                let det = mom[0] * mom[2] - mom[1] * mom[1];
                (mom[2] * rhs[0] - mom[1] * rhs[1]) / det
            }
            _ => {
                let a = Matrix3::new(
                    mom[0], mom[1], mom[2], mom[1], mom[2], mom[3], mom[2], mom[3], mom[4],
                );
                let b = Vector3::new(rhs[0], rhs[1], rhs[2]);
                a.lu().solve(&b).ok_or(Error::RankDeficient)?[0]
            }
        };
        if !fitted.is_finite() {
            return Err(Error::RankDeficient);
        }
        out.push(fitted);
    }
    Ok(out)
}
