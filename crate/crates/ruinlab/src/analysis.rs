//! Exponent fitting and bounded-ratio comparison.
//!
//! Two-sided comparability claims ("equal up to constants") are
//! operationalized as ratio spreads: the max/min of pointwise
//! exact/formula ratios over a region, tracked across problem sizes.
//! Growth of the spread falsifies a claim; its magnitude does not.

use crate::error::{Error, Result};

/// Ordinary least squares on `(ln N, ln y)`.
#[derive(Clone, Debug)]
pub struct FitResult {
    /// Estimated exponent.
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub stderr_slope: f64,
    pub points_used: usize,
}

pub fn fit_power_law(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.len() < 3 {
        return Err(Error::Invalid(format!(
            "need at least 3 points for a power-law fit, got {}",
            points.len()
        )));
    }
    for &(n, y) in points {
        let ok = n.is_finite() && y.is_finite() && n > 0.0 && y > 0.0;
        if !ok {
            return Err(Error::Invalid(format!(
                "power-law fit needs positive data, got ({n}, {y})"
            )));
        }
    }
    let m = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let xbar = xs.iter().sum::<f64>() / m;
    let ybar = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    if sxx == 0.0 {
        return Err(Error::Invalid("all abscissae coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - ybar) * (y - ybar)).sum();
    let r_squared = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else {
        // Constant data is fit perfectly by the zero slope.
        1.0
    };
    let stderr_slope = (ss_res / ((m - 2.0) * sxx)).sqrt();
    Ok(FitResult {
        slope,
        intercept,
        r_squared,
        stderr_slope,
        points_used: points.len(),
    })
}

/// Two-point log-slopes between consecutive sizes; the abscissa of each
/// slope is the geometric midpoint. A drift of these local exponents shows
/// how far the data is from its asymptote.
pub fn successive_exponents(points: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    if points.len() < 2 {
        return Err(Error::Invalid("need at least 2 points".into()));
    }
    for &(n, y) in points {
        let ok = n.is_finite() && y.is_finite() && n > 0.0 && y > 0.0;
        if !ok {
            return Err(Error::Invalid(format!(
                "log-slopes need positive data, got ({n}, {y})"
            )));
        }
    }
    for w in points.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(Error::Invalid("points must be sorted by increasing N".into()));
        }
    }
    Ok(points
        .windows(2)
        .map(|w| {
            let slope = (w[1].1.ln() - w[0].1.ln()) / (w[1].0.ln() - w[0].0.ln());
            ((w[0].0 * w[1].0).sqrt(), slope)
        })
        .collect())
}

/// Extremes of pointwise exact/formula ratios over a region.
#[derive(Clone, Debug)]
pub struct RatioReport<S> {
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// `max_ratio / min_ratio`; invariant under scaling the formula.
    pub spread: f64,
    pub argmin: S,
    pub argmax: S,
    pub region: String,
    /// Points skipped because the exact value underflowed to zero.
    pub excluded: usize,
    /// Points that entered the ratio.
    pub points: usize,
}

/// Compare an exact quantity against a formula over a region, supplied as
/// `(state, exact, formula)` items. Exact zeros (underflow flushes) are
/// excluded and counted; a nonpositive formula value is an error.
pub fn ratio_report<S, I>(region: &str, items: I) -> Result<RatioReport<S>>
where
    S: Clone,
    I: IntoIterator<Item = (S, f64, f64)>,
{
    let mut excluded = 0usize;
    let mut points = 0usize;
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio = 0.0f64;
    let mut argmin: Option<S> = None;
    let mut argmax: Option<S> = None;

    for (state, exact, formula) in items {
        let formula_ok = formula.is_finite() && formula > 0.0;
        if !formula_ok {
            return Err(Error::Invalid(format!(
                "formula must be positive on the region, got {formula}"
            )));
        }
        if exact == 0.0 {
            excluded += 1;
            continue;
        }
        if exact < 0.0 {
            return Err(Error::Invalid(format!(
                "exact values must be nonnegative, got {exact}"
            )));
        }
        let ratio = exact / formula;
        points += 1;
        if ratio < min_ratio {
            min_ratio = ratio;
            argmin = Some(state.clone());
        }
        if ratio > max_ratio {
            max_ratio = ratio;
            argmax = Some(state);
        }
    }

    match (argmin, argmax) {
        (Some(argmin), Some(argmax)) => Ok(RatioReport {
            min_ratio,
            max_ratio,
            spread: max_ratio / min_ratio,
            argmin,
            argmax,
            region: region.to_string(),
            excluded,
            points,
        }),
        _ => Err(Error::Invalid(format!(
            "region '{region}' is empty ({excluded} excluded underflows)"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_power_law_is_recovered() {
        let pts: Vec<(f64, f64)> = (1..=8).map(|i| {
            let n = (4 * i) as f64;
            (n, 3.5 * n.powi(-2))
        }).collect();
        let fit = fit_power_law(&pts).unwrap();
        assert!((fit.slope + 2.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!(fit.stderr_slope < 1e-12);
        assert_eq!(fit.points_used, 8);
    }

    #[test]
    fn constant_data_has_zero_slope() {
        let pts = vec![(1.0, 7.0), (2.0, 7.0), (5.0, 7.0)];
        let fit = fit_power_law(&pts).unwrap();
        assert!(fit.slope.abs() < 1e-14);
        assert_eq!(fit.r_squared, 1.0);
    }

    #[test]
    fn fit_rejects_bad_input() {
        assert!(fit_power_law(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(fit_power_law(&[(1.0, 1.0), (2.0, -2.0), (3.0, 1.0)]).is_err());
        assert!(fit_power_law(&[(2.0, 1.0), (2.0, 2.0), (2.0, 3.0)]).is_err());
    }

    #[test]
    fn local_slopes_of_exact_law_are_constant() {
        let pts: Vec<(f64, f64)> = (2..7).map(|i| {
            let n = (1 << i) as f64;
            (n, n.powf(-1.5))
        }).collect();
        let slopes = successive_exponents(&pts).unwrap();
        assert_eq!(slopes.len(), 4);
        for (_, s) in slopes {
            assert!((s + 1.5).abs() < 1e-12);
        }
        assert!(successive_exponents(&pts[..1]).is_err());
        assert!(successive_exponents(&[(2.0, 1.0), (1.0, 1.0)]).is_err());
    }

    #[test]
    fn identical_inputs_have_unit_spread() {
        let items = (1..10).map(|i| (i, i as f64, i as f64));
        let rep = ratio_report("identity", items).unwrap();
        assert_eq!(rep.spread, 1.0);
        assert_eq!(rep.points, 9);
        assert_eq!(rep.excluded, 0);
    }

    #[test]
    fn underflows_are_excluded_and_counted() {
        let items = vec![(0, 0.0, 1.0), (1, 2.0, 1.0), (2, 4.0, 1.0)];
        let rep = ratio_report("with underflow", items).unwrap();
        assert_eq!(rep.excluded, 1);
        assert_eq!(rep.points, 2);
        assert_eq!(rep.spread, 2.0);
        assert_eq!(rep.argmin, 1);
        assert_eq!(rep.argmax, 2);
    }

    #[test]
    fn degenerate_regions_error() {
        assert!(ratio_report::<u32, _>("empty", std::iter::empty()).is_err());
        assert!(ratio_report("all underflow", vec![(0, 0.0, 1.0)]).is_err());
        assert!(ratio_report("bad formula", vec![(0, 1.0, 0.0)]).is_err());
        assert!(ratio_report("negative exact", vec![(0, -1.0, 1.0)]).is_err());
    }

    proptest! {
        #[test]
        fn spread_is_scale_invariant(
            values in prop::collection::vec((1e-6f64..1e6, 1e-6f64..1e6), 2..40),
            scale in 1e-3f64..1e3,
        ) {
            let base: Vec<(usize, f64, f64)> = values
                .iter()
                .enumerate()
                .map(|(i, &(e, f))| (i, e, f))
                .collect();
            let scaled: Vec<(usize, f64, f64)> = base
                .iter()
                .map(|&(i, e, f)| (i, e, f * scale))
                .collect();
            let a = ratio_report("base", base).unwrap();
            let b = ratio_report("scaled", scaled).unwrap();
            prop_assert!((a.spread - b.spread).abs() <= 1e-12 * a.spread);
        }
    }
}
