use crate::{Error, Result};

/// Least-squares line through `(log x, log y)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
}

pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> Result<LogLogFit> {
    if xs.len() != ys.len() {
        return Err(Error::Fit(format!("{} abscissae but {} values", xs.len(), ys.len())));
    }
    if xs.len() < 2 {
        return Err(Error::Fit("at least two points are needed".into()));
    }
    if let Some(bad) = xs.iter().chain(ys).find(|&&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::Fit(format!("log-log fit needs positive finite data, got {bad}")));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("abscissae are all equal".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (intercept + slope * x - y).powi(2))
        .sum();
    Ok(LogLogFit {
        slope,
        intercept,
        residual: (ss / n).sqrt(),
    })
}

/// Convergence order of `err ~ C h^order`.
pub fn fit_rate(hs: &[f64], errs: &[f64]) -> Result<LogLogFit> {
    if hs.len() < 3 {
        return Err(Error::Fit(format!(
            "rate fit needs at least 3 points, got {}",
            hs.len()
        )));
    }
    if hs.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Fit("mesh sizes must be strictly decreasing".into()));
    }
    if let Some(bad) = errs.iter().find(|&&e| !(e > 0.0)) {
        return Err(Error::Fit(format!(
            "errors must be positive, got {bad}; extrapolate a reference value first"
        )));
    }
    loglog_fit(hs, errs)
}

/// `value(h) ~ value + coefficient h^order`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extrapolation {
    pub value: f64,
    pub coefficient: f64,
    /// `None` when the series is constant and the order is unidentifiable.
    pub order: Option<f64>,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
}

/// Linear least squares in `(v, c)` for a fixed exponent.
fn fixed_order_fit(hs: &[f64], values: &[f64], t: f64) -> Option<(f64, f64, f64)> {
    let n = hs.len() as f64;
    let g: Vec<f64> = hs.iter().map(|h| h.powf(t)).collect();
    let mg = g.iter().sum::<f64>() / n;
    let my = values.iter().sum::<f64>() / n;
    let sgg: f64 = g.iter().map(|x| (x - mg).powi(2)).sum();
    if !(sgg > 0.0) {
        return None;
    }
    let sgy: f64 = g.iter().zip(values).map(|(x, y)| (x - mg) * (y - my)).sum();
    let c = sgy / sgg;
    let v = my - c * mg;
    let ss: f64 = g.iter().zip(values).map(|(x, y)| (v + c * x - y).powi(2)).sum();
    Some((v, c, ss))
}

/// Fits `v + C h^t` with `t` restricted to `(0, max_order]`.
pub fn extrapolate(hs: &[f64], values: &[f64], max_order: f64) -> Result<Extrapolation> {
    if hs.len() != values.len() {
        return Err(Error::Fit(format!(
            "{} mesh sizes but {} values",
            hs.len(),
            values.len()
        )));
    }
    if hs.len() < 4 {
        return Err(Error::Fit(format!(
            "extrapolation needs at least 4 points, got {}",
            hs.len()
        )));
    }
    if hs.iter().chain(values).any(|v| !v.is_finite()) || hs.iter().any(|&h| h <= 0.0) {
        return Err(Error::Fit("mesh sizes must be positive and all data finite".into()));
    }
    if !(max_order > 0.0) {
        return Err(Error::Fit(format!("maximum order must be positive, got {max_order}")));
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let spread = values.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
    if spread <= 1e-14 * mean.abs() {
        return Ok(Extrapolation {
            value: mean,
            coefficient: 0.0,
            order: None,
            residual: spread,
        });
    }

    let objective = |t: f64| fixed_order_fit(hs, values, t).map_or(f64::INFINITY, |f| f.2);
    const GRID: usize = 400;
    let step = max_order / GRID as f64;
    let best = (1..=GRID)
        .min_by(|&a, &b| objective(a as f64 * step).total_cmp(&objective(b as f64 * step)))
        .expect("grid is nonempty");
    // golden-section refinement in the neighbouring cells
    let (mut lo, mut hi) = ((best as f64 - 1.0) * step, ((best + 1) as f64 * step).min(max_order));
    lo = lo.max(1e-3 * step);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let a = hi - phi * (hi - lo);
        let b = lo + phi * (hi - lo);
        if objective(a) <= objective(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    let t = 0.5 * (lo + hi);
    let t = if objective(t) <= objective(best as f64 * step) {
        t
    } else {
        best as f64 * step
    };
    let (value, coefficient, ss) = fixed_order_fit(hs, values, t)
        .ok_or_else(|| Error::Fit("mesh sizes do not vary; order is undetermined".into()))?;
    if !value.is_finite() {
        return Err(Error::Fit(format!(
            "fit diverged (order {t}, value {value}, coefficient {coefficient})"
        )));
    }
    Ok(Extrapolation {
        value,
        coefficient,
        order: Some(t),
        residual: (ss / hs.len() as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_power_law() {
        let hs = [0.5, 0.25, 0.125, 0.0625];
        let errs: Vec<f64> = hs.iter().map(|h| h * h).collect();
        let f = fit_rate(&hs, &errs).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-10);
        assert!(f.residual < 1e-12);
    }

    #[test]
    fn noisy_power_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let hs: Vec<f64> = (0..8).map(|i| 0.5f64.powi(i)).collect();
        let errs: Vec<f64> = hs
            .iter()
            .map(|h| 3.0 * h.powf(1.5) * (1.0 + 0.01 * rng.random_range(-1.0..1.0)))
            .collect();
        let f = fit_rate(&hs, &errs).unwrap();
        assert!((1.4..=1.6).contains(&f.slope), "{}", f.slope);
    }

    #[test]
    fn rate_fit_rejects_bad_input() {
        assert!(fit_rate(&[0.5, 0.25], &[1.0, 0.5]).is_err());
        assert!(fit_rate(&[0.5, 0.25, 0.1], &[1.0, 0.0, 0.1]).is_err());
        assert!(fit_rate(&[0.5, 0.5, 0.1], &[1.0, 0.5, 0.1]).is_err());
    }

    #[test]
    fn extrapolation_of_exact_series() {
        let hs = [0.5, 0.25, 0.2, 0.125, 0.1];
        let vals: Vec<f64> = hs.iter().map(|h| 5.0 + h * h).collect();
        let e = extrapolate(&hs, &vals, 4.0).unwrap();
        assert!((e.value - 5.0).abs() < 1e-9, "{e:?}");
        assert!((e.order.unwrap() - 2.0).abs() < 1e-6, "{e:?}");
    }

    #[test]
    fn constant_series() {
        let e = extrapolate(&[0.4, 0.3, 0.2, 0.1], &[2.5; 4], 4.0).unwrap();
        assert_eq!(e.value, 2.5);
        assert_eq!(e.coefficient, 0.0);
        assert_eq!(e.order, None);
    }

    #[test]
    fn rounded_series_from_a_uniform_study() {
        // four-digit frequencies at N = 20, 30, 40, 50
        let hs = [1.0 / 20.0, 1.0 / 30.0, 1.0 / 40.0, 1.0 / 50.0];
        let vals = [0.6832, 0.6821, 0.6817, 0.6815];
        let e = extrapolate(&hs, &vals, 4.0).unwrap();
        assert!((e.value - 0.6809).abs() <= 5e-4, "{e:?}");
        let errs: Vec<f64> = vals.iter().map(|v| v - 0.6809).collect();
        let f = fit_rate(&hs, &errs).unwrap();
        assert!((f.slope - 1.5).abs() <= 0.1, "{f:?}");
    }

    #[test]
    fn extrapolation_needs_four_points() {
        assert!(extrapolate(&[0.3, 0.2, 0.1], &[1.0, 0.9, 0.8], 4.0).is_err());
    }

    proptest! {
        #[test]
        fn recovers_power_law_parameters(v in -10.0f64..10.0, c in 0.1f64..5.0, t in 0.5f64..3.5) {
            let hs: Vec<f64> = (1..=6).map(|i| 1.0 / (2.0 * i as f64)).collect();
            let vals: Vec<f64> = hs.iter().map(|h| v + c * h.powf(t)).collect();
            let e = extrapolate(&hs, &vals, 4.0).unwrap();
            prop_assert!((e.value - v).abs() < 1e-6 * (1.0 + v.abs()), "{:?}", e);
            prop_assert!((e.order.unwrap() - t).abs() < 1e-4, "{:?}", e);
        }
    }
}
