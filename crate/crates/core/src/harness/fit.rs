/// Least-squares line `y = slope * x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
}

pub fn least_squares(points: &[(f64, f64)]) -> Option<LineFit> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some(LineFit {
        slope,
        intercept: my - slope * mx,
    })
}

/// Fit of `log(error)` against `log(dt)`.
pub fn loglog_fit(dt_err: &[(f64, f64)]) -> Option<LineFit> {
    let pts: Vec<(f64, f64)> = dt_err.iter().map(|&(h, e)| (h.ln(), e.ln())).collect();
    least_squares(&pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_point_fit_by_hand() {
        // x = 0, 1, 2; y = 1, 2, 4: slope = 1.5, intercept = 7/3 - 1.5 = 5/6.
        let fit = least_squares(&[(0.0, 1.0), (1.0, 2.0), (2.0, 4.0)]).unwrap();
        assert!((fit.slope - 1.5).abs() < 1e-15);
        assert!((fit.intercept - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn exact_power_law() {
        let pts: Vec<(f64, f64)> = [0.1, 0.05, 0.025]
            .iter()
            .map(|&h| (h, 3.0 * h * h * h * h))
            .collect();
        let fit = loglog_fit(&pts).unwrap();
        assert!((fit.slope - 4.0).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-11);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(least_squares(&[(1.0, 2.0)]).is_none());
        assert!(least_squares(&[(1.0, 2.0), (1.0, 3.0)]).is_none());
    }
}
