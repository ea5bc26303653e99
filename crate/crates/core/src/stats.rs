//! Small least-squares helpers shared by the diagnostics.

use serde::{Deserialize, Serialize};

use crate::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit<T> {
    pub slope: T,
    pub intercept: T,
    /// Root-mean-square residual of the fit.
    pub rms_residual: T,
}

/// Ordinary least-squares line through `(x, y)` pairs; `None` with fewer than two
/// distinct abscissae.
pub fn linear_fit<T: Real>(points: &[(T, T)]) -> Option<LinearFit<T>> {
    if points.len() < 2 {
        return None;
    }
    let n = T::from_index(points.len());
    let mx = points.iter().map(|p| p.0).sum::<T>() / n;
    let my = points.iter().map(|p| p.1).sum::<T>() / n;
    let sxx: T = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if !(sxx > T::zero()) {
        return None;
    }
    let sxy: T = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: T = points
        .iter()
        .map(|p| {
            let e = p.1 - intercept - slope * p.0;
            e * e
        })
        .sum();
    Some(LinearFit { slope, intercept, rms_residual: (ss / n).sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let pts: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 3.0 - 2.0 * i as f64)).collect();
        let f = linear_fit(&pts).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-14 && (f.intercept - 3.0).abs() < 1e-14);
        assert!(f.rms_residual < 1e-14);
        assert!(linear_fit(&[(1.0, 1.0), (1.0, 2.0)]).is_none());
    }
}
