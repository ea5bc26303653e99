use serde::Serialize;

use super::moments::MomentIntegrator;
use crate::error::{Error, Result};
use crate::weights::WeightModel;
use crate::Real;

/// Squared norms b_n = ‖z^n‖² = 2π ∫ r^{2n+1} e^{−2φ(r)} dr, stored as ln b_n.
#[derive(Clone, Debug, Serialize)]
pub struct BasisTable<T> {
    pub n_max: usize,
    pub ln_b: Vec<T>,
    /// Radius past which the degree-n_max integrand has dropped by e^{−40}.
    pub truncation_radius: T,
}

impl<T: Real> BasisTable<T> {
    pub fn new(model: &WeightModel<T>, n_max: usize) -> Result<Self> {
        let mi = MomentIntegrator::new(model)?;
        let mut ln_b = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let v = mi.integrate(T::from_index(2 * n + 1), T::zero(), T::infinity(), None, &[])?;
            if !(v.value > T::zero()) {
                return Err(Error::Quadrature(format!("basis norm b_{n} is not positive")));
            }
            ln_b.push(v.ln());
        }
        let truncation_radius = mi.tail_radius(T::from_index(2 * n_max + 1))?;
        Ok(Self { n_max, ln_b, truncation_radius })
    }

    pub fn ln_norm_sq(&self, n: usize) -> T {
        self.ln_b[n]
    }

    pub fn norm_sq(&self, n: usize) -> T {
        self.ln_b[n].exp()
    }

    /// max over n of (2 ln b_n − ln b_{n−1} − ln b_{n+1}); nonpositive for a
    /// log-convex moment sequence.
    pub fn log_convexity_defect(&self) -> T {
        self.ln_b
            .windows(3)
            .map(|w| T::lit(2.0) * w[1] - w[0] - w[2])
            .fold(T::neg_infinity(), T::max)
    }
}
