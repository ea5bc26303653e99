use crate::error::{Error, Result};
use crate::quadrature::GaussRule;
use crate::weights::WeightModel;
use crate::Real;

/// value · e^{ln_scale}, for quantities that overflow `f64` at large degree.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogValue<T> {
    pub ln_scale: T,
    pub value: T,
}

impl<T: Real> LogValue<T> {
    pub fn zero() -> Self {
        Self { ln_scale: T::zero(), value: T::zero() }
    }

    pub fn to_value(self) -> T {
        if self.value == T::zero() {
            T::zero()
        } else {
            self.value * self.ln_scale.exp()
        }
    }

    /// ln of a positive value.
    pub fn ln(self) -> T {
        self.ln_scale + self.value.ln()
    }

    /// self · e^{shift}, evaluated without forming e^{ln_scale} separately.
    pub fn scaled_exp(self, shift: T) -> T {
        if self.value == T::zero() {
            T::zero()
        } else {
            self.value * (self.ln_scale + shift).exp()
        }
    }
}

/// Radial moments 2π ∫_lo^hi r^a e^{−2φ(r)} g(r) dr for a radial weight.
///
/// In t = ln r the exponent F(t) = (a+1)t − 2φ(e^t) is concave (F'' = −2r²Δφ),
/// so the integrand is a single bump. Panels of 16-point Gauss–Legendre are
/// marched outward from its peak, sized by |F'| and |F''|, until F has dropped
/// by `drop` below the peak.
pub struct MomentIntegrator<'a, T: Real> {
    model: &'a WeightModel<T>,
    rule: GaussRule<T>,
    drop: T,
}

const MAX_PANELS: usize = 200_000;

impl<'a, T: Real> MomentIntegrator<'a, T> {
    pub fn new(model: &'a WeightModel<T>) -> Result<Self> {
        if !model.is_radial() {
            return Err(Error::NotRadial("moment integration"));
        }
        Ok(Self { model, rule: GaussRule::new(16), drop: T::lit(40.0) })
    }

    fn f(&self, a1: T, t: T) -> Result<T> {
        Ok(a1 * t - T::lit(2.0) * self.model.phi_radial(t.exp())?)
    }

    fn df(&self, a1: T, t: T) -> Result<T> {
        Ok(a1 - T::lit(2.0) * self.model.r_dphi(t.exp())?)
    }

    fn d2f(&self, t: T) -> Result<T> {
        let r = t.exp();
        Ok(T::lit(2.0) * r * r * self.model.laplacian_radial(r)?)
    }

    fn step(&self, a1: T, t: T) -> Result<T> {
        let slope = self.df(a1, t)?.abs();
        let curv = self.d2f(t)?.abs();
        let mut h = T::one();
        if slope > T::zero() {
            h = h.min(T::lit(8.0) / slope);
        }
        if curv > T::zero() {
            h = h.min(T::lit(4.0) / curv.sqrt());
        }
        Ok(h)
    }

    fn peak(&self, a1: T, t_lo: T, t_hi: T) -> Result<T> {
        if t_lo.is_finite() && self.df(a1, t_lo)? <= T::zero() {
            return Ok(t_lo);
        }
        if t_hi.is_finite() && self.df(a1, t_hi)? >= T::zero() {
            return Ok(t_hi);
        }
        let mut left = if t_lo.is_finite() { t_lo } else { T::zero().min(t_hi) };
        let mut guard = 0;
        while self.df(a1, left)? <= T::zero() {
            left = left - T::lit(2.0);
            guard += 1;
            if guard > 400 {
                return Err(Error::DivergentIntegral("no peak of the moment integrand".into()));
            }
        }
        let mut right = if t_hi.is_finite() { t_hi } else { left.max(T::zero()) + T::one() };
        guard = 0;
        while self.df(a1, right)? >= T::zero() {
            right = right + T::lit(2.0);
            guard += 1;
            if guard > 400 {
                return Err(Error::DivergentIntegral("weight does not grow fast enough for the moment".into()));
            }
        }
        for _ in 0..200 {
            let mid = (left + right) / T::lit(2.0);
            if mid <= left || mid >= right {
                break;
            }
            if self.df(a1, mid)? > T::zero() {
                left = mid;
            } else {
                right = mid;
            }
        }
        Ok((left + right) / T::lit(2.0))
    }

    /// 2π ∫_lo^hi r^a e^{−2φ(r)} · extra(r) dr. `breakpoints` are radii where
    /// `extra` is not smooth.
    pub fn integrate(&self, a: T, lo: T, hi: T, extra: Option<&dyn Fn(T) -> T>, breakpoints: &[T]) -> Result<LogValue<T>> {
        if !(hi > lo) {
            return Ok(LogValue::zero());
        }
        let a1 = a + T::one();
        if lo <= T::zero() && a1 <= T::zero() {
            return Err(Error::DivergentIntegral(format!("r^{a} is not integrable at the origin")));
        }
        let t_lo = if lo > T::zero() { lo.ln() } else { T::neg_infinity() };
        let t_hi = if hi.is_finite() { hi.ln() } else { T::infinity() };
        let mut cuts: Vec<T> = breakpoints
            .iter()
            .filter(|b| **b > lo && **b < hi)
            .map(|b| b.ln())
            .collect();
        cuts.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));

        let t_star = self.peak(a1, t_lo, t_hi)?;
        let f_star = self.f(a1, t_star)?;
        let floor = f_star - self.drop;
        let mut sum = T::zero();
        let mut panel = |x0: T, x1: T| -> Result<()> {
            for (t, w) in self.rule.mapped(x0, x1) {
                let mut v = (self.f(a1, t)? - f_star).exp();
                if let Some(g) = extra {
                    v = v * g(t.exp());
                }
                sum = sum + w * v;
            }
            Ok(())
        };

        // rightward
        let mut t = t_star;
        let mut count = 0;
        while t < t_hi {
            let mut next = t + self.step(a1, t)?;
            if let Some(c) = cuts.iter().find(|c| **c > t && **c < next) {
                next = *c;
            }
            next = next.min(t_hi);
            panel(t, next)?;
            t = next;
            count += 1;
            if t < t_hi && self.f(a1, t)? < floor && self.df(a1, t)? < T::zero() {
                break;
            }
            if count > MAX_PANELS {
                return Err(Error::DivergentIntegral("moment tail does not decay".into()));
            }
        }
        // leftward
        let mut t = t_star;
        count = 0;
        while t > t_lo {
            let mut next = t - self.step(a1, t)?;
            if let Some(c) = cuts.iter().rev().find(|c| **c < t && **c > next) {
                next = *c;
            }
            next = next.max(t_lo);
            panel(next, t)?;
            t = next;
            count += 1;
            if t > t_lo && self.f(a1, t)? < floor && self.df(a1, t)? > T::zero() {
                break;
            }
            if count > MAX_PANELS {
                return Err(Error::DivergentIntegral("moment integrand does not decay at the origin".into()));
            }
        }
        Ok(LogValue { ln_scale: f_star + T::TAU().ln(), value: sum })
    }

    /// Radius beyond which the integrand of the degree-n basis norm is below
    /// e^{−drop} times its peak.
    pub fn tail_radius(&self, a: T) -> Result<T> {
        let a1 = a + T::one();
        let t_star = self.peak(a1, T::neg_infinity(), T::infinity())?;
        let floor = self.f(a1, t_star)? - self.drop;
        let mut t = t_star;
        while self.f(a1, t)? >= floor {
            t = t + self.step(a1, t)?;
        }
        Ok(t.exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ln_factorial(n: usize) -> f64 {
        (1..=n).map(|k| (k as f64).ln()).sum()
    }

    #[test]
    fn gaussian_moments() {
        let model = WeightModel::<f64>::classical();
        let mi = MomentIntegrator::new(&model).unwrap();
        for n in [0usize, 1, 5, 40, 300] {
            let v = mi.integrate((2 * n + 1) as f64, 0.0, f64::INFINITY, None, &[]).unwrap();
            let exact = std::f64::consts::PI.ln() + ln_factorial(n);
            assert!((v.ln() - exact).abs() < 1e-13 * exact.abs().max(1.0), "n={n}: {} vs {exact}", v.ln());
        }
    }

    #[test]
    fn truncated_moment_matches_incomplete_gamma() {
        // 2π∫_0^1 r e^{-r²} dr = π(1 − e^{-1})
        let model = WeightModel::<f64>::classical();
        let mi = MomentIntegrator::new(&model).unwrap();
        let v = mi.integrate(1.0, 0.0, 1.0, None, &[]).unwrap().to_value();
        let exact = std::f64::consts::PI * (1.0 - (-1.0f64).exp());
        assert!((v - exact).abs() < 1e-14 * exact);
        // 2π∫_1^∞ r^{-1} e^{-r²} dr = π E1(1)
        let v = mi.integrate(-1.0, 1.0, f64::INFINITY, None, &[]).unwrap().to_value();
        let e1 = 0.219_383_934_395_520_3;
        assert!((v - std::f64::consts::PI * e1).abs() < 1e-14);
        assert!(mi.integrate(-1.0, 0.0, 1.0, None, &[]).is_err());
    }
}
