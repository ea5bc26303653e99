use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::basis::BasisTable;
use crate::error::{Error, Result};
use crate::stats::linear_fit;
use crate::weights::WeightModel;
use crate::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelValue<T> {
    pub value: Complex<T>,
    /// Geometric estimate of the omitted tail Σ_{n>N} |w z̄|^n / b_n.
    pub tail: T,
}

/// Compensated complex accumulator.
struct Neumaier<T> {
    sum: Complex<T>,
    comp: Complex<T>,
}

impl<T: Real> Neumaier<T> {
    fn new() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self { sum: z, comp: z }
    }

    fn add_part(sum: &mut T, comp: &mut T, x: T) {
        let t = *sum + x;
        if sum.abs() >= x.abs() {
            *comp = *comp + ((*sum - t) + x);
        } else {
            *comp = *comp + ((x - t) + *sum);
        }
        *sum = t;
    }

    fn add(&mut self, x: Complex<T>) {
        Self::add_part(&mut self.sum.re, &mut self.comp.re, x.re);
        Self::add_part(&mut self.sum.im, &mut self.comp.im, x.im);
    }

    fn total(&self) -> Complex<T> {
        self.sum + self.comp
    }
}

/// ln of the terms |w z̄|^n / b_n, n = 0..=N.
fn log_terms<T: Real>(basis: &BasisTable<T>, modulus: T) -> Vec<T> {
    let lm = modulus.ln();
    (0..=basis.n_max)
        .map(|n| if n == 0 { -basis.ln_b[0] } else { T::from_index(n) * lm - basis.ln_b[n] })
        .collect()
}

fn tail_estimate<T: Real>(logs: &[T]) -> T {
    let n = logs.len();
    if n < 2 {
        return T::infinity();
    }
    let q = (logs[n - 1] - logs[n - 2]).exp();
    if q < T::one() {
        logs[n - 1].exp() * q / (T::one() - q)
    } else {
        T::infinity()
    }
}

/// K(w, z) = Σ_{n≤N} (w z̄)^n / b_n.
pub fn kernel_eval<T: Real>(basis: &BasisTable<T>, w: Complex<T>, z: Complex<T>) -> Result<KernelValue<T>> {
    let zeta = w * z.conj();
    let modulus = zeta.norm();
    if modulus == T::zero() {
        return Ok(KernelValue { value: Complex::new((-basis.ln_b[0]).exp(), T::zero()), tail: T::zero() });
    }
    let logs = log_terms(basis, modulus);
    let unit = zeta / modulus;
    let mut acc = Neumaier::new();
    let mut phase = Complex::new(T::one(), T::zero());
    for l in &logs {
        acc.add(phase * l.exp());
        phase = phase * unit;
    }
    let value = acc.total();
    let tail = tail_estimate(&logs);
    let tolerance = T::lit(1e-8);
    if tail > tolerance * value.norm() {
        return Err(Error::KernelTail { tail: tail.as_f64(), tolerance: tolerance.as_f64() });
    }
    Ok(KernelValue { value, tail })
}

/// ln ‖K_z‖ = ½ ln K(z, z), evaluated in the log domain.
pub fn kernel_norm_ln<T: Real>(basis: &BasisTable<T>, z: Complex<T>) -> Result<T> {
    let modulus = z.norm_sqr();
    if modulus == T::zero() {
        return Ok(-basis.ln_b[0] / T::lit(2.0));
    }
    let logs = log_terms(basis, modulus);
    let peak = logs.iter().copied().fold(T::neg_infinity(), T::max);
    let sum: T = logs.iter().map(|l| (*l - peak).exp()).sum();
    let tail = tail_estimate(&logs);
    let ln_sum = peak + sum.ln();
    if !(tail.ln() - ln_sum < T::lit(1e-8).ln()) {
        return Err(Error::KernelTail { tail: tail.as_f64(), tolerance: 1e-8 });
    }
    Ok(ln_sum / T::lit(2.0))
}

/// Fit of ln(|K(w,z)| ρ(w) ρ(z) e^{−φ(w)−φ(z)}) ≈ ln C − κ (|z−w|/ρ(z))^ε.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit<T> {
    pub epsilon: T,
    pub kappa: T,
    pub ln_c: T,
    pub rms_residual: T,
    pub samples: usize,
    /// Residual above 0.25 in log units.
    pub flagged: bool,
}

pub fn kernel_decay_fit<T: Real>(model: &WeightModel<T>, basis: &BasisTable<T>, z: Complex<T>, offsets: &[Complex<T>]) -> Result<DecayFit<T>> {
    let rho_z = model.rho(z)?;
    let phi_z = model.phi(z)?;
    let mut data = Vec::new();
    for &o in offsets {
        if o == Complex::new(T::zero(), T::zero()) {
            continue;
        }
        let w = z + o;
        let k = kernel_eval(basis, w, z)?;
        let y = k.value.norm().ln() + model.rho(w)?.ln() + rho_z.ln() - model.phi(w)? - phi_z;
        data.push((o.norm() / rho_z, y));
    }
    if data.len() < 3 {
        return Err(Error::invalid("offsets", "need at least three nonzero offsets"));
    }
    let fit_at = |eps: T| -> Option<(T, T, T)> {
        let pts: Vec<(T, T)> = data.iter().map(|(d, y)| (-d.powf(eps), *y)).collect();
        linear_fit(&pts).map(|f| (f.slope, f.intercept, f.rms_residual))
    };
    // coarse scan, then golden-section refinement
    let mut best = (T::lit(0.1), T::infinity());
    let mut e = T::lit(0.1);
    while e <= T::lit(3.0) {
        if let Some((_, _, res)) = fit_at(e) {
            if res < best.1 {
                best = (e, res);
            }
        }
        e = e + T::lit(0.05);
    }
    let (mut a, mut b) = ((best.0 - T::lit(0.05)).max(T::lit(0.01)), best.0 + T::lit(0.05));
    let g = T::lit(0.618_033_988_749_895);
    let res_of = |e: T| fit_at(e).map_or(T::infinity(), |f| f.2);
    for _ in 0..80 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if res_of(c) < res_of(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let eps = (a + b) / T::lit(2.0);
    let (kappa, ln_c, rms) = fit_at(eps).ok_or_else(|| Error::Quadrature("degenerate decay fit".into()))?;
    Ok(DecayFit { epsilon: eps, kappa, ln_c, rms_residual: rms, samples: data.len(), flagged: rms > T::lit(0.25) })
}
