//! Closed forms used as oracles. Nothing here calls into the crate's
//! quadrature or moment code.
#![allow(dead_code)]

use focklab::weights::{WeightModel, WeightSpec};

/// Q(n, 1) = Γ(n, 1)/(n−1)! = e^{−1} Σ_{k<n} 1/k!.
pub fn upper_gamma_reg_at_one(n: usize) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 0..n {
        if k > 0 {
            term /= k as f64;
        }
        sum += term;
    }
    sum * (-1.0f64).exp()
}

/// P(n+1, 1) = γ(n+1, 1)/n! = e^{−1} Σ_{j>n} 1/j!, summed directly so that the
/// small values for large n keep full relative precision.
pub fn lower_gamma_reg_at_one(n: usize) -> f64 {
    let mut term = 1.0;
    for j in 1..=n + 1 {
        term /= j as f64;
    }
    let mut sum = 0.0;
    let mut j = n + 1;
    while term > sum * 1e-18 {
        sum += term;
        j += 1;
        term /= j as f64;
    }
    sum * (-1.0f64).exp()
}

/// s_n² of H_f for f = 1/z on |z| ≥ 1, classical weight.
pub fn xia_sval_sq(n: usize) -> f64 {
    // 1 − Q(n, 1) = P(n, 1), taken from its own series to avoid cancellation
    upper_gamma_reg_at_one(n) / n as f64 * lower_gamma_reg_at_one(n - 1)
}

/// E₁(1) = −γ − Σ_{k≥1} (−1)^k/(k·k!).
pub fn exp_integral_e1_at_one() -> f64 {
    let euler = 0.577_215_664_901_532_9;
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..40 {
        term /= k as f64;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        sum += sign * term / k as f64;
    }
    -euler + sum
}

/// s_n² of H_{f̄} for the same f, n ≥ 1. At n = 0 the value is E₁(1) − e^{−2}.
pub fn conj_xia_sval_sq(n: usize) -> f64 {
    let q = upper_gamma_reg_at_one(n);
    let q1 = upper_gamma_reg_at_one(n + 1);
    q / n as f64 - q1 * q1 / (n + 1) as f64
}

pub fn power41() -> WeightModel<f64> {
    WeightModel::from_spec(WeightSpec::Power { exponent: 4.0, coefficient: 1.0 }).unwrap()
}

/// A radial weight given by tabulated Δφ, growing linearly to 4 at radius 3.
pub fn tabulated() -> WeightModel<f64> {
    WeightModel::from_spec(WeightSpec::CustomRadial { radii: vec![0.0, 1.0, 3.0], laplacian: vec![1.0, 2.0, 4.0] }).unwrap()
}
