use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::lattice::Lattice;
use crate::error::{Error, Result};
use crate::Real;

fn sigma<T: Real>(u: T) -> T {
    if u > T::zero() {
        (-u.recip()).exp()
    } else {
        T::zero()
    }
}

/// Smooth step S(u) = σ(u)/(σ(u) + σ(1−u)) on (0, 1) with σ(u) = e^{−1/u}.
fn smooth_step<T: Real>(u: T) -> T {
    if u <= T::zero() {
        return T::zero();
    }
    if u >= T::one() {
        return T::one();
    }
    let a = sigma(u);
    let b = sigma(T::one() - u);
    a / (a + b)
}

fn smooth_step_derivative<T: Real>(u: T) -> T {
    if u <= T::zero() || u >= T::one() {
        return T::zero();
    }
    let v = T::one() - u;
    let a = sigma(u);
    let b = sigma(v);
    let s = a + b;
    a * b * (T::one() / (u * u) + T::one() / (v * v)) / (s * s)
}

/// η(t) = 1 for t ≤ 1/2, 0 for t ≥ 1, and S(2 − 2t) in between.
pub fn eta<T: Real>(t: T) -> T {
    let half = T::lit(0.5);
    if t <= half {
        T::one()
    } else if t >= T::one() {
        T::zero()
    } else {
        smooth_step(T::lit(2.0) - T::lit(2.0) * t)
    }
}

pub fn eta_derivative<T: Real>(t: T) -> T {
    if t <= T::lit(0.5) || t >= T::one() {
        T::zero()
    } else {
        -T::lit(2.0) * smooth_step_derivative(T::lit(2.0) - T::lit(2.0) * t)
    }
}

/// ψ_j(z) and ∂̄ψ_j(z) for one bump that is nonzero at z.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BumpValue<T> {
    pub j: usize,
    pub psi: T,
    pub dbar: Complex<T>,
}

/// Partition of unity ψ_j = η_j / Σ_k η_k with η_j(z) = η(|z − a_j| / (m·r·ρ(a_j))).
///
/// The lattice is read as the half-scale cover: its disks D(a_j, r_L·ρ(a_j))
/// are the disks D(a_j, (m r/2)·ρ(a_j)), so r = 2·r_L/m and each bump lives
/// on D(a_j, 2·r_L·ρ(a_j)).
#[derive(Clone, Debug)]
pub struct Partition<T> {
    pub lattice: Lattice<T>,
    pub m: T,
    /// Nominal scale r with the bump support m·r·ρ(a_j).
    pub r: T,
}

/// Builds the partition over a lattice whose covering invariant was verified at
/// construction.
pub fn build_partition<T: Real>(lattice: Lattice<T>, m: T) -> Result<Partition<T>> {
    if !(m > T::zero() && m < T::one()) {
        return Err(Error::invalid("m", format!("must lie in (0, 1), got {m}")));
    }
    let r = T::lit(2.0) * lattice.r / m;
    Ok(Partition { lattice, m, r })
}

/// Invariant summary of a partition on a probe set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionCheck<T> {
    pub probes: usize,
    pub max_sum_error: T,
    pub max_dbar_sum: T,
    /// sup ρ(a_j)|∂̄ψ_j(z)| over probes.
    pub c_partition: T,
    /// Largest |closed form − central difference| for ∂̄ψ_j, when requested.
    pub max_fd_error: Option<T>,
    pub min_psi: T,
}

impl<T: Real> Partition<T> {
    /// m·r, the bump support in units of ρ(a_j).
    pub fn support_factor(&self) -> T {
        self.m * self.r
    }

    fn eta_sum(&self, z: Complex<T>, out: &mut Vec<(usize, T, Complex<T>)>) -> T {
        out.clear();
        let sf = self.support_factor();
        let lat = &self.lattice;
        let mut total = T::zero();
        lat.for_each_within(z, T::zero(), sf, |j, d| {
            let scale = sf * lat.rhos[j];
            let t = d / scale;
            let e = eta(t);
            let de = eta_derivative(t);
            // ∂̄|z − a| = (z − a) / (2|z − a|)
            let dbar = if de != T::zero() && d > T::zero() {
                (z - lat.centers[j]) * (de / (scale * T::lit(2.0) * d))
            } else {
                Complex::new(T::zero(), T::zero())
            };
            if e > T::zero() || dbar != Complex::new(T::zero(), T::zero()) {
                out.push((j, e, dbar));
                total = total + e;
            }
        });
        total
    }

    /// Nonzero bumps at z with ψ_j and ∂̄ψ_j in closed form.
    pub fn eval_into(&self, z: Complex<T>, out: &mut Vec<BumpValue<T>>) -> Result<()> {
        let mut raw = Vec::with_capacity(16);
        let total = self.eta_sum(z, &mut raw);
        if !(total > T::zero()) {
            return Err(Error::PartitionCoverage { x: z.re.as_f64(), y: z.im.as_f64() });
        }
        let mut dbar_total = Complex::new(T::zero(), T::zero());
        for (_, _, d) in &raw {
            dbar_total = dbar_total + *d;
        }
        out.clear();
        for (j, e, d) in raw {
            let psi = e / total;
            let dbar = d / total - dbar_total * (e / (total * total));
            out.push(BumpValue { j, psi, dbar });
        }
        Ok(())
    }

    pub fn eval(&self, z: Complex<T>) -> Result<Vec<BumpValue<T>>> {
        let mut out = Vec::new();
        self.eval_into(z, &mut out)?;
        Ok(out)
    }

    /// ψ_j(z) for a single index (zero outside its support).
    pub fn psi(&self, j: usize, z: Complex<T>) -> Result<T> {
        Ok(self.eval(z)?.iter().find(|b| b.j == j).map_or(T::zero(), |b| b.psi))
    }

    /// Checks Σψ = 1, Σ∂̄ψ = 0 and measures C_partition; with `fd_step`, also
    /// compares ∂̄ψ_j against central differences.
    pub fn check(&self, probes: &[Complex<T>], fd_step: Option<T>) -> Result<PartitionCheck<T>> {
        let mut rep = PartitionCheck {
            probes: probes.len(),
            max_sum_error: T::zero(),
            max_dbar_sum: T::zero(),
            c_partition: T::zero(),
            max_fd_error: fd_step.map(|_| T::zero()),
            min_psi: T::infinity(),
        };
        let mut buf = Vec::new();
        for &z in probes {
            self.eval_into(z, &mut buf)?;
            let mut s = T::zero();
            let mut ds = Complex::new(T::zero(), T::zero());
            for b in &buf {
                s = s + b.psi;
                ds = ds + b.dbar;
                rep.min_psi = rep.min_psi.min(b.psi);
                rep.c_partition = rep.c_partition.max(self.lattice.rhos[b.j] * b.dbar.norm());
            }
            rep.max_sum_error = rep.max_sum_error.max((s - T::one()).abs());
            rep.max_dbar_sum = rep.max_dbar_sum.max(ds.norm());
            if let Some(h) = fd_step {
                for b in &buf {
                    let fx = (self.psi(b.j, z + Complex::new(h, T::zero()))? - self.psi(b.j, z - Complex::new(h, T::zero()))?) / (T::lit(2.0) * h);
                    let fy = (self.psi(b.j, z + Complex::new(T::zero(), h))? - self.psi(b.j, z - Complex::new(T::zero(), h))?) / (T::lit(2.0) * h);
                    let fd = Complex::new(fx, fy) * T::lit(0.5);
                    let err = (fd - b.dbar).norm();
                    rep.max_fd_error = rep.max_fd_error.map(|e| e.max(err));
                }
            }
        }
        Ok(rep)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_lattice, probe_grid};
    use crate::weights::WeightModel;

    #[test]
    fn eta_profile() {
        assert_eq!(eta(0.3f64), 1.0);
        assert_eq!(eta(1.2f64), 0.0);
        assert!((eta(0.75f64) - 0.5).abs() < 1e-15);
        let h = 1e-6;
        for t in [0.55f64, 0.7, 0.9] {
            let fd = (eta(t + h) - eta(t - h)) / (2.0 * h);
            assert!((fd - eta_derivative(t)).abs() < 1e-7);
        }
    }

    #[test]
    fn single_bump_is_constant_one() {
        let model = WeightModel::<f64>::classical();
        let lat = build_lattice(&model, 0.5, 0.01).unwrap();
        let p = build_partition(lat, 0.5).unwrap();
        let v = p.eval(Complex::new(0.005, 0.0)).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].psi, 1.0);
        assert_eq!(v[0].dbar, Complex::new(0.0, 0.0));
    }

    #[test]
    fn classical_partition_invariants() {
        let model = WeightModel::<f64>::classical();
        let lat = build_lattice(&model, 0.45, 1.5).unwrap();
        let p = build_partition(lat, 0.9).unwrap();
        let probes = probe_grid(&model, 1.2, 0.45).unwrap();
        let rep = p.check(&probes, Some(1e-6)).unwrap();
        assert!(rep.max_sum_error <= 1e-12);
        assert!(rep.max_dbar_sum <= 1e-10);
        assert!(rep.max_fd_error.unwrap() <= 1e-5);
        assert!(rep.min_psi >= 0.0);
        assert!(rep.c_partition.is_finite() && rep.c_partition > 0.0);
    }
}
