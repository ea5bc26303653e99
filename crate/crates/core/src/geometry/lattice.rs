use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::index::SpatialIndex;
use crate::error::{Error, Result};
use crate::weights::WeightModel;
use crate::Real;

/// Centers a_j whose disks D(a_j, r·ρ(a_j)) cover |z| ≤ Rmax while the
/// disks D(a_j, (r/5)·ρ(a_j)) are pairwise disjoint.
#[derive(Clone, Debug)]
pub struct Lattice<T> {
    pub r: T,
    pub rmax: T,
    pub centers: Vec<Complex<T>>,
    pub rhos: Vec<T>,
    /// Centers added by the repair pass.
    pub repaired: usize,
    index: SpatialIndex,
}

impl<T: Real> Lattice<T> {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Calls `visit(j, |z − a_j|)` for every center with |z − a_j| < extra + alpha·ρ(a_j).
    pub fn for_each_within<F: FnMut(usize, T)>(&self, z: Complex<T>, extra: T, alpha: T, visit: F) {
        self.index.for_each_within(&self.centers, &self.rhos, z, extra, alpha, visit);
    }

    pub fn is_covered(&self, z: Complex<T>) -> bool {
        let mut hit = false;
        self.for_each_within(z, T::zero(), self.r, |_, _| hit = true);
        hit
    }

    /// Rebuilds a lattice from stored centers (e.g. read back from CSV).
    pub fn from_parts(r: T, rmax: T, centers: Vec<Complex<T>>, rhos: Vec<T>) -> Result<Self> {
        if centers.len() != rhos.len() {
            return Err(Error::invalid("rhos", "one radius per center required"));
        }
        let mut index = SpatialIndex::new(r.as_f64());
        for (j, (a, rho)) in centers.iter().zip(&rhos).enumerate() {
            index.insert(j, *a, *rho);
        }
        Ok(Self { r, rmax, centers, rhos, repaired: 0, index })
    }

    fn push(&mut self, a: Complex<T>, rho: T) {
        let j = self.centers.len();
        self.centers.push(a);
        self.rhos.push(rho);
        self.index.insert(j, a, rho);
    }

    /// Smallest (|a_j − a_k| − (r/5)(ρ_j + ρ_k)) over neighbouring pairs; the
    /// disjointness invariant asks for ≥ −1e-9.
    pub fn disjointness_margin(&self) -> T {
        let fifth = self.r / T::lit(5.0);
        let mut worst = T::infinity();
        for (j, (&a, &rho)) in self.centers.iter().zip(&self.rhos).enumerate() {
            self.for_each_within(a, fifth * rho, fifth, |k, d| {
                if k != j {
                    worst = worst.min(d - fifth * (rho + self.rhos[k]));
                }
            });
        }
        worst
    }

    /// Probe points of `probes` lying in no disk D(a_j, r·ρ(a_j)).
    pub fn uncovered(&self, probes: &[Complex<T>]) -> Vec<Complex<T>> {
        probes.iter().copied().filter(|z| !self.is_covered(*z)).collect()
    }

    /// Checks both invariants on the given probe grid.
    pub fn verify(&self, probes: &[Complex<T>]) -> Result<()> {
        let margin = self.disjointness_margin();
        if margin < T::lit(-1e-9) {
            return Err(Error::LatticeInvariant(format!("disjointness violated by {}", -margin)));
        }
        let holes = self.uncovered(probes);
        if let Some(z) = holes.first() {
            return Err(Error::LatticeInvariant(format!("{} probe points uncovered, first at {z}", holes.len())));
        }
        Ok(())
    }
}

/// Points on concentric rings out to `rmax`, spaced `factor·ρ` both radially and
/// along each ring, ordered by (|z|, arg) with arg in (−π, π].
///
/// For non-radial weights the spacing on each ring uses the smallest ρ seen on it.
pub fn polar_grid<T: Real>(model: &WeightModel<T>, rmax: T, factor: T) -> Result<Vec<Complex<T>>> {
    let ring_rho = |s: T| -> Result<T> {
        if model.is_radial() || s == T::zero() {
            return model.rho(Complex::new(s, T::zero()));
        }
        let mut m = T::infinity();
        for i in 0..16 {
            let th = T::TAU() * T::from_index(i) / T::lit(16.0);
            m = m.min(model.rho(Complex::from_polar(s, th))?);
        }
        Ok(m)
    };
    let mut out = vec![Complex::new(T::zero(), T::zero())];
    let mut s = T::zero();
    loop {
        let step0 = factor * ring_rho(s)?;
        let step = factor * ring_rho(s + step0)?.min(step0 / factor);
        let mut next = s + step;
        let last = next >= rmax;
        if last {
            next = rmax;
            if next <= s {
                break;
            }
        }
        s = next;
        let spacing = factor * ring_rho(s)?;
        let count = ((T::TAU() * s / spacing).ceil().to_usize().unwrap_or(1)).max(1);
        for j in 0..count {
            let th = -T::PI() + T::TAU() * (T::from_index(j) + T::lit(0.5)) / T::from_index(count);
            out.push(Complex::from_polar(s, th));
        }
        if last {
            break;
        }
    }
    Ok(out)
}

/// Default probe grid: four points per local ρ, refined further for small r so
/// that every lattice disk holds probes.
pub fn probe_grid<T: Real>(model: &WeightModel<T>, rmax: T, r: T) -> Result<Vec<Complex<T>>> {
    polar_grid(model, rmax, (T::lit(0.25)).min(r / T::lit(2.0)))
}

const REPAIR_CAP_FACTOR: usize = 10;

/// Greedy cover-scan plus repair.
///
/// Candidates on a polar grid of local step (r/5)·ρ/2 are scanned by increasing
/// modulus; a candidate becomes a center when no accepted disk covers it.
/// Uncovered probe points are then promoted to centers, and both invariants are
/// verified before returning.
pub fn build_lattice<T: Real>(model: &WeightModel<T>, r: T, rmax: T) -> Result<Lattice<T>> {
    if !(r > T::zero()) {
        return Err(Error::invalid("r", format!("must be positive, got {r}")));
    }
    if !(rmax > T::zero()) {
        return Err(Error::invalid("rmax", format!("must be positive, got {rmax}")));
    }
    let mut lattice = Lattice { r, rmax, centers: Vec::new(), rhos: Vec::new(), repaired: 0, index: SpatialIndex::new(r.as_f64()) };
    for c in polar_grid(model, rmax, r / T::lit(10.0))? {
        if !lattice.is_covered(c) {
            lattice.push(c, model.rho(c)?);
        }
    }
    let probes = probe_grid(model, rmax, r)?;
    let cap = REPAIR_CAP_FACTOR * lattice.len() + 1000;
    for &z in &probes {
        if !lattice.is_covered(z) {
            if lattice.repaired >= cap {
                return Err(Error::LatticeRepair { uncovered: lattice.uncovered(&probes).iter().map(|z| (z.re.as_f64(), z.im.as_f64())).collect() });
            }
            lattice.push(z, model.rho(z)?);
            lattice.repaired += 1;
        }
    }
    lattice.verify(&probes)?;
    Ok(lattice)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Multiplicity {
    pub max: usize,
    pub min: usize,
}

/// Largest number of dilated disks D(a_j, m·r·ρ(a_j)) containing a probe point.
///
/// For m ≥ 1 every probe must be covered at least once.
pub fn covering_multiplicity<T: Real>(lattice: &Lattice<T>, m: T, probes: &[Complex<T>]) -> Result<Multiplicity> {
    let mut max = 0;
    let mut min = usize::MAX;
    for &z in probes {
        let mut count = 0;
        lattice.for_each_within(z, T::zero(), m * lattice.r, |_, _| count += 1);
        max = max.max(count);
        min = min.min(count);
    }
    if probes.is_empty() {
        min = 0;
    }
    if m >= T::one() && min == 0 && !probes.is_empty() {
        return Err(Error::LatticeInvariant("a probe point lies outside every dilated disk".into()));
    }
    Ok(Multiplicity { max, min })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::WeightModel;

    #[test]
    fn tiny_domain_needs_one_center() {
        let model = WeightModel::<f64>::classical();
        let lat = build_lattice(&model, 1.0, 0.01).unwrap();
        assert_eq!(lat.len(), 1);
        assert_eq!(lat.centers[0], Complex::new(0.0, 0.0));
        let probes = probe_grid(&model, 0.01, 1.0).unwrap();
        assert_eq!(covering_multiplicity(&lat, 1.0, &probes).unwrap().max, 1);
    }

    #[test]
    fn classical_lattice_spacing() {
        let model = WeightModel::<f64>::classical();
        let lat = build_lattice(&model, 1.0, 3.0).unwrap();
        let rho = (2.0 * std::f64::consts::PI).powf(-0.5);
        for (j, a) in lat.centers.iter().enumerate() {
            let nn = lat
                .centers
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != j)
                .map(|(_, b)| (a - b).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(nn >= 0.4 * rho - 1e-9 && nn <= 2.0 * rho + 1e-9, "nearest neighbour {nn}");
        }
    }

    #[test]
    fn multiplicity_grows_with_dilation() {
        let model = WeightModel::<f64>::classical();
        let lat = build_lattice(&model, 1.0, 2.0).unwrap();
        let probes = probe_grid(&model, 2.0, 1.0).unwrap();
        let n1 = covering_multiplicity(&lat, 1.0, &probes).unwrap();
        let n3 = covering_multiplicity(&lat, 3.0, &probes).unwrap();
        assert!(n1.min >= 1 && n3.max >= n1.max);
    }
}
