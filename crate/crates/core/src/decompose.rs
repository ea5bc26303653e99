//! Splitting f = f₁ + f₂ with f₁ smooth, glued from local holomorphic fits by
//! a partition of unity, and f₂ controlled pointwise by G_{2,R}(f).

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{build_lattice, build_partition, BumpValue, Partition};
use crate::localfit::{Degree, DiskFit, LocalFitter};
use crate::quadrature::DiskQuadrature;
use crate::symbols::SymbolDescriptor;
use crate::weights::WeightModel;
use crate::Real;

#[derive(Clone, Debug)]
pub struct DecomposeConfig<T> {
    pub r: T,
    pub m: T,
    pub degree: Degree,
    /// Disk quadrature (radial, angular) for the local fits.
    pub fit_quad: (usize, usize),
    /// Radius of the disk on which the decomposition must be valid.
    pub domain: T,
}

impl<T: Real> DecomposeConfig<T> {
    pub fn new(r: T, m: T, domain: T) -> Self {
        Self { r, m, degree: Degree::Fixed(20), fit_quad: (48, 96), domain }
    }
}

/// f₁ = Σ h_j ψ_j and f₂ = f − f₁ on a lattice at scale m·r/2.
#[derive(Clone, Debug)]
pub struct Decomposition<T: Real> {
    pub symbol: SymbolDescriptor<T>,
    pub partition: Partition<T>,
    /// h_j, fitted on D(a_j, r·ρ(a_j)).
    pub fits: Vec<DiskFit<T>>,
    pub r: T,
    pub domain: T,
}

/// Pointwise values of the decomposition.
#[derive(Clone, Copy, Debug)]
pub struct DecompValue<T> {
    pub f: Complex<T>,
    pub f1: Complex<T>,
    pub f2: Complex<T>,
    /// ∂̄f₁ in the anchored form Σ (h_j − h_{j₀}) ∂̄ψ_j.
    pub dbar_f1: Complex<T>,
    /// ∂̄f₁ as the plain sum Σ h_j ∂̄ψ_j.
    pub dbar_f1_direct: Complex<T>,
}

impl<T: Real> Decomposition<T> {
    fn value_with(&self, z: Complex<T>, bumps: &mut Vec<BumpValue<T>>) -> Result<DecompValue<T>> {
        self.partition.eval_into(z, bumps)?;
        let zero = Complex::new(T::zero(), T::zero());
        let anchor = bumps
            .iter()
            .max_by(|a, b| a.psi.partial_cmp(&b.psi).expect("finite ψ"))
            .map(|b| self.fits[b.j].eval(z))
            .unwrap_or(zero);
        let (mut f1, mut dbar, mut direct) = (zero, zero, zero);
        for b in bumps.iter() {
            let h = self.fits[b.j].eval(z);
            f1 = f1 + h * b.psi;
            dbar = dbar + (h - anchor) * b.dbar;
            direct = direct + h * b.dbar;
        }
        let f = self.symbol.eval(z);
        Ok(DecompValue { f, f1, f2: f - f1, dbar_f1: dbar, dbar_f1_direct: direct })
    }

    pub fn value(&self, z: Complex<T>) -> Result<DecompValue<T>> {
        self.value_with(z, &mut Vec::new())
    }

    pub fn f1(&self, z: Complex<T>) -> Result<Complex<T>> {
        Ok(self.value(z)?.f1)
    }

    pub fn f2(&self, z: Complex<T>) -> Result<Complex<T>> {
        Ok(self.value(z)?.f2)
    }

    pub fn dbar_f1(&self, z: Complex<T>) -> Result<Complex<T>> {
        Ok(self.value(z)?.dbar_f1)
    }

    /// Every `stride`-th center with `rmin ≤ |a_j| ≤ rmax`, plus the midpoints
    /// from those centers to overlapping neighbors; with `refine`, the quarter
    /// points of the same pairs as well.
    pub fn probes(&self, rmin: T, rmax: T, refine: bool, stride: usize) -> Vec<Complex<T>> {
        let lat = &self.partition.lattice;
        let inside = |z: Complex<T>| {
            let s = z.norm();
            s >= rmin && s <= rmax
        };
        let stride = stride.max(1);
        let fractions: &[f64] = if refine { &[0.25, 0.5, 0.75] } else { &[0.5] };
        let mut out = Vec::new();
        let selected = lat.centers.iter().enumerate().filter(|(_, a)| inside(**a)).step_by(stride);
        for (i, a) in selected {
            out.push(*a);
            let mut pairs = Vec::new();
            lat.for_each_within(*a, T::zero(), T::lit(2.0) * lat.r, |j, d| {
                if j != i && d <= lat.r * (lat.rhos[i] + lat.rhos[j]) {
                    pairs.push(j);
                }
            });
            for j in pairs {
                let b = lat.centers[j];
                for t in fractions {
                    let z = *a + (b - *a) * T::lit(*t);
                    if inside(z) {
                        out.push(z);
                    }
                }
            }
        }
        out
    }

    /// Stride giving roughly `target` base probes in the annulus.
    pub fn probe_stride(&self, rmin: T, rmax: T, target: usize) -> usize {
        let base = self.probes(rmin, rmax, false, 1).len();
        base.div_ceil(target.max(1)).max(1)
    }
}

fn max_rho<T: Real>(model: &WeightModel<T>, radius: T) -> Result<T> {
    let mut out = T::zero();
    for i in 0..=16 {
        let s = radius * T::from_index(i) / T::lit(16.0);
        let angles = if model.is_radial() { 1 } else { 8 };
        for k in 0..angles {
            out = out.max(model.rho(Complex::from_polar(s, T::TAU() * T::from_index(k) / T::lit(8.0)))?);
        }
    }
    Ok(out)
}

/// Builds the lattice, the partition and one holomorphic fit per center.
pub fn ida_decompose<T: Real>(f: &SymbolDescriptor<T>, model: &WeightModel<T>, cfg: &DecomposeConfig<T>) -> Result<Decomposition<T>> {
    if !(cfg.r > T::zero()) {
        return Err(Error::invalid("r", "must be positive"));
    }
    if !(cfg.domain > T::zero()) {
        return Err(Error::invalid("domain", "must be positive"));
    }
    let pad = T::lit(3.0) * cfg.m * cfg.r * max_rho(model, cfg.domain)?;
    let lattice = build_lattice(model, cfg.m * cfg.r / T::lit(2.0), cfg.domain + pad)?;
    let partition = build_partition(lattice, cfg.m)?;
    let fitter = LocalFitter::new(cfg.fit_quad.0, cfg.fit_quad.1, cfg.degree);
    let r = partition.r;
    let lat = &partition.lattice;
    let fits = lat
        .centers
        .par_iter()
        .zip(&lat.rhos)
        .map(|(a, rho)| fitter.fit(f, *a, r * *rho))
        .collect::<Result<Vec<_>>>()?;
    Ok(Decomposition { symbol: f.clone(), partition, fits, r, domain: cfg.domain })
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    /// Reference radius R = ref_factor · r for G_{2,R}.
    pub ref_factor: f64,
    /// Disk quadrature for the means over D(z, m·r·ρ(z)).
    pub avg_quad: (usize, usize),
    /// Fitter for the reference G_{2,R}.
    pub ref_quad: (usize, usize),
    /// Approximate number of base probes used by [`refinement_check`].
    pub target_probes: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { ref_factor: 3.0, avg_quad: (12, 24), ref_quad: (32, 64), target_probes: 400 }
    }
}

impl VerifyConfig {
    /// Doubled averaging quadrature, for the refinement pass.
    pub fn refined(&self) -> Self {
        Self { avg_quad: (2 * self.avg_quad.0, 2 * self.avg_quad.1), ..self.clone() }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BoundRow<T> {
    pub x: T,
    pub y: T,
    pub rho_dbar: T,
    pub rho_dbar_mean: T,
    pub f2_mean: T,
    pub g_ref: T,
    pub ratio: Option<T>,
}

impl<T: Real> BoundRow<T> {
    pub fn lhs(&self) -> T {
        self.rho_dbar + self.rho_dbar_mean + self.f2_mean
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport<T> {
    pub probes: usize,
    pub max_ratio: T,
    pub max_lhs: T,
    /// Largest gap between the anchored and the direct ∂̄f₁.
    pub anchor_gap: T,
    /// Largest |f − f₁ − f₂| at the probes.
    pub reconstruction_gap: T,
    /// Probes where the reference vanishes but the left side does not.
    pub violations: Vec<(T, T)>,
    pub rows: Vec<BoundRow<T>>,
}

const REF_FLOOR: f64 = 1e-14;
const LHS_FLOOR: f64 = 1e-10;

/// Measures ρ|∂̄f₁| + ρ·(mean|∂̄f₁|²)^{1/2} + (mean|f₂|²)^{1/2}, the means over
/// D(z, m·r·ρ(z)), against G_{2,R}(f)(z) at each probe.
pub fn verify_decomposition<T: Real>(
    dec: &Decomposition<T>,
    model: &WeightModel<T>,
    probes: &[Complex<T>],
    cfg: &VerifyConfig,
) -> Result<BoundReport<T>> {
    let avg = DiskQuadrature::<T>::new(cfg.avg_quad.0, cfg.avg_quad.1);
    let fitter = LocalFitter::<T>::new(cfg.ref_quad.0, cfg.ref_quad.1, Degree::Auto);
    let mr = dec.partition.support_factor();
    let big = T::lit(cfg.ref_factor) * dec.r;
    let f = &dec.symbol;
    let rows: Vec<(BoundRow<T>, T, T)> = probes
        .par_iter()
        .map(|&z| {
            let mut bumps = Vec::new();
            let rho = model.rho(z)?;
            let v = dec.value_with(z, &mut bumps)?;
            let mut dbar_sq = T::zero();
            let mut f2_sq = T::zero();
            for (u, w) in avg.unit_nodes() {
                let vw = dec.value_with(z + *u * (mr * rho), &mut bumps)?;
                dbar_sq = dbar_sq + *w * vw.dbar_f1.norm_sqr();
                f2_sq = f2_sq + *w * vw.f2.norm_sqr();
            }
            let radius = big * rho;
            let g_ref = if f.holomorphic_on_disk(z, radius) { T::zero() } else { fitter.g2_at(f, z, radius)? };
            let mut row = BoundRow {
                x: z.re,
                y: z.im,
                rho_dbar: rho * v.dbar_f1.norm(),
                rho_dbar_mean: rho * dbar_sq.sqrt(),
                f2_mean: f2_sq.sqrt(),
                g_ref,
                ratio: None,
            };
            if g_ref >= T::lit(REF_FLOOR) {
                row.ratio = Some(row.lhs() / g_ref);
            }
            let anchor = (v.dbar_f1 - v.dbar_f1_direct).norm();
            let recon = (v.f - v.f1 - v.f2).norm();
            Ok((row, anchor, recon))
        })
        .collect::<Result<_>>()?;
    let mut rep = BoundReport {
        probes: probes.len(),
        max_ratio: T::zero(),
        max_lhs: T::zero(),
        anchor_gap: T::zero(),
        reconstruction_gap: T::zero(),
        violations: Vec::new(),
        rows: Vec::with_capacity(rows.len()),
    };
    for (row, anchor, recon) in rows {
        rep.max_lhs = rep.max_lhs.max(row.lhs());
        rep.anchor_gap = rep.anchor_gap.max(anchor);
        rep.reconstruction_gap = rep.reconstruction_gap.max(recon);
        match row.ratio {
            Some(q) => rep.max_ratio = rep.max_ratio.max(q),
            None if row.lhs() > T::lit(LHS_FLOOR) => rep.violations.push((row.x, row.y)),
            None => {}
        }
        rep.rows.push(row);
    }
    Ok(rep)
}

/// Base and refined verification of one decomposition.
#[derive(Clone, Debug, Serialize)]
pub struct RefinementCheck<T> {
    pub base: T,
    pub refined: T,
    /// |refined/base − 1|, zero when both vanish.
    pub relative_change: T,
    pub violations: usize,
    pub max_lhs: T,
}

impl<T: Real> RefinementCheck<T> {
    /// Ratios within `tol` relative change, or a left side that vanishes to
    /// 1e-8 everywhere, where the ratio only measures rounding.
    pub fn stable(&self, tol: T) -> bool {
        self.max_lhs <= T::lit(1e-8) || self.relative_change <= tol
    }
}

/// Verifies on the base probe set, then on the refined probes with the doubled
/// averaging quadrature, and compares the maximal ratios.
pub fn refinement_check<T: Real>(
    dec: &Decomposition<T>,
    model: &WeightModel<T>,
    region: (T, T),
    cfg: &VerifyConfig,
) -> Result<(BoundReport<T>, BoundReport<T>, RefinementCheck<T>)> {
    let stride = dec.probe_stride(region.0, region.1, cfg.target_probes);
    let base = verify_decomposition(dec, model, &dec.probes(region.0, region.1, false, stride), cfg)?;
    let fine = verify_decomposition(dec, model, &dec.probes(region.0, region.1, true, stride), &cfg.refined())?;
    let relative_change = if base.max_ratio == T::zero() && fine.max_ratio == T::zero() {
        T::zero()
    } else {
        (fine.max_ratio / base.max_ratio - T::one()).abs()
    };
    let check = RefinementCheck {
        base: base.max_ratio,
        refined: fine.max_ratio,
        relative_change,
        violations: base.violations.len() + fine.violations.len(),
        max_lhs: base.max_lhs.max(fine.max_lhs),
    };
    Ok((base, fine, check))
}
