//! Truncated IDA and IMO integrals over disks |z| ≤ R, with a verdict on how
//! they behave as R grows.
//!
//! The plane is swept by annuli whose radial panels are a fixed fraction of
//! the local ρ. When the weight is radial and the symbol rotation covariant,
//! the integrand depends on |z| only and each ring costs a single evaluation.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::localfit::LocalFitter;
use crate::quadrature::GaussRule;
use crate::stats::linear_fit;
use crate::symbols::SymbolDescriptor;
use crate::weights::WeightModel;
use crate::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converged,
    Diverging,
    LogDiverging,
    Inconclusive,
}

/// Ring-averaged integrand at one radial node.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AnnulusSample<T> {
    pub radius: T,
    pub mean: T,
    pub max: T,
}

/// Result of sweeping an integrand over the disks |z| ≤ R_i.
#[derive(Clone, Debug, Serialize)]
pub struct PlaneIntegral<T> {
    pub schedule: Vec<T>,
    pub partials: Vec<T>,
    /// Contribution of the excluded branch-cut sector, when one was excluded.
    pub strip: Option<Vec<T>>,
    pub samples: Vec<AnnulusSample<T>>,
}

/// Polar quadrature over the plane with radial panels of width 2ρ/resolution
/// (two Gauss nodes each) and max(8, ⌈resolution·2πs/ρ⌉) angles per ring.
pub struct PlaneIntegrator<'a, T: Real> {
    model: &'a WeightModel<T>,
    resolution: T,
    radial: bool,
    cut: Option<(T, T)>,
}

impl<'a, T: Real> PlaneIntegrator<'a, T> {
    pub fn new(model: &'a WeightModel<T>, resolution: T) -> Result<Self> {
        if !(resolution >= T::lit(4.0)) {
            return Err(Error::invalid("resolution", format!("need at least 4 samples per ρ, got {resolution}")));
        }
        Ok(Self { model, resolution, radial: false, cut: None })
    }

    /// Treat the integrand as a function of |z|. Only valid for radial weights.
    pub fn radial(mut self, on: bool) -> Result<Self> {
        if on && !self.model.is_radial() {
            return Err(Error::NotRadial("radial plane integration"));
        }
        self.radial = on;
        Ok(self)
    }

    /// Divert the sector of half-angle min(π, factor·ρ(s)/s) around the ray at
    /// `angle` into the separate strip total, on rings with s + factor·ρ(s) ≥ 1.
    pub fn excluding_cut(mut self, angle: T, factor: T) -> Self {
        self.cut = Some((angle, factor));
        self
    }

    fn ring_rho(&self, s: T) -> Result<T> {
        if self.model.is_radial() {
            return self.model.rho(Complex::new(s, T::zero()));
        }
        let mut lo = T::infinity();
        for k in 0..8 {
            let a = T::TAU() * T::from_index(k) / T::lit(8.0);
            lo = lo.min(self.model.rho(Complex::from_polar(s, a))?);
        }
        Ok(lo)
    }

    /// Radial nodes (radius, weight, segment index) covering [0, schedule.last].
    fn radial_nodes(&self, schedule: &[T]) -> Result<Vec<(T, T, usize)>> {
        let rule = GaussRule::<T>::new(2);
        let mut nodes = Vec::new();
        let mut lo = T::zero();
        for (seg, &hi) in schedule.iter().enumerate() {
            let mut s = lo;
            while s < hi {
                let width = (T::lit(2.0) * self.ring_rho(s)? / self.resolution).min(hi - s);
                let next = if hi - (s + width) < T::lit(1e-12) * hi { hi } else { s + width };
                for (t, w) in rule.mapped(s, next) {
                    nodes.push((t, w, seg));
                }
                s = next;
            }
            lo = hi;
        }
        Ok(nodes)
    }

    /// (main, strip, mean, max) for the ring of radius s: ∫₀^{2π} F(s e^{iθ}) s dθ split by the cut sector.
    fn ring<F>(&self, s: T, integrand: &F) -> Result<(T, T, T, T)>
    where
        F: Fn(Complex<T>) -> Result<T> + Sync,
    {
        let rho = self.ring_rho(s)?;
        if self.radial {
            let v = integrand(Complex::new(s, T::zero()))?;
            return Ok((T::TAU() * s * v, T::zero(), v, v));
        }
        let n = ((self.resolution * T::TAU() * s / rho).ceil().to_usize().unwrap_or(8)).max(8);
        let half = self.cut.and_then(|(angle, factor)| {
            (s + factor * rho >= T::one()).then(|| (angle, (factor * rho / s).min(T::PI())))
        });
        let step = T::TAU() / T::from_index(n);
        let (mut main, mut strip, mut max) = (T::zero(), T::zero(), T::zero());
        for k in 0..n {
            let theta = step * (T::from_index(k) + T::lit(0.5));
            let v = integrand(Complex::from_polar(s, theta))?;
            max = max.max(v);
            let in_strip = half.is_some_and(|(angle, h)| wrapped_distance(theta, angle) < h);
            if in_strip {
                strip = strip + v;
            } else {
                main = main + v;
            }
        }
        let scale = step * s;
        Ok((main * scale, strip * scale, (main + strip) / T::from_index(n), max))
    }

    /// Partial integrals over |z| ≤ R for each R in `schedule` (strictly increasing).
    pub fn integrate<F>(&self, schedule: &[T], integrand: F) -> Result<PlaneIntegral<T>>
    where
        F: Fn(Complex<T>) -> Result<T> + Sync,
    {
        check_schedule(schedule)?;
        let nodes = self.radial_nodes(schedule)?;
        let rings: Vec<(T, T, T, T)> =
            nodes.par_iter().map(|(s, _, _)| self.ring(*s, &integrand)).collect::<Result<_>>()?;
        let mut partials = Vec::with_capacity(schedule.len());
        let mut strips = Vec::with_capacity(schedule.len());
        let (mut acc, mut acc_strip) = (T::zero(), T::zero());
        let mut seg = 0;
        for ((_, w, node_seg), (main, strip, _, _)) in nodes.iter().zip(&rings) {
            while seg < *node_seg {
                partials.push(acc);
                strips.push(acc_strip);
                seg += 1;
            }
            acc = acc + *w * *main;
            acc_strip = acc_strip + *w * *strip;
        }
        while partials.len() < schedule.len() {
            partials.push(acc);
            strips.push(acc_strip);
        }
        let samples = nodes
            .iter()
            .zip(&rings)
            .map(|((s, _, _), (_, _, mean, max))| AnnulusSample { radius: *s, mean: *mean, max: *max })
            .collect();
        Ok(PlaneIntegral { schedule: schedule.to_vec(), partials, strip: self.cut.map(|_| strips), samples })
    }
}

fn wrapped_distance<T: Real>(a: T, b: T) -> T {
    let d = (a - b).abs() % T::TAU();
    d.min(T::TAU() - d)
}

fn check_schedule<T: Real>(schedule: &[T]) -> Result<()> {
    if schedule.is_empty() || !(schedule[0] > T::zero()) || schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("Rmax schedule", "must be positive and strictly increasing"));
    }
    Ok(())
}

/// Least-squares fit of log(I(R_i) − I(R_{i−1})) against log R_i.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GrowthFit<T> {
    pub exponent: T,
    pub rms_residual: T,
    /// Exponent within ±0.1 of zero with positive increments.
    pub log_divergent: bool,
    /// False when some partial decreased, which a nonnegative integrand forbids.
    pub monotone: bool,
    pub points: usize,
}

const LOG_BAND: f64 = 0.1;
const CONVERGED_REL: f64 = 1e-4;
const CONVERGED_SLOPE: f64 = -0.5;
/// Partials at or below this are treated as an identically vanishing integrand.
const NEGLIGIBLE: f64 = 1e-20;

fn growth_fit<T: Real>(schedule: &[T], partials: &[T]) -> Option<GrowthFit<T>> {
    let scale = partials.last().map_or(T::zero(), |v| v.abs());
    let mut monotone = true;
    let mut pts = Vec::new();
    for i in 1..partials.len() {
        let d = partials[i] - partials[i - 1];
        if d < -T::lit(1e-12) * scale {
            monotone = false;
        }
        if d > T::zero() {
            pts.push((schedule[i].ln(), d.ln()));
        }
    }
    let fit = linear_fit(&pts)?;
    Some(GrowthFit {
        exponent: fit.slope,
        rms_residual: fit.rms_residual,
        log_divergent: fit.slope.abs() <= T::lit(LOG_BAND) && pts.len() + 1 == partials.len(),
        monotone,
        points: pts.len(),
    })
}

fn classify<T: Real>(partials: &[T], growth: Option<&GrowthFit<T>>) -> Verdict {
    let n = partials.len();
    if n > 0 && partials[n - 1].abs() <= T::lit(NEGLIGIBLE) {
        return Verdict::Converged;
    }
    if n < 3 {
        return Verdict::Inconclusive;
    }
    if growth.is_some_and(|g| !g.monotone) {
        return Verdict::Inconclusive;
    }
    let rel = (partials[n - 1] - partials[n - 2]) / partials[n - 1];
    if rel < T::lit(CONVERGED_REL) {
        return Verdict::Converged;
    }
    match growth {
        Some(g) if g.exponent <= T::lit(CONVERGED_SLOPE) => Verdict::Converged,
        Some(g) if g.log_divergent => Verdict::LogDiverging,
        Some(g) if g.exponent > T::lit(LOG_BAND) => Verdict::Diverging,
        _ => Verdict::Inconclusive,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeminormKind {
    Ida,
    Imo,
}

/// Parameters of a truncated seminorm ∫_{|z|≤R} (ρ^α Q(z))^p dA.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeminormConfig<T> {
    pub p: T,
    pub alpha: T,
    pub r: T,
    pub schedule: Vec<T>,
    /// Samples per local ρ, at least 4.
    pub resolution: T,
    /// Half-width of the excluded branch-cut sector in units of ρ.
    pub strip_factor: T,
}

impl<T: Real> SeminormConfig<T> {
    pub fn new(p: T, alpha: T, r: T, schedule: Vec<T>) -> Self {
        Self { p, alpha, r, schedule, resolution: T::lit(4.0), strip_factor: T::lit(4.0) }
    }

    fn validate(&self) -> Result<()> {
        if !(self.p > T::zero()) {
            return Err(Error::invalid("p", "must be positive"));
        }
        if !(self.r > T::zero()) {
            return Err(Error::invalid("r", "must be positive"));
        }
        if !self.alpha.is_finite() {
            return Err(Error::invalid("alpha", "must be finite"));
        }
        if !(self.strip_factor > T::zero()) {
            return Err(Error::invalid("strip_factor", "must be positive"));
        }
        check_schedule(&self.schedule)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SeminormReport<T> {
    pub kind: SeminormKind,
    pub symbol: String,
    pub p: T,
    pub alpha: T,
    pub r: T,
    pub schedule: Vec<T>,
    pub partials: Vec<T>,
    /// Excluded cut-sector contribution per schedule radius.
    pub strip: Option<Vec<T>>,
    pub verdict: Verdict,
    pub growth: Option<GrowthFit<T>>,
    pub samples: Vec<AnnulusSample<T>>,
}

impl<T: Real> SeminormReport<T> {
    /// I(R_max)^{1/p}.
    pub fn norm(&self) -> T {
        self.partials.last().copied().unwrap_or(T::zero()).max(T::zero()).powf(T::one() / self.p)
    }
}

fn seminorm<T: Real>(
    kind: SeminormKind,
    f: &SymbolDescriptor<T>,
    model: &WeightModel<T>,
    fitter: &LocalFitter<T>,
    cfg: &SeminormConfig<T>,
) -> Result<SeminormReport<T>> {
    cfg.validate()?;
    let covariant = model.is_radial() && f.rotation_covariant();
    let mut plane = PlaneIntegrator::new(model, cfg.resolution)?.radial(covariant)?;
    if let Some(angle) = f.branch_cut() {
        plane = plane.excluding_cut(angle, cfg.strip_factor);
    }
    let integrand = |z: Complex<T>| -> Result<T> {
        let rho = model.rho(z)?;
        let radius = cfg.r * rho;
        let q = match kind {
            SeminormKind::Ida if f.holomorphic_on_disk(z, radius) => return Ok(T::zero()),
            SeminormKind::Ida => fitter.g2_at(f, z, radius)?,
            SeminormKind::Imo => fitter.mo2_at(f, z, radius)?,
        };
        if q == T::zero() {
            return Ok(T::zero());
        }
        Ok((rho.powf(cfg.alpha) * q).powf(cfg.p))
    };
    let out = plane.integrate(&cfg.schedule, integrand)?;
    let growth = growth_fit(&out.schedule, &out.partials);
    let verdict = classify(&out.partials, growth.as_ref());
    Ok(SeminormReport {
        kind,
        symbol: f.name(),
        p: cfg.p,
        alpha: cfg.alpha,
        r: cfg.r,
        schedule: out.schedule,
        partials: out.partials,
        strip: out.strip,
        verdict,
        growth,
        samples: out.samples,
    })
}

/// ∫_{|z|≤R} (ρ^α G_{2,r}(f))^p dA over the schedule. Disks on which f is
/// known to be holomorphic contribute exactly zero without a fit.
pub fn ida_seminorm<T: Real>(
    f: &SymbolDescriptor<T>,
    model: &WeightModel<T>,
    fitter: &LocalFitter<T>,
    cfg: &SeminormConfig<T>,
) -> Result<SeminormReport<T>> {
    seminorm(SeminormKind::Ida, f, model, fitter, cfg)
}

/// As [`ida_seminorm`] with MO_{2,r} in place of G_{2,r}.
pub fn imo_seminorm<T: Real>(
    f: &SymbolDescriptor<T>,
    model: &WeightModel<T>,
    fitter: &LocalFitter<T>,
    cfg: &SeminormConfig<T>,
) -> Result<SeminormReport<T>> {
    seminorm(SeminormKind::Imo, f, model, fitter, cfg)
}

/// Growth exponent of the partial integrals from their increments; needs at
/// least four schedule points.
pub fn divergence_scan<T: Real>(schedule: &[T], partials: &[T]) -> Result<GrowthFit<T>> {
    if schedule.len() != partials.len() {
        return Err(Error::invalid("partials", "length must match the schedule"));
    }
    if schedule.len() < 4 {
        return Err(Error::invalid("Rmax schedule", format!("divergence scan needs 4 points, got {}", schedule.len())));
    }
    check_schedule(schedule)?;
    growth_fit(schedule, partials)
        .ok_or_else(|| Error::DivergentIntegral("fewer than two positive increments to fit".into()))
}

/// Largest G_{2,r} and MO_{2,r} on the circle |z| = s, for each radius.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ProfilePoint<T> {
    pub radius: T,
    pub g2_max: T,
    pub mo2_max: T,
}

/// Ring maxima of G_{2,r}(f) and MO_{2,r}(f) with `n_ang` angles per ring
/// (a single angle suffices when the radial reduction applies).
pub fn radial_profile<T: Real>(
    f: &SymbolDescriptor<T>,
    model: &WeightModel<T>,
    fitter: &LocalFitter<T>,
    r: T,
    radii: &[T],
    n_ang: usize,
) -> Result<Vec<ProfilePoint<T>>> {
    let n = if model.is_radial() && f.rotation_covariant() { 1 } else { n_ang.max(1) };
    radii
        .par_iter()
        .map(|&s| {
            let mut out = ProfilePoint { radius: s, g2_max: T::zero(), mo2_max: T::zero() };
            for k in 0..n {
                let z = Complex::from_polar(s, T::TAU() * T::from_index(k) / T::from_index(n));
                let (g, mo) = fitter.g2_mo2_at(f, z, r * model.rho(z)?)?;
                out.g2_max = out.g2_max.max(g);
                out.mo2_max = out.mo2_max.max(mo);
            }
            Ok(out)
        })
        .collect()
}
