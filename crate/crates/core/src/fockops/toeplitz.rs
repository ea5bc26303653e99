use num_complex::Complex;
use serde::Serialize;

use super::basis::BasisTable;
use super::moments::MomentIntegrator;
use crate::error::{Error, Result};
use crate::quadrature::DiskQuadrature;
use crate::seminorms::{PlaneIntegrator, SeminormConfig};
use crate::symbols::RadialProfile;
use crate::weights::WeightModel;
use crate::Real;

/// A radial density g(|z|) = coeff · profile(|z|) for the measure g dA.
#[derive(Clone)]
pub struct RadialDensity<T> {
    pub coeff: T,
    pub profile: RadialProfile<T>,
}

impl<T: Real> std::fmt::Debug for RadialDensity<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} · {:?}", self.coeff, self.profile)
    }
}

impl<T: Real> RadialDensity<T> {
    /// 1{|z| ≤ a}.
    pub fn indicator(a: T) -> Self {
        Self { coeff: T::one(), profile: RadialProfile::Power { exponent: T::zero(), lo: T::zero(), hi: a } }
    }

    pub fn constant(c: T) -> Self {
        Self { coeff: c, profile: RadialProfile::power(T::zero()) }
    }

    pub fn scaled(&self, c: T) -> Self {
        Self { coeff: self.coeff * c, profile: self.profile.clone() }
    }

    pub fn eval(&self, r: T) -> T {
        self.coeff * self.profile.eval(r)
    }

    /// `indicator:A`, `power:E:LO:HI`, `zero`, `scale:C:<density>`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let num = |s: &str| -> Result<T> {
            let v: f64 = match s.trim() {
                "inf" | "infinity" => f64::INFINITY,
                other => other.parse().map_err(|_| Error::Parse(format!("`{other}` is not a number in density `{text}`")))?,
            };
            Ok(T::lit(v))
        };
        let (head, rest) = text.split_once(':').unwrap_or((text, ""));
        match head {
            "zero" => Ok(Self::constant(T::zero()).with_support(T::zero(), T::one())),
            "indicator" => Ok(Self::indicator(num(rest)?)),
            "power" => {
                let parts: Vec<&str> = rest.split(':').collect();
                if parts.len() != 3 {
                    return Err(Error::Parse(format!("`{text}`: expected power:E:LO:HI")));
                }
                Ok(Self {
                    coeff: T::one(),
                    profile: RadialProfile::Power { exponent: num(parts[0])?, lo: num(parts[1])?, hi: num(parts[2])? },
                })
            }
            "scale" => {
                let (c, inner) = rest.split_once(':').ok_or_else(|| Error::Parse(format!("`{text}`: expected scale:C:<density>")))?;
                Ok(Self::parse(inner)?.scaled(num(c)?))
            }
            other => Err(Error::Parse(format!("unknown density `{other}`"))),
        }
    }

    fn with_support(self, lo: T, hi: T) -> Self {
        let profile = match self.profile {
            RadialProfile::Power { exponent, .. } => RadialProfile::Power { exponent, lo, hi },
            RadialProfile::Custom { eval, breakpoints, .. } => RadialProfile::Custom { eval, lo, hi, breakpoints },
        };
        Self { coeff: self.coeff, profile }
    }

    fn validate(&self) -> Result<()> {
        if !(self.coeff >= T::zero()) {
            return Err(Error::invalid("density", format!("coefficient {} is negative", self.coeff)));
        }
        if let RadialProfile::Custom { lo, hi, breakpoints, .. } = &self.profile {
            let top = hi.min(*lo + T::lit(50.0));
            let n = 256;
            let samples = (0..=n)
                .map(|i| *lo + (top - *lo) * T::from_index(i) / T::from_index(n))
                .chain(breakpoints.iter().copied());
            for r in samples {
                let v = self.profile.eval(r);
                if v < T::zero() {
                    return Err(Error::invalid("density", format!("g({r}) = {v} is negative")));
                }
            }
        }
        Ok(())
    }
}

/// Diagonal of T_μ on the monomials: t_n = (2π/b_n) ∫ g(r) r^{2n+1} e^{−2φ(r)} dr for k ≤ n.
pub fn toeplitz_matrix<T: Real>(model: &WeightModel<T>, basis: &BasisTable<T>, density: &RadialDensity<T>, n: usize) -> Result<Vec<T>> {
    density.validate()?;
    if n > basis.n_max {
        return Err(Error::invalid("N", format!("basis holds degrees up to {}, asked for {n}", basis.n_max)));
    }
    let mi = MomentIntegrator::new(model)?;
    let (lo, hi) = density.profile.support();
    (0..=n)
        .map(|k| {
            if density.coeff == T::zero() {
                return Ok(T::zero());
            }
            let a = T::from_index(2 * k + 1);
            let j = match &density.profile {
                RadialProfile::Power { exponent, .. } => mi.integrate(a + *exponent, lo, hi, None, &[])?,
                RadialProfile::Custom { eval, breakpoints, .. } => {
                    let g = |r: T| eval(r);
                    mi.integrate(a, lo, hi, Some(&g), breakpoints)?
                }
            };
            Ok(density.coeff * j.scaled_exp(-basis.ln_norm_sq(k)))
        })
        .collect()
}

/// μ̂_r(z): mean of g over D(z, r·ρ(z)).
pub fn averaging_transform<T: Real>(
    model: &WeightModel<T>,
    quad: &DiskQuadrature<T>,
    density: &RadialDensity<T>,
    r: T,
    z: Complex<T>,
) -> Result<T> {
    let radius = r * model.rho(z)?;
    Ok(quad.mean_real(z, radius, |w| density.eval(w.norm())))
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityRow<T> {
    pub name: String,
    /// (Σ t_n^p)^{1/p}.
    pub lhs: T,
    /// (∫ μ̂_r^p ρ^{−2} dA)^{1/p} over the largest truncation disk.
    pub rhs: T,
    pub ratio: Option<T>,
    pub rhs_converged: bool,
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ToeplitzEquivalence<T> {
    pub p: T,
    pub r: T,
    pub n: usize,
    pub rows: Vec<DensityRow<T>>,
    /// max/min ratio over rows with a ratio and a converged right side.
    pub band: Option<T>,
}

/// Compares ‖T_μ‖_{S_p} on span{e_0..e_N} with ‖μ̂_r‖_{L^p(dA/ρ²)} for each density.
///
/// Compactly supported densities get the truncation schedule
/// R₁, 2R₁, 4R₁ with R₁ = hi + 2rρ(hi) + 1; others need `schedule`.
#[allow(clippy::too_many_arguments)]
pub fn toeplitz_equivalence_report<T: Real>(
    model: &WeightModel<T>,
    basis: &BasisTable<T>,
    densities: &[(String, RadialDensity<T>)],
    p: T,
    r: T,
    n: usize,
    schedule: Option<&[T]>,
    quad: &DiskQuadrature<T>,
) -> Result<ToeplitzEquivalence<T>> {
    if !(p > T::zero()) || !(r > T::zero()) {
        return Err(Error::invalid("p, r", "must be positive"));
    }
    let mut rows = Vec::with_capacity(densities.len());
    for (name, density) in densities {
        let t = toeplitz_matrix(model, basis, density, n)?;
        let lhs = t.iter().map(|v| v.powf(p)).sum::<T>().powf(T::one() / p);
        let (_, hi) = density.profile.support();
        let sched: Vec<T> = match schedule {
            Some(s) => s.to_vec(),
            None if hi.is_finite() => {
                let r1 = hi + T::lit(2.0) * r * model.rho(Complex::new(hi, T::zero()))? + T::one();
                vec![r1, T::lit(2.0) * r1, T::lit(4.0) * r1]
            }
            None => {
                return Err(Error::invalid("schedule", format!("density {name} has unbounded support; give a truncation schedule")))
            }
        };
        let cfg = SeminormConfig::new(p, T::zero(), r, sched);
        let plane = PlaneIntegrator::new(model, cfg.resolution)?.radial(true)?;
        let integral = plane.integrate(&cfg.schedule, |z| {
            let m = averaging_transform(model, quad, density, r, z)?;
            let rho = model.rho(z)?;
            Ok(m.powf(p) / (rho * rho))
        })?;
        let k = integral.partials.len();
        let last = integral.partials[k - 1];
        let rhs_converged = k >= 2 && (last == T::zero() || (last - integral.partials[k - 2]) <= T::lit(1e-4) * last);
        let rhs = last.max(T::zero()).powf(T::one() / p);
        let (ratio, note) = if lhs == T::zero() && rhs == T::zero() {
            (None, Some("zero density: 0/0 excluded".to_string()))
        } else if rhs == T::zero() {
            (None, Some("right side vanished".to_string()))
        } else if !rhs_converged {
            (Some(lhs / rhs), Some("right side still growing at the largest truncation".to_string()))
        } else {
            (Some(lhs / rhs), None)
        };
        rows.push(DensityRow { name: name.clone(), lhs, rhs, ratio, rhs_converged, note });
    }
    let ratios: Vec<T> = rows.iter().filter(|r| r.rhs_converged).filter_map(|r| r.ratio).collect();
    let band = (!ratios.is_empty()).then(|| {
        let hi = ratios.iter().copied().fold(T::zero(), T::max);
        let lo = ratios.iter().copied().fold(T::infinity(), T::min);
        hi / lo
    });
    Ok(ToeplitzEquivalence { p, r, n, rows, band })
}
