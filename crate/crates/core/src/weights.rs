//! Subharmonic weights, their Laplacian measure and the radius field ρ.

use dashmap::DashMap;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::DiskQuadrature;
use crate::Real;

/// Square grid of Δφ samples over `[-half_width, half_width]²`, row-major in `y`
/// then `x`, interpolated bilinearly. Outside the square the nearest boundary
/// value is used.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanarGrid<T> {
    pub half_width: T,
    pub n: usize,
    pub values: Vec<T>,
}

impl<T: Real> PlanarGrid<T> {
    pub fn spacing(&self) -> T {
        T::lit(2.0) * self.half_width / T::from_index(self.n - 1)
    }

    pub fn eval(&self, z: Complex<T>) -> T {
        let h = self.spacing();
        let last = T::from_index(self.n - 1);
        let gx = ((z.re + self.half_width) / h).max(T::zero()).min(last);
        let gy = ((z.im + self.half_width) / h).max(T::zero()).min(last);
        let i = gx.floor().to_usize().unwrap_or(0).min(self.n - 2);
        let j = gy.floor().to_usize().unwrap_or(0).min(self.n - 2);
        let tx = gx - T::from_index(i);
        let ty = gy - T::from_index(j);
        let v = |a: usize, b: usize| self.values[b * self.n + a];
        let one = T::one();
        (one - tx) * (one - ty) * v(i, j)
            + tx * (one - ty) * v(i + 1, j)
            + (one - tx) * ty * v(i, j + 1)
            + tx * ty * v(i + 1, j + 1)
    }
}

/// The weight φ, described through the data needed to evaluate Δφ (and φ where
/// it is determined).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSpec<T> {
    /// φ(z) = a|z|².
    Gaussian { scale: T },
    /// φ(z) = c|z|^m.
    Power { exponent: T, coefficient: T },
    /// Piecewise-linear Δφ(r) through the given nodes, constant beyond the last.
    CustomRadial { radii: Vec<T>, laplacian: Vec<T> },
    CustomPlanar(PlanarGrid<T>),
}

impl<T: Real> WeightSpec<T> {
    /// φ(z) = |z|²/2, i.e. the weight e^{-|z|²}.
    pub fn classical() -> Self {
        WeightSpec::Gaussian { scale: T::lit(0.5) }
    }

    pub fn is_radial(&self) -> bool {
        !matches!(self, WeightSpec::CustomPlanar(_))
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: T| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(name, format!("must be positive and finite, got {v}")))
            }
        };
        match self {
            WeightSpec::Gaussian { scale } => positive("scale", *scale),
            WeightSpec::Power { exponent, coefficient } => {
                positive("exponent", *exponent)?;
                positive("coefficient", *coefficient)
            }
            WeightSpec::CustomRadial { radii, laplacian } => {
                if radii.len() < 2 || radii.len() != laplacian.len() {
                    return Err(Error::invalid("radii", "need at least two nodes and one Laplacian sample per node"));
                }
                if radii[0] < T::zero() || radii.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::invalid("radii", "must be nonnegative and strictly increasing"));
                }
                check_samples(laplacian)
            }
            WeightSpec::CustomPlanar(grid) => {
                positive("half_width", grid.half_width)?;
                if grid.n < 2 || grid.values.len() != grid.n * grid.n {
                    return Err(Error::invalid("values", "planar grid needs n >= 2 and n*n samples"));
                }
                check_samples(&grid.values)
            }
        }
    }
}

fn check_samples<T: Real>(values: &[T]) -> Result<()> {
    if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= T::zero())) {
        return Err(Error::invalid("laplacian", format!("samples must be finite and nonnegative, found {v}")));
    }
    if values.iter().all(|v| *v == T::zero()) {
        return Err(Error::invalid("laplacian", "profile is identically zero"));
    }
    Ok(())
}

/// Disk quadrature orders used for μ(D(z, r)).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub n_rad: usize,
    pub n_ang: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { n_rad: 32, n_ang: 64 }
    }
}

/// Closed-form φ for a piecewise-linear radial Laplacian.
#[derive(Clone, Debug)]
struct RadialTable<T> {
    radii: Vec<T>,
    lap: Vec<T>,
    slope: Vec<T>,
    /// r φ'(r) at the nodes.
    m: Vec<T>,
    phi: Vec<T>,
}

impl<T: Real> RadialTable<T> {
    fn new(radii: &[T], lap: &[T]) -> Self {
        let (mut radii, mut lap) = (radii.to_vec(), lap.to_vec());
        if radii[0] > T::zero() {
            radii.insert(0, T::zero());
            lap.insert(0, lap[0]);
        }
        let n = radii.len();
        let mut slope = vec![T::zero(); n];
        for i in 0..n - 1 {
            slope[i] = (lap[i + 1] - lap[i]) / (radii[i + 1] - radii[i]);
        }
        let mut table = Self { radii, lap, slope, m: vec![T::zero(); n], phi: vec![T::zero(); n] };
        for i in 0..n - 1 {
            let s = table.radii[i + 1];
            let (m, phi) = table.segment(i, s);
            table.m[i + 1] = m;
            table.phi[i + 1] = phi;
        }
        table
    }

    fn locate(&self, s: T) -> usize {
        match self.radii.binary_search_by(|r| r.partial_cmp(&s).expect("finite radius")) {
            Ok(i) => i.min(self.radii.len() - 1),
            Err(i) => i.saturating_sub(1),
        }
    }

    /// (r φ'(r), φ(r)) at `s` on segment `i`.
    fn segment(&self, i: usize, s: T) -> (T, T) {
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let ri = self.radii[i];
        let d = self.slope[i];
        let c2 = (self.lap[i] - d * ri) / two;
        let c3 = d / three;
        let m = self.m[i] + c2 * (s * s - ri * ri) + c3 * (s * s * s - ri * ri * ri);
        let k0 = self.m[i] - c2 * ri * ri - c3 * ri * ri * ri;
        let log_term = if ri > T::zero() { k0 * (s / ri).ln() } else { T::zero() };
        let phi = self.phi[i] + log_term + c2 * (s * s - ri * ri) / two + c3 * (s * s * s - ri * ri * ri) / three;
        (m, phi)
    }

    fn laplacian(&self, s: T) -> T {
        let i = self.locate(s);
        if i + 1 >= self.radii.len() {
            return self.lap[self.lap.len() - 1];
        }
        self.lap[i] + self.slope[i] * (s - self.radii[i])
    }

    fn eval(&self, s: T) -> (T, T) {
        self.segment(self.locate(s), s)
    }
}

/// The weight together with its quadrature and the memoized radius field.
#[derive(Debug)]
pub struct WeightModel<T: Real> {
    spec: WeightSpec<T>,
    quad_config: QuadConfig,
    quad: DiskQuadrature<T>,
    check_quad: Option<DiskQuadrature<T>>,
    rho_tol: T,
    table: Option<RadialTable<T>>,
    cache: DashMap<(i64, i64), T>,
}

/// Cache keys snap points to this grid.
const CACHE_GRID: f64 = 1e-6;
const MAX_RHO_ITER: usize = 200;

impl<T: Real> WeightModel<T> {
    pub fn new(spec: WeightSpec<T>, quad_config: QuadConfig, rho_tol: T) -> Result<Self> {
        spec.validate()?;
        if quad_config.n_rad == 0 || quad_config.n_ang == 0 {
            return Err(Error::invalid("quadrature", "node counts must be positive"));
        }
        if !(rho_tol > T::zero()) {
            return Err(Error::invalid("rho_tol", "must be positive"));
        }
        let table = match &spec {
            WeightSpec::CustomRadial { radii, laplacian } => Some(RadialTable::new(radii, laplacian)),
            _ => None,
        };
        let check_quad = match &spec {
            WeightSpec::CustomPlanar(_) => {
                Some(DiskQuadrature::new((quad_config.n_rad / 2).max(2), (quad_config.n_ang / 2).max(4)))
            }
            _ => None,
        };
        Ok(Self {
            quad: DiskQuadrature::new(quad_config.n_rad, quad_config.n_ang),
            spec,
            quad_config,
            check_quad,
            rho_tol,
            table,
            cache: DashMap::new(),
        })
    }

    /// Convenience constructor with default quadrature and `rho_tol = 1e-10`.
    pub fn from_spec(spec: WeightSpec<T>) -> Result<Self> {
        let tol = if std::mem::size_of::<T>() < 8 { 1e-5 } else { 1e-10 };
        Self::new(spec, QuadConfig::default(), T::lit(tol))
    }

    pub fn classical() -> Self {
        Self::from_spec(WeightSpec::classical()).expect("classical preset is valid")
    }

    pub fn spec(&self) -> &WeightSpec<T> {
        &self.spec
    }

    pub fn quad_config(&self) -> QuadConfig {
        self.quad_config
    }

    pub fn rho_tol(&self) -> T {
        self.rho_tol
    }

    pub fn is_radial(&self) -> bool {
        self.spec.is_radial()
    }

    /// Δφ as a function of the modulus, for radial weights.
    pub fn laplacian_radial(&self, s: T) -> Result<T> {
        let s = s.abs();
        Ok(match &self.spec {
            WeightSpec::Gaussian { scale } => T::lit(4.0) * *scale,
            WeightSpec::Power { exponent, coefficient } => {
                let m = *exponent;
                if m == T::lit(2.0) {
                    *coefficient * m * m
                } else {
                    *coefficient * m * m * s.powf(m - T::lit(2.0))
                }
            }
            WeightSpec::CustomRadial { .. } => self.table.as_ref().expect("radial table").laplacian(s),
            WeightSpec::CustomPlanar(_) => return Err(Error::NotRadial("radial Laplacian")),
        })
    }

    pub fn laplacian(&self, z: Complex<T>) -> T {
        match &self.spec {
            WeightSpec::CustomPlanar(grid) => grid.eval(z),
            _ => self.laplacian_radial(z.norm()).expect("radial weight"),
        }
    }

    /// φ as a function of the modulus.
    pub fn phi_radial(&self, s: T) -> Result<T> {
        let s = s.abs();
        Ok(match &self.spec {
            WeightSpec::Gaussian { scale } => *scale * s * s,
            WeightSpec::Power { exponent, coefficient } => *coefficient * s.powf(*exponent),
            WeightSpec::CustomRadial { .. } => self.table.as_ref().expect("radial table").eval(s).1,
            WeightSpec::CustomPlanar(_) => return Err(Error::NotRadial("phi")),
        })
    }

    pub fn phi(&self, z: Complex<T>) -> Result<T> {
        self.phi_radial(z.norm())
    }

    /// r φ'(r) for radial weights; the logarithmic derivative used by moment integrals.
    pub fn r_dphi(&self, s: T) -> Result<T> {
        let s = s.abs();
        Ok(match &self.spec {
            WeightSpec::Gaussian { scale } => T::lit(2.0) * *scale * s * s,
            WeightSpec::Power { exponent, coefficient } => *coefficient * *exponent * s.powf(*exponent),
            WeightSpec::CustomRadial { .. } => self.table.as_ref().expect("radial table").eval(s).0,
            WeightSpec::CustomPlanar(_) => return Err(Error::NotRadial("phi")),
        })
    }

    /// μ(D(z, r)) = ∫_{D(z,r)} Δφ dA.
    pub fn mu_disk(&self, z: Complex<T>, r: T) -> Result<T> {
        if !(r > T::zero()) {
            return Err(Error::invalid("r", format!("disk radius must be positive, got {r}")));
        }
        let area = T::PI() * r * r;
        let value = area * self.quad.mean_real(z, r, |w| self.laplacian(w));
        if let (Some(check), WeightSpec::CustomPlanar(grid)) = (&self.check_quad, &self.spec) {
            if r < grid.spacing() {
                let coarse = area * check.mean_real(z, r, |w| self.laplacian(w));
                let scale = value.abs().max(T::min_positive_value());
                if ((coarse - value) / scale).abs() > T::lit(1e-3) {
                    return Err(Error::Quadrature(format!(
                        "disk radius {r} is below the planar grid spacing {} and the quadrature does not settle",
                        grid.spacing()
                    )));
                }
            }
        }
        Ok(value)
    }

    /// d/dr μ(D(z, r)) = ∮_{|w-z|=r} Δφ |dw|.
    fn mu_disk_derivative(&self, z: Complex<T>, r: T) -> T {
        let circle = self.quad.circle();
        let mut acc = T::zero();
        for u in circle {
            acc = acc + self.laplacian(z + *u * r);
        }
        T::TAU() * r * acc / T::from_index(circle.len())
    }

    fn cache_key(&self, z: Complex<T>) -> ((i64, i64), Complex<T>) {
        let snap = |x: T| (x.as_f64() / CACHE_GRID).round() as i64;
        let (kx, ky) = if self.is_radial() { (snap(z.norm()), 0) } else { (snap(z.re), snap(z.im)) };
        let back = |k: i64| T::lit(k as f64 * CACHE_GRID);
        ((kx, ky), Complex::new(back(kx), back(ky)))
    }

    /// The radius field: the unique r with μ(D(z, r)) = 1.
    ///
    /// The point is snapped to a 10⁻⁶ grid (to the modulus for radial weights)
    /// and ρ is solved at the snapped point, so repeated calls are bitwise
    /// reproducible regardless of cache state.
    pub fn rho(&self, z: Complex<T>) -> Result<T> {
        let (key, snapped) = self.cache_key(z);
        if let Some(v) = self.cache.get(&key) {
            return Ok(*v);
        }
        let value = self.solve_rho(snapped)?;
        self.cache.insert(key, value);
        Ok(value)
    }

    pub fn cache_len(&self) -> usize {
        self.cache.len()
    }

    /// Cached (point, ρ) pairs, for consistency checks.
    pub fn cached_entries(&self) -> Vec<(Complex<T>, T)> {
        let back = |k: i64| T::lit(k as f64 * CACHE_GRID);
        let mut out: Vec<_> = self
            .cache
            .iter()
            .map(|e| (Complex::new(back(e.key().0), back(e.key().1)), *e.value()))
            .collect();
        out.sort_by(|a, b| (a.0.re, a.0.im).partial_cmp(&(b.0.re, b.0.im)).expect("finite keys"));
        out
    }

    fn solve_rho(&self, z: Complex<T>) -> Result<T> {
        let one = T::one();
        let two = T::lit(2.0);
        let fail = || Error::RhoBracket { x: z.re.as_f64(), y: z.im.as_f64(), iterations: MAX_RHO_ITER };
        let lap0 = self.laplacian(z);
        let mut guess = if lap0 > T::zero() { (one / (T::PI() * lap0)).sqrt() } else { one };
        if !guess.is_finite() || guess <= T::zero() {
            guess = one;
        }
        // bracket
        let mut lo = guess;
        let mut hi = guess;
        let mut f_lo = self.mu_disk(z, lo)? - one;
        let mut f_hi = f_lo;
        let mut it = 0;
        while f_lo > T::zero() {
            hi = lo;
            f_hi = f_lo;
            lo = lo / two;
            f_lo = self.mu_disk(z, lo)? - one;
            it += 1;
            if it > MAX_RHO_ITER {
                return Err(fail());
            }
        }
        while f_hi < T::zero() {
            lo = hi;
            f_lo = f_hi;
            hi = hi * two;
            f_hi = self.mu_disk(z, hi)? - one;
            it += 1;
            if it > MAX_RHO_ITER {
                return Err(fail());
            }
        }
        if f_lo.abs() <= self.rho_tol {
            return Ok(lo);
        }
        if f_hi.abs() <= self.rho_tol {
            return Ok(hi);
        }
        // safeguarded Newton inside the bracket
        let mut x = if f_hi - f_lo > T::zero() { lo - f_lo * (hi - lo) / (f_hi - f_lo) } else { (lo + hi) / two };
        for _ in 0..MAX_RHO_ITER {
            if !(x > lo && x < hi) {
                x = (lo + hi) / two;
            }
            let fx = self.mu_disk(z, x)? - one;
            if fx.abs() <= self.rho_tol {
                return Ok(x);
            }
            if fx < T::zero() {
                lo = x;
            } else {
                hi = x;
            }
            if hi - lo <= T::epsilon() * hi * T::lit(4.0) {
                return Ok((lo + hi) / two);
            }
            let d = self.mu_disk_derivative(z, x);
            x = if d > T::zero() { x - fx / d } else { (lo + hi) / two };
        }
        Err(fail())
    }

    /// Largest |μ(D(z, ρ(z))) − 1| over the cached entries.
    pub fn cache_consistency(&self) -> Result<T> {
        let mut worst = T::zero();
        for (z, r) in self.cached_entries() {
            worst = worst.max((self.mu_disk(z, r)? - T::one()).abs());
        }
        Ok(worst)
    }
}

/// Summary of the doubling behaviour of μ and the regularity of ρ on samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoublingReport<T> {
    pub doubling_constant: T,
    pub lipschitz_violation: T,
    /// −(slope of the lower envelope of log ρ against log|z|), |z| > 1.
    pub eta_hat: Option<T>,
    /// Slope of the upper envelope.
    pub beta_hat: Option<T>,
    pub samples: usize,
}

/// max over pairs of |ρ(w) − ρ(z)| − |w − z|, floored at zero.
pub fn lipschitz_violation<T: Real>(model: &WeightModel<T>, pairs: &[(Complex<T>, Complex<T>)]) -> Result<T> {
    let mut worst = T::zero();
    for &(z, w) in pairs {
        let gap = (model.rho(w)? - model.rho(z)?).abs() - (w - z).norm();
        worst = worst.max(gap);
    }
    Ok(worst)
}

pub fn doubling_diagnostic<T: Real>(
    model: &WeightModel<T>,
    points: &[Complex<T>],
    radii: &[T],
) -> Result<DoublingReport<T>> {
    if points.len() < 2 {
        return Err(Error::invalid("points", "doubling diagnostic needs at least two sample points"));
    }
    let mut c_dbl = T::one();
    for &z in points {
        for &r in radii {
            let inner = model.mu_disk(z, r)?;
            if inner > T::zero() {
                c_dbl = c_dbl.max(model.mu_disk(z, T::lit(2.0) * r)? / inner);
            }
        }
    }
    let mut pairs = Vec::with_capacity(points.len() * (points.len() - 1) / 2);
    for (i, &z) in points.iter().enumerate() {
        for &w in &points[i + 1..] {
            pairs.push((z, w));
        }
    }
    let lipschitz = lipschitz_violation(model, &pairs)?;

    let mut logs = Vec::new();
    for &z in points {
        let s = z.norm();
        if s > T::one() {
            logs.push((s.ln(), model.rho(z)?.ln()));
        }
    }
    let (eta_hat, beta_hat) = envelope_slopes(&logs);
    Ok(DoublingReport {
        doubling_constant: c_dbl,
        lipschitz_violation: lipschitz,
        eta_hat: eta_hat.map(|s| -s),
        beta_hat,
        samples: points.len(),
    })
}

/// Least-squares slopes of the per-bin minimum and maximum of `y` against `x`.
fn envelope_slopes<T: Real>(xy: &[(T, T)]) -> (Option<T>, Option<T>) {
    if xy.len() < 2 {
        return (None, None);
    }
    let (xmin, xmax) = xy.iter().fold((T::infinity(), T::neg_infinity()), |(a, b), p| (a.min(p.0), b.max(p.0)));
    if !(xmax > xmin) {
        return (None, None);
    }
    let bins = 8usize.min(xy.len());
    let width = (xmax - xmin) / T::from_index(bins);
    let mut lo: Vec<Option<(T, T)>> = vec![None; bins];
    let mut hi: Vec<Option<(T, T)>> = vec![None; bins];
    for &(x, y) in xy {
        let b = ((x - xmin) / width).to_usize().unwrap_or(0).min(bins - 1);
        if lo[b].is_none_or(|p| y < p.1) {
            lo[b] = Some((x, y));
        }
        if hi[b].is_none_or(|p| y > p.1) {
            hi[b] = Some((x, y));
        }
    }
    let fit = |pts: Vec<(T, T)>| -> Option<T> { crate::stats::linear_fit(&pts).map(|f| f.slope) };
    (fit(lo.into_iter().flatten().collect()), fit(hi.into_iter().flatten().collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(x: f64, y: f64) -> Complex<f64> {
        Complex::new(x, y)
    }

    #[test]
    fn preset_laplacians() {
        let g = WeightModel::<f64>::classical();
        assert_eq!(g.laplacian(c(3.0, -1.0)), 2.0);
        let p = WeightModel::from_spec(WeightSpec::Power { exponent: 4.0, coefficient: 1.0 }).unwrap();
        assert_relative_eq!(p.laplacian(c(1.0, 1.0)), 32.0, max_relative = 1e-14);
        let p2 = WeightModel::from_spec(WeightSpec::Power { exponent: 2.0, coefficient: 1.0 }).unwrap();
        let g1 = WeightModel::from_spec(WeightSpec::Gaussian { scale: 1.0 }).unwrap();
        for z in [c(0.0, 0.0), c(0.3, 2.0)] {
            assert_eq!(p2.laplacian(z), g1.laplacian(z));
            assert_relative_eq!(p2.phi(z).unwrap(), g1.phi(z).unwrap(), max_relative = 1e-14);
        }
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(WeightModel::from_spec(WeightSpec::Gaussian { scale: 0.0 }).is_err());
        assert!(WeightModel::from_spec(WeightSpec::Power { exponent: -1.0, coefficient: 1.0 }).is_err());
        let neg = WeightSpec::CustomRadial { radii: vec![0.0, 1.0], laplacian: vec![1.0, -0.5] };
        assert!(WeightModel::from_spec(neg).is_err());
        let zero = WeightSpec::CustomRadial { radii: vec![0.0, 1.0], laplacian: vec![0.0, 0.0] };
        assert!(WeightModel::from_spec(zero).is_err());
    }

    #[test]
    fn mu_disk_closed_forms() {
        let g = WeightModel::<f64>::classical();
        assert_relative_eq!(g.mu_disk(c(5.0, 1.0), 0.7).unwrap(), 2.0 * std::f64::consts::PI * 0.49, max_relative = 1e-13);
        let p = WeightModel::from_spec(WeightSpec::Power { exponent: 4.0, coefficient: 1.0 }).unwrap();
        let r: f64 = 0.3;
        assert_relative_eq!(p.mu_disk(c(0.0, 0.0), r).unwrap(), 8.0 * std::f64::consts::PI * r.powi(4), max_relative = 1e-12);
    }

    #[test]
    fn custom_radial_reproduces_gaussian() {
        // constant Laplacian 2 sampled on a coarse profile is the classical weight
        let spec = WeightSpec::CustomRadial { radii: vec![0.0, 1.0, 5.0], laplacian: vec![2.0, 2.0, 2.0] };
        let m = WeightModel::from_spec(spec).unwrap();
        let g = WeightModel::<f64>::classical();
        for s in [0.1, 0.9, 2.5, 7.0] {
            assert_relative_eq!(m.phi_radial(s).unwrap(), g.phi_radial(s).unwrap(), max_relative = 1e-13);
            assert_relative_eq!(m.r_dphi(s).unwrap(), g.r_dphi(s).unwrap(), max_relative = 1e-13);
        }
    }

    #[test]
    fn custom_radial_linear_profile_matches_power_three() {
        // Δφ = 9r is the Laplacian of |z|^3
        let spec = WeightSpec::CustomRadial { radii: vec![0.0, 2.0, 4.0], laplacian: vec![0.0, 18.0, 36.0] };
        let m = WeightModel::from_spec(spec).unwrap();
        for s in [0.5, 1.7, 3.9] {
            assert_relative_eq!(m.phi_radial(s).unwrap(), s * s * s, max_relative = 1e-12);
        }
    }

    #[test]
    fn rho_matches_presets() {
        let g = WeightModel::<f64>::classical();
        let expected = (2.0 * std::f64::consts::PI).powf(-0.5);
        assert!((g.rho(c(1.3, -4.0)).unwrap() - expected).abs() < 1e-9);
        let p = WeightModel::from_spec(WeightSpec::Power { exponent: 4.0, coefficient: 1.0 }).unwrap();
        assert!((p.rho(c(0.0, 0.0)).unwrap() - (8.0 * std::f64::consts::PI).powf(-0.25)).abs() < 1e-9);
        assert!(p.cache_consistency().unwrap() <= 1e-10);
    }

    #[test]
    fn f32_model_solves_rho() {
        let g = WeightModel::<f32>::classical();
        let r = g.rho(Complex::new(0.5f32, 0.5)).unwrap();
        assert!((r - 0.398_942_3).abs() < 1e-4);
    }

    #[test]
    fn planar_grid_rejects_unresolved_disks() {
        // a single spike off the disk center is resolved differently by the two orders
        let n = 5;
        let mut values = vec![0.1; n * n];
        values[3 * n + 3] = 100.0;
        let spec = WeightSpec::CustomPlanar(PlanarGrid { half_width: 1.0, n, values });
        let m = WeightModel::new(spec, QuadConfig { n_rad: 4, n_ang: 8 }, 1e-10).unwrap();
        assert!(matches!(m.mu_disk(c(0.3, 0.2), 0.45), Err(Error::Quadrature(_))));
    }

    #[test]
    fn doubling_report_classical() {
        let g = WeightModel::<f64>::classical();
        let pts: Vec<_> = (0..6).map(|i| c(i as f64, 0.5 * i as f64)).collect();
        let rep = doubling_diagnostic(&g, &pts, &[0.1, 1.0]).unwrap();
        assert_relative_eq!(rep.doubling_constant, 4.0, max_relative = 1e-12);
        assert!(rep.lipschitz_violation <= 1e-12);
        assert!(doubling_diagnostic(&g, &pts[..1], &[1.0]).is_err());
    }
}
