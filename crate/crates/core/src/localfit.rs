//! Local holomorphic approximation on disks: G_{2,r}, the disk average and MO_{2,r}.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::DiskQuadrature;
use crate::symbols::SymbolDescriptor;
use crate::weights::{QuadConfig, WeightModel};
use crate::Real;

/// Result of fitting f on D(center, radius) by polynomials of degree ≤ K.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskFit<T> {
    pub center: Complex<T>,
    pub radius: T,
    pub degree: usize,
    /// Coefficients of (w − center)^k.
    pub coefficients: Vec<Complex<T>>,
    /// Root-mean-square residual over the disk (normalized by its area).
    pub residual: T,
    /// Residual after each degree 0..=K; nonincreasing.
    pub residual_by_degree: Vec<T>,
    pub quad: QuadConfig,
    /// max|R_ii| / min|R_ii| of the triangular factor (least-squares route only).
    pub condition: Option<T>,
    #[serde(skip)]
    scaled: Vec<Complex<T>>,
}

impl<T: Real> DiskFit<T> {
    /// Evaluates the fitted polynomial at `w`.
    pub fn eval(&self, w: Complex<T>) -> Complex<T> {
        let u = (w - self.center) / self.radius;
        let mut acc = Complex::new(T::zero(), T::zero());
        for a in self.scaled.iter().rev() {
            acc = acc * u + *a;
        }
        acc
    }

    /// Coefficients in the scaled variable (w − center)/radius.
    pub fn scaled_coefficients(&self) -> &[Complex<T>] {
        &self.scaled
    }

    fn from_scaled(center: Complex<T>, radius: T, scaled: Vec<Complex<T>>, residuals: Vec<T>, quad: QuadConfig, condition: Option<T>) -> Self {
        let mut rk = T::one();
        let coefficients = scaled
            .iter()
            .map(|a| {
                let c = *a / rk;
                rk = rk * radius;
                c
            })
            .collect();
        Self {
            center,
            radius,
            degree: scaled.len() - 1,
            coefficients,
            residual: *residuals.last().expect("at least degree zero"),
            residual_by_degree: residuals,
            quad,
            condition,
            scaled,
        }
    }
}

fn sample<T: Real>(f: &SymbolDescriptor<T>, z: Complex<T>, radius: T, quad: &DiskQuadrature<T>) -> Result<Vec<Complex<T>>> {
    let mut values = Vec::with_capacity(quad.unit_nodes().len());
    for &(u, _) in quad.unit_nodes() {
        let v = f.eval(z + u * radius);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Quadrature(format!("symbol {} is not finite on D({z}, {radius})", f.name())));
        }
        values.push(v);
    }
    Ok(values)
}

fn config_of<T: Real>(quad: &DiskQuadrature<T>) -> QuadConfig {
    QuadConfig { n_rad: quad.n_rad(), n_ang: quad.n_ang() }
}

/// Orthogonal projection of f onto polynomials of degree ≤ K in L²(D(z, R)).
///
/// Monomials in u = (w − z)/R are orthogonal on the unit disk with
/// ‖u^k‖² = 1/(k+1) (normalized area), so coefficients are independent
/// inner products. The residual is evaluated directly as the quadrature norm
/// of f minus the partial sum, degree by degree.
pub fn disk_projection<T: Real>(
    f: &SymbolDescriptor<T>,
    z: Complex<T>,
    radius: T,
    degree: usize,
    quad: &DiskQuadrature<T>,
) -> Result<DiskFit<T>> {
    if !(radius > T::zero()) {
        return Err(Error::invalid("R", "disk radius must be positive"));
    }
    let values = sample(f, z, radius, quad)?;
    Ok(project_samples(&values, z, radius, degree, quad))
}

fn project_samples<T: Real>(values: &[Complex<T>], z: Complex<T>, radius: T, degree: usize, quad: &DiskQuadrature<T>) -> DiskFit<T> {
    let nodes = quad.unit_nodes();
    let zero = Complex::new(T::zero(), T::zero());
    let mut powers = vec![Complex::new(T::one(), T::zero()); nodes.len()];
    let mut partial = vec![zero; nodes.len()];
    let mut scaled = Vec::with_capacity(degree + 1);
    let mut residuals = Vec::with_capacity(degree + 1);
    for k in 0..=degree {
        if k > 0 {
            for (p, (u, _)) in powers.iter_mut().zip(nodes) {
                *p = *p * *u;
            }
        }
        let mut a = zero;
        for ((v, p), (_, w)) in values.iter().zip(&powers).zip(nodes) {
            a = a + *v * p.conj() * *w;
        }
        a = a * T::from_index(k + 1);
        let mut ss = T::zero();
        for (((acc, p), v), (_, w)) in partial.iter_mut().zip(&powers).zip(values).zip(nodes) {
            *acc = *acc + a * *p;
            ss = ss + (*v - *acc).norm_sqr() * *w;
        }
        let res = ss.sqrt();
        let prev = residuals.last().copied().unwrap_or(res);
        residuals.push(res.min(prev));
        scaled.push(a);
    }
    DiskFit::from_scaled(z, radius, scaled, residuals, config_of(quad), None)
}

/// Weighted least-squares fit on the quadrature nodes by Householder QR.
///
/// Independent of the orthogonality argument in [`disk_projection`]; used to
/// cross-check it.
pub fn lsq_oracle<T: Real>(
    f: &SymbolDescriptor<T>,
    z: Complex<T>,
    radius: T,
    degree: usize,
    quad: &DiskQuadrature<T>,
) -> Result<DiskFit<T>> {
    if !(radius > T::zero()) {
        return Err(Error::invalid("R", "disk radius must be positive"));
    }
    let values = sample(f, z, radius, quad)?;
    let nodes = quad.unit_nodes();
    let rows = nodes.len();
    let cols = degree + 1;
    if rows < cols {
        return Err(Error::Quadrature("fewer quadrature nodes than unknowns".into()));
    }
    let zero = Complex::new(T::zero(), T::zero());
    // column-major A and right-hand side b
    let mut a = vec![zero; rows * cols];
    let mut b = Vec::with_capacity(rows);
    for (i, ((u, w), v)) in nodes.iter().zip(&values).enumerate() {
        let sw = w.sqrt();
        let mut p = Complex::new(sw, T::zero());
        for k in 0..cols {
            a[k * rows + i] = p;
            p = p * *u;
        }
        b.push(*v * sw);
    }
    let mut diag = Vec::with_capacity(cols);
    for k in 0..cols {
        let col = &a[k * rows..(k + 1) * rows];
        let norm = col[k..].iter().map(|x| x.norm_sqr()).sum::<T>().sqrt();
        if norm == T::zero() {
            return Err(Error::Quadrature("rank-deficient least-squares system".into()));
        }
        let x0 = col[k];
        let phase = if x0.norm() > T::zero() { x0 / x0.norm() } else { Complex::new(T::one(), T::zero()) };
        let alpha = -phase * norm;
        let mut v: Vec<Complex<T>> = col[k..].to_vec();
        v[0] = v[0] - alpha;
        let vnorm2: T = v.iter().map(|x| x.norm_sqr()).sum();
        diag.push(alpha);
        if vnorm2 == T::zero() {
            continue;
        }
        let apply = |target: &mut [Complex<T>]| {
            let mut dot = zero;
            for (vi, ti) in v.iter().zip(target.iter()) {
                dot = dot + vi.conj() * *ti;
            }
            let s = dot * (T::lit(2.0) / vnorm2);
            for (vi, ti) in v.iter().zip(target.iter_mut()) {
                *ti = *ti - *vi * s;
            }
        };
        for j in k..cols {
            apply(&mut a[j * rows + k..(j + 1) * rows]);
        }
        apply(&mut b[k..]);
    }
    let mut x = vec![zero; cols];
    for k in (0..cols).rev() {
        let mut s = b[k];
        for j in k + 1..cols {
            s = s - a[j * rows + k] * x[j];
        }
        x[k] = s / a[k * rows + k];
    }
    let (dmax, dmin) = diag.iter().fold((T::zero(), T::infinity()), |(hi, lo), d| (hi.max(d.norm()), lo.min(d.norm())));
    // residuals for every degree, from the nested least-squares problems
    let mut residuals = Vec::with_capacity(cols);
    for d in 0..cols {
        let tail: T = b[d + 1..].iter().map(|x| x.norm_sqr()).sum();
        residuals.push(tail.sqrt());
    }
    // the full residual is recomputed directly from the solution
    let mut ss = T::zero();
    for ((u, w), v) in nodes.iter().zip(&values) {
        let mut acc = zero;
        for c in x.iter().rev() {
            acc = acc * *u + *c;
        }
        ss = ss + (*v - acc).norm_sqr() * *w;
    }
    *residuals.last_mut().expect("nonempty") = ss.sqrt();
    Ok(DiskFit::from_scaled(z, radius, x, residuals, config_of(quad), Some(dmax / dmin)))
}

/// Degree policy for local fits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Degree {
    Fixed(usize),
    /// Degree 12, raised to 24 when the residual still drops by more than 1e-6
    /// of the degree-0 residual between degrees 12 and 16.
    Auto,
}

/// Quadrature plus degree policy shared by the G/MO evaluators.
#[derive(Clone, Debug)]
pub struct LocalFitter<T> {
    quad: DiskQuadrature<T>,
    degree: Degree,
}

impl<T: Real> Default for LocalFitter<T> {
    fn default() -> Self {
        Self::new(48, 96, Degree::Auto)
    }
}

impl<T: Real> LocalFitter<T> {
    pub fn new(n_rad: usize, n_ang: usize, degree: Degree) -> Self {
        Self { quad: DiskQuadrature::new(n_rad, n_ang), degree }
    }

    pub fn quad(&self) -> &DiskQuadrature<T> {
        &self.quad
    }

    pub fn degree(&self) -> Degree {
        self.degree
    }

    /// Projection on D(z, R) under the degree policy.
    pub fn fit(&self, f: &SymbolDescriptor<T>, z: Complex<T>, radius: T) -> Result<DiskFit<T>> {
        if !(radius > T::zero()) {
            return Err(Error::invalid("R", "disk radius must be positive"));
        }
        let values = sample(f, z, radius, &self.quad)?;
        Ok(match self.degree {
            Degree::Fixed(k) => project_samples(&values, z, radius, k, &self.quad),
            Degree::Auto => {
                let trial = project_samples(&values, z, radius, 16, &self.quad);
                let r12 = trial.residual_by_degree[12];
                // relative to MO₂ so that the choice is scale invariant
                if r12 - trial.residual_by_degree[16] > T::lit(1e-6) * trial.residual_by_degree[0] {
                    project_samples(&values, z, radius, 24, &self.quad)
                } else {
                    project_samples(&values, z, radius, 12, &self.quad)
                }
            }
        })
    }

    /// G_{2,r}(f)(z) evaluated at an explicit radius R.
    pub fn g2_at(&self, f: &SymbolDescriptor<T>, z: Complex<T>, radius: T) -> Result<T> {
        Ok(self.fit(f, z, radius)?.residual)
    }

    /// G_{2,r}(f)(z): residual of the projection on D(z, r·ρ(z)).
    pub fn g2(&self, f: &SymbolDescriptor<T>, model: &WeightModel<T>, z: Complex<T>, r: T) -> Result<T> {
        self.g2_at(f, z, r * model.rho(z)?)
    }

    pub fn f_hat_at(&self, f: &SymbolDescriptor<T>, z: Complex<T>, radius: T) -> Result<Complex<T>> {
        let values = sample(f, z, radius, &self.quad)?;
        Ok(mean(&values, &self.quad))
    }

    /// f̂_r(z), the mean of f over D(z, r·ρ(z)).
    pub fn f_hat(&self, f: &SymbolDescriptor<T>, model: &WeightModel<T>, z: Complex<T>, r: T) -> Result<Complex<T>> {
        self.f_hat_at(f, z, r * model.rho(z)?)
    }

    /// Root-mean-square deviation from the mean on D(z, R), computed in two passes.
    pub fn mo2_at(&self, f: &SymbolDescriptor<T>, z: Complex<T>, radius: T) -> Result<T> {
        let values = sample(f, z, radius, &self.quad)?;
        Ok(project_samples(&values, z, radius, 0, &self.quad).residual)
    }

    /// MO_{2,r}(f)(z).
    pub fn mo2(&self, f: &SymbolDescriptor<T>, model: &WeightModel<T>, z: Complex<T>, r: T) -> Result<T> {
        self.mo2_at(f, z, r * model.rho(z)?)
    }

    /// (G_{2}, MO_{2}) on the same disk and the same samples.
    pub fn g2_mo2_at(&self, f: &SymbolDescriptor<T>, z: Complex<T>, radius: T) -> Result<(T, T)> {
        let fit = self.fit(f, z, radius)?;
        Ok((fit.residual, fit.residual_by_degree[0]))
    }
}

fn mean<T: Real>(values: &[Complex<T>], quad: &DiskQuadrature<T>) -> Complex<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    for (v, (_, w)) in values.iter().zip(quad.unit_nodes()) {
        acc = acc + *v * *w;
    }
    acc
}
