//! Gauss–Legendre rules and the polar disk rule used by every local average.

use num_complex::Complex;

use crate::Real;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
///
/// Nodes are computed by Newton iteration on the Legendre recurrence in `f64`
/// and then converted.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut x = vec![0.0f64; n];
    let mut w = vec![0.0f64; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() <= 1e-15 {
                break;
            }
        }
        // recompute derivative at the converged node
        let mut p1 = 1.0;
        let mut p2 = 0.0;
        for j in 0..n {
            let p3 = p2;
            p2 = p1;
            p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
        }
        if (z * z - 1.0).abs() > 0.0 {
            dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x.into_iter().map(T::lit).collect(), w.into_iter().map(T::lit).collect())
}

/// A fixed Gauss–Legendre rule mapped to arbitrary intervals.
#[derive(Clone, Debug)]
pub struct GaussRule<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussRule<T> {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: T, b: T) -> impl Iterator<Item = (T, T)> + '_ {
        let half = (b - a) / T::lit(2.0);
        let mid = (a + b) / T::lit(2.0);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(T) -> T>(&self, a: T, b: T, mut f: F) -> T {
        let mut acc = T::zero();
        for (x, w) in self.mapped(a, b) {
            acc = acc + w * f(x);
        }
        acc
    }
}

/// Polar product rule on the unit disk: Gauss–Legendre in the radius times the
/// equispaced (trapezoidal) rule in the angle.
///
/// Weights are normalized so that they sum to one, i.e. the rule computes disk
/// *averages*. Angular nodes sit at half-integer offsets so that no node lies on
/// the coordinate axes.
#[derive(Clone, Debug)]
pub struct DiskQuadrature<T> {
    n_rad: usize,
    n_ang: usize,
    nodes: Vec<(Complex<T>, T)>,
    circle: Vec<Complex<T>>,
}

impl<T: Real> DiskQuadrature<T> {
    pub fn new(n_rad: usize, n_ang: usize) -> Self {
        assert!(n_rad > 0 && n_ang > 0, "disk quadrature needs nodes");
        let rule = GaussRule::<T>::new(n_rad);
        let two_pi = T::TAU();
        let circle: Vec<Complex<T>> = (0..n_ang)
            .map(|j| {
                let theta = two_pi * (T::from_index(j) + T::lit(0.5)) / T::from_index(n_ang);
                Complex::new(theta.cos(), theta.sin())
            })
            .collect();
        let ang_w = T::one() / T::from_index(n_ang);
        let mut nodes = Vec::with_capacity(n_rad * n_ang);
        for (s, w) in rule.mapped(T::zero(), T::one()) {
            // area element s ds dθ / π, normalized over the unit disk
            let wr = T::lit(2.0) * s * w * ang_w;
            for u in &circle {
                nodes.push((*u * s, wr));
            }
        }
        Self { n_rad, n_ang, nodes, circle }
    }

    pub fn n_rad(&self) -> usize {
        self.n_rad
    }

    pub fn n_ang(&self) -> usize {
        self.n_ang
    }

    /// Unit-disk nodes `u` with normalized weights (summing to 1).
    pub fn unit_nodes(&self) -> &[(Complex<T>, T)] {
        &self.nodes
    }

    /// Unit vectors of the angular rule.
    pub fn circle(&self) -> &[Complex<T>] {
        &self.circle
    }

    /// Average of a real function over `D(center, radius)`.
    pub fn mean_real<F: FnMut(Complex<T>) -> T>(&self, center: Complex<T>, radius: T, mut f: F) -> T {
        let mut acc = T::zero();
        for &(u, w) in &self.nodes {
            acc = acc + w * f(center + u * radius);
        }
        acc
    }

    /// Average of a complex function over `D(center, radius)`.
    pub fn mean<F: FnMut(Complex<T>) -> Complex<T>>(&self, center: Complex<T>, radius: T, mut f: F) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for &(u, w) in &self.nodes {
            acc = acc + f(center + u * radius) * w;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let rule = GaussRule::<f64>::new(8);
        // degree 15 is the exactness limit for 8 nodes
        let v = rule.integrate(0.0, 2.0, |x| x.powi(15));
        assert!((v - 2f64.powi(16) / 16.0).abs() < 1e-10);
        let s: f64 = gauss_legendre::<f64>(20).1.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn disk_weights_average_to_one_and_reproduce_moments() {
        let q = DiskQuadrature::<f64>::new(12, 24);
        let total: f64 = q.unit_nodes().iter().map(|n| n.1).sum();
        assert!((total - 1.0).abs() < 1e-14);
        // mean of |w - z|^2 over D(z, R) is R^2 / 2
        let z = Complex::new(0.3, -1.2);
        let m = q.mean_real(z, 2.0, |w| (w - z).norm_sqr());
        assert!((m - 2.0).abs() < 1e-13);
        // monomials average to zero
        let m1 = q.mean(z, 2.0, |w| (w - z).powi(3));
        assert!(m1.norm() < 1e-13);
    }

    #[test]
    fn single_precision_rule_is_usable() {
        let q = DiskQuadrature::<f32>::new(8, 16);
        let m = q.mean_real(Complex::new(0.0, 0.0), 1.0, |w| w.norm_sqr());
        assert!((m - 0.5).abs() < 1e-5);
    }
}
