use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::weights::WeightModel;
use crate::Real;

/// 8-neighbour grid graph on a rectangle with edge weights |Δz| / ρ(midpoint).
#[derive(Clone, Debug)]
pub struct MetricGraph<T> {
    pub origin: Complex<T>,
    pub mesh: T,
    pub nx: usize,
    pub ny: usize,
}

#[derive(Clone, Copy, PartialEq)]
struct Entry<T> {
    cost: T,
    node: usize,
}

impl<T: PartialOrd> Eq for Entry<T> {}

impl<T: PartialOrd> PartialOrd for Entry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: PartialOrd> Ord for Entry<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on cost, ties by node index
        other
            .cost
            .partial_cmp(&self.cost)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.node.cmp(&self.node))
    }
}

const NEIGHBOURS: [(i64, i64); 8] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)];

impl<T: Real> MetricGraph<T> {
    /// Grid with spacing `mesh` whose node (0, 0) sits at `origin`, spanning
    /// the box `[lo, hi]`.
    pub fn new(origin: Complex<T>, lo: Complex<T>, hi: Complex<T>, mesh: T) -> Result<(Self, (usize, usize))> {
        if !(mesh > T::zero()) {
            return Err(Error::invalid("mesh", "must be positive"));
        }
        let steps_before = |o: T, l: T| ((o - l) / mesh).ceil().max(T::zero()).to_usize().unwrap_or(0);
        let steps_after = |o: T, h: T| ((h - o) / mesh).ceil().max(T::zero()).to_usize().unwrap_or(0);
        let bx = steps_before(origin.re, lo.re);
        let by = steps_before(origin.im, lo.im);
        let nx = bx + steps_after(origin.re, hi.re) + 1;
        let ny = by + steps_after(origin.im, hi.im) + 1;
        let corner = origin - Complex::new(T::from_index(bx) * mesh, T::from_index(by) * mesh);
        Ok((Self { origin: corner, mesh, nx, ny }, (bx, by)))
    }

    pub fn node_count(&self) -> usize {
        self.nx * self.ny
    }

    pub fn position(&self, node: usize) -> Complex<T> {
        let (i, j) = (node % self.nx, node / self.nx);
        self.origin + Complex::new(T::from_index(i) * self.mesh, T::from_index(j) * self.mesh)
    }

    fn nearest(&self, w: Complex<T>) -> usize {
        let clamp = |v: T, n: usize| v.round().max(T::zero()).min(T::from_index(n - 1)).to_usize().unwrap_or(0);
        let i = clamp((w.re - self.origin.re) / self.mesh, self.nx);
        let j = clamp((w.im - self.origin.im) / self.mesh, self.ny);
        j * self.nx + i
    }

    /// Dijkstra distances from `source` until `target` is settled.
    pub fn shortest(&self, model: &WeightModel<T>, source: usize, target: usize) -> Result<T> {
        let mut dist = vec![T::infinity(); self.node_count()];
        let mut heap = BinaryHeap::new();
        dist[source] = T::zero();
        heap.push(Entry { cost: T::zero(), node: source });
        while let Some(Entry { cost, node }) = heap.pop() {
            if node == target {
                return Ok(cost);
            }
            if cost > dist[node] {
                continue;
            }
            let (i, j) = ((node % self.nx) as i64, (node / self.nx) as i64);
            let p = self.position(node);
            for (di, dj) in NEIGHBOURS {
                let (a, b) = (i + di, j + dj);
                if a < 0 || b < 0 || a >= self.nx as i64 || b >= self.ny as i64 {
                    continue;
                }
                let next = b as usize * self.nx + a as usize;
                let q = self.position(next);
                let mid = (p + q) * T::lit(0.5);
                let c = cost + (q - p).norm() / model.rho(mid)?;
                if c < dist[next] {
                    dist[next] = c;
                    heap.push(Entry { cost: c, node: next });
                }
            }
        }
        Err(Error::Disconnected(format!("node {target} unreachable from {source}")))
    }
}

/// Grid estimate of d_φ(z, w) = inf ∫ |γ'| / ρ(γ).
///
/// The graph is anchored at z and spans the box around z and w padded by half
/// their distance; w is joined to its nearest node by a straight segment.
pub fn d_phi_estimate<T: Real>(model: &WeightModel<T>, z: Complex<T>, w: Complex<T>, mesh: T) -> Result<T> {
    if z == w {
        return Ok(T::zero());
    }
    let pad = (w - z).norm() * T::lit(0.5) + mesh * T::lit(2.0);
    let lo = Complex::new(z.re.min(w.re) - pad, z.im.min(w.im) - pad);
    let hi = Complex::new(z.re.max(w.re) + pad, z.im.max(w.im) + pad);
    let (graph, (bx, by)) = MetricGraph::new(z, lo, hi, mesh)?;
    let source = by * graph.nx + bx;
    let target = graph.nearest(w);
    let snapped = graph.position(target);
    let tail = if snapped == w { T::zero() } else { (w - snapped).norm() / model.rho((w + snapped) * T::lit(0.5))? };
    Ok(graph.shortest(model, source, target)? + tail)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_distance_is_euclidean_over_rho() {
        let model = WeightModel::<f64>::classical();
        let rho = (2.0 * std::f64::consts::PI).powf(-0.5);
        let z = Complex::new(0.0, 0.0);
        let w = Complex::new(1.3, 0.7);
        let d = d_phi_estimate(&model, z, w, rho / 4.0).unwrap();
        let exact = (w - z).norm() / rho;
        assert!(d >= exact * (1.0 - 1e-9) && d <= exact * 1.09, "{d} vs {exact}");
        assert_eq!(d_phi_estimate(&model, z, z, 0.1).unwrap(), 0.0);
    }
}
