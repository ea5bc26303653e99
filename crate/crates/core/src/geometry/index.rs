use std::collections::HashMap;

use num_complex::Complex;

use crate::Real;

/// Uniform-grid hash per dyadic level of ρ: a center with ρ ∈ [2^L, 2^{L+1})
/// lives in the level-L grid with cell size scale·2^{L+1}, so searches scale
/// with the local geometry.
#[derive(Clone, Debug)]
pub(crate) struct SpatialIndex {
    cells: HashMap<(i32, i64, i64), Vec<u32>>,
    levels: Vec<i32>,
    scale: f64,
}

fn level_of<T: Real>(rho: T) -> i32 {
    rho.as_f64().log2().floor() as i32
}

impl SpatialIndex {
    /// `scale` should match the typical search radius in units of ρ.
    pub fn new(scale: f64) -> Self {
        let scale = if scale > 0.0 && scale.is_finite() { scale } else { 1.0 };
        Self { cells: HashMap::new(), levels: Vec::new(), scale }
    }

    fn cell_size(&self, level: i32) -> f64 {
        self.scale * 2f64.powi(level + 1)
    }

    pub fn insert<T: Real>(&mut self, j: usize, a: Complex<T>, rho: T) {
        let level = level_of(rho);
        let h = self.cell_size(level);
        let key = (level, (a.re.as_f64() / h).floor() as i64, (a.im.as_f64() / h).floor() as i64);
        self.cells.entry(key).or_default().push(j as u32);
        if let Err(pos) = self.levels.binary_search(&level) {
            self.levels.insert(pos, level);
        }
    }

    /// Calls `visit(j, |z − a_j|)` for every center with |z − a_j| < extra + alpha·ρ_j,
    /// in a deterministic order.
    pub fn for_each_within<T: Real, F: FnMut(usize, T)>(
        &self,
        centers: &[Complex<T>],
        rhos: &[T],
        z: Complex<T>,
        extra: T,
        alpha: T,
        mut visit: F,
    ) {
        let (zx, zy) = (z.re.as_f64(), z.im.as_f64());
        for &level in &self.levels {
            let h = self.cell_size(level);
            let bound = extra.as_f64() + alpha.as_f64() * 2f64.powi(level + 1);
            let span = (bound / h).ceil() as i64;
            let cx = (zx / h).floor() as i64;
            let cy = (zy / h).floor() as i64;
            for iy in cy - span..=cy + span {
                for ix in cx - span..=cx + span {
                    if let Some(list) = self.cells.get(&(level, ix, iy)) {
                        for &j in list {
                            let j = j as usize;
                            let d = (z - centers[j]).norm();
                            if d < extra + alpha * rhos[j] {
                                visit(j, d);
                            }
                        }
                    }
                }
            }
        }
    }
}
