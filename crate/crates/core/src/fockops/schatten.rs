use serde::Serialize;

use super::basis::BasisTable;
use super::eigen::hermitian_eigenvalues;
use super::hankel::{hankel_gram, GramMatrix};
use crate::error::{Error, Result};
use crate::stats::linear_fit;
use crate::symbols::SymbolDescriptor;
use crate::weights::WeightModel;
use crate::Real;

/// Singular values of H_f restricted to span{e_0..e_n}: square roots of the
/// Gram eigenvalues, sorted descending.
///
/// Eigenvalues down to −1e-10·max(1, max|g|) are clamped to zero; anything
/// more negative signals an assembly fault.
pub fn singular_values<T: Real>(gram: &GramMatrix<T>, n: usize) -> Result<Vec<T>> {
    let tol = T::lit(1e-10) * gram.max_abs().max(T::one());
    let mut out = Vec::new();
    for block in &gram.blocks {
        let (d, entries) = block.restricted(n);
        if d == 0 {
            continue;
        }
        let ev = if d == 1 { vec![entries[0].re] } else { hermitian_eigenvalues(&entries, d) };
        for e in ev {
            if e < -tol {
                return Err(Error::NotPositive(e.as_f64()));
            }
            out.push(e.max(T::zero()).sqrt());
        }
    }
    out.sort_by(|a, b| b.partial_cmp(a).expect("finite singular values"));
    Ok(out)
}

/// (Σ s_j^p)^{1/p} together with the running partial sums of s_j^p.
pub fn schatten_quasi_norm<T: Real>(svals: &[T], p: T) -> Result<(T, Vec<T>)> {
    if !(p > T::zero()) {
        return Err(Error::invalid("p", "Schatten exponent must be positive"));
    }
    let mut acc = T::zero();
    let trace: Vec<T> = svals
        .iter()
        .map(|s| {
            if *s > T::zero() {
                acc = acc + s.powf(p);
            }
            acc
        })
        .collect();
    Ok((acc.powf(T::one() / p), trace))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SchattenVerdict {
    Summable,
    Diverging,
    Inconclusive,
}

/// Partial sums Σ s^p over the truncation schedule for one exponent p.
#[derive(Clone, Debug, Serialize)]
pub struct PSeries<T> {
    pub p: T,
    pub partial_sums: Vec<T>,
    /// (Σ s^p)^{1/p} at the largest N.
    pub norm: T,
    /// Slope of log(increment) against log N.
    pub increment_slope: Option<T>,
    /// Slope of the partial sums against ln N.
    pub log_slope: Option<T>,
    /// Norm with the geometric tail of increments added, for summable series.
    pub extrapolated_norm: Option<T>,
    pub verdict: SchattenVerdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct SchattenReport<T> {
    pub symbol: String,
    pub n: usize,
    pub schedule: Vec<usize>,
    /// Singular values at the largest N, sorted descending.
    pub singular_values: Vec<T>,
    /// √g[n,n] by basis index, when the Gram matrix is diagonal.
    pub index_values: Option<Vec<T>>,
    pub series: Vec<PSeries<T>>,
}

impl<T: Real> SchattenReport<T> {
    pub fn series_for(&self, p: T) -> Option<&PSeries<T>> {
        self.series.iter().find(|s| s.p == p)
    }
}

const SUMMABLE_REL_INCREMENT: f64 = 1e-8;
const SUMMABLE_SLOPE: f64 = -0.005;

fn classify<T: Real>(p: T, schedule: &[usize], sums: &[T]) -> PSeries<T> {
    let last = *sums.last().expect("nonempty schedule");
    let norm = last.powf(T::one() / p);
    let logs: Vec<(T, T)> = schedule.iter().zip(sums).map(|(n, s)| (T::from_index((*n).max(1)).ln(), *s)).collect();
    let log_slope = linear_fit(&logs).map(|f| f.slope);
    let mut inc = Vec::new();
    let mut monotone = true;
    for i in 1..sums.len() {
        let d = sums[i] - sums[i - 1];
        if d < -T::lit(1e-12) * last.abs() {
            monotone = false;
        }
        if d > T::zero() {
            inc.push((T::from_index(schedule[i]).ln(), d.ln()));
        }
    }
    let increment_slope = linear_fit(&inc).map(|f| f.slope);
    let mut out = PSeries { p, partial_sums: sums.to_vec(), norm, increment_slope, log_slope, extrapolated_norm: None, verdict: SchattenVerdict::Inconclusive };
    if last == T::zero() {
        out.verdict = SchattenVerdict::Summable;
        out.extrapolated_norm = Some(T::zero());
        return out;
    }
    if sums.len() < 3 || !monotone {
        return out;
    }
    let n = sums.len();
    let rel = (sums[n - 1] - sums[n - 2]) / last;
    if rel < T::lit(SUMMABLE_REL_INCREMENT) {
        out.verdict = SchattenVerdict::Summable;
        out.extrapolated_norm = Some(norm);
    } else if let Some(sigma) = increment_slope {
        if sigma < T::lit(SUMMABLE_SLOPE) {
            out.verdict = SchattenVerdict::Summable;
            let ratio = T::from_index(schedule[n - 1]) / T::from_index(schedule[n - 2]);
            let q = ratio.powf(sigma);
            let tail = (sums[n - 1] - sums[n - 2]) * q / (T::one() - q);
            out.extrapolated_norm = Some((last + tail).powf(T::one() / p));
        } else {
            out.verdict = SchattenVerdict::Diverging;
        }
    }
    out
}

/// Singular values and partial Schatten sums of H_f for each truncation N in
/// `schedule` (strictly increasing) and each exponent in `p_list`.
///
/// The Gram matrix is assembled once at the largest N; smaller truncations are
/// its leading principal sub-blocks.
pub fn schatten_report<T: Real>(model: &WeightModel<T>, f: &SymbolDescriptor<T>, schedule: &[usize], p_list: &[T]) -> Result<SchattenReport<T>> {
    if schedule.is_empty() || schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("N schedule", "must be nonempty and strictly increasing"));
    }
    if p_list.iter().any(|p| !(*p > T::zero())) {
        return Err(Error::invalid("p", "Schatten exponents must be positive"));
    }
    let n_max = *schedule.last().expect("nonempty");
    let kmax = f.angular_modes()?.iter().map(|t| t.k).max().unwrap_or(0).max(0) as usize;
    let basis = BasisTable::new(model, n_max + kmax)?;
    let gram = hankel_gram(model, &basis, f, n_max)?;
    let index_values = gram.is_diagonal().then(|| gram.diagonal().into_iter().map(|g| g.max(T::zero()).sqrt()).collect());
    let mut sums = vec![Vec::with_capacity(schedule.len()); p_list.len()];
    let mut svals = Vec::new();
    for &n in schedule {
        svals = singular_values(&gram, n)?;
        for (k, p) in p_list.iter().enumerate() {
            let (norm, _) = schatten_quasi_norm(&svals, *p)?;
            sums[k].push(norm.powf(*p));
        }
    }
    let series = p_list.iter().zip(&sums).map(|(p, s)| classify(*p, schedule, s)).collect();
    Ok(SchattenReport { symbol: f.name(), n: n_max, schedule: schedule.to_vec(), singular_values: svals, index_values, series })
}
