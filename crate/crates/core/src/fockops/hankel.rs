use std::collections::BTreeMap;

use num_complex::Complex;
use serde::Serialize;

use super::basis::BasisTable;
use super::moments::{LogValue, MomentIntegrator};
use crate::error::{Error, Result};
use crate::symbols::{ModeTerm, RadialProfile, SymbolDescriptor};
use crate::weights::WeightModel;
use crate::Real;

/// Dense Hermitian block of H*H on the indices it couples.
#[derive(Clone, Debug, Serialize)]
pub struct GramBlock<T> {
    /// Basis indices n (ascending) spanned by the block.
    pub indices: Vec<usize>,
    /// Row-major entries g[i][j] = ⟨H_f e_{indices[i]}, H_f e_{indices[j]}⟩.
    pub entries: Vec<Complex<T>>,
}

impl<T: Real> GramBlock<T> {
    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.entries[i * self.dim() + j]
    }

    /// Leading principal sub-block restricted to indices ≤ n.
    pub fn restricted(&self, n: usize) -> (usize, Vec<Complex<T>>) {
        let d = self.indices.iter().take_while(|&&i| i <= n).count();
        let mut out = Vec::with_capacity(d * d);
        for i in 0..d {
            out.extend_from_slice(&self.entries[i * self.dim()..i * self.dim() + d]);
        }
        (d, out)
    }
}

/// H_f*H_f restricted to span{e_0, …, e_N}, split into independent blocks.
#[derive(Clone, Debug, Serialize)]
pub struct GramMatrix<T> {
    pub n: usize,
    pub blocks: Vec<GramBlock<T>>,
    /// Output modes n + k that occur.
    pub modes: Vec<i64>,
}

impl<T: Real> GramMatrix<T> {
    pub fn is_diagonal(&self) -> bool {
        self.blocks.iter().all(|b| b.dim() == 1)
    }

    /// Diagonal entries indexed by basis degree.
    pub fn diagonal(&self) -> Vec<T> {
        let mut d = vec![T::zero(); self.n + 1];
        for b in &self.blocks {
            for (i, &n) in b.indices.iter().enumerate() {
                d[n] = b.get(i, i).re;
            }
        }
        d
    }

    pub fn max_abs(&self) -> T {
        self.blocks.iter().flat_map(|b| b.entries.iter()).map(|e| e.norm()).fold(T::zero(), T::max)
    }
}

#[derive(Clone, Copy, Debug)]
struct Interval<T> {
    lo: T,
    hi: T,
}

impl<T: Real> Interval<T> {
    fn of(p: &RadialProfile<T>) -> Self {
        let (lo, hi) = p.support();
        Self { lo: lo.max(T::zero()), hi }
    }

    fn is_empty(&self) -> bool {
        !(self.hi > self.lo)
    }

    fn intersect(&self, o: &Self) -> Self {
        Self { lo: self.lo.max(o.lo), hi: self.hi.min(o.hi) }
    }

    /// self ∖ o as at most two intervals.
    fn minus(&self, o: &Self) -> Vec<Self> {
        let cut = self.intersect(o);
        if cut.is_empty() {
            return vec![*self];
        }
        [Self { lo: self.lo, hi: cut.lo }, Self { lo: cut.hi, hi: self.hi }]
            .into_iter()
            .filter(|i| !i.is_empty())
            .collect()
    }

    /// [0, ∞) ∖ (a ∪ b).
    fn complement_of_union(a: &Self, b: &Self) -> Vec<Self> {
        let (first, second) = if a.lo <= b.lo { (a, b) } else { (b, a) };
        let mut out = Vec::new();
        out.push(Self { lo: T::zero(), hi: first.lo });
        if second.lo > first.hi {
            out.push(Self { lo: first.hi, hi: second.lo });
        }
        out.push(Self { lo: first.hi.max(second.hi), hi: T::infinity() });
        out.into_iter().filter(|i| !i.is_empty()).collect()
    }
}

struct Assembler<'a, T: Real> {
    mi: MomentIntegrator<'a, T>,
    basis: &'a BasisTable<T>,
}

impl<'a, T: Real> Assembler<'a, T> {
    /// 2π ∫_I r^a g(r) e^{−2φ} dr where g is the product of the given profiles'
    /// non-power parts; power exponents are folded into `a`.
    fn moment(&self, a: T, iv: Interval<T>, profiles: &[&RadialProfile<T>]) -> Result<LogValue<T>> {
        if iv.is_empty() {
            return Ok(LogValue::zero());
        }
        let mut a = a;
        let mut customs: Vec<&RadialProfile<T>> = Vec::new();
        let mut breaks = Vec::new();
        for p in profiles {
            match p {
                RadialProfile::Power { exponent, .. } => a = a + *exponent,
                RadialProfile::Custom { breakpoints, .. } => {
                    customs.push(p);
                    breaks.extend_from_slice(breakpoints);
                }
            }
        }
        if customs.is_empty() {
            self.mi.integrate(a, iv.lo, iv.hi, None, &breaks)
        } else {
            let g = |r: T| customs.iter().fold(T::one(), |acc, p| acc * p.eval(r));
            self.mi.integrate(a, iv.lo, iv.hi, Some(&g), &breaks)
        }
    }

    fn ln_b(&self, n: usize) -> T {
        self.basis.ln_b[n]
    }

    /// ⟨u e^{imθ}, e_m⟩ for the piece u = coeff·g(r) r^n / √b_n of f·e_n.
    fn projection(&self, term: &ModeTerm<T>, n: usize, m: usize) -> Result<Complex<T>> {
        let v = self.moment(T::from_index(n + m + 1), Interval::of(&term.profile), &[&term.profile])?;
        let shift = -(self.ln_b(n) + self.ln_b(m)) / T::lit(2.0);
        Ok(term.coeff * v.scaled_exp(shift))
    }

    /// μ_m(A) = 2π ∫_A r^{2m+1} e^{−2φ} dr / b_m.
    fn mu(&self, m: usize, sets: &[Interval<T>]) -> Result<T> {
        let mut total = T::zero();
        for iv in sets {
            total = total + self.moment(T::from_index(2 * m + 1), *iv, &[])?.scaled_exp(-self.ln_b(m));
        }
        Ok(total)
    }

    /// Contribution of the pieces (t at degree n) and (t' at degree n′) that land
    /// in the same output mode m.
    fn contribution(&self, t: &ModeTerm<T>, n: usize, tp: &ModeTerm<T>, np: usize) -> Result<Complex<T>> {
        let m = n as i64 + t.k as i64;
        let norm_shift = -(self.ln_b(n) + self.ln_b(np)) / T::lit(2.0);
        let iv = Interval::of(&t.profile);
        let ivp = Interval::of(&tp.profile);
        if m >= 0 && t.is_holomorphic_power() && tp.is_holomorphic_power() {
            // both pieces are c·r^m on an interval: the projection residual is a
            // covariance of indicator functions under μ_m, written without cancellation
            let m = m as usize;
            let both = iv.intersect(&ivp);
            let a = self.mu(m, &[both])?;
            let d = self.mu(m, &Interval::complement_of_union(&iv, &ivp))?;
            let only = self.mu(m, &iv.minus(&ivp))?;
            let only_p = self.mu(m, &ivp.minus(&iv))?;
            let bracket = a * d - only * only_p;
            let scale = (self.ln_b(m) + norm_shift).exp();
            return Ok(t.coeff * tp.coeff.conj() * (scale * bracket));
        }
        let inner = self.moment(T::from_index(n + np + 1), iv.intersect(&ivp), &[&t.profile, &tp.profile])?;
        let mut value = t.coeff * tp.coeff.conj() * inner.scaled_exp(norm_shift);
        if m >= 0 {
            let m = m as usize;
            value = value - self.projection(t, n, m)? * self.projection(tp, np, m)?.conj();
        }
        Ok(value)
    }
}

/// Gram matrix of the Hankel operator H_f = (I − P)(f ·) on span{e_0..e_N},
/// with e_n = z^n/√b_n, for a radial weight and a mode-decomposable symbol.
///
/// The domain is truncated, the range is not: inner products ⟨f e_n, f e_{n′}⟩
/// are exact radial integrals and P is applied on every output mode n + k ≥ 0.
/// The basis must therefore extend to degree N + max k.
pub fn hankel_gram<T: Real>(model: &WeightModel<T>, basis: &BasisTable<T>, f: &SymbolDescriptor<T>, n: usize) -> Result<GramMatrix<T>> {
    if !model.is_radial() {
        return Err(Error::NotRadial("Hankel Gram assembly"));
    }
    let terms = f.angular_modes()?;
    let kmax = terms.iter().map(|t| t.k).max().unwrap_or(0).max(0) as usize;
    if basis.n_max < n + kmax {
        return Err(Error::invalid("basis", format!("needs degree {} for N = {n} and mode shift {kmax}", n + kmax)));
    }
    let asm = Assembler { mi: MomentIntegrator::new(model)?, basis };
    let mut entries: BTreeMap<(usize, usize), Complex<T>> = BTreeMap::new();
    let mut modes = Vec::new();
    for i in 0..=n {
        for t in &terms {
            let m = i as i64 + t.k as i64;
            if !modes.contains(&m) {
                modes.push(m);
            }
            for tp in &terms {
                let j = m - tp.k as i64;
                if j < i as i64 || j > n as i64 {
                    continue;
                }
                let j = j as usize;
                let c = asm.contribution(t, i, tp, j)?;
                let slot = entries.entry((i, j)).or_insert(Complex::new(T::zero(), T::zero()));
                *slot = *slot + c;
            }
        }
    }
    modes.sort_unstable();

    // union-find over coupled indices
    let mut parent: Vec<usize> = (0..=n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for &(i, j) in entries.keys() {
        if i != j {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..=n {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(i);
    }
    let zero = Complex::new(T::zero(), T::zero());
    let blocks = groups
        .into_values()
        .map(|indices| {
            let d = indices.len();
            let mut e = vec![zero; d * d];
            for (a, &i) in indices.iter().enumerate() {
                for (b, &j) in indices.iter().enumerate().skip(a) {
                    let v = entries.get(&(i, j)).copied().unwrap_or(zero);
                    if a == b {
                        e[a * d + a] = Complex::new(v.re, T::zero());
                    } else {
                        e[a * d + b] = v;
                        e[b * d + a] = v.conj();
                    }
                }
            }
            GramBlock { indices, entries: e }
        })
        .collect();
    Ok(GramMatrix { n, blocks, modes })
}
