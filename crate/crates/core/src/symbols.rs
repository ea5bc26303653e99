//! Symbols f: ℂ → ℂ, either in closed form, as finite angular-mode sums, or sampled.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::Real;

pub type RadialFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;
pub type PlanarFn<T> = Arc<dyn Fn(Complex<T>) -> Complex<T> + Send + Sync>;

/// A real radial profile g(r) supported on `[lo, hi]` (`hi` may be infinite).
#[derive(Clone)]
pub enum RadialProfile<T> {
    /// g(r) = r^exponent on the support.
    Power { exponent: T, lo: T, hi: T },
    /// Arbitrary evaluator; `breakpoints` lists interior radii where g is not smooth.
    Custom { eval: RadialFn<T>, lo: T, hi: T, breakpoints: Vec<T> },
}

impl<T: Real> RadialProfile<T> {
    pub fn power(exponent: T) -> Self {
        RadialProfile::Power { exponent, lo: T::zero(), hi: T::infinity() }
    }

    pub fn support(&self) -> (T, T) {
        match self {
            RadialProfile::Power { lo, hi, .. } | RadialProfile::Custom { lo, hi, .. } => (*lo, *hi),
        }
    }

    pub fn breakpoints(&self) -> &[T] {
        match self {
            RadialProfile::Power { .. } => &[],
            RadialProfile::Custom { breakpoints, .. } => breakpoints,
        }
    }

    /// Exponent of a pure power profile.
    pub fn exponent(&self) -> Option<T> {
        match self {
            RadialProfile::Power { exponent, .. } => Some(*exponent),
            RadialProfile::Custom { .. } => None,
        }
    }

    pub fn eval(&self, r: T) -> T {
        let (lo, hi) = self.support();
        if r < lo || r > hi {
            return T::zero();
        }
        match self {
            RadialProfile::Power { exponent, .. } => pow_real(r, *exponent),
            RadialProfile::Custom { eval, .. } => eval(r),
        }
    }
}

impl<T: fmt::Display> fmt::Debug for RadialProfile<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadialProfile::Power { exponent, lo, hi } => write!(f, "r^{exponent} on [{lo}, {hi}]"),
            RadialProfile::Custom { lo, hi, .. } => write!(f, "custom on [{lo}, {hi}]"),
        }
    }
}

/// r^e, exact for integral exponents.
fn pow_real<T: Real>(r: T, e: T) -> T {
    if e == e.round() && e.abs() < T::lit(64.0) {
        r.powi(e.to_i32().expect("small integer exponent"))
    } else {
        r.powf(e)
    }
}

/// One angular mode: coeff · g(|z|) · e^{ikθ}.
#[derive(Clone)]
pub struct ModeTerm<T> {
    pub k: i32,
    pub coeff: Complex<T>,
    pub profile: RadialProfile<T>,
}

impl<T: Real> fmt::Debug for ModeTerm<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} · ({:?}) · e^{{{}iθ}}", self.coeff, self.profile, self.k)
    }
}

impl<T: Real> ModeTerm<T> {
    /// True when the term is coeff · z^k on an annulus (holomorphic on the annulus interior).
    pub fn is_holomorphic_power(&self) -> bool {
        self.profile.exponent().is_some_and(|e| e == T::lit(self.k as f64))
    }

    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        let r = z.norm();
        let g = self.profile.eval(r);
        if g == T::zero() {
            return Complex::new(T::zero(), T::zero());
        }
        let phase = if r > T::zero() { (z / r).powi(self.k) } else { Complex::new(T::one(), T::zero()) };
        phase * self.coeff * g
    }
}

/// Values on a regular grid, interpolated bilinearly and extended by zero.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledGrid<T> {
    pub x0: T,
    pub y0: T,
    pub dx: T,
    pub dy: T,
    pub nx: usize,
    pub ny: usize,
    /// Row-major in y then x.
    pub values: Vec<Complex<T>>,
}

impl<T: Real> SampledGrid<T> {
    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        let gx = (z.re - self.x0) / self.dx;
        let gy = (z.im - self.y0) / self.dy;
        let zero = Complex::new(T::zero(), T::zero());
        let maxx = T::from_index(self.nx - 1);
        let maxy = T::from_index(self.ny - 1);
        if !(gx >= T::zero() && gy >= T::zero() && gx <= maxx && gy <= maxy) {
            return zero;
        }
        let i = gx.floor().to_usize().unwrap_or(0).min(self.nx.saturating_sub(2));
        let j = gy.floor().to_usize().unwrap_or(0).min(self.ny.saturating_sub(2));
        let tx = gx - T::from_index(i);
        let ty = gy - T::from_index(j);
        let v = |a: usize, b: usize| self.values[b * self.nx + a];
        let one = T::one();
        v(i, j) * ((one - tx) * (one - ty))
            + v(i + 1, j) * (tx * (one - ty))
            + v(i, j + 1) * ((one - tx) * ty)
            + v(i + 1, j + 1) * (tx * ty)
    }
}

#[derive(Clone)]
pub struct CustomSymbol<T> {
    pub name: String,
    pub eval: PlanarFn<T>,
    /// Declares the function entire; lets integrators skip provably zero local residuals.
    pub entire: bool,
}

/// A symbol f, the function whose Hankel operator and local oscillation are studied.
#[derive(Clone)]
pub enum SymbolDescriptor<T> {
    /// 1/z on |z| ≥ 1, zero inside.
    Xia,
    /// z^{β−1} on |z| ≥ 1 with the branch cut along the ray at `cut_angle`; zero inside.
    FBeta { beta: T, cut_angle: T },
    /// z̄|z|^{β−2} on |z| ≥ 1: single-valued with one angular mode; tends to
    /// the Xia symbol as β → 0.
    FBetaSurrogate { beta: T },
    Zbar,
    ModeSum(Vec<ModeTerm<T>>),
    Sampled(SampledGrid<T>),
    Custom(CustomSymbol<T>),
    Conjugate(Box<SymbolDescriptor<T>>),
    Scaled(Complex<T>, Box<SymbolDescriptor<T>>),
}

impl<T: Real> fmt::Debug for SymbolDescriptor<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl<T: Real> SymbolDescriptor<T> {
    pub fn fbeta(beta: T) -> Result<Self> {
        Self::fbeta_with_cut(beta, T::PI())
    }

    pub fn fbeta_with_cut(beta: T, cut_angle: T) -> Result<Self> {
        check_beta(beta)?;
        Ok(SymbolDescriptor::FBeta { beta, cut_angle })
    }

    pub fn fbeta_surrogate(beta: T) -> Result<Self> {
        check_beta(beta)?;
        Ok(SymbolDescriptor::FBetaSurrogate { beta })
    }

    /// c · z̄ · 1{|z| ≤ a}.
    pub fn zbar_disk(c: Complex<T>, a: T) -> Self {
        SymbolDescriptor::ModeSum(vec![ModeTerm {
            k: -1,
            coeff: c,
            profile: RadialProfile::Power { exponent: T::one(), lo: T::zero(), hi: a },
        }])
    }

    /// Σ c_k z^k.
    pub fn polynomial(coeffs: &[Complex<T>]) -> Self {
        SymbolDescriptor::ModeSum(
            coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != Complex::new(T::zero(), T::zero()))
                .map(|(k, c)| ModeTerm { k: k as i32, coeff: *c, profile: RadialProfile::power(T::from_index(k)) })
                .collect(),
        )
    }

    pub fn custom(name: impl Into<String>, entire: bool, eval: impl Fn(Complex<T>) -> Complex<T> + Send + Sync + 'static) -> Self {
        SymbolDescriptor::Custom(CustomSymbol { name: name.into(), eval: Arc::new(eval), entire })
    }

    pub fn conj(self) -> Self {
        match self {
            SymbolDescriptor::Conjugate(inner) => *inner,
            other => SymbolDescriptor::Conjugate(Box::new(other)),
        }
    }

    pub fn scaled(self, c: Complex<T>) -> Self {
        SymbolDescriptor::Scaled(c, Box::new(self))
    }

    pub fn name(&self) -> String {
        match self {
            SymbolDescriptor::Xia => "xia".into(),
            SymbolDescriptor::FBeta { beta, cut_angle } => {
                if *cut_angle == T::PI() {
                    format!("fbeta({beta})")
                } else {
                    format!("fbeta({beta},cut={cut_angle})")
                }
            }
            SymbolDescriptor::FBetaSurrogate { beta } => format!("fbeta_surrogate({beta})"),
            SymbolDescriptor::Zbar => "zbar".into(),
            SymbolDescriptor::ModeSum(terms) => {
                let parts: Vec<String> = terms.iter().map(|t| format!("{}[k={}]·{:?}", t.coeff, t.k, t.profile)).collect();
                format!("modes({})", parts.join(" + "))
            }
            SymbolDescriptor::Sampled(g) => format!("sampled({}x{})", g.nx, g.ny),
            SymbolDescriptor::Custom(c) => c.name.clone(),
            SymbolDescriptor::Conjugate(inner) => format!("conj({})", inner.name()),
            SymbolDescriptor::Scaled(c, inner) => format!("({c})·{}", inner.name()),
        }
    }

    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        let zero = Complex::new(T::zero(), T::zero());
        match self {
            SymbolDescriptor::Xia => {
                if z.norm() >= T::one() {
                    z.inv()
                } else {
                    zero
                }
            }
            SymbolDescriptor::FBeta { beta, cut_angle } => {
                let r = z.norm();
                if r < T::one() {
                    return zero;
                }
                let theta = angle_below_cut(z.arg(), *cut_angle);
                Complex::from_polar(r.powf(*beta - T::one()), (*beta - T::one()) * theta)
            }
            SymbolDescriptor::FBetaSurrogate { beta } => {
                let r = z.norm();
                if r < T::one() {
                    return zero;
                }
                z.conj() * r.powf(*beta - T::lit(2.0))
            }
            SymbolDescriptor::Zbar => z.conj(),
            SymbolDescriptor::ModeSum(terms) => terms.iter().fold(zero, |acc, t| acc + t.eval(z)),
            SymbolDescriptor::Sampled(grid) => grid.eval(z),
            SymbolDescriptor::Custom(c) => (c.eval)(z),
            SymbolDescriptor::Conjugate(inner) => inner.eval(z).conj(),
            SymbolDescriptor::Scaled(c, inner) => *c * inner.eval(z),
        }
    }

    /// Decomposition into finitely many angular modes, as used by the Hankel
    /// Gram assembly.
    ///
    /// The principal-branch f_β is mapped to its single-mode surrogate
    /// z̄|z|^{β−2}·1{|z|≥1}; sampled and custom symbols are rejected.
    pub fn angular_modes(&self) -> Result<Vec<ModeTerm<T>>> {
        let one = Complex::new(T::one(), T::zero());
        let inf = T::infinity();
        Ok(match self {
            SymbolDescriptor::Xia => vec![ModeTerm {
                k: -1,
                coeff: one,
                profile: RadialProfile::Power { exponent: -T::one(), lo: T::one(), hi: inf },
            }],
            SymbolDescriptor::Zbar => vec![ModeTerm { k: -1, coeff: one, profile: RadialProfile::power(T::one()) }],
            SymbolDescriptor::FBeta { beta, .. } | SymbolDescriptor::FBetaSurrogate { beta } => vec![ModeTerm {
                k: -1,
                coeff: one,
                profile: RadialProfile::Power { exponent: *beta - T::one(), lo: T::one(), hi: inf },
            }],
            SymbolDescriptor::ModeSum(terms) => terms.clone(),
            SymbolDescriptor::Conjugate(inner) => inner
                .angular_modes()?
                .into_iter()
                .map(|t| ModeTerm { k: -t.k, coeff: t.coeff.conj(), profile: t.profile })
                .collect(),
            SymbolDescriptor::Scaled(c, inner) => inner
                .angular_modes()?
                .into_iter()
                .map(|t| ModeTerm { coeff: t.coeff * *c, ..t })
                .collect(),
            SymbolDescriptor::Sampled(_) | SymbolDescriptor::Custom(_) => {
                return Err(Error::NotModeDecomposable(self.name()))
            }
        })
    }

    /// f(e^{it}z) = e^{ikt} f(z) for a single k, so every local quantity built
    /// from |f − h| depends on |z| only.
    pub fn rotation_covariant(&self) -> bool {
        match self {
            SymbolDescriptor::Xia | SymbolDescriptor::Zbar | SymbolDescriptor::FBetaSurrogate { .. } => true,
            SymbolDescriptor::FBeta { .. } | SymbolDescriptor::Sampled(_) | SymbolDescriptor::Custom(_) => false,
            SymbolDescriptor::ModeSum(terms) => terms.windows(2).all(|w| w[0].k == w[1].k),
            SymbolDescriptor::Conjugate(inner) | SymbolDescriptor::Scaled(_, inner) => inner.rotation_covariant(),
        }
    }

    /// Angle of the branch-cut ray, when the symbol has one.
    pub fn branch_cut(&self) -> Option<T> {
        match self {
            SymbolDescriptor::FBeta { cut_angle, .. } => Some(*cut_angle),
            SymbolDescriptor::Conjugate(inner) | SymbolDescriptor::Scaled(_, inner) => inner.branch_cut(),
            _ => None,
        }
    }

    /// Conservative test that f is holomorphic on the closed disk D(z, radius).
    /// `false` means "not known", not "not holomorphic".
    pub fn holomorphic_on_disk(&self, z: Complex<T>, radius: T) -> bool {
        let s = z.norm();
        let crosses = |b: T| b > T::zero() && b.is_finite() && (s - b).abs() <= radius;
        match self {
            SymbolDescriptor::Xia => s - radius > T::one(),
            SymbolDescriptor::FBeta { cut_angle, .. } => {
                s - radius > T::one() && distance_to_ray(z, *cut_angle) > radius
            }
            SymbolDescriptor::ModeSum(terms) => terms.iter().all(|t| {
                let (lo, hi) = t.profile.support();
                if crosses(lo) || crosses(hi) {
                    return false;
                }
                let outside = s + radius < lo || s - radius > hi;
                outside || (t.is_holomorphic_power() && (t.k >= 0 || s > radius))
            }),
            SymbolDescriptor::Custom(c) => c.entire,
            SymbolDescriptor::Scaled(_, inner) => inner.holomorphic_on_disk(z, radius),
            _ => false,
        }
    }
}

fn check_beta<T: Real>(beta: T) -> Result<()> {
    if beta > T::zero() && beta < T::one() {
        Ok(())
    } else {
        Err(Error::invalid("beta", format!("must lie in (0, 1), got {beta}")))
    }
}

/// Representative of `theta` in `(cut − 2π, cut]`.
fn angle_below_cut<T: Real>(theta: T, cut: T) -> T {
    let tau = T::TAU();
    let mut t = theta;
    while t > cut {
        t = t - tau;
    }
    while t <= cut - tau {
        t = t + tau;
    }
    t
}

fn distance_to_ray<T: Real>(z: Complex<T>, angle: T) -> T {
    let dir = Complex::new(angle.cos(), angle.sin());
    let along = z.re * dir.re + z.im * dir.im;
    if along <= T::zero() {
        z.norm()
    } else {
        (z - dir * along).norm()
    }
}

/// Parses the compact symbol syntax used on command lines and in config files:
/// `xia`, `zbar`, `fbeta:B[:CUT]`, `fbeta_surrogate:B`, `zbar_disk:A`,
/// `zbar_decay:S` (z̄·e^{−|z|²/S}), `indicator:A`, `poly:c0,c1,…`,
/// `mode:K:EXP:LO:HI`, `conj:<symbol>`, `scale:C:<symbol>`.
pub fn parse_symbol<T: Real>(text: &str) -> Result<SymbolDescriptor<T>> {
    let text = text.trim();
    let num = |s: &str| -> Result<T> {
        let v: f64 = match s.trim() {
            "inf" | "infinity" => f64::INFINITY,
            other => other.parse().map_err(|_| Error::Parse(format!("`{other}` is not a number in symbol `{text}`")))?,
        };
        Ok(T::lit(v))
    };
    let (head, rest) = match text.split_once(':') {
        Some((h, r)) => (h, Some(r)),
        None => (text, None),
    };
    fn need<'a>(r: Option<&'a str>, head: &str) -> Result<&'a str> {
        r.ok_or_else(|| Error::Parse(format!("symbol `{head}` needs parameters")))
    }
    Ok(match head {
        "xia" => SymbolDescriptor::Xia,
        "zbar" => SymbolDescriptor::Zbar,
        "fbeta" => {
            let r = need(rest, head)?;
            match r.split_once(':') {
                Some((b, cut)) => SymbolDescriptor::fbeta_with_cut(num(b)?, num(cut)?)?,
                None => SymbolDescriptor::fbeta(num(r)?)?,
            }
        }
        "fbeta_surrogate" => SymbolDescriptor::fbeta_surrogate(num(need(rest, head)?)?)?,
        "zbar_disk" => SymbolDescriptor::zbar_disk(Complex::new(T::one(), T::zero()), num(need(rest, head)?)?),
        "zbar_decay" => {
            let scale = num(need(rest, head)?)?;
            if !(scale > T::zero()) {
                return Err(Error::Parse(format!("`{text}`: decay scale must be positive")));
            }
            let eval: RadialFn<T> = Arc::new(move |r: T| r * (-(r * r) / scale).exp());
            SymbolDescriptor::ModeSum(vec![ModeTerm {
                k: -1,
                coeff: Complex::new(T::one(), T::zero()),
                profile: RadialProfile::Custom { eval, lo: T::zero(), hi: T::infinity(), breakpoints: Vec::new() },
            }])
        }
        "indicator" => SymbolDescriptor::ModeSum(vec![ModeTerm {
            k: 0,
            coeff: Complex::new(T::one(), T::zero()),
            profile: RadialProfile::Power { exponent: T::zero(), lo: T::zero(), hi: num(need(rest, head)?)? },
        }]),
        "poly" => {
            let coeffs = need(rest, head)?
                .split(',')
                .map(|c| num(c).map(|v| Complex::new(v, T::zero())))
                .collect::<Result<Vec<_>>>()?;
            SymbolDescriptor::polynomial(&coeffs)
        }
        "mode" => {
            let parts: Vec<&str> = need(rest, head)?.split(':').collect();
            if parts.len() != 4 {
                return Err(Error::Parse(format!("`{text}`: expected mode:K:EXP:LO:HI")));
            }
            let k: i32 = parts[0].trim().parse().map_err(|_| Error::Parse(format!("bad mode index in `{text}`")))?;
            SymbolDescriptor::ModeSum(vec![ModeTerm {
                k,
                coeff: Complex::new(T::one(), T::zero()),
                profile: RadialProfile::Power { exponent: num(parts[1])?, lo: num(parts[2])?, hi: num(parts[3])? },
            }])
        }
        "conj" => parse_symbol::<T>(need(rest, head)?)?.conj(),
        "scale" => {
            let r = need(rest, head)?;
            let (c, inner) = r.split_once(':').ok_or_else(|| Error::Parse(format!("`{text}`: expected scale:C:<symbol>")))?;
            parse_symbol::<T>(inner)?.scaled(Complex::new(num(c)?, T::zero()))
        }
        other => return Err(Error::Parse(format!("unknown symbol `{other}`"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64, y: f64) -> Complex<f64> {
        Complex::new(x, y)
    }

    #[test]
    fn closed_forms() {
        let z = c(2.0, -1.0);
        assert_eq!(SymbolDescriptor::<f64>::Xia.eval(z), z.inv());
        assert_eq!(SymbolDescriptor::<f64>::Xia.eval(c(0.5, 0.1)), c(0.0, 0.0));
        assert_eq!(SymbolDescriptor::<f64>::Zbar.eval(z), z.conj());
        let f = SymbolDescriptor::fbeta(0.5).unwrap();
        let expected = z.powf(-0.5);
        assert!((f.eval(z) - expected).norm() < 1e-15);
        assert_eq!(f.eval(c(0.3, 0.0)), c(0.0, 0.0));
    }

    #[test]
    fn fbeta_cut_jumps_across_negative_axis() {
        let f = SymbolDescriptor::fbeta(0.5).unwrap();
        let above = f.eval(c(-4.0, 1e-9));
        let below = f.eval(c(-4.0, -1e-9));
        assert!((above - below).norm() > 0.5);
        let g = SymbolDescriptor::fbeta_with_cut(0.5, std::f64::consts::FRAC_PI_2).unwrap();
        assert!((g.eval(c(-4.0, 1e-9)) - g.eval(c(-4.0, -1e-9))).norm() < 1e-6);
    }

    #[test]
    fn mode_sums_agree_with_closed_forms() {
        for sym in [SymbolDescriptor::<f64>::Xia, SymbolDescriptor::Zbar, SymbolDescriptor::fbeta_surrogate(0.3).unwrap()] {
            let modes = SymbolDescriptor::ModeSum(sym.angular_modes().unwrap());
            for z in [c(0.2, 0.3), c(1.5, -2.0), c(-3.0, 0.5)] {
                assert!((modes.eval(z) - sym.eval(z)).norm() < 1e-14, "{}", sym.name());
            }
        }
        let cx = SymbolDescriptor::<f64>::Xia.conj();
        assert_eq!(cx.angular_modes().unwrap()[0].k, 1);
        let m = SymbolDescriptor::ModeSum(cx.angular_modes().unwrap());
        let z = c(1.2, 0.7);
        assert!((m.eval(z) - z.inv().conj()).norm() < 1e-15);
    }

    #[test]
    fn surrogate_reduces_to_xia_conjugate_form_at_small_beta() {
        let s = SymbolDescriptor::fbeta_surrogate(1e-9).unwrap();
        let z = c(2.0, 3.0);
        // z̄/|z|² = 1/z
        assert!((s.eval(z) - z.inv()).norm() < 1e-8);
    }

    #[test]
    fn custom_and_sampled_are_not_mode_decomposable() {
        let f = SymbolDescriptor::<f64>::custom("exp", true, |z| z.exp());
        assert!(matches!(f.angular_modes(), Err(Error::NotModeDecomposable(_))));
    }

    #[test]
    fn holomorphy_hints() {
        let x = SymbolDescriptor::<f64>::Xia;
        assert!(x.holomorphic_on_disk(c(3.0, 0.0), 1.0));
        assert!(!x.holomorphic_on_disk(c(1.5, 0.0), 1.0));
        let f = SymbolDescriptor::fbeta(0.5).unwrap();
        assert!(f.holomorphic_on_disk(c(3.0, 0.0), 0.5));
        assert!(!f.holomorphic_on_disk(c(-3.0, 0.3), 0.5));
        let p = SymbolDescriptor::polynomial(&[c(1.0, 0.0), c(0.0, 2.0)]);
        assert!(p.holomorphic_on_disk(c(0.0, 0.0), 5.0));
        assert!(!SymbolDescriptor::<f64>::Zbar.holomorphic_on_disk(c(0.0, 0.0), 1.0));
    }

    #[test]
    fn parser_round_trips() {
        let s: SymbolDescriptor<f64> = parse_symbol("conj:xia").unwrap();
        assert_eq!(s.name(), "conj(xia)");
        assert!(parse_symbol::<f64>("fbeta:1.5").is_err());
        assert!(parse_symbol::<f64>("nope").is_err());
        let p: SymbolDescriptor<f64> = parse_symbol("poly:1,0,2").unwrap();
        assert_eq!(p.eval(c(1.0, 1.0)), c(1.0, 4.0));
        let m: SymbolDescriptor<f64> = parse_symbol("mode:-1:1:0:2").unwrap();
        assert!((m.eval(c(1.0, 1.0)) - c(1.0, -1.0)).norm() < 1e-15);
        assert_eq!(m.eval(c(3.0, 0.0)), c(0.0, 0.0));
    }
}
