mod common;

use focklab::localfit::{disk_projection, lsq_oracle, LocalFitter};
use focklab::quadrature::DiskQuadrature;
use focklab::symbols::{parse_symbol, SymbolDescriptor};
use focklab::weights::WeightModel;
use focklab::Complex;
use proptest::prelude::*;

const SYMBOLS: [&str; 12] = [
    "zbar",
    "xia",
    "conj:xia",
    "fbeta:0.5",
    "fbeta_surrogate:0.5",
    "zbar_disk:1",
    "zbar_decay:10",
    "indicator:1",
    "poly:1,0,2",
    "mode:-2:2:0:1",
    "mode:1:1:0:1",
    "scale:2:conj:xia",
];

fn disks() -> Vec<(Complex<f64>, f64)> {
    let mut out = Vec::new();
    for i in 0..20 {
        let t = i as f64;
        let z = Complex::from_polar(0.3 + 0.17 * t, 0.9 * t);
        out.push((z, 0.2 + 0.02 * t));
    }
    out
}

#[test]
fn projection_agrees_with_least_squares() {
    let quad = DiskQuadrature::<f64>::new(24, 48);
    for text in SYMBOLS {
        let f = parse_symbol::<f64>(text).unwrap();
        for (z, radius) in disks() {
            let a = disk_projection(&f, z, radius, 8, &quad).unwrap();
            let b = lsq_oracle(&f, z, radius, 8, &quad).unwrap();
            let tol = 1e-6 * a.residual.max(b.residual) + 1e-12;
            assert!((a.residual - b.residual).abs() <= tol, "{text} at {z}: {} vs {}", a.residual, b.residual);
            for (k, (ca, cb)) in a.coefficients.iter().zip(&b.coefficients).enumerate() {
                let scale = ca.norm().max(cb.norm()).max(1.0);
                assert!((ca - cb).norm() <= 1e-6 * scale, "{text} coefficient {k}");
            }
        }
    }
}

#[test]
fn zbar_residual_closed_form() {
    let fitter = LocalFitter::<f64>::default();
    for model in [WeightModel::classical(), common::power41()] {
        for z in [Complex::new(0.0, 0.0), Complex::new(1.5, -0.5), Complex::new(-3.0, 2.0)] {
            for r in [0.5, 1.0, 2.0] {
                let rho = model.rho(z).unwrap();
                let g = fitter.g2(&SymbolDescriptor::Zbar, &model, z, r).unwrap();
                let expected = r * rho / 2f64.sqrt();
                assert!((g / expected - 1.0).abs() <= 1e-6, "z={z} r={r}: {g} vs {expected}");
            }
        }
    }
}

#[test]
fn entire_symbols_have_no_residual() {
    let fitter = LocalFitter::<f64>::default();
    let f = parse_symbol::<f64>("poly:1,-2,0,0.5").unwrap();
    for (z, radius) in disks() {
        assert!(fitter.g2_at(&f, z, radius).unwrap() <= 1e-12);
    }
}

fn case() -> impl Strategy<Value = (usize, Complex<f64>, f64)> {
    (0..SYMBOLS.len(), 0.0f64..3.5, 0.0f64..std::f64::consts::TAU, 0.1f64..0.8)
        .prop_map(|(k, s, th, radius)| (k, Complex::from_polar(s, th), radius))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn g2_never_exceeds_mo2((k, z, radius) in case()) {
        let f = parse_symbol::<f64>(SYMBOLS[k]).unwrap();
        let (g, mo) = LocalFitter::default().g2_mo2_at(&f, z, radius).unwrap();
        prop_assert!(g <= mo + 1e-9);
    }

    #[test]
    fn mo2_is_the_variance_identity((k, z, radius) in case()) {
        let f = parse_symbol::<f64>(SYMBOLS[k]).unwrap();
        let fitter = LocalFitter::<f64>::default();
        let quad = fitter.quad();
        let mean = quad.mean(z, radius, |w| f.eval(w));
        let second = quad.mean_real(z, radius, |w| f.eval(w).norm_sqr());
        let var = (second - mean.norm_sqr()).max(0.0);
        let mo = fitter.mo2_at(&f, z, radius).unwrap();
        prop_assert!((mo * mo - var).abs() <= 1e-9 * second.max(1.0));
    }

    #[test]
    fn mo2_is_conjugation_symmetric((k, z, radius) in case()) {
        let f = parse_symbol::<f64>(SYMBOLS[k]).unwrap();
        let fitter = LocalFitter::<f64>::default();
        let a = fitter.mo2_at(&f, z, radius).unwrap();
        let b = fitter.mo2_at(&f.conj(), z, radius).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn g2_is_homogeneous((k, z, radius) in case(), c in (-3.0f64..3.0, -3.0f64..3.0)) {
        let f = parse_symbol::<f64>(SYMBOLS[k]).unwrap();
        let c = Complex::new(c.0, c.1);
        let fitter = LocalFitter::<f64>::default();
        let a = fitter.g2_at(&f, z, radius).unwrap();
        let b = fitter.g2_at(&f.scaled(c), z, radius).unwrap();
        prop_assert!((b - c.norm() * a).abs() <= 1e-9 * c.norm() * a + 1e-12);
    }
}
