mod common;

use focklab::localfit::LocalFitter;
use focklab::seminorms::{divergence_scan, ida_seminorm, imo_seminorm, PlaneIntegrator, SeminormConfig, Verdict};
use focklab::symbols::{parse_symbol, SymbolDescriptor};
use focklab::weights::WeightModel;
use focklab::{Complex, Error};
use std::f64::consts::PI;

#[test]
fn radial_and_planar_sweeps_agree_with_closed_form() {
    // ∫_{|z|≤R} |z|² e^{−|z|²} dA = π(1 − (1 + R²) e^{−R²})
    let model = WeightModel::<f64>::classical();
    let schedule = [1.0, 2.0, 4.0];
    let g = |z: Complex<f64>| Ok(z.norm_sqr() * (-z.norm_sqr()).exp());
    let sweep = |res: f64, radial: bool| PlaneIntegrator::new(&model, res).unwrap().radial(radial).unwrap().integrate(&schedule, g).unwrap();
    let radial = sweep(4.0, true);
    let planar = sweep(4.0, false);
    let fine = sweep(8.0, true);
    for (k, r) in schedule.iter().enumerate() {
        let exact = PI * (1.0 - (1.0 + r * r) * (-r * r).exp());
        let err = (radial.partials[k] / exact - 1.0).abs();
        assert!(err < 1e-4, "radial at {r}");
        assert!((planar.partials[k] / radial.partials[k] - 1.0).abs() < 1e-10, "planar at {r}");
        // two-point Gauss panels: halving the width cuts the error ~16×
        assert!((fine.partials[k] / exact - 1.0).abs() < err / 10.0, "refined at {r}");
    }
}

#[test]
fn radial_sweep_needs_a_radial_weight() {
    let grid = focklab::weights::PlanarGrid { half_width: 2.0, n: 5, values: vec![2.0; 25] };
    let model = WeightModel::from_spec(focklab::weights::WeightSpec::CustomPlanar(grid)).unwrap();
    assert!(matches!(PlaneIntegrator::new(&model, 4.0).unwrap().radial(true), Err(Error::NotRadial(_))));
}

#[test]
fn zbar_ida_grows_like_the_area() {
    // G_{2,r}(z̄) = rρ/√2, so with α = −1 and p = 2 the integrand is r²/2
    let model = WeightModel::<f64>::classical();
    let r = 0.8;
    let cfg = SeminormConfig::new(2.0, -1.0, r, vec![2.0, 4.0, 8.0, 16.0]);
    let rep = ida_seminorm(&SymbolDescriptor::Zbar, &model, &LocalFitter::default(), &cfg).unwrap();
    for (radius, partial) in rep.schedule.iter().zip(&rep.partials) {
        let exact = PI * radius * radius * r * r / 2.0;
        assert!((partial / exact - 1.0).abs() < 1e-6);
    }
    assert_eq!(rep.verdict, Verdict::Diverging);
    assert!((rep.growth.unwrap().exponent - 2.0).abs() < 1e-3);
}

#[test]
fn holomorphic_symbol_has_zero_ida() {
    let model = common::power41();
    let cfg = SeminormConfig::new(1.0, -2.0, 1.0, vec![1.0, 2.0, 3.0]);
    let f = parse_symbol::<f64>("poly:0,1,3").unwrap();
    let rep = ida_seminorm(&f, &model, &LocalFitter::default(), &cfg).unwrap();
    assert_eq!(rep.norm(), 0.0);
    assert_eq!(rep.verdict, Verdict::Converged);
}

#[test]
fn sandwich_on_a_compact_symbol() {
    let model = WeightModel::<f64>::classical();
    let fitter = LocalFitter::default();
    let cfg = SeminormConfig::new(2.0, -1.0, 1.0, vec![5.0, 10.0, 20.0]);
    for text in ["zbar_disk:1", "mode:-2:2:0:1", "indicator:1"] {
        let f = parse_symbol::<f64>(text).unwrap();
        let ida = ida_seminorm(&f, &model, &fitter, &cfg).unwrap().norm();
        let ida_bar = ida_seminorm(&f.clone().conj(), &model, &fitter, &cfg).unwrap().norm();
        let imo = imo_seminorm(&f, &model, &fitter, &cfg).unwrap();
        assert_eq!(imo.verdict, Verdict::Converged, "{text}");
        assert!(ida <= imo.norm() * (1.0 + 1e-9) && ida_bar <= imo.norm() * (1.0 + 1e-9), "{text}");
        assert!(imo.norm() <= 10.0 * (ida + ida_bar), "{text}");
    }
}

#[test]
fn scaling_doubles_the_norm() {
    let model = WeightModel::<f64>::classical();
    let fitter = LocalFitter::default();
    let cfg = SeminormConfig::new(0.5, -4.0, 1.0, vec![3.0, 6.0]);
    let f = SymbolDescriptor::Xia.conj();
    let a = imo_seminorm(&f, &model, &fitter, &cfg).unwrap().norm();
    let b = imo_seminorm(&f.scaled(Complex::new(0.0, 2.0)), &model, &fitter, &cfg).unwrap().norm();
    assert!((b / a - 2.0).abs() < 1e-9);
}

#[test]
fn branch_cut_strip_is_reported_apart() {
    let model = WeightModel::<f64>::classical();
    let cfg = SeminormConfig::new(1.0, -2.0, 1.0, vec![4.0, 8.0, 16.0]);
    let rep = ida_seminorm(&SymbolDescriptor::fbeta(0.5).unwrap(), &model, &LocalFitter::default(), &cfg).unwrap();
    let strip = rep.strip.expect("cut symbols report the strip");
    assert_eq!(strip.len(), 3);
    assert!(strip.windows(2).all(|w| w[1] >= w[0]) && strip[2] > 0.0);
    assert_eq!(rep.verdict, Verdict::Converged);
}

#[test]
fn divergence_scan_needs_four_points() {
    assert!(matches!(divergence_scan(&[1.0, 2.0, 4.0], &[1.0, 2.0, 3.0]), Err(Error::InvalidParameter { .. })));
    let sched = [2.0, 4.0, 8.0, 16.0, 32.0];
    let partials: Vec<f64> = sched.iter().map(|r: &f64| r.powf(1.5)).collect();
    let fit = divergence_scan(&sched, &partials).unwrap();
    assert!((fit.exponent - 1.5).abs() < 1e-9);
    let logs: Vec<f64> = sched.iter().map(|r: &f64| 3.0 + r.ln()).collect();
    assert!(divergence_scan(&sched, &logs).unwrap().log_divergent);
}
