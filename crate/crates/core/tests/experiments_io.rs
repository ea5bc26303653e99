use std::fs;

use focklab::experiments::{run_experiment, ExperimentConfig, ExperimentId, Status, REPORT_FILE};
use focklab::geometry::build_lattice;
use focklab::io::{read_lattice_csv, read_planar_weight_csv, read_radial_weight_csv, read_sampled_symbol_csv, write_lattice_csv};
use focklab::symbols::SymbolDescriptor;
use focklab::weights::{WeightModel, WeightSpec};
use focklab::{Complex, Error};

#[test]
fn defaults_are_valid() {
    for id in ExperimentId::ALL {
        let cfg = ExperimentConfig::defaults(id);
        cfg.validate().unwrap();
        assert_eq!(id.as_str().parse::<ExperimentId>().unwrap(), id);
        let back: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back.experiment, id);
    }
    assert!("nope".parse::<ExperimentId>().is_err());
}

#[test]
fn validation_names_the_key() {
    let key = |cfg: &ExperimentConfig| match cfg.validate() {
        Err(Error::InvalidParameter { name, .. }) => name,
        other => panic!("expected an invalid parameter, got {other:?}"),
    };
    let mut cfg = ExperimentConfig::defaults(ExperimentId::BergerCoburnP);
    cfg.p = vec![1.0, 2.0];
    assert_eq!(key(&cfg), "p");
    let mut cfg = ExperimentConfig::defaults(ExperimentId::FbetaNorms);
    cfg.beta = 1.0;
    assert_eq!(key(&cfg), "beta");
    cfg.beta = 0.5;
    cfg.rmax = vec![4.0, 2.0];
    assert_eq!(key(&cfg), "Rmax");
    let mut cfg = ExperimentConfig::defaults(ExperimentId::XiaBc);
    cfg.m = 1.5;
    assert_eq!(key(&cfg), "m");
}

#[test]
fn toeplitz_experiment_writes_its_files() {
    let dir = tempfile::tempdir().unwrap();
    let rep = run_experiment(&ExperimentConfig::defaults(ExperimentId::ToeplitzEquiv), dir.path()).unwrap();
    assert!(rep.passed());
    assert!(rep.checks.iter().all(|c| c.status != Status::Fail));
    assert!(dir.path().join(REPORT_FILE).exists());
    for a in &rep.artifacts {
        assert!(dir.path().join(a).exists(), "{a}");
    }
    assert!(rep.artifacts.iter().any(|a| a == "ratios.csv"));
}

#[test]
fn reports_repeat_except_for_the_timestamp() {
    let mut cfg = ExperimentConfig::defaults(ExperimentId::XiaBc);
    cfg.n = vec![100, 200, 400];
    let strip = |dir: &std::path::Path| {
        let mut v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join(REPORT_FILE)).unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("timestamp");
        v
    };
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_experiment(&cfg, a.path()).unwrap();
    run_experiment(&cfg, b.path()).unwrap();
    assert_eq!(strip(a.path()), strip(b.path()));
    assert_eq!(fs::read(a.path().join("svals_conj_xia.csv")).unwrap(), fs::read(b.path().join("svals_conj_xia.csv")).unwrap());
}

#[test]
fn short_schedule_is_rejected() {
    let mut cfg = ExperimentConfig::defaults(ExperimentId::XiaBc);
    cfg.n = vec![100, 200];
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(run_experiment(&cfg, dir.path()), Err(Error::InvalidParameter { name: "N", .. })));
}

#[test]
fn lattice_round_trip() {
    let model = WeightModel::<f64>::classical();
    let lattice = build_lattice(&model, 0.5, 2.0).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lattice.csv");
    write_lattice_csv(&path, &lattice).unwrap();
    let back = read_lattice_csv(&path, 0.5, 2.0).unwrap();
    assert_eq!(back.centers, lattice.centers);
    assert_eq!(back.rhos, lattice.rhos);
}

#[test]
fn custom_weights_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let radial = dir.path().join("radial.csv");
    fs::write(&radial, "r,laplacian_phi\n0,2\n1,2\n5,2\n").unwrap();
    let spec = read_radial_weight_csv(&radial).unwrap();
    let model = WeightModel::from_spec(spec).unwrap();
    // constant Δφ = 2 is the classical weight
    let rho = model.rho(Complex::new(1.3, 0.4)).unwrap();
    assert!((rho - (2.0 * std::f64::consts::PI).powf(-0.5)).abs() < 1e-7);

    let planar = dir.path().join("planar.csv");
    let mut text = String::from("x,y,laplacian_phi\n");
    for i in 0..5 {
        for j in 0..5 {
            text.push_str(&format!("{},{},2\n", -2.0 + j as f64, -2.0 + i as f64));
        }
    }
    fs::write(&planar, &text).unwrap();
    assert!(matches!(read_planar_weight_csv(&planar).unwrap(), WeightSpec::CustomPlanar(_)));
    fs::write(&planar, "x,y,laplacian_phi\n0,0,1\n1,0,1\n0,1,1\n").unwrap();
    assert!(matches!(read_planar_weight_csv(&planar), Err(Error::Parse(_))));
    fs::write(&planar, "x,y,laplacian_phi\n0,0,one\n").unwrap();
    assert!(matches!(read_planar_weight_csv(&planar), Err(Error::Parse(_))));
}

#[test]
fn sampled_symbol_interpolates_its_nodes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.csv");
    let mut text = String::from("x,y,re_f,im_f\n");
    for i in 0..11 {
        for j in 0..11 {
            let (x, y) = (-1.0 + 0.2 * j as f64, -1.0 + 0.2 * i as f64);
            text.push_str(&format!("{x},{y},{x},{}\n", -y));
        }
    }
    fs::write(&path, text).unwrap();
    let f = SymbolDescriptor::Sampled(read_sampled_symbol_csv(&path).unwrap());
    for z in [Complex::new(0.2, 0.4), Complex::new(-0.6, 0.8), Complex::new(0.31, -0.47)] {
        // z̄ is linear, so bilinear interpolation reproduces it
        assert!((f.eval(z) - z.conj()).norm() < 1e-12, "{z}");
    }
}
