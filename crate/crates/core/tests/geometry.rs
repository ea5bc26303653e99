mod common;

use focklab::geometry::{build_lattice, build_partition, polar_grid, probe_grid};
use focklab::weights::WeightModel;
use focklab::{Complex, Error};
use proptest::prelude::*;

#[test]
fn classical_rho_is_constant() {
    let model = WeightModel::<f64>::classical();
    let expected = (2.0 * std::f64::consts::PI).powf(-0.5);
    for z in polar_grid(&model, 6.0, 0.5).unwrap() {
        assert!((model.rho(z).unwrap() - expected).abs() <= 1e-7, "at {z}");
    }
}

#[test]
fn power_rho_at_origin() {
    let rho = common::power41().rho(Complex::new(0.0, 0.0)).unwrap();
    assert!((rho - (8.0 * std::f64::consts::PI).powf(-0.25)).abs() <= 1e-7);
}

#[test]
fn power_rho_far_field() {
    // μ(D(s, ρ)) ≈ 16 s² π ρ² once ρ ≪ s
    let model = common::power41();
    let s = 20.0;
    let rho = model.rho(Complex::new(s, 0.0)).unwrap();
    let approx = 1.0 / (4.0 * std::f64::consts::PI.sqrt() * s);
    assert!((rho / approx - 1.0).abs() < 1e-3, "{rho} vs {approx}");
}

#[test]
fn disk_mass_at_rho_is_one() {
    for model in [WeightModel::classical(), common::power41(), common::tabulated()] {
        for z in [Complex::new(0.3, 0.0), Complex::new(1.0, -2.0), Complex::new(-2.5, 0.7)] {
            let rho = model.rho(z).unwrap();
            let mass = model.mu_disk(z, rho).unwrap();
            assert!((mass - 1.0).abs() < 1e-7, "{:?} at {z}: {mass}", model.spec());
        }
    }
}

fn point() -> impl Strategy<Value = Complex<f64>> {
    (-4.0f64..4.0, -4.0f64..4.0).prop_map(|(x, y)| Complex::new(x, y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rho_is_one_lipschitz(z in point(), w in point()) {
        for model in [common::power41(), common::tabulated()] {
            let gap = (model.rho(z).unwrap() - model.rho(w).unwrap()).abs();
            prop_assert!(gap <= (z - w).norm() + 1e-8);
        }
    }

    #[test]
    fn rho_is_rotation_invariant_for_radial_weights(s in 0.0f64..4.0, theta in 0.0f64..std::f64::consts::TAU) {
        let model = common::power41();
        let a = model.rho(Complex::new(s, 0.0)).unwrap();
        let b = model.rho(Complex::from_polar(s, theta)).unwrap();
        prop_assert!((a - b).abs() < 1e-6);
    }
}

#[test]
fn lattice_invariants_on_three_weights() {
    for (model, rmax) in [(WeightModel::classical(), 4.0), (common::power41(), 1.5), (common::tabulated(), 3.0)] {
        let lattice = build_lattice(&model, 0.5, rmax).unwrap();
        let probes = probe_grid(&model, rmax, 0.5).unwrap();
        lattice.verify(&probes).unwrap();
        assert!(lattice.disjointness_margin() >= -1e-9);
        assert!(lattice.len() > 10);
    }
}

#[test]
fn lattice_rejects_bad_radius() {
    let model = WeightModel::<f64>::classical();
    assert!(matches!(build_lattice(&model, 0.0, 1.0), Err(Error::InvalidParameter { name: "r", .. })));
}

#[test]
fn partition_sums_to_one() {
    for (model, rmax) in [(WeightModel::classical(), 3.0), (common::power41(), 1.2)] {
        let partition = build_partition(build_lattice(&model, 0.5, rmax + 1.0).unwrap(), 0.5).unwrap();
        let probes = probe_grid(&model, rmax, 0.5).unwrap();
        let check = partition.check(&probes, Some(1e-6)).unwrap();
        assert!(check.max_sum_error <= 1e-12, "{check:?}");
        assert!(check.max_dbar_sum <= 1e-10, "{check:?}");
        assert!(check.max_fd_error.unwrap() <= 1e-5, "{check:?}");
        assert!(check.c_partition.is_finite() && check.c_partition > 0.0);
    }
}

#[test]
fn partition_constant_stable_under_probe_refinement() {
    let model = common::power41();
    let partition = build_partition(build_lattice(&model, 0.5, 2.0).unwrap(), 0.5).unwrap();
    let coarse = partition.check(&polar_grid(&model, 1.0, 0.125).unwrap(), None).unwrap();
    let fine = partition.check(&polar_grid(&model, 1.0, 0.0625).unwrap(), None).unwrap();
    let change = (fine.c_partition / coarse.c_partition - 1.0).abs();
    assert!(change <= 0.1, "{} vs {}", coarse.c_partition, fine.c_partition);
}
