//! Acceptance run: one [PASS]/[FAIL] line per criterion.
//!
//! Exits nonzero only when a criterion outside `KNOWN_RED` fails, so the
//! documented red criterion stays visible without breaking the test suite.

use std::path::Path;
use std::time::Instant;

use focklab::experiments::{run_experiment, ExperimentConfig, ExperimentId, ExperimentReport, Status};
use focklab::fockops::{kernel_eval, kernel_norm_ln, BasisTable};
use focklab::geometry::{build_lattice, build_partition, polar_grid, probe_grid};
use focklab::localfit::{disk_projection, lsq_oracle, LocalFitter};
use focklab::quadrature::DiskQuadrature;
use focklab::symbols::{parse_symbol, SymbolDescriptor};
use focklab::weights::{lipschitz_violation, WeightModel, WeightSpec};
use focklab::{Complex, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria allowed to fail; see the README section on criterion 11.
const KNOWN_RED: [u32; 1] = [11];

type Outcome = Result<(bool, String), String>;
type Criterion<'a> = (u32, &'static str, Box<dyn Fn() -> Outcome + 'a>);

fn power41() -> WeightModel<f64> {
    WeightModel::from_spec(WeightSpec::Power { exponent: 4.0, coefficient: 1.0 }).unwrap()
}

fn tabulated() -> WeightModel<f64> {
    WeightModel::from_spec(WeightSpec::CustomRadial { radii: vec![0.0, 1.0, 3.0], laplacian: vec![1.0, 2.0, 4.0] }).unwrap()
}

fn random_point(rng: &mut ChaCha8Rng, radius: f64) -> C64 {
    C64::from_polar(radius * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU))
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn experiment(id: ExperimentId, edit: impl FnOnce(&mut ExperimentConfig), dir: &Path) -> Result<ExperimentReport, String> {
    let mut cfg = ExperimentConfig::defaults(id);
    edit(&mut cfg);
    run_experiment(&cfg, dir).map_err(err)
}

fn failed_checks(rep: &ExperimentReport) -> Vec<String> {
    rep.checks.iter().filter(|c| c.status == Status::Fail).map(|c| c.name.clone()).collect()
}

fn measured(rep: &ExperimentReport, name: &str) -> f64 {
    rep.check(name).and_then(|c| c.measured).unwrap_or(f64::NAN)
}

fn rho_exactness() -> Outcome {
    let classical = WeightModel::<f64>::classical();
    let target = (2.0 * std::f64::consts::PI).powf(-0.5);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0f64;
    for _ in 0..100 {
        worst = worst.max((classical.rho(random_point(&mut rng, 10.0)).map_err(err)? - target).abs());
    }
    let power = (power41().rho(C64::new(0.0, 0.0)).map_err(err)? - (8.0 * std::f64::consts::PI).powf(-0.25)).abs();
    Ok((worst <= 1e-7 && power <= 1e-7, format!("classical max err {worst:.1e}, power(4,1) ρ(0) err {power:.1e}")))
}

fn rho_lipschitz() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut detail = Vec::new();
    let mut ok = true;
    for (name, model) in [("power(4,1)", power41()), ("tabulated", tabulated())] {
        let pairs: Vec<(C64, C64)> = (0..10_000)
            .map(|_| {
                let z = random_point(&mut rng, 4.0);
                (z, z + random_point(&mut rng, 1.0))
            })
            .collect();
        let v = lipschitz_violation(&model, &pairs).map_err(err)?;
        ok &= v <= 1e-8;
        detail.push(format!("{name} {v:.1e}"));
    }
    Ok((ok, format!("violation over 10^4 pairs: {}", detail.join(", "))))
}

fn kernel_closed_form() -> Outcome {
    let classical = WeightModel::<f64>::classical();
    let basis = BasisTable::new(&classical, 80).map_err(err)?;
    let mut worst = 0f64;
    let pts: Vec<C64> = (0..9).map(|k| C64::from_polar(3.0 * k as f64 / 8.0, 1.3 * k as f64)).collect();
    for &w in &pts {
        for &z in &pts {
            let k = kernel_eval(&basis, w, z).map_err(err)?.value;
            let exact = (w * z.conj()).exp() / std::f64::consts::PI;
            worst = worst.max((k - exact).norm() / exact.norm());
        }
    }
    let power = power41();
    let basis = BasisTable::new(&power, 1500).map_err(err)?;
    let mut ratios = Vec::new();
    for k in 0..=12 {
        let z = Complex::from_polar(0.25 * k as f64, 0.7 * k as f64);
        let ln = kernel_norm_ln(&basis, z).map_err(err)?;
        ratios.push((ln - power.phi(z).map_err(err)?).exp() * power.rho(z).map_err(err)?);
    }
    let spread = ratios.iter().cloned().fold(f64::MIN, f64::max) / ratios.iter().cloned().fold(f64::MAX, f64::min);
    Ok((worst <= 1e-8 && spread <= 2.0, format!("classical rel err {worst:.1e} (N = 80), power(4,1) spread {spread:.3}")))
}

fn local_projection() -> Outcome {
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
    let quad = DiskQuadrature::<f64>::new(24, 48);
    let mut worst = 0f64;
    for text in SYMBOLS {
        let f = parse_symbol::<f64>(text).map_err(err)?;
        for i in 0..20 {
            let t = i as f64;
            let (z, radius) = (Complex::from_polar(0.3 + 0.17 * t, 0.9 * t), 0.2 + 0.02 * t);
            let a = disk_projection(&f, z, radius, 8, &quad).map_err(err)?;
            let b = lsq_oracle(&f, z, radius, 8, &quad).map_err(err)?;
            let scale = a.residual.max(b.residual);
            if scale > 1e-12 {
                worst = worst.max((a.residual - b.residual).abs() / scale);
            }
        }
    }
    let fitter = LocalFitter::<f64>::default();
    let mut g_err = 0f64;
    for model in [WeightModel::classical(), power41()] {
        for z in [C64::new(0.0, 0.0), C64::new(1.5, -0.5), C64::new(-3.0, 2.0)] {
            for r in [0.5, 1.0, 2.0] {
                let expected = r * model.rho(z).map_err(err)? / 2f64.sqrt();
                let g = fitter.g2(&SymbolDescriptor::Zbar, &model, z, r).map_err(err)?;
                g_err = g_err.max((g / expected - 1.0).abs());
            }
        }
    }
    Ok((worst <= 1e-6 && g_err <= 1e-6, format!("projection vs lsq rel {worst:.1e} (12×20), G2(zbar) rel {g_err:.1e}")))
}

fn lattice_partition() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, model, rmax) in [("classical", WeightModel::classical(), 3.0), ("power(4,1)", power41(), 1.2), ("tabulated", tabulated(), 2.5)] {
        let lattice = build_lattice(&model, 0.5, rmax + 1.0).map_err(err)?;
        let probes = probe_grid(&model, rmax, 0.5).map_err(err)?;
        lattice.verify(&probes).map_err(err)?;
        let partition = build_partition(lattice, 0.5).map_err(err)?;
        let check = partition.check(&probes, None).map_err(err)?;
        let coarse = partition.check(&polar_grid(&model, rmax, 0.125).map_err(err)?, None).map_err(err)?;
        let fine = partition.check(&polar_grid(&model, rmax, 0.0625).map_err(err)?, None).map_err(err)?;
        let drift = (fine.c_partition / coarse.c_partition - 1.0).abs();
        ok &= check.max_sum_error <= 1e-12 && check.max_dbar_sum <= 1e-10 && coarse.c_partition.is_finite() && drift <= 0.1;
        detail.push(format!("{name}: Σψ−1 {:.0e}, Σ∂̄ψ {:.0e}, C {:.3} ({:+.1}%)", check.max_sum_error, check.max_dbar_sum, fine.c_partition, 100.0 * drift));
    }
    Ok((ok, detail.join("; ")))
}

fn decomposition(dir: &Path) -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, spec) in [("classical", WeightSpec::classical()), ("power(4,1)", WeightSpec::Power { exponent: 4.0, coefficient: 1.0 })] {
        let rep = experiment(ExperimentId::DecompositionCheck, |c| c.weight = spec, &dir.join(name))?;
        ok &= rep.passed();
        let ratios: Vec<String> = rep.results["symbols"]
            .as_array()
            .into_iter()
            .flatten()
            .map(|s| format!("{} {:.2}", s["symbol"].as_str().unwrap_or("?"), s["refinement"]["refined"].as_f64().unwrap_or(f64::NAN)))
            .collect();
        detail.push(format!("{name}: {}{}", ratios.join(", "), fail_note(&rep)));
    }
    Ok((ok, detail.join("; ")))
}

fn fail_note(rep: &ExperimentReport) -> String {
    let failed = failed_checks(rep);
    if failed.is_empty() {
        String::new()
    } else {
        format!(" [failed: {}]", failed.join(", "))
    }
}

fn xia_dichotomy(dir: &Path) -> Outcome {
    let start = Instant::now();
    let rep = experiment(ExperimentId::XiaBc, |_| {}, dir)?;
    let secs = start.elapsed().as_secs_f64();
    Ok((
        rep.passed() && secs <= 600.0,
        format!(
            "s1 {:.4} / {:.4}, Σs_n(H_f̄) slope {:.3}, {secs:.1} s{}",
            measured(&rep, "xia_s1"),
            measured(&rep, "conj_xia_s1"),
            measured(&rep, "conj_xia_log_slope_p1"),
            fail_note(&rep)
        ),
    ))
}

fn berger_coburn(dir: &Path) -> Outcome {
    let rep = experiment(ExperimentId::BergerCoburnP, |_| {}, dir)?;
    Ok((
        rep.passed(),
        format!("max ratio p=1.5 {:.3}, p=2 {:.3}{}", measured(&rep, "ratio_band_p1.5"), measured(&rep, "ratio_band_p2"), fail_note(&rep)),
    ))
}

fn ratio_band(rep: &ExperimentReport) -> Outcome {
    let count = measured(rep, "ratios_available_p2");
    let band = measured(rep, "ratio_band_p2");
    let note = if band <= 10.0 { "" } else { " (warning: band above 10)" };
    Ok((count >= 6.0, format!("{count} symbols with both sides converged, band {band:.3}{note}")))
}

fn sandwich(rep: &ExperimentReport) -> Outcome {
    let fitter = LocalFitter::<f64>::default();
    let model = WeightModel::<f64>::classical();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let symbols: Vec<SymbolDescriptor<f64>> =
        ["zbar", "xia", "conj:xia", "fbeta:0.5", "zbar_disk:1", "indicator:1", "mode:-2:2:0:1", "zbar_decay:10"]
            .iter()
            .map(|s| parse_symbol(s))
            .collect::<Result<_, _>>()
            .map_err(err)?;
    let mut worst = f64::MIN;
    for i in 0..1000 {
        let f = &symbols[i % symbols.len()];
        let z = random_point(&mut rng, 6.0);
        let (g, mo) = fitter.g2_mo2_at(f, z, model.rho(z).map_err(err)?).map_err(err)?;
        worst = worst.max(g - mo);
    }
    let ok = worst <= 1e-9 && rep.check("ida_below_imo_p2").is_some_and(|c| c.passed()) && rep.check("imo_constant_finite_p2").is_some_and(|c| c.passed());
    Ok((ok, format!("max G2 − MO2 over 10^3 probes {worst:.1e}, C = {:.3}", measured(rep, "imo_constant_finite_p2"))))
}

fn fbeta(dir: &Path) -> Outcome {
    let classical = experiment(ExperimentId::FbetaNorms, |_| {}, &dir.join("classical"))?;
    let power = experiment(
        ExperimentId::FbetaNorms,
        |c| {
            c.weight = WeightSpec::Power { exponent: 4.0, coefficient: 1.0 };
            c.p = vec![0.5];
            c.rmax = vec![2.0, 4.0, 8.0, 16.0];
        },
        &dir.join("power"),
    )?;
    let log_div = classical.check("imo_log_divergent_p1").is_some_and(|c| c.passed());
    let ida = classical.check("ida_converged_p1").is_some_and(|c| c.passed());
    let power_ok = power.check("imo_exponent_rho_aware_p0.5").is_some_and(|c| c.passed());
    Ok((
        log_div && ida && power_ok,
        format!(
            "classical IMO growth exponent {:.4} (log rate needs 0), IDA converged {ida}; power(4,1) exponent {:.4} vs ρ-aware {:.2}",
            measured(&classical, "imo_log_divergent_p1"),
            measured(&power, "imo_exponent_rho_aware_p0.5"),
            2.75
        ),
    ))
}

fn toeplitz(dir: &Path) -> Outcome {
    let rep = experiment(ExperimentId::ToeplitzEquiv, |_| {}, dir)?;
    Ok((rep.passed(), format!("band {:.4}{}", measured(&rep, "ratio_band_p1"), fail_note(&rep))))
}

fn strip_timestamp(path: &Path) -> Result<serde_json::Value, String> {
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).map_err(err)?).map_err(err)?;
    v.as_object_mut().ok_or("report is not an object")?.remove("timestamp");
    Ok(v)
}

fn determinism(dir: &Path) -> Outcome {
    let a = dir.join("a");
    let b = dir.join("b");
    experiment(ExperimentId::XiaBc, |_| {}, &a)?;
    experiment(ExperimentId::XiaBc, |_| {}, &b)?;
    let same = strip_timestamp(&a.join("report.json"))? == strip_timestamp(&b.join("report.json"))?;
    let bytes_same = ["svals_xia.csv", "svals_conj_xia.csv"]
        .iter()
        .all(|f| std::fs::read(a.join(f)).ok() == std::fs::read(b.join(f)).ok());
    Ok((same && bytes_same, format!("report.json equal modulo timestamp: {same}, CSVs byte-identical: {bytes_same}")))
}

fn main() {
    let tmp = tempfile::tempdir().expect("temp dir");
    let root = tmp.path();
    let start = Instant::now();

    // criteria 9 and 10 share one equivalence run
    let equivalence = experiment(ExperimentId::Equivalence, |_| {}, &root.join("equivalence"));

    let criteria: Vec<Criterion> = vec![
        (1, "ρ exactness", Box::new(rho_exactness)),
        (2, "ρ Lipschitz", Box::new(rho_lipschitz)),
        (3, "kernel closed form", Box::new(kernel_closed_form)),
        (4, "local projection oracle", Box::new(local_projection)),
        (5, "lattice and partition invariants", Box::new(lattice_partition)),
        (6, "decomposition bound", Box::new(|| decomposition(&root.join("decomposition")))),
        (7, "Xia dichotomy", Box::new(|| xia_dichotomy(&root.join("xia")))),
        (8, "Berger–Coburn for p > 1", Box::new(|| berger_coburn(&root.join("bc")))),
        (9, "Hankel/IDA ratio band", Box::new(|| equivalence.as_ref().map_err(Clone::clone).and_then(ratio_band))),
        (10, "IMO/IDA sandwich", Box::new(|| equivalence.as_ref().map_err(Clone::clone).and_then(sandwich))),
        (11, "f_β divergence", Box::new(|| fbeta(&root.join("fbeta")))),
        (12, "Toeplitz equivalence", Box::new(|| toeplitz(&root.join("toeplitz")))),
        (13, "determinism", Box::new(|| determinism(&root.join("determinism")))),
    ];

    let mut unexpected = Vec::new();
    let mut passed = 0;
    for (id, title, run) in &criteria {
        let t = Instant::now();
        let (ok, detail) = match run() {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        let tag = if ok { "[PASS]" } else { "[FAIL]" };
        println!("{tag} {id:>2} {title}: {detail} ({:.1} s)", t.elapsed().as_secs_f64());
        if ok {
            passed += 1;
        } else if !KNOWN_RED.contains(id) {
            unexpected.push(*id);
        }
    }
    println!("{passed}/{} criteria passed in {:.0} s", criteria.len(), start.elapsed().as_secs_f64());
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
