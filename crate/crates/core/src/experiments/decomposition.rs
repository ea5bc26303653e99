use std::path::Path;

use num_complex::Complex;
use serde_json::json;

use super::{is_classical, slug, Check, ExperimentConfig, ExperimentReport};
use crate::decompose::{ida_decompose, refinement_check, DecomposeConfig, Decomposition, VerifyConfig};
use crate::error::Result;
use crate::io::write_csv;
use crate::symbols::parse_symbol;
use crate::weights::WeightModel;

/// Default decomposition radius: the power weights shrink ρ fast, so their
/// lattices grow quadratically with the domain.
fn default_domain(cfg: &ExperimentConfig) -> f64 {
    cfg.domain.unwrap_or(if is_classical(&cfg.weight) { 2.0 } else { 1.0 })
}

fn write_artifacts(dir: &Path, name: &str, dec: &Decomposition<f64>, rows: &[Vec<f64>], artifacts: &mut Vec<String>) -> Result<()> {
    let file = format!("bound_rows_{name}.csv");
    write_csv(dir.join(&file), &["x", "y", "rho_dbar_f1", "rho_dbar_f1_mean", "f2_mean", "g_ref", "ratio"], rows.iter().cloned())?;
    artifacts.push(file);

    let file = format!("fits_{name}.csv");
    let lat = &dec.partition.lattice;
    let fit_rows = dec.fits.iter().enumerate().map(|(j, fit)| {
        let (a, rho) = (lat.centers[j], lat.rhos[j]);
        let c0 = fit.coefficients.first().copied().unwrap_or_default();
        vec![j as f64, a.re, a.im, rho, fit.degree as f64, fit.residual, c0.re, c0.im]
    });
    write_csv(dir.join(&file), &["j", "x", "y", "rho", "degree", "residual", "re_c0", "im_c0"], fit_rows)?;
    artifacts.push(file);

    // 41×41 grid on [−d, d]², points inside the disk only
    let file = format!("split_{name}.csv");
    let d = dec.domain;
    let mut grid = Vec::new();
    for iy in 0..41 {
        for ix in 0..41 {
            let z = Complex::new(-d + 2.0 * d * ix as f64 / 40.0, -d + 2.0 * d * iy as f64 / 40.0);
            if z.norm() > d {
                continue;
            }
            let v = dec.value(z)?;
            grid.push(vec![z.re, z.im, v.f1.re, v.f1.im, v.f2.re, v.f2.im]);
        }
    }
    write_csv(dir.join(&file), &["x", "y", "re_f1", "im_f1", "re_f2", "im_f2"], grid)?;
    artifacts.push(file);
    Ok(())
}

/// Runs the f = f₁ + f₂ construction per symbol and checks the pointwise bound
/// against G_{2,3r}(f) at the base and refined probe sets.
pub fn decomposition_check_experiment(cfg: &ExperimentConfig, dir: &Path) -> Result<ExperimentReport> {
    let model = WeightModel::from_spec(cfg.weight.clone())?;
    let domain = default_domain(cfg);
    let dcfg = DecomposeConfig::new(cfg.r, cfg.m, domain);
    let vcfg = VerifyConfig::default();
    let mut rep = ExperimentReport::new(cfg);
    let mut rows = Vec::new();
    for text in &cfg.symbols {
        let f = parse_symbol::<f64>(text)?;
        let name = slug(text);
        let dec = ida_decompose(&f, &model, &dcfg)?;
        let (base, fine, check) = refinement_check(&dec, &model, (0.0, domain), &vcfg)?;
        let entire = f.holomorphic_on_disk(Complex::new(0.0, 0.0), 2.0 * domain + 1.0);
        rep.push(Check::flag(format!("no_violations_{name}"), check.violations == 0, "every probe with a nonzero left side has G > 0", true).with_value(check.violations as f64));
        if entire {
            rep.push(Check::at_most(format!("entire_lhs_{name}"), check.max_lhs, 1e-8, true));
        } else {
            rep.push(
                Check::flag(format!("stable_under_refinement_{name}"), check.stable(0.25), "max ratio within ±25%", true)
                    .with_value(check.relative_change)
                    .with_detail(format!("base {:.4}, refined {:.4}", check.base, check.refined)),
            );
        }
        let anchor = base.anchor_gap.max(fine.anchor_gap);
        let recon = base.reconstruction_gap.max(fine.reconstruction_gap);
        rep.push(Check::at_most(format!("anchor_identity_{name}"), anchor, 1e-10, true));
        rep.push(Check::at_most(format!("reconstruction_{name}"), recon, 1e-10, true));

        let bound_rows: Vec<Vec<f64>> = base
            .rows
            .iter()
            .map(|b| vec![b.x, b.y, b.rho_dbar, b.rho_dbar_mean, b.f2_mean, b.g_ref, b.ratio.unwrap_or(f64::NAN)])
            .collect();
        write_artifacts(dir, &name, &dec, &bound_rows, &mut rep.artifacts)?;
        rows.push(json!({
            "symbol": text,
            "centers": dec.fits.len(),
            "probes": [base.probes, fine.probes],
            "refinement": check,
            "anchor_gap": anchor,
            "reconstruction_gap": recon,
        }));
    }
    rep.results = json!({ "domain": domain, "r": cfg.r, "m": cfg.m, "symbols": rows });
    Ok(rep)
}
