//! Subcommands. Each prints a short result on stdout; the larger ones also
//! write JSON or CSV into the output directory.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use focklab::decompose::{ida_decompose, refinement_check, DecomposeConfig, VerifyConfig};
use focklab::experiments::{run_experiment, ExperimentConfig, ExperimentId, Status};
use focklab::fockops::{kernel_eval, schatten_report, toeplitz_matrix, BasisTable, RadialDensity};
use focklab::geometry::{build_lattice, build_partition, probe_grid};
use focklab::io::{write_csv, write_json, write_lattice_csv};
use focklab::localfit::LocalFitter;
use focklab::seminorms::{ida_seminorm, imo_seminorm, SeminormConfig, SeminormReport};
use focklab::symbols::{parse_symbol, SymbolDescriptor};
use focklab::weights::{doubling_diagnostic, QuadConfig, WeightModel};
use focklab::C64;
use serde_json::json;

use crate::config::RunConfig;
use crate::error::{CliError, ExitKind, Result};
use crate::parse::{parse_point, parse_weight};

/// Environment variable that overrides the output directory of a config file.
pub const OUT_DIR_ENV: &str = "FOCKLAB_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "focklab", version, about = "Doubling Fock space numerics: radius field, local fits, seminorms, Hankel and Toeplitz operators")]
pub struct Cli {
    /// Worker threads for the parallel integrators (≥ 1; default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Output directory. Takes precedence over FOCKLAB_OUT_DIR and the config file.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct WeightArgs {
    /// classical | gaussian:A (A > 0) | power:M:C (M ≥ 2, C > 0) | radial-csv:PATH | planar-csv:PATH
    #[arg(long, default_value = "classical")]
    pub weight: String,

    /// Gauss–Legendre radial nodes for μ(D(z, r)), ≥ 4.
    #[arg(long, default_value_t = QuadConfig::default().n_rad)]
    pub n_rad: usize,

    /// Angular nodes for μ(D(z, r)) on non-radial weights, ≥ 8.
    #[arg(long, default_value_t = QuadConfig::default().n_ang)]
    pub n_ang: usize,

    /// Relative tolerance of the ρ root solve, in (0, 1e-3].
    #[arg(long, default_value_t = 1e-12)]
    pub rho_tol: f64,
}

impl WeightArgs {
    fn model(&self) -> Result<WeightModel<f64>> {
        let spec = parse_weight(&self.weight).map_err(|e| CliError::invalid("--weight", e))?;
        if self.n_rad < 4 {
            return Err(CliError::invalid("--n-rad", "must be at least 4"));
        }
        if self.n_ang < 8 {
            return Err(CliError::invalid("--n-ang", "must be at least 8"));
        }
        if !(self.rho_tol > 0.0 && self.rho_tol <= 1e-3) {
            return Err(CliError::invalid("--rho-tol", "must lie in (0, 1e-3]"));
        }
        Ok(WeightModel::new(spec, QuadConfig { n_rad: self.n_rad, n_ang: self.n_ang }, self.rho_tol)?)
    }
}

#[derive(Debug, Args, Clone)]
pub struct LocalArgs {
    #[command(flatten)]
    pub weight: WeightArgs,
    /// Symbol, e.g. zbar, xia, conj:xia, fbeta:0.5, poly:1,0,2, indicator:1.
    #[arg(long)]
    pub symbol: String,
    /// Center x,y.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub z: C64,
    /// Disk radius in units of ρ(z), > 0.
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
}

#[derive(Debug, Args, Clone)]
pub struct SeminormArgs {
    #[command(flatten)]
    pub weight: WeightArgs,
    #[arg(long)]
    pub symbol: String,
    /// Integrability exponent, > 0.
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    /// Power of ρ; defaults to −2/p.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Local disk radius in units of ρ, > 0.
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    /// Truncation radii, positive and strictly increasing.
    #[arg(long, value_delimiter = ',', default_value = "5,10,20,40")]
    pub rmax: Vec<f64>,
    /// Samples per local ρ, ≥ 4.
    #[arg(long, default_value_t = 4.0)]
    pub resolution: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// ρ(z), the radius with μ(D(z, ρ)) = 1.
    Rho {
        #[command(flatten)]
        weight: WeightArgs,
        /// Point(s) x,y; repeat the flag for several.
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true, required = true)]
        z: Vec<C64>,
    },
    /// Doubling constant, ρ Lipschitz slack and growth exponents on a polar sample.
    Doubling {
        #[command(flatten)]
        weight: WeightArgs,
        /// Sample radius, > 0.
        #[arg(long, default_value_t = 5.0)]
        rmax: f64,
        /// Sample points per ring (8 rings), ≥ 1.
        #[arg(long, default_value_t = 8)]
        per_ring: usize,
        /// Disk radii for μ(D(z,2r))/μ(D(z,r)), each > 0.
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.5,1,2")]
        radii: Vec<f64>,
    },
    /// Builds and verifies an r-lattice on |z| ≤ rmax; writes lattice.csv.
    Lattice {
        #[command(flatten)]
        weight: WeightArgs,
        /// Lattice scale, in (0, 1].
        #[arg(long, default_value_t = 0.5)]
        r: f64,
        #[arg(long, default_value_t = 4.0)]
        rmax: f64,
    },
    /// Partition of unity on the lattice at scale m·r; checks Σψ = 1 and Σ∂̄ψ = 0.
    Partition {
        #[command(flatten)]
        weight: WeightArgs,
        /// Lattice scale, in (0, 1].
        #[arg(long, default_value_t = 0.5)]
        r: f64,
        /// Bump dilation, in (0, 1).
        #[arg(long, default_value_t = 0.5)]
        m: f64,
        #[arg(long, default_value_t = 3.0)]
        rmax: f64,
    },
    /// G_{2,r}(f)(z): L² distance to holomorphic functions on D(z, rρ(z)).
    G2(LocalArgs),
    /// MO_{2,r}(f)(z): mean oscillation on D(z, rρ(z)).
    Mo2(LocalArgs),
    /// Truncated ∫(ρ^α G_{2,r}(f))^p dA over the rmax schedule; writes ida.json.
    Ida(SeminormArgs),
    /// Truncated ∫(ρ^α MO_{2,r}(f))^p dA over the rmax schedule; writes imo.json.
    Imo(SeminormArgs),
    /// f = f₁ + f₂ on |z| ≤ domain with the pointwise bound check; exit 1 if it fails.
    Decompose {
        #[command(flatten)]
        weight: WeightArgs,
        #[arg(long)]
        symbol: String,
        /// Fit radius in units of ρ, > 0.
        #[arg(long, default_value_t = 0.5)]
        r: f64,
        /// Partition dilation, in (0, 1).
        #[arg(long, default_value_t = 0.5)]
        m: f64,
        /// Domain radius, > 0.
        #[arg(long, default_value_t = 1.0)]
        domain: f64,
    },
    /// Monomial norms b_n = ‖zⁿ‖², n ≤ N (radial weights); writes basis.csv.
    Basis {
        #[command(flatten)]
        weight: WeightArgs,
        /// Largest index, ≥ 1.
        #[arg(long, default_value_t = 60)]
        n: usize,
    },
    /// Reproducing kernel K(w, z) from the truncated monomial series.
    Kernel {
        #[command(flatten)]
        weight: WeightArgs,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        w: C64,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        z: C64,
        /// Series length, ≥ 1.
        #[arg(long, default_value_t = 200)]
        n: usize,
    },
    /// Hankel singular values and Schatten partial sums; writes hankel.json and hankel_svals.csv.
    Hankel {
        #[command(flatten)]
        weight: WeightArgs,
        #[arg(long)]
        symbol: String,
        /// Truncation schedule, strictly increasing.
        #[arg(long, value_delimiter = ',', default_value = "100,200,400")]
        n: Vec<usize>,
        /// Schatten exponents, each > 0.
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        p: Vec<f64>,
    },
    /// Diagonal of T_μ for a radial density; writes toeplitz.csv.
    Toeplitz {
        #[command(flatten)]
        weight: WeightArgs,
        /// indicator:A | power:E:LO:HI | zero | scale:C:<density>
        #[arg(long)]
        density: String,
        #[arg(long, default_value_t = 50)]
        n: usize,
    },
    /// Runs an experiment from a TOML config, or by name with its defaults.
    /// Exit 0 when every hard check passes, 1 otherwise.
    Experiment {
        /// TOML config with keys experiment, weight, output, threads, deterministic and [params].
        #[arg(long, conflicts_with = "name")]
        config: Option<PathBuf>,
        /// xia_bc | fbeta_norms | equivalence | berger_coburn_p | compactness | toeplitz_equiv | decomposition_check
        #[arg(long)]
        name: Option<String>,
    },
}

fn out_dir(flag: &Option<PathBuf>, from_config: Option<&Path>, fallback: &str) -> PathBuf {
    if let Some(d) = flag {
        return d.clone();
    }
    if let Some(d) = std::env::var_os(OUT_DIR_ENV) {
        return PathBuf::from(d);
    }
    from_config.map_or_else(|| PathBuf::from(fallback), Path::to_path_buf)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Core(e.into()))
}

fn symbol(text: &str) -> Result<SymbolDescriptor<f64>> {
    parse_symbol(text).map_err(|e| CliError::invalid("--symbol", e))
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::invalid(key, "must be positive"))
    }
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json values serialize"));
}

fn seminorm_summary(rep: &SeminormReport<f64>) -> serde_json::Value {
    json!({
        "symbol": rep.symbol,
        "p": rep.p,
        "alpha": rep.alpha,
        "r": rep.r,
        "schedule": rep.schedule,
        "partials": rep.partials,
        "strip": rep.strip,
        "verdict": rep.verdict,
        "growth": rep.growth,
        "norm": rep.norm(),
    })
}

fn seminorm(args: &SeminormArgs, imo: bool, dir: &Path) -> Result<ExitKind> {
    let model = args.weight.model()?;
    let f = symbol(&args.symbol)?;
    let p = positive("--p", args.p)?;
    let mut cfg = SeminormConfig::new(p, args.alpha.unwrap_or(-2.0 / p), positive("--r", args.r)?, args.rmax.clone());
    if !(args.resolution >= 4.0) {
        return Err(CliError::invalid("--resolution", "must be at least 4"));
    }
    cfg.resolution = args.resolution;
    let fitter = LocalFitter::default();
    let rep = if imo { imo_seminorm(&f, &model, &fitter, &cfg)? } else { ida_seminorm(&f, &model, &fitter, &cfg)? };
    ensure_dir(dir)?;
    write_json(dir.join(if imo { "imo.json" } else { "ida.json" }), &rep)?;
    print_json(&seminorm_summary(&rep));
    Ok(ExitKind::Pass)
}

fn experiment(cli: &Cli, config: &Option<PathBuf>, name: &Option<String>) -> Result<ExitKind> {
    let (cfg, file_out, threads): (ExperimentConfig, Option<PathBuf>, Option<usize>) = match (config, name) {
        (Some(path), _) => {
            let rc = RunConfig::from_path(path)?;
            (rc.experiment_config()?, rc.output.clone(), rc.threads)
        }
        (None, Some(n)) => {
            let id: ExperimentId = n.parse().map_err(|e| CliError::invalid("--name", e))?;
            (ExperimentConfig::defaults(id), None, None)
        }
        (None, None) => return Err(CliError::invalid("experiment", "pass --config or --name")),
    };
    if cli.threads.is_none() {
        if let Some(n) = threads {
            set_threads(n)?;
        }
    }
    let dir = out_dir(&cli.out_dir, file_out.as_deref(), &format!("out/{}", cfg.experiment.as_str()));
    let report = run_experiment(&cfg, &dir)?;
    for c in &report.checks {
        let tag = match c.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Warn => "warn",
            Status::Info => "info",
        };
        match c.measured {
            Some(v) => println!("{tag:>4}  {}  measured {v:.6e}  expected {}", c.name, c.expected),
            None => println!("{tag:>4}  {}  expected {}", c.name, c.expected),
        }
    }
    println!("report: {}", dir.join(focklab::experiments::REPORT_FILE).display());
    Ok(if report.passed() { ExitKind::Pass } else { ExitKind::CheckFailure })
}

/// Sizes the global worker pool; only the first call has an effect.
pub fn set_threads(n: usize) -> Result<()> {
    if n == 0 {
        return Err(CliError::invalid("threads", "must be at least 1"));
    }
    // an already-initialised pool keeps its size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn run(cli: &Cli) -> Result<ExitKind> {
    if let Some(n) = cli.threads {
        set_threads(n)?;
    }
    let dir = |name: &str| out_dir(&cli.out_dir, None, &format!("out/{name}"));
    match &cli.command {
        Command::Rho { weight, z } => {
            let model = weight.model()?;
            for &p in z {
                println!("{:.10}", model.rho(p)?);
            }
        }
        Command::Doubling { weight, rmax, per_ring, radii } => {
            let model = weight.model()?;
            let rmax = positive("--rmax", *rmax)?;
            if *per_ring == 0 {
                return Err(CliError::invalid("--per-ring", "must be at least 1"));
            }
            for &r in radii {
                positive("--radii", r)?;
            }
            let mut points = Vec::new();
            for ring in 1..=8 {
                let s = rmax * ring as f64 / 8.0;
                for k in 0..*per_ring {
                    points.push(C64::from_polar(s, std::f64::consts::TAU * (k as f64 + 0.5 * ring as f64) / *per_ring as f64));
                }
            }
            print_json(&json!(doubling_diagnostic(&model, &points, radii)?));
        }
        Command::Lattice { weight, r, rmax } => {
            let model = weight.model()?;
            if !(*r > 0.0 && *r <= 1.0) {
                return Err(CliError::invalid("--r", "must lie in (0, 1]"));
            }
            let rmax = positive("--rmax", *rmax)?;
            let lat = build_lattice(&model, *r, rmax)?;
            let probes = probe_grid(&model, rmax, *r)?;
            lat.verify(&probes)?;
            let d = dir("lattice");
            ensure_dir(&d)?;
            write_lattice_csv(d.join("lattice.csv"), &lat)?;
            print_json(&json!({
                "centers": lat.len(),
                "repaired": lat.repaired,
                "probes": probes.len(),
                "disjointness_margin": lat.disjointness_margin(),
                "verified": true,
                "csv": d.join("lattice.csv"),
            }));
        }
        Command::Partition { weight, r, m, rmax } => {
            let model = weight.model()?;
            if !(*r > 0.0 && *r <= 1.0) {
                return Err(CliError::invalid("--r", "must lie in (0, 1]"));
            }
            if !(*m > 0.0 && *m < 1.0) {
                return Err(CliError::invalid("--m", "must lie in (0, 1)"));
            }
            let rmax = positive("--rmax", *rmax)?;
            // the lattice reaches past rmax so the bumps cover the probe disk
            let lat = build_lattice(&model, *r, rmax + 2.0 * model.rho(C64::new(rmax, 0.0))?)?;
            let part = build_partition(lat, *m)?;
            let probes = probe_grid(&model, rmax, *r)?;
            let check = part.check(&probes, Some(1e-5))?;
            print_json(&json!(check));
            let ok = check.max_sum_error <= 1e-12 && check.max_dbar_sum <= 1e-10;
            return Ok(if ok { ExitKind::Pass } else { ExitKind::CheckFailure });
        }
        Command::G2(a) | Command::Mo2(a) => {
            let model = a.weight.model()?;
            let f = symbol(&a.symbol)?;
            let r = positive("--r", a.r)?;
            let fitter = LocalFitter::default();
            let v = match &cli.command {
                Command::G2(_) => fitter.g2(&f, &model, a.z, r)?,
                _ => fitter.mo2(&f, &model, a.z, r)?,
            };
            println!("{v:.12e}");
        }
        Command::Ida(a) => return seminorm(a, false, &dir("ida")),
        Command::Imo(a) => return seminorm(a, true, &dir("imo")),
        Command::Decompose { weight, symbol: s, r, m, domain } => {
            let model = weight.model()?;
            let f = symbol(s)?;
            if !(*m > 0.0 && *m < 1.0) {
                return Err(CliError::invalid("--m", "must lie in (0, 1)"));
            }
            let domain = positive("--domain", *domain)?;
            let dec = ida_decompose(&f, &model, &DecomposeConfig::new(positive("--r", *r)?, *m, domain))?;
            let (base, fine, check) = refinement_check(&dec, &model, (0.0, domain), &VerifyConfig::default())?;
            print_json(&json!({
                "symbol": s,
                "centers": dec.fits.len(),
                "probes": [base.probes, fine.probes],
                "refinement": check,
                "anchor_gap": base.anchor_gap.max(fine.anchor_gap),
                "reconstruction_gap": base.reconstruction_gap.max(fine.reconstruction_gap),
            }));
            let ok = check.violations == 0 && check.stable(0.25);
            return Ok(if ok { ExitKind::Pass } else { ExitKind::CheckFailure });
        }
        Command::Basis { weight, n } => {
            let model = weight.model()?;
            if *n == 0 {
                return Err(CliError::invalid("--n", "must be at least 1"));
            }
            let basis = BasisTable::new(&model, *n)?;
            let d = dir("basis");
            ensure_dir(&d)?;
            write_csv(d.join("basis.csv"), &["n", "ln_norm_sq"], (0..=*n).map(|k| vec![k as f64, basis.ln_norm_sq(k)]))?;
            for k in 0..=(*n).min(5) {
                println!("b_{k} = {:.12e}", basis.norm_sq(k));
            }
            println!("csv: {}", d.join("basis.csv").display());
        }
        Command::Kernel { weight, w, z, n } => {
            let model = weight.model()?;
            if *n == 0 {
                return Err(CliError::invalid("--n", "must be at least 1"));
            }
            let basis = BasisTable::new(&model, *n)?;
            let k = kernel_eval(&basis, *w, *z)?;
            print_json(&json!({ "re": k.value.re, "im": k.value.im, "tail": k.tail }));
        }
        Command::Hankel { weight, symbol: s, n, p } => {
            let model = weight.model()?;
            let f = symbol(s)?;
            let rep = schatten_report(&model, &f, n, p)?;
            let d = dir("hankel");
            ensure_dir(&d)?;
            write_json(d.join("hankel.json"), &rep)?;
            write_csv(
                d.join("hankel_svals.csv"),
                &["k", "s"],
                rep.singular_values.iter().enumerate().map(|(k, s)| vec![k as f64, *s]),
            )?;
            let series: Vec<_> = rep
                .series
                .iter()
                .map(|s| json!({ "p": s.p, "norm": s.norm, "extrapolated": s.extrapolated_norm, "verdict": s.verdict }))
                .collect();
            print_json(&json!({ "symbol": rep.symbol, "schedule": rep.schedule, "series": series }));
        }
        Command::Toeplitz { weight, density, n } => {
            let model = weight.model()?;
            let mu = RadialDensity::parse(density).map_err(|e| CliError::invalid("--density", e))?;
            let basis = BasisTable::new(&model, *n)?;
            let diag = toeplitz_matrix(&model, &basis, &mu, *n)?;
            let d = dir("toeplitz");
            ensure_dir(&d)?;
            write_csv(d.join("toeplitz.csv"), &["n", "t"], diag.iter().enumerate().map(|(k, t)| vec![k as f64, *t]))?;
            for (k, t) in diag.iter().enumerate().take(6) {
                println!("t_{k} = {t:.12e}");
            }
            println!("csv: {}", d.join("toeplitz.csv").display());
        }
        Command::Experiment { config, name } => return experiment(cli, config, name),
    }
    Ok(ExitKind::Pass)
}
