//! Command-line front end: divergences, information matrices, bound checks,
//! estimator measurements, scenario runs and the full verification suite.
//!
//! Exit codes: 0 when every verdict passes, 1 when any inequality verdict
//! fails, 2 on configuration or validation errors.

mod config;
mod output;

use bvbounds::bounds::{self, StatMoments};
use bvbounds::divergences::{divergence, numeric_divergence_oracle, DivergenceKind, OracleBudget};
use bvbounds::infomatrices::{chi2_matrix, hellinger_affinity_matrix, mc_matrix_oracle};
use bvbounds::kernels::KernelDictionary;
use bvbounds::models::FamilyParams;
use bvbounds::scenarios::{self, DesignKind, ScenarioResult};
use bvbounds::{Error, Result, RngStream};
use clap::{Parser, Subcommand, ValueEnum};
use config::RootConfig;
use output::{svg_line_chart, write_atomic};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "bvbounds",
    version,
    about = "Bias-variance trade-off lower bound toolkit"
)]
struct Cli {
    /// Master seed for every random stream (mandatory).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Monte Carlo replications.
    #[arg(long, global = true)]
    reps: Option<usize>,

    /// Worker threads (fallback: BV_BOUNDS_THREADS, then hardware parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output directory for reports, tables and plots.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    /// Stdout format for tabular results.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Verdict tolerance override for bound checks.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Pairwise information measure between two parameter settings.
    Divergence {
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        sigma: Option<f64>,
        /// Comma-separated parameter vector.
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        theta_prime: Option<String>,
        #[arg(long, default_value = "chi2")]
        kind: String,
        /// Route through the numeric oracle instead of the closed form.
        #[arg(long)]
        oracle: bool,
    },
    /// χ²-divergence or Hellinger affinity matrix for a parameter list.
    Matrix {
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long, default_value = "chi2")]
        kind: String,
        /// Semicolon-separated parameter vectors, base first: "0,0;1,0;0,1".
        #[arg(long, allow_hyphen_values = true)]
        params: Option<String>,
        /// Verify against the Monte Carlo oracle.
        #[arg(long)]
        verify: bool,
    },
    /// Evaluate the configured inequality set; emits BoundReports as JSON lines.
    Bound,
    /// Monte Carlo moments of the configured estimator.
    Estimate,
    /// Run one scenario by id (config supplies its parameters).
    Scenario {
        #[arg(long)]
        id: Option<String>,
        /// Emit SVG plots alongside the JSON/CSV output.
        #[arg(long)]
        plots: bool,
    },
    /// Run the full invariant suite and exit by overall verdict.
    VerifyAll,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(all_pass) => {
            if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let seed = cli
        .seed
        .ok_or_else(|| Error::Config("--seed is mandatory".into()))?;
    let cfg: RootConfig = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("reading {}: {}", path.display(), e)))?;
            RootConfig::parse(&text)?
        }
        None => RootConfig::default(),
    };
    let run_sec = cfg.run.as_ref();
    let reps = cli.reps.or(run_sec.and_then(|r| r.reps)).unwrap_or(100_000);
    let threads = cli.threads.or(run_sec.and_then(|r| r.threads)).or_else(|| {
        std::env::var("BV_BOUNDS_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(t) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .ok();
    }
    let out_dir = cli
        .out_dir
        .clone()
        .or_else(|| run_sec.and_then(|r| r.out_dir.clone()).map(PathBuf::from));
    let format = cli
        .format
        .unwrap_or_else(|| match run_sec.and_then(|r| r.format.as_deref()) {
            Some("csv") => Format::Csv,
            _ => Format::Json,
        });
    let tol = cli.tol.or(run_sec.and_then(|r| r.tol));

    match &cli.command {
        Command::Divergence {
            family,
            sigma,
            theta,
            theta_prime,
            kind,
            oracle,
        } => {
            let fam = match (family.as_deref(), &cfg.family) {
                (Some(name), _) => config::FamilyConfig {
                    kind: name.to_string(),
                    sigma: *sigma,
                    shapes: None,
                    cells: None,
                    noise_level: None,
                    intensity: None,
                    height_cap: None,
                }
                .to_family()?,
                (None, Some(fc)) => fc.to_family()?,
                _ => return Err(Error::Config("no family given (flag or config)".into())),
            };
            let p = parse_vec_arg(theta, &cfg, true)?;
            let q = parse_vec_arg(theta_prime, &cfg, false)?;
            let dk = parse_kind(kind)?;
            let value = if *oracle {
                let budget = OracleBudget {
                    mc_reps: reps,
                    stream: RngStream::new(seed),
                    ..Default::default()
                };
                numeric_divergence_oracle(dk, &fam, &p, &q, &budget)?
            } else {
                divergence(dk, &fam, &p, &q)?
            };
            println!("{}", serde_json::to_string_pretty(&value).unwrap());
            Ok(true)
        }
        Command::Matrix {
            family,
            sigma,
            kind,
            params,
            verify,
        } => {
            let fam = match (family.as_deref(), &cfg.family) {
                (Some(name), _) => config::FamilyConfig {
                    kind: name.to_string(),
                    sigma: *sigma,
                    shapes: None,
                    cells: None,
                    noise_level: None,
                    intensity: None,
                    height_cap: None,
                }
                .to_family()?,
                (None, Some(fc)) => fc.to_family()?,
                _ => return Err(Error::Config("no family given (flag or config)".into())),
            };
            let list: Vec<FamilyParams> = match (params, &cfg.params) {
                (Some(text), _) => text
                    .split(';')
                    .map(|chunk| Ok(FamilyParams::vector(parse_numbers(chunk)?)))
                    .collect::<Result<_>>()?,
                (None, Some(pc)) => {
                    let mut l = vec![pc.param_p()?];
                    for v in pc.list.clone().unwrap_or_default() {
                        l.push(FamilyParams::vector(v));
                    }
                    l
                }
                _ => return Err(Error::Config("no parameter list given".into())),
            };
            let matrix = match kind.as_str() {
                "chi2" => chi2_matrix(&fam, &list)?,
                "affinity" => hellinger_affinity_matrix(&fam, 0, &list)?,
                other => return Err(Error::Config(format!("unknown matrix kind '{}'", other))),
            };
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&matrix).unwrap()),
                Format::Csv => print!("{}", matrix.to_csv()),
            }
            if let Some(dir) = &out_dir {
                write_atomic(&dir.join("matrix.csv"), &matrix.to_csv())?;
            }
            let mut ok = true;
            if *verify {
                let mc = mc_matrix_oracle(&fam, &list, reps, RngStream::new(seed))?;
                let ses = mc.std_errors.as_ref().unwrap();
                for j in 0..matrix.m {
                    for k in 0..matrix.m {
                        let se = ses[j * matrix.m + k].max(1e-12);
                        if (mc.entry(j, k) - matrix.entry(j, k)).abs() > 4.0 * se {
                            eprintln!(
                                "entry ({}, {}): closed {} vs mc {} (se {})",
                                j,
                                k,
                                matrix.entry(j, k),
                                mc.entry(j, k),
                                se
                            );
                            ok = false;
                        }
                    }
                }
                println!(
                    "{}",
                    serde_json::json!({ "verified": ok, "reps": reps, "tolerance": "4 se" })
                );
            }
            Ok(ok)
        }
        Command::Bound => {
            let fam = cfg
                .family
                .as_ref()
                .ok_or_else(|| Error::Config("bound needs a [family] section".into()))?
                .to_family()?;
            let pc = cfg
                .params
                .as_ref()
                .ok_or_else(|| Error::Config("bound needs [params]".into()))?;
            let bc = cfg
                .bound
                .as_ref()
                .ok_or_else(|| Error::Config("bound needs [bound]".into()))?;
            let p = pc.param_p()?;
            let q = pc.param_q()?;
            let dim = match &p {
                FamilyParams::Vector(v) => v.dim(),
                FamilyParams::Function(_) => 1,
            };
            let stat = cfg
                .statistic
                .as_ref()
                .map(|s| s.to_statistic(dim))
                .transpose()?
                .unwrap_or(bvbounds::Statistic::Poly(
                    bvbounds::models::PolyStatistic::identity(dim, 0),
                ));
            let mut all = true;
            let mut lines = Vec::new();
            for ineq in &bc.inequalities {
                match ineq.as_str() {
                    "two-point" => {
                        let div = bounds::pair_divergences(&fam, &p, &q)?;
                        let moments = StatMoments::closed_form(
                            vec![stat.mean(&fam, &p)?, stat.mean(&fam, &q)?],
                            vec![stat.variance(&fam, &p)?, stat.variance(&fam, &q)?],
                        )?;
                        for rep in bounds::two_point_bounds(&div, &moments)? {
                            all &= rep.holds;
                            lines.push(serde_json::to_string(&rep).unwrap());
                        }
                    }
                    "path-limit" => {
                        let rep = bounds::path_limit_bounds(
                            &fam,
                            &p,
                            &q,
                            bc.path_steps.unwrap_or(64),
                            &stat,
                        )?;
                        for r in &rep.reports {
                            all &= r.holds;
                            lines.push(serde_json::to_string(r).unwrap());
                        }
                    }
                    "multi-point-chi2" => {
                        let mut list = vec![p.clone()];
                        for v in pc.list.clone().unwrap_or_default() {
                            list.push(FamilyParams::vector(v));
                        }
                        if list.len() < 2 {
                            return Err(Error::Config("multi-point needs params.list".into()));
                        }
                        let chi = chi2_matrix(&fam, &list)?;
                        let mean0 = stat.mean(&fam, &list[0])?;
                        let delta: Vec<f64> = list[1..]
                            .iter()
                            .map(|pp| stat.mean(&fam, pp).map(|m| m - mean0))
                            .collect::<Result<_>>()?;
                        let rep = bounds::multi_point_chi2_bound(
                            &delta,
                            &chi,
                            stat.variance(&fam, &list[0])?,
                            None,
                            tol.unwrap_or(1e-10),
                        )?;
                        for r in [&rep.report, &rep.spectral_report, &rep.row_sum_report] {
                            all &= r.holds;
                            lines.push(serde_json::to_string(r).unwrap());
                        }
                    }
                    "multi-point-hellinger" => {
                        let mut list = vec![p.clone()];
                        for v in pc.list.clone().unwrap_or_default() {
                            list.push(FamilyParams::vector(v));
                        }
                        if list.len() < 2 {
                            return Err(Error::Config("multi-point needs params.list".into()));
                        }
                        let affs: Vec<_> = (0..list.len())
                            .map(|l| hellinger_affinity_matrix(&fam, l, &list))
                            .collect::<Result<_>>()?;
                        let moments = StatMoments::closed_form(
                            list.iter()
                                .map(|pp| stat.mean(&fam, pp))
                                .collect::<Result<_>>()?,
                            list.iter()
                                .map(|pp| stat.variance(&fam, pp))
                                .collect::<Result<_>>()?,
                        )?;
                        let rep = bounds::multi_point_hellinger_bound(&affs, &moments)?;
                        all &= rep.report.holds;
                        lines.push(serde_json::to_string(&rep.report).unwrap());
                    }
                    "mad" => {
                        let h2 = divergence(DivergenceKind::HellingerSq, &fam, &p, &q)?;
                        let stat_poly = match &stat {
                            bvbounds::Statistic::Poly(ps) => ps.clone(),
                            _ => {
                                return Err(Error::Config(
                                    "mad bound needs a poly statistic".into(),
                                ))
                            }
                        };
                        let (u, v) = (stat_poly.mean(&fam, &p)?, stat_poly.mean(&fam, &q)?);
                        let rep = bounds::mad_bound(
                            &h2,
                            u,
                            v,
                            stat_poly.mad(&fam, &p, u)?,
                            stat_poly.mad(&fam, &q, v)?,
                            None,
                        )?;
                        all &= rep.holds;
                        lines.push(serde_json::to_string(&rep).unwrap());
                    }
                    other => return Err(Error::Config(format!("unknown inequality '{}'", other))),
                }
            }
            for line in &lines {
                println!("{}", line);
            }
            if let Some(dir) = &out_dir {
                write_atomic(&dir.join("bounds.jsonl"), &(lines.join("\n") + "\n"))?;
            }
            Ok(all)
        }
        Command::Estimate => {
            let fam = cfg
                .family
                .as_ref()
                .ok_or_else(|| Error::Config("estimate needs a [family] section".into()))?
                .to_family()?;
            let pc = cfg
                .params
                .as_ref()
                .ok_or_else(|| Error::Config("estimate needs [params]".into()))?;
            let p = pc.param_p()?;
            let dim = match &p {
                FamilyParams::Vector(v) => v.dim(),
                FamilyParams::Function(f) => f.cells(),
            };
            let spec = cfg
                .estimator
                .as_ref()
                .ok_or_else(|| Error::Config("estimate needs [estimator]".into()))?
                .to_spec(dim, seed)?;
            let m = bvbounds::estimators::mc_moments(&spec, &fam, &p, reps, RngStream::new(seed))?;
            println!("{}", serde_json::to_string_pretty(&m).unwrap());
            if let Some(dir) = &out_dir {
                write_atomic(
                    &dir.join("estimate.json"),
                    &serde_json::to_string_pretty(&m).unwrap(),
                )?;
            }
            Ok(true)
        }
        Command::Scenario { id, plots } => {
            let sc = cfg.scenario.as_ref();
            let id = id
                .clone()
                .or_else(|| sc.map(|s| s.id.clone()))
                .ok_or_else(|| Error::Config("scenario needs --id or [scenario].id".into()))?;
            let result = run_scenario(&id, sc, reps, seed)?;
            emit_scenario(&result, &out_dir, *plots, format)?;
            Ok(result.all_pass())
        }
        Command::VerifyAll => {
            let suite = scenarios::run_default_suite(seed, reps.min(150_000))?;
            let mut all = true;
            for r in &suite.results {
                for v in &r.verdicts {
                    println!(
                        "[{}] {} {}",
                        r.id,
                        if v.pass { "PASS" } else { "FAIL" },
                        v.name
                    );
                    all &= v.pass;
                }
                for b in &r.bounds {
                    println!(
                        "[{}] {} bound {}",
                        r.id,
                        if b.holds { "PASS" } else { "FAIL" },
                        b.id
                    );
                    all &= b.holds;
                }
                if let Some(dir) = &out_dir {
                    write_atomic(&dir.join(format!("{}.json", r.id)), &r.to_json())?;
                }
            }
            println!("verify-all: {}", if all { "ALL PASS" } else { "FAILURES" });
            Ok(all)
        }
    }
}

fn parse_numbers(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| Error::Config(format!("bad number '{}': {}", t, e)))
        })
        .collect()
}

fn parse_vec_arg(arg: &Option<String>, cfg: &RootConfig, is_p: bool) -> Result<FamilyParams> {
    match (arg, &cfg.params) {
        (Some(text), _) => Ok(FamilyParams::vector(parse_numbers(text)?)),
        (None, Some(pc)) => {
            if is_p {
                pc.param_p()
            } else {
                pc.param_q()
            }
        }
        _ => Err(Error::Config("missing parameter vector".into())),
    }
}

fn parse_kind(kind: &str) -> Result<DivergenceKind> {
    Ok(match kind {
        "tv" => DivergenceKind::Tv,
        "hellinger-sq" | "h2" => DivergenceKind::HellingerSq,
        "kl" => DivergenceKind::Kl,
        "chi2" => DivergenceKind::Chi2,
        other => {
            return Err(Error::Config(format!(
                "unknown divergence kind '{}'",
                other
            )))
        }
    })
}

fn run_scenario(
    id: &str,
    sc: Option<&config::ScenarioConfig>,
    reps: usize,
    seed: u64,
) -> Result<ScenarioResult> {
    let get = |f: fn(&config::ScenarioConfig) -> Option<f64>, default: f64| -> f64 {
        sc.and_then(f).unwrap_or(default)
    };
    let reps = sc.and_then(|s| s.reps).unwrap_or(reps);
    match id {
        "pointwise-gwn" => {
            let dict = KernelDictionary::standard();
            scenarios::run_pointwise_gwn(
                get(|s| s.r, 3.0),
                get(|s| s.beta, 1.0),
                get(|s| s.c, 1.0),
                get(|s| s.n, 100.0),
                sc.and_then(|s| s.cells).unwrap_or(1000),
                &dict,
                seed,
            )
        }
        "sparse-sequence" => scenarios::run_sparse_sequence(
            get(|s| s.n, 400.0) as u64,
            sc.and_then(|s| s.s).unwrap_or(2),
            get(|s| s.gamma, 0.15),
            reps,
            seed,
        ),
        "quadratic-functional" => scenarios::run_quadratic_functional(
            get(|s| s.n, 400.0) as u64,
            sc.and_then(|s| s.s).unwrap_or(2),
            get(|s| s.gamma, 1.0),
            reps,
            seed,
        ),
        "boundary" => scenarios::run_boundary(
            get(|s| s.n, 20.0),
            get(|s| s.beta, 0.5),
            get(|s| s.r, 2.0),
            reps,
            seed,
        ),
        "l2-reduction" => scenarios::run_l2_reduction(
            sc.and_then(|s| s.m).unwrap_or(8),
            get(|s| s.r, 4.0),
            get(|s| s.beta, 1.0) as u32,
            reps,
            seed,
        ),
        "bias-blowup" => {
            let ladder = sc
                .and_then(|s| s.a_ladder.clone())
                .unwrap_or_else(|| vec![1.0, 2.0, 5.0, 10.0]);
            scenarios::run_bias_blowup_demo(
                sc.and_then(|s| s.m).unwrap_or(8),
                get(|s| s.variance_budget, 2.0),
                &ladder,
                reps,
                seed,
            )
        }
        "hd-regression" => {
            let design = match sc.and_then(|s| s.design.clone()).as_deref() {
                Some("orthogonal") | None => DesignKind::Orthogonal,
                Some("random-sign") => DesignKind::RandomSign,
                Some(other) => return Err(Error::Config(format!("unknown design '{}'", other))),
            };
            scenarios::run_hd_regression(
                get(|s| s.n, 64.0) as usize,
                sc.and_then(|s| s.p).unwrap_or(16),
                sc.and_then(|s| s.s).unwrap_or(1),
                get(|s| s.gamma, 0.1),
                design,
                seed,
            )
        }
        other => Err(Error::Config(format!("unknown scenario id '{}'", other))),
    }
}

fn emit_scenario(
    result: &ScenarioResult,
    out_dir: &Option<PathBuf>,
    plots: bool,
    format: Format,
) -> Result<()> {
    match format {
        Format::Json => println!("{}", result.to_json()),
        Format::Csv => {
            for (name, table) in result.to_csv_tables() {
                println!("# {}\n{}", name, table);
            }
        }
    }
    if let Some(dir) = out_dir {
        write_atomic(&dir.join(format!("{}.json", result.id)), &result.to_json())?;
        for (name, table) in result.to_csv_tables() {
            write_atomic(&dir.join(format!("{}-{}.csv", result.id, name)), &table)?;
        }
        if plots {
            for (name, svg) in scenario_plots(result)? {
                write_atomic(&dir.join(format!("{}-{}.svg", result.id, name)), &svg)?;
            }
        }
    }
    Ok(())
}

/// Scenario-specific plots: the variance-vs-γ sandwich for the sparse model,
/// the bias ladder for the shrinkage demo.
fn scenario_plots(result: &ScenarioResult) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    match result.id.as_str() {
        "sparse-sequence" | "quadratic-functional" => {
            let n = result
                .config
                .iter()
                .find(|(k, _)| k == "n")
                .map(|(_, v)| *v as u64)
                .unwrap_or(400);
            let s = result
                .config
                .iter()
                .find(|(k, _)| k == "s")
                .map(|(_, v)| *v as u64)
                .unwrap_or(2);
            let log_ratio = ((n as f64) / ((s * s) as f64)).ln();
            let mut exact = Vec::new();
            let mut envelope = Vec::new();
            let mut g = 2.02 / log_ratio;
            while g < 2.0 {
                let rep = scenarios::sparse_sandwich(n, s, g)?;
                exact.push((g, rep.var0_sum));
                envelope.push((g, rep.var0_envelope));
                g += 0.05;
            }
            out.push((
                "variance-vs-gamma".to_string(),
                svg_line_chart(
                    "soft-threshold variance at zero vs gamma",
                    "gamma",
                    "sum of variances",
                    &[
                        ("exact".to_string(), exact),
                        ("envelope".to_string(), envelope),
                    ],
                    true,
                ),
            ));
        }
        "bias-blowup" => {
            let mut pts = Vec::new();
            for m in &result.measurements {
                if let Some(a) = m
                    .name
                    .strip_prefix("shrinkage[a=")
                    .and_then(|t| t.strip_suffix(']'))
                    .and_then(|t| t.parse::<f64>().ok())
                {
                    pts.push((a, m.moments.bias_norm_sq.sqrt()));
                }
            }
            pts.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
            out.push((
                "bias-ladder".to_string(),
                svg_line_chart(
                    "shrinkage bias growth under a variance budget",
                    "signal amplitude a",
                    "bias norm",
                    &[("measured".to_string(), pts)],
                    false,
                ),
            ));
        }
        _ => {}
    }
    Ok(out)
}
