//! Batch front end: runs verification suites from scenario files, emits
//! JSON reports, convergence sweeps (CSV), identity suites, and flow-based
//! volume/coverage checks.

mod identities;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use wulff_willmore_core::error::Error;
use wulff_willmore_core::flow::{
    gauss_coverage_check, inclusion_spotcheck, neighborhood_volume_check, CoverageMode,
};
use wulff_willmore_core::regions::wulff_cone_volume;
use wulff_willmore_core::schema::{FlowCheckSpec, ScenarioSpec, SuiteConfig};
use wulff_willmore_core::verifier::{effective_norm, verify, Status, VerificationReport};

#[derive(Parser)]
#[command(
    name = "wulff-willmore",
    version,
    about = "Willmore-type inequality verification"
)]
struct Cli {
    /// Worker threads (default: WULFF_WILLMORE_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run verification scenarios from a suite config.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Restrict to a single scenario by name.
        #[arg(long)]
        scenario: Option<String>,
        /// Override the quadrature order of every scenario.
        #[arg(long)]
        order: Option<usize>,
        /// Override the seed of every scenario.
        #[arg(long)]
        seed: Option<u64>,
        /// Emit reports as JSON to this path ("-" = stdout).
        #[arg(long)]
        json: Option<String>,
        /// Directory for per-scenario report files.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Convergence sweep over order, samples, or R; emits a CSV table.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        scenario: String,
        /// Swept parameter: order | samples | R.
        #[arg(long)]
        parameter: String,
        /// Comma-separated grid values, e.g. 8,16,32,64.
        #[arg(long)]
        grid: String,
        /// Monte-Carlo sample count for R sweeps.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Also write the CSV into this directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Run the norm-calculus and integral identity suites.
    Identities {
        /// Restrict to one family: euclidean | capillary | ellipsoidal | sampled.
        #[arg(long)]
        norm: Option<String>,
        /// Capillary angle for the capillary family.
        #[arg(long)]
        theta0: Option<f64>,
        /// Random trials per sampling-based group.
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Quadrature order for the integral identities.
        #[arg(long, default_value_t = 48)]
        order: usize,
        /// Emit the summary as JSON to this path ("-" = stdout).
        #[arg(long)]
        json: Option<String>,
    },
    /// Run the flow checks attached to scenarios of a suite config.
    FlowCheck {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        scenario: Option<String>,
        /// Override the sample count of every Monte-Carlo check.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Emit records as JSON to this path ("-" = stdout).
        #[arg(long)]
        json: Option<String>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads.or_else(|| {
        std::env::var("WULFF_WILLMORE_THREADS")
            .ok()
            .and_then(|s| s.parse().ok())
    });
    if let Some(n) = threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    let code = match cli.cmd {
        Cmd::Verify {
            config,
            scenario,
            order,
            seed,
            json,
            out_dir,
        } => run_verify(
            &config,
            scenario.as_deref(),
            order,
            seed,
            json.as_deref(),
            out_dir,
        ),
        Cmd::Sweep {
            config,
            scenario,
            parameter,
            grid,
            samples,
            seed,
            out_dir,
        } => run_sweep(
            &config, &scenario, &parameter, &grid, samples, seed, out_dir,
        ),
        Cmd::Identities {
            norm,
            theta0,
            trials,
            seed,
            order,
            json,
        } => identities::run(
            norm.as_deref(),
            theta0,
            trials,
            seed,
            order,
            json.as_deref(),
        ),
        Cmd::FlowCheck {
            config,
            scenario,
            samples,
            seed,
            json,
            out_dir,
        } => run_flow_check(
            &config,
            scenario.as_deref(),
            samples,
            seed,
            json.as_deref(),
            out_dir,
        ),
    };
    match code {
        Ok(c) => ExitCode::from(c),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

struct Selection {
    config: SuiteConfig,
    base_dir: PathBuf,
    indices: Vec<usize>,
}

fn load_selection(config_path: &Path, scenario: Option<&str>) -> Result<Selection, Error> {
    let config = SuiteConfig::load(config_path)?;
    let base_dir = config_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let indices: Vec<usize> = match scenario {
        Some(name) => {
            let idx = config
                .scenarios
                .iter()
                .position(|s| s.name == name)
                .ok_or_else(|| Error::Schema(format!("no scenario named '{name}'")))?;
            vec![idx]
        }
        None => (0..config.scenarios.len()).collect(),
    };
    Ok(Selection {
        config,
        base_dir,
        indices,
    })
}

fn suite_exit_code(statuses: &[Status]) -> u8 {
    if statuses.iter().any(|s| *s == Status::Fail) {
        2
    } else if statuses.iter().any(|s| *s == Status::HypothesisFailed) {
        3
    } else {
        0
    }
}

pub(crate) fn write_json_sink(sink: &str, text: &str) -> Result<(), Error> {
    if sink == "-" {
        println!("{text}");
        Ok(())
    } else {
        std::fs::write(sink, format!("{text}\n")).map_err(Error::Io)
    }
}

fn run_verify(
    config_path: &Path,
    scenario: Option<&str>,
    order: Option<usize>,
    seed: Option<u64>,
    json: Option<&str>,
    out_dir: Option<PathBuf>,
) -> Result<u8, Error> {
    let sel = load_selection(config_path, scenario)?;
    let out_dir = out_dir
        .or_else(|| sel.config.out_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("reports"));
    std::fs::create_dir_all(&out_dir).map_err(Error::Io)?;

    let mut reports: Vec<VerificationReport> = Vec::new();
    for &i in &sel.indices {
        let spec = &sel.config.scenarios[i];
        let mut sc = spec
            .build(&sel.base_dir, sel.config.seed)
            .map_err(|e| Error::Schema(format!("scenario '{}': {e}", spec.name)))?;
        if let Some(o) = order {
            sc.order = o;
        }
        if let Some(s) = seed {
            sc.seed = s;
        }
        let report = verify(&sc)?;
        let text =
            serde_json::to_string_pretty(&report).map_err(|e| Error::Schema(e.to_string()))?;
        let path = out_dir.join(format!("{}.json", spec.name));
        std::fs::write(&path, format!("{text}\n")).map_err(Error::Io)?;
        let line = format!(
            "{:<40} {:<18} lhs {:.9} rhs {:.9} margin {:+.3e}",
            report.scenario,
            format!("{:?}", report.status).to_lowercase(),
            report.lhs,
            report.rhs,
            report.margin
        );
        // keep stdout clean when it carries the JSON payload
        if json == Some("-") {
            eprintln!("{line}");
        } else {
            println!("{line}");
        }
        reports.push(report);
    }
    if let Some(sink) = json {
        let text = if reports.len() == 1 {
            serde_json::to_string_pretty(&reports[0])
        } else {
            serde_json::to_string_pretty(&reports)
        }
        .map_err(|e| Error::Schema(e.to_string()))?;
        write_json_sink(sink, &text)?;
    }
    Ok(suite_exit_code(
        &reports.iter().map(|r| r.status).collect::<Vec<_>>(),
    ))
}

fn parse_grid(grid: &str) -> Result<Vec<f64>, Error> {
    grid.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Schema(format!("grid value '{s}': {e}")))
        })
        .collect()
}

fn run_sweep(
    config_path: &Path,
    scenario: &str,
    parameter: &str,
    grid: &str,
    samples: Option<usize>,
    seed: Option<u64>,
    out_dir: Option<PathBuf>,
) -> Result<u8, Error> {
    let sel = load_selection(config_path, Some(scenario))?;
    let spec = &sel.config.scenarios[sel.indices[0]];
    let sc = spec.build(&sel.base_dir, sel.config.seed)?;
    let grid = parse_grid(grid)?;
    let samples = samples.unwrap_or(100_000).max(10_000);
    let seed = seed.unwrap_or(sc.seed);

    let mut rows = vec!["parameter,lhs,rhs,margin,error".to_string()];
    match parameter {
        "order" => {
            for &g in &grid {
                let order = g as usize;
                let mut s = sc.clone();
                s.order = order;
                let report = verify(&s)?;
                let mut coarse = sc.clone();
                coarse.order = (order / 2).max(4);
                let prev = verify(&coarse)?;
                rows.push(format!(
                    "{order},{:.15e},{:.15e},{:.15e},{:.15e}",
                    report.lhs,
                    report.rhs,
                    report.margin,
                    (report.lhs - prev.lhs).abs()
                ));
            }
        }
        "samples" => {
            let (radius, check_seed) = first_volume_check(spec).unwrap_or((8.0, None));
            for &g in &grid {
                let n = (g as usize).max(10_000);
                let rec = volume_check(&sel, spec, radius, n, check_seed.unwrap_or(seed))?;
                rows.push(format!(
                    "{n},{:.15e},{:.15e},{:.15e},{:.15e}",
                    rec.mc_volume,
                    rec.quadrature_bound,
                    rec.mc_volume - rec.quadrature_bound,
                    rec.half_width
                ));
            }
        }
        "R" => {
            let sector = wulff_cone_volume(
                &effective_norm(&sc.norm, &sc.tag)?.0,
                &sc.region.tangent_cone_at_infinity(),
                1.0,
                sc.order.max(48),
            )?;
            for &g in &grid {
                let rec = volume_check(&sel, spec, g, samples, seed)?;
                rows.push(format!(
                    "{g},{:.15e},{:.15e},{:.15e},{:.15e}",
                    rec.normalized_ratio,
                    sector,
                    rec.normalized_ratio - sector,
                    rec.half_width / (g + 1.0).powi(3)
                ));
            }
        }
        other => {
            return Err(Error::Schema(format!(
                "unknown sweep parameter '{other}' (expected order | samples | R)"
            )))
        }
    }
    let table = rows.join("\n");
    println!("{table}");
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(&dir).map_err(Error::Io)?;
        std::fs::write(
            dir.join(format!("sweep_{scenario}_{parameter}.csv")),
            format!("{table}\n"),
        )
        .map_err(Error::Io)?;
    }
    Ok(0)
}

fn first_volume_check(spec: &ScenarioSpec) -> Option<(f64, Option<u64>)> {
    spec.flow_checks.iter().find_map(|c| match c {
        FlowCheckSpec::NeighborhoodVolume { radius, seed, .. } => Some((*radius, *seed)),
        _ => None,
    })
}

fn volume_check(
    sel: &Selection,
    spec: &ScenarioSpec,
    radius: f64,
    samples: usize,
    seed: u64,
) -> Result<wulff_willmore_core::flow::NeighborhoodVolumeRecord, Error> {
    let sc = spec.build(&sel.base_dir, sel.config.seed)?;
    let (eff, _) = effective_norm(&sc.norm, &sc.tag)?;
    neighborhood_volume_check(
        &eff,
        &sc.region,
        &sc.surface,
        spec.surface.center(),
        radius,
        samples,
        seed,
        sc.order.min(48),
    )
}

fn run_flow_check(
    config_path: &Path,
    scenario: Option<&str>,
    samples: Option<usize>,
    seed: Option<u64>,
    json: Option<&str>,
    out_dir: Option<PathBuf>,
) -> Result<u8, Error> {
    let sel = load_selection(config_path, scenario)?;
    let out_dir = out_dir
        .or_else(|| sel.config.out_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("reports"));
    std::fs::create_dir_all(&out_dir).map_err(Error::Io)?;

    let mut all = Vec::new();
    let mut any_fail = false;
    for &i in &sel.indices {
        let spec = &sel.config.scenarios[i];
        if spec.flow_checks.is_empty() {
            continue;
        }
        let sc = spec
            .build(&sel.base_dir, sel.config.seed)
            .map_err(|e| Error::Schema(format!("scenario '{}': {e}", spec.name)))?;
        let (eff, omega0) = effective_norm(&sc.norm, &sc.tag)?;
        let center = spec.surface.center();
        let report = verify(&sc)?;
        let mut records = Vec::new();
        for check in &spec.flow_checks {
            let record = match check {
                FlowCheckSpec::NeighborhoodVolume {
                    radius,
                    samples: n,
                    seed: s,
                } => {
                    let rec = neighborhood_volume_check(
                        &eff,
                        &sc.region,
                        &sc.surface,
                        center,
                        *radius,
                        samples.unwrap_or(*n),
                        seed.or(*s).unwrap_or(sc.seed),
                        sc.order.min(48),
                    )?;
                    any_fail |= !rec.pass;
                    serde_json::to_value(&rec)
                }
                FlowCheckSpec::GaussCoverage { targets, seed: s } => {
                    let mode = match omega0 {
                        Some(w) if w != 0.0 => CoverageMode::Capillary(w),
                        _ => CoverageMode::FreeBoundary,
                    };
                    let rec = gauss_coverage_check(
                        &sc.norm,
                        &sc.surface,
                        mode,
                        *targets,
                        seed.or(*s).unwrap_or(sc.seed),
                    )?;
                    any_fail |= rec.hit_fraction < 1.0;
                    serde_json::to_value(&rec)
                }
                FlowCheckSpec::Inclusion {
                    radius,
                    samples: n,
                    seed: s,
                } => {
                    let rec = inclusion_spotcheck(
                        &eff,
                        &sc.region,
                        &sc.surface,
                        center,
                        *radius,
                        samples.unwrap_or(*n),
                        seed.or(*s).unwrap_or(sc.seed),
                        sc.order.min(48),
                    )?;
                    any_fail |= rec.ok_fraction < 1.0;
                    serde_json::to_value(&rec)
                }
            }
            .map_err(|e| Error::Schema(e.to_string()))?;
            records.push(record);
        }
        let entry = json!({
            "scenario": spec.name,
            "report": report,
            "flow_checks": records,
        });
        let text =
            serde_json::to_string_pretty(&entry).map_err(|e| Error::Schema(e.to_string()))?;
        std::fs::write(
            out_dir.join(format!("{}.flow.json", spec.name)),
            format!("{text}\n"),
        )
        .map_err(Error::Io)?;
        println!("{:<40} {} flow check(s)", spec.name, records.len());
        all.push(entry);
    }
    if let Some(sink) = json {
        let text = if all.len() == 1 {
            serde_json::to_string_pretty(&all[0])
        } else {
            serde_json::to_string_pretty(&all)
        }
        .map_err(|e| Error::Schema(e.to_string()))?;
        write_json_sink(sink, &text)?;
    }
    Ok(if any_fail { 2 } else { 0 })
}
