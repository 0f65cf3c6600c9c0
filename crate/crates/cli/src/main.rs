//! End-to-end runner: parse a Solomon-format instance, solve with the
//! graph-master or standard column-generation pipeline, and emit a
//! machine-readable report. Exit codes: 0 converged, 2 time limit hit,
//! 1 error (including usage errors).

use anyhow::{bail, Context};
use clap::Parser;
use std::path::PathBuf;
use vrptw_cg::lp_backend::BackendKind;
use vrptw_cg::master::enumeration_lp_objective;
use vrptw_cg::report::{run, sweep, Mode, RunReport, SolveConfig};
use vrptw_cg::{Backend, Instance};

#[derive(Parser, Debug)]
#[command(name = "vrptw-cg", version, about = "CVRPTW column generation with LA-arc pricing and graph-master stabilization")]
struct Args {
    /// Solomon-format instance file; repeatable with --sweep.
    #[arg(long = "instance", required = true, num_args = 1..)]
    instances: Vec<PathBuf>,

    /// gm (graph master) or cg (standard column generation).
    #[arg(long, default_value = "gm")]
    mode: Mode,

    /// LA-neighborhood size k.
    #[arg(long = "la-neighbors", default_value_t = 6)]
    la_neighbors: usize,

    /// Early-termination factor for exact pricing (0 disables).
    #[arg(long, default_value_t = 0.2)]
    alpha: f64,

    /// Raw-to-scaled time multiplier.
    #[arg(long = "time-scale", default_value_t = 10)]
    time_scale: i64,

    /// Reduced-cost convergence tolerance in scaled units.
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,

    /// Wall-clock limit per run, in seconds.
    #[arg(long = "max-seconds")]
    max_seconds: Option<f64>,

    /// Pool/cache pruning between outer iterations.
    #[arg(long, default_value = "off", value_parser = parse_on_off)]
    prune: bool,

    /// LP backend: auto, simplex, or clarabel. The VRPTW_CG_BACKEND
    /// environment variable overrides this flag.
    #[arg(long, default_value = "auto")]
    backend: String,

    /// Report sink: .json, or .csv to append one row per run.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Pricing debug trace file (one line per solve iteration).
    #[arg(long)]
    trace: Option<PathBuf>,

    /// Cross-check the final objective against the set-cover LP over full
    /// route enumeration (instances with at most 8 customers).
    #[arg(long = "oracle-check", default_value_t = false)]
    oracle_check: bool,

    /// Dump the normalized instance as JSON and exit.
    #[arg(long = "dump-instance")]
    dump_instance: Option<PathBuf>,

    /// Run the cross product of instances x modes x k values.
    #[arg(long, default_value_t = false)]
    sweep: bool,

    /// Modes for --sweep, comma separated.
    #[arg(long, default_value = "gm,cg")]
    modes: String,

    /// LA-neighbor counts for --sweep, comma separated.
    #[arg(long = "k-list", default_value = "0,4,6,8,10")]
    k_list: String,

    /// Parallel runs for --sweep (1 = sequential).
    #[arg(long, default_value_t = 1)]
    jobs: usize,

    /// ILP postprocessing time budget in seconds.
    #[arg(long = "ilp-max-seconds", default_value_t = 120.0)]
    ilp_max_seconds: f64,
}

fn parse_on_off(s: &str) -> Result<bool, String> {
    match s {
        "on" => Ok(true),
        "off" => Ok(false),
        other => Err(format!("expected on|off, got '{other}'")),
    }
}

fn main() {
    env_logger::init();
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(1);
        }
    };
    match run_main(args) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}

fn load_instance(path: &PathBuf, time_scale: i64) -> anyhow::Result<Instance> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut inst = vrptw_cg::instance::parse_solomon(&text, time_scale)
        .with_context(|| format!("parsing {}", path.display()))?;
    if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
        inst.id = stem.to_string();
    }
    Ok(inst.normalize())
}

fn run_main(args: Args) -> anyhow::Result<i32> {
    let backend_name = std::env::var("VRPTW_CG_BACKEND").unwrap_or_else(|_| args.backend.clone());
    let backend: BackendKind = backend_name.parse().map_err(|e: String| anyhow::anyhow!(e))?;
    let base = SolveConfig {
        mode: args.mode,
        la_neighbors: args.la_neighbors,
        alpha: args.alpha,
        epsilon: args.epsilon,
        max_seconds: args.max_seconds,
        prune: args.prune,
        backend,
        trace_path: args.trace.clone(),
        ilp_max_seconds: args.ilp_max_seconds,
    };

    if let Some(dump) = &args.dump_instance {
        let inst = load_instance(&args.instances[0], args.time_scale)?;
        std::fs::write(dump, inst.to_json_string()?)?;
        return Ok(0);
    }

    if args.sweep {
        let instances: Vec<Instance> = args
            .instances
            .iter()
            .map(|p| load_instance(p, args.time_scale))
            .collect::<anyhow::Result<_>>()?;
        let modes: Vec<Mode> = args
            .modes
            .split(',')
            .map(|m| m.trim().parse().map_err(|e: String| anyhow::anyhow!(e)))
            .collect::<anyhow::Result<_>>()?;
        let k_list: Vec<usize> = args
            .k_list
            .split(',')
            .map(|k| k.trim().parse().context("bad k"))
            .collect::<anyhow::Result<_>>()?;
        let reports = sweep(&instances, &modes, &k_list, &base, args.jobs);
        emit(&reports, &args.out)?;
        let all_ok = reports.iter().all(|r| r.converged && r.error.is_none());
        let any_limit = reports.iter().any(|r| r.hit_time_limit);
        return Ok(if all_ok {
            0
        } else if any_limit {
            2
        } else {
            1
        });
    }

    if args.instances.len() != 1 {
        bail!("exactly one --instance expected without --sweep");
    }
    let inst = load_instance(&args.instances[0], args.time_scale)?;
    if args.oracle_check && inst.n() > 8 {
        bail!("--oracle-check supports at most 8 customers (got {})", inst.n());
    }
    let mut report = run(&inst, &base)?;
    if args.oracle_check {
        let resolved = Backend::resolve(backend, inst.n());
        let oracle = enumeration_lp_objective(&inst, resolved)?;
        report.oracle_objective = Some(oracle);
        let diff = (report.lp_objective - oracle).abs();
        eprintln!("oracle-check: lp={} enumeration={} |diff|={}", report.lp_objective, oracle, diff);
        if diff > 1e-6 * (1.0 + oracle.abs()) {
            emit(std::slice::from_ref(&report), &args.out)?;
            bail!("oracle check failed: lp objective {} != enumeration LP {}", report.lp_objective, oracle);
        }
    }
    emit(std::slice::from_ref(&report), &args.out)?;
    Ok(if report.converged {
        0
    } else if report.hit_time_limit {
        2
    } else {
        1
    })
}

/// Print reports as JSON lines on stdout; mirror to --out (JSON, or CSV
/// append when the path ends in .csv).
fn emit(reports: &[RunReport], out: &Option<PathBuf>) -> anyhow::Result<()> {
    for r in reports {
        println!("{}", serde_json::to_string(r)?);
    }
    if let Some(path) = out {
        if path.extension().and_then(|e| e.to_str()) == Some("csv") {
            use std::io::Write;
            let fresh = !path.exists();
            let mut f = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
            if fresh {
                writeln!(f, "{}", RunReport::CSV_HEADER)?;
            }
            for r in reports {
                writeln!(f, "{}", r.csv_row())?;
            }
        } else if reports.len() == 1 {
            std::fs::write(path, serde_json::to_string_pretty(&reports[0])?)?;
        } else {
            std::fs::write(path, serde_json::to_string_pretty(reports)?)?;
        }
    }
    Ok(())
}
