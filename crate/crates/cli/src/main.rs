use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use vrpsc::bench::{aggregate, read_details, read_reference, run_bench, BenchReport, Manifest, Reference};
use vrpsc::instance::{parse_vrptw, read_instance, transform, write_instance, TransformOptions};
use vrpsc::search::{run, write_trace, SearchConfig};
use vrpsc::solution::{read_solution, validate, write_solution, SolutionMeta};
use vrpsc::temporal::{LpModel, TemporalProblem};
use vrpsc::InstanceF64;

#[derive(Parser)]
#[command(name = "vrpsc", version, about = "Vehicle routing with synchronization constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Turn a Solomon/Homberger file into a synchronized instance.
    Transform(TransformArgs),
    /// Solve one instance.
    Solve(SolveArgs),
    /// Run a benchmark manifest.
    Bench(BenchArgs),
    /// Check a solution file against its instance.
    Validate(ValidateArgs),
    /// Rebuild class tables from a details file.
    Report(ReportArgs),
}

#[derive(Args)]
struct TransformArgs {
    input: PathBuf,
    #[arg(short, long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    ns: f64,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long, default_value_t = 10.0)]
    beta: f64,
    /// Keep only the first N customers.
    #[arg(long)]
    customers: Option<usize>,
    /// Truncate travel times to one decimal.
    #[arg(long)]
    truncate: bool,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(short, long)]
    out: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    iterations: Option<u64>,
    /// Trace file; defaults to the output path with a .trace.jsonl suffix.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Also write the temporal system of the final solution as an LP file.
    #[arg(long)]
    dump_lp: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    manifest: PathBuf,
    /// Output directory for report.json, classes.csv, details.csv and series.csv.
    #[arg(short, long)]
    out: PathBuf,
    #[arg(long)]
    workers: Option<usize>,
    /// Overrides the manifest reference file.
    #[arg(long)]
    reference: Option<PathBuf>,
    #[arg(long)]
    iterations: Option<u64>,
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct ValidateArgs {
    instance: PathBuf,
    solution: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    details: PathBuf,
    #[arg(short, long)]
    out: PathBuf,
    #[arg(long)]
    reference: Option<PathBuf>,
}

fn load_instance(path: &Path) -> Result<InstanceF64> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    read_instance(&text).with_context(|| format!("parsing {}", path.display()))
}

fn cmd_transform(a: TransformArgs) -> Result<()> {
    let text = fs::read_to_string(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let raw = parse_vrptw(&text).with_context(|| format!("parsing {}", a.input.display()))?;
    let opts = TransformOptions {
        ns: a.ns,
        alpha: a.alpha,
        beta: a.beta,
        customers: a.customers,
        truncate_distances: a.truncate,
        ..TransformOptions::default()
    };
    let inst: InstanceF64 = transform(&raw, &opts)?;
    fs::write(&a.out, write_instance(&inst)).with_context(|| format!("writing {}", a.out.display()))?;
    eprintln!(
        "{}: {} customers, {} special",
        inst.name(),
        inst.customer_count(),
        inst.special_count()
    );
    Ok(())
}

fn cmd_solve(a: SolveArgs) -> Result<()> {
    let inst = load_instance(&a.instance)?;
    let mut cfg = match &a.config {
        Some(p) => SearchConfig::from_toml(&fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)
            .with_context(|| format!("parsing {}", p.display()))?,
        None => SearchConfig::default(),
    };
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(n) = a.iterations {
        cfg.iterations = n;
    }
    let res = run(&inst, &cfg)?;
    let violations = validate(&inst, &res.best);
    if !violations.is_empty() {
        for v in &violations {
            eprintln!("{v}");
        }
        bail!("internal error: the best solution fails validation");
    }
    let meta = SolutionMeta {
        seed: cfg.seed,
        iterations: cfg.iterations,
    };
    fs::write(&a.out, write_solution(&inst, &res.best, &meta)).with_context(|| format!("writing {}", a.out.display()))?;
    let trace_path = a.trace.unwrap_or_else(|| {
        let mut p = a.out.clone().into_os_string();
        p.push(".trace.jsonl");
        p.into()
    });
    let mut w = std::io::BufWriter::new(fs::File::create(&trace_path).with_context(|| format!("writing {}", trace_path.display()))?);
    write_trace(&mut w, &res.trace)?;
    w.flush()?;
    if let Some(p) = a.dump_lp {
        let problem = TemporalProblem::from_paths(&inst, res.best.routes.iter().map(|r| (r.class, r.path.as_slice())))?;
        fs::write(&p, problem.to_lp_text(&LpModel::Feasibility)).with_context(|| format!("writing {}", p.display()))?;
    }
    println!("initial {:.4} best {:.4}", res.initial.cost, res.best.cost);
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> Result<()> {
    let mut manifest = Manifest::load(&a.manifest)?;
    let base = a.manifest.parent().unwrap_or(Path::new(".")).to_path_buf();
    if let Some(n) = a.iterations {
        manifest.config.iterations = n;
    }
    if let Some(r) = &a.reference {
        manifest.reference = Some(std::path::absolute(r)?);
    }
    let quiet = a.quiet;
    let report = run_bench(&manifest, &base, a.workers, &|row| {
        if quiet {
            return;
        }
        match (&row.error, row.final_cost) {
            (Some(e), _) => eprintln!("{} seed {}: {e}", row.instance, row.seed),
            (None, Some(f)) => eprintln!("{} seed {}: {f:.4}", row.instance, row.seed),
            _ => {}
        }
    })?;
    report.write_to(&a.out)?;
    print_classes(&report);
    Ok(())
}

fn print_classes(report: &BenchReport) {
    println!("size class sync runs initial final runtime imp% gap%");
    for c in &report.classes {
        let gap = c.gap_pct.map_or("-".to_string(), |g| format!("{g:.2}"));
        println!(
            "{} {} {} {} {:.2} {:.2} {:.1} {:.2} {gap}",
            c.size, c.class, c.sync, c.runs, c.initial, c.final_cost, c.runtime, c.imp_pct
        );
    }
}

fn cmd_validate(a: ValidateArgs) -> Result<bool> {
    let inst = load_instance(&a.instance)?;
    let text = fs::read_to_string(&a.solution).with_context(|| format!("reading {}", a.solution.display()))?;
    let (sol, _) = read_solution(&inst, &text).with_context(|| format!("parsing {}", a.solution.display()))?;
    let violations = validate(&inst, &sol);
    for v in &violations {
        println!("{v}");
    }
    if violations.is_empty() {
        println!("ok: cost {:.4}", sol.cost);
    }
    Ok(violations.is_empty())
}

fn cmd_report(a: ReportArgs) -> Result<()> {
    let details = read_details(&a.details)?;
    let reference = match &a.reference {
        Some(p) => read_reference(p)?,
        None => Reference::new(),
    };
    let mut seeds: Vec<u64> = details.iter().map(|d| d.seed).collect();
    seeds.sort_unstable();
    seeds.dedup();
    let report = BenchReport {
        name: "report".into(),
        seeds,
        classes: aggregate(&details, &reference),
        details,
    };
    report.write_to(&a.out)?;
    print_classes(&report);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Transform(a) => cmd_transform(a).map(|_| true),
        Command::Solve(a) => cmd_solve(a).map(|_| true),
        Command::Bench(a) => cmd_bench(a).map(|_| true),
        Command::Validate(a) => cmd_validate(a),
        Command::Report(a) => cmd_report(a).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
