//! Command-line surface: verification suites, spectra, stability and
//! isoperimetry experiments, and the table cache.

pub mod checks;
pub mod report;

use std::io::Write;
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::arith::{odd_double_factorial, to_f64};
use crate::cache::{Cache, CacheStatus};
use crate::error::{Error, Result};
use crate::families::{containment_check, greedy_maximal_intersecting, h_family, key_lemma_scan, KeyLemmaParams, Projector};
use crate::graphs::{GraphKind, MatchingGraph};
use crate::isoperimetry::verify_mcdiarmid;
use crate::matchings::{derangement_count_recurrence, MatchingSpace};
use crate::mis::extremal_families;
use crate::partitions::Partition;
use crate::spherical::zonal_eigenvalue;
use checks::{registry, Ctx, Outcome};
pub use report::{Format, Report, Status, Table};

pub const DEFAULT_CACHE_DIR: &str = ".matching-scheme-cache";

/// Inclusive range of `n`, written `4` or `3..6`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NRange(pub RangeInclusive<usize>);

impl FromStr for NRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let bad = || format!("expected N or A..B, got {s:?}");
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        let range = match s.split_once("..") {
            Some((a, b)) => parse(a)?..=parse(b.trim_start_matches('='))?,
            None => {
                let v = parse(s)?;
                v..=v
            }
        };
        if range.is_empty() {
            return Err(bad());
        }
        Ok(NRange(range))
    }
}

#[derive(Debug, Parser)]
#[command(name = "matching-scheme", version, about = "Exact computations on the perfect-matching association scheme of K_2n")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, value_enum, default_value = "text", global = true)]
    pub format: Format,
    /// Directory for cached character and scheme tables.
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    pub parallelism: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// A single n or an inclusive range A..B.
    #[arg(long = "n", visible_alias = "range")]
    pub n: Option<NRange>,
    /// Shorthand for --n 2..MAX.
    #[arg(long)]
    pub max_n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Comma-separated check names.
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<String>,
}

impl RunArgs {
    fn requested(&self) -> Option<RangeInclusive<usize>> {
        match (&self.n, self.max_n) {
            (Some(r), _) => Some(r.0.clone()),
            (None, Some(m)) => Some(2.min(m)..=m),
            (None, None) => None,
        }
    }

    fn range_or(&self, default: RangeInclusive<usize>) -> RangeInclusive<usize> {
        self.requested().unwrap_or(default)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CacheAction {
    Build,
    Inspect,
    Clear,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalue table of the derangement graph with identity checks.
    Spectrum(RunArgs),
    /// Run the verification suite.
    Verify(RunArgs),
    /// Maximum intersecting families and near-extremal diagnostics.
    Stability {
        #[command(flatten)]
        run: RunArgs,
        /// Margin ε in the size threshold (1 - 1/sqrt(e) + ε)(2n-3)!!.
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
    },
    /// Partition sequences and the McDiarmid neighbourhood bound.
    Isoperimetry(RunArgs),
    /// Build, inspect or clear the table cache.
    Cache {
        #[arg(value_enum)]
        action: CacheAction,
        #[command(flatten)]
        run: RunArgs,
    },
}

/// Parses the process arguments, runs, and returns the exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    run(cli, &mut out)
}

pub fn run<W: Write>(cli: Cli, out: &mut W) -> i32 {
    if let Some(k) = cli.parallelism {
        // fails only if a pool already exists, in which case it is reused
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build_global();
    }
    let mut report = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let code = report.finish();
    if let Err(e) = report.render(cli.format, out) {
        eprintln!("error: {e}");
        return 1;
    }
    code
}

fn ctx(cli: &Cli, run: &RunArgs) -> Ctx {
    Ctx {
        seed: run.seed,
        trials: run.trials,
        cache: cli.cache_dir.clone().map(Cache::new),
    }
}

fn execute(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Spectrum(run) => spectrum(&ctx(cli, run), run),
        Command::Verify(run) => verify(&ctx(cli, run), run),
        Command::Stability { run, epsilon } => stability(&ctx(cli, run), run, *epsilon),
        Command::Isoperimetry(run) => isoperimetry(&ctx(cli, run), run),
        Command::Cache { action, run } => cache(cli, *action, run),
    }
}

fn record(report: &mut Report, name: &str, statement: &str, n: Option<usize>, outcome: Outcome) {
    let (status, detail) = match outcome {
        Ok((ok, detail)) => (Status::from_bool(ok), detail),
        Err(Error::NotApplicable(why)) => (Status::Skipped, why),
        Err(e) => (Status::Fail, e.to_string()),
    };
    report.check(name, statement, n, status, detail);
}

fn find_check(name: &str) -> checks::CheckSpec {
    registry()
        .into_iter()
        .find(|s| s.name == name)
        .expect("registered check")
}

fn run_named(report: &mut Report, ctx: &Ctx, name: &str, n: usize) {
    let spec = find_check(name);
    record(report, spec.name, spec.statement, Some(n), (spec.run)(ctx, n));
}

fn common_params(report: &mut Report, run: &RunArgs, range: &RangeInclusive<usize>) {
    report.param("n", format!("{}..{}", range.start(), range.end()));
    report.param("seed", run.seed);
    report.param("trials", run.trials);
}

fn verify(ctx: &Ctx, run: &RunArgs) -> Result<Report> {
    let mut report = Report::new("verify");
    let requested = run.requested();
    let specs = registry();
    for name in &run.only {
        if !specs.iter().any(|s| s.name == name) {
            return Err(Error::InvalidArgument(format!("unknown check {name:?}")));
        }
    }
    report.param(
        "n",
        requested.as_ref().map_or("default".to_string(), |r| format!("{}..{}", r.start(), r.end())),
    );
    report.param("seed", run.seed);
    report.param("trials", run.trials);
    if !run.only.is_empty() {
        report.param("only", run.only.join(","));
    }
    for spec in specs {
        let explicit = run.only.iter().any(|o| o == spec.name);
        if !run.only.is_empty() && !explicit {
            continue;
        }
        let Some(supported) = &spec.supported else {
            record(&mut report, spec.name, spec.statement, None, (spec.run)(ctx, 0));
            continue;
        };
        let range = match &requested {
            Some(r) => (*r.start()).max(*supported.start())..=(*r.end()).min(*supported.end()),
            None => spec.default.clone(),
        };
        if range.is_empty() {
            if explicit {
                report.check(
                    spec.name,
                    spec.statement,
                    None,
                    Status::Skipped,
                    format!("supported for {}..{} only", supported.start(), supported.end()),
                );
            }
            continue;
        }
        for n in range {
            record(&mut report, spec.name, spec.statement, Some(n), (spec.run)(ctx, n));
        }
    }
    Ok(report)
}

/// Largest `n` for the exact table; beyond it only the zonal eigenvalue is
/// computed.
const SPECTRUM_TABLE_MAX_N: usize = 6;
const SPECTRUM_ZONAL_MAX_N: usize = 12;

fn spectrum(ctx: &Ctx, run: &RunArgs) -> Result<Report> {
    let range = run.range_or(2..=SPECTRUM_TABLE_MAX_N);
    let mut report = Report::new("spectrum");
    report.param("n", format!("{}..{}", range.start(), range.end()));
    let mut table = Table::new("spectrum", &["n", "mu", "eta", "multiplicity", "mode"]);
    for n in range {
        if n < 2 {
            report.check("spectrum", "derangement graph spectrum", Some(n), Status::Skipped, "needs n >= 2");
        } else if n <= SPECTRUM_TABLE_MAX_N {
            let t = ctx.table(n)?;
            for (mu, eta, mult) in t.spectrum() {
                table.push(vec![n.into(), mu.to_string().into(), eta.to_string().into(), mult.to_string().into(), "exact".into()]);
            }
            run_named(&mut report, ctx, "eigenvalues", n);
            run_named(&mut report, ctx, "trace", n);
            if n <= 5 {
                run_named(&mut report, ctx, "dense-spectrum", n);
            }
        } else if n <= SPECTRUM_ZONAL_MAX_N {
            let top = Partition::row(n);
            let hook = Partition::hook_n_minus_one(n)?;
            let d = derangement_count_recurrence(n);
            table.push(vec![n.into(), top.to_string().into(), d.to_string().into(), top.double().dimension().to_string().into(), "zonal".into()]);
            table.push(vec![
                n.into(),
                hook.to_string().into(),
                zonal_eigenvalue(n)?.to_string().into(),
                hook.double().dimension().to_string().into(),
                "zonal".into(),
            ]);
            run_named(&mut report, ctx, "zonal-eigenvalue", n);
        } else {
            report.check(
                "spectrum",
                "derangement graph spectrum",
                Some(n),
                Status::Skipped,
                format!("supported for n <= {SPECTRUM_ZONAL_MAX_N}"),
            );
        }
    }
    report.tables.push(table);
    Ok(report)
}

fn stability(ctx: &Ctx, run: &RunArgs, epsilon: f64) -> Result<Report> {
    let range = run.range_or(3..=5);
    let mut report = Report::new("stability");
    common_params(&mut report, run, &range);
    report.param("epsilon", epsilon);
    let mut extremal_table = Table::new("extremal", &["n", "ratio_bound", "maximum_size", "count", "canonical", "search_nodes"]);
    let mut families = Table::new(
        "families",
        &[
            "n", "family", "size", "large", "edge", "residue", "residue_scale", "contained_in", "distance_sq",
            "stability_bound", "f1_size", "f0_size",
        ],
    );
    for n in range {
        if !(2..=5).contains(&n) {
            report.check("stability", "extremal and near-extremal families", Some(n), Status::Skipped, "supported for 2..5");
            continue;
        }
        let space = MatchingSpace::new(n)?;
        let table = ctx.table(n)?;
        if n <= 4 {
            let (r, _) = extremal_families(&MatchingGraph::new(&space, GraphKind::Derangement), &table)?;
            extremal_table.push(vec![
                n.into(),
                r.ratio_bound.clone().into(),
                r.maximum_size.into(),
                r.count.into(),
                r.canonical.into(),
                r.search_nodes.into(),
            ]);
            run_named(&mut report, ctx, "extremal", n);
        }
        if n < 3 {
            continue;
        }
        let projector = Projector::new(&space, &table)?;
        let threshold = (1.0 - (-0.5f64).exp() + epsilon) * to_f64(&crate::arith::int_rational(odd_double_factorial(n - 1)));
        let mut rng = {
            use rand::SeedableRng;
            let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(run.seed);
            r.set_stream(600 + n as u64);
            r
        };
        let mut candidates = vec![("h_family".to_string(), h_family(&space)?)];
        for k in 0..run.trials {
            candidates.push((format!("greedy{k}"), greedy_maximal_intersecting(&space, &mut rng)));
        }
        let mut outside = 0;
        let mut h_contained = None;
        for (label, f) in &candidates {
            let scan = key_lemma_scan(&projector, f, &KeyLemmaParams::default())?;
            let contained = containment_check(&space, f)?.edge;
            if label == "h_family" {
                h_contained = Some(contained);
            }
            if scan.within_bound == Some(false) {
                outside += 1;
            }
            families.push(vec![
                n.into(),
                label.clone().into(),
                scan.size.into(),
                (scan.size as f64 >= threshold).into(),
                format!("{}-{}", scan.edge.0, scan.edge.1).into(),
                scan.residue.into(),
                scan.residue_scale.clone().into(),
                contained.map_or(Value::Null, |(i, j)| format!("{i}-{j}").into()),
                scan.distance_sq.clone().into(),
                scan.stability_bound.clone().map_or(Value::Null, Value::from),
                scan.f1_size.into(),
                scan.f0_size.into(),
            ]);
        }
        report.check(
            "stability-bound",
            "D^2 of each scanned family is within the stability bound",
            Some(n),
            Status::from_bool(outside == 0),
            format!("{} families scanned, {outside} outside the bound", candidates.len()),
        );
        let h_edge = h_contained.flatten();
        report.check(
            "h-family-containment",
            "H_12 lies in no canonical family for n >= 4",
            Some(n),
            Status::from_bool(n < 4 || h_edge.is_none()),
            h_edge.map_or("no common edge".to_string(), |(i, j)| format!("common edge {i}-{j}")),
        );
    }
    report.tables.push(extremal_table);
    report.tables.push(families);
    Ok(report)
}

fn isoperimetry(ctx: &Ctx, run: &RunArgs) -> Result<Report> {
    let range = run.range_or(2..=5);
    let mut report = Report::new("isoperimetry");
    common_params(&mut report, run, &range);
    let columns = [
        "n", "trial", "kind", "size", "a", "cost_sum", "h", "h0", "observed_fraction", "bound_fraction", "pass",
    ];
    let mut trials = Table::new("mcdiarmid", &columns);
    for n in range {
        if !(2..=6).contains(&n) {
            report.check("isoperimetry", "transposition graph isoperimetry", Some(n), Status::Skipped, "supported for 2..6");
            continue;
        }
        run_named(&mut report, ctx, "diameter", n);
        if n >= 3 {
            run_named(&mut report, ctx, "blocks", n);
        }
        run_named(&mut report, ctx, "partition-sequence", n);
        let spec = find_check("mcdiarmid");
        let outcome = verify_mcdiarmid(&MatchingSpace::new(n)?, run.trials, run.seed).map(|r| {
            for rec in &r.records {
                let mut v = serde_json::to_value(rec).unwrap_or(Value::Null);
                v["n"] = n.into();
                trials.push(columns.iter().map(|c| v.get(*c).cloned().unwrap_or(Value::Null)).collect());
            }
            (r.passed, format!("{} records, {} violations", r.records.len(), r.violations))
        });
        record(&mut report, spec.name, spec.statement, Some(n), outcome);
    }
    report.tables.push(trials);
    Ok(report)
}

fn cache(cli: &Cli, action: CacheAction, run: &RunArgs) -> Result<Report> {
    let dir = cli.cache_dir.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR));
    let cache = Cache::new(&dir);
    let mut report = Report::new("cache");
    report.param("cache_dir", dir.display());
    match action {
        CacheAction::Build => {
            let range = run.range_or(2..=5);
            report.param("n", format!("{}..{}", range.start(), range.end()));
            let ns: Vec<usize> = range.collect();
            let mut table = Table::new("built", &["file", "status", "reason"]);
            for (file, status) in cache.build(&ns)? {
                let (label, reason) = match &status {
                    CacheStatus::Loaded => ("loaded", None),
                    CacheStatus::Built => ("built", None),
                    CacheStatus::Rebuilt(why) => {
                        eprintln!("warning: rebuilt {file}: {why}");
                        ("rebuilt", Some(why.clone()))
                    }
                };
                table.push(vec![file.into(), label.into(), reason.map_or(Value::Null, Value::from)]);
            }
            report.tables.push(table);
        }
        CacheAction::Inspect => {
            let mut table = Table::new("files", &["file", "rows", "expected_rows", "valid", "problem"]);
            for e in cache.inspect()? {
                report.check(
                    "cache-file",
                    "cached table parses and has p(k)^2 rows",
                    None,
                    Status::from_bool(e.valid && e.rows == e.expected_rows),
                    e.file.clone(),
                );
                table.push(vec![
                    e.file.into(),
                    e.rows.into(),
                    e.expected_rows.into(),
                    e.valid.into(),
                    e.problem.map_or(Value::Null, Value::from),
                ]);
            }
            report.tables.push(table);
        }
        CacheAction::Clear => {
            report.param("removed", cache.clear()?);
        }
    }
    Ok(report)
}
