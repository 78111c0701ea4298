use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use biact::netgraph::{NetGraph, WeightFormat};
use biact::oracle::{builtin, SharedOracle};
use biact::rates::{fit_rate, rate_experiment, write_csv, RateConfig};
use biact::sampling::{sup_error, Approximant, Domain, SamplerConfig};
use biact::synthesis::{
    synthesize_analytic, synthesize_single_subspace, synthesize_sobolev, synthesize_union, Regime,
    SynthesisOptions, SynthesisReport, UnionNet,
};
use biact::SafetyCap;

/// Exit status when a measured error exceeds the certified bound.
const EXIT_VIOLATION: u8 = 2;

/// Slack allowed on top of the theoretical bound.
const BOUND_SLACK: f64 = 1e-9;

#[derive(Parser)]
#[command(name = "biact", version, about = "Synthesize and check ReLU/square networks for localized Taylor approximants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a network and its report.
    Synthesize(SynthesizeArgs),
    /// Evaluate a network at points.
    Evaluate(EvaluateArgs),
    /// Estimate the sup error of a network against an oracle.
    Verify(VerifyArgs),
    /// Sweep accuracy targets and write a CSV.
    Rates(RatesArgs),
    /// Run the built-in invariant checks.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args, Clone)]
struct ProblemArgs {
    #[arg(long, default_value = "sobolev")]
    regime: Regime,
    /// Ambient dimension.
    #[arg(long)]
    d: usize,
    /// Smoothness order; the analytic regime chooses its own.
    #[arg(long, default_value_t = 2)]
    n: u32,
    #[arg(long)]
    d_eff: Option<usize>,
    /// 0-based coordinate subset for single_subspace, e.g. `0,2`.
    #[arg(long, value_delimiter = ',')]
    subset: Option<Vec<usize>>,
    /// Builtin oracle name.
    #[arg(long)]
    oracle: String,
    /// Build a separate copy of every factor for each term.
    #[arg(long)]
    no_share: bool,
}

impl ProblemArgs {
    fn oracle(&self) -> Result<SharedOracle> {
        Ok(builtin(&self.oracle, self.d, self.n)?)
    }

    fn options(&self) -> SynthesisOptions {
        SynthesisOptions {
            cap: SafetyCap::from_env(),
            share_factors: !self.no_share,
        }
    }

    fn d_eff(&self) -> Result<usize> {
        self.d_eff.ok_or_else(|| anyhow!("--d-eff is required for the union_subspaces regime"))
    }

    fn subset(&self) -> Result<&[usize]> {
        self.subset
            .as_deref()
            .ok_or_else(|| anyhow!("--subset is required for the single_subspace regime"))
    }
}

#[derive(Args)]
struct SynthesizeArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value = "network.json")]
    out: PathBuf,
    #[arg(long, default_value = "report.json")]
    report: PathBuf,
    /// Write weights as hexadecimal floats.
    #[arg(long)]
    hex: bool,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    net: PathBuf,
    /// Comma-separated coordinates.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "points_file")]
    point: Option<Vec<f64>>,
    /// One point per line, coordinates separated by commas or whitespace.
    #[arg(long)]
    points_file: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    net: PathBuf,
    /// Report written by `synthesize`; defaults to `report.json` next to
    /// the network.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Oracle name; defaults to the one recorded in the report.
    #[arg(long)]
    oracle: Option<String>,
    #[arg(long, default_value_t = 20_000)]
    budget: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct RatesArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    eps_list: Vec<f64>,
    #[arg(long, default_value = "rates.csv")]
    out: PathBuf,
    /// Sup-error samples per run; 0 skips measurement.
    #[arg(long, default_value_t = 5000)]
    budget: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

/// A single network or a routed collection.
enum Model {
    Single(NetGraph),
    Union(UnionNet),
}

impl Model {
    fn read(path: &Path) -> Result<Model> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let value: serde_json::Value =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let model = if value.get("networks").is_some() {
            Model::Union(UnionNet::from_json_value(value)?)
        } else {
            Model::Single(NetGraph::from_json_value(value)?)
        };
        Ok(model)
    }

    fn approximant(&self) -> &dyn Approximant {
        match self {
            Model::Single(g) => g,
            Model::Union(u) => u,
        }
    }
}

fn write_report(path: &Path, report: &SynthesisReport) -> Result<()> {
    std::fs::write(path, report.to_json()).with_context(|| format!("writing {}", path.display()))
}

fn synthesize(args: SynthesizeArgs) -> Result<()> {
    let p = &args.problem;
    let oracle = p.oracle()?;
    let fmt = if args.hex { WeightFormat::Hex } else { WeightFormat::Decimal };
    let report = match p.regime {
        Regime::UnionSubspaces => {
            let u = synthesize_union(&oracle, p.d_eff()?, args.epsilon, p.n, p.options())?;
            u.net.write_json(&args.out, fmt)?;
            u.report
        }
        regime => {
            let s = match regime {
                Regime::Sobolev => synthesize_sobolev(oracle.as_ref(), args.epsilon, p.n, p.options())?,
                Regime::Analytic => synthesize_analytic(oracle.as_ref(), args.epsilon, p.options())?,
                _ => synthesize_single_subspace(&oracle, p.subset()?, args.epsilon, p.n, p.options())?,
            };
            s.network.write_json(&args.out, fmt)?;
            s.report
        }
    };
    write_report(&args.report, &report)?;
    let c = &report.complexity;
    println!(
        "{} d={} n={} N={} params={} nodes={} depth={} bound={:.3e}",
        report.regime, report.d, report.n, report.resolution, c.total_parameters, c.num_nodes, c.depth,
        report.theoretical_bound
    );
    for flag in &report.flags {
        eprintln!("note: {flag}");
    }
    Ok(())
}

fn parse_points(text: &str) -> Result<Vec<Vec<f64>>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| {
            l.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<f64>().with_context(|| format!("line {}: bad number {t:?}", i + 1)))
                .collect()
        })
        .collect()
}

fn evaluate(args: EvaluateArgs) -> Result<()> {
    let model = Model::read(&args.net)?;
    let points = match (args.point, args.points_file) {
        (Some(p), None) => vec![p],
        (None, Some(path)) => {
            parse_points(&std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?)?
        }
        _ => bail!("give exactly one of --point or --points-file"),
    };
    for v in model.approximant().eval_many(&points)? {
        println!("{v:e}");
    }
    Ok(())
}

fn verify(args: VerifyArgs) -> Result<ExitCode> {
    let report_path = args
        .report
        .unwrap_or_else(|| args.net.with_file_name("report.json"));
    let text = std::fs::read_to_string(&report_path).with_context(|| format!("reading {}", report_path.display()))?;
    let report: SynthesisReport =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", report_path.display()))?;
    let name = args.oracle.unwrap_or_else(|| report.oracle.clone());
    let oracle = builtin(&name, report.d, report.n)?;
    let model = Model::read(&args.net)?;
    let domain = match &report.subsets {
        Some(subsets) => Domain::Subspaces { d: report.d, subsets: subsets.clone() },
        None => Domain::Cube(report.d),
    };
    let cfg = SamplerConfig { budget: args.budget, seed: args.seed, resolution: report.resolution };
    let est = sup_error(model.approximant(), oracle.as_ref(), &domain, cfg)?;
    let passed = est.sup_error <= report.theoretical_bound + BOUND_SLACK;
    let summary = serde_json::json!({
        "measured_sup_error": est.sup_error,
        "theoretical_bound": report.theoretical_bound,
        "epsilon": report.epsilon,
        "argmax_point": est.argmax_point,
        "num_samples": est.num_samples,
        "sampler": est.sampler,
        "seed": est.seed,
        "passed": passed,
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(EXIT_VIOLATION) })
}

fn rates(args: RatesArgs) -> Result<ExitCode> {
    let p = &args.problem;
    let cfg = RateConfig {
        oracle: p.oracle()?,
        regime: p.regime,
        n: p.n,
        d_eff: p.d_eff,
        subset: p.subset.clone(),
        eps_list: args.eps_list.clone(),
        budget: args.budget,
        seed: args.seed,
        opts: p.options(),
    };
    let rows = rate_experiment(&cfg)?;
    let file = File::create(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    write_csv(&rows, file)?;
    for r in rows.iter().filter(|r| !r.feasible()) {
        eprintln!("eps={}: {}", r.epsilon, r.note);
    }
    if let Some(fit) = fit_rate(&rows) {
        println!(
            "slope {:.4} (intercept {:.4}, r2 {:.4}, {} points) -> {}",
            fit.slope,
            fit.intercept,
            fit.r_squared,
            fit.points,
            args.out.display()
        );
    }
    let violated = rows.iter().any(|r| match (r.measured_sup_error, r.theoretical_bound) {
        (Some(m), Some(b)) => m > b + BOUND_SLACK,
        _ => false,
    });
    Ok(if violated { ExitCode::from(EXIT_VIOLATION) } else { ExitCode::SUCCESS })
}

fn selftest(seed: u64) -> ExitCode {
    let checks = biact::selftest::run(seed);
    let mut ok = true;
    for c in &checks {
        ok &= c.passed;
        println!("{} {} {}", if c.passed { "pass" } else { "FAIL" }, c.name, c.detail);
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Synthesize(a) => synthesize(a).map(|_| ExitCode::SUCCESS),
        Command::Evaluate(a) => evaluate(a).map(|_| ExitCode::SUCCESS),
        Command::Verify(a) => verify(a),
        Command::Rates(a) => rates(a),
        Command::Selftest { seed } => Ok(selftest(seed)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::FAILURE } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
