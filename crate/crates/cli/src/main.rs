mod config;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use satake::bounds::{
    positivity_threshold, sweep, sweep_csv, theorem_bound, Character, DensityReport, Theorem,
    TheoremOptions, TypeT,
};
use satake::ingest::{
    compare_bounds, empirical_density_with_tol, fetch_remote, load_records, FetchOptions,
    FieldMapping, EPS_STAT, MEMBERSHIP_TOL,
};
use satake::lifts::{lift, LiftKind};
use satake::verify::{
    verify_case_inequality, verify_exhaustive, verify_lift_identities, VerificationReport,
};
use satake::{classify, CaseLabel, ClassFile, Mode, Scalar, CLASSIFY_TOL};
use serde::Serialize;
use serde_json::json;

use config::Config;

const EXIT_DOMAIN: u8 = 1;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "satake",
    version,
    about = "Satake class classification, lifts and density bounds"
)]
struct Cli {
    /// Defaults as `key = value` lines; flags override them.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    output: Option<Output>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Table,
    Csv,
}

impl FromStr for Output {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        <Output as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Ext2,
    Sym2,
    Adjoint,
    Tensor,
    AiSplit,
    AiInert,
    AsaiSplit,
}

impl From<Kind> for LiftKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Ext2 => LiftKind::Ext2,
            Kind::Sym2 => LiftKind::Sym2,
            Kind::Adjoint => LiftKind::Adjoint,
            Kind::Tensor => LiftKind::Tensor,
            Kind::AiSplit => LiftKind::AISplit,
            Kind::AiInert => LiftKind::AIInert,
            Kind::AsaiSplit => LiftKind::AsaiSplit,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Inequality,
    Exhaustive,
    Lifts,
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        <Suite as ValueEnum>::from_str(s, true)
    }
}

/// `re,im`
#[derive(Debug, Clone, Copy)]
struct Complex(Scalar);

impl FromStr for Complex {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (re, im) = s
            .split_once(',')
            .ok_or_else(|| format!("expected re,im, got {s:?}"))?;
        let re: f64 = re.trim().parse().map_err(|e| format!("{e}"))?;
        let im: f64 = im.trim().parse().map_err(|e| format!("{e}"))?;
        Ok(Complex(Scalar::new(re, im)))
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify a class read from a JSON file.
    Classify(ClassifyArgs),
    /// Apply a lift to one or two classes.
    Lift(LiftArgs),
    /// Density lower bound of a theorem.
    Bounds(BoundsArgs),
    /// Tabulate a bound over a grid of r.
    Sweep(SweepArgs),
    /// Run a randomized verification suite.
    Verify(VerifyArgs),
    /// Empirical proportions from exported records, or fetch records from a server.
    Ingest(IngestArgs),
    /// All theorem bounds at one r, with positivity thresholds.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long)]
    input: Option<PathBuf>,
    /// Twist character; overrides the file's `eta`.
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<Complex>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args, Debug)]
struct LiftArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Input class files, one per lift argument.
    #[arg(long, required = true)]
    input: Vec<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct TheoremArgs {
    #[arg(long)]
    theorem: Option<Theorem>,
    #[arg(long)]
    c: Option<u8>,
    #[arg(long)]
    character: Option<Character>,
    /// Type (T) subtype: asai_dihedral, ai, tensor or overall.
    #[arg(long)]
    subtype: Option<TypeT>,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[command(flatten)]
    theorem: TheoremArgs,
    #[arg(long)]
    r: Option<f64>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    theorem: TheoremArgs,
    #[arg(long)]
    r_min: Option<f64>,
    #[arg(long)]
    r_max: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    suite: Option<Suite>,
    /// Case for the inequality suite; all bounded cases when omitted.
    #[arg(long)]
    label: Option<CaseLabel>,
    /// Mode for the exhaustiveness suite; all modes when omitted.
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct IngestArgs {
    /// JSONL record file to analyse.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    x_max: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    #[command(flatten)]
    theorem: TheoremArgs,
    #[arg(long)]
    eps_stat: Option<f64>,
    /// Fetch records from this endpoint instead of analysing a file.
    #[arg(long)]
    base_url: Option<String>,
    #[arg(long)]
    query: Option<String>,
    #[arg(long)]
    mapping: Option<PathBuf>,
    #[arg(long)]
    limit: Option<usize>,
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReportArgs {
    #[arg(long)]
    r: Option<f64>,
}

/// A command's result: what to print and how the process should exit.
struct Emitted {
    text: String,
    code: u8,
}

impl Emitted {
    fn ok(text: String) -> Self {
        Self { text, code: 0 }
    }
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

fn read_class(path: &PathBuf) -> Result<ClassFile> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    ClassFile::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn theorem_options(args: &TheoremArgs, cfg: &Config) -> Result<TheoremOptions> {
    Ok(TheoremOptions {
        c: cfg.pick_or(args.c, "c", 0)?,
        character: cfg.pick_or(args.character, "character", Character::Trivial)?,
        subtype: cfg.pick_or(args.subtype, "subtype", TypeT::Overall)?,
    })
}

fn theorem_of(args: &TheoremArgs, cfg: &Config) -> Result<Theorem> {
    cfg.pick(args.theorem, "theorem")?
        .ok_or_else(|| anyhow!("--theorem is required"))
}

fn bounds_table(reports: &[DensityReport]) -> String {
    let mut out = format!(
        "{:<18} {:>10} {:>10} {:>12}  {}\n",
        "theorem", "r", "m", "lower_bound", "closed_form"
    );
    for rep in reports {
        out.push_str(&format!(
            "{:<18} {:>10.6} {:>10.6} {:>12.9}  {}\n",
            rep.theorem.as_str(),
            rep.r,
            rep.m,
            rep.lower_bound,
            rep.closed_form
        ));
    }
    out
}

fn run_classify(args: ClassifyArgs, cfg: &Config, out: Output) -> Result<Emitted> {
    let mode: Mode = cfg
        .pick(args.mode, "mode")?
        .ok_or_else(|| anyhow!("--mode is required"))?;
    let input: PathBuf = cfg
        .pick(args.input, "input")?
        .ok_or_else(|| anyhow!("--input is required"))?;
    let tol = cfg.pick_or(args.tol, "tol", CLASSIFY_TOL)?;
    let file = read_class(&input)?;
    let eta = cfg.pick(args.eta, "eta")?.map(|c| c.0).or(file.eta);
    let class = file.to_class()?;
    let res = classify(&class, mode, eta, tol)?;
    Ok(Emitted::ok(match out {
        Output::Table => format!(
            "label     {}\nresidual  {:e}\nwitnesses {}\n",
            res.label,
            res.residual,
            serde_json::to_string(&res.witnesses)?
        ),
        _ => to_json(&res)?,
    }))
}

fn run_lift(args: LiftArgs) -> Result<Emitted> {
    let classes = args
        .input
        .iter()
        .map(|p| read_class(p)?.to_class().map_err(Into::into))
        .collect::<Result<Vec<_>>>()?;
    let lifted = lift(args.kind.into(), &classes)?;
    Ok(Emitted::ok(to_json(&ClassFile::from_class(&lifted, None))?))
}

fn run_bounds(args: BoundsArgs, cfg: &Config, out: Output) -> Result<Emitted> {
    let theorem = theorem_of(&args.theorem, cfg)?;
    let opts = theorem_options(&args.theorem, cfg)?;
    let r = cfg.pick_or(args.r, "r", 1.0)?;
    let subtype_given =
        args.theorem.subtype.is_some() || cfg.pick::<TypeT>(None, "subtype")?.is_some();
    if theorem == Theorem::T3 && !subtype_given {
        let reports = TypeT::ALL
            .into_iter()
            .map(|subtype| theorem_bound(theorem, r, &TheoremOptions { subtype, ..opts }))
            .collect::<satake::Result<Vec<_>>>()?;
        let text = match out {
            Output::Json => {
                let map: serde_json::Map<String, serde_json::Value> = TypeT::ALL
                    .iter()
                    .zip(&reports)
                    .map(|(s, rep)| (s.as_str().to_owned(), json!(rep.lower_bound)))
                    .collect();
                to_json(&map)?
            }
            _ => {
                let mut s = String::from("subtype,lower_bound,closed_form\n");
                for (t, rep) in TypeT::ALL.iter().zip(&reports) {
                    s.push_str(&format!(
                        "{},{},\"{}\"\n",
                        t.as_str(),
                        rep.lower_bound,
                        rep.closed_form
                    ));
                }
                s
            }
        };
        return Ok(Emitted::ok(text));
    }
    let rep = theorem_bound(theorem, r, &opts)?;
    Ok(Emitted::ok(match out {
        Output::Json => to_json(&rep)?,
        Output::Table => bounds_table(std::slice::from_ref(&rep)),
        Output::Csv => sweep_csv(std::slice::from_ref(&rep)),
    }))
}

fn run_sweep(args: SweepArgs, cfg: &Config, out: Option<Output>) -> Result<Emitted> {
    let theorem = theorem_of(&args.theorem, cfg)?;
    let opts = theorem_options(&args.theorem, cfg)?;
    let r_min = cfg.pick_or(args.r_min, "r-min", 1.0)?;
    let r_max = cfg.pick_or(args.r_max, "r-max", 10.0)?;
    let step = cfg.pick_or(args.step, "step", 0.1)?;
    let reports = sweep(theorem, r_min, r_max, step, &opts)?;
    Ok(Emitted::ok(match out.unwrap_or(Output::Csv) {
        Output::Csv => sweep_csv(&reports),
        Output::Table => bounds_table(&reports),
        Output::Json => to_json(&reports)?,
    }))
}

fn run_verify(args: VerifyArgs, cfg: &Config, out: Output) -> Result<Emitted> {
    let suite = cfg.pick_or(args.suite, "suite", Suite::Inequality)?;
    let samples = cfg.pick_or(args.samples, "samples", 10_000)?;
    let seed = cfg.pick_or(args.seed, "seed", 0)?;
    let start = Instant::now();
    let reports: Vec<VerificationReport> = match suite {
        Suite::Inequality => {
            let r = cfg.pick_or(args.r, "r", 2.0)?;
            let labels: Vec<CaseLabel> = match cfg.pick(args.label, "label")? {
                Some(l) => vec![l],
                None => CaseLabel::non_tempered().collect(),
            };
            labels
                .into_iter()
                .map(|l| verify_case_inequality(l, r, samples, seed))
                .collect::<satake::Result<_>>()?
        }
        Suite::Exhaustive => {
            let modes: Vec<Mode> = match cfg.pick(args.mode, "mode")? {
                Some(m) => vec![m],
                None => Mode::ALL.to_vec(),
            };
            modes
                .into_iter()
                .map(|m| verify_exhaustive(m, samples, seed))
                .collect::<satake::Result<_>>()?
        }
        Suite::Lifts => vec![verify_lift_identities(samples, seed)?],
    };
    eprintln!(
        "verify: {} suite(s), {samples} samples each, {:.2?}",
        reports.len(),
        start.elapsed()
    );
    let failed = reports.iter().any(|r| !r.passed());
    let text = match out {
        Output::Json if reports.len() == 1 => to_json(&reports[0])?,
        Output::Json => to_json(&reports)?,
        _ => {
            let mut s = format!(
                "{:<40} {:>8} {:>8} {:>14}\n",
                "suite", "samples", "failures", "worst_margin"
            );
            for r in &reports {
                s.push_str(&format!(
                    "{:<40} {:>8} {:>8} {:>14.6e}\n",
                    r.suite, r.samples, r.failures, r.worst_margin
                ));
            }
            s
        }
    };
    Ok(Emitted {
        text,
        code: if failed { EXIT_VERIFY } else { 0 },
    })
}

fn run_ingest(args: IngestArgs, cfg: &Config, out: Output) -> Result<Emitted> {
    if let Some(base_url) = cfg.pick(args.base_url, "base-url")? {
        let mapping_path: PathBuf = cfg
            .pick(args.mapping, "mapping")?
            .ok_or_else(|| anyhow!("--mapping is required with --base-url"))?;
        let mapping = FieldMapping::load(&mapping_path)
            .with_context(|| format!("reading mapping {}", mapping_path.display()))?;
        let cache_dir = cfg.pick_or(args.cache_dir, "cache-dir", PathBuf::from("cache"))?;
        let limit = cfg.pick_or(args.limit, "limit", 1000)?;
        let query = cfg.pick_or(args.query, "query", String::new())?;
        let records = fetch_remote(
            &base_url,
            &query,
            &FetchOptions::new(mapping, &cache_dir, limit),
        )?;
        let mut labels: Vec<&str> = records.iter().map(|r| r.object_label.as_str()).collect();
        labels.dedup();
        return Ok(Emitted::ok(to_json(&json!({
            "fetched": records.len(),
            "cache_dir": cache_dir,
            "labels": labels,
        }))?));
    }

    let input: PathBuf = cfg
        .pick(args.input, "input")?
        .ok_or_else(|| anyhow!("--input or --base-url is required"))?;
    let records = load_records(&input).with_context(|| format!("loading {}", input.display()))?;
    let r = cfg.pick_or(args.r, "r", 1.0)?;
    let x_max = cfg.pick_or(args.x_max, "x-max", u64::MAX)?;
    let tol = cfg.pick_or(args.tol, "tol", MEMBERSHIP_TOL)?;
    let report = empirical_density_with_tol(&records, r, x_max, tol)?;
    let comparison = match cfg.pick(args.theorem.theorem, "theorem")? {
        Some(theorem) => {
            let opts = theorem_options(&args.theorem, cfg)?;
            let eps = cfg.pick_or(args.eps_stat, "eps-stat", EPS_STAT)?;
            Some(compare_bounds(&report, theorem, &opts, eps)?)
        }
        None => None,
    };
    Ok(Emitted::ok(match out {
        Output::Json => to_json(&json!({ "report": report, "comparison": comparison }))?,
        _ => {
            let mut s = format!(
                "object      {}\nr           {}\nprimes      {}\nin S(r)     {}\nproportion  {}\n",
                report.object_label,
                report.r,
                report.primes_counted,
                report.in_s_r_count,
                report.proportion
            );
            if let Some(c) = comparison {
                s.push_str(&format!(
                    "theorem     {} (r = {})\nbound       {}\nmargin      {}\nviolation   {}\n",
                    c.theorem, c.theorem_r, c.lower_bound, c.margin, c.violation
                ));
            }
            s
        }
    }))
}

fn run_report(args: ReportArgs, cfg: &Config, out: Output) -> Result<Emitted> {
    let r = cfg.pick_or(args.r, "r", 4.0)?;
    let mut reports = Vec::new();
    for theorem in Theorem::ALL {
        let variants: Vec<TheoremOptions> = match theorem {
            Theorem::T1 => (0..=1)
                .map(|c| TheoremOptions {
                    c,
                    ..Default::default()
                })
                .collect(),
            Theorem::T2 => [Character::Trivial, Character::Quadratic]
                .into_iter()
                .map(|character| TheoremOptions {
                    character,
                    ..Default::default()
                })
                .collect(),
            Theorem::T3 => TypeT::ALL
                .into_iter()
                .map(|subtype| TheoremOptions {
                    subtype,
                    ..Default::default()
                })
                .collect(),
            _ => vec![TheoremOptions::default()],
        };
        for opts in variants {
            reports.push((theorem, opts, theorem_bound(theorem, r, &opts)?));
        }
    }
    let t1 = positivity_threshold(Theorem::T1, &TheoremOptions::default())?;
    let t2 = positivity_threshold(Theorem::T2, &TheoremOptions::default())?;
    Ok(Emitted::ok(match out {
        Output::Json => to_json(&json!({
            "r": r,
            "bounds": reports
                .iter()
                .map(|(_, opts, rep)| json!({ "options": opts, "report": rep }))
                .collect::<Vec<_>>(),
            "positivity_thresholds": { "t1_c0": t1, "t2_trivial": t2 },
        }))?,
        _ => {
            let mut s = String::from("theorem,variant,lower_bound,closed_form\n");
            for (theorem, opts, rep) in &reports {
                let variant = match theorem {
                    Theorem::T1 => format!("c={}", opts.c),
                    Theorem::T2 => format!("{:?}", opts.character).to_lowercase(),
                    Theorem::T3 => opts.subtype.as_str().to_owned(),
                    _ => String::new(),
                };
                s.push_str(&format!(
                    "{theorem},{variant},{},\"{}\"\n",
                    rep.lower_bound, rep.closed_form
                ));
            }
            s.push_str(&format!(
                "t1 threshold,c=0,{t1},\nt2 threshold,trivial,{t2},\n"
            ));
            s
        }
    }))
}

fn run(cli: Cli) -> Result<Emitted> {
    let cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let out = cfg.pick(cli.output, "output")?;
    let json = out.unwrap_or(Output::Json);
    match cli.command {
        Command::Classify(a) => run_classify(a, &cfg, json),
        Command::Lift(a) => run_lift(a),
        Command::Bounds(a) => run_bounds(a, &cfg, json),
        Command::Sweep(a) => run_sweep(a, &cfg, out),
        Command::Verify(a) => run_verify(a, &cfg, json),
        Command::Ingest(a) => run_ingest(a, &cfg, json),
        Command::Report(a) => run_report(a, &cfg, json),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(emitted) => {
            let mut stdout = io::stdout().lock();
            let text = emitted.text.trim_end();
            if writeln!(stdout, "{text}").is_err() {
                return ExitCode::from(EXIT_DOMAIN);
            }
            ExitCode::from(emitted.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_DOMAIN)
        }
    }
}
