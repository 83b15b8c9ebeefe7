//! The `pdd` command line.
//!
//! Exit codes: 0 for yes/ok, 1 for no, 2 for errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use pdd_core::brute::solve_bruteforce;
use pdd_core::dp::{solve_dp, DpOptions, SolveError};
use pdd_core::extension::{
    build_extension, width_report_with, ExactSearchError, NodeWidthRule, Strategy, TreeExtension, DEFAULT_NODE_LIMIT,
};
use pdd_core::foodweb::{first_starving, PddInstance};
use pdd_core::io::{
    parse_cds, parse_extension, parse_instance, parse_set, serialize_extension, serialize_instance, ParseError,
};
use pdd_core::random::{random_instance, GammaStyle, GenerateError};
use pdd_core::reduction::{reduce_cds, solve_cds_bruteforce, CdsError, ReductionError, ReductionMap, WidgetKind};
use pdd_core::{diversity, Rational, SpeciesSet};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", .path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", .path.display())]
    Parse { path: PathBuf, source: ParseError },
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Exact(#[from] ExactSearchError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Cds(#[from] CdsError),
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error("{0}")]
    Usage(String),
}

#[derive(Parser, Debug)]
#[command(name = "pdd", version, about = "Phylogenetic diversity with dependencies: exact solvers and tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide an instance and report the optimum.
    Solve(SolveArgs),
    /// Build a tree extension and print it with its widths.
    Extend(ExtendArgs),
    /// Report per-node and maximum node/edge widths of an extension.
    Width(WidthArgs),
    /// Reduce a CDS instance to a ½-PDD instance.
    Reduce(ReduceArgs),
    /// Check a species set against an instance.
    Verify(VerifyArgs),
    /// Write a seeded random instance.
    GenRandom(GenArgs),
    /// Solve a CDS instance exhaustively.
    CdsSolve(CdsArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StrategyArg {
    Topo,
    Greedy,
    Exact,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Topo => Strategy::Topo,
            StrategyArg::Greedy => Strategy::Greedy,
            StrategyArg::Exact => Strategy::Exact,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RuleArg {
    Ancestors,
    SelfIfPredators,
    SelfAlways,
}

impl From<RuleArg> for NodeWidthRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Ancestors => NodeWidthRule::AncestorsOnly,
            RuleArg::SelfIfPredators => NodeWidthRule::SelfIfPredators,
            RuleArg::SelfAlways => NodeWidthRule::SelfAlways,
        }
    }
}

#[derive(Args, Debug)]
struct ExtensionSource {
    /// Extension file; overrides --strategy.
    #[arg(long, conflicts_with = "strategy")]
    extension: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "greedy")]
    strategy: StrategyArg,
    /// Species limit for --strategy exact.
    #[arg(long, default_value_t = DEFAULT_NODE_LIMIT)]
    exact_limit: usize,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Exhaustive search instead of the dynamic program.
    #[arg(long)]
    brute_force: bool,
    /// Print an optimal set.
    #[arg(long)]
    witness: bool,
    #[command(flatten)]
    ext: ExtensionSource,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct ExtendArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "greedy")]
    strategy: StrategyArg,
    #[arg(long, default_value_t = DEFAULT_NODE_LIMIT)]
    exact_limit: usize,
    /// Write the extension here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct WidthArgs {
    #[arg(long)]
    instance: PathBuf,
    #[command(flatten)]
    ext: ExtensionSource,
    #[arg(long, value_enum, default_value = "ancestors")]
    rule: RuleArg,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct ReduceArgs {
    #[arg(long)]
    cds: PathBuf,
    /// Write the instance here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Write the widget map as JSON.
    #[arg(long)]
    map: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    set: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    seed: u64,
    #[arg(short, long)]
    n: usize,
    /// Arc probability.
    #[arg(short, long, default_value_t = 0.3)]
    p: f64,
    /// `alpha:<p/q>` or `den:<max denominator>`.
    #[arg(long, default_value = "alpha:1/2")]
    gamma: String,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CdsArgs {
    #[arg(long)]
    cds: PathBuf,
    #[arg(long)]
    json: bool,
}

/// Outcome of a subcommand: the exit status plus what to print.
struct Report {
    ok: bool,
    human: String,
    json: serde_json::Value,
}

impl Report {
    fn ok(human: String, json: serde_json::Value) -> Self {
        Report { ok: true, human, json }
    }

    fn decided(ok: bool, human: String, json: serde_json::Value) -> Self {
        Report { ok, human, json }
    }
}

pub fn run(argv: &[String], out: &mut impl Write, err: &mut impl Write) -> i32 {
    run_with_threads(argv, std::env::var("PDD_THREADS").ok().as_deref(), out, err)
}

/// [`run`] with the `PDD_THREADS` value passed explicitly.
pub fn run_with_threads(argv: &[String], threads: Option<&str>, out: &mut impl Write, err: &mut impl Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{rendered}");
                0
            } else {
                let _ = write!(err, "{rendered}");
                2
            };
        }
    };
    let result = parse_threads(threads).and_then(|threads| dispatch(cli.command, threads));
    match result {
        Ok((report, json)) => {
            let text = if json {
                serde_json::to_string_pretty(&report.json).expect("json values serialize") + "\n"
            } else {
                report.human
            };
            if out.write_all(text.as_bytes()).is_err() {
                return 2;
            }
            if report.ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn parse_threads(raw: Option<&str>) -> Result<usize, CliError> {
    match raw {
        None => Ok(1),
        Some(s) => match s.trim().parse::<usize>() {
            Ok(t) if t >= 1 => Ok(t),
            _ => Err(CliError::Usage(format!("PDD_THREADS must be a positive integer, got `{s}`"))),
        },
    }
}

fn dispatch(cmd: Command, threads: usize) -> Result<(Report, bool), CliError> {
    match cmd {
        Command::Solve(a) => {
            let json = a.json;
            Ok((solve(a, threads)?, json))
        }
        Command::Extend(a) => {
            let json = a.json;
            Ok((extend(a)?, json))
        }
        Command::Width(a) => {
            let json = a.json;
            Ok((width(a)?, json))
        }
        Command::Reduce(a) => {
            let json = a.json;
            Ok((reduce(a)?, json))
        }
        Command::Verify(a) => {
            let json = a.json;
            Ok((verify(a)?, json))
        }
        Command::GenRandom(a) => Ok((gen_random(a)?, false)),
        Command::CdsSolve(a) => {
            let json = a.json;
            Ok((cds_solve(a)?, json))
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parsed<T>(path: &Path, r: Result<T, ParseError>) -> Result<T, CliError> {
    r.map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

fn load_instance(path: &Path) -> Result<PddInstance, CliError> {
    let text = read(path)?;
    parsed(path, parse_instance(&text))
}

fn load_extension(inst: &PddInstance, src: &ExtensionSource) -> Result<TreeExtension, CliError> {
    match &src.extension {
        Some(path) => {
            let text = read(path)?;
            parsed(path, parse_extension(&text, inst.web()))
        }
        None => Ok(build_extension(inst.web(), src.strategy.into(), src.exact_limit)?),
    }
}

fn set_literal(inst: &PddInstance, set: &SpeciesSet) -> String {
    format!("{{{}}}", inst.set_names(set).join(","))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn solve(a: SolveArgs, threads: usize) -> Result<Report, CliError> {
    let inst = load_instance(&a.instance)?;
    let result = if a.brute_force {
        solve_bruteforce(&inst)?
    } else {
        let t = load_extension(&inst, &a.ext)?;
        solve_dp(&inst, &t, &DpOptions { threads })?
    };
    let optimum = result.optimum.to_string();
    let mut human = format!("{} {optimum}", yes_no(result.decision));
    let mut json = json!({ "decision": yes_no(result.decision), "optimum": result.optimum.finite() });
    if a.witness {
        let w = result
            .witness
            .as_ref()
            .ok_or_else(|| CliError::Usage("solver returned no witness".into()))?;
        human.push(' ');
        human.push_str(&set_literal(&inst, w));
        json["witness"] = json!(inst.set_names(w));
    }
    human.push('\n');
    Ok(Report::decided(result.decision, human, json))
}

#[derive(Serialize)]
struct WidthRow<'a> {
    species: &'a str,
    node: usize,
    edge: usize,
}

fn width_lines(inst: &PddInstance, t: &TreeExtension, rule: NodeWidthRule, prefix: &str) -> (String, serde_json::Value) {
    let web = inst.web();
    let r = width_report_with(web, t, rule);
    let mut human = String::new();
    let rows: Vec<WidthRow> = web
        .species()
        .map(|v| WidthRow {
            species: web.name(v),
            node: r.node[v.0],
            edge: r.edge[v.0],
        })
        .collect();
    for row in &rows {
        human.push_str(&format!("{prefix}width {} node {} edge {}\n", row.species, row.node, row.edge));
    }
    human.push_str(&format!("{prefix}max node {} edge {}\n", r.max_node, r.max_edge));
    let json = json!({ "widths": rows, "max_node": r.max_node, "max_edge": r.max_edge });
    (human, json)
}

fn extend(a: ExtendArgs) -> Result<Report, CliError> {
    let inst = load_instance(&a.instance)?;
    let strategy: Strategy = a.strategy.into();
    let t = build_extension(inst.web(), strategy, a.exact_limit)?;
    let text = serialize_extension(&t, inst.web());
    let (widths, mut json) = width_lines(&inst, &t, NodeWidthRule::default(), "# ");
    json["strategy"] = json!(strategy.name());
    let human = match &a.output {
        Some(path) => {
            write_file(path, &text)?;
            json["output"] = json!(path.display().to_string());
            format!("wrote {}\n{widths}", path.display())
        }
        None => {
            json["extension"] = json!(text);
            format!("{text}{widths}")
        }
    };
    Ok(Report::ok(human, json))
}

fn width(a: WidthArgs) -> Result<Report, CliError> {
    let inst = load_instance(&a.instance)?;
    let t = load_extension(&inst, &a.ext)?;
    let (human, json) = width_lines(&inst, &t, a.rule.into(), "");
    Ok(Report::ok(human, json))
}

fn map_json(inst: &PddInstance, map: &ReductionMap) -> serde_json::Value {
    let web = inst.web();
    let name = |s| web.name(s).to_string();
    let g = &map.cds;
    let vertices: Vec<_> = (0..g.len())
        .map(|v| {
            json!({
                "vertex": g.name(v),
                "capacity": g.capacity(v),
                "v0": name(map.v0(v)),
                "v1": name(map.v1(v)),
                "v2": name(map.v2(v)),
            })
        })
        .collect();
    let edges: Vec<_> = map
        .edges
        .iter()
        .map(|(&(u, v), w)| json!({ "from": g.name(u), "to": g.name(v), "root": name(w.root) }))
        .collect();
    let widgets: Vec<_> = map
        .widgets()
        .map(|w| json!({ "root": name(w.root), "kind": w.kind, "species": w.len() }))
        .collect();
    json!({
        "params": map.params,
        "k": g.k(),
        "vertices": vertices,
        "edges": edges,
        "widgets": widgets,
    })
}

fn reduce(a: ReduceArgs) -> Result<Report, CliError> {
    let text = read(&a.cds)?;
    let cds = parsed(&a.cds, parse_cds(&text))?;
    let (inst, map) = reduce_cds(&cds)?;
    let out = serialize_instance(&inst);
    let p = map.params;
    let selectors = map.widgets().filter(|w| matches!(w.kind, WidgetKind::Selector { .. })).count();
    let quotas = map.widgets().count() - selectors;
    let mut json = json!({
        "species": inst.len(),
        "arcs": inst.web().arcs().len(),
        "budget": p.b,
        "target": p.d,
        "selectors": selectors,
        "quotas": quotas,
    });
    let summary = format!(
        "reduced {} vertices: species {} arcs {} B={} D={} selectors {selectors} quotas {quotas}\n",
        cds.len(),
        inst.len(),
        inst.web().arcs().len(),
        p.b,
        p.d
    );
    json["vertices"] = json!(cds.len());
    if let Some(path) = &a.map {
        let m = serde_json::to_string_pretty(&map_json(&inst, &map)).expect("json values serialize");
        write_file(path, &(m + "\n"))?;
        json["map"] = json!(path.display().to_string());
    }
    let human = match &a.output {
        Some(path) => {
            write_file(path, &out)?;
            json["output"] = json!(path.display().to_string());
            summary
        }
        None => {
            json["instance"] = json!(out);
            format!("{out}# {summary}")
        }
    };
    Ok(Report::ok(human, json))
}

fn verify(a: VerifyArgs) -> Result<Report, CliError> {
    let inst = load_instance(&a.instance)?;
    let text = read(&a.set)?;
    let set = parsed(&a.set, parse_set(&text, inst.web()))?;
    if let Some((v, got)) = first_starving(&inst, &set) {
        let name = inst.web().name(v);
        return Ok(Report::decided(
            false,
            format!("not viable: {name} lacks prey ({got} < 1)\n"),
            json!({ "verdict": "not viable", "species": name, "received": got.to_string() }),
        ));
    }
    let size = set.len() as u64;
    let d = diversity(&inst, &set);
    let (b, t) = (inst.budget(), inst.target());
    let report = if size > b {
        Report::decided(
            false,
            format!("viable but over budget: size {size} > {b}\n"),
            json!({ "verdict": "over budget", "size": size, "budget": b }),
        )
    } else if d < t as i64 {
        Report::decided(
            false,
            format!("viable but below target: diversity {d} < {t}\n"),
            json!({ "verdict": "below target", "diversity": d, "target": t }),
        )
    } else {
        Report::ok(
            format!("yes: viable, size {size} <= {b}, diversity {d} >= {t}\n"),
            json!({ "verdict": "yes", "size": size, "budget": b, "diversity": d, "target": t }),
        )
    };
    Ok(report)
}

fn parse_gamma_style(s: &str) -> Result<GammaStyle, CliError> {
    let bad = || CliError::Usage(format!("--gamma expects alpha:<p/q> or den:<int>, got `{s}`"));
    match s.split_once(':') {
        Some(("alpha", r)) => Ok(GammaStyle::Alpha(r.parse::<Rational>().map_err(|_| bad())?)),
        Some(("den", d)) => Ok(GammaStyle::SmallDenominator(d.parse().map_err(|_| bad())?)),
        _ => Err(bad()),
    }
}

fn gen_random(a: GenArgs) -> Result<Report, CliError> {
    let style = parse_gamma_style(&a.gamma)?;
    let inst = random_instance(a.seed, a.n, a.p, &style)?;
    let text = serialize_instance(&inst);
    Ok(match &a.output {
        Some(path) => {
            write_file(path, &text)?;
            Report::ok(format!("wrote {}\n", path.display()), json!({ "output": path.display().to_string() }))
        }
        None => Report::ok(text, serde_json::Value::Null),
    })
}

fn cds_solve(a: CdsArgs) -> Result<Report, CliError> {
    let text = read(&a.cds)?;
    let cds = parsed(&a.cds, parse_cds(&text))?;
    Ok(match solve_cds_bruteforce(&cds)? {
        None => Report::decided(false, "no\n".into(), json!({ "decision": "no" })),
        Some(sol) => {
            let s: Vec<&str> = sol.dominating.iter().map(|&v| cds.name(v)).collect();
            let f: Vec<(&str, &str)> = sol.assignment.iter().map(|(&v, &u)| (cds.name(v), cds.name(u))).collect();
            let mut human = format!("yes {{{}}}", s.join(","));
            for (v, u) in &f {
                human.push_str(&format!(" {v}->{u}"));
            }
            human.push('\n');
            let assignment: serde_json::Map<String, serde_json::Value> =
                f.iter().map(|(v, u)| (v.to_string(), json!(u))).collect();
            Report::ok(human, json!({ "decision": "yes", "dominating": s, "assignment": assignment }))
        }
    })
}
