mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qtrees::exact::parse_terms;
use qtrees::maps::{ergodic_fourier, orbit_with_cap, MapId, DEFAULT_ORBIT_CAP};
use qtrees::minkowski::{enclosure, fourier_tree, qmark, qmark_inv, rho, rho_inv};
use qtrees::operators::MarkovKind;
use qtrees::stochastic::{run_walks, ChainSpec, DEFAULT_SEED, DEFAULT_WALK_CAP};
use qtrees::tree::{level_with_cap, TreeKind, TreeSpec, DEFAULT_LEVEL_CAP};
use qtrees::{verify, BigUint, Dyad, Error, Rat};

use output::{Cell, Table};

/// Environment variable naming the directory for relative `--output` paths.
const OUT_DIR_VAR: &str = "QTREES_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "qtrees", version, about = "Exact Stern-Brocot, Farey and dyadic trees, ?-function, maps and random walks")]
struct Cli {
    /// Worker threads for parallel sections (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output format; `text` is only meaningful for `verify`.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write to this file instead of standard output. Relative paths are
    /// resolved against $QTREES_OUT_DIR when it is set.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// Lift the default size caps (depth 24, count 2^24, walks 10^6).
    #[arg(long, global = true)]
    unsafe_cap: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List a level (or levels 1..=depth) of one of the six trees.
    Tree(TreeArgs),
    /// Forward orbit of a map, starting point included.
    Enumerate(EnumerateArgs),
    /// Evaluate ?, rho or their inverses exactly.
    Qmark(QmarkArgs),
    /// Fourier-Stieltjes coefficients of rho by tree or ergodic averages.
    Fourier(FourierArgs),
    /// Simulate MC0, MC1 or the tree walk.
    Simulate(SimulateArgs),
    /// Run the named invariant checks.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct TreeArgs {
    /// sb, farey or dyadic.
    #[arg(long, default_value = "sb")]
    kind: String,
    #[arg(long)]
    permuted: bool,
    #[arg(long)]
    depth: u32,
    /// Emit every level from 1 to depth.
    #[arg(long)]
    all: bool,
    /// Add a decimal column.
    #[arg(long)]
    decimal: bool,
}

#[derive(Args, Debug)]
struct EnumerateArgs {
    /// R, S, T, G, F or D.
    #[arg(long)]
    map: String,
    #[arg(long)]
    start: String,
    #[arg(long)]
    count: u64,
    #[arg(long)]
    decimal: bool,
}

#[derive(Args, Debug)]
struct QmarkArgs {
    /// Points `p/q`; dyadic `k/2^s` with --inverse; `[a0;a1,...]` prefixes
    /// with --enclosure.
    #[arg(required = true)]
    values: Vec<String>,
    #[arg(long, conflicts_with = "enclosure")]
    inverse: bool,
    /// Use rho on [0, inf] instead of ? on [0, 1].
    #[arg(long)]
    extended: bool,
    #[arg(long)]
    enclosure: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum FourierMethod {
    Tree,
    Ergodic,
}

#[derive(Args, Debug)]
struct FourierArgs {
    #[arg(long, value_enum, default_value = "tree")]
    method: FourierMethod,
    /// Frequencies, comma separated.
    #[arg(short = 'n', long = "n", value_delimiter = ',', default_value = "1")]
    n: Vec<i64>,
    /// Tree levels 1..=size, or 2^size orbit points.
    #[arg(long, default_value_t = 18)]
    size: u32,
    /// Start of the R orbit for the ergodic method.
    #[arg(long, default_value = "1/1")]
    start: String,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum ChainKind {
    Mc0,
    Mc1,
    Rw,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long, value_enum, default_value = "rw")]
    chain: ChainKind,
    /// Ignored for rw, which always starts at 1/1.
    #[arg(long, default_value = "1/1")]
    start: String,
    #[arg(long, default_value_t = 1000)]
    walks: u64,
    #[arg(long, default_value_t = 1000)]
    horizon: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Open target interval `a/b,c/d`; walks stop at the first hit.
    #[arg(long)]
    interval: Option<String>,
    /// Emit the cumulative hitting curve instead of per-walk rows.
    #[arg(long, requires = "interval")]
    curve: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// `all`, suite names or check names, comma separated.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// List the checks without running them.
    #[arg(long)]
    list: bool,
}

enum Failure {
    Usage(String),
    Verify(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn parse_rat(s: &str) -> Result<Rat, Failure> {
    Ok(s.parse::<Rat>()?)
}

fn walk_cap(n: u64, unsafe_cap: bool) -> Result<(), Failure> {
    if !unsafe_cap && n > DEFAULT_WALK_CAP {
        return Err(usage(format!("walks = {n} exceeds the cap {DEFAULT_WALK_CAP} (use --unsafe-cap)")));
    }
    Ok(())
}

struct Ctx {
    argv: Vec<String>,
    format: Format,
    unsafe_cap: bool,
}

impl Ctx {
    fn metadata(&self, command: &str, seed: Option<u64>) -> Value {
        json!({
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "seed": seed,
            "flags": self.argv,
        })
    }

    fn render(&self, table: &Table, command: &str, seed: Option<u64>) -> String {
        match self.format {
            Format::Json => table.to_json(self.metadata(command, seed)),
            Format::Csv | Format::Text => table.to_csv(),
        }
    }
}

fn cmd_tree(a: &TreeArgs, ctx: &Ctx) -> Result<String, Failure> {
    let spec = TreeSpec {
        kind: a.kind.parse::<TreeKind>()?,
        permuted: a.permuted,
    };
    let cap = if ctx.unsafe_cap { u32::MAX } else { DEFAULT_LEVEL_CAP };
    let mut cols = vec!["level", "index", "num", "den"];
    if a.decimal {
        cols.push("decimal");
    }
    let mut t = Table::new(&cols);
    let first = if a.all { 1 } else { a.depth };
    for k in first..=a.depth {
        for (i, x) in level_with_cap::<BigUint>(spec, k, cap)?.enumerate() {
            let mut row: Vec<Cell> = vec![
                u64::from(k).into(),
                (i as u64 + 1).into(),
                x.num().to_string().into(),
                x.den().to_string().into(),
            ];
            if a.decimal {
                row.push(x.to_f64().into());
            }
            t.push(row);
        }
    }
    Ok(ctx.render(&t, "tree", None))
}

fn cmd_enumerate(a: &EnumerateArgs, ctx: &Ctx) -> Result<String, Failure> {
    let m: MapId = a.map.parse()?;
    let start = parse_rat(&a.start)?;
    let cap = if ctx.unsafe_cap { u64::MAX } else { DEFAULT_ORBIT_CAP };
    let mut cols = vec!["i", "num", "den"];
    if a.decimal {
        cols.push("decimal");
    }
    let mut t = Table::new(&cols);
    for (i, x) in orbit_with_cap(m, &start, a.count, cap)?.enumerate() {
        let mut row: Vec<Cell> = vec![(i as u64).into(), x.num().to_string().into(), x.den().to_string().into()];
        if a.decimal {
            row.push(x.to_f64().into());
        }
        t.push(row);
    }
    Ok(ctx.render(&t, "enumerate", None))
}

fn cmd_qmark(a: &QmarkArgs, ctx: &Ctx) -> Result<String, Failure> {
    if a.enclosure {
        let mut t = Table::new(&["input", "lower", "upper", "lower_decimal", "upper_decimal"]);
        for v in &a.values {
            let terms = parse_terms::<BigUint>(v)?;
            let (lo, hi) = enclosure(&terms, a.extended)?;
            t.push(vec![
                v.as_str().into(),
                lo.to_string().into(),
                hi.to_string().into(),
                lo.to_f64().into(),
                hi.to_f64().into(),
            ]);
        }
        return Ok(ctx.render(&t, "qmark", None));
    }
    let mut t = Table::new(&["input", "value", "decimal"]);
    for v in &a.values {
        let (value, decimal) = if a.inverse {
            let d: Dyad = v.parse()?;
            let x = if a.extended { rho_inv(&d)? } else { qmark_inv(&d)? };
            (x.to_string(), x.to_f64())
        } else {
            let x = parse_rat(v)?;
            let d = if a.extended { rho(&x)? } else { qmark(&x)? };
            (d.to_string(), d.to_f64())
        };
        t.push(vec![v.as_str().into(), value.into(), decimal.into()]);
    }
    Ok(ctx.render(&t, "qmark", None))
}

fn cmd_fourier(a: &FourierArgs, ctx: &Ctx) -> Result<String, Failure> {
    let cap = if ctx.unsafe_cap { u32::MAX } else { DEFAULT_LEVEL_CAP };
    if a.size > cap {
        return Err(usage(format!("size = {} exceeds the cap {cap} (use --unsafe-cap)", a.size)));
    }
    let start = parse_rat(&a.start)?;
    let mut t = Table::new(&["n", "re", "im", "method", "size"]);
    for &n in &a.n {
        let (c, method) = match a.method {
            FourierMethod::Tree => (fourier_tree::<BigUint, f64>(TreeSpec::SB, n, a.size)?, "tree"),
            FourierMethod::Ergodic => {
                let iters = 1u64.checked_shl(a.size).ok_or_else(|| usage("size too large"))?;
                (ergodic_fourier(n, &start, iters, MapId::R)?, "ergodic")
            }
        };
        t.push(vec![n.into(), c.re.into(), c.im.into(), method.into(), u64::from(a.size).into()]);
    }
    Ok(ctx.render(&t, "fourier", None))
}

fn cmd_simulate(a: &SimulateArgs, ctx: &Ctx) -> Result<String, Failure> {
    walk_cap(a.walks, ctx.unsafe_cap)?;
    let spec = match a.chain {
        ChainKind::Rw => ChainSpec::tree_walk(a.horizon, a.seed)?,
        ChainKind::Mc0 => ChainSpec::new(MarkovKind::Mc0, parse_rat(&a.start)?, a.horizon, a.seed)?,
        ChainKind::Mc1 => ChainSpec::new(MarkovKind::Mc1, parse_rat(&a.start)?, a.horizon, a.seed)?,
    };
    let interval = match &a.interval {
        None => None,
        Some(s) => {
            let (lo, hi) = s
                .split_once(',')
                .ok_or_else(|| usage(format!("interval {s:?} is not of the form a/b,c/d")))?;
            Some((parse_rat(lo.trim())?, parse_rat(hi.trim())?))
        }
    };
    let summaries = run_walks(&spec, a.walks, interval.as_ref())?;
    let mut curve = vec![0u64; a.horizon as usize + 1];
    for t in summaries.iter().filter_map(|s| s.hit_time) {
        curve[t as usize] += 1;
    }
    for t in 1..curve.len() {
        curve[t] += curve[t - 1];
    }
    let hits = curve.last().copied().unwrap_or(0);

    let mut t = if a.curve {
        let mut t = Table::new(&["t", "hits", "fraction"]);
        for (i, &c) in curve.iter().enumerate() {
            t.push(vec![(i as u64).into(), c.into(), (c as f64 / a.walks.max(1) as f64).into()]);
        }
        t
    } else {
        let mut t = Table::new(&["walk", "hit_time", "final_num", "final_den"]);
        for s in &summaries {
            let hit = s.hit_time.map_or(-1, |h| h as i64);
            t.push(vec![
                s.walk.into(),
                hit.into(),
                s.final_state.num().to_string().into(),
                s.final_state.den().to_string().into(),
            ]);
        }
        t
    };
    if interval.is_some() {
        t.extra.insert(
            "summary".into(),
            json!({
                "walks": a.walks,
                "hits": hits,
                "fraction": hits as f64 / a.walks.max(1) as f64,
                "curve": curve,
            }),
        );
    }
    Ok(ctx.render(&t, "simulate", Some(a.seed)))
}

fn cmd_verify(a: &VerifyArgs, ctx: &Ctx) -> Result<String, Failure> {
    if a.list {
        let mut t = Table::new(&["suite", "name", "summary"]);
        for c in verify::select(&a.suite)? {
            t.push(vec![c.suite.into(), c.name.into(), c.summary.into()]);
        }
        return Ok(match ctx.format {
            Format::Text => t.rows.iter().map(|r| format!("{}/{}\n", r[0].text(), r[1].text())).collect(),
            _ => ctx.render(&t, "verify", Some(a.seed)),
        });
    }
    let results = verify::run(&a.suite, a.seed)?;
    let failed = results.iter().filter(|r| !r.passed).count();
    let out = match ctx.format {
        Format::Text => {
            let mut s: String = results.iter().map(|r| format!("{r}\n")).collect();
            s.push_str(&format!(
                "{} checks, {} passed, {} failed (seed {})\n",
                results.len(),
                results.len() - failed,
                failed,
                a.seed
            ));
            s
        }
        _ => {
            let mut t = Table::new(&["suite", "name", "passed", "detail"]);
            for r in &results {
                t.push(vec![r.suite.into(), r.name.into(), r.passed.into(), r.detail.clone().into()]);
            }
            ctx.render(&t, "verify", Some(a.seed))
        }
    };
    if failed > 0 {
        return Err(Failure::Verify(out));
    }
    Ok(out)
}

fn output_path(p: &PathBuf) -> PathBuf {
    match std::env::var_os(OUT_DIR_VAR) {
        Some(dir) if p.is_relative() => PathBuf::from(dir).join(p),
        _ => p.clone(),
    }
}

fn emit(text: &str, dest: Option<&PathBuf>) -> Result<(), Failure> {
    match dest {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(p) => {
            let path = output_path(p);
            if let Some(parent) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|e| usage(format!("{}: {e}", parent.display())))?;
            }
            std::fs::write(&path, text).map_err(|e| usage(format!("{}: {e}", path.display())))
        }
    }
}

fn run(cli: Cli, argv: Vec<String>) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| usage(format!("--threads {n}: {e}")))?;
    }
    let default_format = match cli.command {
        Command::Verify(_) => Format::Text,
        _ => Format::Csv,
    };
    let ctx = Ctx {
        argv,
        format: cli.format.unwrap_or(default_format),
        unsafe_cap: cli.unsafe_cap,
    };
    let result = match &cli.command {
        Command::Tree(a) => cmd_tree(a, &ctx),
        Command::Enumerate(a) => cmd_enumerate(a, &ctx),
        Command::Qmark(a) => cmd_qmark(a, &ctx),
        Command::Fourier(a) => cmd_fourier(a, &ctx),
        Command::Simulate(a) => cmd_simulate(a, &ctx),
        Command::Verify(a) => cmd_verify(a, &ctx),
    };
    match result {
        Ok(text) => emit(&text, cli.output.as_ref()),
        Err(Failure::Verify(text)) => {
            emit(&text, cli.output.as_ref())?;
            Err(Failure::Verify(String::new()))
        }
        Err(e) => Err(e),
    }
}

/// Flags as recorded in JSON metadata; the worker count is left out because
/// it does not change any output.
fn recorded_flags(args: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in args {
        if skip {
            skip = false;
        } else if a == "--threads" {
            skip = true;
        } else if !a.starts_with("--threads=") {
            out.push(a.clone());
        }
    }
    out
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli, recorded_flags(&argv[1..])) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Verify(_)) => {
            eprintln!("verification failed");
            ExitCode::from(2)
        }
    }
}
