//! The `somon` command.
//!
//! Exit codes: `monitor` returns 0 for sat, 1 for unsat and 2 when the
//! stream ends inconclusive; every other successful command returns 0.
//! Any failure prints `error: <kind>: <detail>` to standard error and
//! returns 3.

use std::ffi::OsString;
use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use somon_core::bench::{self, fig3, muddy, planning, sender_receiver};
use somon_core::eval::DEFAULT_SUBSET_BOUND;
use somon_core::oracle::Oracle;
use somon_core::syntax::{compile_surface, parse, print_surface, Surface, SyntaxError};
use somon_core::unfold::unfold;
use somon_core::{
    compute_mon_map, ApUniverse, Evaluator, Formula, LengthPolicy, Monitor, MonitorError, Options, TraceStore,
    Verdict,
};

use crate::runner::{self, Job, Run};
use crate::tracefile::{self, Entry, TraceFileError};

#[derive(Parser, Debug)]
#[command(name = "somon", version, about = "Monitor second-order hyperproperties over finite traces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Feed traces one at a time and report a verdict after each.
    Monitor(MonitorArgs),
    /// Evaluate a formula once on a whole trace file.
    Check(CheckArgs),
    /// Replace set quantifiers by a bounded number of trace quantifiers.
    Unfold(UnfoldArgs),
    /// Show the desugared formula and its monotonicity marks.
    Analyze(AnalyzeArgs),
    /// Run an experiment family.
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Args, Debug)]
struct FormulaArgs {
    /// Formula file.
    #[arg(long, required_unless_present = "expr", conflicts_with = "expr")]
    formula: Option<PathBuf>,
    /// Formula text.
    #[arg(long, short = 'e')]
    expr: Option<String>,
    /// Extra propositions, comma separated.
    #[arg(long, value_delimiter = ',')]
    aps: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Optimization {
    Sat,
    Fix,
    Wit,
    Tree,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Pad shorter traces with empty steps and crop longer ones (default).
    #[arg(long, conflicts_with = "crop")]
    pad: bool,
    /// Crop to the first trace's length; shorter traces are rejected.
    #[arg(long)]
    crop: bool,
    /// Optimizations to switch off.
    #[arg(long, value_delimiter = ',')]
    disable: Vec<Optimization>,
    /// Largest store on which set quantifiers may enumerate subsets.
    #[arg(long, default_value_t = DEFAULT_SUBSET_BOUND)]
    subset_bound: usize,
}

impl EvalArgs {
    fn policy(&self) -> LengthPolicy {
        if self.crop {
            LengthPolicy::Crop
        } else {
            LengthPolicy::Pad
        }
    }

    fn options(&self) -> Options {
        options(&self.disable, self.subset_bound)
    }
}

fn options(disable: &[Optimization], subset_bound: usize) -> Options {
    let mut o = Options::all();
    o.subset_bound = subset_bound;
    for d in disable {
        match d {
            Optimization::Sat => o.sat_hash = false,
            Optimization::Fix => o.fix_hash = false,
            Optimization::Wit => o.wit_hash = false,
            Optimization::Tree => o.tree_lift = false,
        }
    }
    o
}

#[derive(Args, Debug)]
struct MonitorArgs {
    #[command(flatten)]
    formula: FormulaArgs,
    /// Trace file, or `-` for standard input.
    #[arg(long)]
    traces: PathBuf,
    #[command(flatten)]
    eval: EvalArgs,
    /// Write one CSV row per arrival.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write 0 for every elapsed time.
    #[arg(long)]
    deterministic: bool,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[command(flatten)]
    formula: FormulaArgs,
    /// Trace file, or `-` for standard input.
    #[arg(long)]
    traces: PathBuf,
    #[command(flatten)]
    eval: EvalArgs,
    /// Use the cache-free reference semantics.
    #[arg(long)]
    oracle: bool,
}

#[derive(Args, Debug)]
struct UnfoldArgs {
    #[command(flatten)]
    formula: FormulaArgs,
    /// Number of trace variables per set quantifier.
    #[arg(long)]
    bound: usize,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[command(flatten)]
    formula: FormulaArgs,
    /// List every node with its marks.
    #[arg(long)]
    nodes: bool,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Write one CSV row per instance and arrival.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Instances to run in parallel.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Write 0 for every elapsed time.
    #[arg(long)]
    deterministic: bool,
    /// Optimizations to switch off.
    #[arg(long, value_delimiter = ',')]
    disable: Vec<Optimization>,
    /// Run every instance under all 16 optimization settings.
    #[arg(long)]
    all_configs: bool,
    #[arg(long, default_value_t = DEFAULT_SUBSET_BOUND)]
    subset_bound: usize,
}

#[derive(Subcommand, Debug)]
enum BenchCommand {
    /// Common knowledge in the sender-receiver system.
    SenderReceiver {
        /// Trace length, `m` or `lo..hi`.
        #[arg(long, value_parser = parse_range, default_value = "3..10")]
        length: RangeInclusive<usize>,
        #[command(flatten)]
        common: BenchArgs,
    },
    /// Muddy children over the protocol traces, in shuffled order.
    Muddy {
        /// Number of children, `n` or `lo..hi`.
        #[arg(long, value_parser = parse_range, default_value = "2..6")]
        children: RangeInclusive<usize>,
        /// Communication bound; defaults to half the children, rounded up.
        #[arg(long)]
        bound: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: BenchArgs,
    },
    /// Random traces against an existential fixpoint formula.
    Fig3 {
        #[arg(long, default_value_t = 40)]
        traces: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: BenchArgs,
    },
    /// Reachability from random walks on a random graph.
    Planning {
        #[arg(long, default_value_t = 10)]
        nodes: usize,
        #[arg(long, default_value_t = 0.3)]
        edge_prob: f64,
        /// Steps per walk; defaults to the number of nodes.
        #[arg(long)]
        walk_len: Option<usize>,
        #[arg(long, default_value_t = 30)]
        walks: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Both)]
        mode: ModeArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Instances, with seeds `seed`, `seed + 1`, ...
        #[arg(long, default_value_t = 1)]
        instances: u64,
        #[command(flatten)]
        common: BenchArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Tsen,
    Tins,
    Both,
}

fn parse_range(text: &str) -> Result<RangeInclusive<usize>, String> {
    let num = |s: &str| s.trim().parse::<usize>().map_err(|e| format!("`{s}`: {e}"));
    match text.split_once("..") {
        Some((lo, hi)) => {
            let (lo, hi) = (num(lo)?, num(hi.trim_start_matches('='))?);
            if lo > hi {
                return Err(format!("empty range `{text}`"));
            }
            Ok(lo..=hi)
        }
        None => {
            let n = num(text)?;
            Ok(n..=n)
        }
    }
}

/// A failure with a machine-readable kind.
#[derive(Debug)]
pub struct Failure {
    pub kind: &'static str,
    pub detail: String,
}

impl Failure {
    fn new(kind: &'static str, detail: impl fmt::Display) -> Self {
        Failure {
            kind,
            detail: detail.to_string().replace('\n', " "),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error: {}: {}", self.kind, self.detail)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::new("io", e)
    }
}

impl From<TraceFileError> for Failure {
    fn from(e: TraceFileError) -> Self {
        match e {
            TraceFileError::Io(e) => e.into(),
            e => Failure::new("trace", e),
        }
    }
}

impl From<SyntaxError> for Failure {
    fn from(e: SyntaxError) -> Self {
        match e {
            SyntaxError::IllFormed(ds) => {
                let all: Vec<String> = ds.iter().map(|d| d.to_string()).collect();
                Failure::new("ill-formed", all.join("; "))
            }
            e => Failure::new("parse", e),
        }
    }
}

impl From<MonitorError> for Failure {
    fn from(e: MonitorError) -> Self {
        match e {
            MonitorError::Trace(e) => Failure::new("trace", e),
            MonitorError::Eval(e) => Failure::new("eval", e),
            MonitorError::Finished => Failure::new("monitor", e),
        }
    }
}

fn usage(detail: impl fmt::Display) -> Failure {
    Failure::new("usage", detail)
}

pub struct Io<'a> {
    pub stdin: &'a mut dyn BufRead,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
}

/// Runs the command line and returns the exit code.
pub fn run<I, T>(args: I, io: Io<'_>) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(
                e.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
            ) {
                let _ = write!(io.stdout, "{}", e.render());
                return 0;
            }
            let text = e.render().to_string();
            let detail: Vec<&str> = text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with("Usage:") && !l.starts_with("For more information"))
                .collect();
            let detail = detail.join(" ");
            let _ = writeln!(io.stderr, "{}", usage(detail.trim_start_matches("error: ")));
            return 3;
        }
    };
    match dispatch(cli.command, io.stdin, io.stdout, io.stderr) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(io.stderr, "{f}");
            3
        }
    }
}

fn dispatch(command: Command, stdin: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8, Failure> {
    match command {
        Command::Monitor(a) => monitor(a, stdin, out, err),
        Command::Check(a) => check(a, stdin, out),
        Command::Unfold(a) => {
            if a.bound == 0 {
                return Err(usage("--bound must be at least 1"));
            }
            let (surface, universe) = read_formula(&a.formula)?;
            let f = compile(&surface, universe)?;
            let unfolded = unfold(&f, a.bound).map_err(|e| Failure::new("unfold", e))?;
            writeln!(out, "{}", print_surface(&unfolded))?;
            Ok(0)
        }
        Command::Analyze(a) => analyze(a, out),
        Command::Bench(b) => bench(b, out),
    }
}

fn read_formula(args: &FormulaArgs) -> Result<(Surface, ApUniverse), Failure> {
    let text = match (&args.formula, &args.expr) {
        (Some(path), _) => fs::read_to_string(path).map_err(|e| Failure::new("io", format!("{}: {e}", path.display())))?,
        (None, Some(text)) => text.clone(),
        (None, None) => return Err(usage("one of --formula or --expr is required")),
    };
    let surface = parse(&text)?;
    let mut universe = ApUniverse::new();
    for ap in &args.aps {
        universe.intern(ap).map_err(usage)?;
    }
    Ok((surface, universe))
}

fn compile(surface: &Surface, mut universe: ApUniverse) -> Result<Formula, Failure> {
    Ok(compile_surface(surface, &mut universe)?)
}

/// A trace source: the whole file, or standard input read lazily.
enum Source<'a> {
    Lines(std::vec::IntoIter<Result<Entry, TraceFileError>>),
    Stream(Box<dyn Iterator<Item = Result<Entry, TraceFileError>> + 'a>),
}

impl Iterator for Source<'_> {
    type Item = Result<Entry, TraceFileError>;

    fn next(&mut self) -> Option<Self::Item> {
        match self {
            Source::Lines(it) => it.next(),
            Source::Stream(it) => it.next(),
        }
    }
}

/// Opens the trace source and declares every proposition it is known to
/// use. A file is read whole; standard input only up to its first trace.
fn open_traces<'a>(
    path: &Path,
    stdin: &'a mut dyn BufRead,
    universe: &mut ApUniverse,
) -> Result<(Vec<Entry>, Source<'a>), Failure> {
    let declare = |universe: &mut ApUniverse, names: &[String]| -> Result<(), Failure> {
        for n in names {
            universe.intern(n).map_err(|e| Failure::new("trace", e))?;
        }
        Ok(())
    };
    if path.as_os_str() == "-" {
        let mut it = tracefile::entries(stdin);
        let mut head = Vec::new();
        for e in it.by_ref() {
            let e = e?;
            let is_trace = matches!(e, Entry::Trace { .. });
            if let Entry::Aps(names) = &e {
                declare(universe, names)?;
            }
            head.push(e);
            if is_trace {
                break;
            }
        }
        return Ok((head, Source::Stream(Box::new(it))));
    }
    let file = File::open(path).map_err(|e| Failure::new("io", format!("{}: {e}", path.display())))?;
    let all: Vec<Result<Entry, TraceFileError>> = tracefile::entries(BufReader::new(file)).collect();
    for e in &all {
        match e {
            Ok(Entry::Aps(names)) => declare(universe, names)?,
            Ok(Entry::Trace { text, .. }) => {
                let names: Vec<String> = tracefile::names(text).map(String::from).collect();
                // Bad names are reported with their line when the trace is read.
                let _ = declare(universe, &names);
            }
            Err(_) => {}
        }
    }
    Ok((Vec::new(), Source::Lines(all.into_iter())))
}

fn traces_of<'a>(
    head: Vec<Entry>,
    rest: Source<'a>,
    universe: &'a ApUniverse,
) -> impl Iterator<Item = Result<(usize, Vec<somon_core::ApSet>), Failure>> + 'a {
    head.into_iter().map(Ok).chain(rest).filter_map(move |e| match e {
        Err(e) => Some(Err(e.into())),
        Ok(Entry::Aps(_)) => None,
        Ok(Entry::Trace { line, text }) => Some(
            tracefile::parse_trace(universe, &text)
                .map(|t| (line, t))
                .map_err(|e| Failure::new("trace", format!("line {line}: {e}"))),
        ),
    })
}

fn monitor(a: MonitorArgs, stdin: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8, Failure> {
    let (surface, mut universe) = read_formula(&a.formula)?;
    let (head, rest) = open_traces(&a.traces, stdin, &mut universe)?;
    let formula = compile(&surface, universe)?;
    let universe = formula.universe().clone();
    let mut monitor = Monitor::new(formula, a.eval.policy(), a.eval.options());
    if monitor.never_decides() {
        writeln!(err, "warning: the formula has no monotonicity mark; every verdict will be inconclusive")?;
    }
    let start = std::time::Instant::now();
    let mut rows = Vec::new();
    let mut before = somon_core::Counters::default();
    for item in traces_of(head, rest, &universe) {
        let (line, trace) = item?;
        let t = std::time::Instant::now();
        let verdict = monitor.feed(&trace).map_err(|e| {
            let f = Failure::from(e);
            Failure::new(f.kind, format!("line {line}: {}", f.detail))
        })?;
        let c = monitor.counters();
        writeln!(
            out,
            "k={} verdict={} check_calls={} sat_hits={} fix_seeds={} wit_hits={}",
            rows.len() + 1,
            verdict,
            c.check_calls,
            c.sat_hits,
            c.fix_seeds,
            c.wit_hits
        )?;
        out.flush()?;
        rows.push(runner::Row {
            arrival: rows.len() + 1,
            verdict,
            counters: c - before,
            elapsed_ms: t.elapsed().as_secs_f64() * 1e3,
        });
        before = c;
        if verdict.is_final() {
            break;
        }
    }
    let report = monitor.finish()?;
    if !report.verdict.is_final() {
        writeln!(out, "end verdict={} check={}", report.verdict, report.last_check)?;
    }
    if let Some(path) = &a.csv {
        let run = Run {
            instance: String::new(),
            traces: rows.len(),
            rows,
            verdict: report.verdict,
            last_check: report.last_check,
            counters: monitor.counters(),
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
            notes: Vec::new(),
        };
        write_csv_file(path, &[run], false, a.deterministic)?;
    }
    Ok(match report.verdict {
        Verdict::Sat => 0,
        Verdict::Unsat => 1,
        Verdict::Inconclusive => 2,
    })
}

fn write_csv_file(path: &Path, runs: &[Run], instance: bool, deterministic: bool) -> Result<(), Failure> {
    let file = File::create(path).map_err(|e| Failure::new("io", format!("{}: {e}", path.display())))?;
    let mut w = io::BufWriter::new(file);
    runner::write_csv(&mut w, runs, instance, deterministic)?;
    w.flush()?;
    Ok(())
}

fn check(a: CheckArgs, stdin: &mut dyn BufRead, out: &mut dyn Write) -> Result<u8, Failure> {
    let (surface, mut universe) = read_formula(&a.formula)?;
    let (head, rest) = open_traces(&a.traces, stdin, &mut universe)?;
    // Standard input is read whole here, so late propositions are fine.
    let entries: Vec<Entry> = head.into_iter().map(Ok).chain(rest).collect::<Result<_, _>>()?;
    for e in &entries {
        if let Entry::Trace { text, .. } = e {
            for n in tracefile::names(text) {
                let _ = universe.intern(n);
            }
        }
    }
    let formula = compile(&surface, universe)?;
    let mut store = TraceStore::new(formula.universe().clone(), a.eval.policy());
    for item in traces_of(entries, Source::Lines(Vec::new().into_iter()), formula.universe()) {
        let (line, trace) = item?;
        store
            .insert(&trace)
            .map_err(|e| Failure::new("trace", format!("line {line}: {e}")))?;
    }
    let result = if a.oracle {
        Oracle::new(&formula, &store).check().map_err(|e| Failure::new("oracle", e))?
    } else {
        Evaluator::new(formula, a.eval.options())
            .check(&store)
            .map_err(|e| Failure::new("eval", e))?
    };
    writeln!(out, "{result}")?;
    Ok(0)
}

fn analyze(a: AnalyzeArgs, out: &mut dyn Write) -> Result<u8, Failure> {
    let (surface, universe) = read_formula(&a.formula)?;
    let f = compile(&surface, universe)?;
    let mon = compute_mon_map(&f);
    writeln!(out, "formula: {}", print_surface(&surface))?;
    writeln!(out, "core: {f}")?;
    writeln!(out, "nodes: {}", f.len())?;
    writeln!(out, "fixpoint: {}", f.has_fix())?;
    writeln!(out, "first-order: {}", f.is_first_order())?;
    writeln!(out, "root marks: {}", mon.get(f.root()))?;
    if a.nodes {
        for id in f.ids() {
            writeln!(out, "n{} marks={} {}", id.0, mon.get(id), f.node_text(id))?;
        }
    }
    Ok(0)
}

fn bench(command: BenchCommand, out: &mut dyn Write) -> Result<u8, Failure> {
    type Instance = (String, Formula, bench::Stream, Vec<(String, String)>);
    let (common, instances): (BenchArgs, Vec<Instance>) = match command {
        BenchCommand::SenderReceiver { length, common } => {
            if *length.start() < 2 {
                return Err(usage("--length must be at least 2"));
            }
            let u = sender_receiver::universe();
            let list = length
                .map(|m| (format!("m={m}"), bench::build(sender_receiver::CK, &u), sender_receiver::traces(m), Vec::new()))
                .collect();
            (common, list)
        }
        BenchCommand::Muddy {
            children,
            bound,
            seed,
            common,
        } => {
            if *children.start() < 1 || *children.end() > muddy::MAX_CHILDREN {
                return Err(usage(format!("--children must lie in 1..{}", muddy::MAX_CHILDREN)));
            }
            let mut list = Vec::new();
            for n in children {
                let b = bound.unwrap_or(n.div_ceil(2));
                if b > n + 1 {
                    return Err(usage(format!("--bound {b} exceeds children + 1 for {n} children")));
                }
                let f = bench::build(&muddy::formula(n, b), &muddy::universe(n));
                list.push((format!("n={n}:b={b}"), f, muddy::stream(n, seed), Vec::new()));
            }
            (common, list)
        }
        BenchCommand::Fig3 { traces, seed, common } => {
            let f = bench::build(fig3::FORMULA, &fig3::universe());
            (common, vec![(format!("k={traces}:seed={seed}"), f, fig3::traces(seed, traces), Vec::new())])
        }
        BenchCommand::Planning {
            nodes,
            edge_prob,
            walk_len,
            walks,
            mode,
            seed,
            instances,
            common,
        } => {
            if !(2..=planning::MAX_NODES).contains(&nodes) {
                return Err(usage(format!("--nodes must lie in 2..{}", planning::MAX_NODES)));
            }
            if !(0.0..=1.0).contains(&edge_prob) {
                return Err(usage("--edge-prob must lie in [0, 1]"));
            }
            let modes: &[planning::Mode] = match mode {
                ModeArg::Tsen => &[planning::Mode::TimeSensitive],
                ModeArg::Tins => &[planning::Mode::TimeInsensitive],
                ModeArg::Both => &[planning::Mode::TimeSensitive, planning::Mode::TimeInsensitive],
            };
            let mut list = Vec::new();
            for s in seed..seed + instances {
                let inst = planning::Instance::random(&planning::Params {
                    nodes,
                    edge_prob,
                    walk_len: walk_len.unwrap_or(nodes),
                    walks,
                    seed: s,
                });
                for &m in modes {
                    let f = bench::build(&inst.formula(m), &inst.universe());
                    let notes = vec![
                        ("oracle".to_string(), planning::oracle(&inst, &inst.walks, m).to_string()),
                        ("disconnected".to_string(), inst.disconnected().to_string()),
                    ];
                    list.push((format!("seed={s}:mode={}", m.name()), f, inst.traces(), notes));
                }
            }
            (common, list)
        }
    };
    let configs: Vec<Options> = if common.all_configs {
        Options::combinations()
            .map(|mut o| {
                o.subset_bound = common.subset_bound;
                o
            })
            .collect()
    } else {
        vec![options(&common.disable, common.subset_bound)]
    };
    let mut jobs: Vec<Job<Result<Run, MonitorError>>> = Vec::new();
    for (name, formula, stream, notes) in instances {
        for &o in &configs {
            let name = if common.all_configs { format!("{name}:config={o}") } else { name.clone() };
            let (formula, stream, notes) = (formula.clone(), stream.clone(), notes.clone());
            jobs.push(Box::new(move || {
                let mut run = runner::run_stream(name, formula, &stream, LengthPolicy::Pad, o)?;
                run.notes = notes;
                Ok(run)
            }));
        }
    }
    let runs: Vec<Run> = runner::parallel(jobs, common.jobs).into_iter().collect::<Result<_, _>>()?;
    for run in &runs {
        writeln!(out, "{}", run.summary(common.deterministic))?;
    }
    if let Some(path) = &common.csv {
        write_csv_file(path, &runs, true, common.deterministic)?;
    }
    Ok(0)
}
