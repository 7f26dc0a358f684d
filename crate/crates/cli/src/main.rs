use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use upb_core::canon::{are_equivalent, canonical_key};
use upb_core::catalog::{merge_catalogs, Catalog};
use upb_core::checker::{classify, Verdict};
use upb_core::construct::{
    attainable_sizes, build_multiple_of_four, combine, min_size, shifts, split_qubit, standard_basis,
};
use upb_core::graph::{graph_from_states, profile_of};
use upb_core::notation::{basis_from_graph, format_basis, graph_from_value, graph_to_value, parse_basis};
use upb_core::search::{
    enumerate_profiles_with_counts, full_search, ProfileConstraints, SearchError, SearchOptions,
};
use upb_core::OrthogonalityGraph;

/// Qubit unextendible product bases: checking, canonical forms, exhaustive
/// classification and constructions.
#[derive(Parser)]
#[command(name = "upb", version)]
struct Cli {
    /// Human-readable output instead of JSON lines.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse ket text and print the orthogonality graph.
    Parse { input: String },
    /// Decide whether each input is a UPB.
    Check { input: String },
    /// Print canonical keys.
    Canon { input: String },
    /// Decide whether two sets have equivalent orthogonality graphs.
    Equiv { first: String, second: String },
    /// Classify all UPBs with the given qubit count and size.
    Search(SearchArgs),
    /// List the component-size profiles that survive the necessary conditions.
    Profiles {
        #[command(flatten)]
        constraints: ConstraintArgs,
        /// Print only the summary line.
        #[arg(long)]
        count: bool,
    },
    /// Build a UPB with one of the explicit constructions.
    Construct(ConstructArgs),
    /// Summarize which sizes of p-qubit UPBs are known to exist.
    Sizes {
        #[arg(long)]
        p: usize,
    },
    /// Merge catalogs of the same (p, s).
    Merge {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ConstraintArgs {
    #[arg(long)]
    p: usize,
    #[arg(long)]
    s: usize,
    /// Also allow regions without an orthogonal partner on their qubit.
    #[arg(long)]
    allow_unmatched: bool,
    /// Keep profiles whose single two-sided component would split into infeasible halves.
    #[arg(long)]
    no_reverse_combine: bool,
    /// Keep profiles whose greedy cover chain already reaches every state.
    #[arg(long)]
    no_cover_bound: bool,
    /// For odd s, drop profiles with a qubit made only of K(1,1) components.
    #[arg(long)]
    odd_pair_rule: bool,
}

impl ConstraintArgs {
    fn constraints(&self) -> Result<ProfileConstraints> {
        if self.p == 0 || self.s == 0 {
            bail!("--p and --s must be positive");
        }
        let mut c = ProfileConstraints::new(self.p, self.s);
        c.allow_unmatched = self.allow_unmatched;
        c.use_reverse_combine = !self.no_reverse_combine;
        c.use_cover_bound = !self.no_cover_bound;
        c.use_odd_pair_rule = self.odd_pair_rule;
        Ok(c)
    }
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    constraints: ConstraintArgs,
    /// Worker threads (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Finished work units are appended here and skipped on the next run.
    #[arg(long)]
    resume: Option<PathBuf>,
    /// Catalog output; stdout when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Write the full report (with the per-unit log) here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Stop after this many new work units (the run can be resumed).
    #[arg(long, hide = true)]
    unit_limit: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Shifts,
    Standard,
    Combine,
    Mult4,
    Split,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long, value_enum)]
    method: Method,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    s: Option<usize>,
    /// Input UPBs (ket text or @file): two for combine, one for split.
    #[arg(long = "input")]
    inputs: Vec<String>,
    /// Qubit to split.
    #[arg(long)]
    qubit: Option<usize>,
}

/// Ket text, a JSON graph record, or `@path` to a file with one per line.
fn read_inputs(arg: &str) -> Result<Vec<(String, OrthogonalityGraph)>> {
    let text = match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?,
        None => arg.to_string(),
    };
    let mut out = Vec::new();
    for line in text.lines().map(str::trim) {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        out.push((line.to_string(), parse_graph(line)?));
    }
    if out.is_empty() {
        bail!("no input");
    }
    Ok(out)
}

fn parse_graph(text: &str) -> Result<OrthogonalityGraph> {
    if text.starts_with('{') {
        let mut v: Value = serde_json::from_str(text).context("parsing JSON record")?;
        if let Some(g) = v.get_mut("graph") {
            v = g.take();
        }
        return Ok(graph_from_value(v)?);
    }
    let basis = parse_basis(text).with_context(|| format!("parsing {text:?}"))?;
    Ok(graph_from_states(&basis))
}

fn single_input(arg: &str) -> Result<OrthogonalityGraph> {
    let mut inputs = read_inputs(arg)?;
    if inputs.len() != 1 {
        bail!("expected one basis, got {}", inputs.len());
    }
    Ok(inputs.remove(0).1)
}

fn ket_of(g: &OrthogonalityGraph) -> Option<String> {
    basis_from_graph(g).ok().map(|b| format_basis(&b))
}

fn graph_record(g: &OrthogonalityGraph) -> Value {
    json!({
        "p": g.p(),
        "s": g.s(),
        "ket": ket_of(g),
        "profile": profile_of(g).ok().map(|pr| pr.normalized().label()),
        "graph": graph_to_value(g),
    })
}

fn emit(out: &mut impl Write, v: &Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string(v)?)?;
    Ok(())
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Parse { input } => {
            for (text, g) in read_inputs(&input)? {
                if cli.pretty {
                    writeln!(out, "{text}: p={} s={} {}", g.p(), g.s(), ket_of(&g).unwrap_or_default())?;
                } else {
                    emit(&mut out, &graph_record(&g))?;
                }
            }
        }
        Command::Check { input } => {
            let mut all = true;
            for (text, g) in read_inputs(&input)? {
                let verdict = classify(&g);
                all &= verdict.is_upb();
                if cli.pretty {
                    writeln!(out, "{verdict}: {text}")?;
                    continue;
                }
                let mut rec = graph_record(&g);
                rec["verdict"] = json!(verdict.to_string());
                match &verdict {
                    Verdict::NotPairwiseOrthogonal(pairs) => rec["missing_pairs"] = json!(pairs),
                    Verdict::Extendible(w) => rec["witness"] = json!(w.regions),
                    Verdict::Upb => {}
                }
                emit(&mut out, &rec)?;
            }
            if !all {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Canon { input } => {
            for (text, g) in read_inputs(&input)? {
                let key = canonical_key(&g)?;
                let canonical = key.graph();
                if cli.pretty {
                    writeln!(out, "{text} -> {}", ket_of(&canonical).unwrap_or_default())?;
                } else {
                    emit(
                        &mut out,
                        &json!({"key": key.as_str(), "ket": ket_of(&canonical), "graph": graph_to_value(&canonical)}),
                    )?;
                }
            }
        }
        Command::Equiv { first, second } => {
            let (a, b) = (single_input(&first)?, single_input(&second)?);
            let eq = are_equivalent(&a, &b)?;
            if cli.pretty {
                writeln!(out, "{}", if eq { "equivalent" } else { "not equivalent" })?;
            } else {
                emit(&mut out, &json!({ "equivalent": eq }))?;
            }
            if !eq {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Search(args) => return search(args, cli.pretty),
        Command::Profiles { constraints, count } => {
            let c = constraints.constraints()?;
            let e = enumerate_profiles_with_counts(&c);
            if !count {
                for pr in &e.profiles {
                    if cli.pretty {
                        writeln!(out, "{pr}")?;
                    } else {
                        emit(&mut out, &json!({ "profile": pr.label(), "qubits": pr.qubits }))?;
                    }
                }
            }
            if cli.pretty {
                writeln!(out, "{} profiles ({:?})", e.counts.kept, e.counts)?;
            } else {
                emit(&mut out, &json!({ "counts": e.counts, "constraints": c.describe() }))?;
            }
        }
        Command::Construct(args) => {
            let g = construct(&args)?;
            let verdict = classify(&g);
            if cli.pretty {
                writeln!(out, "{verdict}: {}", ket_of(&g).unwrap_or_default())?;
            } else {
                let mut rec = graph_record(&g);
                rec["verdict"] = json!(verdict.to_string());
                emit(&mut out, &rec)?;
            }
        }
        Command::Sizes { p } => {
            if p == 0 || p > 40 {
                bail!("--p must be between 1 and 40");
            }
            let cat = attainable_sizes(p);
            if cli.pretty {
                writeln!(out, "p = {p}, smallest nontrivial size {}", min_size(p))?;
                writeln!(out, "attainable: {}", cat.attainable)?;
                writeln!(out, "impossible: {}", cat.impossible)?;
                writeln!(out, "unknown:    {}", cat.unknown)?;
                writeln!(out, "largest gap: {} proven, {} possible", cat.proven_gap, cat.possible_gap)?;
            } else {
                emit(
                    &mut out,
                    &json!({
                        "p": p,
                        "min_size": min_size(p),
                        "attainable": cat.attainable.to_string(),
                        "impossible": cat.impossible.to_string(),
                        "unknown": cat.unknown.to_string(),
                        "proven_gap": cat.proven_gap,
                        "possible_gap": cat.possible_gap,
                        "attainable_by": cat.attainable_by.iter().map(|(src, set)| json!({"source": format!("{src:?}"), "sizes": set.to_string()})).collect::<Vec<_>>(),
                    }),
                )?;
            }
        }
        Command::Merge { inputs, output } => {
            let mut catalogs = Vec::new();
            for path in &inputs {
                let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
                catalogs.push(Catalog::read_from(BufReader::new(f)).with_context(|| format!("reading {}", path.display()))?);
            }
            let merged = merge_catalogs(catalogs)?;
            let mut w = open_output(&output)?;
            merged.write_to(&mut w)?;
            w.flush()?;
            if output.is_some() {
                emit(&mut out, &json!({"p": merged.p, "s": merged.s, "classes": merged.len()}))?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn construct(args: &ConstructArgs) -> Result<OrthogonalityGraph> {
    let need = |v: Option<usize>, name: &str| v.with_context(|| format!("--{name} is required for this method"));
    Ok(match args.method {
        Method::Shifts => graph_from_states(&shifts()),
        Method::Standard => graph_from_states(&standard_basis(need(args.p, "p")?)),
        Method::Mult4 => build_multiple_of_four(need(args.p, "p")?, need(args.s, "s")?)?,
        Method::Combine => {
            let [a, b] = args.inputs.as_slice() else {
                bail!("combine needs exactly two --input values");
            };
            combine(&single_input(a)?, &single_input(b)?)?
        }
        Method::Split => {
            let [a] = args.inputs.as_slice() else {
                bail!("split needs exactly one --input value");
            };
            split_qubit(&single_input(a)?, need(args.qubit, "qubit")?)?
        }
    })
}

fn search(args: SearchArgs, pretty: bool) -> Result<ExitCode> {
    let c = args.constraints.constraints()?;
    if args.workers == Some(0) {
        bail!("--workers must be at least 1");
    }
    let opts = SearchOptions {
        workers: args.workers,
        resume: args.resume.clone(),
        cancel: None,
        unit_limit: args.unit_limit,
    };
    let outcome = match full_search(&c, &opts) {
        Ok(o) => o,
        Err(SearchError::Interrupted { resume, completed, total }) => {
            let msg = json!({
                "interrupted": true,
                "completed_units": completed,
                "total_units": total,
                "resume": resume.map(|p| p.display().to_string()),
            });
            eprintln!("{}", serde_json::to_string(&msg)?);
            return Ok(ExitCode::from(1));
        }
        Err(e) => return Err(e.into()),
    };
    let mut w = open_output(&args.output)?;
    outcome.catalog.write_to(&mut w)?;
    w.flush()?;
    drop(w);
    let r = &outcome.report;
    if let Some(path) = &args.report {
        let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        serde_json::to_writer_pretty(BufWriter::new(f), r)?;
    }
    let summary = json!({
        "p": r.p,
        "s": r.s,
        "classes": r.classes,
        "raw_graphs": r.raw_graphs,
        "profiles": r.profiles,
        "profiles_searched": r.profiles_searched,
        "units_resumed": r.units_resumed,
        "millis": { "enumerate": r.enumerate_millis, "search": r.search_millis, "dedupe": r.dedupe_millis },
    });
    // The catalog owns stdout when no output file is given.
    let text = if pretty {
        format!(
            "({}, {}): {} classes from {} raw graphs over {} profiles",
            r.p, r.s, r.classes, r.raw_graphs, r.profiles_searched
        )
    } else {
        serde_json::to_string(&summary)?
    };
    if args.output.is_some() {
        println!("{text}");
    } else {
        eprintln!("{text}");
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
