use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use cqa_core::conflict::{ConflictHypergraph, DEFAULT_EDGE_BUDGET};
use cqa_core::engine::{cqa_answer, rewrite_single_fd, Answer, EngineOptions, Outcome, Strategy};
use cqa_core::oracle::{exists_falsifying_repair, RepairOracle, DEFAULT_ORACLE_BUDGET};
use cqa_core::query::{eval_fo, parse_phi, parse_query};
use cqa_core::reductions::{
    brute_3col, brute_sat, gen_3col, gen_3sat_yfree, gen_monotone3sat, CnfFormula, Graph, Reduction,
};
use cqa_core::{
    is_consistent, parse_constraints, read_instance, serialize_instance, AttrType, ConstraintSet,
    CqaError, Fd, Instance, Schema, Tuple,
};

#[derive(Parser)]
#[command(name = "cqa", version, about = "Consistent query answering over an inconsistent relation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Json,
    Table,
}

#[derive(Args)]
struct Data {
    /// CSV file with a typed header (`name:sym`, `name:num`).
    #[arg(long)]
    instance: PathBuf,
    /// Constraint DSL file; no constraints when omitted.
    #[arg(long)]
    constraints: Option<PathBuf>,
    /// Relation name when the CSV has no `# relation:` line.
    #[arg(long, default_value = "R")]
    relation: String,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long, default_value_t = DEFAULT_EDGE_BUDGET, value_parser = clap::value_parser!(u64).range(1..))]
    edge_budget: u64,
    #[arg(long, default_value_t = DEFAULT_ORACLE_BUDGET, value_parser = clap::value_parser!(u64).range(1..))]
    oracle_budget: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReductionKind {
    Monotone3sat,
    Threecol,
    Yfree,
}

#[derive(Subcommand)]
enum Command {
    /// Reports whether the instance satisfies the constraints.
    Check {
        #[command(flatten)]
        data: Data,
    },
    /// Counts the repairs, or lists them one JSON array per line.
    Repairs {
        #[command(flatten)]
        data: Data,
        #[arg(long, conflicts_with = "count")]
        enumerate: bool,
        #[arg(long)]
        count: bool,
    },
    /// Answers a query consistently.
    Answer {
        #[command(flatten)]
        data: Data,
        #[arg(long, required_unless_present = "query_file", conflicts_with = "query_file")]
        query: Option<String>,
        #[arg(long)]
        query_file: Option<PathBuf>,
        #[arg(long, default_value = "auto")]
        strategy: Strategy,
        /// Worker threads for clause checks.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        threads: u64,
        /// Print the parsed query as JSON too.
        #[arg(long)]
        show_ast: bool,
        #[arg(long)]
        timings: bool,
    },
    /// Prints the first-order rewriting for one FD and a selection formula.
    Rewrite {
        /// Takes the schema from this CSV and evaluates the rewriting on it.
        #[arg(long, required_unless_present = "schema")]
        instance: Option<PathBuf>,
        /// Schema as `A:sym,B:num` when no instance is given.
        #[arg(long, conflicts_with = "instance")]
        schema: Option<String>,
        #[arg(long, default_value = "R")]
        relation: String,
        #[arg(long)]
        fd: String,
        #[arg(long, default_value = "true")]
        phi: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Builds a CQA instance from a formula (DIMACS) or graph (edge list).
    Gen {
        #[arg(value_enum)]
        reduction: ReductionKind,
        #[arg(long)]
        input: PathBuf,
        /// Writes `<prefix>.csv`, `<prefix>.dsl` and `<prefix>.query`.
        #[arg(long)]
        out_prefix: PathBuf,
        /// Skip the brute-force and oracle cross-check.
        #[arg(long)]
        large: bool,
    },
    /// Conflict hypergraph statistics.
    Hypergraph {
        #[command(flatten)]
        data: Data,
        #[arg(long)]
        stats: bool,
        /// Drop edges that contain a smaller edge before counting.
        #[arg(long)]
        minimize_edges: bool,
    },
    /// Runs the differential suites against the repair oracle.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        cases: usize,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        threads: u64,
    },
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn in_file<T>(path: &Path, r: cqa_core::Result<T>) -> Result<T> {
    r.with_context(|| path.display().to_string())
}

fn load(data: &Data) -> Result<(Instance, ConstraintSet)> {
    let instance = in_file(&data.instance, read_instance(&read_file(&data.instance)?, &data.relation))?;
    let cs = match &data.constraints {
        Some(p) => in_file(p, parse_constraints(&read_file(p)?, instance.schema()))?,
        None => ConstraintSet::new(instance.schema().clone()),
    };
    Ok((instance, cs))
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json values serialize"));
}

/// Left-aligned columns under a header row.
fn table(header: &[String], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(String::len).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let line = |cells: &[String]| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        parts.join("  ").trim_end().to_string()
    };
    let mut out = line(header);
    out.push('\n');
    for r in rows {
        out.push_str(&line(r));
        out.push('\n');
    }
    out
}

fn tuple_rows(tuples: &[Tuple]) -> Vec<Vec<String>> {
    tuples
        .iter()
        .map(|t| t.values().iter().map(|v| v.to_string()).collect())
        .collect()
}

fn attribute_names(schema: &Schema) -> Vec<String> {
    schema.attributes().iter().map(|a| a.name.clone()).collect()
}

fn cmd_check(data: &Data) -> Result<()> {
    let (instance, cs) = load(data)?;
    let consistent = is_consistent(&instance, &cs);
    match data.format {
        Format::Json if consistent => print_json(&json!({ "consistent": true })),
        Format::Json => {
            let graph = ConflictHypergraph::lazy(&instance, &cs)?;
            let conflicting = graph.stats();
            print_json(&json!({
                "consistent": false,
                "conflicts": conflicting.edge_count,
                "conflicting_tuples": conflicting.vertex_count - conflicting.isolated_vertex_count,
            }))
        }
        Format::Table => println!("{}", if consistent { "consistent" } else { "inconsistent" }),
    }
    Ok(())
}

fn cmd_repairs(data: &Data, enumerate: bool) -> Result<()> {
    let (instance, cs) = load(data)?;
    let oracle = RepairOracle::with_edge_budget(&instance, &cs, data.edge_budget)?
        .with_budget(data.oracle_budget);
    if !enumerate {
        let n = oracle.count()?;
        match data.format {
            Format::Json => {
                let count = u64::try_from(&n).map_or_else(|_| json!(n.to_string()), |v| json!(v));
                print_json(&json!({ "count": count }))
            }
            Format::Table => println!("{n}"),
        }
        return Ok(());
    }
    let repairs: Vec<Vec<Tuple>> = oracle
        .repairs()?
        .into_iter()
        .map(|ids| ids.into_iter().map(|v| instance.tuple(v).clone()).collect())
        .collect();
    match data.format {
        Format::Json => {
            for r in &repairs {
                println!("{}", serde_json::to_string(r)?);
            }
        }
        Format::Table => {
            let header = attribute_names(instance.schema());
            for (i, r) in repairs.iter().enumerate() {
                println!("repair {}:", i + 1);
                print!("{}", table(&header, &tuple_rows(r)));
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_answer(
    data: &Data,
    query: Option<&str>,
    query_file: Option<&Path>,
    strategy: Strategy,
    threads: usize,
    show_ast: bool,
    timings: bool,
) -> Result<()> {
    let (instance, cs) = load(data)?;
    let query = match (query, query_file) {
        (Some(text), _) => parse_query(text, instance.schema()).context("--query")?,
        (None, Some(p)) => in_file(p, parse_query(read_file(p)?.trim(), instance.schema()))?,
        (None, None) => bail!("one of --query or --query-file is required"),
    };
    let options = EngineOptions {
        oracle_budget: data.oracle_budget,
        edge_budget: data.edge_budget,
        threads,
    };
    let outcome = cqa_answer(&instance, &cs, &query, strategy, &options)?;
    match data.format {
        Format::Json => {
            let mut v = serde_json::to_value(&outcome)?;
            if show_ast {
                v["query"] = serde_json::to_value(query.formula())?;
            }
            if timings {
                v["elapsed_ms"] = json!(outcome.elapsed.as_secs_f64() * 1000.0);
            }
            print_json(&v);
        }
        Format::Table => {
            if show_ast {
                println!("query: {query}");
            }
            print_outcome_table(&outcome);
            if timings {
                println!("elapsed: {:.3} ms", outcome.elapsed.as_secs_f64() * 1000.0);
            }
        }
    }
    Ok(())
}

fn print_outcome_table(outcome: &Outcome) {
    match &outcome.answer {
        Answer::Status(s) => println!("{s}"),
        Answer::Answers(rows) => {
            let rows: Vec<Vec<String>> = rows
                .iter()
                .map(|r| r.iter().map(|v| v.to_string()).collect())
                .collect();
            print!("{}", table(&outcome.free_vars, &rows));
        }
    }
}

fn parse_schema_spec(relation: &str, spec: &str) -> Result<Schema> {
    let mut attrs = Vec::new();
    for part in spec.split(',') {
        let (name, ty) = part
            .trim()
            .split_once(':')
            .with_context(|| format!("schema field `{part}` must be `name:sym` or `name:num`"))?;
        let ty = AttrType::parse(ty.trim()).with_context(|| format!("unknown type `{ty}`"))?;
        attrs.push((name.trim().to_string(), ty));
    }
    Ok(Schema::new(relation, attrs)?)
}

fn cmd_rewrite(
    instance: Option<&Path>,
    schema: Option<&str>,
    relation: &str,
    fd: &str,
    phi: &str,
    format: Format,
) -> Result<()> {
    let instance = match instance {
        Some(p) => Some(in_file(p, read_instance(&read_file(p)?, relation))?),
        None => None,
    };
    let schema = match (&instance, schema) {
        (Some(r), _) => r.schema().clone(),
        (None, Some(s)) => parse_schema_spec(relation, s)?,
        (None, None) => bail!("one of --instance or --schema is required"),
    };
    let fd = Fd::parse(fd, &schema).context("--fd")?;
    let phi = parse_phi(phi, &schema).context("--phi")?;
    let rewritten = rewrite_single_fd(&fd, &schema, &phi)?;
    let holds = match &instance {
        Some(r) => Some(eval_fo(r, &rewritten, &Default::default())?),
        None => None,
    };
    match format {
        Format::Json => {
            let mut v = json!({ "rewriting": rewritten.to_string() });
            if let Some(h) = holds {
                v["consistently_true"] = json!(h);
            }
            print_json(&v);
        }
        Format::Table => {
            println!("{rewritten}");
            if let Some(h) = holds {
                println!("consistently true: {h}");
            }
        }
    }
    Ok(())
}

fn with_suffix(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn cmd_gen(kind: ReductionKind, input: &Path, prefix: &Path, large: bool) -> Result<()> {
    let text = read_file(input)?;
    let (reduction, source): (Reduction, Option<bool>) = match kind {
        ReductionKind::Monotone3sat | ReductionKind::Yfree => {
            let f = in_file(input, CnfFormula::parse_dimacs(&text))?;
            let r = if matches!(kind, ReductionKind::Monotone3sat) {
                gen_monotone3sat(&f)?
            } else {
                gen_3sat_yfree(&f)?
            };
            (r, if large { None } else { Some(brute_sat(&f)?) })
        }
        ReductionKind::Threecol => {
            let g = in_file(input, Graph::parse_edge_list(&text))?;
            (gen_3col(&g)?, if large { None } else { Some(brute_3col(&g)?) })
        }
    };
    let files = [
        (with_suffix(prefix, "csv"), serialize_instance(&reduction.instance)),
        (with_suffix(prefix, "dsl"), reduction.constraints.to_string()),
        (with_suffix(prefix, "query"), format!("{}\n", reduction.query)),
    ];
    for (path, body) in &files {
        fs::write(path, body).with_context(|| format!("cannot write {}", path.display()))?;
    }
    let mut report = json!({
        "facts": reduction.instance.len(),
        "files": files.iter().map(|(p, _)| p.display().to_string()).collect::<Vec<_>>(),
    });
    if let Some(yes) = source {
        let falsified =
            exists_falsifying_repair(&reduction.instance, &reduction.constraints, &reduction.query)?;
        report["source_yes"] = json!(yes);
        report["falsifying_repair"] = json!(falsified);
        if yes != falsified {
            bail!("verification failed: source answer {yes}, falsifying repair {falsified}");
        }
    }
    print_json(&report);
    Ok(())
}

fn cmd_hypergraph(data: &Data, minimize: bool) -> Result<()> {
    let (instance, cs) = load(data)?;
    let graph = ConflictHypergraph::materialize_with_budget(&instance, &cs, data.edge_budget)?;
    let stats = if minimize { graph.minimized_stats() } else { graph.stats() };
    match data.format {
        Format::Json => print_json(&serde_json::to_value(&stats)?),
        Format::Table => {
            println!("vertices  {}", stats.vertex_count);
            println!("edges     {}", stats.edge_count);
            println!("isolated  {}", stats.isolated_vertex_count);
            for (size, n) in &stats.edge_size_histogram {
                println!("size {size}    {n}");
            }
        }
    }
    Ok(())
}

fn cmd_selftest(seed: u64, cases: usize, threads: usize) -> Result<()> {
    let reports = cqa_core::selftest::run_all(seed, cases, threads);
    print_json(&serde_json::to_value(&reports)?);
    let failed: Vec<&str> = reports
        .iter()
        .filter(|r| !r.passed())
        .map(|r| r.name.as_str())
        .collect();
    if !failed.is_empty() {
        bail!("suites failed: {}", failed.join(", "));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Check { data } => cmd_check(&data),
        Command::Repairs { data, enumerate, .. } => cmd_repairs(&data, enumerate),
        Command::Answer {
            data,
            query,
            query_file,
            strategy,
            threads,
            show_ast,
            timings,
        } => cmd_answer(
            &data,
            query.as_deref(),
            query_file.as_deref(),
            strategy,
            threads as usize,
            show_ast,
            timings,
        ),
        Command::Rewrite {
            instance,
            schema,
            relation,
            fd,
            phi,
            format,
        } => cmd_rewrite(instance.as_deref(), schema.as_deref(), &relation, &fd, &phi, format),
        Command::Gen {
            reduction,
            input,
            out_prefix,
            large,
        } => cmd_gen(reduction, &input, &out_prefix, large),
        Command::Hypergraph {
            data,
            minimize_edges,
            ..
        } => cmd_hypergraph(&data, minimize_edges),
        Command::Selftest {
            seed,
            cases,
            threads,
        } => cmd_selftest(seed, cases, threads as usize),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<CqaError>()) {
        Some(e) if e.is_budget() => 3,
        Some(CqaError::StrategyMismatch { .. }) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
