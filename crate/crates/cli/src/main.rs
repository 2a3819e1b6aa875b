use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use conrel_core::config::{InputSpec, Prepared, RunConfig};
use conrel_core::grouping::{reduction_report, GroupSpec, GroupingMethod, Partition, Selection};
use conrel_core::pipeline::{self, load_inputs, run_documents, write_atomically};
use conrel_core::relations::{count_by_kind, mine_relations, relations_to_csv, RelationKind, Scope};
use conrel_core::ConstraintGraph;

#[derive(Parser)]
#[command(name = "conrel", version, about = "Mine constraint sentences and their relations from regulatory text")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write all six artifacts.
    Analyze(RunArgs),
    /// Extract and group constraints; writes the partition and reduction CSVs.
    Group(RunArgs),
    /// Extract constraints and mine relations; writes the relations CSV.
    Relations(RunArgs),
    /// Recompute reading reductions from a partition CSV.
    Report(ReportArgs),
    /// Render a graph JSON file as DOT.
    Export(ExportArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long, conflicts_with = "profile")]
    config: Option<PathBuf>,
    /// Bundled profile to start from (e.g. `gdpr`).
    #[arg(long, env = "CONREL_PROFILE")]
    profile: Option<String>,
    /// Input document as `path` or `path=doc_id`; replaces the configured inputs.
    #[arg(long = "input", short, value_name = "PATH[=ID]")]
    inputs: Vec<String>,
    /// Output directory.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Grouping method; switching away from keywords drops configured selections.
    #[arg(long, value_enum)]
    method: Option<Method>,
    /// Number of seed terms for term-frequency grouping.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum)]
    scope: Option<ScopeArg>,
    /// Replace invalid UTF-8 instead of failing.
    #[arg(long)]
    lossy: bool,
    #[command(flatten)]
    selection: SelectionArgs,
}

#[derive(Args)]
struct SelectionArgs {
    /// Target-group selection as `name=group1,group2`; repeatable.
    #[arg(long = "select", value_name = "NAME=GROUPS")]
    selections: Vec<String>,
    /// Add a report row for the `undefined` group.
    #[arg(long)]
    include_undefined_row: bool,
}

#[derive(Args)]
struct ReportArgs {
    /// Partition CSV (`sentence_id,group`).
    #[arg(long)]
    partition: PathBuf,
    /// Directory to write the reduction CSV into; printed to stdout otherwise.
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[command(flatten)]
    selection: SelectionArgs,
}

#[derive(Args)]
struct ExportArgs {
    /// Graph JSON as written by `analyze`.
    #[arg(long)]
    graph: PathBuf,
    /// Output directory for the DOT file; printed to stdout otherwise.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Keyword,
    TermFrequency,
    Structure,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScopeArg {
    AllPairs,
    CrossDocumentOnly,
}

impl SelectionArgs {
    fn parse(&self) -> Result<Vec<Selection>> {
        self.selections
            .iter()
            .map(|s| Selection::parse(s).map_err(Into::into))
            .collect()
    }
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = match (&self.config, &self.profile) {
            (Some(path), _) => {
                RunConfig::load(path).with_context(|| format!("config: cannot load {}", path.display()))?
            }
            (None, Some(name)) => RunConfig::bundled(name)?,
            (None, None) => RunConfig::default(),
        };
        if !self.inputs.is_empty() {
            cfg.inputs = self.inputs.iter().map(|s| InputSpec::parse(s)).collect();
        }
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        if let Some(method) = self.method {
            let keyword_groups = std::mem::take(&mut cfg.grouping.keyword_groups);
            cfg.grouping = match method {
                Method::Keyword => GroupSpec::keywords(keyword_groups),
                Method::TermFrequency => GroupSpec::term_frequency(cfg.grouping.k.unwrap_or(5)),
                Method::Structure => GroupSpec::structure(),
            };
            if cfg.grouping.method != GroupingMethod::Keyword {
                cfg.selections.clear();
            }
        }
        if let Some(k) = self.k {
            cfg.grouping.k = Some(k);
        }
        if let Some(scope) = self.scope {
            cfg.scope = match scope {
                ScopeArg::AllPairs => Scope::AllPairs,
                ScopeArg::CrossDocumentOnly => Scope::CrossDocumentOnly,
            };
        }
        cfg.lossy_utf8 |= self.lossy;
        let selections = self.selection.parse()?;
        if !selections.is_empty() {
            cfg.selections = selections;
        }
        cfg.include_undefined_row |= self.selection.include_undefined_row;
        Ok(cfg)
    }

    /// Validated config, its compiled stages and the loaded documents.
    fn load(&self) -> Result<(RunConfig, Prepared, Vec<conrel_core::Document>)> {
        let cfg = self.config()?;
        let prepared = cfg.prepare()?;
        if cfg.inputs.is_empty() {
            anyhow::bail!("config: no input documents (use --input)");
        }
        let docs = load_inputs(&cfg)?;
        Ok((cfg, prepared, docs))
    }
}

fn analyze(args: &RunArgs) -> Result<()> {
    let (cfg, prepared, docs) = args.load()?;
    let result = run_documents(&prepared, &docs)?;
    result.write_artifacts(&cfg.output_dir)?;
    print!("{}", result.summary());
    println!();
    print!("{}", result.report.to_table());
    println!("artifacts written to {}", cfg.output_dir.display());
    Ok(())
}

fn group(args: &RunArgs) -> Result<()> {
    let (cfg, prepared, docs) = args.load()?;
    let sentences = pipeline::segment(&prepared, &docs);
    let constraints = pipeline::extract_constraints(&prepared, &sentences);
    let partition = prepared.grouper.group(&constraints);
    let report = reduction_report(&partition, &prepared.selections, prepared.include_undefined_row)?;
    write_atomically(
        &cfg.output_dir,
        &[
            (pipeline::PARTITION_CSV, partition.to_csv()?),
            (pipeline::REDUCTION_CSV, report.to_csv()?),
        ],
    )?;
    println!("constraints: {}", constraints.len());
    for (name, ids) in partition.groups() {
        println!("  {name}: {}", ids.len());
    }
    println!();
    print!("{}", report.to_table());
    Ok(())
}

fn relations(args: &RunArgs) -> Result<()> {
    let (cfg, prepared, docs) = args.load()?;
    let sentences = pipeline::segment(&prepared, &docs);
    let constraints = pipeline::extract_constraints(&prepared, &sentences);
    let relations = mine_relations(&constraints, &prepared.thresholds, prepared.scope);
    write_atomically(&cfg.output_dir, &[(pipeline::RELATIONS_CSV, relations_to_csv(&relations)?)])?;
    let counts = count_by_kind(&relations);
    println!("constraints: {}", constraints.len());
    for kind in [RelationKind::Redundant, RelationKind::Subsumed, RelationKind::Conflicting] {
        println!("  {kind}: {}", counts.get(&kind).copied().unwrap_or(0));
    }
    Ok(())
}

fn report(args: &ReportArgs) -> Result<()> {
    let file = File::open(&args.partition).with_context(|| format!("io: {}", args.partition.display()))?;
    let partition = Partition::from_csv(file, &args.partition.display().to_string())?;
    let selections = args.selection.parse()?;
    let report = reduction_report(&partition, &selections, args.selection.include_undefined_row)?;
    print!("{}", report.to_table());
    match &args.out {
        Some(dir) => {
            write_atomically(dir, &[(pipeline::REDUCTION_CSV, report.to_csv()?)])?;
        }
        None => {
            println!();
            print!("{}", report.to_csv()?);
        }
    }
    Ok(())
}

fn export(args: &ExportArgs) -> Result<()> {
    let text = read_to_string(&args.graph)?;
    let graph = ConstraintGraph::from_json(&text)?;
    match &args.out {
        Some(dir) => {
            write_atomically(dir, &[(pipeline::GRAPH_DOT, graph.to_dot())])?;
        }
        None => print!("{}", graph.to_dot()),
    }
    Ok(())
}

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("io: {}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Group(a) => group(a),
        Command::Relations(a) => relations(a),
        Command::Report(a) => report(a),
        Command::Export(a) => export(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
