//! Terminal entry point wiring the modules into the full workflow:
//! feature selection → train → rules → evaluate, plus synth, export, predict,
//! and the regression baseline.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::baseline;
use crate::error::{Error, Result};
use crate::eval;
use crate::features::{self, RankBy};
use crate::rules;
use crate::schema::{self, CleanPolicy, Dataset, DatasetSchema};
use crate::synth;
use crate::tree::{self, ChaidParams, ExportFormat};

/// Environment variable consulted when `--schema` is not given.
pub const SCHEMA_ENV: &str = "CHAID_SCHEMA";

#[derive(Parser, Debug)]
#[command(
    name = "chaid",
    about = "CHAID decision trees for categorical data",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rank predictors by chi-square association with the response
    Featsel(FeatselArgs),
    /// Train a CHAID tree and persist it as a model file
    Train(TrainArgs),
    /// Predict classes for a CSV using a trained model
    Predict(PredictArgs),
    /// Print the IF-THEN rules of a trained model
    Rules(RulesArgs),
    /// Cross-validate a CHAID model and print the classification matrix
    Eval(EvalArgs),
    /// Generate a synthetic dataset from a schema and optional effect spec
    Synth(SynthArgs),
    /// Export a trained model as DOT or structured text
    Export(ExportArgs),
    /// Fit the ordinal-encoded least-squares baseline
    Baseline(BaselineArgs),
}

#[derive(Args, Debug)]
struct DataArgs {
    /// CSV data file
    #[arg(long)]
    data: PathBuf,
    /// Schema file (falls back to $CHAID_SCHEMA)
    #[arg(long)]
    schema: Option<PathBuf>,
    /// Keep records with missing values instead of dropping them
    #[arg(long)]
    keep_incomplete: bool,
}

#[derive(Args, Debug, Clone, Copy)]
struct ParamArgs {
    /// Significance level for category merging
    #[arg(long, default_value_t = 0.05)]
    alpha_merge: f64,
    /// Significance level for accepting a split
    #[arg(long, default_value_t = 0.05)]
    alpha_split: f64,
    /// Minimum records for a node to be split
    #[arg(long, default_value_t = 20)]
    min_parent: u32,
    /// Minimum records per child
    #[arg(long, default_value_t = 10)]
    min_child: u32,
    /// Maximum tree depth
    #[arg(long, default_value_t = 6)]
    max_depth: u32,
    /// Disable the grouping-count multiplicity correction
    #[arg(long)]
    no_bonferroni: bool,
}

impl ParamArgs {
    fn to_params(self) -> ChaidParams {
        ChaidParams {
            alpha_merge: self.alpha_merge,
            alpha_split: self.alpha_split,
            min_parent: self.min_parent,
            min_child: self.min_child,
            max_depth: self.max_depth,
            use_bonferroni: !self.no_bonferroni,
        }
    }
}

#[derive(Args, Debug)]
struct FeatselArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Keep variables with statistic strictly above this value
    #[arg(long, default_value_t = 100.0)]
    threshold: f64,
    /// Rank and filter by p-value instead of raw statistic
    #[arg(long)]
    by_pvalue: bool,
    /// Significance level used with --by-pvalue
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Write the filtered variable list to this file
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    params: ParamArgs,
    /// Comma-separated predictor names (default: all non-response variables)
    #[arg(long, value_delimiter = ',')]
    features: Vec<String>,
    /// Model output path (structured text); stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PredictArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Trained model file
    #[arg(long)]
    model: PathBuf,
    /// Output CSV with a trailing `predicted` column; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RulesArgs {
    /// Trained model file
    #[arg(long)]
    model: PathBuf,
    /// Drop rules whose support is below this count
    #[arg(long, default_value_t = 0)]
    min_support: u32,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    params: ParamArgs,
    /// Number of folds
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Fold-shuffle seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// Schema file (falls back to $CHAID_SCHEMA)
    #[arg(long)]
    schema: Option<PathBuf>,
    /// Number of records
    #[arg(long)]
    n: usize,
    /// Generator seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Effect-spec file (default: uniform base, no effects)
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Output CSV path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExportArgs {
    /// Trained model file
    #[arg(long)]
    model: PathBuf,
    /// Output format
    #[arg(long, value_parser = ["dot", "structured"], default_value = "dot")]
    format: String,
    /// Output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BaselineArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Number of folds for held-out accuracy
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Fold-shuffle seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Run the CLI. Returns the process exit status: 0 on success, 1 on a module
/// error, 2 on a usage error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders its own help/version output
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Featsel(a) => cmd_featsel(a),
        Command::Train(a) => cmd_train(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Rules(a) => cmd_rules(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Synth(a) => cmd_synth(a),
        Command::Export(a) => cmd_export(a),
        Command::Baseline(a) => cmd_baseline(a),
    }
}

fn resolve_schema(path: &Option<PathBuf>) -> Result<DatasetSchema> {
    let path = match path {
        Some(p) => p.clone(),
        None => std::env::var_os(SCHEMA_ENV)
            .map(PathBuf::from)
            .ok_or_else(|| {
                Error::Schema(format!("no --schema given and ${SCHEMA_ENV} is unset"))
            })?,
    };
    let text = fs::read_to_string(&path)?;
    schema::parse_schema(&text)
}

fn load_data(args: &DataArgs) -> Result<Dataset> {
    let schema = resolve_schema(&args.schema)?;
    let csv_text = fs::read_to_string(&args.data)?;
    let (dataset, rejects) = schema::load_dataset(&csv_text, &schema)?;
    if !rejects.is_empty() {
        eprintln!("note: {} row(s) rejected during ingestion", rejects.len());
        for r in rejects.iter().take(10) {
            eprintln!("  row {}: {}", r.row, r.reason);
        }
    }
    let policy = if args.keep_incomplete {
        CleanPolicy::KeepAll
    } else {
        CleanPolicy::DropIncomplete
    };
    let cleaned = schema::clean_dataset(&dataset, policy);
    if cleaned.len() < dataset.len() {
        eprintln!(
            "note: {} incomplete record(s) dropped ({} retained)",
            dataset.len() - cleaned.len(),
            cleaned.len()
        );
    }
    if cleaned.is_empty() {
        return Err(Error::Dataset("no usable records after cleaning".into()));
    }
    Ok(cleaned)
}

fn write_or_print(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_featsel(args: FeatselArgs) -> Result<()> {
    let dataset = load_data(&args.data)?;
    let by = if args.by_pvalue { RankBy::PValue } else { RankBy::Statistic };
    let scores = features::score_features_ranked(&dataset, by)?;
    println!("{:<4} {:<16} {:>12} {:>4} {:>12}", "rank", "variable", "chi-square", "df", "p-value");
    for s in &scores {
        let note = if s.degenerate { "  (degenerate)" } else { "" };
        println!(
            "{:<4} {:<16} {:>12.4} {:>4} {:>12.4e}{note}",
            s.rank, s.variable, s.statistic, s.df, s.p_value
        );
    }
    let selected = if args.by_pvalue {
        features::filter_by_pvalue(&scores, args.alpha)
    } else {
        features::filter_by_threshold(&scores, args.threshold)
    };
    println!();
    if args.by_pvalue {
        println!("selected (p < {}): {}", args.alpha, selected.join(", "));
    } else {
        println!("selected (statistic > {}): {}", args.threshold, selected.join(", "));
    }
    if args.out.is_some() {
        write_or_print(&args.out, &(selected.join("\n") + "\n"))?;
    }
    Ok(())
}

fn train_tree(dataset: &Dataset, features: &[String], params: ChaidParams) -> Result<tree::ChaidTree> {
    let predictors: Vec<String> = if features.is_empty() {
        dataset
            .schema
            .predictor_indices()
            .iter()
            .map(|&i| dataset.schema.variable(i).name.clone())
            .collect()
    } else {
        features.to_vec()
    };
    tree::grow_tree(dataset, &predictors, &params)
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let dataset = load_data(&args.data)?;
    let trained = train_tree(&dataset, &args.features, args.params.to_params())?;
    let text = tree::export_tree(&trained, ExportFormat::Structured);
    match &args.out {
        Some(path) => {
            fs::write(path, &text)?;
            let leaves = rules::extract_rules(&trained).rules.len().max(1);
            println!(
                "trained on {} records; {} terminal node(s); model written to {}",
                trained.root.count,
                leaves,
                path.display()
            );
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn load_model(path: &PathBuf) -> Result<tree::ChaidTree> {
    tree::import_tree(&fs::read_to_string(path)?)
}

fn cmd_predict(args: PredictArgs) -> Result<()> {
    let schema = resolve_schema(&args.data.schema)?;
    let model = load_model(&args.model)?;
    let csv_text = fs::read_to_string(&args.data.data)?;
    let (dataset, rejects) = schema::load_dataset(&csv_text, &schema)?;
    if !rejects.is_empty() {
        eprintln!("note: {} row(s) rejected during ingestion", rejects.len());
    }
    let mut out = String::new();
    let names: Vec<&str> = schema.variables().iter().map(|v| v.name.as_str()).collect();
    out.push_str(&names.join(","));
    out.push_str(",predicted\n");
    for record in &dataset.records {
        let p = tree::predict(&model, &schema, record)?;
        let cells: Vec<String> = record
            .values
            .iter()
            .enumerate()
            .map(|(j, v)| {
                let var = schema.variable(j);
                match v {
                    Some(idx) => var.domain[*idx].clone(),
                    None => var.missing_token.clone(),
                }
            })
            .collect();
        out.push_str(&format!("{},{}\n", cells.join(","), p.class));
    }
    write_or_print(&args.out, &out)
}

fn cmd_rules(args: RulesArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    let ruleset = rules::prune_rules(&rules::extract_rules(&model), args.min_support);
    print!("{}", rules::format_ruleset(&ruleset));
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let dataset = load_data(&args.data)?;
    let report = eval::cross_validate(&dataset, &args.params.to_params(), args.k, args.seed)?;
    print!("{}", eval::format_confusion_matrix(&report.pooled, &report.summary));
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    let schema = resolve_schema(&args.schema)?;
    let spec = match &args.spec {
        Some(path) => synth::parse_effect_spec(&fs::read_to_string(path)?, &schema)?,
        None => synth::EffectSpec::uniform(schema.class_count()),
    };
    let dataset = synth::generate(&schema, args.n, args.seed, &spec)?;
    write_or_print(&args.out, &dataset.to_csv())
}

fn cmd_export(args: ExportArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    let format = match args.format.as_str() {
        "dot" => ExportFormat::Dot,
        _ => ExportFormat::Structured,
    };
    write_or_print(&args.out, &tree::export_tree(&model, format))
}

fn cmd_baseline(args: BaselineArgs) -> Result<()> {
    let dataset = load_data(&args.data)?;
    let model = baseline::fit_baseline(&dataset)?;
    let train_acc = baseline::training_accuracy(&model, &dataset)?;
    let cv_acc = baseline::cross_validate_baseline(&dataset, args.k, args.seed)?;
    println!("ordinal-encoded OLS baseline over {} records", dataset.len());
    println!("training accuracy: {:.2}%", 100.0 * train_acc);
    println!("{}-fold accuracy:   {:.2}%", args.k, 100.0 * cv_acc);
    Ok(())
}
