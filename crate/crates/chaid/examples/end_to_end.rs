//! The full pipeline in library calls: synthesize → clean → rank features →
//! train on the selected features → extract rules → cross-validate.
//!
//! Run with: cargo run --example end_to_end

use chaid::eval::{cross_validate, format_confusion_matrix};
use chaid::features::{filter_by_pvalue, score_features};
use chaid::rules::{extract_rules, format_ruleset, prune_rules};
use chaid::schema::{clean_dataset, load_dataset, parse_schema, CleanPolicy};
use chaid::synth::{generate, parse_effect_spec};
use chaid::tree::{grow_tree, ChaidParams};

fn fixture(name: &str) -> String {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).expect("fixture present")
}

fn main() -> Result<(), chaid::Error> {
    let schema = parse_schema(&fixture("synthetic_schema.txt"))?;
    let spec = parse_effect_spec(&fixture("effects_example.txt"), &schema)?;

    // synthesize, round-trip through CSV like a real ingestion, and clean
    let csv = generate(&schema, 2000, 99, &spec)?.to_csv();
    let (raw, rejects) = load_dataset(&csv, &schema)?;
    println!("ingested {} records ({} rejected)", raw.len(), rejects.len());
    let dataset = clean_dataset(&raw, CleanPolicy::DropIncomplete);

    // select features by p-value
    let scores = score_features(&dataset)?;
    let selected = filter_by_pvalue(&scores, 0.05);
    println!("selected predictors: {}", selected.join(", "));

    // train on the selected features and show the strongest rules
    let tree = grow_tree(&dataset, &selected, &ChaidParams::default())?;
    let ruleset = prune_rules(&extract_rules(&tree), 50);
    println!("\nrules with support >= 50:");
    print!("{}", format_ruleset(&ruleset));

    // held-out performance
    let report = cross_validate(&dataset, &ChaidParams::default(), 10, 0)?;
    println!();
    print!("{}", format_confusion_matrix(&report.pooled, &report.summary));
    Ok(())
}
