//! Grow a CHAID tree on synthetic data and print its decision rules.
//!
//! Run with: cargo run --example train_and_rules

use chaid::rules::{extract_rules, format_ruleset, prune_rules};
use chaid::schema::parse_schema;
use chaid::synth::{generate, parse_effect_spec};
use chaid::tree::{grow_tree, ChaidParams};

fn fixture(name: &str) -> String {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).expect("fixture present")
}

fn main() -> Result<(), chaid::Error> {
    let schema = parse_schema(&fixture("synthetic_schema.txt"))?;
    let spec = parse_effect_spec(&fixture("effects_example.txt"), &schema)?;
    let dataset = generate(&schema, 1500, 7, &spec)?;

    let predictors: Vec<String> = schema
        .predictor_indices()
        .iter()
        .map(|&i| schema.variable(i).name.clone())
        .collect();
    let tree = grow_tree(&dataset, &predictors, &ChaidParams::default())?;

    let ruleset = prune_rules(&extract_rules(&tree), 20);
    print!("{}", format_ruleset(&ruleset));
    Ok(())
}
