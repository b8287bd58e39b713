//! Stratified 10-fold cross-validation of a CHAID model, printing the pooled
//! classification matrix with per-class recall.
//!
//! Run with: cargo run --example cross_validate

use chaid::eval::{cross_validate, format_confusion_matrix};
use chaid::schema::parse_schema;
use chaid::synth::{generate, parse_effect_spec};
use chaid::tree::ChaidParams;

fn fixture(name: &str) -> String {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).expect("fixture present")
}

fn main() -> Result<(), chaid::Error> {
    let schema = parse_schema(&fixture("synthetic_schema.txt"))?;
    let spec = parse_effect_spec(&fixture("effects_example.txt"), &schema)?;
    let dataset = generate(&schema, 2000, 0, &spec)?;

    let report = cross_validate(&dataset, &ChaidParams::default(), 10, 0)?;
    print!("{}", format_confusion_matrix(&report.pooled, &report.summary));
    println!(
        "per-fold accuracies: {}",
        report
            .fold_accuracies
            .iter()
            .map(|a| format!("{:.3}", a))
            .collect::<Vec<_>>()
            .join(" ")
    );
    Ok(())
}
