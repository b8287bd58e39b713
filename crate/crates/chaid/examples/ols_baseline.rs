//! Fit the ordinal-encoded least-squares baseline and compare its training
//! and held-out accuracy against a CHAID tree on the same data.
//!
//! Run with: cargo run --example ols_baseline

use chaid::baseline::{cross_validate_baseline, fit_baseline, training_accuracy};
use chaid::eval::cross_validate;
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
    let dataset = generate(&schema, 1500, 13, &spec)?;

    let model = fit_baseline(&dataset)?;
    println!("intercept: {:.4}", model.intercept);
    for (name, coef) in model.variables.iter().zip(&model.coefficients) {
        println!("  {name:<10} {coef:>8.4}");
    }
    println!("baseline training accuracy: {:.2}%", 100.0 * training_accuracy(&model, &dataset)?);
    println!(
        "baseline 10-fold accuracy:  {:.2}%",
        100.0 * cross_validate_baseline(&dataset, 10, 0)?
    );

    let chaid_report = cross_validate(&dataset, &ChaidParams::default(), 10, 0)?;
    println!("CHAID 10-fold accuracy:     {:.2}%", 100.0 * chaid_report.overall_accuracy);
    Ok(())
}
