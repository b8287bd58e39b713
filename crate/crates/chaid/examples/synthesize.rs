//! Generate a seeded synthetic dataset and write it as CSV to stdout.
//!
//! Run with: cargo run --example synthesize > data.csv

use chaid::schema::parse_schema;
use chaid::synth::{generate, parse_effect_spec};

fn fixture(name: &str) -> String {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).expect("fixture present")
}

fn main() -> Result<(), chaid::Error> {
    let schema = parse_schema(&fixture("synthetic_schema.txt"))?;
    let spec = parse_effect_spec(&fixture("effects_example.txt"), &schema)?;
    let dataset = generate(&schema, 500, 1, &spec)?;
    print!("{}", dataset.to_csv());
    Ok(())
}
