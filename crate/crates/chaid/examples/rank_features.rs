//! Rank the predictors of a synthetic dataset by chi-square association.
//!
//! Run with: cargo run --example rank_features

use chaid::features::score_features;
use chaid::schema::parse_schema;
use chaid::synth::{generate, parse_effect_spec};

fn fixture(name: &str) -> String {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).expect("fixture present")
}

fn main() -> Result<(), chaid::Error> {
    let schema = parse_schema(&fixture("synthetic_schema.txt"))?;
    let spec = parse_effect_spec(&fixture("effects_example.txt"), &schema)?;
    let dataset = generate(&schema, 1500, 42, &spec)?;

    println!("{:<4} {:<10} {:>12} {:>4} {:>12}", "rank", "variable", "chi-square", "df", "p-value");
    for s in score_features(&dataset)? {
        println!(
            "{:<4} {:<10} {:>12.4} {:>4} {:>12.4e}",
            s.rank, s.variable, s.statistic, s.df, s.p_value
        );
    }
    Ok(())
}
