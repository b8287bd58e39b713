//! Grow a tree and print its Graphviz DOT rendering.
//!
//! Run with: cargo run --example export_dot | dot -Tpng > tree.png

use chaid::schema::parse_schema;
use chaid::synth::{generate, parse_effect_spec};
use chaid::tree::{export_tree, grow_tree, ChaidParams, ExportFormat};

fn fixture(name: &str) -> String {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).expect("fixture present")
}

fn main() -> Result<(), chaid::Error> {
    let schema = parse_schema(&fixture("synthetic_schema.txt"))?;
    let spec = parse_effect_spec(&fixture("effects_example.txt"), &schema)?;
    let dataset = generate(&schema, 1200, 21, &spec)?;

    let predictors: Vec<String> = schema
        .predictor_indices()
        .iter()
        .map(|&i| schema.variable(i).name.clone())
        .collect();
    let tree = grow_tree(&dataset, &predictors, &ChaidParams::default())?;
    print!("{}", export_tree(&tree, ExportFormat::Dot));
    Ok(())
}
