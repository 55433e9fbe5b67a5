//! Ranks four cars against four weighted criteria and prints every
//! intermediate table of the TOPSIS pipeline.
//!
//! ```text
//! cargo run --example topsis_car
//! ```

use specnego::io::parse_matrix_csv;
use specnego::topsis::topsis;

fn print_row(label: &str, values: &[f64]) {
    let cells: Vec<String> = values.iter().map(|v| format!("{v:8.4}")).collect();
    println!("  {label:<8}{}", cells.join(""));
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let matrix = parse_matrix_csv(include_bytes!("data/cars.csv"))?;
    let result = topsis(&matrix)?;
    let names = matrix.alternatives();

    println!("criteria: {}", matrix.criteria().join(", "));
    println!("normalized:");
    for (name, row) in names.iter().zip(&result.normalized) {
        print_row(name, row);
    }
    println!("weighted:");
    for (name, row) in names.iter().zip(&result.weighted) {
        print_row(name, row);
    }
    print_row("A*", &result.ideal);
    print_row("A'", &result.anti_ideal);

    println!("\n  {:<8}{:>8}{:>8}{:>8}", "", "S*", "S'", "C*");
    for &i in &result.ranking {
        println!(
            "  {:<8}{:8.4}{:8.4}{:8.4}",
            names[i], result.sep_ideal[i], result.sep_anti[i], result.closeness[i]
        );
    }
    println!("\nbest: {}, worst: {}", names[result.best()], names[result.worst()]);
    Ok(())
}
