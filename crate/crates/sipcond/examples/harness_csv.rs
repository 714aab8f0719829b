//! Driving the harness from code: a `key = value` config, a subcommand run,
//! and the CSV table it writes, parsed back.
//!
//! ```bash
//! cargo run --release -p sipcond --example harness_csv
//! ```

use sipcond::harness::commands;
use sipcond::harness::config::ExperimentConfig;
use sipcond::harness::table::ResultTable;

fn main() -> sipcond::Result<()> {
    let cfg = ExperimentConfig::parse_str(
        "variance",
        "gamma = 1\nrho = 1\nns = 10, 20\ntimes = 0.05\nconvention = reversible\n",
    )?;
    let table = commands::run(&cfg)?;
    let text = table.render()?;
    print!("{text}");

    let back = ResultTable::parse(&text)?;
    assert_eq!(back.body()?, table.body()?);
    println!("re-parsed {} rows, config hash {}", back.rows.len(), back.get_meta("config_hash").unwrap_or("?"));
    Ok(())
}
