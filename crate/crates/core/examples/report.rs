//! The full verification report, printed as CSV.

use discrete_oscillator::suite::{default_report, SuiteConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let report = default_report(&SuiteConfig::default())?;
    print!("{}", report.to_csv()?);
    eprintln!("all checks pass: {}", report.pass);
    Ok(())
}
