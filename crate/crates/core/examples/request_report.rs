//! Runs a request file through the driver and prints the summary and the
//! text rendering of a window.

use subtile::io::{run, AnalysisRequest};

const REQUEST: &str = "
[command]
render
[substitution]
a -> abab
b -> bbba
[lengths]
2, 1
[budget]
window = 0:24
format = text
supertiles = 2
";

fn main() -> subtile::Result<()> {
    let req = AnalysisRequest::parse(REQUEST)?;
    let report = run(&req)?;
    print!("{}", report.summary());
    println!("exit code {}", report.exit_code());
    Ok(())
}
