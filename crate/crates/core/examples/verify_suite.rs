//! Runs the cross-validation battery with a reduced Monte Carlo budget.

use conewishart::verify::{run_all, VerifyConfig};

fn main() {
    let config = VerifyConfig { draws: 20_000, ..Default::default() };
    for result in run_all(&config) {
        println!("{result}");
    }
}
