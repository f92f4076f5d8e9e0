//! Runs the full acceptance suite, one line per criterion. Exits nonzero
//! if any criterion fails.

use ellwall::verify::{run_all, VerifyConfig};

fn main() {
    let reports = run_all(&VerifyConfig::default());
    for r in &reports {
        println!("{}", r.line());
    }
    let failed: Vec<usize> = reports.iter().filter(|r| !r.pass).map(|r| r.id).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", reports.len());
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
