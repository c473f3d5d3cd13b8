//! Acceptance matrix: one PASS/FAIL line per criterion, nonzero exit if any fail.
//! `cargo test --test acceptance -- 3 9` runs a subset.

use ansatz_lab::repro;

fn main() {
    let ids: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let ids = if ids.is_empty() { repro::CRITERIA.iter().map(|c| c.0).collect() } else { ids };
    let mut failed = 0;
    for id in &ids {
        let o = repro::run(*id).expect("known criterion");
        println!("{}", o.line());
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {}/{} passed", ids.len() - failed, ids.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
