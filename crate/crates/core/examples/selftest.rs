//! The invariant suite behind `bpdd selftest`.
//!
//! cargo run --release --example selftest

use bpdd::selftest::{selftest, SelftestConfig};

fn main() {
    let report = selftest(&SelftestConfig::default());
    print!("{}", report.render());
    std::process::exit(if report.passed() { 0 } else { 3 });
}
