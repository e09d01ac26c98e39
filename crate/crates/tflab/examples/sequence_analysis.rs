//! The full measurement pass: period, uniformity, coordinate structure,
//! pattern distribution, frequency test, ring complexity, and the 2-adic
//! fraction, as one JSON report.
//!
//!     cargo run --example sequence_analysis

use tflab::analysis::analyze_generator;
use tflab::ergodic::Oracle;
use tflab::expr::parse;
use tflab::generator::{Generator, OrdinarySpec, OutputKind};

fn main() {
    let oracle = Oracle::default();
    let g = Generator::ordinary(
        &OrdinarySpec {
            width: 8,
            update: parse("x + (x*x | 5)").unwrap(),
            verdict: None,
            output: OutputKind::Identity,
            seed: 0,
        },
        &oracle,
    )
    .unwrap();
    println!("update certificate: {}", g.certificate().to_json());

    let report = analyze_generator(&g, 1, 1 << 20).unwrap();
    println!("\n{}", report.to_json());

    println!("\nreading the report:");
    println!(
        "  period {} with no preperiod; every residue once: {}",
        report.period.len, report.uniform.counts_ok
    );
    println!(
        "  bit stream strictly {}-distributed: {}; frequency test: {}",
        report.kdist.k, report.kdist.strict, report.q1.pass
    );
    for c in report.coords.iter().take(4) {
        println!(
            "  coordinate {}: period {}, negated halves {}, linear complexity {}",
            c.j, c.period, c.half_negation, c.lc
        );
    }
    println!(
        "  2-adic fraction of the stream: {} / {} (log2 size {:.6})",
        report.phi2.u, report.phi2.v, report.phi2.log2
    );
}
