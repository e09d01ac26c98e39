//! The x + (x²|C) family: classify every C by two bits of C and confirm the
//! classification against exhaustive cycle decomposition.
//!
//!     cargo run --example klimov_shamir

use tflab::ergodic::{cycle_structure, klimov_shamir_c, KsClass};
use tflab::expr::TExpr;
use tflab::Word;

fn main() {
    let width = 8;
    let mut tallies = [0u32; 3];
    for c in 0..1u64 << width {
        let predicted = klimov_shamir_c(Word::new(c, width));
        let expr = TExpr::x().add(TExpr::x().mul(TExpr::x()).or(TExpr::constant(c)));
        let report = cycle_structure(&expr, width).unwrap();
        let actual = if report.single_cycle {
            KsClass::SingleCycle
        } else if report.bijective {
            KsClass::InvertibleOnly
        } else {
            KsClass::NotInvertible
        };
        assert_eq!(predicted, actual, "C = {c}");
        tallies[match actual {
            KsClass::SingleCycle => 0,
            KsClass::InvertibleOnly => 1,
            KsClass::NotInvertible => 2,
        }] += 1;
    }
    println!(
        "x + (x*x | C) over {}-bit words, all 256 values of C:",
        width
    );
    println!("  single cycle    (bit0 & bit2 of C): {:3}", tallies[0]);
    println!("  invertible only (bit0, not bit2)  : {:3}", tallies[1]);
    println!("  not invertible  (bit0 clear)      : {:3}", tallies[2]);
    println!("bit criterion matches the exhaustive oracle on 256/256 cases");

    // a closer look at the canonical instance
    let c5 = TExpr::x().mul(TExpr::x()).or(TExpr::constant(5));
    let f = TExpr::x().add(c5);
    let orbit: Vec<u64> = {
        let mut xs = vec![0u64];
        for _ in 0..7 {
            let last = *xs.last().unwrap();
            xs.push(f.eval1(last, 5).unwrap());
        }
        xs
    };
    println!("\norbit of 0 under x + (x*x | 5) mod 32: {orbit:?} ...");
}
