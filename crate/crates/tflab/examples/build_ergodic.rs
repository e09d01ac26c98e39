//! Constructing single-cycle maps instead of hunting for them: the
//! difference-operator form, the interpolation-series form, and lifts that
//! absorb arbitrary compatible perturbations.
//!
//!     cargo run --example build_ergodic

use tflab::ergodic::{
    affine_mp, cycle_structure, delta_ergodic, lift_ergodic, mahler_ergodic, LiftKind,
};
use tflab::expr::parse;

fn main() {
    // c + x + 2(g(x+1) - g(x)) is ergodic for any compatible g and odd c
    let g = parse("x ^ (2*x + 1)").unwrap();
    let delta = delta_ergodic(1, &g).unwrap();
    println!("difference form with g = x ^ (2x+1):");
    println!("  f = {}", delta.expr);
    println!("  certificate: {}", delta.verdict.to_json());
    for width in [4u32, 8, 12] {
        assert!(cycle_structure(&delta.expr, width).unwrap().single_cycle);
    }
    println!("  single cycle confirmed at widths 4, 8, 12");

    // interpolation series: 1 + x + sum of scaled binomial terms
    let mahler = mahler_ergodic(&[3, 1, 0, 7]);
    println!("\ninterpolation-series form, coefficients (3, 1, 0, 7):");
    println!("  f = {}", mahler.expr);
    assert!(cycle_structure(&mahler.expr, 12).unwrap().single_cycle);
    println!("  single cycle confirmed at width 12");

    // lifting: f(x) + 4g(x) stays ergodic for any compatible g
    let noise = parse("x & 173").unwrap();
    for kind in [
        LiftKind::AddInner,
        LiftKind::XorInner,
        LiftKind::AddOuter,
        LiftKind::XorOuter,
    ] {
        let lifted = lift_ergodic(kind, &delta, &noise).unwrap();
        assert!(cycle_structure(&lifted.expr, 10).unwrap().single_cycle);
        println!("lift {kind:?}: still a single cycle at width 10");
    }

    // measure preservation without ergodicity: d + cx + 2g(x)
    let mp = affine_mp(6, 3, &parse("x*x | 9").unwrap()).unwrap();
    let report = cycle_structure(&mp.expr, 10).unwrap();
    println!(
        "\naffine form {}: bijective = {}, cycles = {}",
        mp.expr, report.bijective, report.cycle_count
    );
}
