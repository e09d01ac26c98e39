//! Derivatives modulo 2 and 4: the per-node table, certified uniform
//! differentiability thresholds, and the Jacobian test for systems.
//!
//!     cargo run --example derivative_calculus

use tflab::ergodic::{verify_ergodic, ErgodicPolicy, Oracle};
use tflab::expr::{deriv, parse};
use tflab::Word;

fn main() {
    let oracle = Oracle::default();

    // f(x) = x + (x²|5): derivative 1 + 2x, threshold N2 = 3
    let f = parse("x + (x*x | 5)").unwrap();
    let df = deriv::deriv_mod2(&f).unwrap();
    println!("f  = {f}");
    println!("f' = {df}");
    let reference = parse("1 + 2*x").unwrap();
    for v in 0..64 {
        assert_eq!(df.eval1(v, 8).unwrap(), reference.eval1(v, 8).unwrap());
    }
    println!("   (evaluates as 1 + 2x everywhere)");

    let cert = deriv::n_bound(&f, 2, 10).unwrap();
    println!(
        "N2(f) = {} (structural bound {}, Taylor congruence exhausted at width {})",
        cert.n, cert.structural, cert.test_width
    );
    let verdict = verify_ergodic(&f, ErgodicPolicy::DerivativeMod4, &oracle).unwrap();
    println!(
        "ergodicity: {:?} via {} -> single cycle checked modulo {}",
        verdict.result,
        verdict.method,
        verdict.modulus_checked.unwrap()
    );

    // a bivariate system with unit Jacobian
    let sys = vec![
        parse("x0 ^ 2*(x0 & x1)").unwrap(),
        parse("(x1 + 3*x0*x0*x0) ^ x0").unwrap(),
    ];
    let cert = deriv::n_bound_system(&sys, 6).unwrap();
    println!("\nsystem ({}, {})", sys[0], sys[1]);
    println!("N1 = {}", cert.n);
    let jac = deriv::jacobian_mod2(&sys).unwrap();
    let pt = [Word::new(3, 4), Word::new(6, 4)];
    print!("Jacobian mod 2 at (3, 6): ");
    for row in &jac {
        print!("[");
        for entry in row {
            print!(" {}", entry.eval(&pt, 4).unwrap().value() & 1);
        }
        print!(" ]");
    }
    println!(
        "\ndeterminant mod 2 at every point of (Z/16)^2: {}",
        (0..256).all(|p| {
            let env = [Word::new(p & 15, 4), Word::new(p >> 4, 4)];
            deriv::jacobian_det_mod2(&sys, &env).unwrap() == 1
        })
    );
}
