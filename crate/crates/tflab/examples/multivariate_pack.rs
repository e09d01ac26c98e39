//! One wide single-cycle map as several narrow coordinates: the packed form
//! of x+1 walks all pairs, and reading the coordinates bit-interleaved
//! recovers the wide increment.
//!
//!     cargo run --example multivariate_pack

use tflab::ergodic::{
    interleave, multivar_check_bijective, multivar_pack, system_cycle_structure, verify_ergodic,
    ErgodicPolicy, Oracle, Verified,
};
use tflab::expr::parse;
use tflab::Word;

fn main() {
    let oracle = Oracle::default();
    let h = parse("x + 1").unwrap();
    let verdict = verify_ergodic(&h, ErgodicPolicy::DerivativeMod4, &oracle).unwrap();
    let packed = multivar_pack(&Verified { expr: h, verdict }, 2).unwrap();
    println!("two-variable form of x + 1:");
    for (k, f) in packed.iter().enumerate() {
        println!("  f{k} = {f}");
    }

    let width = 4u32;
    let report = system_cycle_structure(&packed, width, &oracle).unwrap();
    println!(
        "\non (Z/16)^2: single cycle = {}, length {:?}",
        report.single_cycle,
        report.cycle_lengths.keys().collect::<Vec<_>>()
    );

    // interleaved reading: bit j of coordinate r becomes wide bit 2j + r
    let env = [Word::new(0b0110, width), Word::new(0b1011, width)];
    let out: Vec<u64> = packed
        .iter()
        .map(|f| f.eval(&env, width).unwrap().value())
        .collect();
    let wide_in = interleave(&[0b0110, 0b1011], width);
    let wide_out = interleave(&out, width);
    println!(
        "\ninterleaved check: ({:04b}, {:04b}) packs to {wide_in:08b}; step gives {wide_out:08b} = packed + 1: {}",
        env[0].value(),
        env[1].value(),
        wide_out == (wide_in + 1) % 256
    );

    // the Jacobian route proves bijectivity of a mixed pair
    let sys = vec![
        parse("x0 ^ 2*(x0 & x1)").unwrap(),
        parse("(x1 + 3*x0*x0*x0) ^ x0").unwrap(),
    ];
    let v = multivar_check_bijective(&sys, &oracle, 6).unwrap();
    println!("\nmixed pair bijectivity: {}", v.to_json());
}
