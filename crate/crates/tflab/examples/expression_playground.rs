//! The expression grammar and word arithmetic: parse, evaluate, inspect
//! coordinate functions, and see why right shifts are refused.
//!
//!     cargo run --example expression_playground

use tflab::expr::{coord_anf, parse, parse_with_defs};
use tflab::word::{binom_mod, dist_ord, pow_odd_base};
use tflab::Word;

fn main() {
    // words wrap: the all-ones word is -1
    let w = Word::new(255, 8);
    println!("255 + 1 mod 2^8 = {}", w.add(Word::one(8)).value());
    println!(
        "ord2(12) = {:?}, d2(5, 21) = 2^-{:?}",
        Word::new(12, 8).val2().order(),
        dist_ord(Word::new(5, 8), Word::new(21, 8)).order(),
    );
    println!(
        "inv(3) mod 16 = {}, (1+2*2)^3 mod 256 = {}, C(7,3) mod 16 = {}",
        Word::new(3, 4).inv_odd().unwrap().value(),
        pow_odd_base(Word::new(2, 8), Word::new(3, 8)).value(),
        binom_mod(Word::new(7, 4), 3).value(),
    );

    // the grammar: ~, *, + -, <<, &, ^ (xor), | in loosening order
    let e = parse("x + (x*x | 5)").unwrap();
    println!("\n{e} at x = 3, width 5: {}", e.eval1(3, 5).unwrap());

    // named sub-expressions compose
    let d = parse_with_defs("1 + x + 2*(g(x+1) - g(x))", &[("g", "x ^ (2*x + 1)")]).unwrap();
    println!("difference gadget: {d}");
    println!("  orbit of 0 mod 16: {:?}", {
        let mut xs = vec![0u64];
        for _ in 0..15 {
            xs.push(d.eval1(*xs.last().unwrap(), 4).unwrap());
        }
        xs
    });

    // coordinate functions: bit j of x+1 is chi_j ^ (chi_0 & ... & chi_{j-1})
    let inc = parse("x + 1").unwrap();
    for j in 0..4 {
        let t = coord_anf(&inc, j, 8).unwrap();
        println!(
            "bit {j} of x+1: table {} (weight {} -> {})",
            t.table,
            t.table.popcount(),
            if t.weight_odd() { "odd" } else { "even" }
        );
    }

    // information never flows downward
    for bad in ["x >> 1", "rotl(x)"] {
        println!("\nparse {bad:9}: {}", parse(bad).unwrap_err());
    }
}
