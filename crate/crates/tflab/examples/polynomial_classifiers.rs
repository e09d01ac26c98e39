//! Polynomial classification four ways: falling-factorial parities,
//! small-modulus decision for any prime, the permutation-parity test, and
//! exact screening of rational coefficients.
//!
//!     cargo run --example polynomial_classifiers

use num_bigint::BigInt;
use num_rational::BigRational;
use tflab::ergodic::{
    classify_poly_ff, classify_poly_modp, classify_rational_poly, monomial_to_ff, permutation_poly,
    Oracle, PolyFF,
};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn main() {
    let oracle = Oracle::default();

    println!("falling-factorial parities decide ergodicity:");
    for (name, coeffs) in [
        ("1 + x", vec![1i64, 1]),
        ("x + 2x(x-1) ~ x + 2x^2", vec![0, 3, 2]),
        ("1 + 2x", vec![1, 2]),
    ] {
        let class = classify_poly_ff(&PolyFF::from_i64(&coeffs));
        println!("  {name:24} (ff coeffs {coeffs:?}) -> {class:?}");
    }

    println!("\nmonomial coefficients route through the exact basis change:");
    let monomial: Vec<BigInt> = [0i64, 1, 2].iter().map(|&c| c.into()).collect();
    let ff = monomial_to_ff(&monomial);
    println!(
        "  x + 2x^2 -> descending-factorial coefficients {:?} -> {:?}",
        ff.coeffs,
        classify_poly_ff(&ff)
    );

    println!("\nsmall-modulus decision for other primes:");
    for (p, coeffs) in [
        (2u64, vec![0i64, 1, 2]),
        (5, vec![1, 1]),
        (3, vec![0, 0, 0, 1]),
    ] {
        let class = classify_poly_modp(p, &coeffs, &oracle).unwrap();
        println!("  p = {p}, coefficients {coeffs:?} -> {class:?}");
    }

    println!("\npermutation parity test on monomial coefficients:");
    for coeffs in [vec![0i64, 1, 2], vec![0, 1, 1], vec![0, 1, 0, 1]] {
        println!(
            "  {coeffs:?} -> bijective modulo every power of two: {}",
            permutation_poly(&coeffs)
        );
    }

    println!("\nrational coefficients are screened exactly before classification:");
    for (name, coeffs) in [
        ("1 + 5x", vec![q(1, 1), q(5, 1)]),
        ("x/2", vec![q(0, 1), q(1, 2)]),
        ("C(x,2)", vec![q(0, 1), q(-1, 2), q(1, 2)]),
    ] {
        match classify_rational_poly(&coeffs, 2, &oracle) {
            Ok(class) => println!("  {name:8} -> {class:?}"),
            Err(e) => println!("  {name:8} -> rejected: {e}"),
        }
    }
}
