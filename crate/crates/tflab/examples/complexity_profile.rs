//! Complexity measures side by side: minimal-LFSR length over GF(2), the
//! flip-tolerant variant, the affine recurrence length over Z/2^n, and the
//! 2-adic fraction with its coordinate-formula shortcut.
//!
//!     cargo run --example complexity_profile

use num_bigint::BigUint;
use tflab::analysis::{
    coord_seq, l_error_lc, lc_gf2_periodic, lc_ring, two_adic_coord, two_adic_general,
};
use tflab::bits::BitSeq;
use tflab::ergodic::Oracle;
use tflab::expr::parse;
use tflab::generator::{Generator, OrdinarySpec, OutputKind};

fn main() {
    let width = 8u32;
    let mut g = Generator::ordinary(
        &OrdinarySpec {
            width,
            update: parse("x + (x*x | 5)").unwrap(),
            verdict: None,
            output: OutputKind::Identity,
            seed: 0,
        },
        &Oracle::default(),
    )
    .unwrap();
    let words = g.keystream(1 << width).unwrap();

    println!("coordinate sequences of x + (x*x | 5) at width 8:");
    println!("  j | period | lc (= 2^j + 1) | 2-adic fraction");
    for j in 0..5u32 {
        let (bits, report) = coord_seq(&words, j, 1);
        let mut period = BitSeq::with_capacity(report.period);
        let mut gamma = BigUint::default();
        for i in 0..report.period {
            period.push(bits.get(i));
        }
        for i in (0..report.period / 2).rev() {
            gamma <<= 1;
            if bits.get(i) {
                gamma |= BigUint::from(1u32);
            }
        }
        let general = two_adic_general(&period).unwrap();
        let shortcut = two_adic_coord(j, &gamma).unwrap();
        assert_eq!(general, shortcut);
        println!(
            "  {j} | {:6} | {:14} | {}/{} (log2 = {:.6})",
            report.period, report.lc, general.u, general.v, general.log2_bits
        );
    }

    // flip tolerance of the j = 3 coordinate: exact minimum over <= 6 flips
    let (bits, report) = coord_seq(&words, 3, 1);
    let period = BitSeq::from_bools(&(0..report.period).map(|i| bits.get(i)).collect::<Vec<_>>());
    let tolerant = l_error_lc(&period, 6, 1, 1 << 17);
    println!(
        "\ncoordinate 3 under up to 6 flips: minimum lc {} (exact: {}, certified lower bound {:?})",
        tolerant.best, tolerant.exact, tolerant.lower_bound
    );
    assert!(tolerant.best > 8);

    // affine recurrences over the ring: an affine generator collapses to 2
    let mut affine = Vec::with_capacity(256);
    let mut x = 1u64;
    for _ in 0..256 {
        affine.push(x);
        x = (3 + 5 * x) & 255;
    }
    println!("\nring linear complexity (affine relations over Z/256):");
    println!("  3 + 5x stream: {:?}", lc_ring(&affine, width, 6));
    println!("  x + (x*x|5) stream: {:?}", lc_ring(&words, width, 6));

    // the flat complexity of a plain periodic marker, for contrast
    let marker = BitSeq::parse("10000000").unwrap();
    println!(
        "\nlc of 1-in-8 marker extended periodically: {}",
        lc_gf2_periodic(&marker)
    );
}
