//! Pair-scatter structure data: an affine generator collapses onto one
//! family of parallel lines while a quadratic-masked map spreads out.
//! Writes CSV point lists and occupancy bitmaps under ./target/.
//!
//!     cargo run --example scatter_figures

use std::fs;

use tflab::analysis::{line_count, occupancy_pgm, pair_scatter_csv};
use tflab::expr::parse;

fn orbit(src: &str, width: u32, steps: usize) -> Vec<u64> {
    let f = parse(src).unwrap();
    let mut out = Vec::with_capacity(steps);
    let mut x = 0u64;
    for _ in 0..steps {
        out.push(x);
        x = f.eval1(x, width).unwrap();
    }
    out
}

fn main() {
    let width = 8u32;
    let out_dir = "target/scatter";
    fs::create_dir_all(out_dir).unwrap();

    for (name, src, slope) in [
        ("affine_3_5x", "3 + 5*x", 5u64),
        ("quadratic_or5", "x + (x*x | 5)", 5),
    ] {
        let words = orbit(src, width, 256);
        let csv = pair_scatter_csv(&words, width);
        let csv_path = format!("{out_dir}/{name}.csv");
        fs::write(&csv_path, &csv).unwrap();
        let pgm_path = format!("{out_dir}/{name}.pgm");
        fs::write(&pgm_path, occupancy_pgm(&words, width, 6)).unwrap();
        println!(
            "{src:16} -> {} points, {} distinct values of x' - {slope}x, files {csv_path} / {pgm_path}",
            csv.lines().count() - 1,
            line_count(&words, width, slope),
        );
    }
    println!("\nthe affine stream needs a single line family; the masked quadratic needs many");
}
