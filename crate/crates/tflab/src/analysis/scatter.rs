//! Pair-scatter data for structure plots: consecutive states as exact
//! rational points of the unit square, plus the parallel-line witness that
//! exposes affine generators.

use num_bigint::BigUint;
use std::collections::HashSet;

/// Exact decimal expansion of `x / 2^width` (always terminates).
pub fn unit_fraction_decimal(x: u64, width: u32) -> String {
    if width == 0 {
        return format!("{x}");
    }
    // x / 2^w = x * 5^w / 10^w
    let scaled = BigUint::from(x) * BigUint::from(5u32).pow(width);
    let digits = scaled.to_string();
    let w = width as usize;
    if digits.len() > w {
        let (int_part, frac) = digits.split_at(digits.len() - w);
        format!("{int_part}.{frac}")
    } else {
        format!("0.{}{}", "0".repeat(w - digits.len()), digits)
    }
}

/// CSV of points `(x_i / 2^n, x_{i+1} / 2^n)`, consecutive pairs cyclically.
pub fn pair_scatter_csv(seq: &[u64], width: u32) -> String {
    let mut out = String::from("x,y\n");
    if seq.is_empty() {
        return out;
    }
    for i in 0..seq.len() {
        let x = seq[i];
        let y = seq[(i + 1) % seq.len()];
        out.push_str(&unit_fraction_decimal(x, width));
        out.push(',');
        out.push_str(&unit_fraction_decimal(y, width));
        out.push('\n');
    }
    out
}

/// Number of distinct values of `x_{i+1} - b·x_i mod 2^width`: the count of
/// parallel line families the pair cloud falls onto for slope `b`.
pub fn line_count(seq: &[u64], width: u32, b: u64) -> usize {
    let mask = if width == 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    };
    let mut seen = HashSet::new();
    for i in 0..seq.len() {
        let x = seq[i];
        let y = seq[(i + 1) % seq.len()];
        seen.insert(y.wrapping_sub(b.wrapping_mul(x)) & mask);
    }
    seen.len()
}

/// `2^k x 2^k` occupancy bitmap as a binary PGM (P5): 255 where some pair
/// lands in the cell, 0 elsewhere. Row 0 is the top of the image (y near 1).
pub fn occupancy_pgm(seq: &[u64], width: u32, k: u32) -> Vec<u8> {
    assert!(
        k >= 1 && k <= width && k <= 12,
        "bitmap resolution {k} out of range"
    );
    let size = 1usize << k;
    let mut img = vec![0u8; size * size];
    for i in 0..seq.len() {
        let x = seq[i];
        let y = seq[(i + 1) % seq.len()];
        let col = (x >> (width - k)) as usize;
        let row = size - 1 - (y >> (width - k)) as usize;
        img[row * size + col] = 255;
    }
    let mut out = format!("P5\n{size} {size}\n255\n").into_bytes();
    out.extend_from_slice(&img);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_decimals() {
        assert_eq!(unit_fraction_decimal(1, 8), "0.00390625");
        assert_eq!(unit_fraction_decimal(0, 4), "0.0000");
        assert_eq!(unit_fraction_decimal(15, 4), "0.9375");
    }

    #[test]
    fn affine_generator_falls_on_one_line_family() {
        let width = 8;
        let mut seq = vec![1u64];
        for _ in 0..255 {
            let last = *seq.last().unwrap();
            seq.push((3 + 5 * last) & 255);
        }
        assert_eq!(line_count(&seq, width, 5), 1);
        // a quadratic-perturbed stream spreads over many more families
        let mut other = vec![0u64];
        for _ in 0..255 {
            let x = *other.last().unwrap();
            other.push((x + ((x * x) | 5)) & 255);
        }
        assert!(line_count(&other, width, 5) > 16);
    }

    #[test]
    fn csv_shape() {
        let csv = pair_scatter_csv(&[0, 128], 8);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "x,y");
        assert_eq!(lines[1], "0.00000000,0.50000000");
        assert_eq!(lines[2], "0.50000000,0.00000000");
        // empty sequence: header only
        assert_eq!(pair_scatter_csv(&[], 8), "x,y\n");
        // constant sequence: every pair is the same single point
        let csv = pair_scatter_csv(&[9, 9, 9, 9], 8);
        let rows: std::collections::HashSet<&str> = csv.lines().skip(1).collect();
        assert_eq!(rows.len(), 1);
    }

    #[test]
    fn pgm_header_and_occupancy() {
        let img = occupancy_pgm(&[0, 255], 8, 2);
        let header = b"P5\n4 4\n255\n";
        assert_eq!(&img[..header.len()], header);
        let body = &img[header.len()..];
        assert_eq!(body.len(), 16);
        // pairs (0,255) and (255,0): cells (0, 3) and (3, 0)
        assert_eq!(body[0], 255); // row 0 = top (y=3), col 0
        assert_eq!(body[3 * 4 + 3], 255);
        assert_eq!(body.iter().filter(|&&b| b == 255).count(), 2);
    }
}
