//! Pattern-frequency measures on one full period of a bit stream.

use thiserror::Error;

use crate::bits::BitSeq;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DistrError {
    #[error("pattern length {k} exceeds log2 of the period length {n}")]
    PatternTooLong { k: u32, n: usize },
    #[error("empty sequence")]
    Empty,
}

/// Chain counts of every k-pattern read around the period cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KDistribution {
    pub k: u32,
    pub counts: Vec<u64>,
    /// Every pattern occurs equally often.
    pub strict: bool,
}

/// Counts k-windows; `cyclic` wraps around the period (the default reading of
/// a periodic stream), otherwise only the `n - k + 1` linear windows count.
fn pattern_counts(bits: &BitSeq, k: u32, cyclic: bool) -> Vec<u64> {
    let n = bits.len();
    let mut counts = vec![0u64; 1 << k];
    let limit = if cyclic { n } else { n + 1 - k as usize };
    for i in 0..limit {
        let mut w = 0usize;
        for t in 0..k as usize {
            w |= (bits.get((i + t) % n) as usize) << t;
        }
        counts[w] += 1;
    }
    counts
}

/// Distribution of k-chains on the period cycle.
pub fn k_distribution(bits: &BitSeq, k: u32) -> Result<KDistribution, DistrError> {
    let n = bits.len();
    if n == 0 {
        return Err(DistrError::Empty);
    }
    if k == 0 || (1usize << k) > n {
        return Err(DistrError::PatternTooLong { k, n });
    }
    let counts = pattern_counts(bits, k, true);
    let strict = counts.iter().all(|&c| c == counts[0]);
    Ok(KDistribution { k, counts, strict })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Q1Report {
    pub pass: bool,
    /// Pattern length with the largest relative deviation.
    pub worst_k: u32,
    pub worst_deviation: f64,
}

/// The finite-sequence frequency test: for every k up to `log2(N)` and every
/// k-pattern, `|ν(w)/N - 2^-k| <= N^(-1/2)`. Counting is cyclic by default,
/// matching the k-chain reading; linear counting suits external data.
pub fn q1_check(bits: &BitSeq, cyclic: bool) -> Result<Q1Report, DistrError> {
    let n = bits.len();
    if n == 0 {
        return Err(DistrError::Empty);
    }
    let kmax = (usize::BITS - 1 - n.leading_zeros()).max(1);
    let mut pass = true;
    let mut worst_k = 1;
    let mut worst = 0f64;
    for k in 1..=kmax.min(24) {
        if (1usize << k) > n {
            break;
        }
        let counts = pattern_counts(bits, k, cyclic);
        for &c in &counts {
            // exact integer comparison of (c*2^k - n)^2 <= 4^k * n
            let lhs = ((c as i128) * (1i128 << k) - n as i128).pow(2);
            let rhs = (1i128 << (2 * k)) * n as i128;
            let dev = ((c as f64) / n as f64 - 1.0 / (1u64 << k) as f64).abs();
            if dev > worst {
                worst = dev;
                worst_k = k;
            }
            if lhs > rhs {
                pass = false;
            }
        }
    }
    Ok(Q1Report {
        pass,
        worst_k,
        worst_deviation: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadruple_counter_pairs_are_uneven() {
        // 0,1,3,2 repeating, read as the bit stream 00 01 11 10: pairs 00 and
        // 11 occur three times each on the 8-cycle, 01 and 10 once each
        let bits = crate::generator::words_to_bits_msb(&[0, 1, 3, 2], 2);
        assert_eq!(bits.to_string(), "00011110");
        let d = k_distribution(&bits, 2).unwrap();
        assert_eq!(d.counts[0b00], 3);
        assert_eq!(d.counts[0b11], 3);
        assert_eq!(d.counts[0b01] + d.counts[0b10], 2);
        assert!(!d.strict);
    }

    #[test]
    fn counter_stream_strictly_distributed() {
        let words: Vec<u64> = (0..8).collect();
        let bits = crate::generator::words_to_bits_msb(&words, 3);
        for k in 1..=3 {
            let d = k_distribution(&bits, k).unwrap();
            assert!(d.strict, "k={k}: {:?}", d.counts);
            assert!(d.counts.iter().all(|&c| c == 24 / (1 << k)));
        }
    }

    #[test]
    fn all_zeros_never_strict() {
        let bits = BitSeq::parse("00000000").unwrap();
        for k in 1..=3 {
            assert!(!k_distribution(&bits, k).unwrap().strict);
        }
    }

    #[test]
    fn pattern_too_long_rejected() {
        let bits = BitSeq::parse("0110").unwrap();
        assert!(k_distribution(&bits, 3).is_err());
    }

    #[test]
    fn knuth_counterexample_fails_at_k3() {
        let bits = BitSeq::parse("1111111100000111").unwrap();
        let r = q1_check(&bits, true).unwrap();
        assert!(!r.pass);
        assert_eq!(r.worst_k, 3);
        // and with linear counting it also fails at k = 3
        let lin = q1_check(&bits, false).unwrap();
        assert!(!lin.pass);
    }

    #[test]
    fn alternating_period_passes() {
        let bits = BitSeq::parse("10").unwrap();
        let r = q1_check(&bits, true).unwrap();
        assert!(r.pass);
        assert_eq!(r.worst_deviation, 0.0);
    }

    #[test]
    fn strict_distribution_implies_q1() {
        // strictly k-distributed for all k up to log2(N) forces all
        // deviations to zero, hence Q1 holds
        let mut bits = BitSeq::new();
        for w in 0..8u64 {
            bits.push_word_bits(w, 3);
        }
        // counter words: strictly k-distributed for k <= 3
        for k in 1..=3 {
            assert!(k_distribution(&bits, k).unwrap().strict, "k={k}");
        }
        assert!(q1_check(&bits, true).unwrap().pass);
    }
}
