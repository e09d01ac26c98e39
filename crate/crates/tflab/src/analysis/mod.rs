//! Measurement suite for produced sequences: period, distribution,
//! coordinate structure, linear and 2-adic complexity, half-period
//! prescription, and scatter data.

pub mod adic;
pub mod distr;
pub mod gamma;
pub mod lc;
pub mod scatter;

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::bits::BitSeq;
use crate::ergodic::brent_cycle;
use crate::expr::TExpr;
use crate::generator::{words_to_bits_msb, GenError, Generator};

pub use adic::{log2_big, two_adic_coord, two_adic_general, AdicComplexity, AdicError};
pub use distr::{k_distribution, q1_check, DistrError, KDistribution, Q1Report};
pub use gamma::{gamma_construct, gamma_extract, GammaError};
pub use lc::{
    halfperiod_negation_bound, l_error_lc, lc_gf2, lc_gf2_periodic, lc_ring, ring_relation,
    LErrorLc,
};
pub use scatter::{line_count, occupancy_pgm, pair_scatter_csv, unit_fraction_decimal};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("cycle not found within cap {0}")]
    CapExceeded(u64),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Distr(#[from] DistrError),
    #[error(transparent)]
    Adic(#[from] AdicError),
}

/// Exact (preperiod, period) of the word stream of a replayable generator.
///
/// The automaton state is walked with full bookkeeping (it is exact, and desk
/// scale keeps it cheap); the emitted stream's period divides the state
/// period and is refined against it.
pub fn generator_period(g: &Generator, cap: u64) -> Result<(u64, u64), AnalysisError> {
    let mut seen: HashMap<(u64, usize, u64), u64> = HashMap::new();
    let mut walker = g.clone();
    let mut outputs = Vec::new();
    let (mu_s, lambda_s) = loop {
        let key = walker.state_key();
        if let Some(&first) = seen.get(&key) {
            break (first, outputs.len() as u64 - first);
        }
        if outputs.len() as u64 > cap {
            return Err(AnalysisError::CapExceeded(cap));
        }
        seen.insert(key, outputs.len() as u64);
        outputs.push(walker.next_word()?);
    };
    // refine to the output stream
    let lam = refine_period(&outputs[mu_s as usize..], lambda_s);
    let mut mu = mu_s;
    while mu > 0 {
        let idx = (mu - 1) as usize;
        if outputs[idx] == outputs[idx + lam as usize] {
            mu -= 1;
        } else {
            break;
        }
    }
    Ok((mu, lam))
}

fn refine_period(cycle: &[u64], lambda: u64) -> u64 {
    let n = lambda as usize;
    'outer: for d in 1..=n {
        if !n.is_multiple_of(d) {
            continue;
        }
        for i in 0..n {
            if cycle[i] != cycle[(i + d) % n] {
                continue 'outer;
            }
        }
        return d as u64;
    }
    lambda
}

/// (preperiod, period) of the orbit of `seed` under a plain expression,
/// found with constant memory. Partial maps (an odd inversion hitting an
/// even value) surface as errors rather than panics.
pub fn expr_orbit_period(
    f: &TExpr,
    width: u32,
    seed: u64,
    cap: u64,
) -> Result<(u64, u64), AnalysisError> {
    let failure = std::cell::RefCell::new(None);
    let step = |x: &u64| match f.eval1(*x, width) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            *x // frozen orbit; the failure flag is checked below
        }
    };
    let found = brent_cycle(seed, step, cap);
    if let Some(e) = failure.into_inner() {
        return Err(AnalysisError::Gen(GenError::Eval(e.to_string())));
    }
    found.ok_or(AnalysisError::CapExceeded(cap))
}

/// Per-coordinate structure of one full period of states.
#[derive(Debug, Clone, Serialize)]
pub struct CoordReport {
    pub j: u32,
    pub period: usize,
    pub half_negation: bool,
    pub lc: usize,
}

/// The j-th bit stream of a full state period, with its shortest period and
/// the half-period negation check at shift `2^j · m`.
pub fn coord_seq(words: &[u64], j: u32, m: usize) -> (BitSeq, CoordReport) {
    let n = words.len();
    let mut bits = BitSeq::with_capacity(n);
    for &w in words {
        bits.push((w >> j) & 1 == 1);
    }
    let period = (1..=n)
        .find(|&d| n.is_multiple_of(d) && (0..n).all(|i| bits.get(i) == bits.get((i + d) % n)))
        .unwrap_or(n);
    let shift = (1usize << j) * m;
    let half_negation = n > 0 && (0..n).all(|i| bits.get((i + shift) % n) != bits.get(i));
    let lc = {
        let mut one_period = BitSeq::with_capacity(period);
        for i in 0..period {
            one_period.push(bits.get(i));
        }
        lc_gf2_periodic(&one_period)
    };
    (
        bits,
        CoordReport {
            j,
            period,
            half_negation,
            lc,
        },
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct PeriodInfo {
    pub pre: u64,
    pub len: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct UniformInfo {
    pub width: u32,
    pub counts_ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Q1Info {
    pub pass: bool,
    pub worst_k: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct KdistInfo {
    pub k: u32,
    pub strict: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Phi2Info {
    pub u: String,
    pub v: String,
    pub log2: f64,
}

#[derive(Debug, Clone, Serialize, Default)]
pub struct FilesInfo {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scatter_csv: Option<String>,
}

/// Structured results for one generator run; every number is
/// recomputable from the sequence alone.
#[derive(Debug, Clone, Serialize)]
pub struct SeqReport {
    pub period: PeriodInfo,
    pub uniform: UniformInfo,
    pub coords: Vec<CoordReport>,
    pub q1: Q1Info,
    pub kdist: KdistInfo,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lc_ring: Option<usize>,
    pub phi2: Phi2Info,
    pub files: FilesInfo,
}

impl SeqReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Full measurement pass over one period of a validated generator.
pub fn analyze_generator(
    g: &Generator,
    clock_count: usize,
    cap: u64,
) -> Result<SeqReport, AnalysisError> {
    let (pre, len) = generator_period(g, cap)?;
    let mut runner = g.clone();
    let mut words = runner.keystream((pre + len) as usize)?;
    let words = words.split_off(pre as usize);
    let width = g.out_width();

    let mut counts = vec![0u64; 1 << width.min(24)];
    for &w in &words {
        counts[w as usize] += 1;
    }
    let counts_ok = counts.iter().all(|&c| c == counts[0]);

    let coords: Vec<CoordReport> = (0..width)
        .map(|j| coord_seq(&words, j, clock_count).1)
        .collect();

    let bitstream = words_to_bits_msb(&words, width);
    let kmax = {
        let mut k = 1;
        while (1usize << (k + 1)) <= bitstream.len() && k < width {
            k += 1;
        }
        k
    };
    let kdist = k_distribution(&bitstream, kmax)?;
    let q1 = q1_check(&bitstream, true)?;
    let phi = two_adic_general(&bitstream)?;

    Ok(SeqReport {
        period: PeriodInfo { pre, len },
        uniform: UniformInfo { width, counts_ok },
        coords,
        q1: Q1Info {
            pass: q1.pass,
            worst_k: q1.worst_k,
        },
        kdist: KdistInfo {
            k: kmax,
            strict: kdist.strict,
        },
        lc_ring: lc_ring(&words, width, 8),
        phi2: Phi2Info {
            u: phi.u.to_string(),
            v: phi.v.to_string(),
            log2: phi.log2_bits,
        },
        files: FilesInfo::default(),
    })
}
