//! Keystream automata: ordinary single-cycle generators, counter-dependent
//! wreath products, and the ABC template, all behind one validated
//! [`Generator`] that refuses to emit until its spec's certificates check out.

pub mod abc;
pub mod lfsr;
pub mod wreath;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitSeq;
use crate::ergodic::{prove_ergodic_any, Oracle, Verdict, VerdictResult};
use crate::expr::{parse, TExpr};
use crate::word::Word;

pub use abc::{abc_validate, AbcSpec};
pub use lfsr::{is_primitive, Lfsr, LfsrError, DEFAULT_TAPS};
pub use wreath::{wreath_check, Combine, Control, WreathCert, WreathError, WreathSpec};

#[derive(Debug, Error)]
pub enum GenError {
    #[error("state update map lacks a proven ergodic verdict; generation refused")]
    UpdateNotErgodic,
    #[error("embedded verdict does not revalidate: stored {stored:?}, recomputed {fresh:?}")]
    VerdictMismatch {
        stored: VerdictResult,
        fresh: VerdictResult,
    },
    #[error("output stage needs a proven ergodic map")]
    OutputNotErgodic,
    #[error("truncation keeps {k} of {n} bits")]
    BadTruncation { k: u32, n: u32 },
    #[error(transparent)]
    Wreath(#[from] WreathError),
    #[error(transparent)]
    Lfsr(#[from] LfsrError),
    #[error("spec rejected: {0}")]
    Invalid(String),
    #[error("evaluation failed: {0}")]
    Eval(String),
}

/// Reverses the low `width` bits of `x`.
pub fn bit_reverse(x: u64, width: u32) -> u64 {
    x.reverse_bits() >> (64 - width)
}

/// Output stage of a generator clock.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OutputKind {
    Identity,
    /// Keep the top `k` bits: `x -> floor(x / 2^(n-k))`, a balanced map.
    TruncTop {
        k: u32,
    },
    /// `x -> H(reverse(x)) mod 2^n` for an ergodic `H`.
    BitrevErgodic {
        expr: TExpr,
    },
    /// `x -> d + Σ d_j · bit_{n-1-j}(x) mod 2^n`; evaluates the reversal
    /// composition without materializing the permutation.
    BitSum {
        d: u64,
        dj: Vec<u64>,
    },
}

impl OutputKind {
    pub fn out_width(&self, n: u32) -> u32 {
        match self {
            OutputKind::TruncTop { k } => *k,
            _ => n,
        }
    }

    pub fn apply(&self, x: u64, n: u32) -> Result<u64, GenError> {
        Ok(match self {
            OutputKind::Identity => x,
            OutputKind::TruncTop { k } => x >> (n - k),
            OutputKind::BitrevErgodic { expr } => expr
                .eval1(bit_reverse(x, n), n)
                .map_err(|e| GenError::Eval(e.to_string()))?,
            OutputKind::BitSum { d, dj } => {
                let mut acc = *d;
                for (j, &coeff) in dj.iter().enumerate() {
                    let bit = (x >> (n - 1 - j as u32)) & 1;
                    acc = acc.wrapping_add(coeff.wrapping_mul(bit));
                }
                Word::new(acc, n).value()
            }
        })
    }
}

/// Builds the bit-reversal output stage; the wrapped map must carry a proven
/// ergodic verdict.
pub fn bitrev_output(h: &TExpr, verdict: &Verdict, _width: u32) -> Result<OutputKind, GenError> {
    if !verdict.is_proven_ergodic() {
        return Err(GenError::OutputNotErgodic);
    }
    Ok(OutputKind::BitrevErgodic { expr: h.clone() })
}

/// Plain single-map generator: `x -> f(x)` with a balanced output stage.
#[derive(Debug, Clone)]
pub struct OrdinarySpec {
    pub width: u32,
    pub update: TExpr,
    /// Certificate for the update map; recomputed and compared on load when
    /// present, computed fresh otherwise.
    pub verdict: Option<Verdict>,
    pub output: OutputKind,
    pub seed: u64,
}

#[derive(Debug, Clone)]
enum Engine {
    Ordinary {
        update: TExpr,
        output: OutputKind,
    },
    Wreath {
        updates: Vec<TExpr>,
        outputs: Vec<OutputKind>,
    },
    Abc {
        update: TExpr,
        output_d: u64,
        output_dj: Vec<u64>,
        lfsr: Lfsr,
        right_bits: u32,
    },
}

/// A validated keystream automaton. Cloning captures the whole state, so a
/// clone replays the identical stream.
#[derive(Debug, Clone)]
pub struct Generator {
    width: u32,
    x: u64,
    phase: usize,
    engine: Engine,
    cert: Verdict,
}

impl Generator {
    pub fn ordinary(spec: &OrdinarySpec, oracle: &Oracle) -> Result<Generator, GenError> {
        let fresh = match (prove_ergodic_any(&spec.update, oracle), &spec.verdict) {
            (Some(fresh), stored) => {
                if fresh.result != VerdictResult::Proven {
                    return Err(GenError::UpdateNotErgodic);
                }
                if let Some(stored) = stored {
                    if stored.result != fresh.result || stored.property != fresh.property {
                        return Err(GenError::VerdictMismatch {
                            stored: stored.result,
                            fresh: fresh.result,
                        });
                    }
                }
                fresh
            }
            (None, Some(stored)) if stored.is_proven_ergodic() => {
                // a construction certificate cannot be re-derived from the
                // bare expression; revalidate its claim against the oracle
                // at desk width before trusting it
                let w = spec.width.min(10);
                oracle
                    .check_cap(w)
                    .map_err(|e| GenError::Invalid(e.to_string()))?;
                let transitive = oracle
                    .is_transitive(&spec.update, w)
                    .map_err(|e| GenError::Eval(e.to_string()))?;
                if !transitive {
                    return Err(GenError::VerdictMismatch {
                        stored: stored.result,
                        fresh: VerdictResult::Refuted,
                    });
                }
                stored.clone()
            }
            _ => return Err(GenError::UpdateNotErgodic),
        };
        match &spec.output {
            OutputKind::TruncTop { k } if *k == 0 || *k > spec.width => {
                return Err(GenError::BadTruncation {
                    k: *k,
                    n: spec.width,
                });
            }
            OutputKind::BitrevErgodic { expr } => {
                let v = prove_ergodic_any(expr, oracle).ok_or(GenError::OutputNotErgodic)?;
                if !v.is_proven_ergodic() {
                    return Err(GenError::OutputNotErgodic);
                }
            }
            _ => {}
        }
        Ok(Generator {
            width: spec.width,
            x: Word::new(spec.seed, spec.width).value(),
            phase: 0,
            engine: Engine::Ordinary {
                update: spec.update.clone(),
                output: spec.output.clone(),
            },
            cert: fresh,
        })
    }

    pub fn wreath(spec: &WreathSpec, oracle: &Oracle) -> Result<Generator, GenError> {
        let cert = wreath::wreath_check(spec, spec.width, oracle)?;
        if cert.verdict.result == VerdictResult::Refuted {
            return Err(GenError::Invalid(format!(
                "wreath conditions refuted: {:?}",
                cert.verdict.witness
            )));
        }
        let updates = spec.effective_updates()?;
        let outputs = spec.effective_outputs()?;
        Ok(Generator {
            width: spec.width,
            x: Word::new(spec.seed, spec.width).value(),
            phase: 0,
            engine: Engine::Wreath { updates, outputs },
            cert: cert.verdict,
        })
    }

    pub fn abc(spec: &AbcSpec, oracle: &Oracle) -> Result<Generator, GenError> {
        let verdict = abc::abc_validate(spec, oracle)?;
        if verdict.result == VerdictResult::Refuted {
            return Err(GenError::Invalid(format!(
                "template conditions refuted: {:?}",
                verdict.witness
            )));
        }
        Ok(Generator {
            width: spec.width,
            x: Word::new(spec.seed, spec.width).value(),
            phase: 0,
            engine: Engine::Abc {
                update: spec.update_expr(),
                output_d: spec.d,
                output_dj: spec.dj.clone(),
                lfsr: spec.lfsr,
                right_bits: spec.width / 2,
            },
            cert: verdict,
        })
    }

    /// The certificate that admitted this spec.
    pub fn certificate(&self) -> &Verdict {
        &self.cert
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    /// Width of emitted words (differs from the state width only under
    /// truncating outputs).
    pub fn out_width(&self) -> u32 {
        match &self.engine {
            Engine::Ordinary { output, .. } => output.out_width(self.width),
            Engine::Wreath { outputs, .. } => outputs
                .iter()
                .map(|o| o.out_width(self.width))
                .min()
                .unwrap_or(self.width),
            Engine::Abc { .. } => self.width,
        }
    }

    /// Opaque state fingerprint; equal fingerprints mean identical futures.
    pub fn state_key(&self) -> (u64, usize, u64) {
        let aux = match &self.engine {
            Engine::Abc { lfsr, .. } => lfsr.state(),
            _ => 0,
        };
        (self.x, self.phase, aux)
    }

    /// Emits the next output word and advances the automaton.
    pub fn next_word(&mut self) -> Result<u64, GenError> {
        match &mut self.engine {
            Engine::Ordinary { update, output } => {
                let z = output.apply(self.x, self.width)?;
                self.x = update
                    .eval1(self.x, self.width)
                    .map_err(|e| GenError::Eval(e.to_string()))?;
                Ok(z)
            }
            Engine::Wreath { updates, outputs } => {
                let m = updates.len();
                let z = outputs[self.phase % outputs.len()].apply(self.x, self.width)?;
                self.x = updates[self.phase]
                    .eval1(self.x, self.width)
                    .map_err(|e| GenError::Eval(e.to_string()))?;
                self.phase = (self.phase + 1) % m;
                Ok(z)
            }
            Engine::Abc {
                update,
                output_d,
                output_dj,
                lfsr,
                right_bits,
            } => {
                let word = lfsr.step_word();
                let c_left = word >> *right_bits;
                let c_right = word & ((1u64 << *right_bits) - 1);
                let s = OutputKind::BitSum {
                    d: *output_d,
                    dj: output_dj.clone(),
                }
                .apply(self.x, self.width)?;
                let z = Word::new(c_left.wrapping_add(s), self.width).value();
                let hx = update
                    .eval1(self.x, self.width)
                    .map_err(|e| GenError::Eval(e.to_string()))?;
                self.x = Word::new(c_right.wrapping_add(hx), self.width).value();
                Ok(z)
            }
        }
    }

    pub fn keystream(&mut self, count: usize) -> Result<Vec<u64>, GenError> {
        (0..count).map(|_| self.next_word()).collect()
    }
}

/// Bitwise XOR of data with a keystream; errors when the keystream is short.
pub fn xor_cipher(keystream: &BitSeq, data: &BitSeq) -> Result<BitSeq, GenError> {
    if keystream.len() < data.len() {
        return Err(GenError::Invalid(format!(
            "keystream underrun: {} bits for {} of data",
            keystream.len(),
            data.len()
        )));
    }
    let mut out = BitSeq::with_capacity(data.len());
    for i in 0..data.len() {
        out.push(data.get(i) ^ keystream.get(i));
    }
    Ok(out)
}

/// Serializes words little-endian, each padded to whole bytes.
pub fn words_to_bytes(words: &[u64], width: u32) -> Vec<u8> {
    let bytes_per = width.div_ceil(8) as usize;
    let mut out = Vec::with_capacity(words.len() * bytes_per);
    for &w in words {
        out.extend_from_slice(&w.to_le_bytes()[..bytes_per]);
    }
    out
}

pub fn bytes_to_words(bytes: &[u8], width: u32) -> Vec<u64> {
    let bytes_per = width.div_ceil(8) as usize;
    bytes
        .chunks_exact(bytes_per)
        .map(|chunk| {
            let mut buf = [0u8; 8];
            buf[..bytes_per].copy_from_slice(chunk);
            u64::from_le_bytes(buf)
        })
        .collect()
}

/// Concatenates words into a bit stream, each contributing its low `width`
/// bits LSB-first; this is the file-packing order.
pub fn words_to_bits(words: &[u64], width: u32) -> BitSeq {
    let mut out = BitSeq::with_capacity(words.len() * width as usize);
    for &w in words {
        out.push_word_bits(w, width);
    }
    out
}

/// Concatenates words writing each one most-significant bit first, the
/// reading order under which keystreams of single-cycle maps are strictly
/// k-distributed.
pub fn words_to_bits_msb(words: &[u64], width: u32) -> BitSeq {
    let mut out = BitSeq::with_capacity(words.len() * width as usize);
    for &w in words {
        for j in (0..width).rev() {
            out.push((w >> j) & 1 == 1);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Spec files

fn parse_hex(s: &str) -> Result<u64, GenError> {
    let t = s.trim().trim_start_matches("0x").trim_start_matches("0X");
    u64::from_str_radix(t, 16).map_err(|e| GenError::Invalid(format!("bad hex '{s}': {e}")))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LfsrFile {
    pub cells: u32,
    pub taps_hex: String,
    pub state_hex: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct ControlFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub consts: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lfsr: Option<LfsrFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputFile {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expr: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AbcFile {
    pub a: [String; 3],
    pub b: [String; 2],
    pub d_hex: String,
    pub dj_hex: Vec<String>,
}

/// On-disk generator description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpecFile {
    #[serde(rename = "type")]
    pub kind: String,
    pub width: u32,
    pub seed: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exprs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control: Option<ControlFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub combine: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abc: Option<AbcFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
}

impl SpecFile {
    pub fn from_json(text: &str) -> Result<SpecFile, GenError> {
        serde_json::from_str(text).map_err(|e| GenError::Invalid(format!("bad spec json: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    fn output_kind(&self, oracle: &Oracle) -> Result<OutputKind, GenError> {
        let Some(out) = &self.output else {
            return Ok(OutputKind::Identity);
        };
        match out.kind.as_str() {
            "identity" => Ok(OutputKind::Identity),
            "trunc" => Ok(OutputKind::TruncTop {
                k: out
                    .k
                    .ok_or_else(|| GenError::Invalid("trunc output needs 'k'".into()))?,
            }),
            "bitrev" => {
                let src = out
                    .expr
                    .as_ref()
                    .ok_or_else(|| GenError::Invalid("bitrev output needs 'expr'".into()))?;
                let expr =
                    parse(src).map_err(|e| GenError::Invalid(format!("output expr: {e}")))?;
                let verdict = prove_ergodic_any(&expr, oracle).ok_or(GenError::OutputNotErgodic)?;
                bitrev_output(&expr, &verdict, self.width)
            }
            other => Err(GenError::Invalid(format!("unknown output kind '{other}'"))),
        }
    }

    fn parsed_exprs(&self) -> Result<Vec<TExpr>, GenError> {
        self.exprs
            .iter()
            .map(|s| parse(s).map_err(|e| GenError::Invalid(format!("expr '{s}': {e}"))))
            .collect()
    }

    fn control(&self) -> Result<Control, GenError> {
        let Some(c) = &self.control else {
            return Err(GenError::Invalid("wreath spec needs 'control'".into()));
        };
        if let Some(consts) = &c.consts {
            return Ok(Control::Consts(consts.clone()));
        }
        if let Some(l) = &c.lfsr {
            let lfsr = Lfsr::new(l.cells, parse_hex(&l.taps_hex)?, parse_hex(&l.state_hex)?)?;
            return Ok(Control::Lfsr(lfsr));
        }
        Err(GenError::Invalid(
            "control must carry 'consts' or 'lfsr'".into(),
        ))
    }

    /// Validates and instantiates the automaton.
    pub fn to_generator(&self, oracle: &Oracle) -> Result<Generator, GenError> {
        let seed = parse_hex(&self.seed)?;
        match self.kind.as_str() {
            "ordinary" => {
                let exprs = self.parsed_exprs()?;
                if exprs.len() != 1 {
                    return Err(GenError::Invalid(
                        "ordinary spec needs exactly one expr".into(),
                    ));
                }
                Generator::ordinary(
                    &OrdinarySpec {
                        width: self.width,
                        update: exprs.into_iter().next().unwrap(),
                        verdict: self.verdict.clone(),
                        output: self.output_kind(oracle)?,
                        seed,
                    },
                    oracle,
                )
            }
            "wreath" => {
                let combine = match self.combine.as_deref() {
                    None | Some("add") => Combine::Add,
                    Some("xor") => Combine::Xor,
                    Some(other) => {
                        return Err(GenError::Invalid(format!("unknown combine '{other}'")))
                    }
                };
                let spec = WreathSpec {
                    width: self.width,
                    exprs: self.parsed_exprs()?,
                    control: self.control()?,
                    combine,
                    outputs: vec![self.output_kind(oracle)?],
                    seed,
                };
                Generator::wreath(&spec, oracle)
            }
            "abc" => {
                let f = self
                    .abc
                    .as_ref()
                    .ok_or_else(|| GenError::Invalid("abc spec needs 'abc' section".into()))?;
                let c = self.control()?;
                let lfsr = match c {
                    Control::Lfsr(l) => l,
                    Control::Consts(_) => {
                        return Err(GenError::Invalid("abc control must be an lfsr".into()))
                    }
                };
                let spec = AbcSpec {
                    width: self.width,
                    lfsr,
                    a: [
                        parse_hex(&f.a[0])?,
                        parse_hex(&f.a[1])?,
                        parse_hex(&f.a[2])?,
                    ],
                    b: [parse_hex(&f.b[0])?, parse_hex(&f.b[1])?],
                    d: parse_hex(&f.d_hex)?,
                    dj: f
                        .dj_hex
                        .iter()
                        .map(|s| parse_hex(s))
                        .collect::<Result<Vec<u64>, GenError>>()?,
                    seed,
                };
                Generator::abc(&spec, oracle)
            }
            other => Err(GenError::Invalid(format!("unknown spec type '{other}'"))),
        }
    }
}
