//! Command-line front end: `verify`, `classify`, `gen`, `analyze`, `plot`,
//! `abc`. Exit codes encode verdicts for scripting: 0 proven/pass,
//! 1 refuted/fail, 2 unknown, 64 usage, 65 operational, 66 I/O.

use std::ffi::OsString;
use std::fs;
use std::io::Write;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::analysis::{
    analyze_generator, expr_orbit_period, line_count, occupancy_pgm, pair_scatter_csv,
};
use crate::ergodic::{
    classify_poly_ff, classify_poly_modp, classify_rational_poly, klimov_shamir_c,
    permutation_poly, verify_ergodic, verify_measure_preserving, ErgodicPolicy, KsClass, MpPolicy,
    Oracle, PolicyError, PolyClass, PolyFF, Verdict, VerdictResult,
};
use crate::expr::{parse_with_defs, TExpr};
use crate::generator::{words_to_bits, words_to_bytes, AbcSpec, Generator, SpecFile, DEFAULT_TAPS};
use crate::word::Word;

pub const EXIT_PROVEN: i32 = 0;
pub const EXIT_REFUTED: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_OPERATIONAL: i32 = 65;
pub const EXIT_IO: i32 = 66;

#[derive(Parser, Debug)]
#[command(
    name = "tflab",
    version,
    about = "Laboratory for T-functions over truncated 2-adic integers"
)]
struct Cli {
    /// Cap on exhaustive state scans (states, not bits); also set by
    /// TFLAB_ORACLE_CAP.
    #[arg(long, global = true)]
    oracle_cap: Option<u64>,
    /// Worker threads for exhaustive scans; 0 = available parallelism.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Seed for randomized searches; fixed default keeps runs reproducible.
    #[arg(long, global = true, default_value_t = 1)]
    rng_seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Verify ergodicity or measure preservation of an expression.
    Verify(VerifyArgs),
    /// Classify polynomials and the x+(x²|C) family.
    Classify(ClassifyArgs),
    /// Emit a keystream from a validated generator spec.
    Gen(GenArgs),
    /// Measure a generator's output sequence.
    Analyze(AnalyzeArgs),
    /// Emit pair-scatter data as CSV and optional occupancy bitmaps.
    Plot(PlotArgs),
    /// ABC template helpers.
    Abc(AbcArgs),
}

#[derive(Args, Debug)]
struct ExprArgs {
    /// Expression over the grammar (see README).
    #[arg(long)]
    expr: String,
    /// Named sub-expression, `name=body`; repeatable.
    #[arg(long = "def")]
    defs: Vec<String>,
}

impl ExprArgs {
    fn parse(&self) -> Result<TExpr, String> {
        let defs: Vec<(String, String)> = self
            .defs
            .iter()
            .map(|d| {
                d.split_once('=')
                    .map(|(a, b)| (a.trim().to_string(), b.to_string()))
                    .ok_or_else(|| format!("--def wants name=body, got '{d}'"))
            })
            .collect::<Result<_, String>>()?;
        let borrowed: Vec<(&str, &str)> =
            defs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        parse_with_defs(&self.expr, &borrowed).map_err(|e| e.to_string())
    }
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    expr: ExprArgs,
    #[arg(long, default_value_t = 32)]
    width: u32,
    /// ergodic | mp
    #[arg(long)]
    property: String,
    /// deriv | brute | anf | ff | b2
    #[arg(long, default_value = "deriv")]
    method: String,
    /// Write the certificate JSON here instead of stdout.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    /// Falling-factorial coefficients, comma separated.
    #[arg(long)]
    poly_ff: Option<String>,
    /// Monomial coefficients, comma separated (integers).
    #[arg(long)]
    poly: Option<String>,
    /// Monomial coefficients over the rationals, e.g. "1,1/2".
    #[arg(long)]
    rational: Option<String>,
    /// Permutation-parity test of monomial coefficients.
    #[arg(long)]
    perm_poly: Option<String>,
    /// Classify x + (x*x | C) by the bits of C.
    #[arg(long)]
    ks_c: Option<u64>,
    #[arg(long, default_value_t = 2)]
    prime: u64,
    #[arg(long, default_value_t = 8)]
    width: u32,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    spec: String,
    #[arg(long, default_value_t = 16)]
    count: usize,
    /// Print words as hex, one per line (default).
    #[arg(long)]
    hex: bool,
    /// Write little-endian padded words to --out.
    #[arg(long)]
    raw: bool,
    /// Write the LSB-first bit packing to --out.
    #[arg(long)]
    bits: bool,
    #[arg(long)]
    out: Option<String>,
    /// Also write the full-period analysis report here.
    #[arg(long)]
    report: Option<String>,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[arg(long)]
    spec: String,
    #[arg(long)]
    out: Option<String>,
    /// Also write the pair-scatter CSV of one period here.
    #[arg(long)]
    scatter: Option<String>,
}

#[derive(Args, Debug)]
struct PlotArgs {
    #[arg(long)]
    expr: Option<String>,
    #[arg(long)]
    spec: Option<String>,
    /// Read words from a raw little-endian file instead.
    #[arg(long = "in")]
    input: Option<String>,
    #[arg(long, default_value_t = 8)]
    width: u32,
    /// Emit consecutive-pair scatter CSV.
    #[arg(long)]
    pairs: bool,
    /// Also print the distinct-value count of x' - b·x for this b.
    #[arg(long)]
    lines: Option<u64>,
    /// Also write a 2^k x 2^k occupancy PGM next to --out.
    #[arg(long)]
    pgm: Option<u32>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of steps; 0 = one full period.
    #[arg(long, default_value_t = 0)]
    count: usize,
}

#[derive(Args, Debug)]
struct AbcArgs {
    #[command(subcommand)]
    action: AbcAction,
}

#[derive(Subcommand, Debug)]
enum AbcAction {
    /// Check a template parameter set.
    Validate {
        #[arg(long)]
        spec: String,
    },
    /// Print a conforming parameter set.
    Template {
        #[arg(long, default_value_t = 8)]
        width: u32,
        #[arg(long)]
        out: Option<String>,
    },
}

fn oracle_from(cli: &Cli) -> Oracle {
    let env_cap = std::env::var("TFLAB_ORACLE_CAP")
        .ok()
        .and_then(|v| v.parse::<u64>().ok());
    let jobs = if cli.jobs == 0 {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    } else {
        cli.jobs
    };
    Oracle {
        cap: cli
            .oracle_cap
            .or(env_cap)
            .unwrap_or(crate::ergodic::DEFAULT_ORACLE_CAP),
        jobs,
    }
}

fn emit(out: &Option<String>, text: &str) -> Result<(), i32> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| {
            eprintln!("error: cannot write {path}: {e}");
            EXIT_IO
        }),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn verdict_exit(v: &Verdict) -> i32 {
    match v.result {
        VerdictResult::Proven => EXIT_PROVEN,
        VerdictResult::Refuted => EXIT_REFUTED,
        VerdictResult::Unknown => EXIT_UNKNOWN,
    }
}

fn parse_i64_list(text: &str) -> Result<Vec<i64>, String> {
    text.split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|e| format!("'{t}': {e}")))
        .collect()
}

fn parse_rational_list(text: &str) -> Result<Vec<BigRational>, String> {
    text.split(',')
        .map(|t| {
            let t = t.trim();
            match t.split_once('/') {
                Some((n, d)) => {
                    let n: BigInt = n.trim().parse().map_err(|e| format!("'{t}': {e}"))?;
                    let d: BigInt = d.trim().parse().map_err(|e| format!("'{t}': {e}"))?;
                    Ok(BigRational::new(n, d))
                }
                None => {
                    let n: BigInt = t.parse().map_err(|e| format!("'{t}': {e}"))?;
                    Ok(BigRational::new(n, BigInt::one()))
                }
            }
        })
        .collect()
}

fn run_verify(a: &VerifyArgs, oracle: &Oracle) -> i32 {
    let expr = match a.expr.parse() {
        Ok(e) => e,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let result: Result<Verdict, PolicyError> = match (a.property.as_str(), a.method.as_str()) {
        ("ergodic", "deriv") => verify_ergodic(&expr, ErgodicPolicy::DerivativeMod4, oracle),
        ("ergodic", "brute") => verify_ergodic(&expr, ErgodicPolicy::Brute(a.width), oracle),
        ("ergodic", "anf") => {
            verify_ergodic(&expr, ErgodicPolicy::Anf(a.width.saturating_sub(1)), oracle)
        }
        ("ergodic", "ff") => verify_ergodic(&expr, ErgodicPolicy::FallingFactorial, oracle),
        ("ergodic", "b2") => verify_ergodic(&expr, ErgodicPolicy::B2Class, oracle),
        ("mp", "deriv") => verify_measure_preserving(&expr, MpPolicy::DerivativeMod2, oracle),
        ("mp", "brute") => verify_measure_preserving(&expr, MpPolicy::Brute(a.width), oracle),
        ("mp", "anf") => {
            verify_measure_preserving(&expr, MpPolicy::Anf(a.width.saturating_sub(1)), oracle)
        }
        ("mp", "ff") => verify_measure_preserving(&expr, MpPolicy::FallingFactorial, oracle),
        ("mp", "b2") => verify_measure_preserving(&expr, MpPolicy::B2Class, oracle),
        (p, m) => {
            eprintln!("error: unknown property/method '{p}'/'{m}'");
            return EXIT_USAGE;
        }
    };
    match result {
        Ok(v) => {
            if emit(&a.out, &v.to_json()).is_err() {
                return EXIT_IO;
            }
            verdict_exit(&v)
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_OPERATIONAL
        }
    }
}

fn class_name(c: PolyClass) -> &'static str {
    match c {
        PolyClass::Ergodic => "Ergodic",
        PolyClass::MeasurePreservingOnly => "MeasurePreservingOnly",
        PolyClass::Neither => "Neither",
    }
}

fn run_classify(a: &ClassifyArgs, oracle: &Oracle) -> i32 {
    if let Some(text) = &a.poly_ff {
        let coeffs = match parse_i64_list(text) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_USAGE;
            }
        };
        let class = classify_poly_ff(&PolyFF::from_i64(&coeffs));
        println!("{}", class_name(class));
        return if class == PolyClass::Neither {
            EXIT_REFUTED
        } else {
            EXIT_PROVEN
        };
    }
    if let Some(text) = &a.poly {
        let coeffs = match parse_i64_list(text) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_USAGE;
            }
        };
        return match classify_poly_modp(a.prime, &coeffs, oracle) {
            Ok(class) => {
                println!("{}", class_name(class));
                if class == PolyClass::Neither {
                    EXIT_REFUTED
                } else {
                    EXIT_PROVEN
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_OPERATIONAL
            }
        };
    }
    if let Some(text) = &a.rational {
        let coeffs = match parse_rational_list(text) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_USAGE;
            }
        };
        return match classify_rational_poly(&coeffs, a.prime, oracle) {
            Ok(class) => {
                println!("{}", class_name(class));
                if class == PolyClass::Neither {
                    EXIT_REFUTED
                } else {
                    EXIT_PROVEN
                }
            }
            Err(e) => {
                println!("{e}");
                EXIT_REFUTED
            }
        };
    }
    if let Some(text) = &a.perm_poly {
        let coeffs = match parse_i64_list(text) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_USAGE;
            }
        };
        let ok = permutation_poly(&coeffs);
        println!("{}", if ok { "Bijective" } else { "NotBijective" });
        return if ok { EXIT_PROVEN } else { EXIT_REFUTED };
    }
    if let Some(c) = a.ks_c {
        let class = klimov_shamir_c(Word::new(c, a.width.max(3)));
        let (name, code) = match class {
            KsClass::SingleCycle => ("SingleCycle", EXIT_PROVEN),
            KsClass::InvertibleOnly => ("InvertibleOnly", EXIT_PROVEN),
            KsClass::NotInvertible => ("NotInvertible", EXIT_REFUTED),
        };
        println!("{name}");
        return code;
    }
    eprintln!("error: classify needs one of --poly-ff, --poly, --rational, --perm-poly, --ks-c");
    EXIT_USAGE
}

fn load_generator(path: &str, oracle: &Oracle) -> Result<(SpecFile, Generator), i32> {
    let text = fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {path}: {e}");
        EXIT_IO
    })?;
    let spec = SpecFile::from_json(&text).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_USAGE
    })?;
    let gen = spec.to_generator(oracle).map_err(|e| {
        eprintln!("error: spec refused: {e}");
        EXIT_REFUTED
    })?;
    Ok((spec, gen))
}

fn run_gen(a: &GenArgs, oracle: &Oracle, cap: u64) -> i32 {
    let (spec, mut gen) = match load_generator(&a.spec, oracle) {
        Ok(x) => x,
        Err(code) => return code,
    };
    let words = match gen.keystream(a.count) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_OPERATIONAL;
        }
    };
    let width = gen.out_width();
    if a.raw || a.bits {
        let Some(path) = &a.out else {
            eprintln!("error: --raw/--bits need --out");
            return EXIT_USAGE;
        };
        let bytes = if a.raw {
            words_to_bytes(&words, width)
        } else {
            words_to_bits(&words, width).to_bytes()
        };
        if let Err(e) = fs::write(path, bytes) {
            eprintln!("error: cannot write {path}: {e}");
            return EXIT_IO;
        }
    } else {
        let hex_digits = width.div_ceil(4) as usize;
        let text: String = words
            .iter()
            .map(|w| format!("{w:0hex_digits$x}\n"))
            .collect();
        if emit(&a.out, text.trim_end()).is_err() {
            return EXIT_IO;
        }
    }
    if let Some(report_path) = &a.report {
        let fresh = match spec.to_generator(oracle) {
            Ok(g) => g,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_OPERATIONAL;
            }
        };
        match analyze_generator(&fresh, clock_count(&spec), cap) {
            Ok(report) => {
                if let Err(e) = fs::write(report_path, report.to_json()) {
                    eprintln!("error: cannot write {report_path}: {e}");
                    return EXIT_IO;
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_OPERATIONAL;
            }
        }
    }
    EXIT_PROVEN
}

fn clock_count(spec: &SpecFile) -> usize {
    match spec.kind.as_str() {
        "wreath" => spec
            .control
            .as_ref()
            .map(|c| {
                c.consts
                    .as_ref()
                    .map(|v| v.len())
                    .or_else(|| c.lfsr.as_ref().map(|l| (1usize << l.cells) - 1))
                    .unwrap_or(1)
            })
            .unwrap_or(1),
        "abc" => spec
            .control
            .as_ref()
            .and_then(|c| c.lfsr.as_ref())
            .map(|l| (1usize << l.cells) - 1)
            .unwrap_or(1),
        _ => 1,
    }
}

fn run_analyze(a: &AnalyzeArgs, oracle: &Oracle, cap: u64) -> i32 {
    let (spec, gen) = match load_generator(&a.spec, oracle) {
        Ok(x) => x,
        Err(code) => return code,
    };
    let mut report = match analyze_generator(&gen, clock_count(&spec), cap) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_OPERATIONAL;
        }
    };
    if let Some(path) = &a.scatter {
        let mut runner = gen.clone();
        let words = match runner.keystream(report.period.len as usize) {
            Ok(w) => w,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_OPERATIONAL;
            }
        };
        let csv = pair_scatter_csv(&words, gen.out_width());
        if let Err(e) = fs::write(path, csv) {
            eprintln!("error: cannot write {path}: {e}");
            return EXIT_IO;
        }
        report.files.scatter_csv = Some(path.clone());
    }
    if emit(&a.out, &report.to_json()).is_err() {
        return EXIT_IO;
    }
    EXIT_PROVEN
}

fn run_plot(a: &PlotArgs, oracle: &Oracle, cap: u64) -> i32 {
    let (words, width): (Vec<u64>, u32) = if let Some(path) = &a.input {
        match fs::read(path) {
            Ok(bytes) => (crate::generator::bytes_to_words(&bytes, a.width), a.width),
            Err(e) => {
                eprintln!("error: cannot read {path}: {e}");
                return EXIT_IO;
            }
        }
    } else if let Some(src) = &a.expr {
        let expr = match crate::expr::parse(src) {
            Ok(e) => e,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_USAGE;
            }
        };
        let steps = if a.count > 0 {
            a.count as u64
        } else {
            match expr_orbit_period(&expr, a.width, a.seed, cap) {
                Ok((pre, lambda)) => pre + lambda,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_OPERATIONAL;
                }
            }
        };
        let mut words = Vec::with_capacity(steps as usize);
        let mut x = Word::new(a.seed, a.width).value();
        for _ in 0..steps {
            words.push(x);
            x = match expr.eval1(x, a.width) {
                Ok(v) => v,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_OPERATIONAL;
                }
            };
        }
        (words, a.width)
    } else if let Some(path) = &a.spec {
        let (_, mut gen) = match load_generator(path, oracle) {
            Ok(x) => x,
            Err(code) => return code,
        };
        let steps = if a.count > 0 {
            a.count as u64
        } else {
            match crate::analysis::generator_period(&gen, cap) {
                Ok((pre, lambda)) => pre + lambda,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_OPERATIONAL;
                }
            }
        };
        match gen.keystream(steps as usize) {
            Ok(w) => {
                let width = gen.out_width();
                (w, width)
            }
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_OPERATIONAL;
            }
        }
    } else {
        eprintln!("error: plot needs --expr, --spec, or --in");
        return EXIT_USAGE;
    };

    if a.pairs {
        let csv = pair_scatter_csv(&words, width);
        if emit(&a.out, &csv).is_err() {
            return EXIT_IO;
        }
    }
    if let Some(b) = a.lines {
        println!("line_count(b={b}) = {}", line_count(&words, width, b));
    }
    if let Some(k) = a.pgm {
        if k == 0 || k > width.min(12) {
            eprintln!("error: --pgm resolution must be in 1..={}", width.min(12));
            return EXIT_USAGE;
        }
        let Some(out) = &a.out else {
            eprintln!("error: --pgm needs --out to derive the image path");
            return EXIT_USAGE;
        };
        let path = format!("{out}.pgm");
        if let Err(e) = fs::write(&path, occupancy_pgm(&words, width, k)) {
            eprintln!("error: cannot write {path}: {e}");
            return EXIT_IO;
        }
    }
    EXIT_PROVEN
}

fn run_abc(a: &AbcArgs, oracle: &Oracle) -> i32 {
    match &a.action {
        AbcAction::Validate { spec } => {
            let text = match fs::read_to_string(spec) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {spec}: {e}");
                    return EXIT_IO;
                }
            };
            let file = match SpecFile::from_json(&text) {
                Ok(f) => f,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_USAGE;
                }
            };
            match file.to_generator(oracle) {
                Ok(g) => {
                    println!("{}", g.certificate().to_json());
                    verdict_exit(g.certificate())
                }
                Err(e) => {
                    eprintln!("refused: {e}");
                    EXIT_REFUTED
                }
            }
        }
        AbcAction::Template { width, out } => {
            let t = AbcSpec::template(*width);
            let file = SpecFile {
                kind: "abc".into(),
                width: *width,
                seed: "0x0".into(),
                exprs: vec![],
                control: Some(crate::generator::ControlFile {
                    consts: None,
                    lfsr: Some(crate::generator::LfsrFile {
                        cells: t.lfsr.cells(),
                        taps_hex: format!("{:#x}", DEFAULT_TAPS[t.lfsr.cells() as usize]),
                        state_hex: "0x1".into(),
                    }),
                }),
                combine: None,
                output: None,
                abc: Some(crate::generator::AbcFile {
                    a: [
                        format!("{:#x}", t.a[0]),
                        format!("{:#x}", t.a[1]),
                        format!("{:#x}", t.a[2]),
                    ],
                    b: [format!("{:#x}", t.b[0]), format!("{:#x}", t.b[1])],
                    d_hex: format!("{:#x}", t.d),
                    dj_hex: t.dj.iter().map(|d| format!("{d:#x}")).collect(),
                }),
                verdict: None,
            };
            if emit(out, &file.to_json()).is_err() {
                return EXIT_IO;
            }
            EXIT_PROVEN
        }
    }
}

/// Entry point; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    let oracle = oracle_from(&cli);
    // every run is reproducible from this line
    let _ = writeln!(
        std::io::stderr(),
        "# config: cap={} jobs={} rng_seed={} cmd={:?}",
        oracle.cap,
        oracle.jobs,
        cli.rng_seed,
        cli.cmd
    );
    match &cli.cmd {
        Cmd::Verify(a) => run_verify(a, &oracle),
        Cmd::Classify(a) => run_classify(a, &oracle),
        Cmd::Gen(a) => run_gen(a, &oracle, oracle.cap),
        Cmd::Analyze(a) => run_analyze(a, &oracle, oracle.cap),
        Cmd::Plot(a) => run_plot(a, &oracle, oracle.cap),
        Cmd::Abc(a) => run_abc(a, &oracle),
    }
}
