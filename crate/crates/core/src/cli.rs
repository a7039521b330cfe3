//! The `lcextract` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 constraint or validation error,
//! 3 I/O error or malformed file.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{bench, BenchConfig, BenchOp};
use crate::bits::{BitString, Seed, TruthTable};
use crate::error::Error;
use crate::extract::{extract, extract_local_bit, prepare_bmy, ExtractorKind};
use crate::params::{derive_params, fmt_real, override_params, ParamSet};
use crate::perm::preimage_census;
use crate::verify::{
    estimate_distance, hitter_bounds, min_entropy, output_distribution, sample_tests,
    statistical_distance, stream_rng, with_workers, Dist, FlatProfile, Source, SourceKind,
    SourceSpec, TestFamily,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "lcextract", version, about = "Locally computable randomness extractors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Derive a parameter set from the constraint system.
    Params(StrictArgs),
    /// Draw one truth table from a simulated weak source.
    GenSource(GenSourceArgs),
    /// Print all m output bits for one seed.
    Extract(ExtractArgs),
    /// Print output bit i of the local extractor.
    ExtractBit(ExtractBitArgs),
    /// Preimage histogram of the function-to-permutation map.
    Census(CensusArgs),
    /// Exact, flat-source or Monte-Carlo verification report.
    Verify(VerifyArgs),
    /// Timing CSV for one operation.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct StrictArgs {
    #[arg(long)]
    ntilde: u32,
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    beta: f64,
    #[arg(long)]
    m: u64,
    #[arg(long)]
    epsilon: f64,
}

/// Strict parameters by default; `--no-strict` with `--ell` and `--m` for toy
/// sizes.
#[derive(Args, Debug)]
struct ParamArgs {
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    m: Option<u64>,
    /// Defaults to 0.5 under --no-strict.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Direct-product arity; only with --no-strict.
    #[arg(long)]
    ell: Option<u64>,
    #[arg(long)]
    no_strict: bool,
}

enum ParamPlan {
    Strict {
        lambda: f64,
        alpha: f64,
        beta: f64,
        m: u64,
        epsilon: f64,
    },
    Override {
        ell: u64,
        m: u64,
        epsilon: f64,
    },
}

impl ParamPlan {
    fn resolve(&self, n_tilde: u32) -> crate::Result<ParamSet> {
        match *self {
            ParamPlan::Strict {
                lambda,
                alpha,
                beta,
                m,
                epsilon,
            } => derive_params(n_tilde, lambda, alpha, beta, m, epsilon),
            ParamPlan::Override { ell, m, epsilon } => override_params(n_tilde, ell, m, epsilon),
        }
    }
}

impl ParamArgs {
    fn plan(&self) -> Result<ParamPlan, Failure> {
        if self.no_strict {
            if self.lambda.is_some() || self.alpha.is_some() || self.beta.is_some() {
                return Err(Failure::usage(
                    "--lambda, --alpha and --beta are not used with --no-strict",
                ));
            }
            let ell = self
                .ell
                .ok_or_else(|| Failure::usage("--no-strict needs --ell"))?;
            let m = self.m.ok_or_else(|| Failure::usage("--no-strict needs --m"))?;
            Ok(ParamPlan::Override {
                ell,
                m,
                epsilon: self.epsilon.unwrap_or(0.5),
            })
        } else {
            if self.ell.is_some() {
                return Err(Failure::usage("--ell is an override flag and needs --no-strict"));
            }
            let need = |v: Option<f64>, name: &str| {
                v.ok_or_else(|| Failure::usage(format!("strict mode needs --{name} (or pass --no-strict)")))
            };
            Ok(ParamPlan::Strict {
                lambda: need(self.lambda, "lambda")?,
                alpha: need(self.alpha, "alpha")?,
                beta: need(self.beta, "beta")?,
                m: self
                    .m
                    .ok_or_else(|| Failure::usage("strict mode needs --m (or pass --no-strict)"))?,
                epsilon: need(self.epsilon, "epsilon")?,
            })
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum KindArg {
    Bmy,
    Local,
}

impl From<KindArg> for ExtractorKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Bmy => ExtractorKind::Bmy,
            KindArg::Local => ExtractorKind::Local,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SourceKindArg {
    Uniform,
    FlatRandomSubset,
    BitFixing,
    BiasedIid,
    Constant,
}

/// Weak-source description shared by `gen-source` and `verify`.
#[derive(Args, Debug)]
struct SourceArgs {
    /// Target min-entropy in bits (flat-random-subset, bit-fixing).
    #[arg(long)]
    k: Option<u64>,
    /// Probability of a 1 bit (biased-iid).
    #[arg(long)]
    bias: Option<f64>,
    /// Entry value (constant).
    #[arg(long)]
    value: Option<u32>,
    /// Binary string of N_bar bits, 1 = fixed (bit-fixing).
    #[arg(long, requires = "fixed_values")]
    fixed_mask: Option<String>,
    /// Binary string of N_bar bits giving the fixed values (bit-fixing).
    #[arg(long, requires = "fixed_mask")]
    fixed_values: Option<String>,
}

impl SourceArgs {
    fn kind(&self, kind: SourceKindArg) -> Result<SourceKind, Failure> {
        Ok(match kind {
            SourceKindArg::Uniform => SourceKind::Uniform,
            SourceKindArg::FlatRandomSubset => SourceKind::FlatRandomSubset,
            SourceKindArg::BitFixing => {
                let fixed = match (&self.fixed_mask, &self.fixed_values) {
                    (Some(mask), Some(values)) => Some((
                        BitString::parse_binary(mask).map_err(Failure::usage)?,
                        BitString::parse_binary(values).map_err(Failure::usage)?,
                    )),
                    _ => None,
                };
                SourceKind::BitFixing { fixed }
            }
            SourceKindArg::BiasedIid => SourceKind::BiasedIid {
                bias: self
                    .bias
                    .ok_or_else(|| Failure::usage("biased-iid needs --bias"))?,
            },
            SourceKindArg::Constant => SourceKind::Constant {
                value: self
                    .value
                    .ok_or_else(|| Failure::usage("constant needs --value"))?,
            },
        })
    }
}

#[derive(Args, Debug)]
struct GenSourceArgs {
    #[arg(long, value_enum)]
    kind: SourceKindArg,
    #[arg(long)]
    ntilde: u32,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    source: SourceArgs,
}

#[derive(Args, Debug)]
struct ExtractArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Truth-table file.
    #[arg(long)]
    source: PathBuf,
    /// x₁‖…‖x_ℓ‖r as exactly ⌈d/4⌉ hex digits.
    #[arg(long)]
    seed: String,
    /// Print the output as hex instead of bits.
    #[arg(long)]
    hex: bool,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args, Debug)]
struct ExtractBitArgs {
    #[arg(long)]
    i: u64,
    /// Truth-table file.
    #[arg(long)]
    source: PathBuf,
    /// x₁‖…‖x_ℓ‖r as exactly ⌈d/4⌉ hex digits.
    #[arg(long)]
    seed: String,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args, Debug)]
struct CensusArgs {
    /// Domain size N (2..=8).
    #[arg(long = "N")]
    n: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    /// Exact output distribution of one table over all seeds.
    Exact,
    /// Bad-hitter counts and worst flat sources over every table.
    Flat,
    /// Monte-Carlo distance estimate.
    Mc,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum FamilyArg {
    Random,
    Prefix,
    Parity,
}

impl From<FamilyArg> for TestFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Random => TestFamily::Random,
            FamilyArg::Prefix => TestFamily::Prefix,
            FamilyArg::Parity => TestFamily::Parity,
        }
    }
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long)]
    ntilde: Option<u32>,
    /// Truth-table file used as the source (exact, mc).
    #[arg(long, conflicts_with = "source_kind")]
    source: Option<PathBuf>,
    /// Simulated source (exact, mc); defaults to uniform.
    #[arg(long, value_enum)]
    source_kind: Option<SourceKindArg>,
    #[command(flatten)]
    source_args: SourceArgs,
    /// Monte-Carlo sample count.
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    /// Number of sampled tests W (flat).
    #[arg(long, default_value_t = 20)]
    tests: usize,
    #[arg(long, value_enum, default_value_t = FamilyArg::Random)]
    family: FamilyArg,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
    #[arg(long)]
    workers: Option<usize>,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum BenchOpArg {
    LocalBit,
    Bmy,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, value_enum)]
    op: BenchOpArg,
    #[arg(long, value_delimiter = ',', default_value = "12,16,20")]
    sizes: Vec<u32>,
    #[arg(long, default_value_t = 21)]
    reps: usize,
    #[arg(long, default_value_t = 4)]
    ell: u64,
    /// Output lengths to time, interleaved.
    #[arg(long, value_delimiter = ',', default_value = "16,256")]
    ms: Vec<u64>,
    /// Calls per timed batch (local-bit).
    #[arg(long, default_value_t = 4096)]
    batch: usize,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
}

/// A failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl ToString) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) | Error::Format(_) => EXIT_IO,
            _ => EXIT_INVALID,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_IO,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<(), Failure>;

/// Runs the CLI on `argv` (program name first) with the process streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

/// Runs the CLI writing results to `out` and diagnostics to `err`.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Outcome {
    match command {
        Command::Params(a) => cmd_params(a, out),
        Command::GenSource(a) => cmd_gen_source(a, out),
        Command::Extract(a) => cmd_extract(a, out),
        Command::ExtractBit(a) => cmd_extract_bit(a, out),
        Command::Census(a) => cmd_census(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Bench(a) => cmd_bench(a, out),
    }
}

fn cmd_params(a: StrictArgs, out: &mut dyn Write) -> Outcome {
    let p = derive_params(a.ntilde, a.lambda, a.alpha, a.beta, a.m, a.epsilon)?;
    write!(out, "{}", p.to_kv())?;
    Ok(())
}

fn cmd_gen_source(a: GenSourceArgs, out: &mut dyn Write) -> Outcome {
    let kind = a.source.kind(a.kind)?;
    let p = override_params(a.ntilde, 1, 1, 0.5)?;
    let spec = SourceSpec::new(kind, a.source.k, a.rng_seed);
    let source = Source::new(&spec, &p)?;
    let table = source.draw(&mut stream_rng(a.rng_seed, 0)).into_owned();
    table.write_file(&a.out)?;
    writeln!(out, "out={}", a.out.display())?;
    writeln!(out, "kind={}", spec.kind.name())?;
    writeln!(out, "n_tilde={}", p.n_tilde)?;
    writeln!(out, "N_bar={}", p.n_bar)?;
    writeln!(out, "min_entropy={}", fmt_real(source.min_entropy()))?;
    writeln!(out, "rng_seed={}", a.rng_seed)?;
    Ok(())
}

fn check_hex(seed: &str) -> Outcome {
    if seed.is_empty() || !seed.chars().all(|c| c.is_ascii_hexdigit()) {
        return Err(Failure::usage(format!("seed must be hex digits, got {seed:?}")));
    }
    Ok(())
}

/// Reads the table and parameters and parses the seed. Flag-level checks run
/// before the file is opened.
fn load(source: &PathBuf, seed: &str, params: &ParamArgs) -> Result<(TruthTable, ParamSet, Seed), Failure> {
    let plan = params.plan()?;
    check_hex(seed)?;
    let table = TruthTable::read_file(source)?;
    let p = plan.resolve(table.n_tilde())?;
    let seed = Seed::from_hex(seed, &p).map_err(|e| match e {
        Error::SeedMismatch(msg) => Failure::usage(msg),
        other => other.into(),
    })?;
    Ok((table, p, seed))
}

fn cmd_extract(a: ExtractArgs, out: &mut dyn Write) -> Outcome {
    let (table, p, seed) = load(&a.source, &a.seed, &a.params)?;
    let bits = match a.kind {
        KindArg::Bmy => prepare_bmy(&table, &p)?.extract(&seed, &p)?,
        KindArg::Local => extract(ExtractorKind::Local, &table, &seed, &p)?,
    };
    if a.hex {
        writeln!(out, "{}", bits.to_hex())?;
    } else {
        writeln!(out, "{}", bits.to_binary())?;
    }
    Ok(())
}

fn cmd_extract_bit(a: ExtractBitArgs, out: &mut dyn Write) -> Outcome {
    let (table, p, seed) = load(&a.source, &a.seed, &a.params)?;
    let bit = extract_local_bit(&table, &seed, &p, a.i)?;
    writeln!(out, "{}", bit as u8)?;
    Ok(())
}

fn cmd_census(a: CensusArgs, out: &mut dyn Write) -> Outcome {
    write!(out, "{}", preimage_census(a.n)?.to_text())?;
    Ok(())
}

fn cmd_verify(a: VerifyArgs, out: &mut dyn Write) -> Outcome {
    let plan = a.params.plan()?;
    let kind: ExtractorKind = a.kind.into();
    let spec = match &a.source {
        Some(path) => SourceSpec::new(SourceKind::File { path: path.clone() }, None, a.rng_seed),
        None => SourceSpec::new(
            a.source_args.kind(a.source_kind.unwrap_or(SourceKindArg::Uniform))?,
            a.source_args.k,
            a.rng_seed,
        ),
    };
    if a.workers == Some(0) {
        return Err(Failure::usage("--workers must be >= 1"));
    }
    let n_tilde = match (&a.source, a.ntilde) {
        (Some(path), given) => {
            let t = TruthTable::read_file(path)?;
            if let Some(n) = given.filter(|&n| n != t.n_tilde()) {
                return Err(Error::Invalid(format!(
                    "--ntilde {n} does not match the source file (ntilde={})",
                    t.n_tilde()
                ))
                .into());
            }
            t.n_tilde()
        }
        (None, Some(n)) => n,
        (None, None) => return Err(Failure::usage("verify needs --ntilde or --source")),
    };
    let p = plan.resolve(n_tilde)?;
    let mode = a.mode;
    let (tests, family, rng_seed, samples) = (a.tests, a.family.into(), a.rng_seed, a.samples);
    let text = with_workers(a.workers, || -> Result<String, Failure> {
        match mode {
            Mode::Exact => verify_exact(kind, &spec, &p),
            Mode::Flat => verify_flat(kind, &p, family, tests, rng_seed),
            Mode::Mc => verify_mc(kind, &spec, &p, samples, rng_seed),
        }
    })??;
    write!(out, "{text}")?;
    writeln!(out, "mode={}", format!("{mode:?}").to_lowercase())?;
    writeln!(out, "kind={kind}")?;
    writeln!(out, "rng_seed={rng_seed}")?;
    write!(out, "{}", p.to_kv())?;
    Ok(())
}

fn verify_exact(kind: ExtractorKind, spec: &SourceSpec, p: &ParamSet) -> Result<String, Failure> {
    let source = Source::new(spec, p)?;
    let table = source.draw(&mut stream_rng(spec.rng_seed, 0));
    let dist = output_distribution(kind, &table, p)?;
    let distance = statistical_distance(&dist, &Dist::uniform(p.m as u32))?;
    let support = dist.probs().iter().filter(|&&q| q > 0.0).count();
    Ok(format!(
        "Exact output distribution of E(x, U_d) over all 2^{} seeds for one {} table.\n\
         Distance from uniform on {{0,1}}^{}: {}\n\n\
         source={}\nseeds={}\nsupport={}\noutput_min_entropy={}\ndistance={}\n",
        p.d,
        spec.kind.name(),
        p.m,
        fmt_real(distance),
        spec.kind.name(),
        1u64 << p.d,
        support,
        fmt_real(min_entropy(&dist)),
        fmt_real(distance),
    ))
}

fn verify_flat(
    kind: ExtractorKind,
    p: &ParamSet,
    family: TestFamily,
    tests: usize,
    rng_seed: u64,
) -> Result<String, Failure> {
    if tests == 0 {
        return Err(Failure::usage("--tests must be >= 1"));
    }
    let mut text = format!(
        "Flat-source check over all 2^{} tables and 2^{} seeds, {} {} tests, epsilon={}.\n",
        p.n_bar,
        p.d,
        tests,
        family,
        fmt_real(p.epsilon)
    );
    let mut max_bad = 0;
    let mut worst_ratio = 0.0f64;
    let mut checked = 0usize;
    let mut holds = true;
    for (j, w) in sample_tests(family, p.m as u32, tests, rng_seed).iter().enumerate() {
        let profile = FlatProfile::new(kind, w, p)?;
        let bad = profile.bad_hitters(p.epsilon);
        max_bad = max_bad.max(bad);
        let instances = hitter_bounds(kind, w, p.epsilon, p)?;
        let line: Vec<String> = instances
            .iter()
            .map(|i| format!("k={}:{}", fmt_real(i.k), fmt_real(i.worst)))
            .collect();
        text.push_str(&format!(
            "W{j} |W|={} bad={} worst[{}]\n",
            w.len(),
            bad,
            line.join(" ")
        ));
        for i in &instances {
            checked += 1;
            holds &= i.holds();
            worst_ratio = worst_ratio.max(i.worst / i.bound);
        }
    }
    text.push_str(&format!(
        "\nfamily={family}\ntests={tests}\nepsilon={}\nmax_bad={max_bad}\ninstances={checked}\n\
         max_worst_over_bound={}\nbound_holds={holds}\n",
        fmt_real(p.epsilon),
        fmt_real(worst_ratio)
    ));
    Ok(text)
}

fn verify_mc(
    kind: ExtractorKind,
    spec: &SourceSpec,
    p: &ParamSet,
    samples: u64,
    rng_seed: u64,
) -> Result<String, Failure> {
    let e = estimate_distance(kind, spec, p, samples, rng_seed)?;
    Ok(format!(
        "Monte-Carlo estimate of the distance of E(X, U_d) from U_{} with {} samples \
         from a {} source.\nestimate {} +/- {} (99% confidence)\n\n\
         source={}\nsamples={}\nestimate={}\nradius={}\n",
        p.m,
        samples,
        spec.kind.name(),
        fmt_real(e.estimate),
        fmt_real(e.radius),
        spec.kind.name(),
        samples,
        fmt_real(e.estimate),
        fmt_real(e.radius),
    ))
}

fn cmd_bench(a: BenchArgs, out: &mut dyn Write) -> Outcome {
    let op = match a.op {
        BenchOpArg::LocalBit => BenchOp::LocalBit,
        BenchOpArg::Bmy => BenchOp::BmyTotal,
    };
    let cfg = BenchConfig {
        sizes: a.sizes,
        reps: a.reps,
        ell: a.ell,
        ms: a.ms,
        rng_seed: a.rng_seed,
        batch: a.batch,
    };
    let report = bench(op, &cfg)?;
    write!(out, "{}", report.to_csv())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("lcextract").chain(args.iter().copied());
        let code = run_with(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn params_worked_instance() {
        let (code, out, _) = run_capture(&[
            "params", "--ntilde", "20", "--lambda", "0.9", "--alpha", "0.2", "--beta", "0.05",
            "--m", "16", "--epsilon", "0.5",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("ell=720\n") && out.contains("d=28800\n") && out.contains("delta=0.025\n"));
    }

    #[test]
    fn params_constraint_exit_code() {
        let (code, _, err) = run_capture(&[
            "params", "--ntilde", "20", "--lambda", "0.9", "--alpha", "0.3", "--beta", "0.05",
            "--m", "16", "--epsilon", "0.5",
        ]);
        assert_eq!(code, EXIT_INVALID);
        assert!(err.contains("alpha >= lambda/3"));
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_capture(&[]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["census"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn override_needs_no_strict() {
        let (code, _, err) = run_capture(&[
            "extract", "--kind", "local", "--source", "/nonexistent", "--seed", "9", "--ell", "1",
            "--m", "2",
        ]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--no-strict"));
    }

    #[test]
    fn census_text() {
        let (code, out, _) = run_capture(&["census", "--N", "4"]);
        assert_eq!(code, 0);
        assert!(out.contains("total=256\n") && out.contains("max=64\n"));
        assert_eq!(run_capture(&["census", "--N", "9"]).0, EXIT_INVALID);
    }
}
