//! Command-line front end. Every stochastic subcommand takes a mandatory
//! `--seed`; identical arguments give byte-identical output.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::families::{builtin_family, family_from_descriptor, Construction, FamilyDescriptor, FamilySpec, MSequence};
use crate::intensity::{exact_report, mc_intensity, prime_bounds, write_sweep_csv, IntensityReport, IntensitySource, IntervalFamily};
use crate::moments::{FloatMomentEngine, MomentEngine};
use crate::numeric::{parse_rational, rational_string};
use crate::pd::{sample_pd_replicates, solve_dickman, solve_gtheta, FunctionTable, PdParams, StickBreaking};
use crate::samplers::{
    primes_up_to, scaled_sizes, write_counts_csv, write_scaled_csv, PrimeFactorSampler, ScaledSizeSeq, StructureSampler,
};
use crate::series::{family_series, FsPredictor};
use crate::stats::{cdf_curve, joint_cdf_check, ks_against, write_cdf_csv, Cdf, LargestPartCdf};
use crate::verify::{run_all, run_criterion, Budget, CriterionReport, VerifyConfig, DEFAULT_VERIFY_SEED};

/// Version of the JSON report layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "pd-limits", version, about = "Poisson-Dirichlet limits of combinatorial structures and prime factorizations")]
pub struct Cli {
    /// Worker threads (default: available cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    /// `permutation`, `polynomial-multiset-F<q>`, `polynomial-selection-F<q>`, `uniform-<c>` with `--kind`,
    /// or `custom` with `--m-csv`.
    #[arg(long)]
    pub family: Option<String>,
    /// Tilt phi, decimal or p/q.
    #[arg(long, default_value = "1")]
    pub phi: String,
    /// Construction of a custom or uniform family.
    #[arg(long, value_parser = parse_construction)]
    pub kind: Option<Construction>,
    /// `i,m_i` rows of a custom family.
    #[arg(long)]
    pub m_csv: Option<PathBuf>,
    /// JSON family descriptor (overrides the other family flags).
    #[arg(long)]
    pub family_json: Option<PathBuf>,
}

fn parse_construction(s: &str) -> std::result::Result<Construction, String> {
    s.parse::<Construction>().map_err(|e| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate the Dickman function.
    Dickman {
        #[arg(long)]
        tmax: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Tabulate g_theta.
    Gtheta {
        #[arg(long)]
        theta: f64,
        #[arg(long)]
        tmax: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact coefficients q_phi(0..=n).
    Coeffs {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        n: usize,
        /// Include Flajolet-Soria predictions (JSON only).
        #[arg(long)]
        predict: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact mixed moment E{C_i1 ... C_ik}.
    Moments {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        indices: Vec<usize>,
        /// Floating-point evaluation with an error bound instead of exact rationals.
        #[arg(long)]
        float: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Draw structures, PD(theta) sequences (`--family pd`) or prime factorizations (`--family primes`).
    Sample {
        #[command(flatten)]
        family: FamilyArgs,
        /// PD parameter for `--family pd`.
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long, default_value_t = 1)]
        replicates: usize,
        #[arg(long)]
        seed: u64,
        /// Number of leading scaled sizes written.
        #[arg(long, default_value_t = 10)]
        k: usize,
        /// Write sparse count pairs (replicate, i, C_i) instead of scaled sizes.
        #[arg(long)]
        counts: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Multi-intensity: exact summation or Monte Carlo, with the comparison values.
    Intensity {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        theta: Option<f64>,
        /// Sizes, comma separated (ignored for `--family pd`).
        #[arg(long, value_delimiter = ',')]
        n: Vec<u64>,
        /// Intervals `a:b,c:d`.
        #[arg(long)]
        intervals: String,
        /// Sum exact moments instead of sampling.
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = 10_000)]
        replicates: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Kolmogorov-Smirnov distance of the largest scaled size to PD(theta).
    Ks {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        theta: Option<f64>,
        /// PD parameter of the reference (default: the family's limit).
        #[arg(long)]
        reference_theta: Option<f64>,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long, default_value_t = 10_000)]
        replicates: usize,
        #[arg(long)]
        seed: u64,
        /// Joint CDF check of the leading k sizes (k <= 3) on `--grid`.
        #[arg(long)]
        joint: Option<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.2, 0.4, 0.6, 0.8, 1.0])]
        grid: Vec<f64>,
        /// Also write the (t, empirical_cdf, theoretical_cdf) curve here.
        #[arg(long)]
        curve: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Prime factors of uniform integers: Mertens sums, intensity and the largest-factor law.
    Billingsley {
        #[arg(long, default_value_t = 1_000_000)]
        n: u64,
        #[arg(long, default_value_t = 100_000)]
        replicates: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "0.2:0.5")]
        intervals: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the acceptance criteria.
    VerifyAll {
        #[arg(long, default_value = "fast")]
        budget: Budget,
        #[arg(long, default_value_t = DEFAULT_VERIFY_SEED)]
        seed: u64,
        /// Only these criteria (comma separated).
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u8>,
        /// JSON report file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

impl clap::builder::ValueParserFactory for Budget {
    type Parser = clap::builder::ValueParser;

    fn value_parser() -> Self::Parser {
        clap::builder::ValueParser::new(|s: &str| s.parse::<Budget>().map_err(|e| e.to_string()))
    }
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<i32> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(Error::domain("--threads must be at least 1"));
        }
        // a second initialisation in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    match cli.command {
        Command::Dickman { tmax, step, output } => table_command("dickman", solve_dickman(tmax, step)?, &output),
        Command::Gtheta { theta, tmax, step, output } => {
            table_command("gtheta", solve_gtheta(PdParams::new(theta)?, tmax, step)?, &output)
        }
        Command::Coeffs { family, n, predict, output } => coeffs(&family.resolve()?, n, predict, &output),
        Command::Moments { family, n, indices, float: false, output } => moments(&family.resolve()?, n, &indices, &output),
        Command::Moments { family, n, indices, float: true, output } => float_moments(&family.resolve()?, n, &indices, &output),
        Command::Sample { family, theta, n, replicates, seed, k, counts, output } => {
            sample(&family, theta, n, replicates, seed, k, counts, &output)
        }
        Command::Intensity { family, theta, n, intervals, exact, replicates, seed, output } => {
            intensity(&family, theta, &n, &IntervalFamily::parse(&intervals)?, exact, replicates, seed, &output)
        }
        Command::Ks { family, theta, reference_theta, n, replicates, seed, joint, grid, curve, output } => {
            ks(&family, theta, reference_theta, n, replicates, seed, joint, &grid, curve.as_deref(), &output)
        }
        Command::Billingsley { n, replicates, seed, intervals, output } => {
            billingsley(n, replicates, seed, &IntervalFamily::parse(&intervals)?, &output)
        }
        Command::VerifyAll { budget, seed, criteria, out } => verify_all(VerifyConfig { budget, seed }, &criteria, out.as_deref()),
    }
}

impl FamilyArgs {
    fn phi(&self) -> Result<BigRational> {
        parse_rational(&self.phi)
    }

    fn name(&self) -> Option<&str> {
        self.family.as_deref()
    }

    fn resolve(&self) -> Result<FamilySpec> {
        if let Some(path) = &self.family_json {
            let desc: FamilyDescriptor = serde_json::from_reader(File::open(path)?)?;
            return family_from_descriptor(&desc);
        }
        if let Some(path) = &self.m_csv {
            let kind = self.kind.ok_or_else(|| Error::Parse("--m-csv needs --kind assembly|multiset|selection".into()))?;
            return FamilySpec::custom(kind, MSequence::from_csv_path(path)?, self.phi()?);
        }
        match self.name() {
            Some(name) if name.starts_with("uniform-") => {
                let c: u64 = name["uniform-".len()..]
                    .parse()
                    .map_err(|_| Error::Parse(format!("unknown family {name:?}: expected uniform-<c>")))?;
                let kind = self.kind.ok_or_else(|| Error::Parse("uniform families need --kind".into()))?;
                FamilySpec::uniform(kind, c, self.phi()?)
            }
            Some(name) => builtin_family(name, self.phi()?),
            None => Err(Error::Parse("a family is required: --family, --m-csv or --family-json".into())),
        }
    }
}

impl OutputArgs {
    fn format(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn writer(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

/// `{"schema": 1, "command": ..., <payload fields>}`.
fn envelope(command: &str, payload: Value) -> Value {
    let mut map = Map::new();
    map.insert("schema".into(), json!(SCHEMA_VERSION));
    map.insert("command".into(), json!(command));
    match payload {
        Value::Object(fields) => map.extend(fields),
        other => {
            map.insert("result".into(), other);
        }
    }
    Value::Object(map)
}

fn write_json(output: &OutputArgs, command: &str, payload: Value) -> Result<()> {
    let mut w = output.writer()?;
    serde_json::to_writer_pretty(&mut w, &envelope(command, payload))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn table_command(command: &str, table: FunctionTable, output: &OutputArgs) -> Result<i32> {
    match output.format(Format::Csv) {
        Format::Csv => {
            let mut w = output.writer()?;
            table.write_csv(&mut w)?;
            w.flush()?;
        }
        Format::Json => {
            let values: Vec<Value> = table.grid().map(|(t, v)| json!({ "t": t, "value": v })).collect();
            let kind = match table.kind() {
                crate::pd::TableKind::DickmanRho => json!("dickman-rho"),
                crate::pd::TableKind::GTheta { theta } => json!({ "g-theta": theta }),
            };
            write_json(output, command, json!({ "kind": kind, "step": table.step(), "t_max": table.t_max(), "values": values }))?;
        }
    }
    Ok(0)
}

fn coeffs(family: &FamilySpec, n: usize, predict: bool, output: &OutputArgs) -> Result<i32> {
    let series = family_series(family, n)?;
    match output.format(Format::Csv) {
        Format::Csv => {
            let mut w = output.writer()?;
            series.write_csv(&mut w)?;
            w.flush()?;
        }
        Format::Json => {
            let coefficients: Vec<String> = (0..=n).map(|i| rational_string(series.coeff(i))).collect();
            let mut payload = json!({
                "family": family.descriptor(),
                "normalization": format!("{:?}", series.normalization()).to_lowercase(),
                "coefficients": coefficients,
            });
            if predict {
                let predictor = FsPredictor::for_family(family)?;
                let rows: Vec<_> = (1..=n).map(|i| predictor.compare(i, series.coeff(i))).collect();
                payload["predictions"] = to_value(&rows);
                payload["constant"] = to_value(&predictor.constant());
            }
            write_json(output, "coeffs", payload)?;
        }
    }
    Ok(0)
}

fn moments(family: &FamilySpec, n: usize, indices: &[usize], output: &OutputArgs) -> Result<i32> {
    let record = MomentEngine::new(family, n)?.record(indices)?;
    match output.format(Format::Json) {
        Format::Json => write_json(output, "moments", to_value(&record))?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(output.writer()?);
            w.write_record(["family", "phi", "n", "indices", "exact", "exact_float", "master_rhs", "ratio"])?;
            let opt = |x: Option<f64>| x.map(|v| format!("{v:.11e}")).unwrap_or_default();
            let idx: Vec<String> = record.indices.iter().map(|i| i.to_string()).collect();
            w.write_record([
                record.family.clone(),
                record.phi.clone(),
                record.n.to_string(),
                idx.join(" "),
                record.exact.clone(),
                format!("{:.11e}", record.exact_float),
                opt(record.master_rhs),
                opt(record.ratio),
            ])?;
            w.flush()?;
        }
    }
    Ok(0)
}

fn float_moments(family: &FamilySpec, n: usize, indices: &[usize], output: &OutputArgs) -> Result<i32> {
    let record = FloatMomentEngine::new(family, n)?.record(indices)?;
    match output.format(Format::Json) {
        Format::Json => write_json(output, "moments", to_value(&record))?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(output.writer()?);
            w.write_record(["family", "phi", "n", "indices", "value", "relative_error", "master_rhs", "ratio"])?;
            let opt = |x: Option<f64>| x.map(|v| format!("{v:.11e}")).unwrap_or_default();
            let idx: Vec<String> = record.indices.iter().map(|i| i.to_string()).collect();
            w.write_record([
                record.family.clone(),
                record.phi.clone(),
                record.n.to_string(),
                idx.join(" "),
                format!("{:.11e}", record.value),
                format!("{:.3e}", record.relative_error),
                opt(record.master_rhs),
                opt(record.ratio),
            ])?;
            w.flush()?;
        }
    }
    Ok(0)
}

fn need_n(n: Option<u64>) -> Result<u64> {
    n.ok_or_else(|| Error::Parse("--n is required for this family".into()))
}

fn pd_params(theta: Option<f64>) -> Result<PdParams> {
    PdParams::new(theta.ok_or_else(|| Error::Parse("--family pd needs --theta".into()))?)
}

fn usize_n(n: u64) -> Result<usize> {
    usize::try_from(n).map_err(|_| Error::domain(format!("n = {n} is too large")))
}

#[allow(clippy::too_many_arguments)]
fn sample(
    family: &FamilyArgs,
    theta: Option<f64>,
    n: Option<u64>,
    replicates: usize,
    seed: u64,
    k: usize,
    counts: bool,
    output: &OutputArgs,
) -> Result<i32> {
    if replicates == 0 {
        return Err(Error::domain("--replicates must be at least 1"));
    }
    let scaled: Vec<ScaledSizeSeq> = match family.name() {
        Some("pd") => sample_pd_replicates(pd_params(theta)?, k.max(1), seed, replicates)?
            .into_iter()
            .map(|s| ScaledSizeSeq::new(s.parts, k))
            .collect::<Result<_>>()?,
        Some("primes") => PrimeFactorSampler::new(need_n(n)?)?.sample_replicates(k, seed, replicates),
        _ => {
            let spec = family.resolve()?;
            let sampler = StructureSampler::new(&spec, usize_n(need_n(n)?)?)?;
            let structures = sampler.sample_replicates(seed, replicates);
            if counts {
                return emit_counts(&structures, output);
            }
            structures.iter().map(|cv| scaled_sizes(cv, k)).collect()
        }
    };
    if counts {
        return Err(Error::domain("--counts applies to combinatorial families only"));
    }
    match output.format(Format::Csv) {
        Format::Csv => {
            let mut w = output.writer()?;
            write_scaled_csv(&mut w, &scaled, k)?;
            w.flush()?;
        }
        Format::Json => {
            let rows: Vec<Vec<f64>> = scaled.iter().map(|s| (1..=k).map(|i| s.get(i)).collect()).collect();
            write_json(output, "sample", json!({ "seed": seed, "k": k, "samples": rows }))?;
        }
    }
    Ok(0)
}

fn emit_counts(structures: &[crate::samplers::CountVector], output: &OutputArgs) -> Result<i32> {
    match output.format(Format::Csv) {
        Format::Csv => {
            let mut w = output.writer()?;
            write_counts_csv(&mut w, structures)?;
            w.flush()?;
        }
        Format::Json => {
            let rows: Vec<Vec<(usize, u32)>> = structures
                .iter()
                .map(|cv| (1..=cv.n()).filter(|&i| cv.count(i) > 0).map(|i| (i, cv.count(i))).collect())
                .collect();
            write_json(output, "sample", json!({ "counts": rows }))?;
        }
    }
    Ok(0)
}

fn require_seed(seed: Option<u64>) -> Result<u64> {
    seed.ok_or_else(|| Error::Parse("--seed is required for Monte Carlo estimates".into()))
}

#[allow(clippy::too_many_arguments)]
fn intensity(
    family: &FamilyArgs,
    theta: Option<f64>,
    sizes: &[u64],
    intervals: &IntervalFamily,
    exact: bool,
    replicates: usize,
    seed: Option<u64>,
    output: &OutputArgs,
) -> Result<i32> {
    let mut reports: Vec<IntensityReport> = Vec::new();
    match family.name() {
        Some("pd") => {
            if exact {
                return Err(Error::domain("exact intensities are available for combinatorial families only"));
            }
            let sb = StickBreaking::new(pd_params(theta)?);
            reports.push(mc_intensity(IntensitySource::PoissonDirichlet(sb), intervals, replicates, require_seed(seed)?)?);
        }
        Some("primes") => {
            if exact {
                return Err(Error::domain("exact intensities are available for combinatorial families only"));
            }
            let seed = require_seed(seed)?;
            for &n in sizes {
                let sampler = PrimeFactorSampler::new(n)?;
                reports.push(mc_intensity(IntensitySource::PrimeFactors(&sampler), intervals, replicates, seed)?);
            }
        }
        _ => {
            let spec = family.resolve()?;
            let theta = spec
                .pd_theta()
                .ok_or_else(|| Error::domain(format!("{} carries no singular data", spec.full_name())))?;
            for &n in sizes {
                let n = usize_n(n)?;
                reports.push(if exact {
                    exact_report(&spec, n, intervals)?
                } else {
                    let sampler = StructureSampler::new(&spec, n)?;
                    mc_intensity(IntensitySource::Structures { sampler: &sampler, theta }, intervals, replicates, require_seed(seed)?)?
                });
            }
        }
    }
    if reports.is_empty() {
        return Err(Error::Parse("--n is required for this family".into()));
    }
    match output.format(Format::Json) {
        Format::Csv => {
            let mut w = output.writer()?;
            write_sweep_csv(&mut w, &reports)?;
            w.flush()?;
        }
        Format::Json => write_json(output, "intensity", json!({ "reports": reports }))?,
    }
    Ok(0)
}

/// Samples for the KS command together with the default reference parameter.
fn scaled_samples(family: &FamilyArgs, theta: Option<f64>, n: Option<u64>, replicates: usize, seed: u64, k: usize) -> Result<(Vec<ScaledSizeSeq>, f64)> {
    Ok(match family.name() {
        Some("pd") => {
            let params = pd_params(theta)?;
            let samples = sample_pd_replicates(params, k, seed, replicates)?
                .into_iter()
                .map(|s| ScaledSizeSeq::new(s.parts, k))
                .collect::<Result<_>>()?;
            (samples, params.theta())
        }
        Some("primes") => (PrimeFactorSampler::new(need_n(n)?)?.sample_replicates(k, seed, replicates), 1.0),
        _ => {
            let spec = family.resolve()?;
            let sampler = StructureSampler::new(&spec, usize_n(need_n(n)?)?)?;
            let samples = sampler.sample_replicates(seed, replicates).iter().map(|cv| scaled_sizes(cv, k)).collect();
            (samples, spec.pd_theta().unwrap_or(1.0))
        }
    })
}

#[allow(clippy::too_many_arguments)]
fn ks(
    family: &FamilyArgs,
    theta: Option<f64>,
    reference_theta: Option<f64>,
    n: Option<u64>,
    replicates: usize,
    seed: u64,
    joint: Option<usize>,
    grid: &[f64],
    curve_path: Option<&Path>,
    output: &OutputArgs,
) -> Result<i32> {
    let k = joint.unwrap_or(1).max(1);
    let (samples, default_theta) = scaled_samples(family, theta, n, replicates, seed, k)?;
    let reference = LargestPartCdf::new(PdParams::new(reference_theta.unwrap_or(default_theta))?)?;
    let result = ks_against(&samples, &reference)?;
    let curve_grid: Vec<f64> = (1..=100).map(|i| i as f64 / 100.0).collect();
    let curve = cdf_curve(&samples, &reference, &curve_grid)?;
    if let Some(path) = curve_path {
        let mut w = BufWriter::new(File::create(path)?);
        write_cdf_csv(&mut w, &curve)?;
        w.flush()?;
    }
    match output.format(Format::Json) {
        Format::Csv => {
            let mut w = output.writer()?;
            write_cdf_csv(&mut w, &curve)?;
            w.flush()?;
        }
        Format::Json => {
            let mut payload = json!({ "seed": seed, "ks": result });
            if let Some(k) = joint {
                payload["joint"] = to_value(&joint_cdf_check(&samples, &reference, k, grid)?);
            }
            write_json(output, "ks", payload)?;
        }
    }
    Ok(0)
}

fn billingsley(n: u64, replicates: usize, seed: u64, intervals: &IntervalFamily, output: &OutputArgs) -> Result<i32> {
    let sampler = PrimeFactorSampler::new(n)?;
    let bounds = prime_bounds(n, intervals);
    let top = bounds.iter().map(|b| b.1).max().unwrap_or(0);
    let primes = primes_up_to(top);
    let mertens: Vec<Value> = bounds
        .iter()
        .zip(intervals.bounds_f64())
        .map(|(&(lo, hi), (a, b))| {
            let sum: f64 = primes.iter().filter(|&&p| p > lo && p <= hi).map(|&p| 1.0 / p as f64).sum();
            json!({ "interval": [a, b], "primes": [lo + 1, hi], "sum_inverse_primes": sum, "log_ratio": (b / a).ln() })
        })
        .collect();
    let report = mc_intensity(IntensitySource::PrimeFactors(&sampler), intervals, replicates, seed)?;
    let samples = sampler.sample_replicates(1, seed, replicates);
    let reference = LargestPartCdf::new(PdParams::new(1.0)?)?;
    let below = samples.iter().filter(|s| s.get(1) <= 0.5).count() as f64 / samples.len() as f64;
    let ks = ks_against(&samples, &reference)?;
    let payload = json!({
        "n": n, "seed": seed, "replicates": replicates,
        "mertens": mertens,
        "intensity": report,
        "pr_l1_le_half": below, "rho_2": reference.cdf(0.5),
        "ks": ks,
    });
    match output.format(Format::Json) {
        Format::Json => write_json(output, "billingsley", payload)?,
        Format::Csv => {
            let mut w = output.writer()?;
            write_sweep_csv(&mut w, &[report])?;
            w.flush()?;
        }
    }
    Ok(0)
}

fn verify_all(config: VerifyConfig, criteria: &[u8], out: Option<&Path>) -> Result<i32> {
    let print = |r: &CriterionReport| println!("{}", r.line());
    let reports: Vec<CriterionReport> = if criteria.is_empty() {
        run_all(&config, print)
    } else {
        let mut v = Vec::new();
        for &id in criteria {
            let r = run_criterion(id, &config)?;
            print(&r);
            v.push(r);
        }
        v
    };
    let failed = reports.iter().filter(|r| !r.passed).count();
    println!("{} passed, {failed} failed", reports.len() - failed);
    if let Some(path) = out {
        let rows: Vec<Value> = reports
            .iter()
            .map(|r| json!({ "id": r.id, "title": r.title, "passed": r.passed, "summary": r.summary, "details": r.details }))
            .collect();
        let doc = envelope("verify-all", json!({ "budget": config.budget, "seed": config.seed, "criteria": rows }));
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut w, &doc)?;
        writeln!(w)?;
        w.flush()?;
    }
    Ok(if failed == 0 { 0 } else { 1 })
}
