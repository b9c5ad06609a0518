//! `dfcomp`: experiments on distributed function computation.
//!
//! Every command writes one artifact (JSON or CSV) to `--out` or stdout.
//! Exit status is 0 on success, 2 when a required hypothesis or parameter
//! range is refused, and 1 on I/O or parse errors.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use dfcomp::codes::binning::build_full_side_sw_with;
use dfcomp::codes::bounds::atypicality_bounds_with;
use dfcomp::codes::{
    build_random_binning_sw, error_probability_mc, error_probability_table, km_error_mc,
    min_error_fixed_length, moderate_deviation_run, random_code, sum_law, BlockSummary,
    BoundReport, DistributedCode, Hypotheses, McEstimate, RandomCodeOptions, ScalingTable,
    TypicalSetConfig,
};
use dfcomp::funclass::{
    classify, counterexample_quadruple, max_eq, symbolwise_totally_sensitive, FunctionFile,
    Quadruple, SensitivityReport, SingleLetterFunction, SymbolwiseVerdict, VectorFunction,
};
use dfcomp::regions::{
    h2_inverse, mod_sum_regions, outer_bound_r_sensitive, spectral_entropies, sw_region_fl,
    sw_region_vl, table_entropies, ModSumRegions, RateRegion, SpectralEntropies,
};
use dfcomp::sources::{
    anti_diagonal_letter, is_smooth_iid, is_weakly_smooth_iid, smoothness_check,
    weak_smoothness_check, SmoothnessVerdict, SourceModel, WeakSmoothness,
};
use dfcomp::Budget;

#[derive(Parser)]
#[command(
    name = "dfcomp",
    version,
    about = "Distributed function computation experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sensitivity classes of a single-letter function table.
    Classify(ClassifyArgs),
    /// Smoothness of a source model.
    CheckSource(SourceArgs),
    /// Slepian-Wolf regions and the outer bound for r-sensitive functions.
    Region(RegionArgs),
    /// Exact and Monte Carlo error of a random code and its binning transform.
    Simulate(SimulateArgs),
    /// Exact atypicality bounds and construction guarantees over seeded random codes.
    VerifyLemma(VerifyArgs),
    /// Inner and outer regions of the mod-sum function with a linear-code simulation.
    ModsumDemo(ModsumArgs),
    /// Moderate-deviation schedule over several block lengths.
    Moddev(ModdevArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Output {
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Function table JSON.
    #[arg(long, alias = "input")]
    function: PathBuf,
    /// Block length of the exhaustive check.
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SourceArgs {
    /// Source model JSON.
    #[arg(long, alias = "input")]
    source: PathBuf,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct RegionArgs {
    #[arg(long, alias = "input")]
    source: PathBuf,
    /// Rate saved by r-sensitivity, for the outer bound.
    #[arg(long)]
    r: Option<f64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, alias = "input")]
    source: PathBuf,
    #[arg(long)]
    function: PathBuf,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, alias = "input")]
    source: PathBuf,
    #[arg(long)]
    function: PathBuf,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, default_value_t = 0.25)]
    beta: f64,
    /// Also evaluate the widened joint bound with this r.
    #[arg(long)]
    r: Option<f64>,
    /// Number of random codes.
    #[arg(long, default_value_t = 20)]
    instances: usize,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ModsumArgs {
    #[arg(long, default_value_t = 2)]
    x_size: usize,
    #[arg(long, default_value_t = 2)]
    y_size: usize,
    /// Defaults to `log2 min(|X|, |Y|)`.
    #[arg(long)]
    r: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Off-diagonal mass; defaults to the solution of `h2(epsilon) = delta / rho`.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = 200)]
    n: usize,
    /// Bits per symbol spent on the sum coordinates by each encoder.
    #[arg(long, default_value_t = 0.4)]
    rate: f64,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ModdevArgs {
    #[arg(long, alias = "input")]
    source: PathBuf,
    #[arg(long)]
    function: PathBuf,
    #[arg(long, default_value_t = 0.25)]
    t: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Comma-separated block lengths.
    #[arg(long, value_delimiter = ',', default_values_t = [4, 6, 8])]
    n: Vec<usize>,
    /// Enumeration budget; the exhaustive hypothesis checks at n = 8 need about 2^27 steps.
    #[arg(long, default_value_t = 1 << 31)]
    budget: u128,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

enum Failure {
    Refused(String),
    Io(String),
}

impl From<dfcomp::Error> for Failure {
    fn from(e: dfcomp::Error) -> Self {
        if e.is_refusal() {
            Failure::Refused(e.to_string())
        } else {
            Failure::Io(e.to_string())
        }
    }
}

type Outcome<T> = Result<T, Failure>;

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Outcome<T> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load_function(path: &Path) -> Outcome<SingleLetterFunction> {
    Ok(read_json::<FunctionFile>(path)?.into_function()?)
}

fn load_source(path: &Path) -> Outcome<SourceModel> {
    let s: SourceModel = read_json(path)?;
    s.validate()?;
    Ok(s)
}

fn to_json<T: Serialize>(v: &T) -> Outcome<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Failure::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// CSV text from a header and rows of already formatted cells.
fn to_csv(header: &[String], rows: &[Vec<String>]) -> Outcome<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Failure::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Io(e.to_string()))
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn header(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|s| s.to_string()).collect()
}

fn emit(output: &Output, text: String) -> Outcome<()> {
    match &output.out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json_only(output: &Output, command: &str) -> Outcome<()> {
    if output.format == Some(Format::Csv) {
        return Err(Failure::Io(format!("{command} writes JSON only")));
    }
    Ok(())
}

#[derive(Serialize)]
struct MaxEq {
    count: usize,
    label: Vec<String>,
    rate: f64,
}

#[derive(Serialize)]
struct ClassifyOutput {
    x_size: usize,
    y_size: usize,
    hk: bool,
    /// Verdict for the symbol-wise extension at every block length `n >= 2`.
    totally_sensitive: bool,
    symbolwise: SymbolwiseVerdict,
    quadruple: Option<Quadruple>,
    report: SensitivityReport,
    max_eq: MaxEq,
}

fn cmd_classify(a: &ClassifyArgs) -> Outcome<String> {
    json_only(&a.output, "classify")?;
    let f = load_function(&a.function)?;
    let verdict = symbolwise_totally_sensitive(&f);
    let quadruple = counterexample_quadruple(&f).ok();
    let fv = VectorFunction::lift(&f, a.n, Budget::default())?;
    let report = classify(&fv, Budget::default())?;
    let (count, id) = max_eq(&fv, Budget::default())?;
    let out = ClassifyOutput {
        x_size: f.x_size(),
        y_size: f.y_size(),
        hk: verdict.hk,
        totally_sensitive: verdict.totally_sensitive,
        symbolwise: verdict,
        quadruple,
        report,
        max_eq: MaxEq {
            count,
            label: fv.render(id),
            rate: (count.max(1) as f64).log2() / a.n as f64,
        },
    };
    to_json(&out)
}

#[derive(Serialize)]
struct SingleLetter {
    smooth: bool,
    weakly_smooth: bool,
    /// `(x, x_hat, y)` whose overlap count is exactly one.
    weak_witness: Option<(usize, usize, usize)>,
}

#[derive(Serialize)]
struct SourceOutput {
    smoothness: SmoothnessVerdict,
    weak: WeakSmoothness,
    single_letter: Option<SingleLetter>,
}

fn cmd_check_source(a: &SourceArgs) -> Outcome<String> {
    json_only(&a.output, "check-source")?;
    let s = load_source(&a.source)?;
    let smoothness = smoothness_check(&s, a.n, Budget::default())?;
    let weak = weak_smoothness_check(&s, a.n, Budget::default())?;
    let single_letter = match &s {
        SourceModel::Iid { joint, .. } => {
            let (weakly_smooth, weak_witness) = is_weakly_smooth_iid(joint);
            Some(SingleLetter {
                smooth: is_smooth_iid(joint),
                weakly_smooth,
                weak_witness,
            })
        }
        _ => None,
    };
    to_json(&SourceOutput {
        smoothness,
        weak,
        single_letter,
    })
}

#[derive(Serialize)]
struct RegionOutput {
    spectral: SpectralEntropies,
    sw_fixed_length: RateRegion,
    sw_variable_length: Option<RateRegion>,
    r: Option<f64>,
    outer_r_sensitive: Option<RateRegion>,
}

fn corner_rows(name: &str, region: &RateRegion, rows: &mut Vec<Vec<String>>) {
    for (i, (r1, r2)) in region.corner_points().into_iter().enumerate() {
        rows.push(vec![name.to_string(), i.to_string(), num(r1), num(r2)]);
    }
}

fn cmd_region(a: &RegionArgs) -> Outcome<String> {
    let s = load_source(&a.source)?;
    let spectral = spectral_entropies(&s)?;
    let out = RegionOutput {
        spectral,
        sw_fixed_length: sw_region_fl(&s)?,
        sw_variable_length: sw_region_vl(&s)?,
        r: a.r,
        outer_r_sensitive: a
            .r
            .map(|r| outer_bound_r_sensitive(&spectral, r))
            .transpose()?,
    };
    if a.output.format == Some(Format::Csv) {
        let mut rows = Vec::new();
        corner_rows("sw_fixed_length", &out.sw_fixed_length, &mut rows);
        if let Some(r) = &out.sw_variable_length {
            corner_rows("sw_variable_length", r, &mut rows);
        }
        if let Some(r) = &out.outer_r_sensitive {
            corner_rows("outer_r_sensitive", r, &mut rows);
        }
        return to_csv(&header(&["region", "vertex", "r1", "r2"]), &rows);
    }
    to_json(&out)
}

#[derive(Serialize)]
struct CodeRow {
    code: &'static str,
    n: usize,
    mean_len1: f64,
    mean_len2: f64,
    max_len1: usize,
    max_len2: usize,
    exact_error: f64,
    /// Error averaged over the random bin assignment; absent for the base code.
    expected_error: Option<f64>,
    mc: McEstimate,
}

#[allow(clippy::too_many_arguments)]
fn code_row(
    name: &'static str,
    code: &DistributedCode,
    source: &SourceModel,
    f: &VectorFunction,
    p: &[f64],
    trials: usize,
    seed: u64,
    expected_error: Option<f64>,
) -> Outcome<CodeRow> {
    let (l1, l2) = (code.lengths1(), code.lengths2());
    let nx = f.num_x();
    let ny = f.num_y();
    let (mut m1, mut m2) = (0.0, 0.0);
    for x in 0..nx {
        for y in 0..ny {
            let q = p[x * ny + y];
            m1 += q * l1[x] as f64;
            m2 += q * l2[y] as f64;
        }
    }
    Ok(CodeRow {
        code: name,
        n: f.n(),
        mean_len1: m1,
        mean_len2: m2,
        max_len1: l1.iter().copied().max().unwrap_or(0),
        max_len2: l2.iter().copied().max().unwrap_or(0),
        exact_error: error_probability_table(code, p, f),
        expected_error,
        mc: error_probability_mc(code, source, f, trials, seed)?,
    })
}

fn cmd_simulate(a: &SimulateArgs) -> Outcome<String> {
    let s = load_source(&a.source)?;
    let f = load_function(&a.function)?;
    let budget = Budget::default();
    let fv = VectorFunction::lift(&f, a.n, budget)?;
    let p = dfcomp::sources::pmf_table(&s, a.n, budget)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let opts = RandomCodeOptions {
        map_fraction: 1.0,
        full_side_information: false,
    };
    let base = random_code(&fv, &s, opts, budget, &mut rng)?.with_flagged_lengths()?;
    let sw = build_random_binning_sw(&base, &s, a.delta, a.seed.wrapping_add(1), budget)?;
    let id = VectorFunction::identity(s.x_size(), s.y_size(), a.n, budget)?;
    let rows = vec![
        code_row(
            "base",
            &base,
            &s,
            &fv,
            &p,
            a.trials,
            a.seed.wrapping_add(2),
            None,
        )?,
        code_row(
            "binning_sw",
            &sw.code,
            &s,
            &id,
            &p,
            a.trials,
            a.seed.wrapping_add(3),
            Some(sw.expected_error),
        )?,
    ];
    if a.output.format == Some(Format::Json) {
        return to_json(&rows);
    }
    let cells = rows
        .iter()
        .map(|r| {
            vec![
                r.code.to_string(),
                r.n.to_string(),
                num(r.mean_len1),
                num(r.mean_len2),
                r.max_len1.to_string(),
                r.max_len2.to_string(),
                num(r.exact_error),
                r.expected_error.map(num).unwrap_or_default(),
                r.mc.trials.to_string(),
                r.mc.errors.to_string(),
                num(r.mc.estimate),
                num(r.mc.ci_low),
                num(r.mc.ci_high),
            ]
        })
        .collect::<Vec<_>>();
    let cols = [
        "code",
        "n",
        "mean_len1",
        "mean_len2",
        "max_len1",
        "max_len2",
        "exact_error",
        "expected_error",
        "mc_trials",
        "mc_errors",
        "mc_estimate",
        "mc_ci_low",
        "mc_ci_high",
    ];
    to_csv(&header(&cols), &cells)
}

#[derive(Serialize)]
struct InstanceReport {
    instance: usize,
    #[serde(flatten)]
    report: BoundReport,
    holds: bool,
}

fn cmd_verify(a: &VerifyArgs) -> Outcome<String> {
    let s = load_source(&a.source)?;
    let f = load_function(&a.function)?;
    let budget = Budget::default();
    let cfg = TypicalSetConfig::new(a.delta, a.beta)?;
    let fv = VectorFunction::lift(&f, a.n, budget)?;
    let hyp = Hypotheses::check(&fv, &s, budget)?;
    // Refuse up front so that the message names the missing hypothesis.
    hyp.require_given_y()?;
    hyp.require_given_x()?;
    let mut reports = Vec::new();
    for i in 0..a.instances {
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        rng.set_stream(i as u64);
        let code = random_code(&fv, &s, RandomCodeOptions::default(), budget, &mut rng)?
            .with_flagged_lengths()?;
        let mut batch = atypicality_bounds_with(&code, &s, &fv, cfg, a.r, &hyp, budget)?;
        let bin_seed = a.seed.wrapping_add(1 + i as u64);
        batch.extend(build_random_binning_sw(&code, &s, a.delta, bin_seed, budget)?.reports);
        let side = RandomCodeOptions {
            full_side_information: true,
            ..RandomCodeOptions::default()
        };
        let side_code = random_code(&fv, &s, side, budget, &mut rng)?.with_flagged_lengths()?;
        batch.extend(
            build_full_side_sw_with(&side_code, &s, &fv, cfg, &hyp, bin_seed, budget)?.reports,
        );
        reports.extend(batch.into_iter().map(|report| InstanceReport {
            instance: i,
            holds: report.holds(),
            report,
        }));
    }
    if a.output.format == Some(Format::Json) {
        return to_json(&reports);
    }
    let terms: BTreeSet<&String> = reports.iter().flat_map(|r| r.report.terms.keys()).collect();
    let mut cols = header(&["instance", "bound", "n", "lhs", "rhs", "slack", "holds"]);
    cols.extend(terms.iter().map(|t| format!("term:{t}")));
    let rows = reports
        .iter()
        .map(|r| {
            let mut row = vec![
                r.instance.to_string(),
                r.report.bound.name().to_string(),
                r.report.n.to_string(),
                num(r.report.lhs),
                num(r.report.rhs),
                num(r.report.slack),
                r.holds.to_string(),
            ];
            row.extend(
                terms
                    .iter()
                    .map(|t| r.report.terms.get(*t).copied().map(num).unwrap_or_default()),
            );
            row
        })
        .collect::<Vec<_>>();
    to_csv(&cols, &rows)
}

#[derive(Serialize)]
struct KmReport {
    n: usize,
    rho: f64,
    prime: u32,
    sum_coords: usize,
    /// Requested bits per sum coordinate.
    rate: f64,
    syndrome_rows: usize,
    /// Bits per symbol of the two encoders.
    rate1: f64,
    rate2: f64,
    sum_rate: f64,
    blocks: Vec<BlockSummary>,
    error: McEstimate,
    /// Least error of any decoder given the syndrome bits about the sum.
    sum_code_converse: f64,
}

#[derive(Serialize)]
struct ModsumOutput {
    x_size: usize,
    y_size: usize,
    r: f64,
    delta: f64,
    epsilon: f64,
    regions: ModSumRegions,
    /// Minimum sum rate of any Slepian-Wolf code for this source.
    sw_sum_min: f64,
    km: KmReport,
    /// Whether the linear code's sum rate lies below the Slepian-Wolf sum bound.
    below_sw_sum_bound: bool,
}

fn cmd_modsum(a: &ModsumArgs) -> Outcome<String> {
    let m = a.x_size.min(a.y_size);
    let rbar = (m.max(1) as f64).log2();
    let r = a.r.unwrap_or(rbar);
    let rho = if rbar > 0.0 { (r / rbar).min(1.0) } else { 0.0 };
    let epsilon = match a.epsilon {
        Some(e) => e,
        None if rho > 0.0 => h2_inverse((a.delta / rho).min(1.0)),
        None => 0.0,
    };
    let regions = mod_sum_regions(a.x_size, a.y_size, r, a.delta, epsilon)?;
    let source = SourceModel::AntiDiagonal {
        x_size: a.x_size,
        y_size: a.y_size,
        rho,
        epsilon,
    };
    source.validate()?;
    // Per-symbol joint entropy: anti-diagonal law on the first rho fraction, uniform after.
    let (h_letter, _, _) = table_entropies(&anti_diagonal_letter(a.x_size, a.y_size, epsilon));
    let uniform = ((a.x_size * a.y_size) as f64).log2();
    let sw_sum_min = rho * h_letter + (1.0 - rho) * uniform;
    let code = dfcomp::codes::KmCode::new(&source, a.n, rho, a.rate, a.seed)?;
    let error = km_error_mc(&code, &source, a.trials, a.seed.wrapping_add(1))?;
    let law = sum_law(a.x_size, a.y_size, epsilon, code.prime);
    let bits = code.rows as f64 * (code.prime as f64).log2();
    let sum_code_converse = min_error_fixed_length(&law, code.sum_coords, bits, Budget::default())?;
    let (rate1, rate2) = code.rates();
    let km = KmReport {
        n: a.n,
        rho,
        prime: code.prime,
        sum_coords: code.sum_coords,
        rate: a.rate,
        syndrome_rows: code.rows,
        rate1,
        rate2,
        sum_rate: rate1 + rate2,
        blocks: code.block_summaries(),
        error,
        sum_code_converse,
    };
    let out = ModsumOutput {
        x_size: a.x_size,
        y_size: a.y_size,
        r,
        delta: a.delta,
        epsilon,
        regions,
        sw_sum_min,
        below_sw_sum_bound: km.sum_rate < sw_sum_min,
        km,
    };
    if a.output.format == Some(Format::Csv) {
        let cols = [
            "x_size",
            "y_size",
            "rho",
            "delta",
            "epsilon",
            "inner_r1",
            "inner_r2",
            "inner_sum",
            "outer_r1",
            "outer_r2",
            "outer_sum",
            "sw_sum_min",
            "n",
            "rate",
            "syndrome_rows",
            "sum_rate",
            "trials",
            "errors",
            "error_estimate",
            "error_ci_low",
            "error_ci_high",
            "sum_code_converse",
        ];
        let (i, o, k) = (&out.regions.inner, &out.regions.outer, &out.km);
        let row = vec![
            out.x_size.to_string(),
            out.y_size.to_string(),
            num(k.rho),
            num(out.delta),
            num(out.epsilon),
            num(i.r1_min),
            num(i.r2_min),
            num(i.min_sum_rate()),
            num(o.r1_min),
            num(o.r2_min),
            num(o.min_sum_rate()),
            num(out.sw_sum_min),
            k.n.to_string(),
            num(k.rate),
            k.syndrome_rows.to_string(),
            num(k.sum_rate),
            k.error.trials.to_string(),
            k.error.errors.to_string(),
            num(k.error.estimate),
            num(k.error.ci_low),
            num(k.error.ci_high),
            num(k.sum_code_converse),
        ];
        return to_csv(&header(&cols), &[row]);
    }
    to_json(&out)
}

fn cmd_moddev(a: &ModdevArgs) -> Outcome<String> {
    let s = load_source(&a.source)?;
    let f = load_function(&a.function)?;
    let table: ScalingTable =
        moderate_deviation_run(&s, &f, a.t, a.gamma, &a.n, a.seed, Budget(a.budget))?;
    if a.output.format == Some(Format::Json) {
        return to_json(&table);
    }
    let cols = [
        "t",
        "gamma",
        "n",
        "beta",
        "delta",
        "base_bits",
        "base_error",
        "expected_length",
        "entropy_bits",
        "normalized_excess",
        "o_term",
        "surrogate",
        "expected_error",
        "error_bound",
        "normalized_exponent",
        "v",
        "v_cap",
        "bounds_hold",
    ];
    let rows = table
        .rows
        .iter()
        .map(|r| {
            vec![
                num(table.t),
                num(table.gamma),
                r.n.to_string(),
                num(r.beta),
                num(r.delta),
                r.base_bits.to_string(),
                num(r.base_error),
                num(r.expected_length),
                num(r.entropy_bits),
                num(r.normalized_excess),
                num(r.o_term),
                num(r.surrogate),
                num(r.expected_error),
                num(r.error_bound),
                if r.normalized_exponent.is_finite() {
                    num(r.normalized_exponent)
                } else {
                    String::new()
                },
                num(r.v),
                num(r.v_cap),
                r.bounds_hold.to_string(),
            ]
        })
        .collect::<Vec<_>>();
    to_csv(&header(&cols), &rows)
}

fn run(cli: &Cli) -> Outcome<()> {
    let (text, output) = match &cli.command {
        Command::Classify(a) => (cmd_classify(a)?, &a.output),
        Command::CheckSource(a) => (cmd_check_source(a)?, &a.output),
        Command::Region(a) => (cmd_region(a)?, &a.output),
        Command::Simulate(a) => (cmd_simulate(a)?, &a.output),
        Command::VerifyLemma(a) => (cmd_verify(a)?, &a.output),
        Command::ModsumDemo(a) => (cmd_modsum(a)?, &a.output),
        Command::Moddev(a) => (cmd_moddev(a)?, &a.output),
    };
    emit(output, text)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Refused(msg)) => {
            eprintln!("dfcomp: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("dfcomp: {msg}");
            ExitCode::from(1)
        }
    }
}
