//! `knotweave` command-line front end.

mod records;

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use knotweave::baselines::{self, jones_markov_exact, jones_plat_exact, markov_prefactor, Method};
use knotweave::benchgen::{self, BenchmarkRecord, ConjugatorOptions, SuiteOptions};
use knotweave::braid::{markov_to_plat, parse_braid_lines};
use knotweave::fib::FibString;
use knotweave::protocol::{estimate_markov, estimate_plat, Flags};
use knotweave::qsim::NoiseModel;
use knotweave::rep::cfev_for_braid;
use knotweave::resources::{self, BraidCost, CostModel, DepthMode};
use knotweave::simplify::{simplify_with, SimplifyOptions};
use knotweave::{BraidWord, ClosureKind, Error};

use records::{tool_version, Envelope};

#[derive(Parser, Debug)]
#[command(name = "knotweave", version, about = "Jones values at the fifth root of unity: simulated cfev protocol and classical baselines")]
struct Cli {
    /// Worker threads for braid- and shot-level parallelism (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the braids of a file with one or more methods.
    Eval(EvalArgs),
    /// Generate or run benchmark suites.
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Reduce the crossing count of each braid.
    Simplify(SimplifyArgs),
    /// Closure conversions.
    Convert(ConvertArgs),
    /// Quantum versus classical time and energy report.
    Resources(ResourcesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum EvalMethod {
    CfevSim,
    Exact,
    Mpo,
    TnDense,
}

#[derive(Args, Debug, Clone, Serialize)]
struct SimArgs {
    /// Shots per component (real and imaginary each).
    #[arg(long, default_value_t = 4000)]
    shots: usize,
    /// Noise preset (none, low, high, h2like) or key=value list such as
    /// `eps2q=5e-4` or `eps2q=5e-4,eps1q=0,phase=0.4`.
    #[arg(long, default_value = "none")]
    noise: String,
    /// Comma list of detect, conjugate, shot-level, or none.
    #[arg(long, default_value = "detect")]
    mitigate: String,
    /// Seed; falls back to KNOTWEAVE_SEED, then 0.
    #[arg(long, env = "KNOTWEAVE_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Braid file: one `<strands> : <generators>` per line.
    file: PathBuf,
    /// Methods to run, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "exact")]
    method: Vec<EvalMethod>,
    #[arg(long, default_value = "markov")]
    closure: String,
    #[command(flatten)]
    sim: SimArgs,
    /// Bond dimension limit for `mpo` (unbounded when absent).
    #[arg(long)]
    chi: Option<usize>,
    /// Write the native-gate cfev circuit of the first braid (real part) here.
    #[arg(long)]
    dump_circuit: Option<PathBuf>,
    /// Output JSONL (stdout when absent).
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum BenchCommand {
    /// Write a benchmark suite as JSONL.
    Gen(BenchGenArgs),
    /// Run the simulated protocol on a benchmark file.
    Run(BenchRunArgs),
}

#[derive(Args, Debug, Serialize)]
struct BenchGenArgs {
    /// Three-strand blocks per braid (strands = 3 * blocks).
    #[arg(long)]
    blocks: usize,
    /// Brick-wall layers of the conjugator; a range `lo..hi` draws uniformly.
    #[arg(long, default_value = "20")]
    layers: String,
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, env = "KNOTWEAVE_SEED", default_value_t = 0)]
    seed: u64,
    /// Longest three-strand word in the block table.
    #[arg(long, default_value_t = 4)]
    table_len: usize,
    /// Probability that a brick is a crossing.
    #[arg(long, default_value_t = 2.0 / 3.0)]
    crossing_probability: f64,
    /// Keep only braids whose crossing count lies in `lo..hi` (inclusive).
    #[arg(long)]
    crossings: Option<String>,
    /// Check every braid against the exact oracle.
    #[arg(long)]
    verify: bool,
    #[arg(long, short)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchRunArgs {
    /// Benchmark JSONL from `bench gen`.
    file: PathBuf,
    #[command(flatten)]
    sim: SimArgs,
    /// Results JSONL (stdout when absent).
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Where to write the power-law fit summary (JSON).
    #[arg(long)]
    fit_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimplifyArgs {
    file: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    budget: usize,
    #[arg(long, env = "KNOTWEAVE_SEED", default_value_t = 0)]
    seed: u64,
    /// Keep the braid itself (no cyclic moves), e.g. for plat closures.
    #[arg(long)]
    no_cyclic: bool,
}

#[derive(Args, Debug)]
struct ConvertArgs {
    file: PathBuf,
    /// Rewrite each braid so its plat closure equals its Markov closure.
    #[arg(long)]
    to_plat: bool,
}

#[derive(Args, Debug)]
struct ResourcesArgs {
    /// Directory (or single file) of JSONL records: `bench run` results and
    /// `eval --method mpo` records for the same braids.
    input: PathBuf,
    #[arg(long, default_value_t = 0.030)]
    layer_time: f64,
    #[arg(long, default_value_t = 75_000.0)]
    qpu_power: f64,
    #[arg(long, default_value_t = 1e12)]
    flops_per_s: f64,
    #[arg(long, default_value_t = 64e9)]
    mem_bytes: f64,
    #[arg(long, default_value_t = 2.6e17)]
    flops_per_kwh: f64,
    /// `native` counts layers of native gates; `as-listed` counts ops as built.
    #[arg(long, default_value = "native")]
    depth_mode: String,
    /// CSV report; columns: braid, crossings, qubits, depth, relative_error,
    /// shots, quantum_time_s, quantum_energy_kwh, classical_time_s,
    /// classical_energy_kwh, classical_feasible, faster, cheaper.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// JSON report (stdout when neither output is given).
    #[arg(long)]
    json: Option<PathBuf>,
}

/// An error with its exit code.
#[derive(Debug)]
struct Fail {
    code: u8,
    msg: String,
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::SizeCap { .. } => 2,
            Error::Config(_) | Error::OddStrands(_) => 3,
            _ => 1,
        };
        Fail { code, msg: e.to_string() }
    }
}

fn config_err(msg: impl Into<String>) -> Fail {
    Fail { code: 3, msg: msg.into() }
}

fn input_err(path: &Path, e: io::Error) -> Fail {
    Fail { code: 2, msg: format!("{}: {e}", path.display()) }
}

fn output_err(e: impl std::fmt::Display) -> Fail {
    Fail { code: 1, msg: format!("write failed: {e}") }
}

type CliResult<T> = std::result::Result<T, Fail>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(3);
        }
        pool = pool.num_threads(j);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    };
    match pool.install(|| run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn run(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Eval(a) => cmd_eval(a),
        Command::Bench(BenchCommand::Gen(a)) => cmd_bench_gen(a),
        Command::Bench(BenchCommand::Run(a)) => cmd_bench_run(a),
        Command::Simplify(a) => cmd_simplify(a),
        Command::Convert(a) => cmd_convert(a),
        Command::Resources(a) => cmd_resources(a),
    }
}

fn read_input(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| input_err(path, e))
}

fn read_braids(path: &Path) -> CliResult<Vec<BraidWord>> {
    Ok(parse_braid_lines(&read_input(path)?)?)
}

fn open_out(path: &Option<PathBuf>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(fs::File::create(p).map_err(output_err)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_jsonl<T: Serialize>(w: &mut dyn Write, items: &[T]) -> CliResult<()> {
    for it in items {
        serde_json::to_writer(&mut *w, it).map_err(output_err)?;
        w.write_all(b"\n").map_err(output_err)?;
    }
    w.flush().map_err(output_err)
}

/// Parses a noise preset name or a `key=value` list.
fn parse_noise(spec: &str) -> CliResult<NoiseModel> {
    if let Some(n) = NoiseModel::preset(spec) {
        return Ok(n);
    }
    let mut noise: Option<NoiseModel> = None;
    let mut overrides = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| config_err(format!("unknown noise preset {spec:?}")))?;
        let x: f64 = v.parse().map_err(|_| config_err(format!("bad noise value {v:?}")))?;
        if k == "eps2q" {
            noise = Some(NoiseModel::from_eps2q(x));
        } else {
            overrides.push((k.to_string(), x));
        }
    }
    let mut n = noise.unwrap_or_else(NoiseModel::noiseless);
    for (k, x) in overrides {
        match k.as_str() {
            "eps1q" => n.eps_1q = x,
            "init" | "eps_init" => n.eps_init = x,
            "meas0" | "eps_meas0" => n.eps_meas0 = x,
            "meas1" | "eps_meas1" => n.eps_meas1 = x,
            "spam" => {
                n.eps_init = x;
                n.eps_meas0 = x;
                n.eps_meas1 = x;
            }
            "phase" => n.coherent_phase = Some(x),
            _ => return Err(config_err(format!("unknown noise key {k:?}"))),
        }
    }
    n.validate()?;
    Ok(n)
}

fn parse_flags(spec: &str) -> CliResult<Flags> {
    let mut f = Flags { error_detection: false, conjugate_trick: false, shot_level_trick: false };
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part {
            "none" => {}
            "detect" => f.error_detection = true,
            "conjugate" => f.conjugate_trick = true,
            "shot-level" => f.shot_level_trick = true,
            _ => return Err(config_err(format!("unknown mitigation {part:?}"))),
        }
    }
    Ok(f)
}

fn parse_range(spec: &str) -> CliResult<(usize, usize)> {
    let bad = || config_err(format!("bad range {spec:?}; use N or LO..HI"));
    let (lo, hi) = match spec.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let v = spec.trim().parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

#[derive(Debug, Clone, Serialize)]
struct SimConfig {
    shots: usize,
    noise_spec: String,
    noise: NoiseModel,
    flags: Flags,
    seed: u64,
}

fn sim_config(a: &SimArgs) -> CliResult<SimConfig> {
    if a.shots == 0 {
        return Err(config_err("--shots must be at least 1"));
    }
    Ok(SimConfig { shots: a.shots, noise_spec: a.noise.clone(), noise: parse_noise(&a.noise)?, flags: parse_flags(&a.mitigate)?, seed: a.seed })
}

fn estimate(b: &BraidWord, closure: ClosureKind, sim: &SimConfig, seed: u64) -> CliResult<knotweave::protocol::JonesEstimate> {
    Ok(match closure {
        ClosureKind::Markov => estimate_markov(b, sim.shots, sim.noise, sim.flags, seed)?,
        ClosureKind::Plat => estimate_plat(b, sim.shots, sim.noise, sim.flags, seed)?,
    })
}

/// `0111...1`, the input string with the most cat-state CNOTs.
fn all_ones_string(n: usize) -> FibString {
    FibString::from_mask((1u64 << (n - 1)) - 1, n)
}

/// Per-braid seed: braid `i` of a file uses `seed + i`.
fn braid_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_add(i as u64)
}

fn cmd_eval(a: EvalArgs) -> CliResult<()> {
    let closure: ClosureKind = a.closure.parse()?;
    let sim = sim_config(&a.sim)?;
    if a.chi == Some(0) {
        return Err(config_err("--chi must be at least 1"));
    }
    let braids = read_braids(&a.file)?;
    let config = json!({
        "command": "eval",
        "file": a.file.display().to_string(),
        "methods": a.method,
        "closure": closure,
        "sim": sim,
        "chi": a.chi,
    });
    if let Some(path) = &a.dump_circuit {
        if let Some(b) = braids.first() {
            let n = b.qubits();
            let s = all_ones_string(n);
            let c = cfev_for_braid(b, &s, false, true)?.lowered();
            fs::write(path, c.to_text()).map_err(output_err)?;
        }
    }
    let mut out = Vec::new();
    for (i, b) in braids.iter().enumerate() {
        for &m in &a.method {
            let mut body = json!({
                "braid": b.to_string(),
                "strands": b.strands(),
                "crossings": b.crossings(),
                "writhe": b.writhe(),
                "method": m,
                "closure": closure,
            });
            let extra = match m {
                EvalMethod::Exact => {
                    let v = match closure {
                        ClosureKind::Markov => jones_markov_exact(b)?,
                        ClosureKind::Plat => jones_plat_exact(b)?,
                    };
                    json!({ "jones_re": v.re, "jones_im": v.im })
                }
                EvalMethod::CfevSim => {
                    let seed = braid_seed(sim.seed, i);
                    let e = estimate(b, closure, &sim, seed)?;
                    let mut v = serde_json::to_value(knotweave::protocol::EstimateRecord::new(b, &e, &sim.noise_spec, None))
                        .map_err(output_err)?;
                    v.as_object_mut().map(|o| o.remove("braid"));
                    v
                }
                EvalMethod::Mpo | EvalMethod::TnDense => {
                    if closure != ClosureKind::Markov {
                        return Err(config_err("mpo and tn-dense evaluate the Markov closure only"));
                    }
                    let method = if m == EvalMethod::Mpo { Method::MpoProj } else { Method::TnProjDense };
                    let r = baselines::run_baseline(b, method, a.chi)?;
                    let v = markov_prefactor(b.writhe(), b.qubits()) * r.value();
                    json!({
                        "jones_re": v.re,
                        "jones_im": v.im,
                        "trace_re": r.value_re,
                        "trace_im": r.value_im,
                        "chi_limit": r.chi_limit,
                        "chi_max_seen": r.chi_max_seen,
                        "peak_bytes": r.peak_bytes,
                        "flops": r.flops,
                        "timing": { "wall_ms": r.wall_ms },
                    })
                }
            };
            records::merge(&mut body, extra);
            out.push(Envelope::new("eval", &config, body));
        }
    }
    write_jsonl(&mut *open_out(&a.out)?, &out)
}

fn cmd_bench_gen(a: BenchGenArgs) -> CliResult<()> {
    if a.blocks == 0 {
        return Err(config_err("--blocks must be at least 1"));
    }
    if !(0.0..=1.0).contains(&a.crossing_probability) {
        return Err(config_err("--crossing-probability must lie in [0, 1]"));
    }
    let layers = parse_range(&a.layers)?;
    let crossings = a.crossings.as_deref().map(parse_range).transpose()?;
    let table = benchgen::build_three_strand_table(a.table_len)?;
    let design = benchgen::fit_magnitude_design(&table, a.blocks)?;
    if !design.converged {
        eprintln!("warning: magnitude fit stopped at stationarity {:.2e}", design.stationarity);
    }
    let opts = SuiteOptions {
        k: a.blocks,
        layers,
        crossings,
        conjugator: ConjugatorOptions { crossing_probability: a.crossing_probability },
        max_attempts: 1000,
    };
    let suite = benchgen::generate_suite(&table, &design, a.count, opts, a.seed)?;
    if a.verify {
        for (i, b) in suite.iter().enumerate() {
            let v = jones_markov_exact(&b.braid)?;
            let err = (v - b.known_jones).norm();
            if err > 1e-10 * b.known_jones.norm().max(1.0) {
                return Err(Fail { code: 1, msg: format!("braid {i}: oracle {v} differs from known value {}", b.known_jones) });
            }
        }
    }
    let config = serde_json::to_value(&a).map_err(output_err)?;
    let out: Vec<_> = suite
        .iter()
        .map(|b| {
            let body = serde_json::to_value(BenchmarkRecord::from(b)).expect("plain record");
            Envelope::new("bench_braid", &config, body)
        })
        .collect();
    write_jsonl(&mut *open_out(&a.out)?, &out)
}

fn read_jsonl(path: &Path) -> CliResult<Vec<serde_json::Value>> {
    read_input(path)?
        .lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| Fail { code: 1, msg: format!("{}:{}: {e}", path.display(), i + 1) })
        })
        .collect()
}

fn cmd_bench_run(a: BenchRunArgs) -> CliResult<()> {
    let sim = sim_config(&a.sim)?;
    let rows = read_jsonl(&a.file)?;
    let bench: Vec<BenchmarkRecord> = rows
        .into_iter()
        .map(|v| serde_json::from_value(v).map_err(|e| Fail { code: 1, msg: format!("benchmark record: {e}") }))
        .collect::<CliResult<_>>()?;
    let config = json!({ "command": "bench run", "file": a.file.display().to_string(), "sim": sim });
    let mut out = Vec::new();
    let mut points = Vec::new();
    for (i, rec) in bench.iter().enumerate() {
        let b = rec.braid()?;
        let known = rec.known_jones();
        let e = estimate(&b, ClosureKind::Markov, &sim, braid_seed(sim.seed, i))?;
        let rel = (e.jones - known).norm() / known.norm();
        points.push((b.crossings() as f64, rel));
        let body = json!({
            "braid_text": rec.braid_text,
            "strands": b.strands(),
            "crossings": b.crossings(),
            "qubits": b.qubits(),
            "known_jones_re": known.re,
            "known_jones_im": known.im,
            "jones_re": e.jones.re,
            "jones_im": e.jones.im,
            "R_re": e.r.re,
            "R_im": e.r.im,
            "stderr_re": e.stderr_re,
            "stderr_im": e.stderr_im,
            "discard_rate": e.discard_rate(),
            "relative_error": rel,
            "seed": braid_seed(sim.seed, i),
        });
        out.push(Envelope::new("bench_result", &config, body));
    }
    write_jsonl(&mut *open_out(&a.out)?, &out)?;
    let fit = match resources::fit_error_scaling(&points) {
        Ok(f) => json!({ "fit": f }),
        Err(e) => json!({ "fit": null, "reason": e.to_string() }),
    };
    let summary = Envelope::new("bench_fit", &config, fit);
    let text = serde_json::to_string_pretty(&summary).map_err(output_err)?;
    match &a.fit_out {
        Some(p) => fs::write(p, text + "\n").map_err(output_err)?,
        None => eprintln!("{text}"),
    }
    Ok(())
}

fn cmd_simplify(a: SimplifyArgs) -> CliResult<()> {
    let braids = read_braids(&a.file)?;
    let opts = SimplifyOptions { budget: a.budget, seed: a.seed, cyclic: !a.no_cyclic, ..SimplifyOptions::default() };
    let mut w = open_out(&None)?;
    for b in &braids {
        writeln!(w, "{}", simplify_with(b, opts)).map_err(output_err)?;
    }
    w.flush().map_err(output_err)
}

fn cmd_convert(a: ConvertArgs) -> CliResult<()> {
    if !a.to_plat {
        return Err(config_err("nothing to do; pass --to-plat"));
    }
    let braids = read_braids(&a.file)?;
    let mut w = open_out(&None)?;
    for b in &braids {
        writeln!(w, "{}", markov_to_plat(b)).map_err(output_err)?;
    }
    w.flush().map_err(output_err)
}

fn jsonl_files(input: &Path) -> CliResult<Vec<PathBuf>> {
    if input.is_file() {
        return Ok(vec![input.to_path_buf()]);
    }
    let entries = fs::read_dir(input).map_err(|e| input_err(input, e))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
        .collect();
    files.sort();
    Ok(files)
}

fn cmd_resources(a: ResourcesArgs) -> CliResult<()> {
    let model = CostModel {
        layer_time_s: a.layer_time,
        classical_flops_per_s: a.flops_per_s,
        classical_mem_bytes: a.mem_bytes,
        qpu_power_w: a.qpu_power,
        cluster_efficiency_flops_per_kwh: a.flops_per_kwh,
    };
    model.validate()?;
    let depth_mode = match a.depth_mode.as_str() {
        "native" => DepthMode::Native,
        "as-listed" => DepthMode::AsListed,
        other => return Err(config_err(format!("unknown depth mode {other:?}"))),
    };
    let files = jsonl_files(&a.input)?;
    let mut results: Vec<(String, f64)> = Vec::new();
    let mut classical: std::collections::BTreeMap<String, (f64, f64)> = Default::default();
    for f in &files {
        for v in read_jsonl(f)? {
            match v.get("kind").and_then(|k| k.as_str()) {
                Some("bench_result") => {
                    let braid = v["braid_text"].as_str().unwrap_or_default().to_string();
                    if let Some(rel) = v["relative_error"].as_f64() {
                        results.push((braid, rel));
                    }
                }
                Some("eval") if v["method"] == "mpo" => {
                    let braid = v["braid"].as_str().unwrap_or_default().to_string();
                    let flops = v["flops"].as_f64().unwrap_or(0.0);
                    let bytes = v["peak_bytes"].as_f64().unwrap_or(0.0);
                    classical.insert(braid, (flops, bytes));
                }
                _ => {}
            }
        }
    }
    if results.is_empty() {
        return Err(Fail { code: 2, msg: format!("no bench results under {}", a.input.display()) });
    }
    let mut costs = Vec::new();
    for (text, rel) in &results {
        let Some(&(flops, bytes)) = classical.get(text) else {
            eprintln!("warning: no mpo record for {text}; skipped");
            continue;
        };
        let b: BraidWord = text.parse()?;
        let n = b.qubits();
        let s = all_ones_string(n);
        let c = cfev_for_braid(&b, &s, false, true)?;
        costs.push(BraidCost {
            braid: text.clone(),
            crossings: b.crossings(),
            qubits: n,
            depth: resources::circuit_depth(&c, depth_mode),
            relative_error: *rel,
            classical_flops: flops,
            classical_peak_bytes: bytes,
        });
    }
    if costs.is_empty() {
        return Err(Fail { code: 2, msg: "no braid has both a bench result and an mpo record".into() });
    }
    let rows = resources::advantage_report(&costs, &model)?;
    let report = json!({ "tool": tool_version(), "model": model, "depth_mode": depth_mode, "rows": rows });
    if let Some(p) = &a.csv {
        let mut w = csv::Writer::from_path(p).map_err(output_err)?;
        for r in &rows {
            w.serialize(r).map_err(output_err)?;
        }
        w.flush().map_err(output_err)?;
    }
    let text = serde_json::to_string_pretty(&report).map_err(output_err)?;
    match (&a.json, &a.csv) {
        (Some(p), _) => fs::write(p, text + "\n").map_err(output_err)?,
        (None, None) => println!("{text}"),
        (None, Some(_)) => {}
    }
    Ok(())
}
