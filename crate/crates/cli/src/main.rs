use std::fmt::Write as _;
use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use lomdec::circuit::{is_fragile, is_fragile_forward, parse_circuit, write_circuit, MeasId, ObservableSpec};
use lomdec::dem::{serialize_dem, Noise};
use lomdec::detectors::{check_determinism, Frame};
use lomdec::harness::{
    brute_force_distance, monte_carlo, named_experiment, padded_repeated_gate_text, parse_repeated_name,
    window_padding, DistanceMode, Experiment, McConfig, McResult, ShotDecoder, SplittingShots,
};
use lomdec::lom::{LomPlan, SplitPolicy, SplittingDecoder};
use lomdec::window::{plan_windows, ShortCutConfig, WindowedDecoder};
use lomdec::Error;

#[derive(Parser)]
#[command(name = "lomdec", version, about = "Logical observable matching decoders for encoded Clifford circuits")]
struct Cli {
    /// Master seed for sampling and coin tosses.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = all cores). LOMDEC_THREADS overrides this.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[arg(long, global = true, value_enum, default_value_t = FrameArg::Pre)]
    frame: FrameArg,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum FrameArg {
    Pre,
    Post,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum NoiseArg {
    Basic,
    #[value(alias = "phenomenological")]
    Phenom,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum DecoderArg {
    Lom,
    Splitting,
    Windowed,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Reweight,
    Drop,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Circuit,
    Lom,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print a generated circuit.
    Gen {
        #[arg(long)]
        exp: String,
        #[arg(long, default_value_t = 3)]
        d: usize,
        /// Overrides the basis suffix of a repeated-gate name.
        #[arg(long)]
        basis: Option<String>,
        /// Pad a repeated-gate circuit for windows of this width.
        #[arg(long)]
        window: Option<usize>,
        #[arg(long, default_value_t = 1)]
        slow_reset_factor: usize,
    },
    /// Compile a circuit into a decoding hypergraph.
    Build {
        #[command(flatten)]
        src: Source,
        #[command(flatten)]
        noise: NoiseOpts,
    },
    /// Monte-Carlo estimate at one point.
    Run {
        #[command(flatten)]
        src: Source,
        #[command(flatten)]
        noise: NoiseOpts,
        #[command(flatten)]
        dec: DecoderOpts,
        #[command(flatten)]
        stop: StopOpts,
    },
    /// Monte-Carlo estimates over lists of distances and probabilities.
    Sweep {
        /// Generator name (the circuit is rebuilt for each d).
        #[arg(long)]
        exp: String,
        #[arg(long, value_delimiter = ',', required = true)]
        d: Vec<usize>,
        #[arg(long, value_enum, default_value_t = NoiseArg::Phenom)]
        noise: NoiseArg,
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<f64>,
        #[command(flatten)]
        dec: DecoderOpts,
        #[command(flatten)]
        stop: StopOpts,
    },
    /// Minimum weight of an undetected logical error.
    Distance {
        #[command(flatten)]
        src: Source,
        #[command(flatten)]
        noise: NoiseOpts,
        #[arg(long, value_enum, default_value_t = ModeArg::Lom)]
        mode: ModeArg,
        /// Observable products, e.g. `m1^m2`; defaults to the final requests.
        #[arg(long, value_delimiter = ',')]
        observable: Vec<String>,
        #[arg(long, default_value_t = 4)]
        max_weight: usize,
        #[arg(long, default_value_t = 1_000_000_000)]
        budget: u128,
    },
    /// Determinism, graph-property and fragility self-tests.
    Check {
        #[command(flatten)]
        src: Source,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
}

#[derive(Args)]
struct Source {
    /// Circuit file (`-` for stdin). Read from stdin when neither this nor
    /// --exp is given.
    #[arg(long, conflicts_with = "exp")]
    circuit: Option<String>,
    /// Generator name, e.g. repeated-S-x, repeated-cnot, bell.
    #[arg(long)]
    exp: Option<String>,
    /// Code distance; defaults to the `#! d=` pragma, then 3.
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    basis: Option<String>,
}

#[derive(Args)]
struct NoiseOpts {
    #[arg(long, value_enum, default_value_t = NoiseArg::Basic)]
    noise: NoiseArg,
    #[arg(long, default_value_t = 0.001)]
    p: f64,
}

#[derive(Args)]
struct DecoderOpts {
    #[arg(long, value_enum, default_value_t = DecoderArg::Lom)]
    decoder: DecoderArg,
    /// Requested products, e.g. `m1^m2,m3`; defaults to the final reliable
    /// observables.
    #[arg(long, value_delimiter = ',')]
    observable: Vec<String>,
    #[arg(long, value_enum, default_value_t = PolicyArg::Drop)]
    policy: PolicyArg,
    /// Commit and buffer width of the windowed decoder (default (d+1)/2).
    #[arg(long)]
    window: Option<usize>,
    #[arg(long, default_value_t = 1)]
    slow_reset_factor: usize,
    #[arg(long)]
    shortcut: bool,
    #[arg(long)]
    shortcut_weight: Option<f64>,
}

#[derive(Args)]
struct StopOpts {
    #[arg(long, default_value_t = 1000)]
    max_failures: u64,
    #[arg(long, default_value_t = 10_000_000)]
    max_shots: u64,
}

enum Fail {
    Usage(String),
    Validation(String),
    Internal(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::NotAGraph { .. } | Error::Infeasible | Error::UnknownVertex(_) | Error::Program(_) => {
                Fail::Internal(e.to_string())
            }
            _ => Fail::Validation(e.to_string()),
        }
    }
}

type Res<T> = std::result::Result<T, Fail>;

fn read_input(path: Option<&str>) -> Res<String> {
    let mut s = String::new();
    match path {
        None | Some("-") => {
            std::io::stdin().read_to_string(&mut s).map_err(|e| Fail::Usage(format!("stdin: {e}")))?;
        }
        Some(p) => s = std::fs::read_to_string(p).map_err(|e| Fail::Usage(format!("{p}: {e}")))?,
    }
    Ok(s)
}

/// Distance from a `#! d=<n>` line, if present.
fn pragma_d(text: &str) -> Option<usize> {
    text.lines()
        .filter_map(|l| l.trim().strip_prefix("#!"))
        .flat_map(|l| l.split_whitespace())
        .find_map(|t| t.strip_prefix("d=")?.parse().ok())
}

fn with_basis(exp: &str, basis: Option<&str>) -> Res<String> {
    let Some(b) = basis else { return Ok(exp.to_string()) };
    let b = b.to_ascii_lowercase();
    if b != "x" && b != "z" {
        return Err(Fail::Usage(format!("basis must be X or Z, got `{b}`")));
    }
    let Some(base) = exp.to_ascii_lowercase().strip_prefix("repeated-").map(str::to_string) else {
        return Err(Fail::Usage("--basis only applies to repeated-gate experiments".into()));
    };
    let g = base.strip_suffix("-x").or_else(|| base.strip_suffix("-z")).unwrap_or(&base).to_string();
    Ok(format!("repeated-{g}-{b}"))
}

/// Circuit text for a generator, padded for windowed decoding when asked.
fn gen_text(name: &str, d: usize, window: Option<(usize, usize)>) -> Res<String> {
    match (window, parse_repeated_name(name)) {
        (Some((w, f)), Some((g, basis))) => {
            let (lead, tail) = window_padding(d, w, f);
            Ok(padded_repeated_gate_text(g, d, basis, lead, tail)?)
        }
        _ => Ok(named_experiment(name, d)?),
    }
}

fn load(src: &Source, window: Option<(usize, usize)>) -> Res<(String, usize)> {
    match &src.exp {
        Some(name) => {
            let d = src.d.unwrap_or(3);
            let name = with_basis(name, src.basis.as_deref())?;
            let w = window.map(|(w, f)| (if w == 0 { (d + 1) / 2 } else { w }, f));
            Ok((gen_text(&name, d, w)?, d))
        }
        None => {
            let text = read_input(src.circuit.as_deref())?;
            let d = src.d.or_else(|| pragma_d(&text)).unwrap_or(3);
            Ok((text, d))
        }
    }
}

fn noise_of(o: &NoiseOpts) -> Noise {
    match o.noise {
        NoiseArg::Basic => Noise::Basic(o.p),
        NoiseArg::Phenom => Noise::Phenomenological(o.p),
    }
}

fn parse_products(list: &[String]) -> Res<Vec<ObservableSpec>> {
    list.iter()
        .map(|s| {
            let ids = s
                .split(['^', '*', '+'])
                .map(|t| {
                    t.trim()
                        .trim_start_matches(['m', 'M'])
                        .parse::<MeasId>()
                        .map_err(|_| Fail::Usage(format!("bad observable `{s}`")))
                })
                .collect::<Res<Vec<_>>>()?;
            Ok(ObservableSpec::new(ids)?)
        })
        .collect()
}

fn build(text: &str, d: usize, frame: Frame, noise: Noise, requests: &[String]) -> Res<Experiment> {
    noise.validate()?;
    let exp = Experiment::from_text(text, d, frame, noise)?;
    if requests.is_empty() {
        if exp.requests.is_empty() {
            return Err(Fail::Validation("circuit has no reliable final observable to decode".into()));
        }
        Ok(exp)
    } else {
        let r = parse_products(requests)?;
        if let Some(bad) = r.iter().flat_map(|o| o.ids()).find(|&&i| i as usize > exp.bare.n_measurements()) {
            return Err(Fail::Usage(format!("measurement m{bad} does not exist")));
        }
        Ok(exp.with_requests(r))
    }
}

fn estimate(exp: &Experiment, dec: &DecoderOpts, d: usize, cfg: &McConfig) -> Res<McResult> {
    let policy = match dec.policy {
        PolicyArg::Reweight => SplitPolicy::Reweight,
        PolicyArg::Drop => SplitPolicy::Drop,
    };
    let r = match dec.decoder {
        DecoderArg::Lom => {
            let plan = LomPlan::new(&exp.dem, &exp.bare, &exp.realization, &exp.requests, policy)?;
            monte_carlo(exp, &plan, cfg)?
        }
        DecoderArg::Splitting => {
            let s = SplittingShots { decoder: SplittingDecoder::new(&exp.dem)?, requests: exp.requests.clone() };
            monte_carlo(exp, &s, cfg)?
        }
        DecoderArg::Windowed => {
            let w = dec.window.unwrap_or((d + 1) / 2);
            let plan = plan_windows(&exp.bare, &exp.realization, d, w, w, dec.slow_reset_factor, true)?;
            let sc = ShortCutConfig { enabled: dec.shortcut, weight: dec.shortcut_weight };
            let wd = WindowedDecoder::new(exp, plan, policy, sc)?;
            monte_carlo(exp, &wd as &dyn ShotDecoder, cfg)?
        }
    };
    Ok(r)
}

#[derive(Serialize)]
struct Row {
    d: usize,
    p: f64,
    #[serde(flatten)]
    r: McResult,
}

fn emit_rows(rows: &[Row], format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(rows).unwrap() + "\n",
        Format::Csv => {
            let mut s = String::from("d,p,shots,failures,p_log,ci_lo,ci_hi\n");
            for row in rows {
                let r = &row.r;
                writeln!(s, "{},{},{},{},{:e},{:e},{:e}", row.d, row.p, r.shots, r.failures, r.p_log, r.ci_lo, r.ci_hi)
                    .unwrap();
            }
            s
        }
    }
}

fn window_of(dec: &DecoderOpts) -> Option<(usize, usize)> {
    (dec.decoder == DecoderArg::Windowed).then(|| (dec.window.unwrap_or(0), dec.slow_reset_factor))
}

fn run(cli: Cli) -> Res<bool> {
    let frame = match cli.frame {
        FrameArg::Pre => Frame::Pre,
        FrameArg::Post => Frame::Post,
    };
    let mc = |stop: &StopOpts| McConfig {
        max_shots: stop.max_shots.max(1),
        max_failures: stop.max_failures.max(1),
        seed: cli.seed,
        ..McConfig::default()
    };
    match cli.cmd {
        Cmd::Gen { exp, d, basis, window, slow_reset_factor } => {
            let name = with_basis(&exp, basis.as_deref())?;
            let text = gen_text(&name, d, window.map(|w| (w, slow_reset_factor)))?;
            // normalize through the parser so output is always valid
            let c = parse_circuit(&text)?;
            print!("#! d={d}\n{}", write_circuit(&c));
            Ok(true)
        }
        Cmd::Build { src, noise } => {
            let (text, d) = load(&src, None)?;
            let n = noise_of(&noise);
            n.validate()?;
            let exp = Experiment::from_text(&text, d, frame, n)?;
            print!("{}", serialize_dem(&exp.dem));
            Ok(true)
        }
        Cmd::Run { src, noise, dec, stop } => {
            let (text, d) = load(&src, window_of(&dec))?;
            let n = noise_of(&noise);
            let exp = build(&text, d, frame, n, &dec.observable)?;
            let r = estimate(&exp, &dec, d, &mc(&stop))?;
            print!("{}", emit_rows(&[Row { d, p: n.p(), r }], cli.format));
            Ok(true)
        }
        Cmd::Sweep { exp: name, d: ds, noise, p: ps, dec, stop } => {
            let mut rows = Vec::new();
            for &d in &ds {
                let src = Source { circuit: None, exp: Some(name.clone()), d: Some(d), basis: None };
                let (text, d) = load(&src, window_of(&dec))?;
                for &p in &ps {
                    let n = noise_of(&NoiseOpts { noise, p });
                    let exp = build(&text, d, frame, n, &dec.observable)?;
                    let r = estimate(&exp, &dec, d, &mc(&stop))?;
                    eprintln!("d={d} p={p}: {}/{} failures", r.failures, r.shots);
                    rows.push(Row { d, p, r });
                }
            }
            print!("{}", emit_rows(&rows, cli.format));
            Ok(true)
        }
        Cmd::Distance { src, noise, mode, observable, max_weight, budget } => {
            let (text, d) = load(&src, None)?;
            let exp = build(&text, d, frame, noise_of(&noise), &observable)?;
            let products: Vec<Vec<u32>> = exp.requests.iter().map(Experiment::observable_indices).collect();
            let mut out = Vec::new();
            match mode {
                ModeArg::Circuit => {
                    let r = brute_force_distance(&exp.dem, max_weight, &DistanceMode::Circuit(products), budget)?;
                    out.push(("circuit".to_string(), r));
                }
                ModeArg::Lom => {
                    for (o, p) in exp.requests.iter().zip(products) {
                        let r = brute_force_distance(&exp.dem, max_weight, &DistanceMode::Lom(p), budget)?;
                        out.push((label(o), r));
                    }
                }
            }
            if cli.format == Format::Json {
                let v: Vec<_> = out
                    .iter()
                    .map(|(k, r)| {
                        serde_json::json!({
                            "target": k,
                            "weight": r.as_ref().map(|r| r.weight),
                            "witness": r.as_ref().map(|r| r.witness.clone()),
                        })
                    })
                    .collect();
                println!("{}", serde_json::to_string_pretty(&v).unwrap());
            } else {
                println!("target,weight,witness");
                for (k, r) in &out {
                    match r {
                        Some(r) => {
                            let w: Vec<String> = r.witness.iter().map(|h| format!("E{h}")).collect();
                            println!("{k},{},{}", r.weight, w.join(" "));
                        }
                        None => println!("{k},none,"),
                    }
                }
            }
            Ok(true)
        }
        Cmd::Check { src, trials } => {
            let (text, d) = load(&src, None)?;
            check(&text, d, frame, trials, cli.seed)
        }
    }
}

fn label(o: &ObservableSpec) -> String {
    o.ids().iter().map(|i| format!("m{i}")).collect::<Vec<_>>().join("^")
}

fn check(text: &str, d: usize, frame: Frame, trials: usize, seed: u64) -> Res<bool> {
    let exp = Experiment::from_text(text, d, frame, Noise::Basic(0.001))?;
    let mut ok = true;
    let rep = check_determinism(&exp.encoded, &exp.detectors, trials, seed)?;
    println!(
        "determinism: {} ({} detectors, {} trials, {} violations)",
        if rep.ok() { "pass" } else { "FAIL" },
        exp.detectors.len(),
        trials,
        rep.violations.len()
    );
    ok &= rep.ok();

    // singles first, then requested products not already listed
    let n = exp.bare.n_measurements() as MeasId;
    let mut obs: Vec<ObservableSpec> = (1..=n).map(ObservableSpec::single).collect();
    for r in &exp.requests {
        if !obs.contains(r) {
            obs.push(r.clone());
        }
    }
    let mut duality = true;
    for (i, o) in obs.iter().enumerate() {
        let back = is_fragile(&exp.bare, o, &exp.realization)?.0;
        let fwd = is_fragile_forward(&exp.bare, o, &exp.realization)?.0;
        duality &= back == fwd;
        println!("O{} = {{{}}}: {}", i + 1, label(o).replace('^', ","), if back { "fragile" } else { "reliable" });
    }
    println!("reset-duality: {}", if duality { "pass" } else { "FAIL" });
    ok &= duality;

    let graph = match LomPlan::new(&exp.dem, &exp.bare, &exp.realization, &exp.requests, SplitPolicy::Drop) {
        Ok(plan) => {
            let k = plan.generators.iter().enumerate().filter(|&(g, _)| plan.subgraph(g).is_some()).count();
            println!("graph: pass ({k} decoded generators)");
            true
        }
        Err(e @ Error::NotAGraph { .. }) => {
            println!("graph: FAIL ({e})");
            false
        }
        Err(e) => return Err(e.into()),
    };
    ok &= graph;
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let threads = std::env::var("LOMDEC_THREADS").ok().and_then(|s| s.parse().ok()).unwrap_or(cli.threads);
    if threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(Fail::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Fail::Validation(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Fail::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(3)
        }
    }
}
