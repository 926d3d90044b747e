//! freqlab command line: construct sequences, analyze prefixes, export plot
//! data.
//!
//! Exit codes: 0 success, 1 configuration or i/o error, 2 internal bound
//! violation during construction (never expected; indicates a bug).

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use freqlab::analysis::{
    cluster_point_estimate, conditional_prevision_window, event_frequency_window,
    irrelevance_check, precision_system, prevision_window, Event, TailPolicy,
};
use freqlab::credal::{gbr_root, CredalSet};
use freqlab::error::SequenceError;
use freqlab::io;
use freqlab::sequence::{
    construct_extreme, construct_for_curve, pre_dynkin_counterexample, von_mises_doubling, Budget,
    QuantizationSchedule, Schedules, SymbolSequence, VertexSchedule,
};
use freqlab::simplex::CurveSpec;

#[derive(Parser)]
#[command(
    name = "freqlab",
    about = "Construct symbol sequences with prescribed frequency cluster sets and analyze them",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a sequence (curve follower, extreme case, or demo sequences).
    Construct(ConstructArgs),
    /// Estimate previsions, conditionals, irrelevance and cluster points.
    Analyze(AnalyzeArgs),
    /// Export the frequency trajectory as CSV for plotting.
    EmitPlot(EmitPlotArgs),
}

#[derive(Args)]
struct ConstructArgs {
    /// Builtin parametric curve name (currently `lemniscate3`).
    #[arg(long)]
    curve: Option<String>,
    /// Closed polygon as JSON (inline `{"polygon": ...}` or a file path).
    #[arg(long)]
    polygon: Option<String>,
    /// Extreme-case construction covering the whole simplex hull.
    #[arg(long)]
    extreme: bool,
    /// Doubling demo sequence over {1, 2}.
    #[arg(long)]
    doubling: bool,
    /// Pre-Dynkin counterexample demo sequence.
    #[arg(long)]
    counterexample: bool,

    /// Constant polygon vertex count per generation (default: 30*g linear).
    #[arg(long = "V", value_name = "V")]
    v: Option<u32>,
    /// Constant quantization denominator (implies `--T-schedule const`).
    #[arg(long = "T", value_name = "T")]
    t: Option<u64>,
    /// Quantization schedule: `sqrt` (default) or `const` (requires --T).
    #[arg(long = "T-schedule", value_name = "KIND")]
    t_schedule: Option<String>,
    /// Number of full generations to run.
    #[arg(long)]
    generations: Option<u32>,
    /// Stop once the sequence reaches this length.
    #[arg(long)]
    max_length: Option<u64>,

    /// Alphabet size for --extreme.
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Growth exponent for --extreme.
    #[arg(long, default_value_t = 1.5)]
    alpha: f64,
    /// Segment count for --extreme.
    #[arg(long, default_value_t = 6)]
    segments: u32,
    /// Length for --doubling / --counterexample.
    #[arg(long)]
    length: Option<usize>,

    /// Write the binary sequence format instead of text.
    #[arg(long)]
    binary: bool,
    /// Output sequence file.
    #[arg(long, default_value = "sequence.txt")]
    out: PathBuf,
    /// Trace file (JSON lines); defaults to `<out>.trace.jsonl` for curve
    /// constructions.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Sequence file (text or binary, auto-detected).
    #[arg(long)]
    seq: PathBuf,
    /// Gambles/events JSON file.
    #[arg(long)]
    inputs: Option<PathBuf>,
    /// Credal set JSON for envelope and generalized-Bayes comparisons.
    #[arg(long)]
    credal: Option<PathBuf>,
    /// Tail window fraction beta.
    #[arg(long, default_value_t = 0.5)]
    tail_beta: f64,
    /// Precision / irrelevance tolerance.
    #[arg(long, default_value_t = 0.02)]
    tol: f64,
    /// Cluster-point net radius.
    #[arg(long, default_value_t = 0.05)]
    eps: f64,
    /// Lower-probability threshold below which conditioning is flagged.
    #[arg(long, default_value_t = 0.01)]
    cond_threshold: f64,
    /// Report file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EmitPlotArgs {
    /// Sequence file (text or binary, auto-detected).
    #[arg(long)]
    seq: PathBuf,
    /// Emit every `stride`-th prefix index (the final index is always kept).
    #[arg(long, default_value_t = 100)]
    stride: usize,
    /// CSV file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Construct(args) => cmd_construct(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::EmitPlot(args) => cmd_emit_plot(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let bound_violation = err
                .chain()
                .any(|c| matches!(c.downcast_ref(), Some(SequenceError::BoundViolation { .. })));
            if bound_violation {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn read_to_string(path: &Path) -> Result<String> {
    let mut s = String::new();
    File::open(path)
        .with_context(|| format!("opening {}", path.display()))?
        .read_to_string(&mut s)?;
    Ok(s)
}

fn load_sequence(path: &Path) -> Result<SymbolSequence> {
    let mut bytes = Vec::new();
    File::open(path)
        .with_context(|| format!("opening {}", path.display()))?
        .read_to_end(&mut bytes)?;
    Ok(io::read_sequence_auto(&bytes)?)
}

fn write_sequence(path: &Path, seq: &SymbolSequence, binary: bool) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    if binary {
        io::write_sequence_binary(&mut w, seq)?;
    } else {
        io::write_sequence_text(&mut w, seq)?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_construct(args: ConstructArgs) -> Result<()> {
    let sources = [
        args.curve.is_some(),
        args.polygon.is_some(),
        args.extreme,
        args.doubling,
        args.counterexample,
    ];
    if sources.iter().filter(|&&s| s).count() != 1 {
        bail!("choose exactly one of --curve, --polygon, --extreme, --doubling, --counterexample");
    }

    if args.doubling || args.counterexample {
        let length = args
            .length
            .ok_or_else(|| anyhow!("--length is required for demo sequences"))?;
        if length == 0 {
            bail!("--length must be >= 1");
        }
        let seq = if args.doubling {
            von_mises_doubling(length)
        } else {
            pre_dynkin_counterexample(length)
        };
        write_sequence(&args.out, &seq, args.binary)?;
        eprintln!(
            "wrote {} symbols (k={}) to {}",
            seq.len(),
            seq.k(),
            args.out.display()
        );
        return Ok(());
    }

    if args.extreme {
        let seq = construct_extreme(args.k, args.alpha, args.segments, args.max_length)
            .context("extreme construction (use --max-length to truncate long schedules)")?;
        write_sequence(&args.out, &seq, args.binary)?;
        eprintln!(
            "wrote {} symbols (k={}) to {}",
            seq.len(),
            seq.k(),
            args.out.display()
        );
        return Ok(());
    }

    let curve = if let Some(name) = &args.curve {
        if name != "lemniscate3" {
            bail!("unknown curve {name:?} (builtin: lemniscate3)");
        }
        CurveSpec::lemniscate3()
    } else {
        let raw = args.polygon.as_deref().expect("polygon source checked");
        let json = if raw.trim_start().starts_with('{') {
            raw.to_string()
        } else {
            read_to_string(Path::new(raw))?
        };
        io::curve_spec_from_json(&json)?
    };

    let quantization = match (args.t, args.t_schedule.as_deref()) {
        (Some(t), None) | (Some(t), Some("const")) => QuantizationSchedule::Constant(t),
        (None, Some("const")) => bail!("--T-schedule const requires --T"),
        (None, None) | (None, Some("sqrt")) => QuantizationSchedule::SqrtOfLength,
        (Some(_), Some("sqrt")) => bail!("--T conflicts with --T-schedule sqrt"),
        (_, Some(other)) => bail!("unknown --T-schedule {other:?} (sqrt|const)"),
    };
    let schedules = Schedules {
        vertices: match args.v {
            Some(v) => VertexSchedule::Constant(v),
            None => VertexSchedule::Linear { per_generation: 30 },
        },
        quantization,
    };
    let budget = Budget {
        generations: args.generations,
        max_length: args.max_length,
    };

    let (seq, trace) = construct_for_curve(&curve, &schedules, &budget)?;
    write_sequence(&args.out, &seq, args.binary)?;
    let trace_path = args
        .trace
        .unwrap_or_else(|| args.out.with_extension("trace.jsonl"));
    let mut tw = BufWriter::new(File::create(&trace_path)?);
    io::write_trace_jsonl(&mut tw, &trace)?;
    tw.flush()?;
    eprintln!(
        "wrote {} symbols (k={}) to {}; {} segments to {}{}",
        seq.len(),
        seq.k(),
        args.out.display(),
        trace.segments.len(),
        trace_path.display(),
        if trace.budget_exceeded {
            " (stopped by --max-length)"
        } else {
            ""
        }
    );
    Ok(())
}

#[derive(Serialize)]
struct AnalysisReport {
    config: ReportConfig,
    sequence: SequenceInfo,
    gambles: Vec<GambleReport>,
    events: Vec<EventReport>,
    conditionals: Vec<ConditionalReport>,
    irrelevance: Vec<IrrelevanceEntry>,
    gbr: Vec<GbrReport>,
    precision: PrecisionReport,
    cluster_points: ClusterReport,
}

#[derive(Serialize)]
struct ReportConfig {
    tail_beta: f64,
    tol: f64,
    eps: f64,
    cond_threshold: f64,
    credal: Option<String>,
}

#[derive(Serialize)]
struct SequenceInfo {
    k: usize,
    n: usize,
}

#[derive(Serialize)]
struct GambleReport {
    name: String,
    upper: f64,
    lower: f64,
    window: [usize; 2],
    credal_upper: Option<f64>,
    credal_lower: Option<f64>,
}

#[derive(Serialize)]
struct EventReport {
    name: String,
    upper: f64,
    lower: f64,
    width: f64,
    precise: bool,
    window: [usize; 2],
}

#[derive(Serialize)]
struct ConditionalReport {
    gamble: String,
    given: String,
    upper: f64,
    lower: f64,
    low_mass_flag: bool,
}

#[derive(Serialize)]
struct IrrelevanceEntry {
    event: String,
    given: String,
    conditional: f64,
    marginal: f64,
    gap: f64,
    irrelevant: bool,
}

#[derive(Serialize)]
struct GbrReport {
    gamble: String,
    given: String,
    sequence_estimate: f64,
    credal_gbr: Option<f64>,
    credal_root: Option<f64>,
    divergence_flagged: bool,
}

#[derive(Serialize)]
struct PrecisionReport {
    tol: f64,
    precise: Vec<String>,
    imprecise: Vec<String>,
}

#[derive(Serialize)]
struct ClusterReport {
    eps: f64,
    centers: Vec<Vec<f64>>,
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<()> {
    let seq = load_sequence(&args.seq)?;
    let policy = TailPolicy::Fraction(args.tail_beta);
    if args.tol <= 0.0 || args.eps <= 0.0 {
        bail!("--tol and --eps must be positive");
    }
    let inputs = match &args.inputs {
        Some(path) => io::AnalysisInputs::from_json(&read_to_string(path)?)?,
        None => io::AnalysisInputs::default(),
    };
    let (gambles, events) = inputs.resolve(seq.k())?;
    let credal = args
        .credal
        .as_ref()
        .map(|p| -> Result<CredalSet> { Ok(io::credal_set_from_json(&read_to_string(p)?)?) })
        .transpose()?;
    if let Some(c) = &credal {
        if c.k() != seq.k() {
            bail!("credal set k={} does not match sequence k={}", c.k(), seq.k());
        }
    }

    let mut gamble_reports = Vec::new();
    for (name, x) in &gambles {
        let w = prevision_window(&seq, x, &policy)?;
        let (credal_upper, credal_lower) = match &credal {
            Some(c) => (
                Some(c.upper_prevision(x)?.value),
                Some(c.lower_prevision(x)?.value),
            ),
            None => (None, None),
        };
        gamble_reports.push(GambleReport {
            name: name.clone(),
            upper: w.hi,
            lower: w.lo,
            window: [w.start, w.end],
            credal_upper,
            credal_lower,
        });
    }

    let mut event_reports = Vec::new();
    for (name, a) in &events {
        let w = event_frequency_window(&seq, a, &policy)?;
        event_reports.push(EventReport {
            name: name.clone(),
            upper: w.hi,
            lower: w.lo,
            width: w.width(),
            precise: w.width() <= args.tol,
            window: [w.start, w.end],
        });
    }

    let mut conditionals = Vec::new();
    let mut gbr_reports = Vec::new();
    for (gname, x) in &gambles {
        for (ename, b) in &events {
            let Ok(w) = conditional_prevision_window(&seq, x, b, &policy) else {
                continue; // B never occurs: skip the pair.
            };
            let lower_mass = event_frequency_window(&seq, b, &policy)?.lo;
            conditionals.push(ConditionalReport {
                gamble: gname.clone(),
                given: ename.clone(),
                upper: w.hi,
                lower: w.lo,
                low_mass_flag: lower_mass <= args.cond_threshold,
            });
            if let Some(c) = &credal {
                let credal_gbr = c.gbr_credal(x, b, f64::NAN).ok();
                let credal_root = gbr_root(
                    |g| c.upper_prevision(g).map(|r| r.value).unwrap_or(f64::NAN),
                    x,
                    b,
                    1e-9,
                    200,
                )
                .ok();
                let divergence_flagged = lower_mass <= args.cond_threshold
                    || credal_gbr.map_or(true, |v| (v - w.hi).abs() > args.tol);
                gbr_reports.push(GbrReport {
                    gamble: gname.clone(),
                    given: ename.clone(),
                    sequence_estimate: w.hi,
                    credal_gbr,
                    credal_root,
                    divergence_flagged,
                });
            }
        }
    }

    let mut irrelevance = Vec::new();
    for (aname, a) in &events {
        for (bname, b) in &events {
            if aname == bname {
                continue;
            }
            if let Ok(rep) = irrelevance_check(&seq, a, b, &policy, args.tol) {
                irrelevance.push(IrrelevanceEntry {
                    event: aname.clone(),
                    given: bname.clone(),
                    conditional: rep.conditional,
                    marginal: rep.marginal,
                    gap: rep.gap,
                    irrelevant: rep.irrelevant,
                });
            }
        }
    }

    let family: Vec<Event> = events.values().cloned().collect();
    let names: Vec<&String> = events.keys().collect();
    let mut precise = Vec::new();
    let mut imprecise = Vec::new();
    for (i, entry) in precision_system(&seq, &family, &policy, args.tol)?
        .iter()
        .enumerate()
    {
        if entry.precise {
            precise.push(names[i].clone());
        } else {
            imprecise.push(names[i].clone());
        }
    }

    let centers = cluster_point_estimate(&seq, &policy, args.eps)?
        .into_iter()
        .map(|p| p.coords().to_vec())
        .collect();

    let report = AnalysisReport {
        config: ReportConfig {
            tail_beta: args.tail_beta,
            tol: args.tol,
            eps: args.eps,
            cond_threshold: args.cond_threshold,
            credal: args.credal.as_ref().map(|p| p.display().to_string()),
        },
        sequence: SequenceInfo {
            k: seq.k(),
            n: seq.len(),
        },
        gambles: gamble_reports,
        events: event_reports,
        conditionals,
        irrelevance,
        gbr: gbr_reports,
        precision: PrecisionReport {
            tol: args.tol,
            precise,
            imprecise,
        },
        cluster_points: ClusterReport {
            eps: args.eps,
            centers,
        },
    };
    let json = serde_json::to_string_pretty(&report)?;
    match &args.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            writeln!(w, "{json}")?;
            w.flush()?;
        }
        None => println!("{json}"),
    }
    Ok(())
}

fn cmd_emit_plot(args: EmitPlotArgs) -> Result<()> {
    let seq = load_sequence(&args.seq)?;
    if args.stride == 0 {
        bail!("--stride must be >= 1");
    }
    let k = seq.k();
    let out: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = BufWriter::new(out);

    write!(w, "n")?;
    for i in 1..=k {
        write!(w, ",r{i}")?;
    }
    if k == 3 {
        // Ternary projection: x = r2 + r3/2, y = sqrt(3)/2 * r3.
        write!(w, ",tx,ty")?;
    }
    writeln!(w)?;

    let mut counts = vec![0u64; k];
    for (i, sym) in seq.iter().enumerate() {
        counts[(sym - 1) as usize] += 1;
        let n = i + 1;
        if n % args.stride != 0 && n != seq.len() {
            continue;
        }
        write!(w, "{n}")?;
        let nf = n as f64;
        for &c in &counts {
            write!(w, ",{}", c as f64 / nf)?;
        }
        if k == 3 {
            let r2 = counts[1] as f64 / nf;
            let r3 = counts[2] as f64 / nf;
            let tx = r2 + 0.5 * r3;
            let ty = 0.75f64.sqrt() * r3;
            write!(w, ",{tx},{ty}")?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}
