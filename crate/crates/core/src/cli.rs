//! Command-line dispatcher behind the `crdd` binary.
//!
//! Exit codes: 0 success, 1 a `verify` verdict of FAIL, 2 invalid flags or
//! input, 64 unknown or missing verb. Outputs go to `--out` when given and to
//! standard output otherwise; existing files are only replaced with `--force`.
//!
//! `--config FILE` reads a flat TOML table whose keys are long flag names.
//! A key is applied only when the chosen verb has that flag and the command
//! line does not already set it.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use crate::control::{
    bang_bang_trace, classify_all, control_trace, verify_first_order, ControlTrace, PropagateOptions, Target,
    DEFAULT_SAMPLES, DEFAULT_SYMMETRY_TOL, DEFAULT_TOL,
};
use crate::decay::FitFlag;
use crate::error::Error;
use crate::harness::{default_plan, fit_dataset, run_experiment_with, summarize, write_summary, ExperimentPlan};
use crate::io::{
    read_fits, read_json, read_results, to_json, write_chi, write_fits, write_symmetry, write_trace, ResultsWriter,
    ScheduleFile, SequenceFile,
};
use crate::report::render_report;
use crate::sequence::{
    build_named, cr_variant, pad, pad_k, sim_k, ColoredSchedule, Padding, PulseShape, Sequence,
};

pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNKNOWN_VERB: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "crdd", version, about = "Crosstalk-robust dynamical decoupling toolkit")]
struct Cli {
    /// TOML file of default flag values; command-line flags take precedence
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Build, stagger and pad pulse schedules
    #[command(subcommand)]
    Seq(SeqCmd),
    /// Control matrices, error matrices and symmetry classes
    #[command(subcommand)]
    Analyze(AnalyzeCmd),
    /// Check first-order ZZ suppression; prints PASS or FAIL and the error matrices
    Verify(VerifyArgs),
    /// Survival-probability experiments
    #[command(subcommand)]
    Sim(SimCmd),
    /// Fit A·exp(−γt) + c to every (method, embedding) trace of a results table
    Fit(FitArgs),
    /// Median characteristic times and ratios from a fits table
    Summarize(SummarizeArgs),
    /// SVG plots of survival traces and characteristic times
    Report(ReportArgs),
}

#[derive(Subcommand, Debug)]
enum SeqCmd {
    /// A catalog sequence, or its SIM-k form with --sim-k
    Build(BuildArgs),
    /// Staggered two-colour schedule
    Stagger(StaggerArgs),
    /// Add extra delay to a staggered schedule
    Pad(PadArgs),
}

#[derive(Subcommand, Debug)]
enum AnalyzeCmd {
    /// Control matrix R(t) on the sampling grid
    Trace(AnalyzeArgs),
    /// 1-local and 2-local error matrices at the end of the cycle
    Chi(AnalyzeArgs),
    /// Displacement and mirror (anti)symmetry of every R component
    Symmetry(AnalyzeArgs),
}

#[derive(Subcommand, Debug)]
enum SimCmd {
    /// Run every cell of an experiment plan and write the results table
    Run(SimArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ShapeKind {
    Ideal,
    Square,
    Gaussian,
    Drag,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    #[value(alias = "s")]
    Symmetric,
    #[value(alias = "a")]
    Asymmetric,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ColorArg {
    Red,
    Blue,
}

#[derive(Args, Debug)]
struct ShapeArgs {
    /// Pulse envelope
    #[arg(long, value_enum, default_value = "square")]
    shape: ShapeKind,
    /// Gaussian width in seconds (gaussian and drag)
    #[arg(long)]
    sigma: Option<f64>,
    /// DRAG coefficient in units of the pulse duration
    #[arg(long)]
    drag: Option<f64>,
}

impl ShapeArgs {
    fn shape(&self) -> Result<PulseShape, CliError> {
        let bad = |flag: &str| CliError::usage(format!("--{flag} only applies to gaussian or drag shapes"));
        let s = match self.shape {
            ShapeKind::Ideal | ShapeKind::Square if self.sigma.is_some() => return Err(bad("sigma")),
            ShapeKind::Ideal | ShapeKind::Square | ShapeKind::Gaussian if self.drag.is_some() => {
                return Err(CliError::usage("--drag only applies to the drag shape"))
            }
            ShapeKind::Ideal => PulseShape::Ideal,
            ShapeKind::Square => PulseShape::Square,
            ShapeKind::Gaussian => PulseShape::Gaussian { sigma_s: self.sigma },
            ShapeKind::Drag => PulseShape::GaussianDrag {
                sigma_s: self.sigma,
                drag_coefficient: self.drag,
            },
        };
        s.validate().map_err(CliError::from)?;
        Ok(s)
    }
}

#[derive(Args, Debug)]
struct OutArgs {
    /// Output file (standard output when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replace an existing output file
    #[arg(long)]
    force: bool,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct BuildArgs {
    /// Catalog name: XY4, EDD, KDD, UR10, UR12 or RGA64c
    #[arg(long)]
    name: String,
    /// Pulse duration in seconds
    #[arg(long)]
    tau_p: f64,
    #[command(flatten)]
    shape: ShapeArgs,
    /// Build SIM-<name>-k: each pulse followed by (k−1)·tau_p of delay
    #[arg(long)]
    sim_k: Option<u32>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["red", "input"]))]
struct StaggerArgs {
    /// Catalog sequence for the red colour
    #[arg(long, requires = "blue")]
    red: Option<String>,
    /// Catalog sequence for the blue colour
    #[arg(long, requires = "red")]
    blue: Option<String>,
    /// Sequence JSON staggered against itself
    #[arg(long = "in", value_name = "FILE", conflicts_with_all = ["red", "blue", "tau_p"])]
    input: Option<PathBuf>,
    /// Pulse duration in seconds (with --red/--blue)
    #[arg(long, requires = "red")]
    tau_p: Option<f64>,
    #[command(flatten)]
    shape: ShapeArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
#[command(group = clap::ArgGroup::new("amount").required(true).args(["k", "tau_d"]))]
struct PadArgs {
    /// Staggered schedule JSON
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Padding factor: tau_d = (k−1)·tau_p
    #[arg(long)]
    k: Option<u32>,
    /// Extra delay per slot in seconds
    #[arg(long)]
    tau_d: Option<f64>,
    #[arg(long, value_enum, default_value = "symmetric")]
    mode: ModeArg,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("target").required(true).args(["seq", "schedule"]))]
struct TargetArgs {
    /// Sequence JSON, applied simultaneously to both qubits of a coupled pair
    #[arg(long, value_name = "FILE")]
    seq: Option<PathBuf>,
    /// Two-colour schedule JSON
    #[arg(long, value_name = "FILE")]
    schedule: Option<PathBuf>,
    /// Grid samples per pulse duration
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct AnalyzeArgs {
    #[command(flatten)]
    target: TargetArgs,
    /// Colour analysed by trace and symmetry for a schedule
    #[arg(long, value_enum, default_value = "red")]
    color: ColorArg,
    /// Tolerance: relative to tau_c for chi, relative L² for symmetry
    #[arg(long)]
    tol: Option<f64>,
    /// Use the ideal-pulse toggling-frame trace (ideal sequences only)
    #[arg(long)]
    bang_bang: bool,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct VerifyArgs {
    #[command(flatten)]
    target: TargetArgs,
    /// Bound on |χ₂| relative to tau_c
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Write the error-matrix CSV here instead of after the verdict
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    force: bool,
}

#[derive(Args, Debug)]
struct SimArgs {
    /// Experiment plan JSON (the built-in crosstalk-dominant plan when omitted)
    #[arg(long, value_name = "FILE")]
    plan: Option<PathBuf>,
    /// Master seed; overrides the seed stored in the plan
    #[arg(long)]
    seed: u64,
    /// Also write the effective plan JSON here
    #[arg(long, value_name = "FILE")]
    plan_out: Option<PathBuf>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct FitArgs {
    /// Results CSV
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct SummarizeArgs {
    /// Fits CSV
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// Results CSV
    #[arg(long, value_name = "FILE")]
    results: PathBuf,
    /// Fits CSV (fitted from the results when omitted)
    #[arg(long, value_name = "FILE")]
    fits: Option<PathBuf>,
    /// Directory for survival.svg and tau.svg
    #[arg(long, value_name = "DIR")]
    out_dir: PathBuf,
    /// Logarithmic survival axis
    #[arg(long)]
    log_y: bool,
    #[arg(long)]
    force: bool,
}

#[derive(Debug)]
struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    /// Attribute an error to the flag whose input caused it.
    fn at(flag: &str) -> impl Fn(Error) -> CliError + '_ {
        move |e| CliError::usage(format!("--{flag}: {e}"))
    }
}

fn flag_for(param: &str) -> String {
    match param {
        "sigma_s" => "sigma".into(),
        "drag_coefficient" => "drag".into(),
        p => p.replace('_', "-"),
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match &e {
            Error::InvalidParameter { name, reason } => CliError::usage(format!("--{}: {reason}", flag_for(name))),
            _ => CliError::usage(e.to_string()),
        }
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::usage(format!("{}: {e}", path.display()))
}

fn check_writable(path: &Path, force: bool, flag: &str) -> Result<(), CliError> {
    if path.exists() && !force {
        return Err(CliError::usage(format!(
            "--{flag}: {} exists; pass --force to overwrite",
            path.display()
        )));
    }
    Ok(())
}

fn emit(o: &OutArgs, bytes: &[u8], out: &mut dyn Write) -> Result<(), CliError> {
    match &o.out {
        Some(p) => {
            check_writable(p, o.force, "out")?;
            fs::write(p, bytes).map_err(io_err(p))
        }
        None => out.write_all(bytes).map_err(|e| CliError::usage(e.to_string())),
    }
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> crate::Result<()>) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

fn seq_cmd(cmd: SeqCmd, out: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        SeqCmd::Build(a) => {
            let shape = a.shape.shape()?;
            let seq = match a.sim_k {
                Some(k) => sim_k(&a.name, a.tau_p, k, shape),
                None => build_named(&a.name, a.tau_p, shape),
            }
            .map_err(name_err)?;
            emit(&a.out, to_json(&SequenceFile::from(&seq))?.as_bytes(), out)
        }
        SeqCmd::Stagger(a) => {
            let sched = if let Some(p) = &a.input {
                let seq = read_json::<SequenceFile>(p)
                    .and_then(|f| f.to_sequence())
                    .map_err(CliError::at("in"))?;
                let phases = seq.phases();
                let mut s = cr_variant(&phases, &phases, seq.tau_p, seq.shape.clone())?;
                s.red.name = format!("CR-{}/R", seq.name);
                s.blue.name = format!("CR-{}/B", seq.name);
                s
            } else {
                let tau_p = a
                    .tau_p
                    .ok_or_else(|| CliError::usage("--tau-p is required with --red/--blue"))?;
                let (r, b) = (a.red.as_deref().unwrap_or(""), a.blue.as_deref().unwrap_or(""));
                ColoredSchedule::named(r, b, tau_p, a.shape.shape()?).map_err(name_err)?
            };
            emit(&a.out, to_json(&ScheduleFile::from(&sched))?.as_bytes(), out)
        }
        SeqCmd::Pad(a) => {
            let sched = read_json::<ScheduleFile>(&a.input)
                .and_then(|f| f.to_schedule())
                .map_err(CliError::at("in"))?;
            let mode = match a.mode {
                ModeArg::Symmetric => Padding::Symmetric,
                ModeArg::Asymmetric => Padding::Asymmetric,
            };
            let padded = match (a.k, a.tau_d) {
                (Some(k), _) => pad_k(&sched, k, mode),
                (None, Some(d)) => pad(&sched, d, mode),
                (None, None) => unreachable!("clap requires one of --k, --tau-d"),
            };
            let padded = padded.map_err(|e| match e {
                Error::NotUnpadded(_) => CliError::at("in")(e),
                e => e.into(),
            })?;
            emit(&a.out, to_json(&ScheduleFile::from(&padded))?.as_bytes(), out)
        }
    }
}

fn name_err(e: Error) -> CliError {
    match e {
        Error::UnknownSequence(_) => CliError::usage(format!("--name: {e}")),
        e => e.into(),
    }
}

enum Loaded {
    Seq(Sequence),
    Schedule(ColoredSchedule),
}

impl Loaded {
    fn read(t: &TargetArgs) -> Result<Loaded, CliError> {
        match (&t.seq, &t.schedule) {
            (Some(p), _) => Ok(Loaded::Seq(
                read_json::<SequenceFile>(p)
                    .and_then(|f| f.to_sequence())
                    .map_err(CliError::at("seq"))?,
            )),
            (None, Some(p)) => Ok(Loaded::Schedule(
                read_json::<ScheduleFile>(p)
                    .and_then(|f| f.to_schedule())
                    .map_err(CliError::at("schedule"))?,
            )),
            (None, None) => unreachable!("clap requires --seq or --schedule"),
        }
    }

    fn target(&self) -> Target<'_> {
        match self {
            Loaded::Seq(s) => Target::Simultaneous(s),
            Loaded::Schedule(s) => Target::Schedule(s),
        }
    }

    fn sequence(&self, c: ColorArg) -> &Sequence {
        match (self, c) {
            (Loaded::Seq(s), _) => s,
            (Loaded::Schedule(s), ColorArg::Red) => &s.red,
            (Loaded::Schedule(s), ColorArg::Blue) => &s.blue,
        }
    }
}

fn trace_of(a: &AnalyzeArgs, loaded: &Loaded) -> Result<ControlTrace, CliError> {
    let seq = loaded.sequence(a.color);
    let r = if a.bang_bang {
        bang_bang_trace(seq, a.target.samples)
    } else {
        control_trace(seq, a.target.samples)
    };
    r.map_err(|e| match e {
        Error::BoundedPulse(_) => CliError::at("bang-bang")(e),
        e => e.into(),
    })
}

fn analyze_cmd(cmd: AnalyzeCmd, out: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        AnalyzeCmd::Trace(a) => {
            let loaded = Loaded::read(&a.target)?;
            let tr = trace_of(&a, &loaded)?;
            emit(&a.out, &csv_bytes(|b| write_trace(b, &tr))?, out)
        }
        AnalyzeCmd::Chi(a) => {
            if a.bang_bang {
                return Err(CliError::usage("--bang-bang: not available for chi; ideal shapes already use exact kicks"));
            }
            let loaded = Loaded::read(&a.target)?;
            let rep = verify_first_order(
                loaded.target(),
                PropagateOptions::samples(a.target.samples),
                a.tol.unwrap_or(DEFAULT_TOL),
            )?;
            emit(&a.out, &csv_bytes(|b| write_chi(b, &rep.entries))?, out)
        }
        AnalyzeCmd::Symmetry(a) => {
            let loaded = Loaded::read(&a.target)?;
            let tr = trace_of(&a, &loaded)?;
            let reps = classify_all(&tr, a.tol.unwrap_or(DEFAULT_SYMMETRY_TOL))?;
            emit(&a.out, &csv_bytes(|b| write_symmetry(b, &reps))?, out)
        }
    }
}

fn verify(a: VerifyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let loaded = Loaded::read(&a.target)?;
    let rep = verify_first_order(loaded.target(), PropagateOptions::samples(a.target.samples), a.tol)?;
    let csv = csv_bytes(|b| write_chi(b, &rep.entries))?;
    let verdict = if rep.pass { "PASS" } else { "FAIL" };
    let w = |out: &mut dyn Write, s: &[u8]| out.write_all(s).map_err(|e| CliError::usage(e.to_string()));
    w(
        out,
        format!("{verdict} max|chi2|/tau_c = {:e} (tol {:e})\n", rep.max_residual, rep.tol).as_bytes(),
    )?;
    match &a.out {
        Some(p) => {
            check_writable(p, a.force, "out")?;
            fs::write(p, &csv).map_err(io_err(p))?;
        }
        None => w(out, &csv)?,
    }
    Ok(if rep.pass { 0 } else { EXIT_FAIL })
}

fn sim_run(a: SimArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let mut plan: ExperimentPlan = match &a.plan {
        Some(p) => read_json(p).map_err(CliError::at("plan"))?,
        None => default_plan(a.seed)?,
    };
    plan.seed = a.seed;
    plan.validate().map_err(CliError::at("plan"))?;
    if let Some(p) = &a.plan_out {
        check_writable(p, a.out.force, "plan-out")?;
        fs::write(p, to_json(&plan)?).map_err(io_err(p))?;
    }
    let data = match &a.out.out {
        Some(p) => {
            check_writable(p, a.out.force, "out")?;
            let mut w = ResultsWriter::create(p)?;
            run_experiment_with(&plan, |rows| w.append(rows))?
        }
        None => {
            let mut w = ResultsWriter::new(&mut *out)?;
            run_experiment_with(&plan, |rows| w.append(rows))?
        }
    };
    for f in &data.failures {
        let _ = writeln!(
            err,
            "warning: {} on {} state {} failed: {}",
            f.method, f.embedding_id, f.state_id, f.message
        );
    }
    Ok(())
}

fn fit(a: FitArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let file = File::open(&a.input).map_err(io_err(&a.input))?;
    let rows = read_results(BufReader::new(file)).map_err(CliError::at("in"))?;
    let fits = fit_dataset(&rows).map_err(CliError::at("in"))?;
    for f in fits.iter().filter(|f| f.fit.flag != FitFlag::Ok) {
        let _ = writeln!(err, "note: {} on {}: {}", f.method, f.embedding_id, f.fit.flag.as_str());
    }
    emit(&a.out, &csv_bytes(|b| write_fits(b, &fits))?, out)
}

fn summarize_cmd(a: SummarizeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let file = File::open(&a.input).map_err(io_err(&a.input))?;
    let fits = read_fits(BufReader::new(file)).map_err(CliError::at("in"))?;
    let rows = summarize(&fits)?;
    emit(&a.out, &csv_bytes(|b| write_summary(b, &rows))?, out)
}

fn report(a: ReportArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let file = File::open(&a.results).map_err(io_err(&a.results))?;
    let rows = read_results(BufReader::new(file)).map_err(CliError::at("results"))?;
    let fits = match &a.fits {
        Some(p) => {
            let f = File::open(p).map_err(io_err(p))?;
            Some(read_fits(BufReader::new(f)).map_err(CliError::at("fits"))?)
        }
        None => None,
    };
    let files = render_report(&rows, fits.as_deref(), a.log_y).map_err(CliError::at("results"))?;
    fs::create_dir_all(&a.out_dir).map_err(io_err(&a.out_dir))?;
    for (name, _) in &files {
        check_writable(&a.out_dir.join(name), a.force, "out-dir")?;
    }
    for (name, svg) in &files {
        let p = a.out_dir.join(name);
        fs::write(&p, svg).map_err(io_err(&p))?;
        let _ = writeln!(out, "{}", p.display());
    }
    Ok(())
}

/// Leaf subcommand named by `argv`, e.g. `["crdd", "sim", "run"]`.
fn leaf_command(argv: &[OsString]) -> clap::Command {
    let mut cmd = Cli::command();
    let mut skip_value = false;
    for a in argv.iter().skip(1) {
        let Some(s) = a.to_str() else { break };
        if std::mem::take(&mut skip_value) {
            continue;
        }
        if s.starts_with('-') {
            skip_value = s == "--config";
            continue;
        }
        match cmd.find_subcommand(s) {
            Some(sub) => cmd = sub.clone(),
            None => break,
        }
    }
    cmd
}

fn config_path(argv: &[OsString]) -> Option<PathBuf> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(v) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(v));
        }
    }
    None
}

/// Append flags from the config file that the leaf command accepts and the
/// command line leaves unset.
fn apply_config(argv: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&path).map_err(|e| CliError::usage(format!("--config: {}: {e}", path.display())))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e| CliError::usage(format!("--config: {}: {e}", path.display())))?;
    let cmd = leaf_command(&argv);
    let mut argv = argv;
    let given: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    for (key, value) in &table {
        let long = key.replace('_', "-");
        let Some(arg) = cmd.get_arguments().find(|a| a.get_long() == Some(long.as_str())) else {
            continue;
        };
        let flag = format!("--{long}");
        if given.iter().any(|g| *g == flag || g.starts_with(&format!("{flag}="))) {
            continue;
        }
        let takes_value = arg.get_num_args().map_or(true, |n| n.takes_values());
        match value {
            toml::Value::Boolean(b) if !takes_value => {
                if *b {
                    argv.push(flag.into());
                }
            }
            toml::Value::String(s) => {
                argv.push(flag.into());
                argv.push(s.into());
            }
            toml::Value::Integer(_) | toml::Value::Float(_) | toml::Value::Boolean(_) => {
                argv.push(flag.into());
                argv.push(value.to_string().into());
            }
            _ => return Err(CliError::usage(format!("--config: key `{key}` must be a scalar"))),
        }
    }
    Ok(argv)
}

fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    match cli.cmd {
        Cmd::Seq(c) => seq_cmd(c, out)?,
        Cmd::Analyze(c) => analyze_cmd(c, out)?,
        Cmd::Verify(a) => return verify(a, out),
        Cmd::Sim(SimCmd::Run(a)) => sim_run(a, out, err)?,
        Cmd::Fit(a) => fit(a, out, err)?,
        Cmd::Summarize(a) => summarize_cmd(a, out)?,
        Cmd::Report(a) => report(a, out)?,
    }
    Ok(0)
}

/// Parse `argv` (including the program name), run the command and return
/// the process exit code.
pub fn dispatch<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    use clap::error::ErrorKind;
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let result = apply_config(argv).and_then(|argv| match Cli::try_parse_from(&argv) {
        Ok(cli) => run(cli, out, err),
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    return Ok(0);
                }
                ErrorKind::InvalidSubcommand
                | ErrorKind::MissingSubcommand
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => EXIT_UNKNOWN_VERB,
                _ => EXIT_USAGE,
            };
            Err(CliError {
                code,
                message: e.render().to_string().trim_end().to_string(),
            })
        }
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message.trim_start_matches("error: "));
            e.code
        }
    }
}
