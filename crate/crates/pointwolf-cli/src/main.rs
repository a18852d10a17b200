//! Batch command-line front end: augmentation and corruption pipelines over
//! point cloud files, the desk-scale robustness demo, and cloud inspection.
//!
//! Exit codes: 0 success, 1 usage error (bad flags or config), 2 data error
//! (unreadable or invalid inputs), 3 internal error.

use std::panic::catch_unwind;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use pointwolf::cda::CdaConfig;
use pointwolf::corrupt::{Corruption, PadMode};
use pointwolf::demo::{demo_robustness, DemoConfig, Regime};
use pointwolf::io::{read_cloud, read_cloud_with_format, CloudFormat};
use pointwolf::pipeline::{run_pipeline, PipelineSpec, RunReport, Stage};
use pointwolf::wolf::WolfConfig;

#[derive(Parser)]
#[command(name = "pointwolf", version, about = "Deterministic point cloud augmentation engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an augmentation pipeline over input files
    Augment(AugmentArgs),
    /// Run a corruption-only pipeline over input files
    Corrupt(CorruptArgs),
    /// Train the reference classifier with and without augmentation and
    /// score both on the corruption grid
    DemoRobustness(DemoArgs),
    /// Print statistics for point cloud files
    Inspect(InspectArgs),
}

#[derive(Args)]
struct SharedArgs {
    /// Input files or glob patterns
    #[arg(value_name = "INPUT")]
    inputs: Vec<String>,
    /// Directory for output clouds and the run report
    #[arg(long, value_name = "DIR")]
    output_dir: Option<PathBuf>,
    /// Master seed for the run
    #[arg(long)]
    seed: Option<u64>,
    /// Output samples per input file
    #[arg(long)]
    reps: Option<usize>,
    /// Abort on the first per-file error instead of skipping it
    #[arg(long)]
    strict: bool,
    /// Point cloud format, xyz or ply; wins over the file extension
    #[arg(long)]
    format: Option<String>,
    /// Center inputs and scale them to the unit sphere (default)
    #[arg(long, overrides_with = "no_normalize")]
    normalize: bool,
    /// Keep input coordinates as they are
    #[arg(long, overrides_with = "normalize")]
    no_normalize: bool,
}

impl SharedArgs {
    fn normalize_choice(&self) -> Option<bool> {
        if self.normalize {
            Some(true)
        } else if self.no_normalize {
            Some(false)
        } else {
            None
        }
    }
}

#[derive(Args)]
struct AugmentArgs {
    #[command(flatten)]
    shared: SharedArgs,
    /// Pipeline description file; stage flags cannot be combined with it
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Stage to run when no config file is given
    #[arg(long, value_enum)]
    stage: Option<StageKind>,
    /// Number of anchor points
    #[arg(long)]
    anchors: Option<usize>,
    /// Kernel bandwidth
    #[arg(long)]
    bandwidth: Option<f64>,
    /// Rotation range in degrees
    #[arg(long)]
    rho_r: Option<f64>,
    /// Upper scaling bound
    #[arg(long)]
    rho_s: Option<f64>,
    /// Translation range
    #[arg(long)]
    rho_t: Option<f64>,
    /// Per-axis projection mask probability
    #[arg(long)]
    beta: Option<f64>,
    /// Difficulty coefficient for the augtune stage
    #[arg(long)]
    lambda: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StageKind {
    Pointwolf,
    Cda,
    Augtune,
}

#[derive(Args)]
struct CorruptArgs {
    #[command(flatten)]
    shared: SharedArgs,
    /// Corruption to apply
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Cluster count for local_drop and local_add
    #[arg(long)]
    clusters: Option<usize>,
    /// Points per cluster for local_drop and local_add
    #[arg(long)]
    cluster_size: Option<usize>,
    /// Drop probability for dropout
    #[arg(long)]
    rate: Option<f64>,
    /// Noise standard deviation
    #[arg(long)]
    sigma: Option<f64>,
    /// Padding for removed points
    #[arg(long, value_enum)]
    pad: Option<PadArg>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    #[value(name = "local_drop", alias = "local-drop")]
    LocalDrop,
    #[value(name = "local_add", alias = "local-add")]
    LocalAdd,
    Dropout,
    Noise,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PadArg {
    #[value(name = "duplicate-first", alias = "duplicate_first")]
    DuplicateFirst,
    Shrink,
}

impl From<PadArg> for PadMode {
    fn from(pad: PadArg) -> Self {
        match pad {
            PadArg::DuplicateFirst => PadMode::DuplicateFirst,
            PadArg::Shrink => PadMode::Shrink,
        }
    }
}

#[derive(Args)]
struct DemoArgs {
    #[arg(long)]
    seed: Option<u64>,
    /// Points per synthetic shape
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    train_per_class: Option<usize>,
    #[arg(long)]
    test_per_class: Option<usize>,
    /// Augmented copies per training cloud
    #[arg(long)]
    copies: Option<usize>,
    /// Padding for the corrupted evaluation clouds
    #[arg(long, value_enum)]
    pad: Option<PadArg>,
    /// Number of anchor points
    #[arg(long)]
    anchors: Option<usize>,
    /// Kernel bandwidth
    #[arg(long)]
    bandwidth: Option<f64>,
    /// Rotation range in degrees
    #[arg(long)]
    rho_r: Option<f64>,
    /// Upper scaling bound
    #[arg(long)]
    rho_s: Option<f64>,
    /// Translation range
    #[arg(long)]
    rho_t: Option<f64>,
    /// Per-axis projection mask probability
    #[arg(long)]
    beta: Option<f64>,
}

#[derive(Args)]
struct InspectArgs {
    /// Point cloud files to describe
    #[arg(value_name = "FILE", required = true)]
    files: Vec<PathBuf>,
    /// Point cloud format, xyz or ply; wins over the file extension
    #[arg(long)]
    format: Option<String>,
}

enum CliError {
    Usage(String),
    Data(pointwolf::Error),
}

impl From<pointwolf::Error> for CliError {
    fn from(e: pointwolf::Error) -> Self {
        CliError::Data(e)
    }
}

fn main() -> ExitCode {
    // Die quietly when a downstream pipe closes instead of panicking on
    // the next print.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    match catch_unwind(run) {
        Ok(code) => code,
        Err(_) => {
            eprintln!("internal error: unexpected panic");
            ExitCode::from(3)
        }
    }
}

fn run() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let result = match cli.command {
        Command::Augment(args) => cmd_augment(args),
        Command::Corrupt(args) => cmd_corrupt(args),
        Command::DemoRobustness(args) => cmd_demo(args),
        Command::Inspect(args) => cmd_inspect(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn parse_format(name: &str) -> Result<CloudFormat, CliError> {
    CloudFormat::parse_name(name).map_err(|e| CliError::Usage(e.to_string()))
}

fn wolf_from_flags(
    base: WolfConfig,
    anchors: Option<usize>,
    bandwidth: Option<f64>,
    rho_r: Option<f64>,
    rho_s: Option<f64>,
    rho_t: Option<f64>,
    beta: Option<f64>,
) -> WolfConfig {
    WolfConfig {
        anchors: anchors.unwrap_or(base.anchors),
        bandwidth: bandwidth.unwrap_or(base.bandwidth),
        rho_r: rho_r.map(f64::to_radians).unwrap_or(base.rho_r),
        rho_s: rho_s.unwrap_or(base.rho_s),
        rho_t: rho_t.unwrap_or(base.rho_t),
        beta: beta.unwrap_or(base.beta),
    }
}

fn build_augment_stage(args: &AugmentArgs) -> Result<Stage, CliError> {
    let wolf_flags_given = args.anchors.is_some()
        || args.bandwidth.is_some()
        || args.rho_r.is_some()
        || args.rho_s.is_some()
        || args.rho_t.is_some()
        || args.beta.is_some();
    let wolf = wolf_from_flags(
        WolfConfig::default(),
        args.anchors,
        args.bandwidth,
        args.rho_r,
        args.rho_s,
        args.rho_t,
        args.beta,
    );
    match args.stage.unwrap_or(StageKind::Pointwolf) {
        StageKind::Pointwolf => {
            if args.lambda.is_some() {
                return Err(CliError::Usage(
                    "--lambda only applies to the augtune stage".into(),
                ));
            }
            Ok(Stage::Pointwolf(wolf))
        }
        StageKind::Augtune => Ok(Stage::Augtune {
            wolf,
            lambda: args.lambda.unwrap_or(0.3),
        }),
        StageKind::Cda => {
            if wolf_flags_given || args.lambda.is_some() {
                return Err(CliError::Usage(
                    "the cda stage takes no deformation flags; use a config file to adjust it"
                        .into(),
                ));
            }
            Ok(Stage::Cda(CdaConfig::default()))
        }
    }
}

fn apply_shared_overrides(spec: &mut PipelineSpec, shared: &SharedArgs) -> Result<(), CliError> {
    if !shared.inputs.is_empty() {
        spec.inputs = shared.inputs.clone();
    }
    if let Some(dir) = &shared.output_dir {
        spec.output_dir = dir.clone();
    }
    if let Some(seed) = shared.seed {
        spec.seed = seed;
    }
    if let Some(reps) = shared.reps {
        spec.repetitions = reps;
    }
    if shared.strict {
        spec.strict = true;
    }
    if let Some(name) = &shared.format {
        spec.format = Some(parse_format(name)?);
    }
    if let Some(normalize) = shared.normalize_choice() {
        spec.normalize = normalize;
    }
    Ok(())
}

fn flag_built_spec(shared: &SharedArgs, stages: Vec<Stage>) -> Result<PipelineSpec, CliError> {
    let output_dir = shared
        .output_dir
        .clone()
        .ok_or_else(|| CliError::Usage("--output-dir is required".into()))?;
    if shared.inputs.is_empty() {
        return Err(CliError::Usage("at least one input path is required".into()));
    }
    let mut spec = PipelineSpec {
        inputs: shared.inputs.clone(),
        output_dir,
        seed: shared.seed.unwrap_or(0),
        normalize: shared.normalize_choice().unwrap_or(true),
        repetitions: shared.reps.unwrap_or(1),
        format: None,
        strict: shared.strict,
        stages,
    };
    if let Some(name) = &shared.format {
        spec.format = Some(parse_format(name)?);
    }
    Ok(spec)
}

fn execute_pipeline(spec: PipelineSpec) -> Result<(), CliError> {
    spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let report = run_pipeline(&spec)?;
    print_run_summary(&spec, &report);
    Ok(())
}

fn print_run_summary(spec: &PipelineSpec, report: &RunReport) {
    for s in &report.skipped {
        let rep = s.rep.map(|r| format!(" (rep {r})")).unwrap_or_default();
        eprintln!("skipped {}{rep}: {}", s.input.display(), s.error);
    }
    println!(
        "wrote {} samples to {} ({} skipped) in {:.3}s",
        report.records.len(),
        spec.output_dir.display(),
        report.skipped.len(),
        report.elapsed.as_secs_f64()
    );
    println!("report: {}", spec.output_dir.join("report.txt").display());
}

fn cmd_augment(args: AugmentArgs) -> Result<(), CliError> {
    let spec = if let Some(config) = &args.config {
        let stage_flags_given = args.stage.is_some()
            || args.anchors.is_some()
            || args.bandwidth.is_some()
            || args.rho_r.is_some()
            || args.rho_s.is_some()
            || args.rho_t.is_some()
            || args.beta.is_some()
            || args.lambda.is_some();
        if stage_flags_given {
            return Err(CliError::Usage(
                "stage flags cannot be combined with --config; edit the config file instead"
                    .into(),
            ));
        }
        let mut spec =
            PipelineSpec::from_toml_file(config).map_err(|e| CliError::Usage(e.to_string()))?;
        apply_shared_overrides(&mut spec, &args.shared)?;
        spec
    } else {
        let stage = build_augment_stage(&args)?;
        flag_built_spec(&args.shared, vec![stage])?
    };
    execute_pipeline(spec)
}

fn build_corruption(args: &CorruptArgs) -> Result<Corruption, CliError> {
    let reject = |flag: &str, kind: &str| -> CliError {
        CliError::Usage(format!("--{flag} does not apply to the {kind} corruption"))
    };
    match args.kind {
        KindArg::LocalDrop | KindArg::LocalAdd => {
            let kind_name = if args.kind == KindArg::LocalDrop {
                "local_drop"
            } else {
                "local_add"
            };
            if args.rate.is_some() {
                return Err(reject("rate", kind_name));
            }
            if args.sigma.is_some() {
                return Err(reject("sigma", kind_name));
            }
            let clusters = args.clusters.unwrap_or(3);
            let cluster_size = args.cluster_size.unwrap_or(50);
            Ok(if args.kind == KindArg::LocalDrop {
                Corruption::LocalDrop {
                    clusters,
                    cluster_size,
                }
            } else {
                Corruption::LocalAdd {
                    clusters,
                    cluster_size,
                }
            })
        }
        KindArg::Dropout => {
            if args.clusters.is_some() || args.cluster_size.is_some() {
                return Err(reject("clusters", "dropout"));
            }
            if args.sigma.is_some() {
                return Err(reject("sigma", "dropout"));
            }
            Ok(Corruption::Dropout {
                rate: args.rate.unwrap_or(0.25),
            })
        }
        KindArg::Noise => {
            if args.clusters.is_some() || args.cluster_size.is_some() {
                return Err(reject("clusters", "noise"));
            }
            if args.rate.is_some() {
                return Err(reject("rate", "noise"));
            }
            Ok(Corruption::Noise {
                sigma: args.sigma.unwrap_or(0.01),
            })
        }
    }
}

fn cmd_corrupt(args: CorruptArgs) -> Result<(), CliError> {
    let kind = build_corruption(&args)?;
    let pad = args.pad.map(PadMode::from).unwrap_or_default();
    let spec = flag_built_spec(&args.shared, vec![Stage::Corrupt { kind, pad }])?;
    execute_pipeline(spec)
}

fn cmd_demo(args: DemoArgs) -> Result<(), CliError> {
    let base = DemoConfig::default();
    let cfg = DemoConfig {
        seed: args.seed.unwrap_or(base.seed),
        points: args.points.unwrap_or(base.points),
        train_per_class: args.train_per_class.unwrap_or(base.train_per_class),
        test_per_class: args.test_per_class.unwrap_or(base.test_per_class),
        augment_copies: args.copies.unwrap_or(base.augment_copies),
        normalize_copies: base.normalize_copies,
        eval_pad: args.pad.map(PadMode::from).unwrap_or(base.eval_pad),
        wolf: wolf_from_flags(
            base.wolf,
            args.anchors,
            args.bandwidth,
            args.rho_r,
            args.rho_s,
            args.rho_t,
            args.beta,
        ),
    };
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let report = demo_robustness(&cfg)?;
    print!("{}", report.render());
    println!(
        "grid mean delta (wolf-trained minus clean-trained): {:+.3}",
        report.grid_mean(Regime::WolfTrained) - report.grid_mean(Regime::CleanTrained)
    );
    println!("completed in {:.3}s", report.elapsed.as_secs_f64());
    Ok(())
}

fn cmd_inspect(args: InspectArgs) -> Result<(), CliError> {
    let format = match &args.format {
        Some(name) => Some(parse_format(name)?),
        None => None,
    };
    for path in &args.files {
        let pc = match format {
            Some(f) => read_cloud_with_format(path, f)?,
            None => read_cloud(path)?,
        };
        let c = pc.centroid();
        let (lo, hi) = pc.bounding_box();
        println!("{}: {} points", path.display(), pc.len());
        println!("  centroid: ({:.6}, {:.6}, {:.6})", c.x, c.y, c.z);
        println!(
            "  bounds:   ({:.6}, {:.6}, {:.6}) .. ({:.6}, {:.6}, {:.6})",
            lo.x, lo.y, lo.z, hi.x, hi.y, hi.z
        );
        println!("  radius:   {:.6}", pc.bounding_radius());
    }
    Ok(())
}
