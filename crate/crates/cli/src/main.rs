//! Command-line front end: dataset synthesis and ingestion, channel
//! profiling, cross-validated evaluation, and window sweeps.
//!
//! Every output file starts with `#` header comments carrying the tool
//! version, the seed, and the full flag set, and is reproducible byte for
//! byte from (flags, seed). Exit codes: 0 success, 1 runtime failure,
//! 2 usage error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use creepwave::channel::{around_body_profile, BodyGeometry, ChannelParams};
use creepwave::classifiers::io::save_model;
use creepwave::classifiers::{ClassifierKind, SvmParams};
use creepwave::dwt::BoundaryMode;
use creepwave::evaluation::{
    cross_validate, render_report, render_summary_table, render_sweep, train_fold, window_sweep,
    EvaluationReport, PipelineConfig,
};
use creepwave::features::{build_feature_matrix, BandAggregation, FeatureConfig};
use creepwave::signal::io::{ingest_trace, read_dataset, write_dataset};
use creepwave::signal::{
    default_subjects, generator_id, synth_dataset_with, ActivityLabel, Dataset, Sex, SignalSource,
    SubjectSpec, SynthConfig,
};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

/// Directory used when an output flag is omitted.
const OUT_DIR_ENV: &str = "CREEPWAVE_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "creepwave",
    version,
    about = "Around-thigh creeping-wave channel simulation and activity classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the around-body path-gain profile as a delimited table.
    Profile(ProfileArgs),
    /// Generate a labeled synthetic dataset directory.
    Synth(SynthArgs),
    /// Add an externally recorded trace file to a dataset directory.
    Ingest(IngestArgs),
    /// Cross-validate classifiers on a dataset and write reports.
    Evaluate(EvaluateArgs),
    /// Evaluate accuracy over a grid of window lengths, with and without
    /// the wavelet stage.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct ProfileArgs {
    /// Body circumference in cm.
    #[arg(long)]
    circumference_cm: f64,
    /// Carrier frequency in MHz.
    #[arg(long)]
    freq_mhz: f64,
    /// Arc sampling step in cm.
    #[arg(long, default_value_t = 1.0)]
    step_cm: f64,
    /// Calibration constant multiplying f^(1/3)/r^(2/3).
    #[arg(long)]
    decay_scale: Option<f64>,
    /// Single-wave magnitude in dB extrapolated to zero arc distance.
    #[arg(long)]
    launch_gain_db: Option<f64>,
    /// Surface wavenumber as a multiple of the free-space wavenumber.
    #[arg(long)]
    slowness: Option<f64>,
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Output dataset directory (or $CREEPWAVE_OUT_DIR).
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// How many of the six roster subjects to include.
    #[arg(long, default_value_t = 6)]
    subjects: usize,
    /// Trials per subject and activity.
    #[arg(long, default_value_t = 10)]
    trials: u32,
    #[arg(long, default_value_t = 20.0)]
    duration_s: f64,
    #[arg(long, default_value_t = 50.0)]
    sample_rate_hz: f64,
    /// Gaussian noise sigma on the dB magnitude.
    #[arg(long, default_value_t = 2.5)]
    noise_db: f64,
    /// Gaussian noise sigma on the phase, in radians.
    #[arg(long, default_value_t = 0.12)]
    noise_phase_rad: f64,
    /// Per-cycle period jitter fraction.
    #[arg(long, default_value_t = 0.10)]
    jitter: f64,
    #[arg(long, default_value_t = 2450.0)]
    freq_mhz: f64,
}

#[derive(Args)]
struct IngestArgs {
    /// Trace file in the time_s,mag_db,phase_rad format.
    #[arg(long)]
    file: PathBuf,
    /// Dataset directory to create or extend.
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[arg(long)]
    subject_id: String,
    #[arg(long)]
    height_cm: f64,
    #[arg(long)]
    weight_kg: f64,
    #[arg(long)]
    circumference_cm: f64,
    #[arg(long)]
    age: u32,
    #[arg(long, value_enum)]
    sex: SexArg,
    /// Activity name (forward_swing, full_swing, backward_swing,
    /// lifting_knee, sideways_swing, squatting).
    #[arg(long)]
    activity: String,
    #[arg(long, default_value_t = 0)]
    trial: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum SexArg {
    Male,
    Female,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassifierArg {
    Svm,
    Knn,
    Gnb,
    Tree,
    Dtw,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundaryArg {
    Periodic,
    Symmetric,
}

/// Flags shared by evaluate and sweep.
#[derive(Args)]
struct PipelineArgs {
    /// Dataset directory produced by synth or ingest.
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long, default_value_t = 4.0)]
    window_s: f64,
    #[arg(long, default_value_t = 2)]
    windows_per_recording: usize,
    /// Skip the wavelet stage and compute features on raw windows.
    #[arg(long)]
    no_dwt: bool,
    #[arg(long, default_value = "dmey")]
    wavelet: String,
    #[arg(long, default_value_t = 5)]
    levels: usize,
    #[arg(long, value_enum, default_value_t = BoundaryArg::Periodic)]
    boundary: BoundaryArg,
    /// Six statistics per band instead of over the pooled bands.
    #[arg(long)]
    per_band: bool,
    /// Feed the phase series to the pipeline instead of the magnitude.
    #[arg(long)]
    use_phase: bool,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fit the min-max normalization on the full matrix before splitting
    /// instead of per training fold (leaks test-fold ranges into scaling).
    #[arg(long)]
    global_normalization: bool,
    /// Keep each subject's rows within one fold.
    #[arg(long)]
    group_by_subject: bool,
    #[arg(long, default_value_t = 10)]
    knn_k: usize,
    #[arg(long, default_value_t = 1.0)]
    svm_c: f64,
    #[arg(long, default_value_t = 3)]
    kernel_degree: u32,
    #[arg(long, default_value_t = 1.0)]
    kernel_offset: f64,
    #[arg(long, default_value_t = 20)]
    tree_splits: usize,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    pipeline: PipelineArgs,
    #[arg(long, value_enum, default_value_t = ClassifierArg::All)]
    classifier: ClassifierArg,
    /// Directory for report files (or $CREEPWAVE_OUT_DIR).
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Also train each classifier on the full dataset and save the model
    /// files here.
    #[arg(long)]
    save_models: Option<PathBuf>,
    /// Export the globally normalized feature matrix (header row plus a
    /// label column) to this file.
    #[arg(long)]
    save_features: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Comma-separated window lengths in seconds.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6,7,8")]
    windows: Vec<f64>,
    #[arg(long, value_enum, default_value_t = ClassifierArg::Svm)]
    classifier: ClassifierArg,
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let flags: Vec<String> = std::env::args().skip(1).collect();
    let result = match cli.command {
        Command::Profile(args) => cmd_profile(args, &flags),
        Command::Synth(args) => cmd_synth(args, &flags),
        Command::Ingest(args) => cmd_ingest(args, &flags),
        Command::Evaluate(args) => cmd_evaluate(args, &flags),
        Command::Sweep(args) => cmd_sweep(args, &flags),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}

fn header(flags: &[String], seed: Option<u64>) -> Vec<String> {
    let mut out = vec![format!("generated by {}", generator_id())];
    if let Some(seed) = seed {
        out.push(format!("seed: {seed}"));
    }
    out.push(format!("flags: {}", flags.join(" ")));
    out
}

fn resolve_out(flag: Option<PathBuf>, what: &str) -> Result<PathBuf, String> {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .ok_or_else(|| format!("no output {what}: pass --out or set ${OUT_DIR_ENV}"))
}

fn emit(path: Option<PathBuf>, text: &str) -> Result<(), String> {
    match path {
        Some(path) => std::fs::write(&path, text)
            .map_err(|e| format!("writing {}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_profile(args: ProfileArgs, flags: &[String]) -> Result<(), String> {
    let geometry = BodyGeometry::new(args.circumference_cm).map_err(|e| e.to_string())?;
    if !geometry.is_plausible() {
        eprintln!(
            "warning: circumference {} cm is outside the plausible 30-80 cm range",
            args.circumference_cm
        );
    }
    let mut params = ChannelParams::new(args.freq_mhz).map_err(|e| e.to_string())?;
    if let Some(scale) = args.decay_scale {
        params = params.with_decay_scale(scale).map_err(|e| e.to_string())?;
    }
    if let Some(gain) = args.launch_gain_db {
        params = params.with_launch_gain_db(gain);
    }
    if let Some(slowness) = args.slowness {
        params = params.with_surface_slowness(slowness);
    }
    let profile =
        around_body_profile(&geometry, &params, args.step_cm).map_err(|e| e.to_string())?;
    let mut text = String::new();
    for line in header(flags, None) {
        let _ = writeln!(text, "# {line}");
    }
    let _ = writeln!(text, "arc_cm,angle_deg,mag_db,phase_rad");
    for s in &profile {
        let _ = writeln!(text, "{},{},{},{}", s.arc_cm, s.angle_deg, s.magnitude_db, s.phase_rad);
    }
    emit(args.out, &text)
}

fn cmd_synth(args: SynthArgs, flags: &[String]) -> Result<(), String> {
    let out = resolve_out(args.out, "directory")?;
    let roster = default_subjects();
    if args.subjects == 0 || args.subjects > roster.len() {
        return Err(format!(
            "--subjects must be between 1 and {}, got {}",
            roster.len(),
            args.subjects
        ));
    }
    let mut config = SynthConfig::default();
    config.duration_s = args.duration_s;
    config.sample_rate_hz = args.sample_rate_hz;
    config.noise_mag_db = args.noise_db;
    config.noise_phase_rad = args.noise_phase_rad;
    config.period_jitter = args.jitter;
    config.channel = ChannelParams::new(args.freq_mhz).map_err(|e| e.to_string())?;
    let dataset = synth_dataset_with(args.seed, &config, &roster[..args.subjects], args.trials)
        .map_err(|e| e.to_string())?;
    let manifest = write_dataset(&out, &dataset, &header(flags, Some(args.seed)))
        .map_err(|e| e.to_string())?;
    println!(
        "wrote {} recordings and {}",
        dataset.recordings.len(),
        manifest.display()
    );
    Ok(())
}

fn cmd_ingest(args: IngestArgs, flags: &[String]) -> Result<(), String> {
    let out = resolve_out(args.out, "directory")?;
    let subject = SubjectSpec::new(
        &args.subject_id,
        args.height_cm,
        args.weight_kg,
        args.circumference_cm,
        args.age,
        match args.sex {
            SexArg::Male => Sex::Male,
            SexArg::Female => Sex::Female,
        },
    )
    .map_err(|e| e.to_string())?;
    let activity = ActivityLabel::parse(&args.activity).map_err(|e| e.to_string())?;
    let recording =
        ingest_trace(&args.file, subject, activity, args.trial).map_err(|e| e.to_string())?;

    let mut dataset = if out.join("manifest.txt").exists() {
        read_dataset(&out).map_err(|e| e.to_string())?
    } else {
        Dataset {
            recordings: Vec::new(),
            manifest: creepwave::signal::io::ingested_manifest(
                recording.sample_rate_hz,
                recording.duration_s,
            ),
        }
    };
    dataset.recordings.push(recording);
    write_dataset(&out, &dataset, &header(flags, None)).map_err(|e| e.to_string())?;
    println!("dataset now holds {} recordings", dataset.recordings.len());
    Ok(())
}

fn pipeline_config(args: &PipelineArgs, classifier: ClassifierKind) -> PipelineConfig {
    PipelineConfig {
        classifier,
        window_s: args.window_s,
        windows_per_recording: args.windows_per_recording,
        features: FeatureConfig {
            use_dwt: !args.no_dwt,
            wavelet: args.wavelet.clone(),
            levels: args.levels,
            boundary: match args.boundary {
                BoundaryArg::Periodic => BoundaryMode::Periodic,
                BoundaryArg::Symmetric => BoundaryMode::Symmetric,
            },
            aggregation: if args.per_band {
                BandAggregation::PerBand
            } else {
                BandAggregation::Pooled
            },
            source: if args.use_phase { SignalSource::Phase } else { SignalSource::Magnitude },
        },
        folds: args.folds,
        seed: args.seed,
        svm: SvmParams {
            c: args.svm_c,
            kernel_degree: args.kernel_degree,
            kernel_offset: args.kernel_offset,
            ..SvmParams::default()
        },
        knn_k: args.knn_k,
        tree_max_splits: args.tree_splits,
        global_normalization: args.global_normalization,
        group_by_subject: args.group_by_subject,
    }
}

fn selected_kinds(arg: ClassifierArg) -> Vec<ClassifierKind> {
    match arg {
        ClassifierArg::Svm => vec![ClassifierKind::Svm],
        ClassifierArg::Knn => vec![ClassifierKind::Knn],
        ClassifierArg::Gnb => vec![ClassifierKind::Gnb],
        ClassifierArg::Tree => vec![ClassifierKind::Tree],
        ClassifierArg::Dtw => vec![ClassifierKind::Dtw],
        ClassifierArg::All => ClassifierKind::ALL.to_vec(),
    }
}

fn cmd_evaluate(args: EvaluateArgs, flags: &[String]) -> Result<(), String> {
    let out = resolve_out(args.out, "directory")?;
    std::fs::create_dir_all(&out).map_err(|e| format!("creating {}: {e}", out.display()))?;
    let dataset = read_dataset(&args.pipeline.dataset).map_err(|e| e.to_string())?;
    let comments = header(flags, Some(args.pipeline.seed));

    if let Some(path) = &args.save_features {
        let features = pipeline_config(&args.pipeline, ClassifierKind::Svm).features;
        let mut matrix = build_feature_matrix(
            &dataset,
            args.pipeline.window_s,
            args.pipeline.windows_per_recording,
            &features,
        )
        .map_err(|e| e.to_string())?;
        let stats = matrix.normalize_global();
        for column in stats.degenerate_columns() {
            eprintln!("warning: feature column {column} is constant; normalized to 0");
        }
        let mut text = String::new();
        for line in &comments {
            let _ = writeln!(text, "# {line}");
        }
        text.push_str(&matrix.render_delimited());
        std::fs::write(path, text).map_err(|e| format!("writing {}: {e}", path.display()))?;
    }

    let mut reports: Vec<EvaluationReport> = Vec::new();
    for kind in selected_kinds(args.classifier) {
        let config = pipeline_config(&args.pipeline, kind);
        let report = cross_validate(&dataset, &config).map_err(|e| e.to_string())?;
        let path = out.join(format!("report_{kind}.txt"));
        std::fs::write(&path, render_report(&report, &comments))
            .map_err(|e| format!("writing {}: {e}", path.display()))?;
        if let Some(model_dir) = &args.save_models {
            std::fs::create_dir_all(model_dir)
                .map_err(|e| format!("creating {}: {e}", model_dir.display()))?;
            let matrix = build_feature_matrix(
                &dataset,
                config.window_s,
                config.windows_per_recording,
                &config.features,
            )
            .map_err(|e| e.to_string())?;
            let all_rows: Vec<usize> = (0..matrix.len()).collect();
            let (model, _) = train_fold(&matrix, &all_rows, &config).map_err(|e| e.to_string())?;
            save_model(&model_dir.join(format!("model_{kind}.txt")), &model)
                .map_err(|e| e.to_string())?;
        }
        reports.push(report);
    }
    print!("{}", render_summary_table(&reports));
    Ok(())
}

fn cmd_sweep(args: SweepArgs, flags: &[String]) -> Result<(), String> {
    let dataset = read_dataset(&args.pipeline.dataset).map_err(|e| e.to_string())?;
    let kinds = selected_kinds(args.classifier);
    if kinds.len() != 1 {
        return Err("sweep needs a single classifier, not `all`".to_string());
    }
    let config = pipeline_config(&args.pipeline, kinds[0]);
    let points = window_sweep(&dataset, &args.windows, &config).map_err(|e| e.to_string())?;
    let text = render_sweep(&points, &header(flags, Some(args.pipeline.seed)));
    emit(args.out, &text)
}
