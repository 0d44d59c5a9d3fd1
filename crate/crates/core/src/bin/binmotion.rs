//! Batch CLI for the binmotion pipeline. JSON results go to stdout,
//! diagnostics to stderr. Exit codes: 0 success, 1 config/IO error,
//! 2 partial failure (some forge jobs failed but the run completed).

use binmotion::caption::{
    generate_caption, parse_caption, CaptionLexicon, MotionSpec, Side,
};
use binmotion::forge::{filter_single_source, forge, load_manifest, ForgeOptions};
use binmotion::metrics::{
    activity_mask, evaluate_trajectories, olr, start_end_mae, LossWeights, RaMaeMode,
};
use binmotion::render::{load_hrir_set, read_wav, render_binaural, write_wav_f32};
use binmotion::spatial::{sample_count, AttributeKind, CategoryTriple, EventWindow};
use binmotion::trajio::read_trajectory_csv;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "binmotion",
    version,
    about = "Spatialize mono clips along text-described trajectories and evaluate predictions"
)]
struct Cli {
    /// Seed for all randomness; runs are reproducible given the same seed
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// TOML or JSON file with defaults for any flag (flags win)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for dataset generation [default: available parallelism]
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Treat malformed manifest lines as fatal instead of skipping them
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the dataset pipeline: manifest -> rendered samples + index
    GenDataset(GenDatasetArgs),
    /// Render one mono WAV along one trajectory CSV to stereo
    Spatialize(SpatializeArgs),
    /// Score predicted trajectory CSVs against ground-truth CSVs
    EvalTraj(EvalTrajArgs),
    /// Score predicted event windows against ground-truth windows
    EvalTemporal(EvalTemporalArgs),
    /// Recover the motion attributes encoded in a caption
    ParseCaption(ParseCaptionArgs),
    /// Generate a caption for a label and category endpoints
    MakeCaption(MakeCaptionArgs),
}

#[derive(Args)]
struct GenDatasetArgs {
    /// JSONL manifest of timestamped mono clips
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// HRIR set manifest (JSON)
    #[arg(long)]
    hrir: Option<PathBuf>,
    /// Caption lexicon JSON [default: bundled lexicon]
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Output dataset directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Spatial variants rendered per source clip [default: 10]
    #[arg(long)]
    variants: Option<usize>,
    /// Fraction of source clips held out for test [default: 0.1]
    #[arg(long)]
    test_frac: Option<f64>,
    /// Probability of dropping each omittable caption attribute [default: 0.5]
    #[arg(long)]
    omission_prob: Option<f64>,
}

#[derive(Args)]
struct SpatializeArgs {
    /// Input mono WAV
    #[arg(long)]
    audio: PathBuf,
    /// Trajectory CSV (t_s,azimuth_deg,elevation_deg,distance_m,mask)
    #[arg(long)]
    traj: PathBuf,
    /// HRIR set manifest (JSON)
    #[arg(long)]
    hrir: PathBuf,
    /// Output stereo WAV
    #[arg(long)]
    out: PathBuf,
}

#[derive(Copy, Clone, ValueEnum)]
enum ModeArg {
    /// Error = prediction's distance to the nearest valid range
    ClampPred,
    /// Error = min over ranges of |pred - clamp(gt, range)|
    ClampGt,
}

impl From<ModeArg> for RaMaeMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::ClampPred => RaMaeMode::ClampPred,
            ModeArg::ClampGt => RaMaeMode::ClampGt,
        }
    }
}

#[derive(Args)]
struct EvalTrajArgs {
    /// Predicted trajectory CSV (repeat; paired with --gt by position)
    #[arg(long, required = true)]
    pred: Vec<PathBuf>,
    /// Ground-truth trajectory CSV (repeat)
    #[arg(long, required = true)]
    gt: Vec<PathBuf>,
    /// Azimuth loss weight [default: 1]
    #[arg(long)]
    w_az: Option<f64>,
    /// Elevation loss weight [default: 1]
    #[arg(long)]
    w_el: Option<f64>,
    /// Distance loss weight [default: 1]
    #[arg(long)]
    w_ds: Option<f64>,
    /// Weight of the temporal term in the total loss [default: 1]
    #[arg(long)]
    lambda_time: Option<f64>,
    /// Range-aware MAE interpretation [default: clamp-pred]
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
}

#[derive(Args)]
struct EvalTemporalArgs {
    /// Predicted window as "t0,t1" in seconds (repeat)
    #[arg(long, required = true)]
    pred: Vec<String>,
    /// Ground-truth window as "t0,t1" in seconds (repeat)
    #[arg(long, required = true)]
    gt: Vec<String>,
    /// Clip duration in seconds (sets the mask length)
    #[arg(long)]
    duration: f64,
    /// Mask rate in Hz
    #[arg(long, default_value_t = 20.0)]
    rate: f64,
}

#[derive(Args)]
struct ParseCaptionArgs {
    /// Caption text
    caption: String,
    /// Caption lexicon JSON [default: bundled lexicon]
    #[arg(long)]
    lexicon: Option<PathBuf>,
}

#[derive(Args)]
struct MakeCaptionArgs {
    /// Event label, e.g. "dog barking"
    #[arg(long)]
    label: String,
    /// Start categories as "azimuth,elevation,distance" names
    #[arg(long)]
    start: String,
    /// End categories as "azimuth,elevation,distance" names
    #[arg(long)]
    end: String,
    /// Probability of dropping each omittable attribute [default: 0]
    #[arg(long)]
    omission_prob: Option<f64>,
    /// Caption lexicon JSON [default: bundled lexicon]
    #[arg(long)]
    lexicon: Option<PathBuf>,
}

/// File-supplied defaults; any CLI flag overrides the matching field.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Config {
    manifest: Option<PathBuf>,
    hrir: Option<PathBuf>,
    lexicon: Option<PathBuf>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    jobs: Option<usize>,
    strict: Option<bool>,
    variants: Option<usize>,
    test_frac: Option<f64>,
    omission_prob: Option<f64>,
    w_az: Option<f64>,
    w_el: Option<f64>,
    w_ds: Option<f64>,
    lambda_time: Option<f64>,
    mode: Option<String>,
}

fn load_config(path: &Path) -> Result<Config, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("--config: cannot read {}: {e}", path.display()))?;
    let is_json = path.extension().is_some_and(|e| e == "json");
    let parsed = if is_json {
        serde_json::from_str(&text).map_err(|e| e.to_string())
    } else {
        toml::from_str(&text).map_err(|e| e.to_string())
    };
    parsed.map_err(|e| format!("--config: {}: {e}", path.display()))
}

fn load_lexicon(path: Option<&Path>) -> Result<CaptionLexicon, String> {
    match path {
        Some(p) => CaptionLexicon::load(p).map_err(|e| format!("--lexicon: {e}")),
        None => Ok(CaptionLexicon::default_lexicon()),
    }
}

fn parse_mode(cfg: &Config) -> Result<Option<ModeArg>, String> {
    match cfg.mode.as_deref() {
        None => Ok(None),
        Some("clamp-pred") | Some("clamp_pred") => Ok(Some(ModeArg::ClampPred)),
        Some("clamp-gt") | Some("clamp_gt") => Ok(Some(ModeArg::ClampGt)),
        Some(other) => Err(format!("config `mode`: unknown value `{other}`")),
    }
}

fn parse_window(s: &str, flag: &str) -> Result<EventWindow, String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("{flag}: expected \"t0,t1\", got `{s}`"))?;
    let t0: f64 = a.trim().parse().map_err(|e| format!("{flag}: `{a}`: {e}"))?;
    let t1: f64 = b.trim().parse().map_err(|e| format!("{flag}: `{b}`: {e}"))?;
    EventWindow::new(t0, t1).map_err(|e| format!("{flag}: {e}"))
}

fn parse_triple(s: &str, flag: &str) -> Result<CategoryTriple, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!(
            "{flag}: expected \"azimuth,elevation,distance\", got `{s}`"
        ));
    }
    CategoryTriple::from_names(parts[0], parts[1], parts[2]).map_err(|e| format!("{flag}: {e}"))
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    let cfg = match &cli.config {
        Some(p) => load_config(p)?,
        None => Config::default(),
    };
    let seed = if cli.seed != 0 { cli.seed } else { cfg.seed.unwrap_or(cli.seed) };
    let strict = cli.strict || cfg.strict.unwrap_or(false);
    if let Some(jobs) = cli.jobs.or(cfg.jobs) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| format!("--jobs: {e}"))?;
    }

    match cli.command {
        Command::GenDataset(a) => {
            let need = |v: Option<PathBuf>, flag: &str| {
                v.ok_or_else(|| format!("{flag} is required (flag or config file)"))
            };
            let manifest = need(a.manifest.or(cfg.manifest), "--manifest")?;
            let hrir_path = need(a.hrir.or(cfg.hrir), "--hrir")?;
            let out = need(a.out.or(cfg.out), "--out")?;
            let lexicon = load_lexicon(a.lexicon.or(cfg.lexicon).as_deref())?;
            let hrir = load_hrir_set(&hrir_path).map_err(|e| format!("--hrir: {e}"))?;
            let opts = ForgeOptions {
                variants: a.variants.or(cfg.variants).unwrap_or(10),
                test_frac: a.test_frac.or(cfg.test_frac).unwrap_or(0.1),
                omission_prob: a.omission_prob.or(cfg.omission_prob).unwrap_or(0.5),
                seed,
            };
            let (records, issues) =
                load_manifest(&manifest, strict).map_err(|e| format!("--manifest: {e}"))?;
            for issue in &issues {
                eprintln!(
                    "warning: {}:{}: skipped: {}",
                    manifest.display(),
                    issue.line,
                    issue.message
                );
            }
            let singles = filter_single_source(&records);
            eprintln!(
                "{} manifest records, {} single-source, {} variants each",
                records.len(),
                singles.len(),
                opts.variants
            );
            let (_, summary) = forge(&singles, &hrir, &lexicon, &out, &opts)
                .map_err(|e| e.to_string())?;
            for f in &summary.failures {
                eprintln!("error: {} variant {}: {}", f.source_id, f.variant, f.error);
            }
            println!("{}", serde_json::to_string_pretty(&summary).unwrap());
            Ok(if summary.failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        Command::Spatialize(a) => {
            let mono = read_wav(&a.audio).map_err(|e| format!("--audio: {e}"))?;
            let traj = read_trajectory_csv(&a.traj).map_err(|e| format!("--traj: {e}"))?;
            let set = load_hrir_set(&a.hrir).map_err(|e| format!("--hrir: {e}"))?;
            let stereo = render_binaural(&mono, &traj, &set).map_err(|e| e.to_string())?;
            write_wav_f32(&a.out, &stereo).map_err(|e| format!("--out: {e}"))?;
            let peak = stereo
                .channels
                .iter()
                .flatten()
                .fold(0.0f64, |m, &s| m.max(s.abs()));
            println!(
                "{}",
                serde_json::json!({
                    "out": a.out,
                    "duration_s": stereo.duration_s(),
                    "peak": peak,
                })
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::EvalTraj(a) => {
            if a.pred.len() != a.gt.len() {
                return Err(format!(
                    "--pred and --gt must pair up: got {} vs {}",
                    a.pred.len(),
                    a.gt.len()
                ));
            }
            let mut pairs = Vec::new();
            for (p, g) in a.pred.iter().zip(&a.gt) {
                let pred = read_trajectory_csv(p).map_err(|e| format!("{}: {e}", p.display()))?;
                let gt = read_trajectory_csv(g).map_err(|e| format!("{}: {e}", g.display()))?;
                if pred.len() != gt.len() {
                    return Err(format!(
                        "{} vs {}: length mismatch ({} vs {})",
                        p.display(),
                        g.display(),
                        pred.len(),
                        gt.len()
                    ));
                }
                pairs.push((pred, gt));
            }
            let w = LossWeights {
                w_az: a.w_az.or(cfg.w_az).unwrap_or(1.0),
                w_el: a.w_el.or(cfg.w_el).unwrap_or(1.0),
                w_ds: a.w_ds.or(cfg.w_ds).unwrap_or(1.0),
                lambda_time: a.lambda_time.or(cfg.lambda_time).unwrap_or(1.0),
            };
            let mode = a.mode.or(parse_mode(&cfg)?).unwrap_or(ModeArg::ClampPred);
            let report =
                evaluate_trajectories(&pairs, &w, mode.into()).map_err(|e| e.to_string())?;
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            Ok(ExitCode::SUCCESS)
        }
        Command::EvalTemporal(a) => {
            if a.pred.len() != a.gt.len() {
                return Err(format!(
                    "--pred and --gt must pair up: got {} vs {}",
                    a.pred.len(),
                    a.gt.len()
                ));
            }
            let preds: Vec<EventWindow> = a
                .pred
                .iter()
                .map(|s| parse_window(s, "--pred"))
                .collect::<Result<_, _>>()?;
            let gts: Vec<EventWindow> = a
                .gt
                .iter()
                .map(|s| parse_window(s, "--gt"))
                .collect::<Result<_, _>>()?;
            let (start_mae, end_mae) = start_end_mae(&preds, &gts).map_err(|e| e.to_string())?;
            let length = sample_count(a.duration, a.rate);
            let mut olr_sum = 0.0;
            for (p, g) in preds.iter().zip(&gts) {
                let pm = activity_mask(*p, length, a.rate);
                let gm = activity_mask(*g, length, a.rate);
                olr_sum += olr(&pm, &gm).map_err(|e| e.to_string())?;
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&serde_json::json!({
                    "start_mae": start_mae,
                    "end_mae": end_mae,
                    "olr": olr_sum / preds.len() as f64,
                }))
                .unwrap()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::ParseCaption(a) => {
            let lexicon = load_lexicon(a.lexicon.or(cfg.lexicon).as_deref())?;
            let spec = parse_caption(&a.caption, &lexicon);
            println!("{}", serde_json::to_string_pretty(&spec).unwrap());
            Ok(ExitCode::SUCCESS)
        }
        Command::MakeCaption(a) => {
            let lexicon = load_lexicon(a.lexicon.or(cfg.lexicon).as_deref())?;
            let start = parse_triple(&a.start, "--start")?;
            let end = parse_triple(&a.end, "--end")?;
            let spec = MotionSpec::new(start, end, BTreeSet::<(Side, AttributeKind)>::new())
                .map_err(|e| e.to_string())?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let prob = a.omission_prob.or(cfg.omission_prob).unwrap_or(0.0);
            let (caption, _) = generate_caption(&a.label, &spec, &lexicon, &mut rng, prob)
                .map_err(|e| e.to_string())?;
            println!("{caption}");
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
