//! Dataset curation pipeline: ingest a timestamped mono-clip manifest,
//! keep single-source events, randomize spatial attributes a fixed number
//! of times per clip, synthesize trajectories and captions, render
//! binaural audio and persist a split dataset with a JSONL index.
//!
//! All randomness derives from per-(record, variant) seeds, so results are
//! byte-identical across runs and independent of execution order.

use crate::caption::{generate_caption, CaptionError, CaptionLexicon, MotionSpec, Side};
use crate::render::{read_wav, render_binaural, write_wav_f32, HrirSet, RenderError};
use crate::spatial::{
    categories_of, linear_trajectory, sample_endpoints, AttributeKind, CategoryTriple,
    EventWindow, SpatialEndpoints, SpatialError,
};
use crate::trajio::{write_trajectory_csv, TrajIoError};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ForgeError {
    #[error("cannot read manifest {path}: {source}")]
    ManifestIo {
        path: String,
        source: std::io::Error,
    },
    #[error("manifest {path}:{line}: {message}")]
    ManifestLine {
        path: String,
        line: usize,
        message: String,
    },
    #[error("duplicate manifest ids: {0}")]
    DuplicateIds(String),
    #[error("cannot create {path}: {source}")]
    OutDir {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    WriteIndex {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Caption(#[from] CaptionError),
}

/// One timestamped source clip from the input manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceRecord {
    pub id: String,
    pub audio: PathBuf,
    pub label: String,
    pub onset_s: f64,
    pub offset_s: f64,
    pub num_events: u32,
}

/// A manifest line skipped in lenient mode.
#[derive(Debug, Clone, Serialize)]
pub struct ManifestIssue {
    pub line: usize,
    pub message: String,
}

/// Reads a JSONL manifest. In strict mode any malformed line is fatal;
/// otherwise malformed lines are skipped and reported with line numbers.
/// Duplicate ids are always fatal. Relative `audio` paths are resolved
/// against the manifest's directory.
pub fn load_manifest(
    path: &Path,
    strict: bool,
) -> Result<(Vec<SourceRecord>, Vec<ManifestIssue>), ForgeError> {
    let display = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| ForgeError::ManifestIo {
        path: display.clone(),
        source,
    })?;
    let mut records = Vec::new();
    let mut issues = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fail = |message: String| ForgeError::ManifestLine {
            path: display.clone(),
            line: line_no,
            message,
        };
        let parsed: Result<SourceRecord, String> = serde_json::from_str(line)
            .map_err(|e| e.to_string())
            .and_then(|r: SourceRecord| {
                if !(r.onset_s >= 0.0 && r.onset_s < r.offset_s) {
                    Err(format!(
                        "need 0 <= onset_s < offset_s, got ({}, {})",
                        r.onset_s, r.offset_s
                    ))
                } else if r.num_events < 1 {
                    Err("num_events must be >= 1".into())
                } else if r.id.is_empty() {
                    Err("empty id".into())
                } else {
                    Ok(r)
                }
            });
        match parsed {
            Ok(mut r) => {
                if r.audio.is_relative() {
                    if let Some(dir) = path.parent() {
                        r.audio = dir.join(&r.audio);
                    }
                }
                records.push(r);
            }
            Err(message) if strict => return Err(fail(message)),
            Err(message) => issues.push(ManifestIssue {
                line: line_no,
                message,
            }),
        }
    }
    let mut seen = BTreeSet::new();
    let dups: Vec<&str> = records
        .iter()
        .filter(|r| !seen.insert(r.id.as_str()))
        .map(|r| r.id.as_str())
        .collect();
    if !dups.is_empty() {
        return Err(ForgeError::DuplicateIds(dups.join(", ")));
    }
    Ok((records, issues))
}

/// Keeps exactly the single-source records, preserving order.
pub fn filter_single_source(records: &[SourceRecord]) -> Vec<SourceRecord> {
    records
        .iter()
        .filter(|r| r.num_events == 1)
        .cloned()
        .collect()
}

/// Uniform independent draw of one category per attribute kind.
pub fn sample_category_triple<R: rand::Rng + ?Sized>(rng: &mut R) -> CategoryTriple {
    let mut pick = |kind: AttributeKind| {
        let cats: Vec<_> = categories_of(kind).collect();
        cats[rng.random_range(0..cats.len())]
    };
    CategoryTriple::new(
        pick(AttributeKind::Azimuth),
        pick(AttributeKind::Elevation),
        pick(AttributeKind::Distance),
    )
    .expect("kinds picked per slot")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

/// Start/end category triples of one forged sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryPair {
    pub start: CategoryTriple,
    pub end: CategoryTriple,
}

/// One forged dataset sample, as written to the JSONL index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub id: String,
    pub source_id: String,
    pub variant: usize,
    pub label: String,
    pub onset_s: f64,
    pub offset_s: f64,
    pub categories: CategoryPair,
    pub endpoints: SpatialEndpoints,
    pub caption: String,
    pub omitted: BTreeSet<(Side, AttributeKind)>,
    /// Paths relative to the dataset root.
    pub trajectory: String,
    pub audio: String,
    pub split: Split,
}

#[derive(Debug, Clone, Serialize)]
pub struct ForgeFailure {
    pub source_id: String,
    pub variant: usize,
    pub error: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ForgeSummary {
    pub seed: u64,
    pub variants: usize,
    pub test_frac: f64,
    pub omission_prob: f64,
    pub sources_in: usize,
    pub produced: usize,
    pub train_count: usize,
    pub test_count: usize,
    pub train_sources: usize,
    pub test_sources: usize,
    pub failures: Vec<ForgeFailure>,
}

#[derive(Debug, Clone, Copy)]
pub struct ForgeOptions {
    pub variants: usize,
    pub test_frac: f64,
    pub omission_prob: f64,
    pub seed: u64,
}

impl Default for ForgeOptions {
    fn default() -> Self {
        ForgeOptions {
            variants: 10,
            test_frac: 0.1,
            omission_prob: 0.5,
            seed: 0,
        }
    }
}

/// Independent random stream for one (seed, record, variant) job.
fn job_rng(seed: u64, source_id: &str, variant: usize) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(source_id.as_bytes());
    hasher.update(b"/");
    hasher.update((variant as u64).to_le_bytes());
    ChaCha8Rng::from_seed(hasher.finalize().into())
}

/// Seeded by-clip train/test partition; every variant of a clip shares
/// its split.
fn split_sources(ids: &[&str], test_frac: f64, seed: u64) -> BTreeSet<String> {
    if ids.is_empty() || test_frac <= 0.0 {
        return BTreeSet::new();
    }
    let mut sorted: Vec<&str> = ids.to_vec();
    sorted.sort_unstable();
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(b"split");
    let mut rng = ChaCha8Rng::from_seed(hasher.finalize().into());
    // Fisher-Yates
    for i in (1..sorted.len()).rev() {
        sorted.swap(i, rng.random_range(0..=i));
    }
    let want = ((ids.len() as f64 * test_frac).round() as usize)
        .clamp(1, ids.len().saturating_sub(1).max(1));
    sorted[..want].iter().map(|s| s.to_string()).collect()
}

#[derive(Debug, Error)]
enum JobError {
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error(transparent)]
    Spatial(#[from] SpatialError),
    #[error(transparent)]
    Caption(#[from] CaptionError),
    #[error(transparent)]
    TrajIo(#[from] TrajIoError),
    #[error("event window ({onset_s}s, {offset_s}s) exceeds the {duration_s}s clip")]
    WindowBeyondClip {
        onset_s: f64,
        offset_s: f64,
        duration_s: f64,
    },
}

fn run_job(
    record: &SourceRecord,
    variant: usize,
    hrir_set: &HrirSet,
    lexicon: &CaptionLexicon,
    out_dir: &Path,
    opts: &ForgeOptions,
    split: Split,
) -> Result<DatasetRecord, JobError> {
    let mut rng = job_rng(opts.seed, &record.id, variant);
    let clip = read_wav(&record.audio)?;
    let duration = clip.duration_s();
    if record.offset_s > duration + 1e-9 {
        return Err(JobError::WindowBeyondClip {
            onset_s: record.onset_s,
            offset_s: record.offset_s,
            duration_s: duration,
        });
    }
    let window = EventWindow::new(record.onset_s, record.offset_s.min(duration))?;

    let start = sample_category_triple(&mut rng);
    let end = sample_category_triple(&mut rng);
    let endpoints: SpatialEndpoints = sample_endpoints(&start, &end, &mut rng);
    let traj = linear_trajectory(&endpoints, window, duration)?;
    let base_spec = MotionSpec::new(start, end, BTreeSet::new())?;
    let (caption, spec) = generate_caption(
        &record.label,
        &base_spec,
        lexicon,
        &mut rng,
        opts.omission_prob,
    )?;
    let stereo = render_binaural(&clip, &traj, hrir_set)?;

    let sample_id = format!("{}_v{variant}", record.id);
    let traj_rel = format!("traj/{sample_id}.csv");
    let audio_rel = format!("audio/{sample_id}.wav");
    write_trajectory_csv(&out_dir.join(&traj_rel), &traj)?;
    write_wav_f32(&out_dir.join(&audio_rel), &stereo)?;

    Ok(DatasetRecord {
        id: sample_id,
        source_id: record.id.clone(),
        variant,
        label: record.label.clone(),
        onset_s: record.onset_s,
        offset_s: record.offset_s,
        categories: CategoryPair {
            start: spec.start,
            end: spec.end,
        },
        endpoints,
        caption,
        omitted: spec.omitted,
        trajectory: traj_rel,
        audio: audio_rel,
        split,
    })
}

/// Runs the full curation pipeline over already-filtered single-source
/// records. Render failures are reported in the summary; the pipeline
/// continues past them.
pub fn forge(
    records: &[SourceRecord],
    hrir_set: &HrirSet,
    lexicon: &CaptionLexicon,
    out_dir: &Path,
    opts: &ForgeOptions,
) -> Result<(Vec<DatasetRecord>, ForgeSummary), ForgeError> {
    for sub in ["audio", "traj"] {
        let dir = out_dir.join(sub);
        std::fs::create_dir_all(&dir).map_err(|source| ForgeError::OutDir {
            path: dir.display().to_string(),
            source,
        })?;
    }
    let ids: Vec<&str> = records.iter().map(|r| r.id.as_str()).collect();
    let test_ids = split_sources(&ids, opts.test_frac, opts.seed);

    let jobs: Vec<(&SourceRecord, usize)> = records
        .iter()
        .flat_map(|r| (0..opts.variants).map(move |v| (r, v)))
        .collect();
    let results: Vec<Result<DatasetRecord, ForgeFailure>> = jobs
        .par_iter()
        .map(|&(record, variant)| {
            let split = if test_ids.contains(&record.id) {
                Split::Test
            } else {
                Split::Train
            };
            run_job(record, variant, hrir_set, lexicon, out_dir, opts, split).map_err(|e| {
                ForgeFailure {
                    source_id: record.id.clone(),
                    variant,
                    error: e.to_string(),
                }
            })
        })
        .collect();

    let mut produced = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(rec) => produced.push(rec),
            Err(f) => failures.push(f),
        }
    }
    produced.sort_by(|a, b| (&a.source_id, a.variant).cmp(&(&b.source_id, b.variant)));
    failures.sort_by(|a, b| (&a.source_id, a.variant).cmp(&(&b.source_id, b.variant)));

    let index_path = out_dir.join("index.jsonl");
    let mut index = String::new();
    for rec in &produced {
        index.push_str(&serde_json::to_string(rec).expect("dataset records serialize"));
        index.push('\n');
    }
    std::fs::write(&index_path, index).map_err(|source| ForgeError::WriteIndex {
        path: index_path.display().to_string(),
        source,
    })?;

    let train_count = produced.iter().filter(|r| r.split == Split::Train).count();
    let summary = ForgeSummary {
        seed: opts.seed,
        variants: opts.variants,
        test_frac: opts.test_frac,
        omission_prob: opts.omission_prob,
        sources_in: records.len(),
        produced: produced.len(),
        train_count,
        test_count: produced.len() - train_count,
        train_sources: records.len() - test_ids.len().min(records.len()),
        test_sources: test_ids.len(),
        failures,
    };
    let summary_path = out_dir.join("summary.json");
    std::fs::write(
        &summary_path,
        serde_json::to_string_pretty(&summary).expect("summary serializes"),
    )
    .map_err(|source| ForgeError::WriteIndex {
        path: summary_path.display().to_string(),
        source,
    })?;
    Ok((produced, summary))
}
