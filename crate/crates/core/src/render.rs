//! Object-based binaural spatializer.
//!
//! The renderer splits the mono input into hops aligned with the 20 Hz
//! trajectory frames, convolves each hop with the nearest-direction HRIR
//! pair scaled by an inverse-distance gain, and blends consecutive frames
//! with a linear crossfade whose two ramps sum to one at every sample.
//! Convolution tails are overlap-added and the output is truncated to the
//! input length so timestamps stay aligned.

use crate::spatial::{circ_delta_deg, wrap_deg, Trajectory, TRAJ_RATE_HZ};
use serde::Deserialize;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Wav { path: String, source: hound::Error },
    #[error("cannot write {path}: {source}")]
    WavWrite { path: String, source: hound::Error },
    #[error("malformed HRIR manifest {path}: {source}")]
    Manifest {
        path: String,
        source: serde_json::Error,
    },
    #[error("HRIR manifest {0} lists no impulse responses")]
    EmptyManifest(String),
    #[error("{path}: expected a stereo impulse response, got {channels} channel(s)")]
    IrChannels { path: String, channels: u16 },
    #[error("{path}: sample rate {got} Hz does not match the set rate {expected} Hz")]
    IrRate { path: String, got: u32, expected: u32 },
    #[error("{path}: IR length {got} does not match the set length {expected}")]
    IrLength {
        path: String,
        got: usize,
        expected: usize,
    },
    #[error("duplicate HRIR direction ({azimuth_deg}°, {elevation_deg}°) at {path}")]
    DuplicateDirection {
        azimuth_deg: f64,
        elevation_deg: f64,
        path: String,
    },
    #[error("{path}: impulse response contains a non-finite sample")]
    NonFiniteIr { path: String },
    #[error("renderer needs mono input, got {0} channels")]
    NotMono(usize),
    #[error("sample rate mismatch: audio {audio} Hz vs HRIR set {hrir} Hz")]
    SampleRateMismatch { audio: u32, hrir: u32 },
    #[error("sample rate {0} Hz is not divisible by the {TRAJ_RATE_HZ} Hz frame rate")]
    UnalignedSampleRate(u32),
    #[error(
        "trajectory covers {traj_s}s but the audio is {audio_s}s (tolerance one frame)"
    )]
    DurationMismatch { traj_s: f64, audio_s: f64 },
    #[error("audio clip is empty")]
    EmptyAudio,
    #[error("distance must be a positive finite length, got {0} m")]
    InvalidDistance(f64),
    #[error("unsupported WAV sample format in {path}: {bits}-bit {format:?}")]
    UnsupportedFormat {
        path: String,
        bits: u16,
        format: hound::SampleFormat,
    },
}

/// In-memory PCM audio, one `Vec<f64>` per channel.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    pub sample_rate_hz: u32,
    pub channels: Vec<Vec<f64>>,
}

impl AudioClip {
    pub fn len(&self) -> usize {
        self.channels.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn duration_s(&self) -> f64 {
        self.len() as f64 / self.sample_rate_hz as f64
    }
}

/// One measured impulse-response pair for a single direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Hrir {
    pub azimuth_deg: f64,
    pub elevation_deg: f64,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

/// A direction grid of impulse responses sharing one rate and length.
#[derive(Debug, Clone, PartialEq)]
pub struct HrirSet {
    pub sample_rate_hz: u32,
    pub irs: Vec<Hrir>,
}

#[derive(Deserialize)]
struct HrirManifest {
    sample_rate_hz: u32,
    irs: Vec<HrirManifestEntry>,
}

#[derive(Deserialize)]
struct HrirManifestEntry {
    azimuth_deg: f64,
    elevation_deg: f64,
    file: PathBuf,
}

/// Reads a mono or stereo PCM WAV (16/24/32-bit int or 32-bit float) into
/// normalized f64 samples.
pub fn read_wav(path: &Path) -> Result<AudioClip, RenderError> {
    let display = path.display().to_string();
    let mut reader = hound::WavReader::open(path).map_err(|source| RenderError::Wav {
        path: display.clone(),
        source,
    })?;
    let spec = reader.spec();
    let n_channels = spec.channels as usize;
    let mut channels = vec![Vec::new(); n_channels];
    let mut push_all = |samples: Vec<f64>| {
        for (i, s) in samples.into_iter().enumerate() {
            channels[i % n_channels].push(s);
        }
    };
    match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Float, 32) => {
            let samples: Result<Vec<f32>, _> = reader.samples::<f32>().collect();
            push_all(
                samples
                    .map_err(|source| RenderError::Wav {
                        path: display.clone(),
                        source,
                    })?
                    .into_iter()
                    .map(f64::from)
                    .collect(),
            );
        }
        (hound::SampleFormat::Int, bits @ (16 | 24 | 32)) => {
            let scale = (1i64 << (bits - 1)) as f64;
            let samples: Result<Vec<i32>, _> = reader.samples::<i32>().collect();
            push_all(
                samples
                    .map_err(|source| RenderError::Wav {
                        path: display.clone(),
                        source,
                    })?
                    .into_iter()
                    .map(|s| s as f64 / scale)
                    .collect(),
            );
        }
        (format, bits) => {
            return Err(RenderError::UnsupportedFormat {
                path: display,
                bits,
                format,
            })
        }
    }
    if channels.iter().any(Vec::is_empty) {
        return Err(RenderError::EmptyAudio);
    }
    Ok(AudioClip {
        sample_rate_hz: spec.sample_rate,
        channels,
    })
}

/// Writes a clip as 32-bit float WAV (bit-exact float samples).
pub fn write_wav_f32(path: &Path, clip: &AudioClip) -> Result<(), RenderError> {
    let display = path.display().to_string();
    let spec = hound::WavSpec {
        channels: clip.channels.len() as u16,
        sample_rate: clip.sample_rate_hz,
        bits_per_sample: 32,
        sample_format: hound::SampleFormat::Float,
    };
    let wrap = |source| RenderError::WavWrite {
        path: display.clone(),
        source,
    };
    let mut writer = hound::WavWriter::create(path, spec).map_err(wrap)?;
    for i in 0..clip.len() {
        for ch in &clip.channels {
            writer.write_sample(ch[i] as f32).map_err(|source| {
                RenderError::WavWrite {
                    path: display.clone(),
                    source,
                }
            })?;
        }
    }
    writer.finalize().map_err(|source| RenderError::WavWrite {
        path: display.clone(),
        source,
    })
}

/// Loads and validates an HRIR set from a JSON manifest. Entries are
/// stereo WAV files (left, right) resolved relative to the manifest.
pub fn load_hrir_set(manifest_path: &Path) -> Result<HrirSet, RenderError> {
    let display = manifest_path.display().to_string();
    let text = std::fs::read_to_string(manifest_path).map_err(|source| RenderError::Io {
        path: display.clone(),
        source,
    })?;
    let manifest: HrirManifest =
        serde_json::from_str(&text).map_err(|source| RenderError::Manifest {
            path: display.clone(),
            source,
        })?;
    if manifest.irs.is_empty() {
        return Err(RenderError::EmptyManifest(display));
    }
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let mut irs: Vec<Hrir> = Vec::with_capacity(manifest.irs.len());
    let mut expected_len: Option<usize> = None;
    for entry in &manifest.irs {
        let ir_path = base.join(&entry.file);
        let ir_display = ir_path.display().to_string();
        let clip = read_wav(&ir_path)?;
        if clip.channels.len() != 2 {
            return Err(RenderError::IrChannels {
                path: ir_display,
                channels: clip.channels.len() as u16,
            });
        }
        if clip.sample_rate_hz != manifest.sample_rate_hz {
            return Err(RenderError::IrRate {
                path: ir_display,
                got: clip.sample_rate_hz,
                expected: manifest.sample_rate_hz,
            });
        }
        let len = clip.len();
        match expected_len {
            None => expected_len = Some(len),
            Some(expected) if expected != len => {
                return Err(RenderError::IrLength {
                    path: ir_display,
                    got: len,
                    expected,
                });
            }
            _ => {}
        }
        if clip
            .channels
            .iter()
            .any(|ch| ch.iter().any(|s| !s.is_finite()))
        {
            return Err(RenderError::NonFiniteIr { path: ir_display });
        }
        let az = wrap_deg(entry.azimuth_deg);
        let el = entry.elevation_deg;
        if irs
            .iter()
            .any(|h| h.azimuth_deg == az && h.elevation_deg == el)
        {
            return Err(RenderError::DuplicateDirection {
                azimuth_deg: az,
                elevation_deg: el,
                path: ir_display,
            });
        }
        irs.push(Hrir {
            azimuth_deg: az,
            elevation_deg: el,
            left: clip.channels[0].clone(),
            right: clip.channels[1].clone(),
        });
    }
    Ok(HrirSet {
        sample_rate_hz: manifest.sample_rate_hz,
        irs,
    })
}

impl HrirSet {
    /// The impulse response closest to (az, el) by great-circle angular
    /// distance. Exact ties go to the smallest (elevation, then wrapped
    /// azimuth).
    pub fn nearest(&self, azimuth_deg: f64, elevation_deg: f64) -> &Hrir {
        let az = wrap_deg(azimuth_deg);
        self.irs
            .iter()
            .min_by(|a, b| {
                let ka = (
                    great_circle_deg(az, elevation_deg, a.azimuth_deg, a.elevation_deg),
                    a.elevation_deg,
                    a.azimuth_deg,
                );
                let kb = (
                    great_circle_deg(az, elevation_deg, b.azimuth_deg, b.elevation_deg),
                    b.elevation_deg,
                    b.azimuth_deg,
                );
                ka.partial_cmp(&kb).expect("finite directions")
            })
            .expect("HrirSet is non-empty")
    }
}

/// Great-circle angle between two directions, degrees in [0, 180].
pub fn great_circle_deg(az1: f64, el1: f64, az2: f64, el2: f64) -> f64 {
    let (e1, e2) = (el1.to_radians(), el2.to_radians());
    // even in the azimuth difference, so mirrored queries see mirrored grids
    let da = circ_delta_deg(az1, az2).to_radians();
    let c = e1.sin() * e2.sin() + e1.cos() * e2.cos() * da.cos();
    c.clamp(-1.0, 1.0).acos().to_degrees()
}

/// +12 dB ceiling for the inverse-distance gain.
pub const MAX_DISTANCE_GAIN: f64 = 3.9810717055349722; // 10^(12/20)

/// Inverse-distance amplitude gain with a 1 m reference, clamped to
/// +12 dB at very close range.
pub fn distance_gain(d_m: f64) -> Result<f64, RenderError> {
    if !d_m.is_finite() || d_m <= 0.0 {
        return Err(RenderError::InvalidDistance(d_m));
    }
    Ok((1.0 / d_m).min(MAX_DISTANCE_GAIN))
}

fn convolve_into(out: &mut [f64], offset: usize, seg: &[f64], ir: &[f64]) {
    for (i, &s) in seg.iter().enumerate() {
        if s == 0.0 {
            continue;
        }
        let base = offset + i;
        let end = ir.len().min(out.len().saturating_sub(base));
        for (j, &h) in ir[..end].iter().enumerate() {
            out[base + j] += s * h;
        }
    }
}

/// Renders a mono clip along a trajectory into stereo binaural audio.
///
/// Hop k (H = rate/20 samples) is filtered twice, once with the frame-k
/// HRIR under a rising ramp and once with the frame-(k-1) HRIR under the
/// complementary falling ramp, so each frame's filter fades in over its
/// own hop and out over the next. The first hop uses its own frame on
/// both sides. Output sample t corresponds to input sample t.
pub fn render_binaural(
    mono: &AudioClip,
    traj: &Trajectory,
    set: &HrirSet,
) -> Result<AudioClip, RenderError> {
    if mono.channels.len() != 1 {
        return Err(RenderError::NotMono(mono.channels.len()));
    }
    if mono.is_empty() {
        return Err(RenderError::EmptyAudio);
    }
    if mono.sample_rate_hz != set.sample_rate_hz {
        return Err(RenderError::SampleRateMismatch {
            audio: mono.sample_rate_hz,
            hrir: set.sample_rate_hz,
        });
    }
    let sr = mono.sample_rate_hz;
    if sr % TRAJ_RATE_HZ as u32 != 0 {
        return Err(RenderError::UnalignedSampleRate(sr));
    }
    let audio_s = mono.duration_s();
    if (traj.clip_duration_s - audio_s).abs() > 1.0 / TRAJ_RATE_HZ + 1e-9 {
        return Err(RenderError::DurationMismatch {
            traj_s: traj.clip_duration_s,
            audio_s,
        });
    }

    let hop = (sr / TRAJ_RATE_HZ as u32) as usize;
    let x = &mono.channels[0];
    let n = x.len();
    let frames = n.div_ceil(hop);
    let mut left = vec![0.0f64; n];
    let mut right = vec![0.0f64; n];

    let frame_filter = |k: usize| {
        let idx = k.min(traj.len() - 1);
        let pos = traj.sample(idx);
        let ir = set.nearest(pos.azimuth_deg, pos.elevation_deg);
        let gain = (1.0 / pos.distance_m).min(MAX_DISTANCE_GAIN);
        (ir, gain)
    };

    let mut faded_in: Vec<f64> = Vec::with_capacity(hop);
    let mut faded_out: Vec<f64> = Vec::with_capacity(hop);
    for k in 0..frames {
        let start = k * hop;
        let seg = &x[start..n.min(start + hop)];
        let (cur_ir, cur_gain) = frame_filter(k);
        let (prev_ir, prev_gain) = if k == 0 { (cur_ir, cur_gain) } else { frame_filter(k - 1) };

        faded_in.clear();
        faded_out.clear();
        for (i, &s) in seg.iter().enumerate() {
            let up = (i + 1) as f64 / hop as f64;
            faded_in.push(s * up * cur_gain);
            faded_out.push(s * (1.0 - up) * prev_gain);
        }
        convolve_into(&mut left, start, &faded_in, &cur_ir.left);
        convolve_into(&mut right, start, &faded_in, &cur_ir.right);
        convolve_into(&mut left, start, &faded_out, &prev_ir.left);
        convolve_into(&mut right, start, &faded_out, &prev_ir.right);
    }

    Ok(AudioClip {
        sample_rate_hz: sr,
        channels: vec![left, right],
    })
}
