//! Regenerates the committed toy assets under assets/:
//!   - toy/: a 12-record manifest (3 multi-event) with short mono clips
//!   - hrir/: a synthetic delay-and-gain HRIR set on a coarse grid
//!
//! Everything is deterministic; run from the repository root:
//!   cargo run -p binmotion --example make_toy_assets

use binmotion::render::{write_wav_f32, AudioClip};
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

const SR: u32 = 8_000;

fn tone(freq_hz: f64, duration_s: f64, decay: f64) -> Vec<f64> {
    let n = (duration_s * SR as f64).round() as usize;
    (0..n)
        .map(|i| {
            let t = i as f64 / SR as f64;
            0.5 * (2.0 * PI * freq_hz * t).sin() * (-decay * t).exp()
        })
        .collect()
}

fn write_mono(path: &Path, samples: Vec<f64>) {
    let clip = AudioClip {
        sample_rate_hz: SR,
        channels: vec![samples],
    };
    write_wav_f32(path, &clip).unwrap();
}

fn make_toy_clips(root: &Path) {
    let dir = root.join("assets/toy/clips");
    std::fs::create_dir_all(&dir).unwrap();
    // (id, label, duration_s, onset_s, offset_s, num_events, tone Hz)
    let rows: [(&str, &str, f64, f64, f64, u32, f64); 12] = [
        ("toy00", "dog barking", 2.0, 0.25, 1.75, 1, 220.0),
        ("toy01", "cat meowing", 2.0, 0.0, 2.0, 1, 330.0),
        ("toy02", "car passing", 3.0, 0.5, 2.5, 1, 110.0),
        ("toy03", "siren wailing", 2.5, 0.0, 2.25, 1, 440.0),
        ("toy04", "footsteps", 2.0, 0.5, 1.5, 2, 180.0),
        ("toy05", "bird chirping", 1.5, 0.25, 1.25, 1, 880.0),
        ("toy06", "helicopter", 3.0, 0.0, 3.0, 1, 90.0),
        ("toy07", "door slamming", 1.5, 0.25, 0.75, 3, 140.0),
        ("toy08", "phone ringing", 2.0, 0.25, 1.9, 1, 520.0),
        ("toy09", "rain falling", 2.5, 0.0, 2.5, 2, 65.0),
        ("toy10", "whistle", 1.5, 0.3, 1.2, 1, 660.0),
        ("toy11", "train horn", 2.5, 0.25, 2.0, 1, 250.0),
    ];
    let mut manifest = String::new();
    for (id, label, dur, on, off, events, hz) in rows {
        let file = format!("clips/{id}.wav");
        write_mono(&dir.join(format!("{id}.wav")), tone(hz, dur, 1.2));
        writeln!(
            manifest,
            r#"{{"id":"{id}","audio":"{file}","label":"{label}","onset_s":{on},"offset_s":{off},"num_events":{events}}}"#
        )
        .unwrap();
    }
    std::fs::write(root.join("assets/toy/manifest.jsonl"), manifest).unwrap();
}

/// Delay-and-gain head model: interaural delay follows sin(azimuth),
/// the far ear is attenuated, elevation shaves overall gain slightly.
fn hrir_pair(az_deg: f64, el_deg: f64) -> (Vec<f64>, Vec<f64>) {
    let len = 48;
    let max_delay = 14.0; // samples at 8 kHz, ~0.6 ms head width
    let s = (az_deg.to_radians()).sin();
    let right_lead = (max_delay * s).round() as i64; // >0: right ear closer
    let el_gain = 1.0 - 0.1 * (el_deg.to_radians().sin().abs());
    let shade = 0.6 + 0.4 * (1.0 - s.abs());
    let (g_l, g_r) = if right_lead >= 0 {
        (el_gain * shade, el_gain)
    } else {
        (el_gain, el_gain * shade)
    };
    let mut left = vec![0.0; len];
    let mut right = vec![0.0; len];
    let base = max_delay as usize;
    left[(base as i64 + right_lead.max(0)) as usize] = g_l;
    right[(base as i64 + (-right_lead).max(0)) as usize] = g_r;
    (left, right)
}

fn make_hrir_set(root: &Path) {
    let dir = root.join("assets/hrir/irs");
    std::fs::create_dir_all(&dir).unwrap();
    let mut entries = Vec::new();
    for el in [-45.0f64, 0.0, 45.0] {
        for k in 0..12 {
            let az = -180.0 + 30.0 * k as f64;
            let (l, r) = hrir_pair(az, el);
            let name = format!("az{az:+04.0}_el{el:+03.0}.wav");
            write_wav_f32(
                &dir.join(&name),
                &AudioClip {
                    sample_rate_hz: SR,
                    channels: vec![l, r],
                },
            )
            .unwrap();
            entries.push(serde_json::json!({
                "azimuth_deg": az,
                "elevation_deg": el,
                "file": format!("irs/{name}"),
            }));
        }
    }
    let manifest = serde_json::json!({
        "sample_rate_hz": SR,
        "irs": entries,
    });
    std::fs::write(
        root.join("assets/hrir/manifest.json"),
        serde_json::to_string_pretty(&manifest).unwrap(),
    )
    .unwrap();
}

fn main() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"))
        .ancestors()
        .nth(2)
        .unwrap()
        .to_path_buf();
    make_toy_clips(&root);
    make_hrir_set(&root);
    println!("toy assets written under {}", root.join("assets").display());
}
