//! Trajectory CSV files: header `t_s,azimuth_deg,elevation_deg,distance_m,mask`,
//! one row per 20 Hz sample. Floats are printed in shortest round-trip
//! form, so writing and re-reading is lossless.

use crate::spatial::{EventWindow, SpatialError, Trajectory, TRAJ_RATE_HZ};
use std::io::Write;
use std::path::Path;
use thiserror::Error;

pub const TRAJ_CSV_HEADER: &str = "t_s,azimuth_deg,elevation_deg,distance_m,mask";

#[derive(Debug, Error)]
pub enum TrajIoError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Format {
        path: String,
        line: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Invalid { path: String, source: SpatialError },
}

pub fn trajectory_to_csv(traj: &Trajectory) -> String {
    let mut out = String::from(TRAJ_CSV_HEADER);
    out.push('\n');
    for k in 0..traj.len() {
        let t = k as f64 / traj.rate_hz;
        out.push_str(&format!(
            "{t},{},{},{},{}\n",
            traj.azimuth_deg[k], traj.elevation_deg[k], traj.distance_m[k], traj.mask[k]
        ));
    }
    out
}

pub fn write_trajectory_csv(path: &Path, traj: &Trajectory) -> Result<(), TrajIoError> {
    let wrap = |source| TrajIoError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut f = std::fs::File::create(path).map_err(wrap)?;
    f.write_all(trajectory_to_csv(traj).as_bytes()).map_err(wrap)
}

/// Parses a trajectory CSV. The event window is recovered from the mask
/// (first and last active timestamps) and the clip duration from the row
/// count at the 20 Hz frame rate.
pub fn read_trajectory_csv(path: &Path) -> Result<Trajectory, TrajIoError> {
    let display = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| TrajIoError::Io {
        path: display.clone(),
        source,
    })?;
    parse_trajectory_csv(&text, &display)
}

pub fn parse_trajectory_csv(text: &str, origin: &str) -> Result<Trajectory, TrajIoError> {
    let fail = |line: usize, message: String| TrajIoError::Format {
        path: origin.to_string(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == TRAJ_CSV_HEADER => {}
        Some((_, header)) => {
            return Err(fail(1, format!("bad header `{header}`, expected `{TRAJ_CSV_HEADER}`")))
        }
        None => return Err(fail(1, "empty file".into())),
    }
    let mut az = Vec::new();
    let mut el = Vec::new();
    let mut di = Vec::new();
    let mut mask: Vec<u8> = Vec::new();
    for (idx, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(fail(idx + 1, format!("expected 5 fields, got {}", fields.len())));
        }
        let num = |s: &str| -> Result<f64, TrajIoError> {
            s.trim()
                .parse::<f64>()
                .map_err(|e| fail(idx + 1, format!("bad number `{s}`: {e}")))
        };
        az.push(num(fields[1])?);
        el.push(num(fields[2])?);
        di.push(num(fields[3])?);
        mask.push(match fields[4].trim() {
            "0" => 0,
            "1" => 1,
            other => return Err(fail(idx + 1, format!("mask must be 0 or 1, got `{other}`"))),
        });
    }
    if az.is_empty() {
        return Err(fail(1, "no samples".into()));
    }
    let first = mask.iter().position(|&m| m == 1);
    let last = mask.iter().rposition(|&m| m == 1);
    let window = match (first, last) {
        (Some(s), Some(e)) => EventWindow::new(
            s as f64 / TRAJ_RATE_HZ,
            // a single-sample window still needs t0 < t1
            (e as f64 / TRAJ_RATE_HZ).max(s as f64 / TRAJ_RATE_HZ + 0.5 / TRAJ_RATE_HZ),
        )
        .map_err(|source| TrajIoError::Invalid {
            path: origin.to_string(),
            source,
        })?,
        _ => {
            return Err(fail(1, "mask has no active step".into()));
        }
    };
    Ok(Trajectory {
        rate_hz: TRAJ_RATE_HZ,
        clip_duration_s: (az.len() - 1) as f64 / TRAJ_RATE_HZ,
        azimuth_deg: az,
        elevation_deg: el,
        distance_m: di,
        mask,
        window,
    })
}
