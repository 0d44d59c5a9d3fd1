//! Trajectory losses and evaluation metrics: masked circular-L1 trajectory
//! loss, start/end endpoint loss, masked outside-window MSE, range-aware
//! MAE, activity-mask overlap ratio, start/end timing MAE and range-aware
//! classification scores.

use crate::spatial::{
    categories_of, circ_delta_deg, classify_value, wrap_deg, AttributeKind, Category, EventWindow,
    SpatialError, Trajectory,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("trajectory length mismatch: pred {pred} vs gt {gt}")]
    LengthMismatch { pred: usize, gt: usize },
    #[error("trajectory rate mismatch: pred {pred} Hz vs gt {gt} Hz")]
    RateMismatch { pred: f64, gt: f64 },
    #[error("ground-truth mask has no valid step")]
    EmptyMask,
    #[error("event window leaves no step outside itself")]
    EmptyOutsideRegion,
    #[error("activity masks have an empty union")]
    EmptyMaskUnion,
    #[error("metric inputs are empty")]
    EmptyInput,
    #[error(transparent)]
    Spatial(#[from] SpatialError),
}

/// Per-coordinate weights for the trajectory and endpoint losses, plus the
/// endpoint-term weight of the total loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossWeights {
    pub w_az: f64,
    pub w_el: f64,
    pub w_ds: f64,
    pub lambda_time: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        LossWeights {
            w_az: 1.0,
            w_el: 1.0,
            w_ds: 1.0,
            lambda_time: 1.0,
        }
    }
}

/// Binary per-step activity sequence derived from an event window.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivityMask {
    pub rate_hz: f64,
    pub bits: Vec<u8>,
}

/// Circular absolute angular difference Δ°(x, y) = min(|x−y|, 360−|x−y|),
/// in [0, 180].
pub fn circular_delta(x: f64, y: f64) -> f64 {
    circ_delta_deg(x, y)
}

fn check_pair(pred: &Trajectory, gt: &Trajectory) -> Result<(), MetricsError> {
    if pred.len() != gt.len() {
        return Err(MetricsError::LengthMismatch {
            pred: pred.len(),
            gt: gt.len(),
        });
    }
    if pred.rate_hz != gt.rate_hz {
        return Err(MetricsError::RateMismatch {
            pred: pred.rate_hz,
            gt: gt.rate_hz,
        });
    }
    if !gt.mask.contains(&1) {
        return Err(MetricsError::EmptyMask);
    }
    Ok(())
}

fn step_error(pred: &Trajectory, gt: &Trajectory, k: usize, w: &LossWeights) -> f64 {
    w.w_az * circular_delta(pred.azimuth_deg[k], gt.azimuth_deg[k])
        + w.w_el * circular_delta(pred.elevation_deg[k], gt.elevation_deg[k])
        + w.w_ds * (pred.distance_m[k] - gt.distance_m[k]).abs()
}

/// Masked mean per-step error over the trajectory: circular L1 for azimuth
/// and elevation, plain L1 for distance, averaged over the ground-truth
/// valid steps.
pub fn traj_loss(pred: &Trajectory, gt: &Trajectory, w: &LossWeights) -> Result<f64, MetricsError> {
    check_pair(pred, gt)?;
    let mut sum = 0.0;
    let mut count = 0usize;
    for k in 0..gt.len() {
        if gt.mask[k] == 1 {
            sum += step_error(pred, gt, k, w);
            count += 1;
        }
    }
    Ok(sum / count as f64)
}

/// Endpoint alignment loss: the six weighted error terms at the first and
/// last ground-truth valid steps.
pub fn endpoint_loss(
    pred: &Trajectory,
    gt: &Trajectory,
    w: &LossWeights,
) -> Result<f64, MetricsError> {
    check_pair(pred, gt)?;
    let s = gt.mask.iter().position(|&m| m == 1).unwrap();
    let e = gt.mask.iter().rposition(|&m| m == 1).unwrap();
    Ok(step_error(pred, gt, s, w) + step_error(pred, gt, e, w))
}

/// Total loss: trajectory loss plus `lambda_time` times the endpoint loss.
pub fn total_loss(pred: &Trajectory, gt: &Trajectory, w: &LossWeights) -> Result<f64, MetricsError> {
    Ok(traj_loss(pred, gt, w)? + w.lambda_time * endpoint_loss(pred, gt, w)?)
}

/// Rasterizes an event window into a binary mask: bit k is 1 iff
/// t0 <= k/rate <= t1 (closed interval, same convention as trajectories).
pub fn activity_mask(w: EventWindow, length: usize, rate_hz: f64) -> ActivityMask {
    let bits = (0..length)
        .map(|k| {
            let t = k as f64 / rate_hz;
            u8::from(t >= w.t0_s && t <= w.t1_s)
        })
        .collect();
    ActivityMask { rate_hz, bits }
}

/// Mean squared error restricted to steps outside the event window.
pub fn masked_outside_mse(
    adjusted: &[f64],
    reference: &[f64],
    w: EventWindow,
    rate_hz: f64,
) -> Result<f64, MetricsError> {
    if adjusted.len() != reference.len() {
        return Err(MetricsError::LengthMismatch {
            pred: adjusted.len(),
            gt: reference.len(),
        });
    }
    let mask = activity_mask(w, adjusted.len(), rate_hz);
    let mut sum = 0.0;
    let mut count = 0usize;
    for (k, (&a, &r)) in adjusted.iter().zip(reference).enumerate() {
        if mask.bits[k] == 0 {
            let d = a - r;
            sum += d * d;
            count += 1;
        }
    }
    if count == 0 {
        return Err(MetricsError::EmptyOutsideRegion);
    }
    Ok(sum / count as f64)
}

/// Overlap ratio of two activity masks: intersection over union of the
/// active steps.
pub fn olr(pred: &ActivityMask, gt: &ActivityMask) -> Result<f64, MetricsError> {
    if pred.bits.len() != gt.bits.len() {
        return Err(MetricsError::LengthMismatch {
            pred: pred.bits.len(),
            gt: gt.bits.len(),
        });
    }
    if pred.rate_hz != gt.rate_hz {
        return Err(MetricsError::RateMismatch {
            pred: pred.rate_hz,
            gt: gt.rate_hz,
        });
    }
    let mut inter = 0u64;
    let mut union = 0u64;
    for (&p, &g) in pred.bits.iter().zip(&gt.bits) {
        inter += u64::from(p & g);
        union += u64::from(p.max(g));
    }
    if union == 0 {
        return Err(MetricsError::EmptyMaskUnion);
    }
    Ok(inter as f64 / union as f64)
}

/// Mean absolute start and end timing errors, in seconds.
pub fn start_end_mae(
    preds: &[EventWindow],
    gts: &[EventWindow],
) -> Result<(f64, f64), MetricsError> {
    if preds.is_empty() || gts.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    if preds.len() != gts.len() {
        return Err(MetricsError::LengthMismatch {
            pred: preds.len(),
            gt: gts.len(),
        });
    }
    let n = preds.len() as f64;
    let mut s = 0.0;
    let mut e = 0.0;
    for (p, g) in preds.iter().zip(gts) {
        s += (p.t0_s - g.t0_s).abs();
        e += (p.t1_s - g.t1_s).abs();
    }
    Ok((s / n, e / n))
}

/// How range-aware MAE anchors the error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RaMaeMode {
    /// Error is the prediction's distance to the nearest valid range
    /// (0 when it lies inside any range). Ignores the ground truth.
    ClampPred,
    /// Error is min over ranges of |pred − clamp(gt, range)|.
    ClampGt,
}

fn range_distance(kind: AttributeKind, v: f64, lo: f64, hi: f64) -> f64 {
    if v >= lo && v <= hi {
        return 0.0;
    }
    if kind.is_angular() {
        circular_delta(v, lo).min(circular_delta(v, hi))
    } else if v < lo {
        lo - v
    } else {
        v - hi
    }
}

fn attr_ranges(kind: AttributeKind) -> impl Iterator<Item = (f64, f64)> {
    categories_of(kind).flat_map(|c| c.ranges.iter().copied())
}

/// Range-aware mean absolute error over the predefined attribute ranges.
pub fn ra_mae(
    preds: &[f64],
    gts: &[f64],
    kind: AttributeKind,
    mode: RaMaeMode,
) -> Result<f64, MetricsError> {
    if preds.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    if preds.len() != gts.len() {
        return Err(MetricsError::LengthMismatch {
            pred: preds.len(),
            gt: gts.len(),
        });
    }
    let mut sum = 0.0;
    for (&p, &g) in preds.iter().zip(gts) {
        let (p, g) = if kind.is_angular() {
            (wrap_deg(p), wrap_deg(g))
        } else {
            (p, g)
        };
        let err = match mode {
            RaMaeMode::ClampPred => attr_ranges(kind)
                .map(|(lo, hi)| range_distance(kind, p, lo, hi))
                .fold(f64::INFINITY, f64::min),
            RaMaeMode::ClampGt => attr_ranges(kind)
                .map(|(lo, hi)| {
                    let anchor = g.clamp(lo, hi);
                    if kind.is_angular() {
                        circular_delta(p, anchor)
                    } else {
                        (p - anchor).abs()
                    }
                })
                .fold(f64::INFINITY, f64::min),
        };
        sum += err;
    }
    Ok(sum / preds.len() as f64)
}

/// Plain mean absolute error; circular for angular attributes.
pub fn mae(preds: &[f64], gts: &[f64], kind: AttributeKind) -> Result<f64, MetricsError> {
    if preds.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    if preds.len() != gts.len() {
        return Err(MetricsError::LengthMismatch {
            pred: preds.len(),
            gt: gts.len(),
        });
    }
    let sum: f64 = preds
        .iter()
        .zip(gts)
        .map(|(&p, &g)| {
            if kind.is_angular() {
                circular_delta(p, g)
            } else {
                (p - g).abs()
            }
        })
        .sum();
    Ok(sum / preds.len() as f64)
}

/// Range-aware classification scores for one attribute.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub accuracy: f64,
    pub macro_f1: f64,
    /// Category names in table order, indexing the confusion matrix.
    pub labels: Vec<&'static str>,
    /// confusion[gt][pred] in label order.
    pub confusion: Vec<Vec<usize>>,
}

/// Maps both value sequences to categories via the attribute table and
/// scores accuracy and macro-F1. Macro-F1 averages F1 over categories
/// present in the ground truth; a category with zero precision and recall
/// contributes F1 = 0.
pub fn classification_report(
    preds: &[f64],
    gts: &[f64],
    kind: AttributeKind,
) -> Result<ClassificationReport, MetricsError> {
    if preds.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    if preds.len() != gts.len() {
        return Err(MetricsError::LengthMismatch {
            pred: preds.len(),
            gt: gts.len(),
        });
    }
    let labels: Vec<&'static str> = categories_of(kind).map(|c| c.name).collect();
    let index = |c: &'static Category| labels.iter().position(|&n| n == c.name).unwrap();
    let mut confusion = vec![vec![0usize; labels.len()]; labels.len()];
    let mut correct = 0usize;
    for (&p, &g) in preds.iter().zip(gts) {
        let pc = index(classify_value(kind, p)?);
        let gc = index(classify_value(kind, g)?);
        confusion[gc][pc] += 1;
        if pc == gc {
            correct += 1;
        }
    }
    let accuracy = correct as f64 / preds.len() as f64;
    let mut f1_sum = 0.0;
    let mut present = 0usize;
    for c in 0..labels.len() {
        let gt_count: usize = confusion[c].iter().sum();
        if gt_count == 0 {
            continue;
        }
        present += 1;
        let tp = confusion[c][c];
        let pred_count: usize = confusion.iter().map(|row| row[c]).sum();
        let denom = pred_count + gt_count; // 2TP + FP + FN
        if denom > 0 && tp > 0 {
            f1_sum += 2.0 * tp as f64 / denom as f64;
        }
    }
    let macro_f1 = if present > 0 { f1_sum / present as f64 } else { 0.0 };
    Ok(ClassificationReport {
        accuracy,
        macro_f1,
        labels,
        confusion,
    })
}

/// Per-attribute evaluation block, serialized with the report column names.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttributeReport {
    pub accuracy: f64,
    pub macro_f1: f64,
    pub mae: f64,
    pub ra_mae: f64,
}

/// Aggregate evaluation report. Trajectory evaluation fills the
/// per-attribute blocks and losses; temporal evaluation fills the timing
/// fields. Unused sections are omitted from JSON.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct EvalReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub azimuth: Option<AttributeReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elevation: Option<AttributeReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance: Option<AttributeReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub traj_loss: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub endpoint_loss: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_loss: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start_mae: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub end_mae: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub olr: Option<f64>,
}

/// Scores a batch of (pred, gt) trajectory pairs: per-attribute
/// classification and MAE metrics over the start/end positions (the first
/// and last ground-truth valid steps, pooled across pairs), plus the mean
/// losses over full trajectories.
pub fn evaluate_trajectories(
    pairs: &[(Trajectory, Trajectory)],
    w: &LossWeights,
    mode: RaMaeMode,
) -> Result<EvalReport, MetricsError> {
    if pairs.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let mut vals: [(Vec<f64>, Vec<f64>); 3] = Default::default();
    let mut l_traj = 0.0;
    let mut l_end = 0.0;
    let mut l_total = 0.0;
    for (pred, gt) in pairs {
        l_traj += traj_loss(pred, gt, w)?;
        l_end += endpoint_loss(pred, gt, w)?;
        l_total += total_loss(pred, gt, w)?;
        let s = gt.mask.iter().position(|&m| m == 1).unwrap();
        let e = gt.mask.iter().rposition(|&m| m == 1).unwrap();
        for k in if s == e { vec![s] } else { vec![s, e] } {
            vals[0].0.push(pred.azimuth_deg[k]);
            vals[0].1.push(gt.azimuth_deg[k]);
            vals[1].0.push(pred.elevation_deg[k]);
            vals[1].1.push(gt.elevation_deg[k]);
            vals[2].0.push(pred.distance_m[k]);
            vals[2].1.push(gt.distance_m[k]);
        }
    }
    let n = pairs.len() as f64;
    let mut report = EvalReport {
        traj_loss: Some(l_traj / n),
        endpoint_loss: Some(l_end / n),
        total_loss: Some(l_total / n),
        ..EvalReport::default()
    };
    for (kind, (p, g)) in AttributeKind::ALL.iter().zip(&vals) {
        let cls = classification_report(p, g, *kind)?;
        let block = AttributeReport {
            accuracy: cls.accuracy,
            macro_f1: cls.macro_f1,
            mae: mae(p, g, *kind)?,
            ra_mae: ra_mae(p, g, *kind, mode)?,
        };
        match kind {
            AttributeKind::Azimuth => report.azimuth = Some(block),
            AttributeKind::Elevation => report.elevation = Some(block),
            AttributeKind::Distance => report.distance = Some(block),
        }
    }
    Ok(report)
}
