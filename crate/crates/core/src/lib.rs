//! Moving-source binaural audio toolkit.
//!
//! The crate forges spatialized datasets from mono clips: it samples
//! start/end positions from perceptual attribute categories, synthesizes
//! constant-speed 20 Hz trajectories, renders binaural audio by per-frame
//! HRIR convolution, generates and parses spatial captions, and scores
//! predicted trajectories and event windows with circular-error losses,
//! range-aware MAE, overlap ratio and classification metrics.

pub mod caption;
pub mod forge;
pub mod metrics;
pub mod render;
pub mod spatial;
pub mod trajio;
