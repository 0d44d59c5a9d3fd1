//! Spatial attribute categories, spherical/Cartesian coordinate math,
//! endpoint sampling and constant-speed trajectory synthesis.
//!
//! Axis convention: azimuth 0° is straight ahead, positive toward the
//! listener's right, wrapped to [-180, 180). Elevation is positive up in
//! [-90, 90]. Distances are in meters and strictly positive.

use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;
use thiserror::Error;

/// Trajectory sampling rate in frames per second.
pub const TRAJ_RATE_HZ: f64 = 20.0;

/// Default band for log-spaced Fourier time features.
pub const DEFAULT_FOURIER_F_MIN_HZ: f64 = 0.05;
pub const DEFAULT_FOURIER_F_MAX_HZ: f64 = 10.0;

#[derive(Debug, Error, PartialEq)]
pub enum SpatialError {
    #[error("{what} must be finite, got {value}")]
    NonFinite { what: &'static str, value: f64 },
    #[error("cannot convert the zero vector to spherical coordinates")]
    ZeroVector,
    #[error("elevation {0}° outside [-90, 90]")]
    ElevationOutOfRange(f64),
    #[error("distance must be > 0, got {0} m")]
    NonPositiveDistance(f64),
    #[error("invalid event window: t0={t0_s}s, t1={t1_s}s (need 0 <= t0 < t1)")]
    InvalidWindow { t0_s: f64, t1_s: f64 },
    #[error("event window ends at {t1_s}s but the clip is only {clip_duration_s}s long")]
    WindowOutsideClip { t1_s: f64, clip_duration_s: f64 },
    #[error("event window ({t0_s}s, {t1_s}s) contains no {TRAJ_RATE_HZ} Hz sample")]
    EmptyWindowMask { t0_s: f64, t1_s: f64 },
    #[error("expected a {expected:?} category, got {got:?} `{name}`")]
    KindMismatch {
        expected: AttributeKind,
        got: AttributeKind,
        name: &'static str,
    },
    #[error("unknown category `{0}`")]
    UnknownCategory(String),
    #[error("clip duration must be > 0, got {0}s")]
    NonPositiveDuration(f64),
}

/// The three spatial attributes a trajectory is parameterized by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttributeKind {
    Azimuth,
    Elevation,
    Distance,
}

impl AttributeKind {
    pub const ALL: [AttributeKind; 3] = [
        AttributeKind::Azimuth,
        AttributeKind::Elevation,
        AttributeKind::Distance,
    ];

    /// True for attributes measured in degrees on the circle.
    pub fn is_angular(self) -> bool {
        !matches!(self, AttributeKind::Distance)
    }
}

/// One perceptual attribute category: a named union of closed value
/// intervals (degrees for angles, meters for distance).
#[derive(Debug, Clone, PartialEq)]
pub struct Category {
    pub kind: AttributeKind,
    pub name: &'static str,
    /// Closed intervals, each with low < high. Only `back` has two
    /// (the ±180° wrap pair).
    pub ranges: Vec<(f64, f64)>,
    /// Marked "(OM)": captions may leave this category unstated.
    pub omittable: bool,
}

impl Category {
    fn new(
        kind: AttributeKind,
        name: &'static str,
        ranges: &[(f64, f64)],
        omittable: bool,
    ) -> Self {
        Category {
            kind,
            name,
            ranges: ranges.to_vec(),
            omittable,
        }
    }

    /// Closed-interval containment test over the union of ranges.
    pub fn contains(&self, v: f64) -> bool {
        self.ranges.iter().any(|&(lo, hi)| v >= lo && v <= hi)
    }

    /// Representative midpoint. For the two-interval `back` category the
    /// circular midpoint ±180° is reported as -180 (the wrapped form).
    pub fn midpoint(&self) -> f64 {
        if self.ranges.len() > 1 {
            return -180.0;
        }
        let (lo, hi) = self.ranges[0];
        0.5 * (lo + hi)
    }

    fn total_span(&self) -> f64 {
        self.ranges.iter().map(|&(lo, hi)| hi - lo).sum()
    }
}

/// The full attribute/caption/range table: 8 azimuth, 3 elevation and
/// 4 distance categories. Interval endpoints are normalized low < high.
pub fn category_table() -> &'static [Category] {
    static TABLE: OnceLock<Vec<Category>> = OnceLock::new();
    TABLE.get_or_init(|| {
        use AttributeKind::*;
        vec![
            Category::new(Azimuth, "left", &[(-100.0, -80.0)], false),
            Category::new(Azimuth, "front_left", &[(-55.0, -35.0)], false),
            Category::new(Azimuth, "front", &[(-10.0, 10.0)], true),
            Category::new(Azimuth, "front_right", &[(35.0, 55.0)], false),
            Category::new(Azimuth, "right", &[(80.0, 100.0)], false),
            Category::new(Azimuth, "right_back", &[(125.0, 145.0)], false),
            Category::new(Azimuth, "back", &[(-180.0, -170.0), (170.0, 180.0)], false),
            Category::new(Azimuth, "left_back", &[(-145.0, -125.0)], false),
            Category::new(Elevation, "up", &[(70.0, 90.0)], false),
            Category::new(Elevation, "middle", &[(-10.0, 10.0)], true),
            Category::new(Elevation, "down", &[(-90.0, -70.0)], false),
            Category::new(Distance, "very_close", &[(0.3, 0.6)], false),
            Category::new(Distance, "close", &[(0.5, 1.0)], false),
            Category::new(Distance, "moderate", &[(1.0, 3.0)], true),
            Category::new(Distance, "far", &[(3.0, 10.0)], false),
        ]
    })
}

/// Categories of a single attribute, in table order.
pub fn categories_of(kind: AttributeKind) -> impl Iterator<Item = &'static Category> {
    category_table().iter().filter(move |c| c.kind == kind)
}

pub fn category_by_name(name: &str) -> Option<&'static Category> {
    category_table().iter().find(|c| c.name == name)
}

/// The omittable default category for an attribute (`front`, `middle`,
/// `moderate`).
pub fn om_default(kind: AttributeKind) -> &'static Category {
    categories_of(kind)
        .find(|c| c.omittable)
        .expect("every kind has exactly one omittable category")
}

/// Reduces an angle to [-180, 180). Rejects non-finite input.
pub fn wrap_angle(x: f64) -> Result<f64, SpatialError> {
    if !x.is_finite() {
        return Err(SpatialError::NonFinite {
            what: "angle",
            value: x,
        });
    }
    Ok(wrap_deg(x))
}

pub(crate) fn wrap_deg(x: f64) -> f64 {
    let mut r = x % 360.0;
    if r < -180.0 {
        r += 360.0;
    } else if r >= 180.0 {
        r -= 360.0;
    }
    r
}

/// Circular absolute difference in degrees, in [0, 180].
pub(crate) fn circ_delta_deg(x: f64, y: f64) -> f64 {
    let d = (x - y).abs() % 360.0;
    d.min(360.0 - d)
}

/// A source position relative to the listener's head.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalPos {
    pub azimuth_deg: f64,
    pub elevation_deg: f64,
    pub distance_m: f64,
}

impl SphericalPos {
    pub fn new(azimuth_deg: f64, elevation_deg: f64, distance_m: f64) -> Result<Self, SpatialError> {
        for (what, v) in [
            ("azimuth", azimuth_deg),
            ("elevation", elevation_deg),
            ("distance", distance_m),
        ] {
            if !v.is_finite() {
                return Err(SpatialError::NonFinite { what, value: v });
            }
        }
        if !(-90.0..=90.0).contains(&elevation_deg) {
            return Err(SpatialError::ElevationOutOfRange(elevation_deg));
        }
        if distance_m <= 0.0 {
            return Err(SpatialError::NonPositiveDistance(distance_m));
        }
        Ok(SphericalPos {
            azimuth_deg: wrap_deg(azimuth_deg),
            elevation_deg,
            distance_m,
        })
    }
}

/// Spherical to Cartesian: x front, y right, z up, meters.
pub fn sph_to_cart(p: SphericalPos) -> [f64; 3] {
    let az = p.azimuth_deg.to_radians();
    let el = p.elevation_deg.to_radians();
    let horiz = p.distance_m * el.cos();
    [horiz * az.cos(), horiz * az.sin(), p.distance_m * el.sin()]
}

/// Cartesian to spherical; inverse of [`sph_to_cart`]. At the exact poles
/// (x = y = 0) azimuth is defined as 0. Rejects the zero vector.
pub fn cart_to_sph(x: f64, y: f64, z: f64) -> Result<SphericalPos, SpatialError> {
    for (what, v) in [("x", x), ("y", y), ("z", z)] {
        if !v.is_finite() {
            return Err(SpatialError::NonFinite { what, value: v });
        }
    }
    let d = (x * x + y * y + z * z).sqrt();
    if d == 0.0 {
        return Err(SpatialError::ZeroVector);
    }
    let horiz = x.hypot(y);
    let az = if horiz == 0.0 { 0.0 } else { y.atan2(x).to_degrees() };
    let el = (z / d).clamp(-1.0, 1.0).asin().to_degrees();
    SphericalPos::new(az, el, d)
}

/// Start and end positions of one moving event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialEndpoints {
    pub start: SphericalPos,
    pub end: SphericalPos,
}

/// The time interval a sound event is active within its clip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventWindow {
    pub t0_s: f64,
    pub t1_s: f64,
}

impl EventWindow {
    pub fn new(t0_s: f64, t1_s: f64) -> Result<Self, SpatialError> {
        if !t0_s.is_finite() || !t1_s.is_finite() || t0_s < 0.0 || t0_s >= t1_s {
            return Err(SpatialError::InvalidWindow { t0_s, t1_s });
        }
        Ok(EventWindow { t0_s, t1_s })
    }
}

/// One category per attribute kind. Serializes as the three category
/// names.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CategoryTriple {
    pub azimuth: &'static Category,
    pub elevation: &'static Category,
    pub distance: &'static Category,
}

impl CategoryTriple {
    pub fn new(
        azimuth: &'static Category,
        elevation: &'static Category,
        distance: &'static Category,
    ) -> Result<Self, SpatialError> {
        for (expected, c) in [
            (AttributeKind::Azimuth, azimuth),
            (AttributeKind::Elevation, elevation),
            (AttributeKind::Distance, distance),
        ] {
            if c.kind != expected {
                return Err(SpatialError::KindMismatch {
                    expected,
                    got: c.kind,
                    name: c.name,
                });
            }
        }
        Ok(CategoryTriple {
            azimuth,
            elevation,
            distance,
        })
    }

    pub fn from_names(azimuth: &str, elevation: &str, distance: &str) -> Result<Self, SpatialError> {
        let look = |n: &str| {
            category_by_name(n).ok_or_else(|| SpatialError::UnknownCategory(n.to_string()))
        };
        CategoryTriple::new(look(azimuth)?, look(elevation)?, look(distance)?)
    }

    pub fn get(&self, kind: AttributeKind) -> &'static Category {
        match kind {
            AttributeKind::Azimuth => self.azimuth,
            AttributeKind::Elevation => self.elevation,
            AttributeKind::Distance => self.distance,
        }
    }
}

impl Serialize for CategoryTriple {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("CategoryTriple", 3)?;
        s.serialize_field("azimuth", self.azimuth.name)?;
        s.serialize_field("elevation", self.elevation.name)?;
        s.serialize_field("distance", self.distance.name)?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for CategoryTriple {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Names {
            azimuth: String,
            elevation: String,
            distance: String,
        }
        let n = Names::deserialize(deserializer)?;
        CategoryTriple::from_names(&n.azimuth, &n.elevation, &n.distance)
            .map_err(serde::de::Error::custom)
    }
}

/// A 20 Hz time series of source positions with a validity mask marking
/// the event window.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub rate_hz: f64,
    pub azimuth_deg: Vec<f64>,
    pub elevation_deg: Vec<f64>,
    pub distance_m: Vec<f64>,
    /// 1 inside the event window (closed on both ends), else 0.
    pub mask: Vec<u8>,
    pub window: EventWindow,
    pub clip_duration_s: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.azimuth_deg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.azimuth_deg.is_empty()
    }

    pub fn sample(&self, k: usize) -> SphericalPos {
        SphericalPos {
            azimuth_deg: self.azimuth_deg[k],
            elevation_deg: self.elevation_deg[k],
            distance_m: self.distance_m[k],
        }
    }
}

/// Number of samples covering a clip: frames at k/rate for
/// k = 0..floor(duration·rate), both clip endpoints included.
pub fn sample_count(clip_duration_s: f64, rate_hz: f64) -> usize {
    (clip_duration_s * rate_hz).floor() as usize + 1
}

/// Draws a value uniformly from the union of a category's ranges. With
/// multiple ranges the interval is chosen with probability proportional
/// to its length.
pub fn sample_endpoint<R: Rng + ?Sized>(c: &Category, rng: &mut R) -> f64 {
    let mut u = rng.random_range(0.0..c.total_span());
    for &(lo, hi) in &c.ranges {
        let span = hi - lo;
        if u < span {
            return lo + u;
        }
        u -= span;
    }
    let &(_, hi) = c.ranges.last().expect("categories have >= 1 range");
    hi
}

/// Samples concrete start/end positions, one coordinate per category.
pub fn sample_endpoints<R: Rng + ?Sized>(
    start: &CategoryTriple,
    end: &CategoryTriple,
    rng: &mut R,
) -> SpatialEndpoints {
    let mut draw = |t: &CategoryTriple| {
        let az = sample_endpoint(t.azimuth, rng);
        let el = sample_endpoint(t.elevation, rng);
        let d = sample_endpoint(t.distance, rng);
        SphericalPos::new(az, el, d).expect("category ranges respect position invariants")
    };
    SpatialEndpoints {
        start: draw(start),
        end: draw(end),
    }
}

/// Builds the constant-speed straight-line trajectory between the sampled
/// endpoints. Positions interpolate linearly in Cartesian space from the
/// start at t0 to the end at t1; samples outside the window hold the
/// nearest endpoint. Boundary samples that land exactly on t0 or t1 carry
/// the endpoint coordinates verbatim.
pub fn linear_trajectory(
    e: &SpatialEndpoints,
    w: EventWindow,
    clip_duration_s: f64,
) -> Result<Trajectory, SpatialError> {
    if !clip_duration_s.is_finite() || clip_duration_s <= 0.0 {
        return Err(SpatialError::NonPositiveDuration(clip_duration_s));
    }
    if w.t1_s > clip_duration_s {
        return Err(SpatialError::WindowOutsideClip {
            t1_s: w.t1_s,
            clip_duration_s,
        });
    }
    let len = sample_count(clip_duration_s, TRAJ_RATE_HZ);
    let c0 = sph_to_cart(e.start);
    let c1 = sph_to_cart(e.end);
    let span = w.t1_s - w.t0_s;

    let mut traj = Trajectory {
        rate_hz: TRAJ_RATE_HZ,
        azimuth_deg: Vec::with_capacity(len),
        elevation_deg: Vec::with_capacity(len),
        distance_m: Vec::with_capacity(len),
        mask: Vec::with_capacity(len),
        window: w,
        clip_duration_s,
    };
    for k in 0..len {
        let t = k as f64 / TRAJ_RATE_HZ;
        let pos = if t <= w.t0_s {
            e.start
        } else if t >= w.t1_s {
            e.end
        } else {
            let u = (t - w.t0_s) / span;
            let x = c0[0] + u * (c1[0] - c0[0]);
            let y = c0[1] + u * (c1[1] - c0[1]);
            let z = c0[2] + u * (c1[2] - c0[2]);
            cart_to_sph(x, y, z).expect("interpolant of valid positions stays valid")
        };
        traj.azimuth_deg.push(pos.azimuth_deg);
        traj.elevation_deg.push(pos.elevation_deg);
        traj.distance_m.push(pos.distance_m);
        traj.mask
            .push(u8::from(t >= w.t0_s && t <= w.t1_s));
    }
    if !traj.mask.contains(&1) {
        return Err(SpatialError::EmptyWindowMask {
            t0_s: w.t0_s,
            t1_s: w.t1_s,
        });
    }
    Ok(traj)
}

/// Maps a continuous value back to its attribute category. Values inside
/// exactly one range return that category; values in an overlap or in no
/// range return the category with the nearest range midpoint (angular
/// midpoints compared circularly; `back` has midpoint ±180°).
pub fn classify_value(kind: AttributeKind, v: f64) -> Result<&'static Category, SpatialError> {
    if !v.is_finite() {
        return Err(SpatialError::NonFinite {
            what: "value",
            value: v,
        });
    }
    let v = if kind.is_angular() { wrap_deg(v) } else { v };
    let containing: Vec<&'static Category> =
        categories_of(kind).filter(|c| c.contains(v)).collect();
    if containing.len() == 1 {
        return Ok(containing[0]);
    }
    let candidates: Vec<&'static Category> = if containing.is_empty() {
        categories_of(kind).collect()
    } else {
        containing
    };
    let dist = |c: &Category| {
        if kind.is_angular() {
            circ_delta_deg(v, c.midpoint())
        } else {
            (v - c.midpoint()).abs()
        }
    };
    Ok(candidates
        .into_iter()
        .min_by(|a, b| dist(a).total_cmp(&dist(b)))
        .expect("every kind has categories"))
}

/// Log-spaced Fourier features of a timestamp: [sin(2π f_k t),
/// cos(2π f_k t)] for each of `count` frequencies geometrically spaced
/// over [f_min, f_max]. Output length is 2·count.
pub fn fourier_time_features(t_s: f64, count: usize, f_min_hz: f64, f_max_hz: f64) -> Vec<f64> {
    assert!(count >= 1, "need at least one frequency");
    assert!(f_min_hz > 0.0 && f_max_hz >= f_min_hz);
    let mut out = Vec::with_capacity(2 * count);
    for k in 0..count {
        let f = if count == 1 {
            f_min_hz
        } else {
            f_min_hz * (f_max_hz / f_min_hz).powf(k as f64 / (count - 1) as f64)
        };
        let phase = std::f64::consts::TAU * f * t_s;
        out.push(phase.sin());
        out.push(phase.cos());
    }
    out
}
