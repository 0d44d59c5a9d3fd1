//! Template-based caption generation and the rule-based caption parser.
//!
//! Captions are built from a lexicon of per-category synonyms, event-label
//! phrases and motion verbs. The parser runs a longest-match keyword scan
//! and assigns categories to start/end slots by their position around the
//! motion verb; unmatched attributes fall back to the omittable defaults
//! (`front`, `middle`, `moderate`).

use crate::spatial::{
    categories_of, category_by_name, linear_trajectory, om_default, AttributeKind, Category,
    CategoryTriple, EventWindow, SpatialEndpoints, SpatialError, SphericalPos, Trajectory,
};
use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CaptionError {
    #[error("no lexicon entry for event label `{0}`")]
    UnknownLabel(String),
    #[error("invalid lexicon: {0}")]
    InvalidLexicon(String),
    #[error("cannot read lexicon {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot parse lexicon {path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Spatial(#[from] SpatialError),
}

/// Which endpoint of the motion an attribute belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Start,
    End,
}

/// Start and end category triples plus the record of which attributes the
/// caption left unstated. Only omittable categories may be omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotionSpec {
    pub start: CategoryTriple,
    pub end: CategoryTriple,
    #[serde(default)]
    pub omitted: BTreeSet<(Side, AttributeKind)>,
}

impl MotionSpec {
    pub fn new(
        start: CategoryTriple,
        end: CategoryTriple,
        omitted: BTreeSet<(Side, AttributeKind)>,
    ) -> Result<Self, CaptionError> {
        let spec = MotionSpec { start, end, omitted };
        for &(side, kind) in &spec.omitted {
            let c = spec.triple(side).get(kind);
            if !c.omittable {
                return Err(CaptionError::InvalidLexicon(format!(
                    "non-omittable category `{}` marked omitted",
                    c.name
                )));
            }
        }
        Ok(spec)
    }

    pub fn triple(&self, side: Side) -> &CategoryTriple {
        match side {
            Side::Start => &self.start,
            Side::End => &self.end,
        }
    }

    fn is_omitted(&self, side: Side, kind: AttributeKind) -> bool {
        self.omitted.contains(&(side, kind))
    }
}

#[derive(Debug, Deserialize)]
struct RawLexicon {
    categories: BTreeMap<String, Vec<String>>,
    labels: BTreeMap<String, Vec<String>>,
    motion_verbs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
enum KeywordTarget {
    Cat(&'static Category),
    Verb,
}

#[derive(Debug, Clone)]
struct Keyword {
    tokens: Vec<String>,
    target: KeywordTarget,
}

/// Synonym table driving caption generation and parsing.
#[derive(Debug, Clone)]
pub struct CaptionLexicon {
    categories: BTreeMap<&'static str, Vec<String>>,
    labels: BTreeMap<String, Vec<String>>,
    motion_verbs: Vec<String>,
    keywords: Vec<Keyword>,
}

const DEFAULT_LEXICON_JSON: &str = include_str!("../assets/lexicon.json");

fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

impl CaptionLexicon {
    /// The lexicon bundled with the crate.
    pub fn default_lexicon() -> CaptionLexicon {
        Self::from_json(DEFAULT_LEXICON_JSON, "<builtin>")
            .expect("bundled lexicon is valid")
    }

    pub fn load(path: &Path) -> Result<CaptionLexicon, CaptionError> {
        let text = std::fs::read_to_string(path).map_err(|source| CaptionError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn from_json(text: &str, origin: &str) -> Result<CaptionLexicon, CaptionError> {
        let raw: RawLexicon = serde_json::from_str(text).map_err(|source| CaptionError::Json {
            path: origin.to_string(),
            source,
        })?;
        let mut categories: BTreeMap<&'static str, Vec<String>> = BTreeMap::new();
        for (name, synonyms) in &raw.categories {
            let cat = category_by_name(name).ok_or_else(|| {
                CaptionError::InvalidLexicon(format!("unknown category `{name}`"))
            })?;
            if synonyms.is_empty() {
                return Err(CaptionError::InvalidLexicon(format!(
                    "category `{name}` has no synonyms"
                )));
            }
            categories.insert(cat.name, synonyms.clone());
        }
        for kind in AttributeKind::ALL {
            for cat in categories_of(kind) {
                let canonical = cat.name.replace('_', " ");
                let listed = categories.get(cat.name).ok_or_else(|| {
                    CaptionError::InvalidLexicon(format!("category `{}` missing", cat.name))
                })?;
                if !listed.iter().any(|s| s.to_lowercase() == canonical) {
                    return Err(CaptionError::InvalidLexicon(format!(
                        "category `{}` lacks its canonical caption `{canonical}`",
                        cat.name
                    )));
                }
            }
        }
        if raw.motion_verbs.is_empty() {
            return Err(CaptionError::InvalidLexicon("no motion verbs".into()));
        }
        for (label, synonyms) in &raw.labels {
            if synonyms.is_empty() {
                return Err(CaptionError::InvalidLexicon(format!(
                    "label `{label}` has no synonyms"
                )));
            }
        }

        let mut keywords = Vec::new();
        let mut seen: BTreeMap<Vec<String>, KeywordTarget> = BTreeMap::new();
        for (name, synonyms) in &categories {
            let cat = category_by_name(name).unwrap();
            for syn in synonyms {
                let tokens = tokenize(syn);
                if tokens.is_empty() {
                    return Err(CaptionError::InvalidLexicon(format!(
                        "empty synonym in `{name}`"
                    )));
                }
                let target = KeywordTarget::Cat(cat);
                if let Some(prev) = seen.get(&tokens) {
                    if *prev != target {
                        return Err(CaptionError::InvalidLexicon(format!(
                            "ambiguous synonym `{syn}`"
                        )));
                    }
                    continue;
                }
                seen.insert(tokens.clone(), target.clone());
                keywords.push(Keyword { tokens, target });
            }
        }
        for verb in &raw.motion_verbs {
            let tokens = tokenize(verb);
            if seen.contains_key(&tokens) {
                return Err(CaptionError::InvalidLexicon(format!(
                    "motion verb `{verb}` collides with a synonym"
                )));
            }
            seen.insert(tokens.clone(), KeywordTarget::Verb);
            keywords.push(Keyword {
                tokens,
                target: KeywordTarget::Verb,
            });
        }
        Ok(CaptionLexicon {
            categories,
            labels: raw.labels,
            motion_verbs: raw.motion_verbs,
            keywords,
        })
    }

    pub fn has_label(&self, label: &str) -> bool {
        self.labels.contains_key(label)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.labels.keys().map(String::as_str)
    }

    fn pick<'a, R: Rng + ?Sized>(items: &'a [String], rng: &mut R) -> &'a str {
        &items[rng.random_range(0..items.len())]
    }

    fn synonym_for<R: Rng + ?Sized>(&self, cat: &Category, rng: &mut R) -> &str {
        Self::pick(&self.categories[cat.name], rng)
    }
}

/// Generates a caption naming the event and each non-omitted attribute with
/// one synonym. Every omittable attribute is independently dropped with
/// probability `omission_prob`; the returned spec records the drops.
pub fn generate_caption<R: Rng + ?Sized>(
    label: &str,
    spec: &MotionSpec,
    lex: &CaptionLexicon,
    rng: &mut R,
    omission_prob: f64,
) -> Result<(String, MotionSpec), CaptionError> {
    let phrases = lex
        .labels
        .get(label)
        .ok_or_else(|| CaptionError::UnknownLabel(label.to_string()))?;
    let event = CaptionLexicon::pick(phrases, rng).to_string();
    let verb = CaptionLexicon::pick(&lex.motion_verbs, rng).to_string();

    let mut omitted = BTreeSet::new();
    for side in [Side::Start, Side::End] {
        for kind in AttributeKind::ALL {
            if spec.triple(side).get(kind).omittable && rng.random_bool(omission_prob) {
                omitted.insert((side, kind));
            }
        }
    }
    let spec = MotionSpec::new(spec.start, spec.end, omitted)?;

    // phrase order: distance, azimuth, elevation
    let phrase = |side: Side, rng: &mut R| {
        let mut words = Vec::new();
        for kind in [
            AttributeKind::Distance,
            AttributeKind::Azimuth,
            AttributeKind::Elevation,
        ] {
            if !spec.is_omitted(side, kind) {
                words.push(lex.synonym_for(spec.triple(side).get(kind), rng).to_string());
            }
        }
        words.join(" ")
    };
    let start_phrase = phrase(Side::Start, rng);
    let end_phrase = phrase(Side::End, rng);

    let caption = match (start_phrase.is_empty(), end_phrase.is_empty()) {
        (false, false) => format!("{event} from the {start_phrase}, {verb} to the {end_phrase}."),
        (true, false) => format!("{event}, {verb} to the {end_phrase}."),
        (false, true) => format!("{event} from the {start_phrase}, {verb} away."),
        (true, true) => format!("{event}, {verb}."),
    };
    Ok((caption, spec))
}

/// Recovers a [`MotionSpec`] from a caption. Longest-match keyword scan;
/// mentions before the first motion verb fill the start slots, mentions
/// after it fill the end slots. Without a motion verb a single mention is
/// static (start = end). Unmatched attributes default to the omittable
/// categories and are recorded as omitted. A caption with no recognized
/// keywords yields the all-default, fully omitted spec.
pub fn parse_caption(caption: &str, lex: &CaptionLexicon) -> MotionSpec {
    let tokens = tokenize(caption);
    let mut matches: Vec<(usize, &KeywordTarget)> = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let best = lex
            .keywords
            .iter()
            .filter(|kw| tokens[i..].starts_with(&kw.tokens[..]))
            .max_by_key(|kw| kw.tokens.len());
        match best {
            Some(kw) => {
                matches.push((i, &kw.target));
                i += kw.tokens.len();
            }
            None => i += 1,
        }
    }
    let verb_pos = matches
        .iter()
        .find(|(_, t)| matches!(t, KeywordTarget::Verb))
        .map(|&(pos, _)| pos);

    let mut omitted = BTreeSet::new();
    let mut pick = |kind: AttributeKind| -> (&'static Category, &'static Category) {
        let mentions: Vec<(usize, &'static Category)> = matches
            .iter()
            .filter_map(|&(pos, t)| match t {
                KeywordTarget::Cat(c) if c.kind == kind => Some((pos, *c)),
                _ => None,
            })
            .collect();
        let (start, end) = match verb_pos {
            Some(vp) => (
                mentions.iter().find(|&&(p, _)| p < vp).map(|&(_, c)| c),
                mentions.iter().find(|&&(p, _)| p > vp).map(|&(_, c)| c),
            ),
            None => match mentions.len() {
                0 => (None, None),
                1 => (Some(mentions[0].1), Some(mentions[0].1)),
                _ => (
                    Some(mentions[0].1),
                    Some(mentions.last().unwrap().1),
                ),
            },
        };
        let default = om_default(kind);
        if start.is_none() {
            omitted.insert((Side::Start, kind));
        }
        if end.is_none() {
            omitted.insert((Side::End, kind));
        }
        (start.unwrap_or(default), end.unwrap_or(default))
    };
    let (s_az, e_az) = pick(AttributeKind::Azimuth);
    let (s_el, e_el) = pick(AttributeKind::Elevation);
    let (s_di, e_di) = pick(AttributeKind::Distance);
    MotionSpec {
        start: CategoryTriple::new(s_az, s_el, s_di).unwrap(),
        end: CategoryTriple::new(e_az, e_el, e_di).unwrap(),
        omitted,
    }
}

/// Category-midpoint endpoints for a parsed spec (`back` maps to ±180°).
pub fn midpoint_endpoints(spec: &MotionSpec) -> SpatialEndpoints {
    let pos = |t: &CategoryTriple| {
        SphericalPos::new(
            t.azimuth.midpoint(),
            t.elevation.midpoint(),
            t.distance.midpoint(),
        )
        .expect("category midpoints are valid positions")
    };
    SpatialEndpoints {
        start: pos(&spec.start),
        end: pos(&spec.end),
    }
}

/// Caption-to-trajectory baseline: parse the caption, take each category's
/// range midpoint as the endpoint coordinate, and synthesize the linear
/// trajectory.
pub fn predict_trajectory_from_caption(
    caption: &str,
    w: EventWindow,
    clip_duration_s: f64,
    lex: &CaptionLexicon,
) -> Result<Trajectory, CaptionError> {
    let spec = parse_caption(caption, lex);
    let endpoints = midpoint_endpoints(&spec);
    Ok(linear_trajectory(&endpoints, w, clip_duration_s)?)
}
