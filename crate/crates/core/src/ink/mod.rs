//! Stroke-level domain model: points, strokes, palette and whole sessions.

mod format;
mod series;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use format::{parse_session, write_session_csv, write_sidecar_json, SessionFormat, SessionMeta};
pub use series::{binary_series, sequence_segments, Segment, SegmentKind};

pub const PALETTE_SIZE: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrokePoint {
    pub t_ms: i64,
    pub x_px: f64,
    pub y_px: f64,
}

impl StrokePoint {
    pub fn new(t_ms: i64, x_px: f64, y_px: f64) -> Self {
        Self { t_ms, x_px, y_px }
    }

    pub fn distance(&self, other: &StrokePoint) -> f64 {
        (self.x_px - other.x_px).hypot(self.y_px - other.y_px)
    }
}

/// One continuous pen-down trace in a single colour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stroke {
    pub stroke_id: u32,
    pub colour_id: u8,
    pub points: Vec<StrokePoint>,
}

impl Stroke {
    pub fn new(stroke_id: u32, colour_id: u8, points: Vec<StrokePoint>) -> Self {
        Self { stroke_id, colour_id, points }
    }

    pub fn first_ms(&self) -> i64 {
        self.points[0].t_ms
    }

    pub fn last_ms(&self) -> i64 {
        self.points[self.points.len() - 1].t_ms
    }

    /// Pen-down duration with the 1 ms floor applied to taps.
    pub fn drawing_ms(&self) -> i64 {
        (self.last_ms() - self.first_ms()).max(1)
    }

    /// Polyline length over the raw points.
    pub fn length_px(&self) -> f64 {
        self.points.windows(2).map(|w| w[0].distance(&w[1])).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaletteEntry {
    pub name: String,
    pub rgb: [u8; 3],
}

/// The ten selectable ink colours. White is reserved for the background.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Palette {
    entries: Vec<PaletteEntry>,
}

const DEFAULT_PALETTE: [(&str, [u8; 3]); PALETTE_SIZE] = [
    ("black", [0x00, 0x00, 0x00]),
    ("grey", [0x80, 0x80, 0x80]),
    ("red", [0xFF, 0x00, 0x00]),
    ("blue", [0x00, 0x00, 0xFF]),
    ("dark green", [0x00, 0x64, 0x00]),
    ("light green", [0x90, 0xEE, 0x90]),
    ("sky blue", [0x87, 0xCE, 0xEB]),
    ("brown", [0x8B, 0x45, 0x13]),
    ("orange", [0xFF, 0xA5, 0x00]),
    ("yellow", [0xFF, 0xFF, 0x00]),
];

impl Default for Palette {
    fn default() -> Self {
        Self {
            entries: DEFAULT_PALETTE
                .iter()
                .map(|(name, rgb)| PaletteEntry { name: name.to_string(), rgb: *rgb })
                .collect(),
        }
    }
}

impl Palette {
    pub fn new(entries: Vec<PaletteEntry>) -> Result<Self> {
        if entries.len() != PALETTE_SIZE {
            return Err(Error::validation(format!(
                "palette must have exactly {PALETTE_SIZE} entries, got {}",
                entries.len()
            )));
        }
        if let Some(e) = entries.iter().find(|e| e.rgb == [255, 255, 255]) {
            return Err(Error::validation(format!(
                "palette entry '{}' is white, which is reserved for the background",
                e.name
            )));
        }
        Ok(Self { entries })
    }

    /// Builds a palette from bare RGB triples, naming entries after the
    /// default palette slot they occupy.
    pub fn from_rgb(rgbs: &[[u8; 3]]) -> Result<Self> {
        let entries = rgbs
            .iter()
            .enumerate()
            .map(|(i, rgb)| PaletteEntry {
                name: DEFAULT_PALETTE.get(i).map(|(n, _)| n.to_string()).unwrap_or_else(|| format!("colour{i}")),
                rgb: *rgb,
            })
            .collect();
        Self::new(entries)
    }

    pub fn entries(&self) -> &[PaletteEntry] {
        &self.entries
    }

    pub fn rgb(&self, colour_id: u8) -> [u8; 3] {
        self.entries[colour_id as usize].rgb
    }

    pub fn is_default(&self) -> bool {
        *self == Palette::default()
    }
}

/// A validated drawing: ordered, non-overlapping strokes on a fixed screen.
#[derive(Debug, Clone, PartialEq)]
pub struct DrawingSession {
    session_id: String,
    labels: BTreeMap<String, String>,
    screen_w: u32,
    screen_h: u32,
    palette: Palette,
    strokes: Vec<Stroke>,
}

impl DrawingSession {
    /// Validates and assembles a session. Errors name the offending stroke.
    pub fn new(
        session_id: impl Into<String>,
        labels: BTreeMap<String, String>,
        screen_w: u32,
        screen_h: u32,
        palette: Palette,
        strokes: Vec<Stroke>,
    ) -> Result<Self> {
        if screen_w == 0 || screen_h == 0 {
            return Err(Error::validation("screen dimensions must be positive"));
        }
        let total_points: usize = strokes.iter().map(|s| s.points.len()).sum();
        if strokes.is_empty() || total_points < 2 {
            return Err(Error::validation("session needs at least one stroke and two points"));
        }
        let (w, h) = (screen_w as f64, screen_h as f64);
        for s in &strokes {
            if s.points.is_empty() {
                return Err(Error::validation(format!("stroke {} has no points", s.stroke_id)));
            }
            if s.colour_id as usize >= PALETTE_SIZE {
                return Err(Error::validation(format!(
                    "stroke {}: colour_id {} outside 0..9",
                    s.stroke_id, s.colour_id
                )));
            }
            for p in &s.points {
                if p.t_ms < 0 {
                    return Err(Error::validation(format!("stroke {}: negative t_ms", s.stroke_id)));
                }
                if !(p.x_px.is_finite() && p.y_px.is_finite())
                    || p.x_px < 0.0
                    || p.x_px > w
                    || p.y_px < 0.0
                    || p.y_px > h
                {
                    return Err(Error::validation(format!(
                        "stroke {}: point ({}, {}) outside the {screen_w}x{screen_h} screen",
                        s.stroke_id, p.x_px, p.y_px
                    )));
                }
            }
            if s.points.windows(2).any(|w| w[1].t_ms <= w[0].t_ms) {
                return Err(Error::validation(format!("stroke {}: non-monotone time", s.stroke_id)));
            }
        }
        for pair in strokes.windows(2) {
            if pair[1].first_ms() < pair[0].last_ms() {
                return Err(Error::validation(format!(
                    "strokes {} and {} overlap in time",
                    pair[0].stroke_id, pair[1].stroke_id
                )));
            }
        }
        Ok(Self { session_id: session_id.into(), labels, screen_w, screen_h, palette, strokes })
    }

    pub fn session_id(&self) -> &str {
        &self.session_id
    }

    pub fn labels(&self) -> &BTreeMap<String, String> {
        &self.labels
    }

    pub fn screen_w(&self) -> u32 {
        self.screen_w
    }

    pub fn screen_h(&self) -> u32 {
        self.screen_h
    }

    pub fn palette(&self) -> &Palette {
        &self.palette
    }

    pub fn strokes(&self) -> &[Stroke] {
        &self.strokes
    }

    pub fn first_ms(&self) -> i64 {
        self.strokes[0].first_ms()
    }

    pub fn last_ms(&self) -> i64 {
        self.strokes[self.strokes.len() - 1].last_ms()
    }

    pub fn span_ms(&self) -> i64 {
        self.last_ms() - self.first_ms()
    }

    pub fn points(&self) -> impl Iterator<Item = &StrokePoint> {
        self.strokes.iter().flat_map(|s| s.points.iter())
    }

    /// Copy of the session with strokes reordered; only for order-invariance
    /// checks, the result is not time-consistent.
    #[doc(hidden)]
    pub fn with_strokes_unchecked(&self, strokes: Vec<Stroke>) -> Self {
        Self { strokes, ..self.clone() }
    }
}
