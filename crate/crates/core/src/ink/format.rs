use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{DrawingSession, Palette, Stroke, StrokePoint, PALETTE_SIZE};
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 6] = ["session_id", "stroke_id", "colour_id", "t_ms", "x_px", "y_px"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SessionFormat {
    /// Canonical point CSV; screen geometry comes from a [`SessionMeta`] sidecar.
    Csv,
    /// Self-contained JSON: the sidecar fields plus a `strokes` array.
    Json,
}

/// Metadata sidecar accompanying a stroke CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionMeta {
    pub session_id: String,
    pub screen_w: u32,
    pub screen_h: u32,
    #[serde(default)]
    pub labels: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub palette: Option<Vec<[u8; 3]>>,
}

impl SessionMeta {
    pub fn of(session: &DrawingSession) -> Self {
        Self {
            session_id: session.session_id().to_string(),
            screen_w: session.screen_w(),
            screen_h: session.screen_h(),
            labels: session.labels().clone(),
            palette: (!session.palette().is_default())
                .then(|| session.palette().entries().iter().map(|e| e.rgb).collect()),
        }
    }

    fn palette(&self) -> Result<Palette> {
        match &self.palette {
            Some(rgbs) => Palette::from_rgb(rgbs),
            None => Ok(Palette::default()),
        }
    }
}

#[derive(Debug, Deserialize)]
struct JsonStroke {
    stroke_id: u32,
    colour_id: i64,
    points: Vec<(i64, f64, f64)>,
}

#[derive(Debug, Deserialize)]
struct JsonSession {
    #[serde(flatten)]
    meta: SessionMeta,
    strokes: Vec<JsonStroke>,
}

/// Parses and validates a session. CSV input requires the metadata sidecar.
pub fn parse_session(bytes: &[u8], format: SessionFormat, meta: Option<&SessionMeta>) -> Result<DrawingSession> {
    match format {
        SessionFormat::Csv => {
            let meta = meta.ok_or_else(|| Error::InvalidArgument("CSV sessions need a metadata sidecar".into()))?;
            parse_csv(bytes, meta)
        }
        SessionFormat::Json => parse_json(bytes),
    }
}

fn parse_json(bytes: &[u8]) -> Result<DrawingSession> {
    let doc: JsonSession =
        serde_json::from_slice(bytes).map_err(|e| Error::Parse { line: e.line(), message: e.to_string() })?;
    let mut strokes = Vec::with_capacity(doc.strokes.len());
    for s in doc.strokes {
        if !(0..PALETTE_SIZE as i64).contains(&s.colour_id) {
            return Err(Error::validation(format!("stroke {}: colour_id {} outside 0..9", s.stroke_id, s.colour_id)));
        }
        let points = s.points.into_iter().map(|(t, x, y)| StrokePoint::new(t, x, y)).collect();
        strokes.push(Stroke::new(s.stroke_id, s.colour_id as u8, points));
    }
    let palette = doc.meta.palette()?;
    DrawingSession::new(doc.meta.session_id, doc.meta.labels, doc.meta.screen_w, doc.meta.screen_h, palette, strokes)
}

fn field(rec: &csv::StringRecord, idx: usize, line: usize) -> Result<&str> {
    rec.get(idx).ok_or_else(|| Error::Parse { line, message: format!("missing field '{}'", CSV_HEADER[idx]) })
}

fn parse_num<N: std::str::FromStr>(s: &str, name: &str, line: usize) -> Result<N> {
    s.trim().parse().map_err(|_| Error::Parse { line, message: format!("malformed {name} '{s}'") })
}

fn parse_csv(bytes: &[u8], meta: &SessionMeta) -> Result<DrawingSession> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(bytes);
    let header = rdr.headers().map_err(|e| Error::Parse { line: 1, message: e.to_string() })?;
    if header.iter().map(str::trim).ne(CSV_HEADER.iter().copied()) {
        return Err(Error::Parse { line: 1, message: format!("expected header '{}'", CSV_HEADER.join(",")) });
    }

    let mut strokes: Vec<Stroke> = Vec::new();
    let mut seen: BTreeSet<u32> = BTreeSet::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != CSV_HEADER.len() {
            return Err(Error::Parse {
                line,
                message: format!("expected {} fields, found {}", CSV_HEADER.len(), rec.len()),
            });
        }
        let sid = field(&rec, 0, line)?.trim();
        if sid != meta.session_id {
            return Err(Error::at_line(
                line,
                format!("session_id '{sid}' does not match sidecar '{}'", meta.session_id),
            ));
        }
        let stroke_id: u32 = parse_num(field(&rec, 1, line)?, "stroke_id", line)?;
        let colour_id: i64 = parse_num(field(&rec, 2, line)?, "colour_id", line)?;
        let t_ms: i64 = parse_num(field(&rec, 3, line)?, "t_ms", line)?;
        let x_px: f64 = parse_num(field(&rec, 4, line)?, "x_px", line)?;
        let y_px: f64 = parse_num(field(&rec, 5, line)?, "y_px", line)?;

        if !(0..PALETTE_SIZE as i64).contains(&colour_id) {
            return Err(Error::at_line(line, format!("colour_id {colour_id} outside 0..9")));
        }
        if t_ms < 0 {
            return Err(Error::at_line(line, "negative t_ms"));
        }
        let point = StrokePoint::new(t_ms, x_px, y_px);

        match strokes.last_mut() {
            Some(cur) if cur.stroke_id == stroke_id => {
                if cur.colour_id as i64 != colour_id {
                    return Err(Error::at_line(line, format!("stroke {stroke_id} changes colour")));
                }
                if t_ms <= cur.last_ms() {
                    return Err(Error::at_line(line, format!("non-monotone time in stroke {stroke_id}")));
                }
                cur.points.push(point);
            }
            _ => {
                if !seen.insert(stroke_id) {
                    return Err(Error::at_line(line, format!("rows of stroke {stroke_id} are not contiguous")));
                }
                strokes.push(Stroke::new(stroke_id, colour_id as u8, vec![point]));
            }
        }
    }
    DrawingSession::new(
        meta.session_id.clone(),
        meta.labels.clone(),
        meta.screen_w,
        meta.screen_h,
        meta.palette()?,
        strokes,
    )
}

/// Canonical CSV: header, then one row per point. Reals use the shortest
/// representation that parses back to the same value.
pub fn write_session_csv(session: &DrawingSession) -> String {
    let mut out = String::new();
    out.push_str(&CSV_HEADER.join(","));
    out.push('\n');
    for s in session.strokes() {
        for p in &s.points {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                session.session_id(),
                s.stroke_id,
                s.colour_id,
                p.t_ms,
                p.x_px,
                p.y_px
            );
        }
    }
    out
}

pub fn write_sidecar_json(session: &DrawingSession) -> String {
    let mut s = serde_json::to_string_pretty(&SessionMeta::of(session)).expect("plain struct");
    s.push('\n');
    s
}
