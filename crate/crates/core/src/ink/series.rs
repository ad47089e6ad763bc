use super::DrawingSession;
use crate::error::{Error, Result};
use crate::temporal::BinarySeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentKind {
    Drawing,
    Gap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub kind: SegmentKind,
    pub duration_ms: i64,
}

/// Samples the session at a fixed rate: bit `i` is set iff the midpoint of
/// bin `i` falls inside some stroke's `[first, last]` interval.
pub fn binary_series(session: &DrawingSession, dt_ms: i64) -> Result<BinarySeries> {
    if dt_ms <= 0 {
        return Err(Error::InvalidArgument(format!("dt_ms must be positive, got {dt_ms}")));
    }
    let span = session.span_ms();
    if span < dt_ms {
        return Err(Error::InsufficientData(format!("session too short: span {span} ms is under one {dt_ms} ms bin")));
    }
    let start = session.first_ms();
    let n_bins = ((span + dt_ms - 1) / dt_ms) as usize;
    let strokes = session.strokes();
    let mut bits = Vec::with_capacity(n_bins);
    let mut cursor = 0usize;
    for i in 0..n_bins {
        // Twice the midpoint keeps everything in integers.
        let mid2 = 2 * start + (2 * i as i64 + 1) * dt_ms;
        while cursor < strokes.len() && 2 * strokes[cursor].last_ms() < mid2 {
            cursor += 1;
        }
        let on = cursor < strokes.len() && 2 * strokes[cursor].first_ms() <= mid2;
        bits.push(on as u8);
    }
    BinarySeries::new(dt_ms, bits)
}

/// Alternating drawing/gap segments. Taps get a 1 ms drawing floor and
/// zero-length gaps are dropped.
pub fn sequence_segments(session: &DrawingSession) -> Vec<Segment> {
    let strokes = session.strokes();
    let mut out = Vec::with_capacity(2 * strokes.len());
    for (i, s) in strokes.iter().enumerate() {
        if i > 0 {
            let gap = s.first_ms() - strokes[i - 1].last_ms();
            if gap > 0 {
                out.push(Segment { kind: SegmentKind::Gap, duration_ms: gap });
            }
        }
        out.push(Segment { kind: SegmentKind::Drawing, duration_ms: s.drawing_ms() });
    }
    out
}
