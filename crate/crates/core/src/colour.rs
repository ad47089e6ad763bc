//! Colour metrics from stroke geometry and the palette, without
//! rasterization.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::ink::DrawingSession;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColourSummary {
    pub n_colours: usize,
    /// Ink length per used colour id; tap-only colours appear with 0.
    pub per_colour_length_px: BTreeMap<u8, f64>,
    pub mean_profile: f64,
    pub sd_profile: f64,
    /// Length-weighted mean of each channel, logged for replication.
    pub channel_means: [f64; 3],
}

/// Length-weighted intensity profile of the pooled channel values of the
/// colours used. Falls back to equal weights when no ink has length.
pub fn colour_summary(session: &DrawingSession) -> ColourSummary {
    let mut lengths: BTreeMap<u8, f64> = BTreeMap::new();
    for s in session.strokes() {
        *lengths.entry(s.colour_id).or_default() += s.length_px();
    }
    let total: f64 = lengths.values().sum();
    let weights: Vec<(u8, f64)> = if total > 0.0 {
        lengths.iter().map(|(&c, &l)| (c, l / total)).collect()
    } else {
        let n = lengths.len() as f64;
        lengths.keys().map(|&c| (c, 1.0 / n)).collect()
    };

    let palette = session.palette();
    let mut channel_means = [0.0; 3];
    for &(c, w) in &weights {
        for (m, v) in channel_means.iter_mut().zip(palette.rgb(c)) {
            *m += w * f64::from(v);
        }
    }
    let mean_profile = channel_means.iter().sum::<f64>() / 3.0;
    let var: f64 = weights
        .iter()
        .flat_map(|&(c, w)| palette.rgb(c).map(|v| w / 3.0 * (f64::from(v) - mean_profile).powi(2)))
        .sum();
    log::debug!("{}: channel means {:?}", session.session_id(), channel_means);
    ColourSummary {
        n_colours: lengths.len(),
        per_colour_length_px: lengths,
        mean_profile,
        sd_profile: var.max(0.0).sqrt(),
        channel_means,
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use proptest::prelude::*;

    use super::*;
    use crate::ink::{Palette, Stroke, StrokePoint};

    const BLACK: u8 = 0;
    const RED: u8 = 2;
    const BLUE: u8 = 3;
    const YELLOW: u8 = 9;

    /// Each entry: (colour, polyline).
    fn session(strokes: &[(u8, Vec<(f64, f64)>)]) -> DrawingSession {
        let mut t = 0;
        let strokes = strokes
            .iter()
            .enumerate()
            .map(|(i, (c, pts))| {
                let pts = pts
                    .iter()
                    .map(|&(x, y)| {
                        t += 5;
                        StrokePoint::new(t, x, y)
                    })
                    .collect();
                t += 20;
                Stroke::new(i as u32, *c, pts)
            })
            .collect();
        DrawingSession::new("s", BTreeMap::new(), 400, 400, Palette::default(), strokes).unwrap()
    }

    fn line(y: f64, len: f64) -> Vec<(f64, f64)> {
        vec![(50.0, y), (50.0 + len, y)]
    }

    #[test]
    fn single_colours() {
        let black = colour_summary(&session(&[(BLACK, line(10.0, 100.0))]));
        assert_eq!((black.mean_profile, black.sd_profile, black.n_colours), (0.0, 0.0, 1));

        let yellow = colour_summary(&session(&[(YELLOW, line(10.0, 100.0))]));
        assert!((yellow.mean_profile - 170.0).abs() < 1e-12);
        assert!((yellow.sd_profile - 120.208).abs() < 1e-3);
    }

    #[test]
    fn equal_lengths_average() {
        let s = colour_summary(&session(&[(BLACK, line(10.0, 100.0)), (YELLOW, line(50.0, 100.0))]));
        assert!((s.mean_profile - 85.0).abs() < 1e-12);
        let three =
            colour_summary(&session(&[(BLACK, line(10.0, 10.0)), (RED, line(20.0, 10.0)), (BLUE, line(30.0, 10.0))]));
        assert_eq!(three.n_colours, 3);
    }

    #[test]
    fn taps_count_and_fall_back_to_equal_weights() {
        let s = colour_summary(&session(&[(BLACK, vec![(1.0, 1.0)]), (YELLOW, vec![(2.0, 2.0)])]));
        assert_eq!(s.n_colours, 2);
        assert!((s.mean_profile - 85.0).abs() < 1e-12);
        let mixed = colour_summary(&session(&[(BLACK, line(10.0, 50.0)), (YELLOW, vec![(2.0, 2.0)])]));
        assert_eq!(mixed.n_colours, 2);
        assert_eq!(mixed.mean_profile, 0.0);
    }

    /// Stamps each segment as an 8 px wide butt-capped rectangle on a white
    /// canvas and averages the non-white pixels' intensities.
    fn raster_mean(session: &DrawingSession) -> f64 {
        let (w, h) = (session.screen_w() as usize, session.screen_h() as usize);
        let mut canvas: Vec<Option<[u8; 3]>> = vec![None; w * h];
        for s in session.strokes() {
            let rgb = session.palette().rgb(s.colour_id);
            for seg in s.points.windows(2) {
                let (ax, ay, bx, by) = (seg[0].x_px, seg[0].y_px, seg[1].x_px, seg[1].y_px);
                let len = (bx - ax).hypot(by - ay);
                if len == 0.0 {
                    continue;
                }
                let (ux, uy) = ((bx - ax) / len, (by - ay) / len);
                for py in 0..h {
                    for px in 0..w {
                        let (cx, cy) = (px as f64 + 0.5 - ax, py as f64 + 0.5 - ay);
                        let along = cx * ux + cy * uy;
                        let across = (-cx * uy + cy * ux).abs();
                        if (0.0..len).contains(&along) && across < 4.0 {
                            canvas[py * w + px] = Some(rgb);
                        }
                    }
                }
            }
        }
        let inked: Vec<f64> =
            canvas.iter().flatten().map(|c| c.iter().map(|&v| f64::from(v)).sum::<f64>() / 3.0).collect();
        inked.iter().sum::<f64>() / inked.len() as f64
    }

    #[test]
    fn analytic_mean_matches_raster_oracle() {
        let cases = [
            vec![(BLACK, line(20.0, 300.0)), (YELLOW, line(60.0, 100.0))],
            vec![(RED, line(20.0, 120.0)), (YELLOW, vec![(50.0, 100.0), (50.0, 300.0)]), (9u8, line(350.0, 60.0))],
            vec![(7u8, vec![(100.0, 100.0), (250.0, 250.0)]), (BLUE, line(300.0, 200.0))],
        ];
        for strokes in cases {
            let s = session(&strokes);
            let analytic = colour_summary(&s).mean_profile;
            let raster = raster_mean(&s);
            assert!((analytic - raster).abs() < 2.0, "{analytic} vs {raster}");
        }
    }

    proptest! {
        #[test]
        fn bounds_and_order_invariance(specs in prop::collection::vec((0u8..10, 0.0f64..300.0), 1..8)) {
            let strokes: Vec<(u8, Vec<(f64, f64)>)> = specs
                .iter()
                .enumerate()
                .map(|(i, &(c, len))| (c, line(10.0 + 40.0 * i as f64, len)))
                .collect();
            let a = colour_summary(&session(&strokes));
            prop_assert!((0.0..=255.0).contains(&a.mean_profile));
            prop_assert!((0.0..=127.5).contains(&a.sd_profile));
            let mut rev = strokes.clone();
            rev.reverse();
            let b = colour_summary(&session(&rev));
            prop_assert!((a.mean_profile - b.mean_profile).abs() < 1e-9);
            prop_assert!((a.sd_profile - b.sd_profile).abs() < 1e-9);
            prop_assert_eq!(a.n_colours, b.n_colours);
        }
    }
}
