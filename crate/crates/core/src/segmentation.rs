//! Reduces raw point streams to steps between keypoints, and steps to
//! turning angles.

use serde::{Deserialize, Serialize};

use crate::ink::{DrawingSession, Stroke, StrokePoint};
use crate::scalar::Scalar;

/// Steps at or below this length are treated as sensor jitter and dropped.
pub const MIN_STEP_PX: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Simplification {
    /// Ramer–Douglas–Peucker with tolerance `epsilon_px`.
    Rdp { epsilon_px: f64 },
    /// A new keypoint whenever the accumulated heading change exceeds
    /// `max_turn_deg`.
    AngleThreshold { max_turn_deg: f64 },
}

impl Default for Simplification {
    fn default() -> Self {
        Simplification::Rdp { epsilon_px: MIN_STEP_PX }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Keypoints {
    pub stroke_id: u32,
    pub points: Vec<StrokePoint>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step<T> {
    pub length_px: T,
    /// Heading in `[0, 360)`.
    pub heading_deg: T,
    pub stroke_id: u32,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct StepSeries<T> {
    steps: Vec<Step<T>>,
}

impl<T: Scalar> StepSeries<T> {
    pub fn steps(&self) -> &[Step<T>] {
        &self.steps
    }

    pub fn lengths(&self) -> Vec<T> {
        self.steps.iter().map(|s| s.length_px).collect()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Builds a series directly from lengths, headings zero, one stroke.
    /// Lengths at or below [`MIN_STEP_PX`] are filtered like extracted steps.
    pub fn from_lengths(lengths: &[T]) -> Self {
        let min = T::of(MIN_STEP_PX);
        Self {
            steps: lengths
                .iter()
                .filter(|&&l| l > min)
                .map(|&l| Step { length_px: l, heading_deg: T::zero(), stroke_id: 0 })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TurningAngles<T> {
    pub angles_deg: Vec<T>,
}

fn segment_distance(p: &StrokePoint, a: &StrokePoint, b: &StrokePoint) -> f64 {
    let (dx, dy) = (b.x_px - a.x_px, b.y_px - a.y_px);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = (((p.x_px - a.x_px) * dx + (p.y_px - a.y_px) * dy) / len2).clamp(0.0, 1.0);
    (p.x_px - (a.x_px + t * dx)).hypot(p.y_px - (a.y_px + t * dy))
}

fn rdp(points: &[StrokePoint], epsilon: f64) -> Vec<StrokePoint> {
    let n = points.len();
    let mut keep = vec![false; n];
    keep[0] = true;
    keep[n - 1] = true;
    let mut stack = vec![(0usize, n - 1)];
    while let Some((lo, hi)) = stack.pop() {
        if hi <= lo + 1 {
            continue;
        }
        let (mut best, mut best_d) = (lo, 0.0);
        for i in lo + 1..hi {
            let d = segment_distance(&points[i], &points[lo], &points[hi]);
            if d > best_d {
                best = i;
                best_d = d;
            }
        }
        if best_d > epsilon {
            keep[best] = true;
            stack.push((lo, best));
            stack.push((best, hi));
        }
    }
    points.iter().zip(keep).filter_map(|(p, k)| k.then_some(*p)).collect()
}

fn wrap_signed_deg(d: f64) -> f64 {
    let mut d = d % 360.0;
    if d > 180.0 {
        d -= 360.0;
    } else if d < -180.0 {
        d += 360.0;
    }
    d
}

fn angle_threshold(points: &[StrokePoint], max_turn_deg: f64) -> Vec<StrokePoint> {
    let mut out = vec![points[0]];
    let mut prev_heading: Option<f64> = None;
    let mut turn = 0.0;
    for w in points.windows(2) {
        let (dx, dy) = (w[1].x_px - w[0].x_px, w[1].y_px - w[0].y_px);
        if dx == 0.0 && dy == 0.0 {
            continue;
        }
        let h = dy.atan2(dx).to_degrees();
        if let Some(p) = prev_heading {
            turn += wrap_signed_deg(h - p);
            if turn.abs() > max_turn_deg {
                if out.last() != Some(&w[0]) {
                    out.push(w[0]);
                }
                turn = 0.0;
            }
        }
        prev_heading = Some(h);
    }
    let last = points[points.len() - 1];
    if out.last() != Some(&last) {
        out.push(last);
    }
    out
}

/// Keypoints of a stroke; always includes the first and last point.
pub fn select_keypoints(stroke: &Stroke, method: Simplification) -> Vec<StrokePoint> {
    let pts = &stroke.points;
    if pts.len() <= 2 {
        return pts.clone();
    }
    match method {
        Simplification::Rdp { epsilon_px } => rdp(pts, epsilon_px),
        Simplification::AngleThreshold { max_turn_deg } => angle_threshold(pts, max_turn_deg),
    }
}

/// Heading of the vector `(dx, dy)` in degrees, in `[0, 360)`.
pub fn heading_deg<T: Scalar>(dx: T, dy: T) -> T {
    let full = T::of(360.0);
    let h = dy.atan2(dx).to_degrees();
    let h = if h < T::zero() { h + full } else { h };
    if h >= full {
        T::zero()
    } else {
        h
    }
}

/// Consecutive keypoints become steps; steps of [`MIN_STEP_PX`] or less are
/// discarded. Steps never join two strokes.
pub fn extract_steps<T: Scalar>(keypoints: &[Keypoints]) -> StepSeries<T> {
    let min = T::of(MIN_STEP_PX);
    let mut steps = Vec::new();
    for kp in keypoints {
        for w in kp.points.windows(2) {
            let dx = T::of(w[1].x_px - w[0].x_px);
            let dy = T::of(w[1].y_px - w[0].y_px);
            let length_px = dx.hypot(dy);
            if length_px > min {
                steps.push(Step { length_px, heading_deg: heading_deg(dx, dy), stroke_id: kp.stroke_id });
            }
        }
    }
    StepSeries { steps }
}

/// Simplifies every stroke and extracts its steps.
pub fn session_steps<T: Scalar>(session: &DrawingSession, method: Simplification) -> StepSeries<T> {
    let kps: Vec<Keypoints> = session
        .strokes()
        .iter()
        .map(|s| Keypoints { stroke_id: s.stroke_id, points: select_keypoints(s, method) })
        .collect();
    extract_steps(&kps)
}

/// Absolute heading change folded into `[0, 180]`.
pub fn fold_angle<T: Scalar>(h1: T, h2: T) -> T {
    let full = T::of(360.0);
    let d = (h2 - h1).abs() % full;
    if d > T::of(180.0) {
        full - d
    } else {
        d
    }
}

/// Turning angles between consecutive steps. With `across_strokes` false,
/// pairs straddling a pen lift are skipped.
pub fn turning_angles<T: Scalar>(series: &StepSeries<T>, across_strokes: bool) -> TurningAngles<T> {
    let angles_deg = series
        .steps
        .windows(2)
        .filter(|w| across_strokes || w[0].stroke_id == w[1].stroke_id)
        .map(|w| fold_angle(w[0].heading_deg, w[1].heading_deg))
        .collect();
    TurningAngles { angles_deg }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn stroke(xy: &[(f64, f64)]) -> Stroke {
        Stroke::new(0, 0, xy.iter().enumerate().map(|(i, &(x, y))| StrokePoint::new(i as i64, x, y)).collect())
    }

    const RDP10: Simplification = Simplification::Rdp { epsilon_px: 10.0 };

    #[test]
    fn straight_line_collapses() {
        let s = stroke(&(0..100).map(|i| (i as f64, 2.0 * i as f64)).collect::<Vec<_>>());
        let k = select_keypoints(&s, RDP10);
        assert_eq!(k.len(), 2);
        assert_eq!(k[0], s.points[0]);
        assert_eq!(k[1], s.points[99]);
    }

    #[test]
    fn right_angle_keeps_corner() {
        let mut xy: Vec<(f64, f64)> = (0..=200).map(|i| (i as f64, 0.0)).collect();
        xy.extend((1..=200).map(|i| (200.0, i as f64)));
        let s = stroke(&xy);
        // Corner lies 200/sqrt(2) from the end-to-end chord.
        let chord = segment_distance(&s.points[200], &s.points[0], &s.points[400]);
        assert!((chord - 200.0 / 2f64.sqrt()).abs() < 1e-9);
        let k = select_keypoints(&s, RDP10);
        assert_eq!(
            k.iter().map(|p| (p.x_px, p.y_px)).collect::<Vec<_>>(),
            vec![(0.0, 0.0), (200.0, 0.0), (200.0, 200.0)]
        );
        let a = select_keypoints(&s, Simplification::AngleThreshold { max_turn_deg: 30.0 });
        assert_eq!(a.len(), 3);
    }

    #[test]
    fn two_point_stroke_is_identity() {
        let s = stroke(&[(0.0, 0.0), (5.0, 5.0)]);
        assert_eq!(select_keypoints(&s, RDP10), s.points);
    }

    #[test]
    fn steps_from_keypoints() {
        let kp = |id, xy: &[(f64, f64)]| Keypoints { stroke_id: id, points: stroke(xy).points };
        let s: StepSeries<f64> = extract_steps(&[kp(0, &[(0.0, 0.0), (30.0, 40.0)])]);
        assert_eq!(s.len(), 1);
        assert_eq!(s.steps()[0].length_px, 50.0);
        assert!((s.steps()[0].heading_deg - 40f64.atan2(30.0).to_degrees()).abs() < 1e-12);

        let s: StepSeries<f64> = extract_steps(&[kp(0, &[(0.0, 0.0), (3.0, 4.0)])]);
        assert!(s.is_empty());

        let s: StepSeries<f64> =
            extract_steps(&[kp(0, &[(0.0, 0.0), (50.0, 0.0)]), kp(1, &[(400.0, 0.0), (400.0, 60.0)])]);
        assert_eq!(s.len(), 2);
        assert_eq!(s.steps()[1].stroke_id, 1);
        assert!(turning_angles(&s, false).angles_deg.is_empty());
        assert_eq!(turning_angles(&s, true).angles_deg, vec![90.0]);
    }

    #[test]
    fn angle_folding() {
        assert_eq!(fold_angle(0.0, 90.0), 90.0);
        assert!((fold_angle(350.0f64, 10.0) - 20.0).abs() < 1e-12);
        assert_eq!(fold_angle(45.0, 45.0), 0.0);
        assert!((fold_angle(10.0f64, 350.0) - 20.0).abs() < 1e-12);
    }

    fn dot_angle(h1: f64, h2: f64) -> f64 {
        let (a, b) = (h1.to_radians(), h2.to_radians());
        let c = (a.cos() * b.cos() + a.sin() * b.sin()).clamp(-1.0, 1.0);
        c.acos().to_degrees()
    }

    fn arb_stroke() -> impl Strategy<Value = Stroke> {
        prop::collection::vec((0.0f64..1000.0, 0.0f64..1000.0), 2..60).prop_map(|xy| stroke(&xy))
    }

    proptest! {
        #[test]
        fn rdp_is_idempotent(s in arb_stroke(), eps in 1.0f64..50.0) {
            let m = Simplification::Rdp { epsilon_px: eps };
            let once = select_keypoints(&s, m);
            let twice = select_keypoints(&Stroke::new(0, 0, once.clone()), m);
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn rdp_tolerance_holds(s in arb_stroke(), eps in 1.0f64..50.0) {
            let k = select_keypoints(&s, Simplification::Rdp { epsilon_px: eps });
            prop_assert_eq!(k[0], s.points[0]);
            prop_assert_eq!(*k.last().unwrap(), *s.points.last().unwrap());
            for p in &s.points {
                let d = k.windows(2).map(|w| segment_distance(p, &w[0], &w[1])).fold(f64::INFINITY, f64::min);
                prop_assert!(d <= eps + 1e-9);
            }
        }

        #[test]
        fn steps_and_angles_bounded(s in arb_stroke()) {
            let kps = vec![Keypoints { stroke_id: 0, points: select_keypoints(&s, RDP10) }];
            let series: StepSeries<f64> = extract_steps(&kps);
            prop_assert!(series.steps().iter().all(|st| st.length_px > 10.0));
            prop_assert!(series.steps().iter().all(|st| (0.0..360.0).contains(&st.heading_deg)));
            for a in turning_angles(&series, false).angles_deg {
                prop_assert!((0.0..=180.0).contains(&a));
            }
        }

        #[test]
        fn heading_difference_matches_dot_product(h1 in 0.0f64..360.0, h2 in 0.0f64..360.0) {
            // acos is ill-conditioned at the ends of its range
            let a = fold_angle(h1, h2);
            prop_assume!(a > 0.5 && a < 179.5);
            prop_assert!((fold_angle(h1, h2) - dot_angle(h1, h2)).abs() < 1e-9);
        }
    }
}
