//! Self-intersection detection for closed sampled curves.
//!
//! Events are segment endpoints sorted by x; an active set holds segments
//! whose x-interval overlaps the sweep front, and only active pairs with
//! overlapping y-intervals are tested. For finely sampled curves the active
//! overlap is small and the scan runs in O(M log M) plus a near-linear
//! number of pair tests.

type P = (f64, f64);

fn cross(o: P, a: P, b: P) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn bbox_overlap(a_lo: f64, a_hi: f64, b_lo: f64, b_hi: f64) -> bool {
    a_lo <= b_hi && b_lo <= a_hi
}

fn on_segment(p: P, q: P, r: P, eps: f64) -> bool {
    r.0 >= p.0.min(q.0) - eps
        && r.0 <= p.0.max(q.0) + eps
        && r.1 >= p.1.min(q.1) - eps
        && r.1 <= p.1.max(q.1) + eps
}

/// Proper or touching intersection of segments [p1,p2] and [q1,q2].
fn segments_intersect(p1: P, p2: P, q1: P, q2: P, eps: f64) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    if ((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps))
        && ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps))
    {
        return true;
    }
    // Touching and collinear cases.
    (d1.abs() <= eps && on_segment(q1, q2, p1, eps))
        || (d2.abs() <= eps && on_segment(q1, q2, p2, eps))
        || (d3.abs() <= eps && on_segment(p1, p2, q1, eps))
        || (d4.abs() <= eps && on_segment(p1, p2, q2, eps))
}

fn adjacent(i: usize, j: usize, m: usize) -> bool {
    let d = i.abs_diff(j);
    d <= 1 || d == m - 1
}

/// First pair of non-adjacent segments of the closed polyline that
/// intersect, scanning by segment order; `None` when the curve is simple at
/// this resolution.
pub fn closed_polyline_self_intersection(points: &[P]) -> Option<(usize, usize)> {
    let m = points.len();
    if m < 8 {
        return None;
    }
    let scale = points
        .iter()
        .map(|p| p.0.abs().max(p.1.abs()))
        .fold(0.0f64, f64::max)
        .max(1.0);
    let eps = 1e-14 * scale * scale;

    let seg = |i: usize| -> (P, P) { (points[i], points[(i + 1) % m]) };
    let mut order: Vec<usize> = (0..m).collect();
    let min_x = |i: usize| -> f64 {
        let (p, q) = seg(i);
        p.0.min(q.0)
    };
    let max_x = |i: usize| -> f64 {
        let (p, q) = seg(i);
        p.0.max(q.0)
    };
    order.sort_by(|a, b| min_x(*a).partial_cmp(&min_x(*b)).expect("finite"));

    let mut active: Vec<usize> = Vec::new();
    let mut best: Option<(usize, usize)> = None;
    for &i in &order {
        let x0 = min_x(i);
        active.retain(|&j| max_x(j) >= x0 - eps);
        let (p1, p2) = seg(i);
        let (ylo, yhi) = (p1.1.min(p2.1), p1.1.max(p2.1));
        for &j in &active {
            if adjacent(i, j, m) {
                continue;
            }
            let (q1, q2) = seg(j);
            if !bbox_overlap(ylo - eps, yhi + eps, q1.1.min(q2.1), q1.1.max(q2.1)) {
                continue;
            }
            if segments_intersect(p1, p2, q1, q2, eps) {
                let hit = (i.min(j), i.max(j));
                best = Some(match best {
                    Some(b) if b <= hit => b,
                    _ => hit,
                });
            }
        }
        active.push(i);
    }
    best
}

/// Reference checker: every non-adjacent pair, O(M^2). Used to re-validate
/// witnesses and to cross-check the sweep on small instances.
pub fn brute_force_self_intersection(points: &[P]) -> Option<(usize, usize)> {
    let m = points.len();
    if m < 8 {
        return None;
    }
    let scale = points
        .iter()
        .map(|p| p.0.abs().max(p.1.abs()))
        .fold(0.0f64, f64::max)
        .max(1.0);
    let eps = 1e-14 * scale * scale;
    for i in 0..m {
        for j in (i + 2)..m {
            if adjacent(i, j, m) {
                continue;
            }
            let (p1, p2) = (points[i], points[(i + 1) % m]);
            let (q1, q2) = (points[j], points[(j + 1) % m]);
            if segments_intersect(p1, p2, q1, q2, eps) {
                return Some((i, j));
            }
        }
    }
    None
}
