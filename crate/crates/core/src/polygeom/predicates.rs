//! Small planar predicates shared by domain validation and meshing.

use nalgebra::Point2;

/// Cross product of `a - o` and `b - o`.
pub fn cross(o: Point2<f64>, a: Point2<f64>, b: Point2<f64>) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

pub fn dist_point_segment(p: Point2<f64>, a: Point2<f64>, b: Point2<f64>) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Any contact (proper crossing, endpoint touch, overlap) between the
/// closed segments `[p1, p2]` and `[q1, q2]`, up to `eps` slack.
pub fn segments_touch(
    p1: Point2<f64>,
    p2: Point2<f64>,
    q1: Point2<f64>,
    q2: Point2<f64>,
    eps: f64,
) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    if ((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps))
        && ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps))
    {
        return true;
    }
    let near = |p, a, b| dist_point_segment(p, a, b) <= eps;
    near(p1, q1, q2) || near(p2, q1, q2) || near(q1, p1, p2) || near(q2, p1, p2)
}

/// Even-odd crossing test. Points on the boundary are not handled
/// specially; callers that care keep their query points away from it.
pub fn point_in_loop(p: Point2<f64>, ring: &[Point2<f64>]) -> bool {
    let mut inside = false;
    let n = ring.len();
    let mut j = n - 1;
    for i in 0..n {
        let (pi, pj) = (ring[i], ring[j]);
        if (pi.y > p.y) != (pj.y > p.y) {
            let x_int = pi.x + (p.y - pi.y) * (pj.x - pi.x) / (pj.y - pi.y);
            if p.x < x_int {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Signed area of a closed loop (positive for counterclockwise).
pub fn signed_area(ring: &[Point2<f64>]) -> f64 {
    let n = ring.len();
    let mut acc = 0.0;
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        acc += a.x * b.y - b.x * a.y;
    }
    0.5 * acc
}

pub fn dist_point_triangle(p: Point2<f64>, a: Point2<f64>, b: Point2<f64>, c: Point2<f64>) -> f64 {
    let s1 = cross(a, b, p);
    let s2 = cross(b, c, p);
    let s3 = cross(c, a, p);
    if (s1 >= 0.0 && s2 >= 0.0 && s3 >= 0.0) || (s1 <= 0.0 && s2 <= 0.0 && s3 <= 0.0) {
        return 0.0;
    }
    dist_point_segment(p, a, b)
        .min(dist_point_segment(p, b, c))
        .min(dist_point_segment(p, c, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::point;

    #[test]
    fn crossing_detection() {
        let eps = 1e-12;
        assert!(segments_touch(
            point![0.0, 0.0],
            point![1.0, 1.0],
            point![0.0, 1.0],
            point![1.0, 0.0],
            eps
        ));
        assert!(!segments_touch(
            point![0.0, 0.0],
            point![1.0, 0.0],
            point![0.0, 1.0],
            point![1.0, 1.0],
            eps
        ));
        // Endpoint touch counts as contact.
        assert!(segments_touch(
            point![0.0, 0.0],
            point![1.0, 0.0],
            point![1.0, 0.0],
            point![2.0, 5.0],
            eps
        ));
    }

    #[test]
    fn point_in_square() {
        let sq = vec![point![0.0, 0.0], point![1.0, 0.0], point![1.0, 1.0], point![0.0, 1.0]];
        assert!(point_in_loop(point![0.5, 0.5], &sq));
        assert!(!point_in_loop(point![1.5, 0.5], &sq));
        assert!((signed_area(&sq) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn triangle_distance() {
        let (a, b, c) = (point![0.0, 0.0], point![2.0, 0.0], point![0.0, 2.0]);
        assert_eq!(dist_point_triangle(point![0.5, 0.5], a, b, c), 0.0);
        assert!((dist_point_triangle(point![0.5, -1.0], a, b, c) - 1.0).abs() < 1e-15);
    }
}
