//! Polygonal domains: an outer loop plus disjoint polygonal holes.

use std::f64::consts::PI;
use std::path::Path;

use nalgebra::{point, Point2};

use super::predicates::{cross, point_in_loop, segments_touch, signed_area};
use crate::error::{Error, Result};
use crate::report::atomic_write;

/// A vertex of the domain boundary together with the interior angle of the
/// domain at that vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct CornerVertex {
    pub loop_index: usize,
    pub vertex_index: usize,
    pub position: Point2<f64>,
    /// Interior angle in `(0, 2π) \ {π}`; reflex corners exceed `π`.
    pub interior_angle: f64,
}

/// A bounded planar domain with polygonal boundary: one outer loop
/// (counterclockwise) and any number of polygonal holes (clockwise), so
/// that the material always lies to the left of the traversal direction.
///
/// Construction validates simplicity of each loop, mutual disjointness,
/// containment of holes in the outer loop, orientation, and absence of
/// collinear consecutive edges; every boundary vertex is therefore a
/// genuine corner.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonalDomain {
    name: String,
    loops: Vec<Vec<Point2<f64>>>,
}

impl PolygonalDomain {
    pub fn new(
        name: impl Into<String>,
        outer: Vec<Point2<f64>>,
        holes: Vec<Vec<Point2<f64>>>,
    ) -> Result<Self> {
        let mut loops = vec![outer];
        loops.extend(holes);
        let domain = PolygonalDomain { name: name.into(), loops };
        domain.validate()?;
        Ok(domain)
    }

    fn validate(&self) -> Result<()> {
        let scale = self.bounding_box_diameter();
        if scale == 0.0 {
            return Err(Error::geometry("domain is degenerate (empty bounding box)"));
        }
        let eps_len = 1e-12 * scale;
        let eps_area = 1e-12 * scale * scale;

        for (li, ring) in self.loops.iter().enumerate() {
            if ring.len() < 3 {
                return Err(Error::geometry(format!(
                    "loop {li} has {} vertices; at least 3 required",
                    ring.len()
                )));
            }
            let n = ring.len();
            for i in 0..n {
                let a = ring[i];
                let b = ring[(i + 1) % n];
                if (b - a).norm() <= eps_len {
                    return Err(Error::geometry(format!(
                        "loop {li} edge {i} is degenerate (length {:.3e})",
                        (b - a).norm()
                    )));
                }
                let c = ring[(i + 2) % n];
                if cross(a, b, c).abs() <= eps_area {
                    return Err(Error::geometry(format!(
                        "loop {li}: vertices {i}..{} are collinear",
                        (i + 2) % n
                    )));
                }
            }
            // Simplicity: non-adjacent edges must not touch.
            for i in 0..n {
                for j in (i + 1)..n {
                    if j == i + 1 || (i == 0 && j == n - 1) {
                        continue;
                    }
                    if segments_touch(ring[i], ring[(i + 1) % n], ring[j], ring[(j + 1) % n], eps_len) {
                        return Err(Error::geometry(format!(
                            "loop {li} is not simple: edge {i} touches edge {j}"
                        )));
                    }
                }
            }
            let area = signed_area(ring);
            if li == 0 && area <= 0.0 {
                return Err(Error::geometry(
                    "outer loop must be oriented counterclockwise (positive area)",
                ));
            }
            if li > 0 && area >= 0.0 {
                return Err(Error::geometry(format!(
                    "hole loop {li} must be oriented clockwise (negative area)"
                )));
            }
        }

        // Loops must be pairwise disjoint, and every hole strictly inside
        // the outer loop but not inside another hole.
        for li in 0..self.loops.len() {
            for lj in (li + 1)..self.loops.len() {
                let (ra, rb) = (&self.loops[li], &self.loops[lj]);
                for i in 0..ra.len() {
                    for j in 0..rb.len() {
                        if segments_touch(
                            ra[i],
                            ra[(i + 1) % ra.len()],
                            rb[j],
                            rb[(j + 1) % rb.len()],
                            eps_len,
                        ) {
                            return Err(Error::geometry(format!(
                                "loop {li} edge {i} touches loop {lj} edge {j}"
                            )));
                        }
                    }
                }
            }
        }
        for (li, hole) in self.loops.iter().enumerate().skip(1) {
            if !point_in_loop(hole[0], &self.loops[0]) {
                return Err(Error::geometry(format!("hole {li} lies outside the outer loop")));
            }
            for (lj, other) in self.loops.iter().enumerate().skip(1) {
                if li != lj && point_in_loop(hole[0], other) {
                    return Err(Error::geometry(format!("hole {li} is nested inside hole {lj}")));
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// All loops; index 0 is the outer loop.
    pub fn loops(&self) -> &[Vec<Point2<f64>>] {
        &self.loops
    }

    pub fn outer(&self) -> &[Point2<f64>] {
        &self.loops[0]
    }

    pub fn holes(&self) -> &[Vec<Point2<f64>>] {
        &self.loops[1..]
    }

    pub fn euler_characteristic(&self) -> i64 {
        1 - self.holes().len() as i64
    }

    /// Sum of signed loop areas (holes count negatively).
    pub fn area(&self) -> f64 {
        self.loops.iter().map(|r| signed_area(r)).sum()
    }

    pub fn bounding_box(&self) -> (Point2<f64>, Point2<f64>) {
        let mut lo = point![f64::INFINITY, f64::INFINITY];
        let mut hi = point![f64::NEG_INFINITY, f64::NEG_INFINITY];
        for ring in &self.loops {
            for p in ring {
                lo.x = lo.x.min(p.x);
                lo.y = lo.y.min(p.y);
                hi.x = hi.x.max(p.x);
                hi.y = hi.y.max(p.y);
            }
        }
        (lo, hi)
    }

    fn bounding_box_diameter(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        let d = hi - lo;
        if d.x.is_finite() && d.y.is_finite() {
            d.norm()
        } else {
            0.0
        }
    }

    /// Strict interior test (points on the boundary are not reliable).
    pub fn contains(&self, p: Point2<f64>) -> bool {
        if !point_in_loop(p, &self.loops[0]) {
            return false;
        }
        !self.loops[1..].iter().any(|hole| point_in_loop(p, hole))
    }

    /// True when every boundary edge is axis-parallel.
    pub fn is_rectilinear(&self) -> bool {
        let scale = self.bounding_box_diameter();
        let eps = 1e-12 * scale;
        self.loops.iter().all(|ring| {
            (0..ring.len()).all(|i| {
                let a = ring[i];
                let b = ring[(i + 1) % ring.len()];
                (b.x - a.x).abs() <= eps || (b.y - a.y).abs() <= eps
            })
        })
    }

    pub fn shortest_edge(&self) -> f64 {
        let mut best = f64::INFINITY;
        for ring in &self.loops {
            for i in 0..ring.len() {
                best = best.min((ring[(i + 1) % ring.len()] - ring[i]).norm());
            }
        }
        best
    }

    /// Minimum pairwise distance between boundary vertices; bounds the
    /// admissible corner-disk radius.
    pub fn min_corner_separation(&self) -> f64 {
        let corners: Vec<Point2<f64>> = self.loops.iter().flatten().copied().collect();
        let mut best = f64::INFINITY;
        for i in 0..corners.len() {
            for j in (i + 1)..corners.len() {
                best = best.min((corners[i] - corners[j]).norm());
            }
        }
        best
    }

    /// Interior angle of the domain at every boundary vertex, in loop
    /// order. With material on the left of the traversal, the angle is
    /// `π - turn` at each vertex for outer and hole loops alike.
    pub fn interior_angles(&self) -> Vec<CornerVertex> {
        let mut out = Vec::new();
        for (li, ring) in self.loops.iter().enumerate() {
            let n = ring.len();
            for i in 0..n {
                let prev = ring[(i + n - 1) % n];
                let here = ring[i];
                let next = ring[(i + 1) % n];
                let d1 = here - prev;
                let d2 = next - here;
                let turn = (d1.x * d2.y - d1.y * d2.x).atan2(d1.dot(&d2));
                let mut angle = PI - turn;
                if angle >= 2.0 * PI {
                    angle -= 2.0 * PI;
                }
                out.push(CornerVertex {
                    loop_index: li,
                    vertex_index: i,
                    position: here,
                    interior_angle: angle,
                });
            }
        }
        out
    }

    /// The square annulus `[-2,2]² \ [-1,1]²`: four straight arms around a
    /// square hole, with four convex and four reflex corners.
    pub fn square_annulus() -> PolygonalDomain {
        PolygonalDomain::new(
            "square-annulus",
            vec![point![-2.0, -2.0], point![2.0, -2.0], point![2.0, 2.0], point![-2.0, 2.0]],
            vec![vec![point![-1.0, -1.0], point![-1.0, 1.0], point![1.0, 1.0], point![1.0, -1.0]]],
        )
        .expect("built-in domain is valid")
    }

    pub fn unit_square() -> PolygonalDomain {
        PolygonalDomain::new(
            "unit-square",
            vec![point![0.0, 0.0], point![1.0, 0.0], point![1.0, 1.0], point![0.0, 1.0]],
            vec![],
        )
        .expect("built-in domain is valid")
    }

    /// Serializes in the loop file format understood by [`read_domain`].
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut s = format!("# domain: {}\n", self.name);
        for (li, ring) in self.loops.iter().enumerate() {
            s.push_str(if li == 0 { "outer\n" } else { "hole\n" });
            for p in ring {
                s.push_str(&format!("{:.16e} {:.16e}\n", p.x, p.y));
            }
        }
        atomic_write(path, s.as_bytes())
    }
}

/// Reads a domain from the loop file format: an `outer` header followed by
/// one `x y` pair per line, then optional `hole` blocks. `#` starts a
/// comment; the domain name is the file stem.
pub fn read_domain(path: &Path) -> Result<PolygonalDomain> {
    let text = std::fs::read_to_string(path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "domain".to_string());
    let mut loops: Vec<Vec<Point2<f64>>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match line {
            "outer" => {
                if !loops.is_empty() {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "duplicate `outer` block".to_string(),
                    });
                }
                loops.push(Vec::new());
            }
            "hole" => {
                if loops.is_empty() {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "`hole` block before `outer`".to_string(),
                    });
                }
                loops.push(Vec::new());
            }
            _ => {
                let mut it = line.split_whitespace();
                let x = it.next().and_then(|t| t.parse::<f64>().ok());
                let y = it.next().and_then(|t| t.parse::<f64>().ok());
                match (x, y, it.next()) {
                    (Some(x), Some(y), None) => {
                        let ring = loops.last_mut().ok_or(Error::Parse {
                            line: line_no,
                            message: "coordinates before any loop header".to_string(),
                        })?;
                        ring.push(point![x, y]);
                    }
                    _ => {
                        return Err(Error::Parse {
                            line: line_no,
                            message: format!("expected `x y`, found {line:?}"),
                        })
                    }
                }
            }
        }
    }
    if loops.is_empty() {
        return Err(Error::Parse { line: 0, message: "file contains no loops".to_string() });
    }
    let outer = loops.remove(0);
    PolygonalDomain::new(name, outer, loops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn annulus_basic_quantities() {
        let a = PolygonalDomain::square_annulus();
        assert_eq!(a.euler_characteristic(), 0);
        assert_relative_eq!(a.area(), 12.0, max_relative = 1e-15);
        assert!(a.contains(point![1.5, 0.0]));
        assert!(!a.contains(point![0.0, 0.0]));
        assert!(a.is_rectilinear());
        assert_relative_eq!(a.min_corner_separation(), std::f64::consts::SQRT_2);
    }

    #[test]
    fn annulus_angles_are_four_convex_four_reflex() {
        let a = PolygonalDomain::square_annulus();
        let angles = a.interior_angles();
        assert_eq!(angles.len(), 8);
        let convex = angles.iter().filter(|c| (c.interior_angle - PI / 2.0).abs() < 1e-12).count();
        let reflex =
            angles.iter().filter(|c| (c.interior_angle - 3.0 * PI / 2.0).abs() < 1e-12).count();
        assert_eq!((convex, reflex), (4, 4));
    }

    #[test]
    fn gauss_bonnet_per_loop() {
        let a = PolygonalDomain::square_annulus();
        let angles = a.interior_angles();
        for li in 0..2 {
            let turn: f64 = angles
                .iter()
                .filter(|c| c.loop_index == li)
                .map(|c| PI - c.interior_angle)
                .sum();
            let expected = if li == 0 { 2.0 * PI } else { -2.0 * PI };
            assert_relative_eq!(turn, expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn rejects_misoriented_and_self_intersecting_loops() {
        let cw = vec![point![0.0, 0.0], point![0.0, 1.0], point![1.0, 1.0], point![1.0, 0.0]];
        assert!(PolygonalDomain::new("bad", cw, vec![]).is_err());

        let bowtie =
            vec![point![0.0, 0.0], point![1.0, 1.0], point![1.0, 0.0], point![0.0, 1.0]];
        let err = PolygonalDomain::new("bowtie", bowtie, vec![]).unwrap_err();
        assert!(err.to_string().contains("edge"), "message should name the edge pair: {err}");
    }

    #[test]
    fn rejects_collinear_vertices() {
        let ring = vec![
            point![0.0, 0.0],
            point![0.5, 0.0],
            point![1.0, 0.0],
            point![1.0, 1.0],
            point![0.0, 1.0],
        ];
        assert!(PolygonalDomain::new("collinear", ring, vec![]).is_err());
    }

    #[test]
    fn rejects_hole_outside_or_crossing() {
        let outer = vec![point![0.0, 0.0], point![4.0, 0.0], point![4.0, 4.0], point![0.0, 4.0]];
        let far_hole =
            vec![point![5.0, 5.0], point![5.0, 6.0], point![6.0, 6.0], point![6.0, 5.0]];
        assert!(PolygonalDomain::new("d", outer.clone(), vec![far_hole]).is_err());
        let crossing =
            vec![point![3.0, 1.0], point![3.0, 2.0], point![5.0, 2.0], point![5.0, 1.0]];
        assert!(PolygonalDomain::new("d", outer, vec![crossing]).is_err());
    }

    #[test]
    fn file_roundtrip_preserves_geometry() {
        let a = PolygonalDomain::square_annulus();
        let dir = std::env::temp_dir().join("cornerhodge-domain-roundtrip");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("square-annulus.loops");
        a.write(&path).unwrap();
        let b = read_domain(&path).unwrap();
        assert_eq!(a.loops(), b.loops());
        assert_eq!(b.name(), "square-annulus");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let dir = std::env::temp_dir().join("cornerhodge-domain-badparse");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.loops");
        std::fs::write(&path, "outer\n0 0\n1 0 extra\n").unwrap();
        match read_domain(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
