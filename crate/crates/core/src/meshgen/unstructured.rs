//! Constrained-Delaunay meshing of general polygonal domains.
//!
//! The boundary of every loop is subdivided by walking each edge with
//! steps drawn from a corner-graded size field; the interior is seeded by
//! a quadtree refined until each cell matches the local size, and the
//! constrained Delaunay triangulation of the combined point set is
//! filtered to the faces whose centroid lies in the domain. Every step is
//! deterministic, so meshing the same domain twice is bit-identical.

use nalgebra::Point2;
use spade::{ConstrainedDelaunayTriangulation, Triangulation};

use super::mesh::SimplicialMesh;
use crate::error::{Error, Result};
use crate::polygeom::predicates::dist_point_segment;
use crate::polygeom::PolygonalDomain;

pub fn triangulate_cdt(domain: &PolygonalDomain, h: f64, gamma: f64) -> Result<SimplicialMesh> {
    if !(h > 0.0) {
        return Err(Error::refinement(format!("target edge length must be positive, got {h}")));
    }
    if !(gamma >= 1.0) {
        return Err(Error::refinement(format!("grading exponent must be ≥ 1, got {gamma}")));
    }
    if h > domain.shortest_edge() {
        return Err(Error::refinement(format!(
            "target edge length {h} does not resolve the shortest domain edge {}",
            domain.shortest_edge()
        )));
    }

    let corners: Vec<Point2<f64>> = domain.loops().iter().flatten().copied().collect();
    let size = |p: Point2<f64>| -> f64 {
        if gamma <= 1.0 {
            return h;
        }
        let d = corners.iter().map(|c| (p - c).norm()).fold(f64::INFINITY, f64::min);
        (h * d.powf(1.0 - 1.0 / gamma)).clamp(h * h, h)
    };

    let mut cdt: ConstrainedDelaunayTriangulation<spade::Point2<f64>> =
        ConstrainedDelaunayTriangulation::new();
    let mut points: Vec<Point2<f64>> = Vec::new();
    let mut insert = |cdt: &mut ConstrainedDelaunayTriangulation<spade::Point2<f64>>,
                      p: Point2<f64>|
     -> Result<spade::handles::FixedVertexHandle> {
        let handle = cdt
            .insert(spade::Point2::new(p.x, p.y))
            .map_err(|e| Error::refinement(format!("triangulation rejected point {p:?}: {e:?}")))?;
        if handle.index() == points.len() {
            points.push(p);
        }
        Ok(handle)
    };

    for ring in domain.loops() {
        let loop_pts = subdivide_loop(ring, &size);
        let mut handles = Vec::with_capacity(loop_pts.len());
        for p in &loop_pts {
            handles.push(insert(&mut cdt, *p)?);
        }
        for i in 0..handles.len() {
            let j = (i + 1) % handles.len();
            if handles[i] != handles[j] {
                cdt.add_constraint(handles[i], handles[j]);
            }
        }
    }

    for p in interior_seeds(domain, &size) {
        insert(&mut cdt, p)?;
    }

    let mut triangles = Vec::new();
    for face in cdt.inner_faces() {
        let vs = face.vertices();
        let pos: Vec<Point2<f64>> = vs.iter().map(|v| points[v.fix().index()]).collect();
        let centroid = Point2::new(
            (pos[0].x + pos[1].x + pos[2].x) / 3.0,
            (pos[0].y + pos[1].y + pos[2].y) / 3.0,
        );
        if domain.contains(centroid) {
            triangles.push([vs[0].fix().index(), vs[1].fix().index(), vs[2].fix().index()]);
        }
    }

    // Drop vertices not referenced by any kept triangle.
    let mut new_id = vec![usize::MAX; points.len()];
    let mut vertices = Vec::new();
    for tri in &mut triangles {
        for v in tri.iter_mut() {
            if new_id[*v] == usize::MAX {
                new_id[*v] = vertices.len();
                vertices.push(points[*v]);
            }
            *v = new_id[*v];
        }
    }

    SimplicialMesh::build(vertices, triangles, domain)
}

/// Subdivision points of a polygon loop, walking each edge with local
/// step lengths from the size field. Corner vertices are always kept.
fn subdivide_loop(ring: &[Point2<f64>], size: &impl Fn(Point2<f64>) -> f64) -> Vec<Point2<f64>> {
    let mut out = Vec::new();
    let n = ring.len();
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        let len = (b - a).norm();
        out.push(a);
        let mut t = 0.0;
        loop {
            let here = a + (b - a) * (t / len);
            let s = size(here);
            // Merge the final short step into the last interval.
            if t + 1.5 * s >= len {
                break;
            }
            t += s;
            out.push(a + (b - a) * (t / len));
        }
    }
    out
}

/// Interior seed points from a quadtree refined to the local size field,
/// kept when inside the domain and clear of the boundary.
fn interior_seeds(domain: &PolygonalDomain, size: &impl Fn(Point2<f64>) -> f64) -> Vec<Point2<f64>> {
    let (lo, hi) = domain.bounding_box();
    let side = (hi.x - lo.x).max(hi.y - lo.y);
    let loops = domain.loops();
    let boundary_dist = |p: Point2<f64>| -> f64 {
        let mut best = f64::INFINITY;
        for ring in loops {
            for i in 0..ring.len() {
                best = best.min(dist_point_segment(p, ring[i], ring[(i + 1) % ring.len()]));
            }
        }
        best
    };

    let mut seeds = Vec::new();
    let mut stack = vec![(lo.x, lo.y, side, 0u32)];
    while let Some((x, y, s, depth)) = stack.pop() {
        let center = Point2::new(x + 0.5 * s, y + 0.5 * s);
        let target = size(center);
        if s > target && depth < 24 {
            let half = 0.5 * s;
            // Push in reverse-reading order so seeds pop deterministically
            // in scanline order.
            stack.push((x + half, y + half, half, depth + 1));
            stack.push((x, y + half, half, depth + 1));
            stack.push((x + half, y, half, depth + 1));
            stack.push((x, y, half, depth + 1));
            continue;
        }
        if domain.contains(center) && boundary_dist(center) >= 0.7 * target {
            seeds.push(center);
        }
    }
    seeds
}
