//! Tensor-product meshing of rectilinear domains.
//!
//! Breakpoints are the distinct vertex abscissae/ordinates of the domain,
//! so every boundary feature lies on a grid line and cells are entirely
//! inside or outside. Within each breakpoint interval the grid is graded
//! toward both ends by the map `u ↦ ½(2u)^γ` (mirrored), clustering
//! points near corner lines; `γ = 1` recovers the uniform grid.

use nalgebra::point;

use super::mesh::SimplicialMesh;
use crate::error::{Error, Result};
use crate::polygeom::PolygonalDomain;

pub fn structured_rectilinear(
    domain: &PolygonalDomain,
    h: f64,
    gamma: f64,
) -> Result<SimplicialMesh> {
    if !(h > 0.0) {
        return Err(Error::refinement(format!("target edge length must be positive, got {h}")));
    }
    if !(gamma >= 1.0) {
        return Err(Error::refinement(format!("grading exponent must be ≥ 1, got {gamma}")));
    }
    if !domain.is_rectilinear() {
        return Err(Error::refinement(format!(
            "structured meshing requires a rectilinear domain; `{}` has oblique edges",
            domain.name()
        )));
    }
    if h >= domain.shortest_edge() {
        return Err(Error::refinement(format!(
            "target edge length {h} does not resolve the shortest domain edge {}",
            domain.shortest_edge()
        )));
    }

    let mut bx: Vec<f64> = domain.loops().iter().flatten().map(|p| p.x).collect();
    let mut by: Vec<f64> = domain.loops().iter().flatten().map(|p| p.y).collect();
    dedup_sorted(&mut bx);
    dedup_sorted(&mut by);

    let xs = graded_axis(&bx, h, gamma);
    let ys = graded_axis(&by, h, gamma);
    let (nx, ny) = (xs.len(), ys.len());

    // Keep a cell iff its center lies in the domain; with breakpoints on
    // every feature line this is exact, not a sampling heuristic.
    let mut vertex_id = vec![usize::MAX; nx * ny];
    let mut vertices: Vec<nalgebra::Point2<f64>> = Vec::new();
    let mut triangles = Vec::new();
    for iy in 0..ny - 1 {
        for ix in 0..nx - 1 {
            let center = point![0.5 * (xs[ix] + xs[ix + 1]), 0.5 * (ys[iy] + ys[iy + 1])];
            if !domain.contains(center) {
                continue;
            }
            let mut id_of = |ix: usize, iy: usize| {
                let slot = iy * nx + ix;
                if vertex_id[slot] == usize::MAX {
                    vertex_id[slot] = vertices.len();
                    vertices.push(point![xs[ix], ys[iy]]);
                }
                vertex_id[slot]
            };
            let v00 = id_of(ix, iy);
            let v10 = id_of(ix + 1, iy);
            let v11 = id_of(ix + 1, iy + 1);
            let v01 = id_of(ix, iy + 1);
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }

    SimplicialMesh::build(vertices, triangles, domain)
}

fn dedup_sorted(v: &mut Vec<f64>) {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
}

/// Grid points over consecutive breakpoint intervals, graded toward both
/// interval ends, with spacing clamped below at `h²`.
fn graded_axis(breaks: &[f64], h: f64, gamma: f64) -> Vec<f64> {
    let mut out = vec![breaks[0]];
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = b - a;
        let n = ((len / h).round() as usize).max(1);
        let min_spacing = h * h;
        for i in 1..n {
            let x = a + len * two_sided_grade(i as f64 / n as f64, gamma);
            if x - out.last().unwrap() >= min_spacing && b - x >= min_spacing {
                out.push(x);
            }
        }
        out.push(b);
    }
    out
}

fn two_sided_grade(u: f64, gamma: f64) -> f64 {
    if u <= 0.5 {
        0.5 * (2.0 * u).powf(gamma)
    } else {
        1.0 - 0.5 * (2.0 * (1.0 - u)).powf(gamma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meshgen::EdgeTag;
    use approx::assert_relative_eq;

    #[test]
    fn unit_square_counts_at_half() {
        let d = PolygonalDomain::unit_square();
        let m = structured_rectilinear(&d, 0.5, 1.0).unwrap();
        assert_eq!((m.num_vertices(), m.num_edges(), m.num_triangles()), (9, 16, 8));
        assert_eq!(m.euler_characteristic(), 1);
        assert_relative_eq!(m.total_area(), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn annulus_preserves_euler_characteristic_and_area() {
        let a = PolygonalDomain::square_annulus();
        for h in [0.5, 0.25] {
            let m = structured_rectilinear(&a, h, 2.0).unwrap();
            assert_eq!(m.euler_characteristic(), 0, "h = {h}");
            assert_relative_eq!(m.total_area(), 12.0, max_relative = 1e-12);
            // Grading stretches cells mid-interval by at most the exponent.
            let bound = 2.0 * h * std::f64::consts::SQRT_2 + 1e-12;
            assert!(m.h_max() <= bound, "h_max {} at target {h}", m.h_max());
        }
    }

    #[test]
    fn halving_h_quadruples_triangles() {
        let a = PolygonalDomain::square_annulus();
        for gamma in [1.0, 2.0] {
            let coarse = structured_rectilinear(&a, 0.5, gamma).unwrap();
            let fine = structured_rectilinear(&a, 0.25, gamma).unwrap();
            assert!(
                fine.num_triangles() >= 4 * coarse.num_triangles(),
                "gamma {gamma}: {} vs {}",
                fine.num_triangles(),
                coarse.num_triangles()
            );
        }
    }

    #[test]
    fn grading_clusters_toward_corners() {
        let a = PolygonalDomain::square_annulus();
        let uniform = structured_rectilinear(&a, 0.25, 1.0).unwrap();
        let graded = structured_rectilinear(&a, 0.25, 2.0).unwrap();
        assert!(graded.h_min() < 0.5 * uniform.h_min());
        // Clamp keeps the graded mesh from collapsing entirely.
        assert!(graded.h_min() >= 0.25 * 0.25 - 1e-12);
    }

    #[test]
    fn annulus_boundary_tags_count() {
        let a = PolygonalDomain::square_annulus();
        let m = structured_rectilinear(&a, 0.5, 1.0).unwrap();
        assert!(m.boundary().iter().all(|b| b.tag != EdgeTag::Oblique));
        let v = m.boundary().iter().filter(|b| b.tag == EdgeTag::Vertical).count();
        let hz = m.boundary().iter().filter(|b| b.tag == EdgeTag::Horizontal).count();
        assert_eq!(v, hz);
        // Outer perimeter 16 plus hole perimeter 8 at spacing 1/2.
        assert_eq!(m.boundary().len(), 48);
    }

    #[test]
    fn oblique_domain_is_rejected() {
        let tri = PolygonalDomain::new(
            "triangle",
            vec![point![0.0, 0.0], point![1.0, 0.0], point![0.5, 1.0]],
            vec![],
        )
        .unwrap();
        assert!(structured_rectilinear(&tri, 0.1, 1.0).is_err());
    }

    #[test]
    fn too_coarse_h_is_rejected() {
        let d = PolygonalDomain::unit_square();
        assert!(structured_rectilinear(&d, 1.5, 1.0).is_err());
    }

    #[test]
    fn meshing_is_deterministic() {
        let a = PolygonalDomain::square_annulus();
        let m1 = structured_rectilinear(&a, 0.25, 2.0).unwrap();
        let m2 = structured_rectilinear(&a, 0.25, 2.0).unwrap();
        assert_eq!(m1.vertices(), m2.vertices());
        assert_eq!(m1.triangles(), m2.triangles());
    }
}
