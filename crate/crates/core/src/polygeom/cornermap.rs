//! Piecewise-affine maps between polygonal domains.
//!
//! A map is a triangulation of the source domain together with one
//! affine map per triangle. Folds — adjacent pieces mapping onto the
//! same target region with opposite orientations — are allowed; they
//! show up as pieces with negative Jacobian determinant. The validator
//! checks continuity exactly (affine maps agreeing at shared-edge
//! endpoints agree along the edge) and checks boundary behaviour and
//! containment on a fixed sample grid per piece.

use crate::error::{Error, Result};
use crate::meshgen::SimplicialMesh;
use crate::polygeom::predicates::dist_point_segment;
use crate::polygeom::PolygonalDomain;
use crate::report::{atomic_write, fmt_g17, Verdict};
use nalgebra::{Matrix2, Point2, Vector2};
use std::collections::BTreeMap;
use std::path::Path;

/// Two affine maps sharing an edge must agree to this absolute tolerance.
pub const CONTINUITY_TOL: f64 = 1e-12;
/// Boundary images and containment may miss by at most this distance.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// One triangle of the source triangulation with its affine map
/// `p ↦ matrix · p + offset`.
#[derive(Debug, Clone)]
pub struct AffinePiece {
    pub source: [Point2<f64>; 3],
    pub matrix: Matrix2<f64>,
    pub offset: Vector2<f64>,
}

impl AffinePiece {
    /// The unique affine map sending the source triangle's vertices to
    /// the given image points.
    pub fn from_vertex_images(
        source: [Point2<f64>; 3],
        images: [Point2<f64>; 3],
    ) -> Result<AffinePiece> {
        let s = Matrix2::from_columns(&[source[1] - source[0], source[2] - source[0]]);
        let t = Matrix2::from_columns(&[images[1] - images[0], images[2] - images[0]]);
        let inv = s.try_inverse().ok_or_else(|| {
            Error::geometry(format!("degenerate source triangle {:?}", source))
        })?;
        let matrix = t * inv;
        let offset = images[0].coords - matrix * source[0].coords;
        Ok(AffinePiece { source, matrix, offset })
    }

    pub fn identity(source: [Point2<f64>; 3]) -> AffinePiece {
        AffinePiece { source, matrix: Matrix2::identity(), offset: Vector2::zeros() }
    }

    pub fn apply(&self, p: Point2<f64>) -> Point2<f64> {
        Point2::from(self.matrix * p.coords + self.offset)
    }

    pub fn det(&self) -> f64 {
        self.matrix.determinant()
    }

    /// Largest singular value of the differential, in closed form.
    pub fn max_singular_value(&self) -> f64 {
        let j = &self.matrix;
        let fro2 = j.m11 * j.m11 + j.m12 * j.m12 + j.m21 * j.m21 + j.m22 * j.m22;
        let det = self.det();
        let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0).sqrt();
        (0.5 * (fro2 + disc)).sqrt()
    }
}

/// A continuous piecewise-affine map between two polygonal domains.
#[derive(Debug, Clone)]
pub struct CornerMap {
    source: PolygonalDomain,
    target: PolygonalDomain,
    pieces: Vec<AffinePiece>,
}

/// Validation summary of a [`CornerMap`].
#[derive(Debug, Clone)]
pub struct CornerMapReport {
    pub pieces: usize,
    /// Pieces with negative Jacobian determinant.
    pub fold_pieces: usize,
    /// Worst disagreement between adjacent pieces on a shared edge.
    pub continuity_residual: f64,
    /// Worst distance of a boundary-edge image sample from the target
    /// boundary.
    pub boundary_residual: f64,
    /// Worst distance by which a sampled image point escapes the target.
    pub containment_residual: f64,
    pub verdict: Verdict,
}

/// Lipschitz data of a map pre-composed with scaling by `1/r`.
#[derive(Debug, Clone, Copy)]
pub struct LipschitzReport {
    /// Largest singular value over all pieces of the unscaled map.
    pub unscaled: f64,
    /// Smallest r for which the scaled map is distance non-increasing.
    pub r0: f64,
    pub requested_r: f64,
    /// Largest singular value after scaling: `unscaled / r`.
    pub max_singular_value: f64,
}

impl CornerMap {
    pub fn new(
        source: PolygonalDomain,
        target: PolygonalDomain,
        pieces: Vec<AffinePiece>,
    ) -> Result<CornerMap> {
        if pieces.is_empty() {
            return Err(Error::geometry("corner map needs at least one piece"));
        }
        Ok(CornerMap { source, target, pieces })
    }

    /// The identity map on a domain, with pieces given by a mesh of it.
    pub fn identity(domain: &PolygonalDomain, mesh: &SimplicialMesh) -> Result<CornerMap> {
        let pieces = mesh
            .triangles()
            .iter()
            .map(|&[a, b, c]| {
                AffinePiece::identity([
                    mesh.vertices()[a],
                    mesh.vertices()[b],
                    mesh.vertices()[c],
                ])
            })
            .collect();
        CornerMap::new(domain.clone(), domain.clone(), pieces)
    }

    pub fn source(&self) -> &PolygonalDomain {
        &self.source
    }
    pub fn target(&self) -> &PolygonalDomain {
        &self.target
    }
    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    pub fn fold_piece_indices(&self) -> Vec<usize> {
        self.pieces
            .iter()
            .enumerate()
            .filter(|(_, p)| p.det() < 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    /// Number of fold pieces with a full triangle edge on the segment
    /// `[a, b]` (used to confirm folds sit on a declared source edge).
    pub fn fold_pieces_touching(&self, a: Point2<f64>, b: Point2<f64>) -> usize {
        let on_seg = |p: Point2<f64>| dist_point_segment(p, a, b) <= BOUNDARY_TOL;
        self.pieces
            .iter()
            .filter(|p| p.det() < 0.0)
            .filter(|p| {
                let hits = p.source.iter().filter(|&&v| on_seg(v)).count();
                hits >= 2
            })
            .count()
    }

    /// Rebuilds the conforming mesh underlying the pieces and checks the
    /// map properties. Cover defects (gaps, overlaps, non-conforming
    /// pieces) surface as errors from the mesh construction; everything
    /// else lands in the report.
    pub fn validate(&self) -> Result<CornerMapReport> {
        let mesh = self.piece_mesh()?;

        // Adjacency: for each mesh edge, which pieces touch it.
        let mut edge_pieces: Vec<Vec<usize>> = vec![Vec::new(); mesh.num_edges()];
        for (t, te) in mesh.triangle_edges().iter().enumerate() {
            for &(e, _) in te {
                edge_pieces[e].push(t);
            }
        }

        let mut continuity_residual: f64 = 0.0;
        let mut boundary_residual: f64 = 0.0;
        for (e, owners) in edge_pieces.iter().enumerate() {
            let [va, vb] = mesh.edges()[e];
            let pa = mesh.vertices()[va];
            let pb = mesh.vertices()[vb];
            match owners.as_slice() {
                [t1, t2] => {
                    let mid = nalgebra::center(&pa, &pb);
                    for q in [pa, pb, mid] {
                        let d = (self.pieces[*t1].apply(q) - self.pieces[*t2].apply(q)).norm();
                        continuity_residual = continuity_residual.max(d);
                    }
                }
                [t1] => {
                    // Boundary edge: its image must run inside ∂(target).
                    for k in 0..=4 {
                        let s = k as f64 / 4.0;
                        let q = Point2::from(pa.coords * (1.0 - s) + pb.coords * s);
                        let img = self.pieces[*t1].apply(q);
                        boundary_residual =
                            boundary_residual.max(dist_to_boundary(&self.target, img));
                    }
                }
                _ => {
                    return Err(Error::geometry(format!(
                        "edge {e} shared by {} pieces",
                        owners.len()
                    )))
                }
            }
        }

        // Containment, sampled on a fixed barycentric grid per piece.
        let samples = [
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.5, 0.5, 0.0],
            [0.0, 0.5, 0.5],
            [0.5, 0.0, 0.5],
            [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
            [2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0],
            [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
            [1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
        ];
        let mut containment_residual: f64 = 0.0;
        for piece in &self.pieces {
            for w in samples {
                let q = Point2::from(
                    piece.source[0].coords * w[0]
                        + piece.source[1].coords * w[1]
                        + piece.source[2].coords * w[2],
                );
                let img = piece.apply(q);
                if !self.target.contains(img) {
                    containment_residual =
                        containment_residual.max(dist_to_boundary(&self.target, img));
                }
            }
        }

        let fold_pieces = self.fold_piece_indices().len();
        let verdict = if continuity_residual <= CONTINUITY_TOL
            && boundary_residual <= BOUNDARY_TOL
            && containment_residual <= BOUNDARY_TOL
        {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Ok(CornerMapReport {
            pieces: self.pieces.len(),
            fold_pieces,
            continuity_residual,
            boundary_residual,
            containment_residual,
            verdict,
        })
    }

    /// The conforming mesh formed by the piece triangles (triangle order
    /// matches piece order).
    pub fn piece_mesh(&self) -> Result<SimplicialMesh> {
        let mut index: BTreeMap<(u64, u64), usize> = BTreeMap::new();
        let mut vertices: Vec<Point2<f64>> = Vec::new();
        let mut triangles: Vec<[usize; 3]> = Vec::with_capacity(self.pieces.len());
        for piece in &self.pieces {
            let mut tri = [0usize; 3];
            for (k, v) in piece.source.iter().enumerate() {
                let key = (v.x.to_bits(), v.y.to_bits());
                let id = *index.entry(key).or_insert_with(|| {
                    vertices.push(*v);
                    vertices.len() - 1
                });
                tri[k] = id;
            }
            triangles.push(tri);
        }
        SimplicialMesh::build(vertices, triangles, &self.source)
    }

    /// Plain-text export: one block per piece with the three source
    /// vertices, then the 2×3 affine matrix (linear part, then offset).
    pub fn export_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("pieces {}\n", self.pieces.len()));
        for p in &self.pieces {
            for v in &p.source {
                out.push_str(&format!("{} {}\n", fmt_g17(v.x), fmt_g17(v.y)));
            }
            out.push_str(&format!(
                "{} {} {}\n{} {} {}\n",
                fmt_g17(p.matrix.m11),
                fmt_g17(p.matrix.m12),
                fmt_g17(p.offset.x),
                fmt_g17(p.matrix.m21),
                fmt_g17(p.matrix.m22),
                fmt_g17(p.offset.y),
            ));
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        atomic_write(path, self.export_text().as_bytes())
    }
}

/// Largest singular values of the map scaled by `1/r`, and the smallest
/// scaling that makes the map distance non-increasing.
pub fn lipschitz_after_scaling(map: &CornerMap, r: f64) -> Result<LipschitzReport> {
    if !(r > 0.0) {
        return Err(Error::config(format!("scaling factor must be positive, got {r}")));
    }
    let unscaled = map
        .pieces()
        .iter()
        .map(|p| p.max_singular_value())
        .fold(0.0, f64::max);
    Ok(LipschitzReport {
        unscaled,
        r0: unscaled,
        requested_r: r,
        max_singular_value: unscaled / r,
    })
}

fn dist_to_boundary(domain: &PolygonalDomain, p: Point2<f64>) -> f64 {
    let mut best = f64::INFINITY;
    for ring in domain.loops() {
        for i in 0..ring.len() {
            let a = ring[i];
            let b = ring[(i + 1) % ring.len()];
            best = best.min(dist_point_segment(p, a, b));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meshgen::structured_rectilinear;
    use approx::assert_relative_eq;
    use nalgebra::point;

    fn annulus_identity() -> CornerMap {
        let domain = PolygonalDomain::square_annulus();
        let mesh = structured_rectilinear(&domain, 0.5, 1.0).unwrap();
        CornerMap::identity(&domain, &mesh).unwrap()
    }

    #[test]
    fn identity_map_validates_with_zero_residuals() {
        let map = annulus_identity();
        let report = map.validate().unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
        assert_eq!(report.fold_pieces, 0);
        assert_eq!(report.continuity_residual, 0.0);
        assert_eq!(report.boundary_residual, 0.0);
        assert_eq!(report.containment_residual, 0.0);
    }

    #[test]
    fn identity_lipschitz_scales_as_one_over_r() {
        let map = annulus_identity();
        let l1 = lipschitz_after_scaling(&map, 1.0).unwrap();
        assert_relative_eq!(l1.max_singular_value, 1.0, max_relative = 1e-14);
        assert_relative_eq!(l1.r0, 1.0, max_relative = 1e-14);
        let l2 = lipschitz_after_scaling(&map, 2.0).unwrap();
        assert_eq!(l2.max_singular_value, 0.5, "exact halving in IEEE arithmetic");
    }

    #[test]
    fn singular_values_match_hand_computed_cases() {
        let tri = [point![0.0, 0.0], point![1.0, 0.0], point![0.0, 1.0]];
        let stretch = AffinePiece::from_vertex_images(
            tri,
            [point![0.0, 0.0], point![2.0, 0.0], point![0.0, 3.0]],
        )
        .unwrap();
        assert_relative_eq!(stretch.max_singular_value(), 3.0, max_relative = 1e-14);
        assert_relative_eq!(stretch.det(), 6.0, max_relative = 1e-14);

        // Reflection: negative determinant, singular values both 1.
        let flip = AffinePiece::from_vertex_images(
            tri,
            [point![0.0, 0.0], point![0.0, 1.0], point![1.0, 0.0]],
        )
        .unwrap();
        assert!(flip.det() < 0.0);
        assert_relative_eq!(flip.max_singular_value(), 1.0, max_relative = 1e-14);

        // Shear [[1,1],[0,1]]: σ_max = golden ratio.
        let shear = AffinePiece {
            source: tri,
            matrix: Matrix2::new(1.0, 1.0, 0.0, 1.0),
            offset: Vector2::zeros(),
        };
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert_relative_eq!(shear.max_singular_value(), golden, max_relative = 1e-14);
    }

    #[test]
    fn degenerate_source_triangle_is_rejected() {
        let flat = [point![0.0, 0.0], point![1.0, 0.0], point![2.0, 0.0]];
        assert!(AffinePiece::from_vertex_images(flat, flat).is_err());
    }

    #[test]
    fn discontinuous_pieces_fail_validation() {
        let domain = PolygonalDomain::unit_square();
        let a = [point![0.0, 0.0], point![1.0, 0.0], point![1.0, 1.0]];
        let b = [point![0.0, 0.0], point![1.0, 1.0], point![0.0, 1.0]];
        let pieces = vec![
            AffinePiece::identity(a),
            // Shrinks its triangle toward the origin: disagrees with the
            // identity on the shared diagonal.
            AffinePiece::from_vertex_images(
                b,
                [point![0.0, 0.0], point![0.5, 0.5], point![0.0, 0.5]],
            )
            .unwrap(),
        ];
        let map = CornerMap::new(domain.clone(), domain, pieces).unwrap();
        let report = map.validate().unwrap();
        assert_eq!(report.verdict, Verdict::Fail);
        assert!(report.continuity_residual > 0.1);
    }

    #[test]
    fn interior_images_of_boundary_edges_fail_validation() {
        // Uniform shrink about the square's center: continuous, but
        // boundary edges land in the interior of the target.
        let domain = PolygonalDomain::unit_square();
        let mesh = structured_rectilinear(&domain, 0.5, 1.0).unwrap();
        let center = Vector2::new(0.5, 0.5);
        let pieces: Vec<AffinePiece> = mesh
            .triangles()
            .iter()
            .map(|&[a, b, c]| {
                let tri = [mesh.vertices()[a], mesh.vertices()[b], mesh.vertices()[c]];
                let img = tri.map(|p| Point2::from((p.coords - center) * 0.5 + center));
                AffinePiece::from_vertex_images(tri, img).unwrap()
            })
            .collect();
        let map = CornerMap::new(domain.clone(), domain, pieces).unwrap();
        let report = map.validate().unwrap();
        assert_eq!(report.verdict, Verdict::Fail);
        assert!(report.boundary_residual > 0.2);
        assert_eq!(report.continuity_residual, 0.0);
    }

    #[test]
    fn gapped_pieces_are_rejected_as_coverage_errors() {
        let domain = PolygonalDomain::unit_square();
        let a = [point![0.0, 0.0], point![1.0, 0.0], point![1.0, 1.0]];
        let map =
            CornerMap::new(domain.clone(), domain, vec![AffinePiece::identity(a)]).unwrap();
        assert!(map.validate().is_err(), "half the square is uncovered");
    }

    #[test]
    fn export_roundtrips_key_fields_textually() {
        let map = annulus_identity();
        let text = map.export_text();
        assert!(text.starts_with(&format!("pieces {}\n", map.pieces().len())));
        // Identity pieces: matrix rows "1.0 0.0 <tx>" and "0.0 1.0 <ty>".
        assert!(text.contains("1.0 0.0 0.0"));
    }
}
