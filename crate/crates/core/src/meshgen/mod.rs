//! Triangulations of polygonal domains.
//!
//! Two meshers share one mesh type: a structured tensor-product mesher
//! for rectilinear domains (exact cell-in/cell-out coverage, two-sided
//! corner grading per breakpoint interval) and a constrained-Delaunay
//! mesher for general polygons (graded boundary subdivision plus
//! quadtree interior seeding). Both are deterministic.

mod mesh;
mod sector;
mod structured;
mod unstructured;

pub use mesh::{
    corner_disks, read_mesh, tag_boundary, vertex_disk, BoundaryEdge, EdgeTag, SimplicialMesh,
    VertexDisk,
};
pub use sector::sector_mesh;
pub use structured::structured_rectilinear;
pub use unstructured::triangulate_cdt;

use crate::error::Result;
use crate::polygeom::PolygonalDomain;

/// Meshes a domain with target edge length `h` and corner-grading
/// exponent `gamma` (`1` = uniform), choosing the structured path for
/// rectilinear domains and constrained Delaunay otherwise.
pub fn triangulate(domain: &PolygonalDomain, h: f64, gamma: f64) -> Result<SimplicialMesh> {
    if domain.is_rectilinear() {
        structured_rectilinear(domain, h, gamma)
    } else {
        triangulate_cdt(domain, h, gamma)
    }
}
