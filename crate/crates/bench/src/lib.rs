//! Shared fixtures for the pipeline benchmarks.

use cornerhodge::deccomplex::{assemble, BoundaryConditionSpec, HodgeSystem};
use cornerhodge::meshgen::{triangulate, SimplicialMesh};
use cornerhodge::polygeom::PolygonalDomain;

pub fn annulus_mesh(h: f64) -> SimplicialMesh {
    triangulate(&PolygonalDomain::square_annulus(), h, 1.0).expect("benchmark mesh")
}

pub fn annulus_system(h: f64) -> HodgeSystem {
    assemble(annulus_mesh(h), BoundaryConditionSpec::maximal()).expect("benchmark system")
}
