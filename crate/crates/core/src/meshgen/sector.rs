//! Structured meshes of circular-sector annuli in polar coordinates,
//! used to compare discrete Dirichlet energies against the radial
//! capacity integrals on their natural geometry.

use nalgebra::{point, Point2};

use super::mesh::SimplicialMesh;
use crate::error::{Error, Result};
use crate::polygeom::PolygonalDomain;

/// Meshes the polygonal sector `{ (r, φ) : r ∈ [r_inner, r_outer],
/// φ ∈ [-beta, beta] }` with `nr` log-uniform radial and `nphi` uniform
/// angular intervals. Returns the polygonal domain (whose curved arcs are
/// the chord polylines of the grid) together with a conforming mesh, so
/// the mesh covers the domain exactly.
pub fn sector_mesh(
    r_inner: f64,
    r_outer: f64,
    beta: f64,
    nr: usize,
    nphi: usize,
) -> Result<(PolygonalDomain, SimplicialMesh)> {
    if !(r_inner > 0.0 && r_outer > r_inner) {
        return Err(Error::geometry(format!(
            "need 0 < r_inner < r_outer, got {r_inner}, {r_outer}"
        )));
    }
    if !(beta > 0.0 && beta < std::f64::consts::PI) {
        return Err(Error::geometry(format!("sector half-angle must lie in (0, π), got {beta}")));
    }
    if nr < 1 || nphi < 2 {
        return Err(Error::refinement(format!(
            "sector grid needs nr ≥ 1 and nphi ≥ 2, got {nr} × {nphi}"
        )));
    }

    let r_of = |i: usize| r_inner * (r_outer / r_inner).powf(i as f64 / nr as f64);
    let phi_of = |j: usize| -beta + 2.0 * beta * j as f64 / nphi as f64;
    let at = |i: usize, j: usize| -> Point2<f64> {
        let (r, phi) = (r_of(i), phi_of(j));
        point![r * phi.cos(), r * phi.sin()]
    };

    let mut vertices = Vec::with_capacity((nr + 1) * (nphi + 1));
    for i in 0..=nr {
        for j in 0..=nphi {
            vertices.push(at(i, j));
        }
    }
    let id = |i: usize, j: usize| i * (nphi + 1) + j;
    let mut triangles = Vec::with_capacity(2 * nr * nphi);
    for i in 0..nr {
        for j in 0..nphi {
            // Quads are counterclockwise for increasing r and φ.
            triangles.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            triangles.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }

    // Boundary polygon: outer chord arc (φ increasing), then the radial
    // side at +beta, the inner arc reversed, and the radial side at -beta.
    let mut outer_ring = Vec::new();
    for j in 0..=nphi {
        outer_ring.push(at(nr, j));
    }
    for j in (0..=nphi).rev() {
        outer_ring.push(at(0, j));
    }
    let domain = PolygonalDomain::new(
        format!("sector-{nr}x{nphi}"),
        outer_ring,
        Vec::new(),
    )?;

    let mesh = SimplicialMesh::build(vertices, triangles, &domain)?;
    Ok((domain, mesh))
}
