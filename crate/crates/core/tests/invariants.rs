//! Cross-module consistency checks: properties that tie two or more
//! pipeline stages together rather than exercising one in isolation.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::{Point2, Rotation2, Vector2};
use proptest::prelude::*;

use cornerhodge::deccomplex::{assemble, hodge_laplacian, BoundaryConditionSpec};
use cornerhodge::meshgen::{triangulate, sector_mesh, vertex_disk, SimplicialMesh};
use cornerhodge::oracles::capacity_energy_exact;
use cornerhodge::polygeom::{
    build_fold_pair, pentagon_notched_domain, AffinePiece, FoldPairParams, PolygonalDomain,
};
use cornerhodge::spectral::{kernel_dimension, low_spectrum, EIGEN_RESIDUAL_TOL};

/// Exterior angles of every loop must close up: +2π around the outer
/// boundary, −2π around each hole (the interior angle is measured on the
/// material side, so hole corners are reflex).
#[test]
fn exterior_angles_close_up_on_every_loop() {
    let params = FoldPairParams::default();
    let domains = [
        PolygonalDomain::unit_square(),
        PolygonalDomain::square_annulus(),
        pentagon_notched_domain(&params).unwrap(),
    ];
    for domain in &domains {
        let corners = domain.interior_angles();
        for (li, _) in domain.loops().iter().enumerate() {
            let turn: f64 = corners
                .iter()
                .filter(|c| c.loop_index == li)
                .map(|c| PI - c.interior_angle)
                .sum();
            let expected = if li == 0 { 2.0 * PI } else { -2.0 * PI };
            assert!(
                (turn - expected).abs() <= 1e-12,
                "loop {li} of {} turns by {turn}, expected {expected}",
                domain.name()
            );
        }
    }
}

fn rotate(p: Point2<f64>, rot: &Rotation2<f64>, shift: Vector2<f64>) -> Point2<f64> {
    rot * p + shift
}

/// Corner angles, the Euler characteristic, and the area are intrinsic:
/// a rotated and translated copy of a domain reports identical values.
#[test]
fn corner_data_is_rigid_motion_invariant() {
    let domain = pentagon_notched_domain(&FoldPairParams::default()).unwrap();
    let rot = Rotation2::new(0.7071);
    let shift = Vector2::new(0.3, -1.7);
    let mut loops = domain
        .loops()
        .iter()
        .map(|ring| ring.iter().map(|&p| rotate(p, &rot, shift)).collect::<Vec<_>>());
    let outer = loops.next().unwrap();
    let moved = PolygonalDomain::new("moved", outer, loops.collect()).unwrap();

    assert_eq!(moved.euler_characteristic(), domain.euler_characteristic());
    assert!((moved.area() - domain.area()).abs() <= 1e-12 * domain.area());
    let before = domain.interior_angles();
    let after = moved.interior_angles();
    assert_eq!(before.len(), after.len());
    for (b, a) in before.iter().zip(&after) {
        assert_eq!((b.loop_index, b.vertex_index), (a.loop_index, a.vertex_index));
        assert!(
            (b.interior_angle - a.interior_angle).abs() <= 1e-12,
            "angle at loop {} vertex {} moved from {} to {}",
            b.loop_index,
            b.vertex_index,
            b.interior_angle,
            a.interior_angle
        );
    }
}

/// Singular values of the map differentials are intrinsic too: conjugate
/// every affine piece by a rotation and the Lipschitz data must not move.
#[test]
fn piece_singular_values_are_rigid_motion_invariant() {
    let pair = build_fold_pair(&FoldPairParams::default()).unwrap();
    let rot = Rotation2::new(-1.234);
    let shift = Vector2::new(5.0, 2.5);
    for piece in pair.map.pieces() {
        let src = piece.source;
        let moved_src = src.map(|v| rotate(v, &rot, shift));
        let moved_img = src.map(|v| rotate(piece.apply(v), &rot, shift));
        let moved = AffinePiece::from_vertex_images(moved_src, moved_img).unwrap();
        assert!(
            (moved.max_singular_value() - piece.max_singular_value()).abs() <= 1e-12,
            "singular value drifted under a rigid motion"
        );
    }
}

/// Meshing is deterministic: the same domain and parameters yield the
/// same mesh, vertex for vertex, on both the structured and the
/// Delaunay path.
#[test]
fn meshing_is_deterministic() {
    let annulus = PolygonalDomain::square_annulus();
    let a1 = triangulate(&annulus, 0.125, 1.0).unwrap();
    let a2 = triangulate(&annulus, 0.125, 1.0).unwrap();
    assert_eq!(a1.vertices(), a2.vertices());
    assert_eq!(a1.triangles(), a2.triangles());

    let notched = pentagon_notched_domain(&FoldPairParams::default()).unwrap();
    let n1 = triangulate(&notched, 0.15, 1.0).unwrap();
    let n2 = triangulate(&notched, 0.15, 1.0).unwrap();
    assert_eq!(n1.vertices(), n2.vertices());
    assert_eq!(n1.triangles(), n2.triangles());
}

fn shared_annulus_mesh() -> &'static SimplicialMesh {
    static MESH: OnceLock<SimplicialMesh> = OnceLock::new();
    MESH.get_or_init(|| triangulate(&PolygonalDomain::square_annulus(), 0.25, 1.0).unwrap())
}

proptest! {
    /// Growing the disk radius can only grow the captured simplex sets.
    #[test]
    fn corner_disks_grow_monotonically(r1 in 0.0f64..0.8, r2 in 0.0f64..0.8) {
        let (small, large) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        let mesh = shared_annulus_mesh();
        let center = mesh.corner_vertices()[0].0;
        let inner = vertex_disk(mesh, center, small);
        let outer = vertex_disk(mesh, center, large);
        for (a, b) in [
            (&inner.vertices, &outer.vertices),
            (&inner.edges, &outer.edges),
            (&inner.triangles, &outer.triangles),
        ] {
            prop_assert!(
                a.iter().all(|i| b.binary_search(i).is_ok()),
                "disk of radius {small} is not contained in the disk of radius {large}"
            );
        }
    }
}

/// Kernel dimensions are properties of the complex, not of the labels:
/// reversing the vertex numbering must reproduce the degree-1 spectrum.
#[test]
fn kernel_counts_survive_relabeling() {
    let domain = PolygonalDomain::square_annulus();
    let mesh = triangulate(&domain, 0.25, 1.0).unwrap();
    let nv = mesh.num_vertices();
    let perm = |v: usize| nv - 1 - v;
    let mut vertices = mesh.vertices().to_vec();
    vertices.reverse();
    let mut triangles: Vec<[usize; 3]> =
        mesh.triangles().iter().map(|t| t.map(perm)).collect();
    triangles.reverse();
    let relabeled = SimplicialMesh::build(vertices, triangles, &domain).unwrap();

    let mut spectra = Vec::new();
    for m in [mesh, relabeled] {
        let sys = assemble(m, BoundaryConditionSpec::maximal()).unwrap();
        let pencil = hodge_laplacian(&sys, 1).unwrap();
        let eig =
            low_spectrum(&pencil.stiffness, &pencil.mass, 8, EIGEN_RESIDUAL_TOL).unwrap();
        let kernel = kernel_dimension(&eig.values).unwrap();
        spectra.push((kernel.dimension, eig.values));
    }
    assert_eq!(spectra[0].0, 1, "the annulus carries one harmonic 1-form");
    assert_eq!(spectra[0].0, spectra[1].0);
    for (a, b) in spectra[0].1.iter().zip(&spectra[1].1) {
        assert!(
            (a - b).abs() <= 1e-8 * (1.0 + a.abs()),
            "eigenvalue moved from {a} to {b} under relabeling"
        );
    }
}

/// The quadrature oracle and the finite-element pipeline must agree on
/// the capacity energy: interpolate the radial test function on a
/// log-graded sector mesh and compare its discrete Dirichlet energy with
/// the closed form, at two resolutions.
#[test]
fn discrete_energy_approaches_the_capacity_oracle() {
    let (alpha, eps, beta) = (0.5, 0.01, 3.0 * PI / 4.0);
    let exact = capacity_energy_exact(alpha, eps, beta);
    let mut errors = Vec::new();
    for (nr, nphi) in [(24, 16), (48, 32)] {
        let (_, mesh) = sector_mesh(eps, 1.0, beta, nr, nphi).unwrap();
        let u: Vec<f64> = mesh
            .vertices()
            .iter()
            .map(|p| {
                let r = (p.x * p.x + p.y * p.y).sqrt();
                (1.0 - (eps / r).powf(alpha)).max(0.0)
            })
            .collect();
        let sys = assemble(mesh, BoundaryConditionSpec::maximal()).unwrap();
        let du = sys.d0().matvec(&u);
        let m1du = sys.m1().matvec(&du);
        let energy: f64 = du.iter().zip(&m1du).map(|(a, b)| a * b).sum();
        errors.push((energy - exact).abs() / exact);
    }
    assert!(errors[0] <= 0.05, "coarse sector energy off by {:.3e}", errors[0]);
    assert!(
        errors[1] < errors[0],
        "refinement did not improve the energy: {:.3e} -> {:.3e}",
        errors[0],
        errors[1]
    );
}
