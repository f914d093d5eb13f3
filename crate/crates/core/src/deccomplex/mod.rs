//! The lowest-order Whitney cochain complex on a triangulation.
//!
//! Degrees 0/1/2 are spanned by vertex hats, edge elements
//! `w_{ij} = λ_i ∇λ_j - λ_j ∇λ_i`, and the per-triangle densities
//! `1/area`. Exterior derivatives are the integer incidence matrices of
//! the mesh; inner products are the Whitney mass matrices. In this
//! conforming complex the *maximal* corner treatment is natural — no
//! degrees of freedom are constrained — while the *minimal* treatment
//! removes every simplex meeting an open disk of radius `rho` around each
//! corner, i.e. admissible cochains vanish near the corners.
//!
//! Mass lumping (the diagonal part of an edge mass, the row-sum of a
//! vertex mass) is used only inside codifferentials, where it keeps the
//! Laplacian pencils sparse; it never changes which cochains are closed
//! or co-closed, so kernel dimensions are those of the combinatorial
//! Hodge decomposition regardless of lumping.

mod dirac;
mod laplacian;

pub use dirac::{apply_dirac, codifferential};
pub use laplacian::{hodge_laplacian, LaplacianPencil};

use crate::error::{Error, Result};
use crate::meshgen::{corner_disks, SimplicialMesh};
use crate::sparse::CsrMatrix;

/// How corner vertices are treated by the absolute boundary condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CornerTreatment {
    /// Natural treatment: the full conforming complex.
    Maximal,
    /// Essential removal of all degrees of freedom whose simplex meets
    /// the open disk of radius `rho` around any corner.
    Minimal { rho: f64 },
}

/// Absolute boundary conditions with a choice of corner treatment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryConditionSpec {
    pub treatment: CornerTreatment,
}

impl BoundaryConditionSpec {
    pub fn maximal() -> Self {
        BoundaryConditionSpec { treatment: CornerTreatment::Maximal }
    }

    pub fn minimal(rho: f64) -> Self {
        BoundaryConditionSpec { treatment: CornerTreatment::Minimal { rho } }
    }

    pub fn label(&self) -> String {
        match self.treatment {
            CornerTreatment::Maximal => "maximal".to_string(),
            CornerTreatment::Minimal { .. } => "minimal".to_string(),
        }
    }

    pub fn rho(&self) -> f64 {
        match self.treatment {
            CornerTreatment::Maximal => 0.0,
            CornerTreatment::Minimal { rho } => rho,
        }
    }
}

/// Assembled Whitney complex of a mesh under a boundary condition.
#[derive(Debug, Clone)]
pub struct HodgeSystem {
    mesh: SimplicialMesh,
    bc: BoundaryConditionSpec,
    /// Gradient incidence, `E × V`, entries ±1.
    d0: CsrMatrix,
    /// Curl incidence, `F × E`, entries ±1.
    d1: CsrMatrix,
    /// Consistent vertex (P1) mass.
    m0: CsrMatrix,
    /// Row-sum lumped vertex mass (strictly positive).
    m0_lumped: Vec<f64>,
    /// Consistent Whitney edge mass.
    m1: CsrMatrix,
    /// Diagonal of the edge mass (strictly positive).
    m1_lumped: Vec<f64>,
    /// Face mass `1/area(T)`, exactly diagonal for Whitney 2-forms.
    m2: Vec<f64>,
    /// Unconstrained simplex indices per degree, strictly increasing.
    free: [Vec<usize>; 3],
    /// Constrained simplex indices per degree, strictly increasing.
    constrained: [Vec<usize>; 3],
}

/// Assembles mass and incidence operators and resolves the boundary
/// condition into per-degree free/constrained index sets.
pub fn assemble(mesh: SimplicialMesh, bc: BoundaryConditionSpec) -> Result<HodgeSystem> {
    // The mesh construction tags every boundary edge; verify rather than
    // trust, since meshes can also arrive from files.
    let mut edge_use = vec![0usize; mesh.num_edges()];
    for te in mesh.triangle_edges() {
        for &(e, _) in te {
            edge_use[e] += 1;
        }
    }
    for (e, &cnt) in edge_use.iter().enumerate() {
        if cnt == 1 && !mesh.is_boundary_edge(e) {
            return Err(Error::assembly(format!(
                "boundary edge {:?} carries no tag",
                mesh.edges()[e]
            )));
        }
    }

    let nv = mesh.num_vertices();
    let ne = mesh.num_edges();
    let nf = mesh.num_triangles();

    let mut d0_trips = Vec::with_capacity(2 * ne);
    for (e, &[u, v]) in mesh.edges().iter().enumerate() {
        d0_trips.push((e, u, -1.0));
        d0_trips.push((e, v, 1.0));
    }
    let d0 = CsrMatrix::from_triplets(ne, nv, &d0_trips);

    let mut d1_trips = Vec::with_capacity(3 * nf);
    for (t, te) in mesh.triangle_edges().iter().enumerate() {
        for &(e, sign) in te {
            d1_trips.push((t, e, sign as f64));
        }
    }
    let d1 = CsrMatrix::from_triplets(nf, ne, &d1_trips);

    let mut m0_trips = Vec::new();
    let mut m0_lumped = vec![0.0; nv];
    let mut m1_trips = Vec::new();
    let mut m1_lumped = vec![0.0; ne];
    let mut m2 = vec![0.0; nf];

    for (t, tri) in mesh.triangles().iter().enumerate() {
        let [a, b, c] = *tri;
        let pa = mesh.vertices()[a];
        let pb = mesh.vertices()[b];
        let pc = mesh.vertices()[c];
        let area = mesh.triangle_area(t);
        m2[t] = 1.0 / area;

        for (i, &p) in tri.iter().enumerate() {
            m0_lumped[p] += area / 3.0;
            for (j, &q) in tri.iter().enumerate() {
                let w = if i == j { area / 6.0 } else { area / 12.0 };
                m0_trips.push((p, q, w));
            }
        }

        // Barycentric gradients: ∇λ_a is the inward rotation of the
        // opposite edge over twice the area.
        let inv2a = 1.0 / (2.0 * area);
        let grads = [
            [(pb.y - pc.y) * inv2a, (pc.x - pb.x) * inv2a],
            [(pc.y - pa.y) * inv2a, (pa.x - pc.x) * inv2a],
            [(pa.y - pb.y) * inv2a, (pb.x - pa.x) * inv2a],
        ];
        // ∫ λ_p λ_q over the triangle.
        let s = |p: usize, q: usize| if p == q { area / 6.0 } else { area / 12.0 };
        let dot = |u: [f64; 2], v: [f64; 2]| u[0] * v[0] + u[1] * v[1];

        // Local Whitney edge mass for oriented local edges k: t[k] → t[k+1].
        let te = mesh.triangle_edges()[t];
        for k in 0..3 {
            let (i, j) = (k, (k + 1) % 3);
            for l in 0..3 {
                let (p, q) = (l, (l + 1) % 3);
                let val = s(i, p) * dot(grads[j], grads[q]) - s(i, q) * dot(grads[j], grads[p])
                    - s(j, p) * dot(grads[i], grads[q])
                    + s(j, q) * dot(grads[i], grads[p]);
                let (ek, sk) = te[k];
                let (el, sl) = te[l];
                let v = val * (sk as f64) * (sl as f64);
                m1_trips.push((ek, el, v));
                if ek == el && k == l {
                    m1_lumped[ek] += v;
                }
            }
        }
    }

    let m0 = CsrMatrix::from_triplets(nv, nv, &m0_trips);
    let m1 = CsrMatrix::from_triplets(ne, ne, &m1_trips).symmetrized();

    if m1_lumped.iter().any(|&v| v <= 0.0) || m0_lumped.iter().any(|&v| v <= 0.0) {
        return Err(Error::assembly(
            "lumped mass has a non-positive entry; mesh is degenerate".to_string(),
        ));
    }

    let (free, constrained) = match bc.treatment {
        CornerTreatment::Maximal => {
            let free = [(0..nv).collect(), (0..ne).collect(), (0..nf).collect()];
            (free, [Vec::new(), Vec::new(), Vec::new()])
        }
        CornerTreatment::Minimal { rho } => {
            let disks = corner_disks(&mesh, rho)?;
            let mut gone = [vec![false; nv], vec![false; ne], vec![false; nf]];
            for d in &disks {
                for &v in &d.vertices {
                    gone[0][v] = true;
                }
                for &e in &d.edges {
                    gone[1][e] = true;
                }
                for &t in &d.triangles {
                    gone[2][t] = true;
                }
            }
            let split = |flags: &[bool]| {
                let mut free = Vec::new();
                let mut constrained = Vec::new();
                for (i, &g) in flags.iter().enumerate() {
                    if g {
                        constrained.push(i);
                    } else {
                        free.push(i);
                    }
                }
                (free, constrained)
            };
            let (f0, c0) = split(&gone[0]);
            let (f1, c1) = split(&gone[1]);
            let (f2, c2) = split(&gone[2]);
            ([f0, f1, f2], [c0, c1, c2])
        }
    };

    Ok(HodgeSystem {
        mesh,
        bc,
        d0,
        d1,
        m0,
        m0_lumped,
        m1,
        m1_lumped,
        m2,
        free,
        constrained,
    })
}

impl HodgeSystem {
    pub fn mesh(&self) -> &SimplicialMesh {
        &self.mesh
    }
    pub fn bc(&self) -> &BoundaryConditionSpec {
        &self.bc
    }
    pub fn d0(&self) -> &CsrMatrix {
        &self.d0
    }
    pub fn d1(&self) -> &CsrMatrix {
        &self.d1
    }
    pub fn m0(&self) -> &CsrMatrix {
        &self.m0
    }
    pub fn m1(&self) -> &CsrMatrix {
        &self.m1
    }
    pub fn m2(&self) -> &[f64] {
        &self.m2
    }
    pub fn m0_lumped(&self) -> &[f64] {
        &self.m0_lumped
    }
    pub fn m1_lumped(&self) -> &[f64] {
        &self.m1_lumped
    }
    pub fn free(&self, degree: usize) -> &[usize] {
        &self.free[degree]
    }
    pub fn constrained(&self, degree: usize) -> &[usize] {
        &self.constrained[degree]
    }

    pub fn num_simplices(&self, degree: usize) -> usize {
        match degree {
            0 => self.mesh.num_vertices(),
            1 => self.mesh.num_edges(),
            2 => self.mesh.num_triangles(),
            _ => panic!("degree {degree} out of range"),
        }
    }

    /// Zero-extends free-indexed values to the full complex.
    pub fn extend_by_zero(&self, degree: usize, values: &[f64]) -> Vec<f64> {
        assert_eq!(values.len(), self.free[degree].len());
        let mut full = vec![0.0; self.num_simplices(degree)];
        for (k, &i) in self.free[degree].iter().enumerate() {
            full[i] = values[k];
        }
        full
    }
}
