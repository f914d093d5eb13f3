//! The simplicial mesh type and its derived combinatorics.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::{point, Point2};

use crate::error::{Error, Result};
use crate::polygeom::predicates::{dist_point_segment, dist_point_triangle};
use crate::polygeom::PolygonalDomain;
use crate::report::atomic_write;

/// Axis classification of a boundary edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeTag {
    Vertical,
    Horizontal,
    Oblique,
}

impl std::fmt::Display for EdgeTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EdgeTag::Vertical => write!(f, "vertical"),
            EdgeTag::Horizontal => write!(f, "horizontal"),
            EdgeTag::Oblique => write!(f, "oblique"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryEdge {
    /// Index into [`SimplicialMesh::edges`].
    pub edge: usize,
    pub tag: EdgeTag,
}

/// A triangulation of a polygonal domain.
///
/// Triangles are counterclockwise. Edges are derived, deduplicated, and
/// stored with the orientation convention lower vertex index → higher
/// vertex index, sorted lexicographically; this fixes the sign conventions
/// of all incidence operators downstream.
#[derive(Debug, Clone)]
pub struct SimplicialMesh {
    vertices: Vec<Point2<f64>>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    /// For triangle `t` and local edge `k` (from vertex `k` to `k+1 mod 3`):
    /// the global edge index and the traversal sign relative to the global
    /// orientation.
    triangle_edges: Vec<[(usize, i8); 3]>,
    boundary: Vec<BoundaryEdge>,
    /// `(mesh vertex, corner index)` pairs, in the order the domain lists
    /// its corners.
    corner_vertices: Vec<(usize, usize)>,
    h_max: f64,
    h_min: f64,
}

impl SimplicialMesh {
    /// Assembles the mesh from raw vertices and triangles and validates it
    /// against the domain: positive orientation, manifoldness, consistent
    /// interior-edge orientation, exact area coverage, the Euler relation
    /// `V - E + F = χ`, and the presence of every domain corner as a mesh
    /// vertex.
    pub fn build(
        vertices: Vec<Point2<f64>>,
        triangles: Vec<[usize; 3]>,
        domain: &PolygonalDomain,
    ) -> Result<SimplicialMesh> {
        if triangles.is_empty() {
            return Err(Error::refinement("mesh has no triangles"));
        }
        let nv = vertices.len();
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if v >= nv {
                    return Err(Error::refinement(format!(
                        "triangle {t} references missing vertex {v}"
                    )));
                }
            }
            let [a, b, c] = *tri;
            let area = crate::polygeom::predicates::cross(vertices[a], vertices[b], vertices[c]);
            if area <= 0.0 {
                return Err(Error::refinement(format!(
                    "triangle {t} is degenerate or clockwise (doubled area {area:.3e})"
                )));
            }
        }

        let mut edge_ids: BTreeMap<[usize; 2], usize> = BTreeMap::new();
        for tri in &triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let key = [a.min(b), a.max(b)];
                let next = edge_ids.len();
                edge_ids.entry(key).or_insert(next);
            }
        }
        // Re-index in lexicographic key order.
        let edges: Vec<[usize; 2]> = edge_ids.keys().copied().collect();
        for (i, k) in edge_ids.values_mut().zip(0..) {
            *i = k;
        }

        let mut triangle_edges = Vec::with_capacity(triangles.len());
        let mut use_count = vec![0usize; edges.len()];
        let mut orient_sum = vec![0i32; edges.len()];
        for tri in &triangles {
            let mut local = [(0usize, 0i8); 3];
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let idx = edge_ids[&[a.min(b), a.max(b)]];
                let sign: i8 = if a < b { 1 } else { -1 };
                local[k] = (idx, sign);
                use_count[idx] += 1;
                orient_sum[idx] += sign as i32;
            }
            triangle_edges.push(local);
        }
        for (e, &cnt) in use_count.iter().enumerate() {
            if cnt > 2 {
                return Err(Error::refinement(format!(
                    "edge {:?} is shared by {cnt} triangles (non-manifold)",
                    edges[e]
                )));
            }
            if cnt == 2 && orient_sum[e] != 0 {
                return Err(Error::refinement(format!(
                    "edge {:?} is traversed twice in the same direction",
                    edges[e]
                )));
            }
        }

        let mut h_max = 0.0_f64;
        let mut h_min = f64::INFINITY;
        for e in &edges {
            let len = (vertices[e[1]] - vertices[e[0]]).norm();
            h_max = h_max.max(len);
            h_min = h_min.min(len);
        }

        let mesh_area: f64 = triangles
            .iter()
            .map(|&[a, b, c]| {
                0.5 * crate::polygeom::predicates::cross(vertices[a], vertices[b], vertices[c])
            })
            .sum();
        let domain_area = domain.area();
        if (mesh_area - domain_area).abs() > 1e-8 * domain_area {
            return Err(Error::refinement(format!(
                "mesh covers area {mesh_area:.12} but the domain has area {domain_area:.12}; \
                 the target edge length is too coarse to resolve the domain"
            )));
        }

        let v = nv as i64;
        let e = edges.len() as i64;
        let f = triangles.len() as i64;
        if v - e + f != domain.euler_characteristic() {
            return Err(Error::refinement(format!(
                "V - E + F = {} does not match the domain Euler characteristic {}",
                v - e + f,
                domain.euler_characteristic()
            )));
        }

        let scale = h_max.max(1e-300);
        let mut corner_vertices = Vec::new();
        for (ci, corner) in domain.interior_angles().iter().enumerate() {
            let found = vertices
                .iter()
                .position(|p| (p - corner.position).norm() <= 1e-9 * scale)
                .ok_or_else(|| {
                    Error::refinement(format!(
                        "domain corner at ({:.6}, {:.6}) is not a mesh vertex",
                        corner.position.x, corner.position.y
                    ))
                })?;
            corner_vertices.push((found, ci));
        }

        let mut mesh = SimplicialMesh {
            vertices,
            triangles,
            edges,
            triangle_edges,
            boundary: Vec::new(),
            corner_vertices,
            h_max,
            h_min,
        };
        mesh.boundary = derive_boundary_tags(&mesh, &use_count);
        Ok(mesh)
    }

    pub fn vertices(&self) -> &[Point2<f64>] {
        &self.vertices
    }
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }
    pub fn triangle_edges(&self) -> &[[(usize, i8); 3]] {
        &self.triangle_edges
    }
    pub fn boundary(&self) -> &[BoundaryEdge] {
        &self.boundary
    }
    pub fn corner_vertices(&self) -> &[(usize, usize)] {
        &self.corner_vertices
    }
    /// Maximum edge length.
    pub fn h_max(&self) -> f64 {
        self.h_max
    }
    /// Minimum edge length.
    pub fn h_min(&self) -> f64 {
        self.h_min
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }
    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices() as i64 - self.num_edges() as i64 + self.num_triangles() as i64
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        0.5 * crate::polygeom::predicates::cross(self.vertices[a], self.vertices[b], self.vertices[c])
    }

    pub fn total_area(&self) -> f64 {
        (0..self.num_triangles()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn is_boundary_edge(&self, edge: usize) -> bool {
        self.boundary.iter().any(|b| b.edge == edge)
    }

    /// Writes the mesh in OFF format plus a sidecar tag file listing each
    /// boundary edge as `v0 v1 tag`.
    pub fn write(&self, mesh_path: &Path, tags_path: &Path) -> Result<()> {
        let mut s = String::from("OFF\n");
        s.push_str(&format!("{} {} 0\n", self.num_vertices(), self.num_triangles()));
        for p in &self.vertices {
            s.push_str(&format!("{:.16e} {:.16e} 0.0\n", p.x, p.y));
        }
        for t in &self.triangles {
            s.push_str(&format!("3 {} {} {}\n", t[0], t[1], t[2]));
        }
        atomic_write(mesh_path, s.as_bytes())?;

        let mut tags = String::from("# boundary edge tags: v0 v1 tag\n");
        for b in &self.boundary {
            let [a, c] = self.edges[b.edge];
            tags.push_str(&format!("{a} {c} {}\n", b.tag));
        }
        atomic_write(tags_path, tags.as_bytes())
    }
}

/// Reads a mesh written by [`SimplicialMesh::write`], revalidating it
/// against the domain and cross-checking the sidecar tags.
pub fn read_mesh(
    mesh_path: &Path,
    tags_path: &Path,
    domain: &PolygonalDomain,
) -> Result<SimplicialMesh> {
    let text = std::fs::read_to_string(mesh_path)?;
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let parse_err = |line: usize, message: &str| Error::Parse { line: line + 1, message: message.into() };

    let (l0, header) = lines.next().ok_or(parse_err(0, "empty file"))?;
    if header.trim() != "OFF" {
        return Err(parse_err(l0, "expected OFF header"));
    }
    let (l1, counts) = lines.next().ok_or(parse_err(l0, "missing count line"))?;
    let counts: Vec<usize> = counts
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| parse_err(l1, "bad count")))
        .collect::<Result<_>>()?;
    if counts.len() < 2 {
        return Err(parse_err(l1, "count line needs `V F [E]`"));
    }
    let (nv, nf) = (counts[0], counts[1]);
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, line) = lines.next().ok_or(parse_err(l1, "truncated vertex list"))?;
        let mut it = line.split_whitespace();
        let x: f64 = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or(parse_err(ln, "bad vertex coordinate"))?;
        let y: f64 = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or(parse_err(ln, "bad vertex coordinate"))?;
        vertices.push(point![x, y]);
    }
    let mut triangles = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (ln, line) = lines.next().ok_or(parse_err(l1, "truncated face list"))?;
        let ids: Vec<usize> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(ln, "bad face index")))
            .collect::<Result<_>>()?;
        if ids.len() != 4 || ids[0] != 3 {
            return Err(parse_err(ln, "faces must be `3 a b c`"));
        }
        triangles.push([ids[1], ids[2], ids[3]]);
    }
    let mesh = SimplicialMesh::build(vertices, triangles, domain)?;

    let tag_text = std::fs::read_to_string(tags_path)?;
    let mut listed = 0usize;
    for (idx, raw) in tag_text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(parse_err(idx, "tag lines must be `v0 v1 tag`"));
        }
        listed += 1;
        let a: usize = toks[0].parse().map_err(|_| parse_err(idx, "bad vertex index"))?;
        let b: usize = toks[1].parse().map_err(|_| parse_err(idx, "bad vertex index"))?;
        let key = [a.min(b), a.max(b)];
        let found = mesh.boundary.iter().find(|be| mesh.edges[be.edge] == key).ok_or_else(|| {
            parse_err(idx, &format!("edge {key:?} is not a boundary edge of the mesh"))
        })?;
        if found.tag.to_string() != toks[2] {
            return Err(parse_err(
                idx,
                &format!("edge {key:?} tag mismatch: file says {}, mesh says {}", toks[2], found.tag),
            ));
        }
    }
    if listed != mesh.boundary.len() {
        return Err(Error::assembly(format!(
            "tag file lists {listed} boundary edges, mesh has {}",
            mesh.boundary.len()
        )));
    }
    Ok(mesh)
}

fn derive_boundary_tags(mesh: &SimplicialMesh, use_count: &[usize]) -> Vec<BoundaryEdge> {
    let eps = 1e-9 * mesh.h_max;
    let mut out = Vec::new();
    for (e, &cnt) in use_count.iter().enumerate() {
        if cnt != 1 {
            continue;
        }
        let [a, b] = mesh.edges[e];
        let d = mesh.vertices[b] - mesh.vertices[a];
        let tag = if d.x.abs() <= eps {
            EdgeTag::Vertical
        } else if d.y.abs() <= eps {
            EdgeTag::Horizontal
        } else {
            EdgeTag::Oblique
        };
        out.push(BoundaryEdge { edge: e, tag });
    }
    out
}

/// Recomputes boundary tags (the classification is purely geometric, so
/// this is also the consistency check for externally read meshes).
pub fn tag_boundary(mesh: &SimplicialMesh) -> Vec<BoundaryEdge> {
    let mut use_count = vec![0usize; mesh.num_edges()];
    for te in mesh.triangle_edges() {
        for &(e, _) in te {
            use_count[e] += 1;
        }
    }
    derive_boundary_tags(mesh, &use_count)
}

/// The part of the mesh strictly inside the open disk of radius `rho`
/// around a vertex: a simplex is a member when its distance to the center
/// is strictly below `rho`, so `rho = 0` yields empty sets.
#[derive(Debug, Clone)]
pub struct VertexDisk {
    pub center_vertex: usize,
    pub rho: f64,
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    pub triangles: Vec<usize>,
}

pub fn vertex_disk(mesh: &SimplicialMesh, center_vertex: usize, rho: f64) -> VertexDisk {
    let c = mesh.vertices()[center_vertex];
    let vertices: Vec<usize> = (0..mesh.num_vertices())
        .filter(|&v| (mesh.vertices()[v] - c).norm() < rho)
        .collect();
    let edges: Vec<usize> = (0..mesh.num_edges())
        .filter(|&e| {
            let [a, b] = mesh.edges()[e];
            dist_point_segment(c, mesh.vertices()[a], mesh.vertices()[b]) < rho
        })
        .collect();
    let triangles: Vec<usize> = (0..mesh.num_triangles())
        .filter(|&t| {
            let [a, b, d] = mesh.triangles()[t];
            dist_point_triangle(c, mesh.vertices()[a], mesh.vertices()[b], mesh.vertices()[d]) < rho
        })
        .collect();
    VertexDisk { center_vertex, rho, vertices, edges, triangles }
}

/// Disks of radius `rho` around all corner vertices of the mesh. Fails
/// when the disks could overlap (`rho` above half the minimum corner
/// separation).
pub fn corner_disks(mesh: &SimplicialMesh, rho: f64) -> Result<Vec<VertexDisk>> {
    if rho < 0.0 {
        return Err(Error::geometry(format!("disk radius must be nonnegative, got {rho}")));
    }
    let corners: Vec<Point2<f64>> =
        mesh.corner_vertices().iter().map(|&(v, _)| mesh.vertices()[v]).collect();
    let mut sep = f64::INFINITY;
    for i in 0..corners.len() {
        for j in (i + 1)..corners.len() {
            sep = sep.min((corners[i] - corners[j]).norm());
        }
    }
    if rho > 0.5 * sep {
        return Err(Error::geometry(format!(
            "disk radius {rho} exceeds half the minimum corner separation {sep:.6}; \
             corner disks would overlap"
        )));
    }
    Ok(mesh
        .corner_vertices()
        .iter()
        .map(|&(v, _)| vertex_disk(mesh, v, rho))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_square_mesh() -> (PolygonalDomain, SimplicialMesh) {
        let domain = PolygonalDomain::unit_square();
        let vertices = vec![
            point![0.0, 0.0],
            point![1.0, 0.0],
            point![1.0, 1.0],
            point![0.0, 1.0],
        ];
        let triangles = vec![[0, 1, 2], [0, 2, 3]];
        let mesh = SimplicialMesh::build(vertices, triangles, &domain).unwrap();
        (domain, mesh)
    }

    #[test]
    fn derived_edges_are_sorted_and_oriented() {
        let (_, mesh) = tiny_square_mesh();
        assert_eq!(mesh.num_edges(), 5);
        assert_eq!(mesh.edges(), &[[0, 1], [0, 2], [0, 3], [1, 2], [2, 3]]);
        for e in mesh.edges() {
            assert!(e[0] < e[1]);
        }
        assert_eq!(mesh.euler_characteristic(), 1);
    }

    #[test]
    fn boundary_tags_split_by_axis() {
        let (_, mesh) = tiny_square_mesh();
        let vertical =
            mesh.boundary().iter().filter(|b| b.tag == EdgeTag::Vertical).count();
        let horizontal =
            mesh.boundary().iter().filter(|b| b.tag == EdgeTag::Horizontal).count();
        assert_eq!((vertical, horizontal), (2, 2));
        assert_eq!(tag_boundary(&mesh), mesh.boundary());
    }

    #[test]
    fn clockwise_triangle_is_rejected() {
        let domain = PolygonalDomain::unit_square();
        let vertices = vec![
            point![0.0, 0.0],
            point![1.0, 0.0],
            point![1.0, 1.0],
            point![0.0, 1.0],
        ];
        let res = SimplicialMesh::build(vertices, vec![[0, 2, 1], [0, 2, 3]], &domain);
        assert!(res.is_err());
    }

    #[test]
    fn vertex_disk_strictness() {
        let (_, mesh) = tiny_square_mesh();
        let empty = vertex_disk(&mesh, 0, 0.0);
        assert!(empty.vertices.is_empty() && empty.edges.is_empty() && empty.triangles.is_empty());
        let d = vertex_disk(&mesh, 0, 0.4);
        assert_eq!(d.vertices, vec![0]);
        // Edges incident to the corner come within 0.4 of it.
        assert!(d.edges.len() == 3);
        assert!(d.triangles.len() == 2);
    }

    #[test]
    fn disk_monotonicity_in_rho() {
        let (_, mesh) = tiny_square_mesh();
        let small = vertex_disk(&mesh, 0, 0.3);
        let large = vertex_disk(&mesh, 0, 0.45);
        assert!(small.vertices.iter().all(|v| large.vertices.contains(v)));
        assert!(small.edges.iter().all(|e| large.edges.contains(e)));
        assert!(small.triangles.iter().all(|t| large.triangles.contains(t)));
    }

    #[test]
    fn overlapping_corner_disks_are_rejected() {
        let (_, mesh) = tiny_square_mesh();
        assert!(corner_disks(&mesh, 0.6).is_err());
        assert!(corner_disks(&mesh, 0.4).is_ok());
    }

    #[test]
    fn mesh_file_roundtrip() {
        let (domain, mesh) = tiny_square_mesh();
        let dir = std::env::temp_dir().join("cornerhodge-mesh-roundtrip");
        std::fs::create_dir_all(&dir).unwrap();
        let mp = dir.join("m.off");
        let tp = dir.join("m.tags");
        mesh.write(&mp, &tp).unwrap();
        let back = read_mesh(&mp, &tp, &domain).unwrap();
        assert_eq!(back.num_vertices(), mesh.num_vertices());
        assert_eq!(back.triangles(), mesh.triangles());
        assert_eq!(back.boundary(), mesh.boundary());
    }
}
