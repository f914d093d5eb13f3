//! A matched pair of notched domains and the folding map between them.
//!
//! The source is a square with a pentagonal hole, the target the same
//! square with an equilateral-triangle hole; both carry a small notch
//! near the bottom edge. The map fixes everything outside a ring around
//! the hole and, inside the ring, carries the pentagon boundary onto the
//! triangle boundary: three pentagon edges map onto the three triangle
//! edges, and the remaining two are split at their midpoints and mapped
//! out-and-back, so the returning halves reverse orientation. Those
//! reversed pieces are the folds.
//!
//! Construction, from the outside in:
//!
//! * a collar between the outer square and a square seam, meshed by
//!   constrained Delaunay and mapped by the identity (the notch lives
//!   here and is shared by both domains);
//! * a transition band between the seam and a circular ring, stitched
//!   node-by-node in angular order, also identity;
//! * a layered band between the ring and the pentagon whose spokes
//!   interpolate image angle and radius separately between the boundary
//!   assignment (innermost layer) and the identity (ring layer). Image
//!   radii are clamped away from the triangular hole so intermediate
//!   layers cannot cut across it.
//!
//! All inter-region interfaces reuse the same floating-point vertex
//! coordinates, so the assembled pieces form one conforming mesh and the
//! map is continuous by construction; `CornerMap::validate` re-checks
//! both claims numerically.

use crate::error::{Error, Result};
use crate::meshgen::{triangulate, SimplicialMesh};
use crate::polygeom::cornermap::{AffinePiece, CornerMap};
use crate::polygeom::PolygonalDomain;
use nalgebra::{point, Point2};
use std::f64::consts::TAU;

/// Half-width of the outer square shared by both domains.
const OUTER_HALF: f64 = 2.0;
/// Half-width of the square seam between the collar and the inner bands.
const SEAM_HALF: f64 = 1.6;
/// Radius of the circle on which the map becomes the identity.
const RING_RADIUS: f64 = 1.4;
/// Target edge length of the collar mesh.
const COLLAR_H: f64 = 0.4;
/// Radial layers between the pentagon and the ring.
const LAYERS: usize = 16;
/// Subdivisions of each of the seven boundary arcs (five pentagon edges,
/// two of them halved), giving the number of spokes.
const ARC_SUBDIVISIONS: usize = 4;
const SPOKES: usize = 7 * ARC_SUBDIVISIONS;
/// Minimum clearance interpolated image radii keep from the triangular
/// hole boundary.
const HOLE_CLEARANCE: f64 = 0.08;

/// Shape parameters for the domain pair.
#[derive(Debug, Clone, Copy)]
pub struct FoldPairParams {
    /// Circumradius of the pentagonal hole in the source domain.
    pub pentagon_circumradius: f64,
    /// Side length of the triangular hole in the target domain.
    pub triangle_side: f64,
    /// Size of the notch both domains carry near the bottom edge.
    pub notch_size: f64,
}

impl Default for FoldPairParams {
    fn default() -> Self {
        FoldPairParams { pentagon_circumradius: 1.0, triangle_side: 1.0, notch_size: 0.2 }
    }
}

impl FoldPairParams {
    fn validate(&self) -> Result<()> {
        if !(self.pentagon_circumradius > 0.0 && self.pentagon_circumradius <= 1.25) {
            return Err(Error::config(format!(
                "pentagon circumradius must lie in (0, 1.25] so the hole clears the ring of \
                 radius {RING_RADIUS}, got {}",
                self.pentagon_circumradius
            )));
        }
        let circum = self.triangle_side / 3f64.sqrt();
        if !(self.triangle_side > 0.0) || circum + 2.0 * HOLE_CLEARANCE > RING_RADIUS {
            return Err(Error::config(format!(
                "triangle side {} gives circumradius {circum:.3}, which does not clear the \
                 ring of radius {RING_RADIUS}",
                self.triangle_side
            )));
        }
        if !(self.notch_size >= 0.05 && self.notch_size <= 0.25) {
            return Err(Error::config(format!(
                "notch size must lie in [0.05, 0.25]: it has to fit between the outer square \
                 and the seam and stay coarse enough to mesh, got {}",
                self.notch_size
            )));
        }
        Ok(())
    }
}

/// The two domains together with the piecewise-affine map between them.
#[derive(Debug, Clone)]
pub struct FoldPair {
    pub map: CornerMap,
    /// Pentagon hole vertices in hole (clockwise) order from the top.
    pub pentagon: [Point2<f64>; 5],
    /// Triangle hole vertices in hole (clockwise) order from the top.
    pub triangle: [Point2<f64>; 3],
}

impl FoldPair {
    pub fn source(&self) -> &PolygonalDomain {
        self.map.source()
    }
    pub fn target(&self) -> &PolygonalDomain {
        self.map.target()
    }
}

fn outer_square() -> Vec<Point2<f64>> {
    vec![
        point![-OUTER_HALF, -OUTER_HALF],
        point![OUTER_HALF, -OUTER_HALF],
        point![OUTER_HALF, OUTER_HALF],
        point![-OUTER_HALF, OUTER_HALF],
    ]
}

fn notch_loop(size: f64) -> Vec<Point2<f64>> {
    let y0 = -OUTER_HALF + 0.75 * size;
    let y1 = -OUTER_HALF + 1.5 * size;
    vec![point![-0.5 * size, y0], point![0.0, y1], point![0.5 * size, y0]]
}

fn pentagon_vertices(circumradius: f64) -> [Point2<f64>; 5] {
    // Clockwise from the top vertex.
    [90.0f64, 18.0, -54.0, -126.0, -198.0].map(|deg| {
        let a = deg.to_radians();
        point![circumradius * a.cos(), circumradius * a.sin()]
    })
}

fn triangle_vertices(side: f64) -> [Point2<f64>; 3] {
    let r = side / 3f64.sqrt();
    [90.0f64, -30.0, -150.0].map(|deg| {
        let a = deg.to_radians();
        point![r * a.cos(), r * a.sin()]
    })
}

/// Square with a pentagonal hole and a notch near the bottom edge.
pub fn pentagon_notched_domain(params: &FoldPairParams) -> Result<PolygonalDomain> {
    params.validate()?;
    PolygonalDomain::new(
        "pentagon-notched",
        outer_square(),
        vec![
            pentagon_vertices(params.pentagon_circumradius).to_vec(),
            notch_loop(params.notch_size),
        ],
    )
}

/// Square with a triangular hole and a notch near the bottom edge.
pub fn triangle_notched_domain(params: &FoldPairParams) -> Result<PolygonalDomain> {
    params.validate()?;
    PolygonalDomain::new(
        "triangle-notched",
        outer_square(),
        vec![triangle_vertices(params.triangle_side).to_vec(), notch_loop(params.notch_size)],
    )
}

/// Builds the domain pair and the folding map between them.
pub fn build_fold_pair(params: &FoldPairParams) -> Result<FoldPair> {
    params.validate()?;
    let source = pentagon_notched_domain(params)?;
    let target = triangle_notched_domain(params)?;
    let pentagon = pentagon_vertices(params.pentagon_circumradius);
    let triangle = triangle_vertices(params.triangle_side);

    let mut pieces = Vec::new();

    let collar = collar_mesh(params)?;
    for &[a, b, c] in collar.triangles() {
        pieces.push(AffinePiece::identity([
            collar.vertices()[a],
            collar.vertices()[b],
            collar.vertices()[c],
        ]));
    }

    let spokes = spoke_table(&pentagon, &triangle, params.triangle_side)?;
    zipper_pieces(&spokes, &mut pieces)?;
    band_pieces(&collar, &spokes, &mut pieces)?;

    let map = CornerMap::new(source, target, pieces)?;
    Ok(FoldPair { map, pentagon, triangle })
}

/// Identity region between the outer square and the seam, carrying the
/// notch.
fn collar_mesh(params: &FoldPairParams) -> Result<SimplicialMesh> {
    let seam = vec![
        point![-SEAM_HALF, -SEAM_HALF],
        point![-SEAM_HALF, SEAM_HALF],
        point![SEAM_HALF, SEAM_HALF],
        point![SEAM_HALF, -SEAM_HALF],
    ];
    let domain = PolygonalDomain::new(
        "fold-collar",
        outer_square(),
        vec![seam, notch_loop(params.notch_size)],
    )?;
    // The notch edges are the shortest features; the mesher requires the
    // target length to resolve them.
    triangulate(&domain, COLLAR_H.min(domain.shortest_edge()), 1.0)
}

/// Per-spoke boundary data: source node on the pentagon, its assigned
/// image on the triangle, the ring node above it, and unwrapped angles
/// of source and image (both decrease by one full turn around the loop;
/// the image angle reverses direction along the folded half-edges).
struct SpokeTable {
    src: [Point2<f64>; SPOKES],
    img: [Point2<f64>; SPOKES],
    ring: [Point2<f64>; SPOKES],
    src_angle: [f64; SPOKES],
    img_angle: [f64; SPOKES],
    hole_inradius: f64,
}

/// Nearest representative of `raw` modulo 2π to `prev`.
fn lift_near(raw: f64, prev: f64) -> f64 {
    raw + TAU * ((prev - raw) / TAU).round()
}

fn lerp_pt(a: Point2<f64>, b: Point2<f64>, u: f64) -> Point2<f64> {
    Point2::from(a.coords.lerp(&b.coords, u))
}

fn spoke_table(
    pentagon: &[Point2<f64>; 5],
    triangle: &[Point2<f64>; 3],
    triangle_side: f64,
) -> Result<SpokeTable> {
    let [a, b, c, d, e] = *pentagon;
    let mid_de = nalgebra::center(&d, &e);
    let mid_ea = nalgebra::center(&e, &a);
    let [ta, tb, tc] = *triangle;
    // Source arcs with their target edges. The last two pentagon edges
    // are halved and traverse their target edge out and back.
    let arcs: [([Point2<f64>; 2], [Point2<f64>; 2]); 7] = [
        ([a, b], [ta, tb]),
        ([b, c], [tb, tc]),
        ([c, d], [tc, ta]),
        ([d, mid_de], [ta, tb]),
        ([mid_de, e], [tb, ta]),
        ([e, mid_ea], [ta, tc]),
        ([mid_ea, a], [tc, ta]),
    ];

    let mut src = [Point2::origin(); SPOKES];
    let mut img = [Point2::origin(); SPOKES];
    for (ai, (s, t)) in arcs.iter().enumerate() {
        for k in 0..ARC_SUBDIVISIONS {
            let i = ai * ARC_SUBDIVISIONS + k;
            let u = k as f64 / ARC_SUBDIVISIONS as f64;
            src[i] = if k == 0 { s[0] } else { lerp_pt(s[0], s[1], u) };
            img[i] = if k == 0 { t[0] } else { lerp_pt(t[0], t[1], u) };
        }
    }

    let mut src_angle = [0.0; SPOKES];
    let mut img_angle = [0.0; SPOKES];
    for i in 0..SPOKES {
        let sa = src[i].y.atan2(src[i].x);
        let ia = img[i].y.atan2(img[i].x);
        if i == 0 {
            src_angle[i] = sa;
            img_angle[i] = ia;
        } else {
            src_angle[i] = lift_near(sa, src_angle[i - 1]);
            img_angle[i] = lift_near(ia, img_angle[i - 1]);
        }
    }
    // Both traversals must wind exactly once around their hole, or the
    // band cannot close up.
    let s_close = lift_near(src[0].y.atan2(src[0].x), src_angle[SPOKES - 1]);
    let i_close = lift_near(img[0].y.atan2(img[0].x), img_angle[SPOKES - 1]);
    if (s_close - (src_angle[0] - TAU)).abs() > 1e-9
        || (i_close - (img_angle[0] - TAU)).abs() > 1e-9
    {
        return Err(Error::geometry(
            "boundary assignment does not wind once around the hole",
        ));
    }

    let ring = std::array::from_fn(|i| {
        let ang = src_angle[i];
        point![RING_RADIUS * ang.cos(), RING_RADIUS * ang.sin()]
    });
    Ok(SpokeTable {
        src,
        img,
        ring,
        src_angle,
        img_angle,
        hole_inradius: triangle_side / (2.0 * 3f64.sqrt()),
    })
}

/// Distance from the origin to the triangular hole boundary along the
/// given direction. The hole is equilateral and centred at the origin
/// with edge normals at 30°, −90°, and 150°.
fn triangle_hole_radius(inradius: f64, angle: f64) -> f64 {
    let denom = [30.0f64, -90.0, 150.0]
        .iter()
        .map(|n| (angle - n.to_radians()).cos())
        .fold(f64::MIN, f64::max);
    inradius / denom
}

/// Layered band between the pentagon and the ring. Spoke `i`, layer `l`
/// sits at the source angle with radius interpolated pentagon→ring; its
/// image interpolates angle and radius separately between the assigned
/// boundary image (layer 0) and the source point itself (top layer).
fn zipper_pieces(spokes: &SpokeTable, out: &mut Vec<AffinePiece>) -> Result<()> {
    let mut grid_src = vec![[Point2::origin(); SPOKES]; LAYERS + 1];
    let mut grid_img = vec![[Point2::origin(); SPOKES]; LAYERS + 1];
    grid_src[0] = spokes.src;
    grid_img[0] = spokes.img;
    grid_src[LAYERS] = spokes.ring;
    grid_img[LAYERS] = spokes.ring;
    for l in 1..LAYERS {
        let u = l as f64 / LAYERS as f64;
        // The image angle eases in quadratically while the radius grows
        // linearly. Near the hole the spokes therefore lift off before
        // they start untwisting; with a linear angle the first-layer
        // chords next to the out-and-back corners would cut across them.
        let g = u * u;
        for i in 0..SPOKES {
            let sa = spokes.src_angle[i];
            let sr = spokes.src[i].coords.norm() * (1.0 - u) + RING_RADIUS * u;
            grid_src[l][i] = point![sr * sa.cos(), sr * sa.sin()];

            let ia = spokes.img_angle[i] * (1.0 - g) + sa * g;
            let ir_free = spokes.img[i].coords.norm() * (1.0 - u) + RING_RADIUS * u;
            let ir = ir_free.max(triangle_hole_radius(spokes.hole_inradius, ia) + HOLE_CLEARANCE);
            grid_img[l][i] = point![ir * ia.cos(), ir * ia.sin()];
        }
    }
    for l in 0..LAYERS {
        for i in 0..SPOKES {
            let j = (i + 1) % SPOKES;
            let (s00, s01) = (grid_src[l][i], grid_src[l][j]);
            let (s11, s10) = (grid_src[l + 1][j], grid_src[l + 1][i]);
            let (q00, q01) = (grid_img[l][i], grid_img[l][j]);
            let (q11, q10) = (grid_img[l + 1][j], grid_img[l + 1][i]);
            out.push(AffinePiece::from_vertex_images([s00, s01, s11], [q00, q01, q11])?);
            out.push(AffinePiece::from_vertex_images([s00, s11, s10], [q00, q11, q10])?);
        }
    }
    Ok(())
}

/// Identity band between the collar's seam nodes and the ring nodes,
/// stitched by merging the two node cycles in angular order.
fn band_pieces(
    collar: &SimplicialMesh,
    spokes: &SpokeTable,
    out: &mut Vec<AffinePiece>,
) -> Result<()> {
    let eps = 1e-9;
    let on_seam = |p: Point2<f64>| {
        ((p.x.abs() - SEAM_HALF).abs() <= eps && p.y.abs() <= SEAM_HALF + eps)
            || ((p.y.abs() - SEAM_HALF).abs() <= eps && p.x.abs() <= SEAM_HALF + eps)
    };
    let mut seam_ids: Vec<usize> = Vec::new();
    for be in collar.boundary() {
        let [v0, v1] = collar.edges()[be.edge];
        let mid = nalgebra::center(&collar.vertices()[v0], &collar.vertices()[v1]);
        if on_seam(mid) {
            seam_ids.push(v0);
            seam_ids.push(v1);
        }
    }
    seam_ids.sort_unstable();
    seam_ids.dedup();
    if seam_ids.len() < 8 {
        return Err(Error::geometry(format!(
            "only {} collar nodes found on the seam square",
            seam_ids.len()
        )));
    }

    // Both cycles are star-shaped about the origin, so sorting by polar
    // angle recovers their counterclockwise order.
    let angle = |p: Point2<f64>| p.y.atan2(p.x);
    let mut outer: Vec<Point2<f64>> = seam_ids.iter().map(|&v| collar.vertices()[v]).collect();
    outer.sort_by(|p, q| angle(*p).total_cmp(&angle(*q)));
    let mut inner: Vec<Point2<f64>> = spokes.ring.to_vec();
    inner.sort_by(|p, q| angle(*p).total_cmp(&angle(*q)));

    let no = outer.len();
    let ni = inner.len();
    let base = angle(outer[0]);
    let ccw_from = |raw: f64, from: f64| (raw - from).rem_euclid(TAU);
    // Start the inner cycle at its first node counterclockwise of `base`.
    let k0 = (0..ni)
        .min_by(|&i, &j| {
            ccw_from(angle(inner[i]), base).total_cmp(&ccw_from(angle(inner[j]), base))
        })
        .expect("inner cycle is nonempty");
    inner.rotate_left(k0);

    // Unwrapped, ascending angle sequences with a closing sentinel.
    let mut alift = Vec::with_capacity(no + 1);
    alift.push(base);
    for j in 1..no {
        let prev = alift[j - 1];
        alift.push(prev + ccw_from(angle(outer[j]), prev));
    }
    alift.push(base + TAU);
    let mut blift = Vec::with_capacity(ni + 1);
    blift.push(base + ccw_from(angle(inner[0]), base));
    for j in 1..ni {
        let prev = blift[j - 1];
        blift.push(prev + ccw_from(angle(inner[j]), prev));
    }
    blift.push(blift[0] + TAU);

    let (mut p, mut q) = (0usize, 0usize);
    while p < no || q < ni {
        let advance_outer = if p == no {
            false
        } else if q == ni {
            true
        } else {
            alift[p + 1] <= blift[q + 1]
        };
        let o_cur = outer[p % no];
        let i_cur = inner[q % ni];
        if advance_outer {
            out.push(AffinePiece::identity([o_cur, outer[(p + 1) % no], i_cur]));
            p += 1;
        } else {
            out.push(AffinePiece::identity([o_cur, inner[(q + 1) % ni], i_cur]));
            q += 1;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygeom::lipschitz_after_scaling;
    use crate::report::Verdict;
    use approx::assert_relative_eq;

    #[test]
    fn both_domains_have_euler_characteristic_minus_one() {
        let params = FoldPairParams::default();
        assert_eq!(pentagon_notched_domain(&params).unwrap().euler_characteristic(), -1);
        assert_eq!(triangle_notched_domain(&params).unwrap().euler_characteristic(), -1);
    }

    #[test]
    fn map_is_continuous_boundary_preserving_and_contained() {
        let pair = build_fold_pair(&FoldPairParams::default()).unwrap();
        let report = pair.map.validate().unwrap();
        assert_eq!(report.verdict, Verdict::Pass, "{report:?}");
        assert!(report.fold_pieces > 0, "the map must actually fold");
    }

    #[test]
    fn folds_sit_on_the_two_halved_pentagon_edges() {
        let pair = build_fold_pair(&FoldPairParams::default()).unwrap();
        let [a, _, _, d, e] = pair.pentagon;
        assert!(pair.map.fold_pieces_touching(d, e) > 0, "no folds on edge DE");
        assert!(pair.map.fold_pieces_touching(e, a) > 0, "no folds on edge EA");
        // The three fully mapped edges carry no folds.
        assert_eq!(pair.map.fold_pieces_touching(pair.pentagon[0], pair.pentagon[1]), 0);
        assert_eq!(pair.map.fold_pieces_touching(pair.pentagon[1], pair.pentagon[2]), 0);
        assert_eq!(pair.map.fold_pieces_touching(pair.pentagon[2], pair.pentagon[3]), 0);
    }

    #[test]
    fn scaling_by_twice_the_critical_radius_halves_the_bound() {
        let pair = build_fold_pair(&FoldPairParams::default()).unwrap();
        let base = lipschitz_after_scaling(&pair.map, 1.0).unwrap();
        assert!(base.r0.is_finite() && base.r0 >= 1.0, "r0 = {}", base.r0);
        let scaled = lipschitz_after_scaling(&pair.map, 2.0 * base.r0).unwrap();
        assert_eq!(scaled.max_singular_value, 0.5);
    }

    #[test]
    fn construction_is_deterministic() {
        let a = build_fold_pair(&FoldPairParams::default()).unwrap();
        let b = build_fold_pair(&FoldPairParams::default()).unwrap();
        assert_eq!(a.map.export_text(), b.map.export_text());
    }

    #[test]
    fn out_of_range_parameters_are_rejected() {
        for params in [
            FoldPairParams { pentagon_circumradius: 1.3, ..Default::default() },
            FoldPairParams { pentagon_circumradius: 0.0, ..Default::default() },
            FoldPairParams { triangle_side: 2.4, ..Default::default() },
            FoldPairParams { notch_size: 0.3, ..Default::default() },
        ] {
            assert!(build_fold_pair(&params).is_err(), "{params:?} should be rejected");
        }
    }

    #[test]
    fn hole_radius_matches_the_triangle_boundary() {
        let inr = 1.0 / (2.0 * 3f64.sqrt());
        // Straight toward an edge midpoint: the inradius.
        assert_relative_eq!(
            triangle_hole_radius(inr, 30f64.to_radians()),
            inr,
            max_relative = 1e-14
        );
        // Straight toward a vertex: the circumradius.
        assert_relative_eq!(
            triangle_hole_radius(inr, 90f64.to_radians()),
            2.0 * inr,
            max_relative = 1e-14
        );
    }
}
