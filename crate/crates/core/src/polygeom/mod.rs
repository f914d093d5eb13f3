//! Polygonal domains with holes and the geometry built on top of them:
//! interior angles, turning integrals of rounded corners, and
//! piecewise-affine corner maps.

mod cornermap;
mod domain;
mod foldpair;
pub(crate) mod predicates;
mod turning;

pub use cornermap::{
    lipschitz_after_scaling, AffinePiece, CornerMap, CornerMapReport, LipschitzReport,
    BOUNDARY_TOL, CONTINUITY_TOL,
};
pub use domain::{read_domain, CornerVertex, PolygonalDomain};
pub use foldpair::{
    build_fold_pair, pentagon_notched_domain, triangle_notched_domain, FoldPair, FoldPairParams,
};
pub use turning::{corner_turning_integrals, TurningReport};
