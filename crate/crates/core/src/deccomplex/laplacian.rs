//! Hodge-Laplacian pencils `(K, M)` per degree.
//!
//! Each degree gets a sparse symmetric positive semidefinite stiffness
//! and a positive definite mass, restricted to the free simplices of the
//! boundary condition by row/column deletion (equivalently: the quadratic
//! forms are evaluated on zero-extended cochains).
//!
//! * degree 0: `K = d0ᵀ M1 d0`, `M = diag(m0 lumped)`;
//! * degree 1: `K = d1ᵀ D2 d1 + (M1 d0) diag(1/m0L) (M1 d0)ᵀ`, `M = M1`;
//! * degree 2: `K = (D2 d1) diag(1/m1L) (D2 d1)ᵀ`, `M = D2 = diag(m2)`.
//!
//! The codifferential blocks use lumped inner masses so the pencil stays
//! sparse. Lumping rescales the weak-coclosedness equations vertex by
//! vertex (edge by edge in degree 2) without changing their solution
//! sets, so harmonic kernels keep their dimensions; spectra away from
//! zero shift at the usual O(h) lumping consistency order.

use super::HodgeSystem;
use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// A generalized symmetric eigenvalue pencil `K v = λ M v`.
#[derive(Debug, Clone)]
pub struct LaplacianPencil {
    pub degree: usize,
    pub stiffness: CsrMatrix,
    pub mass: CsrMatrix,
    /// Mass diagonal when the mass matrix is diagonal (degrees 0 and 2).
    pub mass_diag: Option<Vec<f64>>,
}

impl LaplacianPencil {
    pub fn dim(&self) -> usize {
        self.stiffness.nrows()
    }
}

/// Assembles the degree-`degree` Laplacian pencil of the system.
pub fn hodge_laplacian(sys: &HodgeSystem, degree: usize) -> Result<LaplacianPencil> {
    if degree > 2 {
        return Err(Error::config(format!("degree {degree} out of range 0..=2")));
    }

    let inv = |v: &[f64]| v.iter().map(|&x| 1.0 / x).collect::<Vec<f64>>();

    let (stiffness_full, mass_full, mass_diag_full) = match degree {
        0 => {
            let d0t = sys.d0().transpose();
            let k = d0t.matmul(&sys.m1().matmul(sys.d0()));
            let m = sys.m0_lumped().to_vec();
            (k, CsrMatrix::diagonal(&m), Some(m))
        }
        1 => {
            // Curl part: d1ᵀ D2 d1.
            let curl = sys
                .d1()
                .transpose()
                .diag_scale_right(sys.m2())
                .matmul(sys.d1());
            // Lumped-codifferential part: B diag(1/m0L) Bᵀ with B = M1 d0.
            let b = sys.m1().matmul(sys.d0());
            let codiff = b.diag_scale_right(&inv(sys.m0_lumped())).matmul(&b.transpose());
            (curl.add(&codiff), sys.m1().clone(), None)
        }
        _ => {
            // C = D2 d1, K = C diag(1/m1L) Cᵀ.
            let c = sys.d1().diag_scale_left(sys.m2());
            let k = c.diag_scale_right(&inv(sys.m1_lumped())).matmul(&c.transpose());
            let m = sys.m2().to_vec();
            (k, CsrMatrix::diagonal(&m), Some(m))
        }
    };

    let free = sys.free(degree);
    let stiffness = stiffness_full.restrict(free, free).symmetrized();
    let mass = mass_full.restrict(free, free).symmetrized();
    let mass_diag = mass_diag_full.map(|d| free.iter().map(|&i| d[i]).collect());

    Ok(LaplacianPencil { degree, stiffness, mass, mass_diag })
}
