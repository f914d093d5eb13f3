//! Dense generalized eigensolver, used as an independent cross-check of
//! the sparse shift-invert path on meshes small enough to afford O(n³).
//!
//! `K v = λ M v` is reduced to the ordinary symmetric problem
//! `(L⁻¹ K L⁻ᵀ) y = λ y` through the Cholesky factor `M = L Lᵀ`.

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;
use nalgebra::DMatrix;

/// All generalized eigenvalues of the pencil `(K, M)`, ascending.
pub fn dense_generalized_eigenvalues(
    stiffness: &CsrMatrix,
    mass: &CsrMatrix,
) -> Result<Vec<f64>> {
    let n = stiffness.nrows();
    if stiffness.ncols() != n || mass.nrows() != n || mass.ncols() != n {
        return Err(Error::solver(
            "dense eigensolver: pencil matrices must be square and matching",
        ));
    }
    if n == 0 {
        return Ok(Vec::new());
    }

    let k = stiffness.to_dense();
    let m = mass.to_dense();
    let chol = m
        .clone()
        .cholesky()
        .ok_or_else(|| Error::solver("dense eigensolver: mass matrix is not positive definite"))?;
    let l = chol.l();

    // B = L⁻¹ K L⁻ᵀ, formed by two triangular solves. The second solve
    // uses the symmetry of K: (L⁻¹ (L⁻¹ K)ᵀ) = L⁻¹ K L⁻ᵀ.
    let x = l
        .clone()
        .solve_lower_triangular(&k)
        .ok_or_else(|| Error::solver("dense eigensolver: singular Cholesky factor"))?;
    let b = l
        .solve_lower_triangular(&x.transpose())
        .ok_or_else(|| Error::solver("dense eigensolver: singular Cholesky factor"))?;
    let b: DMatrix<f64> = (&b + b.transpose()) * 0.5;

    let eig = nalgebra::SymmetricEigen::new(b);
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn matches_hand_computed_two_by_two() {
        // K = [[2, -1], [-1, 2]], M = I: eigenvalues 1 and 3.
        let k = CsrMatrix::from_triplets(
            2,
            2,
            &[(0, 0, 2.0), (0, 1, -1.0), (1, 0, -1.0), (1, 1, 2.0)],
        );
        let m = CsrMatrix::diagonal(&[1.0, 1.0]);
        let v = dense_generalized_eigenvalues(&k, &m).unwrap();
        assert_relative_eq!(v[0], 1.0, max_relative = 1e-12);
        assert_relative_eq!(v[1], 3.0, max_relative = 1e-12);
    }

    #[test]
    fn mass_scaling_divides_the_spectrum() {
        let k = CsrMatrix::diagonal(&[3.0, 6.0, 9.0]);
        let m = CsrMatrix::diagonal(&[3.0, 3.0, 3.0]);
        let v = dense_generalized_eigenvalues(&k, &m).unwrap();
        assert_relative_eq!(v[0], 1.0, max_relative = 1e-12);
        assert_relative_eq!(v[1], 2.0, max_relative = 1e-12);
        assert_relative_eq!(v[2], 3.0, max_relative = 1e-12);
    }

    #[test]
    fn agrees_with_shift_invert_on_a_random_spd_pencil() {
        use rand::{Rng, SeedableRng};
        let n = 24;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        // K = GᵀG (PSD with a kernel of dimension n - rank), M = diag > 0.
        let rank = 20;
        let g_trips: Vec<(usize, usize, f64)> = (0..rank)
            .flat_map(|r| (0..n).map(move |c| (r, c)))
            .map(|(r, c)| (r, c, 0.0))
            .collect::<Vec<_>>()
            .into_iter()
            .map(|(r, c, _)| (r, c, rng.random_range(-1.0..1.0)))
            .collect();
        let g = CsrMatrix::from_triplets(rank, n, &g_trips);
        let k = g.transpose().matmul(&g).symmetrized();
        let mdiag: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
        let m = CsrMatrix::diagonal(&mdiag);

        let dense = dense_generalized_eigenvalues(&k, &m).unwrap();
        let sparse = crate::spectral::low_spectrum(&k, &m, 6, 1e-9).unwrap();
        for (i, lam) in sparse.values.iter().enumerate() {
            assert!(
                (lam - dense[i]).abs() <= 1e-8 * (1.0 + dense[i].abs()),
                "eigenvalue {i}: sparse {lam} vs dense {}",
                dense[i]
            );
        }
    }
}
