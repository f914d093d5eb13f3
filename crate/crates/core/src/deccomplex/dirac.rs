//! The graded Dirac operator `D = d + δ` on the full Whitney complex.
//!
//! The codifferentials are the mass adjoints of the incidence operators:
//! `δ1 = diag(1/m0L) d0ᵀ M1` (exact, because the degree-0 pencil mass is
//! the lumped vertex mass) and `δ2 = M1⁻¹ d1ᵀ D2` (applied through a
//! conjugate-gradient solve with the consistent edge mass, because the
//! degree-1 pencil mass is consistent). With these choices `D²` acts on
//! each degree as the corresponding Laplacian pencil operator `M⁻¹ K`,
//! which is the discrete form of the supersymmetry pairing the spectra
//! of neighbouring degrees away from the harmonic kernels.

use super::HodgeSystem;
use crate::error::{Error, Result};
use crate::sparse::cg_solve;

const MASS_SOLVE_TOL: f64 = 1e-12;
const MASS_SOLVE_ITERS: usize = 2000;

/// Applies the codifferential `δ_degree` to a full-complex cochain.
pub fn codifferential(sys: &HodgeSystem, degree: usize, values: &[f64]) -> Result<Vec<f64>> {
    match degree {
        1 => {
            if values.len() != sys.num_simplices(1) {
                return Err(Error::config(format!(
                    "codifferential: expected {} edge values, got {}",
                    sys.num_simplices(1),
                    values.len()
                )));
            }
            let m1v = sys.m1().matvec(values);
            let mut out = sys.d0().transpose().matvec(&m1v);
            for (o, &m) in out.iter_mut().zip(sys.m0_lumped()) {
                *o /= m;
            }
            Ok(out)
        }
        2 => {
            if values.len() != sys.num_simplices(2) {
                return Err(Error::config(format!(
                    "codifferential: expected {} face values, got {}",
                    sys.num_simplices(2),
                    values.len()
                )));
            }
            let scaled: Vec<f64> = values.iter().zip(sys.m2()).map(|(&w, &m)| w * m).collect();
            let rhs = sys.d1().transpose().matvec(&scaled);
            cg_solve(sys.m1(), &rhs, MASS_SOLVE_TOL, MASS_SOLVE_ITERS)
        }
        _ => Err(Error::config(format!(
            "codifferential is defined for degrees 1 and 2, got {degree}"
        ))),
    }
}

/// Applies `D = d + δ` to a graded cochain `(f, v, w)`; the result is
/// graded the same way: `(δ1 v, d0 f + δ2 w, d1 v)`.
pub fn apply_dirac(
    sys: &HodgeSystem,
    f: &[f64],
    v: &[f64],
    w: &[f64],
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    if f.len() != sys.num_simplices(0)
        || v.len() != sys.num_simplices(1)
        || w.len() != sys.num_simplices(2)
    {
        return Err(Error::config(
            "apply_dirac: graded components must match vertex/edge/face counts".to_string(),
        ));
    }
    let out0 = codifferential(sys, 1, v)?;
    let mut out1 = sys.d0().matvec(f);
    let delta_w = codifferential(sys, 2, w)?;
    for (a, b) in out1.iter_mut().zip(&delta_w) {
        *a += b;
    }
    let out2 = sys.d1().matvec(v);
    Ok((out0, out1, out2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deccomplex::{assemble, hodge_laplacian, BoundaryConditionSpec};
    use crate::meshgen::structured_rectilinear;
    use crate::polygeom::PolygonalDomain;
    use crate::sparse::dot;
    use rand::{Rng, SeedableRng};

    fn annulus_system(h: f64) -> crate::deccomplex::HodgeSystem {
        let domain = PolygonalDomain::square_annulus();
        let mesh = structured_rectilinear(&domain, h, 1.0).unwrap();
        assemble(mesh, BoundaryConditionSpec::maximal()).unwrap()
    }

    fn max_abs(v: &[f64]) -> f64 {
        v.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    #[test]
    fn codifferentials_are_mass_adjoints_of_the_differentials() {
        let sys = annulus_system(0.5);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let a: Vec<f64> =
                (0..sys.num_simplices(0)).map(|_| rng.random_range(-1.0..1.0)).collect();
            let b: Vec<f64> =
                (0..sys.num_simplices(1)).map(|_| rng.random_range(-1.0..1.0)).collect();
            let w: Vec<f64> =
                (0..sys.num_simplices(2)).map(|_| rng.random_range(-1.0..1.0)).collect();

            // ⟨d0 a, b⟩_{M1} = ⟨a, δ1 b⟩_{M0L}
            let lhs = dot(&sys.d0().matvec(&a), &sys.m1().matvec(&b));
            let delta_b = codifferential(&sys, 1, &b).unwrap();
            let rhs: f64 = a
                .iter()
                .zip(&delta_b)
                .zip(sys.m0_lumped())
                .map(|((&x, &y), &m)| x * y * m)
                .sum();
            assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()), "δ1 adjointness");

            // ⟨d1 b, w⟩_{M2} = ⟨b, δ2 w⟩_{M1}
            let d1b = sys.d1().matvec(&b);
            let lhs2: f64 = d1b.iter().zip(&w).zip(sys.m2()).map(|((&x, &y), &m)| x * y * m).sum();
            let delta_w = codifferential(&sys, 2, &w).unwrap();
            let rhs2 = dot(&b, &sys.m1().matvec(&delta_w));
            assert!(
                (lhs2 - rhs2).abs() <= 1e-9 * (1.0 + lhs2.abs()),
                "δ2 adjointness: {lhs2} vs {rhs2}"
            );
        }
    }

    #[test]
    fn dirac_squared_acts_as_the_scalar_laplacian_on_degree_zero() {
        let sys = annulus_system(0.5);
        let p0 = hodge_laplacian(&sys, 0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let f: Vec<f64> =
            (0..sys.num_simplices(0)).map(|_| rng.random_range(-1.0..1.0)).collect();
        let zeros1 = vec![0.0; sys.num_simplices(1)];
        let zeros2 = vec![0.0; sys.num_simplices(2)];
        let (g0, g1, g2) = apply_dirac(&sys, &f, &zeros1, &zeros2).unwrap();
        assert_eq!(max_abs(&g0), 0.0);
        assert_eq!(max_abs(&g2), 0.0);
        let (h0, _, h2) = apply_dirac(&sys, &vec![0.0; g0.len()], &g1, &zeros2).unwrap();
        assert_eq!(max_abs(&h2), 0.0, "d1 d0 f must vanish identically");

        let k0f = p0.stiffness.matvec(&f);
        let expected: Vec<f64> =
            k0f.iter().zip(sys.m0_lumped()).map(|(&x, &m)| x / m).collect();
        let err = h0.iter().zip(&expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err <= 1e-10 * (1.0 + max_abs(&expected)), "D² vs M⁻¹K at degree 0: {err}");
    }

    #[test]
    fn dirac_squared_acts_as_the_hodge_laplacian_on_degree_one() {
        let sys = annulus_system(0.5);
        let p1 = hodge_laplacian(&sys, 1).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let v: Vec<f64> =
            (0..sys.num_simplices(1)).map(|_| rng.random_range(-1.0..1.0)).collect();
        let zeros0 = vec![0.0; sys.num_simplices(0)];
        let zeros2 = vec![0.0; sys.num_simplices(2)];
        let (g0, g1, g2) = apply_dirac(&sys, &zeros0, &v, &zeros2).unwrap();
        assert_eq!(max_abs(&g1), 0.0);
        let (_, h1, _) = apply_dirac(&sys, &g0, &vec![0.0; g1.len()], &g2).unwrap();

        // M1⁻¹ K1 v through an explicit mass solve:
        let k1v = p1.stiffness.matvec(&v);
        let expected = crate::sparse::cg_solve(sys.m1(), &k1v, 1e-12, 2000).unwrap();
        let err = h1.iter().zip(&expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err <= 1e-7 * (1.0 + max_abs(&expected)), "D² vs M⁻¹K at degree 1: {err}");
    }

    #[test]
    fn mismatched_lengths_are_rejected() {
        let sys = annulus_system(0.5);
        assert!(codifferential(&sys, 1, &[1.0, 2.0]).is_err());
        assert!(codifferential(&sys, 0, &[]).is_err());
        let f = vec![0.0; sys.num_simplices(0)];
        let v = vec![0.0; sys.num_simplices(1)];
        assert!(apply_dirac(&sys, &f, &v, &[]).is_err());
    }
}
