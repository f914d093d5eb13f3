//! Capacity-style energies of radial corner test functions.
//!
//! On the circular sector of opening `2β` and radius 1, the family
//!
//! ```text
//! u_{α,ε}(r) = max(0, 1 - (ε/r)^α)
//! ```
//!
//! vanishes on the disk `r ≤ ε` around the corner and climbs to `1 - ε^α`
//! at the outer rim. Its Dirichlet energy and its L² distance from the
//! constant 1 are computed here by Gauss–Legendre quadrature in the
//! log-radial variable (where the integrands are smooth exponentials);
//! the closed forms
//!
//! ```text
//! energy = β α (1 - ε^{2α})
//! defect = β ε² + 2 β ε^{2α} (1 - ε^{2-2α}) / (2 - 2α)
//! ```
//!
//! serve as independent checks. Choosing `ε(α) = α^{1/α}` makes the
//! energy `β α (1 - α²)` and drives both quantities to zero along any
//! decreasing α-schedule: the corner has vanishing capacity, so the
//! constant is approximable by functions that vanish near it.

use crate::oracles::quadrature::QuadratureRule;

fn check_params(alpha: f64, eps: f64, beta: f64) {
    assert!(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1), got {alpha}");
    assert!(eps > 0.0 && eps < 1.0, "eps must lie in (0,1), got {eps}");
    assert!(beta > 0.0 && beta < std::f64::consts::PI, "beta must lie in (0,π), got {beta}");
}

/// Dirichlet energy `∫ |∇u_{α,ε}|²` over the sector, by quadrature.
pub fn capacity_energy(alpha: f64, eps: f64, beta: f64, panels: usize) -> f64 {
    check_params(alpha, eps, beta);
    // With r = e^t: |u'(r)|² r dr = α² ε^{2α} e^{-2αt} dt on [ln ε, 0].
    let rule = QuadratureRule::gauss_legendre(16);
    let e2a = eps.powf(2.0 * alpha);
    let integral = rule.integrate_composite(eps.ln(), 0.0, panels.max(1), |t| {
        alpha * alpha * e2a * (-2.0 * alpha * t).exp()
    });
    2.0 * beta * integral
}

/// Closed-form value of [`capacity_energy`].
pub fn capacity_energy_exact(alpha: f64, eps: f64, beta: f64) -> f64 {
    check_params(alpha, eps, beta);
    beta * alpha * (1.0 - eps.powf(2.0 * alpha))
}

/// Squared L² distance `∫ |1 - u_{α,ε}|²` over the sector, by quadrature.
pub fn l2_defect(alpha: f64, eps: f64, beta: f64, panels: usize) -> f64 {
    check_params(alpha, eps, beta);
    let rule = QuadratureRule::gauss_legendre(16);
    // Inner disk r ≤ ε, where u = 0 and the integrand is just r.
    let inner = rule.integrate(0.0, eps, |r| r);
    // Outer ring in the log variable: (ε/r)^{2α} r dr = ε^{2α} e^{(2-2α)t} dt.
    let e2a = eps.powf(2.0 * alpha);
    let outer = rule.integrate_composite(eps.ln(), 0.0, panels.max(1), |t| {
        e2a * ((2.0 - 2.0 * alpha) * t).exp()
    });
    2.0 * beta * (inner + outer)
}

/// Closed-form value of [`l2_defect`].
pub fn l2_defect_exact(alpha: f64, eps: f64, beta: f64) -> f64 {
    check_params(alpha, eps, beta);
    let e2a = eps.powf(2.0 * alpha);
    beta * eps * eps + 2.0 * beta * e2a * (1.0 - eps.powf(2.0 - 2.0 * alpha)) / (2.0 - 2.0 * alpha)
}

/// The a priori defect bound `β(ε + ε^α)` the suite certifies against.
pub fn defect_upper_bound(alpha: f64, eps: f64, beta: f64) -> f64 {
    check_params(alpha, eps, beta);
    beta * (eps + eps.powf(alpha))
}

#[derive(Debug, Clone)]
pub struct ScheduleRow {
    pub alpha: f64,
    pub eps: f64,
    pub energy: f64,
    pub defect: f64,
    pub defect_bound: f64,
}

/// Evaluates the test family along a decreasing α-schedule with the
/// coupled radius `ε(α) = α^{1/α}`, by quadrature.
pub fn capacity_schedule(alphas: &[f64], beta: f64, panels: usize) -> Vec<ScheduleRow> {
    alphas
        .iter()
        .map(|&alpha| {
            let eps = (alpha.ln() / alpha).exp();
            ScheduleRow {
                alpha,
                eps,
                energy: capacity_energy(alpha, eps, beta, panels),
                defect: l2_defect(alpha, eps, beta, panels),
                defect_bound: defect_upper_bound(alpha, eps, beta),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn quadrature_matches_closed_form_at_reference_point() {
        let (alpha, eps, beta) = (0.1, 0.01, PI / 4.0);
        let q = capacity_energy(alpha, eps, beta, 64);
        let e = capacity_energy_exact(alpha, eps, beta);
        assert_relative_eq!(q, e, max_relative = 1e-12);
        // Frozen reference value.
        assert_relative_eq!(e, 0.047272552280937685, max_relative = 1e-12);
    }

    #[test]
    fn defect_reference_value_and_bound() {
        let (alpha, eps, beta) = (0.5, 0.25, PI / 4.0);
        let d = l2_defect(alpha, eps, beta, 64);
        assert_relative_eq!(d, 0.4375 * beta, max_relative = 1e-12);
        assert_relative_eq!(d, l2_defect_exact(alpha, eps, beta), max_relative = 1e-12);
        assert!(d <= defect_upper_bound(alpha, eps, beta));
        assert_relative_eq!(defect_upper_bound(alpha, eps, beta), 0.75 * beta, max_relative = 1e-14);
    }

    #[test]
    fn coupled_radius_squares_to_alpha() {
        // ε(α)^{2α} = α² by construction.
        for &alpha in &[0.4f64, 0.2, 0.1] {
            let eps = (alpha.ln() / alpha).exp();
            assert_relative_eq!(eps.powf(2.0 * alpha), alpha * alpha, max_relative = 1e-12);
        }
    }

    #[test]
    fn schedule_drives_energy_and_defect_down() {
        let rows = capacity_schedule(&[0.4, 0.2, 0.1, 0.05], PI / 4.0, 64);
        for w in rows.windows(2) {
            assert!(w[1].energy < w[0].energy);
            assert!(w[1].defect < w[0].defect);
        }
        let last = rows.last().unwrap();
        assert_relative_eq!(
            last.energy,
            (PI / 4.0) * 0.05 * (1.0 - 0.05 * 0.05),
            max_relative = 1e-10
        );
    }
}
