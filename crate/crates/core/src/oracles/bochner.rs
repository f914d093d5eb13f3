//! An integral identity for 1-forms on the square annulus.
//!
//! For `ω = f dx + g dy` the pointwise identity
//! `|dω|² + |δω|² = |∇f|² + |∇g|² + div-terms` integrates, over any flat
//! domain, to
//!
//! ```text
//! ∫ (∂x g - ∂y f)² + (∂x f + ∂y g)²  =  ∫ |∇f|² + |∇g|²
//! ```
//!
//! *provided* the boundary contributions vanish — e.g. when `ω` is
//! compactly supported in the interior. The suite certifies both halves:
//! seeded bump pairs satisfy the identity to quadrature accuracy, while
//! simple non-supported pairs violate it by an exactly computable margin.
//! The identity is therefore a statement about boundary conditions, not
//! merely calculus.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::oracles::quadrature::QuadratureRule;

/// The four closed rectangles whose union is the square annulus
/// `[-2,2]² \ (-1,1)²` with pairwise disjoint interiors.
pub const ANNULUS_ARMS: [[(f64, f64); 2]; 4] = [
    [(-2.0, -1.0), (-2.0, 2.0)],
    [(1.0, 2.0), (-2.0, 2.0)],
    [(-1.0, 1.0), (-2.0, -1.0)],
    [(-1.0, 1.0), (1.0, 2.0)],
];

/// A scalar field with analytic first partials.
#[derive(Debug, Clone)]
enum Field {
    Zero,
    /// `amp · b((x-cx)/hx) · b((y-cy)/hy)` with the C¹ bump
    /// `b(t) = t (1-t²)²` on `[-1, 1]`.
    Bump { amp: f64, cx: f64, cy: f64, hx: f64, hy: f64 },
    /// `a + bx·x + by·y`
    Linear { a: f64, bx: f64, by: f64 },
    /// `x + x²`
    XPlusXSquared,
    SinX,
    SinY,
}

fn bump(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        let s = 1.0 - t * t;
        t * s * s
    }
}

fn bump_d(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - t * t) * (1.0 - 5.0 * t * t)
    }
}

impl Field {
    /// `(value, ∂x, ∂y)` at `(x, y)`.
    fn eval(&self, x: f64, y: f64) -> (f64, f64, f64) {
        match *self {
            Field::Zero => (0.0, 0.0, 0.0),
            Field::Bump { amp, cx, cy, hx, hy } => {
                let u = (x - cx) / hx;
                let v = (y - cy) / hy;
                (
                    amp * bump(u) * bump(v),
                    amp / hx * bump_d(u) * bump(v),
                    amp / hy * bump(u) * bump_d(v),
                )
            }
            Field::Linear { a, bx, by } => (a + bx * x + by * y, bx, by),
            Field::XPlusXSquared => (x + x * x, 1.0 + 2.0 * x, 0.0),
            Field::SinX => (x.sin(), x.cos(), 0.0),
            Field::SinY => (y.sin(), 0.0, y.cos()),
        }
    }

    /// Coordinates where the field is only C¹ (support edges); quadrature
    /// panels must split there.
    fn breakpoints(&self) -> (Vec<f64>, Vec<f64>) {
        match *self {
            Field::Bump { cx, cy, hx, hy, .. } => {
                (vec![cx - hx, cx + hx], vec![cy - hy, cy + hy])
            }
            _ => (Vec::new(), Vec::new()),
        }
    }

    fn compactly_supported(&self) -> bool {
        matches!(self, Field::Zero | Field::Bump { .. })
    }
}

/// A 1-form `ω = f dx + g dy` on the square annulus with analytically
/// differentiable components.
#[derive(Debug, Clone)]
pub struct TestForm {
    pub name: String,
    f: Field,
    g: Field,
}

impl TestForm {
    /// Component values `(f, g)` at a point.
    pub fn eval(&self, x: f64, y: f64) -> (f64, f64) {
        (self.f.eval(x, y).0, self.g.eval(x, y).0)
    }

    /// `((f, f_x, f_y), (g, g_x, g_y))` at a point.
    pub fn eval_full(&self, x: f64, y: f64) -> ((f64, f64, f64), (f64, f64, f64)) {
        (self.f.eval(x, y), self.g.eval(x, y))
    }

    pub fn compactly_supported(&self) -> bool {
        self.f.compactly_supported() && self.g.compactly_supported()
    }

    /// Deterministic family of compactly supported bump pairs placed in
    /// the four arms of the annulus.
    pub fn seeded_bumps(count: usize, seed: u64) -> Vec<TestForm> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        for k in 0..count {
            let f = random_bump(&mut rng);
            let g = random_bump(&mut rng);
            out.push(TestForm { name: format!("bump-pair-{k:02}"), f, g });
        }
        out
    }

    /// `ω = y dx + x dy`: closed and coclosed but not supported, so the
    /// identity fails by exactly `∫ 2 dA = 24`.
    pub fn linear_shear() -> TestForm {
        TestForm {
            name: "linear-shear".into(),
            f: Field::Linear { a: 0.0, bx: 0.0, by: 1.0 },
            g: Field::Linear { a: 0.0, bx: 1.0, by: 0.0 },
        }
    }

    /// `ω = y dx + (x + x²) dy`; the boundary contribution again equals 24.
    pub fn quadratic_shear() -> TestForm {
        TestForm {
            name: "quadratic-shear".into(),
            f: Field::Linear { a: 0.0, bx: 0.0, by: 1.0 },
            g: Field::XPlusXSquared,
        }
    }

    /// `ω = sin(y) dx + sin(x) dy`; violation `-8 (sin²2 - sin²1)`.
    pub fn sine_shear() -> TestForm {
        TestForm { name: "sine-shear".into(), f: Field::SinY, g: Field::SinX }
    }

    /// A one-component form `ω = f dx` with `f` a single seeded bump.
    pub fn single_bump(seed: u64) -> TestForm {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        TestForm {
            name: format!("single-bump-{seed}"),
            f: random_bump(&mut rng),
            g: Field::Zero,
        }
    }
}

fn random_bump(rng: &mut ChaCha8Rng) -> Field {
    let arm = ANNULUS_ARMS[rng.random_range(0..ANNULUS_ARMS.len())];
    let [(x0, x1), (y0, y1)] = arm;
    let place = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| {
        let width = hi - lo;
        let h = width * rng.random_range(0.15..0.38);
        let c = rng.random_range(lo + h + 0.02 * width..hi - h - 0.02 * width);
        (c, h)
    };
    let (cx, hx) = place(rng, x0, x1);
    let (cy, hy) = place(rng, y0, y1);
    let amp = rng.random_range(0.5..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    Field::Bump { amp, cx, cy, hx, hy }
}

#[derive(Debug, Clone)]
pub struct BochnerReport {
    pub name: String,
    /// `∫ |dω|² + |δω|²`
    pub lhs: f64,
    /// `∫ |∇f|² + |∇g|²`
    pub rhs: f64,
}

impl BochnerReport {
    pub fn discrepancy(&self) -> f64 {
        self.lhs - self.rhs
    }

    pub fn holds(&self, tol: f64) -> bool {
        (self.lhs - self.rhs).abs() <= tol * (1.0 + self.rhs.abs())
    }
}

/// Integrates both sides of the identity over the square annulus.
///
/// Each arm rectangle is partitioned into `panels × panels` cells whose
/// boundaries are additionally snapped to the support edges of the form;
/// on every cell the bump integrands are polynomials, so the tensor
/// Gauss–Legendre rule is exact there.
pub fn bochner_identity(form: &TestForm, panels: usize) -> BochnerReport {
    let rule = QuadratureRule::gauss_legendre(12);
    let (fbx, fby) = form.f.breakpoints();
    let (gbx, gby) = form.g.breakpoints();
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for [xr, yr] in ANNULUS_ARMS {
        let xs = cell_edges(xr, panels, fbx.iter().chain(&gbx).copied());
        let ys = cell_edges(yr, panels, fby.iter().chain(&gby).copied());
        for wx in xs.windows(2) {
            for wy in ys.windows(2) {
                lhs += rule.integrate_rect((wx[0], wx[1]), (wy[0], wy[1]), |x, y| {
                    let ((_, fx, fy), (_, gx, gy)) = form.eval_full(x, y);
                    let curl = gx - fy;
                    let div = fx + gy;
                    curl * curl + div * div
                });
                rhs += rule.integrate_rect((wx[0], wx[1]), (wy[0], wy[1]), |x, y| {
                    let ((_, fx, fy), (_, gx, gy)) = form.eval_full(x, y);
                    fx * fx + fy * fy + gx * gx + gy * gy
                });
            }
        }
    }
    BochnerReport { name: form.name.clone(), lhs, rhs }
}

fn cell_edges(range: (f64, f64), panels: usize, extra: impl Iterator<Item = f64>) -> Vec<f64> {
    let (lo, hi) = range;
    let panels = panels.max(1);
    let mut edges: Vec<f64> =
        (0..=panels).map(|i| lo + (hi - lo) * i as f64 / panels as f64).collect();
    for b in extra {
        if b > lo + 1e-12 && b < hi - 1e-12 {
            edges.push(b);
        }
    }
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    edges.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    edges
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn supported_pairs_satisfy_the_identity() {
        for form in TestForm::seeded_bumps(10, 7) {
            assert!(form.compactly_supported());
            let rep = bochner_identity(&form, 4);
            assert!(rep.rhs > 0.0, "{}: degenerate pair", rep.name);
            assert!(
                rep.holds(1e-8),
                "{}: lhs {} vs rhs {}",
                rep.name,
                rep.lhs,
                rep.rhs
            );
        }
    }

    #[test]
    fn one_component_forms_satisfy_the_identity() {
        for seed in [1, 2, 3] {
            let form = TestForm::single_bump(seed);
            assert!(form.compactly_supported());
            let rep = bochner_identity(&form, 4);
            assert!(rep.rhs > 0.0);
            assert!(rep.holds(1e-8), "{}: lhs {} vs rhs {}", rep.name, rep.lhs, rep.rhs);
        }
    }

    #[test]
    fn linear_shear_violates_by_domain_area_times_two() {
        let rep = bochner_identity(&TestForm::linear_shear(), 4);
        assert_abs_diff_eq!(rep.lhs, 0.0, epsilon = 1e-12);
        assert_relative_eq!(rep.rhs, 24.0, max_relative = 1e-13);
    }

    #[test]
    fn quadratic_and_sine_violations_match_closed_forms() {
        let rep = bochner_identity(&TestForm::quadratic_shear(), 4);
        // lhs = ∫ (2x)² = 4·(x-moment), rhs picks up the same plus 24.
        assert_relative_eq!(rep.rhs - rep.lhs, 24.0, max_relative = 1e-12);

        let rep = bochner_identity(&TestForm::sine_shear(), 8);
        let expected = -8.0 * ((2.0_f64).sin().powi(2) - (1.0_f64).sin().powi(2));
        assert_relative_eq!(rep.discrepancy(), expected, max_relative = 1e-10);
    }

    #[test]
    fn seeded_family_is_reproducible() {
        let a = TestForm::seeded_bumps(3, 42);
        let b = TestForm::seeded_bumps(3, 42);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.eval(1.5, 1.5), y.eval(1.5, 1.5));
            assert_eq!(x.eval(-1.3, 0.7), y.eval(-1.3, 0.7));
        }
    }
}
