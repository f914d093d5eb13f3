//! Gauss–Legendre quadrature with nodes computed by Newton iteration on
//! the Legendre recurrence.

/// A quadrature rule on the reference interval `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// The `n`-point Gauss–Legendre rule (exact for polynomials of degree
    /// `2n - 1`).
    pub fn gauss_legendre(n: usize) -> Self {
        assert!(n >= 1, "quadrature rule needs at least one point");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi-style initial guess for the i-th positive root.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        QuadratureRule { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫_a^b f(x) dx`.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    /// Composite integration over `panels` equal subintervals.
    pub fn integrate_composite(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        mut f: impl FnMut(f64) -> f64,
    ) -> f64 {
        let panels = panels.max(1);
        let mut acc = 0.0;
        for p in 0..panels {
            let pa = a + (b - a) * p as f64 / panels as f64;
            let pb = a + (b - a) * (p + 1) as f64 / panels as f64;
            acc += self.integrate(pa, pb, &mut f);
        }
        acc
    }

    /// Tensor-product integration over an axis-aligned rectangle.
    pub fn integrate_rect(
        &self,
        x_range: (f64, f64),
        y_range: (f64, f64),
        mut f: impl FnMut(f64, f64) -> f64,
    ) -> f64 {
        let hx = 0.5 * (x_range.1 - x_range.0);
        let mx = 0.5 * (x_range.1 + x_range.0);
        let hy = 0.5 * (y_range.1 - y_range.0);
        let my = 0.5 * (y_range.1 + y_range.0);
        let mut acc = 0.0;
        for (xi, wi) in self.nodes.iter().zip(&self.weights) {
            let x = mx + hx * xi;
            let mut inner = 0.0;
            for (yj, wj) in self.nodes.iter().zip(&self.weights) {
                inner += wj * f(x, my + hy * yj);
            }
            acc += wi * inner;
        }
        acc * hx * hy
    }

    /// Integrates with this rule and with a doubled point count; the
    /// difference is a practical convergence indicator.
    pub fn integrate_with_check(
        &self,
        a: f64,
        b: f64,
        mut f: impl FnMut(f64) -> f64,
    ) -> (f64, f64) {
        let coarse = self.integrate(a, b, &mut f);
        let fine = QuadratureRule::gauss_legendre(2 * self.len()).integrate(a, b, &mut f);
        (fine, (fine - coarse).abs())
    }
}

/// Evaluates `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 1..n {
        let jf = j as f64;
        let p_next = ((2.0 * jf + 1.0) * x * p - jf * p_prev) / (jf + 1.0);
        p_prev = p;
        p = p_next;
    }
    let d = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn five_point_rule_matches_reference_nodes() {
        let rule = QuadratureRule::gauss_legendre(5);
        // Classical values for n = 5.
        let expected = [
            -0.906179845938664,
            -0.538469310105683,
            0.0,
            0.538469310105683,
            0.906179845938664,
        ];
        for (a, b) in rule.nodes().iter().zip(expected.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(rule.weights().iter().sum::<f64>(), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn polynomial_exactness() {
        let rule = QuadratureRule::gauss_legendre(4);
        // Degree 7 is the edge of exactness for 4 points.
        let val = rule.integrate(0.0, 1.0, |x| x.powi(7));
        assert_abs_diff_eq!(val, 1.0 / 8.0, epsilon = 1e-15);
    }

    #[test]
    fn transcendental_integral_converges_under_doubling() {
        let rule = QuadratureRule::gauss_legendre(8);
        let (value, err) = rule.integrate_with_check(0.0, 1.0, |x| (3.0 * x).exp());
        assert!(err < 1e-10);
        assert_abs_diff_eq!(value, (3.0_f64.exp() - 1.0) / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn rectangle_rule_integrates_separable_products() {
        let rule = QuadratureRule::gauss_legendre(6);
        let v = rule.integrate_rect((0.0, 2.0), (1.0, 3.0), |x, y| x * y * y);
        assert_abs_diff_eq!(v, 2.0 * (27.0 - 1.0) / 3.0, epsilon = 1e-12);
    }
}
