//! Triangle quadrature in barycentric coordinates.

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    /// Barycentric coordinates of each point.
    pub points: Vec<[f64; 3]>,
    /// Weights on the reference triangle, summing to its area 1/2.
    pub weights: Vec<f64>,
    /// Highest total polynomial degree integrated exactly.
    pub degree: usize,
}

impl QuadratureRule {
    /// Symmetric three-point rule, exact for quadratics.
    pub fn triangle_degree2() -> Self {
        let (a, b) = (2.0 / 3.0, 1.0 / 6.0);
        Self {
            points: vec![[a, b, b], [b, a, b], [b, b, a]],
            weights: vec![1.0 / 6.0; 3],
            degree: 2,
        }
    }

    /// Integral over a physical triangle of area `area` of a function of the
    /// barycentric coordinates.
    pub fn integrate<F: Fn(&[f64; 3]) -> f64>(&self, area: f64, f: F) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| 2.0 * area * w * f(p)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    #[test]
    fn exact_on_monomials_up_to_degree_two() {
        let q = QuadratureRule::triangle_degree2();
        assert!((q.weights.iter().sum::<f64>() - 0.5).abs() < 1e-15);
        // reference triangle (0,0),(1,0),(0,1): x = l1, y = l2
        for a in 0..=2u32 {
            for b in 0..=(2 - a) {
                let exact = factorial(a) * factorial(b) / factorial(a + b + 2);
                let got: f64 = q
                    .points
                    .iter()
                    .zip(&q.weights)
                    .map(|(p, w)| w * p[1].powi(a as i32) * p[2].powi(b as i32))
                    .sum();
                assert!((got - exact).abs() < 1e-15, "x^{a} y^{b}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn not_exact_at_degree_three() {
        let q = QuadratureRule::triangle_degree2();
        let got: f64 = q.points.iter().zip(&q.weights).map(|(p, w)| w * p[1].powi(3)).sum();
        assert!((got - 1.0 / 20.0).abs() > 1e-6);
    }
}
