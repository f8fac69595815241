//! Finite-difference verification sweeps.

/// Default step sizes for derivative checks along normalised directions.
///
/// The energy is a polynomial of degree four in the state, so the central
/// difference error is an exact multiple of `h²`; smaller steps only add
/// roundoff.
pub const DEFAULT_STEPS: [f64; 4] = [1e-2, 5e-3, 2.5e-3, 1.25e-3];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdRow {
    pub h: f64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FdSweep {
    pub rows: Vec<FdRow>,
    /// Smallest observed order over consecutive step pairs above the noise floor.
    pub order: f64,
    /// All errors below the noise floor: the difference quotient is exact.
    pub exact: bool,
}

impl FdSweep {
    pub fn passes(&self, min_order: f64) -> bool {
        self.exact || self.order >= min_order
    }
}

/// Observed order from an error table. Errors below `floor` are treated as
/// roundoff and excluded.
pub fn observed_order(rows: &[FdRow], floor: f64) -> (f64, bool) {
    let mut order = f64::INFINITY;
    let mut pairs = 0;
    for w in rows.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a.error > floor && b.error > floor {
            order = order.min((a.error / b.error).ln() / (a.h / b.h).ln());
            pairs += 1;
        }
    }
    let exact = rows.iter().all(|r| r.error <= floor);
    if pairs == 0 && !exact {
        // a single error above the floor cannot give an order
        order = f64::NAN;
    }
    (order, exact)
}

/// Central difference `(f(h) − f(−h)) / 2h` against `reference`.
pub fn central_sweep(f: impl Fn(f64) -> f64, reference: f64, steps: &[f64], floor: f64) -> FdSweep {
    let rows: Vec<FdRow> = steps
        .iter()
        .map(|&h| FdRow { h, error: ((f(h) - f(-h)) / (2.0 * h) - reference).abs() })
        .collect();
    let (order, exact) = observed_order(&rows, floor);
    FdSweep { rows, order, exact }
}

/// Sweep over a remainder function that should vanish like `h²`.
pub fn remainder_sweep(r: impl Fn(f64) -> f64, steps: &[f64], floor: f64) -> FdSweep {
    let rows: Vec<FdRow> = steps.iter().map(|&h| FdRow { h, error: r(h).abs() }).collect();
    let (order, exact) = observed_order(&rows, floor);
    FdSweep { rows, order, exact }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_has_order_two() {
        let s = central_sweep(|h| (1.0 + h).powi(3), 3.0, &DEFAULT_STEPS, 1e-14);
        assert!((s.order - 2.0).abs() < 1e-6, "{}", s.order);
        assert!(!s.exact);
    }

    #[test]
    fn quadratic_is_exact() {
        let s = central_sweep(|h| (2.0 + h).powi(2), 4.0, &DEFAULT_STEPS, 1e-12);
        assert!(s.exact && s.passes(1.9));
    }

    #[test]
    fn wrong_derivative_fails() {
        let s = central_sweep(|h| (1.0 + h).powi(3), 3.1, &DEFAULT_STEPS, 1e-14);
        assert!(!s.passes(1.9));
    }
}
