//! Richardson-extrapolated central finite differences.
//!
//! Used as an independent cross-check of the closed-form derivative towers;
//! never on the evaluation path itself.

/// Estimate the `order`-th derivative (1..=3) of `f` at `x`.
///
/// Central stencils with a four-level Richardson table in h²; good for about
/// nine significant digits on smooth functions.
pub fn richardson_derivative(f: &dyn Fn(f64) -> f64, x: f64, order: usize) -> f64 {
    assert!((1..=3).contains(&order), "order must be 1..=3");
    let stencil = |h: f64| -> f64 {
        match order {
            1 => (f(x + h) - f(x - h)) / (2.0 * h),
            2 => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
            _ => (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h))
                / (2.0 * h * h * h),
        }
    };
    const LEVELS: usize = 5;
    let h0 = 0.15;
    let mut table = [[0.0f64; LEVELS]; LEVELS];
    for i in 0..LEVELS {
        table[i][0] = stencil(h0 / (1 << i) as f64);
        let mut pow4 = 1.0;
        for j in 1..=i {
            pow4 *= 4.0;
            table[i][j] = (pow4 * table[i][j - 1] - table[i - 1][j - 1]) / (pow4 - 1.0);
        }
    }
    table[LEVELS - 1][LEVELS - 1]
}
