//! Quadrature weights on uniform lattices.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuadRule {
    #[default]
    Trapezoid,
    /// Fourth-order Gregory end corrections.
    Gregory,
}

/// Weights for `points` equally spaced nodes with spacing `h`.
pub fn weights(rule: QuadRule, points: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; points];
    match points {
        0 => return w,
        1 => {
            w[0] = 0.0;
            return w;
        }
        _ => {}
    }
    let last = points - 1;
    let gregory = [3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0];
    if rule == QuadRule::Gregory && points >= 2 * gregory.len() {
        for (i, g) in gregory.iter().enumerate() {
            w[i] = g * h;
            w[last - i] = g * h;
        }
    } else {
        w[0] = 0.5 * h;
        w[last] = 0.5 * h;
    }
    w
}

/// Composite Simpson on an even number of intervals (falls back to a trapezoid
/// on the last interval when the count is odd).
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let intervals = n - 1;
    let even = intervals - intervals % 2;
    let mut acc = 0.0;
    for i in (0..even).step_by(2) {
        acc += h / 3.0 * (values[i] + 4.0 * values[i + 1] + values[i + 2]);
    }
    if even < intervals {
        acc += 0.5 * h * (values[n - 2] + values[n - 1]);
    }
    acc
}
