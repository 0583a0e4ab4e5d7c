//! Adaptive Dormand–Prince 5(4) integrator for complex first-order systems.

use crate::error::{Result, ScatterError};
use crate::linalg::c64;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const MAX_STEPS: usize = 2_000_000;

/// Reusable stepper; keeps the last accepted step size across calls so that
/// consecutive segments of one trajectory start with a sensible step.
pub struct Dopri5 {
    rtol: f64,
    atol: f64,
    h: Option<f64>,
    k: [Vec<c64>; 7],
    stage: Vec<c64>,
    next: Vec<c64>,
}

impl Dopri5 {
    pub fn new(dim: usize, rtol: f64, atol: f64) -> Self {
        let z = vec![c64::new(0.0, 0.0); dim];
        Self {
            rtol,
            atol,
            h: None,
            k: std::array::from_fn(|_| z.clone()),
            stage: z.clone(),
            next: z,
        }
    }

    fn combine(&mut self, y: &[c64], h: f64, coeffs: &[(usize, f64)]) {
        for (i, s) in self.stage.iter_mut().enumerate() {
            let mut acc = c64::new(0.0, 0.0);
            for &(j, a) in coeffs {
                acc += self.k[j][i] * a;
            }
            *s = y[i] + acc * h;
        }
    }

    /// Integrates `y' = f(x, y)` from `x0` to `x1` (either direction);
    /// `f` must be smooth on the open interval.
    pub fn advance<F>(&mut self, f: &mut F, y: &mut [c64], x0: f64, x1: f64) -> Result<()>
    where
        F: FnMut(f64, &[c64], &mut [c64]),
    {
        let span = x1 - x0;
        if span == 0.0 {
            return Ok(());
        }
        let dir = span.signum();
        let dim = y.len();
        f(x0, y, &mut self.k[0]);
        let mut h = match self.h {
            Some(h) => h.min(span.abs()),
            None => {
                let d0 = rms(y).max(1e-5);
                let d1 = rms(&self.k[0]).max(1e-5);
                (0.01 * d0 / d1).min(span.abs())
            }
        };
        let mut x = x0;
        let mut steps = 0usize;
        loop {
            let remaining = (x1 - x) * dir;
            if remaining <= 1e-14 * span.abs() {
                break;
            }
            let last = h >= remaining;
            let hs = if last { remaining } else { h } * dir;
            self.combine(y, hs, &[(0, A21)]);
            f(x + C2 * hs, &self.stage, &mut self.k[1]);
            self.combine(y, hs, &[(0, A31), (1, A32)]);
            f(x + C3 * hs, &self.stage, &mut self.k[2]);
            self.combine(y, hs, &[(0, A41), (1, A42), (2, A43)]);
            f(x + C4 * hs, &self.stage, &mut self.k[3]);
            self.combine(y, hs, &[(0, A51), (1, A52), (2, A53), (3, A54)]);
            f(x + C5 * hs, &self.stage, &mut self.k[4]);
            self.combine(y, hs, &[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)]);
            f(x + hs, &self.stage, &mut self.k[5]);
            self.combine(y, hs, &[(0, A71), (2, A73), (3, A74), (4, A75), (5, A76)]);
            self.next.copy_from_slice(&self.stage);
            let x_new = if last { x1 } else { x + hs };
            f(x_new, &self.next, &mut self.k[6]);

            let mut err = 0.0;
            for i in 0..dim {
                let e = (self.k[0][i] * E1
                    + self.k[2][i] * E3
                    + self.k[3][i] * E4
                    + self.k[4][i] * E5
                    + self.k[5][i] * E6
                    + self.k[6][i] * E7)
                    * hs;
                let sc = self.atol + self.rtol * y[i].norm().max(self.next[i].norm());
                err += e.norm_sqr() / (sc * sc);
            }
            let err = (err / dim as f64).sqrt();
            if !err.is_finite() {
                return Err(ScatterError::NonFinite("ODE state"));
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                x = x_new;
                y.copy_from_slice(&self.next);
                self.k.swap(0, 6);
                if !last || fac < 1.0 {
                    h = hs.abs() * fac;
                }
                self.h = Some(h);
            } else {
                h = hs.abs() * fac.min(1.0);
            }
            steps += 1;
            if steps > MAX_STEPS || h < 1e-14 * (1.0 + x.abs()) {
                return Err(ScatterError::IntegrationFailure { x });
            }
        }
        Ok(())
    }
}

fn rms(v: &[c64]) -> f64 {
    (v.iter().map(|z| z.norm_sqr()).sum::<f64>() / v.len().max(1) as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_backwards() {
        // y'' = -y, integrate from 3 back to 0 starting at (cos 3, -sin 3)
        let mut y = [c64::new(3f64.cos(), 0.0), c64::new(-3f64.sin(), 0.0)];
        let mut f = |_x: f64, y: &[c64], dy: &mut [c64]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        };
        let mut ode = Dopri5::new(2, 1e-12, 1e-14);
        ode.advance(&mut f, &mut y, 3.0, 1.5).unwrap();
        ode.advance(&mut f, &mut y, 1.5, 0.0).unwrap();
        assert!((y[0].re - 1.0).abs() < 1e-10);
        assert!(y[1].re.abs() < 1e-10);
    }

    #[test]
    fn complex_exponential() {
        let k = 7.0;
        let mut y = [c64::new(1.0, 0.0)];
        let mut f = |_x: f64, y: &[c64], dy: &mut [c64]| dy[0] = y[0] * c64::new(0.0, k);
        let mut ode = Dopri5::new(1, 1e-11, 1e-14);
        ode.advance(&mut f, &mut y, 0.0, 2.0).unwrap();
        let exact = c64::new(0.0, 2.0 * k).exp();
        assert!((y[0] - exact).norm() < 1e-8);
    }
}
