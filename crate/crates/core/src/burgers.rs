//! Smooth global solution of the inviscid Burgers equation
//! `w_t + w w_x = 0` from monotone `tanh` data, evaluated exactly along
//! characteristics.

use serde::{Deserialize, Serialize};

use crate::numerics::{integrate, monotone_root, NumericsError};

/// Burgers initial data `w(x,0) = (w_r+w_l)/2 + (w_r-w_l)/2 · tanh(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BurgersData {
    pub w_l: f64,
    pub w_r: f64,
}

/// `w` and its derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BurgersSample {
    pub w: f64,
    pub w_x: f64,
    pub w_xx: f64,
    pub w_t: f64,
}

/// Exponent of an `L^q` norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lq {
    Finite(f64),
    Infinity,
}

/// `sech²(x)` without cancellation in the tails.
fn sech2(x: f64) -> f64 {
    let e = (-2.0 * x.abs()).exp();
    4.0 * e / ((1.0 + e) * (1.0 + e))
}

impl BurgersData {
    pub fn new(w_l: f64, w_r: f64) -> Self {
        debug_assert!(w_l <= w_r, "Burgers data must be nondecreasing");
        Self { w_l, w_r }
    }

    /// Wave strength `w_r - w_l`.
    pub fn strength(&self) -> f64 {
        self.w_r - self.w_l
    }

    fn half(&self) -> f64 {
        0.5 * (self.w_r - self.w_l)
    }

    /// `mid + half·tanh(x)`, written relative to the nearer end state so
    /// the tails keep full relative accuracy.
    pub fn initial_value(&self, x: f64) -> f64 {
        let e = (-2.0 * x.abs()).exp();
        let tail = self.strength() * e / (1.0 + e);
        if x < 0.0 {
            self.w_l + tail
        } else {
            self.w_r - tail
        }
    }

    pub fn initial_slope(&self, x: f64) -> f64 {
        self.half() * sech2(x)
    }

    fn initial_curvature(&self, x: f64) -> f64 {
        -2.0 * self.half() * sech2(x) * x.tanh()
    }

    /// Foot of the characteristic through `(x, t)`: the `x₀` with
    /// `x = x₀ + t·w₀(x₀)`.
    pub fn foot(&self, x: f64, t: f64) -> f64 {
        if t == 0.0 {
            return x;
        }
        if self.strength() == 0.0 {
            return x - t * self.w_l;
        }
        let f = |x0: f64| x0 + t * self.initial_value(x0) - x;
        let df = |x0: f64| 1.0 + t * self.initial_slope(x0);
        let lo = x - t * self.w_r;
        let hi = x - t * self.w_l;
        // The bracket is exact because w_l < w₀ < w_r.
        monotone_root(f, df, lo, hi, 1e-15).unwrap_or(0.5 * (lo + hi))
    }

    pub fn evaluate(&self, x: f64, t: f64) -> f64 {
        self.initial_value(self.foot(x, t))
    }

    pub fn derivative(&self, x: f64, t: f64) -> f64 {
        let s = self.initial_slope(self.foot(x, t));
        s / (1.0 + t * s)
    }

    pub fn sample(&self, x: f64, t: f64) -> BurgersSample {
        let x0 = self.foot(x, t);
        let w = self.initial_value(x0);
        let s = self.initial_slope(x0);
        let jac = 1.0 + t * s;
        let w_x = s / jac;
        BurgersSample { w, w_x, w_xx: self.initial_curvature(x0) / (jac * jac * jac), w_t: -w * w_x }
    }

    /// Entropy solution of the Riemann problem with data `w_l | w_r`.
    pub fn fan(&self, x: f64, t: f64) -> f64 {
        if t <= 0.0 {
            return if x < 0.0 { self.w_l } else { self.w_r };
        }
        (x / t).clamp(self.w_l, self.w_r)
    }

    /// Half-width of the interval outside which `w_x` is negligible.
    pub fn truncation(&self, t: f64) -> f64 {
        10.0 + (self.w_l.abs() + self.w_r.abs()) * t + 20.0
    }

    /// `‖w_x(·, t)‖_{L^q}` by adaptive quadrature (finite `q`) or an
    /// adaptively refined sample maximum (`q = ∞`).
    pub fn lq_norm_of_derivative(&self, t: f64, q: Lq) -> Result<f64, NumericsError> {
        if self.strength() == 0.0 {
            return Ok(0.0);
        }
        let l = self.truncation(t);
        match q {
            Lq::Finite(q) => {
                let f = |x: f64| self.derivative(x, t).abs().powf(q);
                let edges = [-l, (self.w_l * t).clamp(-l, l), (self.w_r * t).clamp(-l, l), l];
                let mut sum = 0.0;
                for w in edges.windows(2) {
                    sum += integrate(f, w[0], w[1], 1e-15, 1e-12)?;
                }
                Ok(sum.powf(1.0 / q))
            }
            Lq::Infinity => Ok(self.sup_derivative(t, l)),
        }
    }

    fn sup_derivative(&self, t: f64, l: f64) -> f64 {
        // Coarse scan including a dense pass across the fan, then golden
        // section on the bracketing cell; w_x is unimodal in x.
        let mut xs: Vec<f64> = (0..=400).map(|i| -l + 2.0 * l * i as f64 / 400.0).collect();
        let (a, b) = (self.w_l * t - 5.0, self.w_r * t + 5.0);
        xs.extend((0..=400).map(|i| a + (b - a) * i as f64 / 400.0));
        xs.sort_by(|p, q| p.total_cmp(q));
        let (k, _) = xs
            .iter()
            .map(|&x| self.derivative(x, t))
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
        let mut lo = xs[k.saturating_sub(1)];
        let mut hi = xs[(k + 1).min(xs.len() - 1)];
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..200 {
            if hi - lo < 1e-12 * (1.0 + hi.abs()) {
                break;
            }
            let m1 = hi - phi * (hi - lo);
            let m2 = lo + phi * (hi - lo);
            if self.derivative(m1, t) < self.derivative(m2, t) {
                lo = m1;
            } else {
                hi = m2;
            }
        }
        self.derivative(0.5 * (lo + hi), t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const D: BurgersData = BurgersData { w_l: -0.7, w_r: 0.4 };

    #[test]
    fn initial_data() {
        assert!((D.initial_value(0.0) - 0.5 * (D.w_l + D.w_r)).abs() < 1e-16);
        assert!((D.initial_value(40.0) - D.w_r).abs() < 1e-15);
        assert!((D.initial_value(-40.0) - D.w_l).abs() < 1e-15);
        let c = BurgersData::new(0.3, 0.3);
        assert_eq!(c.initial_value(1.7), 0.3);
        assert_eq!(c.evaluate(5.0, 3.0), 0.3);
        assert_eq!(c.lq_norm_of_derivative(3.0, Lq::Finite(2.0)).unwrap(), 0.0);
    }

    #[test]
    fn t0_is_identity() {
        for x in [-3.0, -0.2, 0.0, 1.1, 7.0] {
            assert_eq!(D.evaluate(x, 0.0), D.initial_value(x));
        }
        assert!((D.derivative(0.0, 0.0) - 0.5 * D.strength()).abs() < 1e-15);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let (x, t) = (0.3, 2.5);
        let mut errs = vec![];
        for h in [1e-2, 5e-3] {
            let fd = (D.evaluate(x + h, t) - D.evaluate(x - h, t)) / (2.0 * h);
            errs.push((fd - D.derivative(x, t)).abs());
        }
        assert!(errs[0] / errs[1] > 3.5, "{errs:?}");
        let s = D.sample(x, t);
        let h = 1e-4;
        let fd_xx = (D.derivative(x + h, t) - D.derivative(x - h, t)) / (2.0 * h);
        assert!((fd_xx - s.w_xx).abs() < 1e-7);
        let fd_t = (D.evaluate(x, t + h) - D.evaluate(x, t - h)) / (2.0 * h);
        assert!((fd_t - s.w_t).abs() < 1e-7);
    }

    #[test]
    fn long_time_matches_fan() {
        let xi = -0.2;
        let mut prev = f64::INFINITY;
        for t in [1e2, 1e3, 1e4] {
            let gap = (D.evaluate(xi * t, t) - D.fan(xi * t, t)).abs();
            assert!(gap < 10.0 * (1.0 + t.ln()) / t, "gap {gap} at t={t}");
            assert!(gap < prev);
            prev = gap;
        }
    }

    #[test]
    fn l1_norm_is_total_variation() {
        for t in [0.0, 1.0, 50.0, 500.0] {
            let n = D.lq_norm_of_derivative(t, Lq::Finite(1.0)).unwrap();
            assert!((n - D.strength()).abs() < 1e-10, "t={t}: {n}");
        }
    }

    #[test]
    fn sup_norm_is_attained_at_the_centre_characteristic() {
        // Independent closed form: the max of w₀' is at x₀ = 0.
        let t = 7.0;
        let s0 = 0.5 * D.strength();
        let exact = s0 / (1.0 + t * s0);
        let n = D.lq_norm_of_derivative(t, Lq::Infinity).unwrap();
        assert!((n - exact).abs() < 1e-12);
    }

    #[test]
    fn exponential_tail_bound() {
        let d = BurgersData::new(0.3, 0.8);
        for t in [0.0, 1.0, 10.0] {
            for k in 0..40 {
                let x = -0.5 * k as f64;
                let bound = d.strength() * (-2.0 * (x.abs() + d.w_l * t)).exp();
                // Subtracting w_l costs a couple of ulps of |w|.
                let slack = 4.0 * f64::EPSILON * d.w_r.abs();
                assert!((d.evaluate(x, t) - d.w_l).abs() <= bound * (1.0 + 1e-9) + slack);
                assert!(d.derivative(x, t).abs() <= 2.0 * bound * (1.0 + 1e-9) + 1e-300);
            }
        }
    }

    #[test]
    fn truncated_conservation() {
        // ∫(w - w₀) dx over [-L, L] equals the integrated boundary flux.
        let t = 3.0;
        let l = 8.0;
        let mass = integrate(|x| D.evaluate(x, t) - D.initial_value(x), -l, l, 1e-13, 1e-13).unwrap();
        let flux = integrate(
            |tau| 0.5 * (D.evaluate(-l, tau).powi(2) - D.evaluate(l, tau).powi(2)),
            0.0,
            t,
            1e-13,
            1e-13,
        )
        .unwrap();
        assert!((mass - flux).abs() < 1e-9, "{mass} vs {flux}");
    }

    proptest! {
        #[test]
        fn strict_bounds_and_monotone(x in -50.0f64..50.0, dx in 0.0f64..3.0, t in 0.0f64..200.0) {
            let w = D.evaluate(x, t);
            prop_assert!(D.w_l <= w && w <= D.w_r);
            // Strictness is only representable while tanh(x₀) is not rounded to ±1.
            if D.foot(x, t).abs() < 18.0 {
                prop_assert!(D.w_l < w && w < D.w_r);
                prop_assert!(D.derivative(x, t) > 0.0);
            }
            prop_assert!(D.evaluate(x + dx, t) >= w);
            prop_assert!(D.derivative(x, t) >= 0.0);
        }
    }
}
