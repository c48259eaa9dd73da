//! Smooth approximate rarefaction waves built from the Burgers solution,
//! and their superposition with a viscous contact wave.

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::burgers::BurgersData;
use crate::contact_wave::{ContactError, ContactWave, ContactWaveSpec};
use crate::euler_riemann::{
    curve_velocity_unchecked, entropy, lambda, solve_intermediate_states, volume_for_speed, FluidState, Family,
    GasParams, RiemannDecomposition, RiemannError, DEGENERATE_JUMP,
};
use crate::profile::{Background, ProfileSample};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CompositeError {
    #[error(transparent)]
    Riemann(#[from] RiemannError),
    #[error(transparent)]
    Contact(#[from] ContactError),
    #[error("rarefaction speeds do not increase across the wave (w_l={w_l}, w_r={w_r})")]
    NotExpansive { w_l: f64, w_r: f64 },
}

/// Smooth approximate rarefaction of one family,
/// `λ(V, s) = w(x, 1+t)`, `U = u_end - ∫_{v_end}^{V} λ`, `Θ = θ_end (v_end/V)^{γ-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RarefactionWave {
    pub family: Family,
    pub gas: GasParams,
    /// Far-field state on the outer side of the wave.
    pub end: FluidState,
    /// Intermediate state on the contact side.
    pub middle: FluidState,
    pub entropy: f64,
    pub burgers: BurgersData,
    degenerate: bool,
}

impl RarefactionWave {
    pub fn new(family: Family, end: FluidState, middle: FluidState, gas: GasParams) -> Result<Self, CompositeError> {
        end.validate()?;
        middle.validate()?;
        let s = entropy(&end, &gas);
        let degenerate = (middle.v - end.v).abs() < DEGENERATE_JUMP;
        let (w_l, w_r) = match family {
            Family::One => (lambda(end.v, s, family, &gas), lambda(middle.v, s, family, &gas)),
            Family::Three => (lambda(middle.v, s, family, &gas), lambda(end.v, s, family, &gas)),
        };
        if !degenerate && !(w_l < w_r) {
            return Err(CompositeError::NotExpansive { w_l, w_r });
        }
        Ok(Self { family, gas, end, middle, entropy: s, burgers: BurgersData::new(w_l, w_r.max(w_l)), degenerate })
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    fn from_volume(&self, v: f64) -> FluidState {
        let g = &self.gas;
        FluidState::new(
            v,
            curve_velocity_unchecked(&self.end, self.family, v, g),
            self.end.theta * (self.end.v / v).powf(g.gamma - 1.0),
        )
    }

    pub fn sample(&self, x: f64, t: f64) -> ProfileSample {
        if self.degenerate {
            return ProfileSample::constant(self.end);
        }
        let g = &self.gas;
        let b = self.burgers.sample(x, 1.0 + t);
        let w = b.w;
        debug_assert!(w * self.family.sign() > 0.0, "rarefaction speed changed sign");
        let st = self.from_volume(volume_for_speed(w, self.entropy, g));
        let v = st.v;
        let k = -2.0 / (g.gamma + 1.0);
        let v_x = k * v * b.w_x / w;
        let v_t = k * v * b.w_t / w;
        let v_xx = k * (v_x * b.w_x / w + v * b.w_xx / w - v * b.w_x * b.w_x / (w * w));
        let th = st.theta;
        let c = 1.0 - g.gamma;
        let theta_x = c * th * v_x / v;
        ProfileSample {
            v,
            u: st.u,
            theta: th,
            v_x,
            u_x: -w * v_x,
            theta_x,
            theta_xx: c * (theta_x * v_x / v + th * v_xx / v - th * v_x * v_x / (v * v)),
            v_t,
            u_t: -w * v_t,
            theta_t: c * th * v_t / v,
        }
    }

    /// The centred rarefaction fan `(v^r, u^r, θ^r)(x/t)`.
    pub fn fan(&self, x: f64, t: f64) -> FluidState {
        if self.degenerate {
            return self.end;
        }
        let w = self.burgers.fan(x, t);
        self.from_volume(volume_for_speed(w, self.entropy, &self.gas))
    }
}

/// Region of the `(x, t)` half-plane relative to the two wave fans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    Minus,
    Contact,
    Plus,
}

/// R1CR3 composite wave.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeWave {
    pub gas: GasParams,
    pub left: FluidState,
    pub right: FluidState,
    pub decomposition: RiemannDecomposition,
    pub contact: ContactWave,
    pub rare_minus: RarefactionWave,
    pub rare_plus: RarefactionWave,
}

impl CompositeWave {
    pub fn new(gas: GasParams, left: FluidState, right: FluidState, tol: f64) -> Result<Self, CompositeError> {
        let d = solve_intermediate_states(&left, &right, &gas)?;
        Self::from_decomposition(gas, left, right, d, tol)
    }

    pub fn from_decomposition(
        gas: GasParams,
        left: FluidState,
        right: FluidState,
        d: RiemannDecomposition,
        tol: f64,
    ) -> Result<Self, CompositeError> {
        let spec = ContactWaveSpec::new(&gas, d.thetam_minus, d.thetam_plus, d.pm, d.um)?;
        Ok(Self {
            gas,
            left,
            right,
            decomposition: d,
            contact: ContactWave::new(gas, spec, tol)?,
            rare_minus: RarefactionWave::new(Family::One, left, d.middle_minus(), gas)?,
            rare_plus: RarefactionWave::new(Family::Three, right, d.middle_plus(), gas)?,
        })
    }

    /// Temperature jump `|θ₊ - θ₋|`.
    pub fn strength(&self) -> f64 {
        (self.right.theta - self.left.theta).abs()
    }

    pub fn sample(&self, x: f64, t: f64) -> ProfileSample {
        let d = &self.decomposition;
        let c = self.contact.sample(x, t);
        let m = self.rare_minus.sample(x, t);
        let p = self.rare_plus.sample(x, t);
        ProfileSample {
            v: c.v + m.v + p.v - d.vm_minus - d.vm_plus,
            u: c.u + m.u + p.u - 2.0 * d.um,
            theta: c.theta + m.theta + p.theta - d.thetam_minus - d.thetam_plus,
            v_x: c.v_x + m.v_x + p.v_x,
            u_x: c.u_x + m.u_x + p.u_x,
            theta_x: c.theta_x + m.theta_x + p.theta_x,
            theta_xx: c.theta_xx + m.theta_xx + p.theta_xx,
            v_t: c.v_t + m.v_t + p.v_t,
            u_t: c.u_t + m.u_t + p.u_t,
            theta_t: c.theta_t + m.theta_t + p.theta_t,
        }
    }

    /// Viscous contact plus exact rarefaction fans, the field the solution
    /// converges to.
    pub fn fan_comparison(&self, x: f64, t: f64) -> FluidState {
        let d = &self.decomposition;
        let c = self.contact.sample(x, t);
        let m = self.rare_minus.fan(x, t);
        let p = self.rare_plus.fan(x, t);
        FluidState::new(
            c.v + m.v + p.v - d.vm_minus - d.vm_plus,
            c.u + m.u + p.u - 2.0 * d.um,
            c.theta + m.theta + p.theta - d.thetam_minus - d.thetam_plus,
        )
    }

    /// Speeds `λ₋(v^m₋, s₋)` and `λ₊(v^m₊, s₊)` bounding the contact region.
    pub fn inner_speeds(&self) -> (f64, f64) {
        let g = &self.gas;
        let d = &self.decomposition;
        (
            lambda(d.vm_minus, entropy(&self.left, g), Family::One, g),
            lambda(d.vm_plus, entropy(&self.right, g), Family::Three, g),
        )
    }

    pub fn region(&self, x: f64, t: f64) -> Region {
        region_masks(x, t, self.inner_speeds())
    }

    pub fn sample_grid(&self, xs: &[f64], t: f64) -> CompositeProfile {
        let samples = crate::profile::sample_all(self, xs, t);
        CompositeProfile::from_samples(xs, t, &samples)
    }
}

/// Label of `(x, t)` given the half-speed lines `2x = λ₋t` and `2x = λ₊t`.
pub fn region_masks(x: f64, t: f64, (lambda_minus, lambda_plus): (f64, f64)) -> Region {
    if 2.0 * x < lambda_minus * t {
        Region::Minus
    } else if 2.0 * x > lambda_plus * t {
        Region::Plus
    } else {
        Region::Contact
    }
}

impl Background for CompositeWave {
    fn sample(&self, x: f64, t: f64) -> ProfileSample {
        CompositeWave::sample(self, x, t)
    }

    fn comparison(&self, x: f64, t: f64) -> FluidState {
        self.fan_comparison(x, t)
    }

    fn far_field(&self) -> (FluidState, FluidState) {
        (self.left, self.right)
    }

    fn max_speed(&self) -> f64 {
        let g = &self.gas;
        let d = &self.decomposition;
        [self.left, self.right, d.middle_minus(), d.middle_plus()]
            .iter()
            .map(|s| crate::euler_riemann::characteristic_speeds(s, g)[2])
            .fold(0.0, f64::max)
    }
}

/// Composite background sampled on a grid at one time.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CompositeProfile {
    pub t: f64,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub theta: Vec<f64>,
    pub v_x: Vec<f64>,
    pub u_x: Vec<f64>,
    pub theta_x: Vec<f64>,
    pub theta_xx: Vec<f64>,
    pub u_t: Vec<f64>,
    pub theta_t: Vec<f64>,
}

impl CompositeProfile {
    pub fn from_samples(xs: &[f64], t: f64, samples: &[ProfileSample]) -> Self {
        let col = |f: fn(&ProfileSample) -> f64| samples.iter().map(f).collect::<Vec<_>>();
        Self {
            t,
            x: xs.to_vec(),
            v: col(|s| s.v),
            u: col(|s| s.u),
            theta: col(|s| s.theta),
            v_x: col(|s| s.v_x),
            u_x: col(|s| s.u_x),
            theta_x: col(|s| s.theta_x),
            theta_xx: col(|s| s.theta_xx),
            u_t: col(|s| s.u_t),
            theta_t: col(|s| s.theta_t),
        }
    }

    /// CSV with columns `x,t,V,U,Theta,Vx,Ux,Thetax`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "x,t,V,U,Theta,Vx,Ux,Thetax")?;
        for i in 0..self.x.len() {
            writeln!(
                out,
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                self.x[i], self.t, self.v[i], self.u[i], self.theta[i], self.v_x[i], self.u_x[i], self.theta_x[i]
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler_riemann::{curve_state, pressure};

    fn gas() -> GasParams {
        GasParams::default()
    }

    /// Left state, `p^m = 0.9`, a contact raising θ, then a 3-rarefaction
    /// back up to `p = 1`.
    fn r1cr3() -> CompositeWave {
        let g = gas();
        let left = FluidState::new(1.0, -0.05, 1.0);
        let pm = 0.9;
        let vm_minus = left.v * (pressure(&left, &g) / pm).powf(1.0 / g.gamma);
        let mid_minus = curve_state(&left, Family::One, vm_minus, &g).unwrap();
        let thetam_plus = mid_minus.theta + 0.08;
        let mid_plus = FluidState::new(g.r * thetam_plus / pm, mid_minus.u, thetam_plus);
        // Walk the 3-curve from the middle state towards higher pressure.
        let v_plus = mid_plus.v * (pm / 1.0f64).powf(1.0 / g.gamma);
        let theta_plus = mid_plus.theta * (mid_plus.v / v_plus).powf(g.gamma - 1.0);
        let right_anchor = FluidState::new(v_plus, 0.0, theta_plus);
        let du = curve_state(&right_anchor, Family::Three, mid_plus.v, &g).unwrap().u;
        let right = FluidState::new(v_plus, mid_plus.u - du, theta_plus);
        CompositeWave::new(g, left, right, 1e-10).unwrap()
    }

    #[test]
    fn degenerate_rarefaction_is_constant() {
        let s = FluidState::new(1.2, 0.3, 0.8);
        let r = RarefactionWave::new(Family::One, s, s, gas()).unwrap();
        assert!(r.is_degenerate());
        assert_eq!(r.sample(-3.0, 2.0), ProfileSample::constant(s));
    }

    #[test]
    fn rarefaction_is_expansive_and_solves_euler() {
        let w = r1cr3();
        let g = gas();
        for r in [&w.rare_minus, &w.rare_plus] {
            assert!(!r.is_degenerate());
            for i in 0..200 {
                let x = -60.0 + 0.6 * i as f64;
                let s = r.sample(x, 10.0);
                assert!(s.u_x >= 0.0);
                assert!(s.v > r.end.v.min(r.middle.v) - 1e-14 && s.v < r.end.v.max(r.middle.v) + 1e-14);
            }
            // Finite-difference substitution into the Euler operators.
            let (x, t, h) = (if r.family == Family::One { -8.0 } else { 8.0 }, 6.0, 1e-4);
            let s = r.sample(x, t);
            let d = |f: &dyn Fn(&ProfileSample) -> f64, dx: f64, dt: f64| {
                (f(&r.sample(x + dx, t + dt)) - f(&r.sample(x - dx, t - dt))) / (2.0 * h)
            };
            let p = |s: &ProfileSample| g.r * s.theta / s.v;
            let mass = d(&|s| s.v, 0.0, h) - d(&|s| s.u, h, 0.0);
            let mom = d(&|s| s.u, 0.0, h) + d(&p, h, 0.0);
            let energy = g.r / (g.gamma - 1.0) * d(&|s| s.theta, 0.0, h) + p(&s) * s.u_x;
            assert!(mass.abs() < 1e-8 && mom.abs() < 1e-8 && energy.abs() < 1e-8, "{mass} {mom} {energy}");
            // Stored derivatives against differences.
            assert!((d(&|s| s.v, h, 0.0) - s.v_x).abs() < 1e-8);
            assert!((d(&|s| s.theta_x, h, 0.0) - s.theta_xx).abs() < 1e-8);
            assert!((d(&|s| s.u, 0.0, h) - s.u_t).abs() < 1e-8);
            assert!((d(&|s| s.theta, 0.0, h) - s.theta_t).abs() < 1e-8);
        }
    }

    #[test]
    fn far_field_limits() {
        let w = r1cr3();
        for t in [0.0f64, 10.0, 100.0] {
            let l = 1e3 * (1.0 + t).sqrt();
            let a = w.sample(-l, t);
            let b = w.sample(l, t);
            for (got, want) in [(a.state(), w.left), (b.state(), w.right)] {
                assert!((got.v - want.v).abs() < 1e-6 && (got.u - want.u).abs() < 1e-6 && (got.theta - want.theta).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn composite_bounds() {
        let w = r1cr3();
        let vmin = w.left.v.min(w.right.v);
        let vmax = w.left.v.max(w.right.v);
        let umax = w.left.u.abs().max(w.right.u.abs());
        for t in [0.0, 5.0, 50.0] {
            for i in 0..400 {
                let x = -100.0 + 0.5 * i as f64;
                let s = w.sample(x, t);
                assert!(0.5 * vmin < s.v && s.v < 1.5 * vmax);
                assert!(s.u.abs() <= 1.5 * umax);
            }
        }
    }

    #[test]
    fn pure_contact_reduces_to_contact_profile() {
        let g = gas();
        let w = CompositeWave::new(g, FluidState::new(1.0, 0.0, 1.0), FluidState::new(1.1, 0.0, 1.1), 1e-10).unwrap();
        assert!(w.rare_minus.is_degenerate() && w.rare_plus.is_degenerate());
        for x in [-5.0, 0.0, 2.0] {
            let a = w.sample(x, 3.0);
            let b = w.contact.sample(x, 3.0);
            assert!((a.v - b.v).abs() < 1e-15 && (a.u - b.u).abs() < 1e-15 && (a.theta - b.theta).abs() < 1e-15);
        }
    }

    #[test]
    fn pure_rarefactions_sum() {
        let g = gas();
        let left = FluidState::new(1.0, -0.1, 1.0);
        let right = FluidState::new(1.0, 0.1, 1.0);
        let w = CompositeWave::new(g, left, right, 1e-10).unwrap();
        let d = w.decomposition;
        assert!((d.thetam_minus - d.thetam_plus).abs() < 1e-12);
        for x in [-20.0, -1.0, 0.0, 3.0, 20.0] {
            let a = w.sample(x, 4.0);
            let m = w.rare_minus.sample(x, 4.0);
            let p = w.rare_plus.sample(x, 4.0);
            assert!((a.v - (m.v + p.v - d.vm_minus)).abs() < 1e-12);
            assert!((a.u - (m.u + p.u - d.um)).abs() < 1e-12);
        }
    }

    #[test]
    fn regions() {
        let w = r1cr3();
        assert_eq!(w.region(0.0, 0.0), Region::Contact);
        assert_eq!(w.region(-1e-9, 0.0), Region::Minus);
        assert_eq!(w.region(1e-9, 0.0), Region::Plus);
        assert_eq!(w.region(0.0, 5.0), Region::Contact);
        // Inside the contact region the rarefaction gradients decay exponentially in t.
        let ts = [5.0, 10.0, 15.0, 20.0];
        let vals: Vec<f64> = ts.iter().map(|&t| w.rare_minus.sample(0.0, t).v_x.abs().ln()).collect();
        let (slope, _, _) = crate::numerics::linear_fit(&ts, &vals);
        assert!(slope < 0.0);
    }

    #[test]
    fn smooth_profile_approaches_fans() {
        let w = r1cr3();
        let gap = |t: f64| {
            (0..2001)
                .map(|i| {
                    let x = -2.0 * t + 4.0 * t * i as f64 / 2000.0;
                    let a = w.sample(x, t).state();
                    let b = w.fan_comparison(x, t);
                    (a.v - b.v).abs().max((a.u - b.u).abs()).max((a.theta - b.theta).abs())
                })
                .fold(0.0, f64::max)
        };
        let (g1, g2, g3) = (gap(10.0), gap(100.0), gap(1000.0));
        assert!(g2 < g1 && g3 < g2, "{g1} {g2} {g3}");
    }

    #[test]
    fn stored_vx_matches_differences_to_second_order() {
        let w = r1cr3();
        let (x, t) = (-3.0, 2.0);
        let exact = w.sample(x, t).v_x;
        let e1 = ((w.sample(x + 1e-2, t).v - w.sample(x - 1e-2, t).v) / 2e-2 - exact).abs();
        let e2 = ((w.sample(x + 5e-3, t).v - w.sample(x - 5e-3, t).v) / 1e-2 - exact).abs();
        assert!(e1 / e2 > 3.5, "{e1} {e2}");
    }
}
