//! Common interface of the background wave patterns the solver is
//! anchored to and the diagnostics compare against.

use crate::euler_riemann::FluidState;

/// Background `(V, U, Θ)` and its derivatives at one `(x, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ProfileSample {
    pub v: f64,
    pub u: f64,
    pub theta: f64,
    pub v_x: f64,
    pub u_x: f64,
    pub theta_x: f64,
    pub theta_xx: f64,
    pub v_t: f64,
    pub u_t: f64,
    pub theta_t: f64,
}

impl ProfileSample {
    pub fn constant(s: FluidState) -> Self {
        Self { v: s.v, u: s.u, theta: s.theta, ..Default::default() }
    }

    pub fn state(&self) -> FluidState {
        FluidState::new(self.v, self.u, self.theta)
    }
}

/// A smooth wave pattern evaluated on demand.
pub trait Background: Send + Sync {
    fn sample(&self, x: f64, t: f64) -> ProfileSample;

    /// Field the large-time statement compares the solution with. Smooth
    /// profiles compare against themselves.
    fn comparison(&self, x: f64, t: f64) -> FluidState {
        self.sample(x, t).state()
    }

    /// `(left, right)` far-field states.
    fn far_field(&self) -> (FluidState, FluidState);

    /// Largest characteristic speed of the pattern, used to size domains.
    fn max_speed(&self) -> f64;
}

/// A constant state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantBackground {
    pub state: FluidState,
    pub sound_speed: f64,
}

impl Background for ConstantBackground {
    fn sample(&self, _x: f64, _t: f64) -> ProfileSample {
        ProfileSample::constant(self.state)
    }

    fn far_field(&self) -> (FluidState, FluidState) {
        (self.state, self.state)
    }

    fn max_speed(&self) -> f64 {
        self.sound_speed
    }
}

/// Samples `bg` at every point of `xs`.
pub fn sample_all(bg: &dyn Background, xs: &[f64], t: f64) -> Vec<ProfileSample> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        xs.par_iter().map(|&x| bg.sample(x, t)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        xs.iter().map(|&x| bg.sample(x, t)).collect()
    }
}
