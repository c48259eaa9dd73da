//! Method-of-lines solver for the 1D Lagrangian Navier-Stokes-Maxwell system
//!
//! ```text
//! v_t - u_x = 0
//! u_t + p_x = μ(u_x/v)_x - v(E+ub)b
//! R/(γ-1) θ_t + p u_x = κ(θ_x/v)_x + μ u_x²/v + v(E+ub)²
//! ε(E_t - (u/v)E_x) - b_x/v + E + ub = 0
//! b_t - (u/v)b_x - E_x/v = 0
//! ```
//!
//! Second-order central differences in space (diffusion in conservative
//! flux form), SSP-RK3 in time, and optionally a Strang-split exact
//! integration of the relaxation `εE_t = -(E+ub)`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::euler_riemann::GasParams;
use crate::profile::{sample_all, Background};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("positivity lost at t={t}: {field}[{index}] = {value}")]
    PositivityLoss { t: f64, field: &'static str, index: usize, value: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// Uniform grid. Dirichlet grids include both end points; periodic grids
/// omit the duplicate right end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
    pub periodic: bool,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self, SolverError> {
        if n < 16 || !(x_max > x_min) {
            return Err(SolverError::InvalidGrid(format!("need n >= 16 and x_max > x_min, got n={n}, [{x_min}, {x_max}]")));
        }
        Ok(Self { x_min, x_max, n, periodic: false })
    }

    pub fn periodic(x_min: f64, period: f64, n: usize) -> Result<Self, SolverError> {
        let mut g = Self::new(x_min, x_min + period, n)?;
        g.x_max = x_min + period * (n - 1) as f64 / n as f64;
        g.periodic = true;
        Ok(g)
    }

    pub fn h(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + self.h() * i as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }
}

/// Grid functions at one time level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub t: f64,
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub theta: Vec<f64>,
    pub e: Vec<f64>,
    pub b: Vec<f64>,
}

impl State {
    pub fn zeros(n: usize) -> Self {
        Self { t: 0.0, v: vec![0.0; n], u: vec![0.0; n], theta: vec![0.0; n], e: vec![0.0; n], b: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    pub fn node(&self, i: usize) -> [f64; 5] {
        [self.v[i], self.u[i], self.theta[i], self.e[i], self.b[i]]
    }

    pub fn set_node(&mut self, i: usize, q: [f64; 5]) {
        self.v[i] = q[0];
        self.u[i] = q[1];
        self.theta[i] = q[2];
        self.e[i] = q[3];
        self.b[i] = q[4];
    }

    pub fn fields(&self) -> [&[f64]; 5] {
        [&self.v, &self.u, &self.theta, &self.e, &self.b]
    }

    fn fields_mut(&mut self) -> [&mut Vec<f64>; 5] {
        [&mut self.v, &mut self.u, &mut self.theta, &mut self.e, &mut self.b]
    }

    pub fn check_positivity(&self) -> Result<(), SolverError> {
        for (field, data) in [("v", &self.v), ("theta", &self.theta)] {
            if let Some((index, &value)) = data.iter().enumerate().find(|(_, x)| !(**x > 0.0)) {
                return Err(SolverError::PositivityLoss { t: self.t, field, index, value });
            }
        }
        Ok(())
    }

    /// `self = a·self + c·other + d·dt·rhs` on all five fields.
    fn combine(&mut self, a: f64, other: &State, c: f64, rhs: &[[f64; 5]], d: f64) {
        for (k, f) in self.fields_mut().into_iter().enumerate() {
            let o = other.fields()[k];
            for i in 0..f.len() {
                f[i] = a * f[i] + c * o[i] + d * rhs[i][k];
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Transport {
    /// Second-order central differences everywhere.
    Central2,
    /// First-order upwinding of the `(u/v)∂_x` Maxwell transport.
    Upwind1Central2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relaxation {
    ExactExponential,
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub cfl_advective: f64,
    pub cfl_diffusive: f64,
    pub scheme: Transport,
    pub relaxation: Relaxation,
    pub t_end: f64,
    /// Steps between recorded snapshots.
    pub output_stride: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            cfl_advective: 0.8,
            cfl_diffusive: 0.8,
            scheme: Transport::Central2,
            relaxation: Relaxation::ExactExponential,
            t_end: 1.0,
            output_stride: 1000,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        for (name, v) in [("cfl_advective", self.cfl_advective), ("cfl_diffusive", self.cfl_diffusive)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(SolverError::InvalidConfig(format!("{name} = {v} must lie in (0, 1]")));
            }
        }
        if !(self.t_end >= 0.0) {
            return Err(SolverError::InvalidConfig(format!("t_end = {} must be nonnegative", self.t_end)));
        }
        if self.output_stride == 0 {
            return Err(SolverError::InvalidConfig("output_stride must be positive".into()));
        }
        Ok(())
    }
}

/// Pointwise function of `(x, t)` returning values for `(v, u, θ, E, b)`.
pub type FieldFn = dyn Fn(f64, f64) -> [f64; 5] + Send + Sync;

#[derive(Clone)]
pub enum Boundary {
    Periodic,
    /// End nodes pinned to the given values.
    Dirichlet(Arc<FieldFn>),
}

impl Boundary {
    /// Dirichlet data from a background wave with `E = b = 0`.
    pub fn anchored(bg: Arc<dyn Background>) -> Self {
        Boundary::Dirichlet(Arc::new(move |x, t| {
            let s = bg.sample(x, t);
            [s.v, s.u, s.theta, 0.0, 0.0]
        }))
    }
}

impl std::fmt::Debug for Boundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Boundary::Periodic => write!(f, "Periodic"),
            Boundary::Dirichlet(_) => write!(f, "Dirichlet(..)"),
        }
    }
}

/// Quantities accumulated over one step with the RK3 weights.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepReport {
    pub dt: f64,
    /// `∫ (boundary flux of v) dt` over the step; see [`Solver::mass`].
    pub mass_flux: f64,
}

#[derive(Clone)]
pub struct Solver {
    pub gas: GasParams,
    pub grid: Grid1D,
    pub config: SolverConfig,
    pub boundary: Boundary,
    /// Extra source added to the tendencies (manufactured solutions).
    pub forcing: Option<Arc<FieldFn>>,
}

impl std::fmt::Debug for Solver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Solver")
            .field("gas", &self.gas)
            .field("grid", &self.grid)
            .field("config", &self.config)
            .field("boundary", &self.boundary)
            .finish()
    }
}

impl Solver {
    pub fn new(gas: GasParams, grid: Grid1D, config: SolverConfig, boundary: Boundary) -> Result<Self, SolverError> {
        config.validate()?;
        gas.validate().map_err(|e| SolverError::InvalidConfig(e.to_string()))?;
        if grid.periodic != matches!(boundary, Boundary::Periodic) {
            return Err(SolverError::InvalidConfig("periodic grids need periodic boundaries and vice versa".into()));
        }
        Ok(Self { gas, grid, config, boundary, forcing: None })
    }

    pub fn with_forcing(mut self, f: Arc<FieldFn>) -> Self {
        self.forcing = Some(f);
        self
    }

    fn interior(&self) -> std::ops::Range<usize> {
        if self.grid.periodic {
            0..self.grid.n
        } else {
            1..self.grid.n - 1
        }
    }

    fn apply_boundary(&self, s: &mut State, t: f64) {
        if let Boundary::Dirichlet(f) = &self.boundary {
            let n = self.grid.n;
            s.set_node(0, f(self.grid.x(0), t));
            s.set_node(n - 1, f(self.grid.x(n - 1), t));
        }
    }

    /// Discrete mass `h Σ v` over the evolved nodes.
    pub fn mass(&self, s: &State) -> f64 {
        self.grid.h() * s.v[self.interior()].iter().sum::<f64>()
    }

    /// Boundary flux matching [`Solver::mass`]: `d/dt mass = mass_boundary_flux`
    /// exactly in the semi-discrete scheme.
    pub fn mass_boundary_flux(&self, s: &State) -> f64 {
        if self.grid.periodic {
            return 0.0;
        }
        let n = self.grid.n;
        0.5 * (s.u[n - 1] + s.u[n - 2]) - 0.5 * (s.u[0] + s.u[1])
    }

    /// Semi-discrete `(h Σ (v_t b + v b_t), boundary flux of E+ub)` over the
    /// evolved nodes; equal in the central scheme.
    pub fn structural_balance(&self, s: &State) -> Result<(f64, f64), SolverError> {
        let r = self.tendencies(s, false, true)?;
        let lhs = self.grid.h() * self.interior().map(|i| r[i][0] * s.b[i] + s.v[i] * r[i][4]).sum::<f64>();
        let q = |i: usize| s.e[i] + s.u[i] * s.b[i];
        let n = self.grid.n;
        let flux = if self.grid.periodic { 0.0 } else { 0.5 * (q(n - 1) + q(n - 2)) - 0.5 * (q(0) + q(1)) };
        Ok((lhs, flux))
    }

    /// Full tendencies, including the relaxation term.
    pub fn rhs(&self, s: &State) -> Result<Vec<[f64; 5]>, SolverError> {
        self.tendencies(s, true, true)
    }

    fn tendencies(&self, s: &State, with_relaxation: bool, with_forcing: bool) -> Result<Vec<[f64; 5]>, SolverError> {
        s.check_positivity()?;
        let n = self.grid.n;
        let h = self.grid.h();
        let g = self.gas;
        let periodic = self.grid.periodic;
        let upwind = self.config.scheme == Transport::Upwind1Central2;
        let forcing = if with_forcing { self.forcing.clone() } else { None };
        let t = s.t;
        let x_min = self.grid.x_min;
        let interior = self.interior();
        let kernel = |i: usize| -> [f64; 5] {
            if !interior.contains(&i) {
                return [0.0; 5];
            }
            let im = if i == 0 { n - 1 } else { i - 1 };
            let ip = if i == n - 1 { 0 } else { i + 1 };
            debug_assert!(periodic || (i > 0 && i < n - 1));
            let d = |f: &[f64]| (f[ip] - f[im]) / (2.0 * h);
            let (v, u, th, e, b) = (s.v[i], s.u[i], s.theta[i], s.e[i], s.b[i]);
            let p = |j: usize| g.r * s.theta[j] / s.v[j];
            let ux = d(&s.u);
            let px = (p(ip) - p(im)) / (2.0 * h);
            let vr = 0.5 * (v + s.v[ip]);
            let vl = 0.5 * (v + s.v[im]);
            let visc = g.mu * ((s.u[ip] - u) / vr - (u - s.u[im]) / vl) / (h * h);
            let cond = g.kappa * ((s.theta[ip] - th) / vr - (th - s.theta[im]) / vl) / (h * h);
            let j = e + u * b;
            let a = u / v;
            let (ex, bx_transport) = if upwind {
                // E_t - (u/v)E_x: information travels with speed -u/v.
                if a < 0.0 {
                    ((e - s.e[im]) / h, (b - s.b[im]) / h)
                } else {
                    ((s.e[ip] - e) / h, (s.b[ip] - b) / h)
                }
            } else {
                (d(&s.e), d(&s.b))
            };
            let bx = d(&s.b);
            let ex_c = d(&s.e);
            let mut r = [
                ux,
                -px + visc - v * j * b,
                (g.gamma - 1.0) / g.r * (-p(i) * ux + cond + g.mu * ux * ux / v + v * j * j),
                a * ex + bx / (g.epsilon * v),
                0.0,
            ];
            r[4] = if upwind {
                a * bx_transport + ex_c / v
            } else {
                // (u b_x + E_x)/v written so that v_t b + v b_t = (ub + E)_x
                // holds exactly for the discrete operators.
                let ub_x = (s.u[ip] * s.b[ip] - s.u[im] * s.b[im]) / (2.0 * h);
                (ub_x - b * ux + ex_c) / v
            };
            if with_relaxation {
                r[3] -= j / g.epsilon;
            }
            if let Some(f) = &forcing {
                let q = f(x_min + h * i as f64, t);
                for k in 0..5 {
                    r[k] += q[k];
                }
            }
            r
        };
        #[cfg(feature = "parallel")]
        let out: Vec<[f64; 5]> = {
            use rayon::prelude::*;
            if n >= 2048 {
                (0..n).into_par_iter().map(kernel).collect()
            } else {
                (0..n).map(kernel).collect()
            }
        };
        #[cfg(not(feature = "parallel"))]
        let out: Vec<[f64; 5]> = (0..n).map(kernel).collect();
        Ok(out)
    }

    /// Largest stable step for the current state.
    pub fn stable_dt(&self, s: &State) -> f64 {
        let g = &self.gas;
        let h = self.grid.h();
        let mut speed = 0.0f64;
        let mut vmin = f64::INFINITY;
        for i in 0..s.len() {
            let v = s.v[i];
            let p = g.r * s.theta[i] / v;
            let acoustic = (g.gamma * p / v).sqrt();
            let maxwell = 1.0 / (v * g.epsilon.sqrt());
            speed = speed.max((s.u[i] / v).abs()).max(acoustic).max(maxwell);
            vmin = vmin.min(v);
        }
        let adv = self.config.cfl_advective * h / speed;
        let diff = self.config.cfl_diffusive * h * h * vmin / (2.0 * g.mu.max(g.kappa * (g.gamma - 1.0) / g.r));
        let mut dt = adv.min(diff);
        if self.config.relaxation == Relaxation::Explicit {
            dt = dt.min(0.5 * g.epsilon);
        }
        dt
    }

    fn relax(&self, s: &mut State, tau: f64) {
        let decay = (-tau / self.gas.epsilon).exp();
        for i in self.interior() {
            let ub = s.u[i] * s.b[i];
            s.e[i] = -ub + (s.e[i] + ub) * decay;
        }
    }

    /// One SSP-RK3 step of size `dt`.
    pub fn step(&self, s: &mut State, dt: f64) -> Result<StepReport, SolverError> {
        if dt == 0.0 {
            return Ok(StepReport::default());
        }
        let exact = self.config.relaxation == Relaxation::ExactExponential;
        let t0 = s.t;
        if exact {
            self.relax(s, 0.5 * dt);
        }
        let with_relax = !exact;
        let mut mass_flux = 0.0;

        // Stage 1
        self.apply_boundary(s, t0);
        let l0 = self.tendencies(s, with_relax, true)?;
        mass_flux += dt / 6.0 * self.mass_boundary_flux(s);
        let mut s1 = s.clone();
        s1.combine(1.0, s, 0.0, &l0, dt);
        s1.t = t0 + dt;
        self.apply_boundary(&mut s1, t0 + dt);

        // Stage 2
        let l1 = self.tendencies(&s1, with_relax, true)?;
        mass_flux += dt / 6.0 * self.mass_boundary_flux(&s1);
        let mut s2 = s1;
        s2.combine(0.25, s, 0.75, &l1, 0.25 * dt);
        s2.t = t0 + 0.5 * dt;
        self.apply_boundary(&mut s2, t0 + 0.5 * dt);

        // Stage 3
        let l2 = self.tendencies(&s2, with_relax, true)?;
        mass_flux += 2.0 * dt / 3.0 * self.mass_boundary_flux(&s2);
        let base = s.clone();
        s.combine(1.0 / 3.0, &s2, 2.0 / 3.0, &l2, 2.0 / 3.0 * dt);
        let _ = base;
        s.t = t0 + dt;
        if exact {
            self.relax(s, 0.5 * dt);
        }
        self.apply_boundary(s, t0 + dt);
        s.check_positivity()?;
        Ok(StepReport { dt, mass_flux })
    }
}

/// Shape of an initial perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    None,
    /// `exp(-((x-c)/w)²)`
    Gaussian,
    /// `-√(2e)·((x-c)/w)·exp(-((x-c)/w)²)`, zero mean with unit peak.
    GaussianDerivative,
    /// Smooth compactly supported `exp(1 - 1/(1-r²))` on `|x-c| < w`.
    Bump,
}

/// Initial perturbation `(φ₀, ψ₀, ζ₀, E₀, b₀)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Perturbation {
    pub shape: Shape,
    /// Peak amplitudes of `(φ, ψ, ζ, E, b)`.
    pub amplitudes: [f64; 5],
    pub width: f64,
    #[serde(default)]
    pub center: f64,
}

impl Perturbation {
    pub fn none() -> Self {
        Self { shape: Shape::None, amplitudes: [0.0; 5], width: 1.0, center: 0.0 }
    }

    pub fn gaussian(amplitude: f64, width: f64) -> Self {
        Self { shape: Shape::Gaussian, amplitudes: [amplitude; 5], width, center: 0.0 }
    }

    pub fn profile(&self, x: f64) -> f64 {
        let r = (x - self.center) / self.width;
        match self.shape {
            Shape::None => 0.0,
            Shape::Gaussian => (-r * r).exp(),
            Shape::GaussianDerivative => -(2.0 * std::f64::consts::E).sqrt() * r * (-r * r).exp(),
            Shape::Bump => {
                if r.abs() < 1.0 {
                    (1.0 - 1.0 / (1.0 - r * r)).exp()
                } else {
                    0.0
                }
            }
        }
    }

    pub fn at(&self, x: f64) -> [f64; 5] {
        let f = self.profile(x);
        self.amplitudes.map(|a| a * f)
    }
}

/// Background at `t = 0` plus the perturbation; `E, b` carry only the
/// perturbation.
pub fn init(grid: &Grid1D, background: &dyn Background, perturbation: &Perturbation) -> Result<State, SolverError> {
    let xs = grid.points();
    let samples = sample_all(background, &xs, 0.0);
    let mut s = State::zeros(grid.n);
    for (i, (&x, bg)) in xs.iter().zip(&samples).enumerate() {
        let p = perturbation.at(x);
        s.set_node(i, [bg.v + p[0], bg.u + p[1], bg.theta + p[2], p[3], p[4]]);
    }
    s.check_positivity()?;
    Ok(s)
}

/// Why [`run`] stopped.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub steps: usize,
    pub failure: Option<SolverError>,
}

/// Advances `state` to `t_end`, calling `observer(state, report, step)`
/// after every step (and once with `step = 0` before the first). The last
/// step is shortened to land exactly on `t_end`.
pub fn run<F>(solver: &Solver, state: &mut State, t_end: f64, mut observer: F) -> RunOutcome
where
    F: FnMut(&State, &StepReport, usize),
{
    observer(state, &StepReport::default(), 0);
    let mut steps = 0;
    while state.t < t_end {
        let dt = solver.stable_dt(state).min(t_end - state.t);
        // Snap the last sliver onto t_end.
        let dt = if t_end - (state.t + dt) < 1e-12 * t_end.max(1.0) { t_end - state.t } else { dt };
        let before = state.clone();
        match solver.step(state, dt) {
            Ok(report) => {
                steps += 1;
                if t_end - state.t < 1e-12 * t_end.max(1.0) {
                    state.t = t_end;
                }
                observer(state, &report, steps);
            }
            Err(e) => {
                *state = before;
                return RunOutcome { steps, failure: Some(e) };
            }
        }
    }
    RunOutcome { steps, failure: None }
}

/// Domain half-width so that waves and diffusion fronts starting near the
/// origin stay clear of the boundaries until `t_end`.
pub fn domain_half_width(max_speed: f64, t_end: f64) -> f64 {
    max_speed * t_end + 10.0 * (1.0 + t_end).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler_riemann::FluidState;
    use crate::profile::ConstantBackground;

    fn gas() -> GasParams {
        GasParams::default()
    }

    fn constant_solver(n: usize) -> (Solver, Arc<ConstantBackground>) {
        let bg = Arc::new(ConstantBackground { state: FluidState::new(1.0, 0.3, 1.2), sound_speed: 1.5 });
        let grid = Grid1D::new(-20.0, 20.0, n).unwrap();
        let s = Solver::new(gas(), grid, SolverConfig::default(), Boundary::anchored(bg.clone())).unwrap();
        (s, bg)
    }

    #[test]
    fn constant_state_is_steady() {
        let (solver, bg) = constant_solver(64);
        let mut s = init(&solver.grid, bg.as_ref(), &Perturbation::none()).unwrap();
        assert!(solver.rhs(&s).unwrap().iter().all(|r| r.iter().all(|&x| x == 0.0)));
        let before = s.clone();
        let dt = solver.stable_dt(&s);
        solver.step(&mut s, dt).unwrap();
        assert_eq!(s.v, before.v);
        assert_eq!(s.theta, before.theta);
        assert_eq!(s.e, before.e);
    }

    #[test]
    fn zero_dt_is_identity() {
        let (solver, bg) = constant_solver(64);
        let mut s = init(&solver.grid, bg.as_ref(), &Perturbation::gaussian(0.01, 2.0)).unwrap();
        let before = s.clone();
        solver.step(&mut s, 0.0).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn positivity_loss_is_reported() {
        let (solver, bg) = constant_solver(64);
        let mut s = init(&solver.grid, bg.as_ref(), &Perturbation::none()).unwrap();
        s.theta[10] = -1.0;
        assert!(matches!(solver.rhs(&s), Err(SolverError::PositivityLoss { field: "theta", index: 10, .. })));
        let bad = Perturbation { shape: Shape::Gaussian, amplitudes: [-2.0, 0.0, 0.0, 0.0, 0.0], width: 1.0, center: 0.0 };
        assert!(init(&solver.grid, bg.as_ref(), &bad).is_err());
    }

    #[test]
    fn stable_dt_scalings() {
        // Quiescent state, large ε: the diffusive bound binds.
        let g = GasParams { epsilon: 100.0, ..gas() };
        let grid = Grid1D::periodic(0.0, 10.0, 64).unwrap();
        let cfg = SolverConfig::default();
        let solver = Solver::new(g, grid, cfg, Boundary::Periodic).unwrap();
        let mut s = State::zeros(64);
        s.v.fill(1.0);
        s.theta.fill(1.0);
        let h = grid.h();
        let diff = cfg.cfl_diffusive * h * h / 2.0;
        assert!((solver.stable_dt(&s) - diff).abs() < 1e-15);
        let grid2 = Grid1D::periodic(0.0, 10.0, 128).unwrap();
        let solver2 = Solver::new(g, grid2, cfg, Boundary::Periodic).unwrap();
        let mut s2 = State::zeros(128);
        s2.v.fill(1.0);
        s2.theta.fill(1.0);
        assert!((solver2.stable_dt(&s2) / solver.stable_dt(&s) - 0.25).abs() < 1e-12);

        // Stiff ε: explicit relaxation limited by ε/2, the exact split is not.
        let g = GasParams { epsilon: 1e-4, ..gas() };
        let grid = Grid1D::periodic(0.0, 10.0, 16).unwrap();
        let explicit = SolverConfig { relaxation: Relaxation::Explicit, ..cfg };
        let se = Solver::new(g, grid, explicit, Boundary::Periodic).unwrap();
        let sx = Solver::new(g, grid, cfg, Boundary::Periodic).unwrap();
        let mut s = State::zeros(16);
        s.v.fill(1.0);
        s.theta.fill(1.0);
        assert!(se.stable_dt(&s) <= 5e-5);
        assert!(sx.stable_dt(&s) > 5e-5);
    }

    #[test]
    fn structural_identity_is_exact_in_central_scheme() {
        let (solver, bg) = constant_solver(128);
        let p = Perturbation { shape: Shape::Gaussian, amplitudes: [0.02, 0.03, 0.01, 0.05, -0.04], width: 3.0, center: 1.0 };
        let s = init(&solver.grid, bg.as_ref(), &p).unwrap();
        let (lhs, flux) = solver.structural_balance(&s).unwrap();
        assert!((lhs - flux).abs() < 1e-15, "{lhs} vs {flux}");
    }

    #[test]
    fn mass_changes_only_by_boundary_flux() {
        let (solver, bg) = constant_solver(128);
        let p = Perturbation { shape: Shape::GaussianDerivative, amplitudes: [0.01; 5], width: 2.0, center: 0.0 };
        let mut s = init(&solver.grid, bg.as_ref(), &p).unwrap();
        let m0 = solver.mass(&s);
        let mut flux = 0.0;
        for _ in 0..200 {
            let dt = solver.stable_dt(&s);
            flux += solver.step(&mut s, dt).unwrap().mass_flux;
        }
        assert!((solver.mass(&s) - m0 - flux).abs() < 1e-12);
    }

    #[test]
    fn explicit_and_exponential_relaxation_agree_for_mild_stiffness() {
        let g = GasParams { epsilon: 1.0, ..gas() };
        let grid = Grid1D::periodic(0.0, 2.0 * std::f64::consts::PI, 64).unwrap();
        let mut s0 = State::zeros(64);
        for i in 0..64 {
            let x = grid.x(i);
            s0.set_node(i, [1.0 + 0.1 * x.sin(), 0.2 * x.cos(), 1.0, 0.3 * x.sin(), 0.2 * (2.0 * x).cos()]);
        }
        let mut errs = vec![];
        for dt in [4e-3, 2e-3] {
            let mut a = s0.clone();
            let mut b = s0.clone();
            let cfg = SolverConfig::default();
            Solver::new(g, grid, cfg, Boundary::Periodic).unwrap().step(&mut a, dt).unwrap();
            Solver::new(g, grid, SolverConfig { relaxation: Relaxation::Explicit, ..cfg }, Boundary::Periodic)
                .unwrap()
                .step(&mut b, dt)
                .unwrap();
            errs.push(a.e.iter().zip(&b.e).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max));
        }
        // Local error of the splitting is O(dt³).
        assert!(errs[0] / errs[1] > 6.0, "{errs:?}");
        assert!(errs[0] < 1e-6);
    }

    #[test]
    fn runs_are_deterministic() {
        let (solver, bg) = constant_solver(2048);
        let p = Perturbation::gaussian(0.01, 2.0);
        let mut a = init(&solver.grid, bg.as_ref(), &p).unwrap();
        let mut b = a.clone();
        run(&solver, &mut a, 0.5, |_, _, _| {});
        run(&solver, &mut b, 0.5, |_, _, _| {});
        assert_eq!(a, b);
        assert_eq!(a.t, 0.5);
    }

    #[test]
    fn t_end_zero_is_single_snapshot() {
        let (solver, bg) = constant_solver(64);
        let mut s = init(&solver.grid, bg.as_ref(), &Perturbation::none()).unwrap();
        let mut calls = 0;
        let out = run(&solver, &mut s, 0.0, |_, _, _| calls += 1);
        assert_eq!((out.steps, calls), (0, 1));
    }
}

/// Smooth periodic fields with the forcing that makes them exact solutions.
pub mod manufactured {
    use super::FieldFn;
    use crate::euler_riemann::GasParams;
    use std::sync::Arc;

    /// `c + a·sin(kx + wt + phase)`.
    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct Mode {
        pub c: f64,
        pub a: f64,
        pub k: f64,
        pub w: f64,
        pub phase: f64,
    }

    impl Mode {
        fn arg(&self, x: f64, t: f64) -> f64 {
            self.k * x + self.w * t + self.phase
        }
        pub fn f(&self, x: f64, t: f64) -> f64 {
            self.c + self.a * self.arg(x, t).sin()
        }
        pub fn fx(&self, x: f64, t: f64) -> f64 {
            self.a * self.k * self.arg(x, t).cos()
        }
        pub fn fxx(&self, x: f64, t: f64) -> f64 {
            -self.a * self.k * self.k * self.arg(x, t).sin()
        }
        pub fn ft(&self, x: f64, t: f64) -> f64 {
            self.a * self.w * self.arg(x, t).cos()
        }
    }

    /// Exact fields `(v, u, θ, E, b)`.
    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct Manufactured {
        pub modes: [Mode; 5],
    }

    impl Manufactured {
        /// Fields of amplitude `a` with unit wavenumber, period 2π.
        pub fn standard(a: f64) -> Self {
            let m = |c, w, phase| Mode { c, a, k: 1.0, w, phase };
            Self { modes: [m(1.0, 1.0, 0.0), m(0.0, -1.0, 0.5), m(1.0, 1.0, 1.3), m(0.0, -2.0, 0.2), m(0.0, 1.0, 2.1)] }
        }

        pub fn exact(&self, x: f64, t: f64) -> [f64; 5] {
            self.modes.map(|m| m.f(x, t))
        }

        /// `q_t - N(q)` for the continuous operator `N`.
        pub fn forcing(&self, gas: GasParams) -> Arc<FieldFn> {
            let m = self.modes;
            Arc::new(move |x, t| {
                let [v, u, th, e, b] = m.map(|q| q.f(x, t));
                let [vx, ux, thx, ex, bx] = m.map(|q| q.fx(x, t));
                let [_, uxx, thxx, _, _] = m.map(|q| q.fxx(x, t));
                let [vt, ut, tht, et, bt] = m.map(|q| q.ft(x, t));
                let GasParams { r, gamma, mu, kappa, epsilon, .. } = gas;
                let j = e + u * b;
                let p = r * th / v;
                let px = r * (thx * v - th * vx) / (v * v);
                let visc = mu * (uxx / v - ux * vx / (v * v));
                let cond = kappa * (thxx / v - thx * vx / (v * v));
                [
                    vt - ux,
                    ut + px - visc + v * j * b,
                    tht - (gamma - 1.0) / r * (-p * ux + cond + mu * ux * ux / v + v * j * j),
                    et - u / v * ex - bx / (epsilon * v) + j / epsilon,
                    bt - u / v * bx - ex / v,
                ]
            })
        }
    }
}
