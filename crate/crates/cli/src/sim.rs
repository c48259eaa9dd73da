//! Builds backgrounds and solvers from scenarios and runs them with the
//! energy ledger attached.

use std::f64::consts::PI;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use lagwave_core::composite_wave::CompositeWave;
use lagwave_core::contact_wave::{ContactWave, ContactWaveSpec};
use lagwave_core::diagnostics::{energy_report, sup_norm_deviation, EnergyLedger, HeatKernelWeight};
use lagwave_core::euler_riemann::characteristic_speeds;
use lagwave_core::nsm_solver::{domain_half_width, init, run, Boundary, Grid1D, Solver, State};
use lagwave_core::profile::{Background, ConstantBackground};

use crate::config::{Scenario, Wave};

/// Tolerance of the profile ODE solves.
pub const PROFILE_TOL: f64 = 1e-12;

/// Weight parameter when no contact layer is present.
const DEFAULT_ALPHA: f64 = 0.25;

pub struct Built {
    pub background: Arc<dyn Background>,
    pub contact: Option<ContactWave>,
    pub composite: Option<CompositeWave>,
}

pub fn build_background(s: &Scenario) -> Result<Built> {
    let gas = s.gas;
    Ok(match &s.wave {
        &Wave::Contact { theta_minus, theta_plus, p_plus, u_minus } => {
            let spec = ContactWaveSpec::new(&gas, theta_minus, theta_plus, p_plus, u_minus)?;
            let wave = ContactWave::new(gas, spec, PROFILE_TOL)?;
            Built { background: Arc::new(wave.clone()), contact: Some(wave), composite: None }
        }
        &Wave::Rarefaction { left, right } | &Wave::Composite { left, right } => {
            let wave = CompositeWave::new(gas, left, right, PROFILE_TOL)?;
            Built { background: Arc::new(wave.clone()), contact: Some(wave.contact.clone()), composite: Some(wave) }
        }
        &Wave::MaxwellOnly { state, .. } => {
            let c = characteristic_speeds(&state, &gas)[2];
            Built { background: Arc::new(ConstantBackground { state, sound_speed: c }), contact: None, composite: None }
        }
        Wave::Convergence { .. } => bail!("convergence scenarios have no background wave"),
    })
}

pub fn weight(s: &Scenario, built: &Built) -> Result<HeatKernelWeight> {
    let alpha = match (s.weight_alpha, &built.contact) {
        (Some(a), _) => a,
        (None, Some(c)) => c.profile.gaussian_envelope_rate().map(|r| r / 4.0).unwrap_or(DEFAULT_ALPHA),
        (None, None) => DEFAULT_ALPHA,
    };
    Ok(HeatKernelWeight::new(alpha)?)
}

pub fn grid(s: &Scenario, bg: &dyn Background) -> Result<Grid1D> {
    Ok(if s.wave.is_periodic() {
        Grid1D::periodic(0.0, 2.0 * PI, s.grid.n)?
    } else {
        // Maxwell waves travel at 1/(v√ε) before they are damped.
        let l = s.grid.half_width.unwrap_or_else(|| domain_half_width(bg.max_speed(), s.solver.t_end));
        Grid1D::new(-l, l, s.grid.n)?
    })
}

/// Slow root of `εs² + s + 1 = 0`.
pub fn maxwell_slow_root(epsilon: f64) -> f64 {
    (-1.0 + (1.0 - 4.0 * epsilon).sqrt()) / (2.0 * epsilon)
}

pub fn initial_state(s: &Scenario, grid: &Grid1D, bg: &dyn Background) -> Result<State> {
    let mut st = init(grid, bg, &s.perturbation)?;
    if let Wave::MaxwellOnly { amplitude, .. } = s.wave {
        let root = maxwell_slow_root(s.gas.epsilon);
        for i in 0..grid.n {
            let x = grid.x(i);
            st.e[i] += amplitude * root * x.sin();
            st.b[i] += amplitude * x.cos();
        }
    }
    Ok(st)
}

pub fn solver(s: &Scenario, grid: Grid1D, bg: Arc<dyn Background>) -> Result<Solver> {
    let boundary = if grid.periodic { Boundary::Periodic } else { Boundary::anchored(bg) };
    Ok(Solver::new(s.gas, grid, s.solver, boundary)?)
}

/// Sup-norm deviation at one output time.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Deviation {
    pub t: f64,
    /// `v, u, θ, E, b`.
    pub sup: [f64; 5],
}

impl Deviation {
    pub fn max(&self) -> f64 {
        self.sup.iter().copied().fold(0.0, f64::max)
    }
}

/// Mass-identity residual `|M(t) - M(0) - ∫ flux| / (1+t)` at one ledger time.
#[derive(Debug, Clone, serde::Serialize)]
pub struct MassRecord {
    pub t: f64,
    pub residual: f64,
}

pub struct Simulation {
    pub grid: Grid1D,
    pub ledger: EnergyLedger,
    pub deviations: Vec<Deviation>,
    /// States at the output times and every `output_stride` steps.
    pub snapshots: Vec<State>,
    pub mass: Vec<MassRecord>,
    /// Largest `|M(t) - M(0) - ∫flux| / (1+t)` over every step.
    pub max_mass_residual: f64,
    pub steps: usize,
    pub failure: Option<String>,
    pub alpha: f64,
}

pub fn simulate(s: &Scenario) -> Result<Simulation> {
    let built = build_background(s)?;
    let bg = built.background.clone();
    let grid = grid(s, bg.as_ref())?;
    let w = weight(s, &built)?;
    let solver = solver(s, grid, bg.clone())?;
    let mut state = initial_state(s, &grid, bg.as_ref()).context("initial state")?;

    let m0 = solver.mass(&state);
    let mut flux = 0.0;
    let mut max_mass: f64 = 0.0;
    let mut ledger = EnergyLedger::default();
    let mut mass = vec![];
    let mut deviations = vec![];
    let mut snapshots = vec![];
    let mut steps = 0;
    let mut failure = None;
    let mut err: Option<anyhow::Error> = None;

    for (k, &t_out) in s.output_times().iter().enumerate() {
        let offset = steps;
        let stride = s.solver.output_stride;
        let out = run(&solver, &mut state, t_out, |st, report, step| {
            if step > 0 && (offset + step) % stride == 0 && st.t < t_out {
                snapshots.push(st.clone());
            }
            flux += report.mass_flux;
            let r = (solver.mass(st) - m0 - flux).abs() / (1.0 + st.t);
            max_mass = max_mass.max(r);
            let due = match ledger.entries.last() {
                None => true,
                Some(last) => st.t > last.t && (st.t - last.t >= s.ledger_interval || st.t == t_out),
            };
            if due && err.is_none() {
                match energy_report(st, &grid, bg.as_ref(), &s.gas, &w) {
                    Ok(e) => {
                        ledger.push(e);
                        mass.push(MassRecord { t: st.t, residual: r });
                    }
                    Err(e) => err = Some(e.into()),
                }
            }
        });
        if let Some(e) = err.take() {
            return Err(e);
        }
        steps += out.steps;
        if let Some(f) = out.failure {
            failure = Some(f.to_string());
            break;
        }
        debug_assert!(k == 0 || state.t == t_out);
        deviations.push(Deviation { t: state.t, sup: sup_norm_deviation(&state, &grid, bg.as_ref()) });
        snapshots.push(state.clone());
    }
    Ok(Simulation {
        grid,
        ledger,
        deviations,
        snapshots,
        mass,
        max_mass_residual: max_mass,
        steps,
        failure,
        alpha: w.alpha,
    })
}
