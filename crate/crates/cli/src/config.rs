//! Versioned JSON scenario files.

use std::path::{Path, PathBuf};

use lagwave_core::diagnostics::{dielectric_bound, DielectricBound, DielectricMode};
use lagwave_core::euler_riemann::{pressure, FluidState, GasParams};
use lagwave_core::nsm_solver::{Perturbation, Relaxation, Shape, SolverConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("unsupported schema version {found}, expected {SCHEMA_VERSION}")]
    Version { found: u32 },
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error(
        "epsilon = {epsilon} violates the dielectric bound: need epsilon < C̄ = {} \
         (pass --override-dielectric-bound to run anyway)",
        format_bound(*bound)
    )]
    DielectricBound { epsilon: f64, bound: f64 },
}

/// `0.015625 (= 1/64)` when the reciprocal is an integer.
pub fn format_bound(c: f64) -> String {
    if !c.is_finite() {
        return "unbounded".into();
    }
    let inv = 1.0 / c;
    if (inv - inv.round()).abs() < 1e-9 * inv {
        format!("{c} (= 1/{})", inv.round() as u64)
    } else {
        format!("{c}")
    }
}

/// Background wave pattern of a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Wave {
    /// Viscous contact wave at pressure `p_plus` moving with `u_minus`.
    Contact {
        theta_minus: f64,
        theta_plus: f64,
        p_plus: f64,
        #[serde(default)]
        u_minus: f64,
    },
    /// End states joined by 1- and 3-rarefactions only.
    Rarefaction { left: FluidState, right: FluidState },
    /// End states joined by a 1-rarefaction, contact wave and 3-rarefaction.
    Composite { left: FluidState, right: FluidState },
    /// Quiescent gas on a 2π-periodic domain carrying a damped Maxwell mode
    /// `b = a·cos x`, `E = a·s·sin x` with `s` the slow root of `εs² + s + 1 = 0`.
    MaxwellOnly { state: FluidState, amplitude: f64 },
    /// Manufactured-solution refinement study on a 2π-periodic domain.
    Convergence { amplitude: f64, resolutions: Vec<usize> },
}

impl Wave {
    pub fn kind(&self) -> &'static str {
        match self {
            Wave::Contact { .. } => "contact",
            Wave::Rarefaction { .. } => "rarefaction",
            Wave::Composite { .. } => "composite",
            Wave::MaxwellOnly { .. } => "maxwell-only",
            Wave::Convergence { .. } => "convergence",
        }
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self, Wave::MaxwellOnly { .. } | Wave::Convergence { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    /// Domain is `[-half_width, half_width]`; chosen from the wave speeds
    /// and `t_end` when absent.
    pub half_width: Option<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { n: 4096, half_width: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: u32,
    pub name: String,
    pub wave: Wave,
    #[serde(default)]
    pub gas: GasParams,
    #[serde(default = "Perturbation::none")]
    pub perturbation: Perturbation,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub grid: GridSpec,
    /// Times at which snapshots, profiles and deviations are recorded, in
    /// addition to `0` and `t_end`.
    #[serde(default)]
    pub checkpoints: Vec<f64>,
    /// Minimum time between ledger entries; `0` records every step.
    #[serde(default)]
    pub ledger_interval: f64,
    /// Heat-kernel weight parameter; taken from the contact profile's
    /// Gaussian envelope when absent.
    #[serde(default)]
    pub weight_alpha: Option<f64>,
    #[serde(default)]
    pub override_dielectric_bound: bool,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl Scenario {
    pub fn new(name: &str, wave: Wave) -> Self {
        Self {
            version: SCHEMA_VERSION,
            name: name.into(),
            wave,
            gas: GasParams::default(),
            perturbation: Perturbation::none(),
            solver: SolverConfig::default(),
            grid: GridSpec::default(),
            checkpoints: vec![],
            ledger_interval: 0.0,
            weight_alpha: None,
            override_dielectric_bound: false,
            output_dir: default_output_dir(),
        }
    }

    /// `(left, right)` far-field states.
    pub fn end_states(&self) -> Option<(FluidState, FluidState)> {
        let r = self.gas.r;
        match self.wave {
            Wave::Contact { theta_minus, theta_plus, p_plus, u_minus } => Some((
                FluidState::new(r * theta_minus / p_plus, u_minus, theta_minus),
                FluidState::new(r * theta_plus / p_plus, u_minus, theta_plus),
            )),
            Wave::Rarefaction { left, right } | Wave::Composite { left, right } => Some((left, right)),
            Wave::MaxwellOnly { state, .. } => Some((state, state)),
            Wave::Convergence { .. } => None,
        }
    }

    pub fn dielectric_mode(&self) -> Option<DielectricMode> {
        match self.wave {
            Wave::Contact { .. } | Wave::MaxwellOnly { .. } => Some(DielectricMode::Contact),
            Wave::Rarefaction { .. } | Wave::Composite { .. } => Some(DielectricMode::Composite),
            Wave::Convergence { .. } => None,
        }
    }

    pub fn dielectric_bound(&self) -> Option<DielectricBound> {
        let mode = self.dielectric_mode()?;
        let (l, r) = self.end_states()?;
        Some(dielectric_bound(mode, &l, &r, &self.gas))
    }

    /// Checkpoint times including `0` and `t_end`, sorted and deduplicated.
    pub fn output_times(&self) -> Vec<f64> {
        let mut t: Vec<f64> = std::iter::once(0.0)
            .chain(self.checkpoints.iter().copied())
            .chain(std::iter::once(self.solver.t_end))
            .collect();
        t.sort_by(f64::total_cmp);
        t.dedup();
        t
    }

    /// Structural checks; the dielectric bound is checked separately.
    pub fn validate_structure(&self) -> Result<(), ConfigError> {
        if self.version != SCHEMA_VERSION {
            return Err(ConfigError::Version { found: self.version });
        }
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        self.gas.validate().map_err(|e| ConfigError::Invalid(format!("gas: {e}")))?;
        self.solver.validate().map_err(|e| ConfigError::Invalid(format!("solver: {e}")))?;
        if self.grid.n < 16 {
            return invalid(format!("grid.n = {} must be at least 16", self.grid.n));
        }
        if let Some(w) = self.grid.half_width {
            if !(w > 0.0) {
                return invalid(format!("grid.half_width = {w} must be positive"));
            }
        }
        if !(self.ledger_interval >= 0.0) {
            return invalid(format!("ledger_interval = {} must be nonnegative", self.ledger_interval));
        }
        if let Some(a) = self.weight_alpha {
            if !(a > 0.0) {
                return invalid(format!("weight_alpha = {a} must be positive"));
            }
        }
        if let Some(&t) = self.checkpoints.iter().find(|&&t| !(t >= 0.0 && t <= self.solver.t_end)) {
            return invalid(format!("checkpoint {t} outside [0, t_end = {}]", self.solver.t_end));
        }
        if !(self.perturbation.width > 0.0) || self.perturbation.amplitudes.iter().any(|a| !a.is_finite()) {
            return invalid("perturbation needs a positive width and finite amplitudes".into());
        }
        match &self.wave {
            Wave::Contact { theta_minus, theta_plus, p_plus, u_minus } => {
                if !(*theta_minus > 0.0 && *theta_plus > 0.0 && *p_plus > 0.0 && u_minus.is_finite()) {
                    return invalid("contact wave needs positive theta_minus, theta_plus, p_plus".into());
                }
            }
            Wave::Rarefaction { left, right } | Wave::Composite { left, right } => {
                for (name, s) in [("left", left), ("right", right)] {
                    s.validate().map_err(|e| ConfigError::Invalid(format!("wave.{name}: {e}")))?;
                }
                if let Wave::Rarefaction { .. } = self.wave {
                    let (pl, pr) = (pressure(left, &self.gas), pressure(right, &self.gas));
                    let sl = lagwave_core::euler_riemann::entropy(left, &self.gas);
                    let sr = lagwave_core::euler_riemann::entropy(right, &self.gas);
                    if (sl - sr).abs() > 1e-9 * (1.0 + sl.abs()) {
                        return invalid(format!(
                            "rarefaction end states need equal entropy (got {sl} and {sr}, pressures {pl} and {pr}); use kind = composite"
                        ));
                    }
                }
            }
            Wave::MaxwellOnly { state, amplitude } => {
                state.validate().map_err(|e| ConfigError::Invalid(format!("wave.state: {e}")))?;
                if state.u != 0.0 || !amplitude.is_finite() {
                    return invalid("maxwell-only needs u = 0 and a finite amplitude".into());
                }
                if 4.0 * self.gas.epsilon >= 1.0 {
                    return invalid("maxwell-only needs epsilon < 1/4 so the slow mode is real".into());
                }
            }
            Wave::Convergence { amplitude, resolutions } => {
                if resolutions.len() < 2 || resolutions.iter().any(|&n| n < 16) || !(amplitude.abs() < 0.5) {
                    return invalid("convergence needs at least two resolutions >= 16 and |amplitude| < 0.5".into());
                }
            }
        }
        Ok(())
    }

    /// Full validation, including `ε < C̄` unless overridden.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.validate_structure()?;
        if self.override_dielectric_bound {
            return Ok(());
        }
        match self.dielectric_bound() {
            Some(b) if !b.admits(self.gas.epsilon) => {
                Err(ConfigError::DielectricBound { epsilon: self.gas.epsilon, bound: b.value() })
            }
            _ => Ok(()),
        }
    }

    /// SHA-256 of the canonical JSON form of the resolved scenario.
    pub fn content_hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("scenario serializes");
        hex::encode(Sha256::digest(bytes))
    }
}

/// Deserializes without validating.
pub fn parse_config_str_unchecked(text: &str) -> Result<Scenario, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de)
        .map_err(|e| ConfigError::Schema { path: e.path().to_string(), message: e.inner().to_string() })
}

pub fn parse_config_str(text: &str) -> Result<Scenario, ConfigError> {
    let s = parse_config_str_unchecked(text)?;
    s.validate()?;
    Ok(s)
}

pub fn read_config(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_owned(), source })
}

pub fn parse_config(path: &Path) -> Result<Scenario, ConfigError> {
    parse_config_str(&read_config(path)?)
}

/// Pretty JSON with every default spelled out.
pub fn to_json(s: &Scenario) -> String {
    serde_json::to_string_pretty(s).expect("scenario serializes") + "\n"
}

pub fn write_config(s: &Scenario, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, to_json(s))
}

/// Scenarios behind the acceptance suite.
pub mod builtin {
    use super::*;

    /// Temperature jump 0.1 across a contact wave at unit pressure, moving
    /// with `u₋ = 0.5` and carrying a small Gaussian perturbation in every
    /// field.
    pub fn contact_stability() -> Scenario {
        let mut s = Scenario::new(
            "contact-stability",
            Wave::Contact { theta_minus: 1.0, theta_plus: 1.1, p_plus: 1.0, u_minus: 0.5 },
        );
        s.gas.epsilon = 0.01;
        s.perturbation = Perturbation { shape: Shape::Gaussian, amplitudes: [0.01; 5], width: 2.0, center: 0.0 };
        s.solver.t_end = 200.0;
        s.grid = GridSpec { n: 4096, half_width: Some(300.0) };
        s.checkpoints = vec![50.0, 100.0, 150.0];
        s.output_dir = PathBuf::from("out/contact-stability");
        s
    }

    /// R1CR3 pattern with a weak 1-rarefaction, a contact of strength 0.1
    /// and a 3-rarefaction back to unit pressure.
    pub fn composite_stability() -> Scenario {
        let gas = GasParams { epsilon: 0.1, ..GasParams::default() };
        let (left, right) = composite_end_states(&gas);
        let mut s = Scenario::new("composite-stability", Wave::Composite { left, right });
        s.gas = gas;
        s.perturbation = Perturbation { shape: Shape::Gaussian, amplitudes: [0.01; 5], width: 2.0, center: 0.0 };
        s.solver.t_end = 500.0;
        s.grid = GridSpec { n: 8192, half_width: Some(900.0) };
        s.checkpoints = vec![50.0, 100.0, 200.0];
        s.ledger_interval = 0.5;
        s.output_dir = PathBuf::from("out/composite-stability");
        s
    }

    /// End states `(left, right)` with `θ₊ - θ₋ = 0.1`: left `(1, u₋, 1)`,
    /// middle pressure 0.9, contact raising θ by 0.1 relative to the
    /// left end, and a 3-rarefaction up to `p₊ = 1`.
    pub fn composite_end_states(gas: &GasParams) -> (FluidState, FluidState) {
        let g = gas.gamma;
        let r = gas.r;
        let z = (g - 1.0) / (2.0 * g);
        let (pl, pm, pr) = (1.0, 0.9, 1.0);
        let left_theta = 1.0;
        let right_theta = left_theta + 0.1;
        let vl = r * left_theta / pl;
        let vr = r * right_theta / pr;
        // Middle velocity zero; solve both rarefaction curves outward.
        let cl = (g * r * left_theta).sqrt();
        let cr = (g * r * right_theta).sqrt();
        let ul = -2.0 * cl / (g - 1.0) * (1.0 - (pm / pl).powf(z));
        let ur = 2.0 * cr / (g - 1.0) * (1.0 - (pm / pr).powf(z));
        (FluidState::new(vl, ul, left_theta), FluidState::new(vr, ur, right_theta))
    }

    /// Periodic quiescent gas carrying a damped Maxwell mode.
    pub fn maxwell_identity() -> Scenario {
        let mut s = Scenario::new(
            "maxwell-identity",
            Wave::MaxwellOnly { state: FluidState::new(1.0, 0.0, 1.0), amplitude: 0.01 },
        );
        s.gas.epsilon = 0.1;
        s.grid.n = 64;
        s.solver.t_end = 1.0;
        s.output_dir = PathBuf::from("out/maxwell-identity");
        s
    }

    pub fn convergence() -> Scenario {
        let mut s = Scenario::new("convergence", Wave::Convergence { amplitude: 0.1, resolutions: vec![512, 1024, 2048] });
        s.gas.epsilon = 1.0;
        s.solver.t_end = 0.05;
        s.solver.relaxation = Relaxation::Explicit;
        s.output_dir = PathBuf::from("out/convergence");
        s
    }

    /// Contact data with `v± = 1`, `u₋ = 1`, whose dielectric bound is 1/64.
    pub fn unit_contact() -> Scenario {
        let mut s =
            Scenario::new("unit-contact", Wave::Contact { theta_minus: 1.0, theta_plus: 1.0, p_plus: 1.0, u_minus: 1.0 });
        s.output_dir = PathBuf::from("out/unit-contact");
        s
    }

    pub fn all() -> Vec<Scenario> {
        vec![contact_stability(), composite_stability(), maxwell_identity(), convergence(), unit_contact()]
    }
}
