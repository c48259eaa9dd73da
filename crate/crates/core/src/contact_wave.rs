//! Viscous contact wave.
//!
//! At constant pressure `p₊` the temperature of the contact layer obeys the
//! nonlinear diffusion equation `θ_t = a (θ_x / θ)_x`, whose self-similar
//! solution `Θ(ξ)`, `ξ = x/√(1+t)`, satisfies `-(ξ/2) Θ' = a (Θ'/Θ)'`.
//! The profile is `v̄ = Rθ̄/p₊`, `ū = u₋ + κ(γ-1)/(γR) · θ̄_x/θ̄`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagnostics::{decay_fit, DecayFit, DiagnosticsError};
use std::io::Write;

use crate::euler_riemann::{FluidState, GasParams};
use crate::profile::{Background, ProfileSample};
use crate::numerics::{dopri5, linear_fit, trapezoid, NumericsError};

/// Below this strength the profile is the constant state.
pub const ZERO_STRENGTH: f64 = 1e-14;
/// Default number of nodes of the `ξ` table.
pub const DEFAULT_NODES: usize = 4097;
/// Minimum half-width of the `ξ` table.
pub const MIN_XI_MAX: f64 = 12.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContactError {
    #[error("invalid contact data: {0}")]
    InvalidSpec(String),
    #[error("shooting diverged after {iterations} iterations (boundary mismatch {mismatch:.3e})")]
    ShootingDiverged { iterations: usize, mismatch: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// `a = κ p₊ (γ-1) / (γ R²)`.
pub fn diffusion_coefficient(p: &GasParams, p_plus: f64) -> f64 {
    p.kappa * p_plus * (p.gamma - 1.0) / (p.gamma * p.r * p.r)
}

/// Far-field data of a contact wave.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactWaveSpec {
    pub theta_minus: f64,
    pub theta_plus: f64,
    pub p_plus: f64,
    pub u_minus: f64,
    pub a: f64,
    pub delta: f64,
}

impl ContactWaveSpec {
    pub fn new(gas: &GasParams, theta_minus: f64, theta_plus: f64, p_plus: f64, u_minus: f64) -> Result<Self, ContactError> {
        if !(theta_minus > 0.0 && theta_plus > 0.0 && p_plus > 0.0) {
            return Err(ContactError::InvalidSpec(format!(
                "theta_minus={theta_minus}, theta_plus={theta_plus}, p_plus={p_plus} must be positive"
            )));
        }
        Ok(Self {
            theta_minus,
            theta_plus,
            p_plus,
            u_minus,
            a: diffusion_coefficient(gas, p_plus),
            delta: (theta_plus - theta_minus).abs(),
        })
    }

    pub fn v_minus(&self, gas: &GasParams) -> f64 {
        gas.r * self.theta_minus / self.p_plus
    }

    pub fn v_plus(&self, gas: &GasParams) -> f64 {
        gas.r * self.theta_plus / self.p_plus
    }
}

/// `Θ` and derivatives at one `ξ`, together with derivatives of `ln Θ`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ThetaJet {
    pub theta: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    /// `(ln Θ)'`
    pub l1: f64,
    /// `(ln Θ)''`
    pub l2: f64,
    /// `(ln Θ)'''`
    pub l3: f64,
}

/// Tabulated self-similar temperature profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfSimilarProfile {
    pub a: f64,
    pub theta_minus: f64,
    pub theta_plus: f64,
    pub xi_max: f64,
    pub xi: Vec<f64>,
    pub theta: Vec<f64>,
    pub dtheta: Vec<f64>,
    ddtheta: Vec<f64>,
    /// `|Θ(±Ξ) - θ±|`, max over both ends.
    pub boundary_mismatch: f64,
    /// Max collocated ODE residual at the table nodes.
    pub ode_residual: f64,
}

impl SelfSimilarProfile {
    fn constant(a: f64, theta0: f64, nodes: usize) -> Self {
        let xi_max = MIN_XI_MAX;
        let xi = uniform(xi_max, nodes);
        let n = xi.len();
        Self {
            a,
            theta_minus: theta0,
            theta_plus: theta0,
            xi_max,
            xi,
            theta: vec![theta0; n],
            dtheta: vec![0.0; n],
            ddtheta: vec![0.0; n],
            boundary_mismatch: 0.0,
            ode_residual: 0.0,
        }
    }

    fn spacing(&self) -> f64 {
        self.xi[1] - self.xi[0]
    }

    /// `Θ''` from the ODE: `Θ'' = Θ'²/Θ - ξ Θ Θ'/(2a)`.
    fn second_from_ode(&self, xi: f64, th: f64, d1: f64) -> f64 {
        d1 * d1 / th - xi * th * d1 / (2.0 * self.a)
    }

    /// Cubic Hermite interpolation of `Θ` (from `Θ, Θ'`) and `Θ'`
    /// (from `Θ', Θ''`); higher derivatives follow from the ODE.
    pub fn eval(&self, xi: f64) -> ThetaJet {
        if xi <= -self.xi_max || xi >= self.xi_max {
            let theta = if xi < 0.0 { self.theta_minus } else { self.theta_plus };
            return ThetaJet { theta, ..Default::default() };
        }
        let h = self.spacing();
        let pos = (xi + self.xi_max) / h;
        let i = (pos.floor() as usize).min(self.xi.len() - 2);
        let s = pos - i as f64;
        // h00 + h01 = 1; the increment form reproduces flat data exactly.
        let (_, h10, h01, h11) = hermite_basis(s);
        let theta = self.theta[i]
            + h01 * (self.theta[i + 1] - self.theta[i])
            + h * (h10 * self.dtheta[i] + h11 * self.dtheta[i + 1]);
        let d1 = self.dtheta[i]
            + h01 * (self.dtheta[i + 1] - self.dtheta[i])
            + h * (h10 * self.ddtheta[i] + h11 * self.ddtheta[i + 1]);
        let a = self.a;
        let l1 = d1 / theta;
        let l2 = -xi * d1 / (2.0 * a);
        let d2 = theta * (l2 + l1 * l1);
        let l3 = -(d1 + xi * d2) / (2.0 * a);
        let d3 = d1 * (l2 + l1 * l1) + theta * (l3 + 2.0 * l1 * l2);
        ThetaJet { theta, d1, d2, d3, l1, l2, l3 }
    }

    /// Rate `ĉ` of the Gaussian envelope `|Θ'(ξ)| ~ e^{-ĉ ξ²}`, fitted on
    /// both tails; the smaller rate is returned. `None` for a flat profile.
    pub fn gaussian_envelope_rate(&self) -> Option<f64> {
        let peak = self.dtheta.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        if peak == 0.0 {
            return None;
        }
        let mut rate = f64::INFINITY;
        for side in [-1.0, 1.0] {
            let (xs, ys): (Vec<f64>, Vec<f64>) = self
                .xi
                .iter()
                .zip(&self.dtheta)
                .filter(|(x, d)| **x * side > 0.0 && d.abs() < 1e-3 * peak && d.abs() > 1e-12 * peak)
                .map(|(x, d)| (x * x, d.abs().ln()))
                .unzip();
            if xs.len() >= 8 {
                rate = rate.min(-linear_fit(&xs, &ys).0);
            }
        }
        rate.is_finite().then_some(rate)
    }
}

fn hermite_basis(s: f64) -> (f64, f64, f64, f64) {
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0, s3 - 2.0 * s2 + s, -2.0 * s3 + 3.0 * s2, s3 - s2)
}

fn uniform(xi_max: f64, nodes: usize) -> Vec<f64> {
    let nodes = nodes.max(17) | 1;
    (0..nodes).map(|i| -xi_max + 2.0 * xi_max * i as f64 / (nodes - 1) as f64).collect()
}

/// Solves the self-similar boundary value problem by two-sided shooting
/// from `ξ = 0` on `(ln Θ(0), (ln Θ)'(0))`.
pub fn solve_selfsimilar(spec: &ContactWaveSpec, tol: f64) -> Result<SelfSimilarProfile, ContactError> {
    solve_selfsimilar_with(spec, tol, DEFAULT_NODES)
}

pub fn solve_selfsimilar_with(spec: &ContactWaveSpec, tol: f64, nodes: usize) -> Result<SelfSimilarProfile, ContactError> {
    let a = spec.a;
    if !(a > 0.0) {
        return Err(ContactError::InvalidSpec(format!("diffusion coefficient a={a} must be positive")));
    }
    if spec.delta < ZERO_STRENGTH {
        return Ok(SelfSimilarProfile::constant(a, spec.theta_minus, nodes));
    }
    let (tm, tp) = (spec.theta_minus, spec.theta_plus);
    // Tails decay like exp(-θ ξ²/(4a)); keep at least ~e^{-36} at the ends.
    let xi_max = MIN_XI_MAX.max(12.0 * (a / tm.min(tp)).sqrt());
    let ode_tol = (tol * 1e-3).clamp(1e-14, 1e-10);

    // State (y, z) with y = ln Θ, z = y'.
    let rhs = |xi: f64, s: [f64; 2]| [s[1], -xi / (2.0 * a) * s[0].exp() * s[1]];
    let shoot = |y0: f64, z0: f64| -> Result<[f64; 2], NumericsError> {
        let mut h = 0.05;
        let right = dopri5(&rhs, 0.0, [y0, z0], xi_max, &mut h, ode_tol)?;
        let mut h = 0.05;
        let left = dopri5(&rhs, 0.0, [y0, z0], -xi_max, &mut h, ode_tol)?;
        Ok([right[0] - tp.ln(), left[0] - tm.ln()])
    };

    // Linearised guess: z = c·exp(-θ̂ξ²/(4a)) with ∫z = ln(θ₊/θ₋).
    let theta_hat = 0.5 * (tm + tp);
    let mut y0 = theta_hat.ln();
    let mut z0 = (tp / tm).ln() / (4.0 * std::f64::consts::PI * a / theta_hat).sqrt();
    let mut mismatch = f64::INFINITY;
    const MAX_ITER: usize = 60;
    let mut iterations = 0;
    for it in 0..MAX_ITER {
        iterations = it + 1;
        let r = shoot(y0, z0)?;
        mismatch = r[0].abs().max(r[1].abs());
        if mismatch <= 0.1 * tol {
            break;
        }
        // Secant-type Jacobian from one-sided differences.
        let dy = 1e-7 * (1.0 + y0.abs());
        let dz = 1e-7 * (1.0 + z0.abs());
        let ry = shoot(y0 + dy, z0)?;
        let rz = shoot(y0, z0 + dz)?;
        let j = [[(ry[0] - r[0]) / dy, (rz[0] - r[0]) / dz], [(ry[1] - r[1]) / dy, (rz[1] - r[1]) / dz]];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if !det.is_finite() || det == 0.0 {
            return Err(ContactError::ShootingDiverged { iterations, mismatch });
        }
        let sy = (j[1][1] * r[0] - j[0][1] * r[1]) / det;
        let sz = (-j[1][0] * r[0] + j[0][0] * r[1]) / det;
        // Damp large steps so Θ stays in a sane range.
        let scale = (0.5 / sy.abs().max(1e-300)).min(1.0);
        y0 -= sy * scale;
        z0 -= sz * scale;
        if !y0.is_finite() || !z0.is_finite() {
            return Err(ContactError::ShootingDiverged { iterations, mismatch });
        }
    }
    if !(mismatch <= tol) {
        return Err(ContactError::ShootingDiverged { iterations, mismatch });
    }

    // Fill the table node to node from ξ = 0 outwards.
    let xi = uniform(xi_max, nodes);
    let n = xi.len();
    let mid = n / 2;
    let mut y = vec![0.0; n];
    let mut z = vec![0.0; n];
    y[mid] = y0;
    z[mid] = z0;
    let mut h = xi[1] - xi[0];
    for i in mid..n - 1 {
        let s = dopri5(&rhs, xi[i], [y[i], z[i]], xi[i + 1], &mut h, ode_tol)?;
        y[i + 1] = s[0];
        z[i + 1] = s[1];
    }
    let mut h = xi[1] - xi[0];
    for i in (1..=mid).rev() {
        let s = dopri5(&rhs, xi[i], [y[i], z[i]], xi[i - 1], &mut h, ode_tol)?;
        y[i - 1] = s[0];
        z[i - 1] = s[1];
    }
    let theta: Vec<f64> = y.iter().map(|v| v.exp()).collect();
    let dtheta: Vec<f64> = theta.iter().zip(&z).map(|(t, z)| t * z).collect();
    let mut prof = SelfSimilarProfile {
        a,
        theta_minus: tm,
        theta_plus: tp,
        xi_max,
        xi,
        theta,
        dtheta,
        ddtheta: vec![0.0; n],
        boundary_mismatch: (y[n - 1].exp() - tp).abs().max((y[0].exp() - tm).abs()),
        ode_residual: 0.0,
    };
    for i in 0..n {
        prof.ddtheta[i] = prof.second_from_ode(prof.xi[i], prof.theta[i], prof.dtheta[i]);
    }
    // Collocated residual: 5-point derivative of the integrated Θ' against
    // the ODE value of Θ''.
    let hh = prof.spacing();
    prof.ode_residual = (2..n - 2)
        .map(|i| {
            let d = &prof.dtheta;
            let fd = (-d[i + 2] + 8.0 * d[i + 1] - 8.0 * d[i - 1] + d[i - 2]) / (12.0 * hh);
            (fd - prof.ddtheta[i]).abs()
        })
        .fold(0.0, f64::max);
    Ok(prof)
}

/// Residuals left by substituting the profile into the Navier-Stokes
/// momentum and internal-energy equations.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ContactResiduals {
    /// `ū_t + p̄_x - μ(ū_x/v̄)_x`
    pub momentum: f64,
    /// `R/(γ-1) θ̄_t + p₊ū_x - κ(θ̄_x/v̄)_x - μ ū_x²/v̄`
    pub energy: f64,
    /// Energy residual in the kinetic-energy-augmented form,
    /// `(ū - u₋)·momentum + energy`.
    pub energy_total_form: f64,
}

/// A solved viscous contact wave.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactWave {
    pub gas: GasParams,
    pub spec: ContactWaveSpec,
    pub profile: SelfSimilarProfile,
}

impl ContactWave {
    pub fn new(gas: GasParams, spec: ContactWaveSpec, tol: f64) -> Result<Self, ContactError> {
        let profile = solve_selfsimilar(&spec, tol)?;
        Ok(Self { gas, spec, profile })
    }

    /// `κ(γ-1)/(γR)`
    pub fn velocity_coefficient(&self) -> f64 {
        let g = &self.gas;
        g.kappa * (g.gamma - 1.0) / (g.gamma * g.r)
    }

    pub fn sample(&self, x: f64, t: f64) -> ProfileSample {
        let s = (1.0 + t).sqrt();
        let xi = x / s;
        let j = self.profile.eval(xi);
        let rp = self.gas.r / self.spec.p_plus;
        let cu = self.velocity_coefficient();
        let theta_x = j.d1 / s;
        let theta_t = -xi * j.d1 / (2.0 * s * s);
        ProfileSample {
            v: rp * j.theta,
            u: self.spec.u_minus + cu * j.l1 / s,
            theta: j.theta,
            v_x: rp * theta_x,
            u_x: cu * j.l2 / (s * s),
            theta_x,
            theta_xx: j.d2 / (s * s),
            v_t: rp * theta_t,
            u_t: -cu * (xi * j.l2 + j.l1) / (2.0 * s * s * s),
            theta_t,
        }
    }

    pub fn residuals(&self, x: f64, t: f64) -> ContactResiduals {
        let g = &self.gas;
        let s = (1.0 + t).sqrt();
        let xi = x / s;
        let j = self.profile.eval(xi);
        let cu = self.velocity_coefficient();
        let pp = self.spec.p_plus;
        let s3 = s * s * s;
        let u_t = -cu * (xi * j.l2 + j.l1) / (2.0 * s3);
        // (ū_x / v̄)_x with ū_x/v̄ = cu·p₊/(R s²)·(ln Θ)''/Θ.
        let flux_x = cu * pp / (g.r * s3) * (j.l3 * j.theta - j.l2 * j.d1) / (j.theta * j.theta);
        let momentum = u_t - g.mu * flux_x;
        let u_x = cu * j.l2 / (s * s);
        let v = g.r * j.theta / pp;
        // The diffusion terms cancel identically at constant pressure,
        // leaving only viscous heating.
        let energy = -g.mu * u_x * u_x / v;
        let du = cu * j.l1 / s;
        ContactResiduals { momentum, energy, energy_total_form: du * momentum + energy }
    }
}

impl Background for ContactWave {
    fn sample(&self, x: f64, t: f64) -> ProfileSample {
        ContactWave::sample(self, x, t)
    }

    fn far_field(&self) -> (FluidState, FluidState) {
        let s = &self.spec;
        (
            FluidState::new(s.v_minus(&self.gas), s.u_minus, s.theta_minus),
            FluidState::new(s.v_plus(&self.gas), s.u_minus, s.theta_plus),
        )
    }

    fn max_speed(&self) -> f64 {
        let s = &self.spec;
        (self.gas.gamma * s.p_plus / s.v_minus(&self.gas).min(s.v_plus(&self.gas))).sqrt()
    }
}

/// Writes the `ξ` table as CSV with columns `xi,theta,dtheta`.
pub fn write_selfsimilar_csv<W: Write>(mut out: W, prof: &SelfSimilarProfile) -> std::io::Result<()> {
    writeln!(out, "xi,theta,dtheta")?;
    for ((x, t), d) in prof.xi.iter().zip(&prof.theta).zip(&prof.dtheta) {
        writeln!(out, "{x:.17e},{t:.17e},{d:.17e}")?;
    }
    Ok(())
}

/// Which spatial derivative norm to measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileQuantity {
    Volume,
    Velocity,
    Temperature,
}

impl ContactWave {
    /// `‖∂_x^k f(·, t)‖_{L²}` by the trapezoid rule on an `x` grid that
    /// resolves the layer.
    pub fn derivative_l2_norm(&self, q: ProfileQuantity, k: usize, t: f64) -> f64 {
        let s = (1.0 + t).sqrt();
        let half = self.profile.xi_max * s;
        let n = 8193;
        let h = 2.0 * half / (n - 1) as f64;
        let cu = self.velocity_coefficient();
        let rp = self.gas.r / self.spec.p_plus;
        let vals: Vec<f64> = (0..n)
            .map(|i| {
                let x = -half + h * i as f64;
                let j = self.profile.eval(x / s);
                let d = match (q, k) {
                    (ProfileQuantity::Temperature, 1) => j.d1 / s,
                    (ProfileQuantity::Temperature, 2) => j.d2 / (s * s),
                    (ProfileQuantity::Volume, 1) => rp * j.d1 / s,
                    (ProfileQuantity::Volume, 2) => rp * j.d2 / (s * s),
                    (ProfileQuantity::Velocity, 1) => cu * j.l2 / (s * s),
                    (ProfileQuantity::Velocity, 2) => cu * j.l3 / (s * s * s),
                    _ => panic!("derivative order {k} is not supported"),
                };
                d * d
            })
            .collect();
        trapezoid(&vals, h).sqrt()
    }
}

/// Log-log decay exponent of `‖∂_x^k q‖_{L²}` over `times`.
pub fn profile_l2_rates(
    wave: &ContactWave,
    q: ProfileQuantity,
    k: usize,
    times: &[f64],
) -> Result<DecayFit, DiagnosticsError> {
    assert!((1..=2).contains(&k), "derivative order must be 1 or 2");
    let series: Vec<(f64, f64)> = times.iter().map(|&t| (t, wave.derivative_l2_norm(q, k, t))).collect();
    decay_fit(&series)
}
