//! Measurements on solver states: heat-kernel weights, relative-entropy
//! energies, dielectric bounds, deviations from the background and
//! decay-exponent fits.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::euler_riemann::{FluidState, GasParams};
use crate::nsm_solver::{Grid1D, State};
use crate::numerics::linear_fit;
use crate::profile::{sample_all, Background, ProfileSample};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("degenerate series: {0}")]
    DegenerateSeries(String),
}

/// `Φ(s) = s - 1 - ln s`.
pub fn phi_entropy(s: f64) -> Result<f64, DiagnosticsError> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(DiagnosticsError::Domain(format!("phi_entropy needs s > 0, got {s}")));
    }
    // ln_1p keeps the cancellation near s = 1 harmless.
    let d = s - 1.0;
    Ok(d - d.ln_1p())
}

/// `ω = (1+t)^{-1/2} exp(-αx²/(1+t))` and its primitive `g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatKernelWeight {
    pub alpha: f64,
}

impl HeatKernelWeight {
    pub fn new(alpha: f64) -> Result<Self, DiagnosticsError> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(DiagnosticsError::Domain(format!("alpha must be positive, got {alpha}")));
        }
        Ok(Self { alpha })
    }

    /// `α = ĉ/4` from the envelope rate of a contact profile.
    pub fn from_envelope_rate(c_hat: f64) -> Result<Self, DiagnosticsError> {
        Self::new(c_hat / 4.0)
    }

    pub fn omega(&self, x: f64, t: f64) -> f64 {
        let s = 1.0 + t;
        (-self.alpha * x * x / s).exp() / s.sqrt()
    }

    pub fn omega_x(&self, x: f64, t: f64) -> f64 {
        -2.0 * self.alpha * x / (1.0 + t) * self.omega(x, t)
    }

    pub fn omega_xx(&self, x: f64, t: f64) -> f64 {
        let s = 1.0 + t;
        let a = self.alpha;
        self.omega(x, t) * (4.0 * a * a * x * x / (s * s) - 2.0 * a / s)
    }

    pub fn omega_t(&self, x: f64, t: f64) -> f64 {
        let s = 1.0 + t;
        self.omega(x, t) * (self.alpha * x * x / (s * s) - 0.5 / s)
    }

    pub fn g(&self, x: f64, t: f64) -> f64 {
        let z = (self.alpha / (1.0 + t)).sqrt() * x;
        0.5 * (std::f64::consts::PI / self.alpha).sqrt() * libm::erfc(-z)
    }

    pub fn g_t(&self, x: f64, t: f64) -> f64 {
        let s = 1.0 + t;
        let z2 = self.alpha * x * x / s;
        -0.5 * x * (-z2).exp() / s.powf(1.5)
    }

    /// `sup_x |g| = √π α^{-1/2}`.
    pub fn g_sup(&self) -> f64 {
        (std::f64::consts::PI / self.alpha).sqrt()
    }
}

/// Maximal `|ω_t - ω_xx/(4α)|` and `|4αg_t - ω_x|` over the samples,
/// from the closed-form derivatives.
pub fn weight_identities_residual(w: &HeatKernelWeight, points: &[(f64, f64)]) -> (f64, f64) {
    points.iter().fold((0.0f64, 0.0f64), |(r1, r2), &(x, t)| {
        (
            r1.max((w.omega_t(x, t) - w.omega_xx(x, t) / (4.0 * w.alpha)).abs()),
            r2.max((4.0 * w.alpha * w.g_t(x, t) - w.omega_x(x, t)).abs()),
        )
    })
}

/// Same residuals with every derivative replaced by a centered difference
/// of step `h` applied to `ω` and `g`.
pub fn weight_identities_residual_fd(w: &HeatKernelWeight, points: &[(f64, f64)], h: f64) -> (f64, f64) {
    points.iter().fold((0.0f64, 0.0f64), |(r1, r2), &(x, t)| {
        let om_t = (w.omega(x, t + h) - w.omega(x, t - h)) / (2.0 * h);
        let om_xx = (w.omega(x + h, t) - 2.0 * w.omega(x, t) + w.omega(x - h, t)) / (h * h);
        let om_x = (w.omega(x + h, t) - w.omega(x - h, t)) / (2.0 * h);
        let g_t = (w.g(x, t + h) - w.g(x, t - h)) / (2.0 * h);
        (r1.max((om_t - om_xx / (4.0 * w.alpha)).abs()), r2.max((4.0 * w.alpha * g_t - om_x).abs()))
    })
}

/// `E + ψb + Ūb` on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DissipativeCombination {
    /// Assembled as `E + (u - Ū)b + Ūb`.
    pub split: Vec<f64>,
    /// Assembled as `E + ub`.
    pub total: Vec<f64>,
    pub l2: f64,
}

pub fn dissipative_combination(s: &State, background: &[ProfileSample], h: f64) -> DissipativeCombination {
    let n = s.len();
    let mut split = Vec::with_capacity(n);
    let mut total = Vec::with_capacity(n);
    for i in 0..n {
        let ubar = background[i].u;
        split.push(s.e[i] + (s.u[i] - ubar) * s.b[i] + ubar * s.b[i]);
        total.push(s.e[i] + s.u[i] * s.b[i]);
    }
    let l2 = trapezoid_sq(&total, h).sqrt();
    DissipativeCombination { split, total, l2 }
}

fn trapezoid_sq(f: &[f64], h: f64) -> f64 {
    trapezoid_fn(f.len(), h, false, |i| f[i] * f[i])
}

/// Trapezoid rule over the nodes; on periodic grids every node has full weight.
fn trapezoid_fn(n: usize, h: f64, periodic: bool, f: impl Fn(usize) -> f64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let inner: f64 = (1..n - 1).map(&f).sum();
    let ends = if periodic { 1.0 } else { 0.5 };
    h * (inner + ends * (f(0) + f(n - 1)))
}

/// One snapshot of the energy bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub t: f64,
    /// `‖φ‖, ‖ψ‖, ‖ζ‖, ‖√ε E‖, ‖b‖` in discrete L².
    pub l2: [f64; 5],
    /// `‖(φ,ψ,ζ,√εE,b)‖` in L² and in H¹.
    pub l2_total: f64,
    pub h1_total: f64,
    /// `∫(½ψ² + RΘ̄Φ(v/V̄) + R/(γ-1) Θ̄Φ(θ/Θ̄))`.
    pub relative_entropy: f64,
    /// `∫½(εvE² + vb²)`.
    pub maxwell_energy: f64,
    /// `‖(ψ_x, ζ_x)‖²`.
    pub gradient_rate: f64,
    /// `‖E + ψb + Ūb‖²`.
    pub compound_rate: f64,
    /// `∫vE(E+ub)`; signed.
    pub maxwell_dissipation: f64,
    /// `∫(φ² + ζ² + b²)ω²`.
    pub weighted: f64,
}

/// Evaluates every ledger field for `s` against `bg` by the trapezoid rule.
pub fn energy_report(
    s: &State,
    grid: &Grid1D,
    bg: &dyn Background,
    gas: &GasParams,
    w: &HeatKernelWeight,
) -> Result<LedgerEntry, DiagnosticsError> {
    let xs = grid.points();
    let samples = sample_all(bg, &xs, s.t);
    energy_report_with(s, grid, &samples, gas, w)
}

/// [`energy_report`] with the background already sampled on the grid.
pub fn energy_report_with(
    s: &State,
    grid: &Grid1D,
    samples: &[ProfileSample],
    gas: &GasParams,
    w: &HeatKernelWeight,
) -> Result<LedgerEntry, DiagnosticsError> {
    let n = s.len();
    let h = grid.h();
    let pert: [Vec<f64>; 5] = [
        (0..n).map(|i| s.v[i] - samples[i].v).collect(),
        (0..n).map(|i| s.u[i] - samples[i].u).collect(),
        (0..n).map(|i| s.theta[i] - samples[i].theta).collect(),
        s.e.iter().map(|e| gas.epsilon.sqrt() * e).collect(),
        s.b.clone(),
    ];
    let p = grid.periodic;
    let sq = |f: &[f64]| trapezoid_fn(n, h, p, |i| f[i] * f[i]);
    let l2 = pert.clone().map(|f| sq(&f).sqrt());
    let l2_total = l2.iter().map(|x| x * x).sum::<f64>().sqrt();

    // Centered differences on interior nodes, as in the solver.
    let dx = |f: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|i| {
                if grid.periodic {
                    (f[(i + 1) % n] - f[(i + n - 1) % n]) / (2.0 * h)
                } else if i == 0 || i == n - 1 {
                    0.0
                } else {
                    (f[i + 1] - f[i - 1]) / (2.0 * h)
                }
            })
            .collect()
    };
    let grads: Vec<Vec<f64>> = pert.iter().map(|f| dx(f)).collect();
    let h1_sq: f64 = grads.iter().map(|g| sq(g)).sum();
    let h1_total = (l2_total * l2_total + h1_sq).sqrt();
    let gradient_rate = sq(&grads[1]) + sq(&grads[2]);

    let mut phi_v = Vec::with_capacity(n);
    let mut phi_t = Vec::with_capacity(n);
    for i in 0..n {
        phi_v.push(phi_entropy(s.v[i] / samples[i].v)?);
        phi_t.push(phi_entropy(s.theta[i] / samples[i].theta)?);
    }
    let relative_entropy = trapezoid_fn(n, h, p, |i| {
        0.5 * pert[1][i] * pert[1][i]
            + gas.r * samples[i].theta * phi_v[i]
            + gas.r / (gas.gamma - 1.0) * samples[i].theta * phi_t[i]
    });
    let maxwell_energy = trapezoid_fn(n, h, p, |i| 0.5 * s.v[i] * (gas.epsilon * s.e[i] * s.e[i] + s.b[i] * s.b[i]));
    let comb = dissipative_combination(s, samples, h);
    let maxwell_dissipation = trapezoid_fn(n, h, p, |i| s.v[i] * s.e[i] * comb.total[i]);
    let x0 = grid.x_min;
    let weighted = trapezoid_fn(n, h, p, |i| {
        let om = w.omega(x0 + h * i as f64, s.t);
        (pert[0][i].powi(2) + pert[2][i].powi(2) + s.b[i] * s.b[i]) * om * om
    });
    Ok(LedgerEntry {
        t: s.t,
        l2,
        l2_total,
        h1_total,
        relative_entropy,
        maxwell_energy,
        gradient_rate,
        compound_rate: sq(&comb.total),
        maxwell_dissipation,
        weighted,
    })
}

/// Ledger time series plus running time integrals of the dissipation
/// rates (trapezoid rule between consecutive observations).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyLedger {
    pub entries: Vec<LedgerEntry>,
    /// `∫₀ᵗ‖(ψ_x,ζ_x)‖²` at each entry.
    pub gradient_integral: Vec<f64>,
    /// `∫₀ᵗ‖E+ψb+Ūb‖²` at each entry.
    pub compound_integral: Vec<f64>,
    /// `∫₀ᵗ∫vE(E+ub)` at each entry.
    pub maxwell_dissipation_integral: Vec<f64>,
}

impl EnergyLedger {
    pub fn push(&mut self, e: LedgerEntry) {
        let (g, c, m) = match self.entries.last() {
            None => (0.0, 0.0, 0.0),
            Some(prev) => {
                let dt = e.t - prev.t;
                let k = self.entries.len() - 1;
                (
                    self.gradient_integral[k] + 0.5 * dt * (prev.gradient_rate + e.gradient_rate),
                    self.compound_integral[k] + 0.5 * dt * (prev.compound_rate + e.compound_rate),
                    self.maxwell_dissipation_integral[k] + 0.5 * dt * (prev.maxwell_dissipation + e.maxwell_dissipation),
                )
            }
        };
        self.gradient_integral.push(g);
        self.compound_integral.push(c);
        self.maxwell_dissipation_integral.push(m);
        self.entries.push(e);
    }

    pub fn times(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.t).collect()
    }

    /// `∫₀ᵗ‖(ψ_x, ζ_x, E+ψb+Ūb)‖²` at each entry.
    pub fn total_dissipation(&self) -> Vec<f64> {
        self.gradient_integral.iter().zip(&self.compound_integral).map(|(a, b)| a + b).collect()
    }

    /// Residual of `W(t) - W(0) + ∫₀ᵗ∫vE(E+ub)` for the Maxwell energy `W`.
    pub fn maxwell_identity_residual(&self) -> f64 {
        let Some(first) = self.entries.first() else { return 0.0 };
        self.entries
            .iter()
            .zip(&self.maxwell_dissipation_integral)
            .map(|(e, m)| (e.maxwell_energy - first.maxwell_energy + m).abs())
            .fold(0.0, f64::max)
    }

    /// Value of the running integral at time `t` (linear in between).
    pub fn integral_at(series: &[f64], times: &[f64], t: f64) -> f64 {
        match times.iter().position(|&s| s >= t) {
            None => *series.last().unwrap_or(&0.0),
            Some(0) => series[0],
            Some(k) => {
                let w = (t - times[k - 1]) / (times[k] - times[k - 1]);
                series[k - 1] + w * (series[k] - series[k - 1])
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DielectricMode {
    Contact,
    Composite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DielectricBound {
    Finite(f64),
    /// Any positive ε is admissible.
    Unbounded,
}

impl DielectricBound {
    pub fn admits(&self, epsilon: f64) -> bool {
        match *self {
            DielectricBound::Finite(c) => epsilon > 0.0 && epsilon < c,
            DielectricBound::Unbounded => epsilon > 0.0,
        }
    }

    pub fn value(&self) -> f64 {
        match *self {
            DielectricBound::Finite(c) => c,
            DielectricBound::Unbounded => f64::INFINITY,
        }
    }
}

/// Upper bound on ε under which the stability statements are proved.
///
/// Contact mode uses `u₋ = left.u` (the pattern has `u₊ = u₋`).
pub fn dielectric_bound(mode: DielectricMode, left: &FluidState, right: &FluidState, gas: &GasParams) -> DielectricBound {
    let vmin = left.v.min(right.v);
    let vmax = left.v.max(right.v);
    match mode {
        DielectricMode::Contact => {
            let u = left.u;
            if u == 0.0 {
                DielectricBound::Unbounded
            } else {
                DielectricBound::Finite(vmin / (64.0 * vmax * u * u))
            }
        }
        DielectricMode::Composite => {
            let beta = left.u.abs().max(right.u.abs());
            if beta == 0.0 {
                return DielectricBound::Unbounded;
            }
            let first = vmin / (80.0 * vmax * beta * beta);
            let speed = (gas.gamma * gas.r).sqrt() * (right.theta.sqrt() / right.v).max(left.theta.sqrt() / left.v);
            let second = 1.0 / (speed * 32.0 * vmax * beta);
            DielectricBound::Finite(first.min(second))
        }
    }
}

/// `max |v-V|, |u-U|, |θ-Θ|, |E|, |b|` against `bg.comparison`.
pub fn sup_norm_deviation(s: &State, grid: &Grid1D, bg: &dyn Background) -> [f64; 5] {
    let mut out = [0.0f64; 5];
    for i in 0..s.len() {
        let c = bg.comparison(grid.x(i), s.t);
        let d = [s.v[i] - c.v, s.u[i] - c.u, s.theta[i] - c.theta, s.e[i], s.b[i]];
        for k in 0..5 {
            out[k] = out[k].max(d[k].abs());
        }
    }
    out
}

/// Power-law fit `value ≈ C t^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub exponent: f64,
    /// Half width of the 95% confidence interval of the exponent.
    pub ci_half_width: f64,
    /// `ln C`.
    pub intercept: f64,
}

/// Least-squares slope of `ln value` against `ln t`.
pub fn decay_fit(series: &[(f64, f64)]) -> Result<DecayFit, DiagnosticsError> {
    if series.len() < 8 {
        return Err(DiagnosticsError::DegenerateSeries(format!("need at least 8 samples, got {}", series.len())));
    }
    if let Some(&(t, v)) = series.iter().find(|(t, v)| !(*t > 0.0 && *v > 0.0 && v.is_finite())) {
        return Err(DiagnosticsError::DegenerateSeries(format!("non-positive sample ({t}, {v})")));
    }
    let (tmin, tmax) = series.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &(t, _)| (a.min(t), b.max(t)));
    if tmax / tmin < 100.0 * (1.0 - 1e-12) {
        return Err(DiagnosticsError::DegenerateSeries(format!("samples span [{tmin}, {tmax}], fewer than 2 decades")));
    }
    let x: Vec<f64> = series.iter().map(|(t, _)| t.ln()).collect();
    let y: Vec<f64> = series.iter().map(|(_, v)| v.ln()).collect();
    let (slope, intercept, se) = linear_fit(&x, &y);
    let dof = (series.len() - 2) as f64;
    let quantile = StudentsT::new(0.0, 1.0, dof).map(|d| d.inverse_cdf(0.975)).unwrap_or(f64::NAN);
    Ok(DecayFit { exponent: slope, ci_half_width: quantile * se, intercept })
}
