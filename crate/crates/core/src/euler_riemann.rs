//! Polytropic thermodynamics, characteristic speeds and the
//! rarefaction-contact-rarefaction (R1CR3) Riemann decomposition of the
//! inviscid Lagrangian Euler system.
//!
//! Pressure is `p = R θ / v`; the entropy is
//! `s = R/(γ-1) ln(Rθ/A) + R ln v`, so that `p = A v^{-γ} exp((γ-1)s/R)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::monotone_root;

/// Rarefactions whose specific-volume jump is below this are zero-strength.
pub const DEGENERATE_JUMP: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RiemannError {
    #[error("invalid gas parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("invalid fluid state: v = {v}, theta = {theta}")]
    InvalidState { v: f64, theta: f64 },
    #[error("target volume {target} lies on the compressive side of the anchor volume {anchor}")]
    CompressiveTarget { anchor: f64, target: f64 },
    #[error("no R1CR3 decomposition: {0}")]
    NoR1CR3Solution(String),
}

/// Physical constants of the gas and the Maxwell coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GasParams {
    /// Gas constant `R`.
    pub r: f64,
    /// Adiabatic exponent `γ`.
    pub gamma: f64,
    /// Total viscosity `λ + 2μ'`.
    pub mu: f64,
    /// Heat conductivity `κ`.
    pub kappa: f64,
    /// Dielectric constant `ε`.
    pub epsilon: f64,
    /// Entropy reference constant `A`.
    pub entropy_ref: f64,
}

impl Default for GasParams {
    fn default() -> Self {
        Self { r: 1.0, gamma: 5.0 / 3.0, mu: 1.0, kappa: 1.0, epsilon: 0.01, entropy_ref: 1.0 }
    }
}

impl GasParams {
    pub fn validate(&self) -> Result<(), RiemannError> {
        let checks = [
            ("r", self.r, self.r > 0.0),
            ("gamma", self.gamma, self.gamma > 1.0),
            ("mu", self.mu, self.mu > 0.0),
            ("kappa", self.kappa, self.kappa > 0.0),
            ("epsilon", self.epsilon, self.epsilon > 0.0),
            ("entropy_ref", self.entropy_ref, self.entropy_ref > 0.0),
        ];
        for (name, value, ok) in checks {
            if !ok || !value.is_finite() {
                return Err(RiemannError::InvalidParameter { name, value });
            }
        }
        Ok(())
    }
}

/// Specific volume, velocity and temperature at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluidState {
    pub v: f64,
    pub u: f64,
    pub theta: f64,
}

impl FluidState {
    pub const fn new(v: f64, u: f64, theta: f64) -> Self {
        Self { v, u, theta }
    }

    pub fn validate(&self) -> Result<(), RiemannError> {
        if self.v > 0.0 && self.theta > 0.0 && self.v.is_finite() && self.theta.is_finite() && self.u.is_finite() {
            Ok(())
        } else {
            Err(RiemannError::InvalidState { v: self.v, theta: self.theta })
        }
    }
}

pub fn pressure(s: &FluidState, p: &GasParams) -> f64 {
    p.r * s.theta / s.v
}

pub fn entropy(s: &FluidState, p: &GasParams) -> f64 {
    p.r / (p.gamma - 1.0) * (p.r * s.theta / p.entropy_ref).ln() + p.r * s.v.ln()
}

/// `(λ₁, λ₂, λ₃) = (-√(γp/v), 0, √(γp/v))`.
pub fn characteristic_speeds(s: &FluidState, p: &GasParams) -> [f64; 3] {
    let c = (p.gamma * pressure(s, p) / s.v).sqrt();
    [-c, 0.0, c]
}

/// Genuinely nonlinear family carrying a rarefaction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    /// 1-family, `λ₋ < 0`.
    One,
    /// 3-family, `λ₊ > 0`.
    Three,
}

impl Family {
    pub fn sign(self) -> f64 {
        match self {
            Family::One => -1.0,
            Family::Three => 1.0,
        }
    }
}

/// `λ±(v, s) = ±√(Aγ v^{-γ-1} e^{(γ-1)s/R})`.
pub fn lambda(v: f64, s: f64, family: Family, p: &GasParams) -> f64 {
    family.sign() * (p.entropy_ref * p.gamma * v.powf(-p.gamma - 1.0) * ((p.gamma - 1.0) * s / p.r).exp()).sqrt()
}

/// Inverse of [`lambda`] at fixed entropy: the volume where `λ(v, s) = w`.
pub fn volume_for_speed(w: f64, s: f64, p: &GasParams) -> f64 {
    let k = p.entropy_ref * p.gamma * ((p.gamma - 1.0) * s / p.r).exp();
    (k / (w * w)).powf(1.0 / (p.gamma + 1.0))
}

/// Temperature on the isentrope through `anchor` at volume `v`.
pub fn isentrope_temperature(anchor: &FluidState, v: f64, p: &GasParams) -> f64 {
    anchor.theta * (anchor.v / v).powf(p.gamma - 1.0)
}

/// Velocity on the rarefaction curve of `family` through `anchor`,
/// `u = u_a - ∫_{v_a}^{v} λ(η, s_a) dη`, evaluated in closed form.
pub fn rarefaction_curve_velocity(
    anchor: &FluidState,
    family: Family,
    target_v: f64,
    p: &GasParams,
) -> Result<f64, RiemannError> {
    anchor.validate()?;
    if !(target_v >= anchor.v) {
        return Err(RiemannError::CompressiveTarget { anchor: anchor.v, target: target_v });
    }
    Ok(curve_velocity_unchecked(anchor, family, target_v, p))
}

pub(crate) fn curve_velocity_unchecked(anchor: &FluidState, family: Family, v: f64, p: &GasParams) -> f64 {
    let g1 = p.gamma - 1.0;
    let c = (p.gamma * p.r * anchor.theta).sqrt();
    anchor.u + family.sign() * 2.0 * c / g1 * ((v / anchor.v).powf(-0.5 * g1) - 1.0)
}

/// Full state at volume `target_v` on the rarefaction curve through `anchor`.
pub fn curve_state(
    anchor: &FluidState,
    family: Family,
    target_v: f64,
    p: &GasParams,
) -> Result<FluidState, RiemannError> {
    let u = rarefaction_curve_velocity(anchor, family, target_v, p)?;
    Ok(FluidState::new(target_v, u, isentrope_temperature(anchor, target_v, p)))
}

/// Intermediate states of the R1CR3 pattern.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiemannDecomposition {
    pub vm_minus: f64,
    pub vm_plus: f64,
    pub um: f64,
    pub thetam_minus: f64,
    pub thetam_plus: f64,
    pub pm: f64,
}

impl RiemannDecomposition {
    pub fn middle_minus(&self) -> FluidState {
        FluidState::new(self.vm_minus, self.um, self.thetam_minus)
    }

    pub fn middle_plus(&self) -> FluidState {
        FluidState::new(self.vm_plus, self.um, self.thetam_plus)
    }
}

/// Velocity reached from `anchor` along its rarefaction curve when the
/// pressure has dropped to `pm`, and its derivative in `pm`.
fn velocity_at_pressure(anchor: &FluidState, family: Family, pm: f64, p: &GasParams) -> (f64, f64) {
    let pa = pressure(anchor, p);
    let g1 = p.gamma - 1.0;
    let z = g1 / (2.0 * p.gamma);
    let c = (p.gamma * p.r * anchor.theta).sqrt();
    let ratio = (pm / pa).powf(z);
    // 1-family: u = u_- + 2c/(γ-1)(1 - (p/p_-)^z); 3-family mirrored.
    let s = -family.sign();
    let u = anchor.u + s * 2.0 * c / g1 * (1.0 - ratio);
    let du = -s * 2.0 * c / g1 * z * ratio / pm;
    (u, du)
}

/// Finds the intermediate states connecting `left` to `right` by a
/// 1-rarefaction, a contact discontinuity and a 3-rarefaction.
pub fn solve_intermediate_states(
    left: &FluidState,
    right: &FluidState,
    p: &GasParams,
) -> Result<RiemannDecomposition, RiemannError> {
    p.validate()?;
    left.validate()?;
    right.validate()?;
    let p_left = pressure(left, p);
    let p_right = pressure(right, p);
    let p_cap = p_left.min(p_right);

    // g(pm) = u₃(pm) - u₁(pm) is increasing in pm.
    let g = |pm: f64| velocity_at_pressure(right, Family::Three, pm, p).0 - velocity_at_pressure(left, Family::One, pm, p).0;
    let dg = |pm: f64| velocity_at_pressure(right, Family::Three, pm, p).1 - velocity_at_pressure(left, Family::One, pm, p).1;

    let pm = if g(p_cap).abs() <= 1e-14 {
        p_cap
    } else {
        let lo = p_cap * 1e-12;
        if g(lo) >= 0.0 {
            return Err(RiemannError::NoR1CR3Solution("end states are separated by vacuum".into()));
        }
        if g(p_cap) < 0.0 {
            return Err(RiemannError::NoR1CR3Solution(format!(
                "velocity mismatch {:.3e} at p = min(p-, p+) = {p_cap:.6}: a compressive wave is required",
                g(p_cap)
            )));
        }
        // Bisection first to get a tight bracket, Newton polishes.
        let mut a = lo;
        let mut b = p_cap;
        for _ in 0..60 {
            let m = (a * b).sqrt();
            if g(m) < 0.0 {
                a = m;
            } else {
                b = m;
            }
            if b / a < 1.0 + 1e-3 {
                break;
            }
        }
        monotone_root(g, dg, a, b, 1e-16)
            .map_err(|e| RiemannError::NoR1CR3Solution(format!("root find failed: {e}")))?
    };

    let residual = g(pm);
    if residual.abs() > 1e-12 {
        return Err(RiemannError::NoR1CR3Solution(format!("velocity match residual {residual:.3e}")));
    }

    let snap = |vm: f64, v: f64| if (vm - v).abs() < DEGENERATE_JUMP { v } else { vm };
    let vm_minus = snap(left.v * (p_left / pm).powf(1.0 / p.gamma), left.v);
    let vm_plus = snap(right.v * (p_right / pm).powf(1.0 / p.gamma), right.v);
    if vm_minus < left.v || vm_plus < right.v {
        return Err(RiemannError::NoR1CR3Solution("recovered waves are not both expansive".into()));
    }
    let um = if vm_minus == left.v {
        left.u
    } else if vm_plus == right.v {
        right.u
    } else {
        0.5 * (velocity_at_pressure(left, Family::One, pm, p).0 + velocity_at_pressure(right, Family::Three, pm, p).0)
    };
    Ok(RiemannDecomposition {
        vm_minus,
        vm_plus,
        um,
        thetam_minus: isentrope_temperature(left, vm_minus, p),
        thetam_plus: isentrope_temperature(right, vm_plus, p),
        pm,
    })
}
