//! Acceptance checks. Each returns a [`Check`] carrying the measured value
//! next to its threshold.

use std::f64::consts::PI;
use std::time::Instant;

use anyhow::{bail, Result};
use lagwave_core::burgers::{BurgersData, Lq};
use lagwave_core::contact_wave::{profile_l2_rates, ContactWave, ContactWaveSpec, ProfileQuantity};
use lagwave_core::diagnostics::{
    decay_fit, dielectric_bound, weight_identities_residual, DecayFit, DielectricBound, DielectricMode, EnergyLedger,
    HeatKernelWeight,
};
use lagwave_core::euler_riemann::{pressure, solve_intermediate_states, FluidState, GasParams};
use lagwave_core::nsm_solver::manufactured::Manufactured;
use lagwave_core::nsm_solver::{Boundary, Grid1D, Solver, State};
use lagwave_core::numerics::logspace;
use serde::Serialize;

use crate::config::{builtin, format_bound, ConfigError, Scenario, Wave};
use crate::sim::{self, Simulation};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub id: u32,
    pub name: String,
    pub measured: String,
    pub threshold: String,
    pub passed: bool,
    pub seconds: f64,
}

impl Check {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {}: measured {} (threshold {}) [{:.1}s]",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.measured,
            self.threshold,
            self.seconds
        )
    }
}

/// A named exponent fit for the report.
#[derive(Debug, Clone, Serialize)]
pub struct Fit {
    pub name: String,
    pub exponent: f64,
    pub ci: f64,
}

impl Fit {
    fn new(name: &str, f: &DecayFit) -> Self {
        Self { name: name.into(), exponent: f.exponent, ci: f.ci_half_width }
    }
}

fn timed<F: FnOnce() -> Result<(String, String, bool)>>(id: u32, name: &str, f: F) -> Check {
    let start = Instant::now();
    let (measured, threshold, passed) = match f() {
        Ok(r) => r,
        Err(e) => (format!("error: {e:#}"), "-".into(), false),
    };
    Check { id, name: name.into(), measured, threshold, passed, seconds: start.elapsed().as_secs_f64() }
}

fn contact_of(s: &Scenario) -> Result<ContactWave> {
    let Wave::Contact { theta_minus, theta_plus, p_plus, u_minus } = s.wave else {
        bail!("scenario `{}` is not a contact scenario", s.name)
    };
    let spec = ContactWaveSpec::new(&s.gas, theta_minus, theta_plus, p_plus, u_minus)?;
    Ok(ContactWave::new(s.gas, spec, sim::PROFILE_TOL)?)
}

/// L² decay exponents of `∂ₓθ̄` and `∂ₓū` over `[t0, t1]`.
pub fn contact_rates(wave: &ContactWave, t0: f64, t1: f64, fits: &mut Vec<Fit>) -> Check {
    timed(1, "contact-wave L2 decay rates", || {
        let times = logspace(t0, t1, 16);
        let th = profile_l2_rates(wave, ProfileQuantity::Temperature, 1, &times)?;
        let u = profile_l2_rates(wave, ProfileQuantity::Velocity, 1, &times)?;
        fits.push(Fit::new("contact_theta_x_l2", &th));
        fits.push(Fit::new("contact_u_x_l2", &u));
        let ok = (th.exponent + 0.25).abs() <= 0.03 && (u.exponent + 0.75).abs() <= 0.05;
        Ok((
            format!("theta_x {:.4}, u_x {:.4} over t in [{t0}, {t1}]", th.exponent, u.exponent),
            "-0.25 +- 0.03, -0.75 +- 0.05".into(),
            ok,
        ))
    })
}

/// Sup of `|R|` over a grid wide enough to hold the self-similar layer.
fn sup_residual(wave: &ContactWave, t: f64, pick: impl Fn(&lagwave_core::contact_wave::ContactResiduals) -> f64) -> f64 {
    let l = wave.profile.xi_max * (1.0 + t).sqrt();
    (0..=4000).map(|k| -l + 2.0 * l * k as f64 / 4000.0).map(|x| pick(&wave.residuals(x, t)).abs()).fold(0.0, f64::max)
}

/// Sup-norm decay exponents of the momentum and energy residuals.
pub fn contact_residual_rates(wave: &ContactWave, t0: f64, t1: f64, fits: &mut Vec<Fit>) -> Check {
    timed(2, "contact-wave residual decay", || {
        let times = logspace(t0, t1, 12);
        let series = |f: &dyn Fn(f64) -> f64| times.iter().map(|&t| (t, f(t))).collect::<Vec<_>>();
        let r1 = decay_fit(&series(&|t| sup_residual(wave, t, |r| r.momentum)))?;
        let r2 = decay_fit(&series(&|t| sup_residual(wave, t, |r| r.energy)))?;
        let r2_total = decay_fit(&series(&|t| sup_residual(wave, t, |r| r.energy_total_form)))?;
        fits.push(Fit::new("contact_residual_momentum_sup", &r1));
        fits.push(Fit::new("contact_residual_energy_sup", &r2));
        fits.push(Fit::new("contact_residual_energy_total_form_sup", &r2_total));
        let ok = r1.exponent <= -1.4 && r2.exponent <= -1.9 && r2_total.exponent <= -1.9;
        Ok((
            format!(
                "R1 {:.4}, R2 {:.4} (total-energy form {:.4}) over t in [{t0}, {t1}]",
                r1.exponent, r2.exponent, r2_total.exponent
            ),
            "R1 <= -1.4, R2 <= -1.9".into(),
            ok,
        ))
    })
}

/// Decay of `‖w_x‖_∞`, conservation of `‖w_x‖_1` and strict monotonicity
/// of the Burgers rarefaction.
pub fn burgers(data: BurgersData, t0: f64, t1: f64, fits: &mut Vec<Fit>) -> Check {
    timed(3, "Burgers rarefaction", || {
        let times = logspace(t0, t1, 16);
        let mut sup = vec![];
        let mut l1_err: f64 = 0.0;
        let mut strict = true;
        for &t in &times {
            sup.push((t, data.lq_norm_of_derivative(t, Lq::Infinity)?));
            l1_err = l1_err.max((data.lq_norm_of_derivative(t, Lq::Finite(1.0))? - data.strength()).abs());
            // Samples whose characteristic foot keeps tanh away from ±1 in
            // double precision.
            let (a, b) = (data.w_l * t - 15.0, data.w_r * t + 15.0);
            for k in 0..=2000 {
                let x = a + (b - a) * k as f64 / 2000.0;
                let s = data.sample(x, t);
                strict &= data.w_l < s.w && s.w < data.w_r && s.w_x > 0.0;
            }
        }
        let fit = decay_fit(&sup)?;
        fits.push(Fit::new("burgers_w_x_sup", &fit));
        let ok = (fit.exponent + 1.0).abs() <= 0.05 && l1_err <= 1e-8 && strict;
        Ok((
            format!("sup exponent {:.4}, max |L1 - (w_r - w_l)| {l1_err:.2e}, strict bounds {strict}", fit.exponent),
            "-1 +- 0.05, 1e-8, true".into(),
            ok,
        ))
    })
}

/// Weyl sequence in `[0, 1)`; deterministic stand-in for random sampling.
fn weyl(k: usize, alpha: f64) -> f64 {
    (0.5 + k as f64 * alpha).fract()
}

/// Forward-constructs `count` R1CR3 end-state pairs from known middle
/// states and inverts them.
pub fn riemann_round_trip(gas: &GasParams, count: usize) -> Check {
    timed(4, "Riemann round trip", || {
        let g = gas.gamma;
        let r = gas.r;
        let z = (g - 1.0) / (2.0 * g);
        let mut worst: f64 = 0.0;
        for k in 0..count {
            let pm = 0.2 + 1.8 * weyl(k, 0.618_033_988_749_895);
            let um = -1.0 + 2.0 * weyl(k, 0.414_213_562_373_095);
            let theta_l = 0.5 + 1.5 * weyl(k, 0.732_050_807_568_877);
            let theta_r = 0.5 + 1.5 * weyl(k, 0.236_067_977_499_79);
            let pl = pm * (1.0 + 2.0 * weyl(k, 0.162_277_660_168_379));
            let pr = pm * (1.0 + 2.0 * weyl(k, 0.316_624_790_355_4));
            let cl = (g * r * theta_l).sqrt();
            let cr = (g * r * theta_r).sqrt();
            let ul = um - 2.0 * cl / (g - 1.0) * (1.0 - (pm / pl).powf(z));
            let ur = um + 2.0 * cr / (g - 1.0) * (1.0 - (pm / pr).powf(z));
            let left = FluidState::new(r * theta_l / pl, ul, theta_l);
            let right = FluidState::new(r * theta_r / pr, ur, theta_r);
            let d = solve_intermediate_states(&left, &right, gas)?;
            worst = worst.max(((d.pm - pm) / pm).abs()).max(((d.um - um) / um.abs().max(1.0)).abs());
            debug_assert!((pressure(&left, gas) - pl).abs() < 1e-12);
        }
        Ok((format!("max relative error {worst:.2e} over {count} pairs"), "1e-8".into(), worst <= 1e-8))
    })
}

/// Heat-kernel identities on 10³ sample points and `sup|g|`.
pub fn heat_kernel(alpha: f64) -> Check {
    timed(5, "heat-kernel weight identities", || {
        let w = HeatKernelWeight::new(alpha)?;
        let mut pts = Vec::with_capacity(1000);
        for i in 0..25 {
            for j in 0..40 {
                let t = 100.0 * i as f64 / 24.0;
                let x = (-1.0 + 2.0 * j as f64 / 39.0) * 6.0 * ((1.0 + t) / alpha).sqrt();
                pts.push((x, t));
            }
        }
        let (r1, r2) = weight_identities_residual(&w, &pts);
        let mut g_err: f64 = 0.0;
        for t in [0.0, 1.0, 10.0, 100.0, 1e4] {
            let l = 10.0 * ((1.0 + t) / alpha).sqrt();
            let sup = (0..=1000).map(|k| w.g(-l + 2.0 * l * k as f64 / 1000.0, t).abs()).fold(0.0, f64::max);
            g_err = g_err.max((sup - (PI / alpha).sqrt()).abs());
        }
        let ok = r1 <= 1e-13 && r2 <= 1e-13 && g_err <= 1e-8;
        Ok((
            format!("alpha {alpha:.4}: residuals {r1:.1e}, {r2:.1e}; |sup g - sqrt(pi/alpha)| {g_err:.1e}"),
            "1e-13, 1e-13, 1e-8".into(),
            ok,
        ))
    })
}

/// Max-norm errors of the manufactured solution at `t_end` per field.
pub fn manufactured_errors(s: &Scenario, n: usize) -> Result<[f64; 5]> {
    let Wave::Convergence { amplitude, .. } = s.wave else { bail!("not a convergence scenario") };
    let grid = Grid1D::periodic(0.0, 2.0 * PI, n)?;
    let mms = Manufactured::standard(amplitude);
    let solver = Solver::new(s.gas, grid, s.solver, Boundary::Periodic)?.with_forcing(mms.forcing(s.gas));
    let mut st = State::zeros(n);
    for i in 0..n {
        st.set_node(i, mms.exact(grid.x(i), 0.0));
    }
    let t_end = s.solver.t_end;
    let out = lagwave_core::nsm_solver::run(&solver, &mut st, t_end, |_, _, _| {});
    if let Some(f) = out.failure {
        bail!("manufactured run failed: {f}");
    }
    let mut err = [0.0f64; 5];
    for i in 0..n {
        let q = mms.exact(grid.x(i), t_end);
        for (k, e) in err.iter_mut().enumerate() {
            *e = e.max((st.node(i)[k] - q[k]).abs());
        }
    }
    Ok(err)
}

/// Observed spatial orders between consecutive resolutions.
pub fn solver_order(s: &Scenario, fits: &mut Vec<Fit>) -> Check {
    timed(6, "solver spatial order", || {
        let Wave::Convergence { resolutions, .. } = &s.wave else { bail!("not a convergence scenario") };
        let errs = resolutions.iter().map(|&n| manufactured_errors(s, n)).collect::<Result<Vec<_>>>()?;
        let names = ["v", "u", "theta", "E", "b"];
        let mut min_order = f64::INFINITY;
        let mut parts = vec![];
        for k in 0..5 {
            let orders: Vec<f64> = (1..errs.len())
                .map(|j| (errs[j - 1][k] / errs[j][k]).ln() / (resolutions[j] as f64 / resolutions[j - 1] as f64).ln())
                .collect();
            let worst = orders.iter().copied().fold(f64::INFINITY, f64::min);
            min_order = min_order.min(worst);
            fits.push(Fit { name: format!("mms_order_{}", names[k]), exponent: worst, ci: 0.0 });
            parts.push(format!("{} {worst:.3}", names[k]));
        }
        Ok((format!("{} (n = {resolutions:?})", parts.join(", ")), ">= 1.9 on every field".into(), min_order >= 1.9))
    })
}

/// Runs the Maxwell-only scenario at `n` with fixed step count.
fn maxwell_run(s: &Scenario, n: usize, steps: usize) -> Result<EnergyLedger> {
    let mut s = s.clone();
    s.grid.n = n;
    let built = sim::build_background(&s)?;
    let grid = sim::grid(&s, built.background.as_ref())?;
    let w = sim::weight(&s, &built)?;
    let solver = sim::solver(&s, grid, built.background.clone())?;
    let mut st = sim::initial_state(&s, &grid, built.background.as_ref())?;
    let dt = s.solver.t_end / steps as f64;
    let mut ledger = EnergyLedger::default();
    let report = |st: &State| lagwave_core::diagnostics::energy_report(st, &grid, built.background.as_ref(), &s.gas, &w);
    ledger.push(report(&st)?);
    for k in 0..steps {
        solver.step(&mut st, dt)?;
        if k + 1 == steps {
            st.t = s.solver.t_end;
        }
        ledger.push(report(&st)?);
    }
    Ok(ledger)
}

/// Residual of the Maxwell energy identity at `(h, dt)` and `(h/2, dt/2)`.
pub fn maxwell_identity(s: &Scenario) -> Check {
    timed(7, "Maxwell energy identity", || {
        if !matches!(s.wave, Wave::MaxwellOnly { .. }) {
            bail!("not a maxwell-only scenario");
        }
        let n = s.grid.n;
        // The fine run must respect its own stability limit, which scales
        // like h² through diffusion.
        let fine = Grid1D::periodic(0.0, 2.0 * PI, 2 * n)?;
        let Wave::MaxwellOnly { state, .. } = s.wave else { unreachable!() };
        let mut st = State::zeros(2 * n);
        st.v.fill(state.v);
        st.theta.fill(state.theta);
        let probe = Solver::new(s.gas, fine, s.solver, Boundary::Periodic)?;
        let dt_fine = probe.stable_dt(&st);
        let steps_coarse = (s.solver.t_end / (2.0 * dt_fine)).ceil() as usize;
        let coarse = maxwell_run(s, n, steps_coarse)?.maxwell_identity_residual();
        let finer = maxwell_run(s, 2 * n, 2 * steps_coarse)?.maxwell_identity_residual();
        let ratio = coarse / finer;
        Ok((
            format!("residual {coarse:.3e} -> {finer:.3e}, ratio {ratio:.2} (n {n} -> {}, {steps_coarse} -> {} steps)", 2 * n, 2 * steps_coarse),
            "ratio >= 3".into(),
            ratio >= 3.0,
        ))
    })
}

pub fn mass_identity(runs: &[(&str, &Simulation)]) -> Check {
    timed(8, "mass identity", || {
        let worst = runs.iter().map(|(_, r)| r.max_mass_residual).fold(0.0, f64::max);
        let names: Vec<&str> = runs.iter().map(|(n, _)| *n).collect();
        Ok((format!("max |dM - flux|/(1+t) {worst:.2e} over runs {names:?}"), "1e-10".into(), worst <= 1e-10 && !runs.is_empty()))
    })
}

fn deviation_at(sim: &Simulation, t: f64) -> Result<&sim::Deviation> {
    sim.deviations.iter().find(|d| (d.t - t).abs() < 1e-9).ok_or_else(|| anyhow::anyhow!("no deviation recorded at t = {t}"))
}

/// Sup-norm decay to 0.2× and dissipation plateau over `[t_mid, t_end]`.
pub fn contact_stability(sim: &Simulation, t_mid: f64, t_end: f64) -> Check {
    timed(9, "contact-wave stability", || {
        if let Some(f) = &sim.failure {
            bail!("run failed: {f}");
        }
        let d0 = deviation_at(sim, 0.0)?.max();
        let d1 = deviation_at(sim, t_end)?.max();
        let total = sim.ledger.total_dissipation();
        let times = sim.ledger.times();
        let at_mid = EnergyLedger::integral_at(&total, &times, t_mid);
        let at_end = EnergyLedger::integral_at(&total, &times, t_end);
        let growth = (at_end - at_mid) / at_end;
        let ratio = d1 / d0;
        Ok((
            format!(
                "sup deviation {d0:.3e} -> {d1:.3e} (ratio {ratio:.3}); dissipation integral {at_mid:.4e} -> {at_end:.4e} (growth {:.2}%)",
                100.0 * growth
            ),
            "ratio <= 0.2, growth <= 5%".into(),
            ratio <= 0.2 && growth <= 0.05,
        ))
    })
}

/// Every field's deviation from the fan comparison decreases from `t0` to `t1`.
pub fn composite_stability(sim: &Simulation, t0: f64, t1: f64) -> Check {
    timed(10, "composite-wave stability", || {
        if let Some(f) = &sim.failure {
            bail!("run failed: {f}");
        }
        let a = deviation_at(sim, t0)?;
        let b = deviation_at(sim, t1)?;
        let ok = (0..5).all(|k| b.sup[k] < a.sup[k]);
        let fmt = |d: &sim::Deviation| d.sup.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>().join(", ");
        Ok((format!("t={t0}: [{}] -> t={t1}: [{}]", fmt(a), fmt(b)), "every field decreases".into(), ok))
    })
}

/// Closed-form bounds and enforcement of `ε < C̄` by the config loader.
pub fn dielectric_bounds() -> Check {
    timed(11, "dielectric bounds", || {
        let gas = GasParams::default();
        let one = FluidState::new(1.0, 1.0, 1.0);
        let contact = dielectric_bound(DielectricMode::Contact, &one, &one, &gas);
        let contact_ok = contact == DielectricBound::Finite(1.0 / 64.0);
        // Independent arithmetic: min{1/80, 1/(32·√γ)} with v = θ = |u| = 1.
        let composite = dielectric_bound(DielectricMode::Composite, &one, &one, &gas).value();
        let by_hand = f64::min(1.0 / 80.0, 1.0 / (32.0 * (5.0f64 / 3.0).sqrt()));
        let composite_err = (composite - by_hand).abs();
        let mut rejected = builtin::unit_contact();
        rejected.gas.epsilon = 1.0;
        let enforced = matches!(rejected.validate(), Err(ConfigError::DielectricBound { bound, .. }) if bound == 1.0 / 64.0);
        let mut accepted = builtin::unit_contact();
        accepted.gas.epsilon = 0.015;
        let admits = accepted.validate().is_ok();
        let ok = contact_ok && composite_err <= 1e-14 && enforced && admits;
        Ok((
            format!(
                "contact {}, composite |diff| {composite_err:.1e}, eps=1 rejected {enforced}, eps=0.015 accepted {admits}",
                format_bound(contact.value())
            ),
            "1/64, 1e-14, true, true".into(),
            ok,
        ))
    })
}

/// Everything the acceptance suite measures.
pub struct Acceptance {
    pub checks: Vec<Check>,
    pub fits: Vec<Fit>,
}

/// Criteria that need no long simulation.
pub fn quick_checks(fits: &mut Vec<Fit>) -> Vec<Check> {
    let gas = GasParams::default();
    let contact = builtin::contact_stability();
    let mut checks = vec![];
    match contact_of(&Scenario { wave: Wave::Contact { theta_minus: 1.0, theta_plus: 1.1, p_plus: 1.0, u_minus: 0.0 }, ..contact }) {
        Ok(wave) => {
            checks.push(contact_rates(&wave, 10.0, 1e4, fits));
            checks.push(contact_residual_rates(&wave, 10.0, 1e3, fits));
            let alpha = wave.profile.gaussian_envelope_rate().map(|c| c / 4.0).unwrap_or(0.25);
            checks.push(burgers(BurgersData::new(-1.0, 1.0), 10.0, 1e3, fits));
            checks.push(riemann_round_trip(&gas, 100));
            checks.push(heat_kernel(alpha));
        }
        Err(e) => {
            for (id, name) in [(1, "contact-wave L2 decay rates"), (2, "contact-wave residual decay")] {
                checks.push(Check { id, name: name.into(), measured: format!("error: {e:#}"), threshold: "-".into(), passed: false, seconds: 0.0 });
            }
            checks.push(burgers(BurgersData::new(-1.0, 1.0), 10.0, 1e3, fits));
            checks.push(riemann_round_trip(&gas, 100));
            checks.push(heat_kernel(0.25));
        }
    }
    checks
}

/// Runs all eleven criteria, printing each line through `report` as soon
/// as it is known.
pub fn acceptance(mut report: impl FnMut(&Check)) -> Acceptance {
    let mut fits = vec![];
    let mut checks = quick_checks(&mut fits);
    checks.iter().for_each(&mut report);

    let c6 = solver_order(&builtin::convergence(), &mut fits);
    report(&c6);
    let c7 = maxwell_identity(&builtin::maxwell_identity());
    report(&c7);

    let start = Instant::now();
    let contact = sim::simulate(&builtin::contact_stability());
    let contact_secs = start.elapsed().as_secs_f64();
    let start = Instant::now();
    let composite = sim::simulate(&builtin::composite_stability());
    let composite_secs = start.elapsed().as_secs_f64();
    let mut runs = vec![];
    if let Ok(c) = &contact {
        runs.push(("contact-stability", c));
    }
    if let Ok(c) = &composite {
        runs.push(("composite-stability", c));
    }
    let c8 = mass_identity(&runs);
    let mut c9 = match &contact {
        Ok(sim) => contact_stability(sim, 100.0, 200.0),
        Err(e) => failed(9, "contact-wave stability", e),
    };
    c9.seconds += contact_secs;
    let mut c10 = match &composite {
        Ok(sim) => composite_stability(sim, 50.0, 500.0),
        Err(e) => failed(10, "composite-wave stability", e),
    };
    c10.seconds += composite_secs;
    for c in [&c8, &c9, &c10] {
        report(c);
    }
    let c11 = dielectric_bounds();
    report(&c11);
    checks.extend([c6, c7, c8, c9, c10, c11]);
    checks.sort_by_key(|c| c.id);
    Acceptance { checks, fits }
}

fn failed(id: u32, name: &str, e: &anyhow::Error) -> Check {
    Check { id, name: name.into(), measured: format!("error: {e:#}"), threshold: "-".into(), passed: false, seconds: 0.0 }
}
