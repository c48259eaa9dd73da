//! Subcommand implementations. Each returns whether all requested checks
//! passed.

use std::io::BufWriter;
use std::path::Path;

use anyhow::{bail, Result};
use lagwave_core::contact_wave::write_selfsimilar_csv;

use crate::config::{format_bound, Scenario, Wave};
use crate::report::{profile_path, snapshot_path, write_profile, write_snapshot, Report};
use crate::sim;
use crate::verify::{self, Check};

/// Background profiles at every output time.
pub fn profile(s: &Scenario, out: &Path) -> Result<bool> {
    let built = sim::build_background(s)?;
    let grid = sim::grid(s, built.background.as_ref())?;
    let xs = grid.points();
    let dir = out.join("profiles");
    for t in s.output_times() {
        let path = profile_path(out, t);
        write_profile(&path, &xs, t, built.background.as_ref())?;
        println!("wrote {}", path.display());
    }
    if let Some(c) = &built.contact {
        let path = dir.join("selfsimilar.csv");
        write_selfsimilar_csv(BufWriter::new(std::fs::File::create(&path)?), &c.profile)?;
        println!("wrote {}", path.display());
    }
    let mut report = Report::new(s);
    if let Some(c) = &built.contact {
        report.weight_alpha = c.profile.gaussian_envelope_rate().map(|r| r / 4.0);
    }
    report.write(out)?;
    Ok(true)
}

/// Runs the scenario, writing snapshots and the ledger. Passes when the
/// run completes and the mass identity holds.
pub fn simulate(s: &Scenario, out: &Path) -> Result<bool> {
    let result = sim::simulate(s)?;
    for st in &result.snapshots {
        write_snapshot(&snapshot_path(out, st.t), &result.grid, st)?;
    }
    let mut report = Report::new(s).with_simulation(&result);
    report.checks.push(verify::mass_identity(&[(s.name.as_str(), &result)]));
    print_checks(&report.checks);
    if let Some(f) = &result.failure {
        eprintln!("simulation stopped: {f}");
    }
    report.write(out)?;
    println!("{} steps; report in {}", result.steps, out.join("ledger.json").display());
    Ok(report.passed())
}

fn print_checks(checks: &[Check]) {
    for c in checks {
        println!("{}", c.line());
    }
}

/// Kind-specific acceptance checks on the scenario's own parameters.
pub fn verify(s: &Scenario, out: &Path) -> Result<bool> {
    let mut report = Report::new(s);
    let mut fits = vec![];
    let t_end = s.solver.t_end;
    match &s.wave {
        Wave::Contact { .. } => {
            let built = sim::build_background(s)?;
            let wave = built.contact.clone().expect("contact background");
            report.checks.push(verify::contact_rates(&wave, 10.0, 1e4, &mut fits));
            report.checks.push(verify::contact_residual_rates(&wave, 10.0, 1e3, &mut fits));
            report.checks.push(verify::heat_kernel(sim::weight(s, &built)?.alpha));
            let result = sim::simulate(s)?;
            report.checks.push(verify::mass_identity(&[(s.name.as_str(), &result)]));
            report.checks.push(verify::contact_stability(&result, t_end / 2.0, t_end));
            report = report.with_simulation(&result);
        }
        Wave::Rarefaction { .. } | Wave::Composite { .. } => {
            let built = sim::build_background(s)?;
            let comp = built.composite.clone().expect("composite background");
            report.checks.push(verify::burgers(comp.rare_minus.burgers, 10.0, 1e3, &mut fits));
            report.checks.push(verify::riemann_round_trip(&s.gas, 100));
            let result = sim::simulate(s)?;
            report.checks.push(verify::mass_identity(&[(s.name.as_str(), &result)]));
            let t0 = s.checkpoints.iter().copied().find(|&t| t > 0.0).unwrap_or(t_end / 10.0);
            report.checks.push(verify::composite_stability(&result, t0, t_end));
            report = report.with_simulation(&result);
        }
        Wave::MaxwellOnly { .. } => {
            report.checks.push(verify::maxwell_identity(s));
            let result = sim::simulate(s)?;
            report.checks.push(verify::mass_identity(&[(s.name.as_str(), &result)]));
            report = report.with_simulation(&result);
        }
        Wave::Convergence { .. } => report.checks.push(verify::solver_order(s, &mut fits)),
    }
    report.checks.push(verify::dielectric_bounds());
    report.fits = fits;
    print_checks(&report.checks);
    report.write(out)?;
    Ok(report.passed())
}

/// Manufactured-solution refinement study.
pub fn convergence(s: &Scenario, out: &Path) -> Result<bool> {
    let Wave::Convergence { resolutions, .. } = &s.wave else {
        bail!("`convergence` needs a scenario of kind convergence, got {}", s.wave.kind())
    };
    for &n in resolutions {
        let e = verify::manufactured_errors(s, n)?;
        println!("n = {n:6}: max errors v {:.3e} u {:.3e} theta {:.3e} E {:.3e} b {:.3e}", e[0], e[1], e[2], e[3], e[4]);
    }
    let mut report = Report::new(s);
    report.checks.push(verify::solver_order(s, &mut report.fits));
    print_checks(&report.checks);
    report.write(out)?;
    Ok(report.passed())
}

/// Dielectric bound and step-size limits at `t = 0`. Passes when ε is
/// admissible.
pub fn bounds(s: &Scenario) -> Result<bool> {
    let admissible = match s.dielectric_bound() {
        Some(b) => {
            println!("dielectric bound C̄ = {}", format_bound(b.value()));
            println!("epsilon = {} ({})", s.gas.epsilon, if b.admits(s.gas.epsilon) { "admissible" } else { "NOT admissible" });
            b.admits(s.gas.epsilon)
        }
        None => {
            println!("dielectric bound: not applicable to {} scenarios", s.wave.kind());
            true
        }
    };
    if !matches!(s.wave, Wave::Convergence { .. }) {
        let built = sim::build_background(s)?;
        let grid = sim::grid(s, built.background.as_ref())?;
        let solver = sim::solver(s, grid, built.background.clone())?;
        let st = sim::initial_state(s, &grid, built.background.as_ref())?;
        println!("grid: n = {}, h = {}, [{}, {}]", grid.n, grid.h(), grid.x_min, grid.x_max);
        println!("stable dt at t = 0: {}", solver.stable_dt(&st));
    }
    if s.override_dielectric_bound && !admissible {
        println!("dielectric bound overridden");
        return Ok(true);
    }
    Ok(admissible)
}
