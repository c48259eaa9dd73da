//! JSON report and CSV writers.

use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use lagwave_core::diagnostics::LedgerEntry;
use lagwave_core::nsm_solver::{Grid1D, State};
use lagwave_core::profile::{sample_all, Background};
use serde::Serialize;

use crate::config::Scenario;
use crate::sim::{Deviation, MassRecord, Simulation};
use crate::verify::{Check, Fit};

/// Identity residuals and running dissipation integrals at a ledger time.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityRecord {
    pub t: f64,
    pub mass_residual: f64,
    pub gradient_integral: f64,
    pub compound_integral: f64,
    pub maxwell_balance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub scenario: String,
    pub kind: String,
    /// Fully resolved configuration; feeding it back reproduces the run.
    pub params: Scenario,
    pub content_hash: String,
    pub dielectric_bound: Option<f64>,
    pub override_dielectric_bound: bool,
    pub weight_alpha: Option<f64>,
    pub steps: usize,
    pub failure: Option<String>,
    pub times: Vec<f64>,
    pub norms: Vec<LedgerEntry>,
    pub identities: Vec<IdentityRecord>,
    pub deviations: Vec<Deviation>,
    pub fits: Vec<Fit>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(s: &Scenario) -> Self {
        Self {
            scenario: s.name.clone(),
            kind: s.wave.kind().into(),
            params: s.clone(),
            content_hash: s.content_hash(),
            dielectric_bound: s.dielectric_bound().map(|b| b.value()).filter(|c| c.is_finite()),
            override_dielectric_bound: s.override_dielectric_bound,
            weight_alpha: None,
            steps: 0,
            failure: None,
            times: vec![],
            norms: vec![],
            identities: vec![],
            deviations: vec![],
            fits: vec![],
            checks: vec![],
        }
    }

    pub fn with_simulation(mut self, sim: &Simulation) -> Self {
        let l = &sim.ledger;
        let w0 = l.entries.first().map(|e| e.maxwell_energy).unwrap_or(0.0);
        self.weight_alpha = Some(sim.alpha);
        self.steps = sim.steps;
        self.failure = sim.failure.clone();
        self.times = l.times();
        self.norms = l.entries.clone();
        self.identities = l
            .entries
            .iter()
            .zip(&sim.mass)
            .enumerate()
            .map(|(k, (e, MassRecord { residual, .. }))| IdentityRecord {
                t: e.t,
                mass_residual: *residual,
                gradient_integral: l.gradient_integral[k],
                compound_integral: l.compound_integral[k],
                maxwell_balance: e.maxwell_energy - w0 + l.maxwell_dissipation_integral[k],
            })
            .collect();
        self.deviations = sim.deviations.clone();
        self
    }

    pub fn passed(&self) -> bool {
        self.failure.is_none() && self.checks.iter().all(|c| c.passed)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join("ledger.json");
        let f = std::fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = BufWriter::new(f);
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w)?;
        Ok(())
    }
}

/// `snapshots/t_<t>.csv`.
pub fn snapshot_path(dir: &Path, t: f64) -> std::path::PathBuf {
    dir.join("snapshots").join(format!("t_{t:012.4}.csv"))
}

/// `profiles/t_<t>.csv`.
pub fn profile_path(dir: &Path, t: f64) -> std::path::PathBuf {
    dir.join("profiles").join(format!("t_{t:012.4}.csv"))
}

pub fn write_snapshot(path: &Path, grid: &Grid1D, s: &State) -> Result<()> {
    std::fs::create_dir_all(path.parent().unwrap())?;
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "x,v,u,theta,E,b")?;
    for i in 0..s.len() {
        writeln!(w, "{},{},{},{},{},{}", grid.x(i), s.v[i], s.u[i], s.theta[i], s.e[i], s.b[i])?;
    }
    Ok(w.flush()?)
}

pub fn write_profile(path: &Path, xs: &[f64], t: f64, bg: &dyn Background) -> Result<()> {
    std::fs::create_dir_all(path.parent().unwrap())?;
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "x,t,V,U,Theta,Vx,Ux,Thetax")?;
    for (x, p) in xs.iter().zip(sample_all(bg, xs, t)) {
        writeln!(w, "{x},{t},{},{},{},{},{},{}", p.v, p.u, p.theta, p.v_x, p.u_x, p.theta_x)?;
    }
    Ok(w.flush()?)
}
