//! Scenario files, simulation driver, reports and the acceptance suite
//! behind the `lagwave` binary.

pub mod commands;
pub mod config;
pub mod report;
pub mod sim;
pub mod verify;

/// Caps the global worker pool at `LAGWAVE_THREADS` when set.
pub fn init_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("LAGWAVE_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| anyhow::anyhow!("LAGWAVE_THREADS must be a positive integer, got `{v}`"))?;
        if n == 0 {
            anyhow::bail!("LAGWAVE_THREADS must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}
