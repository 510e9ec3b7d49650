use crate::config::{resolve, FileConfig};
use crate::CommonArgs;
use anyhow::Result;
use zfk::shooting::ShootConfig;

pub mod pde;
pub mod portrait;
pub mod profile;
pub mod series;
pub mod speed;
pub mod verify;

/// Materialise the shooting configuration from flags, config file, defaults.
pub fn shoot_config(common: &CommonArgs, file: &FileConfig) -> Result<ShootConfig> {
    let mut cfg = ShootConfig::default();
    cfg.root_tol = resolve(common.tol, file.get_f64("tol")?, cfg.root_tol);
    cfg.theta_match = resolve(common.theta, file.get_f64("theta")?, cfg.theta_match);
    Ok(cfg)
}

pub fn effective_jobs(common: &CommonArgs, file: &FileConfig) -> Result<usize> {
    let jobs = if common.jobs != 1 {
        common.jobs
    } else {
        resolve(None, file.get_usize("jobs")?, 1)
    };
    Ok(jobs.max(1))
}
