//! `zfk speed`: the minimal wave speed over a list of eps values.

use super::{effective_jobs, shoot_config};
use crate::config::FileConfig;
use crate::manifest::RunManifest;
use crate::out::{csv_safe, fmt_f64, write_csv};
use crate::CommonArgs;
use anyhow::{Context, Result};
use std::process::ExitCode;
use zfk::asymptotics;
use zfk::shooting;

const HEADER: [&str; 7] = [
    "eps",
    "cbar",
    "cbar_linear",
    "gap_residual",
    "iterations",
    "slope",
    "error",
];

pub fn run(eps_list: &[f64], common: &CommonArgs) -> Result<ExitCode> {
    let file = FileConfig::load(common.config.as_deref())?;
    let cfg = shoot_config(common, &file)?;
    let jobs = effective_jobs(common, &file)?;

    for &eps in eps_list {
        if !(eps > 0.0 && eps <= 0.1) {
            eprintln!("usage: eps values must lie in (0, 0.1], got {eps}");
            return Ok(ExitCode::from(2));
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .context("building worker pool")?;
    // rows computed in input order regardless of the worker count
    let rows: Vec<Vec<String>> = pool.install(|| {
        use rayon::prelude::*;
        eps_list
            .par_iter()
            .map(|&eps| match shooting::find_min_speed(eps, &cfg) {
                Ok(r) => vec![
                    fmt_f64(eps),
                    fmt_f64(r.cbar),
                    fmt_f64(asymptotics::cbar_linear(eps)),
                    fmt_f64(r.gap_at_root),
                    r.bracket_history.len().to_string(),
                    fmt_f64((r.cbar - 1.0) / eps),
                    String::new(),
                ],
                Err(e) => vec![
                    fmt_f64(eps),
                    String::new(),
                    fmt_f64(asymptotics::cbar_linear(eps)),
                    String::new(),
                    String::new(),
                    String::new(),
                    csv_safe(&e.to_string()),
                ],
            })
            .collect()
    });

    std::fs::create_dir_all(&common.out)?;
    let csv_path = common.out.join("speed.csv");
    write_csv(&csv_path, &HEADER, &rows)?;

    let mut manifest = RunManifest::new("speed");
    manifest.param("eps", eps_list);
    manifest.param("root_tol", cfg.root_tol);
    manifest.param("theta_match", cfg.theta_match);
    manifest.param("jobs", jobs);
    manifest.output("speed.csv");
    manifest.write(&common.out)?;

    let failures = rows.iter().filter(|r| !r[6].is_empty()).count();
    for row in &rows {
        if row[6].is_empty() {
            println!("eps = {:<8} cbar = {}", row[0], row[1]);
        } else {
            println!("eps = {:<8} failed: {}", row[0], row[6]);
        }
    }
    println!("wrote {}", csv_path.display());
    Ok(if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
