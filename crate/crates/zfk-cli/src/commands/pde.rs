//! `zfk pde`: evolve the PDE from a computed profile and fit the front speed.

use super::shoot_config;
use crate::config::FileConfig;
use crate::manifest::RunManifest;
use crate::out::{fmt_f64, write_csv};
use crate::CommonArgs;
use anyhow::Result;
use std::process::ExitCode;
use zfk::pde::{pde_run, InitialData, PdeConfig};
use zfk::shooting;

pub fn run(
    c: Option<f64>,
    eps: f64,
    force: bool,
    snapshots: bool,
    step: Option<f64>,
    common: &CommonArgs,
) -> Result<ExitCode> {
    if !(0.02..=0.1).contains(&eps) && !force {
        eprintln!(
            "usage: PDE validation covers eps in [0.02, 0.1]; pass --force for eps = {eps} \
             (the reaction layer then outgrows the default grid)"
        );
        return Ok(ExitCode::from(2));
    }
    let file = FileConfig::load(common.config.as_deref())?;
    let cfg = shoot_config(common, &file)?;

    let pde_config = PdeConfig {
        keep_snapshots: snapshots,
        ..PdeConfig::default()
    };

    // exploratory run mode: compact initial data, measured speed reported
    // without any claim that it equals cbar (speed selection is left open)
    let (c_value, track) = if let Some(position) = step {
        let track = pde_run(&pde_config, eps, InitialData::Step { position })?;
        (f64::NAN, track)
    } else {
        let c_value = match c {
            Some(v) => v,
            None => {
                let r = shooting::find_min_speed(eps, &cfg)?;
                println!("using computed minimal speed cbar({eps}) = {}", r.cbar);
                r.cbar
            }
        };
        let profile = shooting::build_profile(c_value, eps, &cfg, 30.0)?;
        (
            c_value,
            pde_run(&pde_config, eps, InitialData::Profile(&profile))?,
        )
    };

    std::fs::create_dir_all(&common.out)?;
    let rows: Vec<Vec<String>> = track
        .times
        .iter()
        .zip(track.positions.iter())
        .map(|(&t, &p)| vec![fmt_f64(t), fmt_f64(p)])
        .collect();
    let csv_path = common.out.join("fronttrack.csv");
    write_csv(&csv_path, &["time", "position"], &rows)?;

    let mut manifest = RunManifest::new("pde");
    if let Some(position) = step {
        manifest.param("step", position);
    } else {
        manifest.param("c", c_value);
    }
    manifest.param("eps", eps);
    manifest.param("force", force);
    manifest.param("half_length", pde_config.half_length);
    manifest.param("n", pde_config.n);
    manifest.param("dt", pde_config.dt);
    manifest.param("t_final", pde_config.t_final);
    manifest.param("speed_fit", track.speed_fit);
    manifest.param("fit_residual", track.fit_residual);
    manifest.param("clip_count", track.clip_count);
    manifest.param("truncated", track.truncated);
    manifest.output("fronttrack.csv");

    if snapshots {
        let dx = pde_config.dx();
        for (idx, (t, field)) in track.snapshots.iter().enumerate() {
            let name = format!("snap_{idx:04}.csv");
            let rows: Vec<Vec<String>> = field
                .iter()
                .enumerate()
                .map(|(i, &v)| vec![fmt_f64(-pde_config.half_length + i as f64 * dx), fmt_f64(v)])
                .collect();
            write_csv(&common.out.join(&name), &["x", "theta"], &rows)?;
            manifest.output(&name);
            manifest.param(&format!("snapshot_time_{idx:04}"), t);
        }
    }
    manifest.write(&common.out)?;

    if step.is_some() {
        println!(
            "front speed fit |slope| = {} (residual {}); wrote {}",
            track.speed_fit,
            track.fit_residual,
            csv_path.display()
        );
    } else {
        println!(
            "front speed fit |slope| = {} (residual {}, wave speed {}); wrote {}",
            track.speed_fit,
            track.fit_residual,
            c_value,
            csv_path.display()
        );
    }
    if track.truncated {
        eprintln!("note: run truncated when the front neared a boundary");
    }
    Ok(ExitCode::SUCCESS)
}
