//! `zfk portrait`: phase-portrait data files for one `(c, eps)`.

use super::shoot_config;
use crate::config::FileConfig;
use crate::manifest::RunManifest;
use crate::out::{fmt_f64, write_csv};
use crate::CommonArgs;
use anyhow::Result;
use std::process::ExitCode;
use zfk::asymptotics::SlowSeries;
use zfk::charts;
use zfk::model::{self, Params, PhasePoint};
use zfk::shooting;

pub fn run(c: f64, eps: f64, common: &CommonArgs) -> Result<ExitCode> {
    let file = FileConfig::load(common.config.as_deref())?;
    let cfg = shoot_config(common, &file)?;
    let params = Params::new(c, eps)?;
    std::fs::create_dir_all(&common.out)?;
    let mut manifest = RunManifest::new("portrait");
    manifest.param("c", c);
    manifest.param("eps", eps);
    manifest.param("theta_match", cfg.theta_match);

    // stable manifold of the burnt state
    let ws = shooting::stable_manifold_trace(params, &cfg)?;
    let rows: Vec<Vec<String>> = ws
        .iter()
        .map(|&(t, e)| vec![fmt_f64(t), fmt_f64(e)])
        .collect();
    write_csv(&common.out.join("ws_pplus.csv"), &["theta", "eta"], &rows)?;
    manifest.output("ws_pplus.csv");

    // strong unstable manifold of the unburnt state, continued past theta = 1
    let theta_stop = 1.0 + 3.0 * eps.max(0.02);
    let wu = shooting::unstable_manifold_trace(params, &cfg, theta_stop)?;
    let rows: Vec<Vec<String>> = wu
        .iter()
        .map(|&(t, e)| vec![fmt_f64(t), fmt_f64(e)])
        .collect();
    write_csv(
        &common.out.join("strong_unstable.csv"),
        &["theta", "eta"],
        &rows,
    )?;
    manifest.output("strong_unstable.csv");

    // Hamiltonian separatrices in the rescaled chart
    let rows: Vec<Vec<String>> = (0..=560)
        .map(|i| {
            let theta2 = -12.0 + 14.0 * i as f64 / 560.0;
            vec![
                fmt_f64(theta2),
                fmt_f64(charts::separatrix_hs(theta2)),
                fmt_f64(charts::separatrix_hu(theta2)),
            ]
        })
        .collect();
    write_csv(
        &common.out.join("separatrix.csv"),
        &["theta2", "hs", "hu"],
        &rows,
    )?;
    manifest.output("separatrix.csv");

    // slow-manifold graph (eps > 0 only; empty file otherwise)
    let mut rows: Vec<Vec<String>> = Vec::new();
    if eps > 0.0 {
        let series = SlowSeries::build(c, 3)?;
        let cap = 1.0 - 10.0 * eps;
        let n = 200;
        for i in 0..=n {
            let theta = cap * i as f64 / n as f64;
            if let Ok(v) = series.eta(theta, eps) {
                rows.push(vec![fmt_f64(theta), fmt_f64(v.eta), fmt_f64(v.last_term)]);
            }
        }
    }
    write_csv(
        &common.out.join("slow_manifold.csv"),
        &["theta", "eta", "last_term"],
        &rows,
    )?;
    manifest.output("slow_manifold.csv");

    // normalised vector field on a grid, including theta > 1
    let mut rows: Vec<Vec<String>> = Vec::new();
    let theta_max = 1.0 + (3.0 * eps).max(0.1);
    for i in 0..=30 {
        let theta = theta_max * i as f64 / 30.0;
        for j in 0..=24 {
            let eta = -0.2 + 1.4 * j as f64 / 24.0;
            match model::normalized_vector_field(PhasePoint::new(theta, eta), params) {
                Ok((dt, de)) => {
                    rows.push(vec![fmt_f64(theta), fmt_f64(eta), fmt_f64(dt), fmt_f64(de)])
                }
                Err(_) => continue, // the switching line at eps = 0
            }
        }
    }
    write_csv(
        &common.out.join("field_grid.csv"),
        &["theta", "eta", "dtheta", "deta"],
        &rows,
    )?;
    manifest.output("field_grid.csv");

    manifest.write(&common.out)?;
    println!(
        "portrait data for (c, eps) = ({c}, {eps}) written to {}",
        common.out.display()
    );
    Ok(ExitCode::SUCCESS)
}
