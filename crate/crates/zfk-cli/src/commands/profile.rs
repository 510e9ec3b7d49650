//! `zfk profile`: one wave profile as a `z,theta,eta,segment` table.

use super::shoot_config;
use crate::config::FileConfig;
use crate::manifest::RunManifest;
use crate::out::{fmt_f64, write_csv};
use crate::CommonArgs;
use anyhow::Result;
use std::process::ExitCode;
use zfk::shooting::{self, ShootError};

pub fn run(
    c: Option<f64>,
    eps: f64,
    zspan: f64,
    force: bool,
    common: &CommonArgs,
) -> Result<ExitCode> {
    let file = FileConfig::load(common.config.as_deref())?;
    let cfg = shoot_config(common, &file)?;

    let (c_value, cbar) = match c {
        Some(v) => (v, None),
        None => {
            let r = shooting::find_min_speed(eps, &cfg)?;
            println!("using computed minimal speed cbar({eps}) = {}", r.cbar);
            (r.cbar, Some(r.cbar))
        }
    };

    let profile = match shooting::build_profile(c_value, eps, &cfg, zspan) {
        Ok(p) => p,
        Err(ShootError::NoConnection { c, gap }) if force => {
            eprintln!(
                "warning: no connection at c = {c} (gap = {gap:.3e}); --force builds the stable-manifold trace anyway"
            );
            let forced = shooting::ShootConfig {
                root_tol: f64::MAX,
                ..cfg.clone()
            };
            shooting::build_profile(c_value, eps, &forced, zspan)?
        }
        Err(ShootError::NoConnection { c, gap }) => {
            eprintln!("no heteroclinic connection at c = {c}: gap = {gap:.3e} < 0 (pass --force to build anyway)");
            return Ok(ExitCode::from(1));
        }
        Err(e) => return Err(e.into()),
    };

    let rows: Vec<Vec<String>> = (0..profile.len())
        .map(|i| {
            vec![
                fmt_f64(profile.z[i]),
                fmt_f64(profile.theta[i]),
                fmt_f64(profile.eta[i]),
                profile.segments[i].as_str().to_string(),
            ]
        })
        .collect();

    std::fs::create_dir_all(&common.out)?;
    let csv_path = common.out.join("profile.csv");
    write_csv(&csv_path, &["z", "theta", "eta", "segment"], &rows)?;

    let mut manifest = RunManifest::new("profile");
    manifest.param("c", c_value);
    manifest.param("eps", eps);
    manifest.param("zspan", zspan);
    manifest.param("force", force);
    manifest.param("root_tol", cfg.root_tol);
    manifest.param("theta_match", cfg.theta_match);
    if let Some(cb) = cbar {
        manifest.param("computed_cbar", cb);
    }
    manifest.param("slow_truncated", profile.slow_truncated);
    manifest.param("near_minimal_weak", profile.near_minimal_weak);
    manifest.output("profile.csv");
    manifest.write(&common.out)?;

    let segs: Vec<&str> = {
        let mut s = Vec::new();
        for seg in &profile.segments {
            if s.last() != Some(&seg.as_str()) {
                s.push(seg.as_str());
            }
        }
        s
    };
    println!(
        "profile with {} samples, segments [{}]{}; wrote {}",
        profile.len(),
        segs.join(", "),
        if profile.slow_truncated {
            " (slow tail truncated by z budget)"
        } else {
            ""
        },
        csv_path.display()
    );
    Ok(ExitCode::SUCCESS)
}
