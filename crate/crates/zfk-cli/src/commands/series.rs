//! `zfk series`: print the slow-manifold coefficients and tabulate the
//! truncated series.

use crate::config::FileConfig;
use crate::manifest::RunManifest;
use crate::out::{fmt_f64, write_csv};
use crate::CommonArgs;
use anyhow::Result;
use std::process::ExitCode;
use zfk::asymptotics::SlowSeries;

pub fn run(c: f64, k: usize, common: &CommonArgs) -> Result<ExitCode> {
    if !(1..=8).contains(&k) {
        eprintln!("usage: series order K must lie in 1..=8, got {k}");
        return Ok(ExitCode::from(2));
    }
    let _ = FileConfig::load(common.config.as_deref())?;
    let series = SlowSeries::build(c, k)?;

    // every coefficient carries the exact factor th (1 - th); print it
    // factored so the vanishing at both equilibria is visible
    for j in 1..=k {
        let denom = c.powi(2 * j as i32 - 1);
        match series.p_poly(j).div_theta_one_minus_theta() {
            Some(q) => {
                let inner = q.to_string();
                if inner == "1" {
                    println!("F_{j} = th*(1-th) / {}", fmt_f64(denom));
                } else {
                    println!("F_{j} = th*(1-th)*({inner}) / {}", fmt_f64(denom));
                }
            }
            None => println!("F_{j} = ({}) / {}", series.p_poly(j), fmt_f64(denom)),
        }
    }

    // tabulate h_K with the truncation proxy on a theta x eps grid
    let mut rows: Vec<Vec<String>> = Vec::new();
    for &eps in &[0.02, 0.05, 0.1] {
        let cap = 1.0 - 10.0 * eps;
        for i in 0..=40 {
            let theta = cap * i as f64 / 40.0;
            let v = series.eta(theta, eps)?;
            rows.push(vec![
                fmt_f64(theta),
                fmt_f64(eps),
                fmt_f64(v.eta),
                fmt_f64(v.last_term),
            ]);
        }
    }
    std::fs::create_dir_all(&common.out)?;
    let csv_path = common.out.join("series.csv");
    write_csv(&csv_path, &["theta", "eps", "eta", "last_term"], &rows)?;

    let mut manifest = RunManifest::new("series");
    manifest.param("c", c);
    manifest.param("k", k);
    manifest.output("series.csv");
    manifest.write(&common.out)?;
    println!("wrote {}", csv_path.display());
    Ok(ExitCode::SUCCESS)
}
