//! `zfk verify`: run the acceptance-criteria suite and print the report.

use crate::manifest::RunManifest;
use crate::CommonArgs;
use anyhow::Result;
use std::process::ExitCode;
use zfk::verify;

pub fn run(common: &CommonArgs) -> Result<ExitCode> {
    let results = verify::run_all();
    let mut lines = Vec::new();
    for r in &results {
        let line = r.line();
        println!("{line}");
        lines.push(line);
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    let summary = format!(
        "{} / {} criteria passed",
        results.len() - failed,
        results.len()
    );
    println!("{summary}");
    lines.push(summary);

    std::fs::create_dir_all(&common.out)?;
    std::fs::write(
        common.out.join("verify_report.txt"),
        lines.join("\n") + "\n",
    )?;
    let mut manifest = RunManifest::new("verify");
    manifest.param("passed", results.len() - failed);
    manifest.param("failed", failed);
    manifest.output("verify_report.txt");
    manifest.write(&common.out)?;

    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
