//! Writes a short run to disk in the CLI's formats and reads it back.

use wigner_core::io::{read_diagnostics, read_snapshot, write_diagnostics, write_snapshot, RunManifest};
use wigner_core::solver::run;
use wigner_core::{Problem, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("wigner_snapshot_files");
    std::fs::create_dir_all(&dir)?;

    let mut config = SolverConfig::new(Problem::Landau, 8.0, 64, 64);
    config.t_final = 5.0;
    config.snapshot_every = 10;
    let mut manifest = RunManifest::start(&config);
    let out = run(&config)?;

    for snap in &out.snapshots {
        let path = dir.join(format!("snapshot_{:06}.wpsn", snap.step));
        write_snapshot(&path, &snap.solution.to_distribution(), snap.t, config.h)?;
        manifest.outputs.push(path);
    }
    let csv = dir.join("diagnostics.csv");
    write_diagnostics(&out.history, &csv)?;
    manifest.outputs.push(csv.clone());
    manifest.finish();
    manifest.write(&dir.join("manifest.txt"))?;

    let last = manifest.outputs[manifest.outputs.len() - 2].clone();
    let back = read_snapshot(&last)?;
    println!("{}: {}x{} at t = {}", last.display(), back.matrix.nx(), back.matrix.nv(), back.t);
    let rows = read_diagnostics(&csv)?;
    println!("{} diagnostics rows, final mass error {:.2e}", rows.len(), rows.last().unwrap().mass_rel_err);
    println!("files in {}", dir.display());
    Ok(())
}
