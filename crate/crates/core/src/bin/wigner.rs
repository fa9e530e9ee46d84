use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use wigner_core::advection::WenoOrder;
use wigner_core::config::ConfigOverrides;
use wigner_core::io::{write_diagnostics, write_factors, write_snapshot, RunManifest};
use wigner_core::solver::{Mode, Simulation, Solution, TimeStep};
use wigner_core::{Result, WignerError};

/// Wigner–Poisson phase-space simulation (two-stream instability or Landau damping).
#[derive(Parser, Debug)]
#[command(name = "wigner", version)]
struct Args {
    /// `key = value` config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// two_stream | landau
    #[arg(long)]
    problem: Option<String>,
    /// Dimensionless Planck constant.
    #[arg(long = "H")]
    h: Option<f64>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    nv: Option<usize>,
    /// dt = cfl * dx / Lv
    #[arg(long, conflicts_with = "dt")]
    cfl: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    tfinal: Option<f64>,
    /// full | adaptive
    #[arg(long)]
    solver: Option<String>,
    /// 3 | 5
    #[arg(long = "weno-order")]
    weno_order: Option<u32>,
    #[arg(long = "eps-c")]
    eps_c: Option<f64>,
    #[arg(long = "eps-s")]
    eps_s: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write a snapshot every K steps (first and last are always written).
    #[arg(long = "snapshot-every")]
    snapshot_every: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Args {
    fn overrides(&self) -> Result<ConfigOverrides> {
        let weno_order = match self.weno_order {
            Some(n) => Some(
                WenoOrder::from_int(n)
                    .ok_or_else(|| WignerError::Config("weno-order must be 3 or 5".into()))?,
            ),
            None => None,
        };
        Ok(ConfigOverrides {
            problem: self.problem.as_deref().map(str::parse).transpose()?,
            h: self.h,
            nx: self.nx,
            nv: self.nv,
            time_step: self
                .cfl
                .map(TimeStep::Cfl)
                .or(self.dt.map(TimeStep::Fixed)),
            t_final: self.tfinal,
            mode: self.solver.as_deref().map(str::parse::<Mode>).transpose()?,
            weno_order,
            eps_c: self.eps_c,
            eps_s: self.eps_s,
            seed: self.seed,
            snapshot_every: self.snapshot_every,
            out: self.out.clone(),
            ..Default::default()
        })
    }
}

fn execute(args: &Args) -> Result<()> {
    let file = match &args.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| WignerError::Io {
                path: p.clone(),
                source: e,
            })?;
            ConfigOverrides::parse(&text)?
        }
        None => ConfigOverrides::default(),
    };
    let merged = file.merge(args.overrides()?);
    let config = merged.build()?;
    let out = merged.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&out).map_err(|e| WignerError::Io {
        path: out.clone(),
        source: e,
    })?;

    let mut manifest = RunManifest::start(&config);
    let mut sim = Simulation::new(config.clone())?;
    let mut written = Vec::new();
    sim.run(|state, _| {
        let stem = out.join(format!("snapshot_{:06}", state.step));
        let snap = stem.with_extension("wpsn");
        write_snapshot(&snap, &state.solution.to_distribution(), state.t, config.h)?;
        written.push(snap);
        if let Solution::LowRank(lr) = &state.solution {
            let lrf = stem.with_extension("wplr");
            write_factors(&lrf, lr, state.t, config.h)?;
            written.push(lrf);
        }
        Ok(())
    })?;

    let csv = out.join("diagnostics.csv");
    write_diagnostics(&sim.state().history, &csv)?;
    written.push(csv);
    let manifest_path = out.join("manifest.txt");
    manifest.outputs = written;
    manifest.outputs.push(manifest_path.clone());
    manifest.finish();
    manifest.write(&manifest_path)?;

    report(&sim, &out);
    Ok(())
}

fn report(sim: &Simulation, out: &Path) {
    let last = sim.state().history.last().expect("history has the initial record");
    println!(
        "t={} steps={} rank={} mass_rel_err={:.3e} momentum_err={:.3e} output={}",
        last.t,
        sim.state().step,
        last.rank,
        last.mass_rel_err,
        last.momentum_err,
        out.display()
    );
    if let Some(fit) = sim.damping_rate() {
        println!("damping_rate={:.6} peaks={}", fit.gamma, fit.peaks.len());
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {}", e.category(), e);
            ExitCode::from(2)
        }
    }
}
