//! Wall time of the full-rank and adaptive solvers as the mesh grows.
//!
//! ```text
//! cargo run --release --example scaling -- [tfinal]
//! ```

use std::time::Instant;

use wigner_core::{Mode, Problem, Simulation, SolverConfig, TimeStep};

fn time_run(mode: Mode, n: usize, t_final: f64) -> wigner_core::Result<f64> {
    let mut config = SolverConfig::new(Problem::TwoStream, 8.0, n, n);
    config.time_step = TimeStep::Fixed(0.1);
    config.t_final = t_final;
    config.mode = mode;
    config.snapshot_every = 0;
    let mut sim = Simulation::new(config)?;
    let start = Instant::now();
    sim.run(|_, _| Ok(()))?;
    Ok(start.elapsed().as_secs_f64())
}

fn slope(ns: &[usize], ts: &[f64]) -> f64 {
    let x: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let y: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let (mx, my) = (x.iter().sum::<f64>() / x.len() as f64, y.iter().sum::<f64>() / y.len() as f64);
    let num: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    num / den
}

fn main() -> wigner_core::Result<()> {
    let t_final: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2.0);
    let ns = [64, 128, 256];
    for mode in [Mode::Adaptive, Mode::Full] {
        let mut ts = vec![];
        for &n in &ns {
            let t = time_run(mode, n, t_final)?;
            println!("{:<8} N = {n:4}: {t:8.3} s", mode.name());
            ts.push(t);
        }
        println!("{:<8} log-log slope {:.2}", mode.name(), slope(&ns, &ts));
    }
    Ok(())
}
