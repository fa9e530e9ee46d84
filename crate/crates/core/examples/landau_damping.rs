//! Strong Landau damping: fit the decay rate of the electric field.
//!
//! ```text
//! cargo run --release --example landau_damping -- [nx] [H]
//! ```
//!
//! The fitted rate for the default setup sits near 0.15.

use wigner_core::{Mode, Problem, Simulation, SolverConfig};

fn main() -> wigner_core::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(256);
    let h: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(8.0);

    for mode in [Mode::Adaptive, Mode::Full] {
        let mut config = SolverConfig::new(Problem::Landau, h, n, n);
        config.t_final = 30.0;
        config.mode = mode;
        let started = std::time::Instant::now();
        let mut sim = Simulation::new(config)?;
        sim.run(|_, _| Ok(()))?;
        let fit = sim.damping_rate();
        let max_rank = sim.state().history.iter().map(|r| r.rank).max().unwrap_or(-1);
        match fit {
            Some(fit) => println!(
                "{:<8} gamma = {:.4} from {} peaks, rank <= {}, {:.2?}",
                mode.name(),
                fit.gamma,
                fit.peaks.len(),
                max_rank,
                started.elapsed()
            ),
            None => println!("{:<8} not enough peaks to fit", mode.name()),
        }
    }
    Ok(())
}
