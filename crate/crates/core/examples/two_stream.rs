//! Two-stream instability with the adaptive-rank solver.
//!
//! ```text
//! cargo run --release --example two_stream -- [nx] [H] [tfinal]
//! ```
//!
//! Prints the electrostatic energy and the rank as the beams roll up.

use wigner_core::{Mode, Problem, Simulation, SolverConfig};

fn arg<T: std::str::FromStr>(n: usize, default: T) -> T {
    std::env::args().nth(n).and_then(|s| s.parse().ok()).unwrap_or(default)
}

fn main() -> wigner_core::Result<()> {
    let n: usize = arg(1, 128);
    let mut config = SolverConfig::new(Problem::TwoStream, arg(2, 8.0), n, n);
    config.t_final = arg(3, 30.0);
    config.mode = Mode::Adaptive;

    let mut sim = Simulation::new(config)?;
    println!("{:>8} {:>14} {:>6} {:>12}", "t", "ee_norm", "rank", "mass_err");
    let mut last_print = -1.0;
    while !sim.is_finished() {
        sim.step()?;
        let r = sim.state().history.last().unwrap();
        if r.t - last_print >= 2.5 || sim.is_finished() {
            println!("{:8.3} {:14.6e} {:6} {:12.3e}", r.t, r.ee_norm, r.rank, r.mass_rel_err);
            last_print = r.t;
        }
    }
    Ok(())
}
