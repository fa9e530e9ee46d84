//! Numerical rank of the two-stream solution for several values of H.
//!
//! Stronger quantum effects (smaller H) produce finer velocity structure,
//! which shows up as a higher rank at every energy threshold.

use wigner_core::diagnostics::ENERGY_FRACTIONS;
use wigner_core::{Mode, Problem, Simulation, SolverConfig};

fn main() -> wigner_core::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(256);
    print!("{:>5}", "H");
    for label in ["95%", "99%", "99.99%", "99.9999%", "99.999999%"] {
        print!(" {label:>10}");
    }
    println!(" {:>8}", "eps_s");
    for h in [8.0, 1.0, 0.5] {
        let mut config = SolverConfig::new(Problem::TwoStream, h, n, n);
        config.t_final = 45.0;
        config.mode = Mode::Adaptive;
        let mut sim = Simulation::new(config)?;
        sim.run(|_, _| Ok(()))?;
        let hist = &sim.state().history;
        print!("{h:5}");
        for k in 0..ENERGY_FRACTIONS.len() {
            print!(" {:>10}", hist.iter().map(|r| r.ranks[k]).max().unwrap());
        }
        println!(" {:>8}", hist.iter().map(|r| r.rank).max().unwrap());
    }
    println!("(maximum over the run of the rank needed to capture each energy fraction)");
    Ok(())
}
