//! Why the Fourier-stage ACA selects columns in conjugate pairs.
//!
//! A real distribution has a conjugate-symmetric velocity spectrum. When
//! every selected column comes with its mirror, the cross approximation
//! keeps that symmetry and the inverse transform is real to roundoff.
//! Selecting columns independently leaves an imaginary part behind.

use wigner_core::lowrank::{compress, conjugate_pairs};
use wigner_core::poisson::{density_lowrank, solve_poisson};
use wigner_core::solver::{raw_threshold, Solution};
use wigner_core::wigner::{to_velocity_space, FourierEntries, FourierFactors, PhaseMultiplier};
use wigner_core::{Mode, Problem, Simulation, SolverConfig};

fn main() -> wigner_core::Result<()> {
    let mut config = SolverConfig::new(Problem::TwoStream, 1.0, 128, 128);
    config.t_final = 20.0;
    config.mode = Mode::Adaptive;
    let mut sim = Simulation::new(config.clone())?;
    sim.run(|_, _| Ok(()))?;
    let grid = sim.grid().clone();
    let Solution::LowRank(f) = &sim.state().solution else {
        unreachable!()
    };
    println!("state at t = {:.2}, rank {}", sim.state().t, f.rank());

    let dt = config.dt(&grid);
    let phi = solve_poisson(&density_lowrank(f, &grid)?, &grid);
    let spectral = FourierFactors::from_velocity(f);
    let phase = PhaseMultiplier::new(&phi, config.h, dt, &grid);
    let entries = FourierEntries::new(&spectral, &phase);
    let eps_x = raw_threshold(config.eps_s, &grid);
    let eps_k = eps_x * (grid.nv as f64).sqrt();

    for (label, pairs) in [("paired", Some(conjugate_pairs(grid.nv))), ("unpaired", None)] {
        println!("{label}:");
        for seed in 0..4 {
            let out = compress(&entries, &config.aca_params(seed, pairs.clone()), eps_k);
            let (_, imag) = to_velocity_space(&out.factors, &grid, eps_x);
            println!("  seed {seed}: cross rank {:3}, imaginary residual {imag:.3e}", out.cross_rank);
        }
    }
    Ok(())
}
