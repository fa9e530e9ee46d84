//! Strang-split time stepping, in full-rank and adaptive-rank form.
//!
//! One step is `A(dt/2) W(dt) A(dt/2)` followed by a uniform rescaling that
//! restores the total mass to `Lx`, where `A` is conservative semi-Lagrangian
//! advection in `x` and `W` the exact Fourier update of the nonlocal term with
//! the potential computed from the half-advected state.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::advection::{sl_full, shift_periodic, shifted_value, Shift, WenoOrder, Weights};
use crate::diagnostics::{self, DiagnosticsRecord};
use crate::distribution::DistributionMatrix;
use crate::error::{Result, WignerError};
use crate::grid::PhaseSpaceGrid;
use crate::lowrank::{compress, conjugate_pairs, AcaParams, LowRankFactors, MatrixEntries};
use crate::poisson::{density_full, density_lowrank, electric_field, solve_poisson, Potential};
use crate::wigner::{fourier_update_full, to_velocity_space, FourierEntries, FourierFactors, PhaseMultiplier};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    TwoStream,
    Landau,
}

impl Problem {
    pub fn name(self) -> &'static str {
        match self {
            Problem::TwoStream => "two_stream",
            Problem::Landau => "landau",
        }
    }

    /// `(Lx, Lv)` of the benchmark domain.
    pub fn domain(self) -> (f64, f64) {
        use std::f64::consts::PI;
        match self {
            Problem::TwoStream => (4.0 * PI, 2.0 * PI),
            Problem::Landau => (5.0 * PI, 2.0 * PI),
        }
    }

    pub fn spatial_profile(self, x: f64) -> f64 {
        match self {
            Problem::TwoStream => 2.0 + (0.5 * x).cos(),
            Problem::Landau => 1.0 + 0.2 * (0.4 * x).cos(),
        }
    }

    pub fn velocity_profile(self, v: f64) -> f64 {
        use std::f64::consts::PI;
        let g = (-0.5 * v * v).exp();
        match self {
            Problem::TwoStream => v * v * g / (8.0 * PI).sqrt(),
            Problem::Landau => g / (2.0 * PI).sqrt(),
        }
    }

    pub fn initial_value(self, x: f64, v: f64) -> f64 {
        self.spatial_profile(x) * self.velocity_profile(v)
    }
}

impl FromStr for Problem {
    type Err = WignerError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "two_stream" | "twostream" => Ok(Problem::TwoStream),
            "landau" => Ok(Problem::Landau),
            _ => Err(WignerError::UnknownProblem(s.to_string())),
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Full,
    Adaptive,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Full => "full",
            Mode::Adaptive => "adaptive",
        }
    }
}

impl FromStr for Mode {
    type Err = WignerError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "full" => Ok(Mode::Full),
            "adaptive" => Ok(Mode::Adaptive),
            other => Err(WignerError::Config(format!(
                "solver must be `full` or `adaptive`, got `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeStep {
    /// `dt = cfl · dx / Lv`.
    Cfl(f64),
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub problem: Problem,
    pub h: f64,
    pub nx: usize,
    pub nv: usize,
    pub lx: f64,
    pub lv: f64,
    pub time_step: TimeStep,
    pub t_final: f64,
    pub mode: Mode,
    pub weno_order: WenoOrder,
    pub eps_c: f64,
    /// Singular-value cutoff, measured in the discrete `L²(dx dv)` norm.
    pub eps_s: f64,
    pub candidates: usize,
    pub max_rank: Option<usize>,
    pub seed: u64,
    /// Snapshot cadence in steps; 0 keeps only the first and last state.
    pub snapshot_every: usize,
    pub fit_window: (f64, f64),
}

impl SolverConfig {
    /// Benchmark defaults on the problem's own domain: CFL 50, `T = 50`,
    /// adaptive mode, fifth-order WENO, `eps_c = 1e-4`, `eps_s = 1e-3`.
    pub fn new(problem: Problem, h: f64, nx: usize, nv: usize) -> Self {
        let (lx, lv) = problem.domain();
        Self {
            problem,
            h,
            nx,
            nv,
            lx,
            lv,
            time_step: TimeStep::Cfl(50.0),
            t_final: 50.0,
            mode: Mode::Adaptive,
            weno_order: WenoOrder::Fifth,
            eps_c: 1e-4,
            eps_s: 1e-3,
            candidates: 12,
            max_rank: None,
            seed: 0,
            snapshot_every: 0,
            fit_window: (0.0, 20.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(WignerError::Config(m));
        if !(self.h > 0.0 && self.h.is_finite()) {
            return bad(format!("H must be positive, got {}", self.h));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return bad(format!("final time must be nonnegative, got {}", self.t_final));
        }
        match self.time_step {
            TimeStep::Cfl(c) | TimeStep::Fixed(c) if !(c > 0.0 && c.is_finite()) => {
                return bad(format!("time step parameter must be positive, got {c}"));
            }
            _ => {}
        }
        if !(self.eps_c > 0.0 && self.eps_s >= 0.0) {
            return bad("tolerances must be positive".into());
        }
        if self.candidates == 0 {
            return bad("candidate count must be at least 1".into());
        }
        if self.fit_window.0 > self.fit_window.1 {
            return bad("fit window is reversed".into());
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<PhaseSpaceGrid> {
        PhaseSpaceGrid::new(self.lx, self.lv, self.nx, self.nv)
    }

    pub fn dt(&self, grid: &PhaseSpaceGrid) -> f64 {
        match self.time_step {
            TimeStep::Cfl(c) => timestep(c, grid),
            TimeStep::Fixed(dt) => dt,
        }
    }

    pub fn aca_params(&self, seed: u64, pairs: Option<Vec<usize>>) -> AcaParams {
        AcaParams {
            eps_c: self.eps_c,
            candidates: self.candidates,
            max_rank: self.max_rank,
            seed,
            pairs,
        }
    }
}

/// `dt = cfl · dx / Lv`, using `max |v| = Lv`.
pub fn timestep(cfl: f64, grid: &PhaseSpaceGrid) -> f64 {
    cfl * grid.dx / grid.lv
}

/// Step boundaries `0 = t_0 < … < t_n = T` with the last step shortened.
pub fn step_times(dt: f64, t_final: f64) -> Vec<f64> {
    if t_final <= 0.0 {
        return vec![0.0];
    }
    let n = ((t_final / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    (0..=n)
        .map(|k| if k == n { t_final } else { k as f64 * dt })
        .collect()
}

/// Exact rank-one factorization of the initial condition and its expansion.
#[derive(Debug, Clone)]
pub struct InitialCondition {
    pub factors: LowRankFactors,
    pub matrix: DistributionMatrix,
}

pub fn init_distribution(problem: Problem, grid: &PhaseSpaceGrid) -> InitialCondition {
    let gx: Vec<f64> = grid.x.iter().map(|&x| problem.spatial_profile(x)).collect();
    let hv: Vec<f64> = grid.v.iter().map(|&v| problem.velocity_profile(v)).collect();
    let ng = gx.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nh = hv.iter().map(|a| a * a).sum::<f64>().sqrt();
    let factors = LowRankFactors {
        u: DMatrix::from_fn(grid.nx, 1, |i, _| gx[i] / ng),
        sigma: vec![ng * nh],
        v: DMatrix::from_fn(grid.nv, 1, |j, _| hv[j] / nh),
    };
    let matrix = DistributionMatrix::from_fn(grid.nx, grid.nv, |i, j| gx[i] * hv[j]);
    InitialCondition { factors, matrix }
}

/// Simple sum in `x`, trapezoid rule in `v`.
pub fn total_mass_full(f: &DistributionMatrix, grid: &PhaseSpaceGrid) -> f64 {
    let w = grid.trapezoid_weights();
    (0..f.nx())
        .map(|i| f.row(i).iter().zip(&w).map(|(a, b)| a * b).sum::<f64>())
        .sum::<f64>()
        * grid.dx
        * grid.dv
}

/// Same quadrature as [`total_mass_full`], evaluated on the factors.
pub fn total_mass_lowrank(factors: &LowRankFactors, grid: &PhaseSpaceGrid) -> f64 {
    diagnostics::contract(factors, &grid.trapezoid_weights()) * grid.dx * grid.dv
}

fn correction_factor(mass: f64, grid: &PhaseSpaceGrid) -> Result<f64> {
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(WignerError::NonPhysicalMass(mass));
    }
    Ok(grid.lx / mass)
}

/// Rescales so that the total mass equals `Lx`; returns the factor applied.
pub fn mass_correct_full(f: &mut DistributionMatrix, grid: &PhaseSpaceGrid) -> Result<f64> {
    let c = correction_factor(total_mass_full(f, grid), grid)?;
    f.scale(c);
    Ok(c)
}

/// Rescales `Σ` only.
pub fn mass_correct_lowrank(factors: &mut LowRankFactors, grid: &PhaseSpaceGrid) -> Result<f64> {
    let c = correction_factor(total_mass_lowrank(factors, grid), grid)?;
    factors.scale(c);
    Ok(c)
}

/// Weight turning matrix singular values into discrete `L²(dx dv)` ones.
pub fn singular_value_weight(grid: &PhaseSpaceGrid) -> f64 {
    (grid.dx * grid.dv).sqrt()
}

/// Truncation tolerance on raw matrix singular values for a tolerance
/// stated in the weighted norm.
pub fn raw_threshold(eps_s: f64, grid: &PhaseSpaceGrid) -> f64 {
    eps_s / singular_value_weight(grid)
}

/// Stream seed for one compression, independent of call order.
pub fn stage_seed(seed: u64, step: u64, stage: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    mix(seed ^ mix(step.wrapping_mul(8).wrapping_add(stage)))
}

/// Advected low-rank state, sampled entry by entry without assembly.
pub struct AdvectedEntries<'a> {
    us: Vec<f64>,
    v: Vec<f64>,
    rank: usize,
    shifts: Vec<Shift>,
    order: WenoOrder,
    grid: &'a PhaseSpaceGrid,
}

impl<'a> AdvectedEntries<'a> {
    pub fn new(factors: &LowRankFactors, tau: f64, order: WenoOrder, grid: &'a PhaseSpaceGrid) -> Self {
        let r = factors.rank();
        let mut us = Vec::with_capacity(grid.nx * r);
        for i in 0..grid.nx {
            for m in 0..r {
                us.push(factors.u[(i, m)] * factors.sigma[m]);
            }
        }
        let mut v = Vec::with_capacity(grid.nv * r);
        for j in 0..grid.nv {
            for m in 0..r {
                v.push(factors.v[(j, m)]);
            }
        }
        let shifts = grid
            .v
            .iter()
            .map(|&vj| Shift::from_displacement(vj * tau, grid.dx))
            .collect();
        Self {
            us,
            v,
            rank: r,
            shifts,
            order,
            grid,
        }
    }

    #[inline]
    fn source(&self, i: usize, j: usize) -> f64 {
        let r = self.rank;
        self.us[i * r..(i + 1) * r]
            .iter()
            .zip(&self.v[j * r..(j + 1) * r])
            .map(|(a, b)| a * b)
            .sum()
    }
}

impl MatrixEntries<f64> for AdvectedEntries<'_> {
    fn nrows(&self) -> usize {
        self.grid.nx
    }

    fn ncols(&self) -> usize {
        self.grid.nv
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        let s = self.shifts[j];
        let n = self.grid.nx as i64;
        shifted_value(
            |m| self.source(m.rem_euclid(n) as usize, j),
            i as i64 - s.cells,
            s.xi,
            self.order,
            Weights::Nonlinear,
        )
    }

    fn column(&self, j: usize, out: &mut [f64]) {
        let src: Vec<f64> = (0..self.grid.nx).map(|i| self.source(i, j)).collect();
        shift_periodic(&src, self.shifts[j], self.order, Weights::Nonlinear, out);
    }
}

/// Per-step by-products.
#[derive(Debug, Clone)]
pub struct StepReport {
    /// Potential that drove the Fourier stage.
    pub potential: Potential,
    pub imag_residual: f64,
    /// Ranks after stages 1, 3 and 4 (adaptive mode only).
    pub stage_ranks: Option<[usize; 3]>,
    /// Cross ranks of the three compressions before truncation.
    pub cross_ranks: Option<[usize; 3]>,
    pub hit_max_rank: bool,
    pub evaluations: usize,
}

pub fn step_full(
    f: &DistributionMatrix,
    dt: f64,
    config: &SolverConfig,
    grid: &PhaseSpaceGrid,
) -> Result<(DistributionMatrix, StepReport)> {
    f.check_shape(grid)?;
    let half = sl_full(f, 0.5 * dt, config.weno_order, grid);
    let potential = solve_poisson(&density_full(&half, grid)?, grid);
    let update = fourier_update_full(&half, &potential, config.h, dt, grid);
    let mut out = sl_full(&update.solution, 0.5 * dt, config.weno_order, grid);
    mass_correct_full(&mut out, grid)?;
    Ok((
        out,
        StepReport {
            potential,
            imag_residual: update.imag_residual,
            stage_ranks: None,
            cross_ranks: None,
            hit_max_rank: false,
            evaluations: 0,
        },
    ))
}

pub fn step_adaptive(
    f: &LowRankFactors,
    dt: f64,
    step: u64,
    config: &SolverConfig,
    grid: &PhaseSpaceGrid,
) -> Result<(LowRankFactors, StepReport)> {
    f.check_shape(grid.nx, grid.nv)?;
    let order = config.weno_order;
    // Unnormalized forward DFT: Fourier-space singular values are √Nv larger.
    let eps_x = raw_threshold(config.eps_s, grid);
    let eps_k = eps_x * (grid.nv as f64).sqrt();

    let first = compress(
        &AdvectedEntries::new(f, 0.5 * dt, order, grid),
        &config.aca_params(stage_seed(config.seed, step, 1), None),
        eps_x,
    );

    let potential = solve_poisson(&density_lowrank(&first.factors, grid)?, grid);
    let spectral = FourierFactors::from_velocity(&first.factors);
    let phase = PhaseMultiplier::new(&potential, config.h, dt, grid);
    let fourier = compress(
        &FourierEntries::new(&spectral, &phase),
        &config.aca_params(stage_seed(config.seed, step, 3), Some(conjugate_pairs(grid.nv))),
        eps_k,
    );
    let (middle, imag_residual) = to_velocity_space(&fourier.factors, grid, eps_x);

    let last = compress(
        &AdvectedEntries::new(&middle, 0.5 * dt, order, grid),
        &config.aca_params(stage_seed(config.seed, step, 4), None),
        eps_x,
    );
    let stage_ranks = [first.factors.rank(), middle.rank(), last.factors.rank()];
    let mut out = last.factors;
    mass_correct_lowrank(&mut out, grid)?;

    let hit = first.hit_max_rank || fourier.hit_max_rank || last.hit_max_rank;
    if hit {
        log::warn!("step {step}: compression reached the rank cap");
    }
    Ok((
        out,
        StepReport {
            potential,
            imag_residual,
            stage_ranks: Some(stage_ranks),
            cross_ranks: Some([first.cross_rank, fourier.cross_rank, last.cross_rank]),
            hit_max_rank: hit,
            evaluations: first.evaluations + fourier.evaluations + last.evaluations,
        },
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Solution {
    Full(DistributionMatrix),
    LowRank(LowRankFactors),
}

impl Solution {
    pub fn to_distribution(&self) -> DistributionMatrix {
        match self {
            Solution::Full(f) => f.clone(),
            Solution::LowRank(lr) => lr.to_distribution(),
        }
    }

    pub fn mass(&self, grid: &PhaseSpaceGrid) -> f64 {
        match self {
            Solution::Full(f) => total_mass_full(f, grid),
            Solution::LowRank(lr) => total_mass_lowrank(lr, grid),
        }
    }

    pub fn momentum(&self, grid: &PhaseSpaceGrid) -> f64 {
        match self {
            Solution::Full(f) => diagnostics::momentum_full(f, grid),
            Solution::LowRank(lr) => diagnostics::momentum_lowrank(lr, grid),
        }
    }

    pub fn abs_velocity_moment(&self, grid: &PhaseSpaceGrid) -> f64 {
        match self {
            Solution::Full(f) => diagnostics::abs_velocity_moment_full(f, grid),
            Solution::LowRank(lr) => diagnostics::abs_velocity_moment_lowrank(lr, grid),
        }
    }

    pub fn potential(&self, grid: &PhaseSpaceGrid) -> Result<Potential> {
        let rho = match self {
            Solution::Full(f) => density_full(f, grid)?,
            Solution::LowRank(lr) => density_lowrank(lr, grid)?,
        };
        Ok(solve_poisson(&rho, grid))
    }

    /// Singular values: those of the factors, or of a dense SVD.
    pub fn singular_values(&self) -> Vec<f64> {
        match self {
            Solution::LowRank(lr) => lr.sigma.clone(),
            Solution::Full(f) => {
                let m = DMatrix::from_row_slice(f.nx(), f.nv(), f.as_slice());
                let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
                s.sort_by(|a, b| b.total_cmp(a));
                s
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimulationState {
    pub t: f64,
    pub step: usize,
    pub solution: Solution,
    /// Potential of the current solution.
    pub potential: Potential,
    pub history: Vec<DiagnosticsRecord>,
    pub last_report: Option<StepReport>,
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub step: usize,
    pub t: f64,
    pub solution: Solution,
}

/// Time loop over a configuration.
pub struct Simulation {
    config: SolverConfig,
    grid: PhaseSpaceGrid,
    times: Vec<f64>,
    p0: f64,
    abs_moment0: f64,
    state: SimulationState,
}

impl Simulation {
    pub fn new(config: SolverConfig) -> Result<Self> {
        config.validate()?;
        let grid = config.grid()?;
        let mut init = init_distribution(config.problem, &grid);
        // The discrete initial mass differs from Lx by the velocity cutoff.
        let solution = match config.mode {
            Mode::Full => {
                mass_correct_full(&mut init.matrix, &grid)?;
                Solution::Full(init.matrix)
            }
            Mode::Adaptive => {
                mass_correct_lowrank(&mut init.factors, &grid)?;
                Solution::LowRank(init.factors)
            }
        };
        Self::from_solution(config, grid, solution)
    }

    /// Starts from an arbitrary state instead of the problem's initial data.
    pub fn from_solution(config: SolverConfig, grid: PhaseSpaceGrid, solution: Solution) -> Result<Self> {
        config.validate()?;
        match (&solution, config.mode) {
            (Solution::Full(f), Mode::Full) => f.check_shape(&grid)?,
            (Solution::LowRank(lr), Mode::Adaptive) => lr.check_shape(grid.nx, grid.nv)?,
            _ => {
                return Err(WignerError::Config(
                    "solution representation does not match the solver mode".into(),
                ))
            }
        }
        let times = step_times(config.dt(&grid), config.t_final);
        let p0 = solution.momentum(&grid);
        let abs_moment0 = solution.abs_velocity_moment(&grid);
        let potential = solution.potential(&grid)?;
        let mut sim = Self {
            config,
            grid,
            times,
            p0,
            abs_moment0,
            state: SimulationState {
                t: 0.0,
                step: 0,
                solution,
                potential,
                history: vec![],
                last_report: None,
            },
        };
        let rec = sim.record(0.0);
        sim.state.history.push(rec);
        Ok(sim)
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn grid(&self) -> &PhaseSpaceGrid {
        &self.grid
    }

    pub fn state(&self) -> &SimulationState {
        &self.state
    }

    pub fn into_state(self) -> SimulationState {
        self.state
    }

    pub fn total_steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn is_finished(&self) -> bool {
        self.state.step >= self.total_steps()
    }

    pub fn step(&mut self) -> Result<()> {
        if self.is_finished() {
            return Ok(());
        }
        let k = self.state.step;
        let dt = self.times[k + 1] - self.times[k];
        let (solution, report) = match &self.state.solution {
            Solution::Full(f) => {
                let (f, r) = step_full(f, dt, &self.config, &self.grid)?;
                (Solution::Full(f), r)
            }
            Solution::LowRank(lr) => {
                let (lr, r) = step_adaptive(lr, dt, k as u64, &self.config, &self.grid)?;
                (Solution::LowRank(lr), r)
            }
        };
        self.state.solution = solution;
        self.state.potential = self.state.solution.potential(&self.grid)?;
        self.state.step = k + 1;
        self.state.t = self.times[k + 1];
        let imag = report.imag_residual;
        self.state.last_report = Some(report);
        let mut rec = self.record(imag);
        rec.t = self.state.t;
        self.state.history.push(rec);
        log::debug!(
            "step {} t={:.4} rank={} mass_err={:.3e}",
            self.state.step,
            self.state.t,
            self.state.history.last().map_or(-1, |r| r.rank),
            self.state.history.last().map_or(0.0, |r| r.mass_rel_err)
        );
        Ok(())
    }

    fn wants_snapshot(&self) -> bool {
        let s = self.state.step;
        s == 0 || self.is_finished() || (self.config.snapshot_every > 0 && s.is_multiple_of(self.config.snapshot_every))
    }

    fn record(&self, imag_residual: f64) -> DiagnosticsRecord {
        let grid = &self.grid;
        let sol = &self.state.solution;
        let mass = sol.mass(grid);
        let momentum = sol.momentum(grid);
        let e = electric_field(&self.state.potential, grid);
        let (rank, ranks) = match sol {
            Solution::LowRank(lr) => (
                lr.rank() as i64,
                diagnostics::ranks_at_thresholds(&lr.sigma),
            ),
            Solution::Full(_) if self.wants_snapshot() => {
                let s = sol.singular_values();
                let cut = raw_threshold(self.config.eps_s, grid);
                let r = s.iter().filter(|&&x| x >= cut).count() as i64;
                (r, diagnostics::ranks_at_thresholds(&s))
            }
            Solution::Full(_) => (-1, [-1; 5]),
        };
        let norm = if self.abs_moment0 > 0.0 {
            self.abs_moment0
        } else {
            1.0
        };
        DiagnosticsRecord {
            t: self.state.t,
            mass,
            mass_rel_err: (mass - grid.lx).abs() / grid.lx,
            momentum,
            momentum_err: (momentum - self.p0).abs() / norm,
            ee_norm: diagnostics::electrostatic_energy(&e, grid),
            rank,
            ranks,
            imag_residual,
        }
    }

    /// Advances to the final time, handing every snapshot-worthy state to
    /// `on_snapshot`, including the initial one.
    pub fn run<F>(&mut self, mut on_snapshot: F) -> Result<()>
    where
        F: FnMut(&SimulationState, &PhaseSpaceGrid) -> Result<()>,
    {
        if self.state.step == 0 {
            on_snapshot(&self.state, &self.grid)?;
        }
        while !self.is_finished() {
            self.step()?;
            if self.wants_snapshot() {
                on_snapshot(&self.state, &self.grid)?;
            }
        }
        Ok(())
    }

    pub fn damping_rate(&self) -> Option<diagnostics::DampingFit> {
        let series: Vec<(f64, f64)> = self.state.history.iter().map(|r| (r.t, r.ee_norm)).collect();
        diagnostics::fit_damping_rate(&series, self.config.fit_window)
    }
}

/// Everything a run produces, kept in memory.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub history: Vec<DiagnosticsRecord>,
    pub snapshots: Vec<Snapshot>,
    pub grid: PhaseSpaceGrid,
}

pub fn run(config: &SolverConfig) -> Result<RunOutput> {
    let mut sim = Simulation::new(config.clone())?;
    let mut snapshots = vec![];
    sim.run(|state, _| {
        snapshots.push(Snapshot {
            step: state.step,
            t: state.t,
            solution: state.solution.clone(),
        });
        Ok(())
    })?;
    let grid = sim.grid().clone();
    Ok(RunOutput {
        history: sim.into_state().history,
        snapshots,
        grid,
    })
}
