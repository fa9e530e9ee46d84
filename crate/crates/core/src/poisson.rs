//! Velocity moments and the periodic fourth-order Poisson solve
//! `-Φ'' = ρ - 1` with a zero-mean gauge.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::distribution::DistributionMatrix;
use crate::error::Result;
use crate::grid::PhaseSpaceGrid;
use crate::lowrank::LowRankFactors;

/// Charge density `ρ_i = ∫ f(x_i, v) dv` on the spatial nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityProfile {
    pub values: Vec<f64>,
}

/// Electrostatic potential on the spatial nodes, zero mean.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    pub values: Vec<f64>,
}

impl Potential {
    pub fn zeros(nx: usize) -> Self {
        Self {
            values: vec![0.0; nx],
        }
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

pub fn density_full(f: &DistributionMatrix, grid: &PhaseSpaceGrid) -> Result<DensityProfile> {
    f.check_shape(grid)?;
    let w = grid.trapezoid_weights();
    let values = (0..grid.nx)
        .map(|i| {
            f.row(i)
                .iter()
                .zip(&w)
                .map(|(a, b)| a * b)
                .sum::<f64>()
                * grid.dv
        })
        .collect();
    Ok(DensityProfile { values })
}

/// Density contracted directly from the factors: `ρ = U Σ (Vᵀ w) dv`.
pub fn density_lowrank(factors: &LowRankFactors, grid: &PhaseSpaceGrid) -> Result<DensityProfile> {
    factors.check_shape(grid.nx, grid.nv)?;
    let w = grid.trapezoid_weights();
    let r = factors.rank();
    let coeff: Vec<f64> = (0..r)
        .map(|m| {
            let vw: f64 = factors.v.column(m).iter().zip(&w).map(|(a, b)| a * b).sum();
            factors.sigma[m] * vw * grid.dv
        })
        .collect();
    let values = (0..grid.nx)
        .map(|i| (0..r).map(|m| factors.u[(i, m)] * coeff[m]).sum())
        .collect();
    Ok(DensityProfile { values })
}

/// Inverts the periodic five-point stencil of `-Φ''` through its discrete
/// Fourier symbol. The mean of `ρ - 1` is projected out first.
pub fn solve_poisson(rho: &DensityProfile, grid: &PhaseSpaceGrid) -> Potential {
    let nx = grid.nx;
    assert_eq!(rho.values.len(), nx);
    let mean = rho.values.iter().map(|r| r - 1.0).sum::<f64>() / nx as f64;
    let mut buf: Vec<Complex64> = rho
        .values
        .iter()
        .map(|r| Complex64::new(r - 1.0 - mean, 0.0))
        .collect();

    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(nx).process(&mut buf);

    let inv_dx2 = 1.0 / (grid.dx * grid.dx);
    buf[0] = Complex64::new(0.0, 0.0);
    for (k, b) in buf.iter_mut().enumerate().skip(1) {
        let theta = 2.0 * PI * k as f64 / nx as f64;
        let symbol = (2.5 - 8.0 / 3.0 * theta.cos() + (2.0 * theta).cos() / 6.0) * inv_dx2;
        *b /= symbol;
    }

    planner.plan_fft_inverse(nx).process(&mut buf);
    let scale = 1.0 / nx as f64;
    let mut values: Vec<f64> = buf.iter().map(|c| c.re * scale).collect();
    let m = values.iter().sum::<f64>() / nx as f64;
    values.iter_mut().for_each(|v| *v -= m);
    Potential { values }
}

/// Fourth-order central difference `E = -Φ'`.
pub fn electric_field(phi: &Potential, grid: &PhaseSpaceGrid) -> Vec<f64> {
    let n = grid.nx;
    let p = &phi.values;
    let at = |i: isize| p[i.rem_euclid(n as isize) as usize];
    (0..n as isize)
        .map(|i| {
            -(at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) / (12.0 * grid.dx)
        })
        .collect()
}
