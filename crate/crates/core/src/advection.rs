//! Conservative semi-Lagrangian WENO advection in `x` for `∂_t f + v ∂_x f = 0`.
//!
//! The value at the departure point `x_d = x_k + ξ·dx` (`ξ ∈ [-½, ½)`) is
//! written in flux-difference form
//!
//! ```text
//! ξ ≤ 0:  f_k - |ξ| (F_{k+½} - F_{k-½})
//! ξ > 0:  f_k +  ξ  (F_{k+½} - F_{k-½})
//! ```
//!
//! where each flux is the average, over the part of a cell swept through
//! the interface, of a polynomial reconstruction from `2q-1` cells. Only the
//! constant (interface-value) term of the flux carries nonlinear WENO weights.
//! With linear weights the update equals Lagrange interpolation on the `2q`
//! points bracketing `x_d`. Per-column sums are preserved exactly because
//! the flux differences telescope around the periodic domain.

use rayon::prelude::*;

use crate::distribution::DistributionMatrix;
use crate::grid::PhaseSpaceGrid;

/// WENO regularization in the nonlinear weights `d_m / (ε + β_m)²`.
pub const WENO_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WenoOrder {
    Third,
    Fifth,
}

impl WenoOrder {
    pub fn from_int(order: u32) -> Option<Self> {
        match order {
            3 => Some(WenoOrder::Third),
            5 => Some(WenoOrder::Fifth),
            _ => None,
        }
    }

    pub fn as_int(self) -> u32 {
        match self {
            WenoOrder::Third => 3,
            WenoOrder::Fifth => 5,
        }
    }

    /// Half-width `q`: the flux uses `2q-1` cells, the update `2q` points.
    fn half_width(self) -> usize {
        match self {
            WenoOrder::Third => 2,
            WenoOrder::Fifth => 3,
        }
    }
}

/// Whether the reconstruction weights adapt to smoothness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weights {
    Nonlinear,
    Linear,
}

// Coefficients of s^1.. in the swept-cell average, rows are cells c-q+1..c+q-1.
const C3_HIGHER: [[f64; 2]; 3] = [
    [0.0, 1.0 / 6.0],
    [0.5, -1.0 / 3.0],
    [-0.5, 1.0 / 6.0],
];

const C5_HIGHER: [[f64; 4]; 5] = [
    [0.0, -1.0 / 24.0, 0.0, 1.0 / 120.0],
    [-1.0 / 24.0, 1.0 / 4.0, 1.0 / 24.0, -1.0 / 30.0],
    [5.0 / 8.0, -1.0 / 3.0, -1.0 / 8.0, 1.0 / 20.0],
    [-5.0 / 8.0, 1.0 / 12.0, 1.0 / 8.0, -1.0 / 30.0],
    [1.0 / 24.0, 1.0 / 24.0, -1.0 / 24.0, 1.0 / 120.0],
];

fn interface_value_3(w: &[f64], weights: Weights) -> f64 {
    let q0 = -0.5 * w[0] + 1.5 * w[1];
    let q1 = 0.5 * w[1] + 0.5 * w[2];
    let (d0, d1) = (1.0 / 3.0, 2.0 / 3.0);
    match weights {
        Weights::Linear => d0 * q0 + d1 * q1,
        Weights::Nonlinear => {
            let b0 = (w[1] - w[0]).powi(2);
            let b1 = (w[1] - w[2]).powi(2);
            let a0 = d0 / (WENO_EPS + b0).powi(2);
            let a1 = d1 / (WENO_EPS + b1).powi(2);
            (a0 * q0 + a1 * q1) / (a0 + a1)
        }
    }
}

fn interface_value_5(w: &[f64], weights: Weights) -> f64 {
    let q0 = (2.0 * w[0] - 7.0 * w[1] + 11.0 * w[2]) / 6.0;
    let q1 = (-w[1] + 5.0 * w[2] + 2.0 * w[3]) / 6.0;
    let q2 = (2.0 * w[2] + 5.0 * w[3] - w[4]) / 6.0;
    let (d0, d1, d2) = (0.1, 0.6, 0.3);
    match weights {
        Weights::Linear => d0 * q0 + d1 * q1 + d2 * q2,
        Weights::Nonlinear => {
            let b0 = 13.0 / 12.0 * (w[0] - 2.0 * w[1] + w[2]).powi(2)
                + 0.25 * (w[0] - 4.0 * w[1] + 3.0 * w[2]).powi(2);
            let b1 = 13.0 / 12.0 * (w[1] - 2.0 * w[2] + w[3]).powi(2)
                + 0.25 * (w[1] - w[3]).powi(2);
            let b2 = 13.0 / 12.0 * (w[2] - 2.0 * w[3] + w[4]).powi(2)
                + 0.25 * (3.0 * w[2] - 4.0 * w[3] + w[4]).powi(2);
            let a0 = d0 / (WENO_EPS + b0).powi(2);
            let a1 = d1 / (WENO_EPS + b1).powi(2);
            let a2 = d2 / (WENO_EPS + b2).powi(2);
            (a0 * q0 + a1 * q1 + a2 * q2) / (a0 + a1 + a2)
        }
    }
}

/// Average over `[c+½-s, c+½]` of the reconstruction on the window
/// centered at cell `c` (window listed left to right).
fn flux_right(w: &[f64], s: f64, order: WenoOrder, weights: Weights) -> f64 {
    match order {
        WenoOrder::Third => {
            let mut higher = [0.0; 2];
            for (m, wm) in w.iter().enumerate() {
                for (p, h) in higher.iter_mut().enumerate() {
                    *h += C3_HIGHER[m][p] * wm;
                }
            }
            interface_value_3(w, weights) + s * (higher[0] + s * higher[1])
        }
        WenoOrder::Fifth => {
            let mut higher = [0.0; 4];
            for (m, wm) in w.iter().enumerate() {
                for (p, h) in higher.iter_mut().enumerate() {
                    *h += C5_HIGHER[m][p] * wm;
                }
            }
            interface_value_5(w, weights)
                + s * (higher[0] + s * (higher[1] + s * (higher[2] + s * higher[3])))
        }
    }
}

/// Average over `[c-½, c-½+σ]`: the mirror image of [`flux_right`].
fn flux_left(w: &[f64], sigma: f64, order: WenoOrder, weights: Weights) -> f64 {
    let mut rev = [0.0; 5];
    let n = w.len();
    for (m, r) in rev.iter_mut().take(n).enumerate() {
        *r = w[n - 1 - m];
    }
    flux_right(&rev[..n], sigma, order, weights)
}

/// Integer cell shift and fractional offset of a displacement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shift {
    /// Whole cells moved (positive = to the right).
    pub cells: i64,
    /// Offset of the departure point from its base node, in `[-½, ½)`.
    pub xi: f64,
}

impl Shift {
    /// Shift for translating data by `displacement` (the departure point is
    /// `x - displacement`).
    pub fn from_displacement(displacement: f64, dx: f64) -> Self {
        let cells_f = displacement / dx;
        let cells = (cells_f - 0.5).ceil();
        let mut xi = cells - cells_f;
        let mut cells = cells as i64;
        // Guard the half-open interval against rounding in `cells - cells_f`.
        if xi >= 0.5 {
            xi -= 1.0;
            cells -= 1;
        } else if xi < -0.5 {
            xi += 1.0;
            cells += 1;
        }
        Self { cells, xi }
    }
}

/// Departure point of the characteristic through `x_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Departure {
    /// Base node index (0-based).
    pub k: usize,
    pub xi: f64,
    /// `x_d = mod(x_i - v·τ, Lx)`.
    pub xd: f64,
}

pub fn departure(i: usize, v: f64, tau: f64, grid: &PhaseSpaceGrid) -> Departure {
    let shift = Shift::from_displacement(v * tau, grid.dx);
    let k = (i as i64 - shift.cells).rem_euclid(grid.nx as i64) as usize;
    let xd = (grid.x[i] - v * tau).rem_euclid(grid.lx);
    Departure { k, xi: shift.xi, xd }
}

/// Value at `x_k + ξ·dx` from periodic reads `read(m)` of the data at node `m`
/// (any integer; callers wrap).
pub fn shifted_value<R: Fn(i64) -> f64>(
    read: R,
    k: i64,
    xi: f64,
    order: WenoOrder,
    weights: Weights,
) -> f64 {
    let q = order.half_width() as i64;
    let width = (2 * q - 1) as usize;
    // nodes k-q .. k+q (2q+1 values) cover both branches
    let mut buf = [0.0; 7];
    for (o, b) in buf.iter_mut().take((2 * q + 1) as usize).enumerate() {
        *b = read(k - q + o as i64);
    }
    let fk = buf[q as usize];
    if xi <= 0.0 {
        let s = -xi;
        // windows centered at k and k-1
        let right = flux_right(&buf[1..1 + width], s, order, weights);
        let left = flux_right(&buf[0..width], s, order, weights);
        fk - s * (right - left)
    } else {
        // windows centered at k+1 and k
        let right = flux_left(&buf[2..2 + width], xi, order, weights);
        let left = flux_left(&buf[1..1 + width], xi, order, weights);
        fk + xi * (right - left)
    }
}

/// Periodic translation of one column: `out_i ≈ f(x_i - displacement)`.
pub fn shift_periodic(
    input: &[f64],
    shift: Shift,
    order: WenoOrder,
    weights: Weights,
    out: &mut [f64],
) {
    let n = input.len() as i64;
    let q = order.half_width() as i64;
    let width = (2 * q - 1) as usize;
    let at = |m: i64| input[m.rem_euclid(n) as usize];
    if shift.cells == 0 && shift.xi == 0.0 {
        out.copy_from_slice(input);
        return;
    }
    // flux[c] belongs to cell c: right-interface flux for ξ ≤ 0, left for ξ > 0
    let mut window = [0.0; 5];
    let flux: Vec<f64> = (0..n)
        .map(|c| {
            for (o, w) in window.iter_mut().take(width).enumerate() {
                *w = at(c - q + 1 + o as i64);
            }
            if shift.xi <= 0.0 {
                flux_right(&window[..width], -shift.xi, order, weights)
            } else {
                flux_left(&window[..width], shift.xi, order, weights)
            }
        })
        .collect();
    let fl = |c: i64| flux[c.rem_euclid(n) as usize];
    for (i, o) in out.iter_mut().enumerate() {
        let k = i as i64 - shift.cells;
        *o = if shift.xi <= 0.0 {
            at(k) + shift.xi * (fl(k) - fl(k - 1))
        } else {
            at(k) + shift.xi * (fl(k + 1) - fl(k))
        };
    }
}

/// Advected value at `(x_i, v_j)` after time `tau`, reading the old solution
/// through `source(i', j)` with periodic `i'` already wrapped.
pub fn sl_entry<S: Fn(usize, usize) -> f64>(
    source: S,
    i: usize,
    j: usize,
    tau: f64,
    order: WenoOrder,
    grid: &PhaseSpaceGrid,
) -> f64 {
    let shift = Shift::from_displacement(grid.v[j] * tau, grid.dx);
    let n = grid.nx as i64;
    shifted_value(
        |m| source(m.rem_euclid(n) as usize, j),
        i as i64 - shift.cells,
        shift.xi,
        order,
        Weights::Nonlinear,
    )
}

/// Full-matrix advection half step.
pub fn sl_full(
    f: &DistributionMatrix,
    tau: f64,
    order: WenoOrder,
    grid: &PhaseSpaceGrid,
) -> DistributionMatrix {
    let (nx, nv) = (f.nx(), f.nv());
    let columns: Vec<Vec<f64>> = (0..nv)
        .into_par_iter()
        .map(|j| {
            let shift = Shift::from_displacement(grid.v[j] * tau, grid.dx);
            let col = f.column(j);
            let mut out = vec![0.0; nx];
            shift_periodic(&col, shift, order, Weights::Nonlinear, &mut out);
            out
        })
        .collect();
    DistributionMatrix::from_fn(nx, nv, |i, j| columns[j][i])
}
