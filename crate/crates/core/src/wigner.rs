//! Exact-in-time Fourier update of the nonlocal Wigner term with a frozen
//! potential. In velocity-Fourier space the term decouples into scalar ODEs
//! whose solution is a multiplication by the unit-modulus phase
//! `g^x(k) = exp((i/H)[Φ(x + Hk/2) - Φ(x - Hk/2)] Δt)`.
//!
//! DFT convention: forward unnormalized, inverse carries `1/Nv`; bin 0 is DC
//! and bin `Nv/2` is Nyquist. The Nyquist bin is always zeroed before the
//! inverse transform so that the result stays real.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::advection::{shift_periodic, shifted_value, Shift, WenoOrder, Weights};
use crate::distribution::DistributionMatrix;
use crate::grid::PhaseSpaceGrid;
use crate::lowrank::{recompress, LowRankFactors, MatrixEntries};
use crate::poisson::Potential;

/// Fifth-order WENO interpolation of the periodic potential at `xq`.
pub fn interpolate_potential(phi: &Potential, xq: f64, grid: &PhaseSpaceGrid) -> f64 {
    let shift = Shift::from_displacement(-xq, grid.dx);
    let n = grid.nx as i64;
    shifted_value(
        |m| phi.values[m.rem_euclid(n) as usize],
        -shift.cells,
        shift.xi,
        WenoOrder::Fifth,
        Weights::Nonlinear,
    )
}

/// Deferred evaluator of `g^{x_i}(k_v(j))` for one frozen potential.
#[derive(Debug, Clone)]
pub struct PhaseMultiplier {
    phi: Vec<f64>,
    factor: f64,
    /// Per DFT bin: shifts sampling `Φ(x + d)` and `Φ(x - d)`, `d = H k_v / 2`.
    plus: Vec<Shift>,
    minus: Vec<Shift>,
    nyquist: usize,
}

impl PhaseMultiplier {
    pub fn new(phi: &Potential, h: f64, dt: f64, grid: &PhaseSpaceGrid) -> Self {
        assert!(h > 0.0, "H must be positive");
        let (plus, minus) = grid
            .kv
            .iter()
            .map(|k| {
                let d = 0.5 * h * k;
                (
                    Shift::from_displacement(-d, grid.dx),
                    Shift::from_displacement(d, grid.dx),
                )
            })
            .unzip();
        Self {
            phi: phi.values.clone(),
            factor: dt / h,
            plus,
            minus,
            nyquist: grid.nyquist_bin(),
        }
    }

    fn sample(&self, i: usize, s: Shift) -> f64 {
        let n = self.phi.len() as i64;
        shifted_value(
            |m| self.phi[m.rem_euclid(n) as usize],
            i as i64 - s.cells,
            s.xi,
            WenoOrder::Fifth,
            Weights::Nonlinear,
        )
    }

    /// Phase at spatial node `i`, DFT bin `j`.
    pub fn value(&self, i: usize, j: usize) -> Complex64 {
        let diff = self.sample(i, self.plus[j]) - self.sample(i, self.minus[j]);
        Complex64::from_polar(1.0, self.factor * diff)
    }

    /// All spatial nodes of bin `j` at once.
    pub fn column(&self, j: usize, out: &mut [Complex64]) {
        let n = self.phi.len();
        let mut p = vec![0.0; n];
        let mut m = vec![0.0; n];
        shift_periodic(&self.phi, self.plus[j], WenoOrder::Fifth, Weights::Nonlinear, &mut p);
        shift_periodic(&self.phi, self.minus[j], WenoOrder::Fifth, Weights::Nonlinear, &mut m);
        for ((o, a), b) in out.iter_mut().zip(&p).zip(&m) {
            *o = Complex64::from_polar(1.0, self.factor * (a - b));
        }
    }

    pub fn nyquist_bin(&self) -> usize {
        self.nyquist
    }
}

pub fn phase_multiplier(
    phi: &Potential,
    h: f64,
    dt: f64,
    i: usize,
    j: usize,
    grid: &PhaseSpaceGrid,
) -> Complex64 {
    let d = 0.5 * h * grid.kv[j];
    let plus = interpolate_potential(phi, (grid.x[i] + d).rem_euclid(grid.lx), grid);
    let minus = interpolate_potential(phi, (grid.x[i] - d).rem_euclid(grid.lx), grid);
    Complex64::from_polar(1.0, dt / h * (plus - minus))
}

/// Result of a full-rank Fourier stage.
#[derive(Debug, Clone)]
pub struct FourierUpdate {
    pub solution: DistributionMatrix,
    /// `|Σ_ij Im f_ij| dx dv` of the inverse transform before it is dropped.
    pub imag_residual: f64,
}

struct RowTransforms {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl RowTransforms {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }
}

/// Row-wise: forward DFT in `v`, multiply by the phase, zero Nyquist,
/// inverse DFT, keep the real part.
pub fn fourier_update_full(
    f: &DistributionMatrix,
    phi: &Potential,
    h: f64,
    dt: f64,
    grid: &PhaseSpaceGrid,
) -> FourierUpdate {
    let (nx, nv) = (f.nx(), f.nv());
    let phase = PhaseMultiplier::new(phi, h, dt, grid);
    let table: Vec<Vec<Complex64>> = (0..nv)
        .into_par_iter()
        .map(|j| {
            let mut col = vec![Complex64::new(0.0, 0.0); nx];
            phase.column(j, &mut col);
            col
        })
        .collect();
    let fft = RowTransforms::new(nv);
    let nyq = grid.nyquist_bin();
    let inv_n = 1.0 / nv as f64;
    let rows: Vec<(Vec<f64>, f64)> = (0..nx)
        .into_par_iter()
        .map(|i| {
            let mut buf: Vec<Complex64> = f.row(i).iter().map(|&x| Complex64::new(x, 0.0)).collect();
            fft.forward.process(&mut buf);
            for (j, b) in buf.iter_mut().enumerate() {
                *b *= table[j][i];
            }
            buf[nyq] = Complex64::new(0.0, 0.0);
            fft.inverse.process(&mut buf);
            let imag: f64 = buf.iter().map(|c| c.im * inv_n).sum();
            (buf.iter().map(|c| c.re * inv_n).collect(), imag)
        })
        .collect();
    let imag_sum: f64 = rows.iter().map(|(_, im)| im).sum();
    let mut out = DistributionMatrix::zeros(nx, nv);
    for (i, (row, _)) in rows.into_iter().enumerate() {
        out.row_mut(i).copy_from_slice(&row);
    }
    FourierUpdate {
        solution: out,
        imag_residual: (imag_sum * grid.dx * grid.dv).abs(),
    }
}

/// Real spatial factor with the velocity factor transformed column-wise.
#[derive(Debug, Clone)]
pub struct FourierFactors {
    pub u: DMatrix<f64>,
    pub sigma: Vec<f64>,
    pub v_hat: DMatrix<Complex64>,
}

impl FourierFactors {
    /// Column-wise forward DFT of `V`.
    pub fn from_velocity(factors: &LowRankFactors<f64>) -> Self {
        let nv = factors.ncols();
        let fft = RowTransforms::new(nv);
        let mut v_hat = DMatrix::<Complex64>::zeros(nv, factors.rank());
        for m in 0..factors.rank() {
            let mut buf: Vec<Complex64> =
                factors.v.column(m).iter().map(|&x| Complex64::new(x, 0.0)).collect();
            fft.forward.process(&mut buf);
            for (j, b) in buf.into_iter().enumerate() {
                v_hat[(j, m)] = b;
            }
        }
        Self {
            u: factors.u.clone(),
            sigma: factors.sigma.clone(),
            v_hat,
        }
    }

    pub fn rank(&self) -> usize {
        self.sigma.len()
    }
}

/// Entry accessor for the Fourier-space matrix after the phase update.
pub struct FourierEntries<'a> {
    factors: &'a FourierFactors,
    phase: &'a PhaseMultiplier,
    /// `σ_m Ṽ(j, m)`, row-major by bin.
    weighted: Vec<Complex64>,
}

impl<'a> FourierEntries<'a> {
    pub fn new(factors: &'a FourierFactors, phase: &'a PhaseMultiplier) -> Self {
        let r = factors.rank();
        let nv = factors.v_hat.nrows();
        let mut weighted = Vec::with_capacity(nv * r);
        for j in 0..nv {
            for m in 0..r {
                weighted.push(factors.v_hat[(j, m)] * factors.sigma[m]);
            }
        }
        Self {
            factors,
            phase,
            weighted,
        }
    }

    fn base(&self, i: usize, j: usize) -> Complex64 {
        let r = self.factors.rank();
        let w = &self.weighted[j * r..(j + 1) * r];
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, wm) in w.iter().enumerate() {
            acc += wm * self.factors.u[(i, m)];
        }
        acc
    }
}

impl MatrixEntries<Complex64> for FourierEntries<'_> {
    fn nrows(&self) -> usize {
        self.factors.u.nrows()
    }

    fn ncols(&self) -> usize {
        self.factors.v_hat.nrows()
    }

    fn entry(&self, i: usize, j: usize) -> Complex64 {
        if j == self.phase.nyquist_bin() {
            return Complex64::new(0.0, 0.0);
        }
        self.base(i, j) * self.phase.value(i, j)
    }

    fn column(&self, j: usize, out: &mut [Complex64]) {
        if j == self.phase.nyquist_bin() || self.factors.rank() == 0 {
            out.fill(Complex64::new(0.0, 0.0));
            return;
        }
        self.phase.column(j, out);
        for (i, o) in out.iter_mut().enumerate() {
            *o *= self.base(i, j);
        }
    }
}

pub fn fourier_entry(
    factors: &FourierFactors,
    phase: &PhaseMultiplier,
    i: usize,
    j: usize,
) -> Complex64 {
    FourierEntries::new(factors, phase).entry(i, j)
}

/// Brings Fourier-space factors back to velocity space.
///
/// The inverse DFT of `Ṽ` gives a complex factorization whose product is
/// real up to roundoff; the imaginary part is measured, dropped, and the
/// real part re-factored into real orthonormal factors.
pub fn to_velocity_space(
    factors: &LowRankFactors<Complex64>,
    grid: &PhaseSpaceGrid,
    eps_s: f64,
) -> (LowRankFactors<f64>, f64) {
    let (nx, nv, r) = (factors.nrows(), factors.ncols(), factors.rank());
    if r == 0 {
        return (LowRankFactors::empty(nx, nv), 0.0);
    }
    let fft = RowTransforms::new(nv);
    let inv_n = 1.0 / nv as f64;
    let mut w = DMatrix::<Complex64>::zeros(nv, r);
    for m in 0..r {
        let mut buf: Vec<Complex64> = factors.v.column(m).iter().copied().collect();
        fft.inverse.process(&mut buf);
        for (j, b) in buf.into_iter().enumerate() {
            w[(j, m)] = b * inv_n;
        }
    }
    let mut total = Complex64::new(0.0, 0.0);
    for m in 0..r {
        let su: Complex64 = factors.u.column(m).iter().sum();
        let sw: Complex64 = w.column(m).iter().sum();
        total += su * sw * factors.sigma[m];
    }
    let imag_residual = (total.im * grid.dx * grid.dv).abs();

    // Re(U Σ Wᵀ) = Re(UΣ) Re(W)ᵀ - Im(UΣ) Im(W)ᵀ
    let left = DMatrix::from_fn(nx, 2 * r, |i, c| {
        let m = c % r;
        let x = factors.u[(i, m)] * factors.sigma[m];
        if c < r {
            x.re
        } else {
            x.im
        }
    });
    let right = DMatrix::from_fn(nv, 2 * r, |j, c| {
        let m = c % r;
        if c < r {
            w[(j, m)].re
        } else {
            -w[(j, m)].im
        }
    });
    (recompress(&left, &right, eps_s), imag_residual)
}
