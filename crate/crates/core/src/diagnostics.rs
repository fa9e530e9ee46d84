//! Conservation, field-energy and rank-structure measurements.

use num_complex::Complex64;

use crate::distribution::DistributionMatrix;
use crate::grid::PhaseSpaceGrid;
use crate::lowrank::LowRankFactors;

/// Energy fractions reported in [`DiagnosticsRecord::ranks`].
pub const ENERGY_FRACTIONS: [f64; 5] = [0.95, 0.99, 0.9999, 0.999999, 0.99999999];

/// One row of the diagnostics history. Ranks are `-1` when not computed.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub mass: f64,
    pub mass_rel_err: f64,
    pub momentum: f64,
    pub momentum_err: f64,
    pub ee_norm: f64,
    pub rank: i64,
    pub ranks: [i64; 5],
    pub imag_residual: f64,
}

/// `Σ_i Σ_j w_j v_j f_ij dx dv` with trapezoid weights in `v`.
pub fn momentum_full(f: &DistributionMatrix, grid: &PhaseSpaceGrid) -> f64 {
    let vw = velocity_weights(grid, |v| v);
    (0..f.nx())
        .map(|i| f.row(i).iter().zip(&vw).map(|(a, b)| a * b).sum::<f64>())
        .sum::<f64>()
        * grid.dx
        * grid.dv
}

/// Same quadrature as [`momentum_full`], contracted through the factors.
pub fn momentum_lowrank(factors: &LowRankFactors, grid: &PhaseSpaceGrid) -> f64 {
    contract(factors, &velocity_weights(grid, |v| v)) * grid.dx * grid.dv
}

/// `∫∫ |v| f dv dx`, the normalization of the momentum error.
pub fn abs_velocity_moment_full(f: &DistributionMatrix, grid: &PhaseSpaceGrid) -> f64 {
    let vw = velocity_weights(grid, f64::abs);
    (0..f.nx())
        .map(|i| f.row(i).iter().zip(&vw).map(|(a, b)| a * b).sum::<f64>())
        .sum::<f64>()
        * grid.dx
        * grid.dv
}

pub fn abs_velocity_moment_lowrank(factors: &LowRankFactors, grid: &PhaseSpaceGrid) -> f64 {
    contract(factors, &velocity_weights(grid, f64::abs)) * grid.dx * grid.dv
}

fn velocity_weights(grid: &PhaseSpaceGrid, g: impl Fn(f64) -> f64) -> Vec<f64> {
    grid.trapezoid_weights()
        .iter()
        .zip(&grid.v)
        .map(|(w, v)| w * g(*v))
        .collect()
}

/// `Σ_m σ_m (Σ_i U_im)(Σ_j c_j V_jm)`.
pub(crate) fn contract(factors: &LowRankFactors, c: &[f64]) -> f64 {
    (0..factors.rank())
        .map(|m| {
            let su: f64 = factors.u.column(m).iter().sum();
            let sv: f64 = factors.v.column(m).iter().zip(c).map(|(a, b)| a * b).sum();
            factors.sigma[m] * su * sv
        })
        .sum()
}

/// `(Σ_i E_i² dx)^{1/2}`.
pub fn electrostatic_energy(e: &[f64], grid: &PhaseSpaceGrid) -> f64 {
    (e.iter().map(|x| x * x).sum::<f64>() * grid.dx).sqrt()
}

/// Smallest `r` whose leading squared singular values hold `fraction` of
/// the total energy. Expects nonnegative values in descending order.
pub fn rank_at_energy(sigma: &[f64], fraction: f64) -> usize {
    assert!(fraction > 0.0 && fraction <= 1.0, "fraction must lie in (0, 1]");
    let total: f64 = sigma.iter().map(|s| s * s).sum();
    if total == 0.0 {
        return 0;
    }
    let target = fraction * total;
    let mut acc = 0.0;
    for (r, s) in sigma.iter().enumerate() {
        acc += s * s;
        // Guard the last term against summation-order roundoff.
        if acc >= target * (1.0 - 4.0 * f64::EPSILON) {
            return r + 1;
        }
    }
    sigma.len()
}

pub fn ranks_at_thresholds(sigma: &[f64]) -> [i64; 5] {
    ENERGY_FRACTIONS.map(|f| rank_at_energy(sigma, f) as i64)
}

/// `|Σ_ij Im f_ij| dx dv` over complex phase-space values.
pub fn imaginary_residual(values: &[Complex64], grid: &PhaseSpaceGrid) -> f64 {
    (values.iter().map(|c| c.im).sum::<f64>() * grid.dx * grid.dv).abs()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DampingFit {
    pub gamma: f64,
    /// Peak times and `ln ee_norm` values used in the fit.
    pub peaks: Vec<(f64, f64)>,
}

/// Fits `ln ee ≈ a - γ t` through the local maxima of `ee` inside
/// `[t0, t1]`. Each peak is refined by the vertex of the parabola through
/// the neighbouring log samples. Returns `None` with fewer than three peaks.
pub fn fit_damping_rate(series: &[(f64, f64)], window: (f64, f64)) -> Option<DampingFit> {
    let (t0, t1) = window;
    let mut peaks = Vec::new();
    for k in 1..series.len().saturating_sub(1) {
        let (tp, yp) = series[k - 1];
        let (tc, yc) = series[k];
        let (tn, yn) = series[k + 1];
        if !(tc >= t0 && tc <= t1) || !(yc > yp && yc >= yn) || yp <= 0.0 || yn <= 0.0 {
            continue;
        }
        let (lp, lc, ln) = (yp.ln(), yc.ln(), yn.ln());
        peaks.push(parabola_vertex((tp, lp), (tc, lc), (tn, ln)).unwrap_or((tc, lc)));
    }
    if peaks.len() < 3 {
        return None;
    }
    let n = peaks.len() as f64;
    let mt = peaks.iter().map(|p| p.0).sum::<f64>() / n;
    let my = peaks.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = peaks.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = peaks.iter().map(|p| (p.0 - mt).powi(2)).sum();
    Some(DampingFit {
        gamma: -sxy / sxx,
        peaks,
    })
}

fn parabola_vertex(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> Option<(f64, f64)> {
    let d1 = (b.1 - a.1) / (b.0 - a.0);
    let d2 = (c.1 - b.1) / (c.0 - b.0);
    let curv = (d2 - d1) / (c.0 - a.0);
    if curv >= 0.0 || !curv.is_finite() {
        return None;
    }
    // y = b.1 + s (t - b.0) + curv (t - b.0)²
    let s = d1 + curv * (b.0 - a.0);
    let dt = -s / (2.0 * curv);
    if dt.abs() > (c.0 - a.0) {
        return None;
    }
    Some((b.0 + dt, b.1 + s * dt + curv * dt * dt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn grid(n: usize) -> PhaseSpaceGrid {
        PhaseSpaceGrid::new(4.0 * PI, 2.0 * PI, n, n).unwrap()
    }

    #[test]
    fn momentum_of_even_data_vanishes() {
        let g = grid(64);
        let f = DistributionMatrix::from_fn(64, 64, |i, j| {
            let v = g.v[j];
            v * v * (-0.5 * v * v).exp() * (2.0 + (0.5 * g.x[i]).cos())
        });
        assert!(momentum_full(&f, &g).abs() < 1e-13);
    }

    #[test]
    fn momentum_matches_direct_quadrature() {
        let g = grid(32);
        let f = DistributionMatrix::from_fn(32, 32, |i, j| {
            let v = g.v[j] - 0.7;
            (-0.5 * v * v).exp() * (1.0 + 0.1 * g.x[i])
        });
        let mut want = 0.0;
        for i in 0..32 {
            for j in 0..32 {
                let w = if j == 0 || j == 31 { 0.5 } else { 1.0 };
                want += g.v[j] * f.get(i, j) * w * g.dx * g.dv;
            }
        }
        assert_relative_eq!(momentum_full(&f, &g), want, max_relative = 1e-13);
        assert!(want > 0.0);
    }

    #[test]
    fn lowrank_moments_match_dense() {
        let g = grid(48);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = DMatrix::from_fn(48, 3, |_, _| rng.random_range(-1.0..1.0)).qr().q();
        let v = DMatrix::from_fn(48, 3, |_, _| rng.random_range(-1.0..1.0)).qr().q();
        let lr = LowRankFactors {
            u,
            sigma: vec![2.0, 1.0, 0.3],
            v,
        };
        let dense = lr.to_distribution();
        let (a, b) = (momentum_lowrank(&lr, &g), momentum_full(&dense, &g));
        assert!((a - b).abs() <= 1e-13 * b.abs().max(1.0));
        let (a, b) = (
            abs_velocity_moment_lowrank(&lr, &g),
            abs_velocity_moment_full(&dense, &g),
        );
        assert!((a - b).abs() <= 1e-13 * b.abs().max(1.0));
    }

    #[test]
    fn electrostatic_energy_cases() {
        let g = grid(64);
        assert_eq!(electrostatic_energy(&[0.0; 64], &g), 0.0);
        let e: Vec<f64> = g.x.iter().map(|x| (2.0 * PI * x / g.lx).sin()).collect();
        let n = electrostatic_energy(&e, &g);
        assert_relative_eq!(n, (g.lx / 2.0).sqrt(), max_relative = 1e-12);
        let e2: Vec<f64> = e.iter().map(|x| 2.0 * x).collect();
        assert_relative_eq!(electrostatic_energy(&e2, &g), 2.0 * n, max_relative = 1e-14);
    }

    #[test]
    fn rank_at_energy_cases() {
        assert_eq!(rank_at_energy(&[1.0], 0.3), 1);
        assert_eq!(rank_at_energy(&[1.0], 1.0), 1);
        assert_eq!(rank_at_energy(&[1.0; 4], 0.5), 2);
        assert_eq!(rank_at_energy(&[0.0; 3], 0.9), 0);
        assert_eq!(rank_at_energy(&[], 0.9), 0);

        let sigma: Vec<f64> = (0..30).map(|m| 0.5f64.powi(m)).collect();
        let total: f64 = sigma.iter().map(|s| s * s).sum();
        let mut partial = 0.0;
        let mut want = 0;
        for (r, s) in sigma.iter().enumerate() {
            partial += s * s;
            if partial >= 0.99 * total {
                want = r + 1;
                break;
            }
        }
        assert_eq!(rank_at_energy(&sigma, 0.99), want);
        let r = ranks_at_thresholds(&sigma);
        assert!(r.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn imaginary_residual_cases() {
        let g = grid(8);
        let real = vec![Complex64::new(1.0, 0.0); 64];
        assert_eq!(imaginary_residual(&real, &g), 0.0);
        let mut bad = real.clone();
        bad[3].im = 0.5;
        assert_relative_eq!(imaginary_residual(&bad, &g), 0.5 * g.dx * g.dv);
    }

    fn synthetic(gamma: f64, dt: f64, t_end: f64) -> Vec<(f64, f64)> {
        (0..=((t_end / dt) as usize))
            .map(|k| {
                let t = k as f64 * dt;
                (t, (-gamma * t).exp() * (1.4 * t).cos().abs())
            })
            .collect()
    }

    #[test]
    fn damping_fit_recovers_constructed_rate() {
        let s = synthetic(0.1516, 0.01, 30.0);
        let fit = fit_damping_rate(&s, (0.0, 20.0)).unwrap();
        assert!((fit.gamma - 0.1516).abs() < 1e-3, "{}", fit.gamma);

        // Coarse sampling is handled by the peak refinement.
        let s = synthetic(0.1516, 0.2, 30.0);
        let fit = fit_damping_rate(&s, (0.0, 20.0)).unwrap();
        assert!((fit.gamma - 0.1516).abs() < 5e-3, "{}", fit.gamma);
    }

    #[test]
    fn damping_fit_scale_invariant_and_unavailable() {
        let s = synthetic(0.2, 0.05, 30.0);
        let scaled: Vec<(f64, f64)> = s.iter().map(|&(t, y)| (t, 7.5 * y)).collect();
        let a = fit_damping_rate(&s, (0.0, 20.0)).unwrap().gamma;
        let b = fit_damping_rate(&scaled, (0.0, 20.0)).unwrap().gamma;
        assert_relative_eq!(a, b, max_relative = 1e-10);
        // Only the maximum near t = π/1.4 lies inside.
        assert!(fit_damping_rate(&s, (1.0, 4.0)).is_none());
    }
}
