//! Uniform periodic-in-x, symmetric-in-v phase-space grid and the
//! zero-centered velocity-frequency grid used by the Fourier update.

use std::f64::consts::PI;

use crate::error::{Result, WignerError};

/// Phase-space mesh. Spatial nodes exclude the right endpoint (periodic);
/// velocity nodes include both `-lv` and `+lv`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceGrid {
    pub nx: usize,
    pub nv: usize,
    pub lx: f64,
    pub lv: f64,
    pub dx: f64,
    pub dv: f64,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    /// Velocity frequencies in DFT bin order (DC first).
    pub kv: Vec<f64>,
}

impl PhaseSpaceGrid {
    pub fn new(lx: f64, lv: f64, nx: usize, nv: usize) -> Result<Self> {
        if !(lx > 0.0 && lx.is_finite()) || !(lv > 0.0 && lv.is_finite()) {
            return Err(WignerError::InvalidGrid(format!(
                "domain sizes must be positive, got lx={lx}, lv={lv}"
            )));
        }
        if nx < 4 || nv < 4 {
            return Err(WignerError::InvalidGrid(format!(
                "need at least 4 nodes per direction, got nx={nx}, nv={nv}"
            )));
        }
        if !nv.is_multiple_of(2) {
            return Err(WignerError::InvalidGrid(format!(
                "nv must be even, got {nv}"
            )));
        }
        let dx = lx / nx as f64;
        let dv = 2.0 * lv / (nv - 1) as f64;
        let x = (0..nx).map(|i| i as f64 * dx).collect();
        let mut v: Vec<f64> = (0..nv).map(|j| -lv + j as f64 * dv).collect();
        v[nv - 1] = lv;
        let kv = FrequencyGrid::new(nv, lv).bin_order();
        Ok(Self {
            nx,
            nv,
            lx,
            lv,
            dx,
            dv,
            x,
            v,
            kv,
        })
    }

    /// Trapezoid weights in velocity (without the `dv` factor).
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let mut w = vec![1.0; self.nv];
        w[0] = 0.5;
        w[self.nv - 1] = 0.5;
        w
    }

    pub fn frequencies(&self) -> FrequencyGrid {
        FrequencyGrid::new(self.nv, self.lv)
    }

    /// DFT bin index of the Nyquist mode.
    pub fn nyquist_bin(&self) -> usize {
        self.nv / 2
    }
}

/// Velocity frequencies `(π/Lv)·m` for `m = -Nv/2 .. Nv/2-1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    nv: usize,
    scale: f64,
}

impl FrequencyGrid {
    pub fn new(nv: usize, lv: f64) -> Self {
        assert!(nv.is_multiple_of(2) && nv > 0, "frequency grid needs an even length");
        Self {
            nv,
            scale: 2.0 * PI / (2.0 * lv),
        }
    }

    /// Signed integer mode of DFT bin `bin`.
    pub fn signed_mode(&self, bin: usize) -> i64 {
        let n = self.nv as i64;
        let b = bin as i64;
        if b >= n / 2 {
            b - n
        } else {
            b
        }
    }

    pub fn frequency_of_bin(&self, bin: usize) -> f64 {
        self.scale * self.signed_mode(bin) as f64
    }

    /// Frequencies in zero-centered order, Nyquist first.
    pub fn centered(&self) -> Vec<f64> {
        let half = (self.nv / 2) as i64;
        (-half..half).map(|m| self.scale * m as f64).collect()
    }

    pub fn bin_order(&self) -> Vec<f64> {
        (0..self.nv).map(|b| self.frequency_of_bin(b)).collect()
    }

    /// Position in the zero-centered list of DFT bin `bin`.
    pub fn centered_position(&self, bin: usize) -> usize {
        (bin + self.nv / 2) % self.nv
    }

    /// DFT bin holding entry `pos` of the zero-centered list.
    pub fn bin_of_centered(&self, pos: usize) -> usize {
        (pos + self.nv / 2) % self.nv
    }

    pub fn nyquist(&self) -> f64 {
        -self.scale * (self.nv / 2) as f64
    }
}

/// Conjugate-symmetric partner of DFT bin `j` (0-based): `(nv - j) mod nv`.
///
/// In 1-based terms this is `mod(nv + 1 - j, nv) + 1`. Bins 0 (DC) and
/// `nv/2` (Nyquist) are their own partners.
pub fn opposite_index(j: usize, nv: usize) -> usize {
    debug_assert!(j < nv);
    (nv - j) % nv
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn small_grid_nodes() {
        let g = PhaseSpaceGrid::new(4.0 * PI, 2.0 * PI, 4, 4).unwrap();
        assert_relative_eq!(g.dx, PI);
        for (a, b) in g.x.iter().zip([0.0, PI, 2.0 * PI, 3.0 * PI]) {
            assert_relative_eq!(*a, b, epsilon = 1e-15);
        }
        assert_relative_eq!(g.dv, 4.0 * PI / 3.0);
        let want = [-2.0 * PI, -2.0 * PI / 3.0, 2.0 * PI / 3.0, 2.0 * PI];
        for (a, b) in g.v.iter().zip(want) {
            assert_relative_eq!(*a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn production_grids_satisfy_invariants() {
        for lx in [4.0 * PI, 5.0 * PI] {
            let g = PhaseSpaceGrid::new(lx, 2.0 * PI, 512, 512).unwrap();
            assert_eq!(g.x[0], 0.0);
            assert_relative_eq!(g.x[511], lx - g.dx, epsilon = 1e-12);
            assert_eq!(g.v[0], -2.0 * PI);
            assert_eq!(g.v[511], 2.0 * PI);
            assert!(g.dx > 0.0 && g.dv > 0.0);
        }
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(PhaseSpaceGrid::new(1.0, 1.0, 8, 9).is_err());
        assert!(PhaseSpaceGrid::new(0.0, 1.0, 8, 8).is_err());
        assert!(PhaseSpaceGrid::new(1.0, -1.0, 8, 8).is_err());
        assert!(PhaseSpaceGrid::new(1.0, 1.0, 2, 8).is_err());
    }

    #[test]
    fn frequency_examples() {
        let f = FrequencyGrid::new(4, 2.0 * PI);
        let c = f.centered();
        for (a, b) in c.iter().zip([-1.0, -0.5, 0.0, 0.5]) {
            assert_relative_eq!(*a, b, epsilon = 1e-15);
        }
        assert_relative_eq!(f.nyquist(), -1.0, epsilon = 1e-15);

        let f = FrequencyGrid::new(8, PI);
        let c = f.centered();
        for (a, b) in c.iter().zip([-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]) {
            assert_relative_eq!(*a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn permutation_round_trips() {
        let f = FrequencyGrid::new(16, 1.3);
        let centered = f.centered();
        let bins = f.bin_order();
        for b in 0..16 {
            let p = f.centered_position(b);
            assert_eq!(f.bin_of_centered(p), b);
            assert_eq!(centered[p], bins[b]);
        }
        assert_eq!(f.bin_order()[8], f.nyquist());
    }

    #[test]
    fn opposite_index_examples() {
        // 1-based (1, 8) -> 1, (5, 8) -> 5, (2, 8) -> 8
        assert_eq!(opposite_index(0, 8), 0);
        assert_eq!(opposite_index(4, 8), 4);
        assert_eq!(opposite_index(1, 8), 7);
    }

    #[test]
    fn opposite_index_involution_and_fixed_points() {
        for nv in [4, 8, 16, 64] {
            let mut fixed = vec![];
            for j in 0..nv {
                assert_eq!(opposite_index(opposite_index(j, nv), nv), j);
                if opposite_index(j, nv) == j {
                    fixed.push(j);
                }
            }
            assert_eq!(fixed, vec![0, nv / 2]);
        }
    }

    #[test]
    fn frequencies_antisymmetric_except_nyquist() {
        let f = FrequencyGrid::new(32, 2.0 * PI);
        for b in 0..32 {
            if b == 16 {
                continue;
            }
            let o = opposite_index(b, 32);
            assert_relative_eq!(f.frequency_of_bin(b), -f.frequency_of_bin(o));
        }
    }
}
