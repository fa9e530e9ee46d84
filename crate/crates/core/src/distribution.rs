use crate::error::{Result, WignerError};
use crate::grid::PhaseSpaceGrid;

/// Dense `nx × nv` phase-space solution, row-major with `x` as the slow index.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionMatrix {
    nx: usize,
    nv: usize,
    data: Vec<f64>,
}

impl DistributionMatrix {
    pub fn zeros(nx: usize, nv: usize) -> Self {
        Self {
            nx,
            nv,
            data: vec![0.0; nx * nv],
        }
    }

    pub fn from_fn(nx: usize, nv: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(nx * nv);
        for i in 0..nx {
            for j in 0..nv {
                data.push(f(i, j));
            }
        }
        Self { nx, nv, data }
    }

    pub fn from_vec(nx: usize, nv: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != nx * nv {
            return Err(WignerError::ShapeMismatch {
                expected_rows: nx,
                expected_cols: nv,
                rows: data.len() / nv.max(1),
                cols: nv,
            });
        }
        Ok(Self { nx, nv, data })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn nv(&self) -> usize {
        self.nv
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.nv + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.nv + j] = value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.nv..(i + 1) * self.nv]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.nv..(i + 1) * self.nv]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.nx).map(|i| self.get(i, j)).collect()
    }

    pub fn scale(&mut self, factor: f64) {
        self.data.iter_mut().for_each(|x| *x *= factor);
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// `‖self - other‖_F / ‖other‖_F`.
    pub fn relative_l2_distance(&self, other: &DistributionMatrix) -> f64 {
        let diff: f64 = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        diff / other.frobenius_norm()
    }

    pub fn check_shape(&self, grid: &PhaseSpaceGrid) -> Result<()> {
        if self.nx != grid.nx || self.nv != grid.nv {
            return Err(WignerError::ShapeMismatch {
                expected_rows: grid.nx,
                expected_cols: grid.nv,
                rows: self.nx,
                cols: self.nv,
            });
        }
        Ok(())
    }
}
