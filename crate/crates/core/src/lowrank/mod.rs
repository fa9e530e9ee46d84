//! Sampling-based low-rank compression: adaptive cross approximation (ACA)
//! with greedy column/row pivot refinement, followed by QR + SVD
//! re-compression into orthonormal factors.

mod aca;
mod truncate;

pub use aca::{aca, conjugate_pairs, AcaParams, CrossFactors};
pub use truncate::{recompress, svd_truncate};

use nalgebra::{ComplexField, DMatrix};

use crate::distribution::DistributionMatrix;
use crate::error::{Result, WignerError};

/// Field of matrix entries: `f64` in velocity space, `Complex64` in Fourier space.
pub trait Scalar: ComplexField<RealField = f64> + Copy + Send + Sync + 'static {}

impl<T: ComplexField<RealField = f64> + Copy + Send + Sync + 'static> Scalar for T {}

/// Entry-wise access to a matrix that is never assembled.
///
/// `column` and `row` may be overridden when a whole line is cheaper to
/// produce than its entries one by one.
pub trait MatrixEntries<T: Scalar>: Sync {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    fn entry(&self, i: usize, j: usize) -> T;

    fn column(&self, j: usize, out: &mut [T]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.entry(i, j);
        }
    }

    fn row(&self, i: usize, out: &mut [T]) {
        for (j, o) in out.iter_mut().enumerate() {
            *o = self.entry(i, j);
        }
    }
}

/// Adapter turning a closure into a [`MatrixEntries`] source.
pub struct FnEntries<F> {
    nrows: usize,
    ncols: usize,
    f: F,
}

impl<F> FnEntries<F> {
    pub fn new(nrows: usize, ncols: usize, f: F) -> Self {
        Self { nrows, ncols, f }
    }
}

impl<T: Scalar, F: Fn(usize, usize) -> T + Sync> MatrixEntries<T> for FnEntries<F> {
    fn nrows(&self) -> usize {
        self.nrows
    }
    fn ncols(&self) -> usize {
        self.ncols
    }
    fn entry(&self, i: usize, j: usize) -> T {
        (self.f)(i, j)
    }
}

impl<T: Scalar> MatrixEntries<T> for DMatrix<T> {
    fn nrows(&self) -> usize {
        self.nrows()
    }
    fn ncols(&self) -> usize {
        self.ncols()
    }
    fn entry(&self, i: usize, j: usize) -> T {
        self[(i, j)]
    }
}

/// `A ≈ U diag(σ) Vᵀ` with orthonormal columns in `U` and `V` and `σ`
/// positive, descending. No conjugation is applied to `V`.
#[derive(Debug, Clone, PartialEq)]
pub struct LowRankFactors<T: Scalar = f64> {
    pub u: DMatrix<T>,
    pub sigma: Vec<f64>,
    pub v: DMatrix<T>,
}

impl<T: Scalar> LowRankFactors<T> {
    pub fn empty(nrows: usize, ncols: usize) -> Self {
        Self {
            u: DMatrix::zeros(nrows, 0),
            sigma: vec![],
            v: DMatrix::zeros(ncols, 0),
        }
    }

    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    pub fn nrows(&self) -> usize {
        self.u.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.v.nrows()
    }

    pub fn check_shape(&self, nrows: usize, ncols: usize) -> Result<()> {
        if self.nrows() != nrows || self.ncols() != ncols {
            return Err(WignerError::ShapeMismatch {
                expected_rows: nrows,
                expected_cols: ncols,
                rows: self.nrows(),
                cols: self.ncols(),
            });
        }
        Ok(())
    }

    /// `Σ_m U(i,m) σ_m V(j,m)`, O(r).
    #[inline]
    pub fn evaluate_entry(&self, i: usize, j: usize) -> T {
        let mut acc = T::zero();
        for (m, s) in self.sigma.iter().enumerate() {
            acc += self.u[(i, m)] * self.v[(j, m)] * T::from_real(*s);
        }
        acc
    }

    pub fn to_dense(&self) -> DMatrix<T> {
        let mut us = self.u.clone();
        for (m, s) in self.sigma.iter().enumerate() {
            us.column_mut(m).scale_mut(*s);
        }
        us * self.v.transpose()
    }

    /// Scales the singular values only; `U` and `V` are left untouched.
    pub fn scale(&mut self, factor: f64) {
        self.sigma.iter_mut().for_each(|s| *s *= factor);
    }

    /// Largest deviation of `UᴴU` and `VᴴV` from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let defect = |m: &DMatrix<T>| {
            let g = m.adjoint() * m;
            let mut worst = 0.0f64;
            for a in 0..g.nrows() {
                for b in 0..g.ncols() {
                    let target = if a == b { 1.0 } else { 0.0 };
                    worst = worst.max((g[(a, b)] - T::from_real(target)).modulus());
                }
            }
            worst
        };
        defect(&self.u).max(defect(&self.v))
    }
}

impl LowRankFactors<f64> {
    pub fn to_distribution(&self) -> DistributionMatrix {
        let dense = self.to_dense();
        DistributionMatrix::from_fn(self.nrows(), self.ncols(), |i, j| dense[(i, j)])
    }
}

/// ACA followed by SVD truncation, with bookkeeping from the cross stage.
#[derive(Debug, Clone)]
pub struct Compression<T: Scalar> {
    pub factors: LowRankFactors<T>,
    /// Number of ACA rank-one terms before truncation.
    pub cross_rank: usize,
    pub evaluations: usize,
    pub hit_max_rank: bool,
}

pub fn compress<T: Scalar, M: MatrixEntries<T> + ?Sized>(
    a: &M,
    params: &AcaParams,
    eps_s: f64,
) -> Compression<T> {
    let cross = aca(a, params);
    Compression {
        factors: svd_truncate(&cross, eps_s),
        cross_rank: cross.rank(),
        evaluations: cross.evaluations,
        hit_max_rank: cross.hit_max_rank,
    }
}
