use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{MatrixEntries, Scalar};
use crate::grid::opposite_index;

/// Consecutive zero-pivot attempts tolerated before the residual is
/// declared exhausted.
const MAX_PIVOT_FAILURES: usize = 3;

#[derive(Debug, Clone)]
pub struct AcaParams {
    /// Relative tolerance on the Frobenius norm of the latest rank-one update.
    pub eps_c: f64,
    /// Number of random candidate pairs per iteration.
    pub candidates: usize,
    /// Rank cap; `None` means `min(nrows, ncols) / 2`.
    pub max_rank: Option<usize>,
    pub seed: u64,
    /// Column partner map. When set, every selected column `j` is followed
    /// immediately by `pairs[j]`.
    pub pairs: Option<Vec<usize>>,
}

impl Default for AcaParams {
    fn default() -> Self {
        Self {
            eps_c: 1e-4,
            candidates: 12,
            max_rank: None,
            seed: 0,
            pairs: None,
        }
    }
}

/// Conjugate-symmetric partner map over `nv` DFT bins.
pub fn conjugate_pairs(nv: usize) -> Vec<usize> {
    (0..nv).map(|j| opposite_index(j, nv)).collect()
}

/// Output of ACA: `A_k = Σ_ℓ c_ℓ r_ℓ / p_ℓ` with residual columns `c_ℓ`,
/// residual rows `r_ℓ` and pivots `p_ℓ`.
#[derive(Debug, Clone)]
pub struct CrossFactors<T: Scalar> {
    pub nrows: usize,
    pub ncols: usize,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub col_stack: Vec<Vec<T>>,
    pub row_stack: Vec<Vec<T>>,
    pub pivots: Vec<T>,
    /// Matrix entries requested from the source.
    pub evaluations: usize,
    pub hit_max_rank: bool,
}

impl<T: Scalar> CrossFactors<T> {
    fn new(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            rows: vec![],
            cols: vec![],
            col_stack: vec![],
            row_stack: vec![],
            pivots: vec![],
            evaluations: 0,
            hit_max_rank: false,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Entry of the cross reconstruction.
    pub fn approx(&self, i: usize, j: usize) -> T {
        let mut acc = T::zero();
        for l in 0..self.rank() {
            acc += self.col_stack[l][i] * self.row_stack[l][j] / self.pivots[l];
        }
        acc
    }

    fn residual_column<M: MatrixEntries<T> + ?Sized>(&mut self, a: &M, j: usize) -> Vec<T> {
        let mut col = vec![T::zero(); self.nrows];
        a.column(j, &mut col);
        self.evaluations += self.nrows;
        for l in 0..self.rank() {
            let coeff = self.row_stack[l][j] / self.pivots[l];
            for (x, c) in col.iter_mut().zip(&self.col_stack[l]) {
                *x -= *c * coeff;
            }
        }
        col
    }

    fn residual_row<M: MatrixEntries<T> + ?Sized>(&mut self, a: &M, i: usize) -> Vec<T> {
        let mut row = vec![T::zero(); self.ncols];
        a.row(i, &mut row);
        self.evaluations += self.ncols;
        for l in 0..self.rank() {
            let coeff = self.col_stack[l][i] / self.pivots[l];
            for (x, r) in row.iter_mut().zip(&self.row_stack[l]) {
                *x -= *r * coeff;
            }
        }
        row
    }

    fn residual_entry<M: MatrixEntries<T> + ?Sized>(&mut self, a: &M, i: usize, j: usize) -> T {
        self.evaluations += 1;
        a.entry(i, j) - self.approx(i, j)
    }

    /// Appends a rank-one term and returns `(‖update‖_F², 2 Re⟨A_{k-1}, update⟩)`.
    fn push(&mut self, i: usize, j: usize, col: Vec<T>, row: Vec<T>, pivot: T) -> (f64, f64) {
        let scaled: Vec<T> = col.iter().map(|c| *c / pivot).collect();
        let mut cross = 0.0;
        for l in 0..self.rank() {
            let pl = self.pivots[l];
            let mut ca = T::zero();
            for (a, b) in self.col_stack[l].iter().zip(&scaled) {
                ca += (*a / pl).conjugate() * *b;
            }
            let mut rb = T::zero();
            for (a, b) in self.row_stack[l].iter().zip(&row) {
                rb += a.conjugate() * *b;
            }
            cross += (ca * rb).real();
        }
        let norm_c: f64 = scaled.iter().map(|x| x.modulus_squared()).sum();
        let norm_r: f64 = row.iter().map(|x| x.modulus_squared()).sum();
        self.rows.push(i);
        self.cols.push(j);
        self.col_stack.push(col);
        self.row_stack.push(row);
        self.pivots.push(pivot);
        (norm_c * norm_r, 2.0 * cross)
    }
}

fn argmax<T: Scalar>(values: &[T], used: &[bool]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (idx, (v, u)) in values.iter().zip(used).enumerate() {
        if *u {
            continue;
        }
        let m = v.modulus();
        if best.is_none_or(|(_, b)| m > b) {
            best = Some((idx, m));
        }
    }
    best
}

fn unused(used: &[bool]) -> Vec<usize> {
    used.iter()
        .enumerate()
        .filter(|(_, u)| !**u)
        .map(|(i, _)| i)
        .collect()
}

/// Adaptive cross approximation with random candidate sampling followed by
/// a column argmax and then a row argmax (no rook condition).
///
/// Stops once `‖c‖‖r‖/|p| < eps_c · ‖A_k‖_F` or the rank cap is reached.
pub fn aca<T: Scalar, M: MatrixEntries<T> + ?Sized>(a: &M, params: &AcaParams) -> CrossFactors<T> {
    let (nrows, ncols) = (a.nrows(), a.ncols());
    let mut cross = CrossFactors::new(nrows, ncols);
    if nrows == 0 || ncols == 0 {
        return cross;
    }
    let max_rank = params
        .max_rank
        .unwrap_or((nrows.min(ncols) / 2).max(1))
        .min(nrows.min(ncols));
    if let Some(p) = &params.pairs {
        assert_eq!(p.len(), ncols, "pair map must cover every column");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut row_used = vec![false; nrows];
    let mut col_used = vec![false; ncols];
    let mut norm2 = 0.0f64;
    let mut scale = 0.0f64;
    let mut failures = 0;

    loop {
        if cross.rank() >= max_rank {
            cross.hit_max_rank = true;
            log::warn!("ACA reached the rank cap {max_rank}");
            break;
        }
        let free_rows = unused(&row_used);
        let free_cols = unused(&col_used);
        if free_rows.is_empty() || free_cols.is_empty() {
            break;
        }

        // Phase I: best of p random candidates.
        let p = params.candidates.max(1);
        let n_pairs = p.min(free_rows.len()).min(free_cols.len());
        let ri = index::sample(&mut rng, free_rows.len(), n_pairs);
        let ci = index::sample(&mut rng, free_cols.len(), n_pairs);
        let mut j_star = free_cols[ci.index(0)];
        let mut best = -1.0;
        for (r, c) in ri.iter().zip(ci.iter()) {
            let (i, j) = (free_rows[r], free_cols[c]);
            let m = cross.residual_entry(a, i, j).modulus();
            scale = scale.max(m);
            if m > best {
                best = m;
                j_star = j;
            }
        }

        // Greedy refinement: column, then row.
        let col_star = cross.residual_column(a, j_star);
        let (i_k, _) = argmax(&col_star, &row_used).expect("free rows exist");
        let row = cross.residual_row(a, i_k);
        let (j_k, piv_mod) = argmax(&row, &col_used).expect("free columns exist");
        scale = scale.max(piv_mod);
        if piv_mod <= tiny(scale) {
            failures += 1;
            if failures >= MAX_PIVOT_FAILURES {
                break;
            }
            continue;
        }
        failures = 0;
        let pivot = row[j_k];
        let col = if j_k == j_star {
            col_star
        } else {
            cross.residual_column(a, j_k)
        };
        let (upd2, cross_term) = cross.push(i_k, j_k, col, row, pivot);
        norm2 = (norm2 + upd2 + cross_term).max(0.0);
        row_used[i_k] = true;
        col_used[j_k] = true;
        let converged = upd2.sqrt() <= params.eps_c * norm2.sqrt();

        if let Some(pairs) = &params.pairs {
            let partner = pairs[j_k];
            if partner != j_k && !col_used[partner] {
                col_used[partner] = true;
                let col = cross.residual_column(a, partner);
                if let Some((i2, m2)) = argmax(&col, &row_used) {
                    if m2 > tiny(scale) {
                        let row = cross.residual_row(a, i2);
                        let pivot = col[i2];
                        let (u2, c2) = cross.push(i2, partner, col, row, pivot);
                        norm2 = (norm2 + u2 + c2).max(0.0);
                        row_used[i2] = true;
                    }
                }
            }
        }

        if converged {
            break;
        }
    }
    cross
}

fn tiny(scale: f64) -> f64 {
    64.0 * f64::EPSILON * scale
}
