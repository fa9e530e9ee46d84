use nalgebra::DMatrix;

use super::{CrossFactors, LowRankFactors, Scalar};

/// Orthonormal factors of `left · rightᵀ`, truncated at the first singular
/// value below `eps_s` (absolute).
///
/// Cost is two thin QR factorizations and one `m × m` SVD, where `m` is the
/// number of columns of `left` and `right`.
pub fn recompress<T: Scalar>(left: &DMatrix<T>, right: &DMatrix<T>, eps_s: f64) -> LowRankFactors<T> {
    assert_eq!(left.ncols(), right.ncols());
    let (nrows, ncols, m) = (left.nrows(), right.nrows(), left.ncols());
    if m == 0 {
        return LowRankFactors::empty(nrows, ncols);
    }
    let qr_l = left.clone().qr();
    let qr_r = right.clone().qr();
    let (q1, r1) = (qr_l.q(), qr_l.r());
    let (q2, r2) = (qr_r.q(), qr_r.r());
    let core = &r1 * r2.transpose();
    let svd = core.svd(true, true);
    let cu = svd.u.expect("left singular vectors requested");
    let cvt = svd.v_t.expect("right singular vectors requested");

    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let kept: Vec<usize> = order
        .into_iter()
        .take_while(|&idx| svd.singular_values[idx] >= eps_s && svd.singular_values[idx] > 0.0)
        .collect();

    let r = kept.len();
    let mut cu_kept = DMatrix::<T>::zeros(cu.nrows(), r);
    // core = Ũ Σ Ṽᴴ, so A = (Q1 Ũ) Σ (Q2 conj(Ṽ))ᵀ; conj(Ṽ) is the transpose of Ṽᴴ.
    let mut cv_kept = DMatrix::<T>::zeros(cvt.ncols(), r);
    for (dst, &src) in kept.iter().enumerate() {
        cu_kept.set_column(dst, &cu.column(src));
        cv_kept.set_column(dst, &cvt.row(src).transpose());
    }
    LowRankFactors {
        u: q1 * cu_kept,
        sigma: kept.iter().map(|&idx| svd.singular_values[idx]).collect(),
        v: q2 * cv_kept,
    }
}

/// QR + SVD re-compression of an ACA cross.
pub fn svd_truncate<T: Scalar>(cross: &CrossFactors<T>, eps_s: f64) -> LowRankFactors<T> {
    let k = cross.rank();
    if k == 0 {
        return LowRankFactors::empty(cross.nrows, cross.ncols);
    }
    let left = DMatrix::from_fn(cross.nrows, k, |i, l| cross.col_stack[l][i] / cross.pivots[l]);
    let right = DMatrix::from_fn(cross.ncols, k, |j, l| cross.row_stack[l][j]);
    recompress(&left, &right, eps_s)
}
