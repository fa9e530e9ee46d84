//! Adaptive cross approximation on a matrix known only through entries.
//!
//! The matrix is a smooth kernel, so it is numerically low rank. ACA
//! samples a small fraction of its entries and the SVD pass truncates the
//! cross factors to the requested tolerance.

use nalgebra::DMatrix;
use wigner_core::lowrank::{compress, AcaParams, FnEntries, MatrixEntries};

fn main() {
    let (m, n) = (400, 300);
    let kernel = |i: usize, j: usize| {
        let x = i as f64 / m as f64;
        let y = j as f64 / n as f64;
        1.0 / (1.0 + 25.0 * (x - y).powi(2)) + (3.0 * x * y).sin()
    };
    let entries = FnEntries::new(m, n, kernel);
    let dense = DMatrix::from_fn(m, n, kernel);
    let norm = dense.norm();

    println!("{:>8} {:>6} {:>6} {:>10} {:>12}", "eps_c", "cross", "rank", "sampled", "rel error");
    for eps_c in [1e-2, 1e-4, 1e-6, 1e-8] {
        let params = AcaParams {
            eps_c,
            seed: 3,
            ..Default::default()
        };
        let out = compress(&entries, &params, eps_c * norm);
        let err = (&dense - out.factors.to_dense()).norm() / norm;
        println!(
            "{:8.0e} {:6} {:6} {:9.1}% {:12.3e}",
            eps_c,
            out.cross_rank,
            out.factors.rank(),
            100.0 * out.evaluations as f64 / (entries.nrows() * entries.ncols()) as f64,
            err
        );
    }

    let svd = dense.svd(false, false);
    let sig: Vec<String> = svd.singular_values.iter().take(8).map(|s| format!("{s:.2e}")).collect();
    println!("leading singular values: {}", sig.join(" "));
}
