use wigner_core::io::diagnostics_csv;
use wigner_core::solver::run;
use wigner_core::{Mode, Problem, SolverConfig};

fn csv_with_threads(config: &SolverConfig, threads: usize) -> (String, Vec<u8>) {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    pool.install(|| {
        let out = run(config).unwrap();
        let last = out.snapshots.last().unwrap().solution.to_distribution();
        let bytes = last.as_slice().iter().flat_map(|x| x.to_le_bytes()).collect();
        (diagnostics_csv(&out.history), bytes)
    })
}

fn config(mode: Mode, seed: u64) -> SolverConfig {
    let mut c = SolverConfig::new(Problem::TwoStream, 1.0, 128, 128);
    c.t_final = 15.0;
    c.mode = mode;
    c.seed = seed;
    c
}

#[test]
fn same_seed_same_bits_across_thread_counts() {
    for mode in [Mode::Adaptive, Mode::Full] {
        let c = config(mode, 7);
        let one = csv_with_threads(&c, 1);
        let four = csv_with_threads(&c, 4);
        let again = csv_with_threads(&c, 4);
        assert_eq!(one, four, "{mode:?}: 1 vs 4 threads");
        assert_eq!(four, again, "{mode:?}: repeated run");
    }
}

#[test]
fn seed_changes_sampling_not_physics() {
    let (a, fa) = csv_with_threads(&config(Mode::Adaptive, 1), 2);
    let (b, fb) = csv_with_threads(&config(Mode::Adaptive, 2), 2);
    assert_ne!(a, b);
    let decode = |v: &[u8]| -> Vec<f64> {
        v.chunks(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect()
    };
    let (xa, xb) = (decode(&fa), decode(&fb));
    let num: f64 = xa.iter().zip(&xb).map(|(p, q)| (p - q).powi(2)).sum();
    let den: f64 = xa.iter().map(|p| p * p).sum();
    assert!((num / den).sqrt() < 1e-2);
}
