//! Shared input builders for the benchmark suite.

use arbordet::{matrix_to_digraph, Digraph, Expr, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Complete numeric graph on n non-root vertices: every off-diagonal arc and
/// every root arc present, weights drawn from a seeded generator.
pub fn dense_numeric_graph(n: usize, seed: u64) -> Digraph<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Digraph::new(n + 1).expect("nonempty graph");
    for source in 0..=n {
        for target in 1..=n {
            if source != target {
                let (next, _) = g
                    .add_arc(source, target, rng.gen_range(0.1..1.0))
                    .expect("valid arc");
                g = next;
            }
        }
    }
    g
}

/// Complete symbolic graph for the generic n-by-n determinant.
pub fn dense_symbolic_graph(n: usize) -> Digraph<Expr> {
    let matrix = Matrix::symbolic(n).expect("valid size");
    matrix_to_digraph(&matrix).expect("bridge accepts symbolic matrices")
}

/// Dense random matrix with entries in [-1, 1].
pub fn dense_matrix(n: usize, seed: u64) -> Matrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries = (0..n)
        .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    Matrix::new(entries).expect("square by construction")
}
