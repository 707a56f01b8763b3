//! Minkowski metric with signature (+, -, -, -).

/// Diagonal of the metric; it is its own inverse.
pub const ETA: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// Index pairs `(mu, nu)` with `mu < nu`, in storage order 01, 02, 03, 12, 13, 23.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Minkowski product `a.b` of two contravariant vectors.
pub fn dot(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    (0..4).map(|mu| ETA[mu] * a[mu] * b[mu]).sum()
}

/// Position of `(mu, nu)` (with `mu < nu`) in [`PAIRS`].
pub fn pair_index(mu: usize, nu: usize) -> usize {
    debug_assert!(mu < nu && nu < 4);
    match (mu, nu) {
        (0, 1) => 0,
        (0, 2) => 1,
        (0, 3) => 2,
        (1, 2) => 3,
        (1, 3) => 4,
        _ => 5,
    }
}
