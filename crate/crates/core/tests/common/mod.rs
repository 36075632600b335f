#![allow(dead_code)]

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_simple_fn((rows, cols), || StandardNormal.sample(rng))
}

pub fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> Array2<f64> {
    let g = gaussian(rng, n, n);
    (&g + &g.t()) * 0.5
}

/// Labels from a random hyperplane, with both classes forced present.
pub fn hyperplane_labels(rng: &mut ChaCha8Rng, x: &Array2<f64>, noise: f64) -> Array1<f64> {
    let w: Array1<f64> = (0..x.ncols()).map(|_| StandardNormal.sample(rng)).collect();
    let mut y: Array1<f64> = x
        .outer_iter()
        .map(|row| {
            let e: f64 = StandardNormal.sample(rng);
            if row.dot(&w) + noise * e >= 0.0 { 1.0 } else { -1.0 }
        })
        .collect();
    let n = y.len();
    if y.iter().all(|&v| v > 0.0) {
        y[rng.random_range(0..n)] = -1.0;
    }
    if y.iter().all(|&v| v < 0.0) {
        y[rng.random_range(0..n)] = 1.0;
    }
    y
}

/// Two well-separated Gaussian clouds, alternating labels.
pub fn separable_blobs(rng: &mut ChaCha8Rng, n: usize, p: usize, gap: f64) -> (Array2<f64>, Array1<f64>) {
    let mut x = gaussian(rng, n, p) * 0.5;
    let y: Array1<f64> = (0..n).map(|i| if i % 2 == 0 { -1.0 } else { 1.0 }).collect();
    for (mut row, &label) in x.outer_iter_mut().zip(y.iter()) {
        row[0] += label * gap / 2.0;
    }
    (x, y)
}

pub fn frobenius(a: &Array2<f64>) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Gauss–Jordan inverse with partial pivoting, independent of the library.
pub fn invert(a: &Array2<f64>) -> Array2<f64> {
    let n = a.nrows();
    let mut m = a.clone();
    let mut inv = Array2::<f64>::eye(n);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[[i, col]].abs().total_cmp(&m[[j, col]].abs()))
            .unwrap();
        for k in 0..n {
            m.swap([piv, k], [col, k]);
            inv.swap([piv, k], [col, k]);
        }
        let d = m[[col, col]];
        assert!(d.abs() > 1e-300, "singular matrix in test oracle");
        for k in 0..n {
            m[[col, k]] /= d;
            inv[[col, k]] /= d;
        }
        for r in 0..n {
            if r != col {
                let f = m[[r, col]];
                if f != 0.0 {
                    for k in 0..n {
                        m[[r, k]] -= f * m[[col, k]];
                        inv[[r, k]] -= f * inv[[col, k]];
                    }
                }
            }
        }
    }
    inv
}

/// True when `a + shift·I` is positive definite, by attempting a Cholesky
/// factorization.
pub fn is_psd_within(a: &Array2<f64>, shift: f64) -> bool {
    let n = a.nrows();
    let mut m = a.clone();
    for i in 0..n {
        m[[i, i]] += shift;
    }
    let mut l = Array2::<f64>::zeros((n, n));
    for j in 0..n {
        let mut d = m[[j, j]];
        for k in 0..j {
            d -= l[[j, k]] * l[[j, k]];
        }
        if d <= 0.0 {
            return false;
        }
        l[[j, j]] = d.sqrt();
        for i in (j + 1)..n {
            let mut s = m[[i, j]];
            for k in 0..j {
                s -= l[[i, k]] * l[[j, k]];
            }
            l[[i, j]] = s / l[[j, j]];
        }
    }
    true
}
