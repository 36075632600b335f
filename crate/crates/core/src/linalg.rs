//! Small dense helpers that ndarray does not provide out of the box.

use ndarray::{Array1, Array2, ArrayView2};

use crate::error::{Error, Result};

/// Solve `a · x = b` by Gaussian elimination with partial pivoting.
pub fn solve(a: ArrayView2<f64>, b: &Array1<f64>) -> Result<Array1<f64>> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.len(),
        });
    }
    let mut m = a.to_owned();
    let mut x = b.clone();
    let scale = m.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[[i, col]].abs().total_cmp(&m[[j, col]].abs()))
            .expect("non-empty range");
        if m[[pivot, col]].abs() <= f64::EPSILON * scale {
            return Err(Error::RankDeficient(format!(
                "singular system at column {col}"
            )));
        }
        if pivot != col {
            for k in 0..n {
                m.swap([pivot, k], [col, k]);
            }
            x.swap(pivot, col);
        }
        for row in (col + 1)..n {
            let f = m[[row, col]] / m[[col, col]];
            if f != 0.0 {
                for k in col..n {
                    m[[row, k]] -= f * m[[col, k]];
                }
                x[row] -= f * x[col];
            }
        }
    }
    for col in (0..n).rev() {
        let mut acc = x[col];
        for k in (col + 1)..n {
            acc -= m[[col, k]] * x[k];
        }
        x[col] = acc / m[[col, col]];
    }
    Ok(x)
}

/// Greedily pick `k` rows of `basis` (`c × k`) that are as far from linearly
/// dependent as possible: pivoted Gram–Schmidt on the rows. Returned ascending.
pub fn select_independent_rows(basis: &Array2<f64>) -> Vec<usize> {
    let (c, k) = basis.dim();
    let mut residual = basis.clone();
    let mut chosen = Vec::with_capacity(k);
    let mut taken = vec![false; c];
    for _ in 0..k.min(c) {
        let mut best = None;
        let mut best_norm = -1.0;
        for i in (0..c).filter(|&i| !taken[i]) {
            let nrm = residual.row(i).dot(&residual.row(i));
            if nrm > best_norm {
                best_norm = nrm;
                best = Some(i);
            }
        }
        let Some(p) = best else { break };
        taken[p] = true;
        chosen.push(p);
        if best_norm <= 0.0 {
            continue;
        }
        let dir = residual.row(p).to_owned() / best_norm.sqrt();
        for i in (0..c).filter(|&i| !taken[i]) {
            let proj = residual.row(i).dot(&dir);
            residual.row_mut(i).scaled_add(-proj, &dir);
        }
    }
    chosen.sort_unstable();
    chosen
}
