//! Dense symmetric correlation matrices and their Cholesky factors.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Residual entries with magnitude at or below this are treated as exact zeros.
pub const PSD_TOLERANCE: f64 = 1e-10;

/// Pivoting stops once every remaining pivot is at or below this.
const PIVOT_FLOOR: f64 = 1e-13;

/// Symmetric, unit-diagonal matrix with entries in `[-1, 1]`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl CorrelationMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![0.0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1.0;
        }
        Self { dim, entries }
    }

    /// Validates symmetry (exact), unit diagonal and the `[-1, 1]` range.
    pub fn from_row_major(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("correlation matrix must be at least 1x1"));
        }
        if entries.len() != dim * dim {
            return Err(Error::Shape { expected: dim * dim, actual: entries.len() });
        }
        for i in 0..dim {
            if entries[i * dim + i] != 1.0 {
                return Err(Error::domain(format!("diagonal entry {i} is not 1")));
            }
            for j in 0..i {
                let v = entries[i * dim + j];
                if !(-1.0..=1.0).contains(&v) {
                    return Err(Error::domain(format!("entry ({i},{j}) = {v} outside [-1, 1]")));
                }
                if v != entries[j * dim + i] {
                    return Err(Error::domain(format!("matrix not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(Self { dim, entries })
    }

    /// Builds a Toeplitz matrix `R[i][j] = f(|i - j|)` with `f(0)` forced to 1.
    pub(crate) fn toeplitz(dim: usize, mut lag: impl FnMut(usize) -> Result<f64>) -> Result<Self> {
        let mut by_lag = Vec::with_capacity(dim);
        by_lag.push(1.0);
        for d in 1..dim {
            by_lag.push(lag(d)?.clamp(-1.0, 1.0));
        }
        let mut entries = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                entries[i * dim + j] = by_lag[i.abs_diff(j)];
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dim + col]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }
}

/// Lower-triangular factor `L` with `L * L^T = R`.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerTriangular {
    dim: usize,
    entries: Vec<f64>,
}

impl LowerTriangular {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dim + col]
    }

    /// `L * w` for a complex vector.
    pub fn mul_complex(&self, w: &[Complex64]) -> Result<Vec<Complex64>> {
        if w.len() != self.dim {
            return Err(Error::Shape { expected: self.dim, actual: w.len() });
        }
        Ok((0..self.dim)
            .map(|i| {
                let row = &self.entries[i * self.dim..=i * self.dim + i];
                row.iter().zip(w).map(|(&l, &x)| x * l).sum()
            })
            .collect())
    }

    /// Row-major `L * L^T`.
    pub fn reconstruct(&self) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let s: f64 = (0..=j).map(|k| self.get(i, k) * self.get(j, k)).sum();
                out[i * n + j] = s;
                out[j * n + i] = s;
            }
        }
        out
    }
}

/// Lower-triangular square root of a positive semidefinite matrix.
///
/// Runs Cholesky with diagonal pivoting until the largest remaining pivot is
/// at rounding level, then re-triangularises the permuted factor with a
/// Householder LQ step. On well-conditioned input this is the ordinary
/// Cholesky factor; on numerically singular input (dense Jakes matrices) the
/// missing directions get zero diagonal entries instead of blowing up.
///
/// The residual left after the last pivot must be within `PSD_TOLERANCE`
/// entrywise, otherwise the matrix is reported as not PSD.
pub fn cholesky_lower(r: &CorrelationMatrix) -> Result<LowerTriangular> {
    let n = r.dim();
    // Working copy of the Schur complement, original indexing.
    let mut s = r.as_slice().to_vec();
    let mut remaining: Vec<usize> = (0..n).collect();
    // Column-major factor in original row order: a[c * n + i].
    let mut a = vec![0.0; n * n];
    let mut rank = 0;
    while !remaining.is_empty() {
        // Largest remaining diagonal, lowest index on ties.
        let mut pos = 0;
        for (t, &i) in remaining.iter().enumerate().skip(1) {
            let (cand, best) = (s[i * n + i], s[remaining[pos] * n + remaining[pos]]);
            if cand > best || (cand == best && i < remaining[pos]) {
                pos = t;
            }
        }
        let p = remaining[pos];
        let pivot = s[p * n + p];
        if pivot <= PIVOT_FLOOR {
            break;
        }
        remaining.swap_remove(pos);
        let d = pivot.sqrt();
        let col = &mut a[rank * n..(rank + 1) * n];
        col[p] = d;
        for &i in &remaining {
            col[i] = s[i * n + p] / d;
        }
        for &i in &remaining {
            for &j in &remaining {
                s[i * n + j] -= col[i] * col[j];
            }
        }
        rank += 1;
    }
    for &i in &remaining {
        let pivot = s[i * n + i];
        if pivot < -PSD_TOLERANCE {
            return Err(Error::NotPsd { row: i, pivot });
        }
        for &j in &remaining {
            let off = s[i * n + j];
            if i != j && off.abs() > PSD_TOLERANCE {
                return Err(Error::NotPsd { row: i.max(j), pivot: -off.abs() });
            }
        }
    }
    Ok(LowerTriangular { dim: n, entries: lq_lower(n, rank, a) })
}

/// For the n x rank matrix `A` (column-major, `cols[c * n + i]`), returns a
/// row-major lower-triangular `L` with non-negative diagonal and `L L^T = A A^T`.
///
/// Householder QR of `A^T` gives `A^T = Q U`, so `A A^T = U^T U` and `L = U^T`.
fn lq_lower(n: usize, rank: usize, cols: Vec<f64>) -> Vec<f64> {
    // m = A^T stored row-major: m[c * n + i] = A[i][c]; rows beyond `rank` are zero.
    let mut m = cols;
    m.truncate(rank * n);
    for k in 0..n.min(rank) {
        // Reflect column k of rows k..rank onto e_k.
        let norm = (k..rank).map(|r| m[r * n + k].powi(2)).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let below = (k + 1..rank).any(|r| m[r * n + k] != 0.0);
        if below {
            let alpha = if m[k * n + k] > 0.0 { -norm } else { norm };
            let mut v: Vec<f64> = (k..rank).map(|r| m[r * n + k]).collect();
            v[0] -= alpha;
            let vv: f64 = v.iter().map(|x| x * x).sum();
            for c in k..n {
                let dot: f64 = v.iter().enumerate().map(|(t, vt)| vt * m[(k + t) * n + c]).sum();
                let f = 2.0 * dot / vv;
                for (t, vt) in v.iter().enumerate() {
                    m[(k + t) * n + c] -= f * vt;
                }
            }
            for r in k + 1..rank {
                m[r * n + k] = 0.0;
            }
        }
        if m[k * n + k] < 0.0 {
            for c in k..n {
                m[k * n + c] = -m[k * n + c];
            }
        }
    }
    let mut l = vec![0.0; n * n];
    for k in 0..n.min(rank) {
        for i in k..n {
            l[i * n + k] = m[k * n + i];
        }
    }
    l
}
