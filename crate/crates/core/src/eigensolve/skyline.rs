//! Profile (skyline) `LDLᵀ` factorization without pivoting.
//!
//! The ring-ordered meshes give an envelope of width about two rings, so the
//! profile factorization is cheap and keeps the count of negative pivots,
//! which by Sylvester's law equals the number of negative eigenvalues.

use crate::error::{Error, Result};
use crate::fem::CsrMatrix;

#[derive(Debug, Clone)]
pub struct SkylineLdl {
    first: Vec<usize>,
    offset: Vec<usize>,
    /// Row `i` holds `L[i, first[i]..i]` followed by `D[i]`.
    data: Vec<f64>,
    negatives: usize,
}

impl SkylineLdl {
    /// Factor `A + s B` (same sparsity pattern family); `shift` is only used in
    /// the error report.
    pub fn factor(a: &CsrMatrix, s: f64, b: &CsrMatrix, shift: f64) -> Result<Self> {
        let n = a.dim();
        let mut first: Vec<usize> = (0..n).collect();
        for i in 0..n {
            for m in [a, b] {
                let (cols, _) = m.row(i);
                if let Some(&c) = cols.first() {
                    first[i] = first[i].min(c);
                }
            }
        }
        let mut offset = vec![0usize; n + 1];
        for i in 0..n {
            offset[i + 1] = offset[i] + (i - first[i] + 1);
        }
        let mut data = vec![0.0; offset[n]];
        let mut scale = vec![0.0f64; n];
        for i in 0..n {
            for (m, f) in [(a, 1.0), (b, s)] {
                let (cols, vals) = m.row(i);
                for (&j, &v) in cols.iter().zip(vals) {
                    if j <= i {
                        data[offset[i] + (j - first[i])] += f * v;
                    }
                    scale[i] += (f * v).abs();
                }
            }
        }
        let mut negatives = 0;
        let mut g = Vec::new();
        for i in 0..n {
            let fi = first[i];
            let row_start = offset[i];
            g.clear();
            // g_j = L[i, j] · D[j], built left to right
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let mut s = data[row_start + (j - fi)];
                if k0 < j {
                    let lj = &data[offset[j] + (k0 - fj)..offset[j] + (j - fj)];
                    let gi = &g[k0 - fi..j - fi];
                    s -= gi.iter().zip(lj).map(|(x, y)| x * y).sum::<f64>();
                }
                g.push(s);
            }
            let mut d = data[row_start + (i - fi)];
            for j in fi..i {
                let dj = data[offset[j + 1] - 1];
                let l = g[j - fi] / dj;
                data[row_start + (j - fi)] = l;
                d -= l * g[j - fi];
            }
            if !(d.abs() > 1e-13 * scale[i]) {
                return Err(Error::ShiftTooClose {
                    shift,
                    row: i,
                    pivot: d,
                });
            }
            if d < 0.0 {
                negatives += 1;
            }
            data[row_start + (i - fi)] = d;
        }
        Ok(SkylineLdl {
            first,
            offset,
            data,
            negatives,
        })
    }

    pub fn dim(&self) -> usize {
        self.first.len()
    }

    /// Number of negative pivots.
    pub fn negatives(&self) -> usize {
        self.negatives
    }

    pub fn pivots(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.dim()).map(|i| self.data[self.offset[i + 1] - 1])
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.dim();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.data[self.offset[i]..self.offset[i + 1] - 1];
            let s: f64 = row.iter().zip(&x[fi..i]).map(|(l, v)| l * v).sum();
            x[i] -= s;
        }
        for i in 0..n {
            x[i] /= self.data[self.offset[i + 1] - 1];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let xi = x[i];
            let row = &self.data[self.offset[i]..self.offset[i + 1] - 1];
            for (v, l) in x[fi..i].iter_mut().zip(row) {
                *v -= l * xi;
            }
        }
    }
}
