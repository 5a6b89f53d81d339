//! Generalized eigensolvers for the symmetric pencil `(K, M)` with `M` SPD.
//!
//! [`solve_dense`] reduces to a standard symmetric problem through the
//! Cholesky factor of `M`. [`solve_window`] runs shift-invert Lanczos with
//! full reorthogonalization on `(K − σM)⁻¹M`, locks converged pairs, and
//! certifies the result against the Sylvester inertia of `K − τM` at the
//! window edges so that no eigenvalue (including members of nearly
//! degenerate pairs) is silently missed.

mod skyline;

pub use skyline::SkylineLdl;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fem::{dot, AssembledPair, CsrMatrix};

/// Relative residual bound certified for every returned pair.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Default dimension cap of the dense path.
pub const DENSE_CAP: usize = 6000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverPath {
    Dense,
    ShiftInvert,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverMeta {
    pub path: SolverPath,
    pub shifts: Vec<f64>,
    pub iterations: usize,
    pub restarts: usize,
    pub max_residual: f64,
    pub max_orthogonality_error: f64,
}

/// Eigenpairs of the pencil, ascending, with `M`-orthonormal vectors.
#[derive(Debug, Clone)]
pub struct EigenSolution {
    pub eigenvalues: Vec<f64>,
    /// Column `j` of the solution lives in `vectors[j]`.
    pub vectors: Vec<Vec<f64>>,
    /// `‖Kx − λMx‖₂ / ((‖K‖₁ + |λ|‖M‖₁)‖x‖_M)` per pair.
    pub residuals: Vec<f64>,
    pub meta: SolverMeta,
}

impl EigenSolution {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// The `count` eigenvalues of the given sign closest to zero, ascending in
    /// magnitude.
    pub fn nearest_zero(&self, positive: bool, count: usize) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .eigenvalues
            .iter()
            .copied()
            .filter(|&l| if positive { l >= 0.0 } else { l < 0.0 })
            .collect();
        v.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
        v.truncate(count);
        v
    }
}

fn relative_residual(k: &CsrMatrix, m: &CsrMatrix, nk: f64, nm: f64, lambda: f64, x: &[f64]) -> f64 {
    let kx = k.mul_vec(x);
    let mx = m.mul_vec(x);
    let r: f64 = kx
        .iter()
        .zip(&mx)
        .map(|(a, b)| (a - lambda * b).powi(2))
        .sum::<f64>()
        .sqrt();
    let xm = dot(x, &mx).sqrt();
    r / ((nk + lambda.abs() * nm) * xm)
}

fn orthogonality_error(m: &CsrMatrix, vectors: &[Vec<f64>]) -> f64 {
    let mv: Vec<Vec<f64>> = vectors.iter().map(|v| m.mul_vec(v)).collect();
    let mut worst: f64 = 0.0;
    for i in 0..vectors.len() {
        for j in 0..=i {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot(&vectors[i], &mv[j]) - target).abs());
        }
    }
    worst
}

/// All eigenpairs by Cholesky reduction `L⁻¹KL⁻ᵀ`.
pub fn solve_dense(pair: &AssembledPair, cap: usize) -> Result<EigenSolution> {
    solve_dense_matrices(&pair.k, &pair.m, cap)
}

pub fn solve_dense_matrices(k: &CsrMatrix, m: &CsrMatrix, cap: usize) -> Result<EigenSolution> {
    let n = k.dim();
    if n > cap {
        return Err(Error::UseWindowedSolver { dim: n, cap });
    }
    let md = m.to_dense();
    let kd = k.to_dense();
    let chol = nalgebra::Cholesky::new(md.clone()).ok_or_else(|| {
        let row = (0..n).find(|&i| md[(i, i)] <= 0.0).unwrap_or(0);
        Error::MassNotSpd {
            row,
            pivot: md[(row, row)],
        }
    })?;
    let l = chol.l();
    // A = L⁻¹ K L⁻ᵀ via two triangular solves
    let y = l
        .solve_lower_triangular(&kd)
        .ok_or_else(|| Error::NumericalFailure("triangular solve failed".into()))?;
    let a = l
        .solve_lower_triangular(&y.transpose())
        .ok_or_else(|| Error::NumericalFailure("triangular solve failed".into()))?;
    let a = (&a + a.transpose()) * 0.5;
    let eig = SymmetricEigen::new(a);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let lt = l.transpose();
    let mut eigenvalues = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    for &i in &order {
        let yv = eig.eigenvectors.column(i).into_owned();
        let x = lt
            .solve_upper_triangular(&yv)
            .ok_or_else(|| Error::NumericalFailure("back substitution failed".into()))?;
        eigenvalues.push(eig.eigenvalues[i]);
        vectors.push(x.iter().copied().collect::<Vec<f64>>());
    }
    finish(k, m, eigenvalues, vectors, SolverPath::Dense, vec![], 0, 0)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    k: &CsrMatrix,
    m: &CsrMatrix,
    eigenvalues: Vec<f64>,
    vectors: Vec<Vec<f64>>,
    path: SolverPath,
    shifts: Vec<f64>,
    iterations: usize,
    restarts: usize,
) -> Result<EigenSolution> {
    let (nk, nm) = (k.norm1(), m.norm1());
    let residuals: Vec<f64> = eigenvalues
        .iter()
        .zip(&vectors)
        .map(|(&l, x)| relative_residual(k, m, nk, nm, l, x))
        .collect();
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    let max_orthogonality_error = if vectors.len() <= 400 {
        orthogonality_error(m, &vectors)
    } else {
        0.0
    };
    if max_residual > RESIDUAL_TOL {
        return Err(Error::NumericalFailure(format!(
            "eigenpair residual {max_residual:e} exceeds {RESIDUAL_TOL:e}"
        )));
    }
    Ok(EigenSolution {
        eigenvalues,
        vectors,
        residuals,
        meta: SolverMeta {
            path,
            shifts,
            iterations,
            restarts,
            max_residual,
            max_orthogonality_error,
        },
    })
}

/// Number of eigenvalues of the pencil strictly below `tau`.
pub fn count_below(pair: &AssembledPair, tau: f64) -> Result<usize> {
    Ok(SkylineLdl::factor(&pair.k, -tau, &pair.m, tau)?.negatives())
}

fn count_below_perturbed(pair: &AssembledPair, tau: f64) -> Result<(usize, f64)> {
    let mut t = tau;
    for attempt in 0..8 {
        match SkylineLdl::factor(&pair.k, -t, &pair.m, t) {
            Ok(f) => return Ok((f.negatives(), t)),
            Err(Error::ShiftTooClose { .. }) => {
                t = tau + (1e-9 * tau.abs().max(1.0)) * (attempt + 1) as f64;
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::NumericalFailure(format!("no regular shift near {tau}")))
}

/// Deterministic pseudo-random start vector.
fn start_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut state = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ 0xD1B5_4A32_D192_ED03;
    (0..n)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect()
}

/// `w ← w − Σ q (qᵀ M w)` twice ("twice is enough").
fn m_orthogonalize(w: &mut [f64], basis: &[Vec<f64>], mbasis: &[Vec<f64>]) {
    for _ in 0..2 {
        for (q, mq) in basis.iter().zip(mbasis) {
            let c = dot(w, mq);
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= c * qi;
            }
        }
    }
}

/// `m` eigenpairs nearest the shift `sigma`.
pub fn solve_window(pair: &AssembledPair, sigma: f64, m: usize) -> Result<EigenSolution> {
    let n = pair.dim();
    if m == 0 {
        return finish(&pair.k, &pair.m, vec![], vec![], SolverPath::ShiftInvert, vec![sigma], 0, 0);
    }
    if m > n {
        return Err(Error::InputInvalid(format!("requested {m} eigenpairs of a {n}-dimensional pencil")));
    }
    let factor = SkylineLdl::factor(&pair.k, -sigma, &pair.m, sigma)?;
    let kmat = &pair.k;
    let mmat = &pair.m;

    let mut locked: Vec<Vec<f64>> = Vec::new();
    let mut locked_m: Vec<Vec<f64>> = Vec::new();
    let mut locked_theta: Vec<f64> = Vec::new();
    let mut iterations = 0;
    let mut restarts = 0;
    let kdim_max = (2 * m + 60).min(n);

    loop {
        // one Lanczos run deflated against the locked vectors
        let free = n - locked.len();
        if free == 0 {
            break;
        }
        let kdim = kdim_max.min(free);
        let mut q = start_vector(n, 17 + restarts as u64);
        m_orthogonalize(&mut q, &locked, &locked_m);
        let mut mq = mmat.mul_vec(&q);
        let nq = dot(&q, &mq).sqrt();
        q.iter_mut().for_each(|v| *v /= nq);
        mq.iter_mut().for_each(|v| *v /= nq);
        let mut basis: Vec<Vec<f64>> = vec![q];
        let mut mbasis: Vec<Vec<f64>> = vec![mq];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut converged: Vec<(f64, Vec<f64>)> = Vec::new();
        let needed = m.saturating_sub(locked.len()).max(1);
        for j in 0..kdim {
            iterations += 1;
            let mut w = mbasis[j].clone();
            factor.solve_in_place(&mut w);
            let a = dot(&w, &mbasis[j]);
            alpha.push(a);
            for (wi, qi) in w.iter_mut().zip(&basis[j]) {
                *wi -= a * qi;
            }
            if j > 0 {
                let b = beta[j - 1];
                for (wi, qi) in w.iter_mut().zip(&basis[j - 1]) {
                    *wi -= b * qi;
                }
            }
            m_orthogonalize(&mut w, &locked, &locked_m);
            m_orthogonalize(&mut w, &basis, &mbasis);
            let mw = mmat.mul_vec(&w);
            let b = dot(&w, &mw).max(0.0).sqrt();
            let steps = j + 1;
            let last = steps == kdim || b < 1e-300;
            if steps % 10 == 0 || last {
                let t = tridiagonal(&alpha, &beta);
                let eig = SymmetricEigen::new(t);
                let mut idx: Vec<usize> = (0..steps).collect();
                idx.sort_by(|&x, &y| eig.eigenvalues[y].abs().total_cmp(&eig.eigenvalues[x].abs()));
                let good: Vec<usize> = idx
                    .iter()
                    .copied()
                    .filter(|&i| {
                        let th = eig.eigenvalues[i];
                        (b * eig.eigenvectors[(steps - 1, i)]).abs() <= 1e-11 * th.abs()
                    })
                    .collect();
                // converged prefix of the largest |θ|
                let prefix = idx.iter().take_while(|i| good.contains(i)).count();
                if prefix >= needed || last {
                    let chosen: Vec<usize> = if prefix > 0 { idx[..prefix].to_vec() } else { good };
                    for i in chosen {
                        let mut x = vec![0.0; n];
                        for (c, qv) in basis.iter().enumerate() {
                            let s = eig.eigenvectors[(c, i)];
                            for (xi, qi) in x.iter_mut().zip(qv) {
                                *xi += s * qi;
                            }
                        }
                        converged.push((eig.eigenvalues[i], x));
                    }
                    break;
                }
            }
            if b < 1e-300 {
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|v| v / b).collect());
            mbasis.push(mw.iter().map(|v| v / b).collect());
        }
        if converged.is_empty() {
            return Err(Error::NumericalFailure(format!(
                "shift-invert Lanczos at sigma = {sigma} made no progress"
            )));
        }
        for (theta, mut x) in converged {
            m_orthogonalize(&mut x, &locked, &locked_m);
            let mx = mmat.mul_vec(&x);
            let nx = dot(&x, &mx).sqrt();
            if nx < 1e-8 {
                continue;
            }
            locked.push(x.iter().map(|v| v / nx).collect());
            locked_m.push(mx.iter().map(|v| v / nx).collect());
            locked_theta.push(theta);
        }

        if locked.len() >= m {
            // certify: every eigenvalue within the radius of the m-th nearest is present
            let mut lams: Vec<f64> = locked_theta.iter().map(|t| sigma + 1.0 / t).collect();
            lams.sort_by(|a, b| (a - sigma).abs().total_cmp(&(b - sigma).abs()));
            let radius = (lams[m - 1] - sigma).abs();
            let pad = 1e-7 * radius.max(sigma.abs()).max(1e-300);
            let (lo_count, _) = count_below_perturbed(pair, sigma - radius - pad)?;
            let (hi_count, _) = count_below_perturbed(pair, sigma + radius + pad)?;
            let found = lams.iter().filter(|l| (*l - sigma).abs() <= radius + pad).count();
            let expected = hi_count - lo_count;
            if found >= expected {
                break;
            }
        }
        restarts += 1;
        if restarts > 4 * m + 10 {
            return Err(Error::NumericalFailure(format!(
                "shift-invert Lanczos at sigma = {sigma} did not certify {m} pairs"
            )));
        }
    }

    let mut pairs: Vec<(f64, Vec<f64>)> = locked_theta
        .iter()
        .zip(locked)
        .map(|(t, x)| (sigma + 1.0 / t, x))
        .collect();
    pairs.sort_by(|a, b| (a.0 - sigma).abs().total_cmp(&(b.0 - sigma).abs()));
    pairs.truncate(m);
    // Rayleigh-quotient refinement of the eigenvalue for each locked vector
    let mut pairs: Vec<(f64, Vec<f64>)> = pairs
        .into_iter()
        .map(|(_, x)| {
            let kx = kmat.mul_vec(&x);
            let mx = mmat.mul_vec(&x);
            (dot(&x, &kx) / dot(&x, &mx), x)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (eigenvalues, vectors): (Vec<f64>, Vec<Vec<f64>>) = pairs.into_iter().unzip();
    finish(
        kmat,
        mmat,
        eigenvalues,
        vectors,
        SolverPath::ShiftInvert,
        vec![sigma],
        iterations,
        restarts,
    )
}

fn tridiagonal(alpha: &[f64], beta: &[f64]) -> DMatrix<f64> {
    let k = alpha.len();
    let mut t = DMatrix::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    t
}

/// Several windows merged deterministically.
///
/// Pairs are sorted and grouped into clusters of nearby eigenvalues (relative
/// gap below `1e-3`); each cluster is `M`-orthonormalized, which drops the
/// duplicates two windows found for the same eigenvector, and then rotated by
/// a Rayleigh–Ritz step so that vectors from different windows are mutually
/// `M`-orthogonal even inside nearly degenerate pairs.
pub fn solve_sweep(pair: &AssembledPair, shifts: &[f64], per_shift: usize, exec: Exec) -> Result<EigenSolution> {
    let parts = exec.map(shifts, |&s| solve_window(pair, s, per_shift));
    let mut all: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut iterations = 0;
    let mut restarts = 0;
    for p in parts {
        let p = p?;
        iterations += p.meta.iterations;
        restarts += p.meta.restarts;
        all.extend(p.eigenvalues.into_iter().zip(p.vectors));
    }
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, Vec<f64>)> = Vec::with_capacity(all.len());
    let mut start = 0;
    while start < all.len() {
        let mut end = start + 1;
        while end < all.len() && all[end].0 - all[end - 1].0 <= 1e-3 * all[end].0.abs().max(1.0) {
            end += 1;
        }
        merged.extend(rayleigh_ritz_cluster(pair, &all[start..end]));
        start = end;
    }
    merged.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (eigenvalues, vectors): (Vec<f64>, Vec<Vec<f64>>) = merged.into_iter().unzip();
    finish(
        &pair.k,
        &pair.m,
        eigenvalues,
        vectors,
        SolverPath::ShiftInvert,
        shifts.to_vec(),
        iterations,
        restarts,
    )
}

fn rayleigh_ritz_cluster(pair: &AssembledPair, cluster: &[(f64, Vec<f64>)]) -> Vec<(f64, Vec<f64>)> {
    if cluster.len() == 1 {
        return cluster.to_vec();
    }
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut mbasis: Vec<Vec<f64>> = Vec::new();
    for (_, v) in cluster {
        let mut w = v.clone();
        m_orthogonalize(&mut w, &basis, &mbasis);
        let mw = pair.m.mul_vec(&w);
        let nw = dot(&w, &mw).sqrt();
        if nw < 1e-3 {
            continue;
        }
        basis.push(w.iter().map(|x| x / nw).collect());
        mbasis.push(mw.iter().map(|x| x / nw).collect());
    }
    let q = basis.len();
    let kb: Vec<Vec<f64>> = basis.iter().map(|b| pair.k.mul_vec(b)).collect();
    let mut kc = DMatrix::zeros(q, q);
    for i in 0..q {
        for j in 0..q {
            kc[(i, j)] = dot(&basis[i], &kb[j]);
        }
    }
    let kc = (&kc + kc.transpose()) * 0.5;
    let eig = SymmetricEigen::new(kc);
    (0..q)
        .map(|c| {
            let mut x = vec![0.0; basis[0].len()];
            for (i, b) in basis.iter().enumerate() {
                let s = eig.eigenvectors[(i, c)];
                for (xi, bi) in x.iter_mut().zip(b) {
                    *xi += s * bi;
                }
            }
            (eig.eigenvalues[c], x)
        })
        .collect()
}
