//! Interface operator per angular mode: exact multiplier, quantization of
//! interface eigenvalues, the comparison operator on `Z` and its Weyl law,
//! and the first-order correction.
//!
//! With `d₊ = DtN₊` at `ε = −1` and `d₋ = DtN₋` at `ε = +1`, an interface
//! eigenvalue `λ = h⁻²` of mode `n` is a zero of the matching residual:
//! `d₊ − d₋` for the unit-normal convention and `√a₊ d₊ − √a₋ d₋` for the
//! flux convention.  Both share the form `q = h²μₙ − 1 + O(h)` after
//! normalization, with `μₙ = A (n/rz)²` (unit normal) or `2A (n/rz)²` (flux).

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geometry::{k_length, Transmission, TwoPhaseDiskConfig};
use crate::numerics::{fmt17, roots};
use crate::radial::{dtn_eigenvalue, Side};

/// Interface eigenvalue of one angular mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterfaceMode {
    pub n: u32,
    pub h_star: f64,
    pub lambda: f64,
    pub lambda_principal: f64,
    pub lambda_corrected: f64,
    pub alpha1: f64,
    pub convention: Transmission,
}

/// Symbol coefficient of the matching residual: `A` (unit normal) or `2A`
/// (flux), with `A = (a₊ − a₋)/2` at the interface.
pub fn symbol_coefficient(config: &TwoPhaseDiskConfig) -> Result<f64> {
    let big_a = k_length(config)?.big_a;
    Ok(match config.transmission {
        Transmission::UnitNormal => big_a,
        Transmission::Flux => 2.0 * big_a,
    })
}

/// Principal eigenvalue prediction `μₙ` for the configured convention.
pub fn mu(config: &TwoPhaseDiskConfig, n: u32) -> Result<f64> {
    Ok(symbol_coefficient(config)? * (n as f64 / config.rz).powi(2))
}

/// `q = h²μₙ − 1`; for the unit-normal convention this is
/// `½(k₊* − k₋*) − 1` with `k±* = a±(hn/rz)²`.
pub fn q_principal(config: &TwoPhaseDiskConfig, h: f64, n: u32) -> Result<f64> {
    Ok(h * h * mu(config, n)? - 1.0)
}

fn dtn_pair(config: &TwoPhaseDiskConfig, h: f64, n: u32) -> Result<(f64, f64)> {
    Ok((
        dtn_eigenvalue(config, Side::Plus, -1, h, n)?,
        dtn_eigenvalue(config, Side::Minus, 1, h, n)?,
    ))
}

/// Exact multiplier of the interface operator on mode `n`.
///
/// Unit normal: `½(d₊ + d₋)(d₊ − d₋)`.  Flux: the analogue
/// `(√a₊d₊ + √a₋d₋)(√a₊d₊ − √a₋d₋)/(a₊ + a₋)`, normalized so that its
/// principal part is again `h²μₙ − 1`.
pub fn q_exact(config: &TwoPhaseDiskConfig, h: f64, n: u32) -> Result<f64> {
    let (dp, dm) = dtn_pair(config, h, n)?;
    Ok(match config.transmission {
        Transmission::UnitNormal => 0.5 * (dp + dm) * (dp - dm),
        Transmission::Flux => {
            let (ap, am) = config.interface_coefficients();
            let (u, v) = (ap.sqrt() * dp, am.sqrt() * dm);
            (u + v) * (u - v) / (ap + am)
        }
    })
}

/// Factor of `q_exact` that vanishes at an interface eigenvalue.
fn matching_residual(config: &TwoPhaseDiskConfig, h: f64, n: u32) -> Result<f64> {
    let (dp, dm) = dtn_pair(config, h, n)?;
    Ok(match config.transmission {
        Transmission::UnitNormal => dp - dm,
        Transmission::Flux => {
            let (ap, am) = config.interface_coefficients();
            ap.sqrt() * dp - am.sqrt() * dm
        }
    })
}

/// Smallest `h` in the elliptic region of the positive phase.
fn h_elliptic(config: &TwoPhaseDiskConfig, n: u32) -> f64 {
    config.rz / (n as f64 * config.a_plus.value(config.rz).sqrt())
}

/// Interface root `h*ₙ` of mode `n`, bracketed outward from `μₙ^{-½}`.
pub fn quantize_root(config: &TwoPhaseDiskConfig, n: u32) -> Result<f64> {
    let no_mode = |reason: String| Error::NoInterfaceMode { n, reason };
    if n == 0 {
        return Err(no_mode("mode 0 has no tangential frequency".into()));
    }
    let h0 = mu(config, n)?.powf(-0.5);
    let h_min = h_elliptic(config, n) * (1.0 + 1e-9);
    let g = |h: f64| matching_residual(config, h, n);
    let g0 = g(h0)?;
    if g0 == 0.0 {
        return Ok(h0);
    }
    // residual increases with h across the root
    let factor: f64 = 1.05;
    let (mut lo, mut hi) = (h0, h0);
    let (mut g_lo, mut g_hi) = (g0, g0);
    let mut found = false;
    for _ in 0..200 {
        if g_lo < 0.0 && g_hi > 0.0 {
            found = true;
            break;
        }
        if g_lo >= 0.0 {
            if lo <= h_min {
                break;
            }
            hi = lo;
            g_hi = g_lo;
            lo = (lo / factor).max(h_min);
            g_lo = g(lo)?;
        } else {
            lo = hi;
            g_lo = g_hi;
            hi *= factor;
            if hi > 20.0 * h0 {
                break;
            }
            g_hi = g(hi)?;
        }
    }
    if !found {
        return Err(no_mode(format!(
            "matching residual keeps one sign on [{lo}, {hi}] (elliptic limit {h_min})"
        )));
    }
    roots::brent(g, lo, hi, g_lo, g_hi, 1e-14 * hi)
}

/// Interface mode `n` with principal and first-order predictions.
pub fn quantize(config: &TwoPhaseDiskConfig, n: u32) -> Result<InterfaceMode> {
    let h_star = quantize_root(config, n)?;
    let pert = perturbation_first_order(config, n)?;
    Ok(InterfaceMode {
        n,
        h_star,
        lambda: h_star.powi(-2),
        lambda_principal: pert.mu,
        lambda_corrected: pert.lambda_corrected,
        alpha1: pert.alpha1,
        convention: config.transmission,
    })
}

/// Interface modes for every `n` in `modes`; modes without an interface root
/// are skipped.  Output is ordered by `n`.
pub fn quantize_range(
    config: &TwoPhaseDiskConfig,
    modes: std::ops::RangeInclusive<u32>,
    exec: Exec,
) -> Result<Vec<InterfaceMode>> {
    let ns: Vec<u32> = modes.collect();
    let out = exec.map(&ns, |&n| quantize(config, n));
    let mut modes = Vec::with_capacity(out.len());
    for r in out {
        match r {
            Ok(m) => modes.push(m),
            Err(Error::NoInterfaceMode { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(modes)
}

/// Eigenvalue `μ` of the comparison operator `Δ_K` on `Z` with its
/// multiplicity and `h = μ^{-½}` (absent for `μ = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaKEigenvalue {
    pub n: u32,
    pub mu: f64,
    pub multiplicity: u32,
    pub h: Option<f64>,
}

/// `μₙ = (2πn/l)²` for `n = 0..=m_max`, `l` the `K`-length of `Z`.
pub fn delta_k_spectrum(config: &TwoPhaseDiskConfig, m_max: u32) -> Result<Vec<DeltaKEigenvalue>> {
    let l = k_length(config)?.l_k;
    Ok((0..=m_max)
        .map(|n| {
            let mu = (2.0 * PI * n as f64 / l).powi(2);
            DeltaKEigenvalue {
                n,
                mu,
                multiplicity: if n == 0 { 1 } else { 2 },
                h: (n > 0).then(|| mu.powf(-0.5)),
            }
        })
        .collect())
}

/// First-order data of mode `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FirstOrder {
    pub n: u32,
    pub mu: f64,
    /// Multiplier of `P₁` on mode `n`: `q_exact(h, n)/h` at `h = μₙ^{-½}`.
    pub p1: f64,
    pub alpha1: f64,
    pub h_corrected: f64,
    pub lambda_corrected: f64,
}

/// Solve `μh² + p₁h − 1 = 0` for the corrected root.
pub fn perturbation_first_order(config: &TwoPhaseDiskConfig, n: u32) -> Result<FirstOrder> {
    if n == 0 {
        return Err(Error::NoInterfaceMode {
            n,
            reason: "mode 0 has no tangential frequency".into(),
        });
    }
    let mu = mu(config, n)?;
    let h = mu.powf(-0.5);
    // q_principal vanishes at h, so the remainder is q_exact itself
    let p1 = q_exact(config, h, n)? / h;
    let discriminant = p1 * p1 + 4.0 * mu;
    if !(discriminant >= 0.0) {
        return Err(Error::CorrectionFailed { n, discriminant });
    }
    let h_corrected = (-p1 + discriminant.sqrt()) / (2.0 * mu);
    if !(h_corrected > 0.0) {
        return Err(Error::CorrectionFailed { n, discriminant });
    }
    Ok(FirstOrder {
        n,
        mu,
        p1,
        alpha1: -0.5 * p1,
        h_corrected,
        lambda_corrected: h_corrected.powi(-2),
    })
}

/// Matrix `⟨P₁uᵢ|uⱼ⟩` over the degenerate pair `u± = e^{±inθ}/√(2π)`, by
/// trapezoidal quadrature on `Z` (exact for trigonometric polynomials).
pub fn degenerate_matrix(config: &TwoPhaseDiskConfig, n: u32) -> Result<[[Complex64; 2]; 2]> {
    let p1 = perturbation_first_order(config, n)?.p1;
    let samples = 4 * n as usize + 8;
    let dt = 2.0 * PI / samples as f64;
    let basis = |k: f64, t: f64| Complex64::from_polar(1.0 / (2.0 * PI).sqrt(), k * t);
    let ks = [n as f64, -(n as f64)];
    let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (i, &ki) in ks.iter().enumerate() {
        for (j, &kj) in ks.iter().enumerate() {
            // P₁ acts on e^{ikθ} as the multiplier p₁(|k|)
            m[i][j] = (0..samples)
                .map(|s| {
                    let t = s as f64 * dt;
                    basis(ki, t).conj() * basis(kj, t) * p1
                })
                .sum::<Complex64>()
                * dt;
        }
    }
    Ok(m)
}

/// Eigenvalues of a Hermitian 2×2 matrix, ascending.
pub fn hermitian_eigenvalues_2x2(m: &[[Complex64; 2]; 2]) -> [f64; 2] {
    let (a, d) = (m[0][0].re, m[1][1].re);
    let b = m[0][1].norm();
    let mean = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    [mean - rad, mean + rad]
}

/// Interface Weyl law of `Δ_K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterfaceWeyl {
    pub lambda: f64,
    /// `#{n ≥ 1 : μₙ ≤ Λ}` with multiplicity 2.
    pub lattice: u64,
    /// `(l/π)√Λ`.
    pub asymptotic: f64,
}

pub fn interface_weyl(config: &TwoPhaseDiskConfig, lambda_max: f64) -> Result<InterfaceWeyl> {
    let l = k_length(config)?.l_k;
    let lm = lambda_max.max(0.0);
    // μₙ ≤ Λ ⟺ n ≤ l√Λ/(2π); lattice points on the boundary count
    let lm_tol = lm * (1.0 + 1e-12);
    let mut n_max = (l * lm.sqrt() / (2.0 * PI)).floor() as u64;
    while n_max > 0 && (2.0 * PI * n_max as f64 / l).powi(2) > lm_tol {
        n_max -= 1;
    }
    while (2.0 * PI * (n_max + 1) as f64 / l).powi(2) <= lm_tol {
        n_max += 1;
    }
    Ok(InterfaceWeyl {
        lambda: lambda_max,
        lattice: 2 * n_max,
        asymptotic: l / PI * lm.sqrt(),
    })
}

/// CSV with columns `n,h_star,lambda,lambda_principal,lambda_corrected,alpha1,convention`.
pub fn write_interface_csv<W: Write>(mut w: W, modes: &[InterfaceMode]) -> std::io::Result<()> {
    writeln!(w, "n,h_star,lambda,lambda_principal,lambda_corrected,alpha1,convention")?;
    for m in modes {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            m.n,
            fmt17(m.h_star),
            fmt17(m.lambda),
            fmt17(m.lambda_principal),
            fmt17(m.lambda_corrected),
            fmt17(m.alpha1),
            m.convention.as_str()
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn principal_formula() {
        let c = TwoPhaseDiskConfig::reference(Transmission::UnitNormal);
        assert!(q_principal(&c, 50f64.powf(-0.5), 10).unwrap().abs() < 1e-14);
        assert_eq!(q_principal(&c, 0.0, 10).unwrap(), -1.0);
        assert!((q_principal(&c, 0.2, 10).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn lattice_count() {
        let c = TwoPhaseDiskConfig::reference(Transmission::UnitNormal);
        let w = interface_weyl(&c, 800.0).unwrap();
        assert_eq!(w.lattice, 80);
        assert!((w.asymptotic - 80.0).abs() < 1e-9);
        assert_eq!(interface_weyl(&c, 0.0).unwrap().lattice, 0);
    }

    #[test]
    fn delta_k_values() {
        let c = TwoPhaseDiskConfig::reference(Transmission::UnitNormal);
        let s = delta_k_spectrum(&c, 10).unwrap();
        assert_eq!(s[0].multiplicity, 1);
        assert!(s[0].h.is_none());
        assert!((s[10].mu - 50.0).abs() < 1e-12);
        assert_eq!(s[10].multiplicity, 2);
    }
}
