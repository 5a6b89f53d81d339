//! Formal WKB solutions of `(h²Δ + ε) f = 0` in a collar of the interface
//! and the resulting symbol of the semiclassical Dirichlet-to-Neumann map.
//!
//! The collar coordinate `x ≥ 0` is the `g`-distance to `Z` measured into the
//! chosen phase, so on both sides the DtN multiplier is `d = −h ∂ₓf / f` at
//! `x = 0`.  For `f = A e^{iS/h}` this gives `d = −i S'(0) − h A'(0)/A(0) + …`.

mod series;

pub use series::TruncatedSeries;

use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::TwoPhaseDiskConfig;
use crate::numerics::{fmt17, loglog_slope};
use crate::radial::{dtn_eigenvalue, Side};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Geodesic collar of a circle of Euclidean radius `radius` for the metric
/// `a⁻¹(dr² + r²dθ²)` with `a` frozen at the interface value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricCollar {
    pub side: Side,
    /// Euclidean radius of `Z`; infinite for a flat collar.
    pub radius: f64,
    pub a: f64,
    /// Collar width in `g`-distance.
    pub width: f64,
}

impl MetricCollar {
    /// Collar on one side of the interface of `config`.
    pub fn from_config(config: &TwoPhaseDiskConfig, side: Side) -> Self {
        let rz = config.rz;
        let (a, room) = match side {
            Side::Plus => (config.a_plus.value(rz), rz),
            Side::Minus => (config.a_minus.value(rz), config.ry - rz),
        };
        MetricCollar {
            side,
            radius: rz,
            a,
            width: 0.25 * rz.min(room) / a.sqrt(),
        }
    }

    /// Flat collar: `H*` does not depend on `x`.
    pub fn flat(a: f64, width: f64) -> Self {
        MetricCollar {
            side: Side::Plus,
            radius: f64::INFINITY,
            a,
            width,
        }
    }

    /// `x ↦ r` slope: `r = R − √a x` inside the disk, `R + √a x` outside.
    fn curvature(&self) -> f64 {
        if self.radius.is_infinite() {
            return 0.0;
        }
        let s = self.a.sqrt() / self.radius;
        match self.side {
            Side::Plus => s,
            Side::Minus => -s,
        }
    }

    /// Tangential symbol `H*(x, η) = (R / r(x))² η²` with `η` the covector
    /// dual to `g`-arclength on `Z`.
    pub fn h_star(&self, eta: f64, order: usize) -> TruncatedSeries {
        // (1 − s x)^{-2} = Σ (k+1) s^k x^k
        let s = self.curvature();
        let c: Vec<f64> = (0..=order)
            .map(|k| eta * eta * (k + 1) as f64 * s.powi(k as i32))
            .collect();
        TruncatedSeries::from_real(&c, order)
    }

    /// `J'/J` for the volume density `J ∝ r(x)`.
    pub fn log_density_derivative(&self, order: usize) -> TruncatedSeries {
        // −s / (1 − s x) = −s Σ s^k x^k
        let s = self.curvature();
        let c: Vec<f64> = (0..=order).map(|k| -s * s.powi(k as i32)).collect();
        TruncatedSeries::from_real(&c, order)
    }
}

/// Tangential frequency `η = h n √a / R` of mode `n` at the interface.
pub fn eta_of_mode(collar: &MetricCollar, h: f64, n: u32) -> f64 {
    h * n as f64 * collar.a.sqrt() / collar.radius
}

/// Decaying phase `S` with `S(0) = 0` and `(S')² + H* + ε = 0`.
///
/// `S' = σ` is solved order by order: `σ₀ = i√(H₀ + ε)` and
/// `σ_k = (−P_k − Σ_{0<j<k} σ_j σ_{k−j}) / (2σ₀)` with `P = H* + ε`.
pub fn eikonal_series(collar: &MetricCollar, epsilon: i32, eta: f64, order: usize) -> Result<TruncatedSeries> {
    let p = collar.h_star(eta, order);
    let k_star = p.coeff(0).re;
    if epsilon == -1 && k_star <= 1.0 {
        return Err(Error::EllipticRegionViolated { k_star });
    }
    let p0 = k_star + epsilon as f64;
    if p0.abs() <= 1e-14 {
        return Err(Error::SingularSymbol { value: p0 });
    }
    let mut sigma = vec![Complex64::new(0.0, 0.0); order + 1];
    sigma[0] = I * p0.sqrt();
    for k in 1..=order {
        let cross: Complex64 = (1..k).map(|j| sigma[j] * sigma[k - j]).sum();
        sigma[k] = (-p.coeff(k) - cross) / (2.0 * sigma[0]);
    }
    Ok(TruncatedSeries::new(sigma, order).integrate(Complex64::new(0.0, 0.0)))
}

/// Leading amplitude `A₀` with `A₀(0) = 1` solving
/// `(1/i) 2S' A₀' + D A₀ = 0`, i.e. `A₀' = −i D A₀ / (2S')`.
pub fn transport_series(s: &TruncatedSeries, d: &TruncatedSeries) -> Result<TruncatedSeries> {
    let ds = s.derivative();
    if ds.coeff(0).norm() <= 1e-14 {
        return Err(Error::TransportDegenerate);
    }
    let q = (&(d * &ds.recip()?)).scale(-0.5 * I);
    Ok(q.integrate(Complex64::new(0.0, 0.0)).exp())
}

/// Zeroth-order transport coefficient of the collar Laplacian,
/// `D = −i (S'' + (J'/J) S')`.
pub fn collar_laplacian_d(collar: &MetricCollar, s: &TruncatedSeries) -> TruncatedSeries {
    let ds = s.derivative();
    let dds = ds.derivative();
    let jj = collar.log_density_derivative(s.order());
    (&dds + &(&jj * &ds)).scale(-I)
}

/// Where the zeroth-order transport coefficient comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum DModel {
    /// A user-supplied series.
    Series(TruncatedSeries),
    /// The collar Laplacian itself (see [`collar_laplacian_d`]).
    CollarLaplacian,
}

/// Principal and (when a `D` model is given) subprincipal DtN coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DtnSymbol {
    pub eta: f64,
    pub epsilon: i32,
    /// `c₀ = −i S'(0) = √(k* + ε)`.
    pub c0: f64,
    /// `c₁ = −A₀'(0)`.
    pub c1: Option<f64>,
}

pub fn dtn_symbol(collar: &MetricCollar, epsilon: i32, eta: f64, d: Option<&DModel>) -> Result<DtnSymbol> {
    const ORDER: usize = 6;
    let s = eikonal_series(collar, epsilon, eta, ORDER)?;
    let c0 = (-I * s.coeff(1)).re;
    let c1 = match d {
        None => None,
        Some(model) => {
            let dser = match model {
                DModel::Series(t) => t.clone(),
                DModel::CollarLaplacian => collar_laplacian_d(collar, &s),
            };
            let a0 = transport_series(&s, &dser)?;
            Some(-a0.coeff(1).re)
        }
    };
    Ok(DtnSymbol { eta, epsilon, c0, c1 })
}

/// `Im S(x) > 0` on a uniform sample of `(0, collar.width]`.
pub fn decays_on_collar(collar: &MetricCollar, s: &TruncatedSeries, samples: usize) -> bool {
    (1..=samples).all(|k| s.eval(collar.width * k as f64 / samples as f64).im > 0.0)
}

/// A family of modes with fixed `η`: `n_k = n₀ 2^k`, `h_k = h₀ / 2^k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeFamily {
    pub n0: u32,
    pub h0: f64,
    pub levels: usize,
}

impl ModeFamily {
    pub fn members(&self) -> Vec<(f64, u32)> {
        (0..self.levels)
            .map(|k| (self.h0 / f64::from(1u32 << k), self.n0 << k))
            .collect()
    }
}

/// Convergence of exact DtN values to the principal symbol along a family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrincipalConvergence {
    pub side: Side,
    pub epsilon: i32,
    pub eta: f64,
    pub c0: f64,
    pub h: Vec<f64>,
    pub d_exact: Vec<f64>,
    pub error: Vec<f64>,
    /// Log-log slope of the error; `None` when every error is at round-off.
    pub slope: Option<f64>,
}

/// Errors at or below this multiple of the integrator tolerance are treated
/// as exact.
pub const ROUND_OFF_FACTOR: f64 = 100.0;

pub fn principal_convergence(
    config: &TwoPhaseDiskConfig,
    side: Side,
    epsilon: i32,
    family: ModeFamily,
) -> Result<PrincipalConvergence> {
    let collar = MetricCollar::from_config(config, side);
    let eta = eta_of_mode(&collar, family.h0, family.n0);
    let c0 = dtn_symbol(&collar, epsilon, eta, None)?.c0;
    let mut h = Vec::new();
    let mut d_exact = Vec::new();
    for (hk, nk) in family.members() {
        h.push(hk);
        d_exact.push(dtn_eigenvalue(config, side, epsilon, hk, nk)?);
    }
    let error: Vec<f64> = d_exact.iter().map(|d| (d - c0).abs()).collect();
    let floor = ROUND_OFF_FACTOR * config.tolerances.ode * c0.abs().max(1.0);
    let (hs, es): (Vec<f64>, Vec<f64>) = h
        .iter()
        .zip(&error)
        .filter(|(_, &e)| e > floor)
        .map(|(&x, &e)| (x, e))
        .unzip();
    let slope = (hs.len() >= 2).then(|| loglog_slope(&hs, &es));
    Ok(PrincipalConvergence {
        side,
        epsilon,
        eta,
        c0,
        h,
        d_exact,
        error,
        slope,
    })
}

/// Empirical subprincipal coefficient from exact DtN values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubprincipalEstimate {
    pub side: Side,
    pub epsilon: i32,
    pub eta: f64,
    pub c0: f64,
    pub c1: f64,
    /// Slope of `|d − c₀|` against `h` (expected 1); `None` if exact.
    pub principal_slope: Option<f64>,
    /// Slope of `|d − c₀ − h c₁|` against `h` (expected 2); `None` if exact.
    pub remainder_slope: Option<f64>,
}

/// Richardson extrapolation of `(d(h) − c₀)/h` along `family`.
///
/// Fails with [`Error::ExpansionInconsistent`] when `|d − c₀|` does not decay
/// like `h` (slope outside `[0.8, 1.2]`).
pub fn subprincipal_estimate(
    config: &TwoPhaseDiskConfig,
    side: Side,
    epsilon: i32,
    family: ModeFamily,
) -> Result<SubprincipalEstimate> {
    if family.levels < 2 {
        return Err(Error::InputInvalid("subprincipal estimate needs at least two levels".into()));
    }
    let conv = principal_convergence(config, side, epsilon, family)?;
    let exact = SubprincipalEstimate {
        side,
        epsilon,
        eta: conv.eta,
        c0: conv.c0,
        c1: 0.0,
        principal_slope: None,
        remainder_slope: None,
    };
    let Some(slope) = conv.slope else {
        return Ok(exact);
    };
    if !(0.8..=1.2).contains(&slope) {
        return Err(Error::ExpansionInconsistent { slope, lo: 0.8, hi: 1.2 });
    }
    // r(h) = c₁ + c₂h + c₃h² + …; each sweep removes one power of h
    let mut r: Vec<f64> = conv
        .d_exact
        .iter()
        .zip(&conv.h)
        .map(|(d, h)| (d - conv.c0) / h)
        .collect();
    let mut p = 1;
    while r.len() > 1 {
        let f = f64::from(1u32 << p);
        r = r.windows(2).map(|w| (f * w[1] - w[0]) / (f - 1.0)).collect();
        p += 1;
    }
    let c1 = r[0];
    let rem: Vec<f64> = conv
        .d_exact
        .iter()
        .zip(&conv.h)
        .map(|(d, h)| (d - conv.c0 - h * c1).abs())
        .collect();
    let remainder_slope = (rem.iter().all(|&e| e > 0.0) && rem.len() >= 2).then(|| loglog_slope(&conv.h, &rem));
    Ok(SubprincipalEstimate {
        c1,
        principal_slope: Some(slope),
        remainder_slope,
        ..exact
    })
}

/// CSV with columns `epsilon,side,eta,c0,c1_empirical,remainder_slope`.
pub fn write_symbol_csv<W: Write>(mut w: W, rows: &[SubprincipalEstimate]) -> std::io::Result<()> {
    writeln!(w, "epsilon,side,eta,c0,c1_empirical,remainder_slope")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.epsilon,
            r.side.as_str(),
            fmt17(r.eta),
            fmt17(r.c0),
            fmt17(r.c1),
            r.remainder_slope.map_or_else(|| "nan".to_string(), fmt17)
        )?;
    }
    Ok(())
}
