//! Two-phase disk configuration, ellipticity validation and the closed-form
//! predictions (Weyl constant, Riemannian areas, interface metric length).
//!
//! The inner disk `r < rz` carries the positive phase with coefficient
//! `a_plus`, the annulus `rz < r < ry` the negative phase with `a_minus`, and
//! the outer circle `r = ry` is Dirichlet. The phase metrics are conformal,
//! `g± = a±⁻¹ g₀`, so `Δ± = −div(a± ∇)` against Lebesgue measure.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::quad;

/// Interface matching rule for the normal derivatives on `r = rz`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Transmission {
    /// Equal metric-unit normal derivatives: `√a₊ ∂ᵣf₊ = −√a₋ ∂ᵣf₋`.
    #[default]
    UnitNormal,
    /// Continuity of the sign-changing flux: `a₊ ∂ᵣf₊ = −a₋ ∂ᵣf₋`.
    Flux,
}

impl Transmission {
    pub fn as_str(self) -> &'static str {
        match self {
            Transmission::UnitNormal => "unit_normal",
            Transmission::Flux => "flux",
        }
    }
}

impl std::str::FromStr for Transmission {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit_normal" | "unit-normal" => Ok(Transmission::UnitNormal),
            "flux" => Ok(Transmission::Flux),
            other => Err(Error::ConfigInvalid(vec![format!(
                "unknown transmission convention '{other}'"
            )])),
        }
    }
}

/// Samples of a radial profile, interpolated by a monotone (Fritsch–Carlson)
/// cubic Hermite spline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SampledRaw", into = "SampledRaw")]
pub struct SampledProfile {
    r: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SampledRaw {
    r: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<SampledRaw> for SampledProfile {
    type Error = String;
    fn try_from(raw: SampledRaw) -> std::result::Result<Self, String> {
        SampledProfile::new(raw.r, raw.values).map_err(|e| e.to_string())
    }
}

impl From<SampledProfile> for SampledRaw {
    fn from(s: SampledProfile) -> Self {
        SampledRaw {
            r: s.r,
            values: s.values,
        }
    }
}

impl SampledProfile {
    pub fn new(r: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if r.len() != values.len() || r.len() < 2 {
            return Err(Error::ConfigInvalid(vec![
                "sampled coefficient needs at least two (r, value) pairs of equal length".into(),
            ]));
        }
        if r.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::ConfigInvalid(vec![
                "sampled coefficient grid must be strictly increasing".into(),
            ]));
        }
        let slopes = pchip_slopes(&r, &values);
        Ok(SampledProfile { r, values, slopes })
    }

    pub fn grid(&self) -> &[f64] {
        &self.r
    }

    fn eval(&self, x: f64) -> (f64, f64) {
        let n = self.r.len();
        let k = match self.r.partition_point(|&ri| ri <= x) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.r[k + 1] - self.r[k];
        let t = (x - self.r[k]) / h;
        let (y0, y1) = (self.values[k], self.values[k + 1]);
        let (m0, m1) = (self.slopes[k], self.slopes[k + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let v = h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1;
        let d00 = 6.0 * t2 - 6.0 * t;
        let d10 = 3.0 * t2 - 4.0 * t + 1.0;
        let d01 = -6.0 * t2 + 6.0 * t;
        let d11 = 3.0 * t2 - 2.0 * t;
        let dv = (d00 * y0 + d01 * y1) / h + d10 * m0 + d11 * m1;
        (v, dv)
    }
}

fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    if n == 2 {
        return vec![delta[0], delta[0]];
    }
    let mut m = vec![0.0; n];
    for k in 1..n - 1 {
        if delta[k - 1] * delta[k] > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            m[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
        }
    }
    let end = |h0: f64, h1: f64, d0: f64, d1: f64| {
        let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if s.signum() != d0.signum() {
            0.0
        } else if d0.signum() != d1.signum() && s.abs() > 3.0 * d0.abs() {
            3.0 * d0
        } else {
            s
        }
    };
    m[0] = end(h[0], h[1], delta[0], delta[1]);
    m[n - 1] = end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    m
}

/// Radial coefficient `a(r)`, evaluable with its first derivative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialCoefficient {
    Constant(f64),
    /// Coefficients in increasing powers of `r`.
    Polynomial(Vec<f64>),
    Sampled(SampledProfile),
}

impl RadialCoefficient {
    #[inline]
    pub fn value(&self, r: f64) -> f64 {
        self.eval(r).0
    }

    /// `(a(r), a'(r))`.
    #[inline]
    pub fn eval(&self, r: f64) -> (f64, f64) {
        match self {
            RadialCoefficient::Constant(c) => (*c, 0.0),
            RadialCoefficient::Polynomial(cs) => {
                let mut v = 0.0;
                let mut d = 0.0;
                for &c in cs.iter().rev() {
                    d = d * r + v;
                    v = v * r + c;
                }
                (v, d)
            }
            RadialCoefficient::Sampled(s) => s.eval(r),
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            RadialCoefficient::Constant(_) => true,
            RadialCoefficient::Polynomial(cs) => cs.iter().skip(1).all(|&c| c == 0.0),
            RadialCoefficient::Sampled(_) => false,
        }
    }

    /// Pointwise scaling `c · a(r)`.
    pub fn scaled(&self, c: f64) -> RadialCoefficient {
        match self {
            RadialCoefficient::Constant(v) => RadialCoefficient::Constant(c * v),
            RadialCoefficient::Polynomial(cs) => {
                RadialCoefficient::Polynomial(cs.iter().map(|v| c * v).collect())
            }
            RadialCoefficient::Sampled(s) => RadialCoefficient::Sampled(
                SampledProfile::new(s.r.clone(), s.values.iter().map(|v| c * v).collect())
                    .expect("scaling preserves a valid grid"),
            ),
        }
    }

    fn min_on(&self, lo: f64, hi: f64) -> f64 {
        const SAMPLES: usize = 2000;
        let mut m = self.value(lo).min(self.value(hi));
        for i in 1..SAMPLES {
            let r = lo + (hi - lo) * i as f64 / SAMPLES as f64;
            m = m.min(self.value(r));
        }
        if let RadialCoefficient::Sampled(s) = self {
            for (&r, &v) in s.r.iter().zip(&s.values) {
                if r >= lo && r <= hi {
                    m = m.min(v);
                }
            }
        }
        m
    }
}

/// Numerical tolerances carried with a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Relative/absolute tolerance of the radial Prüfer integrator.
    pub ode: f64,
    /// Relative bracket width at which eigenvalue roots are accepted.
    pub root_rel: f64,
    /// Absolute tolerance for volume and length quadratures.
    pub quadrature_abs: f64,
    /// Interface tube half-width as a fraction of `rz`.
    pub tube_width_factor: f64,
    /// Tube mass fraction above which a mode is classed as an interface mode.
    pub interface_threshold: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            ode: 1e-12,
            root_rel: 1e-9,
            quadrature_abs: 1e-10,
            tube_width_factor: 0.15,
            interface_threshold: 0.5,
        }
    }
}

/// The two-phase disk: inner disk (positive phase), annulus (negative phase),
/// Dirichlet on the outer circle.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPhaseDiskConfig {
    pub rz: f64,
    pub ry: f64,
    pub a_plus: RadialCoefficient,
    pub a_minus: RadialCoefficient,
    pub transmission: Transmission,
    pub tolerances: Tolerances,
}

impl TwoPhaseDiskConfig {
    /// Constant-coefficient configuration with default tolerances.
    pub fn constant(rz: f64, ry: f64, a_plus: f64, a_minus: f64, transmission: Transmission) -> Self {
        TwoPhaseDiskConfig {
            rz,
            ry,
            a_plus: RadialCoefficient::Constant(a_plus),
            a_minus: RadialCoefficient::Constant(a_minus),
            transmission,
            tolerances: Tolerances::default(),
        }
    }

    /// Reference configuration: `rz = 1, ry = 2, a₊ = 2, a₋ = 1`.
    pub fn reference(transmission: Transmission) -> Self {
        Self::constant(1.0, 2.0, 2.0, 1.0, transmission)
    }

    pub fn with_transmission(&self, transmission: Transmission) -> Self {
        TwoPhaseDiskConfig {
            transmission,
            ..self.clone()
        }
    }

    /// Coefficients at the interface, `(a₊(rz), a₋(rz))`.
    pub fn interface_coefficients(&self) -> (f64, f64) {
        (self.a_plus.value(self.rz), self.a_minus.value(self.rz))
    }

    /// Interface tube half-width `δ`.
    pub fn tube_width(&self) -> f64 {
        self.tolerances.tube_width_factor * self.rz
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| {
            Error::ConfigInvalid(vec![format!(
                "cannot read config {}: {e}",
                path.as_ref().display()
            )])
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ConfigFile = serde_json::from_str(text)
            .map_err(|e| Error::ConfigInvalid(vec![format!("config parse error: {e}")]))?;
        Ok(file.into())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ConfigFile::from(self.clone())).expect("config serializes")
    }
}

/// On-disk JSON layout of a configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigFile {
    pub geometry: GeometrySection,
    pub coefficients: CoefficientSection,
    #[serde(default)]
    pub transmission: Transmission,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeometrySection {
    pub rz: f64,
    pub ry: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoefficientSection {
    pub a_plus: RadialCoefficient,
    pub a_minus: RadialCoefficient,
}

impl From<ConfigFile> for TwoPhaseDiskConfig {
    fn from(f: ConfigFile) -> Self {
        TwoPhaseDiskConfig {
            rz: f.geometry.rz,
            ry: f.geometry.ry,
            a_plus: f.coefficients.a_plus,
            a_minus: f.coefficients.a_minus,
            transmission: f.transmission,
            tolerances: f.tolerances,
        }
    }
}

impl From<TwoPhaseDiskConfig> for ConfigFile {
    fn from(c: TwoPhaseDiskConfig) -> Self {
        ConfigFile {
            geometry: GeometrySection { rz: c.rz, ry: c.ry },
            coefficients: CoefficientSection {
                a_plus: c.a_plus,
                a_minus: c.a_minus,
            },
            transmission: c.transmission,
            tolerances: c.tolerances,
        }
    }
}

/// Outcome of a successful [`validate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidationReport {
    /// `a₊(rz) − a₋(rz)`; positive means elliptic.
    pub margin: f64,
    pub min_a_plus: f64,
    pub min_a_minus: f64,
}

pub const SIGN_FLIP_REMEDY: &str = "swap sign of M (exchange the roles of the two phases)";

/// Check geometry, positivity and the interface ellipticity `a₊ > a₋` on `Z`.
pub fn validate(config: &TwoPhaseDiskConfig) -> Result<ValidationReport> {
    let mut problems = Vec::new();
    let (rz, ry) = (config.rz, config.ry);
    if !(rz.is_finite() && ry.is_finite()) || rz <= 0.0 {
        problems.push(format!("interface radius must be positive and finite (rz = {rz})"));
    }
    if !(rz < ry) {
        problems.push(format!("need rz < ry (rz = {rz}, ry = {ry})"));
    }
    if !problems.is_empty() {
        return Err(Error::ConfigInvalid(problems));
    }
    for (name, coef, lo, hi) in [
        ("a_plus", &config.a_plus, 0.0, rz),
        ("a_minus", &config.a_minus, rz, ry),
    ] {
        if let RadialCoefficient::Sampled(s) = coef {
            let g = s.grid();
            if g[0] > lo + 1e-12 * ry || g[g.len() - 1] < hi - 1e-12 * ry {
                problems.push(format!("{name} samples do not cover [{lo}, {hi}]"));
            }
        }
    }
    let min_a_plus = config.a_plus.min_on(0.0, rz);
    let min_a_minus = config.a_minus.min_on(rz, ry);
    if !(min_a_plus > 0.0) {
        problems.push(format!("a_plus must be positive on [0, rz] (min {min_a_plus})"));
    }
    if !(min_a_minus > 0.0) {
        problems.push(format!("a_minus must be positive on [rz, ry] (min {min_a_minus})"));
    }
    let t = &config.tolerances;
    if !(t.ode > 0.0 && t.root_rel > 0.0 && t.quadrature_abs > 0.0) {
        problems.push("tolerances must be positive".into());
    }
    if !(t.tube_width_factor > 0.0 && t.tube_width_factor * rz < (ry - rz).min(rz)) {
        problems.push("tube width must be positive and fit inside both phases".into());
    }
    if !problems.is_empty() {
        return Err(Error::ConfigInvalid(problems));
    }
    let (ap, am) = config.interface_coefficients();
    let margin = ap - am;
    if margin > 0.0 {
        Ok(ValidationReport {
            margin,
            min_a_plus,
            min_a_minus,
        })
    } else {
        // Radial coefficients are constant along Z, so a non-positive margin is
        // either a uniformly reversed contrast (fixable by M -> -M) or degenerate.
        Err(Error::EllipticityViolated {
            margin,
            remedy: (margin < 0.0).then(|| SIGN_FLIP_REMEDY.to_string()),
        })
    }
}

/// `C_d = Vol(B_d) / (2π)^d`.
pub fn weyl_constant(d: u32) -> f64 {
    assert!(d >= 1, "dimension must be at least 1");
    let mut vol = if d % 2 == 0 { 1.0 } else { 2.0 };
    let mut k = if d % 2 == 0 { 2 } else { 3 };
    while k <= d {
        vol *= 2.0 * PI / k as f64;
        k += 2;
    }
    vol / (2.0 * PI).powi(d as i32)
}

/// Riemannian areas `V± = 2π ∫ a±(r)⁻¹ r dr` of the two phases.
pub fn riemannian_volumes(config: &TwoPhaseDiskConfig) -> Result<(f64, f64)> {
    let tol = config.tolerances.quadrature_abs;
    let ap = &config.a_plus;
    let am = &config.a_minus;
    let v_plus = 2.0 * PI * quad::integrate(|r| r / ap.value(r), 0.0, config.rz, tol / (2.0 * PI))?;
    let v_minus =
        2.0 * PI * quad::integrate(|r| r / am.value(r), config.rz, config.ry, tol / (2.0 * PI))?;
    Ok((v_plus, v_minus))
}

/// Interface symbol coefficient and the length of `Z` in the metric `A⁻¹dy²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterfaceLength {
    /// `A = (a₊(rz) − a₋(rz)) / 2`.
    pub big_a: f64,
    /// Euclidean perimeter `L = 2π rz`.
    pub perimeter: f64,
    /// `l = ∫₀^L A^{-1/2} dy`.
    pub l_k: f64,
    /// `c₋₂ = (2π)² / l²`.
    pub c_minus2: f64,
}

pub fn k_length(config: &TwoPhaseDiskConfig) -> Result<InterfaceLength> {
    let (ap, am) = config.interface_coefficients();
    let big_a = 0.5 * (ap - am);
    if !(big_a > 0.0) {
        return Err(Error::EllipticityViolated {
            margin: ap - am,
            remedy: (ap < am).then(|| SIGN_FLIP_REMEDY.to_string()),
        });
    }
    let perimeter = 2.0 * PI * config.rz;
    let l_k = perimeter / big_a.sqrt();
    Ok(InterfaceLength {
        big_a,
        perimeter,
        l_k,
        c_minus2: (2.0 * PI / l_k).powi(2),
    })
}

/// All closed-form predictions for a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Predictions {
    pub v_plus: f64,
    pub v_minus: f64,
    pub c_d: f64,
    pub big_a: f64,
    pub l_k: f64,
    pub c_minus2: f64,
}

impl Predictions {
    pub fn compute(config: &TwoPhaseDiskConfig) -> Result<Self> {
        let (v_plus, v_minus) = riemannian_volumes(config)?;
        let kl = k_length(config)?;
        Ok(Predictions {
            v_plus,
            v_minus,
            c_d: weyl_constant(2),
            big_a: kl.big_a,
            l_k: kl.l_k,
            c_minus2: kl.c_minus2,
        })
    }

    /// Leading bulk Weyl counts `(C₂V₊λ, C₂V₋λ)`.
    pub fn bulk_counts(&self, lambda: f64) -> (f64, f64) {
        (self.c_d * self.v_plus * lambda, self.c_d * self.v_minus * lambda)
    }

    /// Interface Weyl count `(l/π)√λ`.
    pub fn interface_count(&self, lambda: f64) -> f64 {
        self.l_k / PI * lambda.max(0.0).sqrt()
    }
}
