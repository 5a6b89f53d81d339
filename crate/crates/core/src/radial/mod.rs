//! Separation-of-variables oracle for the sign-changing eigenproblem.
//!
//! For angular mode `n` the eigenproblem reduces to two radial ODEs coupled
//! on `r = rz`. Both phases are integrated in scaled Prüfer form (see
//! [`prufer`]), the regular solution outward from the origin and the
//! Dirichlet solution inward from `ry`. Their angles at the interface, brought
//! into the common representation `(C f, z)` where `z` is the quantity the
//! transmission condition keeps continuous, give the matching angle
//!
//! ```text
//! Δ(λ) = β₊(λ) − β₋(λ),      λ eigenvalue  ⇔  Δ(λ) ∈ πℤ.
//! ```
//!
//! A Wronskian identity shows `dβ₊/dλ ∝ ∫ f₊² r dr > 0` and
//! `dβ₋/dλ ∝ −∫ f₋² r dr < 0`, so `Δ` is strictly increasing even though the
//! operator is indefinite. Counting multiples of `π` therefore brackets every
//! root in a window exactly, and each root is polished with Brent's method.

mod prufer;

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geometry::{Transmission, TwoPhaseDiskConfig};
use crate::numerics::{fmt17, ode::Dopri5, roots};

use prufer::{regular_start, rescale_angle, series_start, PhaseOde};

/// Phase of the disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Plus => "plus",
            Side::Minus => "minus",
        }
    }
}

impl std::str::FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" => Ok(Side::Plus),
            "minus" | "-" => Ok(Side::Minus),
            other => Err(Error::InputInvalid(format!("unknown side '{other}'"))),
        }
    }
}

/// Where an eigenvalue came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Oracle,
    Fem,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Oracle => "oracle",
            Provenance::Fem => "fem",
        }
    }
}

/// One computed eigenvalue of the mode-separated problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRecord {
    pub lambda: f64,
    pub n: u32,
    /// 1 for `n = 0`, 2 otherwise (the `e^{±inθ}` pair).
    pub multiplicity: u32,
    /// `|sin Δ(λ)|`, the pole-free secular value at the accepted root.
    pub residual: f64,
    pub provenance: Provenance,
}

impl SpectrumRecord {
    pub fn is_positive(&self) -> bool {
        self.lambda >= 0.0
    }
}

fn ode_for(config: &TwoPhaseDiskConfig) -> Dopri5 {
    Dopri5::with_tol(config.tolerances.ode)
}

/// Prüfer state of one phase at a radius.
#[derive(Debug, Clone, Copy)]
struct PhaseEnd {
    phi: f64,
    s: f64,
    a: f64,
}

fn inner_end(config: &TwoPhaseDiskConfig, n: u32, lambda: f64, r: f64) -> Result<PhaseEnd> {
    let ode = PhaseOde::new(&config.a_plus, n, lambda);
    let start = regular_start(&ode, &config.a_plus, n, lambda, config.rz);
    let phi = if r <= start.r0 {
        series_start(&ode, &config.a_plus, n, lambda, r).phi
    } else {
        ode.advance_angle(&ode_for(config), start.r0, start.phi, r)?
    };
    let sc = ode.scale(r);
    Ok(PhaseEnd { phi, s: sc.s, a: sc.a })
}

fn outer_end(config: &TwoPhaseDiskConfig, n: u32, lambda: f64, r: f64) -> Result<PhaseEnd> {
    let ode = PhaseOde::new(&config.a_minus, n, -lambda);
    let phi = ode.advance_angle(&ode_for(config), config.ry, PI, r)?;
    let sc = ode.scale(r);
    Ok(PhaseEnd { phi, s: sc.s, a: sc.a })
}

fn logderiv_from(end: PhaseEnd, r: f64) -> f64 {
    let (sn, cs) = end.phi.sin_cos();
    end.s * cs / (r * end.a * sn)
}

/// `f'/f` at `r ∈ (0, rz]` for the positive-phase solution regular at 0.
pub fn inner_logderiv(config: &TwoPhaseDiskConfig, n: u32, lambda: f64, r: f64) -> Result<f64> {
    if !(r > 0.0 && r <= config.rz) {
        return Err(Error::InputInvalid(format!(
            "radius {r} outside (0, rz] = (0, {}]",
            config.rz
        )));
    }
    Ok(logderiv_from(inner_end(config, n, lambda, r)?, r))
}

/// `f'/f` at `r ∈ [rz, ry)` for the negative-phase solution with `f(ry) = 0`.
/// The spectral parameter enters as `−λ` (the operator is `−Δ₋` there).
pub fn outer_logderiv(config: &TwoPhaseDiskConfig, n: u32, lambda: f64, r: f64) -> Result<f64> {
    if !(r >= config.rz && r < config.ry) {
        return Err(Error::InputInvalid(format!(
            "radius {r} outside [rz, ry) = [{}, {})",
            config.rz, config.ry
        )));
    }
    Ok(logderiv_from(outer_end(config, n, lambda, r)?, r))
}

/// Factor `γ` with `z₋ = −γ r a₋ f₋'` continuous against `z₊ = r a₊ f₊'`.
fn transmission_gamma(config: &TwoPhaseDiskConfig) -> f64 {
    let (ap, am) = config.interface_coefficients();
    match config.transmission {
        Transmission::Flux => 1.0,
        Transmission::UnitNormal => (ap / am).sqrt(),
    }
}

/// Matching angle `Δ(λ)` of mode `n`; strictly increasing in `λ`, with the
/// eigenvalues exactly at the multiples of `π`.
pub fn matching_angle(config: &TwoPhaseDiskConfig, n: u32, lambda: f64) -> Result<f64> {
    let rz = config.rz;
    let left = inner_end(config, n, lambda, rz)?;
    let right = outer_end(config, n, lambda, rz)?;
    let c = left.a * (n as f64 + 1.0);
    let gamma = transmission_gamma(config);
    let beta_plus = rescale_angle(left.phi, c / left.s);
    let beta_minus = rescale_angle(PI - right.phi, c / (right.s * gamma));
    Ok(beta_plus - beta_minus)
}

/// Secular value `s(λ)`: `√a₊ w₊ + √a₋ w₋` (unit normal) or `a₊ w₊ + a₋ w₋`
/// (flux), with `w±` the interface log-derivatives.
///
/// Signals [`Error::PoleAtLambda`] when either profile vanishes on `Z`.
pub fn secular(config: &TwoPhaseDiskConfig, n: u32, lambda: f64) -> Result<f64> {
    let rz = config.rz;
    let left = inner_end(config, n, lambda, rz)?;
    let right = outer_end(config, n, lambda, rz)?;
    if left.phi.sin().abs() < 1e-12 || right.phi.sin().abs() < 1e-12 {
        return Err(Error::PoleAtLambda {
            n: n as i64,
            lambda,
        });
    }
    let wp = logderiv_from(left, rz);
    let wm = logderiv_from(right, rz);
    let (ap, am) = config.interface_coefficients();
    Ok(match config.transmission {
        Transmission::UnitNormal => ap.sqrt() * wp + am.sqrt() * wm,
        Transmission::Flux => ap * wp + am * wm,
    })
}

/// Pole-free secular value: `s(λ)` multiplied by the normalized interface
/// values of both profiles. Same zeros as `s`, continuous in `λ`.
pub fn secular_regularized(config: &TwoPhaseDiskConfig, n: u32, lambda: f64) -> Result<f64> {
    let rz = config.rz;
    let left = inner_end(config, n, lambda, rz)?;
    let right = outer_end(config, n, lambda, rz)?;
    let (sp, cp) = left.phi.sin_cos();
    let (sm, cm) = right.phi.sin_cos();
    // f = ρ sinφ / S,  f' = ρ cosφ / (r a)
    let (ap, am) = (left.a, right.a);
    let (wp_w, wm_w) = match config.transmission {
        Transmission::UnitNormal => (ap.sqrt(), am.sqrt()),
        Transmission::Flux => (ap, am),
    };
    let fp = sp / left.s;
    let fm = sm / right.s;
    let dfp = cp / (rz * ap);
    let dfm = cm / (rz * am);
    let norm = (fp.hypot(dfp) * fm.hypot(dfm)).max(f64::MIN_POSITIVE);
    Ok((wp_w * dfp * fm + wm_w * dfm * fp) / norm)
}

fn root_xtol(config: &TwoPhaseDiskConfig, lo: f64, hi: f64) -> f64 {
    let scale = if lo * hi > 0.0 { lo.abs().min(hi.abs()) } else { 0.0 };
    config.tolerances.root_rel * scale.max(1.0)
}

fn record(config: &TwoPhaseDiskConfig, n: u32, lambda: f64) -> Result<SpectrumRecord> {
    let delta = matching_angle(config, n, lambda)?;
    Ok(SpectrumRecord {
        lambda,
        n,
        multiplicity: if n == 0 { 1 } else { 2 },
        residual: delta.sin().abs(),
        provenance: Provenance::Oracle,
    })
}

/// All eigenvalues of mode `n` in the closed window `[lo, hi]`, ascending.
pub fn mode_eigenvalues(
    config: &TwoPhaseDiskConfig,
    n: u32,
    lo: f64,
    hi: f64,
) -> Result<Vec<SpectrumRecord>> {
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::InputInvalid("eigenvalue window must be finite".into()));
    }
    if hi < lo {
        return Err(Error::InputInvalid(format!("empty window [{lo}, {hi}]")));
    }
    if hi == lo {
        let d = matching_angle(config, n, lo)?;
        let k = (d / PI).round();
        if (d - k * PI).abs() < 1e-12 {
            return Ok(vec![record(config, n, lo)?]);
        }
        return Ok(Vec::new());
    }
    let d_lo = matching_angle(config, n, lo)?;
    let d_hi = matching_angle(config, n, hi)?;
    let k_first = (d_lo / PI).ceil() as i64;
    let k_last = (d_hi / PI).floor() as i64;
    let mut roots = Vec::new();
    if k_last >= k_first {
        isolate(config, n, lo, hi, d_lo, d_hi, k_first, k_last, &mut roots)?;
    }
    roots
        .into_iter()
        .map(|lambda| record(config, n, lambda))
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn isolate(
    config: &TwoPhaseDiskConfig,
    n: u32,
    lo: f64,
    hi: f64,
    d_lo: f64,
    d_hi: f64,
    k_first: i64,
    k_last: i64,
    out: &mut Vec<f64>,
) -> Result<()> {
    if k_first > k_last {
        return Ok(());
    }
    if k_first == k_last {
        let target = k_first as f64 * PI;
        let xtol = root_xtol(config, lo, hi);
        let lambda = roots::brent(
            |x| Ok(matching_angle(config, n, x)? - target),
            lo,
            hi,
            d_lo - target,
            d_hi - target,
            xtol,
        )
        .map_err(|e| {
            Error::NumericalFailure(format!(
                "mode {n}: root {k_first} not refined in [{lo}, {hi}]: {e}"
            ))
        })?;
        out.push(lambda);
        return Ok(());
    }
    let mid = 0.5 * (lo + hi);
    if (hi - lo) <= root_xtol(config, lo, hi) {
        return Err(Error::NumericalFailure(format!(
            "mode {n}: {} roots unresolved in bracket [{lo}, {hi}]",
            k_last - k_first + 1
        )));
    }
    let d_mid = matching_angle(config, n, mid)?;
    let split = (d_mid / PI).floor() as i64;
    isolate(config, n, lo, mid, d_lo, d_mid, k_first, split.min(k_last), out)?;
    isolate(config, n, mid, hi, d_mid, d_hi, (split + 1).max(k_first), k_last, out)
}

/// Spec-style scan route: sign changes of the pole-free secular function on a
/// grid whose density doubles until the root count is stable twice.
///
/// Kept as an independent cross-check of [`mode_eigenvalues`].
pub fn mode_eigenvalues_scan(
    config: &TwoPhaseDiskConfig,
    n: u32,
    lo: f64,
    hi: f64,
    initial_points: usize,
) -> Result<Vec<f64>> {
    let mut points = initial_points.max(8);
    let mut last_count = usize::MAX;
    let mut stable = 0;
    let mut grid_vals: Vec<(f64, f64)>;
    loop {
        grid_vals = (0..=points)
            .map(|i| {
                let x = lo + (hi - lo) * i as f64 / points as f64;
                secular_regularized(config, n, x).map(|v| (x, v))
            })
            .collect::<Result<_>>()?;
        let count = grid_vals
            .windows(2)
            .filter(|w| w[0].1.signum() != w[1].1.signum())
            .count();
        if count == last_count {
            stable += 1;
            if stable >= 2 {
                break;
            }
        } else {
            stable = 0;
            last_count = count;
        }
        points *= 2;
        if points > 1 << 16 {
            return Err(Error::NumericalFailure(format!(
                "mode {n}: scan did not stabilize"
            )));
        }
    }
    let mut out = Vec::new();
    for w in grid_vals.windows(2) {
        let ((a, fa), (b, fb)) = (w[0], w[1]);
        if fa.signum() != fb.signum() {
            let xtol = root_xtol(config, a, b);
            out.push(roots::brent(
                |x| secular_regularized(config, n, x),
                a,
                b,
                fa,
                fb,
                xtol,
            )?);
        }
    }
    Ok(out)
}

/// Every eigenvalue with `|λ| ≤ lambda_max`, one record per angular mode
/// (multiplicity carried on the record), sorted by `(λ, n)`.
///
/// Modes are scanned upward until three consecutive modes contribute nothing;
/// the windowed count never grows with `n` once it has reached zero.
pub fn full_spectrum(
    config: &TwoPhaseDiskConfig,
    lambda_max: f64,
    exec: Exec,
) -> Result<Vec<SpectrumRecord>> {
    if !(lambda_max >= 0.0) {
        return Err(Error::InputInvalid(format!(
            "lambda_max must be non-negative, got {lambda_max}"
        )));
    }
    if lambda_max == 0.0 {
        return Ok(Vec::new());
    }
    const BATCH: u32 = 8;
    let mut all = Vec::new();
    let mut empty_run = 0;
    let mut n0 = 0u32;
    'outer: loop {
        let modes: Vec<u32> = (n0..n0 + BATCH).collect();
        let results = exec.map(&modes, |&n| mode_eigenvalues(config, n, -lambda_max, lambda_max));
        for recs in results {
            let recs = recs?;
            if recs.is_empty() {
                empty_run += 1;
                if empty_run >= 3 {
                    break 'outer;
                }
            } else {
                if empty_run > 0 && !all.is_empty() {
                    // a mode reappeared after an empty one; keep scanning
                    empty_run = 0;
                }
                all.extend(recs);
            }
        }
        n0 += BATCH;
        if n0 > 100_000 {
            return Err(Error::NumericalFailure("mode scan did not terminate".into()));
        }
    }
    sort_records(&mut all);
    Ok(all)
}

pub(crate) fn sort_records(v: &mut [SpectrumRecord]) {
    v.sort_by(|a, b| a.lambda.total_cmp(&b.lambda).then(a.n.cmp(&b.n)));
}

/// Expand records into a flat eigenvalue list with multiplicity.
pub fn expand_multiplicity(records: &[SpectrumRecord]) -> Vec<f64> {
    records
        .iter()
        .flat_map(|r| std::iter::repeat_n(r.lambda, r.multiplicity as usize))
        .collect()
}

/// CSV export: `lambda,n,multiplicity,residual,provenance`.
pub fn write_spectrum_csv<W: Write>(mut w: W, records: &[SpectrumRecord]) -> std::io::Result<()> {
    writeln!(w, "lambda,n,multiplicity,residual,provenance")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{}",
            fmt17(r.lambda),
            r.n,
            r.multiplicity,
            fmt17(r.residual),
            r.provenance.as_str()
        )?;
    }
    Ok(())
}

/// Semiclassical DtN multiplier of mode `n` on `Z`.
///
/// Solves `(h²Δ± + ε) f = 0` on the requested phase (Dirichlet at `ry` on the
/// negative phase) with `f|_Z = e^{inθ}` and returns `h ∂_ν f` for the
/// outgoing `g`-unit normal, i.e. `d = ±h √a(rz) f'/f`.
pub fn dtn_eigenvalue(
    config: &TwoPhaseDiskConfig,
    side: Side,
    epsilon: i32,
    h: f64,
    n: u32,
) -> Result<f64> {
    if !matches!(epsilon, -1..=1) {
        return Err(Error::InputInvalid(format!("epsilon must be -1, 0 or 1, got {epsilon}")));
    }
    if !(h > 0.0) {
        return Err(Error::InputInvalid(format!("h must be positive, got {h}")));
    }
    let rz = config.rz;
    let a = match side {
        Side::Plus => config.a_plus.value(rz),
        Side::Minus => config.a_minus.value(rz),
    };
    if epsilon == -1 {
        let k_star = a * (h * n as f64 / rz).powi(2);
        if k_star <= 1.0 {
            return Err(Error::EllipticRegionViolated { k_star });
        }
    }
    let eps = epsilon as f64;
    match side {
        Side::Plus => {
            let w = logderiv_from(inner_end(config, n, -eps / (h * h), rz)?, rz);
            Ok(h * a.sqrt() * w)
        }
        Side::Minus => {
            let w = logderiv_from(outer_end(config, n, eps / (h * h), rz)?, rz);
            Ok(-h * a.sqrt() * w)
        }
    }
}

/// Sampled radial profile of an eigenfunction, normalized so that
/// `2π ∫ f² r dr = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub n: u32,
    pub lambda: f64,
    pub r: Vec<f64>,
    pub f: Vec<f64>,
}

impl RadialProfile {
    /// `2π ∫_{r1}^{r2} f² r dr` from the piecewise-linear interpolant of `f² r`
    /// (exactly additive over adjacent intervals).
    pub fn mass_between(&self, r1: f64, r2: f64) -> f64 {
        let g: Vec<f64> = self.r.iter().zip(&self.f).map(|(r, f)| f * f * r).collect();
        let lo = r1.max(self.r[0]);
        let hi = r2.min(*self.r.last().unwrap());
        if hi <= lo {
            return 0.0;
        }
        let interp = |x: f64| {
            let k = self.r.partition_point(|&ri| ri <= x).clamp(1, self.r.len() - 1);
            let (x0, x1) = (self.r[k - 1], self.r[k]);
            let t = (x - x0) / (x1 - x0);
            g[k - 1] * (1.0 - t) + g[k] * t
        };
        let mut total = 0.0;
        let mut x_prev = lo;
        let mut g_prev = interp(lo);
        for (i, &ri) in self.r.iter().enumerate() {
            if ri <= lo {
                continue;
            }
            if ri >= hi {
                break;
            }
            total += 0.5 * (g_prev + g[i]) * (ri - x_prev);
            x_prev = ri;
            g_prev = g[i];
        }
        total += 0.5 * (g_prev + interp(hi)) * (hi - x_prev);
        2.0 * PI * total
    }

    pub fn total_mass(&self) -> f64 {
        self.mass_between(self.r[0], *self.r.last().unwrap())
    }
}

/// Eigenfunction profile of mode `n` at (an accurate) eigenvalue `lambda`.
///
/// Integrates each phase toward the interface (outward from 0, inward from
/// `ry`) and joins them there, which keeps both decaying tails stable.
pub fn mode_profile(
    config: &TwoPhaseDiskConfig,
    n: u32,
    lambda: f64,
    points_per_side: usize,
) -> Result<RadialProfile> {
    let rz = config.rz;
    let ry = config.ry;
    let ode = ode_for(config);
    let np = points_per_side.max(16);

    // positive phase
    let plus = PhaseOde::new(&config.a_plus, n, lambda);
    let start = regular_start(&plus, &config.a_plus, n, lambda, rz);
    let mut r_in = Vec::with_capacity(np + 1);
    let mut lnf_in = Vec::with_capacity(np + 1);
    let mut sign_in = Vec::with_capacity(np + 1);
    r_in.push(0.0);
    lnf_in.push(if n == 0 { 0.0 } else { f64::NEG_INFINITY });
    sign_in.push(1.0);
    let mut state = [start.phi, start.ln_rho];
    let mut r_cur = start.r0;
    let mut step = None;
    for i in 1..=np {
        let r = rz * i as f64 / np as f64;
        if r <= start.r0 {
            // inside the series region: f = rⁿ F(r), same normalization as the start
            let sc = plus.scale(start.r0);
            let f0 = (start.ln_rho).exp() * start.phi.sin() / sc.s;
            let ln_ratio = n as f64 * (r / start.r0).ln();
            r_in.push(r);
            lnf_in.push(f0.abs().ln() + ln_ratio);
            sign_in.push(f0.signum());
            continue;
        }
        let (s, last) = plus.advance_full(&ode, r_cur, state, r, step)?;
        state = s;
        step = Some(last);
        r_cur = r;
        let sc = plus.scale(r);
        let v = state[0].sin() / sc.s;
        r_in.push(r);
        lnf_in.push(state[1] + v.abs().ln());
        sign_in.push(v.signum());
    }
    let sc_l = plus.scale(rz);
    let (phi_l, lnrho_l) = (state[0], state[1]);

    // negative phase, from ry inward
    let minus = PhaseOde::new(&config.a_minus, n, -lambda);
    let a_ry = config.a_minus.value(ry);
    let mut state = [PI, (ry * a_ry).ln()];
    let mut r_cur = ry;
    let mut step = None;
    let mut r_out = vec![ry];
    let mut lnf_out = vec![f64::NEG_INFINITY];
    let mut sign_out = vec![1.0];
    for i in (0..np).rev() {
        let r = rz + (ry - rz) * i as f64 / np as f64;
        let (s, last) = minus.advance_full(&ode, r_cur, state, r, step)?;
        state = s;
        step = Some(last);
        r_cur = r;
        let sc = minus.scale(r);
        let v = state[0].sin() / sc.s;
        r_out.push(r);
        lnf_out.push(state[1] + v.abs().ln());
        sign_out.push(v.signum());
    }
    let sc_r = minus.scale(rz);
    let (phi_r, lnrho_r) = (state[0], state[1]);

    // join: c · (y₋, z₋) ≈ (y₊, z₊) in the (C y, z) metric
    let gamma = transmission_gamma(config);
    let c_ref = sc_l.a * (n as f64 + 1.0);
    let ul = [c_ref * phi_l.sin() / sc_l.s, phi_l.cos()];
    let ur = [c_ref * phi_r.sin() / sc_r.s, -gamma * phi_r.cos()];
    let dot = ul[0] * ur[0] + ul[1] * ur[1];
    let rr = ur[0] * ur[0] + ur[1] * ur[1];
    let ratio = dot / rr;
    if ratio == 0.0 || !ratio.is_finite() {
        return Err(Error::NumericalFailure(format!(
            "mode {n}: cannot join profiles at lambda = {lambda}"
        )));
    }
    let ln_c = lnrho_l - lnrho_r + ratio.abs().ln();
    let sign_c = ratio.signum();

    // assemble ascending in r (skip duplicated interface sample from the outside)
    let mut r_all = r_in;
    let mut lnf = lnf_in;
    let mut sg = sign_in;
    for k in (0..r_out.len()).rev() {
        if r_out[k] <= rz {
            continue;
        }
        r_all.push(r_out[k]);
        lnf.push(lnf_out[k] + ln_c);
        sg.push(sign_out[k] * sign_c);
    }
    let ref_ln = lnf.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let f: Vec<f64> = lnf
        .iter()
        .zip(&sg)
        .map(|(l, s)| if l.is_finite() { s * (l - ref_ln).exp() } else { 0.0 })
        .collect();
    let mut prof = RadialProfile {
        n,
        lambda,
        r: r_all,
        f,
    };
    let mass = prof.total_mass();
    let scale = mass.sqrt().recip();
    prof.f.iter_mut().for_each(|v| *v *= scale);
    Ok(prof)
}
