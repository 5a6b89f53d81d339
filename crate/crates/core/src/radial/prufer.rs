//! Scaled Prüfer integration of the mode-`n` radial equation on one phase.
//!
//! On each phase the radial profile satisfies `(p f')' = (p n²/r² − E r) f`
//! with `p = r a(r)`, where the spectral term is `E = λ` on the positive phase
//! and `E = −λ` on the negative one. In `t = ln r`, with `y = f` and
//! `z = p f'`,
//!
//! ```text
//! y_t = z / a,     z_t = G y,     G(r) = a n² − E r²,
//! ```
//!
//! and the scaled angle `φ = atan2(S y, z)` obeys
//!
//! ```text
//! φ_t = (S/a) cos²φ − (G/S) sin²φ + (S_t/S) sinφ cosφ
//! (ln ρ)_t = sinφ cosφ (S/a + G/S) + (S_t/S) sin²φ
//! ```
//!
//! with `S² = a √(G² + a²)`. The angle never overflows, its multiples of `π`
//! mark the zeros of `f`, and `ln ρ` carries the amplitude for profiles.

use crate::error::Result;
use crate::geometry::RadialCoefficient;
use crate::numerics::ode::Dopri5;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Scale {
    pub a: f64,
    pub s: f64,
    pub g: f64,
    pub st_over_s: f64,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct PhaseOde<'a> {
    coef: &'a RadialCoefficient,
    n2: f64,
    e: f64,
}

impl<'a> PhaseOde<'a> {
    pub fn new(coef: &'a RadialCoefficient, n: u32, e: f64) -> Self {
        PhaseOde {
            coef,
            n2: (n as f64) * (n as f64),
            e,
        }
    }

    #[inline]
    pub fn scale(&self, r: f64) -> Scale {
        let (a, da) = self.coef.eval(r);
        let g = a * self.n2 - self.e * r * r;
        let dg = da * self.n2 - 2.0 * self.e * r;
        let root = (g * g + a * a).sqrt();
        let s2 = a * root;
        let ds2 = da * root + a * (g * dg + a * da) / root;
        Scale {
            a,
            s: s2.sqrt(),
            g,
            st_over_s: r * ds2 / (2.0 * s2),
        }
    }

    #[inline]
    fn angle_rate(&self, t: f64, phi: f64) -> f64 {
        let sc = self.scale(t.exp());
        let (sn, cs) = phi.sin_cos();
        (sc.s / sc.a) * cs * cs - (sc.g / sc.s) * sn * sn + sc.st_over_s * sn * cs
    }

    #[inline]
    fn full_rate(&self, t: f64, phi: f64) -> [f64; 2] {
        let sc = self.scale(t.exp());
        let (sn, cs) = phi.sin_cos();
        [
            (sc.s / sc.a) * cs * cs - (sc.g / sc.s) * sn * sn + sc.st_over_s * sn * cs,
            sn * cs * (sc.s / sc.a + sc.g / sc.s) + sc.st_over_s * sn * sn,
        ]
    }

    /// Advance `φ` from `r_from` to `r_to`.
    pub fn advance_angle(&self, ode: &Dopri5, r_from: f64, phi: f64, r_to: f64) -> Result<f64> {
        let (y, _) = ode.integrate(
            |t, y: &[f64; 1]| [self.angle_rate(t, y[0])],
            r_from.ln(),
            [phi],
            r_to.ln(),
            None,
        )?;
        Ok(y[0])
    }

    /// Advance `(φ, ln ρ)` from `r_from` to `r_to`; returns the last step for
    /// warm starts.
    pub fn advance_full(
        &self,
        ode: &Dopri5,
        r_from: f64,
        state: [f64; 2],
        r_to: f64,
        step: Option<f64>,
    ) -> Result<([f64; 2], f64)> {
        let (y, stats) = ode.integrate(
            |t, y: &[f64; 2]| self.full_rate(t, y[0]),
            r_from.ln(),
            state,
            r_to.ln(),
            step,
        )?;
        Ok((y, stats.last_step))
    }
}

/// Starting data for the solution regular at the origin.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RegularStart {
    pub r0: f64,
    pub phi: f64,
    pub ln_rho: f64,
}

/// Frobenius start `f = rⁿ (1 + c₁r + c₂r² + …)` for the positive phase.
///
/// The even part is the Bessel-type series of the frozen coefficient `a(0)`;
/// `c₁` accounts for `a'(0)`. For `n ≥ 1` any start error is damped by
/// `(r₀/r)^{2n}`, which sets how far from the singular point the start may be.
pub(crate) fn regular_start(ode: &PhaseOde, coef: &RadialCoefficient, n: u32, e: f64, rz: f64) -> RegularStart {
    let a0 = coef.value(0.0);
    let nf = n as f64;
    let mut r0 = if n == 0 {
        1e-6 * rz
    } else {
        rz * (1e-14f64).powf(1.0 / (2.0 * nf + 1.0)).clamp(1e-6, 0.5)
    };
    if e != 0.0 {
        r0 = r0.min((1e-2 * 4.0 * a0 * (nf + 1.0) / e.abs()).sqrt());
    }
    series_start(ode, coef, n, e, r0.max(1e-9 * rz))
}

/// Frobenius data evaluated at a given `r0` (assumed inside the series region).
pub(crate) fn series_start(ode: &PhaseOde, coef: &RadialCoefficient, n: u32, e: f64, r0: f64) -> RegularStart {
    let (a0, a1) = coef.eval(0.0);
    let nf = n as f64;
    let c1 = -a1 * nf / (a0 * (2.0 * nf + 1.0));
    // even series terms c_{2k} r^{2k}
    let x = -e / a0;
    let mut term = 1.0;
    let mut f = 1.0 + c1 * r0;
    let mut df = c1;
    for k in 1..60 {
        let kf = k as f64;
        term *= x * r0 * r0 / (4.0 * kf * (nf + kf));
        f += term;
        df += 2.0 * kf * term / r0;
        if term.abs() < 1e-18 * f.abs() {
            break;
        }
    }
    let sc = ode.scale(r0);
    let sy = sc.s * f;
    let z = sc.a * (nf * f + r0 * df);
    RegularStart {
        r0,
        phi: sy.atan2(z),
        ln_rho: nf * r0.ln() + sy.hypot(z).ln(),
    }
}

/// Angle of `(ratio · sin φ, cos φ)` on the same branch as `φ`.
#[inline]
pub(crate) fn rescale_angle(phi: f64, ratio: f64) -> f64 {
    let k = (phi / std::f64::consts::PI).floor();
    let base = phi - k * std::f64::consts::PI;
    let (sn, cs) = base.sin_cos();
    k * std::f64::consts::PI + (ratio * sn).atan2(cs)
}
