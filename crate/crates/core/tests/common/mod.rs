//! Independent oracles used only by the integration tests: Bessel power
//! series, a plain RK4 radial shooter, and a 1D finite-element discretization
//! of the mode-separated problem.
#![allow(dead_code)]

use signlap::{RadialCoefficient, Transmission, TwoPhaseDiskConfig};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn factorial(k: u32) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `J_n(x)` by its power series (accurate for moderate `x`).
pub fn bessel_j(n: u32, x: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = (x / 2.0).powi(n as i32) / factorial(n);
    let q = -(x * x) / 4.0;
    for k in 0..200u32 {
        sum += term;
        term *= q / ((k + 1) as f64 * (k + 1 + n) as f64);
        if term.abs() < 1e-18 * sum.abs() && k > 5 {
            break;
        }
    }
    sum
}

pub fn bessel_j_prime(n: u32, x: f64) -> f64 {
    if n == 0 {
        -bessel_j(1, x)
    } else {
        0.5 * (bessel_j(n - 1, x) - bessel_j(n + 1, x))
    }
}

/// `I_n(x)` by its power series.
pub fn bessel_i(n: u32, x: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = (x / 2.0).powi(n as i32) / factorial(n);
    let q = x * x / 4.0;
    for k in 0..400u32 {
        sum += term;
        term *= q / ((k + 1) as f64 * (k + 1 + n) as f64);
        if term.abs() < 1e-18 * sum.abs() && k > 5 {
            break;
        }
    }
    sum
}

pub fn bessel_i_prime(n: u32, x: f64) -> f64 {
    if n == 0 {
        bessel_i(1, x)
    } else {
        0.5 * (bessel_i(n - 1, x) + bessel_i(n + 1, x))
    }
}

fn log_series(x: f64, alternating: bool) -> (f64, f64) {
    // Σ_{k≥1} s^k H_k (x/2)^{2k}/(k!)² and its derivative
    let mut v = 0.0;
    let mut d = 0.0;
    let mut h = 0.0;
    let q = x / 2.0;
    for k in 1..200u32 {
        h += 1.0 / k as f64;
        let sign = if alternating && k % 2 == 0 { -1.0 } else { 1.0 };
        let base = q.powi(2 * k as i32 - 1) / (factorial(k) * factorial(k));
        v += sign * h * base * q;
        d += sign * h * base * k as f64;
        if base * q < 1e-20 && k > 5 {
            break;
        }
    }
    (v, d)
}

/// `(Y₀(x), Y₀'(x))`.
pub fn bessel_y0(x: f64) -> (f64, f64) {
    let l = (x / 2.0).ln() + EULER_GAMMA;
    let (s, ds) = log_series(x, true);
    let c = 2.0 / std::f64::consts::PI;
    (
        c * (l * bessel_j(0, x) + s),
        c * (bessel_j(0, x) / x + l * bessel_j_prime(0, x) + ds),
    )
}

/// `(K₀(x), K₀'(x))`.
pub fn bessel_k0(x: f64) -> (f64, f64) {
    let l = (x / 2.0).ln() + EULER_GAMMA;
    let (s, ds) = log_series(x, false);
    (
        -l * bessel_i(0, x) + s,
        -bessel_i(0, x) / x - l * bessel_i_prime(0, x) + ds,
    )
}

/// Log-derivative at `r` of the solution of `(r a f')' = (a n²/r − E r) f`
/// with `f(r_start) = 0`, `f'(r_start) = −1`, by fixed-step RK4.
pub fn rk4_logderiv(coef: &RadialCoefficient, n: u32, e: f64, r_start: f64, r: f64, steps: usize) -> f64 {
    let n2 = (n * n) as f64;
    let rhs = |x: f64, y: [f64; 2]| {
        let a = coef.value(x);
        [y[1] / (x * a), (a * n2 / x - e * x) * y[0]]
    };
    let mut y = [0.0, -r_start * coef.value(r_start)];
    let hstep = (r - r_start) / steps as f64;
    let mut x = r_start;
    for _ in 0..steps {
        let k1 = rhs(x, y);
        let k2 = rhs(x + 0.5 * hstep, [y[0] + 0.5 * hstep * k1[0], y[1] + 0.5 * hstep * k1[1]]);
        let k3 = rhs(x + 0.5 * hstep, [y[0] + 0.5 * hstep * k2[0], y[1] + 0.5 * hstep * k2[1]]);
        let k4 = rhs(x + hstep, [y[0] + hstep * k3[0], y[1] + hstep * k3[1]]);
        for i in 0..2 {
            y[i] += hstep / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        x += hstep;
    }
    y[1] / (r * coef.value(r) * y[0])
}

/// Eigenvalues of mode `n` in `[lo, hi]` from a lumped-mass P1
/// discretization in `r` with `cells_per_unit` uniform cells per unit length
/// (a node sits on `rz`).
///
/// Weak form `∫₊ a(f'g' + n²fg/r²) r − β∫₋ a(…) r = λ(∫₊ fg r + β∫₋ fg r)`
/// with `β = 1` (flux) or `β = √(a₊/a₋)` at the interface (unit normal).
/// The symmetrized matrix is tridiagonal; eigenvalues are isolated by Sturm
/// counts and bisection.
pub fn fe1d_eigenvalues(
    config: &TwoPhaseDiskConfig,
    n: u32,
    cells_per_unit: usize,
    lo: f64,
    hi: f64,
) -> Vec<f64> {
    let rz = config.rz;
    let ry = config.ry;
    let beta = match config.transmission {
        Transmission::Flux => 1.0,
        Transmission::UnitNormal => (config.a_plus.value(rz) / config.a_minus.value(rz)).sqrt(),
    };
    let n_in = ((rz * cells_per_unit as f64).round() as usize).max(4);
    let n_out = (((ry - rz) * cells_per_unit as f64).round() as usize).max(4);
    let mut nodes: Vec<f64> = (0..=n_in).map(|i| rz * i as f64 / n_in as f64).collect();
    nodes.extend((1..=n_out).map(|i| rz + (ry - rz) * i as f64 / n_out as f64));
    let total = nodes.len();
    let mut diag = vec![0.0; total];
    let mut off = vec![0.0; total];
    let mut mass = vec![0.0; total];
    let g = [0.5 - 0.5 / 3f64.sqrt(), 0.5 + 0.5 / 3f64.sqrt()];
    let n2 = (n * n) as f64;
    for e in 0..total - 1 {
        let (x0, x1) = (nodes[e], nodes[e + 1]);
        let hl = x1 - x0;
        let (coef, sgn, w) = if x1 <= rz + 1e-14 {
            (&config.a_plus, 1.0, 1.0)
        } else {
            (&config.a_minus, -1.0, beta)
        };
        for &t in &g {
            let r = x0 + t * hl;
            let a = coef.value(r);
            let phi = [1.0 - t, t];
            let dphi = [-1.0 / hl, 1.0 / hl];
            let kij = |i: usize, j: usize| {
                0.5 * hl * sgn * w * a * (dphi[i] * dphi[j] * r + n2 * phi[i] * phi[j] / r)
            };
            diag[e] += kij(0, 0);
            diag[e + 1] += kij(1, 1);
            off[e] += kij(0, 1);
            mass[e] += 0.5 * hl * w * phi[0] * r;
            mass[e + 1] += 0.5 * hl * w * phi[1] * r;
        }
    }
    // free nodes: drop r = 0 for n ≥ 1 (f(0) = 0) and r = ry (Dirichlet)
    let first = if n == 0 { 0 } else { 1 };
    let last = total - 1;
    let d: Vec<f64> = (first..last).map(|i| diag[i] / mass[i]).collect();
    let o: Vec<f64> = (first..last - 1)
        .map(|i| off[i] / (mass[i] * mass[i + 1]).sqrt())
        .collect();
    let below = |x: f64| -> usize {
        let mut count = 0;
        let mut q = d[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..d.len() {
            let q_prev = if q == 0.0 { 1e-300 } else { q };
            q = d[i] - x - o[i - 1] * o[i - 1] / q_prev;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };
    let mut out = Vec::new();
    let mut stack = vec![(lo, hi, below(lo), below(hi))];
    while let Some((a, b, ca, cb)) = stack.pop() {
        if cb <= ca {
            continue;
        }
        if b - a < 1e-11 * b.abs().max(1.0) {
            out.extend(std::iter::repeat_n(0.5 * (a + b), cb - ca));
            continue;
        }
        let m = 0.5 * (a + b);
        let cm = below(m);
        stack.push((a, m, ca, cm));
        stack.push((m, b, cm, cb));
    }
    out.sort_by(f64::total_cmp);
    out
}

/// The reference configuration in the requested convention.
pub fn reference_config(t: Transmission) -> TwoPhaseDiskConfig {
    TwoPhaseDiskConfig::reference(t)
}
