mod common;

use common::{bessel_j, bessel_j_prime, fe1d_eigenvalues, reference_config, rk4_logderiv};
use signlap::interface::{
    degenerate_matrix, delta_k_spectrum, hermitian_eigenvalues_2x2, interface_weyl,
    perturbation_first_order, q_exact, q_principal, quantize, quantize_range, write_interface_csv,
};
use signlap::numerics::{linear_fit, loglog_slope};
use signlap::radial::mode_eigenvalues;
use signlap::{Error, Exec, RadialCoefficient, Transmission};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn q_exact_matches_bessel_and_rk4_oracle() {
    let c = reference_config(Transmission::UnitNormal);
    for (n, h) in [(20u32, 200f64.powf(-0.5)), (12, 0.09), (30, 0.03)] {
        // plus side: J_n(k r), k = 1/(h√a₊)
        let k = 1.0 / (h * 2f64.sqrt());
        let dp = bessel_j_prime(n, k) / bessel_j(n, k);
        let w = rk4_logderiv(&RadialCoefficient::Constant(1.0), n, -1.0 / (h * h), 2.0, 1.0, 200_000);
        let dm = -h * w;
        let expect = 0.5 * (dp + dm) * (dp - dm);
        let got = q_exact(&c, h, n).unwrap();
        assert!((got - expect).abs() < 1e-6 * (1.0 + expect.abs()), "n={n}: {got} vs {expect}");
    }
}

#[test]
fn q_exact_is_close_to_principal_with_first_order_gap() {
    let c = reference_config(Transmission::UnitNormal);
    // characteristic point of n = 20: small but non-zero
    let q = q_exact(&c, 200f64.powf(-0.5), 20).unwrap();
    assert!(q.abs() > 1e-6 && q.abs() < 0.1, "{q}");
    // fixed η = h n: the gap is O(h)
    let hs: Vec<f64> = (2..5).map(|k| 0.1 / f64::from(1u32 << k)).collect();
    let gaps: Vec<f64> = hs
        .iter()
        .enumerate()
        .map(|(k, &h)| {
            let n = 15u32 << (k + 2);
            (q_exact(&c, h, n).unwrap() - q_principal(&c, h, n).unwrap()).abs()
        })
        .collect();
    let s = loglog_slope(&hs, &gaps);
    assert!((0.85..=1.1).contains(&s), "slope {s}");
}

#[test]
fn quantize_vanishes_q_and_matches_the_oracle() {
    let c = reference_config(Transmission::UnitNormal);
    for n in (10..=40).step_by(3) {
        let m = quantize(&c, n).unwrap();
        assert!(q_exact(&c, m.h_star, n).unwrap().abs() < 1e-10);
        let roots = mode_eigenvalues(&c, n, 0.9 * m.lambda, 1.1 * m.lambda).unwrap();
        assert_eq!(roots.len(), 1, "n={n}");
        assert!(rel(m.lambda, roots[0].lambda) < 1e-6, "n={n}");
    }
}

#[test]
fn quantize_agrees_with_fe1d() {
    let c = reference_config(Transmission::UnitNormal);
    let m = quantize(&c, 20).unwrap();
    let fe = fe1d_eigenvalues(&c, 20, 8000, 150.0, 250.0);
    assert_eq!(fe.len(), 1);
    assert!(rel(m.lambda, fe[0]) < 1e-3, "{} vs {}", m.lambda, fe[0]);
}

#[test]
fn quantized_values_follow_the_symbol() {
    let c = reference_config(Transmission::UnitNormal);
    assert!(rel(quantize(&c, 40).unwrap().lambda, 800.0) < 0.02);
    assert!(rel(quantize(&c, 10).unwrap().lambda, 50.0) < 0.10);
    let f = reference_config(Transmission::Flux);
    let m = quantize(&f, 40).unwrap();
    assert!((m.lambda / 1600.0 - 1.0).abs() < 0.03);
    assert!(matches!(quantize(&c, 1), Err(Error::NoInterfaceMode { n: 1, .. })));
    assert!(matches!(quantize(&c, 0), Err(Error::NoInterfaceMode { n: 0, .. })));
}

#[test]
fn ratio_defect_decays_like_one_over_n() {
    // n (λ/μ − 1) = C + D/n: the defect is C/n up to a 1/n² correction
    let c = reference_config(Transmission::UnitNormal);
    let modes = quantize_range(&c, 10..=40, Exec::default()).unwrap();
    assert_eq!(modes.len(), 31);
    let inv: Vec<f64> = modes.iter().map(|m| 1.0 / m.n as f64).collect();
    let defect: Vec<f64> = modes
        .iter()
        .map(|m| m.n as f64 * (m.lambda / m.lambda_principal - 1.0))
        .collect();
    let (slope, icpt) = linear_fit(&inv, &defect);
    let mean = defect.iter().sum::<f64>() / defect.len() as f64;
    let ss_tot: f64 = defect.iter().map(|d| (d - mean).powi(2)).sum();
    let ss_res: f64 = inv
        .iter()
        .zip(&defect)
        .map(|(x, d)| (d - slope * x - icpt).powi(2))
        .sum();
    assert!(1.0 - ss_res / ss_tot >= 0.99);
    assert!(icpt > 0.0 && icpt < 1.0);
}

#[test]
fn first_order_correction_improves_by_one_order() {
    for t in [Transmission::UnitNormal, Transmission::Flux] {
        let c = reference_config(t);
        let modes = quantize_range(&c, 10..=40, Exec::Sequential).unwrap();
        let ns: Vec<f64> = modes.iter().map(|m| m.n as f64).collect();
        let e0: Vec<f64> = modes.iter().map(|m| (m.lambda - m.lambda_principal).abs()).collect();
        let e1: Vec<f64> = modes.iter().map(|m| (m.lambda - m.lambda_corrected).abs()).collect();
        assert!(e0.iter().zip(&e1).all(|(a, b)| b < a), "{t:?}");
        let gain = loglog_slope(&ns, &e0) - loglog_slope(&ns, &e1);
        assert!(gain >= 0.8, "{t:?}: {gain}");
    }
}

#[test]
fn degenerate_pair_matrix_is_scalar() {
    let c = reference_config(Transmission::UnitNormal);
    for n in [10, 25] {
        let m = degenerate_matrix(&c, n).unwrap();
        let p = perturbation_first_order(&c, n).unwrap();
        assert!((m[0][0].re - p.p1).abs() < 1e-12 && (m[1][1].re - p.p1).abs() < 1e-12);
        assert!(m[0][1].norm() < 1e-12 && m[1][0].norm() < 1e-12);
        let ev = hermitian_eigenvalues_2x2(&m);
        assert!((ev[0] - ev[1]).abs() < 1e-12);
        assert!((-0.5 * ev[0] - p.alpha1).abs() < 1e-12);
    }
}

#[test]
fn delta_k_recovers_leading_coefficient() {
    let c = reference_config(Transmission::UnitNormal);
    let s = delta_k_spectrum(&c, 40).unwrap();
    for e in &s[1..] {
        assert!((e.mu / (e.n as f64).powi(2) - 0.5).abs() < 1e-12);
        assert!((e.h.unwrap() - e.mu.powf(-0.5)).abs() < 1e-15);
    }
}

#[test]
fn interface_weyl_scaling() {
    let c = reference_config(Transmission::UnitNormal);
    let a = interface_weyl(&c, 200.0).unwrap();
    let b = interface_weyl(&c, 800.0).unwrap();
    assert!((b.asymptotic - 2.0 * a.asymptotic).abs() < 1e-12);
    assert_eq!(b.lattice, 80);
}

#[test]
fn interface_table_layout() {
    let c = reference_config(Transmission::Flux);
    let modes = quantize_range(&c, 10..=12, Exec::Sequential).unwrap();
    let mut buf = Vec::new();
    write_interface_csv(&mut buf, &modes).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,h_star,lambda,lambda_principal,lambda_corrected,alpha1,convention");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("10,") && lines[1].ends_with(",flux"));
}
