use num_complex::Complex64;
use proptest::prelude::*;
use signlap::radial::{dtn_eigenvalue, Side};
use signlap::wkb::{
    collar_laplacian_d, dtn_symbol, eikonal_series, principal_convergence, subprincipal_estimate,
    transport_series, write_symbol_csv, DModel, MetricCollar, ModeFamily, TruncatedSeries,
};
use signlap::{Error, Transmission, TwoPhaseDiskConfig};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Hand-derived subprincipal coefficient of the collar Laplacian:
/// `c₁ = ∓(√a / 2R) ε / (η² + ε)` (upper sign inside the disk).
fn collar_c1(side: Side, a: f64, r: f64, eps: f64, eta: f64) -> f64 {
    let s = match side {
        Side::Plus => -1.0,
        Side::Minus => 1.0,
    };
    s * a.sqrt() / (2.0 * r) * eps / (eta * eta + eps)
}

fn family() -> ModeFamily {
    ModeFamily { n0: 20, h0: 0.1, levels: 4 }
}

#[test]
fn curved_collar_phase_matches_hand_expansion() {
    let collar = MetricCollar {
        side: Side::Plus,
        radius: 1.0,
        a: 1.0,
        width: 0.2,
    };
    for eta in [1.5, 2.0, 3.0] {
        let s = eikonal_series(&collar, -1, eta, 4).unwrap();
        let k = (eta * eta - 1.0f64).sqrt();
        assert!(s.coeff(0).norm() < 1e-15);
        assert!((s.coeff(1) - I * k).norm() < 1e-14);
        assert!((s.coeff(2) - I * eta * eta / (2.0 * k)).norm() < 1e-13);
    }
}

#[test]
fn constant_d_transport_is_exponential() {
    let collar = MetricCollar::flat(1.0, 0.5);
    let (eta, c) = (2.0f64, 0.7);
    let s = eikonal_series(&collar, 1, eta, 6).unwrap();
    let kappa = s.coeff(1).im;
    assert!((kappa - (eta * eta + 1.0).sqrt()).abs() < 1e-14);
    let d = TruncatedSeries::constant(Complex64::new(c, 0.0), 6);
    let a0 = transport_series(&s, &d).unwrap();
    let mut fact = 1.0;
    for k in 0..=6 {
        if k > 0 {
            fact *= k as f64;
        }
        let expect = (-c / (2.0 * kappa)).powi(k as i32) / fact;
        assert!((a0.coeff(k) - Complex64::new(expect, 0.0)).norm() < 1e-14, "k = {k}");
    }
}

#[test]
fn degenerate_transport_is_rejected() {
    let s = TruncatedSeries::from_real(&[0.0, 0.0, 1.0], 4);
    let d = TruncatedSeries::constant(Complex64::new(1.0, 0.0), 4);
    assert!(matches!(transport_series(&s, &d), Err(Error::TransportDegenerate)));
}

#[test]
fn collar_laplacian_symbol_matches_closed_form() {
    let cfg = TwoPhaseDiskConfig::reference(Transmission::Flux);
    for side in [Side::Plus, Side::Minus] {
        let collar = MetricCollar::from_config(&cfg, side);
        for eps in [-1, 0, 1] {
            for eta in [1.5, 2.0, 2.0 * 2f64.sqrt()] {
                let sym = dtn_symbol(&collar, eps, eta, Some(&DModel::CollarLaplacian)).unwrap();
                assert!((sym.c0 - (eta * eta + eps as f64).sqrt()).abs() < 1e-14);
                let expect = collar_c1(side, collar.a, collar.radius, eps as f64, eta);
                assert!((sym.c1.unwrap() - expect).abs() < 1e-13, "{side:?} {eps} {eta}");
            }
        }
    }
}

#[test]
fn bessel_quotient_gives_minus_one_half() {
    // flat-disk, ε = +1, η = 0: d = I₀'(1/h)/I₀(1/h) = 1 − h/2 + O(h²)
    let cfg = TwoPhaseDiskConfig::constant(1.0, 2.0, 1.0, 1.0, Transmission::Flux);
    let fam = ModeFamily { n0: 0, h0: 0.1, levels: 4 };
    let est = subprincipal_estimate(&cfg, Side::Plus, 1, fam).unwrap();
    assert!((est.c0 - 1.0).abs() < 1e-15);
    assert!((est.c1 + 0.5).abs() < 1e-3, "c1 = {}", est.c1);
    let collar = MetricCollar::from_config(&cfg, Side::Plus);
    let sym = dtn_symbol(&collar, 1, 0.0, Some(&DModel::CollarLaplacian)).unwrap();
    assert!((sym.c1.unwrap() + 0.5).abs() < 1e-15);
}

#[test]
fn empirical_subprincipal_agrees_with_collar_model() {
    let cfg = TwoPhaseDiskConfig::reference(Transmission::Flux);
    for side in [Side::Plus, Side::Minus] {
        for eps in [-1, 1] {
            let est = subprincipal_estimate(&cfg, side, eps, family()).unwrap();
            let collar = MetricCollar::from_config(&cfg, side);
            let expect = collar_c1(side, collar.a, collar.radius, eps as f64, est.eta);
            assert!((est.c1 - expect).abs() < 2e-3, "{side:?} {eps}: {} vs {expect}", est.c1);
            let s = est.principal_slope.unwrap();
            assert!((0.9..=1.1).contains(&s), "slope {s}");
            let r = est.remainder_slope.unwrap();
            assert!(r > 1.7, "remainder slope {r}");
        }
    }
}

#[test]
fn laplace_case_is_exact_on_the_disk() {
    let cfg = TwoPhaseDiskConfig::constant(1.0, 2.0, 1.0, 1.0, Transmission::Flux);
    for (h, n) in [(0.1, 20), (0.05, 7), (0.02, 100)] {
        let d = dtn_eigenvalue(&cfg, Side::Plus, 0, h, n).unwrap();
        assert!((d - h * n as f64).abs() < 1e-9 * (h * n as f64), "{d}");
    }
    let conv = principal_convergence(&cfg, Side::Plus, 0, family()).unwrap();
    assert!(conv.slope.is_none() || conv.error.iter().all(|&e| e < 1e-9));
}

#[test]
fn symbol_table_layout() {
    let cfg = TwoPhaseDiskConfig::reference(Transmission::Flux);
    let rows = vec![
        subprincipal_estimate(&cfg, Side::Plus, 1, family()).unwrap(),
        subprincipal_estimate(&cfg, Side::Minus, 0, family()).unwrap(),
    ];
    let mut buf = Vec::new();
    write_symbol_csv(&mut buf, &rows).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "epsilon,side,eta,c0,c1_empirical,remainder_slope");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("1,plus,"));
    assert!(lines[2].starts_with("0,minus,"));
}

proptest! {
    #[test]
    fn eikonal_solves_the_truncated_equation(eta in 1.05f64..4.0, eps in -1i32..=1, plus in any::<bool>()) {
        let side = if plus { Side::Plus } else { Side::Minus };
        let collar = MetricCollar { side, radius: 1.3, a: 1.7, width: 0.1 };
        let s = eikonal_series(&collar, eps, eta, 8).unwrap();
        let ds = s.derivative();
        // S' is reliable through order 7
        let lhs = &(&ds * &ds) + &collar.h_star(eta, 8);
        for k in 0..8 {
            let target = if k == 0 { -eps as f64 } else { 0.0 };
            prop_assert!((lhs.coeff(k) - Complex64::new(target, 0.0)).norm() < 1e-9 * (1.0 + eta * eta).powi(k as i32 / 2 + 1));
        }
        let d = collar_laplacian_d(&collar, &s);
        prop_assert!(transport_series(&s, &d).is_ok());
    }

    #[test]
    fn series_sqrt_squares_back(c in proptest::collection::vec(-2.0f64..2.0, 6), c0 in 0.5f64..3.0) {
        let mut coeffs = vec![c0];
        coeffs.extend(c);
        let s = TruncatedSeries::from_real(&coeffs, 6);
        let r = s.sqrt().unwrap();
        let back = &r * &r;
        for k in 0..=6 {
            prop_assert!((back.coeff(k) - s.coeff(k)).norm() < 1e-10);
        }
    }
}
