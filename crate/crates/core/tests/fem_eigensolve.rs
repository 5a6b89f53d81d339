use proptest::prelude::*;
use signlap::eigensolve::{count_below, solve_dense, solve_sweep, solve_window, DENSE_CAP};
use signlap::fem::{assemble, build_disk_mesh, dot, partial_mass, AssembledPair, Region};
use signlap::radial::{expand_multiplicity, full_spectrum, mode_eigenvalues};
use signlap::{Exec, Transmission, TwoPhaseDiskConfig};

fn flux() -> TwoPhaseDiskConfig {
    TwoPhaseDiskConfig::reference(Transmission::Flux)
}

fn pair(edge: f64) -> AssembledPair {
    let c = flux();
    assemble(&c, &build_disk_mesh(&c, edge).unwrap(), Exec::Sequential).unwrap()
}

fn oracle_nearest_zero(lambda_max: f64, count: usize) -> (Vec<f64>, Vec<f64>) {
    let ev = expand_multiplicity(&full_spectrum(&flux(), lambda_max, Exec::default()).unwrap());
    let mut pos: Vec<f64> = ev.iter().copied().filter(|l| *l >= 0.0).collect();
    let mut neg: Vec<f64> = ev.iter().copied().filter(|l| *l < 0.0).collect();
    pos.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    neg.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    pos.truncate(count);
    neg.truncate(count);
    (pos, neg)
}

#[test]
fn mesh_has_interface_ring_and_scales_quadratically() {
    let c = flux();
    let a = build_disk_mesh(&c, 0.1).unwrap();
    a.validate().unwrap();
    for &v in &a.interface {
        let r = a.vertices[v][0].hypot(a.vertices[v][1]);
        assert!((r - 1.0).abs() <= 1e-12);
    }
    for &v in &a.boundary {
        let r = a.vertices[v][0].hypot(a.vertices[v][1]);
        assert!((r - 2.0).abs() <= 1e-12);
    }
    assert!(a.regions.contains(&Region::Plus) && a.regions.contains(&Region::Minus));
    let b = build_disk_mesh(&c, 0.05).unwrap();
    let ratio = b.triangles.len() as f64 / a.triangles.len() as f64;
    assert!((ratio / 4.0 - 1.0).abs() < 0.2, "{ratio}");
}

#[test]
fn mesh_export_layout() {
    let m = build_disk_mesh(&flux(), 0.5).unwrap();
    let mut buf = Vec::new();
    m.write_text(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let nv: usize = lines[0].parse().unwrap();
    assert_eq!(nv, m.vertices.len());
    let nt: usize = lines[nv + 1].parse().unwrap();
    assert_eq!(nt, m.triangles.len());
    assert_eq!(lines.len(), nv + nt + 2);
    assert!(lines[nv + 2].ends_with("plus"));
}

#[test]
fn stiffness_is_exactly_symmetric_with_signed_form() {
    let c = flux();
    let mesh = build_disk_mesh(&c, 0.1).unwrap();
    let p = assemble(&c, &mesh, Exec::Sequential).unwrap();
    assert_eq!(p.k.asymmetry(), 0.0);
    assert_eq!(p.m.asymmetry(), 0.0);
    // vectors supported strictly inside each phase
    let radius = |d: usize| {
        let v = mesh.vertices[p.dof_vertex[d]];
        v[0].hypot(v[1])
    };
    let bump = |d: usize, lo: f64, hi: f64| {
        let r = radius(d);
        if r > lo && r < hi {
            (1.0 + r).sin() + 1.5
        } else {
            0.0
        }
    };
    let plus: Vec<f64> = (0..p.dim()).map(|d| bump(d, -1.0, 0.9)).collect();
    let minus: Vec<f64> = (0..p.dim()).map(|d| bump(d, 1.1, 3.0)).collect();
    assert!(dot(&plus, &p.k.mul_vec(&plus)) > 0.0);
    assert!(dot(&minus, &p.k.mul_vec(&minus)) < 0.0);
    assert!(dot(&minus, &p.m.mul_vec(&minus)) > 0.0);
}

#[test]
fn affine_interpolant_is_in_kernel_away_from_interface_and_boundary() {
    let c = flux();
    let mesh = build_disk_mesh(&c, 0.1).unwrap();
    let p = assemble(&c, &mesh, Exec::Sequential).unwrap();
    let u: Vec<f64> = p
        .dof_vertex
        .iter()
        .map(|&v| 0.3 + 2.0 * mesh.vertices[v][0] - mesh.vertices[v][1])
        .collect();
    let ku = p.k.mul_vec(&u);
    let mut near = vec![false; mesh.vertices.len()];
    for tri in &mesh.triangles {
        let touches = tri.iter().any(|&v| {
            let r = mesh.vertices[v][0].hypot(mesh.vertices[v][1]);
            (r - 1.0).abs() < 1e-12 || (r - 2.0).abs() < 1e-12
        });
        if touches {
            for &v in tri {
                near[v] = true;
            }
        }
    }
    let mut nonzero_near = 0;
    for (d, &v) in p.dof_vertex.iter().enumerate() {
        if near[v] {
            nonzero_near += (ku[d].abs() > 1e-8) as usize;
        } else {
            assert!(ku[d].abs() < 1e-10, "row {d}: {}", ku[d]);
        }
    }
    assert!(nonzero_near > 0);
}

#[test]
fn assembly_is_bitwise_reproducible_across_schedules() {
    let c = flux();
    let mesh = build_disk_mesh(&c, 0.08).unwrap();
    let a = assemble(&c, &mesh, Exec::Sequential).unwrap();
    let b = assemble(&c, &mesh, Exec::Parallel).unwrap();
    assert_eq!(a.k, b.k);
    assert_eq!(a.m, b.m);
    let mut x = Vec::new();
    let mut y = Vec::new();
    a.k.write_coo(&mut x).unwrap();
    b.k.write_coo(&mut y).unwrap();
    assert_eq!(x, y);
}

#[test]
fn dense_and_windowed_agree_and_inertia_matches() {
    let p = pair(0.2);
    assert!(p.dim() < DENSE_CAP);
    let dense = solve_dense(&p, DENSE_CAP).unwrap();
    assert!(dense.meta.max_residual <= 1e-8);
    assert!(dense.meta.max_orthogonality_error <= 1e-8);
    let win = solve_window(&p, 10.0, 12).unwrap();
    for l in &win.eigenvalues {
        let best = dense
            .eigenvalues
            .iter()
            .map(|d| (d - l).abs() / l.abs())
            .fold(f64::INFINITY, f64::min);
        assert!(best < 1e-7, "{l}");
    }
    for tau in [-30.0, -0.5, 0.0, 7.0, 55.0] {
        let dense_count = dense.eigenvalues.iter().filter(|&&l| l < tau).count();
        assert_eq!(count_below(&p, tau).unwrap(), dense_count, "tau = {tau}");
    }
}

#[test]
fn window_near_mode10_interface_root() {
    let root = mode_eigenvalues(&flux(), 10, 50.0, 200.0).unwrap()[0].lambda;
    let p = pair(0.05);
    let s = solve_window(&p, root * 0.98, 10).unwrap();
    assert!(s.eigenvalues.iter().any(|l| (l - root).abs() / root < 0.02));
    assert!(s.meta.max_residual <= 1e-8);
}

#[test]
fn fem_converges_at_second_order() {
    let (pos, neg) = oracle_nearest_zero(120.0, 10);
    let mut errs = Vec::new();
    for edge in [0.1, 0.05] {
        let s = solve_window(&pair(edge), 0.0, 40).unwrap();
        let e: Vec<f64> = s
            .nearest_zero(true, 10)
            .iter()
            .zip(&pos)
            .chain(s.nearest_zero(false, 10).iter().zip(&neg))
            .map(|(a, b)| (a - b).abs())
            .collect();
        errs.push(e);
    }
    for k in 0..20 {
        let slope = (errs[0][k] / errs[1][k]).log2();
        assert!((1.7..=2.3).contains(&slope), "eigenvalue {k}: slope {slope}");
    }
}

#[test]
fn sweep_merges_overlapping_windows_without_duplicates() {
    let p = pair(0.15);
    let dense = solve_dense(&p, DENSE_CAP).unwrap();
    let s = solve_sweep(&p, &[0.0, 15.0], 20, Exec::Parallel).unwrap();
    assert!(s.meta.max_orthogonality_error <= 1e-8);
    let lo = s.eigenvalues[0];
    let hi = *s.eigenvalues.last().unwrap();
    let expected = dense.eigenvalues.iter().filter(|&&l| l >= lo && l <= hi).count();
    assert_eq!(s.len(), expected);
}

#[test]
fn partial_masses_add_up() {
    let c = flux();
    let mesh = build_disk_mesh(&c, 0.1).unwrap();
    let ones = vec![1.0; mesh.vertices.len()];
    let total = partial_mass(&mesh, &ones, |_| true);
    let inner = partial_mass(&mesh, &ones, |r| r < 1.0);
    let outer = partial_mass(&mesh, &ones, |r| r >= 1.0);
    assert!((inner + outer - total).abs() < 1e-12);
    assert!((inner - std::f64::consts::PI).abs() < 0.02);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn meshes_are_valid_for_any_edge(edge in 0.08f64..0.9) {
        let m = build_disk_mesh(&flux(), edge).unwrap();
        prop_assert!(m.validate().is_ok());
        let area: f64 = (0..m.triangles.len()).map(|t| m.signed_area(t)).sum();
        prop_assert!(area > 0.8 * 4.0 * std::f64::consts::PI);
    }
}
