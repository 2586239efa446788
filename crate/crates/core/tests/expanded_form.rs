//! The link-form Hamiltonians against the expanded continuum operators
//! applied analytically to smooth test functions.

use surfband::analysis::observed_order;
use surfband::discretize::{build_grid, StencilOrder};
use surfband::fields::GaugeFieldSpec;
use surfband::geometry::{PhysicalConstants, SurfaceSpec};
use surfband::hamiltonians::{magnetic_cylinder, magnetic_sphere};
use surfband::Complex64;

const B: f64 = 0.8;

fn consts() -> PhysicalConstants {
    PhysicalConstants::new(1.1, 0.9, 1.3).unwrap()
}

/// Max nodal error of `H psi` on a cylinder of radius 1.2 and half-length 1.
/// psi = exp(cos t) cos(pi z / 2L); H = (hbar^2/2m)[(-i/R d_t - a)^2 - d_z^2] + GKE
/// with a = eBR/2hbar.
fn cylinder_error(n1: usize, n2: usize, order: StencilOrder) -> f64 {
    let c = consts();
    let (r, l) = (1.2, 1.0);
    let g = build_grid(&SurfaceSpec::cylinder(r, l).unwrap(), n1, n2).unwrap();
    let h = magnetic_cylinder(&g, &GaugeFieldSpec::uniform_axial(B).unwrap(), &c, order, false).unwrap();
    let k = std::f64::consts::PI / (2.0 * l);
    let a = c.charge * B * r / (2.0 * c.hbar);
    let scale = c.hbar * c.hbar / (2.0 * c.mass);
    let gke = -scale / (4.0 * r * r);
    let psi: Vec<Complex64> = (0..g.len())
        .map(|i| {
            let p = g.point(i);
            Complex64::new(p.c1.cos().exp() * (k * p.c2).cos(), 0.0)
        })
        .collect();
    let hpsi = h.apply(&psi).unwrap();
    (0..g.len())
        .map(|i| {
            let p = g.point(i);
            let f = p.c1.cos().exp();
            let f1 = -p.c1.sin() * f;
            let f2 = (p.c1.sin().powi(2) - p.c1.cos()) * f;
            let z = (k * p.c2).cos();
            let ang = Complex64::new(-f2 / (r * r) + a * a * f, 2.0 * a * f1 / r) * z;
            let exact = ang * scale + Complex64::new(scale * k * k * f * z, 0.0) + psi[i] * gke;
            (hpsi[i] - exact).norm()
        })
        .fold(0.0, f64::max)
}

#[test]
fn cylinder_matches_expanded_operator_at_stencil_order() {
    for (order, p) in [(StencilOrder::Second, 2.0), (StencilOrder::Fourth, 4.0)] {
        let e1 = cylinder_error(24, 20, order);
        let e2 = cylinder_error(48, 40, order);
        let q = observed_order(e1, e2);
        assert!(e2 < 5e-2, "order {p}: error {e2}");
        assert!((q - p).abs() < 0.3, "order {p}: observed {q} ({e1} -> {e2})");
    }
}

/// Same on a sphere of radius R with psi = exp(cos t) + 0.5 sin t e^{i phi},
/// compared on the band sin t > 0.7 away from the poles.
fn sphere_error(n: usize, order: StencilOrder) -> f64 {
    let c = consts();
    let r = 0.9;
    let g = build_grid(&SurfaceSpec::sphere(r).unwrap(), n, 2 * n).unwrap();
    let h = magnetic_sphere(&g, &GaugeFieldSpec::uniform_axial(B).unwrap(), &c, order, false).unwrap();
    let scale = c.hbar * c.hbar / (2.0 * c.mass);
    let psi: Vec<Complex64> = (0..g.len())
        .map(|i| {
            let p = g.point(i);
            Complex64::new(p.c1.cos().exp(), 0.0) + Complex64::from_polar(0.5 * p.c1.sin(), p.c2)
        })
        .collect();
    let hpsi = h.apply(&psi).unwrap();
    (0..g.len())
        .filter(|&i| g.point(i).c1.sin() > 0.7)
        .map(|i| {
            let p = g.point(i);
            let u = p.c1.cos();
            let s = p.c1.sin();
            let a = c.charge * B * r * s / (2.0 * c.hbar);
            let f = u.exp();
            let y = Complex64::from_polar(0.5 * s, p.c2);
            // -Laplace-Beltrami: exp(u) -> -((1-u^2) - 2u) e^u / R^2, Y_1 -> 2/R^2
            let lap = Complex64::new(-((1.0 - u * u) - 2.0 * u) * f / (r * r), 0.0) + y * (2.0 / (r * r));
            // 2i a/(R s) d_phi + a^2
            let mag = y * (-2.0 * a / (r * s)) + psi[i] * (a * a);
            (hpsi[i] - (lap + mag) * scale).norm()
        })
        .fold(0.0, f64::max)
}

#[test]
fn sphere_matches_expanded_operator_away_from_poles() {
    for order in [StencilOrder::Second, StencilOrder::Fourth] {
        let e1 = sphere_error(16, order);
        let e2 = sphere_error(32, order);
        let q = observed_order(e1, e2);
        assert!(e2 < 2e-2, "error {e2}");
        assert!((q - 2.0).abs() < 0.3, "observed {q} ({e1} -> {e2})");
    }
}
