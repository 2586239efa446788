use proptest::prelude::*;
use surfband::analysis::{gauge_covariance_residual, observed_order};
use surfband::discretize::{build_grid, StencilOrder};
use surfband::fields::{
    add_gauge, eval_potential, local_to_cartesian, magnetic_field_of, magnetic_field_on_grid, GaugeFieldSpec,
    GaugeFunction, SampledPotential,
};
use surfband::geometry::{PhysicalConstants, SurfaceSpec};
use surfband::hamiltonians::magnetic_cylinder;
use surfband::discretize::SurfacePoint;
use surfband::{Complex64, Error};

fn csv_for(grid: &surfband::discretize::Grid, with_ar: bool) -> String {
    let mut s = String::from(if with_ar { "c1,c2,A1,A2,Ar\n" } else { "c1,c2,A1,A2\n" });
    for i in (0..grid.len()).rev() {
        let p = grid.point(i);
        s.push_str(&format!("{:.17e},{:.17e},{},{}", p.c1, p.c2, 0.5 * p.c1.cos(), p.c2));
        if with_ar {
            s.push_str(&format!(",{}", i as f64));
        }
        s.push('\n');
    }
    s
}

#[test]
fn csv_rows_are_matched_to_nodes_in_any_order() {
    let g = build_grid(&SurfaceSpec::cylinder(1.0, 1.0).unwrap(), 6, 4).unwrap();
    let (s, ar) = SampledPotential::from_csv(&g, csv_for(&g, true).as_bytes()).unwrap();
    let (a1, a2) = s.components();
    for i in 0..g.len() {
        let p = g.point(i);
        assert_eq!(a1[i], 0.5 * p.c1.cos());
        assert_eq!(a2[i], p.c2);
    }
    assert_eq!(ar.unwrap()[3], 3.0);
    let (_, none) = SampledPotential::from_csv(&g, csv_for(&g, false).as_bytes()).unwrap();
    assert!(none.is_none());
}

#[test]
fn malformed_field_files_are_rejected() {
    let g = build_grid(&SurfaceSpec::ring(1.0).unwrap(), 4, 1).unwrap();
    let good = csv_for(&g, false);
    let headerless: String = good.lines().skip(1).map(|l| format!("{l}\n")).collect();
    let missing: String = good.lines().take(good.lines().count() - 1).map(|l| format!("{l}\n")).collect();
    let off_grid = good.replacen("\n0.", "\n0.1", 1);
    let three_cols = "a,b,c\n0,0,1\n";
    for bad in [headerless.as_str(), missing.as_str(), three_cols, "", off_grid.as_str()] {
        match SampledPotential::from_csv(&g, bad.as_bytes()) {
            Err(Error::FieldFile(_)) => {}
            other => panic!("expected a field-file error, got {other:?}"),
        }
    }
}

#[test]
fn multivalued_gauge_functions_are_rejected() {
    let ring = build_grid(&SurfaceSpec::ring(1.0).unwrap(), 8, 1).unwrap();
    assert!(matches!(GaugeFunction::from_fn(&ring, |p| p.c1), Err(Error::MultivaluedGauge(_))));
    let sph = build_grid(&SurfaceSpec::sphere(1.0).unwrap(), 6, 8).unwrap();
    assert!(matches!(GaugeFunction::from_fn(&sph, |p| p.c2.cos()), Err(Error::MultivaluedGauge(_))));
    assert!(GaugeFunction::from_fn(&sph, |p| p.c1.sin() * p.c2.cos()).is_ok());
}

#[test]
fn flux_line_is_singular_at_the_sphere_poles() {
    let s = SurfaceSpec::sphere(1.0).unwrap();
    let f = GaugeFieldSpec::ab_flux(0.3).unwrap();
    for c1 in [0.0, std::f64::consts::PI] {
        let p = SurfacePoint { c1, c2: 0.4 };
        assert!(matches!(eval_potential(&f, &s, p), Err(Error::SingularAtPole)));
        assert!(matches!(magnetic_field_of(&f, &s, p), Err(Error::SingularAtPole)));
    }
}

#[test]
fn sampled_sphere_potential_reproduces_the_uniform_normal_field() {
    let b = 1.3;
    let r = 0.8;
    let err = |n: usize| {
        let g = build_grid(&SurfaceSpec::sphere(r).unwrap(), n, 2 * n).unwrap();
        let s = SampledPotential::from_fn(&g, |p| (0.0, 0.5 * b * r * p.c1.sin())).unwrap();
        let field = magnetic_field_on_grid(&GaugeFieldSpec::sampled(s), &g).unwrap();
        (0..g.len()).map(|i| (field[i][0] - b * g.point(i).c1.cos()).abs()).fold(0.0, f64::max)
    };
    let (e1, e2) = (err(16), err(32));
    assert!(e2 < 1e-2);
    assert!((observed_order(e1, e2) - 2.0).abs() < 0.3, "{e1} -> {e2}");
}

#[test]
fn gauge_attachments_leave_the_field_unchanged() {
    let g = build_grid(&SurfaceSpec::cylinder(1.0, 1.0).unwrap(), 8, 6).unwrap();
    let f = GaugeFieldSpec::uniform_axial(0.7).unwrap();
    let lam = GaugeFunction::from_fn(&g, |p| p.c1.sin() * p.c2).unwrap();
    assert_eq!(magnetic_field_on_grid(&f, &g).unwrap(), magnetic_field_on_grid(&add_gauge(&f, &lam), &g).unwrap());
}

#[test]
fn analytic_gradient_gauge_covariance_converges_at_second_order() {
    let c = PhysicalConstants::default();
    let residual = |n: usize| {
        let g = build_grid(&SurfaceSpec::ring(1.0).unwrap(), n, 1).unwrap();
        let lam = GaugeFunction::from_fn(&g, |p| p.c1.sin() + 0.3 * (2.0 * p.c1).cos())
            .unwrap()
            .with_analytic_gradient(&g, |p| [p.c1.cos() - 0.6 * (2.0 * p.c1).sin(), 0.0])
            .unwrap();
        let psi: Vec<Complex64> = g.coords1().iter().map(|t| Complex64::from_polar(t.cos().exp(), *t)).collect();
        let f = GaugeFieldSpec::uniform_axial(1.0).unwrap();
        gauge_covariance_residual(&f, &lam, &c, |f| magnetic_cylinder(&g, f, &c, StencilOrder::Second, false), &psi)
            .unwrap()
    };
    let (e1, e2) = (residual(32), residual(64));
    assert!(e2 < 1e-2);
    assert!((observed_order(e1, e2) - 2.0).abs() < 0.3, "{e1} -> {e2}");
}

proptest! {
    #[test]
    fn uniform_axial_field_is_cartesian_z_everywhere(
        b in -5.0f64..5.0,
        r in 0.1f64..10.0,
        c1 in 0.01f64..3.13,
        c2 in -1.0f64..6.0,
    ) {
        let f = GaugeFieldSpec::uniform_axial(b).unwrap();
        for s in [SurfaceSpec::cylinder(r, 1.0).unwrap(), SurfaceSpec::ring(r).unwrap(), SurfaceSpec::sphere(r).unwrap()] {
            let p = SurfacePoint { c1, c2 };
            let v = local_to_cartesian(&s, p, magnetic_field_of(&f, &s, p).unwrap());
            prop_assert!(v[0].abs() <= 1e-12 * b.abs() && v[1].abs() <= 1e-12 * b.abs());
            prop_assert!((v[2] - b).abs() <= 1e-12 * b.abs());
        }
    }
}
