//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::process::Command;
use std::time::Instant;

use surfband::analysis::{
    analytic_cylinder_landau, analytic_ring_spectrum, antihermitian_part, discrete_ring_energy,
    gauge_operator_residual, observed_order, spectrum, spectrum_gauge_invariance,
};
use surfband::discretize::{build_grid, hermiticity_residual, Grid, StencilOrder};
use surfband::fields::{GaugeFieldSpec, GaugeFunction, RadialComponent, SampledPotential};
use surfband::geometry::{geometric_kinetic_energy, PhysicalConstants, SurfaceSpec};
use surfband::hamiltonians::{free_sphere, magnetic_cylinder, magnetic_sphere, pragmatic_cylinder};
use surfband::radial::{commutator_defect, laplacian_identity_defect, RadialFamily, RadialGrid};
use surfband::thinlayer::gke_extrapolate;
use surfband::Complex64;

const ORDERS: [StencilOrder; 2] = [StencilOrder::Second, StencilOrder::Fourth];

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn unit() -> PhysicalConstants {
    PhysicalConstants::default()
}

/// 1. GKE equals -hbar^2/8mR^2 on cylinders and rings and vanishes on spheres, exactly.
fn gke_values() -> Outcome {
    let mut worst = 0.0f64;
    for c in [unit(), PhysicalConstants::new(1.3, 0.7, -2.0).unwrap()] {
        for r in [0.5, 1.0, 2.0] {
            let expect = -c.hbar * c.hbar / (8.0 * c.mass * r * r);
            for s in [SurfaceSpec::cylinder(r, 1.0).unwrap(), SurfaceSpec::ring(r).unwrap()] {
                worst = worst.max((geometric_kinetic_energy(&s, &c).unwrap() - expect).abs());
            }
            worst = worst.max(geometric_kinetic_energy(&SurfaceSpec::sphere(r).unwrap(), &c).unwrap().abs());
        }
    }
    check(worst == 0.0, format!("max deviation {worst:e}"))
}

/// 2. Thin-shell extrapolation reproduces the GKE to 1e-6 within 30 s.
fn gke_emergence() -> Outcome {
    let t = Instant::now();
    let ds = [0.1, 0.05, 0.025, 0.0125];
    let c = unit();
    let mut worst = 0.0f64;
    let mut orders = Vec::new();
    for (s, expect) in [(SurfaceSpec::cylinder(1.0, 1.0).unwrap(), -0.125), (SurfaceSpec::sphere(1.0).unwrap(), 0.0)] {
        for l in 0..=2 {
            let est = gke_extrapolate(&s, l, &ds, None, &c).unwrap();
            worst = worst.max((est.gke - expect).abs());
            if est.order.is_finite() {
                orders.push(est.order);
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    check(
        worst <= 1e-6 && secs <= 30.0,
        format!("max |gke - expected| {worst:.3e}, observed orders {orders:.2?} (exact samples omitted), {secs:.2} s"),
    )
}

fn grids() -> Vec<Grid> {
    vec![
        build_grid(&SurfaceSpec::ring(1.3).unwrap(), 24, 1).unwrap(),
        build_grid(&SurfaceSpec::cylinder(0.8, 1.5).unwrap(), 10, 9).unwrap(),
        build_grid(&SurfaceSpec::sphere(1.1).unwrap(), 10, 12).unwrap(),
    ]
}

/// 3. Correct Hamiltonians are weighted-Hermitian to 1e-12; the pragmatic one
/// has anti-Hermitian part i(hbar e/2m)(a/R) on the diagonal to 1e-14.
fn hermiticity_dichotomy() -> Outcome {
    let mut worst = 0.0f64;
    let c = unit();
    for g in grids() {
        let sampled = SampledPotential::from_fn(&g, |p| (0.3 + p.c2.cos() * 0.2, 0.4 * p.c1.sin())).unwrap();
        let fields = [
            GaugeFieldSpec::zero(),
            GaugeFieldSpec::uniform_axial(1.0).unwrap(),
            GaugeFieldSpec::ab_flux(0.37).unwrap(),
            GaugeFieldSpec::sampled(sampled),
        ];
        for order in ORDERS {
            for f in &fields {
                for spin in [false, true] {
                    let h = if g.surface().kind == surfband::geometry::SurfaceKind::Sphere {
                        magnetic_sphere(&g, f, &c, order, spin).unwrap()
                    } else {
                        magnetic_cylinder(&g, f, &c, order, spin).unwrap()
                    };
                    worst = worst.max(hermiticity_residual(&h));
                }
            }
        }
    }
    let mut anti_dev = 0.0f64;
    for (consts, a, r) in [(unit(), 1.0, 1.0), (PhysicalConstants::new(0.9, 1.7, 1.4).unwrap(), -0.6, 1.3)] {
        for g in [
            build_grid(&SurfaceSpec::ring(r).unwrap(), 16, 1).unwrap(),
            build_grid(&SurfaceSpec::cylinder(r, 1.0).unwrap(), 8, 7).unwrap(),
        ] {
            let f = GaugeFieldSpec::uniform_axial(0.5)
                .unwrap()
                .with_radial(RadialComponent::Uniform { value: a, derivative: 0.0 })
                .unwrap();
            for order in ORDERS {
                let ah = antihermitian_part(&pragmatic_cylinder(&g, &f, &consts, order, false).unwrap());
                let expect = consts.hbar * consts.charge / (2.0 * consts.mass) * a / r;
                for i in 0..ah.dim() {
                    for j in 0..ah.dim() {
                        let target = if i == j { Complex64::new(0.0, expect) } else { Complex64::new(0.0, 0.0) };
                        anti_dev = anti_dev.max((ah.get(i, j) - target).norm());
                    }
                }
            }
        }
    }
    check(
        worst <= 1e-12 && anti_dev <= 1e-14,
        format!("max correct residual {worst:.3e}, pragmatic anti-Hermitian deviation {anti_dev:.3e}"),
    )
}

/// 4. Gauge covariance with B = 1 on cylinder and sphere.
fn gauge_covariance() -> Outcome {
    let c = unit();
    let b = GaugeFieldSpec::uniform_axial(1.0).unwrap();
    let mut op = 0.0f64;
    let mut spec = 0.0f64;
    for order in ORDERS {
        let cyl = build_grid(&SurfaceSpec::cylinder(1.0, 1.0).unwrap(), 14, 12).unwrap();
        let lam = GaugeFunction::from_fn(&cyl, |p| (p.c1 + 0.3).sin() * (1.0 + p.c2) + 0.5 * (2.0 * p.c1).cos()).unwrap();
        let builder = |f: &GaugeFieldSpec| magnetic_cylinder(&cyl, f, &c, order, false);
        op = op.max(gauge_operator_residual(&b, &lam, &c, builder).unwrap());
        spec = spec.max(spectrum_gauge_invariance(&b, &lam, builder, 10).unwrap());

        let sph = build_grid(&SurfaceSpec::sphere(1.0).unwrap(), 12, 14).unwrap();
        let lam = GaugeFunction::from_fn(&sph, |p| p.c1.sin() * p.c2.cos() + p.c1.cos().powi(2)).unwrap();
        let builder = |f: &GaugeFieldSpec| magnetic_sphere(&sph, f, &c, order, true);
        op = op.max(gauge_operator_residual(&b, &lam, &c, builder).unwrap());
        spec = spec.max(spectrum_gauge_invariance(&b, &lam, builder, 10).unwrap());
    }
    check(
        op <= 1e-10 && spec <= 1e-10,
        format!("max |H(A+grad l) - U H U^+| {op:.3e}, lowest-10 shift {spec:.3e}"),
    )
}

fn ring_levels(n: usize, flux: f64, order: StencilOrder, k: usize) -> Vec<f64> {
    let g = build_grid(&SurfaceSpec::ring(1.0).unwrap(), n, 1).unwrap();
    let f = GaugeFieldSpec::ab_flux(flux).unwrap();
    spectrum(&magnetic_cylinder(&g, &f, &unit(), order, false).unwrap(), k)
        .unwrap()
        .real_parts()
}

/// 5. Aharonov-Bohm ring: grid levels differ from the continuum formula by
/// the stencil deficit only; half-quantum degeneracy; flux periodicity.
fn ring_aharonov_bohm() -> Outcome {
    let c = unit();
    let phi0 = c.flux_quantum().unwrap();
    let n = 64;
    let k = 9;
    let mut excess = 0.0f64;
    let mut deficit = 0.0f64;
    let mut degeneracy = 0.0f64;
    let mut period = 0.0f64;
    for order in ORDERS {
        for frac in [0.0, 0.21, 0.5, 0.8] {
            let flux = frac * phi0;
            let grid = ring_levels(n, flux, order, k);
            let exact = analytic_ring_spectrum(1.0, flux, -40..=40, &c).unwrap();
            let mut symbol: Vec<(f64, f64)> = exact
                .iter()
                .map(|&(l, e)| (discrete_ring_energy(1.0, flux, l, n, order, &c).unwrap(), e))
                .collect();
            symbol.sort_by(|a, b| a.0.total_cmp(&b.0));
            for (g, (s, e)) in grid.iter().zip(&symbol) {
                let d = (s - e).abs();
                deficit = deficit.max(d);
                excess = excess.max((g - e).abs() - d);
            }
            let shifted = ring_levels(n, flux + phi0, order, k);
            period = period.max(grid.iter().zip(&shifted).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
            if frac == 0.5 {
                degeneracy = degeneracy.max((grid[1] - grid[0]).abs());
            }
        }
    }
    check(
        excess <= 1e-10 && degeneracy <= 1e-10 && period <= 1e-10,
        format!(
            "max stencil deficit {deficit:.3e} (excess {excess:.1e}), half-quantum splitting {degeneracy:.1e}, flux-period shift {period:.1e}"
        ),
    )
}

fn landau_error(n: usize, order: StencilOrder, levels: usize) -> f64 {
    let c = unit();
    let g = build_grid(&SurfaceSpec::ring(1.0).unwrap(), n, 1).unwrap();
    let f = GaugeFieldSpec::uniform_axial(1.0).unwrap();
    let grid = spectrum(&magnetic_cylinder(&g, &f, &c, order, false).unwrap(), levels)
        .unwrap()
        .real_parts();
    let mut exact: Vec<f64> = (-40..=40).map(|l| analytic_cylinder_landau(1.0, 1.0, l, 0.0, &c)).collect();
    exact.sort_by(f64::total_cmp);
    grid.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// 6. Landau levels of the k_z = 0 sector within 1e-3 at n = 64, converging at
/// the stencil order.
fn cylinder_landau() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (order, levels) in [(StencilOrder::Second, 2), (StencilOrder::Fourth, 6)] {
        let e64 = landau_error(64, order, levels);
        let e128 = landau_error(128, order, levels);
        let p = observed_order(e64, e128);
        let target = order.value() as f64;
        ok &= e64 <= 1e-3 && (p - target).abs() <= 0.3;
        parts.push(format!("order {}: {levels} levels err {e64:.2e}, observed order {p:.2}", order.value()));
    }
    check(ok, parts.join("; "))
}

/// 7. Free sphere: clusters l(l+1)/2 with multiplicity 2l+1 for l <= 3 within
/// 1e-3 on a 64x64 grid.
fn sphere_multiplets() -> Outcome {
    let c = unit();
    let g = build_grid(&SurfaceSpec::sphere(1.0).unwrap(), 64, 64).unwrap();
    let mut detail = Vec::new();
    let mut ok = true;
    for order in ORDERS {
        let ev = spectrum(&free_sphere(&g, &c, order).unwrap(), 16).unwrap().real_parts();
        let mut worst = 0.0f64;
        let mut start = 0;
        for l in 0..=3usize {
            let target = (l * (l + 1)) as f64 / 2.0;
            for e in &ev[start..start + 2 * l + 1] {
                worst = worst.max((e - target).abs());
            }
            start += 2 * l + 1;
        }
        ok &= worst <= 1e-3;
        detail.push(format!("order {}: max cluster error {worst:.3e}", order.value()));
    }
    check(ok, detail.join("; "))
}

/// 8. Uniform B with spin: every orbital level splits by exactly e hbar B/m.
fn zeeman_splitting() -> Outcome {
    let mut worst = 0.0f64;
    for (c, b) in [(unit(), 1.0), (PhysicalConstants::new(0.8, 1.3, -1.1).unwrap(), 0.7)] {
        let half = (c.charge * c.hbar * b / (2.0 * c.mass)).abs();
        let f = GaugeFieldSpec::uniform_axial(b).unwrap();
        for g in [
            build_grid(&SurfaceSpec::ring(1.0).unwrap(), 16, 1).unwrap(),
            build_grid(&SurfaceSpec::cylinder(1.0, 1.0).unwrap(), 8, 6).unwrap(),
            build_grid(&SurfaceSpec::sphere(1.0).unwrap(), 8, 8).unwrap(),
        ] {
            let sphere = g.surface().kind == surfband::geometry::SurfaceKind::Sphere;
            let build = |spin| {
                if sphere {
                    magnetic_sphere(&g, &f, &c, StencilOrder::Second, spin).unwrap()
                } else {
                    magnetic_cylinder(&g, &f, &c, StencilOrder::Second, spin).unwrap()
                }
            };
            let orbital = spectrum(&build(false), g.len()).unwrap().real_parts();
            let spinful = spectrum(&build(true), 2 * g.len()).unwrap().real_parts();
            let mut expect: Vec<f64> = orbital.iter().flat_map(|e| [e - half, e + half]).collect();
            expect.sort_by(f64::total_cmp);
            for (a, b) in spinful.iter().zip(&expect) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    check(worst <= 1e-12, format!("max deviation from E +- e hbar B/2m: {worst:.3e}"))
}

/// 9. Radial identities and the canonical commutator converge at the stencil order.
fn operator_identities() -> Outcome {
    let c = unit();
    let f = |r: f64| (3.0 * r).sin() * (0.5 * r).exp();
    let mut worst = 0.0f64;
    let mut seen = Vec::new();
    for order in ORDERS {
        let p = order.value() as f64;
        let (coarse, fine) = (
            RadialGrid::uniform(0.5, 1.5, 19).unwrap(),
            RadialGrid::uniform(0.5, 1.5, 39).unwrap(),
        );
        for fam in [RadialFamily::Cylinder, RadialFamily::Sphere] {
            let a = laplacian_identity_defect(&coarse, fam, &c, order, f).unwrap();
            let b = laplacian_identity_defect(&fine, fam, &c, order, f).unwrap();
            let q = observed_order(a, b);
            worst = worst.max((q - p).abs());
            seen.push(q);
        }
        let a = commutator_defect(&coarse, RadialFamily::Cylinder, &c, order, f).unwrap();
        let b = commutator_defect(&fine, RadialFamily::Cylinder, &c, order, f).unwrap();
        let q = observed_order(a, b);
        worst = worst.max((q - p).abs());
        seen.push(q);
    }
    check(worst <= 0.3, format!("observed orders {seen:.2?} (max |p_obs - p| {worst:.2})"))
}

/// 10. Identical configurations give byte-identical reports.
fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("surfband-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let runs: [&[&str]; 4] = [
        &["spectrum", "--surface", "sphere", "--R", "1", "--n", "12", "--k", "8", "--field", "uniform-axial", "--B", "1", "--spin"],
        &["spectrum", "--surface", "cylinder", "--n", "8", "--n2", "6", "--order", "4", "--format", "csv"],
        &["hermiticity", "--surface", "cylinder", "--n", "8", "--variant", "pragmatic", "--A-r", "1"],
        &["thin-layer", "--surface", "cylinder", "--l", "0,1", "--d", "0.1,0.05,0.025"],
    ];
    let mut same = true;
    let mut detail = Vec::new();
    for (i, args) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let path = dir.join(format!("run{i}-{rep}"));
            let status = Command::new(env!("CARGO_BIN_EXE_surfband"))
                .args(*args)
                .arg("--output")
                .arg(&path)
                .output()
                .unwrap();
            assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
            outputs.push(std::fs::read(&path).unwrap());
        }
        same &= outputs[0] == outputs[1];
        detail.push(format!("{}: {} bytes", args[0], outputs[0].len()));
    }
    std::fs::remove_dir_all(&dir).unwrap();
    check(same, format!("reports identical across repeated runs ({})", detail.join(", ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("GKE values", gke_values),
        ("GKE emergence from thin shells", gke_emergence),
        ("hermiticity dichotomy", hermiticity_dichotomy),
        ("gauge covariance", gauge_covariance),
        ("Aharonov-Bohm ring", ring_aharonov_bohm),
        ("Landau levels (k_z = 0)", cylinder_landau),
        ("sphere multiplets", sphere_multiplets),
        ("Zeeman splitting", zeeman_splitting),
        ("radial operator identities", operator_identities),
        ("CLI determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let result = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = t.elapsed().as_secs_f64();
        match result {
            Ok(d) => println!("criterion {:>2} PASS  {name}: {d} [{secs:.2} s]", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {d} [{secs:.2} s]", i + 1)
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
