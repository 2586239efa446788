//! Executes a resolved configuration.

use std::f64::consts::PI;

use anyhow::Context;
use serde_json::{json, Value};
use surfband::analysis::{
    antihermitian_part, gauge_covariance_residual, gauge_operator_residual, spectrum,
    spectrum_gauge_invariance,
};
use surfband::discretize::{build_grid, hermiticity_residual, Grid, StencilOrder};
use surfband::fields::{GaugeFieldSpec, GaugeFunction, RadialComponent, SampledPotential};
use surfband::geometry::{geometric_kinetic_energy, principal_curvatures, PhysicalConstants, SurfaceKind, SurfaceSpec};
use surfband::hamiltonians::{build, HamiltonianRequest};
use surfband::thinlayer::{estimate_from, shell_table, ShellSample};
use surfband::Complex64;

use crate::config::{thread_cap, Command, FieldChoice, Format, GaugeChoice, RunConfig, UsageError};
use crate::report::{to_csv, to_json, CsvCell, Report};

/// Output of a run: the serialized report and the stdout summary line.
pub struct Outcome {
    pub report: Vec<u8>,
    pub summary: String,
}

pub fn execute(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    match cfg.command {
        Command::Spectrum => run_spectrum(cfg),
        Command::Hermiticity => run_hermiticity(cfg),
        Command::GaugeCheck => run_gauge_check(cfg),
        Command::ThinLayer => run_thin_layer(cfg),
        Command::Gke => run_gke(cfg),
    }
}

fn constants(cfg: &RunConfig) -> anyhow::Result<PhysicalConstants> {
    Ok(PhysicalConstants::new(cfg.hbar, cfg.m, cfg.e)?)
}

fn surface(cfg: &RunConfig) -> anyhow::Result<SurfaceSpec> {
    Ok(match cfg.surface {
        SurfaceKind::Ring => SurfaceSpec::ring(cfg.radius)?,
        SurfaceKind::Cylinder => SurfaceSpec::cylinder(cfg.radius, cfg.half_length)?,
        SurfaceKind::Sphere => SurfaceSpec::sphere(cfg.radius)?,
    })
}

fn order(cfg: &RunConfig) -> StencilOrder {
    if cfg.order == 4 {
        StencilOrder::Fourth
    } else {
        StencilOrder::Second
    }
}

fn field(cfg: &RunConfig, grid: &Grid) -> anyhow::Result<GaugeFieldSpec> {
    let mut radial_samples = None;
    let mut spec = match cfg.field {
        FieldChoice::None => GaugeFieldSpec::zero(),
        FieldChoice::UniformAxial => GaugeFieldSpec::uniform_axial(cfg.b)?,
        FieldChoice::AbFlux => GaugeFieldSpec::ab_flux(cfg.flux)?,
        FieldChoice::Sampled => {
            let path = cfg.field_file.as_ref().expect("validated");
            let file = std::fs::File::open(path).map_err(|e| {
                UsageError(format!("invalid value for --field-file: {}: {e}", path.display()))
            })?;
            let (samples, ar) = SampledPotential::from_csv(grid, file)
                .map_err(|e| UsageError(format!("invalid value for --field-file: {e}")))?;
            radial_samples = ar;
            GaugeFieldSpec::sampled(samples)
        }
    };
    if let Some(values) = radial_samples {
        let derivatives = vec![cfg.da_r_dr; values.len()];
        spec = spec.with_radial(RadialComponent::Sampled { values, derivatives })?;
    } else if cfg.a_r != 0.0 || cfg.da_r_dr != 0.0 {
        spec = spec.with_radial(RadialComponent::Uniform {
            value: cfg.a_r,
            derivative: cfg.da_r_dr,
        })?;
    }
    Ok(spec)
}

fn request(cfg: &RunConfig) -> anyhow::Result<HamiltonianRequest> {
    let grid = build_grid(&surface(cfg)?, cfg.n, cfg.second_count())?;
    let f = field(cfg, &grid)?;
    let mut req = HamiltonianRequest::new(grid);
    req.field = Some(f);
    req.spin = cfg.spin;
    req.constants = constants(cfg)?;
    req.order = order(cfg);
    req.variant = cfg.variant;
    Ok(req)
}

fn pairs(values: &[Complex64]) -> Vec<[f64; 2]> {
    values.iter().map(|z| [z.re, z.im]).collect()
}

fn finish(cfg: &RunConfig, report: Report, csv: Option<Vec<u8>>, summary: String) -> anyhow::Result<Outcome> {
    let bytes = match (cfg.format, csv) {
        (Format::Csv, Some(c)) => c,
        _ => to_json(&report)?,
    };
    Ok(Outcome { report: bytes, summary })
}

fn eigen_csv(values: &[Complex64]) -> Vec<u8> {
    let rows: Vec<Vec<CsvCell>> = values
        .iter()
        .enumerate()
        .map(|(i, z)| vec![CsvCell::Int(i as i64), CsvCell::Float(z.re), CsvCell::Float(z.im)])
        .collect();
    to_csv(&["index", "re", "im"], &rows)
}

fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{:?}", z.re)
    } else {
        format!("({:?}, {:?})", z.re, z.im)
    }
}

fn run_spectrum(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let req = request(cfg)?;
    let h = build(&req)?;
    let k = cfg.k.min(h.dim());
    let rep = spectrum(&h, k).with_context(|| format!("solving {}", h.label()))?;
    let report = Report {
        config: cfg.clone(),
        eigenvalues: pairs(&rep.eigenvalues),
        hermiticity_residual: Some(rep.hermiticity_residual),
        diagnostics: json!({
            "operator": rep.label,
            "dimension": h.dim(),
            "hermitian_solver": rep.hermitian,
        }),
    };
    let summary = format!("lowest eigenvalue {}", format_complex(rep.eigenvalues[0]));
    finish(cfg, report, Some(eigen_csv(&rep.eigenvalues)), summary)
}

fn run_hermiticity(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let req = request(cfg)?;
    let h = build(&req)?;
    let residual = hermiticity_residual(&h);
    let anti = antihermitian_part(&h).max_abs();
    let report = Report {
        config: cfg.clone(),
        eigenvalues: Vec::new(),
        hermiticity_residual: Some(residual),
        diagnostics: json!({
            "operator": h.label(),
            "dimension": h.dim(),
            "antihermitian_max": anti,
        }),
    };
    let summary = format!("antihermitian max {anti:?}, hermiticity residual {residual:?}");
    let csv = to_csv(
        &["quantity", "value"],
        &[
            vec![CsvCell::Text("hermiticity_residual".into()), CsvCell::Float(residual)],
            vec![CsvCell::Text("antihermitian_max".into()), CsvCell::Float(anti)],
        ],
    );
    finish(cfg, report, Some(csv), summary)
}

/// Smooth single-valued gauge function of unit size, or a constant.
fn gauge_function(cfg: &RunConfig, grid: &Grid) -> anyhow::Result<GaugeFunction> {
    let a = cfg.lambda;
    let lam = match (cfg.gauge, grid.surface().kind) {
        (GaugeChoice::Constant, _) => GaugeFunction::from_fn(grid, |_| a)?,
        (GaugeChoice::Smooth, SurfaceKind::Sphere) => GaugeFunction::from_fn(grid, |p| {
            a * (p.c1.sin() * p.c2.cos() + p.c1.cos() * p.c1.cos())
        })?,
        (GaugeChoice::Smooth, _) => {
            let l = grid.surface().half_length.unwrap_or(1.0);
            GaugeFunction::from_fn(grid, |p| a * ((p.c1 + 0.3).sin() + 0.5 * (2.0 * p.c1).cos() * (PI * p.c2 / l).sin()))?
        }
    };
    Ok(lam)
}

fn run_gauge_check(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let req = request(cfg)?;
    let base = req.field.clone().unwrap_or_else(GaugeFieldSpec::zero);
    let lam = gauge_function(cfg, &req.grid)?;
    let builder = |f: &GaugeFieldSpec| {
        let mut r = req.clone();
        r.field = Some(f.clone());
        build(&r)
    };
    let c = req.constants;
    let operator = gauge_operator_residual(&base, &lam, &c, builder)?;
    let dim = req.grid.len() * if req.spin { 2 } else { 1 };
    let psi: Vec<Complex64> = (0..dim)
        .map(|i| Complex64::new((0.37 * i as f64).cos(), (0.11 * i as f64).sin()))
        .collect();
    let vector = gauge_covariance_residual(&base, &lam, &c, builder, &psi)?;
    let k = cfg.k.min(dim);
    let shift = spectrum_gauge_invariance(&base, &lam, builder, k)?;
    let h = builder(&base)?;
    let report = Report {
        config: cfg.clone(),
        eigenvalues: Vec::new(),
        hermiticity_residual: Some(hermiticity_residual(&h)),
        diagnostics: json!({
            "operator": h.label(),
            "operator_residual": operator,
            "vector_residual": vector,
            "spectrum_shift": shift,
        }),
    };
    let summary = format!("gauge residual {operator:?}");
    let csv = to_csv(
        &["quantity", "value"],
        &[
            vec![CsvCell::Text("operator_residual".into()), CsvCell::Float(operator)],
            vec![CsvCell::Text("vector_residual".into()), CsvCell::Float(vector)],
            vec![CsvCell::Text("spectrum_shift".into()), CsvCell::Float(shift)],
        ],
    );
    finish(cfg, report, Some(csv), summary)
}

fn run_thin_layer(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let s = surface(cfg)?;
    let c = constants(cfg)?;
    let threads = thread_cap()?;
    let table = shell_table(&s, &cfg.l, &cfg.d, cfg.n_r, &c, threads)?;
    let mut estimates = Vec::new();
    if cfg.d.len() >= 3 {
        for &l in &cfg.l {
            let rows: Vec<ShellSample> = table.iter().filter(|r| r.l == l).copied().collect();
            let est = estimate_from(rows, &s, l, &c)?;
            estimates.push(json!({"l": l, "limit": est.limit, "gke": est.gke, "order": est.order}));
        }
    }
    let summary = if estimates.is_empty() {
        let r = &table[0];
        format!("surface energy l={} d={:?}: {:?}", r.l, r.d, r.e_surface)
    } else {
        let parts: Vec<String> = estimates
            .iter()
            .map(|e| format!("l={} gke {:?}", e["l"], e["gke"].as_f64().unwrap_or(f64::NAN)))
            .collect();
        parts.join(", ")
    };
    let rows: Vec<Vec<CsvCell>> = table
        .iter()
        .map(|r| {
            vec![
                CsvCell::Float(r.d),
                CsvCell::Int(r.l as i64),
                CsvCell::Float(r.e_raw),
                CsvCell::Float(r.e_box),
                CsvCell::Float(r.e_surface),
                CsvCell::Float(r.shift),
            ]
        })
        .collect();
    let csv = to_csv(&["d", "l", "E_raw", "E_box", "E_surface", "shift"], &rows);
    let report = Report {
        config: cfg.clone(),
        eigenvalues: Vec::new(),
        hermiticity_residual: None,
        diagnostics: json!({
            "samples": serde_json::to_value(&table)?,
            "extrapolations": Value::Array(estimates),
        }),
    };
    finish(cfg, report, Some(csv), summary)
}

fn run_gke(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let s = surface(cfg)?;
    let c = constants(cfg)?;
    let gke = geometric_kinetic_energy(&s, &c)?;
    let k = principal_curvatures(&s)?;
    let report = Report {
        config: cfg.clone(),
        eigenvalues: Vec::new(),
        hermiticity_residual: None,
        diagnostics: json!({
            "gke": gke,
            "k1": k.k1,
            "k2": k.k2,
            "mean_curvature": k.mean,
            "gaussian_curvature": k.gaussian,
        }),
    };
    let csv = to_csv(&["quantity", "value"], &[vec![CsvCell::Text("gke".into()), CsvCell::Float(gke)]]);
    finish(cfg, report, Some(csv), format!("{gke:?}"))
}
