//! Vector potentials on the surface, their curl, and gauge transformations.
//!
//! Potentials are given by physical (orthonormal-frame) components. On rings
//! and cylinders the tangential pair is `(A_theta, A_z)`, on spheres
//! `(A_theta, A_phi)`. An optional normal component `A_r` (with its normal
//! derivative) feeds the pragmatic Hamiltonian.

use std::f64::consts::PI;
use std::io::Read;

use crate::discretize::{Axis, Grid, SurfacePoint, Topology};
use crate::error::{invalid, Error, Result};
use crate::geometry::{PhysicalConstants, SurfaceKind, SurfaceSpec};

/// Tangential and normal components at a point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Potential {
    pub a1: f64,
    pub a2: f64,
    pub ar: f64,
}

/// Base potential.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldKind {
    /// Uniform field `B z` in the symmetric gauge `A = B/2 z x r`.
    UniformAxial { b: f64 },
    /// Thin solenoid of flux `flux` along the `z` axis.
    AbFlux { flux: f64 },
    /// Tangential components sampled at the nodes of a grid.
    Sampled(SampledPotential),
}

/// Node samples of the tangential components.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPotential {
    surface: SurfaceSpec,
    shape: (usize, usize),
    a1: Vec<f64>,
    a2: Vec<f64>,
}

/// Normal component `A_r` on the surface and `dA_r/dr` there.
#[derive(Debug, Clone, PartialEq)]
pub enum RadialComponent {
    Uniform { value: f64, derivative: f64 },
    Sampled { values: Vec<f64>, derivatives: Vec<f64> },
}

/// How the link phase of a gauge function is formed.
#[derive(Debug, Clone, PartialEq)]
enum GradientMode {
    /// Node differences, the discrete gradient matching the stencils.
    Stencil,
    /// Trapezoid rule on supplied tangential gradient samples.
    Analytic(Vec<[f64; 2]>),
}

/// Single-valued scalar `lambda` sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeFunction {
    surface: SurfaceSpec,
    shape: (usize, usize),
    values: Vec<f64>,
    mode: GradientMode,
}

/// A vector potential: base field, optional normal component and any number
/// of added gauge gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeFieldSpec {
    pub kind: FieldKind,
    pub radial: Option<RadialComponent>,
    gauges: Vec<GaugeFunction>,
}

impl GaugeFieldSpec {
    pub fn new(kind: FieldKind) -> Result<Self> {
        match &kind {
            FieldKind::UniformAxial { b } if !b.is_finite() => return Err(invalid("B", "must be finite")),
            FieldKind::AbFlux { flux } if !flux.is_finite() => {
                return Err(invalid("flux", "must be finite"))
            }
            _ => {}
        }
        Ok(Self {
            kind,
            radial: None,
            gauges: Vec::new(),
        })
    }

    pub fn uniform_axial(b: f64) -> Result<Self> {
        Self::new(FieldKind::UniformAxial { b })
    }

    pub fn ab_flux(flux: f64) -> Result<Self> {
        Self::new(FieldKind::AbFlux { flux })
    }

    pub fn sampled(samples: SampledPotential) -> Self {
        Self {
            kind: FieldKind::Sampled(samples),
            radial: None,
            gauges: Vec::new(),
        }
    }

    /// Zero potential.
    pub fn zero() -> Self {
        Self {
            kind: FieldKind::UniformAxial { b: 0.0 },
            radial: None,
            gauges: Vec::new(),
        }
    }

    pub fn with_radial(mut self, radial: RadialComponent) -> Result<Self> {
        match &radial {
            RadialComponent::Uniform { value, derivative } => {
                if !value.is_finite() || !derivative.is_finite() {
                    return Err(invalid("A_r", "must be finite"));
                }
            }
            RadialComponent::Sampled { values, derivatives } => {
                if values.len() != derivatives.len() {
                    return Err(Error::DimensionMismatch {
                        expected: values.len(),
                        found: derivatives.len(),
                    });
                }
                if let Some(i) = values.iter().chain(derivatives).position(|v| !v.is_finite()) {
                    return Err(Error::NonFinite(i % values.len().max(1)));
                }
            }
        }
        self.radial = Some(radial);
        Ok(self)
    }

    pub fn gauges(&self) -> &[GaugeFunction] {
        &self.gauges
    }

    /// True when the potential has no normal component.
    pub fn is_tangential(&self) -> bool {
        self.radial.is_none()
    }
}

/// `A + grad lambda`.
pub fn add_gauge(spec: &GaugeFieldSpec, lambda: &GaugeFunction) -> GaugeFieldSpec {
    let mut out = spec.clone();
    out.gauges.push(lambda.clone());
    out
}

impl SampledPotential {
    pub fn new(grid: &Grid, a1: Vec<f64>, a2: Vec<f64>) -> Result<Self> {
        for v in [&a1, &a2] {
            if v.len() != grid.len() {
                return Err(Error::DimensionMismatch {
                    expected: grid.len(),
                    found: v.len(),
                });
            }
            if let Some(i) = v.iter().position(|x| !x.is_finite()) {
                return Err(Error::NonFinite(i));
            }
        }
        Ok(Self {
            surface: *grid.surface(),
            shape: grid.shape(),
            a1,
            a2,
        })
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(SurfacePoint) -> (f64, f64)) -> Result<Self> {
        let (a1, a2) = (0..grid.len()).map(|i| f(grid.point(i))).unzip();
        Self::new(grid, a1, a2)
    }

    /// Reads `coord1, coord2, A_1, A_2[, A_r]` rows, one per node of `grid`,
    /// after a mandatory header row. Returns the samples and, when the fifth
    /// column is present, the node values of `A_r`.
    pub fn from_csv(grid: &Grid, reader: impl Read) -> Result<(Self, Option<Vec<f64>>)> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut records = rdr.records();
        let header = records
            .next()
            .ok_or_else(|| Error::FieldFile("empty file".into()))?
            .map_err(|e| Error::FieldFile(e.to_string()))?;
        if header.iter().all(|c| c.parse::<f64>().is_ok()) {
            return Err(Error::FieldFile("missing header row".into()));
        }
        let cols = header.len();
        if cols != 4 && cols != 5 {
            return Err(Error::FieldFile(format!("expected 4 or 5 columns, found {cols}")));
        }
        let n = grid.len();
        let mut a1 = vec![f64::NAN; n];
        let mut a2 = vec![f64::NAN; n];
        let mut ar = vec![f64::NAN; n];
        let mut seen = vec![false; n];
        for (line, rec) in records.enumerate() {
            let rec = rec.map_err(|e| Error::FieldFile(e.to_string()))?;
            if rec.len() != cols {
                return Err(Error::FieldFile(format!("row {}: expected {cols} columns", line + 2)));
            }
            let vals = rec
                .iter()
                .map(|c| c.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::FieldFile(format!("row {}: {e}", line + 2)))?;
            let node = locate_node(grid, vals[0], vals[1]).ok_or_else(|| {
                Error::FieldFile(format!(
                    "row {}: ({}, {}) is not a grid node",
                    line + 2,
                    vals[0],
                    vals[1]
                ))
            })?;
            if std::mem::replace(&mut seen[node], true) {
                return Err(Error::FieldFile(format!("row {}: duplicate node", line + 2)));
            }
            a1[node] = vals[2];
            a2[node] = vals[3];
            if cols == 5 {
                ar[node] = vals[4];
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            let p = grid.point(missing);
            return Err(Error::FieldFile(format!("no row for node ({}, {})", p.c1, p.c2)));
        }
        let samples = Self::new(grid, a1, a2)?;
        Ok((samples, (cols == 5).then_some(ar)))
    }

    pub fn components(&self) -> (&[f64], &[f64]) {
        (&self.a1, &self.a2)
    }
}

fn locate_node(grid: &Grid, c1: f64, c2: f64) -> Option<usize> {
    let tol1 = 1e-6 * grid.spacing(Axis::First);
    let tol2 = 1e-6 * grid.spacing(Axis::Second).max(grid.spacing(Axis::First));
    let wrap = |d: f64, periodic: bool| {
        if periodic {
            let d = d.rem_euclid(2.0 * PI);
            d.min(2.0 * PI - d)
        } else {
            d.abs()
        }
    };
    let p1 = grid.topology(Axis::First) == Topology::Periodic;
    let p2 = grid.topology(Axis::Second) == Topology::Periodic;
    let i1 = grid
        .coords1()
        .iter()
        .position(|&x| wrap(x - c1, p1) <= tol1)?;
    let i2 = grid
        .coords2()
        .iter()
        .position(|&x| wrap(x - c2, p2) <= tol2)?;
    Some(grid.index(i1, i2))
}

impl GaugeFunction {
    /// Samples `lambda` on the grid, refusing functions that do not return to
    /// their value around the periodic coordinate or differ between points
    /// of a pole.
    pub fn from_fn(grid: &Grid, lambda: impl Fn(SurfacePoint) -> f64) -> Result<Self> {
        let values: Vec<f64> = (0..grid.len()).map(|i| lambda(grid.point(i))).collect();
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        let scale = 1.0 + values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tol = 1e-9 * scale;
        let surface = grid.surface();
        match surface.kind {
            SurfaceKind::Ring | SurfaceKind::Cylinder => {
                for &z in grid.coords2() {
                    let a = lambda(SurfacePoint { c1: 0.0, c2: z });
                    let b = lambda(SurfacePoint { c1: 2.0 * PI, c2: z });
                    if !((a - b).abs() <= tol) {
                        return Err(Error::MultivaluedGauge(format!(
                            "lambda(0, {z}) = {a} but lambda(2 pi, {z}) = {b}"
                        )));
                    }
                }
            }
            SurfaceKind::Sphere => {
                for &t in grid.coords1() {
                    let a = lambda(SurfacePoint { c1: t, c2: 0.0 });
                    let b = lambda(SurfacePoint { c1: t, c2: 2.0 * PI });
                    if !((a - b).abs() <= tol) {
                        return Err(Error::MultivaluedGauge(format!(
                            "lambda({t}, 0) = {a} but lambda({t}, 2 pi) = {b}"
                        )));
                    }
                }
                for pole in [0.0, PI] {
                    let first = lambda(SurfacePoint { c1: pole, c2: 0.0 });
                    for &p in grid.coords2() {
                        let v = lambda(SurfacePoint { c1: pole, c2: p });
                        if !((v - first).abs() <= tol) {
                            return Err(Error::MultivaluedGauge(format!(
                                "lambda takes several values at the pole theta = {pole}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(Self {
            surface: *surface,
            shape: grid.shape(),
            values,
            mode: GradientMode::Stencil,
        })
    }

    /// Node samples. Single-valuedness is the caller's responsibility.
    pub fn from_samples(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self {
            surface: *grid.surface(),
            shape: grid.shape(),
            values,
            mode: GradientMode::Stencil,
        })
    }

    /// Uses the supplied tangential gradient (physical components) instead
    /// of node differences when forming link phases. The resulting gauge
    /// transformation is then exact only up to the quadrature error.
    pub fn with_analytic_gradient(
        mut self,
        grid: &Grid,
        gradient: impl Fn(SurfacePoint) -> [f64; 2],
    ) -> Result<Self> {
        self.check_grid(grid)?;
        let g: Vec<[f64; 2]> = (0..grid.len()).map(|i| gradient(grid.point(i))).collect();
        if let Some(i) = g.iter().position(|v| !v[0].is_finite() || !v[1].is_finite()) {
            return Err(Error::NonFinite(i));
        }
        self.mode = GradientMode::Analytic(g);
        Ok(self)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn negated(&self) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v = -*v);
        if let GradientMode::Analytic(g) = &mut out.mode {
            g.iter_mut().for_each(|v| *v = [-v[0], -v[1]]);
        }
        out
    }

    /// Phases `(e/hbar) lambda` of the unitary `U = diag(exp(i e lambda/hbar))`.
    pub fn phases(&self, constants: &PhysicalConstants) -> Vec<f64> {
        let k = constants.phase_per_potential();
        self.values.iter().map(|v| k * v).collect()
    }

    fn check_grid(&self, grid: &Grid) -> Result<()> {
        if self.shape != grid.shape() || self.surface != *grid.surface() {
            return Err(invalid("lambda", "sampled on a different grid"));
        }
        Ok(())
    }
}

/// Node-centered tangential gradient of `lambda` in physical components.
pub fn surface_gradient(lambda: &GaugeFunction, grid: &Grid) -> Result<Vec<[f64; 2]>> {
    lambda.check_grid(grid)?;
    let d1 = node_derivative(grid, &lambda.values, Axis::First);
    let d2 = node_derivative(grid, &lambda.values, Axis::Second);
    Ok((0..grid.len())
        .map(|i| {
            let m2 = grid.metric(Axis::Second, i);
            [
                d1[i] / grid.metric(Axis::First, i),
                if m2 > 0.0 { d2[i] / m2 } else { 0.0 },
            ]
        })
        .collect())
}

/// Coordinate derivative at nodes: centered where both neighbours exist,
/// across the pole on spheres, one-sided second order at walls.
fn node_derivative(grid: &Grid, f: &[f64], axis: Axis) -> Vec<f64> {
    let mut out = vec![0.0; grid.len()];
    let topology = grid.topology(axis);
    if topology == Topology::Absent {
        return out;
    }
    let h = grid.spacing(axis);
    let (_, n2) = grid.shape();
    for line in grid.lines(axis) {
        let n = line.len();
        // node across the pole on the same ring, when there is one
        let across = |k: usize| {
            let (i1, i2) = grid.split(line[k]);
            (topology == Topology::Polar && n2 % 2 == 0).then(|| f[grid.index(i1, (i2 + n2 / 2) % n2)])
        };
        for k in 0..n {
            let v = |j: usize| f[line[j]];
            out[line[k]] = if topology == Topology::Periodic {
                (v((k + 1) % n) - v((k + n - 1) % n)) / (2.0 * h)
            } else if k == 0 {
                match across(0) {
                    Some(g) => (v(1) - g) / (2.0 * h),
                    None => (-3.0 * v(0) + 4.0 * v(1) - v(2)) / (2.0 * h),
                }
            } else if k == n - 1 {
                match across(n - 1) {
                    Some(g) => (g - v(n - 2)) / (2.0 * h),
                    None => (3.0 * v(n - 1) - 4.0 * v(n - 2) + v(n - 3)) / (2.0 * h),
                }
            } else {
                (v(k + 1) - v(k - 1)) / (2.0 * h)
            };
        }
    }
    out
}

/// Potential at a point for the analytic base fields and a uniform normal
/// component. Sampled data are evaluated with [`potential_on_grid`].
pub fn eval_potential(spec: &GaugeFieldSpec, surface: &SurfaceSpec, point: SurfacePoint) -> Result<Potential> {
    surface.validate()?;
    if !spec.gauges.is_empty() || matches!(spec.kind, FieldKind::Sampled(_)) {
        return Err(Error::Unsupported(
            "sampled potentials are evaluated on their grid".into(),
        ));
    }
    let ar = match &spec.radial {
        None => 0.0,
        Some(RadialComponent::Uniform { value, .. }) => *value,
        Some(RadialComponent::Sampled { .. }) => {
            return Err(Error::Unsupported(
                "sampled potentials are evaluated on their grid".into(),
            ))
        }
    };
    let (a1, a2) = analytic_tangential(&spec.kind, surface, point)?;
    Ok(Potential { a1, a2, ar })
}

fn analytic_tangential(kind: &FieldKind, surface: &SurfaceSpec, p: SurfacePoint) -> Result<(f64, f64)> {
    let r = surface.radius;
    Ok(match (kind, surface.kind) {
        (FieldKind::UniformAxial { b }, SurfaceKind::Sphere) => (0.0, 0.5 * b * r * p.c1.sin()),
        (FieldKind::UniformAxial { b }, _) => (0.5 * b * r, 0.0),
        (FieldKind::AbFlux { flux }, SurfaceKind::Sphere) => {
            let s = p.c1.sin();
            if s.abs() < 1e-12 {
                return Err(Error::SingularAtPole);
            }
            (0.0, flux / (2.0 * PI * r * s))
        }
        (FieldKind::AbFlux { flux }, _) => (flux / (2.0 * PI * r), 0.0),
        (FieldKind::Sampled(_), _) => unreachable!("sampled fields have no closed form"),
    })
}

fn check_sampled(s: &SampledPotential, grid: &Grid) -> Result<()> {
    if s.shape != grid.shape() || s.surface != *grid.surface() {
        return Err(invalid("field", "samples belong to a different grid"));
    }
    Ok(())
}

/// Potential at every node, including gauge gradients.
pub fn potential_on_grid(spec: &GaugeFieldSpec, grid: &Grid) -> Result<Vec<Potential>> {
    let n = grid.len();
    let mut out: Vec<Potential> = match &spec.kind {
        FieldKind::Sampled(s) => {
            check_sampled(s, grid)?;
            (0..n)
                .map(|i| Potential { a1: s.a1[i], a2: s.a2[i], ar: 0.0 })
                .collect()
        }
        kind => (0..n)
            .map(|i| {
                analytic_tangential(kind, grid.surface(), grid.point(i))
                    .map(|(a1, a2)| Potential { a1, a2, ar: 0.0 })
            })
            .collect::<Result<_>>()?,
    };
    let (ar, _) = radial_on_grid(spec, grid)?;
    for (p, a) in out.iter_mut().zip(ar) {
        p.ar = a;
    }
    for lam in &spec.gauges {
        let g = match &lam.mode {
            GradientMode::Stencil => surface_gradient(lam, grid)?,
            GradientMode::Analytic(g) => {
                lam.check_grid(grid)?;
                g.clone()
            }
        };
        for (p, g) in out.iter_mut().zip(g) {
            p.a1 += g[0];
            p.a2 += g[1];
        }
    }
    Ok(out)
}

/// Node values of `A_r` and `dA_r/dr`; zeros when absent.
pub fn radial_on_grid(spec: &GaugeFieldSpec, grid: &Grid) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = grid.len();
    match &spec.radial {
        None => Ok((vec![0.0; n], vec![0.0; n])),
        Some(RadialComponent::Uniform { value, derivative }) => Ok((vec![*value; n], vec![*derivative; n])),
        Some(RadialComponent::Sampled { values, derivatives }) => {
            if values.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: values.len() });
            }
            Ok((values.clone(), derivatives.clone()))
        }
    }
}

/// Magnetic field `(B_r, B_1, B_2)` in the local frame at a point for the
/// analytic base fields.
pub fn magnetic_field_of(spec: &GaugeFieldSpec, surface: &SurfaceSpec, point: SurfacePoint) -> Result<[f64; 3]> {
    surface.validate()?;
    match (&spec.kind, surface.kind) {
        (FieldKind::UniformAxial { b }, SurfaceKind::Sphere) => {
            Ok([b * point.c1.cos(), -b * point.c1.sin(), 0.0])
        }
        (FieldKind::UniformAxial { b }, _) => Ok([0.0, 0.0, *b]),
        (FieldKind::AbFlux { .. }, SurfaceKind::Sphere) if point.c1.sin().abs() < 1e-12 => {
            Err(Error::SingularAtPole)
        }
        (FieldKind::AbFlux { .. }, _) => Ok([0.0; 3]),
        (FieldKind::Sampled(_), _) => Err(Error::Unsupported(
            "sampled potentials are evaluated on their grid".into(),
        )),
    }
}

/// Magnetic field at every node in the local frame. Sampled tangential
/// data contribute the normal component, a sampled `A_r` its tangential
/// derivatives; gauge gradients contribute nothing.
pub fn magnetic_field_on_grid(spec: &GaugeFieldSpec, grid: &Grid) -> Result<Vec<[f64; 3]>> {
    let surface = grid.surface();
    let r = surface.radius;
    let n = grid.len();
    let mut out = match &spec.kind {
        FieldKind::Sampled(s) => {
            check_sampled(s, grid)?;
            let mut b = vec![[0.0; 3]; n];
            match surface.kind {
                SurfaceKind::Ring => {}
                SurfaceKind::Cylinder => {
                    let d1_az = node_derivative(grid, &s.a2, Axis::First);
                    let d2_at = node_derivative(grid, &s.a1, Axis::Second);
                    for i in 0..n {
                        b[i][0] = d1_az[i] / r - d2_at[i];
                    }
                }
                SurfaceKind::Sphere => {
                    let sin_aphi: Vec<f64> =
                        (0..n).map(|i| grid.point(i).c1.sin() * s.a2[i]).collect();
                    let d1 = node_derivative(grid, &sin_aphi, Axis::First);
                    let d2 = node_derivative(grid, &s.a1, Axis::Second);
                    for i in 0..n {
                        b[i][0] = (d1[i] - d2[i]) / (r * grid.point(i).c1.sin());
                    }
                }
            }
            b
        }
        _ => (0..n)
            .map(|i| magnetic_field_of(&GaugeFieldSpec::new(spec.kind.clone())?, surface, grid.point(i)))
            .collect::<Result<Vec<_>>>()?,
    };
    if let Some(RadialComponent::Sampled { values, .. }) = &spec.radial {
        if values.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: values.len() });
        }
        let d1 = node_derivative(grid, values, Axis::First);
        let d2 = node_derivative(grid, values, Axis::Second);
        for i in 0..n {
            match surface.kind {
                SurfaceKind::Ring => out[i][2] -= d1[i] / r,
                SurfaceKind::Cylinder => {
                    out[i][1] += d2[i];
                    out[i][2] -= d1[i] / r;
                }
                SurfaceKind::Sphere => {
                    out[i][1] += d2[i] / (r * grid.point(i).c1.sin());
                    out[i][2] -= d1[i] / r;
                }
            }
        }
    }
    Ok(out)
}

/// Local-frame vector `(v_r, v_1, v_2)` at a point converted to Cartesian.
pub fn local_to_cartesian(surface: &SurfaceSpec, p: SurfacePoint, v: [f64; 3]) -> [f64; 3] {
    match surface.kind {
        SurfaceKind::Ring | SurfaceKind::Cylinder => {
            let (s, c) = p.c1.sin_cos();
            [v[0] * c - v[1] * s, v[0] * s + v[1] * c, v[2]]
        }
        SurfaceKind::Sphere => {
            let (st, ct) = p.c1.sin_cos();
            let (sp, cp) = p.c2.sin_cos();
            [
                v[0] * st * cp + v[1] * ct * cp - v[2] * sp,
                v[0] * st * sp + v[1] * ct * sp + v[2] * cp,
                v[0] * ct - v[1] * st,
            ]
        }
    }
}

/// Phase `(e/hbar) integral A.dl` along the link from each node to its
/// forward neighbour on `axis`; zero where no link exists.
pub fn link_phases(
    spec: &GaugeFieldSpec,
    grid: &Grid,
    constants: &PhysicalConstants,
    axis: Axis,
) -> Result<Vec<f64>> {
    let n = grid.len();
    let h = grid.spacing(axis);
    let surface = grid.surface();
    let mut out = vec![0.0; n];
    if grid.topology(axis) == Topology::Absent {
        return Ok(out);
    }
    let comp = |p: &Potential| match axis {
        Axis::First => p.a1,
        Axis::Second => p.a2,
    };
    match &spec.kind {
        FieldKind::Sampled(s) => {
            check_sampled(s, grid)?;
            let a = match axis {
                Axis::First => &s.a1,
                Axis::Second => &s.a2,
            };
            for i in 0..n {
                if let Some(j) = grid.forward(i, axis) {
                    let len = h * 0.5 * (grid.metric(axis, i) + grid.metric(axis, j));
                    out[i] = len * 0.5 * (a[i] + a[j]);
                }
            }
        }
        kind => {
            // closed-form potentials are constant along every link
            for i in 0..n {
                if grid.forward(i, axis).is_some() {
                    let (a1, a2) = analytic_tangential(kind, surface, grid.point(i))?;
                    let p = Potential { a1, a2, ar: 0.0 };
                    out[i] = comp(&p) * grid.metric(axis, i) * h;
                }
            }
        }
    }
    for lam in &spec.gauges {
        lam.check_grid(grid)?;
        for i in 0..n {
            let Some(j) = grid.forward(i, axis) else { continue };
            out[i] += match &lam.mode {
                GradientMode::Stencil => lam.values[j] - lam.values[i],
                GradientMode::Analytic(g) => {
                    let k = match axis {
                        Axis::First => 0,
                        Axis::Second => 1,
                    };
                    let len = h * 0.5 * (grid.metric(axis, i) + grid.metric(axis, j));
                    len * 0.5 * (g[i][k] + g[j][k])
                }
            };
        }
    }
    let k = constants.phase_per_potential();
    out.iter_mut().for_each(|v| *v *= k);
    Ok(out)
}
