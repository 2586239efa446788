//! Surface Hamiltonians as weighted-Hermitian matrices on a grid.
//!
//! The tangential kinetic energy is assembled from the quadratic form
//! `sum_faces c_f |D_f psi|^2`, where `D_f` is a staggered covariant
//! difference whose samples are parallel-transported with the link phases
//! `exp(-i (e/hbar) integral A.dl)`. The operator is `(hbar^2/2m) W^-1 K`.

use num_complex::Complex64;

use crate::discretize::{Axis, Grid, Line, LineKind, OperatorMatrix, StencilOrder};
use crate::error::{invalid, Result};
use crate::fields::{
    link_phases, local_to_cartesian, magnetic_field_on_grid, radial_on_grid, GaugeFieldSpec,
};
use crate::geometry::{geometric_kinetic_energy, PhysicalConstants, SurfaceKind, SurfaceSpec};

/// Which Hamiltonian to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Thin-layer Hamiltonian with the geometric kinetic energy.
    #[default]
    Correct,
    /// Laplacian in the covariant derivative restricted to the surface,
    /// keeping the normal component of `A`.
    Pragmatic,
}

#[derive(Debug, Clone)]
pub struct HamiltonianRequest {
    pub grid: Grid,
    pub field: Option<GaugeFieldSpec>,
    pub spin: bool,
    pub constants: PhysicalConstants,
    pub order: StencilOrder,
    pub variant: Variant,
}

impl HamiltonianRequest {
    pub fn new(grid: Grid) -> Self {
        Self {
            grid,
            field: None,
            spin: false,
            constants: PhysicalConstants::default(),
            order: StencilOrder::Second,
            variant: Variant::Correct,
        }
    }

    pub fn surface(&self) -> &SurfaceSpec {
        self.grid.surface()
    }
}

/// Builds the Hamiltonian described by `req`.
pub fn build(req: &HamiltonianRequest) -> Result<OperatorMatrix> {
    req.constants.validate()?;
    let g = &req.grid;
    let zero = GaugeFieldSpec::zero();
    let field = req.field.as_ref().unwrap_or(&zero);
    match (req.variant, g.surface().kind) {
        (Variant::Pragmatic, SurfaceKind::Sphere) => Err(invalid(
            "variant",
            "the pragmatic Hamiltonian is built for rings and cylinders",
        )),
        (Variant::Pragmatic, _) => pragmatic_cylinder(g, field, &req.constants, req.order, req.spin),
        (Variant::Correct, SurfaceKind::Sphere) => {
            magnetic_sphere(g, field, &req.constants, req.order, req.spin)
        }
        (Variant::Correct, _) => magnetic_cylinder(g, field, &req.constants, req.order, req.spin),
    }
}

/// Free particle on a ring: `-(hbar^2/2mR^2) d^2/dtheta^2 - hbar^2/8mR^2`.
pub fn free_ring(grid: &Grid, constants: &PhysicalConstants, order: StencilOrder) -> Result<OperatorMatrix> {
    expect_kind(grid, &[SurfaceKind::Ring])?;
    magnetic_cylinder(grid, &GaugeFieldSpec::zero(), constants, order, false).map(|h| h.with_label("free ring"))
}

/// Free particle on a cylinder with hard walls at `z = -L, L`.
pub fn free_cylinder(grid: &Grid, constants: &PhysicalConstants, order: StencilOrder) -> Result<OperatorMatrix> {
    expect_kind(grid, &[SurfaceKind::Cylinder])?;
    magnetic_cylinder(grid, &GaugeFieldSpec::zero(), constants, order, false)
        .map(|h| h.with_label("free cylinder"))
}

/// Free particle on a sphere: `-(hbar^2/2mR^2)` times the angular Laplacian.
pub fn free_sphere(grid: &Grid, constants: &PhysicalConstants, order: StencilOrder) -> Result<OperatorMatrix> {
    magnetic_sphere(grid, &GaugeFieldSpec::zero(), constants, order, false).map(|h| h.with_label("free sphere"))
}

/// Charged particle on a ring or cylinder:
/// `(1/2m)(p - eA)^2 + GKE`, plus the Zeeman term when `spin` is set.
pub fn magnetic_cylinder(
    grid: &Grid,
    field: &GaugeFieldSpec,
    constants: &PhysicalConstants,
    order: StencilOrder,
    spin: bool,
) -> Result<OperatorMatrix> {
    expect_kind(grid, &[SurfaceKind::Ring, SurfaceKind::Cylinder])?;
    let gke = geometric_kinetic_energy(grid.surface(), constants)?;
    let mut h = kinetic(grid, field, constants, order)?;
    shift_diagonal(&mut h, |_| Complex64::new(gke, 0.0));
    finish(grid, field, constants, h, spin, "magnetic cylinder")
}

/// Charged particle on a sphere: `(1/2m)(p - eA)^2`, plus Zeeman when `spin`.
pub fn magnetic_sphere(
    grid: &Grid,
    field: &GaugeFieldSpec,
    constants: &PhysicalConstants,
    order: StencilOrder,
    spin: bool,
) -> Result<OperatorMatrix> {
    expect_kind(grid, &[SurfaceKind::Sphere])?;
    let h = kinetic(grid, field, constants, order)?;
    finish(grid, field, constants, h, spin, "magnetic sphere")
}

/// Pragmatic Hamiltonian on a ring or cylinder. Shares the tangential
/// kinetic operator with [`magnetic_cylinder`] and adds
/// `i(hbar e/2m)(A_r/R + dA_r/dr) + e^2 A_r^2/2m` on the diagonal; it has
/// no geometric kinetic energy.
pub fn pragmatic_cylinder(
    grid: &Grid,
    field: &GaugeFieldSpec,
    constants: &PhysicalConstants,
    order: StencilOrder,
    spin: bool,
) -> Result<OperatorMatrix> {
    expect_kind(grid, &[SurfaceKind::Ring, SurfaceKind::Cylinder])?;
    let r = grid.surface().radius;
    let (ar, dar) = radial_on_grid(field, grid)?;
    let (hbar, e, m) = (constants.hbar, constants.charge, constants.mass);
    let mut h = kinetic(grid, field, constants, order)?;
    shift_diagonal(&mut h, |i| {
        Complex64::new(
            e * e * ar[i] * ar[i] / (2.0 * m),
            hbar * e / (2.0 * m) * (ar[i] / r + dar[i]),
        )
    });
    finish(grid, field, constants, h, spin, "pragmatic cylinder")
}

/// Zeeman term `-(e hbar/2m) sigma.B` on two-component spinors, with `B`
/// converted from the local frame to Cartesian components at every node.
pub fn zeeman_block(grid: &Grid, field: &GaugeFieldSpec, constants: &PhysicalConstants) -> Result<OperatorMatrix> {
    let b = magnetic_field_on_grid(field, grid)?;
    let k = -constants.charge * constants.hbar / (2.0 * constants.mass);
    let weights: Vec<f64> = grid.weights().iter().flat_map(|&w| [w, w]).collect();
    let mut out = OperatorMatrix::zeros(weights, "zeeman").with_layout(grid.layout(2));
    for (i, bl) in b.iter().enumerate() {
        let [bx, by, bz] = local_to_cartesian(grid.surface(), grid.point(i), *bl);
        let (u, d) = (2 * i, 2 * i + 1);
        out.set(u, u, Complex64::new(k * bz, 0.0));
        out.set(d, d, Complex64::new(-k * bz, 0.0));
        out.set(u, d, Complex64::new(k * bx, -k * by));
        out.set(d, u, Complex64::new(k * bx, k * by));
    }
    Ok(out)
}

fn finish(
    grid: &Grid,
    field: &GaugeFieldSpec,
    constants: &PhysicalConstants,
    h: OperatorMatrix,
    spin: bool,
    label: &str,
) -> Result<OperatorMatrix> {
    let h = if spin {
        h.kron_spin(2).add(&zeeman_block(grid, field, constants)?)?
    } else {
        h
    };
    Ok(h.with_label(label))
}

fn expect_kind(grid: &Grid, kinds: &[SurfaceKind]) -> Result<()> {
    if kinds.contains(&grid.surface().kind) {
        Ok(())
    } else {
        Err(invalid(
            "surface",
            format!("{:?} is not one of {kinds:?}", grid.surface().kind),
        ))
    }
}

fn shift_diagonal(h: &mut OperatorMatrix, f: impl Fn(usize) -> Complex64) {
    for i in 0..h.dim() {
        h.add_to(i, i, f(i));
    }
}

/// Covariant tangential kinetic energy `(1/2m)(p - eA)^2` on the grid.
pub fn kinetic(
    grid: &Grid,
    field: &GaugeFieldSpec,
    constants: &PhysicalConstants,
    order: StencilOrder,
) -> Result<OperatorMatrix> {
    let n = grid.len();
    let mut k = vec![Complex64::new(0.0, 0.0); n * n];
    let w = grid.weights();
    let r = grid.surface().radius;
    let h1 = grid.spacing(Axis::First);
    let h2 = grid.spacing(Axis::Second);
    let phase1 = link_phases(field, grid, constants, Axis::First)?;
    let phase2 = link_phases(field, grid, constants, Axis::Second)?;
    let line = |nodes: Vec<usize>, phases: &[f64], kind| {
        let links = nodes.iter().map(|&i| phases[i]).collect();
        Line::new(nodes, links, kind)
    };
    match grid.surface().kind {
        SurfaceKind::Ring | SurfaceKind::Cylinder => {
            let cell = w[0];
            for nodes in grid.lines(Axis::First) {
                line(nodes, &phase1, LineKind::Periodic).assemble(&mut k, n, order, |_| r * h1, |_| cell);
            }
            if grid.surface().kind == SurfaceKind::Cylinder {
                for nodes in grid.lines(Axis::Second) {
                    line(nodes, &phase2, LineKind::Dirichlet).assemble(&mut k, n, order, |_| h2, |_| cell);
                }
            }
        }
        SurfaceKind::Sphere => {
            let thetas = grid.coords1().to_vec();
            for nodes in grid.lines(Axis::First) {
                // meridian faces sit at theta = (f + 1) h1; pole faces carry no flux
                line(nodes, &phase1, LineKind::Open).assemble(
                    &mut k,
                    n,
                    order,
                    |_| r * h1,
                    |f| r * ((f + 1) as f64 * h1).sin() * h2 * r * h1,
                );
            }
            for (j, nodes) in grid.lines(Axis::Second).into_iter().enumerate() {
                let step = r * thetas[j].sin() * h2;
                let cell = w[grid.index(j, 0)];
                line(nodes, &phase2, LineKind::Periodic).assemble(&mut k, n, order, |_| step, |_| cell);
            }
        }
    }
    let s = constants.kinetic_scale();
    let mut h = OperatorMatrix::zeros(w.to_vec(), "kinetic").with_layout(grid.layout(1));
    for a in 0..n {
        let scale = s / w[a];
        for b in 0..n {
            let v = k[a * n + b];
            if v.re != 0.0 || v.im != 0.0 {
                h.set(a, b, v * scale);
            }
        }
    }
    Ok(h)
}
