//! Surface grids, finite-difference stencils and dense operator matrices.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{SurfaceKind, SurfaceSpec};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Accuracy order of the difference stencils.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum StencilOrder {
    #[default]
    Second,
    Fourth,
}

impl StencilOrder {
    pub fn value(self) -> u32 {
        match self {
            Self::Second => 2,
            Self::Fourth => 4,
        }
    }

    /// Staggered face-gradient weights as `(offset from left node, weight)`.
    fn face_weights(self) -> &'static [(isize, f64)] {
        match self {
            Self::Second => &[(0, -1.0), (1, 1.0)],
            Self::Fourth => &[
                (-1, 1.0 / 24.0),
                (0, -27.0 / 24.0),
                (1, 27.0 / 24.0),
                (2, -1.0 / 24.0),
            ],
        }
    }

    /// Centered node-derivative weights.
    fn node_weights(self) -> &'static [(isize, f64)] {
        match self {
            Self::Second => &[(-1, -0.5), (1, 0.5)],
            Self::Fourth => &[
                (-2, 1.0 / 12.0),
                (-1, -8.0 / 12.0),
                (1, 8.0 / 12.0),
                (2, -1.0 / 12.0),
            ],
        }
    }
}

impl TryFrom<u8> for StencilOrder {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            2 => Ok(Self::Second),
            4 => Ok(Self::Fourth),
            _ => Err(invalid("order", format!("must be 2 or 4, got {v}"))),
        }
    }
}

impl From<StencilOrder> for u8 {
    fn from(o: StencilOrder) -> u8 {
        o.value() as u8
    }
}

/// Grid axis. `First` is the azimuth on rings and cylinders and the polar
/// angle on spheres; `Second` is `z` on cylinders and the azimuth on spheres.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    First,
    Second,
}

/// Boundary treatment of an axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    Periodic,
    /// Walls half a spacing beyond the end nodes where the function vanishes.
    Dirichlet,
    /// Polar angle: the end faces sit on the poles and carry no flux.
    Polar,
    /// Axis of length one (the ring's second axis).
    Absent,
}

/// Tensor-product node set on a surface. Node `(i1, i2)` has flat index
/// `i1 * n2 + i2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    surface: SurfaceSpec,
    n1: usize,
    n2: usize,
    coords1: Vec<f64>,
    coords2: Vec<f64>,
    weights: Vec<f64>,
}

/// Coordinates of a surface point: `(theta, z)` on rings and cylinders,
/// `(theta, phi)` on spheres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub c1: f64,
    pub c2: f64,
}

pub fn build_grid(surface: &SurfaceSpec, n1: usize, n2: usize) -> Result<Grid> {
    surface.validate()?;
    if n1 < 3 {
        return Err(Error::GridTooSmall(format!("n1 = {n1}, need at least 3")));
    }
    let r = surface.radius;
    let (coords1, coords2, weights) = match surface.kind {
        SurfaceKind::Ring => {
            if n2 != 1 {
                return Err(Error::GridTooSmall(format!("a ring has n2 = 1, got {n2}")));
            }
            let h = 2.0 * PI / n1 as f64;
            let c1: Vec<f64> = (0..n1).map(|i| i as f64 * h).collect();
            (c1, vec![0.0], vec![r * h; n1])
        }
        SurfaceKind::Cylinder => {
            if n2 < 3 {
                return Err(Error::GridTooSmall(format!("n2 = {n2}, need at least 3")));
            }
            let l = surface.half_length.unwrap_or(0.0);
            let h1 = 2.0 * PI / n1 as f64;
            let h2 = 2.0 * l / n2 as f64;
            let c1: Vec<f64> = (0..n1).map(|i| i as f64 * h1).collect();
            let c2: Vec<f64> = (0..n2).map(|j| -l + (j as f64 + 0.5) * h2).collect();
            (c1, c2, vec![r * h1 * h2; n1 * n2])
        }
        SurfaceKind::Sphere => {
            if n2 < 3 {
                return Err(Error::GridTooSmall(format!("n2 = {n2}, need at least 3")));
            }
            let h1 = PI / n1 as f64;
            let h2 = 2.0 * PI / n2 as f64;
            let c1: Vec<f64> = (0..n1).map(|i| (i as f64 + 0.5) * h1).collect();
            let c2: Vec<f64> = (0..n2).map(|j| j as f64 * h2).collect();
            let mut w = Vec::with_capacity(n1 * n2);
            for t in &c1 {
                // exact area of the cell between theta -+ h1/2
                let cell = 2.0 * r * r * h2 * t.sin() * (0.5 * h1).sin();
                w.extend(std::iter::repeat_n(cell, n2));
            }
            (c1, c2, w)
        }
    };
    Ok(Grid {
        surface: *surface,
        n1,
        n2,
        coords1,
        coords2,
        weights,
    })
}

impl Grid {
    pub fn surface(&self) -> &SurfaceSpec {
        &self.surface
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n1, self.n2)
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coords1(&self) -> &[f64] {
        &self.coords1
    }

    pub fn coords2(&self) -> &[f64] {
        &self.coords2
    }

    /// Quadrature weight (cell area) of every node.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn index(&self, i1: usize, i2: usize) -> usize {
        i1 * self.n2 + i2
    }

    pub fn split(&self, node: usize) -> (usize, usize) {
        (node / self.n2, node % self.n2)
    }

    pub fn point(&self, node: usize) -> SurfacePoint {
        let (i1, i2) = self.split(node);
        SurfacePoint {
            c1: self.coords1[i1],
            c2: self.coords2[i2],
        }
    }

    pub fn topology(&self, axis: Axis) -> Topology {
        match (self.surface.kind, axis) {
            (SurfaceKind::Sphere, Axis::First) => Topology::Polar,
            (_, Axis::First) => Topology::Periodic,
            (SurfaceKind::Ring, Axis::Second) => Topology::Absent,
            (SurfaceKind::Cylinder, Axis::Second) => Topology::Dirichlet,
            (SurfaceKind::Sphere, Axis::Second) => Topology::Periodic,
        }
    }

    /// The axis along which the grid is invariant under shifts by one node.
    pub fn periodic_axis(&self) -> Axis {
        match self.surface.kind {
            SurfaceKind::Sphere => Axis::Second,
            _ => Axis::First,
        }
    }

    /// Coordinate spacing along an axis.
    pub fn spacing(&self, axis: Axis) -> f64 {
        match (self.surface.kind, axis) {
            (SurfaceKind::Sphere, Axis::First) => PI / self.n1 as f64,
            (_, Axis::First) => 2.0 * PI / self.n1 as f64,
            (SurfaceKind::Ring, Axis::Second) => 0.0,
            (SurfaceKind::Cylinder, Axis::Second) => {
                2.0 * self.surface.half_length.unwrap_or(0.0) / self.n2 as f64
            }
            (SurfaceKind::Sphere, Axis::Second) => 2.0 * PI / self.n2 as f64,
        }
    }

    /// Arc length per unit coordinate along `axis` at `node`.
    pub fn metric(&self, axis: Axis, node: usize) -> f64 {
        let r = self.surface.radius;
        match (self.surface.kind, axis) {
            (SurfaceKind::Sphere, Axis::Second) => r * self.point(node).c1.sin(),
            (SurfaceKind::Cylinder, Axis::Second) | (SurfaceKind::Ring, Axis::Second) => 1.0,
            (_, Axis::First) => r,
        }
    }

    /// Lines of nodes running along `axis`, in coordinate order.
    pub fn lines(&self, axis: Axis) -> Vec<Vec<usize>> {
        match axis {
            Axis::First => (0..self.n2)
                .map(|i2| (0..self.n1).map(|i1| self.index(i1, i2)).collect())
                .collect(),
            Axis::Second => (0..self.n1)
                .map(|i1| (0..self.n2).map(|i2| self.index(i1, i2)).collect())
                .collect(),
        }
    }

    /// Neighbour of `node` one step forward along `axis`, wrapping on
    /// periodic axes; `None` past a wall or pole.
    pub fn forward(&self, node: usize, axis: Axis) -> Option<usize> {
        let (i1, i2) = self.split(node);
        match (axis, self.topology(axis)) {
            (Axis::First, Topology::Periodic) => Some(self.index((i1 + 1) % self.n1, i2)),
            (Axis::First, _) => (i1 + 1 < self.n1).then(|| self.index(i1 + 1, i2)),
            (Axis::Second, Topology::Periodic) => Some(self.index(i1, (i2 + 1) % self.n2)),
            (Axis::Second, Topology::Absent) => None,
            (Axis::Second, _) => (i2 + 1 < self.n2).then(|| self.index(i1, i2 + 1)),
        }
    }

    pub fn layout(&self, spin: usize) -> GridLayout {
        GridLayout {
            n1: self.n1,
            n2: self.n2,
            spin,
            periodic: self.periodic_axis(),
        }
    }
}

/// Index structure of an operator assembled on a grid, with `spin`
/// components per node stored fastest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridLayout {
    pub n1: usize,
    pub n2: usize,
    pub spin: usize,
    pub periodic: Axis,
}

/// Dense complex matrix acting on nodal samples, together with the
/// quadrature weights defining its inner product `<u, v> = sum w conj(u) v`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    data: Vec<Complex64>,
    weights: Vec<f64>,
    layout: Option<GridLayout>,
    label: String,
}

impl OperatorMatrix {
    pub fn zeros(weights: Vec<f64>, label: impl Into<String>) -> Self {
        let dim = weights.len();
        Self {
            dim,
            data: vec![ZERO; dim * dim],
            weights,
            layout: None,
            label: label.into(),
        }
    }

    pub fn from_fn(
        weights: Vec<f64>,
        label: impl Into<String>,
        mut f: impl FnMut(usize, usize) -> Complex64,
    ) -> Self {
        let mut m = Self::zeros(weights, label);
        for i in 0..m.dim {
            for j in 0..m.dim {
                m.data[i * m.dim + j] = f(i, j);
            }
        }
        m
    }

    pub fn with_layout(mut self, layout: GridLayout) -> Self {
        debug_assert_eq!(layout.n1 * layout.n2 * layout.spin, self.dim);
        self.layout = Some(layout);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn layout(&self) -> Option<GridLayout> {
        self.layout
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] += v;
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(v.len())?;
        Ok(self
            .data
            .chunks_exact(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_len(other.dim)?;
        let n = self.dim;
        let mut out = Self::zeros(self.weights.clone(), self.label.clone());
        out.layout = self.layout;
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                for (o, b) in out.data[i * n..(i + 1) * n].iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|x| *x *= s);
        out
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `U A U^dagger` with `U = diag(exp(i phases))`.
    pub fn conjugate_by_phases(&self, phases: &[f64]) -> Result<Self> {
        self.check_len(phases.len())?;
        let u: Vec<Complex64> = phases.iter().map(|&p| Complex64::from_polar(1.0, p)).collect();
        let mut out = self.clone();
        let n = self.dim;
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = u[i] * self.data[i * n + j] * u[j].conj();
            }
        }
        Ok(out)
    }

    /// `A (x) I_spin`, keeping spin components fastest.
    pub fn kron_spin(&self, spin: usize) -> Self {
        let n = self.dim;
        let big = n * spin;
        let weights: Vec<f64> = self
            .weights
            .iter()
            .flat_map(|&w| std::iter::repeat_n(w, spin))
            .collect();
        let mut out = Self::zeros(weights, self.label.clone());
        for i in 0..n {
            for j in 0..n {
                let v = self.data[i * n + j];
                for s in 0..spin {
                    out.data[(i * spin + s) * big + j * spin + s] = v;
                }
            }
        }
        out.layout = self.layout.map(|l| GridLayout { spin: l.spin * spin, ..l });
        out
    }

    /// `sum w conj(u) v`.
    pub fn inner(&self, u: &[Complex64], v: &[Complex64]) -> Result<Complex64> {
        self.check_len(u.len())?;
        self.check_len(v.len())?;
        Ok(u.iter()
            .zip(v)
            .zip(&self.weights)
            .map(|((a, b), w)| a.conj() * b * *w)
            .sum())
    }

    pub fn norm(&self, u: &[Complex64]) -> Result<f64> {
        Ok(self.inner(u, u)?.re.max(0.0).sqrt())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.check_len(other.dim)?;
        let mut out = self.clone();
        out.data
            .iter_mut()
            .zip(&other.data)
            .for_each(|(a, b)| *a = f(*a, *b));
        Ok(out)
    }

    fn check_len(&self, found: usize) -> Result<()> {
        if found == self.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                found,
            })
        }
    }
}

/// Adjoint with respect to the weighted inner product, `W^-1 A^dagger W`.
pub fn weighted_adjoint(op: &OperatorMatrix) -> OperatorMatrix {
    let w = &op.weights;
    let mut out = op.clone();
    let n = op.dim;
    for i in 0..n {
        for j in 0..n {
            out.data[i * n + j] = op.data[j * n + i].conj() * (w[j] / w[i]);
        }
    }
    out
}

/// `max |A - adj(A)|` over entries.
pub fn hermiticity_residual(op: &OperatorMatrix) -> f64 {
    let w = &op.weights;
    let n = op.dim;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let adj = op.data[j * n + i].conj() * (w[j] / w[i]);
            worst = worst.max((op.data[i * n + j] - adj).norm());
        }
    }
    worst
}

/// Diagonal operator `f(node)` on the grid.
pub fn multiplication_operator(grid: &Grid, samples: &[f64]) -> Result<OperatorMatrix> {
    if samples.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            found: samples.len(),
        });
    }
    if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let mut m = OperatorMatrix::zeros(grid.weights.clone(), "multiplication").with_layout(grid.layout(1));
    for (i, &v) in samples.iter().enumerate() {
        m.set(i, i, Complex64::new(v, 0.0));
    }
    Ok(m)
}

/// Centered first derivative with respect to the coordinate of `axis`.
/// Dirichlet axes extend the samples oddly across the walls.
pub fn first_derivative(grid: &Grid, axis: Axis, order: StencilOrder) -> Result<OperatorMatrix> {
    let lines = derivative_lines(grid, axis)?;
    let h = grid.spacing(axis);
    let mut m = OperatorMatrix::zeros(grid.weights.clone(), "first derivative").with_layout(grid.layout(1));
    for line in &lines {
        for p in 0..line.len() as isize {
            let row = line.node(p).map(|(n, _)| n).unwrap_or_default();
            for &(off, c) in order.node_weights() {
                if let Some((col, sign)) = line.node(p + off) {
                    m.add_to(row, col, Complex64::new(sign * c / h, 0.0));
                }
            }
        }
    }
    Ok(m)
}

/// Second derivative with respect to the coordinate of `axis`, written as
/// minus the square of the staggered first difference.
pub fn second_derivative(grid: &Grid, axis: Axis, order: StencilOrder) -> Result<OperatorMatrix> {
    let lines = derivative_lines(grid, axis)?;
    let h = grid.spacing(axis);
    let mut k = vec![ZERO; grid.len() * grid.len()];
    for line in &lines {
        line.assemble(&mut k, grid.len(), order, |_| h, |_| 1.0);
    }
    let mut m = OperatorMatrix::zeros(grid.weights.clone(), "second derivative").with_layout(grid.layout(1));
    for (d, v) in m.data.iter_mut().zip(&k) {
        *d = -v;
    }
    Ok(m)
}

fn derivative_lines(grid: &Grid, axis: Axis) -> Result<Vec<Line>> {
    let topo = grid.topology(axis);
    let kind = match topo {
        Topology::Periodic => LineKind::Periodic,
        Topology::Dirichlet => LineKind::Dirichlet,
        Topology::Polar | Topology::Absent => {
            return Err(invalid("axis", format!("{axis:?} is neither periodic nor Dirichlet")))
        }
    };
    Ok(grid
        .lines(axis)
        .into_iter()
        .map(|nodes| {
            let links = vec![0.0; nodes.len()];
            Line::new(nodes, links, kind)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LineKind {
    Periodic,
    Dirichlet,
    /// Only the faces between consecutive nodes exist.
    Open,
}

/// A coordinate line of nodes with the phase `(e/hbar) * integral A.dl`
/// carried by each link `k -> k+1`.
#[derive(Debug, Clone)]
pub(crate) struct Line {
    nodes: Vec<usize>,
    links: Vec<f64>,
    kind: LineKind,
}

impl Line {
    pub(crate) fn new(nodes: Vec<usize>, links: Vec<f64>, kind: LineKind) -> Self {
        Self { nodes, links, kind }
    }

    fn len(&self) -> usize {
        self.nodes.len()
    }

    /// Node and sign represented by a possibly out-of-range position.
    fn node(&self, p: isize) -> Option<(usize, f64)> {
        let n = self.len() as isize;
        match self.kind {
            LineKind::Periodic => Some((self.nodes[p.rem_euclid(n) as usize], 1.0)),
            _ if (0..n).contains(&p) => Some((self.nodes[p as usize], 1.0)),
            LineKind::Dirichlet => {
                let m = if p < 0 { -1 - p } else { 2 * n - 1 - p };
                (0..n).contains(&m).then(|| (self.nodes[m as usize], -1.0))
            }
            LineKind::Open => None,
        }
    }

    /// Phase of the link from position `p` to `p + 1`. Across a wall the
    /// potential is continued oddly, so mirrored links carry negated phases.
    fn link(&self, p: isize) -> f64 {
        let n = self.len() as isize;
        match self.kind {
            LineKind::Periodic => self.links[p.rem_euclid(n) as usize],
            _ if p >= 0 && p < n - 1 => self.links[p as usize],
            LineKind::Dirichlet if p == -1 || p == n - 1 => 0.0,
            LineKind::Dirichlet if p < -1 => -self.links[(-2 - p) as usize],
            LineKind::Dirichlet => -self.links[(2 * n - 2 - p) as usize],
            LineKind::Open => 0.0,
        }
    }

    /// Range of faces `f` (between positions `f` and `f + 1`) and whether
    /// the face lies on a wall.
    fn faces(&self) -> Vec<(isize, bool)> {
        let n = self.len() as isize;
        match self.kind {
            LineKind::Periodic => (0..n).map(|f| (f, false)).collect(),
            LineKind::Dirichlet => (-1..n).map(|f| (f, f == -1 || f == n - 1)).collect(),
            LineKind::Open => (0..n - 1).map(|f| (f, false)).collect(),
        }
    }

    /// Adds `sum_f c_f |g_f psi|^2` to the quadratic form `k`, where `g_f` is
    /// the gauge-covariant staggered difference across face `f` with step
    /// `h(f)`, referred to the face's left node. Wall faces count half.
    pub(crate) fn assemble(
        &self,
        k: &mut [Complex64],
        dim: usize,
        order: StencilOrder,
        h: impl Fn(isize) -> f64,
        c: impl Fn(isize) -> f64,
    ) {
        let order = if self.kind == LineKind::Open {
            StencilOrder::Second
        } else {
            order
        };
        let mut g: Vec<(usize, Complex64)> = Vec::with_capacity(4);
        for (f, wall) in self.faces() {
            let weight = if wall { 0.5 * c(f) } else { c(f) };
            if weight == 0.0 {
                continue;
            }
            let inv_h = 1.0 / h(f);
            g.clear();
            for &(off, cw) in order.face_weights() {
                let q = f + off;
                let Some((node, sign)) = self.node(q) else { continue };
                let phase = self.phase_between(f, q);
                let coef = Complex64::from_polar(sign * cw * inv_h, -phase);
                match g.iter_mut().find(|(n, _)| *n == node) {
                    Some(e) => e.1 += coef,
                    None => g.push((node, coef)),
                }
            }
            for &(a, ga) in &g {
                let ca = ga.conj() * weight;
                for &(b, gb) in &g {
                    k[a * dim + b] += ca * gb;
                }
            }
        }
    }

    /// Accumulated link phase from position `from` to position `to`.
    fn phase_between(&self, from: isize, to: isize) -> f64 {
        if to >= from {
            (from..to).map(|p| self.link(p)).sum()
        } else {
            -(to..from).map(|p| self.link(p)).sum::<f64>()
        }
    }
}
