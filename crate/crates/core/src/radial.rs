//! Radial operators on an auxiliary grid across the surface, used to check
//! the identities relating the radial Laplacian to the radial momentum.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::discretize::{OperatorMatrix, StencilOrder};
use crate::error::{invalid, Result};
use crate::geometry::{PhysicalConstants, SurfaceKind};

/// Radial measure `r^s dr`: `s = 1` around a cylinder, `s = 2` around a sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RadialFamily {
    Cylinder,
    Sphere,
}

impl RadialFamily {
    pub fn exponent(self) -> i32 {
        match self {
            Self::Cylinder => 1,
            Self::Sphere => 2,
        }
    }

    pub fn of(kind: SurfaceKind) -> Self {
        match kind {
            SurfaceKind::Sphere => Self::Sphere,
            _ => Self::Cylinder,
        }
    }

    /// `c` in `-hbar^2 r^-s d/dr (r^s d/dr) = p_r^2 - hbar^2 c / r^2`.
    pub fn momentum_offset(self) -> f64 {
        let s = self.exponent() as f64;
        s * (2.0 - s) / 4.0
    }
}

/// Uniform interior nodes `r_j = a + (j + 1) h` on `(a, b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    pub r: Vec<f64>,
    pub h: f64,
}

impl RadialGrid {
    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a > 0.0 && b > a && b.is_finite()) {
            return Err(invalid("r", format!("need 0 < a < b, got ({a}, {b})")));
        }
        if n < 3 {
            return Err(crate::Error::GridTooSmall(format!("n_r = {n}, need at least 3")));
        }
        let h = (b - a) / (n + 1) as f64;
        Ok(Self {
            r: (0..n).map(|j| a + (j + 1) as f64 * h).collect(),
            h,
        })
    }

    fn weights(&self, family: RadialFamily) -> Vec<f64> {
        self.r.iter().map(|r| r.powi(family.exponent()) * self.h).collect()
    }
}

fn banded(
    grid: &RadialGrid,
    family: RadialFamily,
    label: &str,
    stencil: impl Fn(usize) -> Vec<(isize, Complex64)>,
) -> OperatorMatrix {
    let n = grid.r.len();
    let mut m = OperatorMatrix::zeros(grid.weights(family), label);
    for i in 0..n {
        for (off, v) in stencil(i) {
            let j = i as isize + off;
            if (0..n as isize).contains(&j) {
                m.add_to(i, j as usize, v);
            }
        }
    }
    m
}

fn first_weights(order: StencilOrder) -> &'static [(isize, f64)] {
    match order {
        StencilOrder::Second => &[(-1, -0.5), (1, 0.5)],
        StencilOrder::Fourth => &[(-2, 1.0 / 12.0), (-1, -8.0 / 12.0), (1, 8.0 / 12.0), (2, -1.0 / 12.0)],
    }
}

/// `p_r = -i hbar (d/dr + s/2r)`, zero beyond the ends.
pub fn radial_momentum(
    grid: &RadialGrid,
    family: RadialFamily,
    constants: &PhysicalConstants,
    order: StencilOrder,
) -> OperatorMatrix {
    let s = family.exponent() as f64;
    let hb = constants.hbar;
    banded(grid, family, "radial momentum", |i| {
        let mut v: Vec<(isize, Complex64)> = first_weights(order)
            .iter()
            .map(|&(o, c)| (o, Complex64::new(0.0, -hb * c / grid.h)))
            .collect();
        v.push((0, Complex64::new(0.0, -hb * s / (2.0 * grid.r[i]))));
        v
    })
}

/// `-hbar^2 r^-s d/dr (r^s d/dr)`; flux form at second order, expanded
/// `d^2/dr^2 + (s/r) d/dr` at fourth.
pub fn radial_laplacian(
    grid: &RadialGrid,
    family: RadialFamily,
    constants: &PhysicalConstants,
    order: StencilOrder,
) -> OperatorMatrix {
    let s = family.exponent();
    let k = -constants.hbar * constants.hbar;
    let h = grid.h;
    banded(grid, family, "radial laplacian", |i| {
        let r = grid.r[i];
        match order {
            StencilOrder::Second => {
                let lo = (r - 0.5 * h).powi(s) / r.powi(s);
                let hi = (r + 0.5 * h).powi(s) / r.powi(s);
                vec![
                    (-1, Complex64::new(k * lo / (h * h), 0.0)),
                    (0, Complex64::new(-k * (lo + hi) / (h * h), 0.0)),
                    (1, Complex64::new(k * hi / (h * h), 0.0)),
                ]
            }
            StencilOrder::Fourth => {
                let d2 = [(-2, -1.0 / 12.0), (-1, 16.0 / 12.0), (0, -30.0 / 12.0), (1, 16.0 / 12.0), (2, -1.0 / 12.0)];
                let mut v: Vec<(isize, Complex64)> =
                    d2.iter().map(|&(o, c)| (o, Complex64::new(k * c / (h * h), 0.0))).collect();
                for &(o, c) in first_weights(order) {
                    v.push((o, Complex64::new(k * s as f64 * c / (r * h), 0.0)));
                }
                v
            }
        }
    })
}

/// Multiplication by `r`.
pub fn radial_position(grid: &RadialGrid, family: RadialFamily) -> OperatorMatrix {
    banded(grid, family, "radial position", |i| vec![(0, Complex64::new(grid.r[i], 0.0))])
}

fn sample(grid: &RadialGrid, f: &impl Fn(f64) -> f64) -> Vec<Complex64> {
    grid.r.iter().map(|&r| Complex64::new(f(r), 0.0)).collect()
}

fn interior_max(v: &[Complex64], margin: usize) -> f64 {
    v[margin..v.len() - margin].iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |(L - p_r^2 + hbar^2 c / r^2) f|` over nodes at least `2 * reach`
/// away from the ends, where `L` is the radial Laplacian.
pub fn laplacian_identity_defect(
    grid: &RadialGrid,
    family: RadialFamily,
    constants: &PhysicalConstants,
    order: StencilOrder,
    f: impl Fn(f64) -> f64,
) -> Result<f64> {
    let p = radial_momentum(grid, family, constants, order);
    let l = radial_laplacian(grid, family, constants, order);
    let v = sample(grid, &f);
    let lv = l.apply(&v)?;
    let ppv = p.apply(&p.apply(&v)?)?;
    let c = constants.hbar * constants.hbar * family.momentum_offset();
    let d: Vec<Complex64> = (0..v.len())
        .map(|i| lv[i] - ppv[i] + v[i] * (c / (grid.r[i] * grid.r[i])))
        .collect();
    Ok(interior_max(&d, margin(order)))
}

/// `max |([r, p_r] - i hbar) f|` away from the ends.
pub fn commutator_defect(
    grid: &RadialGrid,
    family: RadialFamily,
    constants: &PhysicalConstants,
    order: StencilOrder,
    f: impl Fn(f64) -> f64,
) -> Result<f64> {
    let p = radial_momentum(grid, family, constants, order);
    let r = radial_position(grid, family);
    let comm = r.matmul(&p)?.sub(&p.matmul(&r)?)?;
    let v = sample(grid, &f);
    let cv = comm.apply(&v)?;
    let ih = Complex64::new(0.0, constants.hbar);
    let d: Vec<Complex64> = cv.iter().zip(&v).map(|(a, b)| a - ih * b).collect();
    Ok(interior_max(&d, margin(order)))
}

fn margin(order: StencilOrder) -> usize {
    match order {
        StencilOrder::Second => 2,
        StencilOrder::Fourth => 4,
    }
}
