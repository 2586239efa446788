//! Particle in a shell of thickness `d` around the surface, and the
//! `d -> 0` limit that produces the geometric kinetic energy.
//!
//! For angular momentum `l` the radial equation is
//! `-(hbar^2/2m) r^-s (r^s u')' + hbar^2 c_l / (2m r^2) u = E u` on
//! `R - d/2 < r < R + d/2` with `u = 0` at both walls. It is solved in the
//! variable `v = r^(s/2) u`, which turns the measure into `dr`, using a
//! sine basis: the kinetic part is then diagonal and exact, and only the
//! smooth potential `(c_l + s/2 (s/2 - 1)) / r^2` needs quadrature.

use std::f64::consts::PI;

use faer::{Mat, Side};
use serde::Serialize;

use crate::error::{invalid, positive, Error, Result};
use crate::geometry::{PhysicalConstants, SurfaceKind, SurfaceSpec};
use crate::radial::RadialFamily;

/// Sine modes kept in the radial expansion.
const BASIS: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct ShellProblem {
    pub surface: SurfaceSpec,
    pub d: f64,
    pub l: u32,
    /// Radial quadrature nodes; `ceil(max(200, 20/d))` when `None`.
    pub n_r: Option<usize>,
    pub constants: PhysicalConstants,
}

/// One row of a thin-shell table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShellSample {
    pub d: f64,
    pub l: u32,
    pub e_raw: f64,
    pub e_box: f64,
    pub e_surface: f64,
    /// `e_surface` minus the bare angular energy.
    pub shift: f64,
}

/// Extrapolated `d -> 0` surface energy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GkeEstimate {
    pub l: u32,
    pub limit: f64,
    /// `limit` minus the bare angular energy.
    pub gke: f64,
    /// Convergence order of the surface energy in `d`.
    pub order: f64,
    pub samples: Vec<ShellSample>,
}

impl ShellProblem {
    pub fn new(surface: SurfaceSpec, d: f64, l: u32, constants: PhysicalConstants) -> Result<Self> {
        let p = Self {
            surface,
            d,
            l,
            n_r: None,
            constants,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.surface.validate()?;
        self.constants.validate()?;
        positive("d", self.d)?;
        if self.d >= 2.0 * self.surface.radius {
            return Err(Error::ShellCollapse {
                d: self.d,
                two_r: 2.0 * self.surface.radius,
            });
        }
        if let Some(n) = self.n_r {
            if n < BASIS {
                return Err(Error::GridTooSmall(format!("n_r = {n}, need at least {BASIS}")));
            }
        }
        Ok(())
    }

    pub fn quadrature_nodes(&self) -> usize {
        self.n_r.unwrap_or_else(|| (20.0 / self.d).max(200.0).ceil() as usize)
    }

    fn family(&self) -> RadialFamily {
        RadialFamily::of(self.surface.kind)
    }

    /// `c_l`: `l^2` around a cylinder or ring, `l(l+1)` around a sphere.
    fn angular(&self) -> f64 {
        let l = self.l as f64;
        match self.surface.kind {
            SurfaceKind::Sphere => l * (l + 1.0),
            _ => l * l,
        }
    }

    /// `hbar^2 c_l / 2mR^2`, the angular energy on the bare surface.
    pub fn bare_energy(&self) -> f64 {
        self.constants.kinetic_scale() * self.angular() / (self.surface.radius * self.surface.radius)
    }

    /// `hbar^2 pi^2 n^2 / 2md^2`.
    pub fn box_energy(&self, n: usize) -> f64 {
        let k = n as f64 * PI / self.d;
        self.constants.kinetic_scale() * k * k
    }

    /// The `k` lowest eigenvalues minus the box energy of the ground state.
    fn shifted_levels(&self, k: usize) -> Result<Vec<f64>> {
        self.validate()?;
        if k == 0 || k > BASIS / 2 {
            return Err(invalid("k", format!("must lie in 1..={}", BASIS / 2)));
        }
        let d = self.d;
        let r_in = self.surface.radius - 0.5 * d;
        let s = self.family().exponent() as f64;
        let c = self.angular() + 0.5 * s * (0.5 * s - 1.0);
        let (x, w) = gauss_legendre(self.quadrature_nodes());
        let scale = self.constants.kinetic_scale();
        let norm = 2.0 / d;
        // potential matrix in the sine basis
        let mut m = Mat::<f64>::zeros(BASIS, BASIS);
        let mut sines = vec![0.0; BASIS];
        for (xi, wi) in x.iter().zip(&w) {
            let t = 0.5 * (xi + 1.0);
            let r = r_in + t * d;
            let v = scale * c / (r * r) * wi * 0.5 * d * norm;
            for (j, sj) in sines.iter_mut().enumerate() {
                *sj = ((j + 1) as f64 * PI * t).sin();
            }
            for i in 0..BASIS {
                let a = v * sines[i];
                for j in 0..=i {
                    m[(i, j)] += a * sines[j];
                }
            }
        }
        for i in 0..BASIS {
            let kk = ((i + 1) * (i + 1)) as f64 - 1.0;
            m[(i, i)] += scale * kk * PI * PI / (d * d);
        }
        let ev = m
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Solver {
                label: "shell".into(),
                reason: format!("{e:?}"),
            })?;
        Ok(ev[..k].to_vec())
    }
}

/// The `k` lowest radial eigenvalues of the shell problem.
pub fn radial_spectrum(problem: &ShellProblem, k: usize) -> Result<Vec<f64>> {
    let e1 = problem.box_energy(1);
    Ok(problem.shifted_levels(k)?.into_iter().map(|v| v + e1).collect())
}

/// `E_n - hbar^2 pi^2 n^2 / 2md^2` for the `n`-th radial level.
pub fn effective_surface_energy(problem: &ShellProblem, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(invalid("n", "radial levels start at 1"));
    }
    let levels = problem.shifted_levels(n)?;
    Ok(levels[n - 1] - (problem.box_energy(n) - problem.box_energy(1)))
}

/// Table row for one shell.
pub fn shell_sample(problem: &ShellProblem) -> Result<ShellSample> {
    let e_surface = effective_surface_energy(problem, 1)?;
    let e_box = problem.box_energy(1);
    Ok(ShellSample {
        d: problem.d,
        l: problem.l,
        e_raw: e_surface + e_box,
        e_box,
        e_surface,
        shift: e_surface - problem.bare_energy(),
    })
}

/// Extrapolates the surface energy of angular momentum `l` to `d -> 0`
/// from at least three strictly decreasing thicknesses. The energy is even
/// in `d`, so the extrapolation is polynomial in `d^2`.
pub fn gke_extrapolate(
    surface: &SurfaceSpec,
    l: u32,
    ds: &[f64],
    n_r: Option<usize>,
    constants: &PhysicalConstants,
) -> Result<GkeEstimate> {
    check_thicknesses(ds)?;
    let samples = ds
        .iter()
        .map(|&d| {
            let mut p = ShellProblem::new(*surface, d, l, *constants)?;
            p.n_r = n_r;
            shell_sample(&p)
        })
        .collect::<Result<Vec<_>>>()?;
    estimate_from(samples, surface, l, constants)
}

/// Same as [`gke_extrapolate`] from precomputed samples of one `l`.
pub fn estimate_from(
    samples: Vec<ShellSample>,
    surface: &SurfaceSpec,
    l: u32,
    constants: &PhysicalConstants,
) -> Result<GkeEstimate> {
    let ds: Vec<f64> = samples.iter().map(|s| s.d).collect();
    check_thicknesses(&ds)?;
    let x: Vec<f64> = ds.iter().map(|d| d * d).collect();
    let y: Vec<f64> = samples.iter().map(|s| s.e_surface).collect();
    let limit = neville_at_zero(&x, &y);
    let bare = ShellProblem {
        surface: *surface,
        d: ds[0],
        l,
        n_r: None,
        constants: *constants,
    }
    .bare_energy();
    let (e0, e1, e2) = (y[0], y[1], y[2]);
    let order = ((e0 - e1) / (e1 - e2)).abs().ln() / (ds[0] / ds[1]).ln();
    Ok(GkeEstimate {
        l,
        limit,
        gke: limit - bare,
        order,
        samples,
    })
}

fn check_thicknesses(ds: &[f64]) -> Result<()> {
    if ds.len() < 3 {
        return Err(Error::Extrapolation(format!("need at least 3 thicknesses, got {}", ds.len())));
    }
    if ds.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
        return Err(Error::Extrapolation("thicknesses must be finite and positive".into()));
    }
    if ds.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Extrapolation("thicknesses must be strictly decreasing".into()));
    }
    Ok(())
}

/// Value at `x = 0` of the interpolating polynomial through `(x_i, y_i)`.
pub fn neville_at_zero(x: &[f64], y: &[f64]) -> f64 {
    let mut p = y.to_vec();
    let n = p.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (x[i] * p[i + 1] - x[i + m] * p[i]) / (x[i] - x[i + m]);
        }
    }
    p[0]
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// `P_n(z)` and its derivative.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Shell table for every `(l, d)` pair, ordered by `l` then `d`, computed
/// on up to `threads` worker threads.
pub fn shell_table(
    surface: &SurfaceSpec,
    ls: &[u32],
    ds: &[f64],
    n_r: Option<usize>,
    constants: &PhysicalConstants,
    threads: usize,
) -> Result<Vec<ShellSample>> {
    let jobs: Vec<(u32, f64)> = ls.iter().flat_map(|&l| ds.iter().map(move |&d| (l, d))).collect();
    let run = |&(l, d): &(u32, f64)| {
        let mut p = ShellProblem::new(*surface, d, l, *constants)?;
        p.n_r = n_r;
        shell_sample(&p)
    };
    let threads = threads.clamp(1, jobs.len().max(1));
    if threads == 1 {
        return jobs.iter().map(run).collect();
    }
    let chunk = jobs.len().div_ceil(threads);
    std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .chunks(chunk)
            .map(|c| scope.spawn(move || c.iter().map(run).collect::<Result<Vec<_>>>()))
            .collect();
        let mut out = Vec::with_capacity(jobs.len());
        for h in handles {
            out.extend(h.join().expect("shell worker panicked")?);
        }
        Ok(out)
    })
}
