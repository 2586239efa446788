//! Spectra, hermiticity diagnostics, gauge checks and closed-form references.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::discretize::{weighted_adjoint, Axis, OperatorMatrix, StencilOrder};
use crate::eigen;
use crate::error::{invalid, Result};
use crate::fields::{add_gauge, GaugeFieldSpec, GaugeFunction};
use crate::geometry::PhysicalConstants;

/// Lowest eigenvalues of an operator and how they were obtained.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    /// Ascending by real part, ties by imaginary part.
    pub eigenvalues: Vec<Complex64>,
    /// Whether the Hermitian solver was used.
    pub hermitian: bool,
    pub hermiticity_residual: f64,
    pub label: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
}

impl SpectrumReport {
    pub fn with_parameter(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|z| z.re).collect()
    }
}

/// Relative size below which an operator is treated as Hermitian.
const HERMITIAN_TOLERANCE: f64 = 1e-11;

/// The `k` lowest eigenvalues of `h`. Weighted-Hermitian operators go
/// through the symmetric solver; operators invariant under shifts along
/// the grid's periodic axis are first split into Fourier blocks.
pub fn spectrum(h: &OperatorMatrix, k: usize) -> Result<SpectrumReport> {
    let n = h.dim();
    if k == 0 || k > n {
        return Err(invalid("k", format!("must lie in 1..={n}, got {k}")));
    }
    let residual = crate::discretize::hermiticity_residual(h);
    let hermitian = residual <= HERMITIAN_TOLERANCE * h.max_abs().max(1.0);
    let s = symmetrized(h, hermitian);
    let blocks = fourier_blocks(h, &s).unwrap_or_else(|| vec![s]);
    let mut values: Vec<Complex64> = Vec::with_capacity(n);
    for b in &blocks {
        let m = (b.len() as f64).sqrt().round() as usize;
        if hermitian {
            let ev = eigen::hermitian_eigenvalues(m, b, h.label())?;
            values.extend(ev.into_iter().map(|x| Complex64::new(x, 0.0)));
        } else {
            values.extend(eigen::general_eigenvalues(m, b, h.label())?);
        }
    }
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    values.truncate(k);
    Ok(SpectrumReport {
        eigenvalues: values,
        hermitian,
        hermiticity_residual: residual,
        label: h.label().to_string(),
        parameters: BTreeMap::new(),
    })
}

/// Lowest `k` eigenpairs of a weighted-Hermitian operator. Vectors are
/// normalized in the weighted inner product of `h`.
pub fn eigenpairs(h: &OperatorMatrix, k: usize) -> Result<Vec<(f64, Vec<Complex64>)>> {
    let n = h.dim();
    if k == 0 || k > n {
        return Err(invalid("k", format!("must lie in 1..={n}, got {k}")));
    }
    let s = symmetrized(h, true);
    let (values, vectors) = eigen::hermitian_eigen(n, &s, h.label())?;
    let w = h.weights();
    Ok((0..k)
        .map(|c| {
            let v = (0..n)
                .map(|i| vectors[i * n + c] / w[i].sqrt())
                .collect();
            (values[c], v)
        })
        .collect())
}

/// `W^(1/2) H W^(-1/2)`, averaged with its adjoint when `hermitian`.
fn symmetrized(h: &OperatorMatrix, hermitian: bool) -> Vec<Complex64> {
    let n = h.dim();
    let sw: Vec<f64> = h.weights().iter().map(|w| w.sqrt()).collect();
    let mut s: Vec<Complex64> = h
        .entries()
        .iter()
        .enumerate()
        .map(|(idx, v)| v * (sw[idx / n] / sw[idx % n]))
        .collect();
    if hermitian {
        for i in 0..n {
            for j in 0..i {
                let avg = 0.5 * (s[i * n + j] + s[j * n + i].conj());
                s[i * n + j] = avg;
                s[j * n + i] = avg.conj();
            }
            s[i * n + i].im = 0.0;
        }
    }
    s
}

/// Block-diagonalizes a shift-invariant operator with a discrete Fourier
/// transform along the periodic axis. `None` when the operator carries no
/// grid layout or is not invariant.
fn fourier_blocks(h: &OperatorMatrix, s: &[Complex64]) -> Option<Vec<Vec<Complex64>>> {
    let lay = h.layout()?;
    let n = h.dim();
    let (np, no) = match lay.periodic {
        Axis::First => (lay.n1, lay.n2),
        Axis::Second => (lay.n2, lay.n1),
    };
    if np < 2 {
        return None;
    }
    let sp = lay.spin;
    let idx = |p: usize, o: usize, c: usize| {
        let node = match lay.periodic {
            Axis::First => p * lay.n2 + o,
            Axis::Second => o * lay.n2 + p,
        };
        node * sp + c
    };
    let cell = no * sp;
    let scale = s.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let tol = 1e-13 * scale.max(1.0);
    for p in 0..np {
        let p1 = (p + 1) % np;
        for a in 0..cell {
            for q in 0..np {
                let q1 = (q + 1) % np;
                for b in 0..cell {
                    let x = s[idx(p, a / sp, a % sp) * n + idx(q, b / sp, b % sp)];
                    let y = s[idx(p1, a / sp, a % sp) * n + idx(q1, b / sp, b % sp)];
                    if (x - y).norm() > tol {
                        return None;
                    }
                }
            }
        }
    }
    let twiddle: Vec<Complex64> = (0..np)
        .map(|d| Complex64::from_polar(1.0, 2.0 * PI * d as f64 / np as f64))
        .collect();
    Some(
        (0..np)
            .map(|q| {
                let mut b = vec![Complex64::new(0.0, 0.0); cell * cell];
                for a in 0..cell {
                    for d in 0..np {
                        let t = twiddle[(q * d) % np];
                        for c in 0..cell {
                            b[a * cell + c] += s[idx(0, a / sp, a % sp) * n + idx(d, c / sp, c % sp)] * t;
                        }
                    }
                }
                b
            })
            .collect(),
    )
}

/// `(H - adj(H)) / 2` in the weighted inner product.
pub fn antihermitian_part(h: &OperatorMatrix) -> OperatorMatrix {
    let adj = weighted_adjoint(h);
    h.sub(&adj)
        .expect("adjoint has the same dimension")
        .scale(Complex64::new(0.5, 0.0))
        .with_label(format!("antihermitian part of {}", h.label()))
}

/// `(H + adj(H)) / 2` in the weighted inner product.
pub fn hermitian_part(h: &OperatorMatrix) -> OperatorMatrix {
    let adj = weighted_adjoint(h);
    h.add(&adj)
        .expect("adjoint has the same dimension")
        .scale(Complex64::new(0.5, 0.0))
        .with_label(format!("hermitian part of {}", h.label()))
}

/// Phases of `U = diag(exp(i e lambda / hbar))` repeated over spin components.
pub fn gauge_phases(lambda: &GaugeFunction, constants: &PhysicalConstants, dim: usize) -> Result<Vec<f64>> {
    let base = lambda.phases(constants);
    if base.is_empty() || dim % base.len() != 0 {
        return Err(invalid("lambda", "does not match the operator dimension"));
    }
    let spin = dim / base.len();
    Ok(base.iter().flat_map(|&p| std::iter::repeat_n(p, spin)).collect())
}

/// `H(A)` and `H(A + grad lambda)` from a builder.
fn gauge_pair(
    field: &GaugeFieldSpec,
    lambda: &GaugeFunction,
    builder: &impl Fn(&GaugeFieldSpec) -> Result<OperatorMatrix>,
) -> Result<(OperatorMatrix, OperatorMatrix)> {
    Ok((builder(field)?, builder(&add_gauge(field, lambda))?))
}

/// `|| H(A + grad lambda) U psi - U H(A) psi ||` in the weighted norm.
pub fn gauge_covariance_residual(
    field: &GaugeFieldSpec,
    lambda: &GaugeFunction,
    constants: &PhysicalConstants,
    builder: impl Fn(&GaugeFieldSpec) -> Result<OperatorMatrix>,
    psi: &[Complex64],
) -> Result<f64> {
    let (h, hg) = gauge_pair(field, lambda, &builder)?;
    let phases = gauge_phases(lambda, constants, h.dim())?;
    let u: Vec<Complex64> = phases.iter().map(|&p| Complex64::from_polar(1.0, p)).collect();
    let u_psi: Vec<Complex64> = psi.iter().zip(&u).map(|(a, b)| a * b).collect();
    let lhs = hg.apply(&u_psi)?;
    let rhs: Vec<Complex64> = h.apply(psi)?.iter().zip(&u).map(|(a, b)| a * b).collect();
    let diff: Vec<Complex64> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
    h.norm(&diff)
}

/// `max |H(A + grad lambda) - U H(A) U^dagger|` over entries.
pub fn gauge_operator_residual(
    field: &GaugeFieldSpec,
    lambda: &GaugeFunction,
    constants: &PhysicalConstants,
    builder: impl Fn(&GaugeFieldSpec) -> Result<OperatorMatrix>,
) -> Result<f64> {
    let (h, hg) = gauge_pair(field, lambda, &builder)?;
    let phases = gauge_phases(lambda, constants, h.dim())?;
    Ok(hg.sub(&h.conjugate_by_phases(&phases)?)?.max_abs())
}

/// Largest difference between the `k` lowest eigenvalues before and after
/// the gauge transformation.
pub fn spectrum_gauge_invariance(
    field: &GaugeFieldSpec,
    lambda: &GaugeFunction,
    builder: impl Fn(&GaugeFieldSpec) -> Result<OperatorMatrix>,
    k: usize,
) -> Result<f64> {
    let (h, hg) = gauge_pair(field, lambda, &builder)?;
    let a = spectrum(&h, k)?;
    let b = spectrum(&hg, k)?;
    Ok(a.eigenvalues
        .iter()
        .zip(&b.eigenvalues)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max))
}

/// `(hbar^2/2mR^2)(l - flux/flux_quantum)^2 - hbar^2/8mR^2` for each `l`,
/// sorted ascending.
pub fn analytic_ring_spectrum(
    radius: f64,
    flux: f64,
    ells: impl IntoIterator<Item = i64>,
    constants: &PhysicalConstants,
) -> Result<Vec<(i64, f64)>> {
    let phi0 = constants.flux_quantum()?;
    let s = constants.kinetic_scale() / (radius * radius);
    let mut out: Vec<(i64, f64)> = ells
        .into_iter()
        .map(|l| {
            let q = l as f64 - flux / phi0;
            (l, s * q * q - 0.25 * s)
        })
        .collect();
    out.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    Ok(out)
}

/// Exact eigenvalue of the ring Hamiltonian on `n` nodes for angular
/// momentum `l`: the stencil's symbol at the shifted wavenumber.
pub fn discrete_ring_energy(
    radius: f64,
    flux: f64,
    l: i64,
    n: usize,
    order: StencilOrder,
    constants: &PhysicalConstants,
) -> Result<f64> {
    let phi0 = constants.flux_quantum()?;
    let h = 2.0 * PI / n as f64;
    let a = 0.5 * (l as f64 - flux / phi0) * h;
    let g = match order {
        StencilOrder::Second => 2.0 * a.sin() / h,
        StencilOrder::Fourth => (27.0 * a.sin() - (3.0 * a).sin()) / (12.0 * h),
    };
    let s = constants.kinetic_scale() / (radius * radius);
    Ok(s * g * g - 0.25 * s)
}

/// `hbar^2 k_z^2/2m + (hbar l/R - eBR/2)^2/2m - hbar^2/8mR^2`.
pub fn analytic_cylinder_landau(
    radius: f64,
    b: f64,
    l: i64,
    kz: f64,
    constants: &PhysicalConstants,
) -> f64 {
    let (hbar, m, e) = (constants.hbar, constants.mass, constants.charge);
    let p = hbar * l as f64 / radius - 0.5 * e * b * radius;
    hbar * hbar * kz * kz / (2.0 * m) + p * p / (2.0 * m) - hbar * hbar / (8.0 * m * radius * radius)
}

/// Groups ascending values whose neighbours lie within `tol`, returning
/// `(mean, multiplicity)` pairs.
pub fn clusters(values: &[f64], tol: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    let mut sum = 0.0;
    for &v in values {
        if v - last > tol {
            if let Some(c) = out.last_mut() {
                c.0 = sum / c.1 as f64;
            }
            out.push((v, 0));
            sum = 0.0;
        }
        let c = out.last_mut().expect("pushed above");
        c.1 += 1;
        sum += v;
        last = v;
    }
    if let Some(c) = out.last_mut() {
        c.0 = sum / c.1 as f64;
    }
    out
}

/// `log2(e_coarse / e_fine)` for errors at spacings `h` and `h/2`.
pub fn observed_order(err_coarse: f64, err_fine: f64) -> f64 {
    (err_coarse.abs() / err_fine.abs()).log2()
}
