//! Dense eigensolver wrappers.

use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};

fn solver_error(label: &str, e: impl std::fmt::Debug) -> Error {
    Error::Solver {
        label: label.to_string(),
        reason: format!("{e:?}"),
    }
}

/// Ascending eigenvalues of the Hermitian matrix `a` (row-major, lower
/// triangle used). Real matrices take the real symmetric path.
pub(crate) fn hermitian_eigenvalues(n: usize, a: &[Complex64], label: &str) -> Result<Vec<f64>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if a.iter().all(|z| z.im == 0.0) {
        let m = Mat::<f64>::from_fn(n, n, |i, j| a[i * n + j].re);
        m.self_adjoint_eigenvalues(Side::Lower).map_err(|e| solver_error(label, e))
    } else {
        let m = Mat::<Complex64>::from_fn(n, n, |i, j| a[i * n + j]);
        m.self_adjoint_eigenvalues(Side::Lower).map_err(|e| solver_error(label, e))
    }
}

/// Eigenvalues and column eigenvectors (returned row-major `n x n`, column
/// `k` holding the `k`-th vector) of a Hermitian matrix.
pub(crate) fn hermitian_eigen(n: usize, a: &[Complex64], label: &str) -> Result<(Vec<f64>, Vec<Complex64>)> {
    let m = Mat::<Complex64>::from_fn(n, n, |i, j| a[i * n + j]);
    let evd = m.self_adjoint_eigen(Side::Lower).map_err(|e| solver_error(label, e))?;
    let s = evd.S();
    let u = evd.U();
    let values = (0..n).map(|k| s[k].re).collect();
    let mut vectors = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for k in 0..n {
            vectors[i * n + k] = u[(i, k)];
        }
    }
    Ok((values, vectors))
}

/// Eigenvalues of a general complex matrix, in solver order.
pub(crate) fn general_eigenvalues(n: usize, a: &[Complex64], label: &str) -> Result<Vec<Complex64>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let m = Mat::<Complex64>::from_fn(n, n, |i, j| a[i * n + j]);
    let ev = m.eigenvalues().map_err(|e| solver_error(label, e))?;
    if ev.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Solver {
            label: label.to_string(),
            reason: "non-finite eigenvalue".into(),
        });
    }
    Ok(ev)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two() {
        let i = Complex64::new(0.0, 1.0);
        let a = [Complex64::new(1.0, 0.0), -i, i, Complex64::new(1.0, 0.0)];
        let ev = hermitian_eigenvalues(2, &a, "t").unwrap();
        assert!((ev[0]).abs() < 1e-14 && (ev[1] - 2.0).abs() < 1e-14);
        let (vals, vecs) = hermitian_eigen(2, &a, "t").unwrap();
        assert!((vals[1] - 2.0).abs() < 1e-14);
        let v = [vecs[1], vecs[3]];
        let av0 = a[0] * v[0] + a[1] * v[1];
        assert!((av0 - v[0] * 2.0).norm() < 1e-13);
        let g = general_eigenvalues(2, &[Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, 0.0)], "t").unwrap();
        let mut im: Vec<f64> = g.iter().map(|z| z.im).collect();
        im.sort_by(f64::total_cmp);
        assert!((im[0] + 1.0).abs() < 1e-14 && (im[1] - 1.0).abs() < 1e-14);
    }
}
