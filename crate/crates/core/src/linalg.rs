//! Small dense linear-algebra helpers over complex matrices.

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64 as C;

use crate::error::{Error, Result};

pub type CMat = DMatrix<C>;
pub type CVec = DVector<C>;

/// Minimum-norm least-squares solution via SVD.
pub fn lstsq(a: &CMat, b: &CVec) -> Result<CVec> {
    if a.ncols() == 0 {
        return Ok(CVec::zeros(0));
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let eps = smax * 1e-14 * (a.nrows().max(a.ncols()) as f64);
    svd.solve(b, eps)
        .map_err(|e| Error::DegenerateForm(format!("least-squares solve failed: {e}")))
}

/// Eigenvalues of a general complex matrix from its Schur form.
pub fn eigenvalues(a: &CMat) -> Result<Vec<C>> {
    let n = a.nrows();
    if n == 0 {
        return Ok(vec![]);
    }
    if n == 1 {
        return Ok(vec![a[(0, 0)]]);
    }
    let schur = Schur::try_new(a.clone(), 1e-15, 100_000)
        .ok_or(Error::NoConvergence { best_residual: f64::NAN })?;
    let (_, t) = schur.unpack();
    let scale = t.iter().map(|c| c.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)].norm() > 1e-14 * scale {
            let (a11, a12, a21, a22) = (t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
            let tr = a11 + a22;
            let det = a11 * a22 - a12 * a21;
            let disc = (tr * tr / 4.0 - det).sqrt();
            out.push(tr / 2.0 + disc);
            out.push(tr / 2.0 - disc);
            i += 2;
        } else {
            out.push(t[(i, i)]);
            i += 1;
        }
    }
    Ok(out)
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(a: &CMat) -> Vec<f64> {
    if a.nrows() == 0 {
        return vec![];
    }
    let h = hermitize(a);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().cloned().collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}

/// `(a + a^H) / 2`.
pub fn hermitize(a: &CMat) -> CMat {
    (a + a.adjoint()) * C::new(0.5, 0.0)
}

/// Lower Cholesky factor of a Hermitian positive definite matrix.
pub fn cholesky(a: &CMat) -> Result<CMat> {
    if a.nrows() == 0 {
        return Ok(CMat::zeros(0, 0));
    }
    nalgebra::Cholesky::new(hermitize(a))
        .map(|c| c.l())
        .ok_or_else(|| Error::DegenerateForm("Cholesky factorization failed".into()))
}

/// Solves `a x = b` for Hermitian positive definite `a`, with one step of iterative refinement.
pub fn hpd_solve(a: &CMat, b: &CMat) -> Result<CMat> {
    if a.nrows() == 0 {
        return Ok(CMat::zeros(0, b.ncols()));
    }
    let ch = nalgebra::Cholesky::new(hermitize(a))
        .ok_or_else(|| Error::DegenerateForm("Cholesky factorization failed".into()))?;
    let mut x = ch.solve(b);
    let r = b - a * &x;
    x += ch.solve(&r);
    Ok(x)
}

/// Largest singular value.
pub fn norm2(a: &CMat) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0.0;
    }
    a.clone().svd(false, false).singular_values.iter().cloned().fold(0.0, f64::max)
}

/// Orthonormal basis (columns) of the column space, discarding singular values `<= thr`.
pub fn range_basis(a: &CMat, thr: f64) -> CMat {
    if a.ncols() == 0 || a.nrows() == 0 {
        return CMat::zeros(a.nrows(), 0);
    }
    let svd = a.clone().svd(true, false);
    let u = svd.u.unwrap();
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > thr)
        .collect();
    let mut out = CMat::zeros(a.nrows(), keep.len());
    for (c, &i) in keep.iter().enumerate() {
        out.set_column(c, &u.column(i));
    }
    out
}

/// Unitary polar factor `W V^H` of `a = W S V^H`.
pub fn polar_unitary(a: &CMat) -> CMat {
    let svd = a.clone().svd(true, true);
    svd.u.unwrap() * svd.v_t.unwrap()
}

/// Largest sine of the principal angles between the column spaces of two
/// matrices with orthonormal columns, measured from `a` into `b`.
pub fn max_angle_sine(a: &CMat, b: &CMat) -> f64 {
    if a.ncols() == 0 {
        return 0.0;
    }
    let resid = a - b * (b.adjoint() * a);
    norm2(&resid)
}

/// Horizontal concatenation of matrices with equal row counts.
pub fn hcat(blocks: &[&CMat]) -> CMat {
    let rows = blocks.first().map(|b| b.nrows()).unwrap_or(0);
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMat::zeros(rows, cols);
    let mut c0 = 0;
    for b in blocks {
        out.view_mut((0, c0), (rows, b.ncols())).copy_from(b);
        c0 += b.ncols();
    }
    out
}
