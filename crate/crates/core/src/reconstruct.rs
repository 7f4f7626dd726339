//! Recovery of `p = q(z) g(z, w)` from a moment table, and factorization of
//! positive trigonometric polynomials as `|p|^2`.

use num_complex::Complex64 as C;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::moments::{moments_from_trig, MomentTable, QuadratureConfig, TrigPoly};
use crate::poly::{gcd_approx, unit, BiPoly, UniPoly};
use crate::space::{phi_sequence, MomentSpace};
use crate::splitshift::{build_operators, check_matrix_condition, StratificationReport, ROOT_MARGIN};

/// Default root-clustering tolerance for the gcd of the kernel rows.
pub const GCD_TOL: f64 = 1e-6;

/// Relative tolerance for `| |p|^2 - t |` when factoring trigonometric polynomials.
pub const FIT_REL: f64 = 1e-6;

/// Every intermediate quantity of the reconstruction.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    /// Unit norm, canonical phase, declared degree `(n, m)`.
    pub p: BiPoly,
    pub q: UniPoly,
    pub g: BiPoly,
    /// The kernel polynomial `sum_j phi_j(z, w) z^n conj(phi_j)(1/z, 0)`.
    pub kernel: BiPoly,
    pub gcd: UniPoly,
    pub gcd_residual: f64,
    pub n0: usize,
    /// Size of the Hermitian correction applied to the Toeplitz matrix.
    pub toeplitz_correction: f64,
    /// Condition number of the Toeplitz matrix.
    pub toeplitz_condition: f64,
    /// Smallest modulus of a zero of `q` (infinite when `q` is constant).
    pub q_min_root: f64,
    pub report: StratificationReport,
}

/// Reconstructs the unit-norm `p` of degree `(n, m)` whose Bernstein-Szegő measure has these moments.
pub fn reconstruct_p(table: &MomentTable, n: usize, m: usize, tol: f64) -> Result<BiPoly> {
    Ok(reconstruct_detailed(table, n, m, tol)?.p)
}

/// The polynomial `sum_j phi_j(z, w) z^n conj(phi_j)(1/z, 0)` of degree `(2n, m)`.
pub fn kernel_polynomial(space: &MomentSpace, n: usize, m: usize) -> Result<BiPoly> {
    let phi = phi_sequence(space, n, m)?;
    let mut k = BiPoly::zeros(2 * n, m);
    for f in &phi {
        let r: Vec<C> = (0..=n).map(|a| f[(n - a, 0)].conj()).collect();
        k = k.add(&f.mul_z(&UniPoly::new(r)));
    }
    k.with_degree(2 * n, m)
}

pub fn reconstruct_detailed(table: &MomentTable, n: usize, m: usize, tol: f64) -> Result<Reconstruction> {
    let space = MomentSpace::new(table, n, m)?;
    let ops = build_operators(&space, n, m)?;
    let report = check_matrix_condition(&ops, tol);
    if !report.holds {
        return Err(Error::MatrixConditionFails { max_violation: report.max_violation });
    }
    let mut kernel = kernel_polynomial(&space, n, m)?;
    // rows at noise level (window larger than the true w-degree) carry no zeros
    let kmax = kernel.max_abs();
    for k in 0..=m {
        if kernel.w_row(k).max_abs() <= 1e-9 * kmax {
            for j in 0..=2 * n {
                kernel[(j, k)] = C::new(0.0, 0.0);
            }
        }
    }
    let rows: Vec<UniPoly> = (0..=m).map(|k| kernel.w_row(k)).filter(|r| !r.is_zero()).collect();

    let mut attempt = None;
    let mut best_residual = f64::INFINITY;
    for gtol in [GCD_TOL, 10.0 * GCD_TOL] {
        let q = gcd_approx(&rows, gtol)?;
        if q.degree() > 2 * n {
            continue;
        }
        let (g, res) = kernel.div_z(&q)?;
        best_residual = best_residual.min(res);
        if res <= gtol {
            attempt = Some((q, g, res));
            break;
        }
    }
    let (gcd, g, gcd_residual) = attempt.ok_or(Error::GcdUnstable { residual: best_residual })?;
    let g = g.trimmed(1e-9);
    let gz = g.deg().0;
    if gz > n {
        return Err(Error::GcdUnstable { residual: gcd_residual });
    }
    let g = g.with_degree(gz, m)?;
    let n0 = n - gz;

    // c'_j = T(z^{-j} g conj(g)(1/z, 1/w))
    let cprime = |j: i64| -> Result<C> {
        let mut acc = C::new(0.0, 0.0);
        for s1 in 0..=gz {
            for s2 in 0..=m {
                let gs = g[(s1, s2)];
                if gs == C::new(0.0, 0.0) {
                    continue;
                }
                for t1 in 0..=gz {
                    for t2 in 0..=m {
                        let u1 = t1 as i64 - s1 as i64 + j;
                        let u2 = t2 as i64 - s2 as i64;
                        acc += gs * g[(t1, t2)].conj() * table.get(u1, u2)?;
                    }
                }
            }
        }
        Ok(acc)
    };
    let mut toe = CMat::zeros(n0 + 1, n0 + 1);
    for a in 0..=n0 {
        for b in 0..=n0 {
            toe[(a, b)] = cprime(b as i64 - a as i64)?;
        }
    }
    let herm = linalg::hermitize(&toe);
    let toeplitz_correction = (&toe - &herm).norm();
    let ev = linalg::hermitian_eigenvalues(&herm);
    if !(ev[0] > 0.0) {
        return Err(Error::DegenerateForm("Toeplitz matrix of the z-factor is not positive definite".into()));
    }
    let toeplitz_condition = ev[n0] / ev[0];
    let mut e0 = CMat::zeros(n0 + 1, 1);
    e0[(0, 0)] = C::new(1.0, 0.0);
    // row 0 of the inverse solves conj(M) x = e0
    let x = linalg::hpd_solve(&herm.map(|c| c.conj()), &e0)?;
    let x00 = x[(0, 0)].re;
    let q = UniPoly::new((0..=n0).map(|j| x[(j, 0)] / x00.sqrt()).collect());
    let q_min_root = q
        .roots()?
        .iter()
        .map(|r| r.norm())
        .fold(f64::INFINITY, f64::min);
    if q_min_root <= 1.0 + ROOT_MARGIN {
        return Err(Error::DegenerateForm(format!("reconstructed z-factor has a zero of modulus {q_min_root:.6}")));
    }
    let p = g.mul_z(&q).with_degree(n, m)?.canonical_phase();
    Ok(Reconstruction {
        p,
        q,
        g,
        kernel,
        gcd,
        gcd_residual,
        n0,
        toeplitz_correction,
        toeplitz_condition,
        q_min_root,
        report,
    })
}

/// Factors a positive trigonometric polynomial of degree `(n, m)` as `|p|^2`
/// with `p` free of zeros on `T x closed disk`, or reports that no such `p` exists.
pub fn factor_trig(t: &TrigPoly, cfg: &QuadratureConfig, tol: f64) -> Result<BiPoly> {
    let (n, m) = t.deg();
    let table = moments_from_trig(t, n, m, cfg)?;
    let space = MomentSpace::new(&table, n, m)?;
    let report = check_matrix_condition(&build_operators(&space, n, m)?, tol);
    if !report.holds {
        return Err(Error::NotFactorable { max_violation: report.max_violation });
    }
    let p = reconstruct_p(&table, n, m, tol)?;
    let grid = 64;
    let mut worst: f64 = 0.0;
    let mut tmax: f64 = 0.0;
    for s in 0..grid {
        let z = unit(s, grid);
        for u in 0..grid {
            let w = unit(u, grid);
            let tv = t.eval(z, w);
            tmax = tmax.max(tv.abs());
            worst = worst.max((p.eval(z, w).norm_sqr() - tv).abs());
        }
    }
    if worst > FIT_REL * tmax {
        return Err(Error::FactorResidual { residual: worst / tmax });
    }
    Ok(p)
}
