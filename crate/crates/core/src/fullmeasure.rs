//! Moment-level test of whether a measure on the torus is `dσ / |p|^2` with
//! `p` of degree at most `(n, m)` and free of zeros on `T x closed disk`.
//!
//! The conditions involve every depth; the check here is truncated at a
//! user-chosen `(Nmax, Mmax)` and the verdict says so.

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::moments::{gram, moments_from_density, monomials, MomentTable, QuadratureConfig};
use crate::poly::BiPoly;
use crate::reconstruct::reconstruct_p;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// Largest normalized `|γ^{N+1,M}_{(0,j),(N+1,k)}|` for one `(N, M)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GammaCell {
    #[serde(rename = "N")]
    pub big_n: usize,
    #[serde(rename = "M")]
    pub big_m: usize,
    pub max: f64,
}

/// Largest normalized `|ξ^M_{(n,0),(j,M)}|` for one `M`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct XiCell {
    #[serde(rename = "M")]
    pub big_m: usize,
    pub max: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FullMeasureReport {
    pub n: usize,
    pub m: usize,
    /// Truncation depth `(Nmax, Mmax)`.
    pub depth: [usize; 2],
    pub positivity_ok: bool,
    /// Smallest `λ_min / λ_max` over the Gram matrices that were inverted.
    pub positivity_margin: f64,
    pub e2_conditions: Vec<GammaCell>,
    pub h_conditions: Vec<XiCell>,
    pub verdict: Verdict,
    pub summary: String,
}

struct Inverse {
    mons: Vec<(usize, usize)>,
    ratio: f64,
    gram: CMat,
}

impl Inverse {
    fn new(table: &MomentTable, n: usize, m: usize) -> Result<Self> {
        let mons = monomials(n, m);
        let gram = gram(table, &mons, &mons)?;
        let ev = linalg::hermitian_eigenvalues(&gram);
        let ratio = ev[0] / ev.last().unwrap();
        Ok(Inverse { mons, ratio, gram })
    }

    fn index(&self, u: (usize, usize)) -> usize {
        self.mons.iter().position(|&v| v == u).unwrap()
    }

    /// Columns of the inverse Gram at the given monomials.
    fn columns(&self, at: &[(usize, usize)]) -> Result<(Vec<usize>, CMat)> {
        let idx: Vec<usize> = at.iter().map(|&u| self.index(u)).collect();
        let mut e = CMat::zeros(self.mons.len(), idx.len());
        for (c, &i) in idx.iter().enumerate() {
            e[(i, c)] = C::new(1.0, 0.0);
        }
        Ok((idx, linalg::hpd_solve(&self.gram, &e)?))
    }

    /// Largest `|γ_uv| / sqrt(γ_uu γ_vv)` over `u` in `left`, `v` in `right`.
    fn max_normalized(&self, left: &[(usize, usize)], right: &[(usize, usize)]) -> Result<f64> {
        let mut all = left.to_vec();
        all.extend_from_slice(right);
        let (idx, cols) = self.columns(&all)?;
        let diag = |c: usize| cols[(idx[c], c)].re;
        let mut worst: f64 = 0.0;
        for a in 0..left.len() {
            for b in 0..right.len() {
                let cb = left.len() + b;
                let v = cols[(idx[a], cb)].norm() / (diag(a) * diag(cb)).sqrt();
                worst = worst.max(v);
            }
        }
        Ok(worst)
    }
}

/// Runs the truncated full-measure test.
pub fn check_full_measure(
    table: &MomentTable,
    n: usize,
    m: usize,
    nmax: usize,
    mmax: usize,
    tol: f64,
) -> Result<FullMeasureReport> {
    let need_j = (nmax + 1).max(2 * n);
    if table.jmax() < need_j || table.kmax() < mmax {
        return Err(Error::InsufficientMoments { j: need_j as i64, k: mmax as i64, jmax: table.jmax(), kmax: table.kmax() });
    }
    let mut margin = f64::INFINITY;
    let mut gammas = Vec::new();
    for big_n in n..=nmax {
        for big_m in m.saturating_sub(1)..=mmax {
            let inv = Inverse::new(table, big_n + 1, big_m)?;
            margin = margin.min(inv.ratio);
            if !(inv.ratio > 1e-14) {
                return Err(Error::DegenerateForm(format!("Gram on [0,{}]x[0,{big_m}] is singular", big_n + 1)));
            }
            let left: Vec<_> = (0..=big_m).map(|j| (0, j)).collect();
            let right: Vec<_> = (0..=big_m).map(|k| (big_n + 1, k)).collect();
            gammas.push(GammaCell { big_n, big_m, max: inv.max_normalized(&left, &right)? });
        }
    }
    let mut xis = Vec::new();
    for big_m in m + 1..=mmax {
        let inv = Inverse::new(table, 2 * n, big_m)?;
        margin = margin.min(inv.ratio);
        if !(inv.ratio > 1e-14) {
            return Err(Error::DegenerateForm(format!("Gram on [0,{}]x[0,{big_m}] is singular", 2 * n)));
        }
        let right: Vec<_> = (0..=2 * n).map(|j| (j, big_m)).collect();
        xis.push(XiCell { big_m, max: inv.max_normalized(&[(n, 0)], &right)? });
    }
    let positivity_ok = margin > 0.0;
    let tested = !gammas.is_empty() || !xis.is_empty();
    let ok = gammas.iter().all(|c| c.max < tol) && xis.iter().all(|c| c.max < tol);
    let verdict = if !positivity_ok || (tested && !ok) {
        Verdict::Fail
    } else if !tested {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    let summary = match verdict {
        Verdict::Pass => format!("pass up to depth ({nmax}, {mmax})"),
        Verdict::Fail => format!("fail within depth ({nmax}, {mmax})"),
        Verdict::Inconclusive => format!("nothing tested at depth ({nmax}, {mmax})"),
    };
    Ok(FullMeasureReport {
        n,
        m,
        depth: [nmax, mmax],
        positivity_ok,
        positivity_margin: margin,
        e2_conditions: gammas,
        h_conditions: xis,
        verdict,
        summary,
    })
}

#[derive(Clone, Debug)]
pub struct StripMatch {
    pub p: BiPoly,
    /// Largest `|c_jk - c'_jk| / c_00` over `|j| <= jmax`, `|k| <= m`.
    pub residual: f64,
}

/// Reconstructs `p` from the `(n, m)` window and compares the moments of
/// `1/|p|^2` with the table on the strip `|k| <= m`.
pub fn strip_match(table: &MomentTable, n: usize, m: usize, tol: f64, cfg: &QuadratureConfig) -> Result<StripMatch> {
    let p = reconstruct_p(table, n, m, tol)?;
    let jmax = table.jmax();
    let model = moments_from_density(&p, jmax, m, cfg)?;
    let c00 = table.get(0, 0)?.re;
    let mut residual: f64 = 0.0;
    for j in -(jmax as i64)..=jmax as i64 {
        for k in -(m as i64)..=m as i64 {
            residual = residual.max((table.get(j, k)? - model.at(j, k)).norm() / c00);
        }
    }
    if residual > tol.max(1e-7) {
        return Err(Error::StripMismatch { residual });
    }
    Ok(StripMatch { p, residual })
}
