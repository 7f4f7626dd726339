//! Two-variable autoregressive filters: given autocorrelations on
//! `[-n, n] x [-m, m]`, decide whether `sum a_v X_{u-v} = E_u` has a causal
//! or acausal (in z) solution driven by unit-variance white noise.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::MomentTable;
use crate::poly::BiPoly;
use crate::reconstruct::reconstruct_p;
use crate::space::MomentSpace;
use crate::splitshift::{build_operators, check_matrix_condition, StratificationReport};

#[derive(Clone, Debug)]
pub struct ArProblem {
    pub n: usize,
    pub m: usize,
    /// `c_{k,l} = E(X_0 X_{(k,l)}^*)`.
    pub autocorr: MomentTable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Causal,
    Acausal,
    None,
}

#[derive(Clone, Debug)]
pub struct ArSolution {
    pub classification: Classification,
    /// Filter coefficients `a_v`, `v` in `[0, n] x [0, m]`; absent when no solution exists.
    pub a: Option<BiPoly>,
    pub report: StratificationReport,
    pub hermitian_defect: f64,
}

pub fn solve_ar(problem: &ArProblem, tol: f64) -> Result<ArSolution> {
    let (n, m) = (problem.n, problem.m);
    let table = &problem.autocorr;
    let c00 = table.get(0, 0)?;
    if !(c00.re > 0.0) {
        return Err(Error::NotPositive { min_eig: c00.re });
    }
    let hermitian_defect = table.truncated(n, m)?.hermitian_defect() / c00.re;
    if hermitian_defect > 1e-10 {
        return Err(Error::InvalidInput(format!("autocorrelations are not Hermitian symmetric (defect {hermitian_defect:.3e})")));
    }
    let space = MomentSpace::new(table, n, m)?;
    let report = check_matrix_condition(&build_operators(&space, n, m)?, tol);
    if !report.holds {
        return Ok(ArSolution { classification: Classification::None, a: None, report, hermitian_defect });
    }
    let a = reconstruct_p(table, n, m, tol)?;
    let classification = if report.a_norm < tol { Classification::Causal } else { Classification::Acausal };
    Ok(ArSolution { classification, a: Some(a), report, hermitian_defect })
}
