//! Truncated shift operators, the matrix condition, shift-splits and the
//! stratification of split-polys by the number of zeros of `p(z, 0)` in the disk.

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::poly::{count_inside, split_stable, BiPoly, UniPoly};
use crate::space::{basis, cross_gram, projected_span, subspace_gap, MomentSpace, SpaceSpec, SubspaceBasis};

/// Margin used when classifying zeros of `p(z, 0)` against the unit circle.
pub const ROOT_MARGIN: f64 = 1e-6;

/// Matrices of `A = P_{wE2} M_z`, `B = P_{E1}` (on `wF2`) and `T = P_{E1} M_z`,
/// expressed in orthonormal bases of `E1_{n-1,m}`, `w E2_{n,m-1}` and `w F2_{n,m-1}`.
#[derive(Clone, Debug)]
pub struct ShiftOperators {
    pub n: usize,
    pub m: usize,
    /// `m x n`
    pub a: CMat,
    /// `n x m`
    pub b: CMat,
    /// `n x n`
    pub t: CMat,
    pub e1: SubspaceBasis,
    pub we2: SubspaceBasis,
    pub wf2: SubspaceBasis,
}

/// Outcome of the matrix-condition test.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StratificationReport {
    pub holds: bool,
    pub max_violation: f64,
    #[serde(rename = "dimA")]
    pub dim_a: usize,
    #[serde(rename = "dimB")]
    pub dim_b: usize,
    /// Admissible values of `d`; both `None` unless the condition holds.
    pub d_min: Option<usize>,
    pub d_max: Option<usize>,
    /// Norm of `A`; zero exactly in the stable case.
    pub a_norm: f64,
    #[serde(skip)]
    pub a_space: Option<CMat>,
    #[serde(skip)]
    pub b_space: Option<CMat>,
}

impl StratificationReport {
    pub fn admissible(&self) -> Option<(usize, usize)> {
        match (self.d_min, self.d_max) {
            (Some(a), Some(b)) => Some((a, b)),
            _ => None,
        }
    }
}

/// A shift-split `(K1, K2)` of `E1_{n-1,m}` and its split-poly.
#[derive(Clone, Debug)]
pub struct ShiftSplit {
    pub k1: SubspaceBasis,
    pub k2: SubspaceBasis,
    /// Unit norm, canonical phase.
    pub split_poly: BiPoly,
}

/// Defects of the shift-split invariants, all of which vanish for an exact split.
#[derive(Clone, Debug, Default)]
pub struct SplitDefects {
    pub k1_perp_zk2: f64,
    pub sum_is_e1: f64,
    pub k1_in_e1nm: f64,
    pub zk2_in_e1nm: f64,
    pub poly_complement: f64,
    pub dim_sum: usize,
}

impl SplitDefects {
    pub fn max(&self) -> f64 {
        [self.k1_perp_zk2, self.sum_is_e1, self.k1_in_e1nm, self.zk2_in_e1nm, self.poly_complement]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Builds `A`, `B`, `T` for the degree pair `(n, m)`.
pub fn build_operators(space: &MomentSpace, n: usize, m: usize) -> Result<ShiftOperators> {
    let (cn, cm) = space.caps();
    if n > cn || m > cm {
        return Err(Error::InsufficientMoments { j: n as i64, k: m as i64, jmax: cn, kmax: cm });
    }
    let e1 = if n > 0 { basis(space, &SpaceSpec::E1 { k: n - 1, l: m })? } else { SubspaceBasis::empty(0, m) };
    let (we2, wf2) = if m > 0 {
        (
            basis(space, &SpaceSpec::E2 { k: n, l: m - 1 })?.shifted(0, 1),
            basis(space, &SpaceSpec::F2 { k: n, l: m - 1 })?.shifted(0, 1),
        )
    } else {
        (SubspaceBasis::empty(n, 0), SubspaceBasis::empty(n, 0))
    };
    let ze1 = e1.shifted(1, 0);
    let a = cross_gram(space, &ze1, &we2);
    let b = cross_gram(space, &wf2, &e1);
    let t = cross_gram(space, &ze1, &e1);
    Ok(ShiftOperators { n, m, a, b, t, e1, we2, wf2 })
}

/// Evaluates `||A T^j B||` for `j < n` and the canonical spaces
/// `B = span{T^j B}` and `A = span{(T^*)^j A^*}`.
pub fn check_matrix_condition(ops: &ShiftOperators, tol: f64) -> StratificationReport {
    let n = ops.n;
    let mut max_violation: f64 = 0.0;
    if n > 0 && ops.m > 0 {
        let mut tb = ops.b.clone();
        for _ in 0..n {
            max_violation = max_violation.max(linalg::norm2(&(&ops.a * &tb)));
            tb = &ops.t * tb;
        }
    }
    let b_space = krylov(&ops.t, &ops.b, tol);
    let a_space = krylov(&ops.t.adjoint(), &ops.a.adjoint(), tol);
    let (dim_a, dim_b) = (a_space.ncols(), b_space.ncols());
    let holds = max_violation < tol;
    let (d_min, d_max) = if holds && dim_a + dim_b <= n { (Some(dim_a), Some(n - dim_b)) } else { (None, None) };
    StratificationReport {
        holds,
        max_violation,
        dim_a,
        dim_b,
        d_min,
        d_max,
        a_norm: linalg::norm2(&ops.a),
        a_space: Some(a_space),
        b_space: Some(b_space),
    }
}

/// Orthonormal basis of `span{M^j X : j >= 0}`, accumulated until the rank stagnates.
fn krylov(m: &CMat, x: &CMat, thr: f64) -> CMat {
    let n = m.nrows();
    if n == 0 || x.ncols() == 0 {
        return CMat::zeros(n, 0);
    }
    let mut q = linalg::range_basis(x, thr);
    let mut fresh = q.clone();
    for _ in 0..n {
        if fresh.ncols() == 0 || q.ncols() == n {
            break;
        }
        let w = m * &fresh;
        let resid = &w - &q * (q.adjoint() * &w);
        fresh = linalg::range_basis(&resid, thr);
        q = linalg::hcat(&[&q, &fresh]);
    }
    q
}

/// Splits `p(z, 0) = a b` (a stable, b with zeros in the disk) and returns
/// `K1 = P span{z^j a : j < deg b}`, `K2 = P span{z^j b : j < n - deg b}`
/// with `P` the projection onto `E1_{n-1,m}`, together with the split-poly.
pub fn shift_split_from_p(space: &MomentSpace, p: &BiPoly) -> Result<ShiftSplit> {
    let (n, m) = p.deg();
    let rs = split_stable(&p.at_w0(), ROOT_MARGIN)?;
    let beta = rs.beta;
    let e1 = if n > 0 { basis(space, &SpaceSpec::E1 { k: n - 1, l: m })? } else { SubspaceBasis::empty(0, m) };
    let gens = |u: &UniPoly, count: usize| -> Vec<BiPoly> {
        (0..count).map(|j| BiPoly::from_uni_z(u).shift(j, 0)).collect()
    };
    let (k1, k2) = if n > 0 {
        (
            projected_span(space, &gens(&rs.stable, beta), &e1)?,
            projected_span(space, &gens(&rs.unstable, n.saturating_sub(beta)), &e1)?,
        )
    } else {
        (SubspaceBasis::empty(0, m), SubspaceBasis::empty(0, m))
    };
    if k1.dim() + k2.dim() != n {
        return Err(Error::DegenerateForm(format!(
            "shift-split dimensions {} + {} do not add up to {n}",
            k1.dim(),
            k2.dim()
        )));
    }
    let split_poly = complement_poly(space, n, m, &k1, &k2)?;
    Ok(ShiftSplit { k1, k2, split_poly })
}

/// Unit vector spanning `E1_{n,m} ⊖ (K1 ⊕ z K2)`.
fn complement_poly(space: &MomentSpace, n: usize, m: usize, k1: &SubspaceBasis, k2: &SubspaceBasis) -> Result<BiPoly> {
    let e = basis(space, &SpaceSpec::E1 { k: n, l: m })?;
    let parts: Vec<BiPoly> = k1.polys().into_iter().chain(k2.polys().into_iter().map(|p| p.shift(1, 0))).collect();
    let sub = SubspaceBasis::from_polys(n, m, &parts)?;
    let coords = cross_gram(space, &sub, &e);
    let q = linalg::range_basis(&coords, 1e-8 * linalg::norm2(&coords).max(1.0));
    let proj = CMat::identity(n + 1, n + 1) - &q * q.adjoint();
    let best = (0..=n)
        .max_by(|&i, &j| proj.column(i).norm().partial_cmp(&proj.column(j).norm()).unwrap())
        .unwrap();
    let v = proj.column(best) / C::new(proj.column(best).norm(), 0.0);
    let mut poly = BiPoly::zeros(n, m);
    for (i, b) in e.polys().iter().enumerate() {
        poly = poly.add(&b.scale(v[i]));
    }
    let norm = space.norm(&poly)?;
    Ok(poly.scale(C::new(1.0 / norm, 0.0)).canonical_phase())
}

/// Measures every shift-split invariant for the degree pair `(n, m)`.
pub fn split_defects(space: &MomentSpace, split: &ShiftSplit, n: usize, m: usize) -> Result<SplitDefects> {
    let e1nm = basis(space, &SpaceSpec::E1 { k: n, l: m })?;
    let zk2 = split.k2.shifted(1, 0);
    let k1_perp_zk2 = linalg::norm2(&cross_gram(space, &split.k1, &zk2));
    let sum_is_e1 = if n > 0 {
        let e1 = basis(space, &SpaceSpec::E1 { k: n - 1, l: m })?;
        let union = SubspaceBasis::from_polys(n - 1, m, &[split.k1.polys(), split.k2.polys()].concat())?;
        subspace_gap(space, &e1, &union).max(subspace_gap(space, &union, &e1))
    } else {
        0.0
    };
    let lift = |b: &SubspaceBasis| SubspaceBasis::from_polys(n, m, &b.polys());
    let k1_in = if split.k1.dim() > 0 { subspace_gap(space, &lift(&split.k1)?, &e1nm) } else { 0.0 };
    let zk2_in = if zk2.dim() > 0 { subspace_gap(space, &lift(&zk2)?, &e1nm) } else { 0.0 };
    let sp = SubspaceBasis::from_polys(n, m, &[split.split_poly.clone()])?;
    let mut poly_complement = subspace_gap(space, &sp, &e1nm);
    for b in [lift(&split.k1)?, lift(&zk2)?] {
        if b.dim() > 0 {
            poly_complement = poly_complement.max(linalg::norm2(&cross_gram(space, &sp, &b)));
        }
    }
    Ok(SplitDefects {
        k1_perp_zk2,
        sum_is_e1,
        k1_in_e1nm: k1_in,
        zk2_in_e1nm: zk2_in,
        poly_complement,
        dim_sum: split.k1.dim() + split.k2.dim(),
    })
}

/// A split-poly together with its stratum `d`.
#[derive(Clone, Debug)]
pub struct StratifiedPoly {
    pub poly: BiPoly,
    pub d: usize,
}

/// Constructs the shift-split with `dim K1 = d` from moments satisfying the matrix condition.
pub fn split_poly_from_condition(space: &MomentSpace, n: usize, m: usize, d: usize, tol: f64) -> Result<ShiftSplit> {
    let ops = build_operators(space, n, m)?;
    let report = check_matrix_condition(&ops, tol);
    if !report.holds {
        return Err(Error::MatrixConditionFails { max_violation: report.max_violation });
    }
    let (lo, hi) = report.admissible().ok_or(Error::MatrixConditionFails { max_violation: report.max_violation })?;
    if d < lo || d > hi {
        return Err(Error::DNotAdmissible { d, lo, hi });
    }
    let table = space.table().truncated(n, m)?;
    let rec = crate::reconstruct::reconstruct_detailed(&table, n, m, tol)?;
    let family = enumerate_split_polys(&rec.p, crate::reconstruct::GCD_TOL)?;
    let chosen = family
        .into_iter()
        .find(|s| s.d == d)
        .ok_or(Error::DNotAdmissible { d, lo, hi })?;
    let sub = MomentSpace::new(&table, n, m)?;
    shift_split_from_p(&sub, &chosen.poly)
}

/// Every split-poly with the same modulus as `p` on the torus, obtained by
/// reflecting subsets of the zeros of the z-only factor of `p` (zeros at
/// infinity included when `deg_z p` is below the declared degree). Ordered by
/// `d`; within a stratum, smaller-modulus zeros are flipped first.
pub fn enumerate_split_polys(p: &BiPoly, tol: f64) -> Result<Vec<StratifiedPoly>> {
    let (n, m) = p.deg();
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let q = p.z_only_factor(tol)?;
    let (g, _) = p.trimmed(0.0).with_degree(n, m)?.div_z(&q)?;
    let g = g.trimmed(1e-12);
    let mut roots = q.roots()?;
    for r in &roots {
        if (r.norm() - 1.0).abs() <= ROOT_MARGIN {
            return Err(Error::RootNearTorus { re: r.re, im: r.im });
        }
    }
    roots.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap());
    let deficit = n - (g.deg().0 + roots.len());
    let d_g = count_inside(&g.at_w0())?;
    let items = roots.len() + deficit;
    let mut out: Vec<(StratifiedPoly, Vec<usize>)> = Vec::new();
    for mask in 0u64..(1u64 << items) {
        let mut factor = UniPoly::one();
        let mut d = d_g;
        let mut flipped = Vec::new();
        for (i, &r) in roots.iter().enumerate() {
            if mask & (1 << i) != 0 {
                factor = factor.mul(&UniPoly::new(vec![C::new(1.0, 0.0), -r.conj()]));
                if r.norm() > 1.0 {
                    d += 1;
                }
                flipped.push(i);
            } else {
                factor = factor.mul(&UniPoly::new(vec![-r, C::new(1.0, 0.0)]));
                if r.norm() < 1.0 {
                    d += 1;
                }
            }
        }
        for i in 0..deficit {
            if mask & (1 << (roots.len() + i)) != 0 {
                factor = factor.mul(&UniPoly::new(vec![C::new(0.0, 0.0), C::new(1.0, 0.0)]));
                d += 1;
                flipped.push(roots.len() + i);
            }
        }
        let poly = g.mul_z(&factor).with_degree(n, m)?;
        let scale = poly.max_abs();
        if out.iter().any(|(s, _)| s.poly.sub(&poly).max_abs() <= 1e-8 * scale) {
            continue;
        }
        out.push((StratifiedPoly { poly, d }, flipped));
    }
    out.sort_by(|(a, fa), (b, fb)| a.d.cmp(&b.d).then(fa.cmp(fb)));
    Ok(out.into_iter().map(|(s, _)| s).collect())
}

/// Result of the stable-case test `F1_{n-1,m} ⊥ F2_{n,m-1}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GwReport {
    pub holds: bool,
    pub cross_norm: f64,
}

/// True iff the form comes from a polynomial with no zeros on the closed bidisk.
pub fn gw_check(space: &MomentSpace, n: usize, m: usize, tol: f64) -> Result<GwReport> {
    if n == 0 || m == 0 {
        return Ok(GwReport { holds: true, cross_norm: 0.0 });
    }
    let f1 = basis(space, &SpaceSpec::F1 { k: n - 1, l: m })?;
    let f2 = basis(space, &SpaceSpec::F2 { k: n, l: m - 1 })?;
    let cross_norm = linalg::norm2(&cross_gram(space, &f1, &f2));
    Ok(GwReport { holds: cross_norm < tol, cross_norm })
}

/// `z E1_{n-1,m} ⊂ E1_{n,m}`, measured as the largest principal-angle sine.
pub fn gw_containment_gap(space: &MomentSpace, n: usize, m: usize) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    let ze1 = basis(space, &SpaceSpec::E1 { k: n - 1, l: m })?.shifted(1, 0);
    let e1 = basis(space, &SpaceSpec::E1 { k: n, l: m })?;
    Ok(subspace_gap(space, &ze1, &e1))
}
