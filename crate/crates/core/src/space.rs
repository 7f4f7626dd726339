//! The Hilbert space of polynomials of bounded degree with the inner product
//! `<f, g> = T(f conj(g)(1/z, 1/w))` induced by a moment table.

use num_complex::Complex64 as C;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};
use crate::moments::{gram, monomials, MomentTable};
use crate::poly::BiPoly;

/// Relative singular-value threshold for numerical rank decisions.
pub const RANK_REL: f64 = 1e-8;

/// Polynomials of degree at most `caps` with the moment inner product.
#[derive(Clone, Debug)]
pub struct MomentSpace {
    table: MomentTable,
    caps: (usize, usize),
    mons: Vec<(usize, usize)>,
    /// `ip[(a, b)] = c_{mon_a - mon_b}`, so that `<f, g> = g^H ip f`.
    ip: CMat,
    /// Lower Cholesky factor of `ip`.
    chol: CMat,
    min_eig: f64,
}

impl MomentSpace {
    /// Builds the space on `[0, n] x [0, m]`; the table must cover `[-n, n] x [-m, m]`.
    pub fn new(table: &MomentTable, n: usize, m: usize) -> Result<Self> {
        if n > table.jmax() || m > table.kmax() {
            return Err(Error::InsufficientMoments {
                j: n as i64,
                k: m as i64,
                jmax: table.jmax(),
                kmax: table.kmax(),
            });
        }
        let mons = monomials(n, m);
        let ip = gram(table, &mons, &mons)?.transpose();
        let ev = linalg::hermitian_eigenvalues(&ip);
        let min = ev[0];
        let max = *ev.last().unwrap();
        if !(max > 0.0) || min <= -1e-12 * max {
            return Err(Error::NotPositive { min_eig: min });
        }
        if min <= 1e-13 * max {
            return Err(Error::DegenerateForm(format!(
                "Gram matrix on degree ({n}, {m}) has condition number above 1e13 (smallest eigenvalue {min:.3e})"
            )));
        }
        let chol = linalg::cholesky(&ip)?;
        Ok(MomentSpace { table: table.clone(), caps: (n, m), mons, ip, chol, min_eig: min })
    }

    /// Space using the full range of the table.
    pub fn from_table(table: &MomentTable) -> Result<Self> {
        Self::new(table, table.jmax(), table.kmax())
    }

    pub fn caps(&self) -> (usize, usize) {
        self.caps
    }

    pub fn table(&self) -> &MomentTable {
        &self.table
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eig
    }

    pub fn dim(&self) -> usize {
        self.mons.len()
    }

    pub(crate) fn index(&self, j: usize, k: usize) -> usize {
        j * (self.caps.1 + 1) + k
    }

    fn check_fits(&self, n: usize, m: usize) -> Result<()> {
        if n > self.caps.0 || m > self.caps.1 {
            return Err(Error::InsufficientMoments {
                j: n as i64,
                k: m as i64,
                jmax: self.caps.0,
                kmax: self.caps.1,
            });
        }
        Ok(())
    }

    /// Coefficient vector of `f` in the monomial basis of the whole space.
    pub fn vector(&self, f: &BiPoly) -> Result<CVec> {
        let f = f.trimmed(0.0);
        let (n, m) = f.deg();
        if !f.is_zero() {
            self.check_fits(n, m)?;
        }
        let mut v = CVec::zeros(self.dim());
        for j in 0..=n {
            for k in 0..=m {
                if j <= self.caps.0 && k <= self.caps.1 {
                    v[self.index(j, k)] = f[(j, k)];
                }
            }
        }
        Ok(v)
    }

    /// Polynomial of declared degree `(n, m)` from a full coefficient vector.
    pub fn poly(&self, v: &CVec, n: usize, m: usize) -> BiPoly {
        let mut p = BiPoly::zeros(n, m);
        for j in 0..=n.min(self.caps.0) {
            for k in 0..=m.min(self.caps.1) {
                p[(j, k)] = v[self.index(j, k)];
            }
        }
        p
    }

    pub fn inner(&self, f: &BiPoly, g: &BiPoly) -> Result<C> {
        Ok(self.inner_vec(&self.vector(f)?, &self.vector(g)?))
    }

    pub fn norm(&self, f: &BiPoly) -> Result<f64> {
        Ok(self.inner(f, f)?.re.max(0.0).sqrt())
    }

    pub(crate) fn inner_vec(&self, f: &CVec, g: &CVec) -> C {
        (g.adjoint() * &self.ip * f)[(0, 0)]
    }

    /// Matrix `G[(i, j)] = <cols_j, rows_i>` for full coefficient vectors.
    pub(crate) fn cross(&self, rows: &CMat, cols: &CMat) -> CMat {
        rows.adjoint() * &self.ip * cols
    }

    /// Euclidean coordinates `L^H v` in which the inner product is the standard one.
    pub(crate) fn euclid(&self, v: &CMat) -> CMat {
        self.chol.adjoint() * v
    }

    pub(crate) fn full_matrix(&self, basis: &SubspaceBasis) -> CMat {
        let mut out = CMat::zeros(self.dim(), basis.dim());
        for (r, &(j, k)) in basis.support.iter().enumerate() {
            let i = self.index(j, k);
            for c in 0..basis.dim() {
                out[(i, c)] = basis.vectors[(r, c)];
            }
        }
        out
    }

    /// Restricts full coefficient vectors to the monomials of `[0, n] x [0, m]`.
    pub(crate) fn restrict(&self, full: &CMat, n: usize, m: usize) -> SubspaceBasis {
        let support = monomials(n, m);
        let mut vectors = CMat::zeros(support.len(), full.ncols());
        for (r, &(j, k)) in support.iter().enumerate() {
            let i = self.index(j, k);
            for c in 0..full.ncols() {
                vectors[(r, c)] = full[(i, c)];
            }
        }
        SubspaceBasis { deg: (n, m), support, vectors }
    }

    fn unit_vectors(&self, mons: &[(usize, usize)]) -> CMat {
        let mut out = CMat::zeros(self.dim(), mons.len());
        for (c, &(j, k)) in mons.iter().enumerate() {
            out[(self.index(j, k), c)] = C::new(1.0, 0.0);
        }
        out
    }

    /// `span(keep) ⊖ span(drop)` where both are monomial sets, orthonormalized in order of `keep`.
    fn complement(&self, deg: (usize, usize), keep: &[(usize, usize)], drop: &[(usize, usize)]) -> Result<SubspaceBasis> {
        self.check_fits(deg.0, deg.1)?;
        let ek = self.unit_vectors(keep);
        let v = if drop.is_empty() {
            ek
        } else {
            let ed = self.unit_vectors(drop);
            let g_dd = self.cross(&ed, &ed);
            let g_dk = self.cross(&ed, &ek);
            let coef = linalg::hpd_solve(&g_dd, &g_dk)?;
            &ek - &ed * coef
        };
        let full = self.orthonormalize_ordered(&v)?;
        Ok(self.restrict(&full, deg.0, deg.1).phase_normalized())
    }

    /// Gram-Schmidt (via QR in Euclidean coordinates) of linearly independent columns.
    fn orthonormalize_ordered(&self, v: &CMat) -> Result<CMat> {
        if v.ncols() == 0 {
            return Ok(v.clone());
        }
        let y = self.euclid(v);
        let r = y.qr().r();
        let rmax = (0..r.nrows()).map(|i| r[(i, i)].norm()).fold(0.0, f64::max);
        let rmin = (0..r.nrows()).map(|i| r[(i, i)].norm()).fold(f64::INFINITY, f64::min);
        if !(rmin > 1e-13 * rmax) {
            return Err(Error::DegenerateForm("subspace generators are numerically dependent".into()));
        }
        let rinv = r
            .solve_upper_triangular(&CMat::identity(r.nrows(), r.ncols()))
            .ok_or_else(|| Error::DegenerateForm("triangular solve failed".into()))?;
        Ok(v * rinv)
    }
}

/// Orthonormal basis of a polynomial subspace; column `i` holds the
/// coefficients of the `i`-th basis polynomial over `support`.
#[derive(Clone, Debug)]
pub struct SubspaceBasis {
    pub deg: (usize, usize),
    pub support: Vec<(usize, usize)>,
    pub vectors: CMat,
}

impl SubspaceBasis {
    pub fn empty(n: usize, m: usize) -> Self {
        let support = monomials(n, m);
        SubspaceBasis { deg: (n, m), vectors: CMat::zeros(support.len(), 0), support }
    }

    pub fn dim(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn poly(&self, i: usize) -> BiPoly {
        let mut p = BiPoly::zeros(self.deg.0, self.deg.1);
        for (r, &(j, k)) in self.support.iter().enumerate() {
            p[(j, k)] = self.vectors[(r, i)];
        }
        p
    }

    pub fn polys(&self) -> Vec<BiPoly> {
        (0..self.dim()).map(|i| self.poly(i)).collect()
    }

    /// Basis from explicit polynomials (assumed orthonormal by the caller).
    pub fn from_polys(n: usize, m: usize, polys: &[BiPoly]) -> Result<Self> {
        let support = monomials(n, m);
        let mut vectors = CMat::zeros(support.len(), polys.len());
        for (c, p) in polys.iter().enumerate() {
            let p = p.trimmed(0.0);
            let (pn, pm) = p.deg();
            if !p.is_zero() && (pn > n || pm > m) {
                return Err(Error::InvalidDegree(n, m));
            }
            for (r, &(j, k)) in support.iter().enumerate() {
                vectors[(r, c)] = p.get(j, k);
            }
        }
        Ok(SubspaceBasis { deg: (n, m), support, vectors })
    }

    /// Every basis polynomial multiplied by `z^a w^b`.
    pub fn shifted(&self, a: usize, b: usize) -> SubspaceBasis {
        let polys: Vec<BiPoly> = self.polys().iter().map(|p| p.shift(a, b)).collect();
        SubspaceBasis::from_polys(self.deg.0 + a, self.deg.1 + b, &polys).expect("shift preserves degree bound")
    }

    /// Every basis polynomial reflected at `(n, m)`.
    pub fn reflected(&self, n: usize, m: usize) -> Result<SubspaceBasis> {
        let polys = self.polys().iter().map(|p| p.reflect(n, m)).collect::<Result<Vec<_>>>()?;
        SubspaceBasis::from_polys(n, m, &polys)
    }

    /// Values of all basis polynomials at a point.
    pub fn eval(&self, z: C, w: C) -> CVec {
        let mons: Vec<C> = self.support.iter().map(|&(j, k)| z.powu(j as u32) * w.powu(k as u32)).collect();
        let mv = CVec::from_vec(mons);
        self.vectors.transpose() * mv
    }

    /// Each column rotated so its first significant coefficient is real positive.
    pub fn phase_normalized(mut self) -> Self {
        for c in 0..self.dim() {
            let col = self.vectors.column(c);
            let max = col.iter().map(|x| x.norm()).fold(0.0, f64::max);
            if let Some(lead) = col.iter().find(|x| x.norm() > 1e-9 * max) {
                let ph = lead.conj() / lead.norm();
                let scaled = col * ph;
                self.vectors.set_column(c, &scaled);
            }
        }
        self
    }
}

/// The structural subspaces of the moment space.
#[derive(Clone, Debug)]
pub enum SpaceSpec {
    /// `P_{k,l} ⊖ w P_{k,l-1}`
    E1 { k: usize, l: usize },
    /// `P_{k,l} ⊖ P_{k,l-1}`
    F1 { k: usize, l: usize },
    /// `P_{k,l} ⊖ z P_{k-1,l}`
    E2 { k: usize, l: usize },
    /// `P_{k,l} ⊖ P_{k-1,l}`
    F2 { k: usize, l: usize },
    /// `P_{2n,m} ⊖ span{z^j w^k : (j,k) != (n,0)}`
    H { n: usize, m: usize },
    /// Orthogonal projection of the generators onto the target space.
    ProjectedSpan { generators: Vec<BiPoly>, target: Box<SpaceSpec> },
}

/// Orthonormal basis of the subspace described by `spec`.
pub fn basis(space: &MomentSpace, spec: &SpaceSpec) -> Result<SubspaceBasis> {
    let split = |k: usize, l: usize, keep: &dyn Fn(usize, usize) -> bool| {
        let all = monomials(k, l);
        let (a, b): (Vec<_>, Vec<_>) = all.into_iter().partition(|&(j, t)| keep(j, t));
        space.complement((k, l), &a, &b)
    };
    match spec {
        SpaceSpec::E1 { k, l } => split(*k, *l, &|_, t| t == 0),
        SpaceSpec::F1 { k, l } => split(*k, *l, &|_, t| t == *l),
        SpaceSpec::E2 { k, l } => split(*k, *l, &|j, _| j == 0),
        SpaceSpec::F2 { k, l } => split(*k, *l, &|j, _| j == *k),
        SpaceSpec::H { n, m } => split(2 * n, *m, &|j, t| (j, t) == (*n, 0)),
        SpaceSpec::ProjectedSpan { generators, target } => {
            let tb = basis(space, target)?;
            projected_span(space, generators, &tb)
        }
    }
}

/// Orthonormal basis of `P_target span(generators)`.
pub fn projected_span(space: &MomentSpace, generators: &[BiPoly], target: &SubspaceBasis) -> Result<SubspaceBasis> {
    let tf = space.full_matrix(target);
    let mut g = CMat::zeros(space.dim(), generators.len());
    for (c, p) in generators.iter().enumerate() {
        g.set_column(c, &space.vector(p)?);
    }
    let coords = space.cross(&tf, &g);
    let q = linalg::range_basis(&coords, RANK_REL * linalg::norm2(&coords));
    let full = &tf * q;
    Ok(space.restrict(&full, target.deg.0, target.deg.1).phase_normalized())
}

/// The polynomials `phi_0, ..., phi_m` computed from inverse moment matrices on
/// `S_j = [0,n] x [0,m] \ {(0,0), ..., (0,j-1)}`.
pub fn phi_sequence(space: &MomentSpace, n: usize, m: usize) -> Result<Vec<BiPoly>> {
    space.check_fits(n, m)?;
    let mut out = Vec::with_capacity(m + 1);
    for j in 0..=m {
        let s: Vec<(usize, usize)> = monomials(n, m).into_iter().filter(|&(a, b)| !(a == 0 && b < j)).collect();
        let ip = gram(space.table(), &s, &s)?.transpose();
        let pos = s.iter().position(|&u| u == (0, j)).unwrap();
        let mut e = CMat::zeros(s.len(), 1);
        e[(pos, 0)] = C::new(1.0, 0.0);
        let x = linalg::hpd_solve(&ip, &e)?;
        let d = x[(pos, 0)].re;
        if !(d > 0.0) {
            return Err(Error::DegenerateForm(format!("inverse moment matrix has nonpositive diagonal on S_{j}")));
        }
        let mut p = BiPoly::zeros(n, m);
        for (r, &(a, b)) in s.iter().enumerate() {
            p[(a, b)] = x[(r, 0)] / d.sqrt();
        }
        out.push(p);
    }
    Ok(out)
}

/// Orthogonal projection of `f` onto the span of `onto`: coefficients and residual.
pub fn project(space: &MomentSpace, f: &BiPoly, onto: &SubspaceBasis) -> Result<(Vec<C>, BiPoly)> {
    let fv = space.vector(f)?;
    let bf = space.full_matrix(onto);
    let coef = space.cross(&bf, &CMat::from_column_slice(fv.len(), 1, fv.as_slice()));
    let resid = &fv - &bf * &coef;
    let (fn_, fm) = f.deg();
    let (n, m) = (fn_.max(onto.deg.0), fm.max(onto.deg.1));
    let cv: Vec<C> = coef.iter().copied().collect();
    Ok((cv, space.poly(&resid, n.min(space.caps.0), m.min(space.caps.1))))
}

/// Reproducing kernel `sum_i b_i(z, w) conj(b_i(zeta, eta))` of the subspace.
pub fn kernel_eval(basis: &SubspaceBasis, zw: (C, C), zeta_eta: (C, C)) -> C {
    let a = basis.eval(zw.0, zw.1);
    let b = basis.eval(zeta_eta.0, zeta_eta.1);
    a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum()
}

/// Cross-Gram `G[(i, j)] = <a_j, b_i>` of two bases in the same space.
pub fn cross_gram(space: &MomentSpace, a: &SubspaceBasis, b: &SubspaceBasis) -> CMat {
    space.cross(&space.full_matrix(b), &space.full_matrix(a))
}

/// Largest sine of the principal angles from `span(a)` into `span(b)`.
pub fn subspace_gap(space: &MomentSpace, a: &SubspaceBasis, b: &SubspaceBasis) -> f64 {
    let ya = space.euclid(&space.full_matrix(a));
    let yb = space.euclid(&space.full_matrix(b));
    let qb = linalg::range_basis(&yb, RANK_REL * linalg::norm2(&yb).max(f64::MIN_POSITIVE));
    let qa = linalg::range_basis(&ya, RANK_REL * linalg::norm2(&ya).max(f64::MIN_POSITIVE));
    linalg::max_angle_sine(&qa, &qb)
}

/// Largest deviation of the Gram matrix of the basis from the identity.
pub fn orthonormality_defect(space: &MomentSpace, b: &SubspaceBasis) -> f64 {
    let f = space.full_matrix(b);
    let g = space.cross(&f, &f);
    (g - CMat::identity(b.dim(), b.dim())).iter().map(|x| x.norm()).fold(0.0, f64::max)
}
