//! Dense univariate and bivariate polynomials with complex coefficients.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C;

use crate::error::{Error, Result};
use crate::linalg;

/// Coefficients below this fraction of the largest one are treated as zero when trimming.
pub const TRIM_REL: f64 = 1e-12;

/// Univariate polynomial `c[0] + c[1] z + ... + c[d] z^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct UniPoly {
    coeffs: Vec<C>,
}

impl UniPoly {
    /// Builds a polynomial, dropping exactly-zero trailing coefficients.
    pub fn new(mut coeffs: Vec<C>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == C::new(0.0, 0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(C::new(0.0, 0.0));
        }
        UniPoly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&x| C::new(x, 0.0)).collect())
    }

    pub fn constant(c: C) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(C::new(1.0, 0.0))
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[C]) -> Self {
        let mut c = vec![C::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![C::new(0.0, 0.0); c.len() + 1];
            for (i, &a) in c.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * r;
            }
            c = next;
        }
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == C::new(0.0, 0.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn leading(&self) -> C {
        *self.coeffs.last().unwrap()
    }

    /// Drops trailing coefficients smaller than `rel` times the largest coefficient.
    pub fn trimmed(&self, rel: f64) -> Self {
        let thr = rel * self.max_abs();
        let mut c = self.coeffs.clone();
        while c.len() > 1 && c.last().unwrap().norm() <= thr {
            c.pop();
        }
        Self::new(c)
    }

    pub fn eval(&self, z: C) -> C {
        self.coeffs.iter().rev().fold(C::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        UniPoly::new(convolve(&self.coeffs, &other.coeffs))
    }

    pub fn scale(&self, s: C) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| {
                self.coeffs.get(i).copied().unwrap_or_default()
                    + other.coeffs.get(i).copied().unwrap_or_default()
            })
            .collect();
        UniPoly::new(c)
    }

    pub fn sub(&self, other: &UniPoly) -> UniPoly {
        self.add(&other.scale(C::new(-1.0, 0.0)))
    }

    pub fn monic(&self) -> UniPoly {
        let lead = self.leading();
        self.scale(lead.inv())
    }

    /// `z^d conj(u)(1/z)` for `d >= deg u`.
    pub fn reflect(&self, d: usize) -> Result<UniPoly> {
        if d < self.degree() {
            return Err(Error::InvalidDegree(d, 0));
        }
        let mut c = vec![C::new(0.0, 0.0); d + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            c[d - i] = a.conj();
        }
        Ok(UniPoly::new(c))
    }

    /// Least-squares quotient `self / divisor`; returns the quotient and the
    /// relative residual `|self - q*divisor| / |self|`.
    pub fn divide(&self, divisor: &UniPoly) -> Result<(UniPoly, f64)> {
        if divisor.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let dv = divisor.degree();
        let du = self.degree();
        if du < dv {
            let r = if self.is_zero() { 0.0 } else { 1.0 };
            return Ok((UniPoly::constant(C::new(0.0, 0.0)), r));
        }
        let qd = du - dv;
        let rows = du + 1;
        let mut m = DMatrix::<C>::zeros(rows, qd + 1);
        for j in 0..=qd {
            for (i, &c) in divisor.coeffs.iter().enumerate() {
                m[(i + j, j)] = c;
            }
        }
        let b = DVector::from_column_slice(&self.coeffs);
        let x = linalg::lstsq(&m, &b)?;
        let q = UniPoly::new(x.iter().copied().collect());
        let prod = q.mul(divisor);
        let norm = l2(&self.coeffs).max(f64::MIN_POSITIVE);
        Ok((q, diff_l2(&self.coeffs, &prod.coeffs) / norm))
    }

    /// Roots with multiplicity, from the eigenvalues of the companion matrix,
    /// each polished by a few Newton steps.
    pub fn roots(&self) -> Result<Vec<C>> {
        let u = self.trimmed(TRIM_REL);
        if u.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let d = u.degree();
        if d == 0 {
            return Ok(vec![]);
        }
        let mut zeros = 0;
        while u.coeffs[zeros] == C::new(0.0, 0.0) {
            zeros += 1;
        }
        let mut roots = vec![C::new(0.0, 0.0); zeros];
        let core = UniPoly::new(u.coeffs[zeros..].to_vec());
        let k = core.degree();
        if k == 0 {
            return Ok(roots);
        }
        let lead = core.leading();
        let mut comp = DMatrix::<C>::zeros(k, k);
        for i in 1..k {
            comp[(i, i - 1)] = C::new(1.0, 0.0);
        }
        for i in 0..k {
            comp[(i, k - 1)] = -core.coeffs[i] / lead;
        }
        let eig = linalg::eigenvalues(&comp)?;
        let deriv = core.derivative();
        for mut r in eig {
            for _ in 0..3 {
                let f = core.eval(r);
                let df = deriv.eval(r);
                if df.norm() == 0.0 {
                    break;
                }
                let step = f / df;
                let cand = r - step;
                if core.eval(cand).norm() < f.norm() {
                    r = cand;
                } else {
                    break;
                }
            }
            roots.push(r);
        }
        Ok(roots)
    }

    pub fn derivative(&self) -> UniPoly {
        if self.coeffs.len() == 1 {
            return UniPoly::constant(C::new(0.0, 0.0));
        }
        UniPoly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, &c)| c * (i as f64 + 1.0))
                .collect(),
        )
    }
}

/// Stable/unstable factorization of a univariate polynomial.
#[derive(Clone, Debug)]
pub struct RootSplit {
    /// No roots in the closed disk; carries all constants.
    pub stable: UniPoly,
    /// Monic, all roots in the open disk.
    pub unstable: UniPoly,
    pub beta: usize,
}

/// Splits `u = stable * unstable` by the location of its roots relative to the unit circle.
pub fn split_stable(u: &UniPoly, margin: f64) -> Result<RootSplit> {
    let u = u.trimmed(TRIM_REL);
    if u.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let roots = u.roots()?;
    let mut inside = Vec::new();
    for r in &roots {
        let m = r.norm();
        if (m - 1.0).abs() <= margin {
            return Err(Error::RootNearTorus { re: r.re, im: r.im });
        }
        if m < 1.0 {
            inside.push(*r);
        }
    }
    let unstable = UniPoly::from_roots(&inside);
    let (stable, _) = u.divide(&unstable)?;
    Ok(RootSplit { beta: inside.len(), stable, unstable })
}

/// Number of roots of `u` strictly inside the unit disk.
pub fn count_inside(u: &UniPoly) -> Result<usize> {
    Ok(u.roots()?.iter().filter(|r| r.norm() < 1.0).count())
}

/// Approximate greatest common divisor by root clustering. The result is monic.
pub fn gcd_approx(us: &[UniPoly], tol: f64) -> Result<UniPoly> {
    let polys: Vec<UniPoly> = us
        .iter()
        .map(|u| u.trimmed(tol.max(TRIM_REL)))
        .filter(|u| !u.is_zero())
        .collect();
    if polys.is_empty() {
        return Err(Error::ZeroPolynomial);
    }
    // zero roots are counted from the low-order coefficients
    let mut zero_mult = usize::MAX;
    let mut stripped = Vec::with_capacity(polys.len());
    for u in &polys {
        let thr = tol * u.max_abs();
        let mut z = 0;
        while z < u.degree() && u.coeffs[z].norm() <= thr {
            z += 1;
        }
        zero_mult = zero_mult.min(z);
        stripped.push(UniPoly::new(u.coeffs[z..].to_vec()));
    }
    let mut factors = vec![C::new(0.0, 0.0); zero_mult];
    if stripped.iter().all(|u| u.degree() > 0) {
        let base_idx = (0..stripped.len()).min_by_key(|&i| stripped[i].degree()).unwrap();
        let base_roots = stripped[base_idx].roots()?;
        let others: Vec<Vec<C>> = stripped
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != base_idx)
            .map(|(_, u)| u.roots())
            .collect::<Result<_>>()?;
        for (center, mult) in cluster(&base_roots, tol) {
            let radius = tol * center.norm().max(1.0);
            let mut shared = mult;
            let mut members = vec![center; mult];
            for rs in &others {
                let close: Vec<C> =
                    rs.iter().copied().filter(|r| (r - center).norm() <= radius).collect();
                shared = shared.min(close.len());
                members.extend(close);
            }
            if shared > 0 {
                let centroid = members.iter().sum::<C>() / members.len() as f64;
                factors.extend(std::iter::repeat(centroid).take(shared));
            }
        }
    }
    Ok(UniPoly::from_roots(&factors))
}

/// Groups roots closer than `tol * max(1, |root|)`; returns centroids with sizes.
fn cluster(roots: &[C], tol: f64) -> Vec<(C, usize)> {
    let mut used = vec![false; roots.len()];
    let mut out = Vec::new();
    for i in 0..roots.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let mut members = vec![roots[i]];
        let radius = tol * roots[i].norm().max(1.0);
        for j in i + 1..roots.len() {
            if !used[j] && (roots[j] - roots[i]).norm() <= radius {
                used[j] = true;
                members.push(roots[j]);
            }
        }
        let c = members.iter().sum::<C>() / members.len() as f64;
        out.push((c, members.len()));
    }
    out
}

/// Bivariate polynomial with declared degree `(n, m)`; entry `(j, k)` is the
/// coefficient of `z^j w^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct BiPoly {
    n: usize,
    m: usize,
    coeffs: Vec<C>,
}

impl BiPoly {
    pub fn zeros(n: usize, m: usize) -> Self {
        BiPoly { n, m, coeffs: vec![C::new(0.0, 0.0); (n + 1) * (m + 1)] }
    }

    /// Row-major coefficients (z-power major).
    pub fn new(n: usize, m: usize, coeffs: Vec<C>) -> Result<Self> {
        if coeffs.len() != (n + 1) * (m + 1) {
            return Err(Error::InvalidInput(format!(
                "expected {} coefficients for degree ({n}, {m}), got {}",
                (n + 1) * (m + 1),
                coeffs.len()
            )));
        }
        Ok(BiPoly { n, m, coeffs })
    }

    /// Rows indexed by z-power, columns by w-power.
    pub fn from_rows(rows: &[Vec<C>]) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::InvalidInput("empty coefficient matrix".into()));
        }
        let m = rows[0].len() - 1;
        if rows.iter().any(|r| r.len() != m + 1) {
            return Err(Error::InvalidInput("ragged coefficient matrix".into()));
        }
        Ok(BiPoly { n: rows.len() - 1, m, coeffs: rows.concat() })
    }

    /// Polynomial from `(j, k, coefficient)` terms, with the smallest declared degree that fits.
    pub fn from_terms(terms: &[(usize, usize, C)]) -> Self {
        let n = terms.iter().map(|t| t.0).max().unwrap_or(0);
        let m = terms.iter().map(|t| t.1).max().unwrap_or(0);
        let mut p = BiPoly::zeros(n, m);
        for &(j, k, c) in terms {
            p[(j, k)] += c;
        }
        p
    }

    /// Real-coefficient convenience constructor.
    pub fn from_real_terms(terms: &[(usize, usize, f64)]) -> Self {
        let t: Vec<_> = terms.iter().map(|&(j, k, c)| (j, k, C::new(c, 0.0))).collect();
        Self::from_terms(&t)
    }

    pub fn constant(c: C) -> Self {
        BiPoly { n: 0, m: 0, coeffs: vec![c] }
    }

    /// `u(z)` viewed as a bivariate polynomial of degree `(deg u, 0)`.
    pub fn from_uni_z(u: &UniPoly) -> Self {
        BiPoly { n: u.degree(), m: 0, coeffs: u.coeffs().to_vec() }
    }

    pub fn deg(&self) -> (usize, usize) {
        (self.n, self.m)
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn get(&self, j: usize, k: usize) -> C {
        if j <= self.n && k <= self.m {
            self.coeffs[j * (self.m + 1) + k]
        } else {
            C::new(0.0, 0.0)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == C::new(0.0, 0.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Euclidean norm of the coefficient vector.
    pub fn coeff_norm(&self) -> f64 {
        l2(&self.coeffs)
    }

    /// Degree ignoring coefficients of modulus at most `rel * max|c|`.
    pub fn actual_degree(&self, rel: f64) -> (usize, usize) {
        let thr = rel * self.max_abs();
        let (mut dn, mut dm) = (0, 0);
        for j in 0..=self.n {
            for k in 0..=self.m {
                if self[(j, k)].norm() > thr {
                    dn = dn.max(j);
                    dm = dm.max(k);
                }
            }
        }
        (dn, dm)
    }

    /// Re-declares the degree, padding with zeros or dropping negligible coefficients.
    pub fn with_degree(&self, n: usize, m: usize) -> Result<BiPoly> {
        let (an, am) = self.actual_degree(0.0);
        if !self.is_zero() && (an > n || am > m) {
            return Err(Error::InvalidDegree(n, m));
        }
        let mut out = BiPoly::zeros(n, m);
        for j in 0..=n.min(self.n) {
            for k in 0..=m.min(self.m) {
                out[(j, k)] = self[(j, k)];
            }
        }
        Ok(out)
    }

    /// Shrinks the declared degree to the actual degree (coefficients below `rel * max` dropped).
    pub fn trimmed(&self, rel: f64) -> BiPoly {
        let (n, m) = self.actual_degree(rel);
        let mut out = BiPoly::zeros(n, m);
        for j in 0..=n {
            for k in 0..=m {
                out[(j, k)] = self[(j, k)];
            }
        }
        out
    }

    pub fn eval(&self, z: C, w: C) -> C {
        let mut acc = C::new(0.0, 0.0);
        for j in (0..=self.n).rev() {
            let mut row = C::new(0.0, 0.0);
            for k in (0..=self.m).rev() {
                row = row * w + self[(j, k)];
            }
            acc = acc * z + row;
        }
        acc
    }

    pub fn map(&self, f: impl Fn(C) -> C) -> BiPoly {
        BiPoly { n: self.n, m: self.m, coeffs: self.coeffs.iter().map(|&c| f(c)).collect() }
    }

    pub fn scale(&self, s: C) -> BiPoly {
        self.map(|c| c * s)
    }

    pub fn add(&self, other: &BiPoly) -> BiPoly {
        let mut out = BiPoly::zeros(self.n.max(other.n), self.m.max(other.m));
        for j in 0..=out.n {
            for k in 0..=out.m {
                out[(j, k)] = self.get(j, k) + other.get(j, k);
            }
        }
        out
    }

    pub fn sub(&self, other: &BiPoly) -> BiPoly {
        self.add(&other.scale(C::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &BiPoly) -> BiPoly {
        let mut out = BiPoly::zeros(self.n + other.n, self.m + other.m);
        for j in 0..=self.n {
            for k in 0..=self.m {
                let a = self[(j, k)];
                if a == C::new(0.0, 0.0) {
                    continue;
                }
                for s in 0..=other.n {
                    for t in 0..=other.m {
                        out[(j + s, k + t)] += a * other[(s, t)];
                    }
                }
            }
        }
        out
    }

    pub fn mul_z(&self, u: &UniPoly) -> BiPoly {
        self.mul(&BiPoly::from_uni_z(u))
    }

    /// Multiplies by the monomial `z^a w^b`.
    pub fn shift(&self, a: usize, b: usize) -> BiPoly {
        let mut out = BiPoly::zeros(self.n + a, self.m + b);
        for j in 0..=self.n {
            for k in 0..=self.m {
                out[(j + a, k + b)] = self[(j, k)];
            }
        }
        out
    }

    /// `p(z, t w)`.
    pub fn scale_w(&self, t: C) -> BiPoly {
        let mut out = self.clone();
        for k in 0..=self.m {
            let f = t.powu(k as u32);
            for j in 0..=self.n {
                out[(j, k)] *= f;
            }
        }
        out
    }

    /// Partial derivative in w; the declared degree drops to `(n, m - 1)`.
    pub fn d_dw(&self) -> BiPoly {
        if self.m == 0 {
            return BiPoly::zeros(self.n, 0);
        }
        let mut out = BiPoly::zeros(self.n, self.m - 1);
        for j in 0..=self.n {
            for k in 1..=self.m {
                out[(j, k - 1)] = self[(j, k)] * k as f64;
            }
        }
        out
    }

    /// `z^j w^k conj(p)(1/z, 1/w)` at the degree pair `(j, k)`.
    pub fn reflect(&self, j: usize, k: usize) -> Result<BiPoly> {
        let (an, am) = self.actual_degree(0.0);
        if an > j || am > k {
            return Err(Error::InvalidDegree(j, k));
        }
        let mut out = BiPoly::zeros(j, k);
        for a in 0..=an {
            for b in 0..=am {
                out[(j - a, k - b)] = self[(a, b)].conj();
            }
        }
        Ok(out)
    }

    /// Reflection at the declared degree.
    pub fn reflect_declared(&self) -> BiPoly {
        self.reflect(self.n, self.m).expect("declared degree bounds actual degree")
    }

    /// Coefficient of `w^k` as a polynomial in z.
    pub fn w_row(&self, k: usize) -> UniPoly {
        UniPoly::new((0..=self.n).map(|j| self.get(j, k)).collect())
    }

    /// Coefficient of `z^j` as a polynomial in w.
    pub fn z_row(&self, j: usize) -> UniPoly {
        UniPoly::new((0..=self.m).map(|k| self.get(j, k)).collect())
    }

    /// `p(z, 0)`.
    pub fn at_w0(&self) -> UniPoly {
        self.w_row(0)
    }

    /// `p(z0, w)` as a polynomial in w.
    pub fn slice_w(&self, z0: C) -> UniPoly {
        let c = (0..=self.m)
            .map(|k| self.w_row(k).eval(z0))
            .collect();
        UniPoly::new(c)
    }

    /// `p(z, w0)` as a polynomial in z.
    pub fn slice_z(&self, w0: C) -> UniPoly {
        let c = (0..=self.n).map(|j| self.z_row(j).eval(w0)).collect();
        UniPoly::new(c)
    }

    /// Swaps the roles of z and w.
    pub fn transpose(&self) -> BiPoly {
        let mut out = BiPoly::zeros(self.m, self.n);
        for j in 0..=self.n {
            for k in 0..=self.m {
                out[(k, j)] = self[(j, k)];
            }
        }
        out
    }

    /// Divides every w-row by `d(z)` in the least-squares sense, keeping the
    /// w-degree; returns the quotient and the worst relative row residual.
    pub fn div_z(&self, d: &UniPoly) -> Result<(BiPoly, f64)> {
        let qn = self.n.checked_sub(d.degree()).ok_or(Error::InvalidDegree(self.n, self.m))?;
        let mut out = BiPoly::zeros(qn, self.m);
        let scale = self.coeff_norm().max(f64::MIN_POSITIVE);
        let mut worst: f64 = 0.0;
        for k in 0..=self.m {
            let row = self.w_row(k);
            if row.is_zero() {
                continue;
            }
            let padded = UniPoly::new(
                (0..=self.n).map(|j| row.coeffs().get(j).copied().unwrap_or_default()).collect(),
            );
            let (q, _) = padded_divide(&padded, self.n, d)?;
            let prod = q.mul(d);
            worst = worst.max(diff_l2(row.coeffs(), prod.coeffs()) / scale);
            for (j, &c) in q.coeffs().iter().enumerate().take(qn + 1) {
                out[(j, k)] = c;
            }
        }
        Ok((out, worst))
    }

    /// Greatest common divisor of the w-rows: the factor of p in z alone.
    pub fn z_only_factor(&self, tol: f64) -> Result<UniPoly> {
        let rows: Vec<UniPoly> = (0..=self.m).map(|k| self.w_row(k)).collect();
        gcd_approx(&rows, tol)
    }

    /// Multiplies by a unimodular constant so that the largest-modulus
    /// coefficient of `w^0` is real positive (the largest overall if `p(z, 0) = 0`).
    pub fn canonical_phase(&self) -> BiPoly {
        let mut best = C::new(0.0, 0.0);
        for j in 0..=self.n {
            if self[(j, 0)].norm() > best.norm() * (1.0 + 1e-9) {
                best = self[(j, 0)];
            }
        }
        if best.norm() == 0.0 {
            for &c in &self.coeffs {
                if c.norm() > best.norm() * (1.0 + 1e-9) {
                    best = c;
                }
            }
        }
        if best.norm() == 0.0 {
            return self.clone();
        }
        self.scale(best.conj() / best.norm())
    }

    /// Largest `| |p| - |q| |` over an `n x n` torus grid.
    pub fn modulus_gap_on_torus(&self, other: &BiPoly, grid: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for s in 0..grid {
            let z = unit(s, grid);
            for t in 0..grid {
                let w = unit(t, grid);
                worst = worst.max((self.eval(z, w).norm() - other.eval(z, w).norm()).abs());
            }
        }
        worst
    }

    /// Largest `| |p|^2 - |q|^2 |` over an `n x n` torus grid.
    pub fn modulus_sq_gap_on_torus(&self, other: &BiPoly, grid: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for s in 0..grid {
            let z = unit(s, grid);
            for t in 0..grid {
                let w = unit(t, grid);
                worst = worst.max((self.eval(z, w).norm_sqr() - other.eval(z, w).norm_sqr()).abs());
            }
        }
        worst
    }

    /// Maximum of `|p|` over an `n x n` grid on the torus.
    pub fn max_on_torus(&self, grid: usize) -> f64 {
        let mut best: f64 = 0.0;
        for s in 0..grid {
            let z = unit(s, grid);
            for t in 0..grid {
                best = best.max(self.eval(z, unit(t, grid)).norm());
            }
        }
        best
    }
}

impl std::ops::Index<(usize, usize)> for BiPoly {
    type Output = C;
    fn index(&self, (j, k): (usize, usize)) -> &C {
        assert!(j <= self.n && k <= self.m, "index ({j}, {k}) outside degree ({}, {})", self.n, self.m);
        &self.coeffs[j * (self.m + 1) + k]
    }
}

impl std::ops::IndexMut<(usize, usize)> for BiPoly {
    fn index_mut(&mut self, (j, k): (usize, usize)) -> &mut C {
        assert!(j <= self.n && k <= self.m, "index ({j}, {k}) outside degree ({}, {})", self.n, self.m);
        &mut self.coeffs[j * (self.m + 1) + k]
    }
}

/// Least-squares quotient of `u` (treated as degree `deg`) by `d` with quotient degree `deg - deg d`.
fn padded_divide(u: &UniPoly, deg: usize, d: &UniPoly) -> Result<(UniPoly, f64)> {
    let dv = d.degree();
    let qd = deg - dv;
    let mut m = DMatrix::<C>::zeros(deg + 1, qd + 1);
    for j in 0..=qd {
        for (i, &c) in d.coeffs().iter().enumerate() {
            m[(i + j, j)] = c;
        }
    }
    let b = DVector::from_iterator(deg + 1, (0..=deg).map(|j| u.coeffs().get(j).copied().unwrap_or_default()));
    let x = linalg::lstsq(&m, &b)?;
    Ok((UniPoly::new(x.iter().copied().collect()), 0.0))
}

/// `e^{2 pi i s / n}` computed from the reduced angle.
pub fn unit(s: usize, n: usize) -> C {
    let theta = std::f64::consts::TAU * (s % n) as f64 / n as f64;
    C::from_polar(1.0, theta)
}

pub(crate) fn convolve(a: &[C], b: &[C]) -> Vec<C> {
    let mut out = vec![C::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn l2(a: &[C]) -> f64 {
    a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn diff_l2(a: &[C], b: &[C]) -> f64 {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            (a.get(i).copied().unwrap_or_default() - b.get(i).copied().unwrap_or_default()).norm_sqr()
        })
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C {
        C::new(re, 0.0)
    }

    fn sorted(mut v: Vec<C>) -> Vec<C> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        v
    }

    #[test]
    fn reflect_examples() {
        let one = BiPoly::constant(c(1.0));
        assert_eq!(one.reflect(0, 0).unwrap(), one);
        let p = BiPoly::from_real_terms(&[(0, 0, 2.0), (1, 1, -1.0)]);
        let r = p.reflect(1, 1).unwrap();
        assert_eq!(r, BiPoly::from_real_terms(&[(0, 0, -1.0), (1, 1, 2.0)]));
        let q = BiPoly::from_real_terms(&[(1, 0, 1.0), (0, 1, -1.0)]);
        assert_eq!(q.reflect(1, 1).unwrap(), q.scale(c(-1.0)));
        assert_eq!(p.reflect(0, 1), Err(Error::InvalidDegree(0, 1)));
    }

    #[test]
    fn roots_examples() {
        let r = UniPoly::from_real(&[1.0, -2.0]).roots().unwrap();
        assert!((r[0] - c(0.5)).norm() < 1e-14);
        let r = sorted(UniPoly::from_real(&[1.0, 0.0, 1.0]).roots().unwrap());
        assert!((r[0] - C::new(0.0, -1.0)).norm() < 1e-14);
        assert!((r[1] - C::new(0.0, 1.0)).norm() < 1e-14);
        let u = UniPoly::from_real(&[1.0, -2.0]).mul(&UniPoly::from_real(&[3.0, -1.0]));
        let r = sorted(u.roots().unwrap());
        assert!((r[0] - c(0.5)).norm() < 1e-13 && (r[1] - c(3.0)).norm() < 1e-13);
        assert_eq!(UniPoly::from_real(&[0.0]).roots(), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn split_examples() {
        let s = split_stable(&UniPoly::from_real(&[2.0]), 1e-6).unwrap();
        assert_eq!(s.beta, 0);
        assert!((s.stable.coeffs()[0] - c(2.0)).norm() < 1e-14);
        let u = UniPoly::from_real(&[1.0, -2.0]).mul(&UniPoly::from_real(&[3.0, -1.0]));
        let s = split_stable(&u, 1e-6).unwrap();
        assert_eq!(s.beta, 1);
        let r = s.stable.roots().unwrap();
        assert!((r[0] - c(3.0)).norm() < 1e-12);
        assert!((s.unstable.coeffs()[0] - c(-0.5)).norm() < 1e-12);
        assert!(matches!(
            split_stable(&UniPoly::from_real(&[1.0, -1.0]), 1e-6),
            Err(Error::RootNearTorus { .. })
        ));
    }

    #[test]
    fn gcd_examples() {
        let a = UniPoly::from_roots(&[c(2.0)]);
        let b = UniPoly::from_roots(&[c(2.0), c(3.0)]);
        let g = gcd_approx(&[a.clone(), b], 1e-6).unwrap();
        assert!((g.coeffs()[0] - c(-2.0)).norm() < 1e-10 && g.degree() == 1);
        let g = gcd_approx(&[UniPoly::from_real(&[4.0]), UniPoly::from_real(&[0.0, 2.0])], 1e-6).unwrap();
        assert_eq!(g.degree(), 0);
        let a = UniPoly::from_roots(&[c(2.0), c(2.0), c(-1.0)]);
        let b = UniPoly::from_roots(&[c(2.0), c(5.0)]);
        let g = gcd_approx(&[a, b], 1e-6).unwrap();
        assert_eq!(g.degree(), 1);
        assert!((g.coeffs()[0] - c(-2.0)).norm() < 1e-7);
        assert_eq!(gcd_approx(&[UniPoly::from_real(&[0.0])], 1e-6), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn shared_zero_roots() {
        let a = UniPoly::from_real(&[0.0, 4.0]);
        let b = UniPoly::from_real(&[0.0, 0.0, -2.0]);
        let g = gcd_approx(&[a, b], 1e-6).unwrap();
        assert_eq!(g, UniPoly::from_real(&[0.0, 1.0]));
    }

    #[test]
    fn derivative_and_scaling() {
        let p = BiPoly::from_real_terms(&[(2, 0, 1.0), (0, 1, -1.0), (1, 2, 3.0)]);
        let d = p.d_dw();
        assert_eq!(d.deg(), (2, 1));
        assert_eq!(d[(0, 0)], c(-1.0));
        assert_eq!(d[(1, 1)], c(6.0));
        let s = p.scale_w(c(0.5));
        assert_eq!(s[(1, 2)], c(0.75));
    }

    #[test]
    fn division_by_z_factor() {
        let g = BiPoly::from_real_terms(&[(0, 0, 2.0), (1, 1, -1.0)]);
        let q = UniPoly::from_real(&[3.0, -1.0]);
        let p = g.mul_z(&q);
        let (back, res) = p.div_z(&q).unwrap();
        assert!(res < 1e-14);
        assert!(back.sub(&g).max_abs() < 1e-13);
    }
}
