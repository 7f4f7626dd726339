//! Trigonometric moments of densities on the torus and the Gram matrices they induce.

use nalgebra::DMatrix;
use num_complex::Complex64 as C;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::linalg;
use crate::poly::{unit, BiPoly};

/// Table of `c_u = T(z^{-u})` for `u` in `[-jmax, jmax] x [-kmax, kmax]`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentTable {
    jmax: usize,
    kmax: usize,
    c: Vec<C>,
}

impl MomentTable {
    /// Rows over `j = -jmax..=jmax`, each with `2 kmax + 1` entries.
    pub fn new(jmax: usize, kmax: usize, c: Vec<C>) -> Result<Self> {
        if c.len() != (2 * jmax + 1) * (2 * kmax + 1) {
            return Err(Error::InvalidInput(format!(
                "moment table for ({jmax}, {kmax}) needs {} entries, got {}",
                (2 * jmax + 1) * (2 * kmax + 1),
                c.len()
            )));
        }
        Ok(MomentTable { jmax, kmax, c })
    }

    /// Moments of normalized Lebesgue measure.
    pub fn lebesgue(jmax: usize, kmax: usize) -> Self {
        let mut t = Self::zeros(jmax, kmax);
        t.set(0, 0, C::new(1.0, 0.0));
        t
    }

    pub fn zeros(jmax: usize, kmax: usize) -> Self {
        MomentTable { jmax, kmax, c: vec![C::new(0.0, 0.0); (2 * jmax + 1) * (2 * kmax + 1)] }
    }

    /// Builds a table from `f(j, k)`.
    pub fn from_fn(jmax: usize, kmax: usize, f: impl Fn(i64, i64) -> C) -> Self {
        let mut t = Self::zeros(jmax, kmax);
        for j in -(jmax as i64)..=jmax as i64 {
            for k in -(kmax as i64)..=kmax as i64 {
                t.set(j, k, f(j, k));
            }
        }
        t
    }

    pub fn jmax(&self) -> usize {
        self.jmax
    }

    pub fn kmax(&self) -> usize {
        self.kmax
    }

    pub fn raw(&self) -> &[C] {
        &self.c
    }

    fn idx(&self, j: i64, k: i64) -> usize {
        (j + self.jmax as i64) as usize * (2 * self.kmax + 1) + (k + self.kmax as i64) as usize
    }

    pub fn covers(&self, j: i64, k: i64) -> bool {
        j.unsigned_abs() as usize <= self.jmax && k.unsigned_abs() as usize <= self.kmax
    }

    pub fn get(&self, j: i64, k: i64) -> Result<C> {
        if !self.covers(j, k) {
            return Err(Error::InsufficientMoments { j, k, jmax: self.jmax, kmax: self.kmax });
        }
        Ok(self.c[self.idx(j, k)])
    }

    /// Unchecked access; panics outside the table.
    pub fn at(&self, j: i64, k: i64) -> C {
        assert!(self.covers(j, k), "moment ({j}, {k}) outside table");
        self.c[self.idx(j, k)]
    }

    pub fn set(&mut self, j: i64, k: i64, v: C) {
        let i = self.idx(j, k);
        self.c[i] = v;
    }

    /// Averages `c_u` with `conj(c_{-u})`; returns the largest correction applied.
    pub fn symmetrize(&mut self) -> f64 {
        let mut worst: f64 = 0.0;
        for j in -(self.jmax as i64)..=self.jmax as i64 {
            for k in -(self.kmax as i64)..=self.kmax as i64 {
                if (j, k) < (-j, -k) {
                    continue;
                }
                let a = self.at(j, k);
                let b = self.at(-j, -k).conj();
                let avg = (a + b) * 0.5;
                worst = worst.max((a - avg).norm());
                self.set(j, k, avg);
                self.set(-j, -k, avg.conj());
            }
        }
        worst
    }

    /// Largest `|c_u - conj(c_{-u})|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for j in -(self.jmax as i64)..=self.jmax as i64 {
            for k in -(self.kmax as i64)..=self.kmax as i64 {
                worst = worst.max((self.at(j, k) - self.at(-j, -k).conj()).norm());
            }
        }
        worst
    }

    pub fn scaled(&self, s: f64) -> MomentTable {
        MomentTable { jmax: self.jmax, kmax: self.kmax, c: self.c.iter().map(|&x| x * s).collect() }
    }

    /// `a * self + b * other` on the common range.
    pub fn combine(&self, a: f64, other: &MomentTable, b: f64) -> MomentTable {
        let jmax = self.jmax.min(other.jmax);
        let kmax = self.kmax.min(other.kmax);
        Self::from_fn(jmax, kmax, |j, k| self.at(j, k) * a + other.at(j, k) * b)
    }

    /// Restriction to a smaller range.
    pub fn truncated(&self, jmax: usize, kmax: usize) -> Result<MomentTable> {
        if jmax > self.jmax || kmax > self.kmax {
            return Err(Error::InsufficientMoments {
                j: jmax as i64,
                k: kmax as i64,
                jmax: self.jmax,
                kmax: self.kmax,
            });
        }
        Ok(Self::from_fn(jmax, kmax, |j, k| self.at(j, k)))
    }

    /// Largest entrywise difference on the common range.
    pub fn max_diff(&self, other: &MomentTable) -> f64 {
        let jmax = self.jmax.min(other.jmax) as i64;
        let kmax = self.kmax.min(other.kmax) as i64;
        let mut worst: f64 = 0.0;
        for j in -jmax..=jmax {
            for k in -kmax..=kmax {
                worst = worst.max((self.at(j, k) - other.at(j, k)).norm());
            }
        }
        worst
    }
}

/// Settings for the torus quadrature.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureConfig {
    /// Initial grid size per axis (a power of two).
    pub initial_grid: usize,
    pub max_grid: usize,
    /// Successive grids must agree on every moment to this absolute tolerance.
    pub tolerance: f64,
    /// Density values are rejected when the denominator drops to this fraction of its maximum.
    pub pole_margin: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { initial_grid: 64, max_grid: 4096, tolerance: 1e-10, pole_margin: 1e-14 }
    }
}

impl QuadratureConfig {
    fn validate(&self) -> Result<()> {
        if !self.initial_grid.is_power_of_two() || !self.max_grid.is_power_of_two() {
            return Err(Error::InvalidInput("grid sizes must be powers of two".into()));
        }
        if self.initial_grid > self.max_grid {
            return Err(Error::InvalidInput("initial grid exceeds max grid".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidInput("quadrature tolerance must be positive".into()));
        }
        Ok(())
    }

    fn start(&self, jmax: usize, kmax: usize, deg: usize) -> usize {
        let need = (2 * jmax.max(kmax) + 2).next_power_of_two();
        self.initial_grid.max(need).max((deg + 1).next_power_of_two())
    }
}

/// Real Laurent polynomial `t(z, w) = sum t_{j,k} z^j w^k` on `[-n, n] x [-m, m]`
/// with `t_{-j,-k} = conj(t_{j,k})`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    n: usize,
    m: usize,
    coeffs: Vec<C>,
}

impl TrigPoly {
    /// Rows over `j = -n..=n`, columns over `k = -m..=m`.
    pub fn new(n: usize, m: usize, coeffs: Vec<C>) -> Result<Self> {
        if coeffs.len() != (2 * n + 1) * (2 * m + 1) {
            return Err(Error::InvalidInput(format!(
                "trigonometric polynomial of degree ({n}, {m}) needs {} coefficients, got {}",
                (2 * n + 1) * (2 * m + 1),
                coeffs.len()
            )));
        }
        let t = TrigPoly { n, m, coeffs };
        let scale = t.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if t.hermitian_defect() > 1e-12 * scale.max(1.0) {
            return Err(Error::InvalidInput(
                "trigonometric polynomial is not real valued (coefficients lack Hermitian symmetry)".into(),
            ));
        }
        Ok(t)
    }

    /// `|p|^2` on the torus.
    pub fn modulus_squared(p: &BiPoly) -> Self {
        let (n, m) = p.deg();
        let mut t = TrigPoly { n, m, coeffs: vec![C::new(0.0, 0.0); (2 * n + 1) * (2 * m + 1)] };
        for j in 0..=n {
            for k in 0..=m {
                for s in 0..=n {
                    for u in 0..=m {
                        let a = j as i64 - s as i64;
                        let b = k as i64 - u as i64;
                        let i = t.idx(a, b);
                        t.coeffs[i] += p[(j, k)] * p[(s, u)].conj();
                    }
                }
            }
        }
        t
    }

    pub fn deg(&self) -> (usize, usize) {
        (self.n, self.m)
    }

    pub fn raw(&self) -> &[C] {
        &self.coeffs
    }

    fn idx(&self, j: i64, k: i64) -> usize {
        (j + self.n as i64) as usize * (2 * self.m + 1) + (k + self.m as i64) as usize
    }

    pub fn get(&self, j: i64, k: i64) -> C {
        if j.unsigned_abs() as usize > self.n || k.unsigned_abs() as usize > self.m {
            return C::new(0.0, 0.0);
        }
        self.coeffs[self.idx(j, k)]
    }

    fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for j in -(self.n as i64)..=self.n as i64 {
            for k in -(self.m as i64)..=self.m as i64 {
                worst = worst.max((self.get(j, k) - self.get(-j, -k).conj()).norm());
            }
        }
        worst
    }

    /// Value on the torus (real part of the Laurent sum).
    pub fn eval(&self, z: C, w: C) -> f64 {
        let mut acc = C::new(0.0, 0.0);
        for j in -(self.n as i64)..=self.n as i64 {
            let zj = z.powi(j as i32);
            for k in -(self.m as i64)..=self.m as i64 {
                acc += self.get(j, k) * zj * w.powi(k as i32);
            }
        }
        acc.re
    }
}

/// Moments of `dσ / |p|^2`.
pub fn moments_from_density(p: &BiPoly, jmax: usize, kmax: usize, cfg: &QuadratureConfig) -> Result<MomentTable> {
    cfg.validate()?;
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let (n, m) = p.deg();
    let margin = cfg.pole_margin;
    let eval = RowEvaluator::Poly(p);
    converge(&eval, jmax, kmax, n.max(m), cfg, |vals: &mut [C], grid| {
        let mut vmax: f64 = 0.0;
        let mut vmin = f64::INFINITY;
        for v in vals.iter() {
            let s = v.norm_sqr();
            vmax = vmax.max(s);
            vmin = vmin.min(s);
        }
        if !(vmin > margin * vmax) || !vmax.is_finite() {
            return Err(Error::MomentDivergence { grid });
        }
        for v in vals.iter_mut() {
            *v = C::new(1.0 / v.norm_sqr(), 0.0);
        }
        Ok(())
    })
}

/// Moments of `dσ / t` for a trigonometric polynomial positive on the torus.
pub fn moments_from_trig(t: &TrigPoly, jmax: usize, kmax: usize, cfg: &QuadratureConfig) -> Result<MomentTable> {
    cfg.validate()?;
    let (n, m) = t.deg();
    let margin = cfg.pole_margin;
    let eval = RowEvaluator::Trig(t);
    converge(&eval, jmax, kmax, 2 * n.max(m), cfg, |vals: &mut [C], _grid| {
        let mut vmax: f64 = 0.0;
        let mut vmin = f64::INFINITY;
        for v in vals.iter() {
            vmax = vmax.max(v.re.abs());
            vmin = vmin.min(v.re);
        }
        if !(vmin > margin * vmax) {
            return Err(Error::NonPositiveDensity { min: vmin });
        }
        for v in vals.iter_mut() {
            *v = C::new(1.0 / v.re, 0.0);
        }
        Ok(())
    })
}

/// Moments of a density given pointwise on the torus.
pub fn moments_from_fn(
    f: &dyn Fn(C, C) -> f64,
    jmax: usize,
    kmax: usize,
    cfg: &QuadratureConfig,
) -> Result<MomentTable> {
    cfg.validate()?;
    let eval = RowEvaluator::Func(f);
    converge(&eval, jmax, kmax, 0, cfg, |vals: &mut [C], grid| {
        if vals.iter().any(|v| !v.re.is_finite()) {
            return Err(Error::MomentDivergence { grid });
        }
        Ok(())
    })
}

enum RowEvaluator<'a> {
    Poly(&'a BiPoly),
    Trig(&'a TrigPoly),
    Func(&'a dyn Fn(C, C) -> f64),
}

impl RowEvaluator<'_> {
    /// Values along `w_t = e^{2 pi i t / n}` for fixed `z`, written into `out`.
    fn row(&self, z: C, out: &mut [C], planner: &mut FftPlanner<f64>) {
        let n = out.len();
        match self {
            RowEvaluator::Poly(p) => {
                let (_, m) = p.deg();
                out.iter_mut().for_each(|v| *v = C::new(0.0, 0.0));
                for k in 0..=m {
                    out[k % n] += p.w_row(k).eval(z);
                }
                planner.plan_fft_inverse(n).process(out);
            }
            RowEvaluator::Trig(t) => {
                let (tn, tm) = t.deg();
                out.iter_mut().for_each(|v| *v = C::new(0.0, 0.0));
                for k in -(tm as i64)..=tm as i64 {
                    let mut s = C::new(0.0, 0.0);
                    for j in -(tn as i64)..=tn as i64 {
                        s += t.get(j, k) * z.powi(j as i32);
                    }
                    out[k.rem_euclid(n as i64) as usize] += s;
                }
                planner.plan_fft_inverse(n).process(out);
            }
            RowEvaluator::Func(f) => {
                for (t, v) in out.iter_mut().enumerate() {
                    *v = C::new(f(z, unit(t, n)), 0.0);
                }
            }
        }
    }
}

fn converge(
    eval: &RowEvaluator,
    jmax: usize,
    kmax: usize,
    deg: usize,
    cfg: &QuadratureConfig,
    density: impl Fn(&mut [C], usize) -> Result<()>,
) -> Result<MomentTable> {
    let mut grid = cfg.start(jmax, kmax, deg);
    if grid > cfg.max_grid {
        return Err(Error::InvalidInput(format!("requested moments need a grid above the maximum {}", cfg.max_grid)));
    }
    let mut prev = quadrature(eval, jmax, kmax, grid, &density)?;
    loop {
        let next_grid = grid * 2;
        if next_grid > cfg.max_grid {
            return Err(Error::MomentDivergence { grid });
        }
        let next = quadrature(eval, jmax, kmax, next_grid, &density)?;
        if next.max_diff(&prev) < cfg.tolerance {
            return Ok(next);
        }
        prev = next;
        grid = next_grid;
    }
}

/// Trapezoidal rule on an `n x n` grid, streamed one z-row at a time.
fn quadrature(
    eval: &RowEvaluator,
    jmax: usize,
    kmax: usize,
    n: usize,
    density: &impl Fn(&mut [C], usize) -> Result<()>,
) -> Result<MomentTable> {
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let width = 2 * kmax + 1;
    // rows[s][k + kmax] = sum_t w_t^{-k} f(z_s, w_t)
    let mut rows = DMatrix::<C>::zeros(n, width);
    let mut buf = vec![C::new(0.0, 0.0); n];
    for s in 0..n {
        eval.row(unit(s, n), &mut buf, &mut planner);
        density(&mut buf, n)?;
        fwd.process(&mut buf);
        for k in -(kmax as i64)..=kmax as i64 {
            rows[(s, (k + kmax as i64) as usize)] = buf[k.rem_euclid(n as i64) as usize];
        }
    }
    let mut col = vec![C::new(0.0, 0.0); n];
    let mut table = MomentTable::zeros(jmax, kmax);
    let norm = 1.0 / (n as f64 * n as f64);
    for c in 0..width {
        for s in 0..n {
            col[s] = rows[(s, c)];
        }
        fwd.process(&mut col);
        for j in -(jmax as i64)..=jmax as i64 {
            table.set(j, c as i64 - kmax as i64, col[j.rem_euclid(n as i64) as usize] * norm);
        }
    }
    table.symmetrize();
    Ok(table)
}

/// Matrix with entry `(r, c) = c_{cols[c] - rows[r]}`.
pub fn gram(table: &MomentTable, rows: &[(usize, usize)], cols: &[(usize, usize)]) -> Result<DMatrix<C>> {
    let mut g = DMatrix::<C>::zeros(rows.len(), cols.len());
    for (r, &(a, b)) in rows.iter().enumerate() {
        for (c, &(s, t)) in cols.iter().enumerate() {
            g[(r, c)] = table.get(s as i64 - a as i64, t as i64 - b as i64)?;
        }
    }
    Ok(g)
}

/// Monomials of `[0, n] x [0, m]` in lexicographic order.
pub fn monomials(n: usize, m: usize) -> Vec<(usize, usize)> {
    (0..=n).flat_map(|j| (0..=m).map(move |k| (j, k))).collect()
}

/// Positivity of the form on polynomials of degree at most `(n, m)`, with the
/// smallest eigenvalue of the Gram matrix.
pub fn is_positive(table: &MomentTable, n: usize, m: usize, tol: f64) -> Result<(bool, f64)> {
    let s = monomials(n, m);
    let g = gram(table, &s, &s)?;
    let ev = linalg::hermitian_eigenvalues(&g);
    let min = ev.first().copied().unwrap_or(0.0);
    Ok((min > tol, min))
}
