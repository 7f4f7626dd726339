//! Generalized distinguished varieties: geometry and self-reflectivity tests
//! and determinantal representations `p = const * det(U Δ - Γ)`.

use num_complex::Complex64 as C;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::poly::{count_inside, unit, BiPoly};
use crate::sos::{certificate_open_face, SosConfig, Variant};

/// Worst deviation of `|w|` from 1 over the zeros of `p(z, .)`, `z` on a circle grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeometryReport {
    pub passes: bool,
    pub worst: f64,
    pub worst_z: [f64; 2],
    pub grid: usize,
}

/// Determinantal representation `det(U Δ(z,w) - Γ(z,w)) = scale * p(z,w)` with
/// `Δ = diag(w I_m, z I_n1, I_n2)` and `Γ = diag(I_m, I_n1, z I_n2)`.
#[derive(Clone, Debug)]
pub struct DetRep {
    pub u: CMat,
    pub m: usize,
    pub n1: usize,
    pub n2: usize,
    pub scale: C,
    /// Largest relative deviation of `det / p` from `scale` at off-variety test points.
    pub residual: f64,
    /// `||U^* U - I||`
    pub unitarity: f64,
    /// Largest `|det(UΔ - Γ)| / |scale|` over fresh points of the zero set.
    pub on_variety: f64,
}

impl DetRep {
    pub fn det_at(&self, z: C, w: C) -> C {
        let k = self.u.nrows();
        let mut mat = CMat::zeros(k, k);
        for r in 0..k {
            for c in 0..k {
                let delta = if c < self.m {
                    w
                } else if c < self.m + self.n1 {
                    z
                } else {
                    C::new(1.0, 0.0)
                };
                mat[(r, c)] = self.u[(r, c)] * delta;
            }
            let gamma = if r < self.m + self.n1 { C::new(1.0, 0.0) } else { z };
            mat[(r, r)] -= gamma;
        }
        if k == 0 {
            return C::new(1.0, 0.0);
        }
        mat.determinant()
    }
}

#[derive(Clone, Debug)]
pub struct DetRepConfig {
    /// Number of z-samples on the circle for the zero-set fit.
    pub samples: usize,
    /// Tolerance on `| |w| - 1 |` for the geometry test.
    pub geometry_tol: f64,
    /// Tolerance on the self-reflectivity residual.
    pub reflect_tol: f64,
    /// Tolerance on the relative determinant residual.
    pub tol: f64,
    pub seed: u64,
    pub sos: SosConfig,
}

impl Default for DetRepConfig {
    fn default() -> Self {
        DetRepConfig { samples: 128, geometry_tol: 1e-6, reflect_tol: 1e-8, tol: 1e-6, seed: 0, sos: SosConfig::default() }
    }
}

fn check_no_z_factor(p: &BiPoly) -> Result<()> {
    if p.deg().1 == 0 || p.z_only_factor(1e-6)?.degree() > 0 {
        return Err(Error::ZOnlyFactor);
    }
    Ok(())
}

/// Finds the unimodular `mu` with `p = mu p~`.
pub fn check_self_reflective(p: &BiPoly, tol: f64) -> Result<C> {
    let p = p.trimmed(0.0);
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    check_no_z_factor(&p)?;
    let r = p.reflect_declared();
    let num: C = r.coeffs().iter().zip(p.coeffs()).map(|(a, b)| a.conj() * b).sum();
    let den: f64 = r.coeffs().iter().map(|a| a.norm_sqr()).sum();
    let mu = num / den;
    let residual = (p.sub(&r.scale(mu)).coeff_norm() / p.coeff_norm()).max((mu.norm() - 1.0).abs());
    if residual > tol {
        return Err(Error::NotSelfReflective { residual });
    }
    Ok(mu / mu.norm())
}

/// `sqrt(conj(mu)) p` (principal branch), which equals its own reflection when `p = mu p~`.
pub fn normalize_self_reflective(p: &BiPoly, mu: C) -> BiPoly {
    p.scale(mu.conj().sqrt())
}

/// Tests that every zero `w` of `p(z, .)` is unimodular for `z` on a grid of the circle.
pub fn check_gdv_geometry(p: &BiPoly, grid: usize, tol: f64) -> Result<GeometryReport> {
    let p = p.trimmed(0.0);
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let m = p.deg().1;
    let lead_row = p.w_row(m);
    let lead_max = p.max_abs();
    for offset in [0.0, 0.5] {
        let mut report = GeometryReport { passes: true, worst: 0.0, worst_z: [1.0, 0.0], grid };
        let mut degenerate = false;
        for i in 0..grid {
            let z = C::from_polar(1.0, std::f64::consts::TAU * (i as f64 + offset) / grid as f64);
            if lead_row.eval(z).norm() <= 1e-10 * lead_max {
                degenerate = true;
                break;
            }
            for w in p.slice_w(z).roots()? {
                let dev = (w.norm() - 1.0).abs();
                if dev > report.worst {
                    report.worst = dev;
                    report.worst_z = [z.re, z.im];
                }
            }
        }
        if !degenerate {
            report.passes = report.worst < tol;
            return Ok(report);
        }
    }
    Err(Error::DegenerateSlice)
}

/// Checks `m p = rev(dp/dw) + w dp/dw`, reflecting `dp/dw` at `(n, m - 1)`.
/// Returns whether it holds and the relative coefficient residual.
pub fn derivative_identity_check(p: &BiPoly, tol: f64) -> Result<(bool, f64)> {
    let p = p.trimmed(0.0);
    let (n, m) = p.deg();
    if m == 0 {
        return Err(Error::InvalidInput("polynomial has no w-dependence".into()));
    }
    let d = p.d_dw();
    let rhs = d.reflect(n, m - 1)?.add(&d.shift(0, 1));
    let residual = p.scale(C::new(m as f64, 0.0)).sub(&rhs).coeff_norm() / (m as f64 * p.coeff_norm());
    Ok((residual <= tol, residual))
}

/// Builds a determinantal representation of `p` by fitting a unitary to the
/// lurking-isometry data sampled on the zero set.
pub fn build_detrep(p: &BiPoly, cfg: &DetRepConfig) -> Result<DetRep> {
    let p = p.trimmed(0.0);
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    check_no_z_factor(&p)?;
    let geo = check_gdv_geometry(&p, cfg.samples, cfg.geometry_tol)?;
    if !geo.passes {
        return Err(Error::NotGdv { worst: geo.worst });
    }
    let mu = check_self_reflective(&p, cfg.reflect_tol)?;
    let ps = normalize_self_reflective(&p, mu);
    let (n, m) = ps.deg();
    let big_p = ps.d_dw().reflect(n, m - 1)?;
    let cert = certificate_open_face(&big_p, Variant::G, &cfg.sos)
        .map_err(|e| Error::CertificateFailed(e.to_string()))?;
    let n2 = count_inside(&ps.at_w0())?;
    if cert.n2 != n2 || cert.a.len() != m || cert.n1 + cert.n2 != n {
        return Err(Error::CertificateFailed(format!(
            "block sizes (m, n1, n2) = ({}, {}, {}) do not match ({m}, {}, {n2})",
            cert.a.len(),
            cert.n1,
            cert.n2,
            n - n2
        )));
    }
    let k = m + n;
    let column = |z: C, w: C| -> (Vec<C>, Vec<C>) {
        let mut x = Vec::with_capacity(k);
        let mut y = Vec::with_capacity(k);
        for a in &cert.a {
            let v = a.eval(z, w);
            x.push(w * v);
            y.push(v);
        }
        for b in &cert.b {
            let v = b.eval(z, w);
            x.push(z * v);
            y.push(v);
        }
        for c in &cert.c {
            let v = c.eval(z, w);
            x.push(v);
            y.push(z * v);
        }
        (x, y)
    };
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 0..cfg.samples {
        let z = unit(i, cfg.samples);
        for w in ps.slice_w(z).roots()? {
            let (x, y) = column(z, w);
            xs.extend(x);
            ys.extend(y);
        }
    }
    let cols = xs.len() / k.max(1);
    let xm = CMat::from_column_slice(k, cols, &xs);
    let ym = CMat::from_column_slice(k, cols, &ys);
    let u = linalg::polar_unitary(&(&ym * xm.adjoint()));
    let unitarity = (u.adjoint() * &u - CMat::identity(k, k)).norm();

    let mut rep = DetRep { u, m, n1: cert.n1, n2: cert.n2, scale: C::new(1.0, 0.0), residual: 0.0, unitarity, on_variety: 0.0 };
    let mut rng = StdRng::seed_from_u64(cfg.seed);
    let mut ratios = Vec::with_capacity(100);
    while ratios.len() < 100 {
        let z = C::from_polar(2.0 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU));
        let w = C::from_polar(2.0 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU));
        let pv = p.eval(z, w);
        if pv.norm() < 1e-3 * p.max_abs() {
            continue;
        }
        ratios.push(rep.det_at(z, w) / pv);
    }
    let median = |mut v: Vec<f64>| {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let l = v.len();
        if l % 2 == 1 { v[l / 2] } else { 0.5 * (v[l / 2 - 1] + v[l / 2]) }
    };
    let scale = C::new(median(ratios.iter().map(|r| r.re).collect()), median(ratios.iter().map(|r| r.im).collect()));
    if scale.norm() == 0.0 {
        return Err(Error::FitResidualTooLarge { residual: f64::INFINITY });
    }
    rep.scale = scale;
    rep.residual = ratios.iter().map(|r| (r - scale).norm() / scale.norm()).fold(0.0, f64::max);
    for _ in 0..50 {
        let z = C::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
        for w in ps.slice_w(z).roots()? {
            rep.on_variety = rep.on_variety.max(rep.det_at(z, w).norm() / scale.norm());
        }
    }
    if rep.residual > cfg.tol || rep.unitarity > 1e-8 {
        return Err(Error::FitResidualTooLarge { residual: rep.residual.max(rep.unitarity) });
    }
    Ok(rep)
}
