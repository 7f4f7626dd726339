//! Sums of hermitian squares certifying `|p|^2 - |p~|^2` on the bidisk, built
//! from the shift-split of the Bernstein-Szegő space of `p`.

use num_complex::Complex64 as C;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::moments::{moments_from_density, QuadratureConfig};
use crate::poly::{gcd_approx, BiPoly};
use crate::space::{basis, MomentSpace, SpaceSpec, SubspaceBasis};
use crate::splitshift::shift_split_from_p;

/// Which kernel identity the certificate realizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    /// `p p* - p~ p~* = (1 - w eta*) A*A + (1 - z zeta*)(B*B - C*C)`
    L,
    /// `p p* - w eta* p~ p~* = (1 - w eta*) A*A + (1 - z zeta*)(B*B - C*C)`
    G,
}

#[derive(Clone, Debug)]
pub struct SosCertificate {
    pub a: Vec<BiPoly>,
    pub b: Vec<BiPoly>,
    pub c: Vec<BiPoly>,
    pub n1: usize,
    pub n2: usize,
    pub residual: f64,
    pub variant: Variant,
    /// Scaling parameter at which the certificate was built (1 for the closed face).
    pub t: f64,
}

/// Residual of a certificate against its identity.
#[derive(Clone, Debug)]
pub struct CertCheck {
    /// Largest relative residual of the two-point kernel identity.
    pub residual: f64,
    /// Largest relative residual of the diagonal identity.
    pub diagonal_residual: f64,
    pub worst_point: [C; 4],
}

/// Settings shared by the certificate constructions.
#[derive(Clone, Debug)]
pub struct SosConfig {
    pub quadrature: QuadratureConfig,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    /// Values of `t < 1` for the scaling `p(z, t w)` on the open face.
    pub schedule: Vec<f64>,
}

impl Default for SosConfig {
    fn default() -> Self {
        SosConfig {
            quadrature: QuadratureConfig::default(),
            samples: 200,
            seed: 0,
            tol: 1e-8,
            schedule: vec![0.9, 0.99, 0.999, 0.9999],
        }
    }
}

/// L-form certificate for `p` with no zeros on `T x closed disk`.
pub fn certificate_closed_face(p: &BiPoly, cfg: &SosConfig) -> Result<SosCertificate> {
    certificate_closed_face_variant(p, Variant::L, cfg)
}

pub fn certificate_closed_face_variant(p: &BiPoly, variant: Variant, cfg: &SosConfig) -> Result<SosCertificate> {
    let (a, b, c) = certificate_lists(p, variant, &cfg.quadrature)?;
    let mut cert = SosCertificate { n1: b.len(), n2: c.len(), a, b, c, residual: 0.0, variant, t: 1.0 };
    cert.residual = verify_certificate(p, &cert, cfg.samples, cfg.seed).residual;
    Ok(cert)
}

fn certificate_lists(p: &BiPoly, variant: Variant, quad: &QuadratureConfig) -> Result<(Vec<BiPoly>, Vec<BiPoly>, Vec<BiPoly>)> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let (n, m) = p.deg();
    // zeros of p(z, 0) near the circle are reported before the quadrature runs
    crate::poly::split_stable(&p.at_w0(), crate::splitshift::ROOT_MARGIN)?;
    let table = moments_from_density(p, n, m, quad)?;
    let space = MomentSpace::new(&table, n, m)?;
    let split = shift_split_from_p(&space, p)?;
    let a = match variant {
        Variant::L if m == 0 => SubspaceBasis::empty(n, 0),
        Variant::L => basis(&space, &SpaceSpec::E2 { k: n, l: m - 1 })?,
        Variant::G => basis(&space, &SpaceSpec::E2 { k: n, l: m })?,
    };
    let b: Vec<BiPoly> = if n > 0 {
        let r = split.k2.reflected(n - 1, m)?.polys();
        match variant {
            Variant::L => r,
            Variant::G => r.iter().map(|x| x.shift(0, 1)).collect(),
        }
    } else {
        vec![]
    };
    Ok((a.polys(), b, split.k1.polys()))
}

/// Certificate for `p` with no zeros on `T x open disk` sharing no factor with `p~`.
/// The closed-face construction is tried first; otherwise the certificate of
/// `p(z, t w)` is tested against the identity of `p` for each `t` in the schedule.
pub fn certificate_open_face(p: &BiPoly, variant: Variant, cfg: &SosConfig) -> Result<SosCertificate> {
    if shares_factor_with_reflection(p, cfg.seed)? {
        return Err(Error::CommonFactor);
    }
    let mut best = f64::INFINITY;
    if let Ok(cert) = certificate_closed_face_variant(p, variant, cfg) {
        if cert.residual < cfg.tol {
            return Ok(cert);
        }
        best = cert.residual;
    }
    let mut chosen: Option<SosCertificate> = None;
    for &t in &cfg.schedule {
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::InvalidInput(format!("schedule entry {t} is not in (0, 1)")));
        }
        let pt = p.scale_w(C::new(t, 0.0));
        let (a, b, c) = match certificate_lists(&pt, variant, &cfg.quadrature) {
            Ok(x) => x,
            Err(Error::MomentDivergence { .. }) | Err(Error::RootNearTorus { .. }) | Err(Error::DegenerateForm(_)) => {
                continue
            }
            Err(e) => return Err(e),
        };
        let mut cert = SosCertificate { n1: b.len(), n2: c.len(), a, b, c, residual: 0.0, variant, t };
        cert.residual = verify_certificate(p, &cert, cfg.samples, cfg.seed).residual;
        best = best.min(cert.residual);
        if cert.residual < cfg.tol {
            chosen = Some(cert);
        }
    }
    chosen.ok_or(Error::NoConvergence { best_residual: best })
}

/// Whether `p` and its reflection have a common factor, tested on generic slices in both variables.
pub fn shares_factor_with_reflection(p: &BiPoly, seed: u64) -> Result<bool> {
    let r = p.reflect_declared();
    let mut rng = StdRng::seed_from_u64(seed ^ 0x5eed_cafe);
    let z0 = C::from_polar(rng.gen_range(0.3..0.8), rng.gen_range(0.0..std::f64::consts::TAU));
    let w0 = C::from_polar(rng.gen_range(0.3..0.8), rng.gen_range(0.0..std::f64::consts::TAU));
    let shared = |a: crate::poly::UniPoly, b: crate::poly::UniPoly| -> Result<bool> {
        if a.trimmed(1e-12).degree() == 0 || b.trimmed(1e-12).degree() == 0 {
            return Ok(false);
        }
        Ok(gcd_approx(&[a, b], 1e-6)?.degree() > 0)
    };
    Ok(shared(p.slice_w(z0), r.slice_w(z0))? || shared(p.slice_z(w0), r.slice_z(w0))?)
}

fn sum_products(list: &[BiPoly], x: (C, C), y: (C, C)) -> (C, f64) {
    let mut s = C::new(0.0, 0.0);
    let mut mag = 0.0;
    for f in list {
        let a = f.eval(x.0, x.1);
        let b = f.eval(y.0, y.1).conj();
        s += a * b;
        mag += a.norm() * b.norm();
    }
    (s, mag)
}

/// Difference of the two sides of the identity at `(x, y)` and a magnitude scale.
fn identity_gap(p: &BiPoly, pr: &BiPoly, cert: &SosCertificate, x: (C, C), y: (C, C)) -> (f64, f64) {
    let one = C::new(1.0, 0.0);
    let wy = x.1 * y.1.conj();
    let zy = x.0 * y.0.conj();
    let pp = p.eval(x.0, x.1) * p.eval(y.0, y.1).conj();
    let rr = pr.eval(x.0, x.1) * pr.eval(y.0, y.1).conj();
    let lhs = match cert.variant {
        Variant::L => pp - rr,
        Variant::G => pp - wy * rr,
    };
    let (sa, ma) = sum_products(&cert.a, x, y);
    let (sb, mb) = sum_products(&cert.b, x, y);
    let (sc, mc) = sum_products(&cert.c, x, y);
    let rhs = (one - wy) * sa + (one - zy) * (sb - sc);
    let scale = pp.norm() + rr.norm() * wy.norm().max(1.0) + (one - wy).norm() * ma + (one - zy).norm() * (mb + mc);
    ((lhs - rhs).norm(), scale.max(f64::MIN_POSITIVE))
}

fn random_point(rng: &mut StdRng, radius: f64) -> C {
    C::from_polar(radius * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Evaluates the certificate identity for `p` at `samples` random point pairs
/// (and their diagonal) in the polydisk of radius 1.5.
pub fn verify_certificate(p: &BiPoly, cert: &SosCertificate, samples: usize, seed: u64) -> CertCheck {
    let pr = p.reflect_declared();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = CertCheck { residual: 0.0, diagonal_residual: 0.0, worst_point: [C::new(0.0, 0.0); 4] };
    for _ in 0..samples {
        let pts: Vec<C> = (0..4).map(|_| random_point(&mut rng, 1.5)).collect();
        let x = (pts[0], pts[1]);
        let y = (pts[2], pts[3]);
        let (gap, scale) = identity_gap(p, &pr, cert, x, y);
        if gap / scale > out.residual {
            out.residual = gap / scale;
            out.worst_point = [pts[0], pts[1], pts[2], pts[3]];
        }
        let (gap, scale) = identity_gap(p, &pr, cert, x, x);
        out.diagonal_residual = out.diagonal_residual.max(gap / scale);
    }
    out.residual = out.residual.max(out.diagonal_residual);
    out
}

/// Inertia `(positive, negative)` of the hermitian form `sum b b^H - sum c c^H`
/// on coefficient vectors; for a valid certificate this is `(n1, n2)`.
pub fn certificate_inertia(cert: &SosCertificate, tol: f64) -> (usize, usize) {
    let all: Vec<&BiPoly> = cert.b.iter().chain(cert.c.iter()).collect();
    if all.is_empty() {
        return (0, 0);
    }
    let n = all.iter().map(|p| p.deg().0).max().unwrap();
    let m = all.iter().map(|p| p.deg().1).max().unwrap();
    let dim = (n + 1) * (m + 1);
    let vec_of = |p: &BiPoly| {
        let q = p.with_degree(n, m).expect("degree fits");
        CMat::from_column_slice(dim, 1, q.coeffs())
    };
    let mut h = CMat::zeros(dim, dim);
    for p in &cert.b {
        let v = vec_of(p);
        h += &v * v.adjoint();
    }
    for p in &cert.c {
        let v = vec_of(p);
        h -= &v * v.adjoint();
    }
    let ev = linalg::hermitian_eigenvalues(&h);
    let scale = ev.iter().map(|x| x.abs()).fold(0.0, f64::max);
    (
        ev.iter().filter(|&&x| x > tol * scale).count(),
        ev.iter().filter(|&&x| x < -tol * scale).count(),
    )
}
