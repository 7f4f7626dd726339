#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use szego_core::moments::{moments_from_density, MomentTable, QuadratureConfig};
use szego_core::poly::{BiPoly, UniPoly};
use szego_core::Complex64 as C;

pub fn c(x: f64) -> C {
    C::new(x, 0.0)
}

pub fn real(terms: &[(usize, usize, f64)]) -> BiPoly {
    BiPoly::from_real_terms(terms)
}

pub fn polar(rng: &mut StdRng, lo: f64, hi: f64) -> C {
    C::from_polar(rng.gen_range(lo..hi), rng.gen_range(0.0..std::f64::consts::TAU))
}

/// `q(z) * prod (alpha_i - z w)` with `q` free of zeros on the closed disk,
/// `deg q <= 2`, one or two factors and `|alpha_i| >= 1.5`.
pub fn stable_corpus_poly(seed: u64) -> BiPoly {
    let mut rng = StdRng::seed_from_u64(seed);
    let nq = rng.gen_range(0..=2);
    let roots: Vec<C> = (0..nq).map(|_| polar(&mut rng, 1.5, 3.0)).collect();
    let mut p = BiPoly::from_uni_z(&UniPoly::from_roots(&roots));
    for _ in 0..rng.gen_range(1..=2) {
        let a = polar(&mut rng, 1.5, 3.0);
        p = p.mul(&BiPoly::from_terms(&[(0, 0, a), (1, 1, c(-1.0))]));
    }
    p
}

/// Stable corpus polynomial times `(1 - rho z)` with `|rho| > 1`, giving one
/// zero of `p(z, 0)` in the disk.
pub fn mixed_corpus_poly(seed: u64) -> BiPoly {
    let mut rng = StdRng::seed_from_u64(seed ^ 0x5eed);
    let rho = polar(&mut rng, 1.5, 3.0);
    stable_corpus_poly(seed).mul(&BiPoly::from_terms(&[(0, 0, c(1.0)), (1, 0, -rho)]))
}

pub fn table(p: &BiPoly, jmax: usize, kmax: usize) -> MomentTable {
    moments_from_density(p, jmax, kmax, &QuadratureConfig::default()).unwrap()
}

pub fn window(p: &BiPoly) -> MomentTable {
    let (n, m) = p.deg();
    table(p, n, m)
}

/// Largest `| |a|^2 - |b|^2 |` over an `s x s` grid of the torus, relative to `max |b|^2`.
pub fn modulus_gap(a: &BiPoly, b: &BiPoly, s: usize) -> f64 {
    let mut worst: f64 = 0.0;
    let mut top: f64 = 0.0;
    for i in 0..s {
        for j in 0..s {
            let z = C::from_polar(1.0, std::f64::consts::TAU * i as f64 / s as f64);
            let w = C::from_polar(1.0, std::f64::consts::TAU * j as f64 / s as f64);
            let (x, y) = (a.eval(z, w).norm_sqr(), b.eval(z, w).norm_sqr());
            worst = worst.max((x - y).abs());
            top = top.max(y);
        }
    }
    worst / top
}
