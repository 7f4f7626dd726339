mod common;

use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use szego_core::ar::{solve_ar, ArProblem};
use szego_core::moments::{gram, monomials, MomentTable, QuadratureConfig, TrigPoly};
use szego_core::poly::{count_inside, split_stable, BiPoly, UniPoly};
use szego_core::reconstruct::{factor_trig, reconstruct_detailed, reconstruct_p};
use szego_core::sos::{certificate_closed_face, SosConfig};
use szego_core::space::{basis, kernel_eval, MomentSpace, SpaceSpec};
use szego_core::splitshift::{enumerate_split_polys, shift_split_from_p, split_defects};
use szego_core::Complex64 as C;

fn cplx() -> impl Strategy<Value = C> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| C::new(a, b))
}

fn bipoly(nmax: usize, mmax: usize) -> impl Strategy<Value = BiPoly> {
    (0..=nmax, 0..=mmax).prop_flat_map(|(n, m)| {
        prop::collection::vec(cplx(), (n + 1) * (m + 1)).prop_map(move |c| BiPoly::new(n, m, c).unwrap())
    })
}

/// Roots with modulus in `[0.2, 0.9]` or `[1.1, 3]`.
fn split_root() -> impl Strategy<Value = C> {
    (prop_oneof![0.2..0.9f64, 1.1..3.0f64], 0.0..std::f64::consts::TAU).prop_map(|(r, t)| C::from_polar(r, t))
}

fn rel_gap(a: &[C], b: &[C]) -> f64 {
    let scale = b.iter().map(|x| x.norm()).fold(0.0, f64::max);
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / scale
}

/// Reproducing kernel of all polynomials of degree `(j, k)`: `v(z)^T G^{-1} conj(v(ζ))`.
fn full_kernel(t: &MomentTable, j: usize, k: usize, zw: (C, C), ze: (C, C)) -> C {
    let mons = monomials(j, k);
    let ip = gram(t, &mons, &mons).unwrap().transpose();
    let v = |p: (C, C)| DMatrix::from_iterator(mons.len(), 1, mons.iter().map(|&(a, b)| p.0.powu(a as u32) * p.1.powu(b as u32)));
    let x = ip.lu().solve(&v(ze).map(|c| c.conj())).unwrap();
    (v(zw).transpose() * x)[(0, 0)]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn reflect_is_an_involution(p in bipoly(4, 4), dn in 0usize..2, dm in 0usize..2) {
        let (n, m) = p.deg();
        let r = p.reflect(n + dn, m + dm).unwrap().reflect(n + dn, m + dm).unwrap();
        prop_assert!(r.with_degree(n + dn, m + dm).unwrap().sub(&p).max_abs() == 0.0);
    }

    #[test]
    fn reflection_preserves_modulus_on_torus(p in bipoly(4, 4)) {
        prop_assume!(p.max_abs() > 1e-3);
        let (n, m) = p.deg();
        let r = p.reflect(n, m).unwrap();
        for i in 0..12 {
            for j in 0..12 {
                let z = C::from_polar(1.0, 0.5 * i as f64);
                let w = C::from_polar(1.0, 0.5 * j as f64 + 0.1);
                let scale = p.coeffs().iter().map(|c| c.norm()).sum::<f64>();
                prop_assert!((r.eval(z, w).norm() - p.eval(z, w).norm()).abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn split_stable_reproduces_input(roots in prop::collection::vec(split_root(), 1..=8), lead in cplx()) {
        prop_assume!(lead.norm() > 0.1);
        let u = UniPoly::from_roots(&roots).scale(lead);
        let s = split_stable(&u, 1e-6).unwrap();
        prop_assert_eq!(s.beta, roots.iter().filter(|r| r.norm() < 1.0).count());
        prop_assert!(rel_gap(s.stable.mul(&s.unstable).coeffs(), u.coeffs()) <= 1e-10);
    }

    #[test]
    fn roots_satisfy_vieta(roots in prop::collection::vec(split_root(), 1..=10)) {
        let u = UniPoly::from_roots(&roots);
        let back = UniPoly::from_roots(&u.roots().unwrap());
        prop_assert!(rel_gap(back.coeffs(), u.coeffs()) <= 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn moment_tables_are_hermitian_and_real_for_real_p(r in 1.5..3.0f64, a in 1.5..3.0f64, sr in any::<bool>(), sa in any::<bool>()) {
        let r = if sr { r } else { -r };
        let a = if sa { a } else { -a };
        let p = real(&[(0, 0, r), (1, 0, -1.0)]).mul(&real(&[(0, 0, a), (1, 1, -1.0)]));
        let t = table(&p, 3, 3);
        prop_assert_eq!(t.hermitian_defect(), 0.0);
        let c00 = t.get(0, 0).unwrap().re;
        prop_assert!(t.raw().iter().all(|c| c.im.abs() < 1e-12 * c00));
    }

    #[test]
    fn gram_is_positive_definite(seed in 0u64..10_000) {
        let p = mixed_corpus_poly(seed);
        let (n, m) = p.deg();
        let t = table(&p, n, m);
        let (ok, min) = szego_core::moments::is_positive(&t, n, m, 0.0).unwrap();
        prop_assert!(ok, "min eigenvalue {}", min);
    }

    #[test]
    fn reflection_is_anti_unitary(seed in 0u64..10_000, f in bipoly(2, 2), g in bipoly(2, 2)) {
        let p = stable_corpus_poly(seed);
        let (n, m) = p.deg();
        let s = MomentSpace::new(&table(&p, n.max(2), m.max(2)), n.max(2), m.max(2)).unwrap();
        let (k, l) = (2, 2);
        let lhs = s.inner(&f.reflect(k, l).unwrap(), &g.reflect(k, l).unwrap()).unwrap();
        let rhs = s.inner(&g.with_degree(k, l).unwrap(), &f.with_degree(k, l).unwrap()).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
    }

    #[test]
    fn structural_dimensions(seed in 0u64..10_000) {
        let p = mixed_corpus_poly(seed);
        let (n, m) = p.deg();
        let s = MomentSpace::new(&table(&p, n, m), n, m).unwrap();
        for k in 0..=n {
            prop_assert_eq!(basis(&s, &SpaceSpec::E1 { k, l: m }).unwrap().dim(), k + 1);
        }
        for l in 0..=m {
            prop_assert_eq!(basis(&s, &SpaceSpec::E2 { k: n, l }).unwrap().dim(), l + 1);
        }
    }

    #[test]
    fn kernel_subtraction_identity(seed in 0u64..10_000, pts in prop::collection::vec(cplx(), 4)) {
        let p = stable_corpus_poly(seed);
        let (n, m) = p.deg();
        let t = table(&p, n, m);
        let s = MomentSpace::new(&t, n, m).unwrap();
        let (zw, ze) = ((pts[0] * 1.5, pts[1] * 1.5), (pts[2] * 1.5, pts[3] * 1.5));
        for j in 0..=n {
            let e = kernel_eval(&basis(&s, &SpaceSpec::E1 { k: j, l: m }).unwrap(), zw, ze);
            let f = kernel_eval(&basis(&s, &SpaceSpec::F1 { k: j, l: m }).unwrap(), zw, ze);
            let k = full_kernel(&t, j, m - 1, zw, ze);
            let rhs = (C::new(1.0, 0.0) - zw.1 * ze.1.conj()) * k;
            prop_assert!((e - f - rhs).norm() <= 1e-8 * (1.0 + e.norm() + f.norm()));
        }
    }

    #[test]
    fn p_is_orthogonal_to_upper_monomials(seed in 0u64..10_000) {
        let p = mixed_corpus_poly(seed);
        let (n, m) = p.deg();
        let s = MomentSpace::new(&table(&p, n, m), n, m).unwrap();
        let pn = s.norm(&p).unwrap();
        for j in 0..=n {
            for k in 1..=m {
                let mono = BiPoly::from_terms(&[(j, k, c(1.0))]);
                let ip = s.inner(&p, &mono).unwrap();
                prop_assert!(ip.norm() <= 1e-9 * pn * s.norm(&mono).unwrap());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 10, ..ProptestConfig::default() })]

    #[test]
    fn split_dimension_counts_disk_roots(seed in 0u64..10_000) {
        let p = mixed_corpus_poly(seed);
        let (n, m) = p.deg();
        let s = MomentSpace::new(&table(&p, n, m), n, m).unwrap();
        for sp in enumerate_split_polys(&p, 1e-8).unwrap() {
            let split = shift_split_from_p(&s, &sp.poly).unwrap();
            prop_assert_eq!(split.k1.dim(), sp.d);
            prop_assert_eq!(count_inside(&sp.poly.at_w0()).unwrap(), sp.d);
            prop_assert!(split_defects(&s, &split, n, m).unwrap().max() < 1e-8);
        }
    }

    #[test]
    fn reconstruction_round_trip(seed in 0u64..10_000) {
        let p = mixed_corpus_poly(seed);
        let (n, m) = p.deg();
        let r = reconstruct_detailed(&window(&p), n, m, 1e-8).unwrap();
        prop_assert!(r.q_min_root > 1.0 + 1e-6);
        prop_assert!(modulus_gap(&r.p, &p, 64) <= 1e-6);
    }

    #[test]
    fn factorization_is_idempotent(seed in 0u64..10_000) {
        let p = stable_corpus_poly(seed);
        let cfg = QuadratureConfig::default();
        let f1 = factor_trig(&TrigPoly::modulus_squared(&p), &cfg, 1e-8).unwrap();
        let f2 = factor_trig(&TrigPoly::modulus_squared(&f1), &cfg, 1e-8).unwrap();
        prop_assert!(f1.sub(&f2).max_abs() <= 1e-7 * f1.max_abs());
    }

    #[test]
    fn window_growth_keeps_p(seed in 0u64..10_000) {
        let p = stable_corpus_poly(seed);
        let (n, m) = p.deg();
        let t = table(&p, n, m + 1);
        let a = reconstruct_p(&t, n, m, 1e-8).unwrap();
        let b = reconstruct_p(&t, n, m + 1, 1e-8).unwrap();
        prop_assert!(b.with_degree(n, m + 1).unwrap().sub(&a.with_degree(n, m + 1).unwrap()).max_abs() <= 1e-7);
    }

    #[test]
    fn certificate_counts_and_orthonormality(seed in 0u64..10_000) {
        let p = mixed_corpus_poly(seed);
        let (n, m) = p.deg();
        let cert = certificate_closed_face(&p, &SosConfig::default()).unwrap();
        let n2 = count_inside(&p.at_w0()).unwrap();
        prop_assert_eq!((cert.a.len(), cert.n1, cert.n2), (m, n - n2, n2));
        let s = MomentSpace::new(&window(&p), n, m).unwrap();
        for list in [&cert.a, &cert.b, &cert.c] {
            for (i, f) in list.iter().enumerate() {
                for (j, g) in list.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((s.inner(f, g).unwrap() - c(want)).norm() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn ar_classification_is_scale_invariant(seed in 0u64..10_000, stable in any::<bool>()) {
        let p = if stable { stable_corpus_poly(seed) } else { mixed_corpus_poly(seed) };
        let (n, m) = p.deg();
        let base = ArProblem { n, m, autocorr: window(&p) };
        let want = solve_ar(&base, 1e-8).unwrap().classification;
        for s in [1e-3, 1e3] {
            let scaled = ArProblem { autocorr: base.autocorr.scaled(s), ..base.clone() };
            prop_assert_eq!(solve_ar(&scaled, 1e-8).unwrap().classification, want);
        }
    }
}
