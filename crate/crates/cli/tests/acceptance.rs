//! Acceptance criteria 1-11. Each criterion prints one PASS/FAIL line.
//! Run with `cargo test -p szego-cli --test acceptance -- --nocapture`.

use std::io::Write;
use std::process::{Command, Stdio};
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use szego_core::ar::{solve_ar, ArProblem, Classification};
use szego_core::fullmeasure::{check_full_measure, Verdict};
use szego_core::gdv::{build_detrep, DetRepConfig};
use szego_core::json;
use szego_core::moments::{moments_from_density, MomentTable, QuadratureConfig};
use szego_core::poly::{count_inside, BiPoly, UniPoly};
use szego_core::reconstruct::reconstruct_p;
use szego_core::sos::{certificate_closed_face, certificate_inertia, verify_certificate, SosConfig};
use szego_core::space::MomentSpace;
use szego_core::splitshift::{
    build_operators, check_matrix_condition, enumerate_split_polys, gw_check, split_defects, split_poly_from_condition,
};
use szego_core::{Complex64 as C, Error};

/// Criteria that cannot pass as written; see the note printed with each.
const SPEC_DEFECTS: &[(usize, &str)] = &[(
    10,
    "1/|(1-2z)(2-w)|^2 equals 1/|(2-z)(2-w)|^2 on the torus, a stable product, so the measure is causal",
)];

struct Outcome {
    id: usize,
    pass: bool,
    detail: String,
}

fn c(x: f64) -> C {
    C::new(x, 0.0)
}

fn real(terms: &[(usize, usize, f64)]) -> BiPoly {
    BiPoly::from_real_terms(terms)
}

fn polar(rng: &mut StdRng, lo: f64, hi: f64) -> C {
    C::from_polar(rng.gen_range(lo..hi), rng.gen_range(0.0..std::f64::consts::TAU))
}

/// `q(z) * prod (alpha - z w)`, `q` free of zeros on the closed disk with `deg q <= 2`, `|alpha| >= 1.5`.
fn corpus(seed: u64) -> BiPoly {
    let mut rng = StdRng::seed_from_u64(seed);
    let nq = rng.gen_range(0..=2);
    let roots: Vec<C> = (0..nq).map(|_| polar(&mut rng, 1.5, 3.0)).collect();
    let mut p = BiPoly::from_uni_z(&UniPoly::from_roots(&roots));
    for _ in 0..rng.gen_range(1..=2) {
        p = p.mul(&BiPoly::from_terms(&[(0, 0, polar(&mut rng, 1.5, 3.0)), (1, 1, c(-1.0))]));
    }
    p
}

/// Corpus polynomial with one extra zero of `p(z, 0)` inside the disk.
fn admissible(seed: u64) -> BiPoly {
    let mut rng = StdRng::seed_from_u64(seed ^ 0xadd);
    let rho = polar(&mut rng, 1.5, 3.0);
    corpus(seed).mul(&BiPoly::from_terms(&[(0, 0, c(1.0)), (1, 0, -rho)]))
}

fn table(p: &BiPoly, j: usize, k: usize) -> MomentTable {
    moments_from_density(p, j, k, &QuadratureConfig::default()).unwrap()
}

fn window(p: &BiPoly) -> MomentTable {
    let (n, m) = p.deg();
    table(p, n, m)
}

fn torus(s: usize) -> impl Iterator<Item = (C, C)> {
    (0..s * s).map(move |i| {
        let t = std::f64::consts::TAU / s as f64;
        (C::from_polar(1.0, t * (i / s) as f64), C::from_polar(1.0, t * (i % s) as f64))
    })
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let cfg = QuadratureConfig { max_grid: 256, ..QuadratureConfig::default() };
    let t = moments_from_density(&real(&[(0, 0, 2.0), (1, 1, -1.0)]), 3, 3, &cfg);
    let elapsed = start.elapsed().as_secs_f64();
    let Ok(t) = t else {
        return Outcome { id: 1, pass: false, detail: "quadrature did not converge on grids up to 256".into() };
    };
    let err = (-3i64..=3).map(|j| (t.at(j, j) - c(0.5f64.powi(j.abs() as i32) / 3.0)).norm()).fold(0.0, f64::max);
    Outcome {
        id: 1,
        pass: err < 1e-10 && elapsed < 1.0,
        detail: format!("max |c_jj - 2^-|j|/3| = {err:.2e}, grid <= 256, {elapsed:.3}s"),
    }
}

fn criterion_2() -> Outcome {
    let mut worst = [0.0f64; 3];
    let mut failures = Vec::new();
    for seed in 0..20 {
        let p = corpus(seed);
        let (n, m) = p.deg();
        let t = window(&p);
        let s = MomentSpace::new(&t, n, m).unwrap();
        let r = check_matrix_condition(&build_operators(&s, n, m).unwrap(), 1e-8);
        worst[0] = worst[0].max(r.max_violation);
        let Some((d, _)) = r.admissible() else {
            failures.push(seed);
            continue;
        };
        match split_poly_from_condition(&s, n, m, d, 1e-8) {
            Ok(split) => {
                worst[1] = worst[1].max(split_defects(&s, &split, n, m).unwrap().max());
                let model = table(&split.split_poly, n, m);
                worst[2] = worst[2].max(model.max_diff(&t));
            }
            Err(_) => failures.push(seed),
        }
    }
    Outcome {
        id: 2,
        pass: failures.is_empty() && worst[0] < 1e-8 && worst[1] < 1e-8 && worst[2] < 1e-7,
        detail: format!(
            "20 polynomials: max ||A T^j B|| = {:.2e}, split orthogonality defect = {:.2e}, moment mismatch = {:.2e}, failures {:?}",
            worst[0], worst[1], worst[2], failures
        ),
    }
}

fn criterion_3() -> Outcome {
    let mut ok = true;
    let mut stable_cross: f64 = 0.0;
    for seed in 0..20 {
        let p = corpus(seed);
        let (n, m) = p.deg();
        let s = MomentSpace::new(&window(&p), n, m).unwrap();
        let gw = gw_check(&s, n, m, 1e-8).unwrap();
        let r = check_matrix_condition(&build_operators(&s, n, m).unwrap(), 1e-8);
        stable_cross = stable_cross.max(gw.cross_norm);
        ok &= gw.holds && r.dim_a == 0;
    }
    // measures whose admissible d starts at 1
    let forced = [
        real(&[(0, 0, 1.0), (1, 0, -2.0), (0, 1, 0.5)]),
        real(&[(0, 0, 1.0), (1, 0, -2.0), (0, 1, 0.5)]).mul(&real(&[(0, 0, 2.0), (1, 1, -1.0)])),
    ];
    let mut unstable = Vec::new();
    for p in &forced {
        let (n, m) = p.deg();
        let s = MomentSpace::new(&window(p), n, m).unwrap();
        let r = check_matrix_condition(&build_operators(&s, n, m).unwrap(), 1e-8);
        let gw = gw_check(&s, n, m, 1e-8).unwrap();
        ok &= r.d_min.is_some_and(|d| d >= 1) && !gw.holds;
        unstable.push(format!("d in {:?}, gw cross {:.2e}", r.admissible(), gw.cross_norm));
    }
    Outcome {
        id: 3,
        pass: ok,
        detail: format!("stable corpus cross-Gram <= {stable_cross:.2e} with dim A = 0; d >= 1 inputs: {}", unstable.join("; ")),
    }
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut errors = Vec::new();
    for seed in 100..110 {
        let p = admissible(seed);
        let (n, m) = p.deg();
        match reconstruct_p(&window(&p), n, m, 1e-8) {
            Ok(r) => {
                let (mut gap, mut top) = (0.0f64, 0.0f64);
                for (z, w) in torus(256) {
                    let (a, b) = (r.eval(z, w).norm_sqr(), p.eval(z, w).norm_sqr());
                    gap = gap.max((a - b).abs());
                    top = top.max(b);
                }
                worst = worst.max(gap / top);
            }
            Err(e) => errors.push(format!("{e:?}")),
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    Outcome {
        id: 4,
        pass: errors.is_empty() && worst <= 1e-6 && elapsed < 30.0,
        detail: format!("10 polynomials: max | |p^|^2 - |p|^2 | / max |p|^2 = {worst:.2e} on 256^2, {elapsed:.2}s, errors {errors:?}"),
    }
}

fn criterion_5() -> Outcome {
    let p = real(&[(0, 0, 3.0), (1, 0, -1.0)])
        .mul(&real(&[(0, 0, 2.0), (1, 0, -1.0)]))
        .mul(&real(&[(0, 0, 2.0), (1, 1, -1.0)]));
    let list = enumerate_split_polys(&p, 1e-8).unwrap();
    let pr = &p;
    let ds: Vec<usize> = list.iter().map(|s| s.d).collect();
    let top = torus(64).map(|(z, w)| p.eval(z, w).norm()).fold(0.0, f64::max);
    let gap = list
        .iter()
        .flat_map(|s| torus(64).map(move |(z, w)| (s.poly.eval(z, w).norm() - pr.eval(z, w).norm()).abs()))
        .fold(0.0, f64::max)
        / top;
    let (n, m) = p.deg();
    let s = MomentSpace::new(&window(&p), n, m).unwrap();
    let interval = check_matrix_condition(&build_operators(&s, n, m).unwrap(), 1e-8).admissible();
    Outcome {
        id: 5,
        pass: ds == vec![0, 1, 1, 2] && gap < 1e-8 && interval == Some((0, 2)),
        detail: format!("d = {ds:?}, modulus gap {gap:.2e}, admissible {interval:?}"),
    }
}

fn criterion_6() -> Outcome {
    let cfg = SosConfig::default();
    let mut rng = StdRng::seed_from_u64(6);
    let p = real(&[(0, 0, 2.0), (1, 1, -1.0)]);
    let cert = certificate_closed_face(&p, &cfg).unwrap();
    let sq = |v: &[BiPoly], z: C, w: C| v.iter().map(|f| f.eval(z, w).norm_sqr()).sum::<f64>();
    let mut analytic: f64 = 0.0;
    for _ in 0..200 {
        let (z, w) = (polar(&mut rng, 0.0, 1.5), polar(&mut rng, 0.0, 1.5));
        let (az, aw) = (z.norm_sqr(), w.norm_sqr());
        let lhs = (1.0 - aw) * sq(&cert.a, z, w) + (1.0 - az) * (sq(&cert.b, z, w) - sq(&cert.c, z, w));
        let rhs = 3.0 * (1.0 - aw) + 3.0 * aw * (1.0 - az);
        analytic = analytic.max((lhs - rhs).abs());
    }
    let counts = (cert.a.len(), cert.n1, cert.n2);
    let q = real(&[(0, 0, 1.0), (1, 0, -2.0)]);
    let cq = certificate_closed_face(&q, &cfg).unwrap();
    let c1 = cq.c.first().map(|f| f.eval(c(0.3), c(0.0)).norm()).unwrap_or(0.0);
    let mut kernel: f64 = 0.0;
    for seed in 0..20 {
        let p = corpus(seed);
        let cert = certificate_closed_face(&p, &cfg).unwrap();
        kernel = kernel.max(verify_certificate(&p, &cert, 200, seed).residual);
    }
    Outcome {
        id: 6,
        pass: analytic < 1e-10
            && counts == (1, 1, 0)
            && (cq.a.len(), cq.n1, cq.n2) == (0, 0, 1)
            && (c1 - 3f64.sqrt()).abs() < 1e-10
            && kernel < 1e-8,
        detail: format!(
            "2-zw identity error {analytic:.2e}, counts {counts:?}; 1-2z counts ({}, {}, {}) |C1| - sqrt3 = {:.2e}; corpus kernel residual {kernel:.2e}",
            cq.a.len(),
            cq.n1,
            cq.n2,
            (c1 - 3f64.sqrt()).abs()
        ),
    }
}

fn criterion_7() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let mut mismatches = Vec::new();
    let mut counts = Vec::new();
    for _ in 0..10 {
        let deg = rng.gen_range(1..=6);
        let roots: Vec<C> = (0..deg)
            .map(|_| if rng.gen_bool(0.5) { polar(&mut rng, 0.1, 0.9) } else { polar(&mut rng, 1.1, 3.0) })
            .collect();
        let u = UniPoly::from_roots(&roots).scale(polar(&mut rng, 0.5, 2.0));
        let p = BiPoly::from_uni_z(&u);
        let companion = count_inside(&u).unwrap();
        let cert = certificate_closed_face(&p, &SosConfig::default()).unwrap();
        let (_, neg) = certificate_inertia(&cert, 1e-9);
        counts.push(companion);
        if cert.n2 != companion || neg != companion {
            mismatches.push((cert.n2, neg, companion));
        }
    }
    Outcome {
        id: 7,
        pass: mismatches.is_empty(),
        detail: format!("inside counts {counts:?}, mismatches (cert, inertia, companion) {mismatches:?}"),
    }
}

fn criterion_8() -> Outcome {
    let cfg = DetRepConfig::default();
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, p) in [("z-w", real(&[(1, 0, 1.0), (0, 1, -1.0)])), ("z^2-w", real(&[(2, 0, 1.0), (0, 1, -1.0)]))] {
        match build_detrep(&p, &cfg) {
            Ok(r) => {
                ok &= r.unitarity < 1e-8 && r.residual < 1e-6;
                parts.push(format!("{name}: ||U*U-I|| {:.1e}, det residual {:.1e}", r.unitarity, r.residual));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("{name}: {e}"));
            }
        }
    }
    let neg = build_detrep(&real(&[(1, 0, 1.0), (0, 1, -2.0)]), &cfg);
    ok &= matches!(neg, Err(Error::NotGdv { .. }));
    parts.push(format!("z-2w: {}", neg.err().map(|e| e.to_string()).unwrap_or_else(|| "accepted".into())));
    Outcome { id: 8, pass: ok, detail: parts.join("; ") }
}

fn criterion_9() -> Outcome {
    let densities = [
        real(&[(0, 0, 2.0), (1, 1, -1.0)]),
        real(&[(0, 0, 3.0), (1, 0, -1.0), (0, 1, -1.0)]),
        real(&[(0, 0, 3.0), (1, 0, -1.0)]).mul(&real(&[(0, 0, 2.0), (1, 1, -1.0)])),
    ];
    let mut ok = true;
    let mut maxima = Vec::new();
    for p in &densities {
        let (n, m) = p.deg();
        let t = table(p, (n + 4).max(2 * n), m + 3);
        let r = check_full_measure(&t, n, m, n + 3, m + 3, 1e-7).unwrap();
        let worst = r.e2_conditions.iter().map(|c| c.max).chain(r.h_conditions.iter().map(|c| c.max)).fold(0.0, f64::max);
        ok &= r.verdict == Verdict::Pass;
        maxima.push(format!("{worst:.1e}"));
    }
    let base = table(&densities[0], 5, 4);
    let mixed = base.combine(0.5, &MomentTable::lebesgue(5, 4), 0.5);
    let r = check_full_measure(&mixed, 1, 1, 4, 4, 1e-7).unwrap();
    ok &= r.verdict == Verdict::Fail;
    Outcome {
        id: 9,
        pass: ok,
        detail: format!("Bernstein-Szegő maxima {maxima:?} to depth (n+3, m+3); mixed density verdict {:?}", r.verdict),
    }
}

fn criterion_10() -> Outcome {
    let solve = |p: &BiPoly, s: f64| {
        let (n, m) = p.deg();
        solve_ar(&ArProblem { n, m, autocorr: window(p).scaled(s) }, 1e-8).unwrap()
    };
    let causal = real(&[(0, 0, 2.0), (1, 1, -1.0)]);
    let sol = solve(&causal, 1.0);
    let a = sol.a.clone().unwrap();
    let pattern = (a[(1, 1)] / a[(0, 0)] + c(0.5)).norm() < 1e-9 && a[(1, 0)].norm() < 1e-9 && a[(0, 1)].norm() < 1e-9;
    let acausal = real(&[(0, 0, 1.0), (1, 0, -2.0)]).mul(&real(&[(0, 0, 2.0), (0, 1, -1.0)]));
    let second = solve(&acausal, 1.0);
    let forced = solve(&real(&[(0, 0, 1.0), (1, 0, -2.0), (0, 1, 0.5)]), 1.0).classification;
    let invariant = [&causal, &acausal]
        .iter()
        .all(|p| [1e-3, 1e3].iter().all(|&s| solve(p, s).classification == solve(p, 1.0).classification));
    Outcome {
        id: 10,
        pass: sol.classification == Classification::Causal
            && pattern
            && second.classification == Classification::Acausal
            && invariant,
        detail: format!(
            "2-zw: {:?} with a11/a00 = {:.6}; (1-2z)(2-w): {:?} (||A|| = {:.1e}); scale invariant {invariant}; for comparison 1-2z+0.5w: {forced:?}",
            sol.classification,
            (a[(1, 1)] / a[(0, 0)]).re,
            second.classification,
            second.report.a_norm
        ),
    }
}

fn szego(args: &[&str], stdin: &str) -> i32 {
    let mut child = Command::new(env!("CARGO_BIN_EXE_szego"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait().unwrap().code().unwrap_or(-1)
}

fn criterion_11() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();

    let torus_zero = moments_from_density(&real(&[(0, 0, 1.0), (1, 1, -1.0)]), 2, 2, &QuadratureConfig::default());
    ok &= matches!(torus_zero, Err(Error::MomentDivergence { .. }));
    let indefinite = MomentTable::new(1, 0, vec![c(2.0), c(1.0), c(2.0)]).unwrap();
    ok &= matches!(MomentSpace::new(&indefinite, 1, 0), Err(Error::NotPositive { .. }));

    let poly = |p: &BiPoly| json::poly_to_value(p).to_string();
    let moments = |t: &MomentTable| json::moments_to_value(t).to_string();
    let two = table(&real(&[(0, 0, 2.0), (1, 1, -1.0)]), 2, 2);
    let other = table(&real(&[(0, 0, 3.0), (1, 0, -1.0), (0, 1, -1.0)]), 2, 2);
    let not_factorable = r#"{"deg":[1,1],"coeffs":[[[0,0],[1,0],[1,0]],[[1,0],[4,0],[1,0]],[[1,0],[1,0],[0,0]]]}"#;
    let cases: Vec<(&str, Vec<&str>, String, i32)> = vec![
        ("success", vec!["check", "--moments", "-", "--n", "1", "--m", "1"], moments(&two), 0),
        ("MatrixConditionFails", vec!["check", "--moments", "-", "--n", "1", "--m", "1"], moments(&two.combine(0.5, &other, 0.5)), 1),
        ("NotFactorable", vec!["factor", "--trig", "-"], not_factorable.to_string(), 1),
        ("NotGdv", vec!["gdv", "--poly", "-"], poly(&real(&[(1, 0, 1.0), (0, 1, -2.0)])), 1),
        ("CommonFactor", vec!["sos", "--poly", "-", "--open-face"], poly(&real(&[(1, 0, 1.0), (0, 1, -1.0)])), 1),
        ("NotPositive", vec!["check", "--moments", "-", "--n", "1", "--m", "0"], moments(&indefinite), 2),
        ("InsufficientMoments", vec!["check", "--moments", "-", "--n", "3", "--m", "1"], moments(&two), 2),
        ("InvalidInput", vec!["moments", "--poly", "-", "--jmax", "1", "--kmax", "1"], "[1,2".into(), 2),
        ("ZeroPolynomial", vec!["moments", "--poly", "-", "--jmax", "1", "--kmax", "1"], poly(&BiPoly::zeros(1, 1)), 2),
        ("ZOnlyFactor", vec!["gdv", "--poly", "-"], poly(&real(&[(0, 0, -2.0), (1, 0, 1.0)]).mul(&real(&[(1, 0, 1.0), (0, 1, -1.0)]))), 2),
        ("MomentDivergence", vec!["moments", "--poly", "-", "--jmax", "1", "--kmax", "1"], poly(&real(&[(0, 0, 1.0), (1, 1, -1.0)])), 3),
        ("RootNearTorus", vec!["sos", "--poly", "-"], poly(&real(&[(0, 0, 1.0), (1, 0, -1.0)])), 3),
    ];
    for (name, args, input, want) in &cases {
        let got = szego(args, input);
        if got != *want {
            ok = false;
            notes.push(format!("{name}: exit {got}, expected {want}"));
        }
    }
    Outcome {
        id: 11,
        pass: ok,
        detail: format!("MomentDivergence and NotPositive raised; {} CLI paths checked; mismatches {notes:?}", cases.len()),
    }
}

#[test]
fn acceptance() {
    let outcomes = vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
        criterion_11(),
    ];
    let mut unexpected = Vec::new();
    for o in &outcomes {
        println!("criterion {:>2}: {} {}", o.id, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        let defect = SPEC_DEFECTS.iter().find(|(id, _)| *id == o.id);
        match (o.pass, defect) {
            (false, Some((_, why))) => println!("              known defect in the criterion: {why}"),
            (false, None) => unexpected.push(o.id),
            (true, _) => {}
        }
    }
    assert!(unexpected.is_empty(), "criteria failed: {unexpected:?}");
}
