//! JSON wire formats. Complex numbers are `[re, im]`.
//!
//! - polynomial: `{"deg":[n,m],"coeffs":[[[re,im],...],...]}`, row = z-power, column = w-power
//! - moments: `{"jmax":J,"kmax":K,"c":[[...],...]}`, rows `j = -J..J`, columns `k = -K..K`
//! - trigonometric polynomial: `{"deg":[n,m],"coeffs":[[...],...]}`, rows `j = -n..n`, columns `k = -m..m`

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::ar::ArSolution;
use crate::error::{Error, Result};
use crate::gdv::{DetRep, GeometryReport};
use crate::moments::{MomentTable, TrigPoly};
use crate::poly::BiPoly;
use crate::sos::SosCertificate;

type Pair = [f64; 2];

fn pair(c: C) -> Pair {
    [c.re, c.im]
}

fn unpair(p: &Pair) -> C {
    C::new(p[0], p[1])
}

fn rows(data: &[C], width: usize) -> Vec<Vec<Pair>> {
    data.chunks(width).map(|r| r.iter().map(|&c| pair(c)).collect()).collect()
}

fn flatten(rows: &[Vec<Pair>], height: usize, width: usize, what: &str) -> Result<Vec<C>> {
    if rows.len() != height || rows.iter().any(|r| r.len() != width) {
        return Err(Error::InvalidInput(format!("{what}: expected a {height} x {width} coefficient array")));
    }
    Ok(rows.iter().flatten().map(unpair).collect())
}

#[derive(Serialize, Deserialize)]
struct PolyWire {
    deg: [usize; 2],
    coeffs: Vec<Vec<Pair>>,
}

#[derive(Serialize, Deserialize)]
struct MomentWire {
    jmax: usize,
    kmax: usize,
    c: Vec<Vec<Pair>>,
}

fn parse<T: for<'de> Deserialize<'de>>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::InvalidInput(format!("malformed JSON: {e}")))
}

pub fn poly_to_value(p: &BiPoly) -> Value {
    let (n, m) = p.deg();
    serde_json::to_value(PolyWire { deg: [n, m], coeffs: rows(p.coeffs(), m + 1) }).unwrap()
}

pub fn poly_from_value(v: &Value) -> Result<BiPoly> {
    let w: PolyWire = serde_json::from_value(v.clone()).map_err(|e| Error::InvalidInput(format!("malformed polynomial: {e}")))?;
    let [n, m] = w.deg;
    BiPoly::new(n, m, flatten(&w.coeffs, n + 1, m + 1, "polynomial")?)
}

pub fn poly_from_str(s: &str) -> Result<BiPoly> {
    poly_from_value(&parse::<Value>(s)?)
}

pub fn moments_to_value(t: &MomentTable) -> Value {
    serde_json::to_value(MomentWire { jmax: t.jmax(), kmax: t.kmax(), c: rows(t.raw(), 2 * t.kmax() + 1) }).unwrap()
}

pub fn moments_from_str(s: &str) -> Result<MomentTable> {
    let w: MomentWire = parse(s)?;
    MomentTable::new(w.jmax, w.kmax, flatten(&w.c, 2 * w.jmax + 1, 2 * w.kmax + 1, "moment table")?)
}

pub fn trig_to_value(t: &TrigPoly) -> Value {
    let (n, m) = t.deg();
    serde_json::to_value(PolyWire { deg: [n, m], coeffs: rows(t.raw(), 2 * m + 1) }).unwrap()
}

pub fn trig_from_str(s: &str) -> Result<TrigPoly> {
    let w: PolyWire = parse(s)?;
    let [n, m] = w.deg;
    TrigPoly::new(n, m, flatten(&w.coeffs, 2 * n + 1, 2 * m + 1, "trigonometric polynomial")?)
}

pub fn certificate_to_value(c: &SosCertificate) -> Value {
    let list = |v: &[BiPoly]| v.iter().map(poly_to_value).collect::<Vec<_>>();
    json!({
        "A": list(&c.a),
        "B": list(&c.b),
        "C": list(&c.c),
        "n1": c.n1,
        "n2": c.n2,
        "residual": c.residual,
        "variant": c.variant,
        "t": c.t,
    })
}

pub fn detrep_to_value(d: &DetRep) -> Value {
    let u: Vec<Vec<Pair>> = (0..d.u.nrows()).map(|r| (0..d.u.ncols()).map(|c| pair(d.u[(r, c)])).collect()).collect();
    json!({
        "U": u,
        "m": d.m,
        "n1": d.n1,
        "n2": d.n2,
        "scale": pair(d.scale),
        "residual": d.residual,
        "unitarity": d.unitarity,
        "on_variety": d.on_variety,
    })
}

pub fn geometry_to_value(g: &GeometryReport) -> Value {
    serde_json::to_value(g).unwrap()
}

pub fn ar_to_value(s: &ArSolution) -> Value {
    json!({
        "classification": s.classification,
        "a": s.a.as_ref().map(poly_to_value),
        "diagnostics": {
            "stratification": s.report,
            "a_norm": s.report.a_norm,
            "hermitian_defect": s.hermitian_defect,
        },
    })
}
