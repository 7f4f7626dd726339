//! Browser bindings. Every entry point takes and returns JSON strings so the
//! page can stay plain JavaScript.

use serde_json::{json, Value};
use szego_core::gdv::{build_detrep, check_gdv_geometry, DetRepConfig};
use szego_core::json as wire;
use szego_core::moments::{moments_from_density, QuadratureConfig};
use szego_core::poly::BiPoly;
use szego_core::sos::{certificate_closed_face, certificate_open_face, verify_certificate, SosConfig, Variant};
use szego_core::space::MomentSpace;
use szego_core::splitshift::{build_operators, check_matrix_condition, enumerate_split_polys};
use szego_core::Complex64 as C;
use wasm_bindgen::prelude::*;

const HEAT: usize = 48;

fn error(e: szego_core::Error) -> String {
    json!({ "error": e.to_string() }).to_string()
}

/// `|p|^2` on a `HEAT x HEAT` grid of the torus, rows indexed by arg z.
fn heatmap(p: &BiPoly) -> Vec<Vec<f64>> {
    (0..HEAT)
        .map(|i| {
            let z = C::from_polar(1.0, std::f64::consts::TAU * i as f64 / HEAT as f64);
            (0..HEAT)
                .map(|j| p.eval(z, C::from_polar(1.0, std::f64::consts::TAU * j as f64 / HEAT as f64)).norm_sqr())
                .collect()
        })
        .collect()
}

pub fn stratify_json(poly: &str) -> Result<String, String> {
    let p = wire::poly_from_str(poly).map_err(error)?;
    let (n, m) = p.deg();
    let table = moments_from_density(&p, n, m, &QuadratureConfig::default()).map_err(error)?;
    let space = MomentSpace::new(&table, n, m).map_err(error)?;
    let report = check_matrix_condition(&build_operators(&space, n, m).map_err(error)?, 1e-8);
    let splits: Vec<Value> = enumerate_split_polys(&p, 1e-8)
        .map_err(error)?
        .iter()
        .map(|s| json!({ "d": s.d, "poly": wire::poly_to_value(&s.poly) }))
        .collect();
    Ok(json!({ "report": report, "split_polys": splits, "heatmap": heatmap(&p) }).to_string())
}

pub fn certificate_json(poly: &str, open_face: bool) -> Result<String, String> {
    let p = wire::poly_from_str(poly).map_err(error)?;
    let cfg = SosConfig::default();
    let cert = if open_face { certificate_open_face(&p, Variant::L, &cfg) } else { certificate_closed_face(&p, &cfg) }
        .map_err(error)?;
    let check = verify_certificate(&p, &cert, 200, 0);
    let mut out = wire::certificate_to_value(&cert);
    out["kernel_residual"] = json!(check.residual);
    Ok(out.to_string())
}

pub fn detrep_json(poly: &str) -> Result<String, String> {
    let p = wire::poly_from_str(poly).map_err(error)?;
    let cfg = DetRepConfig::default();
    let geo = check_gdv_geometry(&p, cfg.samples, cfg.geometry_tol).map_err(error)?;
    let mut out = json!({ "geometry": wire::geometry_to_value(&geo) });
    match build_detrep(&p, &cfg) {
        Ok(rep) => out["detrep"] = wire::detrep_to_value(&rep),
        Err(e) => out["error"] = json!(e.to_string()),
    }
    Ok(out.to_string())
}

#[wasm_bindgen]
pub fn stratify(poly: &str) -> Result<String, JsValue> {
    stratify_json(poly).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn certificate(poly: &str, open_face: bool) -> Result<String, JsValue> {
    certificate_json(poly, open_face).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn detrep(poly: &str) -> Result<String, JsValue> {
    detrep_json(poly).map_err(|e| JsValue::from_str(&e))
}
