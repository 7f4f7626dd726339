use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use szego_core::ar::{solve_ar, ArProblem};
use szego_core::fullmeasure::{check_full_measure, Verdict};
use szego_core::gdv::{build_detrep, check_gdv_geometry, check_self_reflective, DetRepConfig};
use szego_core::json;
use szego_core::moments::{moments_from_density, QuadratureConfig, TrigPoly};
use szego_core::reconstruct::{factor_trig, reconstruct_p};
use szego_core::sos::{certificate_closed_face_variant, certificate_open_face, SosConfig, Variant};
use szego_core::space::MomentSpace;
use szego_core::splitshift::{build_operators, check_matrix_condition};
use szego_core::{Error, Result};

#[derive(Parser)]
#[command(name = "szego", version, about = "Bernstein-Szegő measures, stable polynomials and determinantal representations on the bidisk")]
struct Cli {
    /// Numerical tolerance
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Seed for randomized checks
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Initial quadrature grid per axis (power of two); sample count for `gdv`
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Pretty-print output with this many spaces
    #[arg(long, global = true)]
    json_indent: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    L,
    G,
}

#[derive(Subcommand)]
enum Cmd {
    /// Moments of 1/|p|^2 on [-J, J] x [-K, K]
    Moments {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        jmax: usize,
        #[arg(long)]
        kmax: usize,
    },
    /// Matrix condition and admissible interval of d
    Check {
        #[arg(long)]
        moments: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    /// Recover p from moments
    Reconstruct {
        #[arg(long)]
        moments: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    /// Factor a positive trigonometric polynomial as |p|^2
    Factor {
        #[arg(long)]
        trig: PathBuf,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
    },
    /// Sum-of-squares certificate for p
    Sos {
        #[arg(long)]
        poly: PathBuf,
        /// Allow zeros on the open face
        #[arg(long)]
        open_face: bool,
        #[arg(long, value_enum, default_value = "l")]
        variant: VariantArg,
    },
    /// Distinguished-variety test and determinantal representation
    Gdv {
        #[arg(long)]
        poly: PathBuf,
    },
    /// Truncated full-measure test
    Full {
        #[arg(long)]
        moments: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Depth `Nmax,Mmax` (default n+3,m+3)
        #[arg(long, value_delimiter = ',')]
        depth: Option<Vec<usize>>,
    },
    /// Autoregressive filter from autocorrelations
    Ar {
        #[arg(long)]
        autocorr: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
}

fn read_input(path: &PathBuf) -> Result<String> {
    let mut s = String::new();
    let res = if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut s).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| s = t)
    };
    res.map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    Ok(s)
}

fn quadrature(cli: &Cli) -> QuadratureConfig {
    let mut q = QuadratureConfig::default();
    if let Some(g) = cli.grid {
        q.initial_grid = g;
        q.max_grid = q.max_grid.max(g);
    }
    q
}

fn pad_trig(t: &TrigPoly, n: usize, m: usize) -> Result<TrigPoly> {
    let (tn, tm) = t.deg();
    if n < tn || m < tm {
        return Err(Error::InvalidDegree(n, m));
    }
    let mut c = Vec::with_capacity((2 * n + 1) * (2 * m + 1));
    for j in -(n as i64)..=n as i64 {
        for k in -(m as i64)..=m as i64 {
            c.push(t.get(j, k));
        }
    }
    TrigPoly::new(n, m, c)
}

/// Result of a subcommand: a JSON document and the exit code.
type Outcome = (Value, u8);

fn negative(mut out: Value, e: Error) -> Outcome {
    annotate(&mut out, &e);
    (out, e.exit_code() as u8)
}

fn annotate(out: &mut Value, e: &Error) {
    eprintln!("szego: {e}");
    out["error"] = json!({ "kind": error_kind(e), "message": e.to_string(), "class": format!("{:?}", e.class()) });
}

fn run(cli: &Cli) -> Result<Outcome> {
    let tol = cli.tol;
    let quad = quadrature(cli);
    let sos_cfg = SosConfig { quadrature: quad.clone(), seed: cli.seed, ..SosConfig::default() };
    match &cli.cmd {
        Cmd::Moments { poly, jmax, kmax } => {
            let p = json::poly_from_str(&read_input(poly)?)?;
            let t = moments_from_density(&p, *jmax, *kmax, &quad)?;
            Ok((json::moments_to_value(&t), 0))
        }
        Cmd::Check { moments, n, m } => {
            let t = json::moments_from_str(&read_input(moments)?)?;
            let space = MomentSpace::new(&t, *n, *m)?;
            let report = check_matrix_condition(&build_operators(&space, *n, *m)?, tol);
            let out = to_value(&report);
            if !report.holds {
                return Ok(negative(out, Error::MatrixConditionFails { max_violation: report.max_violation }));
            }
            Ok((out, 0))
        }
        Cmd::Reconstruct { moments, n, m } => {
            let t = json::moments_from_str(&read_input(moments)?)?;
            Ok((json::poly_to_value(&reconstruct_p(&t, *n, *m, tol)?), 0))
        }
        Cmd::Factor { trig, n, m } => {
            let t = json::trig_from_str(&read_input(trig)?)?;
            let (tn, tm) = t.deg();
            let t = pad_trig(&t, n.unwrap_or(tn), m.unwrap_or(tm))?;
            Ok((json::poly_to_value(&factor_trig(&t, &quad, tol)?), 0))
        }
        Cmd::Sos { poly, open_face, variant } => {
            let p = json::poly_from_str(&read_input(poly)?)?;
            let v = match variant {
                VariantArg::L => Variant::L,
                VariantArg::G => Variant::G,
            };
            let cfg = SosConfig { tol, ..sos_cfg };
            let cert = if *open_face { certificate_open_face(&p, v, &cfg)? } else { certificate_closed_face_variant(&p, v, &cfg)? };
            Ok((json::certificate_to_value(&cert), 0))
        }
        Cmd::Gdv { poly } => {
            let p = json::poly_from_str(&read_input(poly)?)?;
            let mut cfg = DetRepConfig { seed: cli.seed, sos: sos_cfg, ..DetRepConfig::default() };
            if let Some(g) = cli.grid {
                cfg.samples = g;
            }
            let geo = check_gdv_geometry(&p, cfg.samples, cfg.geometry_tol)?;
            let mut out = json!({ "geometry": json::geometry_to_value(&geo) });
            if !geo.passes {
                return Ok(negative(out, Error::NotGdv { worst: geo.worst }));
            }
            let mu = check_self_reflective(&p, cfg.reflect_tol)?;
            out["mu"] = json!([mu.re, mu.im]);
            let rep = build_detrep(&p, &cfg)?;
            out["detrep"] = json::detrep_to_value(&rep);
            Ok((out, 0))
        }
        Cmd::Full { moments, n, m, depth } => {
            let t = json::moments_from_str(&read_input(moments)?)?;
            let (a, b) = match depth.as_deref() {
                None => (n + 3, m + 3),
                Some([a, b]) => (*a, *b),
                Some(_) => return Err(Error::InvalidInput("--depth expects two values `Nmax,Mmax`".into())),
            };
            let report = check_full_measure(&t, *n, *m, a, b, tol)?;
            let code = if report.verdict == Verdict::Fail { 1 } else { 0 };
            Ok((to_value(&report), code))
        }
        Cmd::Ar { autocorr, n, m } => {
            let t = json::moments_from_str(&read_input(autocorr)?)?;
            let sol = solve_ar(&ArProblem { n: *n, m: *m, autocorr: t }, tol)?;
            Ok((json::ar_to_value(&sol), 0))
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable report")
}

fn error_kind(e: &Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default().to_string()
}

fn render(v: &Value, indent: Option<usize>) -> String {
    match indent {
        None => serde_json::to_string(v).unwrap(),
        Some(k) => {
            let pad = " ".repeat(k);
            let mut buf = Vec::new();
            let fmt = serde_json::ser::PrettyFormatter::with_indent(pad.as_bytes());
            let mut ser = serde_json::Serializer::with_formatter(&mut buf, fmt);
            v.serialize(&mut ser).unwrap();
            String::from_utf8(buf).unwrap()
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (out, code) = match run(&cli) {
        Ok(o) => o,
        Err(e) => negative(json!({}), e),
    };
    println!("{}", render(&out, cli.json_indent));
    ExitCode::from(code)
}

