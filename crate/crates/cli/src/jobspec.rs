//! Job specifications: hand-validated JSON with JSON-pointer error paths.
//!
//! Complex numbers are bare reals or `[re, im]` pairs; vectors are arrays
//! of complex numbers; matrices are row-major nested arrays. Unknown
//! fields are rejected everywhere.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde_json::Value;

use wcoball::lfmap::LinearFractionalMap;
use wcoball::operator::ConjugationSpec;
use wcoball::space::{Space, WeightSpec};
use wcoball::{CMat, CVec};

/// A schema violation at a JSON-pointer path.
#[derive(Debug, Clone)]
pub struct SchemaError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "schema error at {}: {}", self.path, self.message)
    }
}

impl std::error::Error for SchemaError {}

fn err<T>(path: &str, message: impl Into<String>) -> Result<T, SchemaError> {
    Err(SchemaError { path: path.to_string(), message: message.into() })
}

/// The checks a job may request.
pub const KNOWN_CHECKS: &[&str] = &[
    "classify_dirichlet_J",
    "classify_dirichlet_JCU",
    "classify_dirichlet_hermitian",
    "hardy_unitary",
    "hardy_hermitian",
    "hardy_normality",
    "jw_affine",
    "matrix_symmetry",
    "kernel_symmetry",
    "hermitian_residual",
    "unitary_residual",
    "normal_residual",
    "conjugation_validity",
    "matrix_export",
];

/// One batch entry: an operator, an optional conjugation, and the checks
/// to run against it.
#[derive(Debug, Clone, PartialEq)]
pub struct JobSpec {
    pub space: Space,
    pub psi: WeightSpec,
    pub phi: LinearFractionalMap,
    pub conjugation: Option<ConjugationSpec>,
    pub u: Option<CMat>,
    pub checks: Vec<String>,
    pub degree_cap: Option<u32>,
    pub sample_count: Option<usize>,
    pub seed: Option<u64>,
    pub tolerances: BTreeMap<String, f64>,
}

/// Parses a batch: a single job object or an array of them.
pub fn parse_spec(bytes: &[u8]) -> Result<Vec<JobSpec>, SchemaError> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| SchemaError { path: "".into(), message: format!("not UTF-8: {e}") })?;
    let value: Value = serde_json::from_str(text)
        .map_err(|e| SchemaError { path: "".into(), message: format!("invalid JSON: {e}") })?;
    match value {
        Value::Array(items) => items
            .iter()
            .enumerate()
            .map(|(i, v)| parse_job(v, &format!("/{i}")))
            .collect(),
        v => Ok(vec![parse_job(&v, "")?]),
    }
}

fn parse_job(v: &Value, path: &str) -> Result<JobSpec, SchemaError> {
    let obj = as_object(v, path)?;
    const FIELDS: &[&str] = &[
        "space",
        "psi",
        "phi",
        "conjugation",
        "u",
        "checks",
        "degree_cap",
        "sample_count",
        "seed",
        "tolerances",
    ];
    for key in obj.keys() {
        if !FIELDS.contains(&key.as_str()) {
            return err(&format!("{path}/{key}"), "unknown field");
        }
    }
    let space = parse_space(require(obj, "space", path)?, &format!("{path}/space"))?;
    let psi = parse_weight(require(obj, "psi", path)?, &format!("{path}/psi"))?;
    let phi = parse_map(require(obj, "phi", path)?, &format!("{path}/phi"))?;
    if phi.dim() != space.dim {
        return err(
            &format!("{path}/phi"),
            format!("map has dimension {}, space has {}", phi.dim(), space.dim),
        );
    }
    let conjugation = match obj.get("conjugation") {
        Some(v) => Some(parse_conjugation(v, &format!("{path}/conjugation"))?),
        None => None,
    };
    let u = match obj.get("u") {
        Some(v) => Some(parse_cmat(v, &format!("{path}/u"))?),
        None => None,
    };
    let checks = match obj.get("checks") {
        Some(v) => {
            let arr = as_array(v, &format!("{path}/checks"))?;
            let mut out = Vec::with_capacity(arr.len());
            for (i, item) in arr.iter().enumerate() {
                let name = as_str(item, &format!("{path}/checks/{i}"))?;
                if !KNOWN_CHECKS.contains(&name) {
                    return err(
                        &format!("{path}/checks/{i}"),
                        format!("unknown check {name:?}"),
                    );
                }
                out.push(name.to_string());
            }
            out
        }
        None => Vec::new(),
    };
    let degree_cap = match obj.get("degree_cap") {
        Some(v) => {
            let n = as_u64(v, &format!("{path}/degree_cap"))?;
            if n < 1 {
                return err(&format!("{path}/degree_cap"), "must be >= 1");
            }
            Some(n as u32)
        }
        None => None,
    };
    let sample_count = match obj.get("sample_count") {
        Some(v) => Some(as_u64(v, &format!("{path}/sample_count"))? as usize),
        None => None,
    };
    let seed = match obj.get("seed") {
        Some(v) => Some(parse_seed(v, &format!("{path}/seed"))?),
        None => None,
    };
    let tolerances = match obj.get("tolerances") {
        Some(v) => {
            let map = as_object(v, &format!("{path}/tolerances"))?;
            let mut out = BTreeMap::new();
            for (k, val) in map {
                let x = as_f64(val, &format!("{path}/tolerances/{k}"))?;
                out.insert(k.clone(), x);
            }
            out
        }
        None => BTreeMap::new(),
    };
    Ok(JobSpec {
        space,
        psi,
        phi,
        conjugation,
        u,
        checks,
        degree_cap,
        sample_count,
        seed,
        tolerances,
    })
}

pub fn parse_seed(v: &Value, path: &str) -> Result<u64, SchemaError> {
    match v {
        Value::Number(n) => n
            .as_u64()
            .ok_or_else(|| SchemaError { path: path.into(), message: "expected a non-negative integer".into() }),
        Value::String(s) => parse_seed_str(s)
            .ok_or_else(|| SchemaError { path: path.into(), message: format!("bad seed {s:?}") }),
        _ => err(path, "expected an integer or a hex string"),
    }
}

pub fn parse_seed_str(s: &str) -> Option<u64> {
    if let Some(hex) = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        u64::from_str_radix(hex, 16).ok()
    } else {
        s.parse().ok()
    }
}

fn parse_space(v: &Value, path: &str) -> Result<Space, SchemaError> {
    let obj = as_object(v, path)?;
    for key in obj.keys() {
        if key != "kind" && key != "dim" {
            return err(&format!("{path}/{key}"), "unknown field");
        }
    }
    let kind = as_str(require(obj, "kind", path)?, &format!("{path}/kind"))?;
    let dim = as_u64(require(obj, "dim", path)?, &format!("{path}/dim"))? as usize;
    if dim < 1 {
        return err(&format!("{path}/dim"), "must be >= 1");
    }
    match kind {
        "dirichlet" => Ok(Space::dirichlet(dim)),
        "hardy" => Ok(Space::hardy(dim)),
        other => err(&format!("{path}/kind"), format!("unknown space {other:?}")),
    }
}

fn parse_weight(v: &Value, path: &str) -> Result<WeightSpec, SchemaError> {
    let obj = as_object(v, path)?;
    if obj.len() != 1 {
        return err(path, "expected exactly one of constant / kernel_power / normalized_kernel");
    }
    let (key, inner) = obj.iter().next().expect("len 1");
    match key.as_str() {
        "constant" => Ok(WeightSpec::Constant(parse_complex(inner, &format!("{path}/constant"))?)),
        "kernel_power" => {
            let p = format!("{path}/kernel_power");
            let fields = as_object(inner, &p)?;
            for k in fields.keys() {
                if !["a1", "a0", "power"].contains(&k.as_str()) {
                    return err(&format!("{p}/{k}"), "unknown field");
                }
            }
            Ok(WeightSpec::KernelPower {
                a1: parse_complex(require(fields, "a1", &p)?, &format!("{p}/a1"))?,
                a0: parse_cvec(require(fields, "a0", &p)?, &format!("{p}/a0"))?,
                power: as_u64(require(fields, "power", &p)?, &format!("{p}/power"))? as u32,
            })
        }
        "normalized_kernel" => {
            let p = format!("{path}/normalized_kernel");
            let fields = as_object(inner, &p)?;
            for k in fields.keys() {
                if !["mu", "a", "power"].contains(&k.as_str()) {
                    return err(&format!("{p}/{k}"), "unknown field");
                }
            }
            Ok(WeightSpec::NormalizedKernel {
                mu: parse_complex(require(fields, "mu", &p)?, &format!("{p}/mu"))?,
                a: parse_cvec(require(fields, "a", &p)?, &format!("{p}/a"))?,
                power: as_u64(require(fields, "power", &p)?, &format!("{p}/power"))? as u32,
            })
        }
        other => err(&format!("{path}/{other}"), "unknown weight family"),
    }
}

fn parse_map(v: &Value, path: &str) -> Result<LinearFractionalMap, SchemaError> {
    let obj = as_object(v, path)?;
    for k in obj.keys() {
        if !["a", "b", "c", "d"].contains(&k.as_str()) {
            return err(&format!("{path}/{k}"), "unknown field");
        }
    }
    let a = parse_cmat(require(obj, "a", path)?, &format!("{path}/a"))?;
    let b = parse_cvec(require(obj, "b", path)?, &format!("{path}/b"))?;
    let c = parse_cvec(require(obj, "c", path)?, &format!("{path}/c"))?;
    let d = parse_complex(require(obj, "d", path)?, &format!("{path}/d"))?;
    let n = b.len();
    if a.nrows() != n || a.ncols() != n {
        return err(&format!("{path}/a"), format!("expected a {n}x{n} matrix"));
    }
    if c.len() != n {
        return err(&format!("{path}/c"), format!("expected length {n}"));
    }
    Ok(LinearFractionalMap::new(a, b, c, d))
}

fn parse_conjugation(v: &Value, path: &str) -> Result<ConjugationSpec, SchemaError> {
    match v {
        Value::String(s) if s == "J" => Ok(ConjugationSpec::PlainJ),
        Value::String(s) => err(path, format!("unknown conjugation {s:?}")),
        Value::Object(obj) => {
            if obj.len() != 1 {
                return err(path, "expected \"J\" or exactly one of jcu / wphij");
            }
            let (key, inner) = obj.iter().next().expect("len 1");
            match key.as_str() {
                "jcu" => {
                    let p = format!("{path}/jcu");
                    let fields = as_object(inner, &p)?;
                    for k in fields.keys() {
                        if k != "u" {
                            return err(&format!("{p}/{k}"), "unknown field");
                        }
                    }
                    Ok(ConjugationSpec::JCU {
                        u: parse_cmat(require(fields, "u", &p)?, &format!("{p}/u"))?,
                    })
                }
                "wphij" => {
                    let p = format!("{path}/wphij");
                    let fields = as_object(inner, &p)?;
                    for k in fields.keys() {
                        if k != "psi" && k != "phi" {
                            return err(&format!("{p}/{k}"), "unknown field");
                        }
                    }
                    Ok(ConjugationSpec::WPhiJ {
                        psi: parse_weight(require(fields, "psi", &p)?, &format!("{p}/psi"))?,
                        phi: parse_map(require(fields, "phi", &p)?, &format!("{p}/phi"))?,
                    })
                }
                other => err(&format!("{path}/{other}"), "unknown conjugation family"),
            }
        }
        _ => err(path, "expected \"J\" or an object"),
    }
}

pub fn parse_complex(v: &Value, path: &str) -> Result<Complex64, SchemaError> {
    match v {
        Value::Number(n) => Ok(Complex64::new(
            n.as_f64().ok_or_else(|| SchemaError { path: path.into(), message: "bad number".into() })?,
            0.0,
        )),
        Value::Array(items) if items.len() == 2 => {
            let re = as_f64(&items[0], &format!("{path}/0"))?;
            let im = as_f64(&items[1], &format!("{path}/1"))?;
            Ok(Complex64::new(re, im))
        }
        _ => err(path, "expected a number or [re, im]"),
    }
}

fn parse_cvec(v: &Value, path: &str) -> Result<CVec, SchemaError> {
    let arr = as_array(v, path)?;
    if arr.is_empty() {
        return err(path, "expected a non-empty array");
    }
    let mut out = Vec::with_capacity(arr.len());
    for (i, item) in arr.iter().enumerate() {
        out.push(parse_complex(item, &format!("{path}/{i}"))?);
    }
    Ok(DVector::from_vec(out))
}

fn parse_cmat(v: &Value, path: &str) -> Result<CMat, SchemaError> {
    let rows = as_array(v, path)?;
    if rows.is_empty() {
        return err(path, "expected a non-empty array of rows");
    }
    let mut parsed: Vec<Vec<Complex64>> = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let row_path = format!("{path}/{i}");
        let cols = as_array(row, &row_path)?;
        let mut out = Vec::with_capacity(cols.len());
        for (j, item) in cols.iter().enumerate() {
            out.push(parse_complex(item, &format!("{row_path}/{j}"))?);
        }
        if let Some(first) = parsed.first() {
            if first.len() != out.len() {
                return err(&row_path, "ragged matrix rows");
            }
        }
        parsed.push(out);
    }
    let nrows = parsed.len();
    let ncols = parsed[0].len();
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| parsed[i][j]))
}

fn require<'a>(
    obj: &'a serde_json::Map<String, Value>,
    key: &str,
    path: &str,
) -> Result<&'a Value, SchemaError> {
    obj.get(key).ok_or_else(|| SchemaError {
        path: format!("{path}/{key}"),
        message: "missing required field".into(),
    })
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a serde_json::Map<String, Value>, SchemaError> {
    v.as_object().ok_or_else(|| SchemaError { path: path.into(), message: "expected an object".into() })
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, SchemaError> {
    v.as_array().ok_or_else(|| SchemaError { path: path.into(), message: "expected an array".into() })
}

fn as_str<'a>(v: &'a Value, path: &str) -> Result<&'a str, SchemaError> {
    v.as_str().ok_or_else(|| SchemaError { path: path.into(), message: "expected a string".into() })
}

fn as_u64(v: &Value, path: &str) -> Result<u64, SchemaError> {
    v.as_u64().ok_or_else(|| SchemaError { path: path.into(), message: "expected a non-negative integer".into() })
}

fn as_f64(v: &Value, path: &str) -> Result<f64, SchemaError> {
    v.as_f64().ok_or_else(|| SchemaError { path: path.into(), message: "expected a number".into() })
}

// --- serialization (round-trip support) ---

pub fn complex_value(c: Complex64) -> Value {
    serde_json::json!([c.re, c.im])
}

fn cvec_value(v: &CVec) -> Value {
    Value::Array(v.iter().map(|c| complex_value(*c)).collect())
}

fn cmat_value(m: &CMat) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| complex_value(m[(i, j)])).collect()))
            .collect(),
    )
}

fn weight_value(w: &WeightSpec) -> Value {
    match w {
        WeightSpec::Constant(c) => serde_json::json!({ "constant": complex_value(*c) }),
        WeightSpec::KernelPower { a1, a0, power } => serde_json::json!({
            "kernel_power": { "a1": complex_value(*a1), "a0": cvec_value(a0), "power": power }
        }),
        WeightSpec::NormalizedKernel { mu, a, power } => serde_json::json!({
            "normalized_kernel": { "mu": complex_value(*mu), "a": cvec_value(a), "power": power }
        }),
    }
}

fn map_value(m: &LinearFractionalMap) -> Value {
    serde_json::json!({
        "a": cmat_value(&m.a),
        "b": cvec_value(&m.b),
        "c": cvec_value(&m.c),
        "d": complex_value(m.d),
    })
}

fn conjugation_value(c: &ConjugationSpec) -> Value {
    match c {
        ConjugationSpec::PlainJ => Value::String("J".into()),
        ConjugationSpec::JCU { u } => serde_json::json!({ "jcu": { "u": cmat_value(u) } }),
        ConjugationSpec::WPhiJ { psi, phi } => serde_json::json!({
            "wphij": { "psi": weight_value(psi), "phi": map_value(phi) }
        }),
    }
}

/// Serializes a job so that `parse_spec` recovers it exactly.
pub fn serialize_job(job: &JobSpec) -> Value {
    let mut obj = serde_json::Map::new();
    obj.insert(
        "space".into(),
        serde_json::json!({ "kind": job.space.kind.name(), "dim": job.space.dim }),
    );
    obj.insert("psi".into(), weight_value(&job.psi));
    obj.insert("phi".into(), map_value(&job.phi));
    if let Some(c) = &job.conjugation {
        obj.insert("conjugation".into(), conjugation_value(c));
    }
    if let Some(u) = &job.u {
        obj.insert("u".into(), cmat_value(u));
    }
    if !job.checks.is_empty() {
        obj.insert("checks".into(), serde_json::json!(job.checks));
    }
    if let Some(d) = job.degree_cap {
        obj.insert("degree_cap".into(), serde_json::json!(d));
    }
    if let Some(s) = job.sample_count {
        obj.insert("sample_count".into(), serde_json::json!(s));
    }
    if let Some(s) = job.seed {
        obj.insert("seed".into(), serde_json::json!(s));
    }
    if !job.tolerances.is_empty() {
        obj.insert("tolerances".into(), serde_json::json!(job.tolerances));
    }
    Value::Object(obj)
}
