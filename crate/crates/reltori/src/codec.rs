//! JSON codecs for the I/O formats the command-line front end speaks.
//!
//! Scalars travel as their lossless text forms (`"p/q"`,
//! `"p/q+r/s*sqrt(d)"`); twists as builtin ids, explicit quotient lists
//! `"[a0;a1,...]"`, or exact scalar strings. Period tuples are emitted as
//! decimal strings at 40 significant digits alongside the exact forms.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::{ExactScalar, RealSpec, Scalar};
use crate::surface::{ELocusSurface, PeriodTuple, TremorParam};
use crate::torus::{HorizontalSlit, NormalizedTorus, ShortSlit};

/// Significant digits for decimal output.
pub const DIGITS: usize = 40;

fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value> {
    v.get(name)
        .ok_or_else(|| Error::Parse(format!("missing field '{name}'")))
}

fn string_field(v: &Value, name: &str) -> Result<String> {
    Ok(field(v, name)?
        .as_str()
        .ok_or_else(|| Error::Parse(format!("field '{name}' must be a string")))?
        .to_string())
}

/// `{"a": scalar-string, "alpha": realspec-string}`
pub fn torus_to_json(torus: &NormalizedTorus) -> Value {
    json!({
        "a": torus.modulus().to_string(),
        "alpha": torus.alpha_spec().to_string(),
    })
}

pub fn torus_from_json(v: &Value) -> Result<NormalizedTorus> {
    let a: ExactScalar = string_field(v, "a")?.parse()?;
    let alpha: RealSpec = string_field(v, "alpha")?.parse()?;
    NormalizedTorus::new(a, alpha)
}

/// `{"N": scalar-string}`
pub fn slit_to_json(slit: &HorizontalSlit) -> Value {
    json!({ "N": slit.ratio().to_string() })
}

pub fn slit_from_json(v: &Value) -> Result<HorizontalSlit> {
    let n: ExactScalar = string_field(v, "N")?.parse()?;
    HorizontalSlit::new(n)
}

/// `{"dx": ..., "dy": ..., "anchor": 0..3}` with both decimal and exact
/// forms for the vector.
pub fn short_slit_to_json(short: &ShortSlit) -> Value {
    json!({
        "dx": short.dx.to_decimal_string(DIGITS),
        "dy": short.dy.to_decimal_string(DIGITS),
        "dx_exact": short.dx.exact_form(),
        "dy_exact": short.dy.exact_form(),
        "anchor": short.anchor,
    })
}

pub fn short_slit_from_json(v: &Value) -> Result<ShortSlit> {
    let dx: ExactScalar = string_field(v, "dx_exact")
        .or_else(|_| string_field(v, "dx"))?
        .parse()?;
    let dy: ExactScalar = string_field(v, "dy_exact")
        .or_else(|_| string_field(v, "dy"))?
        .parse()?;
    let anchor = field(v, "anchor")?
        .as_u64()
        .filter(|a| *a < 4)
        .ok_or_else(|| Error::Parse("anchor must be 0..=3".into()))?;
    Ok(ShortSlit {
        dx: Scalar::Exact(dx),
        dy: Scalar::Exact(dy),
        anchor: anchor as u8,
    })
}

/// `{"torus": {...}, "N": scalar-string, "tremor": [s1, s2]}`
pub fn surface_to_json(surface: &ELocusSurface) -> Value {
    json!({
        "torus": torus_to_json(surface.torus()),
        "N": surface.slit().ratio().to_string(),
        "tremor": [
            surface.tremor_param().shear1.to_string(),
            surface.tremor_param().shear2.to_string(),
        ],
    })
}

pub fn surface_from_json(v: &Value) -> Result<ELocusSurface> {
    let torus = torus_from_json(field(v, "torus")?)?;
    let n: ExactScalar = string_field(v, "N")?.parse()?;
    let tremor = field(v, "tremor")?
        .as_array()
        .filter(|t| t.len() == 2)
        .ok_or_else(|| Error::Parse("tremor must be a two-element array".into()))?;
    let s1: ExactScalar = tremor[0]
        .as_str()
        .ok_or_else(|| Error::Parse("tremor entries must be strings".into()))?
        .parse()?;
    let s2: ExactScalar = tremor[1]
        .as_str()
        .ok_or_else(|| Error::Parse("tremor entries must be strings".into()))?
        .parse()?;
    Ok(ELocusSurface::new(
        torus,
        HorizontalSlit::new(n)?,
        TremorParam::new(s1, s2),
    ))
}

/// Five `[x, y]` pairs of 40-digit decimal strings plus exact forms.
pub fn tuple_to_json(tuple: &PeriodTuple) -> Value {
    let vecs = [
        &tuple.gamma1,
        &tuple.delta1,
        &tuple.gamma2,
        &tuple.delta2,
        &tuple.slit,
    ];
    json!({
        "vectors": vecs
            .iter()
            .map(|v| json!([v.x.to_decimal_string(DIGITS), v.y.to_decimal_string(DIGITS)]))
            .collect::<Vec<_>>(),
        "exact": vecs
            .iter()
            .map(|v| json!([v.x.exact_form(), v.y.exact_form()]))
            .collect::<Vec<_>>(),
    })
}

/// Structured error object for machine-readable diagnostics.
pub fn error_to_json(err: &Error) -> Value {
    json!({
        "code": err.code(),
        "module": err.module(),
        "message": err.to_string(),
    })
}
