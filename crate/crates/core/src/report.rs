//! JSON output with every floating-point number printed to 17 significant
//! digits, so parsing a report gives back the same bits.

use nalgebra::DMatrix;
use serde::Serialize;
use serde_json::{Number, Value};

use crate::error::{Error, Result};

/// Version tag carried by every report.
pub const SCHEMA: &str = "slicecalc.report/1";

/// `x` as a 17-significant-digit JSON number; non-finite values become the
/// strings `"inf"`, `"-inf"` and `"nan"`.
pub fn number(x: f64) -> Value {
    if x.is_nan() {
        return Value::String("nan".into());
    }
    if x.is_infinite() {
        return Value::String(if x > 0.0 { "inf" } else { "-inf" }.into());
    }
    let text = format!("{x:.16e}");
    Value::Number(text.parse::<Number>().expect("formatted float is a valid JSON number"))
}

/// Rewrites every non-integer number in `v` with [`number`].
pub fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_u64() || n.is_i64() => Value::Number(n),
        Value::Number(n) => number(n.as_f64().unwrap_or(f64::NAN)),
        Value::Array(items) => Value::Array(items.into_iter().map(normalize).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, normalize(v))).collect()),
        other => other,
    }
}

/// Row-major nested array.
pub fn matrix(m: &DMatrix<f64>) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| number(m[(i, j)])).collect()))
            .collect(),
    )
}

/// Serializes, normalizes and pretty-prints.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Parse(e.to_string()))?;
    serde_json::to_string_pretty(&normalize(v)).map_err(|e| Error::Parse(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0, f64::MIN_POSITIVE] {
            let text = number(x).to_string();
            let back: f64 = text.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{text}");
        }
        assert_eq!(number(0.1).to_string(), "1.0000000000000001e-1");
        assert_eq!(number(f64::INFINITY), Value::String("inf".into()));
    }

    #[test]
    fn integers_untouched() {
        let v = normalize(serde_json::json!({"n": 3, "x": 0.5, "list": [1, 2.0]}));
        assert_eq!(v["n"].to_string(), "3");
        assert_eq!(v["x"].to_string(), "5.0000000000000000e-1");
        assert_eq!(v["list"][1].to_string(), "2.0000000000000000e+0");
    }
}
