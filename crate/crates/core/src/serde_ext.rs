//! Serialization helpers for values that may be infinite.

use serde::Serializer;

/// Serialize finite floats as numbers and non-finite ones as the strings
/// `"inf"`, `"-inf"` or `"nan"`.
pub fn f64_ext<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else if x.is_nan() {
        s.serialize_str("nan")
    } else if *x > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

pub fn opt_f64_ext<S: Serializer>(x: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => f64_ext(v, s),
        None => s.serialize_none(),
    }
}

/// Format a float for text output: 17 significant digits, fixed layout.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}
