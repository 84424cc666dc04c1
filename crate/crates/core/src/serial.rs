//! Number rendering shared by the JSON and CSV writers: every double is
//! printed with 17 significant digits so it parses back bit-exactly.

use num_complex::Complex64;
use serde::ser::{Error as _, SerializeSeq};
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// `x` in scientific notation with 17 significant digits, or `null` if not finite.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

pub(crate) fn f64_17<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if !x.is_finite() {
        return s.serialize_none();
    }
    RawValue::from_string(fmt17(*x))
        .map_err(S::Error::custom)?
        .serialize(s)
}

pub(crate) fn opt_f64_17<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => f64_17(v, s),
        None => s.serialize_none(),
    }
}

struct Sig17(f64);

impl Serialize for Sig17 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        f64_17(&self.0, s)
    }
}

pub(crate) fn serialize_complex_list<S: Serializer>(
    values: &[Complex64],
    s: S,
) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(values.len()))?;
    for z in values {
        seq.serialize_element(&[Sig17(z.re), Sig17(z.im)])?;
    }
    seq.end()
}

pub(crate) fn f64_list_17<S: Serializer>(values: &[f64], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(values.len()))?;
    for &v in values {
        seq.serialize_element(&Sig17(v))?;
    }
    seq.end()
}
