//! Fixed 17-significant-digit float formatting shared by the CSV and JSON
//! writers, so outputs are byte-identical across runs and platforms.

use serde::Serializer;
use serde_json::value::RawValue;

/// Scientific notation with 17 significant digits, e.g. `1.2500000000000000e-1`.
pub fn sci17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

fn raw(x: f64) -> Box<RawValue> {
    let text = if x.is_finite() { sci17(x) } else { "null".to_string() };
    RawValue::from_string(text).expect("formatted float is valid JSON")
}

/// `serialize_with` helper: one float as a 17-digit JSON number.
pub fn json_f64<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&raw(*x), s)
}

/// `serialize_with` helper: a float sequence as 17-digit JSON numbers.
pub fn json_f64_seq<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for &x in xs {
        seq.serialize_element(&raw(x))?;
    }
    seq.end()
}

/// `serialize_with` helper for optional floats.
pub fn json_opt_f64<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => json_f64(v, s),
        None => s.serialize_none(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(sci17(0.125), "1.2500000000000000e-1");
        assert_eq!(sci17(-3.0), "-3.0000000000000000e0");
        let back: f64 = sci17(std::f64::consts::PI).parse().unwrap();
        assert_eq!(back, std::f64::consts::PI);
    }

    #[test]
    fn json_numbers() {
        #[derive(serde::Serialize)]
        struct T {
            #[serde(serialize_with = "json_f64")]
            x: f64,
            #[serde(serialize_with = "json_f64_seq")]
            v: Vec<f64>,
        }
        let s = serde_json::to_string(&T {
            x: 0.1,
            v: vec![1.0, f64::NAN],
        })
        .unwrap();
        assert_eq!(s, r#"{"x":1.0000000000000001e-1,"v":[1.0000000000000000e0,null]}"#);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["x"].as_f64(), Some(0.1));
    }
}
