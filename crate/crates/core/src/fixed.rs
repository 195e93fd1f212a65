//! Fixed six-decimal number formatting for emitted reports.

use serde::Serializer;
use serde_json::value::RawValue;

pub fn fmt6(x: f64) -> String {
    format!("{x:.6}")
}

/// `serialize_with` helper: writes `x` as a JSON number with six decimals.
pub fn six<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if !x.is_finite() {
        return s.serialize_none();
    }
    let raw = RawValue::from_string(fmt6(*x)).map_err(serde::ser::Error::custom)?;
    s.serialize_some(&raw)
}

pub fn six_matrix<S: Serializer>(rows: &[Vec<f64>], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(rows.len()))?;
    for row in rows {
        let cells: Vec<Box<RawValue>> = row
            .iter()
            .map(|x| RawValue::from_string(fmt6(*x)).map_err(serde::ser::Error::custom))
            .collect::<Result<_, _>>()?;
        seq.serialize_element(&cells)?;
    }
    seq.end()
}

#[cfg(test)]
mod tests {
    use serde::Serialize;

    #[derive(Serialize)]
    struct T {
        #[serde(serialize_with = "super::six")]
        x: f64,
    }

    #[test]
    fn six_decimals() {
        assert_eq!(serde_json::to_string(&T { x: 2.0 / 3.0 }).unwrap(), r#"{"x":0.666667}"#);
        assert_eq!(serde_json::to_string(&T { x: 1.0 }).unwrap(), r#"{"x":1.000000}"#);
        assert_eq!(serde_json::to_string(&T { x: f64::NAN }).unwrap(), r#"{"x":null}"#);
    }
}
