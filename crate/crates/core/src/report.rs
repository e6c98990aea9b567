//! Machine-readable run reports.
//!
//! Exact rationals are serialized as `"num/den"` strings (always with an
//! explicit denominator) so that no precision is lost on the wire.

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Version of the JSON report layout and the CSV headers.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub version: String,
    pub schema_version: u32,
    pub parameters: Value,
    pub results: Value,
    pub wall_time_ms: f64,
}

impl RunReport {
    pub fn new(command: impl Into<String>, parameters: Value, results: Value, wall_time_ms: f64) -> Self {
        Self {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            schema_version: SCHEMA_VERSION,
            parameters,
            results,
            wall_time_ms,
        }
    }
}

/// Formats a rational as `"num/den"`.
pub fn format_ratio<T: std::fmt::Display + Clone + num_integer::Integer>(r: &num_rational::Ratio<T>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Serde adapter for `Ratio<T>` as a `"num/den"` string.
pub mod ratio_string {
    use std::fmt::Display;
    use std::str::FromStr;

    use num_integer::Integer;
    use num_rational::Ratio;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<T, S>(r: &Ratio<T>, s: S) -> Result<S::Ok, S::Error>
    where
        T: Display + Clone + Integer,
        S: Serializer,
    {
        s.serialize_str(&super::format_ratio(r))
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<Ratio<T>, D::Error>
    where
        T: FromStr + Clone + Integer,
        D: Deserializer<'de>,
    {
        let text = String::deserialize(d)?;
        let (n, m) = text
            .split_once('/')
            .ok_or_else(|| de::Error::custom(format!("expected num/den, got {text:?}")))?;
        let n = n.trim().parse::<T>().map_err(|_| de::Error::custom("bad numerator"))?;
        let m = m.trim().parse::<T>().map_err(|_| de::Error::custom("bad denominator"))?;
        if m.is_zero() {
            return Err(de::Error::custom("zero denominator"));
        }
        Ok(Ratio::new(n, m))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;
    use proptest::prelude::*;

    #[derive(Debug, PartialEq, Serialize, Deserialize)]
    struct Wrapped {
        #[serde(with = "ratio_string")]
        r: Ratio<i64>,
    }

    #[test]
    fn integers_keep_their_denominator() {
        let w = Wrapped { r: Ratio::from_integer(3) };
        assert_eq!(serde_json::to_string(&w).unwrap(), r#"{"r":"3/1"}"#);
        assert!(serde_json::from_str::<Wrapped>(r#"{"r":"3"}"#).is_err());
        assert!(serde_json::from_str::<Wrapped>(r#"{"r":"3/0"}"#).is_err());
    }

    proptest! {
        #[test]
        fn ratio_strings_round_trip(n in -10_000i64..10_000, d in 1i64..10_000) {
            let w = Wrapped { r: Ratio::new(n, d) };
            let back: Wrapped = serde_json::from_str(&serde_json::to_string(&w).unwrap()).unwrap();
            prop_assert_eq!(back, w);
        }

        #[test]
        fn run_reports_round_trip(p in 3u64..100_000, wall in 0.0f64..1e6) {
            let report = RunReport::new(
                "cf",
                serde_json::json!({ "p": p }),
                serde_json::json!({ "quotients": [1, 2, 3], "value": "1/3" }),
                wall,
            );
            let text = serde_json::to_string(&report).unwrap();
            let back: RunReport = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back, report);
        }
    }
}
