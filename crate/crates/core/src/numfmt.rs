//! Fixed-precision float formatting for byte-stable output files.

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// Formats `v` in positional decimal notation with 17 significant digits,
/// which round-trips every finite `f64`.
pub fn sig17(v: f64) -> String {
    assert!(v.is_finite(), "cannot format non-finite value {v}");
    if v == 0.0 {
        return "0.0000000000000000".to_string();
    }
    let sci = format!("{v:.16e}");
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..].parse().expect("exponent digits");
    let decimals = (16 - exp).max(0) as usize;
    format!("{v:.decimals$}")
}

/// Serializes an `f64` through [`sig17`]. Only meaningful with `serde_json`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sig17(pub f64);

impl Serialize for Sig17 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let raw = RawValue::from_string(sig17(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}
