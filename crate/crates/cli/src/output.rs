use std::path::Path;

use lsi_core::AreaKind;
use serde::Serialize;
use serde_json::Value;

use crate::experiment::RunError;

/// Rounds to 9 significant digits so printed values are stable.
pub fn sig9(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.8e}").parse().unwrap_or(x)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n
                .as_f64()
                .and_then(|f| serde_json::Number::from_f64(sig9(f)))
            {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Serializes with every float rounded by [`sig9`].
pub fn rounded_json<T: Serialize>(value: &T) -> Value {
    let mut v = serde_json::to_value(value).expect("output types serialize");
    round_value(&mut v);
    v
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), RunError> {
    let mut text = serde_json::to_string_pretty(&rounded_json(value)).expect("json values print");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| RunError::io(path, e))
}

pub fn area_name(a: AreaKind) -> &'static str {
    match a {
        AreaKind::A1 => "A1",
        AreaKind::A2 => "A2",
        AreaKind::Custom => "custom",
    }
}
