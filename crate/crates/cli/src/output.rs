use clap::ValueEnum;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// `x` with 12 significant digits, positional for moderate exponents.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        format!("{:.*}", (11 - exp) as usize, x)
    } else {
        format!("{x:.11e}")
    }
}

/// `x` rounded to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Rounds every number inside a JSON value to 12 significant digits.
pub fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n
            .as_f64()
            .and_then(|x| serde_json::Number::from_f64(round12(x)))
            .map(Value::Number)
            .unwrap_or(Value::Null),
        Value::Array(items) => Value::Array(items.into_iter().map(round_json).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

pub fn print_json(v: Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(&round_json(v)).expect("serializable")
    );
}

/// Aligned `key  value` lines.
pub struct Table {
    rows: Vec<(String, String)>,
}

impl Table {
    pub fn new() -> Self {
        Self { rows: Vec::new() }
    }

    pub fn row(&mut self, key: impl Into<String>, value: impl Into<String>) -> &mut Self {
        self.rows.push((key.into(), value.into()));
        self
    }

    pub fn num(&mut self, key: impl Into<String>, x: f64) -> &mut Self {
        self.row(key, sig12(x))
    }

    pub fn print(&self) {
        let width = self.rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in &self.rows {
            println!("{k:<width$}  {v}");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(0.8090169943749474), "0.809016994375");
        assert_eq!(sig12(2.0), "2.00000000000");
        assert_eq!(sig12(-1234.5), "-1234.50000000");
        assert_eq!(sig12(1.5e-9), "1.50000000000e-9");
        assert_eq!(sig12(0.0), "0");
    }

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round12(1.0 / 3.0), 0.333333333333);
        assert!((round12(std::f64::consts::PI) - std::f64::consts::PI).abs() < 1e-11);
    }
}
