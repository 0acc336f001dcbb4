//! Byte-deterministic JSON writing with fixed 6-decimal floats.
//!
//! serde_json prints the shortest round-trip representation of a float,
//! which is not what the output formats promise, so documents are assembled
//! here from small pieces instead.

use std::fmt::Write as _;

/// Fixed 6-decimal rendering. Negative zero prints as `0.000000`.
pub fn num(x: f64) -> String {
    let s = format!("{:.6}", x);
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

pub fn string(s: &str) -> String {
    serde_json::to_string(s).expect("string serialization cannot fail")
}

pub fn vec3(v: [f64; 3]) -> String {
    format!("[{}, {}, {}]", num(v[0]), num(v[1]), num(v[2]))
}

pub fn string_array<S: AsRef<str>>(items: &[S]) -> String {
    let parts: Vec<String> = items.iter().map(|s| string(s.as_ref())).collect();
    format!("[{}]", parts.join(", "))
}

pub fn int_array<T: std::fmt::Display>(items: &[T]) -> String {
    let parts: Vec<String> = items.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

/// A single-line JSON object built field by field, keys in insertion order.
#[derive(Default)]
pub struct Object {
    buf: String,
}

impl Object {
    pub fn new() -> Self {
        Object::default()
    }

    /// Adds a field whose value is already valid JSON.
    pub fn raw(mut self, key: &str, value: impl AsRef<str>) -> Self {
        if !self.buf.is_empty() {
            self.buf.push_str(", ");
        }
        let _ = write!(self.buf, "{}: {}", string(key), value.as_ref());
        self
    }

    pub fn str(self, key: &str, value: &str) -> Self {
        let v = string(value);
        self.raw(key, v)
    }

    pub fn num(self, key: &str, value: f64) -> Self {
        let v = num(value);
        self.raw(key, v)
    }

    pub fn int(self, key: &str, value: impl std::fmt::Display) -> Self {
        let v = value.to_string();
        self.raw(key, v)
    }

    pub fn finish(self) -> String {
        format!("{{{}}}", self.buf)
    }
}

/// Array of pre-rendered items, one per line. Empty arrays render as `[]`.
pub fn lines_array(items: &[String], indent: usize) -> String {
    if items.is_empty() {
        return "[]".to_string();
    }
    let pad = " ".repeat(indent + 2);
    let mut s = String::from("[\n");
    for (i, item) in items.iter().enumerate() {
        s.push_str(&pad);
        s.push_str(item);
        if i + 1 < items.len() {
            s.push(',');
        }
        s.push('\n');
    }
    s.push_str(&" ".repeat(indent));
    s.push(']');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers() {
        assert_eq!(num(1.0), "1.000000");
        assert_eq!(num(-0.0), "0.000000");
        assert_eq!(num(-1e-9), "0.000000");
        assert_eq!(num(std::f64::consts::PI), "3.141593");
    }

    #[test]
    fn objects_and_arrays() {
        let o = Object::new().str("a", "x\"y").num("b", 0.5).int("c", 3).finish();
        assert_eq!(o, r#"{"a": "x\"y", "b": 0.500000, "c": 3}"#);
        assert_eq!(lines_array(&[], 0), "[]");
        assert_eq!(lines_array(&["1".into(), "2".into()], 0), "[\n  1,\n  2\n]");
    }
}
