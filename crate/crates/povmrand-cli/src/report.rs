//! Deterministic JSON rendering for reports.
//!
//! Floating-point values are rounded to 12 significant digits and printed in
//! Rust's shortest-roundtrip form (always '.', no locale), so repeated runs
//! with the same seed produce byte-identical output.

use std::fmt::Write as _;

#[derive(Clone, Debug)]
pub enum Json {
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
    Arr(Vec<Json>),
    Obj(Vec<(&'static str, Json)>),
    Null,
}

/// Round to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let magnitude = x.abs().log10().floor() as i32;
    let factor = 10f64.powi(11 - magnitude);
    if factor.is_finite() && factor != 0.0 {
        (x * factor).round() / factor
    } else {
        x
    }
}

pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        return "\"nan\"".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "\"inf\"" } else { "\"-inf\"" }.to_string();
    }
    let rounded = round_sig(x);
    // Normalize the negative-zero artifact of rounding.
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    format!("{rounded}")
}

fn escape(s: &str, out: &mut String) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

impl Json {
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out);
        out
    }

    fn write(&self, out: &mut String) {
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Int(i) => {
                let _ = write!(out, "{i}");
            }
            Json::Num(x) => out.push_str(&fmt_f64(*x)),
            Json::Str(s) => escape(s, out),
            Json::Arr(items) => {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    item.write(out);
                }
                out.push(']');
            }
            Json::Obj(fields) => {
                out.push('{');
                for (i, (key, value)) in fields.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    escape(key, out);
                    out.push(':');
                    value.write(out);
                }
                out.push('}');
            }
        }
    }
}

/// Row-major [re, im] pair list for a complex matrix.
pub fn matrix_json(m: &povmrand::ComplexMatrix) -> Json {
    let mut entries = Vec::with_capacity(m.rows() * m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let z = m[(i, j)];
            entries.push(Json::Arr(vec![Json::Num(z.re), Json::Num(z.im)]));
        }
    }
    Json::Arr(entries)
}

pub fn ket_json(k: &povmrand::Ket) -> Json {
    Json::Arr(
        k.amplitudes()
            .iter()
            .map(|z| Json::Arr(vec![Json::Num(z.re), Json::Num(z.im)]))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_f64(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_f64(0.5), "0.5");
        assert_eq!(fmt_f64(0.0), "0");
        assert_eq!(fmt_f64(1.7924812503605782), "1.79248125036");
        assert_eq!(fmt_f64(-2.0f64.sqrt()), "-1.41421356237");
    }

    #[test]
    fn stable_under_reround() {
        for &x in &[std::f64::consts::PI, 1e-13, 123456.789012345, -0.1] {
            let once: f64 = fmt_f64(x).parse().unwrap();
            assert_eq!(fmt_f64(once), fmt_f64(x));
        }
    }

    #[test]
    fn renders_nested_objects() {
        let j = Json::Obj(vec![
            ("a", Json::Int(1)),
            ("b", Json::Arr(vec![Json::Num(0.25), Json::Null])),
        ]);
        assert_eq!(j.render(), "{\"a\":1,\"b\":[0.25,null]}");
    }
}
