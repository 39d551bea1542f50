//! The verification report and its canonical writers.

use num_rational::BigRational;
use serde_json::{Map, Number, Value as Json};

/// A claimed or computed quantity in a report row.
#[derive(Clone, Debug)]
pub enum Value {
    Float(f64),
    Rational(BigRational),
    Unknown,
}

impl Value {
    pub fn as_f64(&self) -> f64 {
        match self {
            Value::Float(x) => *x,
            Value::Rational(r) => {
                use num_traits::ToPrimitive;
                r.to_f64().unwrap_or(f64::NAN)
            }
            Value::Unknown => f64::NAN,
        }
    }

    fn to_json(&self) -> Json {
        match self {
            Value::Float(x) if x.is_finite() => {
                Json::Number(Number::from_f64(*x).expect("finite float"))
            }
            Value::Float(_) | Value::Unknown => Json::Null,
            Value::Rational(r) => Json::String(format!("{}/{}", r.numer(), r.denom())),
        }
    }
}

/// One named check: a claimed value, a computed value, their gap, and the
/// verdict at the check's tolerance.
#[derive(Clone, Debug)]
pub struct CheckRow {
    pub name: String,
    pub claimed: Value,
    pub computed: Value,
    pub gap: f64,
    pub pass: bool,
}

impl CheckRow {
    fn to_json(&self) -> Json {
        let mut m = Map::new();
        m.insert("claimed".into(), self.claimed.to_json());
        m.insert("computed".into(), self.computed.to_json());
        m.insert(
            "gap".into(),
            if self.gap.is_finite() {
                Json::Number(Number::from_f64(self.gap).expect("finite gap"))
            } else {
                Json::Null
            },
        );
        m.insert("name".into(), Json::String(self.name.clone()));
        m.insert("pass".into(), Json::Bool(self.pass));
        Json::Object(m)
    }
}

/// A full report: the command echo, field parameters, and the check rows.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub p: u32,
    pub n: u32,
    pub q: u32,
    pub modulus: String,
    pub surface: Option<String>,
    pub results: Vec<CheckRow>,
    pub elapsed_ms: u64,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    pub fn to_json(&self) -> Json {
        let mut m = Map::new();
        m.insert("command".into(), Json::String(self.command.clone()));
        m.insert("elapsed_ms".into(), Json::Number(self.elapsed_ms.into()));
        m.insert("modulus".into(), Json::String(self.modulus.clone()));
        m.insert("n".into(), Json::Number(self.n.into()));
        m.insert("p".into(), Json::Number(self.p.into()));
        m.insert("q".into(), Json::Number(self.q.into()));
        m.insert(
            "results".into(),
            Json::Array(self.results.iter().map(CheckRow::to_json).collect()),
        );
        m.insert(
            "surface".into(),
            match &self.surface {
                Some(s) => Json::String(s.clone()),
                None => Json::Null,
            },
        );
        Json::Object(m)
    }
}

fn escape_into(s: &str, out: &mut String) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                out.push_str(&format!("\\u{:04x}", c as u32));
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

/// Canonical JSON writer: object keys already sorted (serde_json maps are
/// ordered), floats with 17 significant digits, two-space indentation.
pub fn write_json_value(v: &Json, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    let pad_in = "  ".repeat(indent + 1);
    match v {
        Json::Null => out.push_str("null"),
        Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Json::Number(n) => {
            if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else {
                out.push_str(&format!("{:.16e}", n.as_f64().expect("numeric")));
            }
        }
        Json::String(s) => escape_into(s, out),
        Json::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad_in);
                write_json_value(item, indent + 1, out);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad);
            out.push(']');
        }
        Json::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, val)) in map.iter().enumerate() {
                out.push_str(&pad_in);
                escape_into(k, out);
                out.push_str(": ");
                write_json_value(val, indent + 1, out);
                if i + 1 < map.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad);
            out.push('}');
        }
    }
}

fn render_value(v: &Value) -> String {
    match v {
        Value::Float(x) if x.is_finite() => format!("{:.16e}", x),
        Value::Float(_) | Value::Unknown => "unknown".into(),
        Value::Rational(r) => format!("{}/{}", r.numer(), r.denom()),
    }
}

/// CSV with the fixed header `target,claimed,computed,gap,pass`.
pub fn write_csv(report: &Report) -> String {
    let mut out = String::from("target,claimed,computed,gap,pass\n");
    for row in &report.results {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.name,
            render_value(&row.claimed),
            render_value(&row.computed),
            if row.gap.is_finite() {
                format!("{:.16e}", row.gap)
            } else {
                "unknown".into()
            },
            row.pass
        ));
    }
    out
}

/// Aligned plain-text table.
pub fn write_table(report: &Report) -> String {
    let mut rows: Vec<[String; 5]> = vec![[
        "target".into(),
        "claimed".into(),
        "computed".into(),
        "gap".into(),
        "pass".into(),
    ]];
    for row in &report.results {
        rows.push([
            row.name.clone(),
            render_value(&row.claimed),
            render_value(&row.computed),
            if row.gap.is_finite() {
                format!("{:.3e}", row.gap)
            } else {
                "unknown".into()
            },
            row.pass.to_string(),
        ]);
    }
    let mut widths = [0usize; 5];
    for r in &rows {
        for (w, cell) in widths.iter_mut().zip(r.iter()) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    for (i, r) in rows.iter().enumerate() {
        for (w, cell) in widths.iter().zip(r.iter()) {
            out.push_str(&format!("{cell:<w$}  ", w = w));
        }
        out.push('\n');
        if i == 0 {
            for w in widths {
                out.push_str(&"-".repeat(w));
                out.push_str("  ");
            }
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trips_byte_identically() {
        let report = Report {
            command: "constant --surface p2 --p 3".into(),
            p: 3,
            n: 1,
            q: 3,
            modulus: "x".into(),
            surface: Some("p2".into()),
            results: vec![CheckRow {
                name: "sharp-constant".into(),
                claimed: Value::Float((11f64 / 9.0).powf(0.25)),
                computed: Value::Rational(BigRational::new(11.into(), 9.into())),
                gap: 0.0,
                pass: true,
            }],
            elapsed_ms: 12,
        };
        let mut first = String::new();
        write_json_value(&report.to_json(), 0, &mut first);
        let parsed: Json = serde_json::from_str(&first).unwrap();
        let mut second = String::new();
        write_json_value(&parsed, 0, &mut second);
        assert_eq!(first, second);
    }

    #[test]
    fn csv_has_fixed_header() {
        let report = Report {
            command: "x".into(),
            p: 3,
            n: 1,
            q: 3,
            modulus: String::new(),
            surface: None,
            results: vec![],
            elapsed_ms: 0,
        };
        assert!(write_csv(&report).starts_with("target,claimed,computed,gap,pass\n"));
    }
}
