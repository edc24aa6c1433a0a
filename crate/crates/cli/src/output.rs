//! Rendering of command results as aligned tables, JSON or CSV.

use serde_json::{Map, Number, Value as Json};
use sqjc_core::sweep::format_sig12;

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Missing,
}

impl Value {
    pub fn text(s: &str) -> Self {
        Value::Text(s.to_string())
    }

    pub fn opt(x: Option<f64>) -> Self {
        x.map_or(Value::Missing, Value::Num)
    }

    fn render(&self) -> String {
        match self {
            Value::Num(x) => format_sig12(*x),
            Value::Int(n) => n.to_string(),
            Value::Bool(b) => b.to_string(),
            Value::Text(s) => s.clone(),
            Value::Missing => String::new(),
        }
    }

    /// Numbers are rounded to 12 significant digits; non-finite become null.
    fn json(&self) -> Json {
        match self {
            Value::Num(x) => format_sig12(*x)
                .parse::<f64>()
                .ok()
                .and_then(Number::from_f64)
                .map_or(Json::Null, Json::Number),
            Value::Int(n) => Json::from(*n),
            Value::Bool(b) => Json::Bool(*b),
            Value::Text(s) => Json::String(s.clone()),
            Value::Missing => Json::Null,
        }
    }
}

struct Table {
    name: String,
    columns: Vec<String>,
    rows: Vec<Vec<Value>>,
}

#[derive(Default)]
pub struct Document {
    fields: Vec<(String, Value)>,
    tables: Vec<Table>,
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl Document {
    pub fn field(&mut self, key: &str, value: Value) {
        self.fields.push((key.to_string(), value));
    }

    pub fn table(&mut self, name: &str, columns: &[&str], rows: Vec<Vec<Value>>) {
        self.tables.push(Table {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows,
        });
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let width = self.fields.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in &self.fields {
            let shown = match v {
                Value::Missing => "-".to_string(),
                v => v.render(),
            };
            out.push_str(&format!("{k:<width$}  {shown}\n"));
        }
        for t in &self.tables {
            if !out.is_empty() {
                out.push('\n');
            }
            out.push_str(&format!("{}:\n", t.name));
            let cells: Vec<Vec<String>> = t
                .rows
                .iter()
                .map(|r| r.iter().map(Value::render).collect())
                .collect();
            let widths: Vec<usize> = (0..t.columns.len())
                .map(|j| {
                    cells
                        .iter()
                        .map(|r| r[j].len())
                        .chain([t.columns[j].len()])
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let line = |items: &[String]| {
                items
                    .iter()
                    .zip(&widths)
                    .map(|(s, w)| format!("{s:>w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
            };
            out.push_str(&line(&t.columns));
            out.push('\n');
            for r in &cells {
                out.push_str(&line(r));
                out.push('\n');
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut doc = Map::new();
        for (k, v) in &self.fields {
            doc.insert(k.clone(), v.json());
        }
        for t in &self.tables {
            let rows = t
                .rows
                .iter()
                .map(|r| {
                    Json::Object(
                        t.columns
                            .iter()
                            .cloned()
                            .zip(r.iter().map(Value::json))
                            .collect(),
                    )
                })
                .collect();
            doc.insert(t.name.clone(), Json::Array(rows));
        }
        let mut text = serde_json::to_string_pretty(&Json::Object(doc)).expect("serializable");
        text.push('\n');
        text
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if !self.fields.is_empty() {
            out.push_str("key,value\n");
            for (k, v) in &self.fields {
                out.push_str(&format!("{},{}\n", csv_escape(k), csv_escape(&v.render())));
            }
        }
        for t in &self.tables {
            if !out.is_empty() {
                out.push('\n');
            }
            out.push_str(&t.columns.join(","));
            out.push('\n');
            for r in &t.rows {
                let line: Vec<String> = r.iter().map(|v| csv_escape(&v.render())).collect();
                out.push_str(&line.join(","));
                out.push('\n');
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Document {
        let mut d = Document::default();
        d.field("gap", Value::Num(1.0 / 3.0));
        d.field("phase", Value::text("normal"));
        d.field("missing", Value::Missing);
        d.table(
            "levels",
            &["index", "energy"],
            vec![
                vec![Value::Int(0), Value::Num(-0.5)],
                vec![Value::Int(1), Value::Num(0.4)],
            ],
        );
        d
    }

    #[test]
    fn json_is_one_rounded_document() {
        let text = sample().to_json();
        let v: Json = serde_json::from_str(&text).unwrap();
        assert_eq!(v["gap"].as_f64().unwrap(), 0.333333333333);
        assert_eq!(v["phase"], "normal");
        assert!(v["missing"].is_null());
        assert_eq!(v["levels"][1]["energy"].as_f64().unwrap(), 0.4);
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["gap", "phase", "missing", "levels"]);
    }

    #[test]
    fn csv_sections() {
        let text = sample().to_csv();
        assert_eq!(
            text,
            "key,value\ngap,0.333333333333\nphase,normal\nmissing,\n\nindex,energy\n0,-0.5\n1,0.4\n"
        );
    }

    #[test]
    fn table_alignment() {
        let text = sample().to_table();
        assert!(text.starts_with("gap      0.333333333333\n"));
        assert!(text.contains("missing  -\n"));
        assert!(text.contains("index  energy\n    0    -0.5\n"));
    }

    #[test]
    fn non_finite_numbers_become_null() {
        assert_eq!(Value::Num(f64::NAN).json(), Json::Null);
        assert_eq!(Value::Num(f64::INFINITY).json(), Json::Null);
    }
}
