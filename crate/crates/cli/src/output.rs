//! One document model rendered as CSV or JSON with identical number strings.

use std::str::FromStr;

use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
    B(bool),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::I(x as i64)
    }
}

impl From<i32> for Cell {
    fn from(x: i32) -> Self {
        Cell::I(x as i64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::I(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::B(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::S(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::S(x)
    }
}

/// 17 significant digits, enough to round-trip any double.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        // Explicit exponent sign, as serde_json prints it.
        let s = format!("{x:.16e}");
        match s.split_once('e') {
            Some((m, e)) if !e.starts_with('-') => format!("{m}e+{e}"),
            _ => s,
        }
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::F(x) => num(*x),
            Cell::I(i) => i.to_string(),
            Cell::B(b) => b.to_string(),
            Cell::S(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::S(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::F(x) if x.is_finite() => Value::Number(Number::from_str(&num(*x)).expect("formatted float parses")),
            Cell::F(x) => Value::String(num(*x)),
            Cell::I(i) => Value::from(*i),
            Cell::B(b) => Value::Bool(*b),
            Cell::S(s) => Value::String(s.clone()),
        }
    }
}

/// A record is a single-row table rendered as an object in JSON; a table is
/// rendered as an array of objects.
#[derive(Debug, Clone)]
pub struct Section {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub record: bool,
}

#[derive(Debug, Clone, Default)]
pub struct Doc {
    pub sections: Vec<Section>,
}

impl Doc {
    pub fn record(&mut self, name: &str, fields: Vec<(&str, Cell)>) {
        let (columns, row): (Vec<_>, Vec<_>) = fields.into_iter().map(|(k, v)| (k.to_string(), v)).unzip();
        self.sections.push(Section { name: name.into(), columns, rows: vec![row], record: true });
    }

    pub fn table(&mut self, name: &str, columns: &[&str], rows: Vec<Vec<Cell>>) {
        self.sections.push(Section {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows,
            record: false,
        });
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.csv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json()).expect("document serializes");
                s.push('\n');
                s
            }
        }
    }

    fn csv(&self) -> String {
        let mut out = String::new();
        for (i, sec) in self.sections.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push_str(&format!("# {}\n", sec.name));
            out.push_str(&sec.columns.join(","));
            out.push('\n');
            for row in &sec.rows {
                out.push_str(&row.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
                out.push('\n');
            }
        }
        out
    }

    fn json(&self) -> Value {
        let mut top = Map::new();
        for sec in &self.sections {
            let objects: Vec<Value> = sec
                .rows
                .iter()
                .map(|row| Value::Object(sec.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect()))
                .collect();
            let v = if sec.record { objects.into_iter().next().unwrap_or(Value::Null) } else { Value::Array(objects) };
            top.insert(sec.name.clone(), v);
        }
        Value::Object(top)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, -2.5e17, std::f64::consts::PI] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(2f64.sqrt()), "1.4142135623730951e+0");
        assert_eq!(num(-0.25), "-2.5000000000000000e-1");
    }

    #[test]
    fn csv_and_json_share_number_text() {
        let mut d = Doc::default();
        d.record("model", vec![("a", 0.1.into()), ("note", "x,y".into())]);
        d.table("rows", &["k", "v"], vec![vec![1usize.into(), (1.0 / 3.0).into()]]);
        let csv = d.render(Format::Csv);
        let json = d.render(Format::Json);
        assert!(csv.contains("3.3333333333333331e-1"));
        assert!(csv.contains("1.0000000000000001e-1"));
        assert!(json.contains("1.0000000000000001e-1"));
        assert!(json.contains("3.3333333333333331e-1"));
        assert!(csv.contains("\"x,y\""));
        let v: Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["rows"][0]["k"], 1);
    }
}
