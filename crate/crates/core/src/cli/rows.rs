//! Flat result rows rendered either as JSON lines or as CSV. Floats are
//! always written with six decimals so output bytes are stable.

use crate::fixed::fmt6;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Int(u64),
    Num(f64),
    Null,
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as u64)
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::Int(n)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Null, Cell::Num)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Row(pub Vec<(&'static str, Cell)>);

impl Row {
    pub fn new() -> Self {
        Row(Vec::new())
    }

    pub fn with(mut self, key: &'static str, value: impl Into<Cell>) -> Self {
        self.0.push((key, value.into()));
        self
    }

    pub fn json(&self) -> String {
        let fields: Vec<String> = self
            .0
            .iter()
            .map(|(k, v)| {
                let value = match v {
                    Cell::Text(s) => serde_json::to_string(s).expect("strings serialize"),
                    Cell::Int(n) => n.to_string(),
                    Cell::Num(x) if x.is_finite() => fmt6(*x),
                    Cell::Num(_) | Cell::Null => "null".into(),
                };
                format!("{}:{value}", serde_json::to_string(k).expect("strings serialize"))
            })
            .collect();
        format!("{{{}}}", fields.join(","))
    }

    fn csv_fields(&self) -> Vec<String> {
        self.0
            .iter()
            .map(|(_, v)| match v {
                Cell::Text(s) => s.clone(),
                Cell::Int(n) => n.to_string(),
                Cell::Num(x) if x.is_finite() => fmt6(*x),
                Cell::Num(_) | Cell::Null => String::new(),
            })
            .collect()
    }
}

pub fn json_lines(rows: &[Row]) -> String {
    rows.iter().map(|r| r.json() + "\n").collect()
}

/// CSV with the header taken from the first row's keys.
pub fn delimited(rows: &[Row]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    if let Some(first) = rows.first() {
        w.write_record(first.0.iter().map(|(k, _)| *k)).expect("in-memory csv");
    }
    for r in rows {
        w.write_record(r.csv_fields()).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}
