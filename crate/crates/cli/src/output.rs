//! Result tables and their CSV / JSON renderings.

use serde_json::Value;

/// One table cell. Floats render with 17 significant digits so the CSV
/// round-trips exactly; `Null` marks fields a row legitimately lacks
/// (e.g. exponents of a rejected scaling regime).
#[derive(Debug, Clone)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Str(String),
    Null,
}

impl Cell {
    pub fn beta(beta: goldstone::Beta) -> Cell {
        match beta {
            goldstone::Beta::Finite(b) => Cell::Float(b),
            goldstone::Beta::Infinite => Cell::Str("inf".into()),
        }
    }

    fn render_csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => render_float(*x),
            Cell::Bool(b) => b.to_string(),
            Cell::Str(s) => s.clone(),
            Cell::Null => String::new(),
        }
    }

    fn render_json(&self) -> Value {
        match self {
            Cell::Int(i) => Value::from(*i),
            Cell::Float(x) => serde_json::Number::from_f64(*x)
                .map(Value::Number)
                .unwrap_or_else(|| Value::String(render_float(*x))),
            Cell::Bool(b) => Value::from(*b),
            Cell::Str(s) => Value::from(s.as_str()),
            Cell::Null => Value::Null,
        }
    }
}

fn render_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

/// A header plus uniformly shaped rows.
#[derive(Debug)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width must match the header"
        );
        self.rows.push(row);
    }

    /// UTF-8 CSV: header row, comma separators, LF line endings.
    pub fn render_csv(&self) -> String {
        let mut text = self.columns.join(",");
        text.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(Cell::render_csv).collect();
            text.push_str(&fields.join(","));
            text.push('\n');
        }
        text
    }

    /// One top-level JSON object: command name, resolved parameters, and
    /// the rows as column-keyed objects.
    pub fn render_json(&self, command: &str, params: &Value) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = serde_json::Map::new();
                for (column, cell) in self.columns.iter().zip(row) {
                    obj.insert((*column).to_string(), cell.render_json());
                }
                Value::Object(obj)
            })
            .collect();
        let mut doc = serde_json::Map::new();
        doc.insert("command".into(), Value::from(command));
        doc.insert("params".into(), params.clone());
        doc.insert("rows".into(), Value::Array(rows));
        let mut text =
            serde_json::to_string_pretty(&Value::Object(doc)).expect("tables serialize");
        text.push('\n');
        text
    }
}
