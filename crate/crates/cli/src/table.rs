use serde_json::{json, Map, Value};

/// Output format of a subcommand. `Text` is what a bare invocation prints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Tsv,
    Json,
}

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i128),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn plain(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) if v.is_infinite() => "inf".into(),
            Cell::Float(v) => format!("{v:.12e}"),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => match i64::try_from(*v) {
                Ok(v) => json!(v),
                Err(_) => json!(v.to_string()),
            },
            Cell::Float(v) if v.is_finite() => json!(v),
            Cell::Float(_) => json!("inf"),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

macro_rules! cell_from_int {
    ($($t:ty),*) => {$(
        impl From<$t> for Cell {
            fn from(v: $t) -> Self {
                Cell::Int(v as i128)
            }
        }
    )*};
}
cell_from_int!(u32, u64, i64, usize, u128);

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// A result table with a fixed column order.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text(),
            Format::Csv => self.delimited(','),
            Format::Tsv => self.delimited('\t'),
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| {
                        let obj: Map<String, Value> = self
                            .columns
                            .iter()
                            .zip(r)
                            .map(|(c, v)| (c.to_string(), v.json()))
                            .collect();
                        Value::Object(obj)
                    })
                    .collect();
                let doc = json!({ "schema": SCHEMA, "columns": self.columns, "rows": rows });
                serde_json::to_string_pretty(&doc).expect("table serializes") + "\n"
            }
        }
    }

    fn delimited(&self, sep: char) -> String {
        let sep = sep.to_string();
        let mut out = format!("# schema={SCHEMA}\n{}\n", self.columns.join(&sep));
        for r in &self.rows {
            let fields: Vec<String> = r.iter().map(Cell::plain).collect();
            out.push_str(&fields.join(&sep));
            out.push('\n');
        }
        out
    }

    /// A lone value prints bare; anything else prints a header and
    /// space-separated rows.
    fn text(&self) -> String {
        if self.columns.len() == 1 && self.rows.len() == 1 {
            return self.rows[0][0].text() + "\n";
        }
        let mut out = self.columns.join(" ") + "\n";
        for r in &self.rows {
            let fields: Vec<String> = r.iter().map(Cell::text).collect();
            out.push_str(&fields.join(" "));
            out.push('\n');
        }
        out
    }
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Float(v) if *v == 0.0 || (1e-4..1e9).contains(&v.abs()) => format!("{v}"),
            Cell::Float(v) if v.is_finite() => format!("{v:e}"),
            other => other.plain(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats() {
        let mut t = Table::new(&["n", "ratio"]);
        t.push(vec![7u64.into(), 0.5.into()]);
        assert_eq!(t.render(Format::Csv), "# schema=1\nn,ratio\n7,5.000000000000e-1\n");
        assert_eq!(t.render(Format::Tsv), "# schema=1\nn\tratio\n7\t5.000000000000e-1\n");
        assert_eq!(t.render(Format::Text), "n ratio\n7 0.5\n");
        let v: Value = serde_json::from_str(&t.render(Format::Json)).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["rows"][0]["n"], 7);
        let mut one = Table::new(&["count"]);
        one.push(vec![108u64.into()]);
        assert_eq!(one.render(Format::Text), "108\n");
    }
}
