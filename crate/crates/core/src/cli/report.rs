//! Report model shared by every subcommand, with JSON, CSV and text
//! renderings. Nothing here depends on timing, so output is reproducible.

use std::io::Write;

use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};
use serde_json::Value;

use crate::error::Result;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub statement: String,
    pub n: Option<usize>,
    pub status: Status,
    pub detail: String,
}

/// A named table; rows serialize to JSON as objects keyed by column.
#[derive(Clone, Debug)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Rows from serializable records, one column per field.
    pub fn from_records<T: Serialize>(name: &str, columns: &[&str], records: &[T]) -> Result<Self> {
        let mut table = Table::new(name, columns);
        for r in records {
            let v = serde_json::to_value(r)?;
            table.push(columns.iter().map(|c| v.get(c).cloned().unwrap_or(Value::Null)).collect());
        }
        Ok(table)
    }
}

struct Row<'a>(&'a [String], &'a [Value]);

impl Serialize for Row<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0.iter().zip(self.1) {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl Serialize for Table {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Row<'_>> = self.rows.iter().map(|r| Row(&self.columns, r)).collect();
        let mut st = s.serialize_struct("Table", 3)?;
        st.serialize_field("name", &self.name)?;
        st.serialize_field("columns", &self.columns)?;
        st.serialize_field("rows", &rows)?;
        st.end()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub exit_code: i32,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub parameters: Vec<(String, String)>,
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
    pub summary: Summary,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            parameters: Vec::new(),
            checks: Vec::new(),
            tables: Vec::new(),
            summary: Summary {
                passed: 0,
                failed: 0,
                skipped: 0,
                exit_code: 0,
            },
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.parameters.push((key.into(), value.to_string()));
    }

    pub fn check(&mut self, name: &str, statement: &str, n: Option<usize>, status: Status, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            statement: statement.into(),
            n,
            status,
            detail: detail.into(),
        });
    }

    /// Tallies the checks: any failure gives 1, otherwise any skip gives 2.
    pub fn finish(&mut self) -> i32 {
        let count = |s| self.checks.iter().filter(|c| c.status == s).count();
        let (passed, failed, skipped) = (count(Status::Pass), count(Status::Fail), count(Status::Skipped));
        let exit_code = if failed > 0 {
            1
        } else if skipped > 0 {
            2
        } else {
            0
        };
        self.summary = Summary {
            passed,
            failed,
            skipped,
            exit_code,
        };
        exit_code
    }

    pub fn render<W: Write>(&self, format: Format, out: &mut W) -> Result<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, self)?;
                writeln!(out)?;
            }
            Format::Csv => self.render_csv(out)?,
            Format::Text => self.render_text(out)?,
        }
        Ok(())
    }

    fn render_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        let mut checks = Table::new("checks", &["name", "n", "status", "statement", "detail"]);
        for c in &self.checks {
            checks.push(vec![
                Value::from(c.name.clone()),
                c.n.map_or(Value::Null, Value::from),
                serde_json::to_value(c.status)?,
                Value::from(c.statement.clone()),
                Value::from(c.detail.clone()),
            ]);
        }
        for table in std::iter::once(&checks).chain(&self.tables) {
            writeln!(out, "# {}", table.name)?;
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(&table.columns)?;
            for row in &table.rows {
                w.write_record(row.iter().map(plain))?;
            }
            w.flush()?;
        }
        Ok(())
    }

    fn render_text<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "{} (schema {})", self.command, self.schema_version)?;
        for (k, v) in &self.parameters {
            writeln!(out, "  {k} = {v}")?;
        }
        for table in &self.tables {
            writeln!(out)?;
            writeln!(out, "== {} ==", table.name)?;
            let cells: Vec<Vec<String>> = std::iter::once(table.columns.clone())
                .chain(table.rows.iter().map(|r| r.iter().map(plain).collect()))
                .collect();
            let widths: Vec<usize> = (0..table.columns.len())
                .map(|j| cells.iter().map(|r| r[j].chars().count()).max().unwrap_or(0))
                .collect();
            for row in cells {
                let line: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
                writeln!(out, "{}", line.join("  ").trim_end())?;
            }
        }
        if !self.checks.is_empty() {
            writeln!(out)?;
            let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
            for c in &self.checks {
                let n = c.n.map_or(String::new(), |n| format!("n={n}"));
                writeln!(out, "{} {:width$} {:>5}  {}", c.status.label(), c.name, n, c.detail)?;
            }
        }
        writeln!(out)?;
        writeln!(
            out,
            "{} passed, {} failed, {} skipped",
            self.summary.passed, self.summary.failed, self.summary.skipped
        )?;
        Ok(())
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("demo");
        r.param("n", 3);
        let mut t = Table::new("spectrum", &["mu", "eta"]);
        t.push(vec![Value::from("(3)"), Value::from(8)]);
        r.tables.push(t);
        r.check("top", "η_(n) = D_2n", Some(3), Status::Pass, "8");
        r
    }

    #[test]
    fn exit_codes() {
        let mut r = sample();
        assert_eq!(r.finish(), 0);
        r.check("x", "", None, Status::Skipped, "");
        assert_eq!(r.finish(), 2);
        r.check("y", "", None, Status::Fail, "");
        assert_eq!(r.finish(), 1);
    }

    #[test]
    fn renderings() {
        let mut r = sample();
        r.finish();
        let mut json = Vec::new();
        r.render(Format::Json, &mut json).unwrap();
        let v: Value = serde_json::from_slice(&json).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["tables"][0]["rows"][0]["eta"], 8);
        let mut csv = Vec::new();
        r.render(Format::Csv, &mut csv).unwrap();
        let csv = String::from_utf8(csv).unwrap();
        assert!(csv.starts_with("# checks\nname,n,status,statement,detail\ntop,3,pass,"));
        assert!(csv.contains("# spectrum\nmu,eta\n(3),8\n"));
        let mut text = Vec::new();
        r.render(Format::Text, &mut text).unwrap();
        let text = String::from_utf8(text).unwrap();
        assert!(text.contains("PASS top   n=3  8"), "{text}");
        assert!(text.ends_with("1 passed, 0 failed, 0 skipped\n"));
    }
}
