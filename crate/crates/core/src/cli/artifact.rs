use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::Result;

pub const TOOL: &str = "twistlab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Plotdata,
}

/// Everything that determines an artifact's bytes. Output paths are not part
/// of it; descriptor inputs are recorded by content.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub params: Value,
    pub grid: Value,
    pub seed: u64,
    pub format: Format,
}

impl RunConfig {
    /// Hex SHA-256 of the compact JSON form.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("run config is serializable");
        hex::encode(Sha256::digest(&bytes))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::Int(i) => write!(f, "{i}"),
            Cell::Num(x) => write!(f, "{x:e}"),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<i64> for Cell {
    fn from(i: i64) -> Self {
        Cell::Int(i)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Verdict-bearing outcome of a subcommand.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub experiment: &'static str,
    pub config: RunConfig,
    pub result: Value,
    pub table: Table,
    /// Set when the headline verdict is Inconclusive.
    pub inconclusive: bool,
}

impl Artifact {
    pub fn header(&self) -> Value {
        json!({
            "tool": TOOL,
            "version": VERSION,
            "experiment": self.experiment,
            "config_hash": self.config.hash(),
            "seed": self.config.seed,
        })
    }

    fn comment_line(&self) -> String {
        format!(
            "# {TOOL} {VERSION} experiment={} config_hash={} seed={}\n",
            self.experiment,
            self.config.hash(),
            self.config.seed
        )
    }

    pub fn render(&self) -> Result<Vec<u8>> {
        match self.config.format {
            Format::Json => {
                let mut doc = self.header();
                doc["config"] = serde_json::to_value(&self.config).expect("run config is serializable");
                doc["result"] = self.result.clone();
                let mut out = serde_json::to_vec_pretty(&doc).expect("artifact is serializable");
                out.push(b'\n');
                Ok(out)
            }
            Format::Csv => {
                let mut out = self.comment_line().into_bytes();
                {
                    let mut w = csv::Writer::from_writer(&mut out);
                    w.write_record(&self.table.columns).map_err(io_error)?;
                    for row in &self.table.rows {
                        w.write_record(row.iter().map(|c| c.to_string())).map_err(io_error)?;
                    }
                    w.flush().map_err(|e| io_error(e.into()))?;
                }
                Ok(out)
            }
            Format::Plotdata => {
                let mut out = self.comment_line();
                out.push_str(&format!("# {}\n", self.table.columns.join(" ")));
                for row in &self.table.rows {
                    let cells: Vec<String> = row.iter().map(|c| c.to_string().replace(' ', "_")).collect();
                    out.push_str(&cells.join(" "));
                    out.push('\n');
                }
                Ok(out.into_bytes())
            }
        }
    }
}

fn io_error(e: csv::Error) -> crate::error::Error {
    crate::error::Error::Unsupported(format!("csv output failed: {e}"))
}
