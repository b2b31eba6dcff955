//! Published mislabeling results for the four benchmark tables, shipped as
//! `data/reference_tables.csv` and validated when first loaded.
//!
//! Schema: `table,k,param,value,method,mean,stderr`. `param`/`value` name the
//! swept quantity (`nu`, `sigma`, `d`, or `outliers` with 0 = without and
//! 1 = with). Methods are `<clustering>_<initialization>` labels such as
//! `cod_iod` or `lloyd_kmeanspp`.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const EMBEDDED: &str = include_str!("../data/reference_tables.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableId {
    /// Effect of the degrees of freedom.
    Nu,
    /// Effect of the scale.
    Sigma,
    /// Effect of the dimension.
    Dim,
    /// Letter-recognition clustering.
    Letters,
}

impl TableId {
    pub const ALL: [TableId; 4] = [TableId::Nu, TableId::Sigma, TableId::Dim, TableId::Letters];

    pub fn as_str(&self) -> &'static str {
        match self {
            TableId::Nu => "nu",
            TableId::Sigma => "sigma",
            TableId::Dim => "dim",
            TableId::Letters => "letters",
        }
    }

    /// Name of the swept quantity.
    pub fn param(&self) -> &'static str {
        match self {
            TableId::Nu => "nu",
            TableId::Sigma => "sigma",
            TableId::Dim => "d",
            TableId::Letters => "outliers",
        }
    }

    /// Methods compared in this table, in column order.
    pub fn methods(&self) -> &'static [&'static str] {
        match self {
            TableId::Letters => &[
                "cod_iod",
                "kmedian_iod",
                "lloyd_iod",
                "lloyd_kmeanspp",
                "lloyd_random",
            ],
            _ => &["cod_iod", "lloyd_iod", "lloyd_kmeanspp", "lloyd_random"],
        }
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TableId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TableId::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::UnknownTable(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceCell {
    pub table: TableId,
    pub k: usize,
    pub param: String,
    pub value: f64,
    pub method: String,
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceTables {
    cells: Vec<ReferenceCell>,
}

impl ReferenceTables {
    /// The tables bundled with the crate.
    pub fn embedded() -> &'static ReferenceTables {
        static TABLES: OnceLock<ReferenceTables> = OnceLock::new();
        TABLES.get_or_init(|| {
            ReferenceTables::parse(EMBEDDED).expect("bundled reference tables are valid")
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let mut cells = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record?;
            let line = i + 2;
            let bad = |message: String| Error::Parse {
                path: "reference_tables.csv".into(),
                line,
                message,
            };
            if record.len() != 7 {
                return Err(bad(format!("expected 7 fields, found {}", record.len())));
            }
            let num = |j: usize| -> Result<f64> {
                record[j]
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| bad(format!("field {}: {e}", j + 1)))
            };
            let cell = ReferenceCell {
                table: record[0].trim().parse()?,
                k: record[1]
                    .trim()
                    .parse()
                    .map_err(|e| bad(format!("k: {e}")))?,
                param: record[2].trim().to_string(),
                value: num(3)?,
                method: record[4].trim().to_string(),
                mean: num(5)?,
                stderr: num(6)?,
            };
            if !(0.0..=1.0).contains(&cell.mean) {
                return Err(bad(format!("mean {} outside [0, 1]", cell.mean)));
            }
            if cell.stderr < 0.0 {
                return Err(bad(format!("negative stderr {}", cell.stderr)));
            }
            if cell.param != cell.table.param() {
                return Err(bad(format!(
                    "table {} sweeps {}, not {}",
                    cell.table,
                    cell.table.param(),
                    cell.param
                )));
            }
            if !cell.table.methods().contains(&cell.method.as_str()) {
                return Err(bad(format!(
                    "method {} is not part of table {}",
                    cell.method, cell.table
                )));
            }
            cells.push(cell);
        }
        let tables = ReferenceTables { cells };
        tables.check_complete()?;
        Ok(tables)
    }

    /// Every `(table, k, value)` row must carry every method of its table
    /// exactly once.
    fn check_complete(&self) -> Result<()> {
        for cell in &self.cells {
            for method in cell.table.methods() {
                let hits = self
                    .cells
                    .iter()
                    .filter(|c| {
                        c.table == cell.table
                            && c.k == cell.k
                            && c.value == cell.value
                            && c.method == *method
                    })
                    .count();
                if hits != 1 {
                    return Err(Error::Config(format!(
                        "reference grid {} k={} {}={} has {hits} entries for {method}",
                        cell.table, cell.k, cell.param, cell.value
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn cells(&self) -> &[ReferenceCell] {
        &self.cells
    }

    pub fn lookup(&self, table: TableId, k: usize, value: f64, method: &str) -> Result<(f64, f64)> {
        self.cells
            .iter()
            .find(|c| c.table == table && c.k == k && c.value == value && c.method == method)
            .map(|c| (c.mean, c.stderr))
            .ok_or_else(|| {
                Error::UnknownCell(format!("{table} k={k} {}={value} {method}", table.param()))
            })
    }
}

/// Published `(mean, stderr)` for one cell of the bundled tables.
pub fn lookup_reference(table: TableId, k: usize, value: f64, method: &str) -> Result<(f64, f64)> {
    ReferenceTables::embedded().lookup(table, k, value, method)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_cells() {
        assert_eq!(
            lookup_reference(TableId::Nu, 2, 10.0, "cod_iod").unwrap(),
            (0.014, 0.0)
        );
        assert_eq!(
            lookup_reference(TableId::Sigma, 3, 10.0, "cod_iod").unwrap(),
            (0.509, 0.003)
        );
        assert_eq!(
            lookup_reference(TableId::Dim, 3, 30.0, "cod_iod").unwrap(),
            (0.467, 0.002)
        );
        assert_eq!(
            lookup_reference(TableId::Letters, 2, 0.0, "lloyd_kmeanspp").unwrap(),
            (0.355, 0.004)
        );
    }

    #[test]
    fn unknown_cell() {
        assert!(matches!(
            lookup_reference(TableId::Nu, 4, 10.0, "cod_iod"),
            Err(Error::UnknownCell(_))
        ));
        assert!("bogus".parse::<TableId>().is_err());
    }

    #[test]
    fn grids_are_complete() {
        let t = ReferenceTables::embedded();
        assert_eq!(t.cells().len(), 3 * 6 * 4 + 4 * 5);
        assert!(t.cells().iter().all(|c| (0.0..=1.0).contains(&c.mean)));
    }

    #[test]
    fn rejects_out_of_range_mean() {
        let text = "table,k,param,value,method,mean,stderr\nnu,2,nu,1,cod_iod,1.5,0.0\n";
        assert!(ReferenceTables::parse(text).is_err());
    }

    #[test]
    fn rejects_incomplete_grid() {
        let text = "table,k,param,value,method,mean,stderr\nnu,2,nu,1,cod_iod,0.5,0.0\n";
        assert!(ReferenceTables::parse(text).is_err());
    }
}
