//! Column-oriented sample tables.
//!
//! A [`DataTable`] is an immutable rectangular matrix of `f64` columns. Derived
//! columns (e.g. one-hot indicators) remember the source variable through
//! [`VariableGroup`]s, so subset search can operate on original variables while
//! tests and regressions see the encoded columns.

use std::fmt;
use std::io::Write;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("column lengths differ: expected {expected}, got {got} for `{name}`")]
    RaggedColumns {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("duplicate column name `{0}`")]
    DuplicateColumn(String),
    #[error("table has no rows")]
    Empty,
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// One original variable and the encoded columns it produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableGroup {
    pub name: String,
    pub cols: Vec<usize>,
}

/// Immutable column-major table of numeric samples.
#[derive(Clone, PartialEq)]
pub struct DataTable {
    names: Vec<String>,
    cols: Vec<Vec<f64>>,
    n_rows: usize,
    groups: Vec<VariableGroup>,
}

impl DataTable {
    /// Builds a table where every column is its own variable group.
    pub fn from_columns(
        names: Vec<String>,
        cols: Vec<Vec<f64>>,
    ) -> Result<Self, DataError> {
        let groups = names
            .iter()
            .enumerate()
            .map(|(i, n)| VariableGroup {
                name: n.clone(),
                cols: vec![i],
            })
            .collect();
        Self::with_groups(names, cols, groups)
    }

    /// Builds a table with explicit variable-group provenance.
    pub fn with_groups(
        names: Vec<String>,
        cols: Vec<Vec<f64>>,
        groups: Vec<VariableGroup>,
    ) -> Result<Self, DataError> {
        let n_rows = cols.first().map(|c| c.len()).unwrap_or(0);
        if n_rows == 0 {
            return Err(DataError::Empty);
        }
        for (name, col) in names.iter().zip(&cols) {
            if col.len() != n_rows {
                return Err(DataError::RaggedColumns {
                    name: name.clone(),
                    expected: n_rows,
                    got: col.len(),
                });
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for name in &names {
            if !seen.insert(name.clone()) {
                return Err(DataError::DuplicateColumn(name.clone()));
            }
        }
        Ok(DataTable {
            names,
            cols,
            n_rows,
            groups,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn groups(&self) -> &[VariableGroup] {
        &self.groups
    }

    pub fn column(&self, idx: usize) -> &[f64] {
        &self.cols[idx]
    }

    pub fn column_index(&self, name: &str) -> Result<usize, DataError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| DataError::UnknownColumn(name.to_string()))
    }

    pub fn group_index(&self, name: &str) -> Result<usize, DataError> {
        self.groups
            .iter()
            .position(|g| g.name == name)
            .ok_or_else(|| DataError::UnknownColumn(name.to_string()))
    }

    /// New table with the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> DataTable {
        let cols = self
            .cols
            .iter()
            .map(|c| rows.iter().map(|&r| c[r]).collect())
            .collect();
        DataTable {
            names: self.names.clone(),
            cols,
            n_rows: rows.len(),
            groups: self.groups.clone(),
        }
    }

    /// Writes the table as CSV with a header row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), DataError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.names)?;
        for r in 0..self.n_rows {
            let row: Vec<String> = self.cols.iter().map(|c| format_float(c[r])).collect();
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Shortest representation that round-trips through `f64` parsing.
pub fn format_float(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{v:.1}")
    } else {
        let mut s = format!("{v}");
        if !s.contains('.') && !s.contains('e') && !s.contains("inf") && !s.contains("NaN") {
            s.push_str(".0");
        }
        s
    }
}

impl fmt::Debug for DataTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "DataTable({} rows x {} cols: {:?})",
            self.n_rows, self.cols.len(), self.names
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_and_selection() {
        let t = DataTable::from_columns(
            vec!["a".into(), "b".into()],
            vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]],
        )
        .unwrap();
        assert_eq!(t.n_rows(), 3);
        assert_eq!(t.column_index("b").unwrap(), 1);
        assert!(t.column_index("c").is_err());
        let s = t.select_rows(&[2, 0]);
        assert_eq!(s.column(0), &[3.0, 1.0]);
        assert_eq!(s.column(1), &[6.0, 4.0]);
    }

    #[test]
    fn rejects_ragged_and_duplicate() {
        assert!(DataTable::from_columns(
            vec!["a".into(), "b".into()],
            vec![vec![1.0], vec![1.0, 2.0]],
        )
        .is_err());
        assert!(DataTable::from_columns(
            vec!["a".into(), "a".into()],
            vec![vec![1.0], vec![2.0]],
        )
        .is_err());
    }

    #[test]
    fn csv_is_stable() {
        let t = DataTable::from_columns(
            vec!["x".into(), "y".into()],
            vec![vec![1.0, 0.25], vec![2.0, -3.5]],
        )
        .unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "x,y\n1.0,2.0\n0.25,-3.5\n");
    }
}
