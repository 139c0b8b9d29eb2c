//! Role-tagged observational data.
//!
//! Every column carries one of five roles: `context` (observed before the
//! decision), `pre` (non-actionable covariates realized before the
//! alteration), `actionable`, `post` (non-actionable variables realized after
//! the alteration) and `outcome`. Post-alteration columns are stored with the
//! data but excluded from every estimator input — the adjustment conditions
//! only on context, pre-alteration covariates and actions, with downstream
//! variables marginalized.
//!
//! The on-disk form is CSV with a self-describing header: each header entry is
//! `name:role`, rows are plain decimal numerals, UTF-8, comma-separated.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::linalg::Mat;
use crate::region::PolytopeRegion;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Context,
    Pre,
    Actionable,
    Post,
    Outcome,
}

impl Role {
    pub fn as_str(&self) -> &'static str {
        match self {
            Role::Context => "context",
            Role::Pre => "pre",
            Role::Actionable => "actionable",
            Role::Post => "post",
            Role::Outcome => "outcome",
        }
    }

    pub fn parse(s: &str) -> Result<Role> {
        match s {
            "context" => Ok(Role::Context),
            "pre" => Ok(Role::Pre),
            "actionable" => Ok(Role::Actionable),
            "post" => Ok(Role::Post),
            "outcome" => Ok(Role::Outcome),
            other => Err(Error::Schema(format!(
                "unknown role {other:?} (expected context|pre|actionable|post|outcome)"
            ))),
        }
    }

    /// Position of the role's block in the generation order:
    /// context ≺ intermediates ≺ outcome.
    fn block_class(&self) -> u8 {
        match self {
            Role::Context => 0,
            Role::Pre | Role::Actionable | Role::Post => 1,
            Role::Outcome => 2,
        }
    }
}

/// Ordered, named, role-tagged columns.
#[derive(Debug, Clone, PartialEq)]
pub struct VariableSchema {
    columns: Vec<(String, Role)>,
}

impl VariableSchema {
    pub fn new(columns: Vec<(String, Role)>) -> Result<Self> {
        let mut seen: Vec<&str> = Vec::new();
        for (name, _) in &columns {
            if name.is_empty() {
                return Err(Error::Schema("empty column name".into()));
            }
            if seen.contains(&name.as_str()) {
                return Err(Error::Schema(format!("duplicate column name {name:?}")));
            }
            seen.push(name);
        }
        let mut class = 0u8;
        for (name, role) in &columns {
            let c = role.block_class();
            if c < class {
                return Err(Error::Schema(format!(
                    "column {name:?} breaks the context ≺ intermediate ≺ outcome ordering"
                )));
            }
            class = c;
        }
        let has = |r: Role| columns.iter().any(|(_, role)| *role == r);
        if !has(Role::Context) || !has(Role::Actionable) || !has(Role::Outcome) {
            return Err(Error::Schema(
                "schema needs at least one context, one actionable and one outcome column".into(),
            ));
        }
        Ok(VariableSchema { columns })
    }

    /// Parse a comma-separated `name:role` header line.
    pub fn parse_header(header: &str) -> Result<Self> {
        let mut columns = Vec::new();
        for entry in header.split(',') {
            let entry = entry.trim();
            let (name, role) = entry.split_once(':').ok_or_else(|| {
                Error::Schema(format!(
                    "header entry {entry:?} lacks a role annotation (expected name:role)"
                ))
            })?;
            columns.push((name.trim().to_string(), Role::parse(role.trim())?));
        }
        VariableSchema::new(columns)
    }

    pub fn header_line(&self) -> String {
        let parts: Vec<String> = self
            .columns
            .iter()
            .map(|(n, r)| format!("{n}:{}", r.as_str()))
            .collect();
        parts.join(",")
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn columns(&self) -> &[(String, Role)] {
        &self.columns
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.columns[idx].0
    }

    pub fn indices_of(&self, role: Role) -> Vec<usize> {
        self.columns
            .iter()
            .enumerate()
            .filter(|(_, (_, r))| *r == role)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn dim_of(&self, role: Role) -> usize {
        self.columns.iter().filter(|(_, r)| *r == role).count()
    }
}

/// The context / pre / actionable / outcome blocks of a dataset, in schema
/// column order. Post-alteration columns appear in none of them.
#[derive(Debug, Clone)]
pub struct Blocks {
    pub x: Mat,
    pub u: Mat,
    pub a: Mat,
    pub y: Mat,
}

/// Immutable observational dataset: a schema plus an N x D row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationalDataset {
    schema: VariableSchema,
    rows: Mat,
}

impl ObservationalDataset {
    pub fn new(schema: VariableSchema, rows: Mat) -> Result<Self> {
        if rows.n_cols() != schema.len() {
            return Err(Error::DimensionMismatch {
                what: "dataset columns",
                expected: schema.len(),
                got: rows.n_cols(),
            });
        }
        if rows.n_rows() < 2 {
            return Err(Error::TooFewSamples {
                needed: 2,
                got: rows.n_rows(),
            });
        }
        for i in 0..rows.n_rows() {
            for j in 0..rows.n_cols() {
                if !rows.get(i, j).is_finite() {
                    return Err(Error::Cell {
                        row: i + 1,
                        col: schema.name(j).to_string(),
                        msg: format!("non-finite value {}", rows.get(i, j)),
                    });
                }
            }
        }
        Ok(ObservationalDataset { schema, rows })
    }

    /// Parse CSV text with a `name:role` header. Row numbers in errors are
    /// 1-based over data rows.
    pub fn parse_csv(text: &str) -> Result<Self> {
        Self::parse_csv_impl(text, None)
    }

    /// Parse CSV text, overriding the header roles with a separate schema.
    /// The override must list the same column names in the same order; the
    /// header may then carry roles or plain names.
    pub fn parse_csv_with_schema(text: &str, schema: VariableSchema) -> Result<Self> {
        Self::parse_csv_impl(text, Some(schema))
    }

    fn parse_csv_impl(text: &str, override_schema: Option<VariableSchema>) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty document".into()))?;
        let schema = match override_schema {
            None => VariableSchema::parse_header(header)?,
            Some(schema) => {
                let names: Vec<&str> = header
                    .split(',')
                    .map(|e| e.trim().split(':').next().unwrap_or("").trim())
                    .collect();
                if names.len() != schema.len()
                    || names
                        .iter()
                        .zip(schema.columns())
                        .any(|(h, (n, _))| h != n)
                {
                    return Err(Error::Schema(format!(
                        "header names {:?} do not match the override schema",
                        names
                    )));
                }
                schema
            }
        };
        let mut data: Vec<f64> = Vec::new();
        let mut n_rows = 0usize;
        for (row_idx, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != schema.len() {
                return Err(Error::Parse(format!(
                    "row {}: expected {} cells, found {}",
                    row_idx + 1,
                    schema.len(),
                    cells.len()
                )));
            }
            for (j, cell) in cells.iter().enumerate() {
                let v: f64 = cell.trim().parse().map_err(|_| Error::Cell {
                    row: row_idx + 1,
                    col: schema.name(j).to_string(),
                    msg: format!("not a number: {cell:?}"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Cell {
                        row: row_idx + 1,
                        col: schema.name(j).to_string(),
                        msg: format!("non-finite value {cell:?}"),
                    });
                }
                data.push(v);
            }
            n_rows += 1;
        }
        let rows = Mat::from_vec(n_rows, schema.len(), data);
        ObservationalDataset::new(schema, rows)
    }

    /// Serialize to the CSV form. Floats use the shortest representation that
    /// parses back to the identical bits, so a save/load round trip is exact.
    pub fn to_csv(&self) -> String {
        let mut out = self.schema.header_line();
        out.push('\n');
        for i in 0..self.rows.n_rows() {
            let cells: Vec<String> = self.rows.row(i).iter().map(|v| format!("{v}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn schema(&self) -> &VariableSchema {
        &self.schema
    }

    pub fn n(&self) -> usize {
        self.rows.n_rows()
    }

    pub fn rows(&self) -> &Mat {
        &self.rows
    }

    /// Column-sliced blocks in schema order; `u` may have width 0, and post
    /// columns are excluded everywhere.
    pub fn blocks(&self) -> Blocks {
        Blocks {
            x: self.rows.select_columns(&self.schema.indices_of(Role::Context)),
            u: self.rows.select_columns(&self.schema.indices_of(Role::Pre)),
            a: self
                .rows
                .select_columns(&self.schema.indices_of(Role::Actionable)),
            y: self
                .rows
                .select_columns(&self.schema.indices_of(Role::Outcome)),
        }
    }
}

/// Fraction of rows whose outcome block lies in the region (hard indicator).
pub fn positive_fraction(ds: &ObservationalDataset, region: &PolytopeRegion) -> Result<f64> {
    let y = ds.blocks().y;
    let mut count = 0usize;
    for i in 0..y.n_rows() {
        if region.contains(y.row(i))? {
            count += 1;
        }
    }
    Ok(count as f64 / y.n_rows() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    const CSV: &str = "\
X1:context,U1:pre,A1:actionable,P1:post,Y1:outcome
0.5,1,2.25,9,0
-0.5,2,3.5,8,1
0,3,-1,7,2
";

    #[test]
    fn parse_well_formed() {
        let ds = ObservationalDataset::parse_csv(CSV).unwrap();
        assert_eq!(ds.n(), 3);
        assert_eq!(ds.schema().len(), 5);
        assert_eq!(ds.rows().get(0, 2), 2.25);
    }

    #[test]
    fn header_without_outcome_is_rejected() {
        let text = "X1:context,A1:actionable\n0,1\n1,0\n";
        assert!(matches!(
            ObservationalDataset::parse_csv(text),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn header_without_roles_is_rejected() {
        let text = "X1,A1,Y1\n0,1,2\n1,0,2\n";
        assert!(matches!(
            ObservationalDataset::parse_csv(text),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn nan_cell_is_named() {
        let text = "X1:context,A1:actionable,Y1:outcome\n0,1,2\n1,NaN,2\n";
        match ObservationalDataset::parse_csv(text) {
            Err(Error::Cell { row, col, .. }) => {
                assert_eq!(row, 2);
                assert_eq!(col, "A1");
            }
            other => panic!("expected cell error, got {other:?}"),
        }
    }

    #[test]
    fn out_of_order_roles_are_rejected() {
        let text = "A1:actionable,X1:context,Y1:outcome\n0,1,2\n1,0,2\n";
        assert!(matches!(
            ObservationalDataset::parse_csv(text),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn blocks_partition_and_exclude_post() {
        let ds = ObservationalDataset::parse_csv(CSV).unwrap();
        let b = ds.blocks();
        assert_eq!(b.x.n_cols(), 1);
        assert_eq!(b.u.n_cols(), 1);
        assert_eq!(b.a.n_cols(), 1);
        assert_eq!(b.y.n_cols(), 1);
        // The post column's values appear in no block.
        for m in [&b.x, &b.u, &b.a, &b.y] {
            for i in 0..m.n_rows() {
                for j in 0..m.n_cols() {
                    assert!(m.get(i, j) < 7.0);
                }
            }
        }
    }

    #[test]
    fn blocks_with_no_pre_columns() {
        let text = "X1:context,A1:actionable,Y1:outcome\n0,1,2\n1,0,2\n";
        let ds = ObservationalDataset::parse_csv(text).unwrap();
        let b = ds.blocks();
        assert_eq!(b.u.n_cols(), 0);
        assert_eq!(b.u.n_rows(), 2);
    }

    #[test]
    fn blocks_concatenated_reconstruct_rows() {
        // Schema without post columns so the blocks cover every column.
        let text = "X1:context,U1:pre,A1:actionable,Y1:outcome\n1,2,3,4\n5,6,7,8\n";
        let ds = ObservationalDataset::parse_csv(text).unwrap();
        let b = ds.blocks();
        for i in 0..ds.n() {
            let mut rebuilt = vec![];
            rebuilt.extend_from_slice(b.x.row(i));
            rebuilt.extend_from_slice(b.u.row(i));
            rebuilt.extend_from_slice(b.a.row(i));
            rebuilt.extend_from_slice(b.y.row(i));
            assert_eq!(rebuilt.as_slice(), ds.rows().row(i));
        }
    }

    #[test]
    fn positive_fraction_counts() {
        let region = PolytopeRegion::from_intervals(1, &[(0, Some(0.5), Some(2.0))]).unwrap();
        let text = "X1:context,A1:actionable,Y1:outcome\n0,0,1\n0,0,1.5\n0,0,3\n0,0,-1\n";
        let ds = ObservationalDataset::parse_csv(text).unwrap();
        assert_eq!(positive_fraction(&ds, &region).unwrap(), 0.5);

        let all = "X1:context,A1:actionable,Y1:outcome\n0,0,1\n0,0,1.5\n";
        let ds = ObservationalDataset::parse_csv(all).unwrap();
        assert_eq!(positive_fraction(&ds, &region).unwrap(), 1.0);

        let none = "X1:context,A1:actionable,Y1:outcome\n0,0,5\n0,0,-5\n";
        let ds = ObservationalDataset::parse_csv(none).unwrap();
        assert_eq!(positive_fraction(&ds, &region).unwrap(), 0.0);
    }

    #[test]
    fn schema_override_replaces_roles() {
        let text = "X1,A1,Y1\n0,1,2\n1,0,2\n";
        let schema = VariableSchema::new(vec![
            ("X1".into(), Role::Context),
            ("A1".into(), Role::Actionable),
            ("Y1".into(), Role::Outcome),
        ])
        .unwrap();
        let ds = ObservationalDataset::parse_csv_with_schema(text, schema).unwrap();
        assert_eq!(ds.schema().dim_of(Role::Actionable), 1);

        let wrong = VariableSchema::new(vec![
            ("Q1".into(), Role::Context),
            ("A1".into(), Role::Actionable),
            ("Y1".into(), Role::Outcome),
        ])
        .unwrap();
        assert!(ObservationalDataset::parse_csv_with_schema(text, wrong).is_err());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let ds = ObservationalDataset::parse_csv(CSV).unwrap();
        let text = ds.to_csv();
        let back = ObservationalDataset::parse_csv(&text).unwrap();
        assert_eq!(ds, back);
    }
}
