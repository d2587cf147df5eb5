//! CSV tables with a `# schema:` header and `#`-prefixed metadata comments.

use std::fmt::Display;
use std::io::Write;
use std::path::Path;

use crate::error::Result;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CsvTable {
    columns: Vec<(String, String)>,
    comments: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    /// Columns as `(name, unit)` pairs.
    pub fn new(columns: &[(&str, &str)]) -> Self {
        Self {
            columns: columns.iter().map(|(n, u)| (n.to_string(), u.to_string())).collect(),
            ..Self::default()
        }
    }

    pub fn comment(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.comments.push(format!("{key}: {value}"));
        self
    }

    pub fn push_row<I, T>(&mut self, cells: I)
    where
        I: IntoIterator<Item = T>,
        T: Display,
    {
        let row: Vec<String> = cells.into_iter().map(|c| c.to_string()).collect();
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn column_names(&self) -> Vec<&str> {
        self.columns.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let schema: Vec<String> = self.columns.iter().map(|(n, u)| format!("{n} [{u}]")).collect();
        writeln!(w, "# schema: {}", schema.join(", "))?;
        for c in &self.comments {
            writeln!(w, "# {c}")?;
        }
        writeln!(w, "{}", self.column_names().join(","))?;
        for row in &self.rows {
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("table cells are UTF-8")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_to(std::io::BufWriter::new(file))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout() {
        let mut t = CsvTable::new(&[("t", "Jt"), ("ggm", "1")]);
        t.comment("seed", 7);
        t.push_row([0.0, 0.5]);
        t.push_row([0.05, 0.25]);
        let text = t.to_csv_string();
        assert_eq!(text, "# schema: t [Jt], ggm [1]\n# seed: 7\nt,ggm\n0,0.5\n0.05,0.25\n");
        assert_eq!(t.num_rows(), 2);
    }
}
