//! Deterministic file output. Every CSV starts with a `# qresource <table> vN`
//! schema line followed by the column header.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{CliError, Result};

pub struct OutDir(PathBuf);

impl OutDir {
    pub fn create(path: &Path) -> Result<Self> {
        fs::create_dir_all(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
        Ok(OutDir(path.to_path_buf()))
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.0.join(name);
        fs::write(&path, contents).map_err(|source| CliError::Io { path: path.clone(), source })?;
        println!("wrote {}", path.display());
        Ok(path)
    }
}

pub fn schema_line(table: &str, version: u32) -> String {
    format!("# qresource {table} v{version}")
}

pub fn csv_table(table: &str, version: u32, header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8 output");
    format!("{}\n{body}", schema_line(table, version))
}

/// Fixed 12-decimal formatting with negative zero folded to zero.
pub fn num(x: f64) -> String {
    let s = format!("{x:.12}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

/// The value `num` would print, for JSON reports.
pub fn round12(x: f64) -> f64 {
    let r = (x * 1e12).round() / 1e12;
    if r == 0.0 { 0.0 } else { r }
}

/// Degrees without trailing zeros, e.g. `7.5`, `45`.
pub fn degrees(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".to_string() } else { s.to_string() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(num(-0.0), "0.000000000000");
        assert_eq!(num(-1e-15), "0.000000000000");
        assert_eq!(num(0.5), "0.500000000000");
        assert_eq!(degrees(7.5), "7.5");
        assert_eq!(degrees(45.0), "45");
        assert_eq!(round12(0.9999999999999998), 1.0);
        assert_eq!(round12(0.87 + 0.86 - 1.0), 0.73);
    }

    #[test]
    fn tables_carry_schema_and_header() {
        let t = csv_table("demo", 1, &["a", "b"], &[vec!["1".into(), "x,y".into()]]);
        assert_eq!(t, "# qresource demo v1\na,b\n1,\"x,y\"\n");
    }
}
