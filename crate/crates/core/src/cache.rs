//! On-disk CSV cache of character tables and scheme tables.
//!
//! Every file starts with a `#` version line. Values are exact: integers in
//! decimal, rationals as separate numerator and denominator columns.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_bigint::BigInt;
use serde::Serialize;

use crate::arith::{int_rational, Rational};
use crate::characters::{character_table, install_character_table, CharacterTable};
use crate::error::{Error, Result};
use crate::partitions::{enumerate_partitions, Partition};
use crate::spherical::{install_scheme_table, scheme_table, SchemeTable};

pub const CACHE_VERSION: &str = "# matching-scheme cache v1";

/// How a table was obtained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status", content = "reason")]
pub enum CacheStatus {
    Loaded,
    Built,
    /// The file existed but was unusable; it has been rewritten.
    Rebuilt(String),
}

#[derive(Clone, Debug, Serialize)]
pub struct CacheEntry {
    pub file: String,
    pub rows: usize,
    pub expected_rows: usize,
    pub valid: bool,
    pub problem: Option<String>,
}

pub struct Cache {
    dir: PathBuf,
}

fn corrupt(path: &Path, why: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{}: {why}", path.display()))
}

fn read_rows(path: &Path) -> Result<Vec<csv::StringRecord>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    if lines.next() != Some(CACHE_VERSION) {
        return Err(corrupt(path, "missing or stale version header"));
    }
    let body = text.split_once('\n').map_or("", |(_, rest)| rest);
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    Ok(reader.records().collect::<std::result::Result<_, _>>()?)
}

fn write_file(path: &Path, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
    let mut out = Vec::new();
    writeln!(out, "{CACHE_VERSION}")?;
    {
        let mut writer = csv::Writer::from_writer(&mut out);
        writer.write_record(header)?;
        for row in rows {
            writer.write_record(&row)?;
        }
        writer.flush()?;
    }
    let tmp = path.with_extension("csv.tmp");
    fs::write(&tmp, out)?;
    fs::rename(tmp, path)?;
    Ok(())
}

fn parse_int(path: &Path, s: &str) -> Result<BigInt> {
    s.parse().map_err(|_| corrupt(path, format!("bad integer {s:?}")))
}

fn parse_shape(path: &Path, s: &str) -> Result<Partition> {
    s.parse().map_err(|_| corrupt(path, format!("bad partition {s:?}")))
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn characters_path(&self, m: usize) -> PathBuf {
        self.dir.join(format!("characters_m{m}.csv"))
    }

    pub fn scheme_path(&self, n: usize) -> PathBuf {
        self.dir.join(format!("scheme_n{n}.csv"))
    }

    pub fn write_characters(&self, table: &CharacterTable) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let m = table.degree();
        let mut rows = Vec::new();
        for (shape, row) in table.partitions().iter().zip(table.values()) {
            for (class, value) in table.partitions().iter().zip(row) {
                rows.push(vec![m.to_string(), shape.to_dashed(), class.to_dashed(), value.to_string()]);
            }
        }
        write_file(&self.characters_path(m), &["m", "shape", "class", "value"], rows)
    }

    pub fn write_scheme(&self, table: &SchemeTable) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let n = table.n();
        let mut rows = Vec::new();
        for (i, mu) in table.partitions().iter().enumerate() {
            for (lambda, phi) in table.partitions().iter().zip(table.phi_row(i)) {
                rows.push(vec![
                    n.to_string(),
                    mu.to_dashed(),
                    lambda.to_dashed(),
                    phi.numer().to_string(),
                    phi.denom().to_string(),
                    table.etas()[i].to_string(),
                ]);
            }
        }
        write_file(&self.scheme_path(n), &["n", "mu", "lambda", "phi_num", "phi_den", "eta"], rows)
    }

    pub fn read_characters(&self, m: usize) -> Result<CharacterTable> {
        let path = self.characters_path(m);
        let rows = read_rows(&path)?;
        let partitions = enumerate_partitions(m);
        let k = partitions.len();
        if rows.len() != k * k {
            return Err(corrupt(&path, format!("{} rows, expected {}", rows.len(), k * k)));
        }
        let mut values = vec![Vec::with_capacity(k); k];
        for (idx, row) in rows.iter().enumerate() {
            let (i, j) = (idx / k, idx % k);
            if row.len() != 4
                || row[0] != *m.to_string()
                || parse_shape(&path, &row[1])? != partitions[i]
                || parse_shape(&path, &row[2])? != partitions[j]
            {
                return Err(corrupt(&path, format!("row {} out of place", idx + 1)));
            }
            values[i].push(parse_int(&path, &row[3])?);
        }
        Ok(CharacterTable::from_parts(m, partitions, values))
    }

    pub fn read_scheme(&self, n: usize) -> Result<SchemeTable> {
        let path = self.scheme_path(n);
        let rows = read_rows(&path)?;
        let partitions = enumerate_partitions(n);
        let k = partitions.len();
        if rows.len() != k * k {
            return Err(corrupt(&path, format!("{} rows, expected {}", rows.len(), k * k)));
        }
        let mut phi: Vec<Vec<Rational>> = vec![Vec::with_capacity(k); k];
        let mut eta = vec![BigInt::default(); k];
        for (idx, row) in rows.iter().enumerate() {
            let (i, j) = (idx / k, idx % k);
            if row.len() != 6
                || row[0] != *n.to_string()
                || parse_shape(&path, &row[1])? != partitions[i]
                || parse_shape(&path, &row[2])? != partitions[j]
            {
                return Err(corrupt(&path, format!("row {} out of place", idx + 1)));
            }
            let den = parse_int(&path, &row[4])?;
            if den == BigInt::default() {
                return Err(corrupt(&path, "zero denominator"));
            }
            phi[i].push(int_rational(parse_int(&path, &row[3])?) / int_rational(den));
            eta[i] = parse_int(&path, &row[5])?;
        }
        let table = SchemeTable::from_phi(n, partitions, phi).map_err(|e| corrupt(&path, e))?;
        if table.etas() != eta.as_slice() {
            return Err(corrupt(&path, "eigenvalue column disagrees with the spherical values"));
        }
        Ok(table)
    }

    /// The scheme table for `n`: loaded from disk when valid, otherwise
    /// computed, written, and reported as built or rebuilt.
    pub fn scheme(&self, n: usize) -> Result<(Arc<SchemeTable>, CacheStatus)> {
        let path = self.scheme_path(n);
        let problem = if path.exists() {
            match self.read_scheme(n) {
                Ok(t) => return Ok((install_scheme_table(t), CacheStatus::Loaded)),
                Err(e) => Some(e.to_string()),
            }
        } else {
            None
        };
        let table = scheme_table(n)?;
        self.write_scheme(&table)?;
        Ok((table, problem.map_or(CacheStatus::Built, CacheStatus::Rebuilt)))
    }

    pub fn characters(&self, m: usize) -> Result<(Arc<CharacterTable>, CacheStatus)> {
        let path = self.characters_path(m);
        let problem = if path.exists() {
            match self.read_characters(m) {
                Ok(t) => return Ok((install_character_table(t), CacheStatus::Loaded)),
                Err(e) => Some(e.to_string()),
            }
        } else {
            None
        };
        let table = character_table(m)?;
        self.write_characters(&table)?;
        Ok((table, problem.map_or(CacheStatus::Built, CacheStatus::Rebuilt)))
    }

    /// Writes the scheme table for each `n` and the character table of
    /// `S_2n` it is built from.
    pub fn build(&self, ns: &[usize]) -> Result<Vec<(String, CacheStatus)>> {
        let mut out = Vec::new();
        for &n in ns {
            let (_, status) = self.characters(2 * n)?;
            out.push((file_name(&self.characters_path(2 * n)), status));
            let (_, status) = self.scheme(n)?;
            out.push((file_name(&self.scheme_path(n)), status));
        }
        Ok(out)
    }

    /// Cache files in name order with row counts against `p(k)^2`.
    pub fn inspect(&self) -> Result<Vec<CacheEntry>> {
        let mut entries = Vec::new();
        if !self.dir.exists() {
            return Ok(entries);
        }
        let mut names: Vec<String> = fs::read_dir(&self.dir)?
            .filter_map(|e| e.ok().map(|e| e.file_name().to_string_lossy().into_owned()))
            .filter(|name| name.ends_with(".csv"))
            .collect();
        names.sort();
        for name in names {
            let Some(size) = parse_name(&name) else {
                continue;
            };
            let expected_rows = enumerate_partitions(size.1).len().pow(2);
            let path = self.dir.join(&name);
            let rows = read_rows(&path).map(|r| r.len()).unwrap_or(0);
            let check = match size.0 {
                "characters" => self.read_characters(size.1).map(|_| ()),
                _ => self.read_scheme(size.1).map(|_| ()),
            };
            entries.push(CacheEntry {
                file: name,
                rows,
                expected_rows,
                valid: check.is_ok(),
                problem: check.err().map(|e| e.to_string()),
            });
        }
        Ok(entries)
    }

    /// Removes every cache file; returns how many were removed.
    pub fn clear(&self) -> Result<usize> {
        let mut removed = 0;
        if !self.dir.exists() {
            return Ok(0);
        }
        for entry in fs::read_dir(&self.dir)? {
            let path = entry?.path();
            let name = file_name(&path);
            if parse_name(&name).is_some() || name.ends_with(".csv.tmp") {
                fs::remove_file(&path)?;
                removed += 1;
            }
        }
        Ok(removed)
    }
}

fn file_name(path: &Path) -> String {
    path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn parse_name(name: &str) -> Option<(&'static str, usize)> {
    let stem = name.strip_suffix(".csv")?;
    if let Some(m) = stem.strip_prefix("characters_m") {
        return m.parse().ok().map(|m| ("characters", m));
    }
    stem.strip_prefix("scheme_n")?.parse().ok().map(|n| ("scheme", n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_byte_identical_rebuild() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let built = cache.build(&[3, 4]).unwrap();
        assert!(built.iter().all(|(_, s)| *s == CacheStatus::Built));
        let before = fs::read(cache.scheme_path(4)).unwrap();
        let chars_before = fs::read(cache.characters_path(8)).unwrap();
        assert_eq!(cache.read_scheme(4).unwrap(), *scheme_table(4).unwrap());
        assert_eq!(cache.read_characters(6).unwrap(), *character_table(6).unwrap());
        assert_eq!(cache.clear().unwrap(), 4);
        assert!(cache.inspect().unwrap().is_empty());
        cache.build(&[3, 4]).unwrap();
        assert_eq!(fs::read(cache.scheme_path(4)).unwrap(), before);
        assert_eq!(fs::read(cache.characters_path(8)).unwrap(), chars_before);
        let (_, status) = cache.scheme(4).unwrap();
        assert_eq!(status, CacheStatus::Loaded);
    }

    #[test]
    fn inspect_counts_rows() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        cache.build(&[5]).unwrap();
        let entries = cache.inspect().unwrap();
        let scheme = entries.iter().find(|e| e.file == "scheme_n5.csv").unwrap();
        assert_eq!((scheme.rows, scheme.expected_rows), (49, 49));
        let chars = entries.iter().find(|e| e.file == "characters_m10.csv").unwrap();
        assert_eq!(chars.rows, 42 * 42);
        assert!(entries.iter().all(|e| e.valid));
    }

    #[test]
    fn stale_and_corrupt_files_rebuilt() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        cache.build(&[3]).unwrap();
        let good = fs::read_to_string(cache.scheme_path(3)).unwrap();
        fs::write(cache.scheme_path(3), good.replace("v1", "v0")).unwrap();
        let (_, status) = cache.scheme(3).unwrap();
        assert!(matches!(status, CacheStatus::Rebuilt(_)));
        assert_eq!(fs::read_to_string(cache.scheme_path(3)).unwrap(), good);
        let tampered = good.replacen("-1,4", "-1,5", 1);
        assert_ne!(tampered, good);
        fs::write(cache.scheme_path(3), tampered).unwrap();
        assert!(cache.read_scheme(3).is_err());
        assert!(!cache.inspect().unwrap().iter().find(|e| e.file == "scheme_n3.csv").unwrap().valid);
        let (_, status) = cache.scheme(3).unwrap();
        assert!(matches!(status, CacheStatus::Rebuilt(_)));
        fs::write(cache.characters_path(6), "garbage").unwrap();
        assert!(matches!(cache.characters(6).unwrap().1, CacheStatus::Rebuilt(_)));
    }
}
