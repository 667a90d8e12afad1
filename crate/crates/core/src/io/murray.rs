//! Reader for instance directories in the Murray–Chu layout.
//!
//! A directory holds three comma-separated files:
//!
//! - `nodes.csv`: `id, x, y, flag` per node, the depot first. A flag of `1`
//!   marks a customer the drone cannot serve. A trailing row that repeats
//!   the depot is accepted and dropped.
//! - `tau.csv`: truck travel times in minutes, one row per node.
//! - `tauprime.csv`: drone travel times in minutes.
//!
//! Matrices may cover `n+1` nodes (end depot implied) or `n+2`. Lines
//! starting with `%` and non-numeric header rows are skipped. Distances are
//! recovered from the times and the vehicle speeds.

use std::path::Path;

use crate::io::{read_file, IoError};
use crate::model::{Instance, Matrices, Matrix, Parameters};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MurrayOptions {
    /// Endurance, speeds and fees; the files carry none of them.
    pub params: Parameters,
}

impl Default for MurrayOptions {
    fn default() -> Self {
        MurrayOptions {
            params: Parameters::default(),
        }
    }
}

fn rows(text: &str, file: &str) -> Result<Vec<(usize, Vec<f64>)>, IoError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'%'))
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let fields: Vec<&str> = record.iter().filter(|f| !f.is_empty()).collect();
        if fields.is_empty() {
            continue;
        }
        let parsed: Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(values) => out.push((line, values)),
            Err(_) if out.is_empty() => continue,
            Err(_) => return Err(IoError::parse(line, file, "non-numeric value")),
        }
    }
    Ok(out)
}

fn square(rows: Vec<(usize, Vec<f64>)>, dim: usize, file: &str) -> Result<Matrix, IoError> {
    let size = rows.len();
    if size != dim && size != dim - 1 {
        let line = rows.last().map_or(1, |r| r.0);
        return Err(IoError::parse(line, file, format!("expected {} or {dim} rows, found {size}", dim - 1)));
    }
    for (line, row) in &rows {
        if row.len() != size {
            return Err(IoError::parse(*line, file, format!("expected {size} values, found {}", row.len())));
        }
    }
    let data: Vec<Vec<f64>> = rows.into_iter().map(|r| r.1).collect();
    // Without an end-depot row, node n+1 reads the depot's entries.
    let node = |v: usize| if v < size { v } else { 0 };
    Ok(Matrix::from_fn(dim, |i, j| if i == j { 0.0 } else { data[node(i)][node(j)] }))
}

pub fn read_dir(dir: &Path, options: &MurrayOptions) -> Result<Instance, IoError> {
    let nodes = rows(&read_file(&dir.join("nodes.csv"))?, "nodes.csv")?;
    if nodes.len() < 2 {
        return Err(IoError::parse(1, "nodes.csv", "need the depot and at least one customer"));
    }
    for (line, row) in &nodes {
        if row.len() < 4 {
            return Err(IoError::parse(*line, "nodes.csv", "expected `id, x, y, flag`"));
        }
    }
    let mut points: Vec<(f64, f64)> = nodes.iter().map(|(_, r)| (r[1], r[2])).collect();
    let mut flags: Vec<bool> = nodes.iter().map(|(_, r)| r[3] != 0.0).collect();
    if points.len() > 2 && points.last() == points.first() {
        points.pop();
        flags.pop();
    }
    let n = points.len() - 1;
    let dim = n + 2;
    let tau = square(rows(&read_file(&dir.join("tau.csv"))?, "tau.csv")?, dim, "tau.csv")?;
    let tau_prime = square(rows(&read_file(&dir.join("tauprime.csv"))?, "tauprime.csv")?, dim, "tauprime.csv")?;
    let p = options.params;
    let mut coords = points;
    coords.push(coords[0]);
    let mut eligible = vec![false; dim];
    for c in 1..=n {
        eligible[c] = !flags[c];
    }
    let name = dir.file_name().map_or_else(|| "murray".to_string(), |s| s.to_string_lossy().into_owned());
    let matrices = Matrices {
        truck_dist: Matrix::from_fn(dim, |i, j| tau.get(i, j) * p.truck_speed),
        drone_dist: Matrix::from_fn(dim, |i, j| tau_prime.get(i, j) * p.drone_speed),
        truck_time: tau,
        drone_time: tau_prime,
    };
    Ok(Instance::new(name, coords, matrices, eligible, p)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, text: &str) {
        std::fs::write(dir.join(name), text).unwrap();
    }

    #[test]
    fn reads_a_small_directory() {
        let tmp = tempfile::tempdir().unwrap();
        let dir = tmp.path();
        write(dir, "nodes.csv", "% id, x, y, heavy\n0,0,0,0\n1,1,0,0\n2,0,1,1\n3,0,0,0\n");
        let tau = "0,3,4,0\n3,0,5,3\n4,5,0,4\n0,3,4,0\n";
        write(dir, "tau.csv", tau);
        write(dir, "tauprime.csv", "0,1,2\n1,0,2\n2,2,0\n");
        let inst = read_dir(dir, &MurrayOptions::default()).unwrap();
        assert_eq!(inst.n(), 2);
        assert_eq!(inst.truck_time(1, 2), 5.0);
        assert_eq!(inst.truck_time(2, 3), 4.0);
        assert_eq!(inst.drone_time(1, 3), 1.0);
        assert_eq!(inst.drone_time(3, 2), 2.0);
        assert!(inst.is_drone_eligible(1));
        assert!(!inst.is_drone_eligible(2));
        assert_eq!(
            read_dir(dir, &MurrayOptions { params: Parameters { endurance: 40.0, ..Parameters::default() } })
                .unwrap()
                .params()
                .endurance,
            40.0
        );
    }

    #[test]
    fn bad_rows_are_reported() {
        let tmp = tempfile::tempdir().unwrap();
        let dir = tmp.path();
        write(dir, "nodes.csv", "0,0,0,0\n1,1,0,0\n");
        write(dir, "tau.csv", "0,3\n3\n");
        write(dir, "tauprime.csv", "0,1\n1,0\n");
        assert!(matches!(
            read_dir(dir, &MurrayOptions::default()),
            Err(IoError::Parse { line: 2, .. })
        ));
        assert!(matches!(read_dir(&dir.join("missing"), &MurrayOptions::default()), Err(IoError::File { .. })));
    }
}
