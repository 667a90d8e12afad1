//! The native text format.
//!
//! ```text
//! TSPD 1
//! NAME small
//! N 2
//! ENDURANCE 20
//! LAUNCH_TIME 1
//! RETRIEVE_TIME 1
//! TRUCK_COST 25
//! DRONE_COST 1
//! TRUCK_WAIT_FEE 1
//! DRONE_WAIT_FEE 1
//! TRUCK_SPEED 0.6666666666666666
//! DRONE_SPEED 0.6666666666666666
//! WAIT_FEES as_written
//! NODES
//! 0 0 0 0
//! 1 3 4 1
//! 2 -1 2 0
//! MATRIX truck_time
//! ...n+2 rows of n+2 values...
//! END
//! ```
//!
//! Node lines are `id x y eligible` for the depot and every customer; the
//! end depot repeats the depot. Matrices default to Euclidean distances,
//! with times derived from the speeds. Optional `MATRIX` blocks
//! (`truck_dist`, `truck_time`, `drone_dist`, `drone_time`) override them.
//! Numbers are written in shortest round-trip form, so a written instance
//! reads back bit for bit. Blank lines and lines starting with `#` are
//! ignored.

use std::fmt::Write as _;

use crate::io::IoError;
use crate::model::{Instance, Matrices, Matrix, Parameters, WaitFeeConvention};

const MAGIC: &str = "TSPD";
const VERSION: u32 = 1;
const MATRIX_NAMES: [&str; 4] = ["truck_dist", "truck_time", "drone_dist", "drone_time"];

fn matrix_of<'a>(m: &'a Matrices, name: &str) -> &'a Matrix {
    match name {
        "truck_dist" => &m.truck_dist,
        "truck_time" => &m.truck_time,
        "drone_dist" => &m.drone_dist,
        _ => &m.drone_time,
    }
}

fn derived(inst: &Instance) -> Instance {
    let coords = inst.coords();
    let n = inst.n();
    let eligible: Vec<bool> = (1..=n).map(|c| inst.is_drone_eligible(c)).collect();
    Instance::euclidean(inst.name(), &coords[..=n], &eligible, *inst.params()).expect("coordinates of a valid instance")
}

pub fn write_native(inst: &Instance) -> String {
    let p = inst.params();
    let n = inst.n();
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} {VERSION}");
    let _ = writeln!(out, "NAME {}", inst.name());
    let _ = writeln!(out, "N {n}");
    for (key, value) in [
        ("ENDURANCE", p.endurance),
        ("LAUNCH_TIME", p.launch_time),
        ("RETRIEVE_TIME", p.retrieve_time),
        ("TRUCK_COST", p.truck_cost),
        ("DRONE_COST", p.drone_cost),
        ("TRUCK_WAIT_FEE", p.truck_wait_fee),
        ("DRONE_WAIT_FEE", p.drone_wait_fee),
        ("TRUCK_SPEED", p.truck_speed),
        ("DRONE_SPEED", p.drone_speed),
    ] {
        let _ = writeln!(out, "{key} {value:?}");
    }
    let _ = writeln!(out, "WAIT_FEES {}", p.wait_fees);
    let _ = writeln!(out, "NODES");
    for (id, &(x, y)) in inst.coords()[..=n].iter().enumerate() {
        let _ = writeln!(out, "{id} {x:?} {y:?} {}", u8::from(inst.is_drone_eligible(id)));
    }
    let base = derived(inst);
    for name in MATRIX_NAMES {
        let m = matrix_of(inst.matrices(), name);
        if m.dim() == base.matrices().truck_dist.dim() && m == matrix_of(base.matrices(), name) {
            continue;
        }
        let _ = writeln!(out, "MATRIX {name}");
        for i in 0..m.dim() {
            let row: Vec<String> = m.row(i).iter().map(|v| format!("{v:?}")).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
    }
    let _ = writeln!(out, "END");
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Option<(usize, &'a str)> {
        for (i, raw) in self.inner.by_ref() {
            let line = raw.trim();
            self.last = i + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            return Some((i + 1, line));
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str), IoError> {
        self.next().ok_or_else(|| IoError::parse(self.last + 1, what, "unexpected end of file"))
    }
}

fn number(line: usize, field: &str, token: &str) -> Result<f64, IoError> {
    token
        .parse::<f64>()
        .map_err(|_| IoError::parse(line, field, format!("`{token}` is not a number")))
}

fn keyed<'a>(lines: &mut Lines<'a>, key: &str) -> Result<(usize, &'a str), IoError> {
    let (no, line) = lines.expect(key)?;
    match line.split_once(char::is_whitespace) {
        Some((k, v)) if k == key => Ok((no, v.trim())),
        _ if line == key => Err(IoError::parse(no, key, "missing value")),
        _ => Err(IoError::parse(no, key, format!("expected `{key}`, found `{line}`"))),
    }
}

pub fn parse_native(text: &str) -> Result<Instance, IoError> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        last: 0,
    };
    let (no, version) = keyed(&mut lines, MAGIC)?;
    if version.parse::<u32>().ok() != Some(VERSION) {
        return Err(IoError::parse(no, "version", format!("unsupported version `{version}`")));
    }
    let (_, name) = keyed(&mut lines, "NAME")?;
    let (no, n_text) = keyed(&mut lines, "N")?;
    let n: usize = n_text
        .parse()
        .map_err(|_| IoError::parse(no, "N", format!("`{n_text}` is not a customer count")))?;
    if n == 0 {
        return Err(IoError::parse(no, "N", "at least one customer is required"));
    }
    let mut scalar = |key: &str| -> Result<f64, IoError> {
        let (no, v) = keyed(&mut lines, key)?;
        number(no, key, v)
    };
    let mut params = Parameters {
        endurance: scalar("ENDURANCE")?,
        launch_time: scalar("LAUNCH_TIME")?,
        retrieve_time: scalar("RETRIEVE_TIME")?,
        truck_cost: scalar("TRUCK_COST")?,
        drone_cost: scalar("DRONE_COST")?,
        truck_wait_fee: scalar("TRUCK_WAIT_FEE")?,
        drone_wait_fee: scalar("DRONE_WAIT_FEE")?,
        truck_speed: scalar("TRUCK_SPEED")?,
        drone_speed: scalar("DRONE_SPEED")?,
        ..Parameters::default()
    };
    let (no, fees) = keyed(&mut lines, "WAIT_FEES")?;
    params.wait_fees = match fees {
        "as_written" => WaitFeeConvention::AsWritten,
        "as_named" => WaitFeeConvention::AsNamed,
        other => return Err(IoError::parse(no, "WAIT_FEES", format!("unknown convention `{other}`"))),
    };
    let (no, line) = lines.expect("NODES")?;
    if line != "NODES" {
        return Err(IoError::parse(no, "NODES", format!("expected `NODES`, found `{line}`")));
    }
    let mut points = Vec::with_capacity(n + 1);
    let mut eligible = Vec::with_capacity(n);
    for id in 0..=n {
        let (no, line) = lines.expect("node")?;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 4 {
            return Err(IoError::parse(no, "node", "expected `id x y eligible`"));
        }
        if tokens[0].parse::<usize>().ok() != Some(id) {
            return Err(IoError::parse(no, "node id", format!("expected {id}, found `{}`", tokens[0])));
        }
        points.push((number(no, "x", tokens[1])?, number(no, "y", tokens[2])?));
        let flag = match tokens[3] {
            "0" => false,
            "1" => true,
            other => return Err(IoError::parse(no, "eligible", format!("expected 0 or 1, found `{other}`"))),
        };
        if id == 0 {
            if flag {
                return Err(IoError::parse(no, "eligible", "the depot cannot be drone eligible"));
            }
        } else {
            eligible.push(flag);
        }
    }
    let base = Instance::euclidean(name, &points, &eligible, params)?;
    let mut matrices = base.matrices().clone();
    loop {
        let (no, line) = lines.expect("END")?;
        if line == "END" {
            break;
        }
        let which = line
            .strip_prefix("MATRIX")
            .map(str::trim)
            .ok_or_else(|| IoError::parse(no, "block", format!("expected `MATRIX` or `END`, found `{line}`")))?;
        let slot = match which {
            "truck_dist" => &mut matrices.truck_dist,
            "truck_time" => &mut matrices.truck_time,
            "drone_dist" => &mut matrices.drone_dist,
            "drone_time" => &mut matrices.drone_time,
            other => return Err(IoError::parse(no, "MATRIX", format!("unknown matrix `{other}`"))),
        };
        let mut rows = Vec::with_capacity(n + 2);
        for _ in 0..n + 2 {
            let (no, line) = lines.expect(which)?;
            let row = line
                .split_whitespace()
                .map(|t| number(no, which, t))
                .collect::<Result<Vec<f64>, _>>()?;
            if row.len() != n + 2 {
                return Err(IoError::parse(no, which, format!("expected {} values, found {}", n + 2, row.len())));
            }
            rows.push(row);
        }
        *slot = Matrix::from_rows(rows)?;
    }
    let eligible_all: Vec<bool> = (0..n + 2).map(|v| base.is_drone_eligible(v)).collect();
    Ok(Instance::new(name, base.coords().to_vec(), matrices, eligible_all, params)?)
}
