//! Field and state snapshots as CSV with a `# L=<float> N=<int> t=<float>`
//! header line, rows `x,u` (fields) or `x,u,v` (states), 17 significant
//! digits throughout.

use crate::dynamics::State;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid;
use std::fmt::Write as _;

/// Shortest-exact float formatting used across all text outputs.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_field(f: &Field, t: f64) -> String {
    let g = f.grid();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# L={} N={} t={}",
        fmt_f64(g.half_length()),
        g.n_points(),
        fmt_f64(t)
    );
    out.push_str("x,u\n");
    for (x, u) in g.nodes().iter().zip(f.samples()) {
        let _ = writeln!(out, "{},{}", fmt_f64(*x), fmt_f64(*u));
    }
    out
}

pub fn write_state(st: &State) -> String {
    let g = st.u.grid();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# L={} N={} t={}",
        fmt_f64(g.half_length()),
        g.n_points(),
        fmt_f64(st.time)
    );
    out.push_str("x,u,v\n");
    for ((x, u), v) in g.nodes().iter().zip(st.u.samples()).zip(st.v.samples()) {
        let _ = writeln!(out, "{},{},{}", fmt_f64(*x), fmt_f64(*u), fmt_f64(*v));
    }
    out
}

fn parse_header(line: &str) -> Result<(f64, usize, f64)> {
    let err = |msg: &str| Error::Config(format!("snapshot header: {msg}"));
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| err("missing leading '#'"))?
        .trim();
    let mut l = None;
    let mut n = None;
    let mut t = None;
    for tok in body.split_whitespace() {
        let (key, value) = tok
            .split_once('=')
            .ok_or_else(|| err("expected key=value tokens"))?;
        match key {
            "L" => l = Some(value.parse::<f64>().map_err(|_| err("bad L"))?),
            "N" => n = Some(value.parse::<usize>().map_err(|_| err("bad N"))?),
            "t" => t = Some(value.parse::<f64>().map_err(|_| err("bad t"))?),
            other => return Err(err(&format!("unknown key '{other}'"))),
        }
    }
    match (l, n, t) {
        (Some(l), Some(n), Some(t)) => Ok((l, n, t)),
        _ => Err(err("missing L, N or t")),
    }
}

/// Reads a snapshot; the third column is present for states and absent for
/// plain fields. Returns the parsed state (`v` zero when absent).
pub fn read_snapshot(text: &str) -> Result<State> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Config("empty snapshot".into()))?;
    let (l, n, t) = parse_header(header)?;
    let grid = Grid::new(l, n)?;
    let mut us = Vec::with_capacity(n);
    let mut vs = Vec::with_capacity(n);
    for line in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('x') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() < 2 || cols.len() > 3 {
            return Err(Error::Config(format!(
                "snapshot row has {} columns, expected 2 or 3",
                cols.len()
            )));
        }
        us.push(
            cols[1]
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad sample '{}'", cols[1])))?,
        );
        vs.push(if cols.len() == 3 {
            cols[2]
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad sample '{}'", cols[2])))?
        } else {
            0.0
        });
    }
    if us.len() != n {
        return Err(Error::Config(format!(
            "snapshot has {} rows, header says N={n}",
            us.len()
        )));
    }
    let u = Field::from_samples(&grid, us)?;
    let v = Field::from_samples(&grid, vs)?;
    State::new(u, v, t)
}
