//! CSV output for external plotting. Rows are ordered by time, then space.

use std::io::Write;
use std::path::Path;

use heatcert_core::constants::ScanRow;
use heatcert_core::field::SpaceTimeField;
use heatcert_core::operators::Pair;

fn writer(path: &Path) -> csv::Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path)
}

fn num(v: f64) -> String {
    format!("{v:?}")
}

pub fn write_solution_to<W: Write>(out: W, pair: &Pair) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "x", "u", "v"])?;
    let g = pair.u.grid();
    for n in 0..=g.nt {
        for j in 0..=g.nx {
            w.write_record([num(g.t(n)), num(g.x(j)), num(pair.u.get(n, j)), num(pair.v.get(n, j))])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `t, x, u, v`.
pub fn write_solution(path: &Path, pair: &Pair) -> csv::Result<()> {
    write_solution_to(std::fs::File::create(path)?, pair)
}

/// `t, x, value`.
pub fn write_field(path: &Path, field: &SpaceTimeField) -> csv::Result<()> {
    let mut w = writer(path)?;
    w.write_record(["t", "x", "value"])?;
    let g = field.grid();
    for n in 0..=g.nt {
        for j in 0..=g.nx {
            w.write_record([num(g.t(n)), num(g.x(j)), num(field.get(n, j))])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `b, m, c1, c2, ratio`.
pub fn write_scan(path: &Path, rows: &[ScanRow]) -> csv::Result<()> {
    let mut w = writer(path)?;
    w.write_record(["b", "m", "c1", "c2", "ratio"])?;
    for r in rows {
        w.write_record([num(r.b), num(r.m), num(r.c1), num(r.c2), num(r.ratio)])?;
    }
    w.flush()?;
    Ok(())
}
