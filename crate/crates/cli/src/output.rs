//! JSON and CSV writers.
//!
//! JSON documents go through `serde_json::Value`, whose maps are ordered, so
//! keys come out sorted and identical inputs give byte-identical files.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use flexbeam_core::{Fields, PiecewiseDisplacement, Side};

use crate::error::CliError;

pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

fn num(v: f64) -> String {
    format!("{v}")
}

/// Node samples of the solution. Break nodes get two rows, `L` and `R`,
/// holding the one-sided traces; other nodes have an empty side.
pub fn fields_csv(fields: &Fields) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let u = fields.primary();
    let plate = fields.plate();
    let header: &[&str] = if plate.is_some() {
        &["x", "side", "u_r", "du_r", "u_p", "du_p"]
    } else {
        &["x", "side", "u", "du"]
    };
    let err = |e: csv::Error| CliError::Spec(format!("csv: {e}"));
    w.write_record(header).map_err(err)?;
    let row = |node: usize, side: Side, marker: &str| -> Vec<String> {
        let x = u.mesh().nodes()[node];
        let t = u.trace(node, side);
        let mut r = vec![num(x), marker.to_string(), num(t.value), num(t.slope)];
        if let Some(p) = plate {
            let tp = p.trace(node, side);
            r.push(num(tp.value));
            r.push(num(tp.slope));
        }
        r
    };
    for node in 0..u.mesh().node_count() {
        if u.mesh().kind_at(node).is_some() {
            for side in [Side::Left, Side::Right] {
                w.write_record(row(node, side, side.marker())).map_err(err)?;
            }
        } else {
            w.write_record(row(node, Side::Right, "")).map_err(err)?;
        }
    }
    w.into_inner().map_err(|e| CliError::Spec(format!("csv: {e}")))
}

/// `x, side` pairs of the CSV rows, for tests.
pub fn csv_rows(u: &PiecewiseDisplacement) -> usize {
    u.mesh().node_count() + u.mesh().break_nodes().count()
}
