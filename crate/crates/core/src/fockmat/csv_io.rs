//! CSV export of truncated matrices: a header record `N,<dim>,basis,<label>`
//! followed by one record per row holding re,im pairs.

use std::io::{Read, Write};

use nalgebra::DMatrix;

use crate::base::Cx;
use crate::error::{Error, Result};

use super::TruncatedMatrix;

pub const BASIS_LABEL: &str = "e_n = z^n/sqrt(n!)";

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Domain(format!("matrix csv: {e}"))
}

pub fn write_csv<W: Write>(m: &TruncatedMatrix, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
    let n = m.dim();
    w.write_record(["N", &n.to_string(), "basis", BASIS_LABEL]).map_err(io_err)?;
    for i in 0..n {
        let row: Vec<String> = (0..n)
            .flat_map(|j| {
                let z = m.entry(i, j);
                [z.re.to_string(), z.im.to_string()]
            })
            .collect();
        w.write_record(&row).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn read_csv<R: Read>(input: R) -> Result<TruncatedMatrix> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(input);
    let mut records = r.records();
    let head = records.next().ok_or_else(|| io_err("empty input"))?.map_err(io_err)?;
    if head.len() != 4 || &head[0] != "N" || &head[2] != "basis" || &head[3] != BASIS_LABEL {
        return Err(io_err("unrecognized header"));
    }
    let n: usize = head[1].parse().map_err(io_err)?;
    let mut data = DMatrix::from_element(n, n, Cx::new(0.0, 0.0));
    let mut rows = 0;
    for (i, rec) in records.enumerate() {
        let rec = rec.map_err(io_err)?;
        if i >= n || rec.len() != 2 * n {
            return Err(io_err(format!("row {i} has {} fields, expected {}", rec.len(), 2 * n)));
        }
        for j in 0..n {
            let re: f64 = rec[2 * j].parse().map_err(io_err)?;
            let im: f64 = rec[2 * j + 1].parse().map_err(io_err)?;
            data[(i, j)] = Cx::new(re, im);
        }
        rows += 1;
    }
    if rows != n {
        return Err(io_err(format!("expected {n} rows, found {rows}")));
    }
    TruncatedMatrix::from_matrix(data)
}
