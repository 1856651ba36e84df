//! File formats: ensemble and matrix CSVs, 8-bit binary PGM, dendrogram
//! and label CSVs, and the JSON decomposition report.

use std::collections::BTreeMap;
use std::io::{BufRead, Read, Write};

use num_complex::Complex64 as c64;
use serde::{Deserialize, Serialize};

use crate::clustering::Dendrogram;
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::signal_model::{GrainImage, SeriesEnsemble};

pub const ENSEMBLE_HEADER: [&str; 5] = ["series_id", "t", "dim", "re", "im"];

fn parse_err(line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        line: line as usize,
        message: message.into(),
    }
}

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    parse_err(line, e.to_string())
}

/// Reads `series_id,t,dim,re,im` rows. Series ids, times and components
/// must each form a contiguous range starting at zero.
pub fn read_ensemble_csv<R: Read>(reader: R) -> Result<SeriesEnsemble> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers().map_err(csv_err)?.clone();
    if header.iter().ne(ENSEMBLE_HEADER) {
        return Err(parse_err(1, format!("expected header {}", ENSEMBLE_HEADER.join(","))));
    }
    let mut cells: BTreeMap<(usize, usize, usize), c64> = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line());
        let field = |i: usize| rec.get(i).ok_or_else(|| parse_err(line, "missing field"));
        let index = |i: usize| -> Result<usize> {
            field(i)?
                .parse()
                .map_err(|_| parse_err(line, format!("{} is not a nonnegative integer", ENSEMBLE_HEADER[i])))
        };
        let real = |i: usize| -> Result<f64> {
            let v: f64 = field(i)?
                .parse()
                .map_err(|_| parse_err(line, format!("{} is not a number", ENSEMBLE_HEADER[i])))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(parse_err(line, format!("{} is not finite", ENSEMBLE_HEADER[i])))
            }
        };
        let key = (index(0)?, index(1)?, index(2)?);
        if cells.insert(key, c64::new(real(3)?, real(4)?)).is_some() {
            return Err(parse_err(line, "duplicate (series_id, t, dim)"));
        }
    }
    let series_count = cells.keys().map(|k| k.0 + 1).max().unwrap_or(0);
    if series_count == 0 {
        return Err(parse_err(1, "no data rows"));
    }
    let mut series = vec![Vec::new(); series_count];
    for (&(s, t, dim), &v) in &cells {
        let rows: &mut Vec<Vec<c64>> = &mut series[s];
        if t >= rows.len() {
            rows.resize(t + 1, Vec::new());
        }
        let sample = &mut rows[t];
        if dim != sample.len() {
            return Err(Error::InvalidArgument(format!(
                "series {s} t {t}: component {dim} present without component {}",
                sample.len()
            )));
        }
        sample.push(v);
    }
    for (s, rows) in series.iter().enumerate() {
        if let Some(t) = rows.iter().position(Vec::is_empty) {
            return Err(Error::InvalidArgument(format!("series {s} has no sample at t = {t}")));
        }
    }
    SeriesEnsemble::new(series)
}

pub fn write_ensemble_csv<W: Write>(ensemble: &SeriesEnsemble, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(ENSEMBLE_HEADER).map_err(csv_err)?;
    for (s, series) in ensemble.series.iter().enumerate() {
        for (t, sample) in series.iter().enumerate() {
            for (dim, v) in sample.iter().enumerate() {
                w.serialize((s, t, dim, v.re, v.im)).map_err(csv_err)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// `# rows=R cols=C` followed by `row,col,re,im` lines.
pub fn write_matrix_csv<W: Write>(m: &CMat, mut writer: W) -> Result<()> {
    writeln!(writer, "# rows={} cols={}", m.nrows(), m.ncols())?;
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["row", "col", "re", "im"]).map_err(csv_err)?;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let v = m[(i, j)];
            w.serialize((i, j, v.re, v.im)).map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_matrix_csv<R: BufRead>(mut reader: R) -> Result<CMat> {
    let mut first = String::new();
    reader.read_line(&mut first)?;
    let shape = first
        .trim()
        .strip_prefix("# rows=")
        .and_then(|rest| rest.split_once(" cols="))
        .and_then(|(r, c)| Some((r.parse::<usize>().ok()?, c.parse::<usize>().ok()?)));
    let (rows, cols) = shape.ok_or_else(|| parse_err(1, "expected '# rows=R cols=C'"))?;
    let mut m = CMat::zeros(rows, cols);
    let mut seen = vec![false; rows * cols];
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    for rec in rdr.deserialize::<(usize, usize, f64, f64)>() {
        let (i, j, re, im) = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line()) + 1;
            parse_err(line, e.to_string())
        })?;
        if i >= rows || j >= cols {
            return Err(Error::ShapeMismatch(format!("entry ({i}, {j}) outside {rows}x{cols}")));
        }
        m[(i, j)] = c64::new(re, im);
        seen[i * cols + j] = true;
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::ShapeMismatch("matrix CSV is missing entries".into()));
    }
    Ok(m)
}

/// Binary 8-bit PGM; brightness is divided by the maxval.
pub fn read_pgm<R: Read>(mut reader: R) -> Result<GrainImage> {
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    let mut pos = 0;
    let mut token = || -> Result<String> {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::InvalidArgument("truncated PGM header".into()));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    if token()? != "P5" {
        return Err(Error::InvalidArgument("not a binary PGM (P5)".into()));
    }
    let mut number = |what: &str| -> Result<usize> {
        token()?
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad PGM {what}")))
    };
    let width = number("width")?;
    let height = number("height")?;
    let maxval = number("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(Error::InvalidArgument(format!("unsupported PGM maxval {maxval}")));
    }
    let data = &bytes[pos + 1..];
    if data.len() < width * height {
        return Err(Error::InvalidArgument("PGM pixel data truncated".into()));
    }
    let pixels = data[..width * height]
        .iter()
        .map(|&b| (b as f64 / maxval as f64).min(1.0))
        .collect();
    GrainImage::new(width, height, pixels)
}

/// Brightness in [0, 1] quantized to 0..=255.
pub fn write_pgm<W: Write>(width: usize, height: usize, pixels: &[f64], mut writer: W) -> Result<()> {
    if pixels.len() != width * height {
        return Err(Error::ShapeMismatch(format!(
            "{} pixels for a {width}x{height} image",
            pixels.len()
        )));
    }
    write!(writer, "P5\n{width} {height}\n255\n")?;
    let data: Vec<u8> = pixels
        .iter()
        .map(|p| (p.clamp(0.0, 1.0) * 255.0).round() as u8)
        .collect();
    writer.write_all(&data)?;
    Ok(())
}

pub fn write_dendrogram_csv<W: Write>(d: &Dendrogram, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["step", "cluster_a", "cluster_b", "cost", "new_size"])
        .map_err(csv_err)?;
    for (s, m) in d.merges.iter().enumerate() {
        w.serialize((s, m.cluster_a, m.cluster_b, m.cost, m.new_size))
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_labels_csv<W: Write>(labels: &[usize], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["item_id", "label"]).map_err(csv_err)?;
    for (i, l) in labels.iter().enumerate() {
        w.serialize((i, l)).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// `i,j,label` with `i` the column and `j` the row.
pub fn write_label_map_csv<W: Write>(labels: &[usize], width: usize, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["i", "j", "label"]).map_err(csv_err)?;
    for (k, l) in labels.iter().enumerate() {
        w.serialize((k % width, k / width, l)).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Inverse of [`write_label_map_csv`]. Every pixel of the `width x height`
/// grid must appear once.
pub fn read_label_map_csv<R: Read>(reader: R, width: usize, height: usize) -> Result<Vec<usize>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers().map_err(csv_err)?.clone();
    if header.iter().ne(["i", "j", "label"]) {
        return Err(parse_err(1, "expected header i,j,label"));
    }
    let mut out = vec![None; width * height];
    for rec in rdr.deserialize::<(usize, usize, usize)>() {
        let (i, j, label) = rec.map_err(csv_err)?;
        if i >= width || j >= height {
            return Err(Error::InvalidArgument(format!("pixel ({i}, {j}) outside {width}x{height}")));
        }
        if out[j * width + i].replace(label).is_some() {
            return Err(Error::InvalidArgument(format!("pixel ({i}, {j}) listed twice")));
        }
    }
    out.into_iter()
        .enumerate()
        .map(|(k, l)| l.ok_or_else(|| Error::InvalidArgument(format!("pixel ({}, {}) missing", k % width, k / width))))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<c64> for ComplexJson {
    fn from(z: c64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

/// Result document of the `dmd` and `pencil` commands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub rank: usize,
    pub singular_values: Vec<f64>,
    pub eigenvalues: Vec<ComplexJson>,
    pub reconstruction_error: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub coefficients: Option<Vec<Vec<ComplexJson>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub similarity_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub adjoint_match_residual: Option<f64>,
}
