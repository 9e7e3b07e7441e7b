//! JSON file formats for maps, instances and reports.
//!
//! A map file is one JSON object:
//!
//! ```json
//! { "kind": "kraus", "in_dim": 2, "out_dim": 2,
//!   "operators": [ [[[1,0],[0,0]], [[0,0],[1,0]]] ], "signs": [1] }
//! ```
//!
//! `kind` is one of `kraus` (`operators`, optional `signs`), `choi` (`choi`, an
//! `n·m × n·m` matrix with row index `i·m + a`) or `measure_prepare` (`elements`, a list of
//! `{"povm": M, "output": σ}`). Matrices are row-major nested arrays whose entries are
//! `[re, im]` pairs; a bare number is read as a real entry.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::{LinearMapRep, MapBody};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::sat::{GadgetChannels, GapReport};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Pair([f64; 2]),
    Real(f64),
}

pub type MatrixFile = Vec<Vec<Entry>>;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ElementFile {
    pub povm: MatrixFile,
    pub output: MatrixFile,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    Kraus,
    Choi,
    MeasurePrepare,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub kind: MapKind,
    pub in_dim: usize,
    pub out_dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operators: Option<Vec<MatrixFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signs: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub choi: Option<MatrixFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<ElementFile>>,
}

pub fn matrix_from_file(rows: &MatrixFile, what: &str) -> Result<CMatrix> {
    let nr = rows.len();
    let nc = rows.first().map_or(0, Vec::len);
    if nr == 0 || nc == 0 {
        return Err(Error::Input(format!("{what}: empty matrix")));
    }
    if let Some((i, _)) = rows.iter().enumerate().find(|(_, r)| r.len() != nc) {
        return Err(Error::Input(format!("{what}: row {i} has {} entries, expected {nc}", rows[i].len())));
    }
    let m = CMatrix::from_fn(nr, nc, |i, j| match rows[i][j] {
        Entry::Pair([re, im]) => C64::new(re, im),
        Entry::Real(re) => C64::new(re, 0.0),
    });
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Input(format!("{what}: non-finite entry")));
    }
    Ok(m)
}

pub fn matrix_to_file(m: &CMatrix) -> MatrixFile {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| Entry::Pair([m[(i, j)].re, m[(i, j)].im])).collect()).collect()
}

fn expect_shape(m: &CMatrix, rows: usize, cols: usize, what: &str) -> Result<()> {
    if m.shape() != (rows, cols) {
        return Err(Error::Input(format!("{what}: expected {rows}x{cols}, got {}x{}", m.nrows(), m.ncols())));
    }
    Ok(())
}

impl MapFile {
    pub fn into_map(self) -> Result<LinearMapRep> {
        let (n, m) = (self.in_dim, self.out_dim);
        if n == 0 || m == 0 {
            return Err(Error::Input("in_dim and out_dim must be positive".into()));
        }
        match self.kind {
            MapKind::Kraus => {
                let ops = self.operators.ok_or_else(|| Error::Input("kraus map needs \"operators\"".into()))?;
                let mut mats = Vec::with_capacity(ops.len());
                for (k, op) in ops.iter().enumerate() {
                    let what = format!("operator {k}");
                    let mat = matrix_from_file(op, &what)?;
                    expect_shape(&mat, m, n, &what)?;
                    mats.push(mat);
                }
                let signs = self.signs.unwrap_or_else(|| vec![1.0; mats.len()]);
                if signs.iter().any(|s| *s != 1.0 && *s != -1.0) {
                    return Err(Error::Input("signs must be +1 or -1".into()));
                }
                LinearMapRep::signed_kraus(mats, signs)
            }
            MapKind::Choi => {
                let j = matrix_from_file(
                    self.choi.as_ref().ok_or_else(|| Error::Input("choi map needs \"choi\"".into()))?,
                    "choi",
                )?;
                expect_shape(&j, n * m, n * m, "choi")?;
                LinearMapRep::choi_map(j, n, m)
            }
            MapKind::MeasurePrepare => {
                let els = self.elements.ok_or_else(|| Error::Input("measure_prepare map needs \"elements\"".into()))?;
                let mut pairs = Vec::with_capacity(els.len());
                for (k, el) in els.iter().enumerate() {
                    let povm = matrix_from_file(&el.povm, &format!("element {k} povm"))?;
                    let out = matrix_from_file(&el.output, &format!("element {k} output"))?;
                    expect_shape(&povm, n, n, &format!("element {k} povm"))?;
                    expect_shape(&out, m, m, &format!("element {k} output"))?;
                    pairs.push((povm, out));
                }
                LinearMapRep::measure_prepare(pairs)
            }
        }
    }

    /// Serializes a map in its own representation; lazy tensor products are written as Choi
    /// matrices.
    pub fn from_map(map: &LinearMapRep) -> Result<Self> {
        let mut f = MapFile {
            kind: MapKind::Choi,
            in_dim: map.in_dim(),
            out_dim: map.out_dim(),
            operators: None,
            signs: None,
            choi: None,
            elements: None,
        };
        match map.body() {
            MapBody::Kraus { ops, signs } => {
                f.kind = MapKind::Kraus;
                f.operators = Some(ops.iter().map(matrix_to_file).collect());
                f.signs = Some(signs.clone());
            }
            MapBody::MeasurePrepare(pairs) => {
                f.kind = MapKind::MeasurePrepare;
                f.elements = Some(
                    pairs
                        .iter()
                        .map(|(povm, out)| ElementFile { povm: matrix_to_file(povm), output: matrix_to_file(out) })
                        .collect(),
                );
            }
            MapBody::Choi(_) | MapBody::Tensor(_) => f.choi = Some(matrix_to_file(&map.choi()?)),
        }
        Ok(f)
    }
}

pub fn parse_map(text: &str) -> Result<LinearMapRep> {
    let f: MapFile = serde_json::from_str(text).map_err(|e| Error::Input(format!("map file: {e}")))?;
    f.into_map()
}

pub fn map_to_json(map: &LinearMapRep) -> Result<String> {
    Ok(serde_json::to_string_pretty(&MapFile::from_map(map)?)?)
}

/// Reads a map file; a missing or unreadable file is an input error naming the path.
pub fn read_map(path: &Path) -> Result<LinearMapRep> {
    let text = fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    parse_map(&text)
}

pub fn write_map(path: &Path, map: &LinearMapRep) -> Result<()> {
    fs::write(path, map_to_json(map)?)?;
    Ok(())
}

/// File names written by [`write_gadget_dir`].
pub const GADGET_FILES: [&str; 4] = ["phi_trace.json", "phi_swap.json", "phi_cube.json", "phi_h.json"];
pub const REPORT_FILE: &str = "report.json";

/// Writes the four factor channels and the gap report into `dir`, creating it if needed.
pub fn write_gadget_dir(dir: &Path, g: &GadgetChannels, report: &GapReport) -> Result<Vec<std::path::PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (name, map) in GADGET_FILES.iter().zip(g.factors()) {
        let path = dir.join(name);
        write_map(&path, map)?;
        written.push(path);
    }
    let path = dir.join(REPORT_FILE);
    fs::write(&path, serde_json::to_string_pretty(report)?)?;
    written.push(path);
    Ok(written)
}
