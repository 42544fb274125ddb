//! JSON encoding of channels.
//!
//! A channel file is an object with integer fields `dim_in` and `dim_out`
//! and exactly one of
//! - `kraus`: a list of `dim_out x dim_in` matrices, or
//! - `choi`: one `(dim_out*dim_in)`-square matrix, output factor first.
//!
//! Matrices are row-major lists of rows; each entry is `[re, im]`.

use std::path::Path;

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::channel::{ChoiMatrix, QuantumChannel};
use crate::error::{Error, Result};
use crate::linalg::{c, CMat};

pub type MatrixData = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ChannelFile {
    pub dim_in: usize,
    pub dim_out: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus: Option<Vec<MatrixData>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub choi: Option<MatrixData>,
}

pub fn encode_matrix(m: &CMat) -> MatrixData {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

pub fn decode_matrix(data: &MatrixData, rows: usize, cols: usize, what: &str) -> Result<CMat> {
    if data.len() != rows || data.iter().any(|r| r.len() != cols) {
        return Err(Error::Format(format!("{what} must be {rows}x{cols}")));
    }
    if data.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Format(format!("{what} has a non-finite entry")));
    }
    Ok(CMat::from_fn(rows, cols, |i, j| c(data[i][j][0], data[i][j][1])))
}

impl ChannelFile {
    pub fn from_channel(ch: &QuantumChannel) -> Self {
        Self {
            dim_in: ch.dim_in(),
            dim_out: ch.dim_out(),
            kraus: Some(ch.kraus().iter().map(encode_matrix).collect()),
            choi: None,
        }
    }

    pub fn to_channel(&self) -> Result<QuantumChannel> {
        let (a, b) = (self.dim_in, self.dim_out);
        if a == 0 || b == 0 {
            return Err(Error::Format("dim_in and dim_out must be positive".into()));
        }
        match (&self.kraus, &self.choi) {
            (Some(kraus), None) => {
                let ops = kraus
                    .iter()
                    .enumerate()
                    .map(|(x, m)| decode_matrix(m, b, a, &format!("Kraus operator {x}")))
                    .collect::<Result<Vec<_>>>()?;
                QuantumChannel::from_kraus(ops, a, b)
            }
            (None, Some(choi)) => {
                let m = decode_matrix(choi, a * b, a * b, "Choi matrix")?;
                QuantumChannel::from_choi(&ChoiMatrix::new(m, a, b)?)
            }
            (Some(_), Some(_)) => Err(Error::Format("give either \"kraus\" or \"choi\", not both".into())),
            (None, None) => Err(Error::Format("one of \"kraus\" or \"choi\" is required".into())),
        }
    }
}

pub fn channel_from_json(text: &str) -> Result<QuantumChannel> {
    let file: ChannelFile = serde_json::from_str(text)?;
    file.to_channel()
}

pub fn channel_to_json(ch: &QuantumChannel) -> String {
    serde_json::to_string_pretty(&ChannelFile::from_channel(ch)).expect("channel file serialises")
}

pub fn read_channel(path: &Path) -> Result<QuantumChannel> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    channel_from_json(&text).map_err(|e| match e {
        Error::Json(inner) => Error::Format(format!("{}: {inner}", path.display())),
        other => other,
    })
}

pub fn write_channel(path: &Path, ch: &QuantumChannel) -> Result<()> {
    std::fs::write(path, channel_to_json(ch))?;
    Ok(())
}

pub(crate) fn serialize_choi<S: Serializer>(j: &ChoiMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut st = s.serialize_struct("ChoiMatrix", 3)?;
    st.serialize_field("dim_in", &j.dim_in())?;
    st.serialize_field("dim_out", &j.dim_out())?;
    st.serialize_field("matrix", &encode_matrix(j.matrix()))?;
    st.end()
}
