//! JSON file formats.
//!
//! - State: `{"dims": [2,2,2], "amplitudes": [[re, im], ...]}`.
//! - Matrix: nested rows of `[re, im]` pairs.
//! - Density-matrix input: a bare matrix, `{"entries": matrix}`, or a state
//!   file (read as `|ψ⟩⟨ψ|`).

use serde::{Deserialize, Serialize};

use super::{CMat, CVec, DensityMatrix, PureState, C64};
use crate::{Error, Result};

pub type ComplexPair = [f64; 2];
pub type MatrixJson = Vec<Vec<ComplexPair>>;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct StateJson {
    pub dims: Vec<usize>,
    pub amplitudes: Vec<ComplexPair>,
}

impl From<&PureState> for StateJson {
    fn from(psi: &PureState) -> Self {
        StateJson {
            dims: psi.dims().to_vec(),
            amplitudes: psi.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<StateJson> for PureState {
    type Error = Error;

    fn try_from(js: StateJson) -> Result<PureState> {
        let amps = CVec::from_iterator(
            js.amplitudes.len(),
            js.amplitudes.iter().map(|p| C64::new(p[0], p[1])),
        );
        PureState::new(js.dims, amps)
    }
}

pub fn matrix_to_json(m: &CMat) -> MatrixJson {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<CMat> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if n == 0 || rows.iter().any(|r| r.len() != m) {
        return Err(Error::input("matrix rows must be non-empty and equally long"));
    }
    Ok(CMat::from_fn(n, m, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum DensityInput {
    Bare(MatrixJson),
    Entries { entries: MatrixJson },
    State(StateJson),
}

pub fn state_to_string(psi: &PureState) -> Result<String> {
    Ok(serde_json::to_string_pretty(&StateJson::from(psi))?)
}

pub fn state_from_str(text: &str) -> Result<PureState> {
    let js: StateJson = serde_json::from_str(text)?;
    PureState::try_from(js)
}

pub fn density_from_str(text: &str) -> Result<DensityMatrix> {
    match serde_json::from_str::<DensityInput>(text)? {
        DensityInput::Bare(rows) | DensityInput::Entries { entries: rows } => {
            DensityMatrix::new(matrix_from_json(&rows)?)
        }
        DensityInput::State(js) => Ok(PureState::try_from(js)?.density()),
    }
}

pub fn density_to_json(rho: &DensityMatrix) -> MatrixJson {
    matrix_to_json(rho.matrix())
}
