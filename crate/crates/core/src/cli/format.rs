//! JSON file formats: state sets and quasiprobability decompositions.

use serde::{Deserialize, Serialize};

use crate::channels::{ChoiMatrix, QpDecomposition};
use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix, DensityMatrix, HermitianOperator, PureState};

pub const STATES_SCHEMA: &str = "vclone-states/1";
pub const QPD_SCHEMA: &str = "vclone-qpd/1";

/// Row-major matrix of `[re, im]` pairs.
pub type MatrixJson = Vec<Vec<[f64; 2]>>;

/// One state: a preset name, a Bloch vector or an explicit density matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Preset(String),
    Bloch { bloch: [f64; 3] },
    Matrix { matrix: MatrixJson },
}

pub const PRESETS: [&str; 7] = ["zero", "one", "plus", "minus", "y+", "y-", "mixed"];

impl StateSpec {
    /// A preset name, or a JSON object as accepted in a states file.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.starts_with('{') {
            serde_json::from_str(t).map_err(|e| Error::Parse(format!("state '{t}': {e}")))
        } else {
            Ok(Self::Preset(t.to_string()))
        }
    }

    pub fn resolve(&self) -> Result<DensityMatrix> {
        match self {
            Self::Preset(name) => {
                let r = match name.as_str() {
                    "zero" => [0.0, 0.0, 1.0],
                    "one" => [0.0, 0.0, -1.0],
                    "plus" => [1.0, 0.0, 0.0],
                    "minus" => [-1.0, 0.0, 0.0],
                    "y+" => [0.0, 1.0, 0.0],
                    "y-" => [0.0, -1.0, 0.0],
                    "mixed" => [0.0, 0.0, 0.0],
                    other => {
                        return Err(Error::Parse(format!("unknown preset '{other}' (expected one of {PRESETS:?})")))
                    }
                };
                DensityMatrix::from_bloch(r)
            }
            Self::Bloch { bloch } => DensityMatrix::from_bloch(*bloch),
            Self::Matrix { matrix } => DensityMatrix::new(matrix_from_json(matrix)?),
        }
    }
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<ComplexMatrix> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::Parse("empty matrix".into()));
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(Error::Parse(format!("row {i} has {} entries, expected {n}", r.len())));
    }
    Ok(ComplexMatrix::from_fn(n, n, |i, j| c(rows[i][j][0], rows[i][j][1])))
}

pub fn matrix_to_json(m: &ComplexMatrix) -> MatrixJson {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

pub fn state_to_spec(rho: &DensityMatrix) -> StateSpec {
    StateSpec::Matrix { matrix: matrix_to_json(rho.matrix()) }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatesFile {
    pub schema: String,
    pub states: Vec<StateSpec>,
}

impl StatesFile {
    pub fn new(states: Vec<StateSpec>) -> Self {
        Self { schema: STATES_SCHEMA.into(), states }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let f: Self = serde_json::from_str(text).map_err(|e| Error::Parse(format!("states file: {e}")))?;
        if f.schema != STATES_SCHEMA {
            return Err(Error::Parse(format!("schema '{}' (expected '{STATES_SCHEMA}')", f.schema)));
        }
        if f.states.is_empty() {
            return Err(Error::Parse("states: empty list".into()));
        }
        Ok(f)
    }

    pub fn resolve(&self) -> Result<Vec<DensityMatrix>> {
        self.states
            .iter()
            .enumerate()
            .map(|(i, s)| s.resolve().map_err(|e| Error::Parse(format!("states[{i}]: {e}"))))
            .collect()
    }
}

/// Serialized `λ₊J₊ − λ₋J₋`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QpdFile {
    pub schema: String,
    pub dim_in: usize,
    pub dim_out: usize,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub choi_plus: MatrixJson,
    pub choi_minus: MatrixJson,
}

impl QpdFile {
    pub fn from_qpd(q: &QpDecomposition) -> Self {
        Self {
            schema: QPD_SCHEMA.into(),
            dim_in: q.dim_in(),
            dim_out: q.dim_out(),
            lambda_plus: q.lambda_plus,
            lambda_minus: q.lambda_minus,
            choi_plus: matrix_to_json(q.choi_plus.matrix()),
            choi_minus: matrix_to_json(q.choi_minus.matrix()),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let f: Self = serde_json::from_str(text).map_err(|e| Error::Parse(format!("qpd file: {e}")))?;
        if f.schema != QPD_SCHEMA {
            return Err(Error::Parse(format!("schema '{}' (expected '{QPD_SCHEMA}')", f.schema)));
        }
        Ok(f)
    }

    pub fn to_qpd(&self) -> Result<QpDecomposition> {
        let branch = |name: &str, m: &MatrixJson| -> Result<ChoiMatrix> {
            let op = HermitianOperator::new(matrix_from_json(m).map_err(|e| Error::Parse(format!("{name}: {e}")))?)?;
            ChoiMatrix::new(self.dim_in, self.dim_out, op)
        };
        QpDecomposition::new(
            self.lambda_plus,
            self.lambda_minus,
            branch("choi_plus", &self.choi_plus)?,
            branch("choi_minus", &self.choi_minus)?,
        )
    }
}

/// The pure state behind a rank-one density matrix.
pub fn as_pure(rho: &DensityMatrix) -> Result<PureState> {
    rho.pure_state(1e-10).ok_or_else(|| Error::InvalidArgument(format!("state is not pure (purity {})", rho.purity())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;

    #[test]
    fn presets_and_specs() {
        let f = StatesFile::parse(
            r#"{"schema":"vclone-states/1","states":["zero",{"bloch":[1,0,0]},{"matrix":[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]}]}"#,
        )
        .unwrap();
        let s = f.resolve().unwrap();
        assert!(max_abs(&(s[0].matrix() - PureState::zero().density().matrix())) < 1e-15);
        assert!(max_abs(&(s[1].matrix() - PureState::plus().density().matrix())) < 1e-15);
        assert!(max_abs(&(s[2].matrix() - DensityMatrix::maximally_mixed(2).matrix())) < 1e-15);
        for p in PRESETS {
            StateSpec::Preset(p.into()).resolve().unwrap();
        }
    }

    #[test]
    fn parse_errors_carry_context() {
        let e = StatesFile::parse(r#"{"schema":"vclone-states/1","states":["zero",]}"#).unwrap_err();
        assert!(e.to_string().contains("line 1"), "{e}");
        let e = StatesFile::parse(r#"{"schema":"x","states":["zero"]}"#).unwrap_err();
        assert!(e.to_string().contains("schema"));
        let f = StatesFile::parse(r#"{"schema":"vclone-states/1","states":["zero",{"bloch":[1,1,0]}]}"#).unwrap();
        let e = f.resolve().unwrap_err();
        assert!(e.to_string().contains("states[1]"), "{e}");
    }

    #[test]
    fn qpd_round_trip() {
        let q = QpDecomposition::from_cptp(ChoiMatrix::identity(2)).unwrap();
        let text = serde_json::to_string(&QpdFile::from_qpd(&q)).unwrap();
        let back = QpdFile::parse(&text).unwrap().to_qpd().unwrap();
        assert_eq!(back, q);
    }
}
