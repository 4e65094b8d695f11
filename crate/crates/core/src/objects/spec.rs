//! JSON channel specs:
//!
//! ```json
//! {"dim_in": 2, "dim_out": 2, "repr": "kraus", "data": [[[[re, im], ...], ...]], "name": "H"}
//! ```
//!
//! For `"choi"` the data is a single matrix (rows of `[re, im]` pairs); for
//! `"kraus"` it is a list of such matrices.

use serde::{Deserialize, Serialize};

use super::{ObjectError, QuantumChannel};
use crate::linalg::{c, ComplexMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Kraus,
    Choi,
}

type RawMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub dim_in: usize,
    pub dim_out: usize,
    pub repr: Representation,
    pub data: serde_json::Value,
    #[serde(default)]
    pub name: Option<String>,
}

fn parse_matrix(raw: RawMatrix, rows: usize, cols: usize) -> Result<ComplexMatrix, ObjectError> {
    if raw.len() != rows || raw.iter().any(|r| r.len() != cols) {
        return Err(ObjectError::invalid(
            "dimension",
            format!("expected a {rows}x{cols} matrix"),
        ));
    }
    let data = raw.into_iter().flatten().map(|[x, y]| c(x, y)).collect();
    Ok(ComplexMatrix::new(rows, cols, data)?)
}

fn to_raw(m: &ComplexMatrix) -> RawMatrix {
    (0..m.rows())
        .map(|r| (0..m.cols()).map(|col| [m[(r, col)].re, m[(r, col)].im]).collect())
        .collect()
}

impl ChannelSpec {
    pub fn from_json(text: &str) -> Result<Self, ObjectError> {
        serde_json::from_str(text).map_err(|e| ObjectError::Spec(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    /// Validates the data against the declared representation and the CPTP
    /// invariants.
    pub fn to_channel(&self) -> Result<QuantumChannel, ObjectError> {
        if self.dim_in == 0 || self.dim_out == 0 {
            return Err(ObjectError::invalid("dimension", "dimensions must be positive"));
        }
        match self.repr {
            Representation::Choi => {
                let raw: RawMatrix = serde_json::from_value(self.data.clone())
                    .map_err(|e| ObjectError::Spec(format!("choi data: {e}")))?;
                let n = self.dim_in * self.dim_out;
                QuantumChannel::from_choi(self.dim_in, self.dim_out, parse_matrix(raw, n, n)?)
            }
            Representation::Kraus => {
                let raw: Vec<RawMatrix> = serde_json::from_value(self.data.clone())
                    .map_err(|e| ObjectError::Spec(format!("kraus data: {e}")))?;
                let kraus = raw
                    .into_iter()
                    .map(|m| parse_matrix(m, self.dim_out, self.dim_in))
                    .collect::<Result<Vec<_>, _>>()?;
                QuantumChannel::from_kraus(kraus)
            }
        }
    }

    pub fn from_channel(channel: &QuantumChannel, name: Option<String>) -> Self {
        let (repr, data) = match channel.kraus() {
            Some(k) => (
                Representation::Kraus,
                serde_json::to_value(k.iter().map(to_raw).collect::<Vec<_>>()),
            ),
            None => (Representation::Choi, serde_json::to_value(to_raw(channel.choi()))),
        };
        Self {
            dim_in: channel.dim_in(),
            dim_out: channel.dim_out(),
            repr,
            data: data.expect("matrix serializes"),
            name,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HADAMARD: &str = r#"{"dim_in":2,"dim_out":2,"repr":"kraus","name":"H",
        "data":[[[[0.7071067811865476,0],[0.7071067811865476,0]],
                 [[0.7071067811865476,0],[-0.7071067811865476,0]]]]}"#;

    #[test]
    fn parses_hadamard_kraus() {
        let spec = ChannelSpec::from_json(HADAMARD).unwrap();
        assert_eq!(spec.name.as_deref(), Some("H"));
        let ch = spec.to_channel().unwrap();
        assert!(ch.choi().approx_eq(QuantumChannel::hadamard().choi(), 1e-15));
    }

    #[test]
    fn choi_roundtrip() {
        let delta = QuantumChannel::dephasing(2);
        let mut spec = ChannelSpec::from_channel(&delta, Some("delta".into()));
        let back = ChannelSpec::from_json(&spec.to_json()).unwrap().to_channel().unwrap();
        assert!(back.choi().approx_eq(delta.choi(), 0.0));
        spec.repr = Representation::Choi;
        spec.data = serde_json::to_value(to_raw(delta.choi())).unwrap();
        assert!(spec.to_channel().is_ok());
    }

    #[test]
    fn missing_field_is_named() {
        let err = ChannelSpec::from_json(r#"{"dim_out":2,"repr":"choi","data":[]}"#).unwrap_err();
        assert!(err.to_string().contains("dim_in"), "{err}");
    }

    #[test]
    fn invalid_channel_names_invariant() {
        let text = r#"{"dim_in":2,"dim_out":2,"repr":"kraus",
            "data":[[[[1,0],[0,0]],[[0,0],[0.5,0]]]]}"#;
        let err = ChannelSpec::from_json(text).unwrap().to_channel().unwrap_err();
        assert_eq!(err.invariant(), Some("kraus_completeness"));
        let bad_dims = r#"{"dim_in":2,"dim_out":2,"repr":"choi","data":[[[1,0]]]}"#;
        let err = ChannelSpec::from_json(bad_dims).unwrap().to_channel().unwrap_err();
        assert_eq!(err.invariant(), Some("dimension"));
    }
}
