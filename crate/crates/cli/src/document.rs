//! JSON documents for states and channels.

use std::fs;
use std::path::Path;

use coherence_core::channels::{KrausMap, SchurMatrix};
use coherence_core::classify::Hamiltonian;
use coherence_core::states::{DensityMatrix, PureState};
use coherence_core::{ComplexMatrix, Tolerance, C64};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Dense complex matrix split into real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixData {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixData {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let rows = |f: fn(&C64) -> f64| (0..m.rows()).map(|i| (0..m.cols()).map(|j| f(&m[(i, j)])).collect()).collect();
        Self { re: rows(|z| z.re), im: rows(|z| z.im) }
    }

    pub fn to_matrix(&self, dim: usize) -> Result<ComplexMatrix, CliError> {
        let ok = self.re.len() == dim && self.im.len() == dim && self.re.iter().chain(&self.im).all(|r| r.len() == dim);
        if !ok {
            return Err(CliError::Invalid(format!("matrix data is not {dim}x{dim}")));
        }
        let data = self.re.iter().flatten().zip(self.im.iter().flatten()).map(|(&a, &b)| C64::new(a, b)).collect();
        Ok(ComplexMatrix::new(dim, dim, data)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Document {
    StateVector { dim: usize, data: Vec<[f64; 2]> },
    Density { dim: usize, data: MatrixData },
    ChannelKraus { dim: usize, data: Vec<MatrixData> },
    ChannelSchur { dim: usize, data: MatrixData },
    /// Diagonal Hamiltonian given by its energies.
    Hamiltonian { dim: usize, data: Vec<f64> },
}

/// A state read from either a vector or a density document.
#[derive(Debug, Clone)]
pub enum StateInput {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl StateInput {
    pub fn density(&self) -> DensityMatrix {
        match self {
            StateInput::Pure(p) => p.to_density(),
            StateInput::Mixed(d) => d.clone(),
        }
    }
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::StateVector { .. } => "state_vector",
            Document::Density { .. } => "density",
            Document::ChannelKraus { .. } => "channel_kraus",
            Document::ChannelSchur { .. } => "channel_schur",
            Document::Hamiltonian { .. } => "hamiltonian",
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Parse(msg) => CliError::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        fs::write(path, self.to_json() + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }

    pub fn from_pure(p: &PureState) -> Self {
        Document::StateVector { dim: p.dim(), data: p.amplitudes().iter().map(|z| [z.re, z.im]).collect() }
    }

    pub fn from_density(rho: &DensityMatrix) -> Self {
        Document::Density { dim: rho.dim(), data: MatrixData::from_matrix(rho.matrix()) }
    }

    pub fn from_kraus(m: &KrausMap) -> Self {
        Document::ChannelKraus { dim: m.dim(), data: m.kraus().iter().map(MatrixData::from_matrix).collect() }
    }

    pub fn from_schur(a: &SchurMatrix) -> Self {
        Document::ChannelSchur { dim: a.dim(), data: MatrixData::from_matrix(a.matrix()) }
    }

    pub fn to_state(&self, tol: &Tolerance) -> Result<StateInput, CliError> {
        match self {
            Document::StateVector { dim, data } => {
                if data.len() != *dim {
                    return Err(CliError::Invalid(format!("state vector has {} amplitudes, dim is {dim}", data.len())));
                }
                Ok(StateInput::Pure(PureState::new(data.iter().map(|&[a, b]| C64::new(a, b)).collect())?))
            }
            Document::Density { dim, data } => Ok(StateInput::Mixed(DensityMatrix::with_tolerance(data.to_matrix(*dim)?, tol)?)),
            other => Err(CliError::Invalid(format!("expected a state, found {}", other.kind()))),
        }
    }

    pub fn to_channel(&self, tol: &Tolerance) -> Result<KrausMap, CliError> {
        match self {
            Document::ChannelKraus { dim, data } => {
                let ops = data.iter().map(|m| m.to_matrix(*dim)).collect::<Result<Vec<_>, _>>()?;
                Ok(KrausMap::with_tolerance(ops, tol)?)
            }
            Document::ChannelSchur { .. } => Ok(coherence_core::channels::schur_map(&self.to_schur(tol)?)?),
            other => Err(CliError::Invalid(format!("expected a channel, found {}", other.kind()))),
        }
    }

    pub fn to_schur(&self, tol: &Tolerance) -> Result<SchurMatrix, CliError> {
        match self {
            Document::ChannelSchur { dim, data } => Ok(SchurMatrix::with_tolerance(data.to_matrix(*dim)?, tol)?),
            other => Err(CliError::Invalid(format!("expected a channel_schur document, found {}", other.kind()))),
        }
    }

    pub fn to_hamiltonian(&self) -> Result<Hamiltonian, CliError> {
        match self {
            Document::Hamiltonian { dim, data } if data.len() == *dim => Ok(Hamiltonian::new(data.clone())?),
            Document::Hamiltonian { dim, data } => Err(CliError::Invalid(format!("{} energies given, dim is {dim}", data.len()))),
            other => Err(CliError::Invalid(format!("expected a hamiltonian, found {}", other.kind()))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_kind() {
        let v = Document::parse(r#"{"kind":"state_vector","dim":2,"data":[[0.6,0],[0,0.8]]}"#).unwrap();
        let StateInput::Pure(p) = v.to_state(&Tolerance::default()).unwrap() else { panic!("expected pure") };
        assert_eq!(p.amplitudes()[1], C64::new(0.0, 0.8));

        let d = Document::parse(r#"{"kind":"density","dim":2,"data":{"re":[[0.5,0.5],[0.5,0.5]],"im":[[0,0],[0,0]]}}"#).unwrap();
        assert!(matches!(d.to_state(&Tolerance::default()).unwrap(), StateInput::Mixed(_)));

        let k = Document::parse(r#"{"kind":"channel_kraus","dim":2,"data":[{"re":[[1,0],[0,1]],"im":[[0,0],[0,0]]}]}"#).unwrap();
        assert!(k.to_channel(&Tolerance::default()).unwrap().same_channel(&KrausMap::identity(2)));

        let h = Document::parse(r#"{"kind":"hamiltonian","dim":2,"data":[0,1]}"#).unwrap();
        assert_eq!(h.to_hamiltonian().unwrap().energies(), &[0.0, 1.0]);
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(matches!(Document::parse("{"), Err(CliError::Parse(_))));
        assert!(matches!(Document::parse(r#"{"kind":"tensor","dim":1,"data":[]}"#), Err(CliError::Parse(_))));
        let short = Document::parse(r#"{"kind":"state_vector","dim":3,"data":[[1,0]]}"#).unwrap();
        assert!(matches!(short.to_state(&Tolerance::default()), Err(CliError::Invalid(_))));
        let not_psd = Document::parse(r#"{"kind":"density","dim":2,"data":{"re":[[1.5,0],[0,-0.5]],"im":[[0,0],[0,0]]}}"#).unwrap();
        assert!(matches!(not_psd.to_state(&Tolerance::default()), Err(CliError::Invalid(_))));
    }
}
