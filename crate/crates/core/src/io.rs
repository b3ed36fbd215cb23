//! JSON file formats for states, polynomials and witness decompositions.
//!
//! Complex numbers are `[re, im]` pairs. Floats are written in shortest
//! round-trip form, so a written file re-parses bit-identically.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::CoherenceError;
use crate::poly::HomogeneousPolynomial;
use crate::roof::Decomposition;
use crate::state::{CMatrix, DensityMatrix, PureState};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("field `{field}`: {source}")]
    Invalid {
        field: &'static str,
        #[source]
        source: CoherenceError,
    },
    #[error("field `{field}`: {message}")]
    Shape { field: &'static str, message: String },
}

fn invalid(field: &'static str) -> impl FnOnce(CoherenceError) -> FormatError {
    move |source| FormatError::Invalid { field, source }
}

type Pair = [f64; 2];

fn to_pair(z: Complex64) -> Pair {
    [z.re, z.im]
}

fn from_pair(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

/// A parsed state file.
#[derive(Debug, Clone, PartialEq)]
pub enum StateData {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl StateData {
    pub fn dim(&self) -> usize {
        match self {
            StateData::Pure(p) => p.dim(),
            StateData::Mixed(m) => m.dim(),
        }
    }

    pub fn to_density_matrix(&self) -> Result<DensityMatrix, CoherenceError> {
        match self {
            StateData::Pure(p) => DensityMatrix::from_pure(p),
            StateData::Mixed(m) => Ok(m.clone()),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    amplitudes: Option<Vec<Pair>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<Pair>>>,
}

pub fn parse_state(text: &str) -> Result<StateData, FormatError> {
    let file: StateFile = serde_json::from_str(text)?;
    match (file.amplitudes, file.matrix) {
        (Some(amps), None) => {
            if amps.len() != file.dim {
                return Err(FormatError::Shape {
                    field: "amplitudes",
                    message: format!("{} entries for dim {}", amps.len(), file.dim),
                });
            }
            let psi = PureState::new(amps.into_iter().map(from_pair).collect()).map_err(invalid("amplitudes"))?;
            Ok(StateData::Pure(psi))
        }
        (None, Some(rows)) => {
            let d = file.dim;
            if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                return Err(FormatError::Shape {
                    field: "matrix",
                    message: format!("expected a {d}x{d} matrix"),
                });
            }
            let m = CMatrix::from_fn(d, d, |i, j| from_pair(rows[i][j]));
            Ok(StateData::Mixed(DensityMatrix::new(m).map_err(invalid("matrix"))?))
        }
        _ => Err(FormatError::Shape {
            field: "amplitudes",
            message: "exactly one of `amplitudes` or `matrix` is required".into(),
        }),
    }
}

pub fn pure_state_to_json(psi: &PureState) -> String {
    let file = StateFile {
        dim: psi.dim(),
        amplitudes: Some(psi.amplitudes().iter().map(|&z| to_pair(z)).collect()),
        matrix: None,
    };
    serde_json::to_string_pretty(&file).expect("serializable")
}

pub fn density_matrix_to_json(rho: &DensityMatrix) -> String {
    let d = rho.dim();
    let file = StateFile {
        dim: d,
        amplitudes: None,
        matrix: Some((0..d).map(|i| (0..d).map(|j| to_pair(rho.entry(i, j))).collect()).collect()),
    };
    serde_json::to_string_pretty(&file).expect("serializable")
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermFile {
    exponents: Vec<u32>,
    coeff: Pair,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolynomialFile {
    dim: usize,
    degree: u32,
    power: f64,
    terms: Vec<TermFile>,
}

pub fn parse_polynomial(text: &str) -> Result<HomogeneousPolynomial, FormatError> {
    let file: PolynomialFile = serde_json::from_str(text)?;
    HomogeneousPolynomial::new(
        file.dim,
        file.degree,
        file.power,
        file.terms.into_iter().map(|t| (t.exponents, from_pair(t.coeff))),
    )
    .map_err(invalid("terms"))
}

/// Terms are emitted in the polynomial's canonical multi-index order.
pub fn polynomial_to_json(p: &HomogeneousPolynomial) -> String {
    let file = PolynomialFile {
        dim: p.dim(),
        degree: p.degree(),
        power: p.power(),
        terms: p
            .terms()
            .iter()
            .map(|(e, &c)| TermFile {
                exponents: e.clone(),
                coeff: to_pair(c),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("serializable")
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DecompositionFile {
    probabilities: Vec<f64>,
    states: Vec<Vec<Pair>>,
}

pub fn decomposition_to_json(dec: &Decomposition) -> String {
    let file = DecompositionFile {
        probabilities: dec.probabilities(),
        states: dec
            .entries()
            .iter()
            .map(|(_, psi)| psi.amplitudes().iter().map(|&z| to_pair(z)).collect())
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("serializable")
}

pub fn parse_decomposition(text: &str) -> Result<Decomposition, FormatError> {
    let file: DecompositionFile = serde_json::from_str(text)?;
    if file.probabilities.len() != file.states.len() {
        return Err(FormatError::Shape {
            field: "states",
            message: format!(
                "{} probabilities but {} states",
                file.probabilities.len(),
                file.states.len()
            ),
        });
    }
    let entries = file
        .probabilities
        .into_iter()
        .zip(file.states)
        .map(|(p, s)| Ok((p, PureState::new(s.into_iter().map(from_pair).collect()).map_err(invalid("states"))?)))
        .collect::<Result<Vec<_>, FormatError>>()?;
    Decomposition::new(entries).map_err(invalid("probabilities"))
}
