//! Serializable state descriptions: pure amplitude lists, row-major complex
//! matrices, and named builtin states used by the reproduction runs.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{C64, CMat, CVec, DensityOperator, Ket};

/// Names accepted by the `builtin` kind.
pub const BUILTIN_NAMES: &[&str] = &[
    "bell_phi_plus",
    "bell_phi_minus",
    "bell_psi_plus",
    "bell_psi_minus",
    "ket00",
    "example3_mix",
    "example4_classical",
];

/// State description as stored in input files. Complex numbers are
/// `(re, im)` pairs; matrices are row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StateSpec {
    Pure {
        dims: Vec<usize>,
        amplitudes: Vec<(f64, f64)>,
    },
    Mixed {
        dims: Vec<usize>,
        matrix: Vec<Vec<(f64, f64)>>,
    },
    Builtin {
        name: String,
    },
}

fn two_qubit_ket(amps: [C64; 4]) -> Ket {
    Ket::new(CVec::from_row_slice(&amps), vec![2, 2]).expect("builtin ket")
}

fn bell(sign: f64, phi: bool) -> Ket {
    let s = C64::from(std::f64::consts::FRAC_1_SQRT_2);
    let z = C64::from(0.0);
    if phi {
        two_qubit_ket([s, z, z, s * C64::from(sign)])
    } else {
        two_qubit_ket([z, s, s * C64::from(sign), z])
    }
}

/// `(|00> + |11>)/sqrt(2)`
pub fn bell_phi_plus() -> Ket {
    bell(1.0, true)
}

/// `(|00> - |11>)/sqrt(2)`
pub fn bell_phi_minus() -> Ket {
    bell(-1.0, true)
}

/// `(|01> + |10>)/sqrt(2)`
pub fn bell_psi_plus() -> Ket {
    bell(1.0, false)
}

/// `(|01> - |10>)/sqrt(2)`
pub fn bell_psi_minus() -> Ket {
    bell(-1.0, false)
}

pub fn ket00() -> Ket {
    Ket::basis(vec![2, 2], 0).expect("builtin ket")
}

/// Equal mixture of three maximally entangled two-qubit states:
/// `(|00>+|11>)/sqrt(2)`, `(|00>-|11>)/sqrt(2)`, `(|01>+|10>)/sqrt(2)`.
pub fn example3_mix() -> DensityOperator {
    let third = C64::from(1.0 / 3.0);
    let m = (bell_phi_plus().density().matrix()
        + bell_phi_minus().density().matrix()
        + bell_psi_plus().density().matrix())
        * third;
    DensityOperator::new(m, vec![2, 2]).expect("builtin state")
}

/// Classical-classical two-qubit state `(|00><00| + |11><11|)/2`.
pub fn example4_classical() -> DensityOperator {
    let mut m = CMat::zeros(4, 4);
    m[(0, 0)] = C64::from(0.5);
    m[(3, 3)] = C64::from(0.5);
    DensityOperator::new(m, vec![2, 2]).expect("builtin state")
}

/// Expands a builtin name into a validated state.
pub fn builtin_state(name: &str) -> Result<DensityOperator> {
    match name {
        "bell_phi_plus" => Ok(bell_phi_plus().density()),
        "bell_phi_minus" => Ok(bell_phi_minus().density()),
        "bell_psi_plus" => Ok(bell_psi_plus().density()),
        "bell_psi_minus" => Ok(bell_psi_minus().density()),
        "ket00" => Ok(ket00().density()),
        "example3_mix" => Ok(example3_mix()),
        "example4_classical" => Ok(example4_classical()),
        other => Err(Error::UnknownBuiltin(other.to_string())),
    }
}

/// Ket form of a builtin, when the builtin is pure.
pub fn builtin_ket(name: &str) -> Result<Option<Ket>> {
    match name {
        "bell_phi_plus" => Ok(Some(bell_phi_plus())),
        "bell_phi_minus" => Ok(Some(bell_phi_minus())),
        "bell_psi_plus" => Ok(Some(bell_psi_plus())),
        "bell_psi_minus" => Ok(Some(bell_psi_minus())),
        "ket00" => Ok(Some(ket00())),
        "example3_mix" | "example4_classical" => Ok(None),
        other => Err(Error::UnknownBuiltin(other.to_string())),
    }
}

impl StateSpec {
    pub fn builtin(name: &str) -> Self {
        StateSpec::Builtin {
            name: name.to_string(),
        }
    }

    pub fn from_ket(psi: &Ket) -> Self {
        StateSpec::Pure {
            dims: psi.dims().to_vec(),
            amplitudes: psi.amplitudes().iter().map(|c| (c.re, c.im)).collect(),
        }
    }

    pub fn from_density(rho: &DensityOperator) -> Self {
        let m = rho.matrix();
        StateSpec::Mixed {
            dims: rho.dims().to_vec(),
            matrix: (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| (m[(i, j)].re, m[(i, j)].im)).collect())
                .collect(),
        }
    }

    /// Validated density operator for this spec.
    pub fn to_density(&self) -> Result<DensityOperator> {
        match self {
            StateSpec::Pure { dims, amplitudes } => {
                let amps = DVector::from_iterator(
                    amplitudes.len(),
                    amplitudes.iter().map(|&(re, im)| C64::new(re, im)),
                );
                Ok(Ket::new(amps, dims.clone())?.density())
            }
            StateSpec::Mixed { dims, matrix } => {
                let n = matrix.len();
                let mut m = DMatrix::zeros(n, n);
                for (i, row) in matrix.iter().enumerate() {
                    if row.len() != n {
                        return Err(Error::NotSquare {
                            rows: n,
                            cols: row.len(),
                        });
                    }
                    for (j, &(re, im)) in row.iter().enumerate() {
                        m[(i, j)] = C64::new(re, im);
                    }
                }
                DensityOperator::new(m, dims.clone())
            }
            StateSpec::Builtin { name } => builtin_state(name),
        }
    }

    /// Ket form, when the spec describes a pure state.
    pub fn to_ket(&self) -> Result<Option<Ket>> {
        match self {
            StateSpec::Pure { dims, amplitudes } => {
                let amps = DVector::from_iterator(
                    amplitudes.len(),
                    amplitudes.iter().map(|&(re, im)| C64::new(re, im)),
                );
                Ok(Some(Ket::new(amps, dims.clone())?))
            }
            StateSpec::Mixed { .. } => Ok(None),
            StateSpec::Builtin { name } => builtin_ket(name),
        }
    }
}
