//! Python bindings: a `State` wrapper over validated density operators plus
//! the correlation measures and nonbilocal bounds as module functions.

use num_complex::Complex;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use nonbilocal_core::hilbert::{swap_bipartite, CMat, CVec, DensityOperator, Ket};
use nonbilocal_core::measures::OptimizerConfig;
use nonbilocal_core::nonbilocal as nb;
use nonbilocal_core::statespec;
use nonbilocal_core::{measures, schmidt};

fn err(e: nonbilocal_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn config(restarts: usize, seed: u64) -> PyResult<OptimizerConfig> {
    let cfg = OptimizerConfig::default()
        .with_restarts(restarts)
        .with_seed(seed);
    cfg.validate().map_err(err)?;
    Ok(cfg)
}

/// Validated quantum state over a tensor factorization. Pure construction
/// keeps the ket so Schmidt-based operations stay available.
#[pyclass(from_py_object)]
#[derive(Clone)]
struct State {
    rho: DensityOperator,
    ket: Option<Ket>,
}

impl State {
    fn require_ket(&self) -> PyResult<&Ket> {
        self.ket
            .as_ref()
            .ok_or_else(|| PyValueError::new_err("state was not constructed as pure"))
    }
}

#[pymethods]
impl State {
    /// Mixed state from a row-major complex matrix.
    #[staticmethod]
    fn from_matrix(matrix: Vec<Vec<Complex<f64>>>, dims: Vec<usize>) -> PyResult<Self> {
        let n = matrix.len();
        let mut m = CMat::zeros(n, n);
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(PyValueError::new_err(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &c) in row.iter().enumerate() {
                m[(i, j)] = c;
            }
        }
        Ok(Self {
            rho: DensityOperator::new(m, dims).map_err(err)?,
            ket: None,
        })
    }

    /// Pure state from an amplitude vector.
    #[staticmethod]
    fn from_pure(amplitudes: Vec<Complex<f64>>, dims: Vec<usize>) -> PyResult<Self> {
        let amps = CVec::from_iterator(amplitudes.len(), amplitudes.into_iter());
        let ket = Ket::new(amps, dims).map_err(err)?;
        Ok(Self {
            rho: ket.density(),
            ket: Some(ket),
        })
    }

    /// Named builtin state.
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        Ok(Self {
            rho: statespec::builtin_state(name).map_err(err)?,
            ket: statespec::builtin_ket(name).map_err(err)?,
        })
    }

    fn tensor(&self, other: &State) -> PyResult<Self> {
        Ok(Self {
            rho: nonbilocal_core::tensor(&self.rho, &other.rho).map_err(err)?,
            ket: match (&self.ket, &other.ket) {
                (Some(a), Some(b)) => Some(a.tensor(b)),
                _ => None,
            },
        })
    }

    /// Keeps the listed subsystem factors, tracing out the rest.
    fn partial_trace(&self, keep: Vec<usize>) -> PyResult<Self> {
        Ok(Self {
            rho: nonbilocal_core::partial_trace(&self.rho, &keep).map_err(err)?,
            ket: None,
        })
    }

    /// Swaps the two factors of a bipartite state.
    fn swap(&self) -> PyResult<Self> {
        Ok(Self {
            rho: swap_bipartite(&self.rho).map_err(err)?,
            ket: None,
        })
    }

    fn matrix(&self) -> Vec<Vec<Complex<f64>>> {
        let m = self.rho.matrix();
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
            .collect()
    }

    fn dims(&self) -> Vec<usize> {
        self.rho.dims().to_vec()
    }

    fn purity(&self) -> f64 {
        self.rho.purity()
    }

    fn is_pure(&self) -> bool {
        self.ket.is_some()
    }

    fn __repr__(&self) -> String {
        format!(
            "State(dims={:?}, purity={:.6})",
            self.rho.dims(),
            self.rho.purity()
        )
    }
}

#[pyfunction]
fn affinity(a: &State, b: &State) -> PyResult<f64> {
    nonbilocal_core::affinity(&a.rho, &b.rho).map_err(err)
}

#[pyfunction]
fn schmidt_coefficients(state: &State) -> PyResult<Vec<f64>> {
    Ok(schmidt(state.require_ket()?).map_err(err)?.coefficients)
}

#[pyfunction]
#[pyo3(signature = (state, restarts=64, seed=0))]
fn hs_min(state: &State, restarts: usize, seed: u64) -> PyResult<f64> {
    Ok(measures::hs_min(&state.rho, &config(restarts, seed)?)
        .map_err(err)?
        .value)
}

#[pyfunction]
#[pyo3(signature = (state, restarts=64, seed=0))]
fn geometric_discord(state: &State, restarts: usize, seed: u64) -> PyResult<f64> {
    Ok(measures::geometric_discord(&state.rho, &config(restarts, seed)?)
        .map_err(err)?
        .value)
}

#[pyfunction]
#[pyo3(signature = (state, restarts=64, seed=0))]
fn affinity_min(state: &State, restarts: usize, seed: u64) -> PyResult<f64> {
    Ok(measures::affinity_min(&state.rho, &config(restarts, seed)?)
        .map_err(err)?
        .value)
}

#[pyfunction]
#[pyo3(signature = (state_ab, state_cd, restarts=64, seed=0))]
fn nonbilocal(state_ab: &State, state_cd: &State, restarts: usize, seed: u64) -> PyResult<f64> {
    let input = nb::BilocalInput::new(state_ab.rho.clone(), state_cd.rho.clone()).map_err(err)?;
    Ok(nb::nonbilocal(&input, &config(restarts, seed)?)
        .map_err(err)?
        .value)
}

#[pyfunction]
fn nonbilocal_pure(state_ab: &State, state_cd: &State) -> PyResult<f64> {
    nb::nonbilocal_pure(state_ab.require_ket()?, state_cd.require_ket()?).map_err(err)
}

#[pyfunction]
fn bound_thm3(state_ab: &State, state_cd: &State) -> PyResult<f64> {
    let input = nb::BilocalInput::new(state_ab.rho.clone(), state_cd.rho.clone()).map_err(err)?;
    nb::bound_thm3(&input).map_err(err)
}

#[pyfunction]
fn bound_thm4(state_ab: &State, state_cd: &State) -> PyResult<f64> {
    let input = nb::BilocalInput::new(state_ab.rho.clone(), state_cd.rho.clone()).map_err(err)?;
    nb::bound_thm4(&input).map_err(err)
}

#[pymodule]
fn nonbilocal_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<State>()?;
    m.add_function(wrap_pyfunction!(affinity, m)?)?;
    m.add_function(wrap_pyfunction!(schmidt_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(hs_min, m)?)?;
    m.add_function(wrap_pyfunction!(geometric_discord, m)?)?;
    m.add_function(wrap_pyfunction!(affinity_min, m)?)?;
    m.add_function(wrap_pyfunction!(nonbilocal, m)?)?;
    m.add_function(wrap_pyfunction!(nonbilocal_pure, m)?)?;
    m.add_function(wrap_pyfunction!(bound_thm3, m)?)?;
    m.add_function(wrap_pyfunction!(bound_thm4, m)?)?;
    Ok(())
}
