//! Python bindings. Every entry point takes the text of a run config.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use hcurl_ife::analysis::convergence_rates;
use hcurl_ife::assembly::Scheme;
use hcurl_ife::config::RunConfig;
use hcurl_ife::diagnostics::run_diagnostics;
use hcurl_ife::study::{run_interpolation, run_scheme, to_csv, LevelResult};
use hcurl_ife::Error;

/// One refinement level as seen from Python.
#[pyclass(frozen, get_all, skip_from_py_object, module = "hcurl_ife_py")]
#[derive(Clone, Debug, PartialEq)]
pub struct Level {
    pub n: usize,
    pub h: f64,
    pub dofs: usize,
    pub e0: f64,
    pub e1: f64,
    pub solve_residual: f64,
    pub iterations: usize,
}

impl From<&LevelResult> for Level {
    fn from(l: &LevelResult) -> Self {
        Self { n: l.n.0, h: l.report.h, dofs: l.report.dofs, e0: l.report.e0, e1: l.report.e1, solve_residual: l.solve_residual, iterations: l.iterations }
    }
}

#[pymethods]
impl Level {
    fn __repr__(&self) -> String {
        format!("Level(n={}, h={:.4e}, dofs={}, e0={:.4e}, e1={:.4e})", self.n, self.h, self.dofs, self.e0, self.e1)
    }
}

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Config(_) | Error::UnsupportedDegree(_) => PyValueError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn scheme_or_default(cfg: &RunConfig, scheme: Option<&str>) -> hcurl_ife::Result<Scheme> {
    match scheme {
        Some(s) => s.parse(),
        None => Ok(cfg.schemes[0]),
    }
}

/// Errors on every configured mesh size for one scheme.
pub fn study_levels(config: &str, scheme: Option<&str>) -> hcurl_ife::Result<Vec<LevelResult>> {
    let cfg: RunConfig = config.parse()?;
    run_scheme(&cfg, scheme_or_default(&cfg, scheme)?)
}

/// `(passed, report text)`
pub fn diagnose_text(config: &str) -> hcurl_ife::Result<(bool, String)> {
    let cfg: RunConfig = config.parse()?;
    let rep = run_diagnostics(&cfg)?;
    Ok((rep.passed(), rep.to_string()))
}

#[pyfunction]
#[pyo3(signature = (config, scheme=None))]
fn study(py: Python<'_>, config: &str, scheme: Option<&str>) -> PyResult<Vec<Level>> {
    let levels = py.detach(|| study_levels(config, scheme)).map_err(to_py)?;
    Ok(levels.iter().map(Level::from).collect())
}

/// Same table the CLI writes to `errors_<scheme>.csv`.
#[pyfunction]
#[pyo3(signature = (config, scheme=None))]
fn study_csv(py: Python<'_>, config: &str, scheme: Option<&str>) -> PyResult<String> {
    py.detach(|| study_levels(config, scheme).map(|l| to_csv(&l))).map_err(to_py)
}

#[pyfunction]
fn interpolation(py: Python<'_>, config: &str) -> PyResult<Vec<Level>> {
    let levels = py.detach(|| config.parse::<RunConfig>().and_then(|cfg| run_interpolation(&cfg))).map_err(to_py)?;
    Ok(levels.iter().map(Level::from).collect())
}

#[pyfunction]
fn diagnose(py: Python<'_>, config: &str) -> PyResult<(bool, String)> {
    py.detach(|| diagnose_text(config)).map_err(to_py)
}

#[pyfunction]
fn rates(h: Vec<f64>, errors: Vec<f64>) -> PyResult<Vec<f64>> {
    if h.len() != errors.len() {
        return Err(PyValueError::new_err(format!("{} mesh sizes but {} errors", h.len(), errors.len())));
    }
    Ok(convergence_rates(&h.into_iter().zip(errors).collect::<Vec<_>>()))
}

#[pymodule]
fn hcurl_ife_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Level>()?;
    m.add_function(wrap_pyfunction!(study, m)?)?;
    m.add_function(wrap_pyfunction!(study_csv, m)?)?;
    m.add_function(wrap_pyfunction!(interpolation, m)?)?;
    m.add_function(wrap_pyfunction!(diagnose, m)?)?;
    m.add_function(wrap_pyfunction!(rates, m)?)?;
    m.add("SCHEMES", Scheme::ALL.map(|s| s.name()).to_vec())?;
    Ok(())
}
