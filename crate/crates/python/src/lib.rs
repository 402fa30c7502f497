//! Python module `pygamma6`.

use gamma6::cxhyp::{HeisenbergCoord, ProjPoint};
use gamma6::group::{self, CheckStatus, DirichletLocation, GroupElem};
use gamma6::limitset::{self, CloudGenerators};
use gamma6::linkcalc;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn err(e: gamma6::Error) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

/// An element of PU(2,1) in canonical form.
#[pyclass(name = "GroupElem", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGroupElem(GroupElem);

#[pymethods]
impl PyGroupElem {
    /// Evaluates a word in `S`, `T`, `A`, `B`, `U`, `V` (lowercase for inverses).
    #[new]
    fn new(word: &str) -> Self {
        PyGroupElem(group::eval_str(word))
    }

    fn key(&self) -> String {
        self.0.key().to_string()
    }

    fn digest(&self) -> String {
        self.0.digest()
    }

    fn is_identity(&self) -> bool {
        self.0.is_identity()
    }

    fn inverse(&self) -> Self {
        PyGroupElem(self.0.inverse())
    }

    fn __mul__(&self, other: &PyGroupElem) -> Self {
        PyGroupElem(self.0.mul(&other.0))
    }

    fn __eq__(&self, other: &PyGroupElem) -> bool {
        self.0.key() == other.0.key()
    }

    fn __hash__(&self) -> u64 {
        u64::from_str_radix(&self.0.digest()[..16], 16).unwrap_or(0)
    }
}

/// Runs every exact identity check; returns `(name, status)` pairs.
#[pyfunction]
fn verify() -> Vec<(String, String)> {
    limitset::verify_all(group::Constants::get())
        .checks
        .into_iter()
        .map(|c| {
            let status = match c.status {
                CheckStatus::Pass => "pass",
                CheckStatus::Fail => "fail",
                CheckStatus::Resolved => "resolved",
            };
            (c.name, status.to_string())
        })
        .collect()
}

fn generator_set(name: &str) -> PyResult<Vec<GroupElem>> {
    match name {
        "ab" => Ok(vec![group::eval_str("A"), group::eval_str("B")]),
        "st" => Ok(vec![group::eval_str("S"), group::eval_str("T")]),
        "gamma-prime" => Ok(group::gamma_prime_generators()),
        _ => Err(PyValueError::new_err(format!("unknown generators {name:?}"))),
    }
}

/// Distinct elements of word length at most `n`, for `n = 0..=max_len`.
#[pyfunction]
#[pyo3(signature = (generators = "gamma-prime", max_len = 4))]
fn orbit_counts(generators: &str, max_len: usize) -> PyResult<Vec<usize>> {
    let orbit = group::orbit_bfs(&generator_set(generators)?, max_len);
    Ok((0..=max_len).map(|n| orbit.count_up_to(n)).collect())
}

/// Limit-set cloud as `(re_z, im_z, t, word_length)`; points at infinity are dropped.
#[pyfunction]
#[pyo3(signature = (depth = 2, samples = 128, generators = "ab"))]
fn cloud(depth: usize, samples: usize, generators: &str) -> PyResult<Vec<(f64, f64, f64, usize)>> {
    let gens = match generators {
        "ab" => CloudGenerators::AB,
        "st" => CloudGenerators::ST,
        _ => return Err(PyValueError::new_err(format!("unknown generators {generators:?}"))),
    };
    let pts = limitset::cloud(depth, samples, gens).map_err(err)?;
    Ok(pts
        .into_iter()
        .filter_map(|p| match p.heis {
            HeisenbergCoord::Finite { z, t } => Some((z.re, z.im, t, p.word_length)),
            HeisenbergCoord::Infinity => None,
        })
        .collect())
}

/// Planar lemniscate points and its refined double point `(x, y, gap)`.
#[pyfunction]
#[pyo3(signature = (samples = 4096))]
fn lemniscate(samples: usize) -> PyResult<(Vec<(f64, f64)>, (f64, f64, f64), bool)> {
    let l = limitset::lemniscate(samples).map_err(err)?;
    let pts = l.points.iter().map(|z| (z.re, z.im)).collect();
    let d = &l.double_point;
    let cert = &l.certificate;
    Ok((pts, (d.z[0], d.z[1], d.gap), cert.two_real_points && cert.common_ccircle))
}

/// Linking numbers `(pair, integer, residual)` for the certified curve pairs.
#[pyfunction]
#[pyo3(signature = (samples = 2048))]
fn linking(samples: usize) -> PyResult<Vec<(String, i64, f64)>> {
    let mut reports = linkcalc::verify_hopf_triple(samples).map_err(err)?;
    reports.extend(linkcalc::verify_v_axes(samples).map_err(err)?);
    Ok(reports.into_iter().map(|r| (r.pair, r.integer, r.residual)).collect())
}

/// Coordinates of `p_V` in the `R₀` basis, as exact strings.
#[pyfunction]
fn decompose_pv() -> PyResult<Vec<String>> {
    Ok(limitset::decompose_pv().map_err(err)?.iter().map(|c| c.to_string()).collect())
}

/// Locates `word · p_U` relative to the Dirichlet domain: `(location, faces)`.
#[pyfunction]
fn dirichlet(word: &str) -> PyResult<(String, Vec<String>)> {
    let k = group::Constants::get();
    let p = ProjPoint::new(group::eval_str(word).apply(&k.p_u)).map_err(err)?;
    Ok(match group::dirichlet_contains(&p).map_err(err)? {
        DirichletLocation::Inside => ("inside".into(), Vec::new()),
        DirichletLocation::OnFace(f) => ("on-face".into(), f.iter().map(|f| f.to_string()).collect()),
        DirichletLocation::Outside(f) => ("outside".into(), f.iter().map(|f| f.to_string()).collect()),
    })
}

#[pymodule]
fn pygamma6(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGroupElem>()?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(orbit_counts, m)?)?;
    m.add_function(wrap_pyfunction!(cloud, m)?)?;
    m.add_function(wrap_pyfunction!(lemniscate, m)?)?;
    m.add_function(wrap_pyfunction!(linking, m)?)?;
    m.add_function(wrap_pyfunction!(decompose_pv, m)?)?;
    m.add_function(wrap_pyfunction!(dirichlet, m)?)?;
    Ok(())
}
