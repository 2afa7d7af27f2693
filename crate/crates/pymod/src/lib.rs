//! Python bindings: thin wrappers over the core library. Rationals cross the
//! boundary as `"p/q"` strings; counts as Python ints.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use minbal::enumerate::EnumerationMode;
use minbal::model::Collection;
use minbal::weights::LambdaStore;

fn core_err(e: minbal::Error) -> PyErr {
    match e {
        minbal::Error::InvalidInput(_) | minbal::Error::PlayerMismatch { .. } => {
            PyValueError::new_err(e.to_string())
        }
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn collection_from(n: usize, sets: Vec<Vec<usize>>) -> PyResult<Collection> {
    Collection::from_member_lists(n, &sets).map_err(core_err)
}

/// Number of minimal balanced collections of m subsets of an n-player set.
#[pyfunction]
fn count_b(n: usize, m: usize) -> PyResult<num_bigint::BigInt> {
    let mut store = LambdaStore::in_memory();
    minbal::counting::count_b(n, m, &mut store).map_err(core_err)
}

/// Per-size counts and total, as {"n": …, "per_m": […], "total": …}.
#[pyfunction]
fn count_table(py: Python<'_>, n: usize) -> PyResult<Bound<'_, PyDict>> {
    let mut store = LambdaStore::in_memory();
    let table = minbal::counting::count_b_total(n, &mut store).map_err(core_err)?;
    let dict = PyDict::new(py);
    dict.set_item("n", table.n)?;
    dict.set_item("per_m", PyList::new(py, &table.per_m)?)?;
    dict.set_item("total", table.total)?;
    Ok(dict)
}

/// Published closed form for m ≤ 4.
#[pyfunction]
fn closed_form(n: usize, m: usize) -> PyResult<num_bigint::BigInt> {
    minbal::counting::closed_form(n, m).map_err(core_err)
}

/// All minimal balanced collections on n players, as
/// [{"sets": [[…]], "weights": ["p/q", …]}, …] sorted canonically.
#[pyfunction]
#[pyo3(signature = (n, mode = "search"))]
fn enumerate_minimal<'py>(py: Python<'py>, n: usize, mode: &str) -> PyResult<Bound<'py, PyList>> {
    let mode = match mode {
        "search" => EnumerationMode::Search,
        "lambda-route" => EnumerationMode::LambdaRoute,
        other => return Err(PyValueError::new_err(format!("unknown mode {other:?}"))),
    };
    let result = minbal::enumerate::enumerate_minimal(n, mode).map_err(core_err)?;
    let list = PyList::empty(py);
    for (c, w) in result.items() {
        let entry = PyDict::new(py);
        entry.set_item(
            "sets",
            c.coalitions().map(|co| co.members()).collect::<Vec<_>>(),
        )?;
        entry.set_item(
            "weights",
            w.coords().iter().map(|r| r.to_string()).collect::<Vec<_>>(),
        )?;
        list.append(entry)?;
    }
    Ok(list)
}

/// Does the collection admit strictly positive weights summing to one on
/// every player?
#[pyfunction]
fn is_balanced(n: usize, sets: Vec<Vec<usize>>) -> PyResult<bool> {
    Ok(minbal::model::is_balanced(&collection_from(n, sets)?))
}

/// Nonnegative witness weights, or None.
#[pyfunction]
fn weakly_balanced_weights(n: usize, sets: Vec<Vec<usize>>) -> PyResult<Option<Vec<String>>> {
    let c = collection_from(n, sets)?;
    Ok(minbal::model::is_weakly_balanced(&c)
        .map(|w| w.coords().iter().map(|r| r.to_string()).collect()))
}

/// Full classification: {"kind": …, "weights": […]?, "witness": [[…]]?}.
#[pyfunction]
fn minimality_certificate<'py>(
    py: Python<'py>,
    n: usize,
    sets: Vec<Vec<usize>>,
) -> PyResult<Bound<'py, PyDict>> {
    let c = collection_from(n, sets)?;
    let cert = minbal::model::minimality_certificate(&c);
    let dict = PyDict::new(py);
    let kind = match cert.kind {
        minbal::model::CertificateKind::NotWeaklyBalanced => "not-weakly-balanced",
        minbal::model::CertificateKind::WeaklyBalanced => "weakly-balanced",
        minbal::model::CertificateKind::Balanced => "balanced",
        minbal::model::CertificateKind::MinimalBalanced => "minimal-balanced",
    };
    dict.set_item("kind", kind)?;
    if let Some(w) = &cert.weights {
        dict.set_item(
            "weights",
            w.coords().iter().map(|r| r.to_string()).collect::<Vec<_>>(),
        )?;
    }
    if let Some(witness) = &cert.witness {
        dict.set_item(
            "witness",
            witness
                .coalitions()
                .map(|co| co.members())
                .collect::<Vec<_>>(),
        )?;
    }
    Ok(dict)
}

/// Weight classes of Λ_m as [(["p/q", …], multiplicity), …].
#[pyfunction]
fn lambda_classes(m: usize) -> PyResult<Vec<(Vec<String>, u64)>> {
    let mut store = LambdaStore::in_memory();
    let set = store.get(m).map_err(core_err)?;
    Ok(set
        .classes()
        .iter()
        .map(|c| {
            (
                c.canonical().iter().map(|r| r.to_string()).collect(),
                c.multiplicity(),
            )
        })
        .collect())
}

/// Core nonemptiness for worths indexed by coalition mask ("p/q" strings,
/// index 0 must be "0"). Returns {"nonempty": …} plus one certificate.
#[pyfunction]
fn core_nonempty<'py>(py: Python<'py>, n: usize, v: Vec<String>) -> PyResult<Bound<'py, PyDict>> {
    let worths = v
        .iter()
        .map(|s| minbal::exact::rational_from_str(s))
        .collect::<minbal::Result<Vec<_>>>()
        .map_err(core_err)?;
    let game = minbal::games::TUGame::new(n, worths).map_err(core_err)?;
    let report = minbal::games::core_nonempty_lp(&game).map_err(core_err)?;
    let dict = PyDict::new(py);
    dict.set_item("nonempty", report.nonempty)?;
    if let Some(a) = &report.allocation {
        dict.set_item(
            "allocation",
            a.payoffs.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
        )?;
    }
    if let Some(vf) = &report.violating {
        let fam = PyDict::new(py);
        fam.set_item(
            "sets",
            vf.collection
                .coalitions()
                .map(|co| co.members())
                .collect::<Vec<_>>(),
        )?;
        fam.set_item(
            "weights",
            vf.weights
                .coords()
                .iter()
                .map(|r| r.to_string())
                .collect::<Vec<_>>(),
        )?;
        dict.set_item("violating", fam)?;
    }
    Ok(dict)
}

/// Orbit of a matrix under column inversions:
/// {"size_nonzero": …, "size_positive": …, "unificator_count": …}.
#[pyfunction]
fn orbit_summary<'py>(
    py: Python<'py>,
    n: usize,
    columns: Vec<Vec<usize>>,
) -> PyResult<Bound<'py, PyDict>> {
    let masks = columns
        .iter()
        .map(|members| {
            let mut mask = 0u32;
            for &p in members {
                if p == 0 || p > n {
                    return Err(PyValueError::new_err(format!("player {p} out of range")));
                }
                mask |= 1 << (p - 1);
            }
            Ok(mask)
        })
        .collect::<PyResult<Vec<_>>>()?;
    let matrix = minbal::model::ZeroOneMatrix::new(n, masks).map_err(core_err)?;
    let summary = minbal::orbits::orbit_summary(&matrix, false).map_err(core_err)?;
    let dict = PyDict::new(py);
    dict.set_item("size_nonzero", summary.size_nonzero)?;
    dict.set_item("size_positive", summary.size_positive)?;
    dict.set_item("unificator_count", summary.unificator_count)?;
    Ok(dict)
}

/// Census of two-element minimal balanced collections.
#[pyfunction]
fn two_element_census(py: Python<'_>, n: usize) -> PyResult<Bound<'_, PyDict>> {
    let census = minbal::enumerate::enumerate_two_element(n).map_err(core_err)?;
    let dict = PyDict::new(py);
    dict.set_item("total", census.total)?;
    let shapes = PyDict::new(py);
    for (shape, count) in &census.by_shape {
        shapes.set_item(shape, count)?;
    }
    dict.set_item("by_shape", shapes)?;
    Ok(dict)
}

/// Partial product converging to the lower-bound constant, as "p/q".
#[pyfunction]
fn alpha_constant(terms: usize) -> String {
    minbal::counting::alpha_constant(terms).to_string()
}

#[pyfunction]
fn version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

#[pymodule]
fn minbal_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(count_b, m)?)?;
    m.add_function(wrap_pyfunction!(count_table, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_minimal, m)?)?;
    m.add_function(wrap_pyfunction!(is_balanced, m)?)?;
    m.add_function(wrap_pyfunction!(weakly_balanced_weights, m)?)?;
    m.add_function(wrap_pyfunction!(minimality_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_classes, m)?)?;
    m.add_function(wrap_pyfunction!(core_nonempty, m)?)?;
    m.add_function(wrap_pyfunction!(orbit_summary, m)?)?;
    m.add_function(wrap_pyfunction!(two_element_census, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_constant, m)?)?;
    m.add_function(wrap_pyfunction!(version, m)?)?;
    Ok(())
}
