//! Python bindings. Structured results come back as plain dicts built from
//! the same JSON encoding the command-line tool writes.

use std::sync::Arc;

use goodlattice::characters::{self, CharacterGroup};
use goodlattice::contfrac::{self, ContinuedFraction as CoreCf};
use goodlattice::error::Error;
use goodlattice::lattice::{self, BoxMode, LatticePointSet as CoreSet};
use goodlattice::modmath::{self, PrimeContext as CoreCtx, SubgroupCoset as CoreCoset};
use goodlattice::theorems;
use num_rational::Ratio;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyAny;
use serde::Serialize;

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn parse_ratio(text: &str) -> PyResult<Ratio<i64>> {
    let bad = || PyValueError::new_err(format!("expected a fraction like \"1/3\", got {text:?}"));
    let (n, d) = text.split_once('/').unwrap_or((text, "1"));
    let n: i64 = n.trim().parse().map_err(|_| bad())?;
    let d: i64 = d.trim().parse().map_err(|_| bad())?;
    if d == 0 {
        return Err(bad());
    }
    Ok(Ratio::new(n, d))
}

#[pyclass(frozen, name = "PrimeContext")]
struct PyPrimeContext(Arc<CoreCtx>);

#[pymethods]
impl PyPrimeContext {
    #[new]
    #[pyo3(signature = (p, limit = modmath::DEFAULT_DLOG_LIMIT))]
    fn new(p: u64, limit: u64) -> PyResult<Self> {
        Ok(Self(Arc::new(CoreCtx::with_limit(p, limit).map_err(err)?)))
    }

    #[getter]
    fn p(&self) -> u64 {
        self.0.p()
    }

    #[getter]
    fn generator(&self) -> u64 {
        self.0.generator()
    }

    fn dlog(&self, x: i64) -> Option<u32> {
        self.0.dlog(x as i128)
    }

    fn inverse(&self, y: i64) -> PyResult<u64> {
        self.0.mod_inverse(y as i128).map_err(err)
    }

    /// `‖z/p‖` as a `(numerator, p)` pair.
    fn nearest_int_distance(&self, z: i64) -> (u64, u64) {
        let d = self.0.nearest_int_distance(z as i128);
        (d.numerator, d.p)
    }

    fn subgroup(&self, order: u64) -> PyResult<PySubgroupCoset> {
        Ok(PySubgroupCoset(CoreCoset::subgroup(Arc::clone(&self.0), order).map_err(err)?))
    }

    fn __repr__(&self) -> String {
        format!("PrimeContext(p={}, g={})", self.0.p(), self.0.generator())
    }
}

#[pyclass(frozen, name = "SubgroupCoset")]
struct PySubgroupCoset(CoreCoset);

#[pymethods]
impl PySubgroupCoset {
    fn coset(&self, v: i64) -> PyResult<Self> {
        Ok(Self(self.0.coset(v as i128).map_err(err)?))
    }

    #[getter]
    fn p(&self) -> u64 {
        self.0.p()
    }

    #[getter]
    fn order(&self) -> u64 {
        self.0.order()
    }

    #[getter]
    fn index(&self) -> u64 {
        self.0.index()
    }

    #[getter]
    fn representative(&self) -> u64 {
        self.0.representative()
    }

    fn elements(&self) -> Vec<u64> {
        self.0.elements().to_vec()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __contains__(&self, x: u64) -> bool {
        self.0.contains(x)
    }

    /// Share of elements whose partial quotients all stay below `threshold`.
    fn omega_fraction(&self, py: Python<'_>, threshold: f64) -> PyResult<Py<PyAny>> {
        to_py(py, &theorems::omega_fraction(&self.0, threshold))
    }

    fn search(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &theorems::theorem2_search(&self.0).map_err(err)?)
    }

    #[pyo3(signature = (exact_limit = None))]
    fn report(&self, py: Python<'_>, exact_limit: Option<u64>) -> PyResult<Py<PyAny>> {
        to_py(py, &theorems::theorem_report(&self.0, exact_limit).map_err(err)?)
    }

    fn __repr__(&self) -> String {
        format!(
            "SubgroupCoset(p={}, order={}, coset={})",
            self.0.p(),
            self.0.order(),
            self.0.representative()
        )
    }
}

#[pyclass(frozen, name = "ContinuedFraction")]
struct PyContinuedFraction(CoreCf);

#[pymethods]
impl PyContinuedFraction {
    #[new]
    fn new(a: u64, p: u64) -> PyResult<Self> {
        Ok(Self(contfrac::expand(a, p).map_err(err)?))
    }

    #[getter]
    fn quotients(&self) -> Vec<u64> {
        self.0.quotients().to_vec()
    }

    #[getter]
    fn convergents(&self) -> Vec<(u64, u64)> {
        self.0.convergents().to_vec()
    }

    fn convergent(&self, n: usize) -> Option<(u64, u64)> {
        self.0.convergent(n)
    }

    fn sum_quotients(&self) -> u64 {
        self.0.sum_quotients()
    }

    fn max_quotient(&self) -> u64 {
        self.0.max_quotient()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        let q: Vec<String> = self.0.quotients().iter().map(u64::to_string).collect();
        format!("{}/{} = [0; {}]", self.0.numerator(), self.0.denominator(), q.join(", "))
    }
}

#[pyclass(frozen, name = "LatticePointSet")]
struct PyLatticePointSet(CoreSet);

#[pymethods]
impl PyLatticePointSet {
    #[new]
    fn new(p: u64, a: u64) -> PyResult<Self> {
        Ok(Self(CoreSet::new(p, a).map_err(err)?))
    }

    fn points(&self) -> Vec<(u64, u64)> {
        self.0.points().collect()
    }

    /// Points in `[0, γ1] × [0, γ2]` (or the open box); corners as "n/d" strings.
    #[pyo3(signature = (gamma1, gamma2, closed = true))]
    fn count_box(&self, gamma1: &str, gamma2: &str, closed: bool) -> PyResult<u64> {
        let mode = if closed { BoxMode::Closed } else { BoxMode::Open };
        self.0
            .count_box(parse_ratio(gamma1)?, parse_ratio(gamma2)?, mode)
            .map_err(err)
    }

    #[pyo3(signature = (limit = lattice::DEFAULT_EXACT_LIMIT))]
    fn discrepancy(&self, py: Python<'_>, limit: u64) -> PyResult<Py<PyAny>> {
        to_py(py, &lattice::discrepancy_exact_with_limit(&self.0, limit).map_err(err)?)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

#[pyfunction]
fn is_prime(n: u64) -> bool {
    modmath::is_prime(n)
}

#[pyfunction]
fn discrepancy_bound(a: u64, p: u64) -> PyResult<u64> {
    Ok(lattice::discrepancy_bound(&contfrac::expand(a, p).map_err(err)?))
}

#[pyfunction]
fn rectangle_family(py: Python<'_>, p: u64, c: f64) -> PyResult<Py<PyAny>> {
    to_py(py, &characters::build_pi(p, c).map_err(err)?)
}

/// `Σ_{x=1}^{n} χ_j(x)` as a complex number.
#[pyfunction]
fn interval_sum(ctx: &PyPrimeContext, j: u64, n: u64) -> PyResult<num_complex::Complex64> {
    let chi = CharacterGroup::new(Arc::clone(&ctx.0)).character(j).map_err(err)?;
    Ok(chi.interval_sum(n))
}

#[pyfunction]
fn lemma1_sum(ctx: &PyPrimeContext, j: u64, c: f64) -> PyResult<num_complex::Complex64> {
    let chi = CharacterGroup::new(Arc::clone(&ctx.0)).character(j).map_err(err)?;
    let fam = characters::build_pi(ctx.0.p(), c).map_err(err)?;
    characters::lemma1_sum(&fam, &chi).map_err(err)
}

#[pyfunction]
fn burgess_bound(p: u64, n: u64, r: u32) -> f64 {
    characters::burgess_bound(p, n, r)
}

#[pyfunction]
fn s_count(p: u64, a: u64, t: f64) -> PyResult<u64> {
    characters::s_count(p, a, t).map_err(err)
}

#[pyfunction]
fn f_a(p: u64, a: u64, x: u64) -> PyResult<u64> {
    theorems::f_a(p, a, x).map_err(err)
}

#[pyfunction]
fn s_a(p: u64, a: u64) -> PyResult<u64> {
    theorems::s_a(p, a).map_err(err)
}

#[pyfunction]
fn corollary_check(py: Python<'_>, p: u64, a: u64) -> PyResult<Py<PyAny>> {
    to_py(py, &theorems::corollary_check(p, a, lattice::DEFAULT_EXACT_LIMIT).map_err(err)?)
}

#[pymodule]
#[pyo3(name = "goodlattice")]
fn goodlattice_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPrimeContext>()?;
    m.add_class::<PySubgroupCoset>()?;
    m.add_class::<PyContinuedFraction>()?;
    m.add_class::<PyLatticePointSet>()?;
    m.add_function(wrap_pyfunction!(is_prime, m)?)?;
    m.add_function(wrap_pyfunction!(discrepancy_bound, m)?)?;
    m.add_function(wrap_pyfunction!(rectangle_family, m)?)?;
    m.add_function(wrap_pyfunction!(interval_sum, m)?)?;
    m.add_function(wrap_pyfunction!(lemma1_sum, m)?)?;
    m.add_function(wrap_pyfunction!(burgess_bound, m)?)?;
    m.add_function(wrap_pyfunction!(s_count, m)?)?;
    m.add_function(wrap_pyfunction!(f_a, m)?)?;
    m.add_function(wrap_pyfunction!(s_a, m)?)?;
    m.add_function(wrap_pyfunction!(corollary_check, m)?)?;
    Ok(())
}
