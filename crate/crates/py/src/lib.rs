//! Python bindings for `fibrank`.

use num_bigint::BigUint;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use fibrank::lcmkit::{self, RunSpec};
use fibrank::orderprod::{self, DEFAULT_ORACLE_BUDGET};
use fibrank::{fibstruct, valuation, Error, Family};

create_exception!(pyfibrank, BudgetExceeded, PyRuntimeError);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::BudgetExceeded { .. } => BudgetExceeded::new_err(e.to_string()),
        Error::Internal(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn family(name: &str) -> PyResult<Family> {
    name.parse().map_err(to_py)
}

/// A product `F_n ... F_{n+k}` or `L_n ... L_{n+k}`.
#[pyclass(name = "ProductSpec", frozen, eq, hash, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PyProductSpec {
    inner: orderprod::ProductSpec,
}

#[pymethods]
impl PyProductSpec {
    #[new]
    fn new(family_name: &str, n: u64, k: u32) -> PyResult<Self> {
        Ok(PyProductSpec { inner: orderprod::ProductSpec::new(family(family_name)?, n, k) })
    }

    #[getter]
    fn family(&self) -> &'static str {
        self.inner.family.short_name()
    }

    #[getter]
    fn n(&self) -> u64 {
        self.inner.n
    }

    #[getter]
    fn k(&self) -> u32 {
        self.inner.k
    }

    /// The product itself.
    fn product(&self) -> BigUint {
        self.inner.product()
    }

    fn z_closed(&self) -> PyResult<PyZResult> {
        orderprod::z_product_closed(self.inner).map(PyZResult::from).map_err(to_py)
    }

    fn z_general(&self) -> PyResult<PyZResult> {
        orderprod::z_product_general(self.inner).map(PyZResult::from).map_err(to_py)
    }

    #[pyo3(signature = (budget = DEFAULT_ORACLE_BUDGET))]
    fn z_oracle(&self, budget: u64) -> PyResult<PyZResult> {
        orderprod::z_product_oracle(self.inner, budget).map(PyZResult::from).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("ProductSpec({:?}, {}, {})", self.family(), self.inner.n, self.inner.k)
    }
}

/// `z = a * j * c`, with the route that produced it.
#[pyclass(name = "ZResult", frozen, get_all)]
pub struct PyZResult {
    z: BigUint,
    base_a: BigUint,
    multiplier_j: BigUint,
    extra_c: u64,
    route: &'static str,
    residue_case: Option<String>,
    row_label: Option<String>,
}

impl From<orderprod::ZResult> for PyZResult {
    fn from(r: orderprod::ZResult) -> Self {
        PyZResult {
            z: r.z,
            base_a: r.base_a,
            multiplier_j: r.multiplier_j,
            extra_c: r.extra_c,
            route: r.route.name(),
            residue_case: r.residue_case,
            row_label: r.row_label,
        }
    }
}

#[pymethods]
impl PyZResult {
    fn __repr__(&self) -> String {
        format!(
            "ZResult(z={}, a={}, j={}, c={}, route={:?})",
            self.z, self.base_a, self.multiplier_j, self.extra_c, self.route
        )
    }
}

#[pyfunction]
fn fib(n: u64) -> BigUint {
    fibrank::fib(n)
}

#[pyfunction]
fn lucas(n: u64) -> BigUint {
    fibrank::lucas(n)
}

/// Smallest `k >= 1` with `m | F_k`.
#[pyfunction]
#[pyo3(signature = (m, budget = None))]
fn z_oracle(m: BigUint, budget: Option<u64>) -> PyResult<u64> {
    fibstruct::z_oracle_budgeted(&m, budget).map_err(to_py)
}

/// `(v_p(F_n), branch label)`.
#[pyfunction]
fn vp_fib(p: u64, n: BigUint) -> PyResult<(u64, &'static str)> {
    let r = valuation::vp_fib(p, &n).map_err(to_py)?;
    Ok((r.order, r.branch.label()))
}

/// `(v_p(L_n), branch label)`.
#[pyfunction]
fn vp_lucas(p: u64, n: BigUint) -> PyResult<(u64, &'static str)> {
    let r = valuation::vp_lucas(p, &n).map_err(to_py)?;
    Ok((r.order, r.branch.label()))
}

/// `[n, ..., n+k]`.
#[pyfunction]
fn lcm_run(n: u64, k: u32) -> BigUint {
    lcmkit::lcm_run(RunSpec::new(n, k))
}

/// `[F_n, ..., F_{n+k}]` or `[L_n, ..., L_{n+k}]`.
#[pyfunction]
fn lcm_seq_run(family_name: &str, n: u64, k: u32) -> PyResult<BigUint> {
    let d = lcmkit::decompose_run(RunSpec::new(n, k), family(family_name)?).map_err(to_py)?;
    Ok(d.lcm)
}

#[pyfunction]
fn corollary_plain_form(n: u64) -> PyResult<BigUint> {
    orderprod::corollary_plain_form(n).map_err(to_py)
}

#[pymodule]
fn pyfibrank(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProductSpec>()?;
    m.add_class::<PyZResult>()?;
    m.add("BudgetExceeded", m.py().get_type::<BudgetExceeded>())?;
    m.add("DEFAULT_ORACLE_BUDGET", DEFAULT_ORACLE_BUDGET)?;
    m.add_function(wrap_pyfunction!(fib, m)?)?;
    m.add_function(wrap_pyfunction!(lucas, m)?)?;
    m.add_function(wrap_pyfunction!(z_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(vp_fib, m)?)?;
    m.add_function(wrap_pyfunction!(vp_lucas, m)?)?;
    m.add_function(wrap_pyfunction!(lcm_run, m)?)?;
    m.add_function(wrap_pyfunction!(lcm_seq_run, m)?)?;
    m.add_function(wrap_pyfunction!(corollary_plain_form, m)?)?;
    Ok(())
}
