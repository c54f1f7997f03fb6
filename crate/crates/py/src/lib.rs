//! Python bindings for `mixwidth`.
//!
//! Exponents are passed as strings or numbers (`"inf"`, `2`, `"3/2"`).
//! Structured results come back as plain dicts and lists.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

use mixwidth::norms::{self, BlockShape, Exponent, MixedNormParams};
use mixwidth::sweep::{PartitionChoice, SizeOperator, SweepConfig};
use mixwidth::widths::{self, Tuple, WitnessConfig};
use mixwidth::{designs, partitions, spread, sweep as sweeps};

fn err(e: mixwidth::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn exponent(v: &Bound<'_, PyAny>) -> PyResult<Exponent> {
    let text = v.str()?.to_string();
    text.parse().map_err(err)
}

fn tuple(
    p1: &Bound<'_, PyAny>,
    p2: &Bound<'_, PyAny>,
    q1: &Bound<'_, PyAny>,
    q2: &Bound<'_, PyAny>,
) -> PyResult<Tuple> {
    Ok(Tuple {
        p1: exponent(p1)?,
        p2: exponent(p2)?,
        q1: exponent(q1)?,
        q2: exponent(q2)?,
    })
}

fn choice(name: &str) -> PyResult<PartitionChoice> {
    name.parse().map_err(err)
}

/// Converts through JSON so Python sees the same field names as the CLI.
fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Real matrix of `b` blocks of length `s`, stored block by block.
#[pyclass(name = "BlockMatrix", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyBlockMatrix {
    inner: norms::BlockMatrix,
}

#[pymethods]
impl PyBlockMatrix {
    #[new]
    fn new(s: usize, b: usize, entries: Vec<f64>) -> PyResult<Self> {
        let shape = BlockShape::new(s, b).map_err(err)?;
        Ok(PyBlockMatrix {
            inner: norms::BlockMatrix::new(shape, entries).map_err(err)?,
        })
    }

    /// One list per block.
    #[staticmethod]
    fn from_columns(columns: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(PyBlockMatrix {
            inner: norms::BlockMatrix::from_columns(&columns).map_err(err)?,
        })
    }

    #[staticmethod]
    fn zeros(s: usize, b: usize) -> PyResult<Self> {
        Ok(PyBlockMatrix {
            inner: norms::BlockMatrix::zeros(BlockShape::new(s, b).map_err(err)?),
        })
    }

    #[getter]
    fn s(&self) -> usize {
        self.inner.shape().s
    }

    #[getter]
    fn b(&self) -> usize {
        self.inner.shape().b
    }

    #[getter]
    fn entries(&self) -> Vec<f64> {
        self.inner.entries().to_vec()
    }

    fn get(&self, i: usize, j: usize) -> PyResult<f64> {
        let sh = self.inner.shape();
        if i >= sh.s || j >= sh.b {
            return Err(PyValueError::new_err(format!("({i}, {j}) outside {sh}")));
        }
        Ok(self.inner.get(i, j))
    }

    fn column(&self, j: usize) -> PyResult<Vec<f64>> {
        if j >= self.inner.shape().b {
            return Err(PyValueError::new_err(format!(
                "column {j} outside {}",
                self.inner.shape()
            )));
        }
        Ok(self.inner.column(j).to_vec())
    }

    fn transpose(&self) -> Self {
        PyBlockMatrix {
            inner: self.inner.transpose(),
        }
    }

    fn mixed_norm(&self, q1: &Bound<'_, PyAny>, q2: &Bound<'_, PyAny>) -> PyResult<f64> {
        Ok(norms::mixed_norm(
            &self.inner,
            MixedNormParams::new(exponent(q1)?, exponent(q2)?),
        ))
    }

    fn __repr__(&self) -> String {
        format!("BlockMatrix(s={}, b={})", self.s(), self.b())
    }
}

/// A partition of the `s x b` grid and its spreading operator.
#[pyclass(name = "Partition", frozen)]
struct PyPartition {
    op: spread::SpreadOperator,
}

impl PyPartition {
    fn wrap(p: partitions::Partition) -> PyResult<Self> {
        Ok(PyPartition {
            op: spread::SpreadOperator::new(p).map_err(err)?,
        })
    }
}

#[pymethods]
impl PyPartition {
    #[staticmethod]
    #[pyo3(signature = (s, b, d = 2))]
    fn good(s: usize, b: usize, d: u32) -> PyResult<Self> {
        Self::wrap(partitions::good_partition(s, b, d).map_err(err)?)
    }

    #[staticmethod]
    fn transposition(s: usize) -> PyResult<Self> {
        Self::wrap(spread::transposition_partition(s).map_err(err)?)
    }

    /// Groups from column sets: each set claims the lowest free row in
    /// every column it contains.
    #[staticmethod]
    fn from_sets(sets: Vec<Vec<usize>>, s: usize, b: usize) -> PyResult<Self> {
        Self::wrap(partitions::partition_from_sets(&sets, s, b).map_err(err)?)
    }

    #[getter]
    fn s(&self) -> usize {
        self.op.shape().s
    }

    #[getter]
    fn b(&self) -> usize {
        self.op.shape().b
    }

    #[getter]
    fn m(&self) -> usize {
        self.op.partition().m()
    }

    #[getter]
    fn r(&self) -> usize {
        self.op.partition().r()
    }

    #[getter]
    fn l(&self) -> usize {
        self.op.partition().l()
    }

    #[getter]
    fn groups(&self) -> Vec<Vec<(usize, usize)>> {
        self.op.partition().groups().to_vec()
    }

    fn verify<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &partitions::verify_partition(self.op.partition()))
    }

    /// `D x`: every cell receives the sum of `x` over its group.
    fn spread(&self, x: &PyBlockMatrix) -> PyResult<PyBlockMatrix> {
        Ok(PyBlockMatrix {
            inner: self.op.apply(&x.inner).map_err(err)?,
        })
    }

    fn lemma3_bound(
        &self,
        p: &Bound<'_, PyAny>,
        q1: &Bound<'_, PyAny>,
        q2: &Bound<'_, PyAny>,
    ) -> PyResult<f64> {
        Ok(spread::lemma3_bound(
            self.op.partition(),
            exponent(p)?,
            exponent(q1)?,
            exponent(q2)?,
        ))
    }

    /// `(lhs, rhs, ok)` of the one-column operator bound.
    fn check_lemma3(
        &self,
        p: &Bound<'_, PyAny>,
        q1: &Bound<'_, PyAny>,
        q2: &Bound<'_, PyAny>,
        x: &PyBlockMatrix,
    ) -> PyResult<(f64, f64, bool)> {
        let c = spread::check_lemma3(
            &self.op,
            exponent(p)?,
            exponent(q1)?,
            exponent(q2)?,
            &x.inner,
        )
        .map_err(err)?;
        Ok((c.lhs, c.rhs, c.ok))
    }

    fn __repr__(&self) -> String {
        format!(
            "Partition(s={}, b={}, m={}, r={}, l={})",
            self.s(),
            self.b(),
            self.m(),
            self.r(),
            self.l()
        )
    }
}

#[pyfunction]
fn classify<'py>(
    py: Python<'py>,
    p1: &Bound<'py, PyAny>,
    p2: &Bound<'py, PyAny>,
    q1: &Bound<'py, PyAny>,
    q2: &Bound<'py, PyAny>,
) -> PyResult<Bound<'py, PyAny>> {
    let t = tuple(p1, p2, q1, q2)?;
    let report = widths::classify(t.p1, t.p2, t.q1, t.q2);
    let out = to_py(py, &report)?;
    out.set_item("explanation", report.explanation())?;
    Ok(out)
}

#[pyfunction]
fn lq_norm(values: Vec<f64>, q: &Bound<'_, PyAny>) -> PyResult<f64> {
    norms::lq_norm(&values, exponent(q)?).map_err(err)
}

#[pyfunction]
fn d0_mixed(
    s: usize,
    b: usize,
    p1: &Bound<'_, PyAny>,
    p2: &Bound<'_, PyAny>,
    q1: &Bound<'_, PyAny>,
    q2: &Bound<'_, PyAny>,
) -> PyResult<f64> {
    let t = tuple(p1, p2, q1, q2)?;
    Ok(norms::d0_mixed(
        BlockShape::new(s, b).map_err(err)?,
        t.p1,
        t.p2,
        t.q1,
        t.q2,
    ))
}

/// Seeded points of the `(p1, p2)` unit ball.
#[pyfunction]
#[pyo3(signature = (s, b, p1, p2, count, seed = 0))]
fn sample_ball(
    s: usize,
    b: usize,
    p1: &Bound<'_, PyAny>,
    p2: &Bound<'_, PyAny>,
    count: usize,
    seed: u64,
) -> PyResult<Vec<PyBlockMatrix>> {
    let shape = BlockShape::new(s, b).map_err(err)?;
    Ok(
        norms::sample_ball(shape, exponent(p1)?, exponent(p2)?, seed, count)
            .into_iter()
            .map(|inner| PyBlockMatrix { inner })
            .collect(),
    )
}

/// Affine-line design over `GF(r)^d`, optionally repeated and verified.
#[pyfunction]
#[pyo3(signature = (r, d, repeat = 1, verify = false))]
fn design<'py>(
    py: Python<'py>,
    r: u32,
    d: u32,
    repeat: usize,
    verify: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let des = designs::repeat_design(&designs::affine_line_design(r, d).map_err(err)?, repeat)
        .map_err(err)?;
    let out = to_py(py, &des)?;
    out.set_item("m", des.m())?;
    if verify {
        out.set_item("verification", to_py(py, &designs::verify_design(&des))?)?;
    }
    Ok(out)
}

/// `(error, support)` of the best `k`-term approximation in `l_q`.
#[pyfunction]
fn sigma_k(values: Vec<f64>, k: usize, q: &Bound<'_, PyAny>) -> PyResult<(f64, Vec<usize>)> {
    let r = spread::sigma_k(&values, k, exponent(q)?).map_err(err)?;
    Ok((r.error, r.support))
}

#[pyfunction]
fn choose_params<'py>(
    py: Python<'py>,
    p1: &Bound<'py, PyAny>,
    p2: &Bound<'py, PyAny>,
    q1: &Bound<'py, PyAny>,
    q2: &Bound<'py, PyAny>,
    s: usize,
    b: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let t = tuple(p1, p2, q1, q2)?;
    let p = spread::choose_params(t.p1, t.p2, t.q1, t.q2, s, b).map_err(err)?;
    let out = pyo3::types::PyDict::new(py);
    out.set_item("d", p.d)?;
    out.set_item("k", p.k)?;
    out.set_item("alpha", p.alpha_string())?;
    Ok(out.into_any())
}

/// Runs the pipeline on `x`; returns the result dict and the approximant.
#[pyfunction]
#[pyo3(signature = (x, p1, p2, q1, q2, partition = "good", d = None, k = None))]
#[allow(clippy::too_many_arguments)]
fn approximate<'py>(
    py: Python<'py>,
    x: &PyBlockMatrix,
    p1: &Bound<'py, PyAny>,
    p2: &Bound<'py, PyAny>,
    q1: &Bound<'py, PyAny>,
    q2: &Bound<'py, PyAny>,
    partition: &str,
    d: Option<u32>,
    k: Option<usize>,
) -> PyResult<(Bound<'py, PyAny>, PyBlockMatrix)> {
    let t = tuple(p1, p2, q1, q2)?;
    let sh = x.inner.shape();
    let params = spread::choose_params(t.p1, t.p2, t.q1, t.q2, sh.s, sh.b)
        .and_then(|p| p.with_overrides(d, k))
        .map_err(err)?;
    let op = SizeOperator::build(sh.s, sh.b, params.d, choice(partition)?).map_err(err)?;
    let res = op.run(&x.inner, &params).map_err(err)?;
    let out = to_py(py, &res)?;
    Ok((
        out,
        PyBlockMatrix {
            inner: res.approximant,
        },
    ))
}

/// One dict per size with the columns of the CLI sweep table.
#[pyfunction]
#[pyo3(signature = (p1, p2, q1, q2, sizes, partition = "good", samples = 64, seed = 0, d = None, k = None))]
#[allow(clippy::too_many_arguments)]
fn sweep<'py>(
    py: Python<'py>,
    p1: &Bound<'py, PyAny>,
    p2: &Bound<'py, PyAny>,
    q1: &Bound<'py, PyAny>,
    q2: &Bound<'py, PyAny>,
    sizes: Vec<(usize, usize)>,
    partition: &str,
    samples: usize,
    seed: u64,
    d: Option<u32>,
    k: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let config = SweepConfig {
        tuple: tuple(p1, p2, q1, q2)?,
        sizes,
        partition: choice(partition)?,
        samples,
        seed,
        d,
        k,
    };
    let rows = py.detach(|| sweeps::sweep(&config)).map_err(err)?;
    to_py(py, &rows)
}

#[pyfunction]
fn pietsch_stesin(
    big_n: usize,
    n: usize,
    p: &Bound<'_, PyAny>,
    q: &Bound<'_, PyAny>,
) -> PyResult<f64> {
    widths::pietsch_stesin(big_n, n, exponent(p)?, exponent(q)?).map_err(err)
}

#[pyfunction]
fn b1_l2_width(big_n: usize, n: usize) -> PyResult<f64> {
    widths::b1_l2_width(big_n, n).map_err(err)
}

#[pyfunction]
#[allow(clippy::too_many_arguments)]
fn rigidity_certificate<'py>(
    py: Python<'py>,
    p1: &Bound<'py, PyAny>,
    p2: &Bound<'py, PyAny>,
    q1: &Bound<'py, PyAny>,
    q2: &Bound<'py, PyAny>,
    s: usize,
    b: usize,
    n: usize,
    eps: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let t = tuple(p1, p2, q1, q2)?;
    let report = widths::classify(t.p1, t.p2, t.q1, t.q2);
    to_py(
        py,
        &widths::rigidity_certificate(&report, s, b, n, eps).map_err(err)?,
    )
}

#[pyfunction]
#[pyo3(signature = (p1, p2, q1, q2, s, b, partition = "good", samples = 32, seed = 0))]
#[allow(clippy::too_many_arguments)]
fn nonrigidity_witness<'py>(
    py: Python<'py>,
    p1: &Bound<'py, PyAny>,
    p2: &Bound<'py, PyAny>,
    q1: &Bound<'py, PyAny>,
    q2: &Bound<'py, PyAny>,
    s: usize,
    b: usize,
    partition: &str,
    samples: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let t = tuple(p1, p2, q1, q2)?;
    let config = WitnessConfig {
        partition: choice(partition)?,
        samples,
        seed,
        ..WitnessConfig::default()
    };
    to_py(
        py,
        &widths::nonrigidity_witness(t.p1, t.p2, t.q1, t.q2, s, b, &config).map_err(err)?,
    )
}

#[pymodule]
fn mixwidth_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBlockMatrix>()?;
    m.add_class::<PyPartition>()?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(lq_norm, m)?)?;
    m.add_function(wrap_pyfunction!(d0_mixed, m)?)?;
    m.add_function(wrap_pyfunction!(sample_ball, m)?)?;
    m.add_function(wrap_pyfunction!(design, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_k, m)?)?;
    m.add_function(wrap_pyfunction!(choose_params, m)?)?;
    m.add_function(wrap_pyfunction!(approximate, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(pietsch_stesin, m)?)?;
    m.add_function(wrap_pyfunction!(b1_l2_width, m)?)?;
    m.add_function(wrap_pyfunction!(rigidity_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(nonrigidity_witness, m)?)?;
    Ok(())
}
