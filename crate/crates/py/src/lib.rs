//! Python bindings. Queries, schemas and instances are built from the same text syntax the
//! CLI accepts; failures surface as `cqdist.CqdistError` for bad input and `RuntimeError`
//! for internal problems such as an exceeded node cap.

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use cqdist_core as core;
use cqdist_core::metric::DEFAULT_MAX_NODES;
use cqdist_core::opq::DEFAULT_RELATION;

create_exception!(cqdist, CqdistError, PyValueError);

fn err(e: core::Error) -> PyErr {
    if e.is_input_error() {
        CqdistError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

#[pyclass(name = "Schema", module = "cqdist", frozen)]
struct PySchema {
    inner: core::Schema,
}

#[pymethods]
impl PySchema {
    /// Parses `R/2 L/1` style text.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(PySchema {
            inner: core::parse_schema(text).map_err(err)?,
        })
    }

    fn relations(&self) -> Vec<(String, usize)> {
        self.inner
            .relations()
            .map(|(n, a)| (n.to_string(), a))
            .collect()
    }

    fn arity(&self, name: &str) -> Option<usize> {
        self.inner.arity(name)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Schema('{}')", self.inner)
    }
}

#[pyclass(name = "Query", module = "cqdist", frozen)]
struct PyQuery {
    inner: core::ConjunctiveQuery,
}

#[pymethods]
impl PyQuery {
    /// Parses one query such as `(x, y) <- R(x, y), L(y)`, optionally checked against a schema.
    #[new]
    #[pyo3(signature = (text, schema = None))]
    fn new(text: &str, schema: Option<&PySchema>) -> PyResult<Self> {
        let inner = match schema {
            Some(s) => core::parse_query_with_schema(text, &s.inner),
            None => core::parse_query(text),
        }
        .map_err(err)?;
        Ok(PyQuery { inner })
    }

    #[getter]
    fn arity(&self) -> usize {
        self.inner.arity()
    }

    #[getter]
    fn head(&self) -> Vec<String> {
        self.inner.head().iter().map(|v| v.to_string()).collect()
    }

    #[getter]
    fn body(&self) -> Vec<(String, Vec<String>)> {
        self.inner
            .body()
            .iter()
            .map(|a| {
                (
                    a.relation.clone(),
                    a.args.iter().map(|v| v.to_string()).collect(),
                )
            })
            .collect()
    }

    fn is_2cq(&self) -> bool {
        self.inner.is_2cq()
    }

    fn is_minimal(&self) -> bool {
        core::is_minimal(&self.inner)
    }

    fn core(&self) -> PyQuery {
        PyQuery {
            inner: core::core(&self.inner),
        }
    }

    fn canonical(&self) -> String {
        core::canonicalize(&self.inner)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Query('{}')", self.inner)
    }

    /// Equal up to renaming of variables and reordering of atoms.
    fn __eq__(&self, other: &PyQuery) -> bool {
        core::canonicalize(&self.inner) == core::canonicalize(&other.inner)
    }

    fn __hash__(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        core::canonicalize(&self.inner).hash(&mut h);
        h.finish()
    }
}

#[pyclass(name = "Instance", module = "cqdist", frozen)]
struct PyInstance {
    inner: core::Instance,
}

#[pymethods]
impl PyInstance {
    /// Parses facts such as `R(a, b). L(a).`.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(PyInstance {
            inner: core::parse_instance(text, None).map_err(err)?,
        })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }
}

#[pyclass(name = "McGraph", module = "cqdist", frozen)]
struct PyMcGraph {
    inner: core::McGraph,
}

impl PyMcGraph {
    fn node_of(&self, q: &PyQuery) -> PyResult<usize> {
        self.inner.node_of(&q.inner).map_err(err)
    }
}

#[pymethods]
impl PyMcGraph {
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(PyMcGraph {
            inner: core::load_graph(path).map_err(err)?,
        })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        core::save_graph(&self.inner, path).map_err(err)
    }

    #[getter]
    fn arity(&self) -> usize {
        self.inner.arity()
    }

    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    /// Canonical texts, indexed by node id.
    fn nodes(&self) -> Vec<String> {
        (0..self.inner.node_count())
            .map(|i| self.inner.text(i).to_string())
            .collect()
    }

    /// `(u, v)` pairs where node `v` is maximally contained in node `u`.
    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().to_vec()
    }

    fn bottom(&self) -> Option<String> {
        self.inner.bottom().map(|b| self.inner.text(b).to_string())
    }

    fn node_id(&self, q: &PyQuery) -> PyResult<usize> {
        self.node_of(q)
    }

    fn distance(&self, q1: &PyQuery, q2: &PyQuery) -> PyResult<usize> {
        core::distance(&self.inner, &q1.inner, &q2.inner).map_err(err)
    }

    /// One shortest path between the two queries, as canonical queries.
    fn path(&self, q1: &PyQuery, q2: &PyQuery) -> PyResult<Vec<PyQuery>> {
        Ok(core::distance_path(&self.inner, &q1.inner, &q2.inner)
            .map_err(err)?
            .into_iter()
            .map(|inner| PyQuery { inner })
            .collect())
    }

    fn to_dot(&self) -> String {
        core::to_dot(&self.inner)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }
}

#[pyfunction]
fn contains(q1: &PyQuery, q2: &PyQuery) -> PyResult<bool> {
    core::contains(&q1.inner, &q2.inner).map_err(err)
}

#[pyfunction]
fn equivalent(q1: &PyQuery, q2: &PyQuery) -> PyResult<bool> {
    core::equivalent(&q1.inner, &q2.inner).map_err(err)
}

/// A homomorphism from `source` to `target` as a dict, or None.
#[pyfunction]
fn find_homomorphism(
    source: &PyQuery,
    target: &PyQuery,
) -> PyResult<Option<std::collections::BTreeMap<String, String>>> {
    Ok(core::find_homomorphism(&source.inner, &target.inner)
        .map_err(err)?
        .map(|h| {
            h.iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect()
        }))
}

#[pyfunction]
fn evaluate(q: &PyQuery, instance: &PyInstance) -> PyResult<Vec<Vec<String>>> {
    Ok(core::evaluate(&q.inner, &instance.inner)
        .map_err(err)?
        .into_iter()
        .map(|t| t.into_iter().map(|c| c.as_str().to_string()).collect())
        .collect())
}

/// Restrictions of `q` as `(type, query)` pairs; `kind` selects one type from 1 to 4.
#[pyfunction]
#[pyo3(signature = (q, schema, kind = None))]
fn restrictions(q: &PyQuery, schema: &PySchema, kind: Option<u8>) -> PyResult<Vec<(u8, PyQuery)>> {
    let kinds = match kind {
        None => core::RestrictionType::ALL.to_vec(),
        Some(n) => vec![core::RestrictionType::from_number(n).ok_or_else(|| {
            CqdistError::new_err(format!("restriction type must be 1 to 4, got {n}"))
        })?],
    };
    let mut out = Vec::new();
    for t in kinds {
        for r in core::generate_restrictions(&q.inner, &schema.inner, t).map_err(err)? {
            out.push((t.number(), PyQuery { inner: r.query }));
        }
    }
    Ok(out)
}

#[pyfunction]
fn reduced_restrictions(q: &PyQuery, schema: &PySchema) -> PyResult<Vec<PyQuery>> {
    Ok(core::reduced_restrictions(&q.inner, &schema.inner)
        .map_err(err)?
        .into_iter()
        .map(|inner| PyQuery { inner })
        .collect())
}

#[pyfunction]
fn is_maximally_contained(q1: &PyQuery, q2: &PyQuery, schema: &PySchema) -> PyResult<bool> {
    core::is_maximally_contained(&q1.inner, &q2.inner, &schema.inner).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (schema, arity, max_nodes = DEFAULT_MAX_NODES))]
fn build_graph(
    py: Python<'_>,
    schema: &PySchema,
    arity: usize,
    max_nodes: usize,
) -> PyResult<PyMcGraph> {
    let options = core::BuildOptions { max_nodes };
    let inner = py
        .detach(|| core::build_mc_graph_with(&schema.inner, arity, &options))
        .map_err(err)?;
    Ok(PyMcGraph { inner })
}

#[pyfunction]
#[pyo3(signature = (bits, relation = DEFAULT_RELATION))]
fn opq_query(bits: &str, relation: &str) -> PyResult<PyQuery> {
    let bits: core::Bits = bits.parse().map_err(err)?;
    if core::Schema::from_relations([(relation, 2)]).is_err() {
        return Err(CqdistError::new_err(format!(
            "invalid relation name `{relation}`"
        )));
    }
    Ok(PyQuery {
        inner: core::opq::opq_query_over(&bits, relation),
    })
}

#[pyfunction]
fn reverse_opq(bits: &str) -> PyResult<String> {
    let bits: core::Bits = bits.parse().map_err(err)?;
    Ok(core::reverse_opq(&bits).to_string())
}

#[pyfunction]
fn pumped_query(i: usize) -> PyQuery {
    PyQuery {
        inner: core::pumped_query(i),
    }
}

/// `(passed, steps)` with one `(lower, upper, contained, reverse_contained)` per step.
#[pyfunction]
#[pyo3(signature = (bound = core::opq::DEFAULT_CHAIN_BOUND))]
fn check_chain(bound: usize) -> (bool, Vec<(String, String, bool, bool)>) {
    let report = core::check_chain(bound);
    let steps = report
        .steps
        .into_iter()
        .map(|s| {
            (
                s.lower.to_string(),
                s.upper.to_string(),
                s.contained,
                s.reverse_contained,
            )
        })
        .collect();
    (report.passed, steps)
}

/// `(passed, rows)` with one `(query, passed)` per table row.
#[pyfunction]
fn verify_opq_table() -> (bool, Vec<(String, bool)>) {
    let report = core::verify_opq_table();
    let rows = report
        .rows
        .iter()
        .map(|r| (r.query.to_string(), r.passed))
        .collect();
    (report.passed, rows)
}

#[pymodule]
fn cqdist(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("CqdistError", m.py().get_type::<CqdistError>())?;
    m.add_class::<PySchema>()?;
    m.add_class::<PyQuery>()?;
    m.add_class::<PyInstance>()?;
    m.add_class::<PyMcGraph>()?;
    m.add_function(wrap_pyfunction!(contains, m)?)?;
    m.add_function(wrap_pyfunction!(equivalent, m)?)?;
    m.add_function(wrap_pyfunction!(find_homomorphism, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(restrictions, m)?)?;
    m.add_function(wrap_pyfunction!(reduced_restrictions, m)?)?;
    m.add_function(wrap_pyfunction!(is_maximally_contained, m)?)?;
    m.add_function(wrap_pyfunction!(build_graph, m)?)?;
    m.add_function(wrap_pyfunction!(opq_query, m)?)?;
    m.add_function(wrap_pyfunction!(reverse_opq, m)?)?;
    m.add_function(wrap_pyfunction!(pumped_query, m)?)?;
    m.add_function(wrap_pyfunction!(check_chain, m)?)?;
    m.add_function(wrap_pyfunction!(verify_opq_table, m)?)?;
    Ok(())
}
