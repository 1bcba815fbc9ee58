//! Python bindings for `tollnet`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use tollnet::equilibrium::{perturbed_equilibrium, social_optimum, wardrop};
use tollnet::network::{enumerate_paths, min_cut_capacity};
use tollnet::scenario::{load_scenario, TollKind};
use tollnet::simulator::{classify_convergence, distance_series, simulate};
use tollnet::{CellModel, EquilibriumResult, Error, Model, PathPreference, Scenario, TollPolicy, Topology, Trajectory};

fn to_py(e: impl Into<Error>) -> PyErr {
    let e = e.into();
    match e.exit_code() {
        3 => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn topology(nodes: Vec<String>, links: Vec<(String, String, String)>, origin: &str, destination: &str) -> PyResult<Topology> {
    let nodes: Vec<&str> = nodes.iter().map(String::as_str).collect();
    let links: Vec<(&str, &str, &str)> = links
        .iter()
        .map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str()))
        .collect();
    Topology::new(&nodes, &links, origin, destination).map_err(to_py)
}

/// Simple o-d paths as lists of link ids, shortest first.
#[pyfunction]
fn paths(
    nodes: Vec<String>,
    links: Vec<(String, String, String)>,
    origin: &str,
    destination: &str,
) -> PyResult<Vec<Vec<String>>> {
    let t = topology(nodes, links, origin, destination)?;
    let ps = enumerate_paths(&t).map_err(to_py)?;
    let ids = t.link_ids();
    Ok(ps
        .paths()
        .iter()
        .map(|p| p.iter().map(|&i| ids[i].to_string()).collect())
        .collect())
}

/// Minimum o-d cut capacity.
#[pyfunction]
fn min_cut(
    nodes: Vec<String>,
    links: Vec<(String, String, String)>,
    origin: &str,
    destination: &str,
    capacities: Vec<f64>,
) -> PyResult<f64> {
    let t = topology(nodes, links, origin, destination)?;
    min_cut_capacity(&t, &capacities).map_err(to_py)
}

/// Latency of an exponential cell with capacity `capacity` at outflow `y`.
#[pyfunction]
fn latency(capacity: f64, y: f64) -> PyResult<f64> {
    if y.is_nan() || y < 0.0 {
        return Err(PyValueError::new_err("flow must be nonnegative"));
    }
    Ok(CellModel::exponential(capacity).map_err(to_py)?.latency(y))
}

#[pyclass(name = "Equilibrium", frozen)]
struct PyEquilibrium {
    inner: EquilibriumResult,
}

#[pymethods]
impl PyEquilibrium {
    #[getter]
    fn y(&self) -> Vec<f64> {
        self.inner.y.clone()
    }

    #[getter]
    fn z(&self) -> Vec<f64> {
        self.inner.z.values().to_vec()
    }

    #[getter]
    fn objective(&self) -> f64 {
        self.inner.objective
    }

    /// `(kind, value)` of the optimality certificate.
    #[getter]
    fn certificate(&self) -> (&'static str, f64) {
        (self.inner.certificate.kind(), self.inner.certificate.value())
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.iterations
    }

    fn __repr__(&self) -> String {
        format!(
            "Equilibrium(y={:?}, objective={}, {}={:.3e})",
            self.inner.y,
            self.inner.objective,
            self.inner.certificate.kind(),
            self.inner.certificate.value()
        )
    }
}

#[pyclass(name = "Trajectory", frozen)]
struct PyTrajectory {
    inner: Trajectory,
    model: Model,
}

#[pymethods]
impl PyTrajectory {
    #[getter]
    fn t(&self) -> Vec<f64> {
        self.inner.records.iter().map(|r| r.t).collect()
    }

    #[getter]
    fn x(&self) -> Vec<Vec<f64>> {
        self.inner.records.iter().map(|r| r.x.clone()).collect()
    }

    #[getter]
    fn y(&self) -> Vec<Vec<f64>> {
        self.inner.records.iter().map(|r| r.y.clone()).collect()
    }

    #[getter]
    fn z(&self) -> Vec<Vec<f64>> {
        self.inner.records.iter().map(|r| r.z.clone()).collect()
    }

    #[getter]
    fn clamp_events(&self) -> usize {
        self.inner.clamp_events
    }

    /// `("converged" | "oscillating", amplitude)`.
    #[pyo3(signature = (tail_fraction=0.2, amp_threshold=1e-2))]
    fn classify(&self, tail_fraction: f64, amp_threshold: f64) -> (&'static str, f64) {
        let r = classify_convergence(&self.inner, tail_fraction, amp_threshold);
        (r.class.as_str(), r.amplitude)
    }

    /// `ℓ₁` distance of each recorded flow to `reference`.
    fn distance(&self, reference: Vec<f64>) -> PyResult<Vec<f64>> {
        if reference.len() != self.model.network.num_links() {
            return Err(PyValueError::new_err("reference has the wrong length"));
        }
        Ok(distance_series(&self.inner, &reference, &self.model.cells)
            .iter()
            .map(|p| p.l1)
            .collect())
    }

    fn to_csv(&self, reference: Vec<f64>) -> PyResult<String> {
        let mut buf = Vec::new();
        self.inner
            .write_csv(&mut buf, &self.model.network, &self.model.cells, &reference)
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        Ok(String::from_utf8(buf).expect("csv is ascii"))
    }

    fn __len__(&self) -> usize {
        self.inner.records.len()
    }
}

/// A validated scenario: network, exponential cells, throughput and
/// simulation defaults.
#[pyclass(name = "Model", frozen)]
struct PyModel {
    scenario: Scenario,
    model: Model,
}

impl PyModel {
    fn from_scenario(scenario: Scenario) -> PyResult<Self> {
        let model = scenario.model().map_err(to_py)?;
        Ok(Self { scenario, model })
    }

    fn policy(&self, tolls: Option<&Bound<'_, PyAny>>) -> PyResult<TollPolicy> {
        let d = &self.scenario.defaults;
        let Some(obj) = tolls else {
            return self
                .model
                .toll_policy(d.tolls, d.constant_tolls.as_deref())
                .map_err(to_py);
        };
        if let Ok(name) = obj.extract::<String>() {
            let kind: TollKind = name.parse().map_err(PyValueError::new_err)?;
            return self.model.toll_policy(kind, None).map_err(to_py);
        }
        let w: Vec<f64> = obj.extract()?;
        self.model.toll_policy(TollKind::Constant, Some(&w)).map_err(to_py)
    }
}

#[pymethods]
impl PyModel {
    /// Built-in scenario name (`"fig1"`, `"fig4"`) or path to a JSON file.
    #[staticmethod]
    fn load(source: &str) -> PyResult<Self> {
        Self::from_scenario(load_scenario(source).map_err(to_py)?)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Self::from_scenario(Scenario::from_json(text).map_err(to_py)?)
    }

    fn to_json(&self) -> String {
        self.scenario.to_json()
    }

    #[getter]
    fn name(&self) -> String {
        self.scenario.name.clone()
    }

    #[getter]
    fn lambda_(&self) -> f64 {
        self.model.lambda
    }

    #[getter]
    fn link_ids(&self) -> Vec<String> {
        self.model
            .network
            .topology()
            .link_ids()
            .iter()
            .map(|s| s.to_string())
            .collect()
    }

    #[getter]
    fn paths(&self) -> Vec<Vec<String>> {
        let ids = self.link_ids();
        self.model
            .network
            .paths()
            .paths()
            .iter()
            .map(|p| p.iter().map(|&i| ids[i].clone()).collect())
            .collect()
    }

    #[getter]
    fn capacities(&self) -> Vec<f64> {
        self.model.capacities()
    }

    fn min_cut(&self) -> PyResult<f64> {
        self.model.min_cut().map_err(to_py)
    }

    fn social_optimum(&self) -> PyResult<PyEquilibrium> {
        let m = &self.model;
        let inner = social_optimum(&m.network, &m.cells, m.lambda).map_err(to_py)?;
        Ok(PyEquilibrium { inner })
    }

    /// Wardrop equilibrium under `tolls`: `"none"`, `"marginal"`,
    /// `"constant"` or a list of per-link constant tolls.
    #[pyo3(signature = (tolls=None))]
    fn wardrop(&self, tolls: Option<&Bound<'_, PyAny>>) -> PyResult<PyEquilibrium> {
        let policy = self.policy(tolls)?;
        let m = &self.model;
        let inner = wardrop(&m.network, &m.cells, m.lambda, &policy).map_err(to_py)?;
        Ok(PyEquilibrium { inner })
    }

    #[pyo3(signature = (beta, tolls=None))]
    fn perturbed(&self, beta: f64, tolls: Option<&Bound<'_, PyAny>>) -> PyResult<PyEquilibrium> {
        let policy = self.policy(tolls)?;
        let m = &self.model;
        let inner = perturbed_equilibrium(&m.network, &m.cells, m.lambda, beta, &policy).map_err(to_py)?;
        Ok(PyEquilibrium { inner })
    }

    /// Integrates the dynamics from the scenario's initial state; unset
    /// arguments take the scenario defaults.
    #[pyo3(signature = (beta=None, eta=None, delay=None, dt=None, horizon=None, tolls=None, record_every=10, x0=None, z0=None))]
    #[allow(clippy::too_many_arguments)]
    fn simulate(
        &self,
        py: Python<'_>,
        beta: Option<f64>,
        eta: Option<f64>,
        delay: Option<f64>,
        dt: Option<f64>,
        horizon: Option<f64>,
        tolls: Option<&Bound<'_, PyAny>>,
        record_every: usize,
        x0: Option<Vec<f64>>,
        z0: Option<Vec<f64>>,
    ) -> PyResult<PyTrajectory> {
        let mut cfg = self.scenario.sim_config(&self.model).map_err(to_py)?;
        cfg.toll_policy = self.policy(tolls)?;
        cfg.beta = beta.unwrap_or(cfg.beta);
        cfg.eta = eta.unwrap_or(cfg.eta);
        cfg.delay = delay.unwrap_or(cfg.delay);
        cfg.dt = dt.unwrap_or(cfg.dt);
        cfg.horizon = horizon.unwrap_or(cfg.horizon);
        cfg.record_every = record_every;
        let mut init = self.scenario.initial_state(&self.model).map_err(to_py)?;
        if let Some(x) = x0 {
            init.x = x;
        }
        if let Some(z) = z0 {
            init.z = PathPreference::new(z, self.model.lambda).map_err(to_py)?;
        }
        let m = &self.model;
        let inner = py
            .detach(|| simulate(&m.network, &m.cells, &cfg, &init))
            .map_err(to_py)?;
        Ok(PyTrajectory {
            inner,
            model: self.model.clone(),
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Model(name={:?}, links={}, paths={}, lambda={})",
            self.scenario.name,
            self.model.network.num_links(),
            self.model.network.num_paths(),
            self.model.lambda
        )
    }
}

#[pymodule]
fn tollnet_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModel>()?;
    m.add_class::<PyEquilibrium>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_function(wrap_pyfunction!(paths, m)?)?;
    m.add_function(wrap_pyfunction!(min_cut, m)?)?;
    m.add_function(wrap_pyfunction!(latency, m)?)?;
    Ok(())
}
