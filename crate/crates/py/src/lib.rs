//! Python bindings. Point sets are passed as lists of equal-length float
//! lists; optional weights as a float list of the same length.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use softstream as core;
use softstream::{CenterSet, ClusterError, Dataset, SeededRng, SoftParams, StopRule};

fn err(e: ClusterError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn dataset(rows: &[Vec<f64>], weights: Option<Vec<f64>>) -> PyResult<Dataset> {
    match weights {
        Some(w) => Dataset::from_weighted_rows(rows, &w),
        None => Dataset::from_rows(rows),
    }
    .map_err(err)
}

fn centers(rows: &[Vec<f64>]) -> PyResult<CenterSet> {
    CenterSet::from_rows(rows).map_err(err)
}

fn params(m: f64) -> PyResult<SoftParams> {
    SoftParams::new(m).map_err(err)
}

fn stop_rule(max_iters: usize, rel_tol: f64, move_tol: f64) -> StopRule {
    StopRule {
        max_iters,
        rel_tol,
        move_tol,
    }
}

#[pyfunction]
#[pyo3(signature = (data, centers, weights=None))]
fn hard_cost(data: Vec<Vec<f64>>, centers: Vec<Vec<f64>>, weights: Option<Vec<f64>>) -> PyResult<f64> {
    core::hard_cost(&dataset(&data, weights)?, &self::centers(&centers)?).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (data, centers, m, weights=None))]
fn soft_cost(
    data: Vec<Vec<f64>>,
    centers: Vec<Vec<f64>>,
    m: f64,
    weights: Option<Vec<f64>>,
) -> PyResult<f64> {
    core::soft_cost(&dataset(&data, weights)?, &self::centers(&centers)?, &params(m)?).map_err(err)
}

/// Soft potential through the closed form in the nearest distance.
#[pyfunction]
#[pyo3(signature = (data, centers, m, weights=None))]
fn soft_cost_closed(
    data: Vec<Vec<f64>>,
    centers: Vec<Vec<f64>>,
    m: f64,
    weights: Option<Vec<f64>>,
) -> PyResult<f64> {
    core::soft_cost_closed(&dataset(&data, weights)?, &self::centers(&centers)?, &params(m)?)
        .map_err(err)
}

/// Fuzzy membership of `x` in each center; sums to 1.
#[pyfunction]
fn memberships(x: Vec<f64>, centers: Vec<Vec<f64>>, m: f64) -> PyResult<Vec<f64>> {
    core::memberships(&x, &self::centers(&centers)?, &params(m)?)
        .map(|row| row.into_inner())
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (data, centers, m, weights=None))]
fn soft_centroids(
    data: Vec<Vec<f64>>,
    centers: Vec<Vec<f64>>,
    m: f64,
    weights: Option<Vec<f64>>,
) -> PyResult<Vec<Vec<f64>>> {
    core::soft_centroids(&dataset(&data, weights)?, &self::centers(&centers)?, &params(m)?)
        .map(|c| c.rows())
        .map_err(err)
}

/// `k^{m/(1-m)}`, the worst-case ratio of soft to hard potential.
#[pyfunction]
fn approx_factor(k: usize, m: f64) -> PyResult<f64> {
    Ok(core::approx_factor(k, &params(m)?))
}

#[pyfunction]
#[pyo3(signature = (data, k, seed=0, weights=None))]
fn kmeanspp(data: Vec<Vec<f64>>, k: usize, seed: u64, weights: Option<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
    core::kmeanspp_seed(&dataset(&data, weights)?, k, &mut SeededRng::new(seed))
        .map(|s| s.centers.rows())
        .map_err(err)
}

/// Oversampled seeding: about `k·⌈3 log₂ k⌉` centers.
#[pyfunction]
#[pyo3(signature = (data, k, seed=0, weights=None))]
fn kmeans_sharp(data: Vec<Vec<f64>>, k: usize, seed: u64, weights: Option<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
    core::kmeans_sharp(&dataset(&data, weights)?, k, &mut SeededRng::new(seed))
        .map(|s| s.centers.rows())
        .map_err(err)
}

/// Returns the final centers and the hard cost after every iteration.
#[pyfunction]
#[pyo3(signature = (data, centers, max_iters=300, rel_tol=1e-6, move_tol=1e-8, weights=None))]
fn lloyd(
    data: Vec<Vec<f64>>,
    centers: Vec<Vec<f64>>,
    max_iters: usize,
    rel_tol: f64,
    move_tol: f64,
    weights: Option<Vec<f64>>,
) -> PyResult<(Vec<Vec<f64>>, Vec<f64>)> {
    let (c, report) = core::lloyd_run(
        &dataset(&data, weights)?,
        &self::centers(&centers)?,
        &stop_rule(max_iters, rel_tol, move_tol),
    )
    .map_err(err)?;
    Ok((c.rows(), report.potentials))
}

/// Fuzzy EM from the given centers; returns centers and soft potentials.
#[pyfunction]
#[pyo3(signature = (data, centers, m, max_iters=300, rel_tol=1e-6, move_tol=1e-8, weights=None))]
fn em(
    data: Vec<Vec<f64>>,
    centers: Vec<Vec<f64>>,
    m: f64,
    max_iters: usize,
    rel_tol: f64,
    move_tol: f64,
    weights: Option<Vec<f64>>,
) -> PyResult<(Vec<Vec<f64>>, Vec<f64>)> {
    let (c, report) = core::em_run(
        &dataset(&data, weights)?,
        &self::centers(&centers)?,
        &params(m)?,
        &stop_rule(max_iters, rel_tol, move_tol),
    )
    .map_err(err)?;
    Ok((c.rows(), report.potentials))
}

/// EM seeded by k-means++; returns centers and the final soft potential.
#[pyfunction]
#[pyo3(signature = (data, k, m, seed=0, max_iters=300, rel_tol=1e-6, move_tol=1e-8))]
fn em_plus_plus(
    data: Vec<Vec<f64>>,
    k: usize,
    m: f64,
    seed: u64,
    max_iters: usize,
    rel_tol: f64,
    move_tol: f64,
) -> PyResult<(Vec<Vec<f64>>, f64)> {
    let (c, report) = core::em_plus_plus(
        &dataset(&data, None)?,
        k,
        &params(m)?,
        &stop_rule(max_iters, rel_tol, move_tol),
        &mut SeededRng::new(seed),
    )
    .map_err(err)?;
    Ok((c.rows(), report.final_potential))
}

/// Exact optimum by partition enumeration: (cost, assignment, centers).
#[pyfunction]
fn brute_force(data: Vec<Vec<f64>>, k: usize) -> PyResult<(f64, Vec<usize>, Vec<Vec<f64>>)> {
    let r = core::brute_force_kmeans(&dataset(&data, None)?, k).map_err(err)?;
    Ok((r.cost, r.assignment, r.centers.rows()))
}

/// (holds, hard, soft, factor) for `hard <= soft <= factor * hard`.
#[pyfunction]
#[pyo3(signature = (data, centers, m, weights=None))]
fn sandwich_check(
    data: Vec<Vec<f64>>,
    centers: Vec<Vec<f64>>,
    m: f64,
    weights: Option<Vec<f64>>,
) -> PyResult<(bool, f64, f64, f64)> {
    let r = core::sandwich_check(&dataset(&data, weights)?, &self::centers(&centers)?, &params(m)?)
        .map_err(err)?;
    Ok((r.holds(), r.hard, r.soft, r.factor))
}

#[pyclass(name = "StreamClusterer")]
pub struct PyStreamClusterer {
    inner: core::StreamClusterer,
}

#[pymethods]
impl PyStreamClusterer {
    #[new]
    #[pyo3(signature = (k, memory, dim, levels=3, seed=0, sharp_runs=None, query_runs=1, refine=false))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        k: usize,
        memory: usize,
        dim: usize,
        levels: usize,
        seed: u64,
        sharp_runs: Option<usize>,
        query_runs: usize,
        refine: bool,
    ) -> PyResult<Self> {
        let mut config = core::StreamConfig::new(k, memory);
        config.levels = levels;
        config.seed = seed;
        config.query_runs = query_runs;
        config.refine = refine.then(StopRule::default);
        if let Some(runs) = sharp_runs {
            config.sharp_runs = runs;
        }
        let inner = core::StreamClusterer::new(config, dim).map_err(err)?;
        Ok(Self { inner })
    }

    fn ingest(&mut self, x: Vec<f64>) -> PyResult<()> {
        self.inner.ingest(&x).map_err(err)
    }

    fn ingest_many(&mut self, rows: Vec<Vec<f64>>) -> PyResult<()> {
        rows.iter().try_for_each(|x| self.inner.ingest(x)).map_err(err)
    }

    /// k centers for everything ingested so far; the stream stays usable.
    #[pyo3(signature = (seed=0))]
    fn finalize(&self, seed: u64) -> PyResult<Vec<Vec<f64>>> {
        self.inner
            .finalize(&mut SeededRng::new(seed))
            .map(|c| c.rows())
            .map_err(err)
    }

    /// Stored weighted points as (rows, weights).
    fn live_points(&self) -> (Vec<Vec<f64>>, Vec<f64>) {
        let live = self.inner.live_points();
        (live.rows(), live.weights().to_vec())
    }

    #[getter]
    fn ingested(&self) -> u64 {
        self.inner.ingested()
    }

    #[getter]
    fn live_len(&self) -> usize {
        self.inner.live_len()
    }

    #[getter]
    fn live_weight(&self) -> f64 {
        self.inner.live_weight()
    }
}

#[pyclass(name = "WindowClusterer")]
pub struct PyWindowClusterer {
    inner: core::WindowClusterer,
}

#[pymethods]
impl PyWindowClusterer {
    #[new]
    #[pyo3(signature = (k, window, dim, epsilon=1.0/3.0, seed=0, sharp_runs=None, query_runs=1, refine=false))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        k: usize,
        window: usize,
        dim: usize,
        epsilon: f64,
        seed: u64,
        sharp_runs: Option<usize>,
        query_runs: usize,
        refine: bool,
    ) -> PyResult<Self> {
        let mut config = core::WindowConfig::new(window, k, epsilon);
        config.seed = seed;
        config.sharp_runs = sharp_runs;
        config.query_runs = query_runs;
        config.refine = refine.then(StopRule::default);
        let inner = core::WindowClusterer::new(config, dim).map_err(err)?;
        Ok(Self { inner })
    }

    fn insert(&mut self, x: Vec<f64>) -> PyResult<()> {
        self.inner.insert(&x).map_err(err)
    }

    fn insert_many(&mut self, rows: Vec<Vec<f64>>) -> PyResult<()> {
        rows.iter().try_for_each(|x| self.inner.insert(x)).map_err(err)
    }

    #[pyo3(signature = (seed=0))]
    fn query(&self, seed: u64) -> PyResult<Vec<Vec<f64>>> {
        self.inner
            .query(&mut SeededRng::new(seed))
            .map(|c| c.rows())
            .map_err(err)
    }

    /// Weighted points describing the current window, as (rows, weights).
    fn window_points(&self) -> PyResult<(Vec<Vec<f64>>, Vec<f64>)> {
        let pts = self.inner.window_points().map_err(err)?;
        Ok((pts.rows(), pts.weights().to_vec()))
    }

    fn is_checkpoint(&self) -> bool {
        self.inner.is_checkpoint()
    }

    #[getter]
    fn seen(&self) -> u64 {
        self.inner.seen()
    }

    #[getter]
    fn shift(&self) -> u64 {
        self.inner.shift()
    }

    #[getter]
    fn live_len(&self) -> usize {
        self.inner.live_len()
    }

    #[getter]
    fn live_weight(&self) -> f64 {
        self.inner.live_weight()
    }
}

#[pymodule]
pub fn pysoftstream(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(hard_cost, m)?)?;
    m.add_function(wrap_pyfunction!(soft_cost, m)?)?;
    m.add_function(wrap_pyfunction!(soft_cost_closed, m)?)?;
    m.add_function(wrap_pyfunction!(memberships, m)?)?;
    m.add_function(wrap_pyfunction!(soft_centroids, m)?)?;
    m.add_function(wrap_pyfunction!(approx_factor, m)?)?;
    m.add_function(wrap_pyfunction!(kmeanspp, m)?)?;
    m.add_function(wrap_pyfunction!(kmeans_sharp, m)?)?;
    m.add_function(wrap_pyfunction!(lloyd, m)?)?;
    m.add_function(wrap_pyfunction!(em, m)?)?;
    m.add_function(wrap_pyfunction!(em_plus_plus, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force, m)?)?;
    m.add_function(wrap_pyfunction!(sandwich_check, m)?)?;
    m.add_class::<PyStreamClusterer>()?;
    m.add_class::<PyWindowClusterer>()?;
    Ok(())
}
