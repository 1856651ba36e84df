//! Python bindings. Series are lists of samples, each sample a number or a
//! list of numbers (complex allowed); feature blocks come back flattened.

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

use dmdclust::clustering::{self, ConnectivityGraph};
use dmdclust::dmd::{self, TruncationPolicy};
use dmdclust::hankel::{build_ensemble_by_series, build_single_series};
use dmdclust::signal_model::{self, DampedSinusoidModel, GrainImage, Series};
use dmdclust::{c64, features, imaging, matrix_pencil, Error};

fn py_err(e: Error) -> PyErr {
    if e.is_numerical() {
        PyArithmeticError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

type PyRes<T> = PyResult<T>;

fn ok<T>(r: dmdclust::Result<T>) -> PyRes<T> {
    r.map_err(py_err)
}

fn policy(rank: Option<usize>, energy: Option<f64>, gap: Option<f64>) -> PyRes<TruncationPolicy> {
    let p = match (rank, energy, gap) {
        (Some(r), None, None) => TruncationPolicy::FixedRank(r),
        (None, Some(e), None) => TruncationPolicy::Energy(e),
        (None, None, Some(g)) => TruncationPolicy::Gap(g),
        (None, None, None) => TruncationPolicy::gap(),
        _ => return Err(PyValueError::new_err("give at most one of rank, energy, gap")),
    };
    ok(p.validate())?;
    Ok(p)
}

fn to_series(obj: &Bound<'_, PyAny>) -> PyRes<Series> {
    let items: Vec<Bound<'_, PyAny>> = obj.extract()?;
    items
        .iter()
        .map(|s| match s.extract::<Vec<c64>>() {
            Ok(v) => Ok(v),
            Err(_) => Ok(vec![s.extract::<c64>()?]),
        })
        .collect()
}

#[pyclass(name = "SeriesEnsemble", module = "dmdclust", skip_from_py_object)]
#[derive(Clone)]
struct PySeriesEnsemble {
    inner: signal_model::SeriesEnsemble,
}

#[pymethods]
impl PySeriesEnsemble {
    #[new]
    #[pyo3(signature = (series, labels=None))]
    fn new(series: Vec<Bound<'_, PyAny>>, labels: Option<Vec<usize>>) -> PyRes<Self> {
        let series = series.iter().map(to_series).collect::<PyRes<Vec<_>>>()?;
        let mut inner = ok(signal_model::SeriesEnsemble::new(series))?;
        if let Some(l) = labels {
            inner = ok(inner.with_labels(l))?;
        }
        Ok(Self { inner })
    }

    /// The three-group toy ensemble (6/6/11 series of length 20).
    #[staticmethod]
    #[pyo3(signature = (seed=0, sigma=0.1))]
    fn toy(seed: u64, sigma: f64) -> Self {
        Self {
            inner: signal_model::make_toy_ensemble_with_sigma(seed, sigma),
        }
    }

    #[staticmethod]
    fn read_csv(path: &str) -> PyRes<Self> {
        let file = std::fs::File::open(path).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Self {
            inner: ok(dmdclust::io::read_ensemble_csv(std::io::BufReader::new(file)))?,
        })
    }

    #[getter]
    fn labels(&self) -> Option<Vec<usize>> {
        self.inner.labels.clone()
    }

    #[getter]
    fn series(&self) -> Vec<Series> {
        self.inner.series.clone()
    }

    #[getter]
    fn samples(&self) -> usize {
        self.inner.samples()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// Scalar series `sum_j c_j lambda_j^t` for t = 0..t_count, plus Gaussian noise.
#[pyfunction]
#[pyo3(signature = (coefficients, frequencies, t_count, sigma=0.0, seed=0, real_part_only=false))]
fn synthesize(
    coefficients: Vec<c64>,
    frequencies: Vec<c64>,
    t_count: usize,
    sigma: f64,
    seed: u64,
    real_part_only: bool,
) -> PyRes<Vec<c64>> {
    let model = ok(DampedSinusoidModel::scalar(&coefficients, &frequencies))?;
    let s = ok(signal_model::synthesize(&model, t_count, sigma, seed, real_part_only))?;
    Ok(s.into_iter().map(|y| y[0]).collect())
}

#[pyclass(name = "Decomposition", module = "dmdclust", get_all, skip_from_py_object)]
struct PyDecomposition {
    rank: usize,
    singular_values: Vec<f64>,
    eigenvalues: Vec<c64>,
    coefficients: Vec<Vec<c64>>,
    reconstruction_error: f64,
    similarity_residual: Option<f64>,
    adjoint_match_residual: Option<f64>,
}

#[pymethods]
impl PyDecomposition {
    fn __repr__(&self) -> String {
        format!("Decomposition(rank={}, eigenvalues={:?})", self.rank, self.eigenvalues)
    }
}

fn decompose(series: &Bound<'_, PyAny>, d: usize, p: TruncationPolicy, with_pencil: bool, pencil_eigs: bool) -> PyRes<PyDecomposition> {
    let series = to_series(series)?;
    let n = series.first().map_or(0, Vec::len);
    let pair = ok(build_single_series(&series, d))?;
    let svd = ok(dmdclust::linalg::Svd::compute(&pair.x))?;
    let rank = ok(dmd::select_rank(&svd.s, p))?;
    let dec = ok(dmd::decompose_with_svd(&pair, &svd, rank))?;
    let snapshots = dmd::sequential_snapshots(&pair);
    let scaled = ok(dmd::scale_modes(&dec, &snapshots))?;
    let coefficients = ok(dmd::recover_coefficients(&dec, &scaled, n, d))?;
    let mut out = PyDecomposition {
        rank,
        singular_values: svd.s.clone(),
        eigenvalues: dec.eigenvalues.clone(),
        coefficients,
        reconstruction_error: dmd::reconstruction_error(&dec, &scaled, &snapshots),
        similarity_residual: None,
        adjoint_match_residual: None,
    };
    if with_pencil {
        let pencil = ok(matrix_pencil::pencil_decompose_with_svd(&pair, &svd, rank))?;
        out.similarity_residual = Some(ok(matrix_pencil::verify_similarity(&dec, &pencil))?);
        out.adjoint_match_residual = matrix_pencil::verify_adjoint_mode_match(&dec, &pencil).ok();
        if pencil_eigs {
            out.eigenvalues = pencil.eigenvalues;
        }
    }
    Ok(out)
}

/// DMD of one series with `d` delays.
#[pyfunction]
#[pyo3(signature = (series, d, rank=None, energy=None, gap=None, verify_pencil=false))]
fn dmd_decompose(
    series: &Bound<'_, PyAny>,
    d: usize,
    rank: Option<usize>,
    energy: Option<f64>,
    gap: Option<f64>,
    verify_pencil: bool,
) -> PyRes<PyDecomposition> {
    decompose(series, d, policy(rank, energy, gap)?, verify_pencil, false)
}

/// Matrix pencil of one series; residuals compare it with DMD on the same SVD.
#[pyfunction]
#[pyo3(signature = (series, d, rank=None, energy=None, gap=None))]
fn pencil_decompose(
    series: &Bound<'_, PyAny>,
    d: usize,
    rank: Option<usize>,
    energy: Option<f64>,
    gap: Option<f64>,
) -> PyRes<PyDecomposition> {
    decompose(series, d, policy(rank, energy, gap)?, true, true)
}

#[pyclass(name = "FeatureModel", module = "dmdclust", skip_from_py_object)]
struct PyFeatureModel {
    inner: features::FeatureModel,
}

#[pymethods]
impl PyFeatureModel {
    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.d
    }

    #[getter]
    fn eigenvalues(&self) -> Vec<c64> {
        self.inner.eigenvalues.clone()
    }

    /// Flattened feature block (rank x n) of a series of exactly `d` samples.
    fn embed(&self, series: &Bound<'_, PyAny>) -> PyRes<Vec<f64>> {
        Ok(ok(features::embed(&self.inner, &to_series(series)?))?.values)
    }

    fn to_json(&self) -> PyRes<String> {
        serde_json::to_string(&self.inner).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyRes<Self> {
        let inner = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Self { inner })
    }
}

/// Fits the feature model; returns it with one flattened feature vector per series.
#[pyfunction]
#[pyo3(signature = (ensemble, d, rank=None, energy=None, gap=None, normalize=false))]
fn fit_features(
    ensemble: &PySeriesEnsemble,
    d: usize,
    rank: Option<usize>,
    energy: Option<f64>,
    gap: Option<f64>,
    normalize: bool,
) -> PyRes<(PyFeatureModel, Vec<Vec<f64>>)> {
    let ens = &ensemble.inner;
    let pair = ok(build_ensemble_by_series(ens, d))?;
    let fit = ok(features::fit(&pair, policy(rank, energy, gap)?))?;
    let mut fs = ok(features::extract(&fit.q, ens.dim(), ens.len()))?;
    if normalize {
        fs = fs.normalized();
    }
    Ok((PyFeatureModel { inner: fit.model }, fs.vectors()))
}

fn graph(count: usize, edges: Option<Vec<(usize, usize)>>) -> PyRes<ConnectivityGraph> {
    match edges {
        Some(e) => ok(ConnectivityGraph::new(count, e)),
        None => Ok(ConnectivityGraph::complete(count)),
    }
}

/// Ward merges as `(cluster_a, cluster_b, cost, new_size)`; ids past the
/// point count refer to earlier merges. Without `edges` every pair may merge.
#[pyfunction]
#[pyo3(signature = (points, edges=None))]
fn ward_dendrogram(points: Vec<Vec<f64>>, edges: Option<Vec<(usize, usize)>>) -> PyRes<Vec<(usize, usize, f64, usize)>> {
    let g = graph(points.len(), edges)?;
    let d = ok(clustering::ward_constrained_points(&points, &g))?;
    Ok(d.merges.iter().map(|m| (m.cluster_a, m.cluster_b, m.cost, m.new_size)).collect())
}

/// Flat Ward clustering into `k` clusters; labels are 1-based.
#[pyfunction]
#[pyo3(signature = (points, k, edges=None))]
fn ward(points: Vec<Vec<f64>>, k: usize, edges: Option<Vec<(usize, usize)>>) -> PyRes<Vec<usize>> {
    let g = graph(points.len(), edges)?;
    let d = ok(clustering::ward_constrained_points(&points, &g))?;
    ok(clustering::cut(&d, k))
}

#[pyfunction]
fn adjusted_rand_index(a: Vec<usize>, b: Vec<usize>) -> PyRes<f64> {
    ok(clustering::adjusted_rand_index(&a, &b))
}

/// Six-region synthetic lattice image; returns row-major `(pixels, regions)`.
#[pyfunction]
#[pyo3(signature = (width=200, height=200, seed=7, sigma=0.05, d=50))]
fn lattice_image(width: usize, height: usize, seed: u64, sigma: f64, d: usize) -> PyRes<(Vec<f64>, Vec<usize>)> {
    let regions = signal_model::six_region_layout(width, height, d / 2);
    let img = ok(signal_model::make_lattice_image(width, height, &regions, sigma, seed))?;
    Ok((img.pixels, img.region_labels.unwrap_or_default()))
}

/// Segments a row-major grayscale image; border pixels get label 0.
#[pyfunction]
#[pyo3(signature = (pixels, width, height, k, d=50, rank=None, energy=None, gap=None, diagonal=false, demean=true))]
#[allow(clippy::too_many_arguments)]
fn cluster_image(
    pixels: Vec<f64>,
    width: usize,
    height: usize,
    k: usize,
    d: usize,
    rank: Option<usize>,
    energy: Option<f64>,
    gap: Option<f64>,
    diagonal: bool,
    demean: bool,
) -> PyRes<Vec<usize>> {
    let p = policy(rank, energy, gap)?;
    let img = ok(GrainImage::new(width, height, pixels))?;
    let pe = ok(imaging::pixel_profiles(&img, d, demean))?;
    let pair = ok(build_ensemble_by_series(&pe.ensemble, d))?;
    let fit = ok(features::fit(&pair, p))?;
    let fs = ok(features::extract(&fit.q, 2, pe.ensemble.len()))?;
    let dendrogram = ok(clustering::ward_constrained(&fs, &imaging::pixel_connectivity(&pe, diagonal)))?;
    let labels = ok(clustering::cut(&dendrogram, k))?;
    ok(imaging::label_map(&labels, &pe))
}

#[pymodule]
#[pyo3(name = "dmdclust")]
fn dmdclust_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySeriesEnsemble>()?;
    m.add_class::<PyDecomposition>()?;
    m.add_class::<PyFeatureModel>()?;
    m.add_function(wrap_pyfunction!(synthesize, m)?)?;
    m.add_function(wrap_pyfunction!(dmd_decompose, m)?)?;
    m.add_function(wrap_pyfunction!(pencil_decompose, m)?)?;
    m.add_function(wrap_pyfunction!(fit_features, m)?)?;
    m.add_function(wrap_pyfunction!(ward_dendrogram, m)?)?;
    m.add_function(wrap_pyfunction!(ward, m)?)?;
    m.add_function(wrap_pyfunction!(adjusted_rand_index, m)?)?;
    m.add_function(wrap_pyfunction!(lattice_image, m)?)?;
    m.add_function(wrap_pyfunction!(cluster_image, m)?)?;
    Ok(())
}
