//! Python bindings. Certificates come back as plain dicts.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyModule;
use serde::Serialize;

use ptolemaic::comparison::{self, QuadDistances};
use ptolemaic::cone::{self, ConePoint, ConeSpace};
use ptolemaic::metric::{self, SpaceDescriptor};
use ptolemaic::{hyperbolicity, moebius, Dist, ExtendedMetricSpace};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(err)?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

/// Finite metric space with at most one point at infinity.
#[pyclass(name = "MetricSpace", module = "ptolemaic", frozen)]
pub struct PyMetricSpace {
    inner: ExtendedMetricSpace,
}

fn wrap(inner: ExtendedMetricSpace) -> PyMetricSpace {
    PyMetricSpace { inner }
}

#[pymethods]
impl PyMetricSpace {
    /// `matrix` may hold `inf`; the point at infinity is inferred unless given.
    #[new]
    #[pyo3(signature = (matrix, labels=None, omega=None))]
    fn new(matrix: Vec<Vec<f64>>, labels: Option<Vec<String>>, omega: Option<usize>) -> PyResult<Self> {
        let rows: Vec<Vec<Dist>> = matrix
            .iter()
            .map(|r| r.iter().map(|&x| if x == f64::INFINITY { Dist::Infinite } else { Dist::Finite(x) }).collect())
            .collect();
        let omega = omega.or_else(|| metric::infer_omega(&rows));
        let labels = labels.unwrap_or_else(|| (0..rows.len()).map(|i| i.to_string()).collect());
        ExtendedMetricSpace::new(labels, rows, omega).map(wrap).map_err(err)
    }

    #[staticmethod]
    fn from_points(points: Vec<Vec<f64>>) -> Self {
        wrap(ExtendedMetricSpace::from_euclidean(&points))
    }

    #[staticmethod]
    fn from_line(xs: Vec<f64>) -> Self {
        wrap(ExtendedMetricSpace::from_line_points(&xs))
    }

    /// Build from a generator spec such as `"euclidean:dim=2,n=20"`; `seed` replaces any seed in the spec.
    #[staticmethod]
    #[pyo3(signature = (spec, seed=None))]
    fn generate(spec: &str, seed: Option<u64>) -> PyResult<Self> {
        let mut g = metric::parse_generator_spec(spec).map_err(err)?;
        if let Some(s) = seed {
            g.seed = metric::Seed(s);
        }
        g.build().map(wrap).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        metric::read_json(text.as_bytes()).map(wrap).map_err(err)
    }

    #[staticmethod]
    fn from_csv(text: &str) -> PyResult<Self> {
        metric::read_csv(text.as_bytes()).map(wrap).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&SpaceDescriptor::from_space(&self.inner)).map_err(err)
    }

    fn to_csv(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        metric::write_csv(&self.inner, &mut buf).map_err(err)?;
        String::from_utf8(buf).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.labels().to_vec()
    }

    #[getter]
    fn omega(&self) -> Option<usize> {
        self.inner.omega()
    }

    #[getter]
    fn matrix(&self) -> Vec<Vec<f64>> {
        self.inner
            .rows()
            .into_iter()
            .map(|r| r.into_iter().map(|d| d.finite().unwrap_or(f64::INFINITY)).collect())
            .collect()
    }

    #[getter]
    fn diameter(&self) -> f64 {
        self.inner.diameter()
    }

    fn d(&self, i: usize, j: usize) -> PyResult<f64> {
        self.inner.check_index(i).map_err(err)?;
        self.inner.check_index(j).map_err(err)?;
        Ok(self.inner.get(i, j).finite().unwrap_or(f64::INFINITY))
    }

    fn validate(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &metric::validate(&self.inner))
    }

    fn is_valid(&self) -> bool {
        metric::validate(&self.inner).ok
    }

    fn scale(&self, factor: f64) -> PyResult<Self> {
        self.inner.scale(factor).map(wrap).map_err(err)
    }

    fn snowflake(&self, eps: f64) -> PyResult<Self> {
        self.inner.snowflake(eps).map(wrap).map_err(err)
    }

    fn subspace(&self, indices: Vec<usize>) -> PyResult<Self> {
        self.inner.subspace(&indices).map(wrap).map_err(err)
    }

    fn permute(&self, perm: Vec<usize>) -> PyResult<Self> {
        self.inner.permute(&perm).map(wrap).map_err(err)
    }

    fn restrict_omega(&self) -> PyResult<Self> {
        self.inner.restrict_omega().map(wrap).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.inner.n()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        match self.inner.omega() {
            Some(w) => format!("MetricSpace(n={}, omega={w})", self.inner.n()),
            None => format!("MetricSpace(n={})", self.inner.n()),
        }
    }
}

#[pyfunction]
fn ptolemy_defect(py: Python<'_>, space: &PyMetricSpace) -> PyResult<Py<PyAny>> {
    let s = space.inner.clone();
    let cert = py.detach(move || moebius::ptolemy_defect(&s)).map_err(err)?;
    to_py(py, &cert)
}

#[pyfunction]
fn pt_kappa_defect(py: Python<'_>, space: &PyMetricSpace, kappa: f64) -> PyResult<Py<PyAny>> {
    let s = space.inner.clone();
    let cert = py.detach(move || hyperbolicity::pt_kappa_defect(&s, kappa)).map_err(err)?;
    to_py(py, &cert)
}

#[pyfunction]
#[pyo3(signature = (space, kappa=-1.0))]
fn apt_defect(py: Python<'_>, space: &PyMetricSpace, kappa: f64) -> PyResult<Py<PyAny>> {
    let s = space.inner.clone();
    let cert = py.detach(move || hyperbolicity::apt_defect(&s, kappa)).map_err(err)?;
    to_py(py, &cert)
}

#[pyfunction]
fn gromov_delta(py: Python<'_>, space: &PyMetricSpace) -> PyResult<Py<PyAny>> {
    let s = space.inner.clone();
    let cert = py.detach(move || hyperbolicity::gromov_delta(&s));
    to_py(py, &cert)
}

#[pyfunction]
#[pyo3(signature = (space, kappa=-1.0))]
fn ascat_defect(py: Python<'_>, space: &PyMetricSpace, kappa: f64) -> PyResult<Py<PyAny>> {
    let s = space.inner.clone();
    let cert = py.detach(move || comparison::ascat_defect(&s, kappa)).map_err(err)?;
    to_py(py, &cert)
}

#[pyfunction]
fn hyperbolicity_bound_from_apt(defect: f64) -> f64 {
    hyperbolicity::hyperbolicity_bound_from_apt(defect)
}

#[pyfunction]
fn gromov_product(space: &PyMetricSpace, x: usize, y: usize, z: usize) -> PyResult<f64> {
    hyperbolicity::gromov_product(&space.inner, x, y, z).map_err(err)
}

#[pyfunction]
fn crt(space: &PyMetricSpace, quad: [usize; 4]) -> PyResult<(f64, f64, f64)> {
    let t = moebius::crt(&space.inner, quad).map_err(err)?;
    Ok((t.0[0], t.0[1], t.0[2]))
}

#[pyfunction]
fn moebius_equivalent(py: Python<'_>, a: &PyMetricSpace, b: &PyMetricSpace) -> PyResult<Py<PyAny>> {
    to_py(py, &moebius::moebius_equivalent(&a.inner, &b.inner).map_err(err)?)
}

/// Metric involution at `at`; returns the new space and its validation dict.
#[pyfunction]
fn involute(py: Python<'_>, space: &PyMetricSpace, at: usize) -> PyResult<(PyMetricSpace, Py<PyAny>)> {
    let inv = moebius::involute(&space.inner, at).map_err(err)?;
    Ok((wrap(inv.space), to_py(py, &inv.report)?))
}

#[pyfunction]
fn homothety_ratio(py: Python<'_>, a: &PyMetricSpace, b: &PyMetricSpace) -> PyResult<Py<PyAny>> {
    to_py(py, &moebius::homothety_ratio(&a.inner, &b.inner).map_err(err)?)
}

#[pyfunction]
fn comparison_angle(a: f64, b: f64, c: f64, kappa: f64) -> PyResult<f64> {
    comparison::comparison_angle(a, b, c, kappa).map_err(err)
}

/// Free diagonal `p̄2p̄4` of the comparison quadrilateral.
#[pyfunction]
fn comparison_diagonal(d12: f64, d13: f64, d14: f64, d23: f64, d24: f64, d34: f64, kappa: f64) -> PyResult<f64> {
    let d = QuadDistances { d12, d13, d14, d23, d24, d34 };
    comparison::comparison_diagonal(&d, kappa).map_err(err)
}

/// Hyperbolic cone over a finite metric space.
#[pyclass(name = "Cone", module = "ptolemaic", frozen)]
pub struct PyCone {
    inner: ConeSpace,
}

fn point((base, height): (usize, f64)) -> ConePoint {
    ConePoint::new(base, height)
}

#[pymethods]
impl PyCone {
    /// Heights default to the geometric grid below the base diameter.
    #[new]
    #[pyo3(signature = (base, heights=None, truncate=false, z0=0))]
    fn new(base: &PyMetricSpace, heights: Option<Vec<f64>>, truncate: bool, z0: usize) -> PyResult<Self> {
        let z = &base.inner;
        let hs = match heights {
            Some(h) => h,
            None => cone::parse_heights("geometric", z.diameter()).map_err(err)?,
        };
        let inner = cone::build_cone_at(z, &hs, truncate, z0).map_err(err)?;
        Ok(PyCone { inner })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn z0(&self) -> usize {
        self.inner.z0()
    }

    #[getter]
    fn points(&self) -> Vec<(usize, f64)> {
        self.inner.points().iter().map(|p| (p.base, p.height)).collect()
    }

    fn distance(&self, p: (usize, f64), q: (usize, f64)) -> PyResult<f64> {
        self.inner.distance(point(p), point(q)).map_err(err)
    }

    /// Gromov product at `o = (z0, 1)`.
    fn gromov_product(&self, p: (usize, f64), q: (usize, f64)) -> PyResult<f64> {
        cone::cone_gromov_product(point(p), point(q), &self.inner).map_err(err)
    }

    fn to_space(&self) -> PyMetricSpace {
        wrap(self.inner.to_space())
    }

    #[pyo3(signature = (p, i_max=1 << 20))]
    fn busemann(&self, py: Python<'_>, p: (usize, f64), i_max: u64) -> PyResult<Py<PyAny>> {
        to_py(py, &cone::busemann_approx(point(p), &self.inner, i_max).map_err(err)?)
    }

    /// One of `cauchy_shrinking`, `escaping`, `divergent`.
    fn classify(&self, py: Python<'_>, points: Vec<(usize, f64)>) -> PyResult<Py<PyAny>> {
        let pts: Vec<ConePoint> = points.into_iter().map(point).collect();
        to_py(py, &cone::classify_sequence(&pts, &self.inner).map_err(err)?)
    }

    fn __repr__(&self) -> String {
        format!("Cone(points={}, z0={})", self.inner.len(), self.inner.z0())
    }
}

/// Boundary metric with `ω` last; returns the space and the fit details.
#[pyfunction]
#[pyo3(signature = (space, z0=0))]
fn boundary_metric(py: Python<'_>, space: &PyMetricSpace, z0: usize) -> PyResult<(PyMetricSpace, Py<PyAny>)> {
    let b = cone::boundary_metric(&space.inner, z0).map_err(err)?;
    let details = serde_json::json!({
        "z0": b.z0,
        "omega": b.omega(),
        "approximants": b.approximants,
        "fitted_c": b.fitted_c,
        "monotone": b.monotone,
    });
    Ok((wrap(b.rho), to_py(py, &details)?))
}

#[pyfunction]
#[pyo3(signature = (space, z0=0))]
fn recovered_involution(space: &PyMetricSpace, z0: usize) -> PyResult<PyMetricSpace> {
    cone::recovered_involution(&space.inner, z0).map(wrap).map_err(err)
}

#[pymodule]
#[pyo3(name = "ptolemaic")]
fn ptolemaic_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMetricSpace>()?;
    m.add_class::<PyCone>()?;
    m.add_function(wrap_pyfunction!(ptolemy_defect, m)?)?;
    m.add_function(wrap_pyfunction!(pt_kappa_defect, m)?)?;
    m.add_function(wrap_pyfunction!(apt_defect, m)?)?;
    m.add_function(wrap_pyfunction!(gromov_delta, m)?)?;
    m.add_function(wrap_pyfunction!(ascat_defect, m)?)?;
    m.add_function(wrap_pyfunction!(hyperbolicity_bound_from_apt, m)?)?;
    m.add_function(wrap_pyfunction!(gromov_product, m)?)?;
    m.add_function(wrap_pyfunction!(crt, m)?)?;
    m.add_function(wrap_pyfunction!(moebius_equivalent, m)?)?;
    m.add_function(wrap_pyfunction!(involute, m)?)?;
    m.add_function(wrap_pyfunction!(homothety_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(comparison_angle, m)?)?;
    m.add_function(wrap_pyfunction!(comparison_diagonal, m)?)?;
    m.add_function(wrap_pyfunction!(boundary_metric, m)?)?;
    m.add_function(wrap_pyfunction!(recovered_involution, m)?)?;
    m.add("APT_THRESHOLD", 4.0)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
