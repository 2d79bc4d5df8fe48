//! Python bindings. Exact values cross the boundary as `"p/q"` strings and
//! whole objects as their JSON file format.

use engine::certify::{
    self, read_certificate, read_problem, read_sos, write_certificate, write_problem, write_report,
    write_sos, CertifyConfig, CertifyError, Domain,
};
use engine::exactalg::{format_rat, parse_rat, RatMatrix};
use engine::polytope::barycentric_coords;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

create_exception!(
    handelman,
    CertificationError,
    PyException,
    "No certificate could be produced."
);
create_exception!(
    handelman,
    VerificationError,
    PyException,
    "A certificate failed verification."
);

fn value_error(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn certify_error(e: CertifyError) -> PyErr {
    match e {
        CertifyError::Input(_) | CertifyError::Polytope(_) => value_error(e),
        other => CertificationError::new_err(other.to_string()),
    }
}

fn rows(m: &RatMatrix) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(format_rat).collect())
        .collect()
}

/// A matrix polynomial and the polyhedron or simplex it should be
/// positive definite on.
#[pyclass(frozen, module = "handelman")]
struct Problem {
    inner: certify::Problem,
}

#[pymethods]
impl Problem {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Problem {
            inner: read_problem(text).map_err(value_error)?,
        })
    }

    fn to_json(&self) -> String {
        write_problem(&self.inner)
    }

    /// Number of variables.
    #[getter]
    fn dim(&self) -> usize {
        self.inner.matrix.nvars()
    }

    /// Matrix size `t`.
    #[getter]
    fn size(&self) -> usize {
        self.inner.matrix.size()
    }

    #[getter]
    fn is_simplex(&self) -> bool {
        matches!(self.inner.domain, Domain::Simplex(_))
    }

    /// `F(x)` at a rational point, as rows of `"p/q"` strings.
    fn evaluate(&self, point: Vec<String>) -> PyResult<Vec<Vec<String>>> {
        if point.len() != self.dim() {
            return Err(value_error(format!("expected {} coordinates", self.dim())));
        }
        let x = point
            .iter()
            .map(|s| parse_rat(s))
            .collect::<Result<Vec<_>, _>>()
            .map_err(value_error)?;
        Ok(rows(&self.inner.matrix.eval(&x)))
    }

    fn __repr__(&self) -> String {
        format!(
            "Problem(dim={}, size={}, degree={})",
            self.dim(),
            self.size(),
            self.inner.matrix.degree()
        )
    }
}

/// `F = Σ_α F_α·L^α` with every coefficient positive definite.
#[pyclass(frozen, module = "handelman")]
struct Certificate {
    inner: certify::HandelmanCertificate,
}

#[pymethods]
impl Certificate {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Certificate {
            inner: read_certificate(text).map_err(value_error)?,
        })
    }

    fn to_json(&self) -> String {
        write_certificate(&self.inner)
    }

    /// Power of `Σ L_i` used in the expansion.
    #[getter]
    fn n(&self) -> u64 {
        self.inner.n
    }

    #[getter]
    fn degree(&self) -> u64 {
        self.inner.degree
    }

    /// The scaled forms `L_i`, as strings in `x1, x2, …`.
    #[getter]
    fn forms(&self) -> Vec<String> {
        self.inner
            .forms
            .iter()
            .map(|l| l.named("x").to_string())
            .collect()
    }

    /// `(alpha, matrix)` pairs, matrices as rows of `"p/q"` strings.
    fn terms(&self) -> Vec<(Vec<u32>, Vec<Vec<String>>)> {
        self.inner
            .terms
            .iter()
            .map(|t| (t.alpha.exponents().to_vec(), rows(&t.matrix)))
            .collect()
    }

    /// The bound report as JSON.
    fn report_json(&self) -> String {
        write_report(&self.inner.report)
    }

    fn __len__(&self) -> usize {
        self.inner.terms.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Certificate(n={}, degree={}, terms={})",
            self.inner.n,
            self.inner.degree,
            self.inner.terms.len()
        )
    }
}

/// Sum of squares regrouping of a certificate by exponent parity.
#[pyclass(frozen, module = "handelman")]
struct SosCertificate {
    inner: certify::SosCertificate,
}

#[pymethods]
impl SosCertificate {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(SosCertificate {
            inner: read_sos(text).map_err(value_error)?,
        })
    }

    fn to_json(&self) -> String {
        write_sos(&self.inner)
    }

    #[getter]
    fn degree(&self) -> u64 {
        self.inner.degree
    }

    /// `(parity, number of squares)` per bucket.
    fn buckets(&self) -> Vec<(Vec<u32>, usize)> {
        self.inner
            .buckets
            .iter()
            .map(|b| (b.parity.exponents().to_vec(), b.factors.len()))
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "SosCertificate(degree={}, buckets={})",
            self.inner.degree,
            self.inner.buckets.len()
        )
    }
}

fn config(
    seed: u64,
    resolution: u32,
    n_cap: Option<u64>,
    escalation_rounds: u32,
    mem_cap_mb: u64,
) -> CertifyConfig {
    let mut config = CertifyConfig {
        seed,
        resolution,
        n_cap,
        escalation_rounds,
        ..CertifyConfig::default()
    };
    config.limits.max_bytes = mem_cap_mb.saturating_mul(1 << 20);
    config
}

/// Builds a certificate. Releases the interpreter lock while working.
#[pyfunction]
#[pyo3(name = "certify", signature = (problem, *, seed = 0, resolution = 24, n_cap = None, escalation_rounds = 6, mem_cap_mb = 2048))]
fn certify_problem(
    py: Python<'_>,
    problem: &Problem,
    seed: u64,
    resolution: u32,
    n_cap: Option<u64>,
    escalation_rounds: u32,
    mem_cap_mb: u64,
) -> PyResult<Certificate> {
    let config = config(seed, resolution, n_cap, escalation_rounds, mem_cap_mb);
    let inner = py
        .detach(|| problem.inner.certify(&config, &mut |_| {}))
        .map_err(certify_error)?;
    Ok(Certificate { inner })
}

/// Raises `VerificationError` unless the certificate represents the
/// problem's matrix on the problem's domain.
#[pyfunction]
fn verify(py: Python<'_>, certificate: &Certificate, problem: &Problem) -> PyResult<()> {
    let cert = &certificate.inner;
    let same = match &problem.inner.domain {
        Domain::Polyhedron(p) => cert.vertices.is_none() && cert.polyhedron == *p,
        Domain::Simplex(v) => cert.vertices.as_ref() == Some(v),
    };
    if !same {
        return Err(VerificationError::new_err(
            "certificate is for a different domain",
        ));
    }
    py.detach(|| certify::verify_certificate(cert, &problem.inner.matrix))
        .map_err(|e| VerificationError::new_err(e.to_string()))
}

#[pyfunction]
fn to_schmudgen(certificate: &Certificate) -> PyResult<SosCertificate> {
    let inner = certify::to_schmudgen(&certificate.inner)
        .map_err(|e| VerificationError::new_err(e.to_string()))?;
    Ok(SosCertificate { inner })
}

#[pyfunction]
fn verify_sos(py: Python<'_>, sos: &SosCertificate, problem: &Problem) -> PyResult<()> {
    py.detach(|| certify::verify_sos(&sos.inner, &problem.inner.matrix))
        .map_err(|e| VerificationError::new_err(e.to_string()))
}

/// Bound report (JSON) computed without expanding.
#[pyfunction]
#[pyo3(signature = (problem, *, seed = 0, resolution = 24))]
fn inspect(py: Python<'_>, problem: &Problem, seed: u64, resolution: u32) -> PyResult<String> {
    let config = config(seed, resolution, None, 0, 2048);
    let report = py
        .detach(|| match &problem.inner.domain {
            Domain::Polyhedron(p) => {
                certify::inspect(&problem.inner.matrix, p, &config).map(|i| i.report)
            }
            Domain::Simplex(v) => {
                let s = barycentric_coords(v)?;
                certify::inspect_simplex(&problem.inner.matrix, &s, &config)
            }
        })
        .map_err(certify_error)?;
    Ok(write_report(&report))
}

/// The unit square example with its degree-4 matrix.
#[pyfunction]
fn square_example() -> Problem {
    Problem {
        inner: certify::Problem {
            domain: Domain::Polyhedron(engine::examples::square()),
            matrix: engine::examples::square_matrix(),
        },
    }
}

/// `[[1 + x², -x], [-x, 2 - x]]` on `[0, 1]`.
#[pyfunction]
fn interval_example() -> Problem {
    Problem {
        inner: certify::Problem {
            domain: Domain::Polyhedron(engine::examples::unit_interval()),
            matrix: engine::examples::interval_matrix(),
        },
    }
}

#[pymodule]
fn handelman(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Problem>()?;
    m.add_class::<Certificate>()?;
    m.add_class::<SosCertificate>()?;
    m.add_function(wrap_pyfunction!(certify_problem, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(to_schmudgen, m)?)?;
    m.add_function(wrap_pyfunction!(verify_sos, m)?)?;
    m.add_function(wrap_pyfunction!(inspect, m)?)?;
    m.add_function(wrap_pyfunction!(square_example, m)?)?;
    m.add_function(wrap_pyfunction!(interval_example, m)?)?;
    m.add(
        "CertificationError",
        m.py().get_type::<CertificationError>(),
    )?;
    m.add("VerificationError", m.py().get_type::<VerificationError>())?;
    Ok(())
}
