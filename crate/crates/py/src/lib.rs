//! Python bindings. Rationals cross the boundary as `"p/q"` strings and
//! structured reports as JSON text.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use lowosc_core::analysis::{annulus_vacancy, certified_vertex_constant, density_ratio, fz_proxy_sample, Verdict};
use lowosc_core::build1d::{Build1d, ParamSeq};
use lowosc_core::buildmd::BuildMd;
use lowosc_core::gallery::{sine_f, sine_g, CantorModified};
use lowosc_core::{Error, EvalResult, Scalar};

fn py_err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn scalar(name: &str, v: &str) -> PyResult<Scalar> {
    v.parse().map_err(|_| PyValueError::new_err(format!("{name}: not a rational: {v:?}")))
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("reports serialize")
}

fn triple(r: EvalResult) -> (String, String, bool) {
    (r.bracket.lo.to_string(), r.bracket.hi.to_string(), r.partial)
}

/// Bracket `(lo, hi, partial)` of the one-dimensional construction at `x`.
#[pyfunction]
fn eval_1d(x: &str, eps: &str) -> PyResult<(String, String, bool)> {
    let r = Build1d::default().eval(&scalar("x", x)?, &scalar("eps", eps)?).map_err(py_err)?;
    Ok(triple(r))
}

/// Bracket of the m-dimensional construction (m = len(x)) at `x`.
#[pyfunction]
fn eval_md(x: Vec<String>, eps: &str) -> PyResult<(String, String, bool)> {
    let p = x.iter().map(|c| scalar("x", c)).collect::<PyResult<Vec<_>>>()?;
    let b = BuildMd::new(lowosc_core::buildmd::MdParams { m: p.len(), ..Default::default() }).map_err(py_err)?;
    Ok(triple(b.eval(&p, &scalar("eps", eps)?).map_err(py_err)?))
}

/// Level-set report of the one-dimensional construction, as JSON.
#[pyfunction]
fn level_set_1d(y: &str, depth: u32) -> PyResult<String> {
    Ok(to_json(&Build1d::default().level_set(&scalar("y", y)?, depth).map_err(py_err)?))
}

/// Chain certificate for level `z` (m = 2), as JSON.
#[pyfunction]
fn find_level_point(z: &str, depth: u32) -> PyResult<String> {
    Ok(to_json(&BuildMd::default().find_level_point(&scalar("z", z)?, depth).map_err(py_err)?))
}

/// `(ratio, vacant)` of the counting-proxy density check at link `n`.
#[pyfunction]
#[pyo3(signature = (z, n, depth = 5, resolution = 48))]
fn density(z: &str, n: u32, depth: u32, resolution: usize) -> PyResult<(Option<String>, bool)> {
    let b = BuildMd::default();
    let lp = b.find_level_point(&scalar("z", z)?, depth).map_err(py_err)?;
    let link = lp
        .certificate
        .links
        .get(n as usize)
        .ok_or_else(|| PyValueError::new_err("n must be below the certificate depth"))?;
    let tol = Scalar::zero();
    let pts = fz_proxy_sample(&b, &lp, n, resolution, &tol).map_err(py_err)?;
    let d = density_ratio(&pts, &lp.certificate.point, &link.r_sq, 1).map_err(py_err)?;
    let v = annulus_vacancy(&b, &lp, n, resolution, &tol).map_err(py_err)?;
    Ok((d.ratio.map(|r| r.to_string()), v.verdict == Verdict::Vacant))
}

/// The vertex constant `C*` for the default parameters.
#[pyfunction]
fn vertex_constant() -> PyResult<String> {
    Ok(certified_vertex_constant(&ParamSeq::default()).map_err(py_err)?.to_string())
}

/// Bracket of the Cantor-modified function at `x`.
#[pyfunction]
fn cantor_eval(x: &str) -> PyResult<(String, String, bool)> {
    Ok(triple(CantorModified::default().eval(&scalar("x", x)?).map_err(py_err)?))
}

#[pyfunction(name = "sine_g")]
fn py_sine_g(x: f64) -> f64 {
    sine_g(x)
}

#[pyfunction(name = "sine_f")]
fn py_sine_f(x: f64, y: f64) -> f64 {
    sine_f(x, y)
}

#[pymodule]
fn lowosc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(eval_1d, m)?)?;
    m.add_function(wrap_pyfunction!(eval_md, m)?)?;
    m.add_function(wrap_pyfunction!(level_set_1d, m)?)?;
    m.add_function(wrap_pyfunction!(find_level_point, m)?)?;
    m.add_function(wrap_pyfunction!(density, m)?)?;
    m.add_function(wrap_pyfunction!(vertex_constant, m)?)?;
    m.add_function(wrap_pyfunction!(cantor_eval, m)?)?;
    m.add_function(wrap_pyfunction!(py_sine_g, m)?)?;
    m.add_function(wrap_pyfunction!(py_sine_f, m)?)?;
    Ok(())
}
