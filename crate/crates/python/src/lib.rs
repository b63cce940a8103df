//! Python bindings for `lifespan-core`.
//!
//! Long computations release the GIL. Every core error surfaces as `ValueError`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use lifespan_core::campaign::{bound_for, reconcile, run_campaign, simulate, LifespanReport, RunStatus};
use lifespan_core::chain::check_minorant;
use lifespan_core::config::Config;
use lifespan_core::exponents::{compute_alpha, lifespan_exponent, parse_rational, to_f64, SystemParams};
use lifespan_core::ode::{integrate, OdeSystemSpec};
use lifespan_core::test_function::{build_psi, TestFunctionSpec};

fn py_err(e: lifespan_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Exact exponent data of `u_j' = Δu_j + |u_{j+1}|^{p_j}` on `R^n`.
#[pyclass(frozen, get_all, module = "lifespan")]
pub struct Exponents {
    n: u32,
    p: Vec<String>,
    /// Exact rationals as `"a/b"` strings.
    alpha: Vec<String>,
    alpha_float: Vec<f64>,
    alpha_max: String,
    /// Zero-based.
    argmax: usize,
    criticality: String,
    /// Small-data decay vector when one exists.
    decay: Option<Vec<String>>,
    lifespan_exponent: Option<String>,
}

#[pymethods]
impl Exponents {
    fn __repr__(&self) -> String {
        format!(
            "Exponents(n={}, p={:?}, alpha={:?}, {})",
            self.n, self.p, self.alpha, self.criticality
        )
    }
}

/// Exponents for dimension `n` and powers `p`.
///
/// Entries of `p` may be ints, `fractions.Fraction`, floats or strings like `"3/2"`.
#[pyfunction]
fn exponents(n: u32, p: Vec<Bound<'_, PyAny>>) -> PyResult<Exponents> {
    let p = p
        .iter()
        .map(|v| parse_rational(&v.str()?.to_cow()?).map_err(py_err))
        .collect::<PyResult<Vec<_>>>()?;
    let params = SystemParams::new(n, p).map_err(py_err)?;
    let profile = compute_alpha(&params).map_err(py_err)?;
    let decay = profile.l_case2.as_ref().or(profile.l_case1.as_ref());
    Ok(Exponents {
        n,
        p: params.exponents().iter().map(|v| v.to_string()).collect(),
        alpha: profile.alpha.iter().map(|v| v.to_string()).collect(),
        alpha_float: profile.alpha.iter().map(to_f64).collect(),
        alpha_max: profile.alpha_max.to_string(),
        argmax: profile.argmax_index,
        criticality: profile.criticality.to_string(),
        decay: decay.map(|l| l.iter().map(|v| v.to_string()).collect()),
        lifespan_exponent: lifespan_exponent(&profile).ok().map(|e| e.to_string()),
    })
}

#[pyclass(frozen, get_all, module = "lifespan")]
pub struct OdeRun {
    times: Vec<f64>,
    /// `states[i][j]` is component `j` at `times[i]`.
    states: Vec<Vec<f64>>,
    t_num: Option<f64>,
    achieved_max: f64,
    extrapolation_exponent: f64,
}

#[pyclass(frozen, get_all, module = "lifespan")]
pub struct MinorantCheck {
    t0_tilde: f64,
    threshold: f64,
    t_num: Option<f64>,
    dominates: bool,
    blowup_before_bound: bool,
    holds: bool,
    samples: usize,
}

/// `f_j' = c_j e^{-λ̃ t} f_{j+1}^{p_j}` from `initial`.
#[pyclass(frozen, module = "lifespan")]
pub struct OdeSystem {
    spec: OdeSystemSpec,
}

#[pymethods]
impl OdeSystem {
    #[new]
    #[pyo3(signature = (p, initial, coefficients=None, lambda_tilde=0.0))]
    fn new(p: Vec<f64>, initial: Vec<f64>, coefficients: Option<Vec<f64>>, lambda_tilde: f64) -> PyResult<Self> {
        let coefficients = coefficients.unwrap_or_else(|| vec![1.0; p.len()]);
        let spec = OdeSystemSpec::new(p, coefficients, lambda_tilde, initial).map_err(py_err)?;
        Ok(Self { spec })
    }

    #[getter]
    fn alpha(&self) -> Vec<f64> {
        self.spec.alpha()
    }

    #[pyo3(signature = (horizon, rel_tol=1e-8))]
    fn integrate(&self, py: Python<'_>, horizon: f64, rel_tol: f64) -> PyResult<OdeRun> {
        let run = py.detach(|| integrate(&self.spec, horizon, rel_tol)).map_err(py_err)?;
        Ok(OdeRun {
            times: run.trajectory.times.clone(),
            states: run.trajectory.states.clone(),
            t_num: run.estimate.t_num(),
            achieved_max: run.estimate.achieved_max,
            extrapolation_exponent: run.estimate.extrapolation_exponent,
        })
    }

    /// Compares the solution with its closed-form minorant (needs `k >= 2`).
    #[pyo3(signature = (rel_tol=1e-10))]
    fn check_minorant(&self, py: Python<'_>, rel_tol: f64) -> PyResult<MinorantCheck> {
        let c = py.detach(|| check_minorant(&self.spec, rel_tol)).map_err(py_err)?;
        Ok(MinorantCheck {
            t0_tilde: c.minorant.t0_tilde,
            threshold: c.minorant.threshold,
            t_num: c.t_num,
            dominates: c.dominates,
            blowup_before_bound: c.blowup_before_bound,
            holds: c.holds(),
            samples: c.samples,
        })
    }
}

/// Normalized principal Dirichlet eigenfunction of the unit ball.
#[pyclass(frozen, module = "lifespan")]
pub struct TestFunction {
    spec: TestFunctionSpec,
}

#[pymethods]
impl TestFunction {
    #[new]
    fn new(n: u32) -> PyResult<Self> {
        Ok(Self { spec: build_psi(n).map_err(py_err)? })
    }

    #[getter]
    fn lambda_(&self) -> f64 {
        self.spec.lambda
    }

    fn psi(&self, r: f64) -> f64 {
        self.spec.psi(r)
    }

    fn laplacian_psi(&self, r: f64) -> f64 {
        self.spec.laplacian_psi(r)
    }

    fn phi(&self, big_r: f64, r: f64) -> f64 {
        self.spec.phi(big_r, r)
    }

    fn eigen_residual(&self, radii: Vec<f64>) -> f64 {
        self.spec.eigen_residual(&radii)
    }

    fn l1_norm(&self) -> f64 {
        self.spec.l1_norm()
    }
}

#[pyclass(frozen, get_all, module = "lifespan")]
pub struct UpperBound {
    r0: f64,
    t0: f64,
    threshold: f64,
    t0_tilde: f64,
    lambda_chain: Vec<f64>,
    j0: usize,
}

#[pyclass(frozen, get_all, module = "lifespan")]
pub struct Simulation {
    eps: f64,
    t_num: Option<f64>,
    t0: Option<f64>,
    times: Vec<f64>,
    /// `sup[i][j]` is `max u_j` at `times[i]`.
    sup: Vec<Vec<f64>>,
    decay_exponents: Option<Vec<f64>>,
    inequality_holds: Option<bool>,
    steps: usize,
    mesh_nodes: usize,
}

/// Campaign result; `runs` rows are `(eps, replicate, status, t_num, t0)`.
#[pyclass(frozen, module = "lifespan")]
pub struct Report {
    report: LifespanReport,
}

#[pymethods]
impl Report {
    #[getter]
    fn slope(&self) -> Option<(f64, f64)> {
        self.report.fit.map(|f| (f.slope, f.half_width))
    }

    #[getter]
    fn predicted_slope(&self) -> Option<f64> {
        self.report.predicted_slope
    }

    #[getter]
    fn runs(&self) -> Vec<(f64, usize, String, Option<f64>, Option<f64>)> {
        self.report
            .runs
            .iter()
            .map(|r| {
                let status = match &r.status {
                    RunStatus::BlowUp => "blowup".to_string(),
                    RunStatus::Global => "global".to_string(),
                    RunStatus::Failed(m) => format!("failed: {m}"),
                };
                (r.eps, r.replicate, status, r.t_num, r.t0)
            })
            .collect()
    }

    /// `(verdict, text)`; `alpha_max` replaces the predicted exponent.
    #[pyo3(signature = (alpha_max=None))]
    fn reconcile(&self, alpha_max: Option<f64>) -> (String, String) {
        let report = match alpha_max {
            Some(a) => self.report.with_alpha_max(a),
            None => self.report.clone(),
        };
        let rec = reconcile(&report);
        (rec.verdict.to_string(), rec.text())
    }

    fn to_toml(&self) -> PyResult<String> {
        lifespan_core::output::report_to_toml(&self.report).map_err(py_err)
    }
}

/// A PDE experiment described by a config document.
#[pyclass(frozen, module = "lifespan")]
pub struct Experiment {
    config: Config,
}

#[pymethods]
impl Experiment {
    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        let config = Config::parse(text).map_err(py_err)?;
        config.experiment().map_err(py_err)?;
        Ok(Self { config })
    }

    #[staticmethod]
    fn from_file(path: std::path::PathBuf) -> PyResult<Self> {
        let config = Config::load(&path).map_err(py_err)?;
        config.experiment().map_err(py_err)?;
        Ok(Self { config })
    }

    #[pyo3(signature = (eps=None))]
    fn bound(&self, py: Python<'_>, eps: Option<f64>) -> PyResult<UpperBound> {
        let eps = eps.unwrap_or_else(|| self.config.eps());
        let b = py
            .detach(|| {
                let exp = self.config.experiment()?;
                let spec = build_psi(exp.params.n())?;
                bound_for(&exp, &spec, eps)
            })
            .map_err(py_err)?;
        Ok(UpperBound {
            r0: b.r0,
            t0: b.t0,
            threshold: b.threshold,
            t0_tilde: b.minorant.t0_tilde,
            lambda_chain: b.lambda_chain,
            j0: b.j0,
        })
    }

    #[pyo3(signature = (eps=None))]
    fn simulate(&self, py: Python<'_>, eps: Option<f64>) -> PyResult<Simulation> {
        let eps = eps.unwrap_or_else(|| self.config.eps());
        let case = py
            .detach(|| simulate(&self.config.experiment()?, eps))
            .map_err(py_err)?;
        Ok(Simulation {
            eps,
            t_num: case.t_num(),
            t0: case.bound.as_ref().map(|b| b.t0),
            times: case.report.traces.iter().map(|r| r.t).collect(),
            sup: case.report.traces.iter().map(|r| r.sup.clone()).collect(),
            decay_exponents: case.report.decay_exponents.clone(),
            inequality_holds: case.inequality.as_ref().map(|w| w.holds),
            steps: case.report.steps,
            mesh_nodes: case.mesh_nodes,
        })
    }

    #[pyo3(signature = (seed=None, jobs=None))]
    fn campaign(&self, py: Python<'_>, seed: Option<u64>, jobs: Option<usize>) -> PyResult<Report> {
        let report = py
            .detach(|| run_campaign(&self.config.campaign(seed, jobs)?))
            .map_err(py_err)?;
        Ok(Report { report })
    }
}

#[pymodule]
fn _lifespan(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(exponents, m)?)?;
    m.add_class::<Exponents>()?;
    m.add_class::<OdeSystem>()?;
    m.add_class::<OdeRun>()?;
    m.add_class::<MinorantCheck>()?;
    m.add_class::<TestFunction>()?;
    m.add_class::<Experiment>()?;
    m.add_class::<UpperBound>()?;
    m.add_class::<Simulation>()?;
    m.add_class::<Report>()?;
    Ok(())
}
