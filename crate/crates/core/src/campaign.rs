//! Single simulations with their analytic bound, and amplitude sweeps over them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::chain::{pde_upper_bound, LaplacianFactor, UpperBoundResult};
use crate::error::{Error, Result};
use crate::exponents::{compute_alpha, lifespan_exponent, to_f64, Criticality, ExponentProfile, SystemParams};
use crate::pde::{default_mesh, run, verify_ode_inequality, InequalityWitness, InitialData, RunOptions, SimReport};
use crate::test_function::{build_psi, TestFunctionSpec};

/// Everything needed to run one PDE experiment apart from the data amplitude.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub params: SystemParams,
    /// Base data; the sweep multiplies it by `eps`.
    pub data: InitialData,
    /// Core mesh spacing.
    pub h: f64,
    /// Outer radius; chosen from the horizon when absent.
    pub outer: Option<f64>,
    /// Required for global runs; blow-up runs default to `1.5 T_0`.
    pub horizon: Option<f64>,
    pub eta: f64,
    pub diffusion_fraction: f64,
    pub factor: LaplacianFactor,
    /// Distinguished component of the bound; the largest `alpha_j` when absent.
    pub j0: Option<usize>,
}

impl Experiment {
    pub fn new(params: SystemParams, data: InitialData) -> Result<Self> {
        if data.k() != params.k() {
            return Err(Error::InvalidParams(format!(
                "data has {} components, system has {}",
                data.k(),
                params.k()
            )));
        }
        Ok(Self {
            params,
            data,
            h: 0.02,
            outer: None,
            horizon: None,
            eta: 1e-3,
            diffusion_fraction: 0.01,
            factor: LaplacianFactor::Doubled,
            j0: None,
        })
    }

    pub fn profile(&self) -> Result<ExponentProfile> {
        compute_alpha(&self.params)
    }
}

#[derive(Debug, Clone)]
pub struct CaseResult {
    pub eps: f64,
    pub report: SimReport,
    pub bound: Option<UpperBoundResult>,
    pub inequality: Option<InequalityWitness>,
    pub mesh_nodes: usize,
    pub outer: f64,
}

impl CaseResult {
    pub fn t_num(&self) -> Option<f64> {
        self.report.t_num()
    }
}

/// Upper bound `T_0` for data `eps * base`.
pub fn bound_for(exp: &Experiment, spec: &TestFunctionSpec, eps: f64) -> Result<UpperBoundResult> {
    let profile = exp.profile()?;
    let j0 = exp.j0.unwrap_or(profile.argmax_index);
    let data = exp.data.scaled(eps);
    let support = data.support();
    let u0 = |r: f64| spec.data_functional(|x| data.value(j0, x), support, r);
    pde_upper_bound(&exp.params, spec.lambda, &u0, j0, exp.factor)
}

/// Runs the PDE from `eps * base`, tracing `U_{j,R_0}` and checking the
/// differential inequality when the system is supercritical.
pub fn simulate(exp: &Experiment, eps: f64) -> Result<CaseResult> {
    let n = exp.params.n();
    let spec = build_psi(n)?;
    let profile = exp.profile()?;
    let supercritical = profile.criticality == Criticality::Supercritical;
    let bound = if supercritical { Some(bound_for(exp, &spec, eps)?) } else { None };
    let horizon = match (exp.horizon, &bound) {
        (Some(h), _) => h,
        (None, Some(b)) => 1.5 * b.t0,
        (None, None) => {
            return Err(Error::Config("a horizon is required for runs without a lifespan bound".into()))
        }
    };
    let data = exp.data.scaled(eps);
    let support = data.support();
    let r0 = bound.as_ref().map(|b| b.r0);
    let mut h = exp.h;
    if let Some(r) = r0 {
        h = h.min(r / 40.0);
    }
    let outer = exp
        .outer
        .unwrap_or_else(|| (8.0_f64).max(4.0 * support).max(8.0 * horizon.sqrt()).max(2.0 * r0.unwrap_or(0.0)));
    let mesh = default_mesh(h, support, outer)?;
    let mesh_nodes = mesh.len();
    let l_vector = profile
        .l_case2
        .as_ref()
        .or(profile.l_case1.as_ref())
        .map(|l| l.iter().map(to_f64).collect());
    let opts = RunOptions {
        eta: exp.eta,
        diffusion_fraction: exp.diffusion_fraction,
        time_scale: data.width * data.width,
        trace_radius: r0,
        l_vector,
        ..RunOptions::default()
    };
    let p = exp.params.p_f64();
    let report = run(data.sample(mesh), n, &p, &spec, horizon, &opts)?;
    let inequality = match &bound {
        Some(b) => Some(verify_ode_inequality(&report, n, &p, &b.lambda_chain)?),
        None => None,
    };
    Ok(CaseResult { eps, report, bound, inequality, mesh_nodes, outer })
}

/// Weighted least-squares line through `(x, y)` with a 95% half-width on the slope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub half_width: f64,
    pub points: usize,
}

/// The two extreme abscissae carry half weight.
pub fn fit_slope(x: &[f64], y: &[f64]) -> Result<SlopeFit> {
    let n = x.len();
    if n < 3 || y.len() != n {
        return Err(Error::InsufficientData { needed: 3, got: n.min(y.len()) });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut w = vec![1.0; n];
    w[order[0]] = 0.5;
    w[order[n - 1]] = 0.5;
    let sw: f64 = w.iter().sum();
    let mx = w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() / sw;
    let my = w.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / sw;
    let sxx: f64 = w.iter().zip(x).map(|(a, b)| a * (b - mx).powi(2)).sum();
    let sxy: f64 = (0..n).map(|i| w[i] * (x[i] - mx) * (y[i] - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InvalidParams("fit needs at least two distinct abscissae".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = (0..n).map(|i| w[i] * (y[i] - intercept - slope * x[i]).powi(2)).sum();
    let dof = (n - 2) as f64;
    let se = (rss / dof / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, dof)
        .map_err(|e| Error::InvalidParams(e.to_string()))?
        .inverse_cdf(0.975);
    Ok(SlopeFit { slope, intercept, half_width: t * se, points: n })
}

#[derive(Debug, Clone)]
pub struct Campaign {
    pub experiment: Experiment,
    pub eps_min: f64,
    pub eps_max: f64,
    pub points: usize,
    pub replicates: usize,
    /// Relative jitter of `eps` for replicates after the first.
    pub jitter: f64,
    pub seed: u64,
    pub jobs: usize,
    /// Allowed `|fitted - predicted|` for the slope.
    pub slope_tolerance: f64,
}

impl Campaign {
    pub fn new(experiment: Experiment, eps_min: f64, eps_max: f64, points: usize) -> Self {
        Self {
            experiment,
            eps_min,
            eps_max,
            points,
            replicates: 1,
            jitter: 0.0,
            seed: 0,
            jobs: 0,
            slope_tolerance: 0.3,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.eps_min > 0.0 && self.eps_max > self.eps_min) {
            return Err(Error::Config("need 0 < eps_min < eps_max".into()));
        }
        if (self.eps_max / self.eps_min).log10() < 2.0 - 1e-9 || self.points < 6 {
            return Err(Error::Config("the amplitude grid needs >= 2 decades and >= 6 points".into()));
        }
        if self.replicates == 0 || !(0.0..0.5).contains(&self.jitter) {
            return Err(Error::Config("replicates >= 1 and jitter in [0, 0.5) required".into()));
        }
        Ok(())
    }

    /// `(eps, replicate)` pairs in a fixed order.
    pub fn grid(&self) -> Vec<(f64, usize)> {
        let (a, b) = (self.eps_min.ln(), self.eps_max.ln());
        let mut out = Vec::with_capacity(self.points * self.replicates);
        for i in 0..self.points {
            let eps = (a + (b - a) * i as f64 / (self.points - 1) as f64).exp();
            for r in 0..self.replicates {
                let eps = if r == 0 || self.jitter == 0.0 {
                    eps
                } else {
                    let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ ((i as u64) << 32 | r as u64));
                    eps * (1.0 + self.jitter * rng.random_range(-1.0..1.0))
                };
                out.push((eps, r));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RunStatus {
    BlowUp,
    Global,
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub eps: f64,
    pub replicate: usize,
    pub status: RunStatus,
    pub t_num: Option<f64>,
    pub t0: Option<f64>,
    pub r0: Option<f64>,
    /// `eps^{-1/(alpha_max - n/2)}`, the lower-bound shape without its constant.
    pub lower_shape: Option<f64>,
    pub inequality_holds: Option<bool>,
    pub decay: Option<Vec<f64>>,
    pub steps: usize,
    pub mesh_nodes: usize,
}

impl RunRecord {
    pub fn dominated(&self, slack: f64) -> Option<bool> {
        Some(self.t_num? <= self.t0? * (1.0 + slack))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LifespanReport {
    pub n: u32,
    pub p: Vec<String>,
    pub alpha_max: f64,
    pub criticality: Criticality,
    /// `-1 / (alpha_max - n/2)`; absent outside the blow-up regime.
    pub predicted_slope: Option<f64>,
    pub slope_tolerance: f64,
    pub runs: Vec<RunRecord>,
    pub fit: Option<SlopeFit>,
}

impl LifespanReport {
    pub fn failed_fraction(&self) -> f64 {
        if self.runs.is_empty() {
            return 0.0;
        }
        let failed = self.runs.iter().filter(|r| matches!(r.status, RunStatus::Failed(_))).count();
        failed as f64 / self.runs.len() as f64
    }

    pub fn all_global(&self) -> bool {
        !self.runs.is_empty() && self.runs.iter().all(|r| r.status == RunStatus::Global)
    }

    /// Copy whose predicted slope comes from a different `alpha_max`.
    pub fn with_alpha_max(&self, alpha_max: f64) -> Self {
        let gap = alpha_max - self.n as f64 / 2.0;
        let mut out = self.clone();
        out.alpha_max = alpha_max;
        out.predicted_slope = (gap > 0.0).then(|| -1.0 / gap);
        for r in &mut out.runs {
            r.lower_shape = out.predicted_slope.map(|s| r.eps.powf(s));
        }
        out
    }
}

fn record_from(eps: f64, replicate: usize, slope: Option<f64>, res: Result<CaseResult>) -> RunRecord {
    let lower_shape = slope.map(|s| eps.powf(s));
    match res {
        Ok(c) => RunRecord {
            eps,
            replicate,
            status: if c.t_num().is_some() { RunStatus::BlowUp } else { RunStatus::Global },
            t_num: c.t_num(),
            t0: c.bound.as_ref().map(|b| b.t0),
            r0: c.bound.as_ref().map(|b| b.r0),
            lower_shape,
            inequality_holds: c.inequality.as_ref().map(|w| w.holds),
            decay: c.report.decay_exponents.clone(),
            steps: c.report.steps,
            mesh_nodes: c.mesh_nodes,
        },
        Err(e) => RunRecord {
            eps,
            replicate,
            status: RunStatus::Failed(e.to_string()),
            t_num: None,
            t0: None,
            r0: None,
            lower_shape,
            inequality_holds: None,
            decay: None,
            steps: 0,
            mesh_nodes: 0,
        },
    }
}

/// Runs every grid point in parallel and fits `ln T_num` against `ln eps`.
///
/// Individual failures are recorded, not propagated; more than 20% failures
/// fails the campaign.
pub fn run_campaign(c: &Campaign) -> Result<LifespanReport> {
    c.validate()?;
    let exp = &c.experiment;
    let profile = exp.profile()?;
    let slope = lifespan_exponent(&profile).ok().map(|r| to_f64(&r));
    let grid = c.grid();
    let work = || -> Vec<RunRecord> {
        grid.par_iter()
            .map(|&(eps, rep)| record_from(eps, rep, slope, simulate(exp, eps)))
            .collect()
    };
    let runs = if c.jobs == 0 {
        work()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(c.jobs)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(work)
    };
    let mut report = LifespanReport {
        n: exp.params.n(),
        p: exp.params.exponents().iter().map(|p| p.to_string()).collect(),
        alpha_max: to_f64(&profile.alpha_max),
        criticality: profile.criticality,
        predicted_slope: slope,
        slope_tolerance: c.slope_tolerance,
        runs,
        fit: None,
    };
    if report.failed_fraction() > 0.2 {
        let first = report
            .runs
            .iter()
            .find_map(|r| match &r.status {
                RunStatus::Failed(m) => Some(m.clone()),
                _ => None,
            })
            .unwrap_or_default();
        return Err(Error::PreconditionViolation(format!(
            "{:.0}% of runs failed, first: {first}",
            100.0 * report.failed_fraction()
        )));
    }
    let (x, y): (Vec<f64>, Vec<f64>) = report
        .runs
        .iter()
        .filter_map(|r| r.t_num.map(|t| (r.eps.ln(), t.ln())))
        .unzip();
    if slope.is_some() && x.len() >= 3 {
        report.fit = fit_slope(&x, &y).ok();
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Reconciliation {
    pub verdict: Verdict,
    pub lines: Vec<String>,
}

impl Reconciliation {
    pub fn text(&self) -> String {
        let mut s = format!("verdict: {}\n", self.verdict);
        for l in &self.lines {
            s.push_str(l);
            s.push('\n');
        }
        s
    }
}

/// Slack on `T_num <= T_0`.
pub const DOMINANCE_SLACK: f64 = 0.05;

/// Sandwich check: every measured lifespan lies below its `T_0`, the fitted
/// slope matches the predicted exponent, and the prefactors
/// `T_num eps^{1/(alpha_max - n/2)}` stay within the band the slope tolerance allows.
pub fn reconcile(report: &LifespanReport) -> Reconciliation {
    let mut lines = Vec::new();
    let blowups: Vec<&RunRecord> = report.runs.iter().filter(|r| r.t_num.is_some()).collect();
    let (Some(pred), Some(fit)) = (report.predicted_slope, report.fit) else {
        lines.push(format!("runs: {}, blow-ups: {}; nothing to reconcile", report.runs.len(), blowups.len()));
        return Reconciliation { verdict: Verdict::Inconclusive, lines };
    };
    let mut ok = true;

    let slope_ok = (fit.slope - pred).abs() <= report.slope_tolerance;
    ok &= slope_ok;
    lines.push(format!(
        "slope: fitted {:.4} +/- {:.4} ({} points), predicted {:.4}, tolerance {} -> {}",
        fit.slope,
        fit.half_width,
        fit.points,
        pred,
        report.slope_tolerance,
        if slope_ok { "ok" } else { "MISMATCH" }
    ));

    let mut dominated = 0;
    for r in &blowups {
        match r.dominated(DOMINANCE_SLACK) {
            Some(true) => dominated += 1,
            Some(false) => {
                ok = false;
                lines.push(format!(
                    "upper bound violated at eps = {:.6e}: T_num = {:.6e} > T_0 = {:.6e}",
                    r.eps,
                    r.t_num.unwrap(),
                    r.t0.unwrap()
                ));
            }
            None => {
                ok = false;
                lines.push(format!("eps = {:.6e}: no upper bound available", r.eps));
            }
        }
    }
    lines.push(format!("upper bound: {dominated}/{} runs with T_num <= 1.05 T_0", blowups.len()));

    let prefactors: Vec<f64> = blowups.iter().map(|r| r.t_num.unwrap() * r.eps.powf(-pred)).collect();
    let (lo, hi) = prefactors
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(a, b), c| (a.min(*c), b.max(*c)));
    let eps_lo = blowups.iter().map(|r| r.eps).fold(f64::INFINITY, f64::min);
    let eps_hi = blowups.iter().map(|r| r.eps).fold(0.0, f64::max);
    let decades = (eps_hi / eps_lo).log10();
    let allowed = 10f64.powf(report.slope_tolerance * decades);
    let band_ok = hi / lo <= allowed;
    ok &= band_ok;
    lines.push(format!(
        "lower bound: c = {lo:.4e}, T_num / (c eps^({pred:.4})) in [1, {:.3}], allowed {allowed:.3} -> {}",
        hi / lo,
        if band_ok { "ok" } else { "OUT OF BAND" }
    ));

    let ineq_fail = blowups.iter().filter(|r| r.inequality_holds == Some(false)).count();
    if ineq_fail > 0 {
        ok = false;
    }
    lines.push(format!("functional inequality violated on {ineq_fail} runs"));

    Reconciliation { verdict: if ok { Verdict::Pass } else { Verdict::Fail }, lines }
}
