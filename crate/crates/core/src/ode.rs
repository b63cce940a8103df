//! Adaptive integration of the cyclic ODE system
//!
//! ```text
//! f_j' = C_j |f_{j+1}|^{p_j}          (j < k)
//! f_k' = C_k e^{-lt t} |f_1|^{p_k}
//! ```
//!
//! with blow-up detection. Integration stops once a component passes the
//! escape threshold; the blow-up time is then extrapolated from the final
//! decade of growth, where `f_1 ~ c (T - t)^{-alpha_1}`.
//!
//! Near the singularity `T - t` drops far below the resolution of `t` itself,
//! so the trajectory keeps every accepted step size and measures distances to
//! the end of the run as suffix sums of steps.

use crate::error::{Error, Result};

pub const ESCAPE_THRESHOLD: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct OdeSystemSpec {
    pub p: Vec<f64>,
    pub coefficients: Vec<f64>,
    pub lambda_tilde: f64,
    pub initial: Vec<f64>,
}

impl OdeSystemSpec {
    pub fn new(p: Vec<f64>, coefficients: Vec<f64>, lambda_tilde: f64, initial: Vec<f64>) -> Result<Self> {
        let spec = Self { p, coefficients, lambda_tilde, initial };
        spec.validate()?;
        Ok(spec)
    }

    /// Unit coefficients, no damping.
    pub fn plain(p: Vec<f64>, initial: Vec<f64>) -> Result<Self> {
        let k = p.len();
        Self::new(p, vec![1.0; k], 0.0, initial)
    }

    pub fn k(&self) -> usize {
        self.p.len()
    }

    fn validate(&self) -> Result<()> {
        let k = self.p.len();
        if k == 0 || self.coefficients.len() != k || self.initial.len() != k {
            return Err(Error::InvalidParams("p, coefficients and initial need equal nonzero length".into()));
        }
        if self.p.iter().any(|p| !(*p >= 1.0)) {
            return Err(Error::InvalidParams("exponents must be >= 1".into()));
        }
        if self.coefficients.iter().any(|c| !(*c > 0.0)) {
            return Err(Error::InvalidParams("coefficients must be positive".into()));
        }
        if self.initial.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::InvalidParams("initial data must be nonnegative".into()));
        }
        if !(self.lambda_tilde >= 0.0) {
            return Err(Error::InvalidParams("lambda~ must be nonnegative".into()));
        }
        Ok(())
    }

    pub fn rhs(&self, t: f64, y: &[f64], out: &mut [f64]) {
        let k = self.k();
        for j in 0..k {
            let next = y[(j + 1) % k].abs();
            out[j] = self.coefficients[j] * next.powf(self.p[j]);
        }
        if self.lambda_tilde > 0.0 {
            out[k - 1] *= (-self.lambda_tilde * t).exp();
        }
    }

    /// `alpha_j` of the exponent vector in floating point (undamped structure).
    pub fn alpha(&self) -> Vec<f64> {
        let k = self.k();
        let prod: f64 = self.p.iter().product();
        (0..k)
            .map(|j| {
                let mut sum = 1.0;
                let mut acc = 1.0;
                for h in 0..k - 1 {
                    acc *= self.p[(j + h) % k];
                    sum += acc;
                }
                sum / (prod - 1.0)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IntegratorOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub escape: f64,
    pub max_steps: usize,
}

impl IntegratorOptions {
    pub fn new(rel_tol: f64) -> Result<Self> {
        if !(rel_tol > 1e-12 && rel_tol < 1e-2) {
            return Err(Error::InvalidParams(format!("rel_tol {rel_tol} outside (1e-12, 1e-2)")));
        }
        Ok(Self {
            rel_tol,
            abs_tol: rel_tol * 1e-3,
            escape: ESCAPE_THRESHOLD,
            max_steps: 2_000_000,
        })
    }
}

/// Accepted steps of a run. `steps[i]` is the step that produced sample `i`.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub steps: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub derivs: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Time from sample `i` to the last sample, summed step by step.
    pub fn time_to_end(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        for i in (0..self.len().saturating_sub(1)).rev() {
            out[i] = out[i + 1] + self.steps[i + 1];
        }
        out
    }

    pub fn component(&self, j: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[j]).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    BlowUp(f64),
    GlobalUpTo(f64),
}

#[derive(Debug, Clone, Copy)]
pub struct BlowupEstimate {
    pub outcome: Outcome,
    /// `t_low` is the escape time; `t_high = t_low + 2 (T_num - t_low)`.
    pub bracket: (f64, f64),
    /// Fitted `a` in `f_1 ~ c (T - t)^{-a}`; NaN when no blow-up.
    pub extrapolation_exponent: f64,
    pub achieved_max: f64,
    /// Extrapolated `T_num - t_escape`, accurate even below the resolution of `t`.
    pub remaining: f64,
}

impl BlowupEstimate {
    pub fn t_num(&self) -> Option<f64> {
        match self.outcome {
            Outcome::BlowUp(t) => Some(t),
            Outcome::GlobalUpTo(_) => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OdeRun {
    pub trajectory: Trajectory,
    pub estimate: BlowupEstimate,
}

impl OdeRun {
    /// `T_num - t_i` for every sample.
    pub fn time_to_blowup(&self) -> Vec<f64> {
        let delta = self.estimate.remaining;
        self.trajectory.time_to_end().into_iter().map(|s| s + delta).collect()
    }
}

// Dormand-Prince 5(4) tableau
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

struct Stepper<F> {
    rhs: F,
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
}

impl<F: Fn(f64, &[f64], &mut [f64])> Stepper<F> {
    fn new(rhs: F, dim: usize) -> Self {
        Self {
            rhs,
            k: std::array::from_fn(|_| vec![0.0; dim]),
            tmp: vec![0.0; dim],
        }
    }

    /// One step from `(t, y)` with `k[0] = f(t, y)` already set; writes the
    /// fifth-order solution to `out` and returns the scaled error norm.
    fn step(&mut self, t: f64, y: &[f64], h: f64, out: &mut [f64], opts: &IntegratorOptions) -> f64 {
        let dim = y.len();
        let stages: [(f64, &[f64]); 5] = [
            (C2, &[A21]),
            (C3, &[A31, A32]),
            (C4, &[A41, A42, A43]),
            (C5, &[A51, A52, A53, A54]),
            (1.0, &[A61, A62, A63, A64, A65]),
        ];
        for (s, (c, a)) in stages.iter().enumerate() {
            for i in 0..dim {
                let mut acc = y[i];
                for (m, am) in a.iter().enumerate() {
                    acc += h * am * self.k[m][i];
                }
                self.tmp[i] = acc;
            }
            let (head, tail) = self.k.split_at_mut(s + 1);
            let _ = head;
            (self.rhs)(t + c * h, &self.tmp, &mut tail[0]);
        }
        for i in 0..dim {
            out[i] = y[i]
                + h * (B1 * self.k[0][i] + B3 * self.k[2][i] + B4 * self.k[3][i] + B5 * self.k[4][i] + B6 * self.k[5][i]);
        }
        (self.rhs)(t + h, out, &mut self.k[6]);
        let mut norm = 0.0;
        for i in 0..dim {
            let err = h
                * (E1 * self.k[0][i] + E3 * self.k[2][i] + E4 * self.k[3][i] + E5 * self.k[4][i] + E6 * self.k[5][i]
                    + E7 * self.k[6][i]);
            let scale = opts.abs_tol + opts.rel_tol * y[i].abs().max(out[i].abs());
            norm += (err / scale).powi(2);
        }
        (norm / dim as f64).sqrt()
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Generic adaptive driver. Returns the trajectory and whether it escaped.
pub(crate) fn dopri<F: Fn(f64, &[f64], &mut [f64])>(
    rhs: F,
    y0: &[f64],
    horizon: f64,
    opts: &IntegratorOptions,
) -> Result<(Trajectory, bool)> {
    if !(horizon > 0.0) {
        return Err(Error::InvalidParams("horizon must be positive".into()));
    }
    let dim = y0.len();
    let mut st = Stepper::new(rhs, dim);
    let mut traj = Trajectory::default();
    let mut t = 0.0;
    let mut y = y0.to_vec();
    let mut dy = vec![0.0; dim];
    (st.rhs)(t, &y, &mut dy);
    traj.times.push(t);
    traj.steps.push(0.0);
    traj.states.push(y.clone());
    traj.derivs.push(dy.clone());

    let scale = max_abs(&y).max(1e-3);
    let rate = max_abs(&dy) / scale;
    let mut h = (0.01 / rate.max(1e-12)).min(horizon).min(0.01 * horizon.max(1.0));
    let mut ynew = vec![0.0; dim];

    for _ in 0..opts.max_steps {
        if t >= horizon {
            return Ok((traj, false));
        }
        let last = horizon - t < h;
        if last {
            h = horizon - t;
        }
        st.k[0].copy_from_slice(&dy);
        let err = st.step(t, &y, h, &mut ynew, opts);
        let monotone = ynew
            .iter()
            .zip(&y)
            .all(|(a, b)| *a >= *b - 1e-12 * b.abs());
        if err <= 1.0 && monotone && ynew.iter().all(|v| v.is_finite()) {
            if max_abs(&ynew) >= opts.escape {
                // shrink the last step until it lands just past the threshold
                let (mut lo, mut hi) = (0.0, h);
                let mut trial = vec![0.0; dim];
                while hi - lo > 1e-13 * hi {
                    let mid = 0.5 * (lo + hi);
                    st.k[0].copy_from_slice(&dy);
                    st.step(t, &y, mid, &mut trial, opts);
                    if max_abs(&trial) >= opts.escape {
                        hi = mid;
                        ynew.copy_from_slice(&trial);
                    } else {
                        lo = mid;
                    }
                }
                h = hi;
                t += h;
                (st.rhs)(t, &ynew, &mut dy);
                traj.times.push(t);
                traj.steps.push(h);
                traj.states.push(ynew.clone());
                traj.derivs.push(dy.clone());
                return Ok((traj, true));
            }
            t = if last { horizon } else { t + h };
            std::mem::swap(&mut y, &mut ynew);
            dy.copy_from_slice(&st.k[6]);
            traj.times.push(t);
            traj.steps.push(h);
            traj.states.push(y.clone());
            traj.derivs.push(dy.clone());
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= factor;
        } else {
            let factor = if err.is_finite() && err > 1.0 { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.25 };
            h *= factor;
        }
        if !(h > 1e-300) {
            return Err(Error::ToleranceFailure { t, h });
        }
    }
    Err(Error::ToleranceFailure { t, h })
}

/// Least-squares line `y = a + b x`; returns `(a, b)`.
pub(crate) fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let b = sxy / sxx;
    (my - b * mx, b)
}

/// Extrapolates `T - t_end` from `g = f / f'`, which is linear in `t` for a power law.
fn extrapolate(traj: &Trajectory, j: usize) -> (f64, f64) {
    let last = traj.len() - 1;
    let f_end = traj.states[last][j];
    let to_end = traj.time_to_end();
    let window: Vec<usize> = (0..traj.len())
        .filter(|&i| traj.states[i][j] >= 0.1 * f_end && traj.derivs[i][j] > 0.0)
        .collect();
    let g_end = f_end / traj.derivs[last][j];
    if window.len() < 3 {
        return (g_end, 1.0);
    }
    let s: Vec<f64> = window.iter().map(|&i| -to_end[i]).collect();
    let g: Vec<f64> = window.iter().map(|&i| traj.states[i][j] / traj.derivs[i][j]).collect();
    let (intercept, slope) = line_fit(&s, &g);
    let remaining = -intercept / slope;
    if remaining.is_finite() && remaining > 0.0 && slope < 0.0 {
        (remaining, -1.0 / slope)
    } else {
        (g_end, 1.0)
    }
}

pub fn integrate(spec: &OdeSystemSpec, horizon: f64, rel_tol: f64) -> Result<OdeRun> {
    spec.validate()?;
    let opts = IntegratorOptions::new(rel_tol)?;
    integrate_with(spec, horizon, &opts)
}

pub fn integrate_with(spec: &OdeSystemSpec, horizon: f64, opts: &IntegratorOptions) -> Result<OdeRun> {
    let (trajectory, escaped) = dopri(|t, y, out| spec.rhs(t, y, out), &spec.initial, horizon, opts)?;
    let last = trajectory.len() - 1;
    let t_end = trajectory.times[last];
    let achieved_max = max_abs(&trajectory.states[last]);
    let estimate = if escaped {
        let (remaining, exponent) = extrapolate(&trajectory, 0);
        BlowupEstimate {
            outcome: Outcome::BlowUp(t_end + remaining),
            bracket: (t_end, t_end + 2.0 * remaining),
            extrapolation_exponent: exponent,
            achieved_max,
            remaining,
        }
    } else {
        BlowupEstimate {
            outcome: Outcome::GlobalUpTo(horizon),
            bracket: (t_end, f64::INFINITY),
            extrapolation_exponent: f64::NAN,
            achieved_max,
            remaining: f64::INFINITY,
        }
    };
    Ok(OdeRun { trajectory, estimate })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonWitness {
    pub holds: bool,
    /// `(t, j)` of the first accepted step with `f_j(t) <= g_j(t)`.
    pub first_violation: Option<(f64, usize)>,
    pub checked_steps: usize,
    pub t_end: f64,
}

/// Integrates a supersolution `f` and a subsolution `g` on a shared step
/// sequence and checks strict ordering at every accepted step.
pub fn comparison_check(
    spec_f: &OdeSystemSpec,
    spec_g: &OdeSystemSpec,
    horizon: f64,
    rel_tol: f64,
) -> Result<ComparisonWitness> {
    spec_f.validate()?;
    spec_g.validate()?;
    if spec_f.p != spec_g.p || spec_f.lambda_tilde != spec_g.lambda_tilde {
        return Err(Error::PreconditionViolation("systems differ in (k, p, lambda~)".into()));
    }
    if spec_f.coefficients.iter().zip(&spec_g.coefficients).any(|(a, b)| a < b) {
        return Err(Error::PreconditionViolation("f coefficients must dominate g's".into()));
    }
    if spec_f.initial.iter().zip(&spec_g.initial).any(|(a, b)| a < b) {
        return Err(Error::PreconditionViolation("f(0) must dominate g(0)".into()));
    }
    if !spec_f.initial.iter().zip(&spec_g.initial).any(|(a, b)| a > b) {
        return Err(Error::PreconditionViolation("f(0) > g(0) must hold in some component".into()));
    }
    let k = spec_f.k();
    let opts = IntegratorOptions::new(rel_tol)?;
    let y0: Vec<f64> = spec_f.initial.iter().chain(&spec_g.initial).copied().collect();
    let rhs = |t: f64, y: &[f64], out: &mut [f64]| {
        let (yf, yg) = y.split_at(k);
        let (of, og) = out.split_at_mut(k);
        spec_f.rhs(t, yf, of);
        spec_g.rhs(t, yg, og);
    };
    let (traj, _) = dopri(rhs, &y0, horizon, &opts)?;
    let mut first_violation = None;
    'outer: for (t, y) in traj.times.iter().zip(&traj.states).skip(1) {
        for j in 0..k {
            if !(y[j] > y[k + j]) {
                first_violation = Some((*t, j));
                break 'outer;
            }
        }
    }
    Ok(ComparisonWitness {
        holds: first_violation.is_none(),
        first_violation,
        checked_steps: traj.len() - 1,
        t_end: *traj.times.last().unwrap(),
    })
}

#[derive(Debug, Clone)]
pub struct RateProbe {
    /// Fitted slope of `ln f_j` against `ln(T_num - t)`.
    pub slopes: Vec<f64>,
    pub window_sizes: Vec<usize>,
    pub t_num: f64,
}

impl RateProbe {
    /// Every slope within `rel` of `-alpha_j`.
    pub fn matches(&self, alpha: &[f64], rel: f64) -> bool {
        self.slopes
            .iter()
            .zip(alpha)
            .all(|(s, a)| ((-s) - a).abs() <= rel * a)
    }
}

pub const RATE_WINDOW_MIN: usize = 20;

/// Fits blow-up rates from a finished run over each component's final decade.
pub fn fit_rates(run: &OdeRun) -> Result<RateProbe> {
    let t_num = run
        .estimate
        .t_num()
        .ok_or_else(|| Error::PreconditionViolation("rate probe needs a detected blow-up".into()))?;
    let traj = &run.trajectory;
    let to_go = run.time_to_blowup();
    let k = traj.states[0].len();
    let mut slopes = Vec::with_capacity(k);
    let mut window_sizes = Vec::with_capacity(k);
    for j in 0..k {
        let f_end = traj.states[traj.len() - 1][j];
        let idx: Vec<usize> = (0..traj.len())
            .filter(|&i| traj.states[i][j] >= 0.1 * f_end && traj.states[i][j] > 0.0)
            .collect();
        if idx.len() < RATE_WINDOW_MIN {
            return Err(Error::InsufficientData { needed: RATE_WINDOW_MIN, got: idx.len() });
        }
        let x: Vec<f64> = idx.iter().map(|&i| to_go[i].ln()).collect();
        let y: Vec<f64> = idx.iter().map(|&i| traj.states[i][j].ln()).collect();
        slopes.push(line_fit(&x, &y).1);
        window_sizes.push(idx.len());
    }
    Ok(RateProbe { slopes, window_sizes, t_num })
}

/// Integrates to blow-up at tight tolerance and fits the per-component rates.
pub fn rate_probe(spec: &OdeSystemSpec, horizon: f64) -> Result<RateProbe> {
    let run = integrate(spec, horizon, 1e-10)?;
    fit_rates(&run)
}
