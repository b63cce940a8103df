//! Radial solver for `u_j,t - Δu_j = |u_{j+1}|^{p_j}` on a truncated ball.
//!
//! Diffusion is a node-centred finite-volume Laplacian treated implicitly
//! (backward Euler, one tridiagonal solve per component), the reaction is
//! explicit. The implicit matrix is an M-matrix, so nonnegative data stays
//! nonnegative at any step size.

use crate::error::{Error, Result};
use crate::mesh::RadialMesh;
use crate::ode::{line_fit, BlowupEstimate, Outcome};
use crate::test_function::{sphere_area, TestFunctionSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub t: f64,
    /// `u[j][i]`: component `j` at node `i`.
    pub u: Vec<Vec<f64>>,
    pub mesh: RadialMesh,
}

impl FieldState {
    pub fn new(t: f64, u: Vec<Vec<f64>>, mesh: RadialMesh) -> Self {
        Self { t, u, mesh }
    }

    /// Samples `profile(j, r)` on every node.
    pub fn from_profile<F: Fn(usize, f64) -> f64>(k: usize, mesh: RadialMesh, profile: F) -> Self {
        let u = (0..k)
            .map(|j| mesh.nodes().iter().map(|&r| profile(j, r)).collect())
            .collect();
        Self { t: 0.0, u, mesh }
    }

    pub fn k(&self) -> usize {
        self.u.len()
    }

    pub fn sup(&self, j: usize) -> f64 {
        self.u[j].iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.u.iter().flatten().all(|v| *v >= 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    /// `u = 0` at the outer radius.
    #[default]
    Dirichlet,
    /// No flux through the outer radius.
    Neumann,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Gaussian,
    Bump,
}

/// Radial initial profile `amplitude_j * shape((r - center) / width)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub shape: Shape,
    pub amplitude: Vec<f64>,
    pub width: f64,
    pub center: f64,
}

impl InitialData {
    pub fn new(shape: Shape, amplitude: Vec<f64>, width: f64, center: f64) -> Result<Self> {
        if amplitude.is_empty() || amplitude.iter().any(|a| !(*a >= 0.0)) {
            return Err(Error::InvalidParams("amplitudes must be nonnegative".into()));
        }
        if !(width > 0.0) || !(center >= 0.0) {
            return Err(Error::InvalidParams("width must be positive, center nonnegative".into()));
        }
        Ok(Self { shape, amplitude, width, center })
    }

    pub fn k(&self) -> usize {
        self.amplitude.len()
    }

    pub fn profile(&self, r: f64) -> f64 {
        let z = (r - self.center) / self.width;
        match self.shape {
            Shape::Gaussian => (-z * z).exp(),
            Shape::Bump => {
                if z.abs() < 1.0 {
                    (1.0 - 1.0 / (1.0 - z * z)).exp()
                } else {
                    0.0
                }
            }
        }
    }

    pub fn value(&self, j: usize, r: f64) -> f64 {
        self.amplitude[j] * self.profile(r)
    }

    /// Radius beyond which the data is zero to double precision.
    pub fn support(&self) -> f64 {
        match self.shape {
            Shape::Gaussian => self.center + 6.5 * self.width,
            Shape::Bump => self.center + self.width,
        }
    }

    /// Same data times `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            amplitude: self.amplitude.iter().map(|a| a * factor).collect(),
            ..self.clone()
        }
    }

    pub fn sample(&self, mesh: RadialMesh) -> FieldState {
        FieldState::from_profile(self.k(), mesh, |j, r| self.value(j, r))
    }
}

/// Finite-volume Laplacian: `(Lu)_i = lower_i u_{i-1} + diag_i u_i + upper_i u_{i+1}`.
#[derive(Debug, Clone)]
pub struct RadialLaplacian {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    /// Cell volumes without the sphere-area factor.
    volumes: Vec<f64>,
    boundary: Boundary,
    area: f64,
}

impl RadialLaplacian {
    pub fn new(mesh: &RadialMesh, n: u32, boundary: Boundary) -> Self {
        let r = mesh.nodes();
        let m = r.len();
        let nf = n as f64;
        let faces: Vec<f64> = r.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let flux: Vec<f64> = (0..m - 1)
            .map(|i| faces[i].powi(n as i32 - 1) / (r[i + 1] - r[i]))
            .collect();
        let mut volumes = vec![0.0; m];
        for i in 0..m {
            let inner = if i == 0 { 0.0 } else { faces[i - 1] };
            let outer = if i == m - 1 { r[m - 1] } else { faces[i] };
            volumes[i] = (outer.powi(n as i32) - inner.powi(n as i32)) / nf;
        }
        let (mut lower, mut diag, mut upper) = (vec![0.0; m], vec![0.0; m], vec![0.0; m]);
        for i in 0..m {
            if i > 0 {
                lower[i] = flux[i - 1] / volumes[i];
                diag[i] -= lower[i];
            }
            if i < m - 1 {
                upper[i] = flux[i] / volumes[i];
                diag[i] -= upper[i];
            }
        }
        Self { lower, diag, upper, volumes, boundary, area: sphere_area(n) }
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let m = u.len();
        (0..m)
            .map(|i| {
                let mut v = self.diag[i] * u[i];
                if i > 0 {
                    v += self.lower[i] * u[i - 1];
                }
                if i < m - 1 {
                    v += self.upper[i] * u[i + 1];
                }
                v
            })
            .collect()
    }

    /// Discrete `∫ |u| dx`, conserved exactly by the diffusion step up to boundary flux.
    pub fn mass(&self, u: &[f64]) -> f64 {
        self.area * self.volumes.iter().zip(u).map(|(v, x)| v * x.abs()).sum::<f64>()
    }

    /// Solves `(I - dt L) x = rhs` in place.
    fn solve_implicit(&self, dt: f64, rhs: &mut [f64], scratch: &mut Vec<f64>) {
        let m = match self.boundary {
            Boundary::Dirichlet => {
                let last = rhs.len() - 1;
                rhs[last] = 0.0;
                last
            }
            Boundary::Neumann => rhs.len(),
        };
        scratch.resize(m, 0.0);
        // forward sweep
        let mut denom = 1.0 - dt * self.diag[0];
        scratch[0] = -dt * self.upper[0] / denom;
        rhs[0] /= denom;
        for i in 1..m {
            let a = -dt * self.lower[i];
            denom = 1.0 - dt * self.diag[i] - a * scratch[i - 1];
            scratch[i] = if i + 1 < m { -dt * self.upper[i] / denom } else { 0.0 };
            rhs[i] = (rhs[i] - a * rhs[i - 1]) / denom;
        }
        for i in (0..m - 1).rev() {
            rhs[i] -= scratch[i] * rhs[i + 1];
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub boundary: Boundary,
    /// Switches the nonlinearity off (pure heat flow).
    pub reaction: bool,
    /// Target relative growth of a component per step.
    pub eta: f64,
    /// `dt <= diffusion_fraction * (t + time_scale)`.
    pub diffusion_fraction: f64,
    pub time_scale: f64,
    pub blowup_threshold: f64,
    pub min_dt: f64,
    pub max_steps: usize,
    /// Radius at which `U_{j,R}(t)` is traced.
    pub trace_radius: Option<f64>,
    /// Exponents `l_j` of the weighted norm `M(t)`; zero when absent.
    pub l_vector: Option<Vec<f64>>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            boundary: Boundary::Dirichlet,
            reaction: true,
            eta: 1e-3,
            diffusion_fraction: 0.01,
            time_scale: 1.0,
            blowup_threshold: 1e8,
            min_dt: 1e-12,
            max_steps: 5_000_000,
            trace_radius: None,
            l_vector: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    /// Step that produced this row; zero for the initial row.
    pub dt: f64,
    pub sup: Vec<f64>,
    pub l1: Vec<f64>,
    /// `U_{j,R}(t)`; empty when no trace radius is set.
    pub weighted: Vec<f64>,
    pub m: f64,
}

#[derive(Debug, Clone)]
pub struct SimReport {
    pub blowup: BlowupEstimate,
    pub traces: Vec<TraceRow>,
    pub trace_radius: Option<f64>,
    /// `-d ln ||u_j||_inf / d ln t` fitted on `[horizon/2, horizon]` for global runs.
    pub decay_exponents: Option<Vec<f64>>,
    pub final_state: FieldState,
    pub steps: usize,
}

impl SimReport {
    pub fn t_num(&self) -> Option<f64> {
        self.blowup.t_num()
    }
}

/// One IMEX step: `(I - dt L) u^{new} = u + dt |u_{next}|^p`.
pub fn step(state: &FieldState, lap: &RadialLaplacian, p: &[f64], dt: f64, reaction: bool) -> Result<FieldState> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParams("dt must be positive".into()));
    }
    let mut next = state.clone();
    let mut scratch = Vec::new();
    advance(&state.u, &mut next.u, lap, p, dt, reaction, &mut scratch);
    next.t = state.t + dt;
    Ok(next)
}

fn advance(
    u: &[Vec<f64>],
    out: &mut [Vec<f64>],
    lap: &RadialLaplacian,
    p: &[f64],
    dt: f64,
    reaction: bool,
    scratch: &mut Vec<f64>,
) {
    let k = u.len();
    for j in 0..k {
        let src = &u[(j + 1) % k];
        let dst = &mut out[j];
        if reaction {
            for ((d, a), b) in dst.iter_mut().zip(&u[j]).zip(src) {
                *d = a + dt * b.abs().powf(p[j]);
            }
        } else {
            dst.copy_from_slice(&u[j]);
        }
        lap.solve_implicit(dt, dst, scratch);
    }
}

/// Running `M(t) = sup_{s<=t} sum_j (1+s)^{l_j} ||u_j||_inf + (1+s)^{l_j - n/2} ||u_j||_1`.
fn weighted_norm(t: f64, sup: &[f64], l1: &[f64], l: &[f64], half_n: f64) -> f64 {
    sup.iter()
        .zip(l1)
        .zip(l)
        .map(|((s, m), lj)| (1.0 + t).powf(*lj) * s + (1.0 + t).powf(lj - half_n) * m)
        .sum()
}

pub fn run(
    state: FieldState,
    n: u32,
    p: &[f64],
    spec: &TestFunctionSpec,
    horizon: f64,
    opts: &RunOptions,
) -> Result<SimReport> {
    let k = state.k();
    if p.len() != k {
        return Err(Error::InvalidParams("need one exponent per component".into()));
    }
    if !(horizon > 0.0) {
        return Err(Error::InvalidParams("horizon must be positive".into()));
    }
    if !state.is_nonnegative() {
        return Err(Error::PreconditionViolation("initial data must be nonnegative".into()));
    }
    if spec.n != n {
        return Err(Error::InvalidParams("test function dimension differs from n".into()));
    }
    let lap = RadialLaplacian::new(&state.mesh, n, opts.boundary);
    let kernel = match opts.trace_radius {
        Some(r) => Some(spec.mass_kernel(&state.mesh, r)?),
        None => None,
    };
    let l = opts.l_vector.clone().unwrap_or_else(|| vec![0.0; k]);
    let half_n = n as f64 / 2.0;

    let mut cur = state;
    let mut next = cur.clone();
    let mut scratch = Vec::new();
    let mut traces = Vec::new();
    let mut m_run = 0.0_f64;
    let record = |st: &FieldState, dt: f64, m_run: &mut f64| -> TraceRow {
        let sup: Vec<f64> = (0..k).map(|j| st.sup(j)).collect();
        let l1: Vec<f64> = st.u.iter().map(|u| lap.mass(u)).collect();
        let weighted = match &kernel {
            Some(c) => st.u.iter().map(|u| c.iter().zip(u).map(|(a, b)| a * b).sum()).collect(),
            None => Vec::new(),
        };
        *m_run = m_run.max(weighted_norm(st.t, &sup, &l1, &l, half_n));
        TraceRow { t: st.t, dt, sup, l1, weighted, m: *m_run }
    };
    traces.push(record(&cur, 0.0, &mut m_run));

    let mut escaped = false;
    let mut steps = 0;
    while cur.t < horizon {
        if steps >= opts.max_steps {
            return Err(Error::StabilityFailure { t: cur.t, dt: f64::NAN });
        }
        let last = traces.last().unwrap();
        let smax = last.sup.iter().fold(0.0_f64, |a, b| a.max(*b));
        let mut dt = opts.diffusion_fraction * (cur.t + opts.time_scale);
        let mut stable = f64::INFINITY;
        if opts.reaction {
            for j in 0..k {
                let f = last.sup[(j + 1) % k].powf(p[j]);
                if f > 0.0 {
                    let scale = last.sup[j] + 1e-2 * smax;
                    dt = dt.min(opts.eta * scale / f);
                    stable = stable.min(0.5 * scale / f);
                }
            }
        }
        let remaining = horizon - cur.t;
        if dt < opts.min_dt && remaining > opts.min_dt {
            if stable < opts.min_dt {
                return Err(Error::StabilityFailure { t: cur.t, dt: stable });
            }
            dt = opts.min_dt;
        }
        let final_step = dt >= remaining;
        if final_step {
            dt = remaining;
        }
        advance(&cur.u, &mut next.u, &lap, p, dt, opts.reaction, &mut scratch);
        next.t = if final_step { horizon } else { cur.t + dt };
        std::mem::swap(&mut cur, &mut next);
        steps += 1;
        if cur.u.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::StabilityFailure { t: cur.t, dt });
        }
        let row = record(&cur, dt, &mut m_run);
        let top = row.sup.iter().fold(0.0_f64, |a, b| a.max(*b));
        traces.push(row);
        if top >= opts.blowup_threshold {
            escaped = true;
            break;
        }
    }

    let t_end = cur.t;
    let achieved_max = traces.last().unwrap().sup.iter().fold(0.0_f64, |a, b| a.max(*b));
    let (blowup, decay_exponents) = if escaped {
        let (remaining, exponent) = extrapolate(&traces);
        (
            BlowupEstimate {
                outcome: Outcome::BlowUp(t_end + remaining),
                bracket: (t_end, t_end + 2.0 * remaining),
                extrapolation_exponent: exponent,
                achieved_max,
                remaining,
            },
            None,
        )
    } else {
        (
            BlowupEstimate {
                outcome: Outcome::GlobalUpTo(horizon),
                bracket: (t_end, f64::INFINITY),
                extrapolation_exponent: f64::NAN,
                achieved_max,
                remaining: f64::INFINITY,
            },
            decay_fit(&traces, horizon),
        )
    };
    Ok(SimReport {
        blowup,
        traces,
        trace_radius: opts.trace_radius,
        decay_exponents,
        final_state: cur,
        steps,
    })
}

/// Remaining time from the last row, by fitting `M / M'` linearly over the final decade.
fn extrapolate(traces: &[TraceRow]) -> (f64, f64) {
    let top: Vec<f64> = traces
        .iter()
        .map(|r| r.sup.iter().fold(0.0_f64, |a, b| a.max(*b)))
        .collect();
    let last = top.len() - 1;
    let mut to_end = vec![0.0; top.len()];
    for i in (0..last).rev() {
        to_end[i] = to_end[i + 1] + traces[i + 1].dt;
    }
    let (mut s, mut g) = (Vec::new(), Vec::new());
    for i in 1..=last {
        if top[i - 1] >= 0.1 * top[last] && top[i] > top[i - 1] {
            s.push(-(to_end[i] + 0.5 * traces[i].dt));
            g.push(traces[i].dt / (top[i] / top[i - 1]).ln());
        }
    }
    let g_end = g.last().copied().unwrap_or(0.0);
    if s.len() < 3 {
        return (g_end, 1.0);
    }
    let (intercept, slope) = line_fit(&s, &g);
    let remaining = -intercept / slope;
    if remaining.is_finite() && remaining > 0.0 && slope < 0.0 {
        (remaining, -1.0 / slope)
    } else {
        (g_end, 1.0)
    }
}

fn decay_fit(traces: &[TraceRow], horizon: f64) -> Option<Vec<f64>> {
    let k = traces[0].sup.len();
    let rows: Vec<&TraceRow> = traces.iter().filter(|r| r.t >= 0.5 * horizon).collect();
    if rows.len() < 3 {
        return None;
    }
    let x: Vec<f64> = rows.iter().map(|r| r.t.ln()).collect();
    let mut out = Vec::with_capacity(k);
    for j in 0..k {
        if rows.iter().any(|r| !(r.sup[j] > 0.0)) {
            out.push(f64::NAN);
            continue;
        }
        let y: Vec<f64> = rows.iter().map(|r| r.sup[j].ln()).collect();
        out.push(-line_fit(&x, &y).1);
    }
    Some(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityWitness {
    pub holds: bool,
    /// `(row, t, j)` of the first violation.
    pub first_violation: Option<(usize, f64, usize)>,
    pub checked: usize,
}

pub const INEQUALITY_MIN_SAMPLES: usize = 100;

/// Checks `U_j' + Λ_j R^{-2} U_j >= R^{-n(p_j-1)} U_{j+1}^{p_j} - δ` along the traced
/// functionals, with `δ = 1e-6 (1 + |rhs|)`.
///
/// The derivative is the forward difference over each step, with the
/// diffusion-side term at the new time and the source term at the old time,
/// which is how the scheme itself splits the step.
pub fn verify_ode_inequality(report: &SimReport, n: u32, p: &[f64], lambda: &[f64]) -> Result<InequalityWitness> {
    let r0 = report
        .trace_radius
        .ok_or_else(|| Error::PreconditionViolation("run has no functional traces".into()))?;
    verify_traces(&report.traces, r0, n, p, lambda)
}

pub fn verify_traces(traces: &[TraceRow], r0: f64, n: u32, p: &[f64], lambda: &[f64]) -> Result<InequalityWitness> {
    if traces.len() < INEQUALITY_MIN_SAMPLES {
        return Err(Error::InsufficientData { needed: INEQUALITY_MIN_SAMPLES, got: traces.len() });
    }
    let k = p.len();
    if lambda.len() != k || traces.iter().any(|r| r.weighted.len() != k) {
        return Err(Error::InvalidParams("trace, exponent and Lambda lengths differ".into()));
    }
    let nf = n as f64;
    let mut checked = 0;
    for i in 1..traces.len() {
        let (prev, cur) = (&traces[i - 1], &traces[i]);
        if !(cur.dt > 0.0) {
            continue;
        }
        for j in 0..k {
            let lhs = (cur.weighted[j] - prev.weighted[j]) / cur.dt + lambda[j] / (r0 * r0) * cur.weighted[j];
            let rhs = r0.powf(-nf * (p[j] - 1.0)) * prev.weighted[(j + 1) % k].powf(p[j]);
            let slack = 1e-6 * (1.0 + rhs.abs());
            checked += 1;
            if !(lhs >= rhs - slack) {
                return Ok(InequalityWitness {
                    holds: false,
                    first_violation: Some((i, cur.t, j)),
                    checked,
                });
            }
        }
    }
    Ok(InequalityWitness { holds: true, first_violation: None, checked })
}

/// Mesh for data of the given support: uniform core of spacing `h`, then
/// cells growing by 2% out to `outer`.
pub fn default_mesh(h: f64, support: f64, outer: f64) -> Result<RadialMesh> {
    let core = (2.0 * support).max(4.0);
    RadialMesh::stretched(h, core, 1.02, outer.max(core))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_function::build_psi;
    use approx::assert_relative_eq;

    fn gaussian(amp: Vec<f64>) -> InitialData {
        InitialData::new(Shape::Gaussian, amp, 1.0, 0.0).unwrap()
    }

    #[test]
    fn laplacian_of_quadratic() {
        // Δ r^2 = 2n away from the outer boundary
        for n in 1..=3u32 {
            let mesh = RadialMesh::stretched(0.05, 1.0, 1.05, 5.0).unwrap();
            let lap = RadialLaplacian::new(&mesh, n, Boundary::Neumann);
            let u: Vec<f64> = mesh.nodes().iter().map(|r| r * r).collect();
            let lu = lap.apply(&u);
            for (i, v) in lu.iter().enumerate().take(mesh.len() - 1) {
                let r = mesh.nodes()[i];
                assert!((v - 2.0 * n as f64).abs() < 0.02 * (1.0 + r), "n={n} r={r} {v}");
            }
        }
    }

    #[test]
    fn heat_flow_conserves_mass() {
        for n in 1..=3u32 {
            let spec = build_psi(n).unwrap();
            let mesh = default_mesh(0.02, 6.5, 40.0).unwrap();
            let state = gaussian(vec![1.0]).sample(mesh.clone());
            let lap = RadialLaplacian::new(&mesh, n, Boundary::Dirichlet);
            let m0 = lap.mass(&state.u[0]);
            let opts = RunOptions { reaction: false, ..RunOptions::default() };
            let rep = run(state, n, &[2.0], &spec, 1.0, &opts).unwrap();
            let m1 = rep.traces.last().unwrap().l1[0];
            assert!(((m1 - m0) / m0).abs() < 1e-6, "n={n}: {m0} -> {m1}");
            assert!(rep.final_state.is_nonnegative());
        }
    }

    #[test]
    fn constant_mode_with_neumann_is_the_ode() {
        let spec = build_psi(1).unwrap();
        let mesh = RadialMesh::uniform(2.0, 40);
        let state = FieldState::from_profile(1, mesh, |_, _| 1.0);
        let opts = RunOptions { boundary: Boundary::Neumann, ..RunOptions::default() };
        let rep = run(state, 1, &[2.0], &spec, 5.0, &opts).unwrap();
        let t = rep.t_num().unwrap();
        assert!((t - 1.0).abs() < 0.02, "{t}");
        assert!(rep.blowup.achieved_max >= 1e8);
    }

    #[test]
    fn large_gaussian_blows_up_early() {
        let spec = build_psi(1).unwrap();
        let mesh = default_mesh(0.02, 6.5, 20.0).unwrap();
        let rep = run(gaussian(vec![10.0]).sample(mesh), 1, &[2.0], &spec, 1.0, &RunOptions::default()).unwrap();
        let t = rep.t_num().unwrap();
        assert!(t < 0.2 && t > 0.1, "{t}");
    }

    #[test]
    fn step_preserves_nonnegativity() {
        let mesh = RadialMesh::uniform(4.0, 64);
        let lap = RadialLaplacian::new(&mesh, 2, Boundary::Dirichlet);
        let state = FieldState::from_profile(2, mesh, |j, r| if j == 0 && r < 0.5 { 3.0 } else { 0.0 });
        let next = step(&state, &lap, &[2.0, 3.0], 10.0, true).unwrap();
        assert!(next.is_nonnegative());
        assert_eq!(next.t, 10.0);
        assert!(step(&state, &lap, &[2.0, 3.0], 0.0, true).is_err());
    }

    #[test]
    fn zero_data_satisfies_inequality_trivially() {
        let spec = build_psi(1).unwrap();
        let mesh = default_mesh(0.02, 6.5, 20.0).unwrap();
        let state = gaussian(vec![0.0, 0.0]).sample(mesh);
        let opts = RunOptions { trace_radius: Some(2.0), ..RunOptions::default() };
        let rep = run(state, 1, &[2.0, 3.0], &spec, 5.0, &opts).unwrap();
        assert!(rep.traces.len() >= INEQUALITY_MIN_SAMPLES);
        let w = verify_ode_inequality(&rep, 1, &[2.0, 3.0], &[6.0, 2.0]).unwrap();
        assert!(w.holds);
    }

    #[test]
    fn short_traces_are_rejected() {
        let row = TraceRow { t: 0.0, dt: 0.0, sup: vec![0.0], l1: vec![0.0], weighted: vec![0.0], m: 0.0 };
        let err = verify_traces(&vec![row; 10], 1.0, 1, &[2.0], &[1.0]).unwrap_err();
        assert!(matches!(err, Error::InsufficientData { needed: 100, got: 10 }));
    }

    #[test]
    fn data_shapes() {
        let b = InitialData::new(Shape::Bump, vec![2.0], 1.5, 0.0).unwrap();
        assert_relative_eq!(b.value(0, 0.0), 2.0);
        assert_eq!(b.value(0, 1.5), 0.0);
        assert_eq!(b.support(), 1.5);
        let g = gaussian(vec![1.0, 3.0]);
        assert_relative_eq!(g.value(1, 1.0), 3.0 * (-1f64).exp());
        assert!(g.profile(g.support()) < 1e-18);
        assert!(InitialData::new(Shape::Gaussian, vec![-1.0], 1.0, 0.0).is_err());
    }
}
