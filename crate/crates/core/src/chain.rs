//! Explicit constant chain for the cyclic ODE inequality system
//!
//! ```text
//! f_j' >= C_j f_{j+1}^{p_j}            (j < k)
//! f_k' >= C_k e^{-lt t} f_1^{p_k}
//! ```
//!
//! and the closed-form minorant of `f_1` that blows up at an explicit time.
//! Towers like `A_1 = prod (C_m / P_m)^{p_i ... p_{m-1}}` leave the f64 range
//! quickly, so the chain is carried in log space throughout.

use std::f64::consts::LN_2;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::exponents::{compute_alpha, compute_pq, to_f64, PqSequences, SystemParams};
use crate::ode::{integrate, OdeSystemSpec};
use crate::test_function::solve_r0;

/// Derived constants `A_j`, `L_j` and `C~` of the chain, zero-based.
#[derive(Debug, Clone)]
pub struct ChainConstants {
    pub p: Vec<f64>,
    pub big_p: Vec<f64>,
    pub big_q: Vec<f64>,
    pub coefficients: Vec<f64>,
    pub lambda_tilde: f64,
    pub ln_a: Vec<f64>,
    pub l: Vec<f64>,
    /// `ln C~`; absent when `lambda_tilde == 0`.
    pub ln_ctilde: Option<f64>,
}

impl ChainConstants {
    pub fn k(&self) -> usize {
        self.p.len()
    }

    pub fn a(&self, j: usize) -> f64 {
        self.ln_a[j].exp()
    }

    pub fn ctilde(&self) -> Result<f64> {
        self.ln_ctilde.map(f64::exp).ok_or(Error::ZeroLambda)
    }

    pub fn ln_ctilde(&self) -> Result<f64> {
        self.ln_ctilde.ok_or(Error::ZeroLambda)
    }

    /// `ln X` with `X = C~^{-1} A_2^{1/(a1 P_2)} C_1^{-Q_2/(a1 P_2)}`.
    ///
    /// The blow-up condition on `f_2(0)` reads `X f_2(0)^{-1/alpha_2} < 1`.
    pub fn ln_x(&self, alpha1: f64) -> Result<f64> {
        let ln_ct = self.ln_ctilde()?;
        let ap2 = alpha1 * self.big_p[1];
        Ok(-ln_ct + self.ln_a[1] / ap2 - self.big_q[1] / ap2 * self.coefficients[0].ln())
    }
}

/// `ln A_i` straight from the product formula, without the recurrence.
pub fn ln_a_direct(p: &[f64], big_p: &[f64], coefficients: &[f64]) -> Vec<f64> {
    let k = p.len();
    (0..k)
        .map(|i| {
            let mut acc = (coefficients[i] / big_p[i]).ln();
            let mut power = 1.0;
            for m in i + 1..k {
                power *= p[m - 1];
                acc += power * (coefficients[m] / big_p[m]).ln();
            }
            acc
        })
        .collect()
}

pub fn l_direct(p: &[f64], lambda_tilde: f64) -> Vec<f64> {
    let k = p.len();
    (0..k)
        .map(|i| lambda_tilde * p[i..k - 1].iter().product::<f64>())
        .collect()
}

pub fn build_chain(
    params: &SystemParams,
    pq: &PqSequences,
    coefficients: &[f64],
    lambda_tilde: f64,
) -> Result<ChainConstants> {
    let k = params.k();
    if coefficients.len() != k {
        return Err(Error::InvalidParams(format!(
            "expected {k} coefficients, got {}",
            coefficients.len()
        )));
    }
    if coefficients.iter().any(|c| !(*c > 0.0) || !c.is_finite()) {
        return Err(Error::InvalidParams("chain coefficients must be positive".into()));
    }
    if !(lambda_tilde >= 0.0) || !lambda_tilde.is_finite() {
        return Err(Error::InvalidParams("lambda~ must be nonnegative".into()));
    }
    let p = params.p_f64();
    let big_p: Vec<f64> = pq.p_seq.iter().map(to_f64).collect();
    let big_q: Vec<f64> = pq.q_seq.iter().map(to_f64).collect();

    let mut ln_a = vec![0.0; k];
    let mut l = vec![0.0; k];
    ln_a[k - 1] = (coefficients[k - 1] / big_p[k - 1]).ln();
    l[k - 1] = lambda_tilde;
    for i in (0..k - 1).rev() {
        ln_a[i] = (coefficients[i] / big_p[i]).ln() + p[i] * ln_a[i + 1];
        l[i] = p[i] * l[i + 1];
    }

    for (rec, dir) in ln_a.iter().zip(ln_a_direct(&p, &big_p, coefficients)) {
        assert!(
            (rec - dir).abs() <= 1e-12 * (1.0 + dir.abs()),
            "A recurrence {rec} disagrees with product formula {dir}"
        );
    }
    for (rec, dir) in l.iter().zip(l_direct(&p, lambda_tilde)) {
        assert!((rec - dir).abs() <= 1e-12 * dir.abs(), "L recurrence disagrees");
    }

    let ln_ctilde = (lambda_tilde > 0.0).then(|| {
        let q1 = big_q[0];
        -l[0].ln() + (big_p[0] - q1 - 1.0).ln() - p[0] * (big_p[1] - 1.0) / q1 * LN_2
            + (big_p[0].ln() + ln_a[0]) / q1
    });

    Ok(ChainConstants {
        p,
        big_p,
        big_q,
        coefficients: coefficients.to_vec(),
        lambda_tilde,
        ln_a,
        l,
        ln_ctilde,
    })
}

/// Closed-form lower bound for `f_1` that blows up at `t0_tilde`.
#[derive(Debug, Clone, Copy)]
pub struct MinorantResult {
    /// Smallest `f_2(0)` for which the bound applies (strict).
    pub threshold: f64,
    pub t0_tilde: f64,
    pub offset: f64,
    pub amplitude: f64,
    pub rate: f64,
    pub alpha1: f64,
}

impl MinorantResult {
    /// `amplitude (e^{-rate t} - e^{-rate T0})^{-alpha1} - offset`; `+inf` from `T0` on.
    pub fn value(&self, t: f64) -> f64 {
        if t >= self.t0_tilde {
            return f64::INFINITY;
        }
        let gap = (-self.rate * t).exp() * -(-self.rate * (self.t0_tilde - t)).exp_m1();
        self.amplitude * gap.powf(-self.alpha1) - self.offset
    }
}

pub fn minorant(
    chain: &ChainConstants,
    alpha: &[f64],
    f2_0: f64,
) -> Result<MinorantResult> {
    if !(f2_0 > 0.0) {
        return Err(Error::PreconditionViolation("f_2(0) must be positive".into()));
    }
    if chain.k() < 2 {
        return Err(Error::Domain("the minorant needs k >= 2".into()));
    }
    let (a1, a2) = (alpha[0], alpha[1]);
    let ln_ct = chain.ln_ctilde()?;
    let ln_x = chain.ln_x(a1)?;
    let ln_threshold = a2 * ln_x;
    let threshold = ln_threshold.exp();
    if f2_0.ln() <= ln_threshold {
        return Err(Error::BelowThreshold { threshold, data: f2_0 });
    }
    let (p2, q1, q2) = (chain.big_p[1], chain.big_q[0], chain.big_q[1]);
    let rate = chain.l[0] / q1;
    let y = (ln_x - f2_0.ln() / a2).exp();
    let t0_tilde = -(-y).ln_1p() / rate;
    let offset = (-chain.ln_a[1] / p2 + q2 / p2 * chain.coefficients[0].ln() + q1 / p2 * f2_0.ln()).exp();
    Ok(MinorantResult {
        threshold,
        t0_tilde,
        offset,
        amplitude: (-ln_ct * a1).exp(),
        rate,
        alpha1: a1,
    })
}

/// The minorant compared against a numerical solution of the equality system.
#[derive(Debug, Clone)]
pub struct MinorantCheck {
    pub minorant: MinorantResult,
    pub t_num: Option<f64>,
    /// `T_num <= T0~`.
    pub blowup_before_bound: bool,
    /// `f_1(t) >= minorant(t) (1 - 1e-6)` at every sample with `t < 0.95 T0~`.
    pub dominates: bool,
    /// First sample time where domination fails.
    pub first_violation: Option<f64>,
    pub samples: usize,
}

impl MinorantCheck {
    pub fn holds(&self) -> bool {
        self.blowup_before_bound && self.dominates
    }
}

/// Integrates `spec` with equality and checks it against its own minorant.
pub fn check_minorant(spec: &OdeSystemSpec, rel_tol: f64) -> Result<MinorantCheck> {
    let k = spec.k();
    if k < 2 {
        return Err(Error::Domain("the minorant needs k >= 2".into()));
    }
    let p = spec
        .p
        .iter()
        .map(|v| BigRational::from_float(*v).ok_or_else(|| Error::InvalidParams(format!("bad exponent {v}"))))
        .collect::<Result<Vec<_>>>()?;
    let params = SystemParams::new(1, p)?;
    let pq = compute_pq(&params)?;
    let chain = build_chain(&params, &pq, &spec.coefficients, spec.lambda_tilde)?;
    let alpha = compute_alpha(&params)?.alpha_f64();
    let m = minorant(&chain, &alpha, spec.initial[1])?;
    let run = integrate(spec, 1.5 * m.t0_tilde, rel_tol)?;
    let t_num = run.estimate.t_num();
    let cutoff = 0.95 * m.t0_tilde;
    let mut samples = 0;
    let mut first_violation = None;
    for (t, y) in run.trajectory.times.iter().zip(&run.trajectory.states) {
        if *t >= cutoff {
            break;
        }
        samples += 1;
        if !(y[0] >= m.value(*t) * (1.0 - 1e-6)) {
            first_violation = Some(*t);
            break;
        }
    }
    Ok(MinorantCheck {
        minorant: m,
        t_num,
        blowup_before_bound: t_num.is_some_and(|t| t <= m.t0_tilde),
        dominates: first_violation.is_none(),
        first_violation,
        samples,
    })
}

/// Factor in front of `lambda` in the test-function eigen-inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LaplacianFactor {
    /// `Lambda_k = 2 lambda`, the convention the bound is proved with.
    #[default]
    Doubled,
    /// `Lambda_k = lambda`, the sharper pointwise inequality.
    Sharp,
}

impl LaplacianFactor {
    pub fn multiplier(self) -> f64 {
        match self {
            LaplacianFactor::Doubled => 2.0,
            LaplacianFactor::Sharp => 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct UpperBoundResult {
    pub r0: f64,
    pub t0: f64,
    /// `Lambda_j` in the original component labels.
    pub lambda_chain: Vec<f64>,
    /// Distinguished component (zero-based, original labels).
    pub j0: usize,
    pub u_at_r0: f64,
    /// Blow-up threshold of the instantiated chain at `R_0`.
    pub threshold: f64,
    /// `T_0 = kappa R_0^2`.
    pub kappa: f64,
    /// `T_0 <= constant * U(R_0)^{-1/(alpha_j0 - n/2)}`.
    pub constant: f64,
    pub minorant: MinorantResult,
}

/// The ODE chain satisfied by `R -> U_{j,R}` after relabelling `j0` to position 2.
#[derive(Debug, Clone)]
pub struct ScaledChain {
    params: SystemParams,
    pq: PqSequences,
    alpha: Vec<f64>,
    /// Original index of relabelled component `i` is `(i + shift) % k`.
    shift: usize,
    factor: LaplacianFactor,
    lambda: f64,
}

impl ScaledChain {
    pub fn new(params: &SystemParams, lambda: f64, j0: usize, factor: LaplacianFactor) -> Result<Self> {
        // the scalar equation is the diagonal of the two-component one with p = (p, p)
        let params = if params.k() == 1 {
            SystemParams::new(params.n(), vec![params.p(0).clone(), params.p(0).clone()])?
        } else {
            params.clone()
        };
        let k = params.k();
        if j0 >= k {
            return Err(Error::InvalidParams(format!("j0 = {j0} out of range")));
        }
        let profile = compute_alpha(&params)?;
        if profile.alpha[j0] <= params.half_n() {
            return Err(Error::NotSupercritical {
                alpha: profile.alpha[j0].to_string(),
                half_n: params.half_n().to_string(),
            });
        }
        let shift = (j0 + k - 1) % k;
        let rotated = params.rotated(shift);
        let pq = compute_pq(&rotated)?;
        let alpha = compute_alpha(&rotated)?.alpha_f64();
        Ok(Self { params: rotated, pq, alpha, shift, factor, lambda })
    }

    pub fn k(&self) -> usize {
        self.params.k()
    }

    /// `Lambda_k = c lambda`, `Lambda_j = p_j Lambda_{j+1}` in relabelled order.
    pub fn lambda_chain(&self) -> Vec<f64> {
        let p = self.params.p_f64();
        let k = p.len();
        let mut out = vec![0.0; k];
        out[k - 1] = self.factor.multiplier() * self.lambda;
        for i in (0..k - 1).rev() {
            out[i] = p[i] * out[i + 1];
        }
        out
    }

    /// Chain values in the caller's labels; a scalar system keeps the single `c lambda`.
    pub fn lambda_chain_original(&self, original_k: usize) -> Vec<f64> {
        if original_k == 1 {
            return vec![self.factor.multiplier() * self.lambda];
        }
        let rel = self.lambda_chain();
        let k = rel.len();
        let mut out = vec![0.0; k];
        for (i, v) in rel.into_iter().enumerate() {
            out[(i + self.shift) % k] = v;
        }
        out
    }

    pub fn chain_at(&self, r: f64) -> Result<ChainConstants> {
        let n = self.params.n() as f64;
        let p = self.params.p_f64();
        let coefficients: Vec<f64> = p.iter().map(|pj| r.powf(-n * (pj - 1.0))).collect();
        let lambdas = self.lambda_chain();
        let k = p.len();
        let lambda_tilde = (p[k - 1] * lambdas[0] - lambdas[k - 1]) / (r * r);
        build_chain(&self.params, &self.pq, &coefficients, lambda_tilde)
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// `ln X(R)`; `R_0` solves `U(R) = (2 X(R))^{alpha_2}`.
    pub fn ln_x_at(&self, r: f64) -> Result<f64> {
        self.chain_at(r)?.ln_x(self.alpha[0])
    }

    pub fn threshold_at(&self, r: f64) -> Result<f64> {
        Ok((self.alpha[1] * (LN_2 + self.ln_x_at(r)?)).exp())
    }
}

/// Lifespan upper bound for nonnegative data.
///
/// `u0_functional(R)` must return `U_{j0,R}(0) = ∫ u_{0,j0} phi_R`.
pub fn pde_upper_bound(
    params: &SystemParams,
    lambda: f64,
    u0_functional: &dyn Fn(f64) -> f64,
    j0: usize,
    factor: LaplacianFactor,
) -> Result<UpperBoundResult> {
    let scaled = ScaledChain::new(params, lambda, j0, factor)?;
    let alpha2 = scaled.alpha()[1];
    let n = params.n() as f64;

    let threshold_curve = |r: f64| scaled.threshold_at(r).unwrap_or(f64::INFINITY);
    let r0 = solve_r0(u0_functional, alpha2, params.n(), &threshold_curve)?;
    let u_at_r0 = u0_functional(r0);
    let chain = scaled.chain_at(r0)?;
    let minorant = minorant(&chain, scaled.alpha(), u_at_r0)?;
    let t0 = minorant.t0_tilde;

    // T_0 = kappa R_0^2 and threshold(R) = c R^{n - 2 alpha_2}
    let q1 = chain.big_q[0];
    let kappa = q1 * LN_2 / (scaled.chain_at(1.0)?.l[0]);
    let c = scaled.threshold_at(1.0)?;
    let gap = alpha2 - n / 2.0;
    let constant = kappa * c.powf(1.0 / gap);
    let predicted = constant * u_at_r0.powf(-1.0 / gap);
    assert!(
        t0 <= predicted * (1.0 + 1e-6),
        "T_0 = {t0} exceeds the scaling bound {predicted}"
    );

    Ok(UpperBoundResult {
        r0,
        t0,
        lambda_chain: scaled.lambda_chain_original(params.k()),
        j0,
        u_at_r0,
        threshold: minorant.threshold,
        kappa,
        constant,
        minorant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // high-precision reference values, 40 digits, evaluated outside this crate
    const CTILDE_22: f64 = 0.286_178_560_638_332_966_952;
    const THRESHOLD_22: f64 = 2.422_827_457_109_519_545_19;
    const T0_22_F5: f64 = 0.994_117_542_092_002_667_854;
    const OFFSET_22_F5: f64 = 7.211_247_851_537_041_911_61;
    const AMPLITUDE_22: f64 = 3.494_321_858_945_195_476_19;

    fn chain_22() -> ChainConstants {
        let params = SystemParams::from_ints(1, &[2, 2]).unwrap();
        let pq = compute_pq(&params).unwrap();
        build_chain(&params, &pq, &[1.0, 1.0], 1.0).unwrap()
    }

    #[test]
    fn chain_example() {
        let c = chain_22();
        assert_relative_eq!(c.a(0), 1.0 / 63.0, max_relative = 1e-14);
        assert_relative_eq!(c.a(1), 1.0 / 3.0, max_relative = 1e-14);
        assert_eq!(c.l, vec![2.0, 1.0]);
        assert_relative_eq!(c.ctilde().unwrap(), CTILDE_22, max_relative = 1e-14);
    }

    #[test]
    fn zero_lambda_has_no_ctilde() {
        let params = SystemParams::from_ints(1, &[2, 2]).unwrap();
        let pq = compute_pq(&params).unwrap();
        let c = build_chain(&params, &pq, &[1.0, 1.0], 0.0).unwrap();
        assert!(matches!(c.ctilde(), Err(Error::ZeroLambda)));
        assert!(matches!(minorant(&c, &[1.0, 1.0], 5.0), Err(Error::ZeroLambda)));
    }

    #[test]
    fn minorant_example() {
        let m = minorant(&chain_22(), &[1.0, 1.0], 5.0).unwrap();
        assert_relative_eq!(m.threshold, THRESHOLD_22, max_relative = 1e-13);
        assert_relative_eq!(m.t0_tilde, T0_22_F5, max_relative = 1e-13);
        assert_relative_eq!(m.offset, OFFSET_22_F5, max_relative = 1e-13);
        assert_relative_eq!(m.amplitude, AMPLITUDE_22, max_relative = 1e-13);
        assert_relative_eq!(m.rate, 2.0 / 3.0, max_relative = 1e-15);
        // the bound starts at g_1(0) = 0
        assert!(m.value(0.0).abs() < 1e-12);
        assert!(m.value(m.t0_tilde * (1.0 - 1e-9)) > 1e6);
        assert!(m.value(m.t0_tilde).is_infinite());
    }

    #[test]
    fn minorant_vanishes_at_zero_for_every_rate() {
        // amplitude C~^{-alpha_1} makes the bound start at g_1(0) = 0 whatever alpha_1 is
        for (p, c, lt) in [(vec![2, 3], [1.0, 1.0, 1.0], 1.0), (vec![3, 1, 2], [0.7, 1.3, 2.0], 0.4)] {
            let params = SystemParams::from_ints(1, &p).unwrap();
            let pq = compute_pq(&params).unwrap();
            let chain = build_chain(&params, &pq, &c[..p.len()], lt).unwrap();
            let alpha = compute_alpha(&params).unwrap().alpha_f64();
            assert!((alpha[0] - 1.0).abs() > 0.1);
            let threshold = (alpha[1] * chain.ln_x(alpha[0]).unwrap()).exp();
            let m = minorant(&chain, &alpha, 3.0 * threshold).unwrap();
            assert!(m.value(0.0).abs() <= 1e-12 * m.offset, "{p:?}: {}", m.value(0.0));
        }
    }

    #[test]
    fn below_threshold_is_rejected() {
        let c = chain_22();
        let err = minorant(&c, &[1.0, 1.0], THRESHOLD_22 / 2.0).unwrap_err();
        assert!(matches!(err, Error::BelowThreshold { .. }));
        // strict inequality at the threshold itself
        assert!(minorant(&c, &[1.0, 1.0], THRESHOLD_22 * (1.0 - 1e-12)).is_err());
    }

    #[test]
    fn t0_decreases_with_data() {
        let c = chain_22();
        let t: Vec<f64> = [10.0, 100.0, 1000.0]
            .iter()
            .map(|&f| minorant(&c, &[1.0, 1.0], f).unwrap().t0_tilde)
            .collect();
        assert!(t[0] > t[1] && t[1] > t[2]);
        assert_relative_eq!(t[0], 0.416_167_467_565_707_516, max_relative = 1e-12);
        assert_relative_eq!(t[2], 0.003_638_650_879_387_426_1, max_relative = 1e-11);
    }

    #[test]
    fn constructed_crossing_gives_unit_radius() {
        // U(R) = R against 1/R (exponent n - 2 alpha = -1)
        let r0 = solve_r0(&|r| r, 1.0, 1, &|r: f64| 1.0 / r).unwrap();
        assert_relative_eq!(r0, 1.0, max_relative = 1e-9);
    }

    #[test]
    fn upper_bound_rejects_subcritical_component() {
        let params = SystemParams::from_ints(3, &[4]).unwrap();
        let err = pde_upper_bound(&params, 1.0, &|r| r, 0, LaplacianFactor::Doubled).unwrap_err();
        assert!(matches!(err, Error::NotSupercritical { .. }));
    }

    #[test]
    fn scaled_threshold_scaling() {
        // X(2R) / X(R) = 2^{(n - 2 alpha_2) / alpha_2}
        for (n, p) in [(1u32, vec![2i64, 3]), (1, vec![2, 2, 2]), (2, vec![1, 2]), (3, vec![1, 2, 2])] {
            let params = SystemParams::from_ints(n, &p).unwrap();
            let sc = ScaledChain::new(&params, 3.0, 1, LaplacianFactor::Doubled).unwrap();
            let a2 = sc.alpha()[1];
            for r in [0.3, 1.0, 7.0] {
                let ratio = (sc.ln_x_at(2.0 * r).unwrap() - sc.ln_x_at(r).unwrap()).exp();
                let expect = 2f64.powf((n as f64 - 2.0 * a2) / a2);
                assert_relative_eq!(ratio, expect, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn upper_bound_t0_is_kappa_r0_squared() {
        let params = SystemParams::from_ints(1, &[2, 3]).unwrap();
        let u0 = |r: f64| 0.8 * (1.0 - (-r).exp());
        let b = pde_upper_bound(&params, 4.0, &u0, 1, LaplacianFactor::Doubled).unwrap();
        assert_relative_eq!(b.t0, b.kappa * b.r0 * b.r0, max_relative = 1e-6);
        assert_relative_eq!(b.minorant.t0_tilde, b.t0);
        assert_eq!(b.lambda_chain.len(), 2);
    }

    #[test]
    fn sharp_factor_halves_decay_rates() {
        let params = SystemParams::from_ints(1, &[2, 3]).unwrap();
        let d = ScaledChain::new(&params, 4.0, 1, LaplacianFactor::Doubled).unwrap();
        let s = ScaledChain::new(&params, 4.0, 1, LaplacianFactor::Sharp).unwrap();
        for (a, b) in d.lambda_chain().iter().zip(s.lambda_chain()) {
            assert_relative_eq!(*a, 2.0 * b);
        }
    }

    #[test]
    fn equality_system_dominates_minorant() {
        let spec = OdeSystemSpec::new(vec![2.0, 2.0], vec![1.0, 1.0], 1.0, vec![0.0, 5.0]).unwrap();
        let c = check_minorant(&spec, 1e-10).unwrap();
        assert!(c.holds(), "{c:?}");
        assert!(c.samples > 10);
        assert!(c.t_num.unwrap() < T0_22_F5);
    }

    mod props {
        use super::*;
        use crate::exponents::rat;
        use proptest::prelude::*;

        fn chain_input() -> impl Strategy<Value = (SystemParams, Vec<f64>, f64)> {
            prop::collection::vec((0i64..=12, 0.3f64..3.0), 2..=5)
                .prop_filter_map("all exponents one", |raw| {
                    let p = raw.iter().map(|&(a, _)| rat(4 + a, 4)).collect();
                    let c = raw.iter().map(|&(_, c)| c).collect();
                    SystemParams::new(1, p).ok().filter(|s| !s.is_degenerate()).map(|s| (s, c))
                })
                .prop_flat_map(|(s, c)| (Just(s), Just(c), 0.05f64..2.0))
        }

        proptest! {
            #[test]
            fn recurrences_match_products((params, c, lt) in chain_input()) {
                let pq = compute_pq(&params).unwrap();
                let chain = build_chain(&params, &pq, &c, lt).unwrap();
                let k = params.k();
                let p = params.p_f64();
                for j in 0..k - 1 {
                    let expect = (c[j] / chain.big_p[j]).ln() + p[j] * chain.ln_a[j + 1];
                    prop_assert!((chain.ln_a[j] - expect).abs() <= 1e-12 * (1.0 + expect.abs()));
                    prop_assert!((chain.l[j] - p[j] * chain.l[j + 1]).abs() <= 1e-12 * chain.l[j]);
                }
                prop_assert_eq!(chain.l[k - 1], lt);
                prop_assert!((chain.ln_a[k - 1] - (c[k - 1] / (p[k - 1] + 1.0)).ln()).abs() < 1e-14);
            }

            #[test]
            fn minorant_starts_at_zero_and_lifespan_shrinks((params, c, lt) in chain_input(), factor in 1.05f64..50.0) {
                let pq = compute_pq(&params).unwrap();
                let chain = build_chain(&params, &pq, &c, lt).unwrap();
                let alpha = compute_alpha(&params).unwrap().alpha_f64();
                let threshold = (alpha[1] * chain.ln_x(alpha[0]).unwrap()).exp();
                prop_assume!(threshold.is_finite() && threshold > 0.0 && threshold < 1e100);
                let m = minorant(&chain, &alpha, factor * threshold).unwrap();
                prop_assert!(m.t0_tilde > 0.0);
                prop_assert!(m.value(0.0).abs() <= 1e-9 * m.offset);
                let bigger = minorant(&chain, &alpha, 2.0 * factor * threshold).unwrap();
                prop_assert!(bigger.t0_tilde < m.t0_tilde);
            }
        }
    }
}
