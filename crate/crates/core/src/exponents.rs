//! Exact algebra of the critical exponent vector.
//!
//! For the cyclic system `u_j' - Δu_j = |u_{j+1}|^{p_j}` the exponent vector
//! `alpha` solves `(P - I) alpha = 1`, where `P` carries `p_j` on the cyclic
//! super-diagonal. Everything here is computed in arbitrary-precision
//! rationals so the identities can be checked with zero tolerance.
//!
//! Indices are zero-based in code: component `j` of the maths is `j - 1` here,
//! and `p_{j+k} = p_j` is realised by [`SystemParams::p`] wrapping modulo `k`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Parses `"3"`, `"3/2"` or a decimal such as `"2.5"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let num: BigInt = a
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParams(format!("bad numerator in {s:?}")))?;
        let den: BigInt = b
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParams(format!("bad denominator in {s:?}")))?;
        if den.is_zero() {
            return Err(Error::InvalidParams(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let digits = format!("{whole}{frac}");
        let num: BigInt = digits
            .parse()
            .map_err(|_| Error::InvalidParams(format!("bad decimal {s:?}")))?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(Rational::new(num, den));
    }
    s.parse::<BigInt>()
        .map(Rational::from_integer)
        .map_err(|_| Error::InvalidParams(format!("bad rational {s:?}")))
}

/// Number of components `k`, exponents `p_1..p_k` and spatial dimension `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemParams {
    n: u32,
    p: Vec<Rational>,
}

impl SystemParams {
    pub fn new(n: u32, p: Vec<Rational>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("dimension n must be positive".into()));
        }
        if p.is_empty() {
            return Err(Error::InvalidParams("need at least one component".into()));
        }
        if let Some(bad) = p.iter().find(|pj| **pj < Rational::one()) {
            return Err(Error::InvalidParams(format!("exponent {bad} is below 1")));
        }
        Ok(Self { n, p })
    }

    pub fn from_ints(n: u32, p: &[i64]) -> Result<Self> {
        Self::new(n, p.iter().map(|&v| int(v)).collect())
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> usize {
        self.p.len()
    }

    /// Cyclic access: `p(j + k) == p(j)`.
    pub fn p(&self, j: usize) -> &Rational {
        &self.p[j % self.p.len()]
    }

    pub fn exponents(&self) -> &[Rational] {
        &self.p
    }

    pub fn p_f64(&self) -> Vec<f64> {
        self.p.iter().map(to_f64).collect()
    }

    pub fn half_n(&self) -> Rational {
        rat(self.n as i64, 2)
    }

    pub fn is_degenerate(&self) -> bool {
        self.p.iter().all(|pj| pj.is_one())
    }

    /// Relabels components so that new component `i` is old component `i + shift`.
    pub fn rotated(&self, shift: usize) -> Self {
        let k = self.k();
        Self {
            n: self.n,
            p: (0..k).map(|i| self.p(i + shift).clone()).collect(),
        }
    }

    pub fn product(&self) -> Rational {
        self.p.iter().fold(Rational::one(), |acc, pj| acc * pj)
    }
}

/// Position of `alpha_max` relative to `n/2`.
///
/// `Supercritical` means `alpha_max > n/2`: every nontrivial nonnegative
/// solution blows up. `Subcritical` means `alpha_max < n/2`: small data
/// exist globally.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Criticality {
    Subcritical,
    Critical,
    Supercritical,
}

impl fmt::Display for Criticality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Criticality::Subcritical => "subcritical",
            Criticality::Critical => "critical",
            Criticality::Supercritical => "supercritical",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct ExponentProfile {
    pub params: SystemParams,
    pub alpha: Vec<Rational>,
    pub alpha_max: Rational,
    /// Zero-based; ties go to the smallest index.
    pub argmax_index: usize,
    pub criticality: Criticality,
    /// Slack parameter of the small-data decay vector, set when subcritical.
    pub epsilon: Option<Rational>,
    /// `(1 + epsilon) * alpha`, set when subcritical.
    pub l_case1: Option<Vec<Rational>>,
    /// `alpha - (alpha_max - n/2)`, set when supercritical.
    pub l_case2: Option<Vec<Rational>>,
}

impl ExponentProfile {
    pub fn k(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha_f64(&self) -> Vec<f64> {
        self.alpha.iter().map(to_f64).collect()
    }
}

fn closed_form_alpha(params: &SystemParams) -> Vec<Rational> {
    let k = params.k();
    let den = params.product() - Rational::one();
    (0..k)
        .map(|j| {
            let mut sum = Rational::one();
            let mut prod = Rational::one();
            for h in 0..k.saturating_sub(1) {
                prod *= params.p(j + h);
                sum += &prod;
            }
            sum / &den
        })
        .collect()
}

/// The cyclic weighted shift `P - I` as a dense rational matrix.
pub fn shift_minus_identity(params: &SystemParams) -> Vec<Vec<Rational>> {
    let k = params.k();
    let mut m = vec![vec![Rational::zero(); k]; k];
    for (j, row) in m.iter_mut().enumerate() {
        row[(j + 1) % k] += params.p(j);
        row[j] -= Rational::one();
    }
    m
}

/// Gauss-Jordan elimination over the rationals. `None` when singular.
pub fn solve_exact(matrix: &[Vec<Rational>], rhs: &[Rational]) -> Option<Vec<Rational>> {
    let k = rhs.len();
    let mut a: Vec<Vec<Rational>> = matrix
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    for col in 0..k {
        let pivot = (col..k).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for v in a[col].iter_mut() {
            *v *= &inv;
        }
        for r in 0..k {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for c in col..=k {
                    let delta = &factor * &a[col][c];
                    a[r][c] -= delta;
                }
            }
        }
    }
    Some(a.into_iter().map(|mut row| row.pop().unwrap()).collect())
}

/// Default slack: `epsilon = min(1, (n / (2 alpha_max) - 1) / 2)`.
pub fn default_epsilon(alpha_max: &Rational, n: u32) -> Rational {
    let slack = (int(n as i64) / (int(2) * alpha_max) - Rational::one()) / int(2);
    if slack > Rational::one() {
        Rational::one()
    } else {
        slack
    }
}

pub fn compute_alpha(params: &SystemParams) -> Result<ExponentProfile> {
    compute_alpha_with_epsilon(params, None)
}

pub fn compute_alpha_with_epsilon(
    params: &SystemParams,
    epsilon: Option<Rational>,
) -> Result<ExponentProfile> {
    if params.is_degenerate() {
        return Err(Error::SingularSystem);
    }
    let alpha = closed_form_alpha(params);
    let ones = vec![Rational::one(); params.k()];
    let solved = solve_exact(&shift_minus_identity(params), &ones).ok_or(Error::SingularSystem)?;
    assert_eq!(alpha, solved, "closed form disagrees with (P - I) alpha = 1");

    let mut argmax_index = 0;
    for (j, a) in alpha.iter().enumerate() {
        if *a > alpha[argmax_index] {
            argmax_index = j;
        }
    }
    let alpha_max = alpha[argmax_index].clone();
    let half_n = params.half_n();
    let criticality = match alpha_max.cmp(&half_n) {
        std::cmp::Ordering::Less => Criticality::Subcritical,
        std::cmp::Ordering::Equal => Criticality::Critical,
        std::cmp::Ordering::Greater => Criticality::Supercritical,
    };

    let (mut eps_out, mut l_case1, mut l_case2) = (None, None, None);
    match criticality {
        Criticality::Subcritical => {
            let eps = epsilon.unwrap_or_else(|| default_epsilon(&alpha_max, params.n()));
            if !eps.is_positive() || (Rational::one() + &eps) * &alpha_max >= half_n {
                return Err(Error::Domain(format!(
                    "epsilon {eps} must be positive with (1 + eps) alpha_max < n/2"
                )));
            }
            let scale = Rational::one() + &eps;
            l_case1 = Some(alpha.iter().map(|a| a * &scale).collect());
            eps_out = Some(eps);
        }
        Criticality::Supercritical => {
            let shift = &alpha_max - &half_n;
            l_case2 = Some(alpha.iter().map(|a| a - &shift).collect());
        }
        Criticality::Critical => {}
    }

    Ok(ExponentProfile {
        params: params.clone(),
        alpha,
        alpha_max,
        argmax_index,
        criticality,
        epsilon: eps_out,
        l_case1,
        l_case2,
    })
}

/// `P_1..P_k` and `Q_1..Q_k` (stored zero-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PqSequences {
    pub p_seq: Vec<Rational>,
    pub q_seq: Vec<Rational>,
}

impl PqSequences {
    pub fn big_p(&self, i: usize) -> &Rational {
        &self.p_seq[i]
    }
    pub fn big_q(&self, i: usize) -> &Rational {
        &self.q_seq[i]
    }
}

/// Defining sums, evaluated term by term.
fn pq_direct(params: &SystemParams) -> (Vec<Rational>, Vec<Rational>) {
    let k = params.k();
    let mut p_seq = vec![Rational::zero(); k];
    let mut q_seq = vec![Rational::zero(); k];
    p_seq[k - 1] = params.p(k - 1) + Rational::one();
    q_seq[k - 1] = Rational::one();
    for j in 1..k {
        let start = k - 1 - j;
        let partial = |last: usize| {
            let mut sum = Rational::one();
            let mut prod = Rational::one();
            for h in 0..=last {
                prod *= params.p(start + h);
                sum += &prod;
            }
            sum
        };
        p_seq[start] = partial(j);
        q_seq[start] = partial(j - 1);
    }
    (p_seq, q_seq)
}

pub fn compute_pq(params: &SystemParams) -> Result<PqSequences> {
    let k = params.k();
    if k < 2 {
        return Err(Error::Domain("P/Q sequences need k >= 2".into()));
    }
    let mut p_seq = vec![Rational::zero(); k];
    let mut q_seq = vec![Rational::zero(); k];
    p_seq[k - 1] = params.p(k - 1) + Rational::one();
    q_seq[k - 1] = Rational::one();
    for i in (0..k - 1).rev() {
        p_seq[i] = params.p(i) * &p_seq[i + 1] + Rational::one();
        q_seq[i] = params.p(i) * &q_seq[i + 1] + Rational::one();
    }

    let (p_direct, q_direct) = pq_direct(params);
    assert_eq!(p_seq, p_direct, "P recurrence disagrees with the defining sums");
    assert_eq!(q_seq, q_direct, "Q recurrence disagrees with the defining sums");
    for i in 0..k {
        let tail: Rational = (i..k).fold(Rational::one(), |acc, m| acc * params.p(m));
        assert_eq!(&p_seq[i] - &q_seq[i], tail, "P - Q product identity");
    }
    if !params.is_degenerate() {
        let den = &p_seq[0] - &q_seq[0] - Rational::one();
        let alpha = closed_form_alpha(params);
        assert_eq!(alpha[0], &q_seq[0] / &den, "alpha_1 = Q_1 / (P_1 - Q_1 - 1)");
        assert_eq!(alpha[1], &p_seq[1] / &den, "alpha_2 = P_2 / (P_1 - Q_1 - 1)");
    }
    Ok(PqSequences { p_seq, q_seq })
}

/// Checks `p_{j-1} alpha_j - 1 = alpha_{j-1}` for every `j`, cyclically.
pub fn blowup_rate_identity(params: &SystemParams) -> Result<Vec<bool>> {
    let profile = compute_alpha(params)?;
    let k = params.k();
    Ok((0..k)
        .map(|j| {
            let prev = (j + k - 1) % k;
            params.p(prev) * &profile.alpha[j] - Rational::one() == profile.alpha[prev]
        })
        .collect())
}

/// Predicted log-log slope of lifespan against data size: `-1 / (alpha_max - n/2)`.
pub fn lifespan_exponent(profile: &ExponentProfile) -> Result<Rational> {
    if profile.criticality != Criticality::Supercritical {
        return Err(Error::NotSupercritical {
            alpha: profile.alpha_max.to_string(),
            half_n: profile.params.half_n().to_string(),
        });
    }
    Ok(-(&profile.alpha_max - profile.params.half_n()).recip())
}
