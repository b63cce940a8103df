//! Principal Dirichlet eigenfunction of the unit ball and the weights built from it.
//!
//! `psi` solves `-Δpsi = (lambda/2) psi` in the unit ball, vanishes on the
//! sphere and has unit L¹ mass. The weight `phi_R(x) = psi(|x|/R)^2` then
//! satisfies `-Δphi_R <= lambda R^{-2} phi_R`, and `U_{j,R}(t) = ∫ u_j phi_R`
//! is the functional the blow-up argument tracks.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::mesh::{simpson, RadialMesh};
use crate::pde::FieldState;

/// Surface area of the unit sphere in `R^n` (two points for `n = 1`).
pub fn sphere_area(n: u32) -> f64 {
    match n {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => {
            let half = n as f64 / 2.0;
            2.0 * PI.powf(half) / statrs::function::gamma::gamma(half)
        }
    }
}

fn bessel_series(order: u32, x: f64) -> f64 {
    // sum_m (-1)^m (x/2)^{2m + order} / (m! (m + order)!)
    let half = 0.5 * x;
    let mut term = (0..order).fold(1.0, |acc, i| acc * half / (i + 1) as f64);
    let mut sum = term;
    let q = -half * half;
    for m in 1..200 {
        term *= q / (m as f64 * (m + order) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

pub fn bessel_j0(x: f64) -> f64 {
    bessel_series(0, x)
}

pub fn bessel_j1(x: f64) -> f64 {
    bessel_series(1, x)
}

/// `J_1(x) / x`, finite at the origin.
fn bessel_j1_over_x(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        0.5 - x * x / 16.0
    } else {
        bessel_j1(x) / x
    }
}

/// First positive zero of `J_0` by bracketing bisection on `[2, 3]`.
pub fn bessel_j0_first_zero() -> f64 {
    let (mut lo, mut hi) = (2.0_f64, 3.0_f64);
    debug_assert!(bessel_j0(lo) > 0.0 && bessel_j0(hi) < 0.0);
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if bessel_j0(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Profile {
    Cosine,
    Bessel { root: f64 },
    Sinc,
}

/// The normalized eigenfunction and its eigenvalue parameter `lambda`
/// (`lambda / 2` is the principal Dirichlet eigenvalue).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunctionSpec {
    pub n: u32,
    pub lambda: f64,
    /// Amplitude making `∫ psi = 1`.
    pub norm: f64,
    /// Quadrature density for integrals over the unit ball.
    pub nodes_per_unit: usize,
    profile: Profile,
}

pub fn build_psi(n: u32) -> Result<TestFunctionSpec> {
    let (lambda, norm, profile) = match n {
        1 => (PI * PI / 2.0, PI / 4.0, Profile::Cosine),
        2 => {
            let j = bessel_j0_first_zero();
            // ∫ 2 pi r J_0(j r) dr over [0, 1] = 2 pi J_1(j) / j
            (2.0 * j * j, j / (2.0 * PI * bessel_j1(j)), Profile::Bessel { root: j })
        }
        // ∫ 4 pi r^2 sin(pi r) / r dr = 4
        3 => (2.0 * PI * PI, 0.25, Profile::Sinc),
        other => return Err(Error::UnsupportedDimension(other)),
    };
    Ok(TestFunctionSpec {
        n,
        lambda,
        norm,
        nodes_per_unit: 4096,
        profile,
    })
}

/// `sin(x)/x` and its first two derivatives.
fn sinc_derivs(x: f64) -> (f64, f64, f64) {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        (
            1.0 - x2 / 6.0 + x2 * x2 / 120.0,
            -x / 3.0 + x * x2 / 30.0,
            -1.0 / 3.0 + x2 / 10.0 - x2 * x2 / 168.0,
        )
    } else {
        let (s, c) = x.sin_cos();
        let f = s / x;
        let d1 = (x * c - s) / (x * x);
        (f, d1, -f - 2.0 * d1 / x)
    }
}

impl TestFunctionSpec {
    /// `(psi, psi', psi'')` at radius `r`, zero outside the ball.
    pub fn derivatives(&self, r: f64) -> (f64, f64, f64) {
        if r >= 1.0 {
            return (0.0, 0.0, 0.0);
        }
        let c = self.norm;
        match self.profile {
            Profile::Cosine => {
                let k = PI / 2.0;
                let (s, co) = (k * r).sin_cos();
                (c * co, -c * k * s, -c * k * k * co)
            }
            Profile::Bessel { root } => {
                let x = root * r;
                let j0 = bessel_j0(x);
                (
                    c * j0,
                    -c * root * bessel_j1(x),
                    -c * root * root * (j0 - bessel_j1_over_x(x)),
                )
            }
            Profile::Sinc => {
                let (f, d1, d2) = sinc_derivs(PI * r);
                (c * PI * f, c * PI * PI * d1, c * PI * PI * PI * d2)
            }
        }
    }

    pub fn psi(&self, r: f64) -> f64 {
        self.derivatives(r).0
    }

    /// `psi'(r) / r`, with its limit `psi''(0)` at the origin.
    fn dpsi_over_r(&self, r: f64) -> f64 {
        let c = self.norm;
        match self.profile {
            Profile::Bessel { root } => -c * root * root * bessel_j1_over_x(root * r),
            _ if r < 1e-8 => self.derivatives(0.0).2,
            _ => self.derivatives(r).1 / r,
        }
    }

    /// Radial Laplacian of `psi` from the closed-form derivatives.
    pub fn laplacian_psi(&self, r: f64) -> f64 {
        let (_, _, d2) = self.derivatives(r);
        d2 + (self.n as f64 - 1.0) * self.dpsi_over_r(r)
    }

    /// `phi_R(r) = psi(r / R)^2`.
    pub fn phi(&self, big_r: f64, r: f64) -> f64 {
        let v = self.psi(r / big_r);
        v * v
    }

    /// `Δphi_R(r)` by the product rule, for `r < R`.
    pub fn laplacian_phi(&self, big_r: f64, r: f64) -> f64 {
        let y = r / big_r;
        let (v, d1, d2) = self.derivatives(y);
        let radial = (self.n as f64 - 1.0) * 2.0 * v * self.dpsi_over_r(y);
        (2.0 * d1 * d1 + 2.0 * v * d2 + radial) / (big_r * big_r)
    }

    /// `max |Δpsi + (lambda/2) psi|` over the given interior radii.
    pub fn eigen_residual(&self, radii: &[f64]) -> f64 {
        radii
            .iter()
            .filter(|&&r| r < 1.0)
            .map(|&r| (self.laplacian_psi(r) + 0.5 * self.lambda * self.psi(r)).abs())
            .fold(0.0, f64::max)
    }

    /// `min (lambda R^{-2} phi_R + Δphi_R)` over `samples` equispaced radii in `[0, R)`;
    /// nonnegative when `-Δphi_R <= lambda R^{-2} phi_R` holds there.
    pub fn eigen_inequality_margin(&self, big_r: f64, samples: usize) -> f64 {
        (0..samples)
            .map(|i| {
                let r = big_r * i as f64 / samples as f64;
                self.lambda / (big_r * big_r) * self.phi(big_r, r) + self.laplacian_phi(big_r, r)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Same residual with a second-order finite-difference Laplacian on a
    /// uniform grid of spacing `1 / cells`.
    pub fn fd_eigen_residual(&self, cells: usize) -> f64 {
        let h = 1.0 / cells as f64;
        let v: Vec<f64> = (0..=cells).map(|i| self.psi(i as f64 * h)).collect();
        let nm1 = self.n as f64 - 1.0;
        let mut worst = 2.0 * self.n as f64 * (v[1] - v[0]) / (h * h) + 0.5 * self.lambda * v[0];
        worst = worst.abs();
        for i in 1..cells {
            let r = i as f64 * h;
            let lap = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (h * h)
                + nm1 / r * (v[i + 1] - v[i - 1]) / (2.0 * h);
            worst = worst.max((lap + 0.5 * self.lambda * v[i]).abs());
        }
        worst
    }

    /// `∫_{|x|<b} f(|x|) dx` by composite Simpson at this spec's density.
    pub fn ball_integral<F: Fn(f64) -> f64>(&self, f: F, b: f64) -> f64 {
        let n = self.n;
        let cells = ((self.nodes_per_unit as f64 * b).ceil() as usize).max(self.nodes_per_unit);
        sphere_area(n) * simpson(|r| f(r) * r.powi(n as i32 - 1), b, cells)
    }

    pub fn l1_norm(&self) -> f64 {
        self.ball_integral(|r| self.psi(r), 1.0)
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.ball_integral(|r| self.psi(r).powi(2), 1.0)
    }

    /// `U_R = ∫ u0(|x|) phi_R(x) dx` for data that vanishes beyond `support`.
    pub fn data_functional<F: Fn(f64) -> f64>(&self, u0: F, support: f64, big_r: f64) -> f64 {
        let b = support.min(big_r);
        let cells = 4096;
        sphere_area(self.n) * simpson(|r| u0(r) * self.phi(big_r, r) * r.powi(self.n as i32 - 1), b, cells)
    }

    /// Quadrature vector `c_i` with `U_{j,R} = sum_i c_i u_j(r_i)` on `mesh`.
    pub fn mass_kernel(&self, mesh: &RadialMesh, big_r: f64) -> Result<Vec<f64>> {
        if !(big_r > 0.0) {
            return Err(Error::InvalidParams("R must be positive".into()));
        }
        let inside = mesh.nodes_within(big_r);
        if inside < 32 {
            return Err(Error::MeshTooCoarse { nodes: inside, radius: big_r });
        }
        if mesh.radius() < big_r {
            return Err(Error::PreconditionViolation(format!(
                "mesh radius {} does not cover R = {big_r}",
                mesh.radius()
            )));
        }
        let area = sphere_area(self.n);
        Ok(mesh
            .nodes()
            .iter()
            .zip(mesh.simpson_weights())
            .map(|(&r, w)| area * w * self.phi(big_r, r) * r.powi(self.n as i32 - 1))
            .collect())
    }
}

/// `∫ u_j(t, x) phi_R(x) dx` on the field's own mesh.
pub fn weighted_mass(field: &FieldState, spec: &TestFunctionSpec, big_r: f64, j: usize) -> Result<f64> {
    let kernel = spec.mass_kernel(&field.mesh, big_r)?;
    Ok(kernel.iter().zip(&field.u[j]).map(|(c, u)| c * u).sum())
}

/// Root of `u0_curve(R) = threshold(R)` by bracketing bisection in `log R`.
///
/// `threshold` must decrease like `R^{n - 2 alpha}`, which needs `alpha > n/2`.
pub fn solve_r0(
    u0_curve: &dyn Fn(f64) -> f64,
    alpha_j0: f64,
    n: u32,
    threshold: &dyn Fn(f64) -> f64,
) -> Result<f64> {
    if !(alpha_j0 > n as f64 / 2.0) {
        return Err(Error::NotSupercritical {
            alpha: alpha_j0.to_string(),
            half_n: (n as f64 / 2.0).to_string(),
        });
    }
    let above = |r: f64| u0_curve(r) >= threshold(r);
    let (mut lo, mut hi) = (1.0_f64, 1.0_f64);
    if above(1.0) {
        let mut found = false;
        for _ in 0..400 {
            lo *= 0.5;
            if !above(lo) {
                found = true;
                break;
            }
        }
        if !found {
            return Err(Error::NoRoot);
        }
    } else {
        let mut found = false;
        for _ in 0..400 {
            hi *= 2.0;
            if !hi.is_finite() {
                break;
            }
            if above(hi) {
                found = true;
                break;
            }
        }
        if !found {
            return Err(Error::NoRoot);
        }
    }
    while hi / lo - 1.0 > 1e-12 {
        let mid = (lo * hi).sqrt();
        if above(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo * hi).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // reference values evaluated to 40 digits outside this crate
    const J01: f64 = 2.404_825_557_695_772_768_62;
    const PSI_L2_SQ: [f64; 3] = [
        0.616_850_275_068_084_913_677,
        0.460_211_316_411_321_709_190,
        0.392_699_081_698_724_154_808,
    ];

    #[test]
    fn eigenvalues() {
        assert_relative_eq!(build_psi(1).unwrap().lambda, 4.934_802_200_544_679_3, max_relative = 1e-15);
        assert_relative_eq!(build_psi(3).unwrap().lambda, 19.739_208_802_178_717, max_relative = 1e-15);
        assert_relative_eq!(bessel_j0_first_zero(), J01, max_relative = 1e-14);
        assert_relative_eq!(build_psi(2).unwrap().lambda, 11.566_371_925_893_569, max_relative = 1e-13);
    }

    #[test]
    fn unsupported_dimension() {
        assert!(matches!(build_psi(4), Err(Error::UnsupportedDimension(4))));
        assert!(matches!(build_psi(0), Err(Error::UnsupportedDimension(0))));
    }

    #[test]
    fn one_dimensional_profile() {
        let s = build_psi(1).unwrap();
        for x in [0.0, 0.3, 0.9] {
            assert_relative_eq!(s.psi(x), PI / 4.0 * (PI * x / 2.0).cos(), max_relative = 1e-15);
        }
        assert_eq!(s.psi(1.0), 0.0);
        assert_eq!(s.psi(1.5), 0.0);
    }

    #[test]
    fn normalization_and_residual() {
        for n in 1..=3 {
            let s = build_psi(n).unwrap();
            assert!((s.l1_norm() - 1.0).abs() < 1e-10, "n = {n}: {}", s.l1_norm());
            assert_relative_eq!(s.l2_norm_sq(), PSI_L2_SQ[n as usize - 1], max_relative = 1e-10);
            let radii: Vec<f64> = (0..1000).map(|i| i as f64 / 1000.0).collect();
            assert!(s.eigen_residual(&radii) < 1e-8);
            assert!(s.psi(0.5) > 0.0);
        }
    }

    #[test]
    fn fd_residual_is_second_order() {
        for n in 1..=3 {
            let s = build_psi(n).unwrap();
            let coarse = s.fd_eigen_residual(64);
            let fine = s.fd_eigen_residual(128);
            let order = (coarse / fine).log2();
            assert!((order - 2.0).abs() < 0.2, "n = {n}: order {order}");
        }
    }

    #[test]
    fn eigen_inequality_on_nodes() {
        for n in 1..=3 {
            let s = build_psi(n).unwrap();
            for big_r in [0.5, 1.0, 2.0, 8.0] {
                let slack = s.eigen_inequality_margin(big_r, 2000);
                assert!(slack >= -1e-10, "n={n} R={big_r}: {slack}");
            }
        }
    }

    #[test]
    fn constant_field_mass() {
        for n in 1..=3 {
            let s = build_psi(n).unwrap();
            for big_r in [1.0, 2.0] {
                let mesh = RadialMesh::uniform(4.0, 2048);
                let state = FieldState::new(0.0, vec![vec![1.0; mesh.len()], vec![0.0; mesh.len()]], mesh);
                let m = weighted_mass(&state, &s, big_r, 0).unwrap();
                let exact = big_r.powi(n as i32) * PSI_L2_SQ[n as usize - 1];
                assert!((m - exact).abs() < 1e-8, "n={n} R={big_r}: {m} vs {exact}");
                assert!(m <= big_r.powi(n as i32));
                assert_eq!(weighted_mass(&state, &s, big_r, 1).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn mass_grows_and_saturates_with_radius() {
        let s = build_psi(1).unwrap();
        let mesh = RadialMesh::uniform(8.0, 8192);
        let u: Vec<f64> = mesh.nodes().iter().map(|&r| s.phi(0.5, r)).collect();
        let state = FieldState::new(0.0, vec![u], mesh);
        let m: Vec<f64> = [1.0, 2.0, 4.0]
            .iter()
            .map(|&r| weighted_mass(&state, &s, r, 0).unwrap())
            .collect();
        assert!(m[0] < m[1] && m[1] < m[2]);
        // phi_R -> psi(0)^2 on the support as R grows
        let limit = (PI / 4.0).powi(2) * 0.5 * PSI_L2_SQ[0];
        assert!((m[2] - limit).abs() < (m[1] - limit).abs());
    }

    #[test]
    fn coarse_mesh_is_rejected() {
        let s = build_psi(1).unwrap();
        let mesh = RadialMesh::uniform(4.0, 64);
        let state = FieldState::new(0.0, vec![vec![1.0; mesh.len()]], mesh);
        assert!(matches!(weighted_mass(&state, &s, 1.0, 0), Err(Error::MeshTooCoarse { .. })));
    }

    #[test]
    fn solve_r0_constructed_cases() {
        let r = solve_r0(&|r| r, 1.0, 1, &|r: f64| 1.0 / r).unwrap();
        assert!((r - 1.0).abs() < 1e-10);
        let r = solve_r0(&|r: f64| (r * r).min(4.0), 1.0, 1, &|r: f64| 8.0 / r).unwrap();
        assert!((r - 2.0).abs() < 2e-10);
        assert!(matches!(solve_r0(&|_| 0.0, 1.0, 1, &|r: f64| 1.0 / r), Err(Error::NoRoot)));
        assert!(matches!(
            solve_r0(&|r| r, 0.4, 1, &|r: f64| 1.0 / r),
            Err(Error::NotSupercritical { .. })
        ));
    }

    #[test]
    fn gaussian_r0_grows_as_data_shrinks() {
        let s = build_psi(1).unwrap();
        let thr = |r: f64| 3.0 * r.powf(1.0 - 1.6);
        let r0 = |amp: f64| {
            let u = move |r: f64| amp * (-r * r).exp();
            solve_r0(&|big_r| s.data_functional(u, 8.0, big_r), 0.8, 1, &thr).unwrap()
        };
        let (a, b) = (r0(1.0), r0(0.5));
        assert!(a.is_finite() && a > 0.0);
        assert!(b > a);
    }
}
