//! Trial state certifying the two-term upper bound.
//!
//! The state is assembled in rescaled variables `(r̂, t̂) = (h^{-1/3}r, h^{-1/2}t)`
//! from three ingredients: the de Gennes corrector chain φ₀, φ₁, φ₂ built
//! with the regularized resolvent, a phase-modulated and rescaled Montgomery
//! ground state ψ, and smooth plateau cut-offs. Its energy is evaluated
//! against the flattened model quadratic form
//!
//! ```text
//! q(v) = ∫ |(hD_r - M₁)v|² + |M₂v|² + |hD_t v|²  dr dt,
//! M₁ = sinθ (t - h^{1/2}ξ₀),
//! M₂ = (1+2κr)^{1/2} (-cosθ (t - h^{1/2}ξ₀) + κcosθ rt - (γ/2)(r² - h^{2/3}ρ)),
//! ```
//!
//! whose corrected ratio `(q/‖v‖² - Θ₀h)/h^{4/3}` approaches the model
//! constant c^conj(γ, θ) from the band data.

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::model1d::{
    degennes_ground_state, find_degennes_min, regularized_resolvent, GroundProfile,
    SpectralConstants,
};
use num_complex::Complex64;

/// Parameters of the trial state: the frame data (θ, κ_g, κ_{n,B}) of the
/// boundary point it concentrates at, the semiclassical parameter and the
/// cut-off shape.
#[derive(Clone, Copy, Debug)]
pub struct QuasimodeParams {
    pub theta: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub h: f64,
    /// Cut-off length exponent, in (5/18, 1/3).
    pub delta: f64,
    /// Cut-off width constant.
    pub c0: f64,
}

impl QuasimodeParams {
    pub fn new(theta: f64, kappa: f64, gamma: f64, h: f64) -> Result<Self> {
        let p = QuasimodeParams { theta, kappa, gamma, h, delta: 0.3, c0: 16.0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0) {
            return Err(Error::InvalidParameter(format!("h must be positive, got {}", self.h)));
        }
        if !(self.delta > 5.0 / 18.0 && self.delta < 1.0 / 3.0) {
            return Err(Error::InvalidParameter(format!(
                "delta = {} outside (5/18, 1/3)",
                self.delta
            )));
        }
        if !(self.c0 > 0.0) {
            return Err(Error::InvalidParameter(format!("c0 must be positive, got {}", self.c0)));
        }
        Ok(())
    }
}

/// Smooth even plateau bump: 1 on [-1/4, 1/4], supported in [-1/2, 1/2].
pub fn chi(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= 0.25 {
        1.0
    } else if ax >= 0.5 {
        0.0
    } else {
        let y = (0.5 - ax) * 4.0;
        let a = (-1.0 / y).exp();
        let b = (-1.0 / (1.0 - y)).exp();
        a / (a + b)
    }
}

/// `∫ χ² dσ` by Simpson quadrature (used to normalize the s-cut-off).
pub fn chi_sq_integral() -> f64 {
    let n = 4000;
    let (a, b) = (-0.5, 0.5);
    let hstep = (b - a) / n as f64;
    let mut s = 0.0;
    for i in 0..=n {
        let x = a + i as f64 * hstep;
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        s += w * chi(x) * chi(x);
    }
    s * hstep / 3.0
}

/// Normalized s-cut-off `χ_h(s) = c₁ h^{-δ/2} χ(C₀⁻¹ h^{-δ} s)` with
/// `∫ χ_h² ds = 1`.
pub fn chi_h(s: f64, h: f64, delta: f64, c0: f64) -> f64 {
    let c1 = 1.0 / (c0 * chi_sq_integral()).sqrt();
    c1 * h.powf(-delta / 2.0) * chi(s * h.powf(-delta) / c0)
}

/// De Gennes corrector chain on its grid (pointwise values, trapezoid
/// normalization as in [`GroundProfile`]).
#[derive(Clone, Debug)]
pub struct PhiChain {
    pub grid: Grid1D,
    pub xi0: f64,
    pub theta0: f64,
    pub phi0: Vec<f64>,
    pub phi1: Vec<f64>,
    pub phi2: Vec<f64>,
}

/// Build φ₁ = 2R₀((t-ξ₀)φ₀) and φ₂ = 2R₀((t-ξ₀)φ₁ - <(t-ξ₀)φ₁, φ₀>φ₀).
pub fn build_phi_chain(grid: &Grid1D) -> Result<PhiChain> {
    let (xi0, theta0) = find_degennes_min(grid, 1e-9)?;
    let p0 = degennes_ground_state(xi0, grid)?;
    let nodes = grid.nodes();

    let weighted = |f: &[f64]| -> Vec<f64> {
        nodes.iter().zip(f).map(|(t, v)| (t - xi0) * v).collect()
    };
    let u1 = weighted(&p0.values);
    let w1 = regularized_resolvent(&u1, xi0, theta0, &p0)?;
    let phi1: Vec<f64> = w1.iter().map(|x| 2.0 * x).collect();

    let mut u2 = weighted(&phi1);
    let c = p0.inner(&u2, &p0.values);
    for (v, p) in u2.iter_mut().zip(&p0.values) {
        *v -= c * p;
    }
    let w2 = regularized_resolvent(&u2, xi0, theta0, &p0)?;
    let phi2: Vec<f64> = w2.iter().map(|x| 2.0 * x).collect();

    Ok(PhiChain { grid: grid.clone(), xi0, theta0, phi0: p0.values, phi1, phi2 })
}

/// Phase-modulated, rescaled Montgomery profile with its derived scales.
#[derive(Clone, Debug)]
pub struct PsiProfile {
    pub c: f64,
    pub d: f64,
    pub rho: f64,
    pub alpha_theta: f64,
    /// (c/d)^{1/6}: the r-dilation of the Montgomery profile.
    pub scale: f64,
}

/// Derived ψ-data: `c = cos²θ + δ₀ sin²θ`, `d = δ₀²γ²/c`,
/// `ρ = (c/d)^{1/3} ρ₀`, `α(θ) = sinθ cosθ (1-δ₀)/c`;
/// `ψ(r) = (c/d)^{-1/12} e^{iφ(r)} ψ₀((c/d)^{-1/6} r)` with phase
/// `φ(r) = γ α(θ)(r³/6 + ρ r/2)`.
pub fn psi_scales(params: &QuasimodeParams, constants: &SpectralConstants) -> Result<PsiProfile> {
    if params.gamma == 0.0 {
        return Err(Error::InvalidParameter(
            "gamma = 0 degenerates the Montgomery scaling (d = 0)".into(),
        ));
    }
    let d0 = constants.delta0;
    let (sn, cs) = params.theta.sin_cos();
    let c = cs * cs + d0 * sn * sn;
    let d = d0 * d0 * params.gamma * params.gamma / c;
    let ratio = c / d;
    Ok(PsiProfile {
        c,
        d,
        rho: ratio.cbrt() * constants.rho0,
        alpha_theta: sn * cs * (1.0 - d0) / c,
        scale: ratio.powf(1.0 / 6.0),
    })
}

/// Sample ψ on a uniform r̂-axis (spline interpolation of the Montgomery
/// ground state).
pub fn build_psi(
    params: &QuasimodeParams,
    constants: &SpectralConstants,
    psi0: &GroundProfile,
    axis: &Axis,
) -> Result<(PsiProfile, Vec<Complex64>)> {
    let scales = psi_scales(params, constants)?;
    let spline = Spline::fit(psi0)?;
    let amp = scales.scale.powf(-0.5); // (c/d)^{-1/12}
    let vals = (0..axis.n)
        .map(|i| {
            let r = axis.at(i);
            let base = amp * spline.eval(r / scales.scale);
            let phase = params.gamma * scales.alpha_theta * (r * r * r / 6.0 + scales.rho * r / 2.0);
            Complex64::from_polar(1.0, phase) * base
        })
        .collect();
    Ok((scales, vals))
}

/// Uniform quadrature axis.
#[derive(Clone, Copy, Debug)]
pub struct Axis {
    pub min: f64,
    pub step: f64,
    pub n: usize,
}

impl Axis {
    pub fn at(&self, i: usize) -> f64 {
        self.min + i as f64 * self.step
    }
    pub fn max(&self) -> f64 {
        self.at(self.n - 1)
    }
}

/// Default quadrature axes: r̂ symmetric and t̂ from 0, covering the cut-off
/// supports with margin at the given steps.
pub fn default_trial_axes(params: &QuasimodeParams, step_r: f64, step_t: f64) -> (Axis, Axis) {
    let support_r = 0.5 * params.c0 * params.h.powf(params.delta - 1.0 / 3.0) + 0.5;
    let support_t = 0.5 * params.c0 * params.h.powf(params.delta - 0.5) + 0.5;
    let nr = (2.0 * support_r / step_r).ceil() as usize | 1;
    let nt = (support_t / step_t).ceil() as usize + 1;
    (
        Axis { min: -(nr as f64 - 1.0) / 2.0 * step_r, step: step_r, n: nr },
        Axis { min: 0.0, step: step_t, n: nt },
    )
}

/// Assembled trial state `v₀(r̂, t̂)` with its quadrature data. Physical
/// quantities are recovered through the exact change of variables
/// `v(r,t) = h^{-5/12} v₀(h^{-1/3}r, h^{-1/2}t)`.
#[derive(Clone, Debug)]
pub struct TrialState {
    pub params: QuasimodeParams,
    pub r_axis: Axis,
    pub t_axis: Axis,
    /// Row-major values, index `ir * t_axis.n + it`.
    pub values: Vec<Complex64>,
    pub rho: f64,
}

/// Assemble `w_h = φ₀ψ + h^{1/6}φ₁(L₁⁰ψ) + h^{1/3}φ₂((L₁⁰)²ψ)` multiplied
/// by the plateau cut-offs, with `L₁⁰ = sinθ D_r - (γ/2)cosθ(r²-ρ)`.
pub fn assemble_v(
    params: &QuasimodeParams,
    chain: &PhiChain,
    constants: &SpectralConstants,
    psi0: &GroundProfile,
    r_axis: &Axis,
    t_axis: &Axis,
) -> Result<TrialState> {
    let (scales, psi) = build_psi(params, constants, psi0, r_axis)?;
    assemble_from_parts(params, chain, &psi, scales.rho, r_axis, t_axis)
}

/// As [`assemble_v`] with explicit ψ samples (oracle tests swap in
/// replacement profiles).
pub fn assemble_from_parts(
    params: &QuasimodeParams,
    chain: &PhiChain,
    psi: &[Complex64],
    rho: f64,
    r_axis: &Axis,
    t_axis: &Axis,
) -> Result<TrialState> {
    params.validate()?;
    let h = params.h;
    let support_r = 0.5 * params.c0 * h.powf(params.delta - 1.0 / 3.0);
    let support_t = 0.5 * params.c0 * h.powf(params.delta - 0.5);
    if -r_axis.min < support_r || r_axis.max() < support_r || t_axis.max() < support_t {
        return Err(Error::GridTooSmall(format!(
            "axes r [{}, {}], t [0, {}] do not cover the cut-off supports {support_r:.2}, {support_t:.2}",
            r_axis.min,
            r_axis.max(),
            t_axis.max()
        )));
    }
    if psi.len() != r_axis.n {
        return Err(Error::InvalidParameter("psi sample count must match the r-axis".into()));
    }

    let h16 = h.powf(1.0 / 6.0);
    let (sn, cs) = params.theta.sin_cos();
    let gamma = params.gamma;

    // L₁⁰ψ and (L₁⁰)²ψ by fourth-order central differences.
    let l1 = |f: &[Complex64]| -> Vec<Complex64> {
        let n = f.len();
        let dr = r_axis.step;
        (0..n)
            .map(|i| {
                let g = |j: isize| -> Complex64 {
                    if j < 0 || j >= n as isize {
                        Complex64::ZERO
                    } else {
                        f[j as usize]
                    }
                };
                let i = i as isize;
                let der = (g(i - 2) - 8.0 * g(i - 1) + 8.0 * g(i + 1) - g(i + 2)) / (12.0 * dr);
                let dpsi = Complex64::new(der.im, -der.re); // -i d/dr
                let r = r_axis.at(i as usize);
                sn * dpsi - 0.5 * cs * gamma * (r * r - rho) * g(i)
            })
            .collect()
    };
    let l1psi = l1(psi);
    let l1l1psi = l1(&l1psi);

    // φ-profiles on the t̂-axis.
    let s0 = Spline::from_grid(&chain.grid, &chain.phi0)?;
    let s1 = Spline::from_grid(&chain.grid, &chain.phi1)?;
    let s2 = Spline::from_grid(&chain.grid, &chain.phi2)?;
    let phi0: Vec<f64> = (0..t_axis.n).map(|i| s0.eval(t_axis.at(i))).collect();
    let phi1: Vec<f64> = (0..t_axis.n).map(|i| s1.eval(t_axis.at(i))).collect();
    let phi2: Vec<f64> = (0..t_axis.n).map(|i| s2.eval(t_axis.at(i))).collect();

    let h13 = h16 * h16;
    let mut values = vec![Complex64::ZERO; r_axis.n * t_axis.n];
    for ir in 0..r_axis.n {
        let r = r_axis.at(ir);
        let cut_r = chi(r / (params.c0 * h.powf(params.delta - 1.0 / 3.0)));
        if cut_r == 0.0 {
            continue;
        }
        for it in 0..t_axis.n {
            let t = t_axis.at(it);
            let cut = cut_r * chi(t / (params.c0 * h.powf(params.delta - 0.5)));
            if cut == 0.0 {
                continue;
            }
            let w = phi0[it] * psi[ir]
                + h16 * phi1[it] * l1psi[ir]
                + h13 * phi2[it] * l1l1psi[ir];
            values[ir * t_axis.n + it] = cut * w;
        }
    }
    Ok(TrialState { params: *params, r_axis: *r_axis, t_axis: *t_axis, values, rho })
}

impl TrialState {
    fn quad_weight(&self, ir: usize, it: usize) -> f64 {
        let wr = if ir == 0 || ir == self.r_axis.n - 1 { 0.5 } else { 1.0 };
        let wt = if it == 0 || it == self.t_axis.n - 1 { 0.5 } else { 1.0 };
        wr * wt * self.r_axis.step * self.t_axis.step
    }

    /// `‖v‖²_{L²(dr dt)} = ∫ |v₀|² dr̂ dt̂` (the change of variables is
    /// norm-preserving).
    pub fn norm_sq(&self) -> f64 {
        let nt = self.t_axis.n;
        let mut s = 0.0;
        for ir in 0..self.r_axis.n {
            for it in 0..nt {
                s += self.quad_weight(ir, it) * self.values[ir * nt + it].norm_sqr();
            }
        }
        s
    }

    /// Physical moment `∫ r^k t^n |v|² dr dt = h^{k/3 + n/2} ∫ r̂^k t̂^n |v₀|²`.
    pub fn physical_moment(&self, k: u32, n: u32) -> f64 {
        let nt = self.t_axis.n;
        let mut s = 0.0;
        for ir in 0..self.r_axis.n {
            let rk = self.r_axis.at(ir).powi(k as i32);
            for it in 0..nt {
                let tn = self.t_axis.at(it).powi(n as i32);
                s += self.quad_weight(ir, it) * rk * tn * self.values[ir * nt + it].norm_sqr();
            }
        }
        s * self.params.h.powf(k as f64 / 3.0 + n as f64 / 2.0)
    }

    fn d_t(&self) -> Vec<Complex64> {
        let (nr, nt) = (self.r_axis.n, self.t_axis.n);
        let dt = self.t_axis.step;
        let mut out = vec![Complex64::ZERO; nr * nt];
        for ir in 0..nr {
            let row = ir * nt;
            for it in 0..nt {
                let g = |j: isize| -> Complex64 {
                    if j < 0 || j >= nt as isize {
                        Complex64::ZERO
                    } else {
                        self.values[row + j as usize]
                    }
                };
                let i = it as isize;
                let der = if it == 0 {
                    // One-sided at the boundary, consistent with the Neumann
                    // form (no boundary term in the quadratic form).
                    (-3.0 * g(0) + 4.0 * g(1) - g(2)) / (2.0 * dt)
                } else if it == 1 || it + 2 >= nt {
                    (g(i + 1) - g(i - 1)) / (2.0 * dt)
                } else {
                    (g(i - 2) - 8.0 * g(i - 1) + 8.0 * g(i + 1) - g(i + 2)) / (12.0 * dt)
                };
                out[row + it] = Complex64::new(der.im, -der.re);
            }
        }
        out
    }

    fn d_r(&self) -> Vec<Complex64> {
        let (nr, nt) = (self.r_axis.n, self.t_axis.n);
        let dr = self.r_axis.step;
        let mut out = vec![Complex64::ZERO; nr * nt];
        for it in 0..nt {
            for ir in 0..nr {
                let g = |j: isize| -> Complex64 {
                    if j < 0 || j >= nr as isize {
                        Complex64::ZERO
                    } else {
                        self.values[j as usize * nt + it]
                    }
                };
                let i = ir as isize;
                let der = if ir == 0 || ir + 1 == nr {
                    Complex64::ZERO
                } else if ir == 1 || ir + 2 >= nr {
                    (g(i + 1) - g(i - 1)) / (2.0 * dr)
                } else {
                    (g(i - 2) - 8.0 * g(i - 1) + 8.0 * g(i + 1) - g(i + 2)) / (12.0 * dr)
                };
                out[ir * nt + it] = Complex64::new(der.im, -der.re);
            }
        }
        out
    }

    /// `∫ |h D_t v|² dr dt = h ∫ |D_t̂ v₀|² dr̂ dt̂`.
    pub fn dt_energy_physical(&self) -> f64 {
        let d = self.d_t();
        let nt = self.t_axis.n;
        let mut s = 0.0;
        for ir in 0..self.r_axis.n {
            for it in 0..nt {
                s += self.quad_weight(ir, it) * d[ir * nt + it].norm_sqr();
            }
        }
        s * self.params.h
    }
}

/// The flattened model quadratic form of the trial state (physical units).
///
/// Rejects boxes on which `1 + 2κr` is not positive.
pub fn energy_qm00(trial: &TrialState, constants: &SpectralConstants) -> Result<f64> {
    let p = &trial.params;
    let h = p.h;
    let (sn, cs) = p.theta.sin_cos();
    let h12 = h.sqrt();
    let h13 = h.powf(1.0 / 3.0);
    let h23 = h13 * h13;
    let h56 = h12 * h13;
    let xi0 = constants.xi0;

    let (nr, nt) = (trial.r_axis.n, trial.t_axis.n);
    // Curvature factor positivity over the physical support.
    for ir in 0..nr {
        let r_phys = h13 * trial.r_axis.at(ir);
        if 1.0 + 2.0 * p.kappa * r_phys <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "1 + 2κr vanishes on the grid (κ = {}, r = {r_phys})",
                p.kappa
            )));
        }
    }

    let drv = trial.d_r();
    let dtv = trial.d_t();
    let mut q = 0.0;
    for ir in 0..nr {
        let r = trial.r_axis.at(ir);
        let curv = (1.0 + 2.0 * p.kappa * h13 * r).sqrt();
        for it in 0..nt {
            let t = trial.t_axis.at(it);
            let i = ir * nt + it;
            let v = trial.values[i];
            let m1 = sn * h12 * (t - xi0);
            let term1 = (h23 * drv[i] - m1 * v).norm_sqr();
            let m2 = curv
                * (-cs * h12 * (t - xi0) + p.kappa * cs * h56 * r * t
                    - 0.5 * p.gamma * h23 * (r * r - trial.rho));
            let term2 = (m2 * v).norm_sqr();
            let term3 = h * dtv[i].norm_sqr();
            q += trial.quad_weight(ir, it) * (term1 + term2 + term3);
        }
    }
    Ok(q)
}

// ---------------------------------------------------------------------------
// Natural cubic spline on a uniform grid (profile interpolation).
// ---------------------------------------------------------------------------

struct Spline {
    x0: f64,
    dx: f64,
    y: Vec<f64>,
    /// Second derivatives at the nodes.
    m: Vec<f64>,
}

impl Spline {
    fn from_points(x0: f64, dx: f64, y: Vec<f64>) -> Result<Self> {
        let n = y.len();
        if n < 4 {
            return Err(Error::InvalidParameter("spline needs at least 4 points".into()));
        }
        // Natural spline: tridiagonal system for interior second derivatives.
        let m_inner = n - 2;
        let diag = vec![4.0; m_inner];
        let off = vec![1.0; m_inner - 1];
        let rhs: Vec<f64> = (1..n - 1)
            .map(|i| 6.0 * (y[i + 1] - 2.0 * y[i] + y[i - 1]) / (dx * dx))
            .collect();
        let sol = crate::eigen::solve_tridiag(&diag, &off, 0.0, &rhs);
        let mut m = vec![0.0; n];
        m[1..(n - 1)].copy_from_slice(&sol);
        Ok(Spline { x0, dx, y, m })
    }

    fn from_grid(grid: &Grid1D, values: &[f64]) -> Result<Self> {
        let nodes = grid.nodes();
        Spline::from_points(nodes[0], grid.spacing(), values.to_vec())
    }

    fn fit(profile: &GroundProfile) -> Result<Self> {
        Spline::from_grid(&profile.grid, &profile.values)
    }

    /// Evaluate; zero outside the fitted range (the profiles decay below
    /// 1e-10 at the cut).
    fn eval(&self, x: f64) -> f64 {
        let n = self.y.len();
        let pos = (x - self.x0) / self.dx;
        if pos < 0.0 || pos > (n - 1) as f64 {
            return 0.0;
        }
        let k = (pos.floor() as usize).min(n - 2);
        let a = pos - k as f64;
        let b = 1.0 - a;
        b * self.y[k]
            + a * self.y[k + 1]
            + self.dx * self.dx / 6.0
                * ((b * b * b - b) * self.m[k] + (a * a * a - a) * self.m[k + 1])
    }
}
