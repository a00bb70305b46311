//! Effective boundary energy along the tangency curve, its minimizers on
//! the helical ball, and the two-term eigenvalue expansion
//! `λ₁(h) ≈ Θ₀ h + γ̂ h^{4/3}`.
//!
//! Two variants of the angular factor are carried side by side: the squared
//! form `(1 - (1-δ₀)(B·T)²)^{1/3}` and the first-power form
//! `(1 - (1-δ₀)|B·T|)^{1/3}`. They coincide where B ⊥ T but predict
//! different minimizer sets on the helical ball; the first-power form is
//! the one whose pitch threshold τ₀ and minimizer locations admit closed
//! forms, and it is the default. Both are reported, neither is silently
//! preferred by the numerics.

use crate::error::{Error, Result};
use crate::geometry::{self, Branch, Vec3, ALL_BRANCHES};
use crate::model1d::SpectralConstants;

/// Angular-factor variant of the effective boundary energy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnergyVariant {
    /// `(1 - (1-δ₀)(B·T)²)^{1/3}`; algebraically equal to
    /// `c^conj(κ_{n,B}, θ)` with sin θ = B·T.
    SquaredBt,
    /// `(1 - (1-δ₀)|B·T|)^{1/3}`; the form behind the τ₀ threshold and the
    /// explicit minimizer sets. Default.
    LinearBt,
}

/// Threshold classification of the pitch τ against τ₀.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// τ ≤ τ₀: two antipodal equatorial minimizers.
    SubThreshold,
    /// τ > τ₀: four minimizers at x₃ = ±sqrt(1 - τ₀/τ).
    SuperThreshold,
}

/// Minimization result of the effective energy over Γ.
#[derive(Clone, Debug)]
pub struct MinimizationReport {
    pub gamma_hat: f64,
    pub argmin: Vec<Vec3>,
    pub tau0: f64,
    pub regime: Regime,
    pub variant: EnergyVariant,
}

/// Effective boundary energy density
/// `γ̃ = 2^{-2/3} ν̂₀ δ₀^{1/3} κ^{2/3} (angular factor)^{1/3}`.
pub fn gamma_tilde(
    kappa_nb: f64,
    b_dot_t: f64,
    constants: &SpectralConstants,
    variant: EnergyVariant,
) -> Result<f64> {
    if !(kappa_nb > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "kappa_nb must be positive, got {kappa_nb}"
        )));
    }
    if b_dot_t.abs() > 1.0 + 1e-12 {
        return Err(Error::InvalidParameter(format!("|B·T| = {} exceeds 1", b_dot_t.abs())));
    }
    let d = constants.delta0;
    let angular = match variant {
        EnergyVariant::SquaredBt => 1.0 - (1.0 - d) * b_dot_t * b_dot_t,
        EnergyVariant::LinearBt => 1.0 - (1.0 - d) * b_dot_t.abs(),
    };
    Ok(prefactor(constants) * kappa_nb.powf(2.0 / 3.0) * angular.cbrt())
}

fn prefactor(constants: &SpectralConstants) -> f64 {
    0.25_f64.cbrt() * constants.nu0_hat * constants.delta0.cbrt()
}

/// Model-operator second-term constant
/// `c^conj(γ, θ) = (1/2)^{2/3} δ₀^{1/3} |γ|^{2/3} (δ₀ sin²θ + cos²θ)^{1/3} ν̂₀`.
pub fn c_conj(gamma: f64, theta: f64, constants: &SpectralConstants) -> f64 {
    let (s, c) = theta.sin_cos();
    prefactor(constants)
        * gamma.abs().powf(2.0 / 3.0)
        * (constants.delta0 * s * s + c * c).cbrt()
}

/// Critical pitch `τ₀ = (1/√2) (1/sqrt(δ₀(2-δ₀)) - 1)^{1/2}`.
///
/// Equivalently the unique positive root of `f'(v) = 0`, i.e. of the
/// quartic `v⁴ + v² = μ₀²/(4(1-μ₀²))` with μ₀ = 1-δ₀.
pub fn tau0(delta0: f64) -> Result<f64> {
    if !(delta0 > 0.0 && delta0 < 1.0) {
        return Err(Error::InvalidParameter(format!("delta0 = {delta0} outside (0, 1)")));
    }
    let inner = 1.0 / (delta0 + delta0 * (1.0 - delta0)).sqrt() - 1.0;
    Ok((0.5 * inner).sqrt())
}

/// Energy profile `f(v) = 1 + v² - μ₀ v sqrt(1+v²)` of the first-power
/// variant along the helical Γ, with v = τ(1 - x₃²).
pub fn f_v(v: f64, mu0: f64) -> f64 {
    1.0 + v * v - mu0 * v * (1.0 + v * v).sqrt()
}

/// Analytic derivative `f'(v) = 2v - μ₀ (1+2v²)/sqrt(1+v²)`.
pub fn f_v_prime(v: f64, mu0: f64) -> f64 {
    2.0 * v - mu0 * (1.0 + 2.0 * v * v) / (1.0 + v * v).sqrt()
}

/// Two-term expansion `Θ₀ h + γ̂ h^{4/3}`.
pub fn two_term_eigenvalue(h: f64, gamma_hat: f64, constants: &SpectralConstants) -> f64 {
    constants.theta0 * h + gamma_hat * h.powf(4.0 / 3.0)
}

/// Evaluate γ̃ at a chart parameter of the helical Γ.
fn energy_at(
    branch: Branch,
    param: f64,
    tau: f64,
    constants: &SpectralConstants,
    variant: EnergyVariant,
) -> Result<f64> {
    let x = geometry::gamma_branch(branch, param, tau)?;
    gamma_tilde(
        geometry::kappa_nb(x[2], tau),
        geometry::b_dot_t(x[2], tau),
        constants,
        variant,
    )
}

/// Dense sampling of γ̃ along all four charts plus a golden-section polish
/// of every local minimum; global minimizers are reported up to an ambient
/// clustering tolerance of 1e-6 (distinct symmetric copies are kept).
pub fn minimize_over_gamma(
    tau: f64,
    constants: &SpectralConstants,
    variant: EnergyVariant,
    n_samples: usize,
) -> Result<MinimizationReport> {
    if n_samples < 1000 {
        return Err(Error::InvalidParameter(format!(
            "need at least 1000 samples per chart, got {n_samples}"
        )));
    }
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter(format!("tau must be positive, got {tau}")));
    }
    let lim = 0.9995;
    let mut candidates: Vec<(Branch, f64, f64)> = Vec::new(); // (branch, param, value)
    for branch in ALL_BRANCHES {
        let mut vals = Vec::with_capacity(n_samples + 1);
        for k in 0..=n_samples {
            let p = -lim + 2.0 * lim * k as f64 / n_samples as f64;
            let v = energy_at(branch, p, tau, constants, variant)?;
            vals.push((p, v));
        }
        // Local minima of the sampled profile (including the chart ends).
        for k in 0..vals.len() {
            let here = vals[k].1;
            let left = if k > 0 { vals[k - 1].1 } else { f64::INFINITY };
            let right = if k + 1 < vals.len() { vals[k + 1].1 } else { f64::INFINITY };
            if here <= left && here <= right {
                let a = if k > 0 { vals[k - 1].0 } else { vals[k].0 - 1e-9 };
                let b = if k + 1 < vals.len() { vals[k + 1].0 } else { vals[k].0 + 1e-9 };
                let (p, v) = golden_min(
                    |x| energy_at(branch, x, tau, constants, variant).unwrap(),
                    a.max(-lim),
                    b.min(lim),
                );
                candidates.push((branch, p, v));
            }
        }
    }
    if candidates.is_empty() {
        return Err(Error::InvalidParameter("sampling produced no finite values".into()));
    }
    let gamma_hat = candidates.iter().map(|c| c.2).fold(f64::INFINITY, f64::min);
    // Collect all global minimizers, deduplicating identical ambient points
    // (chart overlaps), keeping distinct symmetric copies.
    let mut argmin: Vec<Vec3> = Vec::new();
    for (branch, p, v) in &candidates {
        if *v <= gamma_hat + 1e-12 * gamma_hat.abs() {
            let x = geometry::gamma_branch(*branch, *p, tau)?;
            let dup = argmin
                .iter()
                .any(|y| geometry::norm(geometry::sub(*y, x)) < 1e-6);
            if !dup {
                argmin.push(x);
            }
        }
    }
    let t0 = tau0(constants.delta0)?;
    let regime = if tau <= t0 { Regime::SubThreshold } else { Regime::SuperThreshold };
    Ok(MinimizationReport { gamma_hat, argmin, tau0: t0, regime, variant })
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > 1e-12 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}
