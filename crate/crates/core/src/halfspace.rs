//! Bottom of the spectrum σ(ν) of the half-space model operator
//! `H(ν) = D₁² + D₂² + (D₃ + x₁ cos ν − x₂ sin ν)²` with Neumann condition
//! on `{x₁ = 0}`.
//!
//! For `sin ν ≠ 0` the operator is reduced analytically before any
//! discretization: a Fourier transform in the translation-invariant `x₃`
//! direction replaces `D₃` by a number, and a translation in `x₂` absorbs
//! it. What is solved numerically is the 2D Schrödinger operator
//! `D₁² + D₂² + (x₁ cos ν − x₂ sin ν)²` on the half-plane, truncated to
//! `[0, L₁] × [-L₂, L₂]` with Dirichlet conditions at the artificial cuts.
//! At ν = 0 the translation argument degenerates and σ(0) = Θ₀ is taken
//! from the de Gennes band instead.

use crate::eigen::{smallest_eig_operator, LinearOp};
use crate::error::{Error, Result};
use crate::grid::{Bc, Grid1D};
use crate::model1d::SpectralConstants;
use rayon::prelude::*;

// Approximate constants used only to size truncation boxes: the state sits
// near x₂ ≈ ξ₀/sin ν with spread (√δ₀ sin ν)^{-1/2}.
const XI0_APPROX: f64 = 0.7682;
const SQRT_DELTA0_APPROX: f64 = 0.765;

/// Truncation box `[0, l1] × [-l2, l2]` with its grid resolution.
#[derive(Clone, Copy, Debug)]
pub struct HalfPlaneBox {
    pub l1: f64,
    pub l2: f64,
    /// Interior nodes along x₁ (plus the Neumann boundary node).
    pub n1: usize,
    /// Interior nodes along x₂.
    pub n2: usize,
}

/// One sample of σ(ν).
#[derive(Clone, Copy, Debug)]
pub struct SigmaSample {
    pub nu: f64,
    pub value: f64,
    pub residual: f64,
    pub box_used: HalfPlaneBox,
    /// Set below ν = 0.05: the needed box grows like 1/sin ν, so these
    /// samples should be trusted with caution.
    pub low_nu_caution: bool,
}

/// Minimal box extents for the state at `nu` to be captured with tails
/// below the target tolerance.
fn required_extents(nu: f64, tol: f64) -> (f64, f64) {
    let s = nu.abs().sin().max(1e-6);
    let l2 = XI0_APPROX / s + 6.5 / (SQRT_DELTA0_APPROX * s).sqrt();
    // Along the channel the state decays like exp(-sqrt(1 - σ) d); near
    // ν = π/2 that rate vanishes and the Dirichlet cut must sit at
    // L₁ ≈ π/(2 sqrt(tol)) for a truncation error below tol.
    let sigma_ub = 1.0 - 0.41 * nu.cos() * nu.cos();
    let cap = std::f64::consts::FRAC_PI_2 / (0.5 * tol).sqrt();
    let l1 = (8.0 + 4.0 * s / (1.0 - sigma_ub).max(1e-12).sqrt()).min(cap).max(12.0);
    (l1, l2)
}

/// Auto-scaled default box at spacing 0.1 (the `[0,15] × [-40,40]` default
/// applies for mid-range ν; the extents grow like `1/sin ν` for small ν and
/// along x₁ near ν = π/2).
pub fn default_box(nu: f64, tol: f64) -> HalfPlaneBox {
    default_box_with_spacing(nu, tol, 0.1)
}

/// As [`default_box`] with an explicit grid spacing (coarse spacings trade
/// accuracy for speed; the sweep stays matched as long as one spacing is
/// used throughout).
pub fn default_box_with_spacing(nu: f64, tol: f64, dx: f64) -> HalfPlaneBox {
    let (l1m, l2m) = required_extents(nu, tol);
    let l1 = l1m.max(15.0);
    let l2 = l2m.max(40.0);
    let n1 = (l1 / dx).round() as usize;
    let n2 = (2.0 * l2 / dx).round() as usize;
    HalfPlaneBox { l1: n1 as f64 * dx, l2: n2 as f64 * dx / 2.0, n1: n1 - 1, n2: n2 - 1 }
}

struct HalfPlaneOp {
    m1: usize,
    m2: usize,
    inv_d1sq: f64,
    inv_d2sq: f64,
    potential: Vec<f64>,
}

impl HalfPlaneOp {
    fn new(nu: f64, bx: &HalfPlaneBox) -> Result<Self> {
        let g1 = Grid1D::new(0.0, bx.l1, bx.n1, Bc::Neumann, Bc::Dirichlet)?;
        let g2 = Grid1D::new(-bx.l2, bx.l2, bx.n2, Bc::Dirichlet, Bc::Dirichlet)?;
        let x1 = g1.nodes();
        let x2 = g2.nodes();
        let (c, s) = (nu.cos(), nu.sin());
        let m1 = x1.len();
        let m2 = x2.len();
        let mut potential = vec![0.0; m1 * m2];
        for (i, &a) in x1.iter().enumerate() {
            for (j, &b) in x2.iter().enumerate() {
                let w = a * c - b * s;
                potential[i * m2 + j] = w * w;
            }
        }
        Ok(Self {
            m1,
            m2,
            inv_d1sq: 1.0 / (g1.spacing() * g1.spacing()),
            inv_d2sq: 1.0 / (g2.spacing() * g2.spacing()),
            potential,
        })
    }
}

impl LinearOp for HalfPlaneOp {
    fn dim(&self) -> usize {
        self.m1 * self.m2
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let (m1, m2) = (self.m1, self.m2);
        let (k1, k2) = (self.inv_d1sq, self.inv_d2sq);
        let sqrt2 = std::f64::consts::SQRT_2;
        out.par_chunks_mut(m2).enumerate().for_each(|(i, row)| {
            let base = i * m2;
            for (j, slot) in row.iter_mut().enumerate() {
                let u = x[base + j];
                // x₂ second difference, Dirichlet outside.
                let mut acc = (2.0 * u
                    - if j > 0 { x[base + j - 1] } else { 0.0 }
                    - if j + 1 < m2 { x[base + j + 1] } else { 0.0 })
                    * k2;
                // x₁ second difference: row 0 is the Neumann boundary node in
                // the weighted representation (coupling -√2/Δ²).
                acc += match i {
                    0 => (2.0 * u - sqrt2 * x[base + m2 + j]) * k1,
                    1 => {
                        let up = if i + 1 < m1 { x[base + m2 + j] } else { 0.0 };
                        (2.0 * u - sqrt2 * x[base - m2 + j] - up) * k1
                    }
                    _ => {
                        let up = if i + 1 < m1 { x[base + m2 + j] } else { 0.0 };
                        (2.0 * u - x[base - m2 + j] - up) * k1
                    }
                };
                *slot = acc + self.potential[base + j] * u;
            }
        });
    }
}

/// σ(ν) on the truncated half-plane. Negative ν is folded to |ν|
/// (σ is even); ν = 0 is rejected, see [`sigma_at_zero`].
pub fn sigma(nu: f64, bx: &HalfPlaneBox, tol: f64) -> Result<SigmaSample> {
    let nu = nu.abs();
    if nu == 0.0 {
        return Err(Error::InvalidParameter(
            "sigma(0) reduces to the de Gennes band; use sigma_at_zero".into(),
        ));
    }
    if nu > std::f64::consts::FRAC_PI_2 + 1e-12 {
        return Err(Error::InvalidParameter(format!("nu = {nu} outside [-pi/2, pi/2]")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    let (l1_need, l2_need) = required_extents(nu, tol);
    if bx.l1 < 0.95 * l1_need || bx.l2 < 0.95 * l2_need {
        return Err(Error::GridTooSmall(format!(
            "box [0,{}]x[-{},{}] too small for nu = {nu} (need l1 >= {l1_need:.1}, l2 >= {l2_need:.1})",
            bx.l1, bx.l2, bx.l2
        )));
    }
    let op = HalfPlaneOp::new(nu, bx)?;
    let r = smallest_eig_operator(&op, 1e-5, 40_000)?;
    Ok(SigmaSample {
        nu,
        value: r.value,
        residual: r.residual,
        box_used: *bx,
        low_nu_caution: nu < 0.05,
    })
}

/// σ(0) = Θ₀: at ν = 0 the dual-variable infimum reproduces the de Gennes
/// band minimum.
pub fn sigma_at_zero(constants: &SpectralConstants) -> f64 {
    constants.theta0
}

/// Sweep of σ over `nu_list` with matched spacing and auto-scaled boxes.
/// Failures propagate per-sample.
pub fn sigma_sweep(nu_list: &[f64], tol: f64) -> Vec<Result<SigmaSample>> {
    sigma_sweep_with_spacing(nu_list, tol, 0.1)
}

/// As [`sigma_sweep`] at an explicit matched spacing.
pub fn sigma_sweep_with_spacing(nu_list: &[f64], tol: f64, dx: f64) -> Vec<Result<SigmaSample>> {
    nu_list
        .iter()
        .map(|&nu| {
            let bx = default_box_with_spacing(nu, tol, dx);
            sigma(nu, &bx, tol)
        })
        .collect()
}
