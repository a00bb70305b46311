//! Symmetric tridiagonal smallest eigenpair via Sturm bisection and inverse
//! iteration, plus the 1D Schrödinger discretizer feeding it.

use super::{seeded_unit_vector, EigenResult};
use crate::error::{Error, Result};
use crate::grid::{Bc, Grid1D};

const PIVOT_GUARD: f64 = 1e-300;

/// Number of eigenvalues strictly below `lambda` (Sturm sequence via LDLT
/// pivot signs).
pub(crate) fn sturm_count(diag: &[f64], offdiag: &[f64], lambda: f64) -> usize {
    let n = diag.len();
    let mut count = 0usize;
    let mut q = diag[0] - lambda;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..n {
        let q_safe = if q.abs() < PIVOT_GUARD {
            if q >= 0.0 {
                PIVOT_GUARD
            } else {
                -PIVOT_GUARD
            }
        } else {
            q
        };
        q = (diag[i] - lambda) - offdiag[i - 1] * offdiag[i - 1] / q_safe;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin_bounds(diag: &[f64], offdiag: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let e_left = if i > 0 { offdiag[i - 1].abs() } else { 0.0 };
        let e_right = if i < n - 1 { offdiag[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - e_left - e_right);
        hi = hi.max(diag[i] + e_left + e_right);
    }
    (lo, hi)
}

/// `k`-th smallest eigenvalue (0-based) to bisection width `tol`.
pub(crate) fn kth_eigenvalue_tridiag(diag: &[f64], offdiag: &[f64], k: usize, tol: f64) -> f64 {
    let (mut lo, mut hi) = gershgorin_bounds(diag, offdiag);
    lo -= 1.0;
    hi += 1.0;
    while hi - lo > tol.max(4.0 * f64::EPSILON * hi.abs().max(1.0)) {
        let mid = 0.5 * (lo + hi);
        if sturm_count(diag, offdiag, mid) <= k {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Smallest eigenpair of the symmetric tridiagonal matrix with main diagonal
/// `diag` and off-diagonal `offdiag`.
///
/// The eigenvalue is located by Sturm bisection to width `tol` and polished
/// by Rayleigh-quotient updates during inverse iteration; the returned value
/// is the final Rayleigh quotient.
pub fn smallest_eig_tridiag(diag: &[f64], offdiag: &[f64], tol: f64) -> Result<EigenResult> {
    if offdiag.len() + 1 != diag.len() {
        return Err(Error::InvalidParameter(format!(
            "offdiag length {} must be diag length {} minus one",
            offdiag.len(),
            diag.len()
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    let n = diag.len();
    let lambda = kth_eigenvalue_tridiag(diag, offdiag, 0, tol.min(1e-10));
    let scale = gershgorin_bounds(diag, offdiag).1.abs().max(1.0);

    // Inverse iteration with a shift slightly below the located eigenvalue.
    let mut shift = lambda - 1e-3 * tol.max(1e-12) * scale.max(1.0);
    let mut v = seeded_unit_vector(n, 0x9E37_79B9_7F4A_7C15);
    let mut best: Option<EigenResult> = None;
    let max_restarts = 4usize;
    let mut iterations = 0usize;
    for restart in 0..max_restarts {
        for _ in 0..6 {
            iterations += 1;
            let mut w = solve_tridiag_pivoted(diag, offdiag, shift, &v);
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !norm.is_finite() || norm == 0.0 {
                break;
            }
            for x in &mut w {
                *x /= norm;
            }
            let rq = rayleigh_quotient(diag, offdiag, &w);
            let res = residual_norm(diag, offdiag, &w, rq);
            v = w;
            let better = best.as_ref().map_or(true, |b| res < b.residual);
            if better {
                best = Some(EigenResult {
                    value: rq,
                    vector: v.clone(),
                    residual: res,
                    iterations,
                });
            }
            if res <= tol {
                let mut out = best.unwrap();
                out.iterations = iterations;
                return Ok(out);
            }
            shift = rq - 1e-3 * tol.max(1e-12) * scale.max(1.0);
        }
        // Restart from a fresh deterministic vector.
        v = seeded_unit_vector(n, 0xD1B5_4A32_D192_ED03 ^ (restart as u64 + 1));
        shift = lambda - 10.0_f64.powi(restart as i32 + 1) * 1e-3 * tol.max(1e-12) * scale;
    }
    let b = best.unwrap_or(EigenResult {
        value: lambda,
        vector: v,
        residual: f64::INFINITY,
        iterations,
    });
    Err(Error::NoConvergence {
        value: b.value,
        residual: b.residual,
        iterations: b.iterations,
        tolerance: tol,
    })
}

fn rayleigh_quotient(diag: &[f64], offdiag: &[f64], v: &[f64]) -> f64 {
    let n = diag.len();
    let mut num = 0.0;
    for i in 0..n {
        let mut av = diag[i] * v[i];
        if i > 0 {
            av += offdiag[i - 1] * v[i - 1];
        }
        if i + 1 < n {
            av += offdiag[i] * v[i + 1];
        }
        num += v[i] * av;
    }
    num
}

fn residual_norm(diag: &[f64], offdiag: &[f64], v: &[f64], lambda: f64) -> f64 {
    let n = diag.len();
    let mut s = 0.0;
    for i in 0..n {
        let mut av = diag[i] * v[i];
        if i > 0 {
            av += offdiag[i - 1] * v[i - 1];
        }
        if i + 1 < n {
            av += offdiag[i] * v[i + 1];
        }
        let r = av - lambda * v[i];
        s += r * r;
    }
    s.sqrt()
}

/// Solve `(T - shift) x = rhs` for symmetric tridiagonal `T` by LU with
/// partial pivoting (stable for the near-singular shifts of inverse
/// iteration).
pub fn solve_tridiag(diag: &[f64], offdiag: &[f64], shift: f64, rhs: &[f64]) -> Vec<f64> {
    solve_tridiag_pivoted(diag, offdiag, shift, rhs)
}

fn solve_tridiag_pivoted(
    diag: &[f64],
    offdiag: &[f64],
    shift: f64,
    rhs: &[f64],
) -> Vec<f64> {
    let n = diag.len();
    debug_assert_eq!(rhs.len(), n);
    // Working bands: sub[i] couples row i+1 to column i before elimination.
    let mut d: Vec<f64> = diag.iter().map(|x| x - shift).collect();
    let mut u1 = vec![0.0; n];
    let mut u2 = vec![0.0; n];
    for i in 0..n - 1 {
        u1[i] = offdiag[i];
    }
    let mut x = rhs.to_vec();
    for i in 0..n - 1 {
        let mut sub = offdiag[i];
        if sub.abs() > d[i].abs() {
            std::mem::swap(&mut d[i], &mut sub);
            // Row i+1 originally is [sub_old, d[i+1], u1[i+1]]; after the swap
            // the new row i carries (old row i+1) entries in its bands.
            let keep_d = d[i + 1];
            let keep_u = u1[i + 1];
            d[i + 1] = u1[i];
            u1[i] = keep_d;
            u2[i] = keep_u;
            u1[i + 1] = 0.0;
            x.swap(i, i + 1);
        }
        let denom = if d[i].abs() < PIVOT_GUARD {
            PIVOT_GUARD.copysign(if d[i] == 0.0 { 1.0 } else { d[i] })
        } else {
            d[i]
        };
        let l = sub / denom;
        d[i + 1] -= l * u1[i];
        u1[i + 1] -= l * u2[i];
        x[i + 1] -= l * x[i];
    }
    let mut sol = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = x[i];
        if i + 1 < n {
            s -= u1[i] * sol[i + 1];
        }
        if i + 2 < n {
            s -= u2[i] * sol[i + 2];
        }
        let denom = if d[i].abs() < PIVOT_GUARD {
            PIVOT_GUARD.copysign(if d[i] == 0.0 { 1.0 } else { d[i] })
        } else {
            d[i]
        };
        sol[i] = s / denom;
    }
    sol
}

/// Symmetric tridiagonal representation of `-d²/dt² + V` on `grid`.
///
/// Dirichlet sides drop the boundary node. A Neumann side keeps it: the
/// ghost-point reflection row `(2u₀ - 2u₁)/Δ² + V(a) u₀` carries the natural
/// trapezoid half-weight of the boundary node, and the generalized problem
/// `K u = λ W u` (W = diag of node weights) is symmetrized by the congruence
/// `W^{-1/2} K W^{-1/2}`, which only rescales the boundary coupling to
/// `-√2/Δ²`. Eigenvalues are those of the discrete quadratic form
/// `Σ|Du|² + Σ V|u|²` with no boundary penalty; eigenvectors are in the
/// weighted representation `ũ = W^{1/2} u` (see [`crate::grid::Grid1D`]
/// node weights).
pub fn discretize_schrodinger_1d<V>(grid: &Grid1D, potential: V) -> Result<(Vec<f64>, Vec<f64>)>
where
    V: Fn(f64) -> f64,
{
    let nodes = grid.nodes();
    let m = nodes.len();
    let dx = grid.spacing();
    let inv2 = 1.0 / (dx * dx);
    let mut diag = Vec::with_capacity(m);
    let mut off = vec![-inv2; m - 1];
    for (i, &t) in nodes.iter().enumerate() {
        let v = potential(t);
        if !v.is_finite() {
            return Err(Error::NonFinitePotential { index: i, position: t });
        }
        diag.push(2.0 * inv2 + v);
    }
    if grid.bc_left() == Bc::Neumann {
        off[0] = -std::f64::consts::SQRT_2 * inv2;
    }
    if grid.bc_right() == Bc::Neumann {
        off[m - 2] = -std::f64::consts::SQRT_2 * inv2;
    }
    Ok((diag, off))
}
