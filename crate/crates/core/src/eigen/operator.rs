//! Matrix-free smallest eigenpair for sparse self-adjoint operators.
//!
//! Single-vector locally optimal iteration (LOBPCG with block size one): at
//! each step the Ritz problem is solved exactly in the three-dimensional
//! subspace spanned by the current iterate, the residual and the previous
//! search direction, with full reorthonormalization of that basis. No
//! preconditioning; the Ritz values are monotone non-increasing up to
//! round-off.

use super::{seeded_unit_vector, EigenResult};
use crate::error::{Error, Result};

/// Self-adjoint operator on a real inner-product space.
///
/// Complex Hermitian operators are handled through their induced real
/// symmetric structure (interleaved re/im components, real part of the
/// Hermitian inner product).
pub trait LinearOp: Sync {
    fn dim(&self) -> usize;
    /// `out = A x`. Must be self-adjoint: `<Ax, y> = <x, Ay>`.
    fn apply(&self, x: &[f64], out: &mut [f64]);
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    // Sequential accumulation keeps runs bit-reproducible.
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn scale(a: &mut [f64], s: f64) {
    for x in a {
        *x *= s;
    }
}

fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Smallest eigenvalue of the symmetric part of a small dense matrix via
/// Jacobi sweeps; returns (value, eigenvector). `m` is `k x k`, row-major.
fn small_sym_eig(m: &[f64], k: usize) -> (f64, Vec<f64>) {
    let mut a = m.to_vec();
    let mut v = vec![0.0; k * k];
    for i in 0..k {
        v[i * k + i] = 1.0;
    }
    for _sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..k {
            for q in (p + 1)..k {
                off += a[p * k + q] * a[p * k + q];
            }
        }
        if off.sqrt() < 1e-15 * (1.0 + a.iter().map(|x| x.abs()).fold(0.0, f64::max)) {
            break;
        }
        for p in 0..k {
            for q in (p + 1)..k {
                let apq = a[p * k + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * k + p];
                let aqq = a[q * k + q];
                let theta = 0.5 * (aqq - app) / apq;
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..k {
                    let aip = a[i * k + p];
                    let aiq = a[i * k + q];
                    a[i * k + p] = c * aip - s * aiq;
                    a[i * k + q] = s * aip + c * aiq;
                }
                for j in 0..k {
                    let apj = a[p * k + j];
                    let aqj = a[q * k + j];
                    a[p * k + j] = c * apj - s * aqj;
                    a[q * k + j] = s * apj + c * aqj;
                }
                for i in 0..k {
                    let vip = v[i * k + p];
                    let viq = v[i * k + q];
                    v[i * k + p] = c * vip - s * viq;
                    v[i * k + q] = s * vip + c * viq;
                }
            }
        }
    }
    let mut best = 0;
    for i in 1..k {
        if a[i * k + i] < a[best * k + best] {
            best = i;
        }
    }
    let vec = (0..k).map(|i| v[i * k + best]).collect();
    (a[best * k + best], vec)
}

/// Smallest eigenpair of `op`, started from a fixed seeded vector.
pub fn smallest_eig_operator(
    op: &dyn LinearOp,
    tol: f64,
    max_iter: usize,
) -> Result<EigenResult> {
    let x0 = seeded_unit_vector(op.dim(), 0xA24B_AED4_963E_E407);
    smallest_eig_operator_from(op, &x0, tol, max_iter)
}

/// Smallest eigenpair of `op` with an explicit start vector (warm starts for
/// parameter sweeps).
pub fn smallest_eig_operator_from(
    op: &dyn LinearOp,
    x0: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<EigenResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    let n = op.dim();
    if x0.len() != n {
        return Err(Error::InvalidParameter(format!(
            "start vector length {} does not match operator dimension {n}",
            x0.len()
        )));
    }

    let mut x = x0.to_vec();
    let nx = norm(&x);
    if !(nx > 0.0) {
        return Err(Error::InvalidParameter("start vector is zero".into()));
    }
    scale(&mut x, 1.0 / nx);

    let mut ax = vec![0.0; n];
    op.apply(&x, &mut ax);

    let mut p: Vec<f64> = Vec::new();
    let mut ap: Vec<f64> = Vec::new();

    let mut lambda = dot(&x, &ax);
    let mut best_res = f64::INFINITY;
    let mut w = vec![0.0; n];
    let mut aw = vec![0.0; n];

    for it in 0..max_iter {
        // Residual.
        for i in 0..n {
            w[i] = ax[i] - lambda * x[i];
        }
        let rnorm = norm(&w);
        best_res = best_res.min(rnorm);
        if rnorm <= tol {
            return Ok(EigenResult {
                value: lambda,
                vector: x,
                residual: rnorm,
                iterations: it,
            });
        }

        // Orthonormal basis {x, w̃, p̃}.
        let xw = dot(&x, &w);
        axpy(&mut w, -xw, &x);
        let wn = norm(&w);
        if wn < 1e-14 * lambda.abs().max(1.0) {
            // Stagnated residual direction; accept the current pair.
            return Ok(EigenResult {
                value: lambda,
                vector: x,
                residual: rnorm,
                iterations: it,
            });
        }
        scale(&mut w, 1.0 / wn);
        op.apply(&w, &mut aw);

        let use_p = !p.is_empty();
        let mut pt = Vec::new();
        let mut apt = Vec::new();
        let mut have_p = false;
        if use_p {
            pt = p.clone();
            apt = ap.clone();
            let px = dot(&pt, &x);
            axpy(&mut pt, -px, &x);
            axpy(&mut apt, -px, &ax);
            let pw = dot(&pt, &w);
            axpy(&mut pt, -pw, &w);
            axpy(&mut apt, -pw, &aw);
            let pn = norm(&pt);
            if pn > 1e-10 {
                scale(&mut pt, 1.0 / pn);
                scale(&mut apt, 1.0 / pn);
                have_p = true;
            }
        }

        // Rayleigh-Ritz in the small basis.
        let k = if have_p { 3 } else { 2 };
        let basis: [&[f64]; 3] = [&x, &w, if have_p { &pt } else { &w }];
        let abasis: [&[f64]; 3] = [&ax, &aw, if have_p { &apt } else { &aw }];
        let mut small = vec![0.0; k * k];
        for i in 0..k {
            for j in i..k {
                let v = dot(basis[i], abasis[j]);
                small[i * k + j] = v;
                small[j * k + i] = v;
            }
        }
        let (ritz, c) = small_sym_eig(&small, k);

        // New iterate and new direction p = w,p components of the update.
        let mut xn = vec![0.0; n];
        let mut axn = vec![0.0; n];
        let mut pn_new = vec![0.0; n];
        let mut apn_new = vec![0.0; n];
        for i in 0..n {
            let mut xi = c[0] * x[i] + c[1] * w[i];
            let mut axi = c[0] * ax[i] + c[1] * aw[i];
            let mut pi = c[1] * w[i];
            let mut api = c[1] * aw[i];
            if have_p {
                xi += c[2] * pt[i];
                axi += c[2] * apt[i];
                pi += c[2] * pt[i];
                api += c[2] * apt[i];
            }
            xn[i] = xi;
            axn[i] = axi;
            pn_new[i] = pi;
            apn_new[i] = api;
        }
        let nxn = norm(&xn);
        scale(&mut xn, 1.0 / nxn);
        scale(&mut axn, 1.0 / nxn);
        x = xn;
        ax = axn;
        p = pn_new;
        ap = apn_new;
        lambda = ritz;

        // Periodic refresh of A·x guards against drift in the cached product.
        if it % 64 == 63 {
            op.apply(&x, &mut ax);
            lambda = dot(&x, &ax);
        }
    }

    // Final residual for the failure report.
    op.apply(&x, &mut ax);
    lambda = dot(&x, &ax);
    for i in 0..n {
        w[i] = ax[i] - lambda * x[i];
    }
    let rnorm = norm(&w);
    Err(Error::NoConvergence {
        value: lambda,
        residual: rnorm,
        iterations: max_iter,
        tolerance: tol,
    })
}
