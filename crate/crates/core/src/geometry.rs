//! Magnetic geometry on the unit ball with the helical field, and generic
//! tangency-curve extraction for unit-intensity fields on parameterized
//! surfaces.
//!
//! The helical potential is `A(x) = (cos(τx₃)/τ, sin(τx₃)/τ, 0)` with field
//! `B = curl A = -τA`, |B| = 1. On the unit sphere the tangency curve
//! `Γ = {B·N = 0}` reads `x₁cos(τx₃) + x₂sin(τx₃) = 0` and is covered by
//! four charts: two x₃-parameterized branches away from the poles and two
//! ρ-parameterized branches through them.

use crate::error::{Error, Result};
use crate::model1d::solve_dense;
use std::collections::HashMap;

pub type Vec3 = [f64; 3];

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn normalize(a: Vec3) -> Vec3 {
    scale(a, 1.0 / norm(a))
}

/// Helical magnetic field of pitch τ > 0 with unit intensity.
#[derive(Clone, Copy, Debug)]
pub struct HelicalField {
    pub tau: f64,
}

impl HelicalField {
    pub fn new(tau: f64) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::InvalidParameter(format!("tau must be positive, got {tau}")));
        }
        Ok(Self { tau })
    }

    /// Magnetic potential `A(x) = n_τ(x)`.
    pub fn potential(&self, x: Vec3) -> Vec3 {
        let p = self.tau * x[2];
        [p.cos() / self.tau, p.sin() / self.tau, 0.0]
    }

    /// Field `B = curl A = -τ n_τ`, unit intensity.
    pub fn field(&self, x: Vec3) -> Vec3 {
        let p = self.tau * x[2];
        [-p.cos(), -p.sin(), 0.0]
    }
}

/// Chart label of the tangency curve on the unit sphere.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// x₃-parameterized, through (0, -1, 0).
    C1,
    /// x₃-parameterized, through (0, 1, 0).
    C2,
    /// ρ-parameterized through the pole (0, 0, 1); ρ > 0 joins C1.
    C3,
    /// ρ-parameterized through the pole (0, 0, 1); ρ > 0 joins C2.
    C4,
}

pub const ALL_BRANCHES: [Branch; 4] = [Branch::C1, Branch::C2, Branch::C3, Branch::C4];

/// Chart point of Γ; `param` is x₃ for C1/C2 and ρ for C3/C4.
pub fn gamma_branch(branch: Branch, param: f64, tau: f64) -> Result<Vec3> {
    if !(param > -1.0 && param < 1.0) {
        return Err(Error::ChartEndpoint { param });
    }
    let w = (1.0 - param * param).sqrt();
    Ok(match branch {
        Branch::C1 => {
            let p = tau * param;
            [w * p.sin(), -w * p.cos(), param]
        }
        Branch::C2 => {
            let p = tau * param;
            [-w * p.sin(), w * p.cos(), param]
        }
        Branch::C3 => {
            let p = tau * w;
            [param * p.sin(), -param * p.cos(), w]
        }
        Branch::C4 => {
            let p = tau * w;
            [-param * p.sin(), param * p.cos(), w]
        }
    })
}

/// Chart derivative dγ/dparam (hand-differentiated closed forms).
fn gamma_branch_deriv(branch: Branch, param: f64, tau: f64) -> Result<Vec3> {
    if !(param > -1.0 && param < 1.0) {
        return Err(Error::ChartEndpoint { param });
    }
    let w = (1.0 - param * param).sqrt();
    Ok(match branch {
        Branch::C1 => {
            let (sn, cs) = (tau * param).sin_cos();
            [
                -param * sn / w + tau * w * cs,
                param * cs / w + tau * w * sn,
                1.0,
            ]
        }
        Branch::C2 => {
            let (sn, cs) = (tau * param).sin_cos();
            [
                param * sn / w - tau * w * cs,
                -param * cs / w - tau * w * sn,
                1.0,
            ]
        }
        Branch::C3 => {
            let (sn, cs) = (tau * w).sin_cos();
            let q = param * param * tau / w;
            [sn - q * cs, -cs - q * sn, -param / w]
        }
        Branch::C4 => {
            let (sn, cs) = (tau * w).sin_cos();
            let q = param * param * tau / w;
            [-sn + q * cs, cs + q * sn, -param / w]
        }
    })
}

/// Arc-length speed `|dγ/dx₃| = sqrt((1 + τ²(1-x₃²)²)/(1-x₃²))` of the
/// x₃-parameterized branches.
pub fn arc_speed(x3: f64, tau: f64) -> Result<f64> {
    if x3 * x3 >= 1.0 {
        return Err(Error::ChartEndpoint { param: x3 });
    }
    let w2 = 1.0 - x3 * x3;
    Ok(((1.0 + tau * tau * w2 * w2) / w2).sqrt())
}

/// `|B·T|` along Γ: `τ(1-x₃²)/sqrt(1 + τ²(1-x₃²)²)`.
pub fn b_dot_t(x3: f64, tau: f64) -> f64 {
    let w2 = 1.0 - x3 * x3;
    tau * w2 / (1.0 + tau * tau * w2 * w2).sqrt()
}

/// Magnetic curvature `κ_{n,B} = sqrt(1 + τ²(1-x₃²)²)` along Γ; strictly
/// positive, so the tangency curve is regular.
pub fn kappa_nb(x3: f64, tau: f64) -> f64 {
    let w2 = 1.0 - x3 * x3;
    (1.0 + tau * tau * w2 * w2).sqrt()
}

/// Frame (T, V, N) at a chart point: T the unit tangent, N = -γ the inward
/// ball normal, V = T × N.
#[derive(Clone, Copy, Debug)]
pub struct Frame {
    pub t: Vec3,
    pub v: Vec3,
    pub n: Vec3,
}

pub fn frame_at(branch: Branch, param: f64, tau: f64) -> Result<Frame> {
    let gamma = gamma_branch(branch, param, tau)?;
    let d = gamma_branch_deriv(branch, param, tau)?;
    let t = normalize(d);
    let n = scale(gamma, -1.0);
    let v = cross(t, n);
    Ok(Frame { t, v, n })
}

/// Arc-length curve on the unit sphere. `point(0)` is the anchor; the
/// parameterization must be unit-speed.
pub trait BallCurve: Sync {
    fn point(&self, s: f64) -> Vec3;
    fn tangent(&self, s: f64) -> Vec3;
}

/// Arc-length re-parameterization of a helical chart around an anchor
/// parameter (RK4 on dparam/ds = 1/|dγ/dparam|).
pub struct HelicalArc {
    pub branch: Branch,
    pub tau: f64,
    pub param0: f64,
}

impl HelicalArc {
    fn param_at(&self, s: f64) -> f64 {
        // Small |s| only (finite-difference offsets); fixed 8 RK4 steps.
        let nsteps = 8;
        let h = s / nsteps as f64;
        let mut p = self.param0;
        let rate = |p: f64| -> f64 {
            1.0 / norm(gamma_branch_deriv(self.branch, p, self.tau).expect("chart interior"))
        };
        for _ in 0..nsteps {
            let k1 = rate(p);
            let k2 = rate(p + 0.5 * h * k1);
            let k3 = rate(p + 0.5 * h * k2);
            let k4 = rate(p + h * k3);
            p += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        p
    }
}

impl BallCurve for HelicalArc {
    fn point(&self, s: f64) -> Vec3 {
        gamma_branch(self.branch, self.param_at(s), self.tau).expect("chart interior")
    }
    fn tangent(&self, s: f64) -> Vec3 {
        normalize(gamma_branch_deriv(self.branch, self.param_at(s), self.tau).expect("chart interior"))
    }
}

/// The equator (x₃ = 0) of the unit sphere, arc-length parameterized; the
/// tangency curve of a constant vertical field.
pub struct Equator;

impl BallCurve for Equator {
    fn point(&self, s: f64) -> Vec3 {
        [s.cos(), s.sin(), 0.0]
    }
    fn tangent(&self, s: f64) -> Vec3 {
        [-s.sin(), s.cos(), 0.0]
    }
}

/// Geodesic and normal curvature of a ball curve at its anchor:
/// `γ̈ = -κ_g V + κ_n N` in the (T, V = T×N, N = -γ) frame.
///
/// γ̈ comes from a 5-point arc-length second difference evaluated at two
/// step sizes; the pair must pass a Richardson consistency test.
pub fn curve_curvatures(curve: &dyn BallCurve) -> Result<(f64, f64, Vec3)> {
    let second = |eps: f64| -> Vec3 {
        let pm2 = curve.point(-2.0 * eps);
        let pm1 = curve.point(-eps);
        let p0 = curve.point(0.0);
        let pp1 = curve.point(eps);
        let pp2 = curve.point(2.0 * eps);
        let mut out = [0.0; 3];
        for i in 0..3 {
            out[i] = (-pm2[i] + 16.0 * pm1[i] - 30.0 * p0[i] + 16.0 * pp1[i] - pp2[i])
                / (12.0 * eps * eps);
        }
        out
    };
    let eps = 1e-2;
    let a = second(eps);
    let b = second(0.5 * eps);
    let gdd = [
        (16.0 * b[0] - a[0]) / 15.0,
        (16.0 * b[1] - a[1]) / 15.0,
        (16.0 * b[2] - a[2]) / 15.0,
    ];
    let disagreement = norm(sub(a, b));
    if disagreement > 1e-4 * (1.0 + norm(gdd)) {
        return Err(Error::DegenerateStep(format!(
            "arc-length second-difference pair disagrees by {disagreement:.3e}"
        )));
    }
    let gamma = curve.point(0.0);
    let t = curve.tangent(0.0);
    let n = scale(gamma, -1.0);
    let v = cross(t, n);
    let kappa_g = -dot(gdd, v);
    let kappa_n = dot(gdd, n);
    Ok((kappa_g, kappa_n, gdd))
}

/// Geodesic curvature of a helical branch at chart parameter `param`.
pub fn geodesic_curvature(branch: Branch, param: f64, tau: f64) -> Result<f64> {
    if param.abs() > 0.995 {
        return Err(Error::ChartEndpoint { param });
    }
    let arc = HelicalArc { branch, tau, param0: param };
    Ok(curve_curvatures(&arc)?.0)
}

/// Normal-form parameters of the field at a curve point, with the Taylor
/// data and consistency diagnostics they were extracted from.
#[derive(Clone, Copy, Debug)]
pub struct NormalForm {
    pub kappa_check: f64,
    pub zeta: f64,
    pub theta: f64,
    pub kappa_g: f64,
    /// r- and s-derivatives of the field components in adapted coordinates.
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub delta1: f64,
    pub delta2: f64,
    /// |δ₁cosθ + δ₂sinθ| (exactly zero in the continuum, |B| = 1).
    pub delta_identity: f64,
    /// |γ₁cosθ + γ₂sinθ + κ_g sin²θ| (idem).
    pub gamma_identity: f64,
}

/// Extract the adapted-coordinate Taylor data of a unit field along a ball
/// curve and form the normal-form parameters
/// `κ̌ = -δ₁ sinθ + δ₂ cosθ`, `ζ = -γ₁ sinθ + (γ₂ - κ_g sinθ) cosθ`.
///
/// Adapted coordinates on the ball: `x(r,s,t) = (1-t)(cos r γ(s) + sin r V(s))`
/// (r along the great-circle geodesic through γ(s) in the +V direction,
/// t the distance to the boundary). The field components
/// `B = b̃₁∂_r + b̃₂∂_s + b̃₃∂_t` are obtained from an exact 3×3 Jacobian
/// solve; their r/s-derivatives come from paired 5-point differences.
pub fn normal_form_params<F>(curve: &dyn BallCurve, field: F) -> Result<NormalForm>
where
    F: Fn(Vec3) -> Vec3,
{
    let gamma0 = curve.point(0.0);
    let t0 = curve.tangent(0.0);
    let n0 = scale(gamma0, -1.0);
    let v0 = cross(t0, n0);
    let b0 = field(gamma0);
    let sin_theta = dot(b0, t0);
    if dot(b0, n0).abs() > 1e-8 {
        return Err(Error::InvalidParameter(format!(
            "field is not tangent to the sphere at the anchor (B·N = {:.3e})",
            dot(b0, n0)
        )));
    }
    let theta = sin_theta.clamp(-1.0, 1.0).asin();
    let (kappa_g, _, _) = curve_curvatures(curve)?;

    // V'(s0) by a 5-point derivative of V(s) = T(s) x N(s).
    let v_of_s = |s: f64| -> Vec3 {
        let g = curve.point(s);
        cross(curve.tangent(s), scale(g, -1.0))
    };
    let five_point = |f: &dyn Fn(f64) -> Vec3, eps: f64| -> Vec3 {
        let m2 = f(-2.0 * eps);
        let m1 = f(-eps);
        let p1 = f(eps);
        let p2 = f(2.0 * eps);
        let mut out = [0.0; 3];
        for i in 0..3 {
            out[i] = (m2[i] - 8.0 * m1[i] + 8.0 * p1[i] - p2[i]) / (12.0 * eps);
        }
        out
    };
    let vprime = five_point(&v_of_s, 1e-3);

    // Field components in the coordinate basis at (r, s, t = 0).
    let components_r = |r: f64| -> Vec3 {
        // At s = s0: J = [∂_r x, ∂_s x, ∂_t x].
        let (sr, cr) = r.sin_cos();
        let p = add(scale(gamma0, cr), scale(v0, sr));
        let jr = add(scale(gamma0, -sr), scale(v0, cr));
        let js = add(scale(t0, cr), scale(vprime, sr));
        let jt = scale(p, -1.0);
        solve3(jr, js, jt, field(p))
    };
    let components_s = |s: f64| -> Vec3 {
        let g = curve.point(s);
        let t = curve.tangent(s);
        let n = scale(g, -1.0);
        let v = cross(t, n);
        solve3(v, t, scale(g, -1.0), field(g))
    };

    let paired = |f: &dyn Fn(f64) -> Vec3, label: &str| -> Result<Vec3> {
        let eps = 5e-3;
        let a = five_point(f, eps);
        let b = five_point(f, 0.5 * eps);
        let d = norm(sub(a, b));
        if d > 1e-4 * (1.0 + norm(b)) {
            return Err(Error::DegenerateStep(format!(
                "{label}-derivative step pair disagrees by {d:.3e}"
            )));
        }
        Ok([
            (16.0 * b[0] - a[0]) / 15.0,
            (16.0 * b[1] - a[1]) / 15.0,
            (16.0 * b[2] - a[2]) / 15.0,
        ])
    };

    let dr = paired(&components_r, "r")?;
    let ds = paired(&components_s, "s")?;
    let (gamma1, gamma2, gamma3) = (dr[0], dr[1], dr[2]);
    let (delta1, delta2) = (ds[0], ds[1]);

    let cos_theta = theta.cos();
    let delta_identity = (delta1 * cos_theta + delta2 * sin_theta).abs();
    let gamma_identity =
        (gamma1 * cos_theta + gamma2 * sin_theta + kappa_g * sin_theta * sin_theta).abs();

    Ok(NormalForm {
        kappa_check: -delta1 * sin_theta + delta2 * cos_theta,
        zeta: -gamma1 * sin_theta + (gamma2 - kappa_g * sin_theta) * cos_theta,
        theta,
        kappa_g,
        gamma1,
        gamma2,
        gamma3,
        delta1,
        delta2,
        delta_identity,
        gamma_identity,
    })
}

fn solve3(c0: Vec3, c1: Vec3, c2: Vec3, rhs: Vec3) -> Vec3 {
    let mut a = [
        c0[0], c1[0], c2[0], //
        c0[1], c1[1], c2[1], //
        c0[2], c1[2], c2[2],
    ];
    let mut b = rhs;
    let x = solve_dense(&mut a, &mut b, 3);
    [x[0], x[1], x[2]]
}

/// A point of Γ with its frame, curvatures and normal-form parameters.
#[derive(Clone, Debug)]
pub struct GammaPoint {
    pub position: Vec3,
    pub x3: f64,
    pub branch: Branch,
    pub frame: Frame,
    pub kappa_nb: f64,
    /// Signed B·T in this branch's frame (the closed form is its absolute
    /// value).
    pub b_dot_t: f64,
    pub kappa_g: f64,
    pub kappa_check: f64,
    pub zeta: f64,
}

/// Assemble the full gamma-point record at a chart parameter.
pub fn gamma_point(branch: Branch, param: f64, tau: f64) -> Result<GammaPoint> {
    let position = gamma_branch(branch, param, tau)?;
    let frame = frame_at(branch, param, tau)?;
    let helical = HelicalField::new(tau)?;
    let b = helical.field(position);
    let arc = HelicalArc { branch, tau, param0: param };
    let nf = normal_form_params(&arc, |x| helical.field(x))?;
    Ok(GammaPoint {
        position,
        x3: position[2],
        branch,
        frame,
        kappa_nb: kappa_nb(position[2], tau),
        b_dot_t: dot(b, frame.t),
        kappa_g: nf.kappa_g,
        kappa_check: nf.kappa_check,
        zeta: nf.zeta,
    })
}

// ---------------------------------------------------------------------------
// Generic tangency-curve extraction on parameterized surfaces.
// ---------------------------------------------------------------------------

/// A two-parameter surface with a unit-intensity field.
pub struct SurfaceField {
    pub surface: Box<dyn Fn(f64, f64) -> Vec3 + Sync>,
    pub field: Box<dyn Fn(Vec3) -> Vec3 + Sync>,
    pub u_range: (f64, f64),
    pub v_range: (f64, f64),
    pub u_periodic: bool,
}

impl SurfaceField {
    /// Unit sphere parameterized by azimuth and height, poles clipped.
    pub fn sphere<F>(field: F) -> Self
    where
        F: Fn(Vec3) -> Vec3 + Sync + 'static,
    {
        SurfaceField {
            surface: Box::new(|u: f64, v: f64| {
                let w = (1.0 - v * v).sqrt();
                [w * u.cos(), w * u.sin(), v]
            }),
            field: Box::new(field),
            u_range: (0.0, 2.0 * std::f64::consts::PI),
            v_range: (-0.99, 0.99),
            u_periodic: true,
        }
    }

    /// Axis-aligned ellipsoid with semi-axes (a, b, c), poles clipped.
    pub fn ellipsoid<F>(a: f64, b: f64, c: f64, field: F) -> Self
    where
        F: Fn(Vec3) -> Vec3 + Sync + 'static,
    {
        SurfaceField {
            surface: Box::new(move |u: f64, v: f64| {
                let w = (1.0 - v * v).sqrt();
                [a * w * u.cos(), b * w * u.sin(), c * v]
            }),
            field: Box::new(field),
            u_range: (0.0, 2.0 * std::f64::consts::PI),
            v_range: (-0.995, 0.995),
            u_periodic: true,
        }
    }

    fn point(&self, u: f64, v: f64) -> Vec3 {
        (self.surface)(u, v)
    }

    /// B·N with N the (unnormalized-orientation) unit surface normal.
    fn g(&self, u: f64, v: f64) -> f64 {
        let (su, sv) = self.tangents(u, v);
        let n = normalize(cross(su, sv));
        dot((self.field)(self.point(u, v)), n)
    }

    fn tangents(&self, u: f64, v: f64) -> (Vec3, Vec3) {
        let hu = 1e-4 * (self.u_range.1 - self.u_range.0);
        let hv = 1e-4 * (self.v_range.1 - self.v_range.0);
        let fd = |f: &dyn Fn(f64) -> Vec3, h: f64| -> Vec3 {
            let m2 = f(-2.0 * h);
            let m1 = f(-h);
            let p1 = f(h);
            let p2 = f(2.0 * h);
            let mut out = [0.0; 3];
            for i in 0..3 {
                out[i] = (m2[i] - 8.0 * m1[i] + 8.0 * p1[i] - p2[i]) / (12.0 * h);
            }
            out
        };
        let su = fd(&|d| self.point(u + d, v), hu);
        let sv = fd(&|d| self.point(u, v + d), hv);
        (su, sv)
    }
}

/// Extracted Γ sample on a parameterized surface.
#[derive(Clone, Copy, Debug)]
pub struct ExtractedPoint {
    pub position: Vec3,
    pub u: f64,
    pub v: f64,
    pub b_dot_n: f64,
    pub kappa_nb: f64,
    pub b_dot_t: f64,
}

/// Result of the zero-level-set extraction of B·N.
#[derive(Clone, Debug)]
pub struct GammaExtraction {
    pub points: Vec<ExtractedPoint>,
    /// Index pairs of marching segments.
    pub segments: Vec<(usize, usize)>,
    /// Chained polylines (closed when first == last index).
    pub polylines: Vec<Vec<usize>>,
    /// min κ_{n,B} over samples: the (C1) diagnostic.
    pub min_kappa_nb: f64,
    /// Clustered locations where B·T crosses or touches zero: the (C2)
    /// diagnostic.
    pub tangency_points: Vec<Vec3>,
    /// Largest ambient segment length (mesh scale for match tolerances).
    pub mesh_size: f64,
}

/// March the zero level set of B·N over a `nu × nv` parameter grid; each
/// returned point is polished along its grid edge to |B·N| ≤ 1e-10.
pub fn extract_gamma(sf: &SurfaceField, nu: usize, nv: usize) -> Result<GammaExtraction> {
    let (u0, u1) = sf.u_range;
    let (v0, v1) = sf.v_range;
    let ncol = if sf.u_periodic { nu } else { nu + 1 };
    let du = (u1 - u0) / nu as f64;
    let dv = (v1 - v0) / nv as f64;
    let uat = |i: usize| u0 + (i % ncol.max(1)) as f64 * du;
    let vat = |j: usize| v0 + j as f64 * dv;

    // Sample g on the nodes. Node values at noise level get a fixed-sign
    // symbolic perturbation so the level set passes strictly between nodes
    // (classic marching-squares degeneracy handling); the polished points
    // still satisfy |B·N| <= 1e-10 against the true g.
    let mut gvals = vec![0.0; ncol * (nv + 1)];
    for i in 0..ncol {
        for j in 0..=nv {
            let g = sf.g(uat(i), vat(j));
            gvals[i * (nv + 1) + j] = if g.abs() < 1e-12 { 1e-12 } else { g };
        }
    }
    let gat = |i: usize, j: usize| gvals[(i % ncol) * (nv + 1) + j];

    let mut points: Vec<ExtractedPoint> = Vec::new();
    let mut edge_index: HashMap<(usize, usize, u8), usize> = HashMap::new();
    let mut segments: Vec<(usize, usize)> = Vec::new();

    // Root polish along a parameter edge. Endpoint signs come from the
    // (perturbed) cached samples; only interior points are evaluated, so a
    // noise-level endpoint cannot corrupt the bracket.
    let polish = |ua: f64, va: f64, ub: f64, vb: f64, ga: f64, gb: f64| -> (f64, f64, f64) {
        let f = |t: f64| sf.g(ua + t * (ub - ua), va + t * (vb - va));
        let sign_lo = ga > 0.0;
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        let (mut flo, mut fhi) = (ga, gb);
        let mut t = 0.5;
        let mut ft = f(t);
        for _ in 0..200 {
            if ft.abs() <= 1e-13 {
                break;
            }
            if (ft > 0.0) == sign_lo {
                lo = t;
                flo = ft;
            } else {
                hi = t;
                fhi = ft;
            }
            if hi - lo < 1e-16 {
                break;
            }
            let cand = lo - flo * (hi - lo) / (fhi - flo);
            t = if cand > lo && cand < hi { cand } else { 0.5 * (lo + hi) };
            ft = f(t);
        }
        (ua + t * (ub - ua), va + t * (vb - va), ft)
    };

    let ncells_u = if sf.u_periodic { nu } else { nu };
    for ci in 0..ncells_u {
        for cj in 0..nv {
            // Edges: 0 bottom (j), 1 right (i+1), 2 top (j+1), 3 left (i).
            let corners = [
                gat(ci, cj),
                gat(ci + 1, cj),
                gat(ci + 1, cj + 1),
                gat(ci, cj + 1),
            ];
            let mut crossing_edges: Vec<usize> = Vec::new();
            let edge_defs = [
                ((ci, cj, 0u8), (uat(ci), vat(cj), uat(ci) + du, vat(cj)), (corners[0], corners[1])),
                (
                    (ci + 1, cj, 1u8),
                    (uat(ci) + du, vat(cj), uat(ci) + du, vat(cj) + dv),
                    (corners[1], corners[2]),
                ),
                (
                    (ci, cj + 1, 0u8),
                    (uat(ci), vat(cj) + dv, uat(ci) + du, vat(cj) + dv),
                    (corners[3], corners[2]),
                ),
                ((ci, cj, 1u8), (uat(ci), vat(cj), uat(ci), vat(cj) + dv), (corners[0], corners[3])),
            ];
            let mut cell_pts: Vec<(usize, usize)> = Vec::new(); // (edge_slot, point index)
            for (slot, (key, (ua, va, ub, vb), (ga, gb))) in edge_defs.iter().enumerate() {
                if ga * gb < 0.0 {
                    let key = (key.0 % ncol, key.1, key.2);
                    let idx = *edge_index.entry(key).or_insert_with(|| {
                        let (u, v, g) = polish(*ua, *va, *ub, *vb, *ga, *gb);
                        let position = sf.point(u, v);
                        points.push(ExtractedPoint {
                            position,
                            u,
                            v,
                            b_dot_n: g,
                            kappa_nb: 0.0,
                            b_dot_t: 0.0,
                        });
                        points.len() - 1
                    });
                    crossing_edges.push(slot);
                    cell_pts.push((slot, idx));
                }
            }
            match cell_pts.len() {
                2 => segments.push((cell_pts[0].1, cell_pts[1].1)),
                4 => {
                    // Saddle: resolve topology by the center sign.
                    let center = sf.g(uat(ci) + 0.5 * du, vat(cj) + 0.5 * dv);
                    let by_slot = |s: usize| cell_pts.iter().find(|p| p.0 == s).unwrap().1;
                    if (center > 0.0) == (corners[0] > 0.0) {
                        segments.push((by_slot(0), by_slot(1)));
                        segments.push((by_slot(2), by_slot(3)));
                    } else {
                        segments.push((by_slot(0), by_slot(3)));
                        segments.push((by_slot(1), by_slot(2)));
                    }
                }
                _ => {}
            }
            let _ = crossing_edges;
        }
    }

    if points.is_empty() {
        return Err(Error::NoZeroCrossing);
    }

    // Per-point surface quantities: tangential gradient of B·N and the
    // level-set tangent direction. The gradient uses a Richardson pair of
    // 5-point stencils at O(1e-2) steps so that roundoff in g (itself built
    // from finite-difference tangents) stays below ~1e-10.
    let deriv6 = |f: &dyn Fn(f64) -> f64, h: f64| -> f64 {
        let five = |h: f64| {
            (f(-2.0 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2.0 * h)) / (12.0 * h)
        };
        let a = five(h);
        let b = five(0.5 * h);
        (16.0 * b - a) / 15.0
    };
    for p in &mut points {
        let (su, sv) = sf.tangents(p.u, p.v);
        let e = dot(su, su);
        let f = dot(su, sv);
        let g2 = dot(sv, sv);
        let hu = 1e-2 * (u1 - u0) / (2.0 * std::f64::consts::PI);
        // Keep the v-stencil inside the chart near the clipped poles.
        let margin = (v1 - p.v).min(p.v - v0).max(1e-6);
        let hv = (5e-3 * (v1 - v0)).min(0.45 * margin);
        let (pu, pv) = (p.u, p.v);
        let gu = deriv6(&|d: f64| sf.g(pu + d, pv), hu);
        let gv = deriv6(&|d: f64| sf.g(pu, pv + d), hv);
        // |d^T g|² = (gu, gv) G^{-1} (gu, gv)^T.
        let det = e * g2 - f * f;
        let a = (g2 * gu - f * gv) / det;
        let b = (-f * gu + e * gv) / det;
        p.kappa_nb = (a * gu + b * gv).max(0.0).sqrt();
        // Ambient surface gradient and level-set tangent.
        let grad = add(scale(su, a), scale(sv, b));
        let nsurf = normalize(cross(su, sv));
        let tdir = normalize(cross(nsurf, grad));
        p.b_dot_t = dot((sf.field)(p.position), tdir);
    }

    // Chain segments into polylines.
    let mut adjacency: HashMap<usize, Vec<usize>> = HashMap::new();
    for &(a, b) in &segments {
        adjacency.entry(a).or_default().push(b);
        adjacency.entry(b).or_default().push(a);
    }
    let mut visited = vec![false; points.len()];
    let mut polylines: Vec<Vec<usize>> = Vec::new();
    for start in 0..points.len() {
        if visited[start] || !adjacency.contains_key(&start) {
            continue;
        }
        // Walk to one end (or around a loop).
        let mut chain = vec![start];
        visited[start] = true;
        let grow = |chain: &mut Vec<usize>, visited: &mut Vec<bool>| loop {
            let last = *chain.last().unwrap();
            let next = adjacency[&last]
                .iter()
                .find(|&&n| !visited[n] || (n == chain[0] && chain.len() > 2));
            match next {
                Some(&n) if n == chain[0] => {
                    chain.push(n);
                    break;
                }
                Some(&n) => {
                    visited[n] = true;
                    chain.push(n);
                }
                None => break,
            }
        };
        grow(&mut chain, &mut visited);
        if chain.first() != chain.last() {
            chain.reverse();
            grow(&mut chain, &mut visited);
        }
        polylines.push(chain);
    }

    let mesh_size = segments
        .iter()
        .map(|&(a, b)| norm(sub(points[a].position, points[b].position)))
        .fold(0.0_f64, f64::max);

    let min_kappa_nb = points.iter().map(|p| p.kappa_nb).fold(f64::INFINITY, f64::min);

    // (C2): zeros of B·T along the chains, plus chain ends that sit inside
    // a near-zero dip (pole cuts), clustered in ambient distance.
    let mut candidates: Vec<Vec3> = Vec::new();
    for chain in &polylines {
        for w in chain.windows(2) {
            let (a, b) = (points[w[0]], points[w[1]]);
            if a.b_dot_t * b.b_dot_t < 0.0 {
                candidates.push(scale(add(a.position, b.position), 0.5));
            }
        }
        for &endpoint in [chain.first(), chain.last()].into_iter().flatten() {
            let p = points[endpoint];
            if p.b_dot_t.abs() < 0.05 {
                candidates.push(p.position);
            }
        }
    }
    let cluster_radius = 0.3_f64.max(5.0 * mesh_size);
    let mut tangency_points: Vec<Vec3> = Vec::new();
    for c in candidates {
        if !tangency_points.iter().any(|t| norm(sub(*t, c)) < cluster_radius) {
            tangency_points.push(c);
        }
    }

    Ok(GammaExtraction {
        points,
        segments,
        polylines,
        min_kappa_nb,
        tangency_points,
        mesh_size,
    })
}


#[cfg(test)]
mod prop_tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn chart_points_lie_on_gamma(
            param in -0.98f64..0.98,
            tau in 0.05f64..4.0,
            branch_idx in 0usize..4,
        ) {
            let branch = ALL_BRANCHES[branch_idx];
            let x = gamma_branch(branch, param, tau).unwrap();
            prop_assert!((norm(x) - 1.0).abs() < 1e-13);
            let defect = x[0] * (tau * x[2]).cos() + x[1] * (tau * x[2]).sin();
            prop_assert!(defect.abs() < 1e-13);
        }

        #[test]
        fn frames_stay_orthonormal(
            param in -0.95f64..0.95,
            tau in 0.1f64..3.0,
        ) {
            for branch in [Branch::C1, Branch::C2] {
                let f = frame_at(branch, param, tau).unwrap();
                prop_assert!((dot(f.t, f.t) - 1.0).abs() < 1e-12);
                prop_assert!((dot(f.v, f.v) - 1.0).abs() < 1e-12);
                prop_assert!(dot(f.t, f.n).abs() < 1e-12);
                prop_assert!(dot(f.v, f.n).abs() < 1e-12);
                // V = T x N by construction.
                let vv = cross(f.t, f.n);
                prop_assert!(norm(sub(vv, f.v)) < 1e-12);
            }
        }
    }
}
