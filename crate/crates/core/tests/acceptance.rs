//! Acceptance suite: one test per shipping criterion, each printing a
//! PASS line with the measured numbers (run with `--nocapture` to see them
//! on success). Tolerances are pinned in code; the heavy model-operator
//! sweeps take tens of minutes at the default 96×96×64 grid.

use magspec_core::asymptotics::{self, c_conj, f_v_prime, tau0, EnergyVariant, Regime};
use magspec_core::geometry::{self, extract_gamma, Branch, SurfaceField};
use magspec_core::grid::Grid1D;
use magspec_core::halfspace;
use magspec_core::model1d::{self, SpectralConstants};
use magspec_core::model3d::{self, ModelBox, ModelParams, ModelSolve};
use magspec_core::quasimode;
use num_complex::Complex64;

fn constants() -> SpectralConstants {
    SpectralConstants::compute_default().expect("constants pipeline")
}

/// Least-squares slope of ln y against ln x.
fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    num / den
}

/// Least-squares fit y = a·x1 + b·x2.
fn fit2(x1: &[f64], x2: &[f64], y: &[f64]) -> (f64, f64) {
    let (mut s11, mut s12, mut s22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..y.len() {
        s11 += x1[i] * x1[i];
        s12 += x1[i] * x2[i];
        s22 += x2[i] * x2[i];
        b1 += x1[i] * y[i];
        b2 += x2[i] * y[i];
    }
    let det = s11 * s22 - s12 * s12;
    ((b1 * s22 - b2 * s12) / det, (s11 * b2 - s12 * b1) / det)
}

#[test]
fn criterion_1_constants_suite() {
    let c = constants();
    assert!(c.theta0 > 0.5 && c.theta0 < 1.0, "theta0 = {}", c.theta0);
    let xi_defect = (c.xi0 - c.theta0.sqrt()).abs();
    assert!(xi_defect <= 1e-6, "|xi0 - sqrt(theta0)| = {xi_defect:e}");

    // Feynman-Hellmann integral with the grid-consistent minimizer pair.
    let grid = model1d::default_degennes_grid();
    let (xi0_g, _) = model1d::find_degennes_min(&grid, 1e-9).unwrap();
    let phi0 = model1d::degennes_ground_state(xi0_g, &grid).unwrap();
    let weighted: Vec<f64> = grid
        .nodes()
        .iter()
        .zip(&phi0.values)
        .map(|(t, v)| (t - xi0_g) * v)
        .collect();
    let fh = phi0.inner(&weighted, &phi0.values);
    assert!(fh.abs() <= 1e-6, "Feynman-Hellmann integral {fh:e}");

    // delta0 carries its own dual-estimator agreement gate (<= 1e-4).
    let delta0 = model1d::degennes_delta0(xi0_g, &grid).unwrap();
    assert!(delta0 > 0.0 && delta0 < 1.0, "delta0 = {delta0}");

    assert!(c.mont_curvature > 0.0, "Montgomery curvature {}", c.mont_curvature);

    let mont = model1d::default_montgomery_grid();
    let (rho0_g, _, _) = model1d::find_montgomery_min(&mont, 1e-9).unwrap();
    let psi0 = model1d::montgomery_ground_state(rho0_g, &mont).unwrap();
    let v = &psi0.values;
    let evenness = (0..v.len())
        .map(|i| (v[i] - v[v.len() - 1 - i]).abs())
        .fold(0.0_f64, f64::max);
    assert!(evenness <= 1e-8, "psi0 evenness defect {evenness:e}");

    println!(
        "PASS criterion 1: theta0 {:.9}, |xi0-sqrt(theta0)| {:.1e}, FH {:.1e}, delta0 {:.9}, \
         curvature {:.4}, evenness {:.1e}",
        c.theta0, xi_defect, fh.abs(), delta0, c.mont_curvature, evenness
    );
}

#[test]
fn criterion_2_sigma_suite() {
    let c = constants();
    let tol = 1e-3;

    // sigma(0) = theta0 by construction.
    assert_eq!(halfspace::sigma_at_zero(&c), c.theta0);

    let nus = [0.1, 0.2, 0.4, 0.7, 1.0, 1.3, 1.5, std::f64::consts::FRAC_PI_2];
    let samples: Vec<halfspace::SigmaSample> = halfspace::sigma_sweep(&nus, tol)
        .into_iter()
        .map(|s| s.expect("sigma sample"))
        .collect();

    // Monotone within 2x solver tolerance; lower bound at every sample.
    for w in samples.windows(2) {
        assert!(
            w[1].value >= w[0].value - 2.0 * tol,
            "monotonicity violated: sigma({}) = {} vs sigma({}) = {}",
            w[0].nu,
            w[0].value,
            w[1].nu,
            w[1].value
        );
    }
    for s in &samples {
        let bound = c.theta0 * s.nu.cos().powi(2) + s.nu.sin().powi(2);
        assert!(
            s.value >= bound - tol,
            "lower bound violated at nu {}: {} < {}",
            s.nu,
            s.value,
            bound
        );
        assert!(s.value <= 1.0 + tol, "sigma({}) = {} above 1", s.nu, s.value);
    }

    // sigma(pi/2) = 1 within 1e-3.
    let at_edge = samples.last().unwrap().value;
    assert!((at_edge - 1.0).abs() <= 1e-3, "sigma(pi/2) = {at_edge}");

    // Small-nu slope within 5% of sqrt(delta0), Richardson in nu.
    let small: Vec<f64> = halfspace::sigma_sweep(&[0.05, 0.1, 0.2], tol)
        .into_iter()
        .map(|s| s.expect("small-nu sample").value)
        .collect();
    let s1 = (small[1] - small[0]) / 0.05;
    let s2 = (small[2] - small[1]) / 0.1;
    let slope = 2.0 * s1 - s2;
    let want = c.delta0.sqrt();
    assert!(
        (slope - want).abs() <= 0.05 * want,
        "small-nu slope {slope} vs sqrt(delta0) {want}"
    );

    println!(
        "PASS criterion 2: sweep {:?} monotone, sigma(pi/2) {:.6}, slope {:.5} vs sqrt(delta0) {:.5}",
        samples.iter().map(|s| (s.nu, s.value)).collect::<Vec<_>>(),
        at_edge,
        slope,
        want
    );
}

#[test]
fn criterion_3_helical_geometry_suite() {
    let tau = 1.0;
    let helical = geometry::HelicalField::new(tau).unwrap();
    let sf = SurfaceField::sphere(move |x| helical.field(x));
    let ex = extract_gamma(&sf, 192, 144).unwrap();
    assert!(!ex.points.is_empty());

    // Closed forms against the generic tangential-derivative computations.
    let mut max_kappa_err = 0.0_f64;
    let mut max_bt_err = 0.0_f64;
    for p in &ex.points {
        let x3 = p.position[2];
        max_kappa_err = max_kappa_err.max((p.kappa_nb - geometry::kappa_nb(x3, tau)).abs());
        max_bt_err = max_bt_err.max((p.b_dot_t.abs() - geometry::b_dot_t(x3, tau)).abs());
    }
    assert!(max_kappa_err <= 1e-6, "kappa_nB mismatch {max_kappa_err:e}");
    assert!(max_bt_err <= 1e-6, "B·T mismatch {max_bt_err:e}");

    // Exactly two tangency clusters, at the poles; the closed form vanishes
    // only at x3 = ±1.
    assert_eq!(ex.tangency_points.len(), 2, "{:?}", ex.tangency_points);
    for t in &ex.tangency_points {
        assert!(t[2].abs() > 0.9, "tangency point off the poles: {t:?}");
    }
    assert!(geometry::b_dot_t(1.0, tau).abs() < 1e-15);
    assert!(geometry::b_dot_t(-1.0, tau).abs() < 1e-15);
    for k in 1..100 {
        let x3 = -1.0 + 2.0 * k as f64 / 100.0;
        assert!(geometry::b_dot_t(x3, tau) > 0.0);
    }

    // Extraction matches the charts within twice the mesh size.
    let mut chart = Vec::new();
    for branch in [Branch::C1, Branch::C2] {
        for k in 0..=4000 {
            let p = -0.9995 + 1.999 * k as f64 / 4000.0;
            chart.push(geometry::gamma_branch(branch, p, tau).unwrap());
        }
    }
    let mut max_dist = 0.0_f64;
    for p in &ex.points {
        let d = chart
            .iter()
            .map(|c| geometry::norm(geometry::sub(*c, p.position)))
            .fold(f64::INFINITY, f64::min);
        max_dist = max_dist.max(d);
    }
    assert!(
        max_dist <= 2.0 * ex.mesh_size,
        "chart distance {max_dist} vs mesh {}",
        ex.mesh_size
    );

    println!(
        "PASS criterion 3: kappa err {:.1e}, B·T err {:.1e}, tangency clusters {:?}, \
         chart distance {:.2e} (mesh {:.2e})",
        max_kappa_err, max_bt_err, ex.tangency_points, max_dist, ex.mesh_size
    );
}

#[test]
fn criterion_4_min_example_reproduction() {
    let c = constants();
    let t0 = tau0(c.delta0).unwrap();
    let mu0 = 1.0 - c.delta0;

    // Brute-force minimization of f on [0, tau] against the closed form.
    let brute = |lo: f64, hi: f64| -> f64 {
        const INV_PHI: f64 = 0.618_033_988_749_894_9;
        let f = |v: f64| asymptotics::f_v(v, mu0);
        let (mut a, mut b) = (lo, hi);
        let mut x1 = b - INV_PHI * (b - a);
        let mut x2 = a + INV_PHI * (b - a);
        let (mut f1, mut f2) = (f(x1), f(x2));
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
        0.5 * (a + b)
    };
    let vstar = brute(0.0, 3.0 * t0);
    assert!((vstar - t0).abs() <= 1e-8, "brute-force {vstar} vs closed form {t0}");
    assert!(f_v_prime(t0, mu0).abs() <= 1e-10);

    // Sub-threshold: two equatorial minimizers.
    let tau_small = 0.8 * t0;
    let rep = asymptotics::minimize_over_gamma(tau_small, &c, EnergyVariant::LinearBt, 4000)
        .unwrap();
    assert_eq!(rep.regime, Regime::SubThreshold);
    assert_eq!(rep.argmin.len(), 2);
    for p in &rep.argmin {
        let d = (p[0].abs()).hypot(p[2]).hypot(p[1].abs() - 1.0);
        assert!(d < 1e-6, "sub-threshold minimizer {p:?}");
    }

    // Super-threshold: the four closed-form points within 1e-6.
    let tau_big = 2.5 * t0;
    let rep =
        asymptotics::minimize_over_gamma(tau_big, &c, EnergyVariant::LinearBt, 4000).unwrap();
    assert_eq!(rep.regime, Regime::SuperThreshold);
    assert_eq!(rep.argmin.len(), 4);
    let x3s = (1.0 - t0 / tau_big).sqrt();
    let ws = (t0 / tau_big).sqrt();
    let mut worst = 0.0_f64;
    for p in &rep.argmin {
        let mut best = f64::INFINITY;
        for (sx, sz) in [(1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)] {
            let x3: f64 = sz * x3s;
            let q = tau_big * x3;
            let e = [sx * ws * q.sin(), -sx * ws * q.cos(), x3];
            best = best.min(geometry::norm(geometry::sub(e, *p)));
        }
        worst = worst.max(best);
    }
    assert!(worst <= 1e-6, "super-threshold coordinates off by {worst:e}");

    // Constant field on the sphere: the effective energy is constant on Γ.
    let sf = SurfaceField::sphere(|_| [0.0, 0.0, 1.0]);
    let ex = extract_gamma(&sf, 128, 96).unwrap();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for p in &ex.points {
        let g =
            asymptotics::gamma_tilde(p.kappa_nb, p.b_dot_t, &c, EnergyVariant::LinearBt).unwrap();
        lo = lo.min(g);
        hi = hi.max(g);
    }
    assert!(hi - lo <= 1e-10, "constant-field spread {}", hi - lo);

    // The squared variant's conflicting argmin is reported, not asserted
    // as the physical answer.
    let squared =
        asymptotics::minimize_over_gamma(1.0, &c, EnergyVariant::SquaredBt, 4000).unwrap();
    let polar: Vec<f64> = squared.argmin.iter().map(|p| p[2]).collect();

    println!(
        "PASS criterion 4: tau0 {:.8} (brute {:.8}), sub/super argmin verified, \
         constant-field spread {:.1e}; squared-variant argmin x3 {:?} (reported)",
        t0,
        vstar,
        hi - lo,
        polar
    );
}

#[test]
fn criterion_5_model_operator_two_term() {
    let c = constants();
    let hs = [1e-1, 5e-2, 2e-2, 1e-2];
    let base = ModelParams::new(1.0, 0.3, 0.0, 0.0, hs[0]).unwrap();
    let mut warm: Option<ModelSolve> = None;
    let mut y = Vec::new();
    for &h in &hs {
        let p = ModelParams { h, ..base };
        let r = match &warm {
            Some(w) => model3d::model_lambda1_from(&p, 2e-5, w).unwrap(),
            None => model3d::model_lambda1(&p, 2e-5).unwrap(),
        };
        y.push(h * r.eigen.value);
        warm = Some(r);
    }
    let x1: Vec<f64> = hs.to_vec();
    let x2: Vec<f64> = hs.iter().map(|h| h.powf(4.0 / 3.0)).collect();
    let (a, b) = fit2(&x1, &x2, &y);
    let cc = c_conj(1.0, 0.3, &c);
    let a_rel = (a / c.theta0 - 1.0).abs();
    let b_rel = (b / cc - 1.0).abs();
    assert!(a_rel <= 0.02, "fit a = {a} vs theta0 = {} ({:.2}%)", c.theta0, 100.0 * a_rel);
    assert!(b_rel <= 0.15, "fit b = {b} vs c_conj = {cc} ({:.2}%)", 100.0 * b_rel);

    // Two-term lower-bound inequality at every sample:
    // h·λ₁ ≥ Θ₀h + c_conj h^{4/3} (the correction term enters with a
    // positive sign on this discretization, so no fitted remainder is
    // needed).
    for (&h, &hl) in hs.iter().zip(&y) {
        let rhs = c.theta0 * h + cc * h.powf(4.0 / 3.0);
        assert!(hl + 1e-9 >= rhs, "lower bound violated at h = {h}: {hl} < {rhs}");
    }
    println!(
        "PASS criterion 5: a {:.6} (theta0 {:.6}, {:+.2}%), b {:.6} (c_conj {:.6}, {:+.2}%)",
        a,
        c.theta0,
        100.0 * (a / c.theta0 - 1.0),
        b,
        cc,
        100.0 * (b / cc - 1.0)
    );
}

#[test]
fn criterion_6_eta_zeta_insensitivity() {
    let hs = [5e-2, 2e-2, 1e-2];
    let base = ModelParams::new(1.0, 0.3, 0.0, 0.0, hs[0]).unwrap();

    // Baseline row.
    let cells0 = model3d::eta_zeta_sweep(&base, &[0.0], &[0.0], &hs, 3e-5);
    let base_vals: Vec<f64> = cells0.iter().map(|c| *c.h_lambda.as_ref().unwrap()).collect();

    let corners = [(0.5, 0.5), (0.5, -0.5), (-0.5, 0.5), (-0.5, -0.5)];
    let mut all_sigmas = Vec::new();
    for &(eta, zeta) in &corners {
        let cells = model3d::eta_zeta_sweep(&base, &[eta], &[zeta], &hs, 3e-5);
        let devs: Vec<f64> = cells
            .iter()
            .zip(&base_vals)
            .map(|(c, b)| {
                (c.h_lambda.as_ref().unwrap() - b).abs() / c.h.powf(4.0 / 3.0)
            })
            .collect();
        // Deviations decrease across the h-sweep.
        for w in devs.windows(2) {
            assert!(
                w[1] <= w[0],
                "deviation not decreasing for corner ({eta},{zeta}): {devs:?}"
            );
        }
        // Positive fitted exponent: dev ~ C h^sigma.
        let sigma = loglog_slope(&hs, &devs);
        assert!(sigma > 0.0, "fitted exponent {sigma} not positive for ({eta},{zeta})");
        all_sigmas.push(((eta, zeta), sigma, devs));
    }
    println!("PASS criterion 6: per-corner (deviations, fitted exponent): {all_sigmas:?}");
}

#[test]
fn criterion_7_operator_identity_order() {
    let mut diffs = Vec::new();
    let mut spacings = Vec::new();
    for &n in &[64usize, 128, 256] {
        let params = ModelParams {
            gamma: 0.8,
            theta: 0.4,
            eta: 0.3,
            zeta: 0.2,
            h: 1e-2,
            boxg: ModelBox { r_extent: 8.0, t_extent: 8.0, nr: n, ns: n, nt: 32 },
        };
        let op = model3d::Model3d::new_p1(params).unwrap();
        // Smooth compactly supported test function with a gentle phase.
        let dr = 16.0 / (n as f64 + 1.0);
        let dt = 8.0 / 33.0;
        let (ms, mt) = (n, 33);
        let mut v = vec![Complex64::ZERO; op.dim()];
        for ir in 0..n {
            let r = -8.0 + (ir as f64 + 1.0) * dr;
            for is in 0..ms {
                let s = -8.0 + (is as f64 + 1.0) * dr;
                for it in 0..mt {
                    let t = it as f64 * dt;
                    let bump = (-0.5 * (r * r + s * s) - 0.4 * (t - 1.0) * (t - 1.0)).exp();
                    v[(ir * ms + is) * mt + it] =
                        bump * Complex64::new(0.0, 0.3 * r - 0.2 * s).exp();
                }
            }
        }
        let mut a = vec![Complex64::ZERO; op.dim()];
        op.apply(&v, &mut a);
        let b = op.apply_factored(&v);
        let maxdiff = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0_f64, f64::max);
        diffs.push(maxdiff);
        spacings.push(dr);
    }
    let order1 = (diffs[0] / diffs[1]).ln() / (spacings[0] / spacings[1]).ln();
    let order2 = (diffs[1] / diffs[2]).ln() / (spacings[1] / spacings[2]).ln();
    assert!((order1 - 2.0).abs() <= 0.3, "first refinement order {order1}");
    assert!((order2 - 2.0).abs() <= 0.3, "second refinement order {order2}");
    println!(
        "PASS criterion 7: max-norm differences {diffs:?}, observed orders {order1:.2}, {order2:.2}"
    );
}

#[test]
fn criterion_8_quasimode_upper_bound() {
    let c = constants();
    let grid = model1d::default_degennes_grid();
    let chain = quasimode::build_phi_chain(&grid).unwrap();
    let mont = model1d::default_montgomery_grid();
    let (rho0, _, _) = model1d::find_montgomery_min(&mont, 1e-9).unwrap();
    let psi0 = model1d::montgomery_ground_state(rho0, &mont).unwrap();

    // Frame at the first-power-variant minimizer (0, -1, 0) of the helical
    // ball at tau = 1 (branch C1 chart): theta = arcsin(B·T), kappa_g = 0,
    // gamma = kappa_nB.
    let tau: f64 = 1.0;
    let theta = (-tau / (1.0 + tau * tau).sqrt()).asin();
    let gamma = (1.0 + tau * tau).sqrt();
    let kappa = 0.0;
    let cc = c_conj(gamma, theta, &c);

    let hs = [1e-1, 3e-2, 1e-2, 3e-3];
    let mut norms = Vec::new();
    let mut m20 = Vec::new();
    let mut m02 = Vec::new();
    let mut dte = Vec::new();
    let mut ratios = Vec::new();
    for &h in &hs {
        let p = quasimode::QuasimodeParams::new(theta, kappa, gamma, h).unwrap();
        let (ra, ta) = quasimode::default_trial_axes(&p, 0.02, 0.02);
        let v = quasimode::assemble_v(&p, &chain, &c, &psi0, &ra, &ta).unwrap();
        let n2 = v.norm_sq();
        norms.push(n2);
        m20.push(v.physical_moment(2, 0));
        m02.push(v.physical_moment(0, 2));
        dte.push(v.dt_energy_physical());
        let q = quasimode::energy_qm00(&v, &c).unwrap();
        ratios.push((q / n2 - c.theta0 * h) / h.powf(4.0 / 3.0));
    }

    // Norm: ‖v‖² = 1 + O(h^{1/6}) with a fitted constant at most 5.
    for (&h, &n2) in hs.iter().zip(&norms) {
        assert!(
            (n2 - 1.0).abs() <= 5.0 * h.powf(1.0 / 6.0),
            "norm² = {n2} at h = {h}"
        );
    }

    // Scaling exponents within 10%.
    let s20 = loglog_slope(&hs, &m20);
    let s02 = loglog_slope(&hs, &m02);
    let sdt = loglog_slope(&hs, &dte);
    assert!((s20 - 2.0 / 3.0).abs() <= 0.1 * (2.0 / 3.0), "r² exponent {s20}");
    assert!((s02 - 1.0).abs() <= 0.1, "t² exponent {s02}");
    assert!((sdt - 1.0).abs() <= 0.1, "|hD_t v|² exponent {sdt}");

    // Corrected energy ratio: bounded, and its limit point (h^{1/6}-fit)
    // within 15% of c_conj at the chosen point.
    for &r in &ratios {
        assert!(r.is_finite() && r > 0.0 && r < 2.0 * cc, "ratio {r} unbounded vs c_conj {cc}");
    }
    let ones = vec![1.0; hs.len()];
    let x16: Vec<f64> = hs.iter().map(|h| h.powf(1.0 / 6.0)).collect();
    let (limit, _h16_coeff) = fit2(&ones, &x16, &ratios);
    let rel = (limit / cc - 1.0).abs();
    assert!(rel <= 0.15, "ratio limit {limit} vs c_conj {cc} ({:.1}%)", 100.0 * rel);

    // Quadrature doubling stability at h = 1e-2.
    let p = quasimode::QuasimodeParams::new(theta, kappa, gamma, 1e-2).unwrap();
    let (ra, ta) = quasimode::default_trial_axes(&p, 0.02, 0.02);
    let v = quasimode::assemble_v(&p, &chain, &c, &psi0, &ra, &ta).unwrap();
    let q1 = quasimode::energy_qm00(&v, &c).unwrap() / v.norm_sq();
    let (ra2, ta2) = quasimode::default_trial_axes(&p, 0.01, 0.01);
    let v2 = quasimode::assemble_v(&p, &chain, &c, &psi0, &ra2, &ta2).unwrap();
    let q2 = quasimode::energy_qm00(&v2, &c).unwrap() / v2.norm_sq();
    let qrel = (q1 - q2).abs() / q1.abs();
    assert!(qrel <= 1e-3, "quadrature doubling changed q by {qrel:e}");

    println!(
        "PASS criterion 8: exponents r² {s20:.4}, t² {s02:.4}, dt {sdt:.4}; ratios {ratios:?} \
         -> limit {limit:.5} vs c_conj {cc:.5} ({:+.1}%); quadrature stability {qrel:.1e}",
        100.0 * (limit / cc - 1.0)
    );
}

#[test]
fn criterion_9_moment_decay() {
    let hs = [1e-1, 1e-2, 1e-3];
    let base = ModelParams::new(1.0, 0.3, 0.0, 0.0, hs[0]).unwrap();
    let mut warm: Option<ModelSolve> = None;
    let mut m2 = Vec::new();
    let mut m4 = Vec::new();
    for &h in &hs {
        let p = ModelParams { h, ..base };
        let r = match &warm {
            Some(w) => model3d::model_lambda1_from(&p, 1e-4, w).unwrap(),
            None => model3d::model_lambda1(&p, 1e-4).unwrap(),
        };
        let op = model3d::Model3d::new_p1(p).unwrap();
        m2.push(model3d::moment_decay(&op, &r.eigen.vector, 2, h));
        m4.push(model3d::moment_decay(&op, &r.eigen.vector, 4, h));
        warm = Some(r);
    }
    let s2 = loglog_slope(&hs, &m2);
    let s4 = loglog_slope(&hs, &m4);
    assert!((s2 - 1.0).abs() <= 0.15, "t² moment slope {s2}");
    assert!((s4 - 2.0).abs() <= 0.15 * 2.0, "t⁴ moment slope {s4}");
    // Boundedness of the rescaled moment across the sweep.
    for (&h, &m) in hs.iter().zip(&m2) {
        assert!(m / h > 0.0 && m / h < 10.0, "m2/h = {} at h = {h}", m / h);
    }
    println!("PASS criterion 9: t² slope {s2:.4} (want 1), t⁴ slope {s4:.4} (want 2), m2/h {:?}",
        hs.iter().zip(&m2).map(|(h, m)| m / h).collect::<Vec<_>>());
}
