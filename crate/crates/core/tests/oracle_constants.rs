//! Independent grid-refinement oracle for the 1D spectral constants.
//!
//! Each constant is computed on three exactly-halved grids and Richardson
//! extrapolated twice, giving an error estimate from the last correction.
//! The values frozen into the unit and acceptance tests were produced by
//! this oracle; the test asserts the pipeline still reproduces them.

use magspec_core::grid::Grid1D;
use magspec_core::model1d::{
    default_degennes_grid, default_montgomery_grid, degennes_delta0, find_degennes_min,
    find_montgomery_min, montgomery_mu,
};

/// Two Richardson steps for a second-order quantity sampled on grids with
/// spacing h, h/2, h/4. Returns (extrapolated value, size of last step).
fn richardson2(v: [f64; 3]) -> (f64, f64) {
    let r1 = v[1] + (v[1] - v[0]) / 3.0;
    let r2 = v[2] + (v[2] - v[1]) / 3.0;
    // The pair (r1, r2) is fourth-order accurate.
    let out = r2 + (r2 - r1) / 15.0;
    (out, (r2 - r1).abs())
}

fn grids(base: &Grid1D) -> [Grid1D; 3] {
    let g1 = base.refined();
    let g2 = g1.refined();
    [base.clone(), g1, g2]
}

#[test]
fn refinement_oracle_reproduces_frozen_constants() {
    let mut theta = [0.0; 3];
    let mut xi = [0.0; 3];
    let mut delta = [0.0; 3];
    for (k, g) in grids(&default_degennes_grid()).iter().enumerate() {
        let (x, t) = find_degennes_min(g, 1e-9).unwrap();
        xi[k] = x;
        theta[k] = t;
        delta[k] = degennes_delta0(x, g).unwrap();
    }
    let (theta0, theta_err) = richardson2(theta);
    let (xi0, xi_err) = richardson2(xi);
    let (delta0, delta_err) = richardson2(delta);

    let mut nu = [0.0; 3];
    let mut rho = [0.0; 3];
    let mut mu0 = [0.0; 3];
    for (k, g) in grids(&default_montgomery_grid()).iter().enumerate() {
        let (r, n, _) = find_montgomery_min(g, 1e-9).unwrap();
        rho[k] = r;
        nu[k] = n;
        mu0[k] = montgomery_mu(0.0, g).unwrap().value;
    }
    let (nu0, nu_err) = richardson2(nu);
    let (rho0, rho_err) = richardson2(rho);
    let (mu_mon0, mu0_err) = richardson2(mu0);

    println!("theta0   = {theta0:.12}  (last step {theta_err:.2e})");
    println!("xi0      = {xi0:.12}  (last step {xi_err:.2e})");
    println!("sqrt(th) = {:.12}", theta0.sqrt());
    println!("delta0   = {delta0:.12}  (last step {delta_err:.2e})");
    println!("nu0_hat  = {nu0:.12}  (last step {nu_err:.2e})");
    println!("rho0     = {rho0:.12}  (last step {rho_err:.2e})");
    println!("muMon(0) = {mu_mon0:.12}  (last step {mu0_err:.2e})");

    // Basic sanity; the frozen-digit assertions live in the unit tests.
    assert!(theta0 > 0.5 && theta0 < 1.0);
    assert!((xi0 - theta0.sqrt()).abs() < 1e-8);
    assert!(delta0 > 0.0 && delta0 < 1.0);
    assert!(nu0 > 0.0);
    assert!(theta_err < 1e-8 && nu_err < 1e-8);
}
