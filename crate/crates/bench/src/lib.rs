//! Shared builders for the kernel benchmarks (see `benches/kernels.rs`).

use magspec_core::grid::{Bc, Grid1D};
use magspec_core::model3d::{Model3d, ModelBox, ModelParams};

/// De Gennes discretization at the default resolution.
pub fn degennes_matrix(xi: f64) -> (Vec<f64>, Vec<f64>) {
    let grid = Grid1D::new(0.0, 20.0, 4000, Bc::Neumann, Bc::Dirichlet).unwrap();
    magspec_core::eigen::discretize_schrodinger_1d(&grid, |t| (t - xi) * (t - xi)).unwrap()
}

/// Mid-size model operator for apply throughput.
pub fn model_operator(n: usize) -> Model3d {
    let params = ModelParams {
        gamma: 1.0,
        theta: 0.3,
        eta: 0.2,
        zeta: -0.1,
        h: 1e-2,
        boxg: ModelBox { r_extent: 10.0, t_extent: 10.0, nr: n, ns: n, nt: n / 2 + 8 },
    };
    Model3d::new_p1(params).unwrap()
}
