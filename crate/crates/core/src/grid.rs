//! Uniform grids for the 1D, 2D and 3D finite-difference discretizations.

use crate::error::{Error, Result};

/// Boundary condition on one side of an interval (or one face of a box).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bc {
    /// Ghost-point reflection; the boundary node is an unknown.
    Neumann,
    /// Homogeneous Dirichlet; the boundary node is eliminated.
    Dirichlet,
}

/// Uniform 1D grid on `[a, b]` with `n` interior nodes.
///
/// The spacing is `(b - a) / (n + 1)`. A side with a Neumann condition
/// contributes its boundary node as an additional unknown, so the number of
/// unknowns is `n` plus one per Neumann side.
#[derive(Clone, Debug)]
pub struct Grid1D {
    a: f64,
    b: f64,
    n: usize,
    bc_left: Bc,
    bc_right: Bc,
}

impl Grid1D {
    pub fn new(a: f64, b: f64, n: usize, bc_left: Bc, bc_right: Bc) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "endpoints must satisfy a < b, got [{a}, {b}]"
            )));
        }
        if n < 3 {
            return Err(Error::InvalidGrid(format!("need n >= 3 interior nodes, got {n}")));
        }
        Ok(Self { a, b, n, bc_left, bc_right })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn interior_count(&self) -> usize {
        self.n
    }

    pub fn bc_left(&self) -> Bc {
        self.bc_left
    }

    pub fn bc_right(&self) -> Bc {
        self.bc_right
    }

    pub fn spacing(&self) -> f64 {
        (self.b - self.a) / (self.n as f64 + 1.0)
    }

    /// Number of unknowns (interior nodes plus Neumann boundary nodes).
    pub fn unknowns(&self) -> usize {
        let mut m = self.n;
        if self.bc_left == Bc::Neumann {
            m += 1;
        }
        if self.bc_right == Bc::Neumann {
            m += 1;
        }
        m
    }

    /// Coordinates of the unknowns, left to right.
    pub fn nodes(&self) -> Vec<f64> {
        let dx = self.spacing();
        let first = if self.bc_left == Bc::Neumann { 0 } else { 1 };
        let last = if self.bc_right == Bc::Neumann { self.n + 1 } else { self.n };
        (first..=last).map(|i| self.a + i as f64 * dx).collect()
    }

    /// Trapezoid quadrature weight of each unknown: 1/2 at a Neumann
    /// boundary node, 1 elsewhere. The discrete `L²` inner product is
    /// `Σ wᵢ uᵢ vᵢ Δ`; eigenvectors of the symmetrized Schrödinger matrix
    /// live in the representation `ũ = W^{1/2} u`.
    pub fn node_weights(&self) -> Vec<f64> {
        let m = self.unknowns();
        let mut w = vec![1.0; m];
        if self.bc_left == Bc::Neumann {
            w[0] = 0.5;
        }
        if self.bc_right == Bc::Neumann {
            w[m - 1] = 0.5;
        }
        w
    }

    /// Same interval and boundary conditions with the spacing exactly halved
    /// (`n -> 2n + 1`). Used for Richardson extrapolation.
    pub fn refined(&self) -> Grid1D {
        Grid1D {
            a: self.a,
            b: self.b,
            n: 2 * self.n + 1,
            bc_left: self.bc_left,
            bc_right: self.bc_right,
        }
    }
}

/// Tensor-product box grid; one [`Grid1D`] per axis.
#[derive(Clone, Debug)]
pub struct Grid3D {
    pub axes: [Grid1D; 3],
}

impl Grid3D {
    pub fn new(axes: [Grid1D; 3]) -> Self {
        Self { axes }
    }

    pub fn unknowns(&self) -> usize {
        self.axes.iter().map(Grid1D::unknowns).product()
    }
}
