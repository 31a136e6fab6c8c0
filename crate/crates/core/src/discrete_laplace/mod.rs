//! Piecewise-linear Laplace-Beltrami operators on meshed hypersurfaces.

pub mod eigen;
pub mod io;
pub mod mesh;
pub mod operators;
pub mod shapes;
pub mod sparse;

pub use eigen::{eigen_residual, first_eigenvalue, first_eigenvalue_with, EigenOptions, EigenResult};
pub use mesh::{Cells, SurfaceMesh};
pub use operators::{build_operators, rayleigh_quotient, DiscreteOperators};
pub use shapes::{generate_shape, icosphere, ShapeFamily};
pub use sparse::CsrMatrix;
