//! Sharp first-eigenvalue bounds for closed hypersurfaces in rank-1 symmetric
//! spaces, verified numerically.
//!
//! A closed hypersurface `M` with center of mass `p0` (for the mass
//! distribution `G(t) = 1/t`) satisfies
//!
//! ```text
//! lambda_1(M) <= 1/vol(M) * integral over M of lambda_1(S(r(x))),   r(x) = d(p0, x)
//! ```
//!
//! with equality exactly for geodesic spheres centred at `p0`. The crate
//! provides the pieces needed to check this on meshes:
//!
//! - [`spaces`]: model spaces, exponential/logarithm maps, normal coordinates.
//! - [`sphere_spectrum`]: closed forms for `lambda_1(S(r))` and the shape operator.
//! - [`center_of_mass`]: the weighted center of mass of a point cloud.
//! - [`discrete_laplace`]: meshes, cotangent operators, first eigenvalue.
//! - [`bound_verifier`]: the end-to-end check and refinement studies.

pub mod bound_verifier;
pub mod center_of_mass;
pub mod discrete_laplace;
pub mod error;
pub mod spaces;
pub mod sphere_spectrum;

pub use error::{Error, Result};
pub use spaces::{Field, Kind, Point, SpaceSpec};
