//! Shared numerical kernels.

pub mod diff;
pub mod fourier;
pub mod optimize;
pub mod parallel;
pub mod quadrature;
pub mod sum;

pub use diff::{central_diff_richardson, RichardsonTable};
pub use fourier::{fourier_pair, spectral_radius, upsample, Direction, FourierPlan};
pub use optimize::golden_section;
pub use parallel::{parallel_map, resolve_workers, WORKERS_ENV};
pub use quadrature::{simpson_integrate, trapezoid_integrate, QuadratureResult};
pub use sum::{compensated_sum, CompensatedSum};
