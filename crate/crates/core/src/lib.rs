//! Redundancy-free Wigner functions on a discrete `N x N` toroidal phase
//! space, their exact inverse, Wigner-function propagators for unitary maps
//! and the quantum baker map.
//!
//! ```
//! use torus_wigner::{wigner_transform, DensityMatrix};
//!
//! let w = wigner_transform(&DensityMatrix::maximally_mixed(4)).unwrap();
//! assert!((w.sum().re - 1.0).abs() < 1e-12);
//! ```

pub mod baker;
pub mod error;
pub mod lattice;
pub mod propagator;
pub mod wigner;

pub use num_complex::Complex64;

pub use baker::{
    baker_eigen_wigner, build_baker, classical_image, classical_step, enumerate_orbits, neighbourhood_max,
    orbit_to_pixels, point_to_pixel, scar_scan, scar_score, AxisConvention, ClassicalOrbit, OrbitPixel, PhasePoint,
    Rational, ScarReport, ScarScan,
};
pub use error::{Error, Result};
pub use lattice::{dft, dft_axis, dft_direct, reduce_centered, Axis, CenteredIndex, ComplexGrid, Direction};
pub use propagator::{
    density_propagator, eigendecompose, propagate_wigner, propagator_column, propagator_columns,
    wigner_propagator_direct, wigner_propagator_direct_with_capacity, wigner_propagator_spectral,
    wigner_propagator_spectral_with_capacity, ColumnRoute, DensityPropagator, SpectralDecomposition, UnitaryMap,
    WignerPropagator, DEFAULT_CAPACITY,
};
pub use wigner::{
    build_kernel, cross_eigen_wigner, fourier_cut_transform, to_doubled, transition_wigner, wigner_inverse,
    wigner_of_state, wigner_transform, BoxKernel, CutKernel, DensityMatrix, DoubledGrid, PureState, WignerGrid,
    WignerPlan,
};
