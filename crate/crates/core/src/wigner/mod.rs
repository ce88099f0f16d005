//! The redundancy-free discrete Wigner transform `T_W`.
//!
//! A density matrix `rho(n1, n2)` is embedded on the doubled `2N x 2N`
//! sum/difference lattice (`nu = n1 + n2`, `mu = n1 - n2`, zero on the odd
//! sublattice, periodic mod `N`) and Fourier transformed along `mu`, giving
//! the fourfold redundant `W_double`. A second Fourier transform turns the
//! redundancy into four copies, equal up to signs, of one `N x N` block.
//! Keeping a single centered block and transforming back with size `N`
//! yields `W(lambda, n)`; equivalently `W_double` is convolved with the box
//! kernel and decimated by two.
//!
//! With the normalization `c_N = (2N)^{-1/2}`:
//!
//! * `sum_m W(m) = Tr rho`,
//! * `W` is real whenever `rho` is Hermitian,
//! * `T_W` is `N^{-1/2}` times a unitary map, so `sum_m W_1 conj(W_2) =
//!   Tr(rho_2^dag rho_1) / N` and `T_W^{-1} = N T_W^dag`.

mod kernel;
mod state;
mod transform;

pub use kernel::{BoxKernel, CutKernel};
pub use state::{DensityMatrix, PureState, StateDiagnostics};
pub use transform::{
    build_kernel, cross_eigen_wigner, fourier_cut_transform, normalization, secondary_peak_ratio, to_doubled,
    transition_wigner, wigner_inverse, wigner_of_state, wigner_transform, DoubledGrid, WignerGrid, WignerPlan,
};
