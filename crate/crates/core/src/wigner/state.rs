use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::ComplexGrid;

/// Density matrix `rho(n1, n2) = <n1|rho|n2>` on an `N`-site periodic lattice.
///
/// Any square complex matrix is accepted: the transition operators used by the
/// spectral propagator are neither Hermitian nor of unit trace. Use
/// [`DensityMatrix::check_physical`] when a genuine quantum state is expected.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexGrid);

/// Diagnostics for a candidate physical state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDiagnostics {
    /// `max |rho - rho^dag|`
    pub hermiticity_defect: f64,
    pub trace: Complex64,
    /// Smallest eigenvalue of the Hermitian part.
    pub min_eigenvalue: f64,
}

impl DensityMatrix {
    pub fn new(grid: ComplexGrid) -> Result<Self> {
        if !grid.is_square() {
            return Err(Error::InvalidArgument(format!(
                "density matrix must be square, got {}x{}",
                grid.rows(),
                grid.cols()
            )));
        }
        Ok(Self(grid))
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self(ComplexGrid::from_fn(n, n, f))
    }

    pub fn zeros(n: usize) -> Self {
        Self(ComplexGrid::zeros(n, n))
    }

    /// The maximally mixed state `I / N`.
    pub fn maximally_mixed(n: usize) -> Self {
        let w = 1.0 / n as f64;
        Self::from_fn(n, |i, j| {
            if i == j {
                Complex64::new(w, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// `|psi><psi|`
    pub fn from_pure(psi: &PureState) -> Self {
        Self::outer(psi.amplitudes(), psi.amplitudes())
    }

    /// The operator `|a><b|`, i.e. `M(n1, n2) = a(n1) conj(b(n2))`.
    pub fn outer(a: &[Complex64], b: &[Complex64]) -> Self {
        assert_eq!(a.len(), b.len(), "outer product of vectors of different length");
        Self::from_fn(a.len(), |i, j| a[i] * b[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn grid(&self) -> &ComplexGrid {
        &self.0
    }

    pub fn into_grid(self) -> ComplexGrid {
        self.0
    }

    pub fn get(&self, n1: usize, n2: usize) -> Complex64 {
        self.0[(n1, n2)]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.transpose().conj())
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.0.max_abs_diff(&self.adjoint().0)
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.get(i, j))
    }

    pub fn from_matrix(m: &DMatrix<Complex64>) -> Result<Self> {
        let (r, c) = m.shape();
        Self::new(ComplexGrid::from_fn(r, c, |i, j| m[(i, j)]))
    }

    pub fn diagnostics(&self) -> StateDiagnostics {
        let m = self.to_matrix();
        let hermitian_part = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let min_eigenvalue = hermitian_part
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        StateDiagnostics {
            hermiticity_defect: self.hermiticity_defect(),
            trace: self.trace(),
            min_eigenvalue,
        }
    }

    /// Check Hermiticity, unit trace and positivity within `tol`.
    pub fn check_physical(&self, tol: f64) -> Result<StateDiagnostics> {
        let d = self.diagnostics();
        if d.hermiticity_defect > tol {
            return Err(Error::InvalidArgument(format!(
                "density matrix is not Hermitian (defect {:e})",
                d.hermiticity_defect
            )));
        }
        if (d.trace - 1.0).norm() > tol {
            return Err(Error::InvalidArgument(format!("density matrix trace is {}", d.trace)));
        }
        if d.min_eigenvalue < -tol {
            return Err(Error::InvalidArgument(format!(
                "density matrix has negative eigenvalue {:e}",
                d.min_eigenvalue
            )));
        }
        Ok(d)
    }
}

/// State vector `psi(n)` on `N` sites.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidArgument("state vector must be non-empty".into()));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("state vector has non-finite amplitudes".into()));
        }
        Ok(Self { amplitudes })
    }

    /// Like [`PureState::new`] but rescaled to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let s = Self::new(amplitudes)?;
        let norm = s.norm();
        if norm == 0.0 {
            return Err(Error::InvalidArgument("cannot normalize the zero vector".into()));
        }
        Ok(Self {
            amplitudes: s.amplitudes.iter().map(|z| z / norm).collect(),
        })
    }

    /// Position eigenstate `|n0>`.
    pub fn basis(n: usize, n0: usize) -> Result<Self> {
        if n0 >= n {
            return Err(Error::OutOfRange(format!("basis index {n0} for dimension {n}")));
        }
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[n0] = Complex64::new(1.0, 0.0);
        Self::new(v)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    pub fn conj(&self) -> Self {
        Self {
            amplitudes: self.amplitudes.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            amplitudes: self.amplitudes.iter().map(|z| z * factor).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maximally_mixed_is_physical() {
        let d = DensityMatrix::maximally_mixed(4).check_physical(1e-12).unwrap();
        assert!((d.min_eigenvalue - 0.25).abs() < 1e-12);
    }

    #[test]
    fn non_hermitian_is_flagged() {
        let rho = DensityMatrix::from_fn(2, |i, j| Complex64::new((i + 2 * j) as f64, 0.0));
        assert!(rho.hermiticity_defect() > 0.5);
        assert!(rho.check_physical(1e-10).is_err());
    }

    #[test]
    fn rejects_non_square() {
        assert!(DensityMatrix::new(ComplexGrid::zeros(2, 3)).is_err());
    }

    #[test]
    fn normalization() {
        let psi = PureState::normalized(vec![Complex64::new(3.0, 0.0), Complex64::new(0.0, 4.0)]).unwrap();
        assert!(psi.is_normalized(1e-15));
        assert!(PureState::normalized(vec![Complex64::new(0.0, 0.0)]).is_err());
        assert!(PureState::basis(3, 3).is_err());
    }
}
