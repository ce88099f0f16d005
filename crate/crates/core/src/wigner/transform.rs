use num_complex::Complex64;

use super::kernel::{block_weight, BoxKernel, CutKernel};
use super::state::{DensityMatrix, PureState};
use crate::error::{Error, Result};
use crate::lattice::{ComplexGrid, Dft, Direction};

/// The fourfold-redundant `2N x 2N` Wigner array `W_double(lambda, nu)`.
///
/// Rows are the momentum index `lambda` in `Z_2N`, columns the doubled
/// position index `nu = n1 + n2` in `Z_2N` (half-integer position steps).
#[derive(Debug, Clone, PartialEq)]
pub struct DoubledGrid(ComplexGrid);

impl DoubledGrid {
    /// Hilbert-space dimension `N` (half the side length).
    pub fn n(&self) -> usize {
        self.0.rows() / 2
    }

    pub fn grid(&self) -> &ComplexGrid {
        &self.0
    }

    pub fn into_grid(self) -> ComplexGrid {
        self.0
    }

    /// `sum_lambda |W_double(lambda, nu)|` for each `nu`.
    pub fn position_marginal_abs(&self) -> Vec<f64> {
        column_abs_sums(&self.0)
    }
}

/// The non-redundant `N x N` Wigner function `W(lambda, n)`: rows are the
/// momentum index, columns the position index.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid(ComplexGrid);

impl WignerGrid {
    pub fn new(grid: ComplexGrid) -> Result<Self> {
        if !grid.is_square() {
            return Err(Error::InvalidArgument(format!(
                "Wigner grid must be square, got {}x{}",
                grid.rows(),
                grid.cols()
            )));
        }
        Ok(Self(grid))
    }

    /// Unit weight at `(lambda, n)`, zero elsewhere.
    pub fn delta(n: usize, lambda: usize, pos: usize) -> Result<Self> {
        if lambda >= n || pos >= n {
            return Err(Error::OutOfRange(format!(
                "phase-space point ({lambda}, {pos}) for N = {n}"
            )));
        }
        Ok(Self(ComplexGrid::from_fn(n, n, |l, p| {
            if (l, p) == (lambda, pos) {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })))
    }

    pub fn n(&self) -> usize {
        self.0.rows()
    }

    pub fn grid(&self) -> &ComplexGrid {
        &self.0
    }

    pub fn into_grid(self) -> ComplexGrid {
        self.0
    }

    pub fn get(&self, lambda: usize, pos: usize) -> Complex64 {
        self.0[(lambda, pos)]
    }

    pub fn sum(&self) -> Complex64 {
        self.0.sum()
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.0.max_abs_imag()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0.max_abs_diff(&other.0)
    }

    /// `sum_lambda |W(lambda, n)|` for each position `n`.
    pub fn position_marginal_abs(&self) -> Vec<f64> {
        column_abs_sums(&self.0)
    }

    /// `sum_lambda W(lambda, n)`, the position distribution.
    pub fn position_marginal(&self) -> Vec<Complex64> {
        (0..self.n())
            .map(|p| (0..self.n()).map(|l| self.get(l, p)).sum())
            .collect()
    }

    /// `sum_n W(lambda, n)`, the momentum distribution.
    pub fn momentum_marginal(&self) -> Vec<Complex64> {
        (0..self.n()).map(|l| self.0.row(l).iter().sum()).collect()
    }
}

fn column_abs_sums(g: &ComplexGrid) -> Vec<f64> {
    (0..g.cols())
        .map(|c| (0..g.rows()).map(|r| g[(r, c)].norm()).sum())
        .collect()
}

/// Largest entry other than the global maximum, relative to the maximum.
///
/// Used as a ghost-image statistic on position marginals: a replica of the
/// main peak shows up as a ratio close to one.
pub fn secondary_peak_ratio(marginal: &[f64]) -> f64 {
    let Some((imax, &max)) = marginal.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)) else {
        return 0.0;
    };
    if max <= 0.0 {
        return 0.0;
    }
    marginal
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != imax)
        .map(|(_, &v)| v)
        .fold(0.0, f64::max)
        / max
}

/// Global scale `c_N = (2N)^{-1/2}` applied after the block cut so that
/// `sum_m W(m) = Tr rho`.
pub fn normalization(n: usize) -> f64 {
    (2.0 * n as f64).sqrt().recip()
}

/// Precomputed state for the Wigner transform at a fixed dimension `N`:
/// the cut kernel, the fold factors of the block cut and FFT plans. Immutable
/// and shareable across threads.
#[derive(Debug, Clone)]
pub struct WignerPlan {
    n: usize,
    kernel: CutKernel,
    // phi(r, s): factor by which the block cut multiplies the reference
    // coefficient G^(r, s), r, s in [0, N).
    fold: Vec<Complex64>,
    fwd_2n: Dft,
    inv_2n: Dft,
    fwd_n: Dft,
    inv_n: Dft,
}

impl WignerPlan {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("Wigner transform needs N >= 1".into()));
        }
        let kernel = CutKernel::new(n)?;
        let ni = n as i64;
        let mut fold = Vec::with_capacity(n * n);
        for r in 0..ni {
            for s in 0..ni {
                let mut phi = Complex64::new(0.0, 0.0);
                for (i, j) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                    let sign = redundancy_sign(n, r, s, i, j);
                    phi += block_weight(n, r + i * ni) * block_weight(n, s + j * ni) * sign;
                }
                fold.push(phi);
            }
        }
        let min_weight = fold.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
        if min_weight < 1e-12 {
            return Err(Error::Singular { n, min_weight });
        }
        Ok(Self {
            n,
            kernel,
            fold,
            fwd_2n: Dft::new(2 * n, Direction::Forward),
            inv_2n: Dft::new(2 * n, Direction::Inverse),
            fwd_n: Dft::new(n, Direction::Forward),
            inv_n: Dft::new(n, Direction::Inverse),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kernel(&self) -> &CutKernel {
        &self.kernel
    }

    /// Smallest and largest modulus of the fold factors. The transform is
    /// `N^{-1/2}` times a unitary map exactly when both equal one.
    pub fn conditioning(&self) -> (f64, f64) {
        self.fold
            .iter()
            .map(|z| z.norm())
            .fold((f64::INFINITY, 0.0), |(lo, hi), v| (lo.min(v), hi.max(v)))
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found,
            });
        }
        Ok(())
    }

    /// Sum/difference embedding followed by a size-`2N` DFT along the
    /// difference coordinate.
    pub fn doubled(&self, rho: &DensityMatrix) -> Result<DoubledGrid> {
        self.check_dim(rho.dim())?;
        let n = self.n;
        let m = 2 * n;
        // C(nu, mu), rows nu, cols mu; zero on the odd sublattice.
        let mut c = vec![Complex64::new(0.0, 0.0); m * m];
        for nu in 0..m {
            for mu in 0..m {
                if (nu + mu) % 2 == 0 {
                    let n1 = ((nu + mu) / 2) % n;
                    let n2 = ((nu + 2 * m - mu) / 2) % n;
                    c[nu * m + mu] = rho.get(n1, n2);
                }
            }
        }
        self.fwd_2n.process(&mut c);
        // c now holds D(nu, lambda); store as W_double(lambda, nu).
        let d = ComplexGrid::from_vec(m, m, c)?;
        Ok(DoubledGrid(d.transpose()))
    }

    /// Direct evaluation of the decimated convolution
    /// `W(m) = c_N sum_{m'} W_double(2m - m') K(m')` with the product kernel
    /// `K(l, n) = k_l k_n`, `m'` over `[-N, N-1]^2`.
    pub fn convolve(&self, rho: &DensityMatrix) -> Result<WignerGrid> {
        let g = self.doubled(rho)?.0;
        Ok(WignerGrid(
            self.convolve_doubled(&g)
                .scale(Complex64::new(normalization(self.n), 0.0)),
        ))
    }

    fn convolve_doubled(&self, g: &ComplexGrid) -> ComplexGrid {
        let n = self.n as i64;
        let m = 2 * n;
        let taps: Vec<(i64, f64)> = (-n..n)
            .map(|x| (x, self.kernel.value(x)))
            .filter(|&(_, k)| k != 0.0)
            .collect();
        // Separable: first along the position axis, then along momentum.
        let partial = ComplexGrid::from_fn(m as usize, n as usize, |ld, p| {
            taps.iter()
                .map(|&(x, k)| g[(ld, (2 * p as i64 - x).rem_euclid(m) as usize)] * k)
                .sum()
        });
        ComplexGrid::from_fn(n as usize, n as usize, |l, p| {
            taps.iter()
                .map(|&(x, k)| partial[((2 * l as i64 - x).rem_euclid(m) as usize, p)] * k)
                .sum()
        })
    }

    /// Fourier route: 2D transform of `W_double`, multiplication by the
    /// centered block, folding of the four aliases and a size-`N` inverse
    /// transform.
    pub fn fourier_cut(&self, rho: &DensityMatrix) -> Result<WignerGrid> {
        let g = self.doubled(rho)?.into_grid();
        Ok(self.cut_doubled(g))
    }

    fn cut_doubled(&self, g: ComplexGrid) -> WignerGrid {
        let n = self.n;
        let m = 2 * n;
        let spectrum = self.dft2(g.into_data(), m, &self.fwd_2n);
        let mut folded = vec![Complex64::new(0.0, 0.0); n * n];
        for a in 0..m {
            let wa = block_weight(n, a as i64);
            if wa == Complex64::new(0.0, 0.0) {
                continue;
            }
            for b in 0..m {
                let wb = block_weight(n, b as i64);
                folded[(a % n) * n + b % n] += spectrum[a * m + b] * wa * wb;
            }
        }
        let w = self.dft2(folded, n, &self.inv_n);
        let scale = (2.0 / n as f64).sqrt();
        let grid =
            ComplexGrid::from_vec(n, n, w.into_iter().map(|z| z * scale).collect()).expect("finite transform output");
        WignerGrid(grid)
    }

    /// Exact inverse of the transform.
    ///
    /// Undoes each linear step: the size-`N` transform and the fold factors
    /// recover one alias of every doubled-lattice coefficient, the sign
    /// pattern of the fourfold repetition restores the other three, and the
    /// inverse doubled-lattice transforms give back the embedded matrix.
    pub fn inverse(&self, w: &WignerGrid) -> Result<DensityMatrix> {
        self.check_dim(w.n())?;
        let n = self.n;
        let m = 2 * n;
        let scale = (n as f64 / 2.0).sqrt();
        let folded = self.dft2(w.grid().data().to_vec(), n, &self.fwd_n);
        let mut spectrum = vec![Complex64::new(0.0, 0.0); m * m];
        for a in 0..m {
            for b in 0..m {
                let (r, s) = (a % n, b % n);
                let reference = folded[r * n + s] * scale / self.fold[r * n + s];
                let sign = redundancy_sign(n, r as i64, s as i64, (a / n) as i64, (b / n) as i64);
                spectrum[a * m + b] = reference * sign;
            }
        }
        let g = self.dft2(spectrum, m, &self.inv_2n);
        // g is W_double(lambda, nu); transpose to rows nu and undo the
        // difference-axis transform.
        let mut c = ComplexGrid::from_vec(m, m, g)?.transpose().into_data();
        self.inv_2n.process(&mut c);
        Ok(DensityMatrix::from_fn(n, |n1, n2| {
            let nu = (n1 + n2) % m;
            let mu = (n1 + m - n2) % m;
            c[nu * m + mu]
        }))
    }

    /// 2D unitary transform of a square `len x len` row-major buffer.
    fn dft2(&self, mut data: Vec<Complex64>, len: usize, plan: &Dft) -> Vec<Complex64> {
        plan.process(&mut data);
        let mut t = transpose_square(&data, len);
        plan.process(&mut t);
        transpose_square(&t, len)
    }
}

fn transpose_square(data: &[Complex64], len: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
    for r in 0..len {
        for c in 0..len {
            out[c * len + r] = data[r * len + c];
        }
    }
    out
}

/// Sign relating the doubled-lattice Fourier coefficient at
/// `(r + i N, s + j N)` to the one at `(r, s)`:
/// `G(a + N, b) = (-1)^b G(a, b)` and `G(a, b + N) = (-1)^a G(a, b)`.
fn redundancy_sign(n: usize, r: i64, s: i64, i: i64, j: i64) -> f64 {
    let exponent = match (i, j) {
        (0, 0) => 0,
        (1, 0) => s,
        (0, 1) => r,
        _ => r + s + n as i64,
    };
    if exponent.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// The redundancy-removal box kernel of the given dimension.
pub fn build_kernel(n: usize) -> Result<BoxKernel> {
    BoxKernel::new(n)
}

/// `W_double` of a density matrix.
pub fn to_doubled(rho: &DensityMatrix) -> Result<DoubledGrid> {
    WignerPlan::new(rho.dim())?.doubled(rho)
}

/// The Wigner transform `T_W` by direct decimated convolution.
pub fn wigner_transform(rho: &DensityMatrix) -> Result<WignerGrid> {
    WignerPlan::new(rho.dim())?.convolve(rho)
}

/// The Wigner transform `T_W` by the Fourier block cut; agrees with
/// [`wigner_transform`] to rounding and scales as `O(N^2 log N)`.
pub fn fourier_cut_transform(rho: &DensityMatrix) -> Result<WignerGrid> {
    WignerPlan::new(rho.dim())?.fourier_cut(rho)
}

/// `T_W^{-1}`.
pub fn wigner_inverse(w: &WignerGrid) -> Result<DensityMatrix> {
    WignerPlan::new(w.n())?.inverse(w)
}

/// Wigner function of `|psi><psi|`.
pub fn wigner_of_state(psi: &PureState) -> Result<WignerGrid> {
    WignerPlan::new(psi.dim())?.fourier_cut(&DensityMatrix::from_pure(psi))
}

/// `T_W` applied to `M(n1, n2) = conj(a(n1)) b(n2)`.
pub fn cross_eigen_wigner(a: &PureState, b: &PureState) -> Result<WignerGrid> {
    check_same_dim(a, b)?;
    WignerPlan::new(a.dim())?.fourier_cut(&DensityMatrix::outer(a.conj().amplitudes(), b.conj().amplitudes()))
}

/// `T_W` applied to the transition operator `|a><b|`.
pub fn transition_wigner(a: &PureState, b: &PureState) -> Result<WignerGrid> {
    check_same_dim(a, b)?;
    WignerPlan::new(a.dim())?.fourier_cut(&DensityMatrix::outer(a.amplitudes(), b.amplitudes()))
}

fn check_same_dim(a: &PureState, b: &PureState) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}
