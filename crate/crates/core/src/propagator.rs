//! Density-matrix and Wigner-function propagators of unitary maps.
//!
//! Two independent constructions of the Wigner propagator are provided:
//! conjugation of the density-matrix propagator by the Wigner transform,
//! `K_W = T_W K T_W^{-1}`, and a spectral sum over Wigner functions of the
//! transition operators `|alpha><beta|` between eigenstates of the map,
//!
//! `K_W(m'', m') = c sum_{alpha,beta} exp(-i (phi_alpha - phi_beta) t)
//!                 Y_{alpha beta}(m'') conj(Y_{alpha beta}(m'))`,
//!
//! with `Y_{alpha beta} = T_W |alpha><beta|`, eigenphases defined by
//! `U|alpha> = exp(-i phi_alpha)|alpha>` and `c = N`.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::ComplexGrid;
use crate::wigner::{DensityMatrix, PureState, WignerGrid, WignerPlan};

/// Largest `N` for which dense `N^2 x N^2` propagators are built by default.
pub const DEFAULT_CAPACITY: usize = 64;

const UNITARITY_TOL: f64 = 1e-10;
const EIGEN_TOL: f64 = 1e-8;

/// One step of a unitary map, `psi'(n') = sum_n U(n', n) psi(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMap {
    matrix: DMatrix<Complex64>,
}

impl UnitaryMap {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidArgument(format!(
                "unitary map must be a non-empty square matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let defect = unitarity_defect(&matrix);
        if defect > UNITARITY_TOL {
            return Err(Error::NotUnitary { defect });
        }
        Ok(Self { matrix })
    }

    pub fn from_grid(grid: &ComplexGrid) -> Result<Self> {
        Self::new(DMatrix::from_fn(grid.rows(), grid.cols(), |i, j| grid[(i, j)]))
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.matrix)
    }

    /// `U^t`
    pub fn power(&self, t: u32) -> DMatrix<Complex64> {
        let mut out = DMatrix::identity(self.n(), self.n());
        for _ in 0..t {
            out = &self.matrix * out;
        }
        out
    }

    /// `U^t rho (U^dag)^t`
    pub fn evolve(&self, rho: &DensityMatrix, t: u32) -> Result<DensityMatrix> {
        check_dim(self.n(), rho.dim())?;
        let ut = self.power(t);
        DensityMatrix::from_matrix(&(&ut * rho.to_matrix() * ut.adjoint()))
    }
}

fn unitarity_defect(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let prod = m.adjoint() * m;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((prod[(i, j)] - target).norm());
        }
    }
    worst
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Eigenphases (ascending, in `[0, 2 pi)`) and orthonormal eigenvectors of a
/// unitary map; column `alpha` of `vectors` is `|alpha>`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    phases: Vec<f64>,
    vectors: DMatrix<Complex64>,
}

impl SpectralDecomposition {
    pub fn n(&self) -> usize {
        self.phases.len()
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn vectors(&self) -> &DMatrix<Complex64> {
        &self.vectors
    }

    pub fn eigenvector(&self, alpha: usize) -> PureState {
        PureState::new(self.vectors.column(alpha).iter().copied().collect()).expect("finite eigenvector")
    }
}

/// Spectral decomposition of a unitary map via its complex Schur form.
///
/// For a normal matrix the Schur factor is diagonal, so the Schur vectors are
/// an orthonormal eigenbasis even inside degenerate eigenspaces.
pub fn eigendecompose(u: &UnitaryMap) -> Result<SpectralDecomposition> {
    let n = u.n();
    let schur = Schur::try_new(u.matrix.clone(), f64::EPSILON, 100_000).ok_or(Error::Convergence {
        residual: f64::INFINITY,
    })?;
    let (q, t) = schur.unpack();
    let mut pairs: Vec<(f64, usize)> = (0..n)
        .map(|i| {
            let mut phi = (-t[(i, i)].arg()).rem_euclid(TAU);
            if phi >= TAU {
                phi = 0.0;
            }
            (phi, i)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let phases: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| q[(r, pairs[c].1)]);

    let mut residual = 0.0f64;
    let image = u.matrix() * &vectors;
    for (c, &phi) in phases.iter().enumerate() {
        let lambda = Complex64::from_polar(1.0, -phi);
        for r in 0..n {
            residual = residual.max((image[(r, c)] - lambda * vectors[(r, c)]).norm());
        }
    }
    if residual > EIGEN_TOL {
        return Err(Error::Convergence { residual });
    }
    Ok(SpectralDecomposition { phases, vectors })
}

/// Linear map on density matrices, indexed by the row-major flattening
/// `n1 * N + n2` on both sides.
#[derive(Debug, Clone)]
pub struct DensityPropagator {
    n: usize,
    t: u32,
    matrix: DMatrix<Complex64>,
}

impl DensityPropagator {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn steps(&self) -> u32 {
        self.t
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        check_dim(self.n, rho.dim())?;
        let out = &self.matrix * flatten(rho.grid());
        DensityMatrix::new(unflatten(self.n, out.as_slice()))
    }
}

/// `K(n1'', n2''; n1', n2') = U^t(n1'', n1') conj(U^t(n2'', n2'))`.
pub fn density_propagator(u: &UnitaryMap, t: u32) -> DensityPropagator {
    let ut = u.power(t);
    DensityPropagator {
        n: u.n(),
        t,
        matrix: ut.kronecker(&ut.conjugate()),
    }
}

/// Linear map on Wigner grids, indexed by the row-major flattening
/// `lambda * N + n` on both sides.
#[derive(Debug, Clone)]
pub struct WignerPropagator {
    n: usize,
    t: u32,
    matrix: DMatrix<Complex64>,
}

impl WignerPropagator {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn steps(&self) -> u32 {
        self.t
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// `K_W(.; m')` as a grid.
    pub fn column(&self, lambda: usize, pos: usize) -> Result<WignerGrid> {
        if lambda >= self.n || pos >= self.n {
            return Err(Error::OutOfRange(format!(
                "phase-space point ({lambda}, {pos}) for N = {}",
                self.n
            )));
        }
        let col = self.matrix.column(lambda * self.n + pos);
        WignerGrid::new(unflatten(self.n, col.as_slice()))
    }

    /// `sum_{m''} K_W(m''; m')` for every `m'`.
    pub fn column_sums(&self) -> Vec<Complex64> {
        self.matrix.column_iter().map(|c| c.sum()).collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.matrix - &other.matrix)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Deviation from the identity, `max |K_W - I|`.
    pub fn identity_defect(&self) -> f64 {
        let dim = self.matrix.nrows();
        (&self.matrix - DMatrix::<Complex64>::identity(dim, dim))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// `self` applied after `first`.
    pub fn compose(&self, first: &Self) -> Result<Self> {
        check_dim(self.n, first.n)?;
        Ok(Self {
            n: self.n,
            t: self.t + first.t,
            matrix: &self.matrix * &first.matrix,
        })
    }
}

fn flatten(g: &ComplexGrid) -> nalgebra::DVector<Complex64> {
    nalgebra::DVector::from_column_slice(g.data())
}

fn unflatten(n: usize, data: &[Complex64]) -> ComplexGrid {
    ComplexGrid::from_vec(n, n, data.to_vec()).expect("propagator output must be finite")
}

fn check_capacity(n: usize, capacity: usize) -> Result<()> {
    if n > capacity {
        return Err(Error::Capacity { n, limit: capacity });
    }
    Ok(())
}

/// Matrix of `T_W` acting on row-major flattened density matrices.
fn transform_matrix(plan: &WignerPlan) -> Result<DMatrix<Complex64>> {
    let n = plan.n();
    let columns: Vec<Vec<Complex64>> = (0..n * n)
        .into_par_iter()
        .map(|j| {
            let basis = DensityMatrix::from_fn(n, |a, b| {
                if a * n + b == j {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            plan.fourier_cut(&basis).map(|w| w.into_grid().into_data())
        })
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_fn(n * n, n * n, |i, j| columns[j][i]))
}

/// Matrix of `T_W^{-1}` acting on row-major flattened Wigner grids.
fn inverse_transform_matrix(plan: &WignerPlan) -> Result<DMatrix<Complex64>> {
    let n = plan.n();
    let columns: Vec<Vec<Complex64>> = (0..n * n)
        .into_par_iter()
        .map(|j| {
            let w = WignerGrid::delta(n, j / n, j % n)?;
            plan.inverse(&w).map(|rho| rho.into_grid().into_data())
        })
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_fn(n * n, n * n, |i, j| columns[j][i]))
}

/// `K_W = T_W K T_W^{-1}` with the default capacity guard.
pub fn wigner_propagator_direct(u: &UnitaryMap, t: u32) -> Result<WignerPropagator> {
    wigner_propagator_direct_with_capacity(u, t, DEFAULT_CAPACITY)
}

pub fn wigner_propagator_direct_with_capacity(u: &UnitaryMap, t: u32, capacity: usize) -> Result<WignerPropagator> {
    let n = u.n();
    check_capacity(n, capacity)?;
    let plan = WignerPlan::new(n)?;
    let forward = transform_matrix(&plan)?;
    let backward = inverse_transform_matrix(&plan)?;
    let k = density_propagator(u, t);
    Ok(WignerPropagator {
        n,
        t,
        matrix: forward * k.matrix * backward,
    })
}

/// Wigner functions `T_W |alpha><beta|` of all transition operators, as the
/// columns `alpha * N + beta` of an `N^2 x N^2` matrix.
fn transition_matrix(plan: &WignerPlan, dec: &SpectralDecomposition) -> Result<DMatrix<Complex64>> {
    let n = plan.n();
    let vectors: Vec<PureState> = (0..n).map(|a| dec.eigenvector(a)).collect();
    let columns: Vec<Vec<Complex64>> = (0..n * n)
        .into_par_iter()
        .map(|j| {
            let op = DensityMatrix::outer(vectors[j / n].amplitudes(), vectors[j % n].amplitudes());
            plan.fourier_cut(&op).map(|w| w.into_grid().into_data())
        })
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_fn(n * n, n * n, |i, j| columns[j][i]))
}

/// Prefactor `c` of the spectral sum, fixed by requiring the `t = 0` sum to
/// be the identity: `c = N^2 / ||Y||_F^2`, which evaluates to `N`.
fn spectral_prefactor(transitions: &DMatrix<Complex64>) -> f64 {
    let dim = transitions.nrows() as f64;
    dim / transitions.norm_squared()
}

/// Spectral construction of `K_W` with the default capacity guard.
pub fn wigner_propagator_spectral(u: &UnitaryMap, t: u32) -> Result<WignerPropagator> {
    wigner_propagator_spectral_with_capacity(u, t, DEFAULT_CAPACITY)
}

pub fn wigner_propagator_spectral_with_capacity(u: &UnitaryMap, t: u32, capacity: usize) -> Result<WignerPropagator> {
    let n = u.n();
    check_capacity(n, capacity)?;
    let plan = WignerPlan::new(n)?;
    let dec = eigendecompose(u)?;
    let y = transition_matrix(&plan, &dec)?;
    let c = spectral_prefactor(&y);
    let phases = dec.phases();
    let mut weighted = y.clone();
    for (j, mut col) in weighted.column_iter_mut().enumerate() {
        let (a, b) = (j / n, j % n);
        col *= Complex64::from_polar(c, -(phases[a] - phases[b]) * t as f64);
    }
    Ok(WignerPropagator {
        n,
        t,
        matrix: weighted * y.adjoint(),
    })
}

/// `W'(m'') = sum_{m'} K_W(m''; m') W(m')`.
pub fn propagate_wigner(k: &WignerPropagator, w: &WignerGrid) -> Result<WignerGrid> {
    check_dim(k.n, w.n())?;
    let out = &k.matrix * flatten(w.grid());
    WignerGrid::new(unflatten(k.n, out.as_slice()))
}

/// Route used to extract propagator columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColumnRoute {
    /// `T_W U^t (T_W^{-1} delta_{m'}) U^{-t}`.
    Direct,
    /// Spectral sum over transition-operator Wigner functions.
    Spectral,
}

/// `K_W(.; m')` after `t` steps.
pub fn propagator_column(u: &UnitaryMap, m_prime: (usize, usize), t: u32, route: ColumnRoute) -> Result<WignerGrid> {
    Ok(propagator_columns(u, m_prime, &[t], route)?.remove(0))
}

/// `K_W(.; m')` for several step counts, without materializing `K_W`.
pub fn propagator_columns(
    u: &UnitaryMap,
    m_prime: (usize, usize),
    steps: &[u32],
    route: ColumnRoute,
) -> Result<Vec<WignerGrid>> {
    let n = u.n();
    let (lambda, pos) = m_prime;
    let delta = WignerGrid::delta(n, lambda, pos)?;
    let plan = WignerPlan::new(n)?;
    match route {
        ColumnRoute::Direct => {
            let rho0 = plan.inverse(&delta)?;
            steps.iter().map(|&t| plan.fourier_cut(&u.evolve(&rho0, t)?)).collect()
        }
        ColumnRoute::Spectral => spectral_columns(u, &plan, (lambda, pos), steps),
    }
}

fn spectral_columns(
    u: &UnitaryMap,
    plan: &WignerPlan,
    m_prime: (usize, usize),
    steps: &[u32],
) -> Result<Vec<WignerGrid>> {
    let n = u.n();
    let dec = eigendecompose(u)?;
    let vectors: Vec<PureState> = (0..n).map(|a| dec.eigenvector(a)).collect();
    let phases = dec.phases();
    let idx = m_prime.0 * n + m_prime.1;
    // Per-eigenstate partial sums are combined sequentially so that the
    // result does not depend on thread scheduling.
    let partials: Vec<(Vec<Vec<Complex64>>, f64)> = (0..n)
        .into_par_iter()
        .map(|a| -> Result<_> {
            let mut acc = vec![vec![Complex64::new(0.0, 0.0); n * n]; steps.len()];
            let mut weight = 0.0f64;
            for b in 0..n {
                let y = plan.fourier_cut(&DensityMatrix::outer(vectors[a].amplitudes(), vectors[b].amplitudes()))?;
                let y = y.grid().data();
                let anchor = y[idx].conj();
                weight += anchor.norm_sqr();
                for (out, &t) in acc.iter_mut().zip(steps) {
                    let f = Complex64::from_polar(1.0, -(phases[a] - phases[b]) * t as f64) * anchor;
                    for (o, v) in out.iter_mut().zip(y) {
                        *o += f * v;
                    }
                }
            }
            Ok((acc, weight))
        })
        .collect::<Result<_>>()?;
    let mut sums = vec![vec![Complex64::new(0.0, 0.0); n * n]; steps.len()];
    let mut weight = 0.0f64;
    for (acc, w) in partials {
        weight += w;
        for (gs, ga) in sums.iter_mut().zip(acc) {
            for (s, a) in gs.iter_mut().zip(ga) {
                *s += a;
            }
        }
    }
    // The t = 0 column is the delta at m', which fixes the prefactor.
    let c = 1.0 / weight;
    sums.into_iter()
        .map(|data| WignerGrid::new(unflatten(n, &data.into_iter().map(|z| z * c).collect::<Vec<_>>())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub(crate) fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> UnitaryMap {
        let a = DMatrix::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        UnitaryMap::new(a.qr().q()).unwrap()
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> DensityMatrix {
        let a = DMatrix::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        DensityMatrix::from_matrix(&(&a + a.adjoint())).unwrap()
    }

    fn hadamard() -> UnitaryMap {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        UnitaryMap::new(DMatrix::from_row_slice(
            2,
            2,
            &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)],
        ))
        .unwrap()
    }

    #[test]
    fn rejects_non_unitary() {
        let m = DMatrix::from_element(2, 2, c(1.0, 0.0));
        assert!(matches!(UnitaryMap::new(m), Err(Error::NotUnitary { .. })));
        assert!(UnitaryMap::new(DMatrix::<Complex64>::zeros(2, 3)).is_err());
    }

    #[test]
    fn identity_spectrum() {
        let dec = eigendecompose(&UnitaryMap::new(DMatrix::identity(3, 3)).unwrap()).unwrap();
        assert!(dec.phases().iter().all(|&p| p == 0.0));
        let v = dec.vectors();
        assert!(unitarity_defect(v) < 1e-12);
    }

    #[test]
    fn diagonal_phases() {
        let u = UnitaryMap::new(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(1.0, 0.0),
            c(0.0, 1.0),
        ])))
        .unwrap();
        let dec = eigendecompose(&u).unwrap();
        assert!(dec.phases()[0].abs() < 1e-14);
        assert!((dec.phases()[1] - 1.5 * PI).abs() < 1e-14);
    }

    #[test]
    fn hadamard_phases() {
        let dec = eigendecompose(&hadamard()).unwrap();
        assert!(dec.phases()[0].abs() < 1e-12);
        assert!((dec.phases()[1] - PI).abs() < 1e-12);
    }

    #[test]
    fn random_unitary_decomposition() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_unitary(&mut rng, 7);
        let dec = eigendecompose(&u).unwrap();
        assert!(dec.phases().windows(2).all(|w| w[0] <= w[1]));
        assert!(unitarity_defect(dec.vectors()) < 1e-8);
    }

    #[test]
    fn density_propagator_examples() {
        let k0 = density_propagator(&hadamard(), 0);
        assert_eq!(k0.matrix(), &DMatrix::identity(4, 4));

        let rho = DensityMatrix::from_fn(2, |i, j| if i == 0 && j == 0 { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let out = density_propagator(&hadamard(), 1).apply(&rho).unwrap();
        assert!(out.grid().data().iter().all(|z| (z - 0.5).norm() < 1e-15));

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = random_unitary(&mut rng, 4);
        let k1 = density_propagator(&u, 1);
        let k2 = density_propagator(&u, 2);
        assert!((&k1.matrix * &k1.matrix - &k2.matrix).iter().all(|z| z.norm() < 1e-12));
        let r = random_hermitian(&mut rng, 4);
        let ut = u.power(2);
        let expected = &ut * r.to_matrix() * ut.adjoint();
        let got = k2.apply(&r).unwrap().to_matrix();
        assert!((got - expected).iter().all(|z| z.norm() < 1e-10));
    }

    #[test]
    fn direct_route_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = random_unitary(&mut rng, 4);
        assert!(wigner_propagator_direct(&u, 0).unwrap().identity_defect() < 1e-8);
        let k = wigner_propagator_direct(&u, 1).unwrap();
        assert!(k.column_sums().iter().all(|s| (s - 1.0).norm() < 1e-8));

        let u6 = random_unitary(&mut rng, 6);
        let k6 = wigner_propagator_direct(&u6, 1).unwrap();
        let plan = WignerPlan::new(6).unwrap();
        for _ in 0..20 {
            let rho = random_hermitian(&mut rng, 6);
            let lhs = plan.fourier_cut(&u6.evolve(&rho, 1).unwrap()).unwrap();
            let rhs = propagate_wigner(&k6, &plan.fourier_cut(&rho).unwrap()).unwrap();
            assert!(lhs.max_abs_diff(&rhs) < 1e-8);
            assert!(rhs.max_abs_imag() < 1e-8);
        }
    }

    #[test]
    fn spectral_route_matches_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for n in [2usize, 3, 4, 5] {
            let u = random_unitary(&mut rng, n);
            for t in 0..=3 {
                let d = wigner_propagator_direct(&u, t).unwrap();
                let s = wigner_propagator_spectral(&u, t).unwrap();
                assert!(d.max_abs_diff(&s) < 1e-8, "N={n} t={t}");
            }
        }
        // degenerate spectrum
        let id = UnitaryMap::new(DMatrix::identity(3, 3)).unwrap();
        assert!(wigner_propagator_spectral(&id, 2).unwrap().identity_defect() < 1e-8);
    }

    #[test]
    fn spectral_prefactor_is_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=6 {
            let u = random_unitary(&mut rng, n);
            let plan = WignerPlan::new(n).unwrap();
            let y = transition_matrix(&plan, &eigendecompose(&u).unwrap()).unwrap();
            assert!((spectral_prefactor(&y) - n as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn period_recovery() {
        // eigenvalues are 5th roots of unity, so U^5 = I
        let roots: Vec<Complex64> = [0, 1, 3, 4]
            .iter()
            .map(|&k| Complex64::from_polar(1.0, TAU * k as f64 / 5.0))
            .collect();
        let u = UnitaryMap::new(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(roots))).unwrap();
        assert!(wigner_propagator_spectral(&u, 5).unwrap().identity_defect() < 1e-8);
        assert!(wigner_propagator_spectral(&u, 2).unwrap().identity_defect() > 1e-3);
    }

    #[test]
    fn capacity_guard() {
        let u = UnitaryMap::new(DMatrix::identity(5, 5)).unwrap();
        assert!(matches!(
            wigner_propagator_direct_with_capacity(&u, 1, 4),
            Err(Error::Capacity { n: 5, limit: 4 })
        ));
        assert!(matches!(
            wigner_propagator_spectral_with_capacity(&u, 1, 4),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn propagate_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let u = random_unitary(&mut rng, 4);
        let plan = WignerPlan::new(4).unwrap();
        let w = plan.fourier_cut(&random_hermitian(&mut rng, 4)).unwrap();
        let id = wigner_propagator_direct(&u, 0).unwrap();
        assert!(propagate_wigner(&id, &w).unwrap().max_abs_diff(&w) < 1e-10);
        let k = wigner_propagator_direct(&u, 3).unwrap();
        let out = propagate_wigner(&k, &w).unwrap();
        assert!((out.sum() - w.sum()).norm() < 1e-8);
        let wrong = WignerGrid::delta(3, 0, 0).unwrap();
        assert!(propagate_wigner(&k, &wrong).is_err());
    }

    #[test]
    fn columns_agree_across_routes() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = random_unitary(&mut rng, 6);
        let full = wigner_propagator_direct(&u, 2).unwrap().column(2, 5).unwrap();
        let direct = propagator_column(&u, (2, 5), 2, ColumnRoute::Direct).unwrap();
        let spectral = propagator_column(&u, (2, 5), 2, ColumnRoute::Spectral).unwrap();
        assert!(full.max_abs_diff(&direct) < 1e-8);
        assert!(full.max_abs_diff(&spectral) < 1e-8);

        let t0 = propagator_column(&u, (1, 4), 0, ColumnRoute::Spectral).unwrap();
        assert!(t0.max_abs_diff(&WignerGrid::delta(6, 1, 4).unwrap()) < 1e-8);
        assert!(propagator_column(&u, (6, 0), 1, ColumnRoute::Direct).is_err());
    }
}
