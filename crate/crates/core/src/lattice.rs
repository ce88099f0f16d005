//! Complex grids, centered modular indexing and unitary discrete Fourier
//! transforms of arbitrary length.
//!
//! Every transform in the crate uses the unitary convention
//! `(F_M)_{mn} = M^{-1/2} exp(-2 pi i m n / M)` for the forward direction and
//! its adjoint for the inverse direction.

use std::f64::consts::PI;
use std::ops::Index;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Transform direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Kernel `exp(-2 pi i m n / M)`.
    Forward,
    /// Kernel `exp(+2 pi i m n / M)`.
    Inverse,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Forward => -1.0,
            Direction::Inverse => 1.0,
        }
    }
}

/// Grid axis along which a one-dimensional operation acts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    /// Transform each column, i.e. act along the row index.
    Rows,
    /// Transform each row, i.e. act along the column index.
    Cols,
}

/// Dense complex grid stored in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexGrid {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexGrid {
    /// Validating constructor: dimensions must be positive, the length must
    /// match and every entry must be finite.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!(
                "grid dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite entry at ({}, {})",
                pos / cols,
                pos % cols
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Build a grid by evaluating `f(row, col)`.
    ///
    /// Panics if a dimension is zero.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        assert!(rows > 0 && cols > 0, "grid dimensions must be positive");
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| Complex64::new(0.0, 0.0))
    }

    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> Option<Complex64> {
        (row < self.rows && col < self.cols).then(|| self.data[row * self.cols + col])
    }

    pub fn row(&self, row: usize) -> &[Complex64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn map(&self, mut f: impl FnMut(Complex64) -> Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        self.map(|z| z * factor)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn sum(&self) -> Complex64 {
        self.data.iter().sum()
    }

    /// Elementwise `a * self + b * other`.
    pub fn axpby(&self, a: Complex64, other: &Self, b: Complex64) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&x, &y)| a * x + b * y)
                .collect(),
        })
    }

    /// Largest elementwise modulus of the difference. Shapes must agree.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.data.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.data.iter().map(|z| z.re).collect()
    }

    pub(crate) fn check_same_shape(&self, other: &Self) -> Result<()> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexGrid {
    type Output = Complex64;

    fn index(&self, (row, col): (usize, usize)) -> &Complex64 {
        assert!(
            row < self.rows && col < self.cols,
            "grid index ({row}, {col}) out of bounds"
        );
        &self.data[row * self.cols + col]
    }
}

/// Canonical centered representative of `k` modulo `m`.
///
/// The canonical range is `[-floor(m/2), ceil(m/2) - 1]`: `[-m/2, m/2 - 1]`
/// for even `m` and the symmetric `[-(m-1)/2, (m-1)/2]` for odd `m`.
pub fn reduce_centered(k: i64, m: usize) -> i64 {
    assert!(m >= 1, "modulus must be positive");
    let m = m as i64;
    let low = -(m / 2);
    (k - low).rem_euclid(m) + low
}

/// An integer together with the lattice size it lives on, always held in
/// its canonical centered form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CenteredIndex {
    value: i64,
    modulus: usize,
}

impl CenteredIndex {
    pub fn new(k: i64, modulus: usize) -> Self {
        Self {
            value: reduce_centered(k, modulus),
            modulus,
        }
    }

    pub fn value(self) -> i64 {
        self.value
    }

    pub fn modulus(self) -> usize {
        self.modulus
    }

    /// Representative in `[0, modulus)`, suitable for array indexing.
    pub fn offset(self) -> usize {
        self.value.rem_euclid(self.modulus as i64) as usize
    }

    /// Iterate the canonical range in ascending order.
    pub fn range(modulus: usize) -> impl Iterator<Item = i64> {
        assert!(modulus >= 1, "modulus must be positive");
        let low = -((modulus / 2) as i64);
        low..low + modulus as i64
    }
}

/// Direct evaluation of the unitary DFT kernel sum, `O(M^2)`.
///
/// This is the reference definition; [`dft`] must agree with it.
pub fn dft_direct(v: &[Complex64], direction: Direction) -> Result<Vec<Complex64>> {
    let m = v.len();
    if m == 0 {
        return Err(Error::InvalidArgument("DFT of an empty vector".into()));
    }
    let norm = (m as f64).sqrt().recip();
    // Phases are reduced modulo M before evaluating sin/cos.
    let twiddle: Vec<Complex64> = (0..m)
        .map(|j| Complex64::from_polar(norm, direction.sign() * 2.0 * PI * j as f64 / m as f64))
        .collect();
    Ok((0..m)
        .map(|k| v.iter().enumerate().map(|(j, &x)| x * twiddle[(j * k) % m]).sum())
        .collect())
}

/// Unitary DFT of arbitrary length (fast path).
pub fn dft(v: &[Complex64], direction: Direction) -> Result<Vec<Complex64>> {
    if v.is_empty() {
        return Err(Error::InvalidArgument("DFT of an empty vector".into()));
    }
    let mut out = v.to_vec();
    Dft::new(v.len(), direction).process(&mut out);
    Ok(out)
}

/// A planned unitary transform of fixed length and direction.
#[derive(Clone)]
pub struct Dft {
    len: usize,
    plan: std::sync::Arc<dyn Fft<f64>>,
    norm: f64,
}

impl Dft {
    pub fn new(len: usize, direction: Direction) -> Self {
        assert!(len >= 1, "DFT length must be positive");
        let mut planner = FftPlanner::new();
        let plan = match direction {
            Direction::Forward => planner.plan_fft_forward(len),
            Direction::Inverse => planner.plan_fft_inverse(len),
        };
        Self {
            len,
            plan,
            norm: (len as f64).sqrt().recip(),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Transform `buf` in place; its length must be a multiple of `len`,
    /// each chunk is transformed independently.
    pub fn process(&self, buf: &mut [Complex64]) {
        self.plan.process(buf);
        for z in buf.iter_mut() {
            *z *= self.norm;
        }
    }
}

impl std::fmt::Debug for Dft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Dft").field("len", &self.len).finish()
    }
}

/// Apply the unitary DFT to every line of `g` along `axis`.
pub fn dft_axis(g: &ComplexGrid, axis: Axis, direction: Direction) -> ComplexGrid {
    match axis {
        Axis::Cols => {
            let plan = Dft::new(g.cols, direction);
            let mut data = g.data.clone();
            plan.process(&mut data);
            ComplexGrid {
                rows: g.rows,
                cols: g.cols,
                data,
            }
        }
        Axis::Rows => dft_axis(&g.transpose(), Axis::Cols, direction).transpose(),
    }
}

/// Two-dimensional unitary DFT (both axes).
pub fn dft_2d(g: &ComplexGrid, direction: Direction) -> ComplexGrid {
    dft_axis(&dft_axis(g, Axis::Cols, direction), Axis::Rows, direction)
}
