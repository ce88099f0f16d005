//! Redundancy-removal kernels on the doubled lattice.
//!
//! Cutting a centered `N x N` block out of the doubly Fourier-transformed
//! `W_double` is equivalent to convolving `W_double` with the Fourier
//! transform of the block indicator and keeping every second point.
//! [`BoxKernel`] is the closed-form transform `s_k` of the block
//! `[-N/2, N/2 - 1]` of frequencies. [`CutKernel`] is the kernel actually used
//! by the transform: the block is made symmetric under inversion
//! `(a, b) -> (-a, -b)`, which is what keeps the Wigner function of a Hermitian
//! operator real (see the type docs for the details).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{reduce_centered, CenteredIndex};

/// The box kernel `s_k` for `k` in the centered window `[-N, N-1]`:
///
/// * `k` even: `delta_{k mod 2N}`
/// * `k` odd: `sin(pi k / 2) / (N sin(pi k / 2N)) * exp(-i pi k / 2N)`
///
/// The two-dimensional kernel is the product `S(l, n) = s_l s_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxKernel {
    n: usize,
    values: Vec<Complex64>,
}

impl BoxKernel {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("box kernel needs N >= 1".into()));
        }
        let values = CenteredIndex::range(2 * n).map(|k| box_value(n, k)).collect();
        Ok(Self { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `s_k`; `k` is first reduced into the window `[-N, N-1]`.
    pub fn value(&self, k: i64) -> Complex64 {
        let k = reduce_centered(k, 2 * self.n);
        self.values[(k + self.n as i64) as usize]
    }

    /// `S(l, n) = s_l * s_n`.
    pub fn product(&self, kl: i64, kn: i64) -> Complex64 {
        self.value(kl) * self.value(kn)
    }

    /// `(k, s_k)` pairs in ascending `k`.
    pub fn entries(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        CenteredIndex::range(2 * self.n).zip(self.values.iter().copied())
    }
}

fn box_value(n: usize, k: i64) -> Complex64 {
    let two_n = 2 * n as i64;
    if k.rem_euclid(2) == 0 {
        return if k.rem_euclid(two_n) == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    // sin(pi k / 2) is exactly +-1 for odd k.
    let numerator = if k.rem_euclid(4) == 1 { 1.0 } else { -1.0 };
    let theta = PI * k as f64 / two_n as f64;
    let magnitude = numerator / (n as f64 * theta.sin());
    Complex64::from_polar(1.0, -theta) * magnitude
}

/// The real, inversion-symmetric block kernel used by the Wigner transform.
///
/// In frequency space the block carries weight 1 on every frequency
/// `|a| < N/2` (the full symmetric block `[-(N-1)/2, (N-1)/2]` when `N` is
/// odd). For even `N` the Nyquist line `a = +-N/2` is split with complex
/// weights `(1 + i)/2` at `+N/2` and `(1 - i)/2` at `-N/2`; both aliases of a
/// Nyquist residue then fold to a unimodular factor, so the cut stays
/// invertible while the kernel stays real.
///
/// In position space, for even `N` this is `Re s_k + Im s_k` of the
/// [`BoxKernel`]; for odd `N` it is `s_k exp(i pi k / 2N)`, the same box moved
/// onto integer frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct CutKernel {
    n: usize,
    values: Vec<f64>,
}

impl CutKernel {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("cut kernel needs N >= 1".into()));
        }
        let two_n = 2 * n as i64;
        let values = CenteredIndex::range(2 * n)
            .map(|x| {
                let mut acc = 0.0;
                for a in interior_frequencies(n) {
                    acc += (PI * (a * x).rem_euclid(two_n) as f64 / n as f64).cos();
                }
                if n.is_multiple_of(2) {
                    // cos(pi x / 2) - sin(pi x / 2)
                    acc += match x.rem_euclid(4) {
                        0 => 1.0,
                        1 => -1.0,
                        2 => -1.0,
                        _ => 1.0,
                    };
                }
                acc / n as f64
            })
            .collect();
        Ok(Self { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Kernel value at `x`, reduced into `[-N, N-1]`.
    pub fn value(&self, x: i64) -> f64 {
        let x = reduce_centered(x, 2 * self.n);
        self.values[(x + self.n as i64) as usize]
    }

    /// Frequency-space weight `w_a` of the block, `a` taken modulo `2N`.
    pub fn weight(&self, a: i64) -> Complex64 {
        block_weight(self.n, a)
    }
}

/// Frequencies `a` with `|a| < N/2`.
fn interior_frequencies(n: usize) -> impl Iterator<Item = i64> {
    let half = (n as i64 - 1) / 2;
    -half..=half
}

pub(crate) fn block_weight(n: usize, a: i64) -> Complex64 {
    let two_n = 2 * n as i64;
    let a = reduce_centered(a, two_n as usize);
    if 2 * a.abs() < n as i64 {
        Complex64::new(1.0, 0.0)
    } else if n.is_multiple_of(2) && a == n as i64 / 2 {
        Complex64::new(0.5, 0.5)
    } else if n.is_multiple_of(2) && a == -(n as i64) / 2 {
        Complex64::new(0.5, -0.5)
    } else {
        Complex64::new(0.0, 0.0)
    }
}
