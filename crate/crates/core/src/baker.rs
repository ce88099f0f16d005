//! Quantum and classical baker's map, periodic orbits and scar scoring.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::propagator::{eigendecompose, SpectralDecomposition, UnitaryMap};
use crate::wigner::{PureState, WignerGrid, WignerPlan};

pub type Rational = Ratio<i64>;

const MAX_PERIOD: usize = 20;

/// Unitary DFT matrix with entries `M^{-1/2} exp(-2 pi i m n / M)`.
fn fourier_matrix(m: usize) -> DMatrix<Complex64> {
    let scale = 1.0 / (m as f64).sqrt();
    DMatrix::from_fn(m, m, |r, c| {
        let k = (r * c) % m;
        Complex64::from_polar(scale, -std::f64::consts::TAU * k as f64 / m as f64)
    })
}

/// Quantum baker's map `B_N = F_N^{-1} diag(F_{N/2}, F_{N/2})` for even `N >= 2`.
pub fn build_baker(n: usize) -> Result<UnitaryMap> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "baker map needs an even N >= 2, got {n}"
        )));
    }
    let h = n / 2;
    let fh = fourier_matrix(h);
    let mut block = DMatrix::<Complex64>::zeros(n, n);
    block.view_mut((0, 0), (h, h)).copy_from(&fh);
    block.view_mut((h, h), (h, h)).copy_from(&fh);
    let finv = fourier_matrix(n).adjoint();
    UnitaryMap::new(finv * block)
}

/// Point of the unit torus with exact rational coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PhasePoint {
    #[serde(serialize_with = "ratio_str")]
    pub q: Rational,
    #[serde(serialize_with = "ratio_str")]
    pub p: Rational,
}

fn ratio_str<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

impl PhasePoint {
    pub fn new(q: Rational, p: Rational) -> Self {
        Self { q, p }
    }

    pub fn to_f64(self) -> (f64, f64) {
        (self.q.to_f64().unwrap_or(f64::NAN), self.p.to_f64().unwrap_or(f64::NAN))
    }
}

impl fmt::Display for PhasePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.q, self.p)
    }
}

fn in_unit(x: Rational) -> bool {
    x >= Rational::zero() && x < Rational::one()
}

/// One step of the classical baker's map, `(2q mod 1, (p + floor(2q)) / 2)`.
pub fn classical_step(point: PhasePoint) -> Result<PhasePoint> {
    if !in_unit(point.q) || !in_unit(point.p) {
        return Err(Error::OutOfRange(format!("{point} is outside [0, 1)^2")));
    }
    let two = Rational::from_integer(2);
    let doubled = point.q * two;
    let bit = doubled.floor();
    Ok(PhasePoint::new(doubled - bit, (point.p + bit) / two))
}

/// Classical image after `t` steps.
pub fn classical_image(point: PhasePoint, t: u32) -> Result<PhasePoint> {
    (0..t).try_fold(point, |x, _| classical_step(x))
}

/// Periodic orbit listed in iteration order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassicalOrbit {
    pub period: usize,
    pub points: Vec<PhasePoint>,
}

fn rotate_left(w: u64, k: usize) -> u64 {
    let mask = (1u64 << k) - 1;
    ((w << 1) | (w >> (k - 1))) & mask
}

fn reverse_bits(w: u64, k: usize) -> u64 {
    (0..k).fold(0, |acc, i| (acc << 1) | ((w >> i) & 1))
}

/// Whether `w` (as a `k`-bit word) is the strictly smallest of its rotations,
/// i.e. a Lyndon word.
fn is_lyndon(w: u64, k: usize) -> bool {
    let mut r = w;
    for _ in 1..k {
        r = rotate_left(r, k);
        if r <= w {
            return false;
        }
    }
    true
}

/// All primitive periodic orbits of exact period `k`, `1 <= k <= 20`, one per
/// binary Lyndon word, excluding the word of all ones (which lands on `q = 1`).
///
/// Every orbit is checked by exact iteration before it is returned.
pub fn enumerate_orbits(k: usize) -> Result<Vec<ClassicalOrbit>> {
    if k == 0 || k > MAX_PERIOD {
        return Err(Error::InvalidArgument(format!(
            "period must be in 1..={MAX_PERIOD}, got {k}"
        )));
    }
    let denom = (1i64 << k) - 1;
    let all_ones = (1u64 << k) - 1;
    let mut orbits = Vec::new();
    for w in 0..all_ones {
        if !is_lyndon(w, k) {
            continue;
        }
        let start = PhasePoint::new(
            Rational::new(w as i64, denom.max(1)),
            Rational::new(reverse_bits(w, k) as i64, denom.max(1)),
        );
        let mut points = Vec::with_capacity(k);
        let mut x = start;
        for _ in 0..k {
            points.push(x);
            x = classical_step(x)?;
        }
        if x != start {
            return Err(Error::Convergence { residual: f64::NAN });
        }
        orbits.push(ClassicalOrbit { period: k, points });
    }
    Ok(orbits)
}

/// Mapping between `(q, p)` and grid indices `(lambda, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisConvention {
    /// `lambda` from `p`, `n` from `q`.
    #[default]
    Pq,
    /// `lambda` from `q`, `n` from `p`.
    Qp,
}

impl FromStr for AxisConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pq" => Ok(Self::Pq),
            "qp" => Ok(Self::Qp),
            other => Err(Error::InvalidArgument(format!("unknown axis convention '{other}'"))),
        }
    }
}

impl fmt::Display for AxisConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pq => "pq",
            Self::Qp => "qp",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct OrbitPixel {
    pub lambda: usize,
    pub n: usize,
    pub radius: usize,
}

fn to_index(x: Rational, n: usize) -> usize {
    let v = (x * Rational::from_integer(n as i64)).round().to_integer();
    v.rem_euclid(n as i64) as usize
}

/// Grid pixel of a single torus point.
pub fn point_to_pixel(point: PhasePoint, n: usize, convention: AxisConvention) -> OrbitPixel {
    let (qi, pi) = (to_index(point.q, n), to_index(point.p, n));
    let (lambda, n) = match convention {
        AxisConvention::Pq => (pi, qi),
        AxisConvention::Qp => (qi, pi),
    };
    OrbitPixel { lambda, n, radius: 1 }
}

/// Grid pixels of an orbit, `round(x N) mod N` per coordinate.
pub fn orbit_to_pixels(orbit: &ClassicalOrbit, n: usize, convention: AxisConvention) -> Result<Vec<OrbitPixel>> {
    if n == 0 {
        return Err(Error::InvalidArgument("grid size must be positive".into()));
    }
    Ok(orbit.points.iter().map(|&x| point_to_pixel(x, n, convention)).collect())
}

/// Largest real part within a periodic `(2r+1)^2` neighbourhood.
pub fn neighbourhood_max(w: &WignerGrid, pixel: OrbitPixel) -> f64 {
    let n = w.n() as i64;
    let r = pixel.radius as i64;
    let mut best = f64::NEG_INFINITY;
    for dl in -r..=r {
        for dn in -r..=r {
            let l = (pixel.lambda as i64 + dl).rem_euclid(n) as usize;
            let m = (pixel.n as i64 + dn).rem_euclid(n) as usize;
            best = best.max(w.get(l, m).re);
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScarReport {
    pub pixels: Vec<OrbitPixel>,
    pub values: Vec<f64>,
    pub grid_mean: f64,
    pub grid_std: f64,
    pub score: f64,
}

/// Standardized orbit overlap: mean neighbourhood maximum of `Re W` over the
/// pixels, minus the grid mean, over the grid's population standard deviation.
pub fn scar_score(w: &WignerGrid, pixels: &[OrbitPixel]) -> Result<ScarReport> {
    if pixels.is_empty() {
        return Err(Error::InvalidArgument("no orbit pixels".into()));
    }
    let n = w.n();
    if let Some(p) = pixels.iter().find(|p| p.lambda >= n || p.n >= n) {
        return Err(Error::OutOfRange(format!("pixel ({}, {}) for N = {n}", p.lambda, p.n)));
    }
    let re = w.grid().real_parts();
    let count = re.len() as f64;
    let grid_mean = re.iter().sum::<f64>() / count;
    let grid_std = (re.iter().map(|x| (x - grid_mean).powi(2)).sum::<f64>() / count).sqrt();
    let values: Vec<f64> = pixels.iter().map(|&p| neighbourhood_max(w, p)).collect();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let score = if grid_std > 0.0 {
        (mean - grid_mean) / grid_std
    } else {
        0.0
    };
    Ok(ScarReport {
        pixels: pixels.to_vec(),
        values,
        grid_mean,
        grid_std,
        score,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScarScan {
    /// Best score over the candidate orbits, per grid.
    pub scores: Vec<f64>,
    /// Index of the orbit attaining each score.
    pub best_orbit: Vec<usize>,
    /// Grid indices sorted by descending score.
    pub ranking: Vec<usize>,
    pub median: f64,
    /// Sample standard deviation of `scores`.
    pub std: f64,
    pub max_score: f64,
    /// `(max_score - median) / std`, zero when `std` vanishes.
    pub z_max: f64,
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Scores every grid against every orbit.
pub fn scar_scan(grids: &[WignerGrid], orbits: &[ClassicalOrbit], convention: AxisConvention) -> Result<ScarScan> {
    if grids.is_empty() || orbits.is_empty() {
        return Err(Error::InvalidArgument(
            "scar scan needs at least one grid and one orbit".into(),
        ));
    }
    let per_grid: Vec<(f64, usize)> = grids
        .par_iter()
        .map(|w| -> Result<(f64, usize)> {
            let mut best = (f64::NEG_INFINITY, 0);
            for (i, orbit) in orbits.iter().enumerate() {
                let s = scar_score(w, &orbit_to_pixels(orbit, w.n(), convention)?)?.score;
                if s > best.0 {
                    best = (s, i);
                }
            }
            Ok(best)
        })
        .collect::<Result<_>>()?;
    let scores: Vec<f64> = per_grid.iter().map(|x| x.0).collect();
    let best_orbit = per_grid.iter().map(|x| x.1).collect();
    let mut ranking: Vec<usize> = (0..scores.len()).collect();
    ranking.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let med = median(&scores);
    let len = scores.len() as f64;
    let mean = scores.iter().sum::<f64>() / len;
    let std = if scores.len() > 1 {
        (scores.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (len - 1.0)).sqrt()
    } else {
        0.0
    };
    let max_score = scores[ranking[0]];
    let z_max = if std > 0.0 { (max_score - med) / std } else { 0.0 };
    Ok(ScarScan {
        scores,
        best_orbit,
        ranking,
        median: med,
        std,
        max_score,
        z_max,
    })
}

/// Eigendecomposition of the quantum baker's map together with the Wigner
/// function of every eigenstate.
pub fn baker_eigen_wigner(n: usize) -> Result<(SpectralDecomposition, Vec<WignerGrid>)> {
    let u = build_baker(n)?;
    let dec = eigendecompose(&u)?;
    let plan = WignerPlan::new(n)?;
    let states: Vec<PureState> = (0..n).map(|a| dec.eigenvector(a)).collect();
    let grids = states
        .par_iter()
        .map(|s| plan.fourier_cut(&crate::wigner::DensityMatrix::from_pure(s)))
        .collect::<Result<Vec<_>>>()?;
    Ok((dec, grids))
}
