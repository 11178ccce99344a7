//! Complex scalars, dense matrices and the tolerance policy shared by every check.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type C64 = Complex64;
pub type CVector = DVector<C64>;
pub type CMatrix = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("no solution: residual {residual:e} exceeds bound {bound:e}")]
    NoSolution { residual: f64, bound: f64 },
    #[error("non-finite scalar")]
    NonFinite,
    #[error("tolerance must be positive")]
    InvalidTolerance,
}

/// Single tolerance knob threaded through every algebraic check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs_eps: f64,
    pub norm_trials: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { abs_eps: 1e-9, norm_trials: 2000 }
    }
}

impl Tolerance {
    pub fn new(abs_eps: f64) -> Result<Self, NumericsError> {
        if !(abs_eps.is_finite() && abs_eps > 0.0) {
            return Err(NumericsError::InvalidTolerance);
        }
        Ok(Tolerance { abs_eps, ..Default::default() })
    }
}

/// Finite-checked complex constructor.
pub fn complex(re: f64, im: f64) -> Result<C64, NumericsError> {
    if re.is_finite() && im.is_finite() {
        Ok(C64::new(re, im))
    } else {
        Err(NumericsError::NonFinite)
    }
}

pub fn max_abs<'a, I: IntoIterator<Item = &'a C64>>(entries: I) -> f64 {
    entries.into_iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn approx_zero<'a, I: IntoIterator<Item = &'a C64>>(entries: I, tol: &Tolerance) -> bool {
    max_abs(entries) <= tol.abs_eps
}

fn singular_threshold(sigma: &DVector<f64>, tol: &Tolerance) -> f64 {
    let smax = sigma.iter().cloned().fold(0.0, f64::max);
    tol.abs_eps * smax
}

/// Least-norm solution of `a x = b`, rejected when the residual misses `abs_eps·(1+‖b‖∞)`.
pub fn solve_linear(a: &CMatrix, b: &CVector, tol: &Tolerance) -> Result<CVector, NumericsError> {
    if a.nrows() != b.len() {
        return Err(NumericsError::DimensionMismatch { expected: a.nrows(), found: b.len() });
    }
    let cols = a.ncols();
    if cols == 0 {
        return Err(NumericsError::DimensionMismatch { expected: 1, found: 0 });
    }
    let svd = a.clone().svd(true, true);
    let thresh = singular_threshold(&svd.singular_values, tol);
    let x = if thresh == 0.0 {
        CVector::zeros(cols)
    } else {
        let u = svd.u.as_ref().expect("u requested");
        let vt = svd.v_t.as_ref().expect("v_t requested");
        let mut coeffs = u.adjoint() * b;
        for (k, s) in svd.singular_values.iter().enumerate() {
            coeffs[k] = if *s > thresh { coeffs[k] / *s } else { ZERO };
        }
        vt.adjoint() * coeffs
    };
    let residual = max_abs((a * &x - b).iter());
    let bound = tol.abs_eps * (1.0 + max_abs(b.iter()));
    if residual <= bound {
        Ok(x)
    } else {
        Err(NumericsError::NoSolution { residual, bound })
    }
}

/// Orthonormal basis of the numerical null space.
pub fn kernel_basis(a: &CMatrix, tol: &Tolerance) -> Vec<CVector> {
    kernel_with(a, |smax| tol.abs_eps * smax)
}

/// Kernel with threshold `abs_eps·max(σ_max, 1)`, robust for matrices that vanish up to rounding.
pub fn kernel_basis_floored(a: &CMatrix, tol: &Tolerance) -> Vec<CVector> {
    kernel_with(a, |smax| tol.abs_eps * smax.max(1.0))
}

fn kernel_with(a: &CMatrix, threshold: impl Fn(f64) -> f64) -> Vec<CVector> {
    let n = a.ncols();
    if n == 0 {
        return Vec::new();
    }
    // Pad short matrices so the SVD exposes a full right-singular basis.
    let padded;
    let m = if a.nrows() < n {
        padded = {
            let mut p = CMatrix::zeros(n, n);
            p.rows_mut(0, a.nrows()).copy_from(a);
            p
        };
        &padded
    } else {
        a
    };
    let svd = m.clone().svd(false, true);
    let thresh = threshold(svd.singular_values.iter().cloned().fold(0.0, f64::max));
    let vt = svd.v_t.expect("v_t requested");
    let mut out = Vec::new();
    for (k, s) in svd.singular_values.iter().enumerate() {
        if *s <= thresh {
            out.push(vt.row(k).adjoint().into_owned());
        }
    }
    out
}

/// splitmix64 finalizer used to derive independent per-trial seeds.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_scalar<R: Rng>(rng: &mut R, magnitude: f64) -> C64 {
    C64::new(rng.gen_range(-magnitude..magnitude), rng.gen_range(-magnitude..magnitude))
}

pub fn random_vector<R: Rng>(rng: &mut R, n: usize, magnitude: f64) -> CVector {
    CVector::from_fn(n, |_, _| random_scalar(rng, magnitude))
}

pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, magnitude: f64) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| random_scalar(rng, magnitude))
}

fn rayleigh_power(a: &CMatrix, start: CVector, iters: usize) -> f64 {
    let mut v = start;
    let mut best = 0.0f64;
    for _ in 0..iters {
        let nv = v.norm();
        if nv == 0.0 {
            break;
        }
        v /= C64::from(nv);
        let av = a * &v;
        let ratio = av.norm();
        let improved = ratio > best * (1.0 + 1e-15);
        best = best.max(ratio);
        v = a.adjoint() * av;
        if !improved && ratio > 0.0 {
            break;
        }
    }
    best
}

/// Lower estimate of the spectral norm: one long power iteration plus seeded restarts.
pub fn operator_norm_estimate(a: &CMatrix, trials: usize, seed: u64) -> f64 {
    let n = a.ncols();
    if n == 0 || a.nrows() == 0 {
        return 0.0;
    }
    let start = CVector::from_fn(n, |i, _| C64::new(1.0 + 0.001 * i as f64, 0.0));
    let mut best = rayleigh_power(a, start, 1000);
    for t in 0..trials {
        let mut rng = rng_from_seed(derive_seed(seed, t as u64));
        let v = random_vector(&mut rng, n, 1.0);
        best = best.max(rayleigh_power(a, v, 8));
    }
    best
}

/// Exact spectral norm by SVD (reference value for tests and small matrices).
pub fn spectral_norm(a: &CMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone().svd(false, false).singular_values.iter().cloned().fold(0.0, f64::max)
}
