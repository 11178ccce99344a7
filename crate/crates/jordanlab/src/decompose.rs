//! Associating maps and traces, their standard forms, and the
//! decomposition `Φ = z₀∘J + β` of operator-commutativity preservers.

use crate::algebra::{homomorphism_residual, star_map_residual, JordanAlgebra};
use crate::json;
use crate::kit::ElementaryKit;
use crate::numerics::{derive_seed, max_abs, random_scalar, random_vector, rng_from_seed, CMatrix, CVector, Tolerance, C64, ZERO};
use crate::report::Record;
use serde::{Deserialize, Serialize};
use std::ops::Range;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecomposeError {
    #[error("input is not associating (residual {0:.3e})")]
    NotAssociating(f64),
    #[error("map is not bijective")]
    NotBijective,
    #[error("{what}: residual {residual:.3e} exceeds tolerance")]
    ResidualExceeded { what: String, residual: f64 },
    #[error("recovered J is not a bijective Jordan homomorphism (residual {0:.3e})")]
    JNotMultiplicative(f64),
    #[error("recovered lambda is not invertible")]
    LambdaNotInvertible,
    #[error("kit missing: {0}")]
    KitMissing(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

impl DecomposeError {
    pub fn kind(&self) -> &'static str {
        match self {
            DecomposeError::NotAssociating(_) => "NotAssociating",
            DecomposeError::NotBijective => "NotBijective",
            DecomposeError::ResidualExceeded { .. } => "ResidualExceeded",
            DecomposeError::JNotMultiplicative(_) => "JNotMultiplicative",
            DecomposeError::LambdaNotInvertible => "LambdaNotInvertible",
            DecomposeError::KitMissing(_) => "KitMissing",
            DecomposeError::DimensionMismatch(_) => "DimensionMismatch",
        }
    }
}

// ---------------------------------------------------------------- bilinear maps

/// Bilinear map stored by its values `B(b_i, b_j)` on basis pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearMap {
    pub algebra: String,
    pub dim: usize,
    values: Vec<CVector>,
}

impl BilinearMap {
    pub fn from_fn(algebra: &str, dim: usize, mut f: impl FnMut(usize, usize) -> CVector) -> Self {
        let mut values = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let v = f(i, j);
                assert_eq!(v.len(), dim);
                values.push(v);
            }
        }
        BilinearMap { algebra: algebra.to_string(), dim, values }
    }

    /// Builds a symmetric map from its values on `i ≤ j`.
    pub fn symmetric_from_fn(algebra: &str, dim: usize, mut f: impl FnMut(usize, usize) -> CVector) -> Self {
        let mut values = vec![CVector::zeros(dim); dim * dim];
        for i in 0..dim {
            for j in i..dim {
                let v = f(i, j);
                assert_eq!(v.len(), dim);
                values[j * dim + i] = v.clone();
                values[i * dim + j] = v;
            }
        }
        BilinearMap { algebra: algebra.to_string(), dim, values }
    }

    /// `B(x, y) = x∘y`.
    pub fn jordan_product(alg: &JordanAlgebra) -> Self {
        Self::symmetric_from_fn(alg.name(), alg.dim(), |i, j| {
            let mut v = alg.zero();
            for &(k, c) in alg.structure(i, j) {
                v[k] += c;
            }
            v
        })
    }

    pub fn get(&self, i: usize, j: usize) -> &CVector {
        &self.values[i * self.dim + j]
    }

    pub fn eval(&self, x: &CVector, y: &CVector) -> CVector {
        let mut out = CVector::zeros(self.dim);
        for i in 0..self.dim {
            if x[i] == ZERO {
                continue;
            }
            for j in 0..self.dim {
                if y[j] != ZERO {
                    out += self.get(i, j) * (x[i] * y[j]);
                }
            }
        }
        out
    }

    /// Matrix of `y ↦ B(w, y)`.
    pub fn partial(&self, w: &CVector) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for j in 0..self.dim {
            let mut col = CVector::zeros(self.dim);
            for i in 0..self.dim {
                if w[i] != ZERO {
                    col += self.get(i, j) * w[i];
                }
            }
            m.set_column(j, &col);
        }
        m
    }

    pub fn symmetry_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                worst = worst.max(max_abs((self.get(i, j) - self.get(j, i)).iter()));
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &BilinearMap) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| max_abs((a - b).iter())).fold(0.0, f64::max)
    }

    pub fn map_values(&self, mut f: impl FnMut(usize, usize, &CVector) -> CVector) -> Self {
        Self::from_fn(&self.algebra, self.dim, |i, j| f(i, j, self.get(i, j)))
    }
}

#[derive(Serialize, Deserialize)]
struct BilinearJson {
    algebra: String,
    dim: usize,
    tensor: Vec<(usize, usize, usize, f64, f64)>,
}

impl Serialize for BilinearMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut tensor = Vec::new();
        for i in 0..self.dim {
            for j in 0..self.dim {
                for (k, c) in self.get(i, j).iter().enumerate() {
                    if *c != ZERO {
                        tensor.push((i, j, k, c.re, c.im));
                    }
                }
            }
        }
        BilinearJson { algebra: self.algebra.clone(), dim: self.dim, tensor }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BilinearMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let j = BilinearJson::deserialize(d)?;
        let mut values = vec![CVector::zeros(j.dim); j.dim * j.dim];
        for (a, b, k, re, im) in j.tensor {
            if a >= j.dim || b >= j.dim || k >= j.dim {
                return Err(D::Error::custom("tensor index out of range"));
            }
            values[a * j.dim + b][k] += crate::numerics::complex(re, im).map_err(D::Error::custom)?;
        }
        Ok(BilinearMap { algebra: j.algebra, dim: j.dim, values })
    }
}

// ---------------------------------------------------------------- associator blocks

struct Blocks {
    ranges: Vec<Range<usize>>,
    of: Vec<usize>,
}

fn blocks(alg: &JordanAlgebra) -> Blocks {
    let ranges: Vec<Range<usize>> = alg.summands().iter().map(|s| s.range()).collect();
    let mut of = vec![0; alg.dim()];
    for (b, r) in ranges.iter().enumerate() {
        for i in r.clone() {
            of[i] = b;
        }
    }
    Blocks { ranges, of }
}

/// `M_w` restricted to one summand.
fn block_mult(alg: &JordanAlgebra, w: &CVector, r: &Range<usize>) -> CMatrix {
    let mut m = CMatrix::zeros(r.len(), r.len());
    for l in r.clone() {
        if w[l] == ZERO {
            continue;
        }
        for &(row, col, v) in &alg.basis_op(l).entries {
            m[(row - r.start, col - r.start)] += w[l] * v;
        }
    }
    m
}

/// Matrix of `a ↦ [w, a, b_j]` on the summand of `b_j`, given `M_w` there.
fn assoc_with_basis(alg: &JordanAlgebra, mw: &CMatrix, j: usize, start: usize) -> CMatrix {
    let d = mw.nrows();
    let mut out = CMatrix::zeros(d, d);
    for &(r, c, v) in &alg.basis_op(j).entries {
        let (r, c) = (r - start, c - start);
        for k in 0..d {
            out[(r, k)] += v * mw[(c, k)];
            out[(k, c)] -= v * mw[(k, r)];
        }
    }
    out
}

fn check_square(alg: &JordanAlgebra, t: &CMatrix) -> Result<(), DecomposeError> {
    if t.nrows() != alg.dim() || t.ncols() != alg.dim() {
        return Err(DecomposeError::DimensionMismatch(format!("operator is {}x{}, algebra has dimension {}", t.nrows(), t.ncols(), alg.dim())));
    }
    Ok(())
}

/// Worst entry of `[T(b_i), b_k, b_j] + [T(b_j), b_k, b_i]` over basis triples.
pub fn linear_associating_residual(alg: &JordanAlgebra, t: &CMatrix) -> f64 {
    let bl = blocks(alg);
    let n = alg.dim();
    let images: Vec<Vec<CMatrix>> = (0..n)
        .map(|i| {
            let ti = t.column(i).into_owned();
            bl.ranges.iter().map(|r| block_mult(alg, &ti, r)).collect()
        })
        .collect();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let (bi, bj) = (bl.of[i], bl.of[j]);
            let a1 = assoc_with_basis(alg, &images[i][bj], j, bl.ranges[bj].start);
            let a2 = assoc_with_basis(alg, &images[j][bi], i, bl.ranges[bi].start);
            worst = if bi == bj { worst.max(max_abs((a1 + a2).iter())) } else { worst.max(max_abs(a1.iter())).max(max_abs(a2.iter())) };
        }
    }
    worst
}

pub fn is_associating_linear(alg: &JordanAlgebra, t: &CMatrix, tol: &Tolerance) -> bool {
    linear_associating_residual(alg, t) <= tol.abs_eps
}

fn pair_blocks(alg: &JordanAlgebra, bl: &Blocks, b: &BilinearMap) -> Vec<Vec<CMatrix>> {
    let n = alg.dim();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            if j < i {
                out.push(Vec::new());
            } else {
                out.push(bl.ranges.iter().map(|r| block_mult(alg, b.get(i, j), r)).collect());
            }
        }
    }
    out
}

/// Worst entry of `[B(y,z),a,x] + [B(x,z),a,y] + [B(x,y),a,z]` over basis triples and middle slots.
pub fn trace_associating_residual(alg: &JordanAlgebra, b: &BilinearMap) -> f64 {
    let n = alg.dim();
    let bl = blocks(alg);
    let mw = pair_blocks(alg, &bl, b);
    let at = |p: usize, q: usize| &mw[p.min(q) * n + p.max(q)];
    let mut worst = 0.0f64;
    let mut acc: Vec<Option<CMatrix>> = vec![None; bl.ranges.len()];
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                for slot in acc.iter_mut() {
                    *slot = None;
                }
                for (x, (p, q)) in [(i, (j, k)), (j, (i, k)), (k, (i, j))] {
                    let bx = bl.of[x];
                    let term = assoc_with_basis(alg, &at(p, q)[bx], x, bl.ranges[bx].start);
                    match &mut acc[bx] {
                        Some(m) => *m += term,
                        slot => *slot = Some(term),
                    }
                }
                for m in acc.iter().flatten() {
                    worst = worst.max(max_abs(m.iter()));
                }
            }
        }
    }
    worst
}

pub fn trace_is_associating(alg: &JordanAlgebra, b: &BilinearMap, tol: &Tolerance) -> bool {
    b.symmetry_residual() <= tol.abs_eps && trace_associating_residual(alg, b) <= tol.abs_eps
}

/// Worst entry of `2[B(x,y),a,y] + [B(y,y),a,x]` over basis `x, y` and all `a`.
pub fn bresar_polarized_residual(alg: &JordanAlgebra, b: &BilinearMap) -> f64 {
    let n = alg.dim();
    let bl = blocks(alg);
    let two = C64::new(2.0, 0.0);
    let mut worst = 0.0f64;
    for x in 0..n {
        for y in 0..n {
            let (bx, by) = (bl.of[x], bl.of[y]);
            let t1 = assoc_with_basis(alg, &block_mult(alg, b.get(x, y), &bl.ranges[by]), y, bl.ranges[by].start) * two;
            let t2 = assoc_with_basis(alg, &block_mult(alg, b.get(y, y), &bl.ranges[bx]), x, bl.ranges[bx].start);
            worst = if bx == by { worst.max(max_abs((t1 + t2).iter())) } else { worst.max(max_abs(t1.iter())).max(max_abs(t2.iter())) };
        }
    }
    worst
}

/// Residual of the associative identity derived from an associating trace,
/// with `π` the identity of a matrix algebra and `B` given on matrices.
pub fn associative_identity_residual(x: &CMatrix, y: &CMatrix, b: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> f64 {
    let n = x.nrows();
    let one = CMatrix::identity(n, n);
    let x2 = x * x;
    let two = C64::new(2.0, 0.0);
    let (bxx, bx2x, bx2x2, bxx2) = (b(x, x), b(&x2, x), b(&x2, &x2), b(x, &x2));
    let total = &one * y * (&bx2x * x * two - &bx2x2 - &bxx * &x2)
        + x * y * (&bx2x * two - &bxx * x * two)
        - &x2 * y * &bxx
        + (&bx2x2 + &x2 * &bxx - x * &bxx2 * two) * y * &one
        + (x * &bxx * two - &bxx2 * two) * y * x
        + &bxx * y * &x2;
    max_abs(total.iter())
}

// ---------------------------------------------------------------- standard forms

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinMapStandardForm {
    #[serde(with = "json::vector")]
    pub lambda: CVector,
    #[serde(with = "json::matrix")]
    pub mu: CMatrix,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStandardForm {
    #[serde(with = "json::vector")]
    pub lambda: CVector,
    #[serde(with = "json::matrix")]
    pub mu: CMatrix,
    pub nu: BilinearMap,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreserverDecomposition {
    #[serde(with = "json::vector")]
    pub z0: CVector,
    #[serde(rename = "J", with = "json::matrix")]
    pub j: CMatrix,
    #[serde(with = "json::matrix")]
    pub beta: CMatrix,
    pub residual: f64,
}

fn check_kit(alg: &JordanAlgebra, kit: &ElementaryKit) -> Result<(), DecomposeError> {
    if kit.u.len() != alg.dim() || kit.e0.nrows() != alg.dim() {
        return Err(DecomposeError::KitMissing(format!("kit for `{}` does not fit `{}`", kit.algebra, alg.name())));
    }
    Ok(())
}

/// Residuals of a claimed linear standard form `T = M_λ + μ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormCheck {
    pub reproduces: f64,
    pub lambda_central: f64,
    pub mu_center_valued: f64,
}

impl FormCheck {
    pub fn worst(&self) -> f64 {
        self.reproduces.max(self.lambda_central).max(self.mu_center_valued)
    }
}

pub fn validate_linear_form(alg: &JordanAlgebra, t: &CMatrix, lambda: &CVector, mu: &CMatrix) -> FormCheck {
    FormCheck {
        reproduces: max_abs((t - alg.mult_operator(lambda) - mu).iter()),
        lambda_central: alg.center_residual(lambda),
        mu_center_valued: alg.center_valued_residual(mu),
    }
}

/// `λ = E₁(T(u))`, `μ = E₀T − M_λE₀`.
///
/// A verified standard form certifies that `T` is associating; the explicit
/// basis-triple check runs only to classify a failure.
pub fn decompose_linear(alg: &JordanAlgebra, t: &CMatrix, kit: &ElementaryKit, tol: &Tolerance) -> Result<LinMapStandardForm, DecomposeError> {
    check_square(alg, t)?;
    check_kit(alg, kit)?;
    let lambda = &kit.e1 * (t * &kit.u);
    let mu = &kit.e0 * t - alg.mult_operator(&lambda) * &kit.e0;
    let check = validate_linear_form(alg, t, &lambda, &mu);
    if check.worst() > tol.abs_eps {
        let assoc = linear_associating_residual(alg, t);
        if assoc > tol.abs_eps {
            return Err(DecomposeError::NotAssociating(assoc));
        }
        return Err(DecomposeError::ResidualExceeded { what: "linear standard form".into(), residual: check.worst() });
    }
    Ok(LinMapStandardForm { lambda, mu, residual: check.worst() })
}

struct TraceParts {
    form: TraceStandardForm,
    reproduces: f64,
    central: f64,
}

fn trace_parts(alg: &JordanAlgebra, b: &BilinearMap, kit: &ElementaryKit) -> TraceParts {
    let n = alg.dim();
    let w = &kit.u;
    let bw = b.partial(w);
    let bww = &bw * w;
    let two = C64::new(2.0, 0.0);
    let half = C64::new(0.5, 0.0);
    let e1bww = &kit.e1 * &bww;
    let (lambda, mu) = match &kit.e2 {
        Some(e2) => {
            let lambda = e2 * &bww;
            let mu = &kit.e1 * &bw * two - alg.mult_operator(&lambda) * &kit.e1 * alg.mult_operator(w) * two - alg.mult_operator(&e1bww) * &kit.e1;
            (lambda, mu)
        }
        None => (alg.zero(), &kit.e1 * &bw * two - alg.mult_operator(&e1bww) * &kit.e1),
    };
    let m_lambda = alg.mult_operator(&lambda);
    let lambda_e0 = &m_lambda * &kit.e0;
    let mu_cols: Vec<CVector> = (0..n).map(|i| mu.column(i).into_owned()).collect();
    let m_mu: Vec<CMatrix> = mu_cols.iter().map(|m| alg.mult_operator(m)).collect();
    let m_mu_e0: Vec<CMatrix> = m_mu.iter().map(|m| m * &kit.e0).collect();
    let mut reproduces = 0.0f64;
    let nu = BilinearMap::symmetric_from_fn(alg.name(), n, |i, j| {
        let bij = b.get(i, j);
        let mut lam_p = alg.zero();
        let mut lam_e0p = alg.zero();
        for &(k, c) in alg.structure(i, j) {
            lam_p += m_lambda.column(k) * c;
            lam_e0p += lambda_e0.column(k) * c;
        }
        let nu_ij = &kit.e0 * bij - lam_e0p - (m_mu_e0[i].column(j) + m_mu_e0[j].column(i)) * half;
        let rebuilt = &lam_p + (m_mu[i].column(j) + m_mu[j].column(i)) * half + &nu_ij;
        reproduces = reproduces.max(max_abs((bij - rebuilt).iter()));
        nu_ij
    });
    for i in 0..n {
        for j in 0..i {
            reproduces = reproduces.max(max_abs((b.get(i, j) - b.get(j, i)).iter()));
        }
    }
    let mut central = alg.center_residual(&lambda).max(alg.center_valued_residual(&mu));
    for i in 0..n {
        for j in i..n {
            central = central.max(alg.center_residual(nu.get(i, j)));
        }
    }
    let residual = reproduces.max(central);
    TraceParts { form: TraceStandardForm { lambda, mu, nu, residual }, reproduces, central }
}

/// Standard form `B(x,x) = λ∘x² + μ(x)∘x + ν(x,x)`; spin-type kits force `λ = 0`.
pub fn decompose_trace(alg: &JordanAlgebra, b: &BilinearMap, kit: &ElementaryKit, tol: &Tolerance) -> Result<TraceStandardForm, DecomposeError> {
    if b.dim != alg.dim() {
        return Err(DecomposeError::DimensionMismatch(format!("bilinear map on dimension {}, algebra has {}", b.dim, alg.dim())));
    }
    check_kit(alg, kit)?;
    let parts = trace_parts(alg, b, kit);
    if parts.form.residual > tol.abs_eps {
        let sym = b.symmetry_residual();
        let assoc = if sym > tol.abs_eps { sym } else { trace_associating_residual(alg, b) };
        if assoc > tol.abs_eps {
            return Err(DecomposeError::NotAssociating(assoc));
        }
        let what = if parts.reproduces > tol.abs_eps { "trace standard form" } else { "center-valuedness of trace parts" };
        return Err(DecomposeError::ResidualExceeded { what: what.into(), residual: parts.reproduces.max(parts.central) });
    }
    Ok(parts.form)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PreserverMode {
    /// Requires an `E₂`-bearing kit; type-I₂ summands have none.
    Guarded,
    /// Skips the kit guard and hypothesis checks so the spin counterexample can be exercised.
    SpinBypass,
}

fn invertible(m: &CMatrix, tol: &Tolerance) -> bool {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return false;
    }
    let sv = m.singular_values();
    sv.min() > tol.abs_eps * sv.max().max(1.0)
}

/// `B(x, y) = Φ(Φ⁻¹(x)∘Φ⁻¹(y))` on the codomain.
pub fn induced_trace(a: &JordanAlgebra, b_alg: &JordanAlgebra, phi: &CMatrix, psi: &CMatrix) -> BilinearMap {
    let images: Vec<CMatrix> = (0..b_alg.dim()).map(|i| phi * a.mult_operator(&psi.column(i).into_owned())).collect();
    BilinearMap::symmetric_from_fn(b_alg.name(), b_alg.dim(), |i, j| &images[i] * psi.column(j))
}

/// `Φ = z₀∘J + β` with `z₀ = λ⁻¹`, `J = M_λΦ + ½μΦ`, `β = Φ − M_{z₀}J`.
pub fn decompose_preserver(
    a: &JordanAlgebra,
    b_alg: &JordanAlgebra,
    phi: &CMatrix,
    kit: &ElementaryKit,
    mode: PreserverMode,
    tol: &Tolerance,
) -> Result<PreserverDecomposition, DecomposeError> {
    if phi.nrows() != b_alg.dim() || phi.ncols() != a.dim() {
        return Err(DecomposeError::DimensionMismatch(format!("map is {}x{}", phi.nrows(), phi.ncols())));
    }
    if !invertible(phi, tol) {
        return Err(DecomposeError::NotBijective);
    }
    check_kit(b_alg, kit)?;
    if mode == PreserverMode::Guarded && !kit.has_e2() {
        return Err(DecomposeError::KitMissing("preserver decomposition needs an E2-bearing kit".into()));
    }
    let psi = phi.clone().try_inverse().ok_or(DecomposeError::NotBijective)?;
    let b = induced_trace(a, b_alg, phi, &psi);
    let (lambda, mu, trace_residual) = match mode {
        PreserverMode::Guarded => {
            let f = decompose_trace(b_alg, &b, kit, tol)?;
            (f.lambda, f.mu, f.residual)
        }
        PreserverMode::SpinBypass => {
            let p = trace_parts(b_alg, &b, kit);
            (p.form.lambda, p.form.mu, p.form.residual)
        }
    };
    let z0 = match (b_alg.jordan_inverse(&lambda, tol), mode) {
        (Ok(z), _) => z,
        (Err(_), PreserverMode::Guarded) => return Err(DecomposeError::LambdaNotInvertible),
        (Err(_), PreserverMode::SpinBypass) => b_alg.unit().clone(),
    };
    let j = b_alg.mult_operator(&lambda) * phi + &mu * phi * C64::new(0.5, 0.0);
    let hom = homomorphism_residual(a, b_alg, &j);
    if hom > tol.abs_eps || !invertible(&j, tol) {
        return Err(DecomposeError::JNotMultiplicative(hom));
    }
    let beta = phi - b_alg.mult_operator(&z0) * &j;
    let beta_central = b_alg.center_valued_residual(&beta);
    if beta_central > tol.abs_eps {
        return Err(DecomposeError::ResidualExceeded { what: "beta is not center-valued".into(), residual: beta_central });
    }
    let rebuilt = max_abs((phi - b_alg.mult_operator(&z0) * &j - &beta).iter());
    Ok(PreserverDecomposition { z0, j, beta, residual: rebuilt.max(hom).max(beta_central).max(trace_residual) })
}

/// `max ‖Φ(z∘a) − J(z)∘Φ(a)‖` distance to the center over central `z` and basis `a`.
pub fn central_compatibility_residual(a: &JordanAlgebra, b_alg: &JordanAlgebra, phi: &CMatrix, j: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for z in a.center() {
        let mz = a.mult_operator(z);
        let mjz = b_alg.mult_operator(&(j * z));
        let m = phi * mz - mjz * phi;
        worst = worst.max(b_alg.center_valued_residual(&m));
    }
    worst
}

// ---------------------------------------------------------------- involution

/// `F^♯(x) = F(x*)*`, i.e. `S_cod · conj(F) · conj(S_dom)`.
pub fn sharp(f: &CMatrix, dom: &JordanAlgebra, cod: &JordanAlgebra) -> CMatrix {
    cod.star_matrix() * f.map(|z| z.conj()) * dom.star_matrix().map(|z| z.conj())
}

pub fn symmetric_residual(f: &CMatrix, dom: &JordanAlgebra, cod: &JordanAlgebra) -> f64 {
    max_abs((sharp(f, dom, cod) - f).iter())
}

pub fn is_symmetric_map(f: &CMatrix, dom: &JordanAlgebra, cod: &JordanAlgebra, tol: &Tolerance) -> bool {
    symmetric_residual(f, dom, cod) <= tol.abs_eps
}

/// Self-adjointness of `z₀`, star-compatibility of `J`, symmetry of `β`.
pub fn symmetric_preserver_check(a: &JordanAlgebra, b_alg: &JordanAlgebra, d: &PreserverDecomposition, seed: u64, tol: &Tolerance) -> Vec<Record> {
    let eps = tol.abs_eps;
    let name = b_alg.name();
    let z0 = max_abs((b_alg.star(&d.z0) - &d.z0).iter());
    let j = star_map_residual(a, b_alg, &d.j).max(homomorphism_residual(a, b_alg, &d.j));
    let beta = symmetric_residual(&d.beta, a, b_alg);
    vec![
        Record::new("z0_self_adjoint", name, seed, z0, eps, "z0* = z0"),
        Record::new("j_star_map", name, seed, j, eps, "J is a Jordan *-homomorphism"),
        Record::new("beta_symmetric", name, seed, beta, eps, "beta^# = beta"),
    ]
}

// ---------------------------------------------------------------- sampled preservation

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpcommSummary {
    pub checked: usize,
    pub passed: usize,
    pub worst: f64,
}

impl OpcommSummary {
    pub fn all_pass(&self) -> bool {
        self.checked == self.passed
    }
}

fn random_in(alg: &JordanAlgebra, r: &Range<usize>, rng: &mut impl rand::Rng) -> CVector {
    let mut x = alg.zero();
    for i in r.clone() {
        x[i] = random_scalar(rng, 0.5);
    }
    x
}

/// Commuting pairs: `(x, p(x))`, `(x, z)` with `z` central, and elements of distinct summands.
pub fn commuting_pairs(alg: &JordanAlgebra, samples: usize, seed: u64) -> Vec<(CVector, CVector)> {
    let ranges: Vec<Range<usize>> = alg.summands().iter().map(|s| s.range()).collect();
    (0..samples)
        .map(|s| {
            let mut rng = rng_from_seed(derive_seed(seed, s as u64));
            let x = random_vector(&mut rng, alg.dim(), 0.5);
            match (s % 3, ranges.len()) {
                (1, _) => {
                    let z = alg.center().iter().fold(alg.zero(), |acc, c| acc + c * random_scalar(&mut rng, 1.0));
                    (x, z)
                }
                (2, m) if m >= 2 => {
                    let p = s / 3 % m;
                    let q = (p + 1 + s / 3 / m % (m - 1)) % m;
                    (random_in(alg, &ranges[p], &mut rng), random_in(alg, &ranges[q], &mut rng))
                }
                _ => {
                    let mut y = alg.unit() * random_scalar(&mut rng, 1.0);
                    let mut power = alg.unit().clone();
                    for _ in 1..=3 {
                        power = alg.product(&power, &x);
                        y += &power * random_scalar(&mut rng, 1.0);
                    }
                    (x, y)
                }
            }
        })
        .collect()
}

/// Checks image commutativity on sampled commuting pairs, both through `Φ` and `Φ⁻¹`.
pub fn opcomm_preservation_sampled(a: &JordanAlgebra, b_alg: &JordanAlgebra, phi: &CMatrix, samples: usize, seed: u64, tol: &Tolerance) -> OpcommSummary {
    let mut summary = OpcommSummary { checked: 0, passed: 0, worst: 0.0 };
    let psi = phi.clone().try_inverse();
    let mut run = |dom: &JordanAlgebra, cod: &JordanAlgebra, f: &CMatrix, sd: u64| {
        for (x, y) in commuting_pairs(dom, samples, sd) {
            let r = cod.commutator_residual(&(f * &x), &(f * &y));
            summary.checked += 1;
            summary.worst = summary.worst.max(r);
            if r <= tol.abs_eps {
                summary.passed += 1;
            }
        }
    };
    run(a, b_alg, phi, derive_seed(seed, 1));
    match psi {
        Some(psi) => run(b_alg, a, &psi, derive_seed(seed, 2)),
        None => {
            summary.checked += 1;
            summary.worst = f64::INFINITY;
        }
    }
    summary
}

// ---------------------------------------------------------------- central projections

/// Dimension of `{c ∈ Z : c∘b_i ∈ Z for all i}`.
pub fn central_annihilator_dim(alg: &JordanAlgebra, tol: &Tolerance) -> usize {
    let z = alg.center();
    let n = alg.dim();
    if z.is_empty() {
        return 0;
    }
    let mut stacked = CMatrix::zeros(n * n, z.len());
    for i in 0..n {
        for (k, zk) in z.iter().enumerate() {
            let v = alg.basis_op(i).apply(zk);
            let off = &v - alg.center_projection(&v);
            stacked.view_mut((i * n, k), (n, 1)).copy_from(&off);
        }
    }
    crate::numerics::kernel_basis_floored(&stacked, tol).len()
}

/// True iff only `c = 0` satisfies `c∘A ⊆ Z(A)` for central `c`.
pub fn central_annihilator_check(alg: &JordanAlgebra, tol: &Tolerance) -> bool {
    central_annihilator_dim(alg, tol) == 0
}

fn unit_of(alg: &JordanAlgebra, r: &Range<usize>) -> CVector {
    let mut p = alg.zero();
    for i in r.clone() {
        p[i] = alg.unit()[i];
    }
    p
}

/// Worst center residual of the cross blocks `M_p T M_q` over summand pairs `p ≠ q`.
pub fn cross_block_linear_residual(alg: &JordanAlgebra, t: &CMatrix) -> f64 {
    let ranges: Vec<Range<usize>> = alg.summands().iter().map(|s| s.range()).collect();
    let mut worst = 0.0f64;
    for (pi, p) in ranges.iter().enumerate() {
        for (qi, q) in ranges.iter().enumerate() {
            if pi != qi {
                let m = alg.mult_operator(&unit_of(alg, p)) * t * alg.mult_operator(&unit_of(alg, q));
                worst = worst.max(alg.center_valued_residual(&m));
            }
        }
    }
    worst
}

/// Worst center residual of `p∘B(b_i, b_j)` with `b_i, b_j` outside the summand of `p`.
pub fn cross_block_trace_residual(alg: &JordanAlgebra, b: &BilinearMap) -> f64 {
    let bl = blocks(alg);
    let n = alg.dim();
    let mut worst = 0.0f64;
    for (pi, p) in bl.ranges.iter().enumerate() {
        let mp = alg.mult_operator(&unit_of(alg, p));
        for i in (0..n).filter(|&i| bl.of[i] != pi) {
            for j in (i..n).filter(|&j| bl.of[j] != pi) {
                worst = worst.max(alg.center_residual(&(&mp * b.get(i, j))));
            }
        }
    }
    worst
}

/// `p∘B(a, b) = μ(b)∘a + ν(a, b)` for `a ∈ p∘A`, `b ∈ q∘A`, with
/// `μ(y) = p∘E₁(B(p∘u, q∘y))` and `ν(a, b) = p∘E₀(B(a, b)) − μ(b)∘E₀(a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedProductForm {
    pub mu: CMatrix,
    pub residual: f64,
    pub central: f64,
}

pub fn mixed_product_form(alg: &JordanAlgebra, summand: usize, b: &BilinearMap, kit: &ElementaryKit) -> MixedProductForm {
    let bl = blocks(alg);
    let p = unit_of(alg, &bl.ranges[summand]);
    let q = alg.unit() - &p;
    let mp = alg.mult_operator(&p);
    let mq = alg.mult_operator(&q);
    let pu = &mp * &kit.u;
    let mu = &mp * &kit.e1 * b.partial(&pu) * &mq;
    let mut residual = 0.0f64;
    let mut central = alg.center_valued_residual(&mu);
    let n = alg.dim();
    for ai in bl.ranges[summand].clone() {
        let e0a = kit.e0.column(ai).into_owned();
        for bi in (0..n).filter(|&i| bl.of[i] != summand) {
            let mu_b = mu.column(bi).into_owned();
            let pb = &mp * b.get(ai, bi);
            let nu = &mp * (&kit.e0 * b.get(ai, bi)) - alg.product(&mu_b, &e0a);
            central = central.max(alg.center_residual(&nu));
            let rebuilt = alg.basis_op(ai).apply(&mu_b) + &nu;
            residual = residual.max(max_abs((pb - rebuilt).iter()));
        }
    }
    MixedProductForm { mu, residual, central }
}
