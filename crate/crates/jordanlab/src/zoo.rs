//! Concrete algebra families, their canonical frames and the name registry.

use crate::algebra::{AlgebraError, Family, JordanAlgebra, Summand};
use crate::numerics::{max_abs, CMatrix, CVector, Tolerance, C64, ONE, ZERO};
use crate::octonion::{oct_conj, Octonion};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZooError {
    #[error("unknown algebra name `{0}`")]
    UnknownName(String),
    #[error("invalid parameter for `{0}`")]
    InvalidParameter(String),
    #[error("`{0}` is not a spin factor")]
    NotSpin(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// A symmetry `s` with `U_s(p_from) = p_to`.
#[derive(Debug, Clone, PartialEq)]
pub struct Exchange {
    pub symmetry: CVector,
    pub from: usize,
    pub to: usize,
}

/// Orthogonal projections summing to the unit, with declared exchanges.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub projections: Vec<CVector>,
    pub exchanges: Vec<Exchange>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrameError {
    #[error("element {0} is not a projection")]
    NotProjection(usize),
    #[error("projections {0} and {1} are not orthogonal")]
    NotOrthogonal(usize, usize),
    #[error("projections do not sum to the unit")]
    NotPartitionOfUnity,
    #[error("exchange {0} fails verification")]
    BadExchange(usize),
}

impl Frame {
    pub fn verify(&self, alg: &JordanAlgebra, tol: &Tolerance) -> Result<(), FrameError> {
        let mut sum = alg.zero();
        for (i, p) in self.projections.iter().enumerate() {
            if !alg.is_projection(p, tol) {
                return Err(FrameError::NotProjection(i));
            }
            for (j, q) in self.projections.iter().enumerate().skip(i + 1) {
                if max_abs(alg.product(p, q).iter()) > tol.abs_eps {
                    return Err(FrameError::NotOrthogonal(i, j));
                }
            }
            sum += p;
        }
        if max_abs((sum - alg.unit()).iter()) > tol.abs_eps {
            return Err(FrameError::NotPartitionOfUnity);
        }
        for (k, ex) in self.exchanges.iter().enumerate() {
            let ok = alg.is_symmetry(&ex.symmetry, tol)
                && max_abs((alg.u(&ex.symmetry) * &self.projections[ex.from] - &self.projections[ex.to]).iter())
                    <= tol.abs_eps;
            if !ok {
                return Err(FrameError::BadExchange(k));
            }
        }
        Ok(())
    }

    /// Symmetry exchanging `p_i` and `p_j`, if declared.
    pub fn exchange(&self, i: usize, j: usize) -> Option<&CVector> {
        self.exchanges
            .iter()
            .find(|e| (e.from == i && e.to == j) || (e.from == j && e.to == i))
            .map(|e| &e.symmetry)
    }
}

/// Row-major coordinates of a square matrix in the matrix-unit basis.
pub fn matrix_coords(m: &CMatrix) -> CVector {
    let n = m.nrows();
    CVector::from_fn(n * n, |k, _| m[(k / n, k % n)])
}

pub fn matrix_of(v: &CVector, n: usize) -> CMatrix {
    assert_eq!(v.len(), n * n);
    CMatrix::from_fn(n, n, |i, j| v[i * n + j])
}

fn half() -> C64 {
    C64::new(0.5, 0.0)
}

/// `M_n(C)` with `a∘b = ½(ab+ba)` on the basis `e_ij` (index `i·n+j`).
pub fn matrix_jordan(n: usize) -> Result<(JordanAlgebra, Frame), ZooError> {
    if n < 2 {
        return Err(ZooError::InvalidParameter(format!("matrix:{n}")));
    }
    let idx = |i: usize, j: usize| i * n + j;
    let mut constants = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    if j == k {
                        constants.push((idx(i, j), idx(k, l), idx(i, l), half()));
                    }
                    if l == i {
                        constants.push((idx(i, j), idx(k, l), idx(k, j), half()));
                    }
                }
            }
        }
    }
    let unit = matrix_coords(&CMatrix::identity(n, n));
    let mut star = CMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            star[(idx(i, j), idx(j, i))] = ONE;
        }
    }
    let alg = JordanAlgebra::new(&format!("matrix:{n}"), n * n, constants, unit, star)?.with_family(Family::Matrix(n));
    Ok((alg, matrix_frame(n)))
}

fn unit_matrix(n: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    m[(i, j)] = ONE;
    m
}

/// Transposition symmetry exchanging indices `i` and `j` of `M_n`.
pub fn transposition(n: usize, i: usize, j: usize) -> CVector {
    let mut m = CMatrix::identity(n, n);
    m[(i, i)] = ZERO;
    m[(j, j)] = ZERO;
    m[(i, j)] = ONE;
    m[(j, i)] = ONE;
    matrix_coords(&m)
}

fn matrix_frame(n: usize) -> Frame {
    let projections = (0..n).map(|i| matrix_coords(&unit_matrix(n, i, i))).collect();
    let mut exchanges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            exchanges.push(Exchange { symmetry: transposition(n, i, j), from: i, to: j });
        }
    }
    Frame { projections, exchanges }
}

/// Spin factor on `{1, f_1, …, f_{k−1}}` with `f_i∘f_j = δ_ij·1`.
pub fn spin_factor(k: usize) -> Result<JordanAlgebra, ZooError> {
    if k < 3 {
        return Err(ZooError::InvalidParameter(format!("spin:{k}")));
    }
    let mut constants = vec![(0, 0, 0, ONE)];
    for i in 1..k {
        constants.push((0, i, i, ONE));
        constants.push((i, 0, i, ONE));
        constants.push((i, i, 0, ONE));
    }
    let mut unit = CVector::zeros(k);
    unit[0] = ONE;
    Ok(JordanAlgebra::new(&format!("spin:{k}"), k, constants, unit, CMatrix::identity(k, k))?.with_family(Family::Spin(k)))
}

/// `p₁ = ½(1+f_i)`, `p₂ = ½(1−f_i)` exchanged by `f_j` (local spin coordinates).
pub fn spin_frame(k: usize, i: usize, j: usize) -> Frame {
    let mut p1 = CVector::zeros(k);
    let mut p2 = CVector::zeros(k);
    p1[0] = half();
    p1[i] = half();
    p2[0] = half();
    p2[i] = -half();
    let mut s = CVector::zeros(k);
    s[j] = ONE;
    Frame { projections: vec![p1, p2], exchanges: vec![Exchange { symmetry: s, from: 0, to: 1 }] }
}

/// Bar involution of the underlying Hilbert space: `(a₀, a_i) ↦ (ā₀, −ā_i)`.
pub fn spin_bar(a: &CVector) -> CVector {
    CVector::from_fn(a.len(), |i, _| if i == 0 { a[0].conj() } else { -a[i].conj() })
}

/// `⟨a|b⟩`, linear in the first slot.
pub fn spin_inner(a: &CVector, b: &CVector) -> C64 {
    b.dotc(a)
}

/// JB*-norm `‖a‖² = ‖a‖₂² + (‖a‖₂⁴ − |⟨a|ā⟩|²)^{1/2}`.
pub fn spin_norm(v: &JordanAlgebra, a: &CVector) -> Result<f64, ZooError> {
    if !matches!(v.summands(), [s] if matches!(s.family, Family::Spin(_))) {
        return Err(ZooError::NotSpin(v.name().to_string()));
    }
    let n2 = a.norm_squared();
    let q = spin_inner(a, &spin_bar(a)).norm();
    Ok((n2 + (n2 * n2 - q * q).max(0.0).sqrt()).sqrt())
}

/// Linear trace `t` and bilinear `n` with `x∘y = ½(t(x)y + t(y)x) − n(x,y)·1`
/// on type-I₂ families (spin factors and `M₂`), in local coordinates.
pub fn quadratic_forms(family: &Family) -> Option<(CVector, CMatrix)> {
    match family {
        Family::Spin(k) => {
            let mut t = CVector::zeros(*k);
            t[0] = C64::new(2.0, 0.0);
            let mut n = -CMatrix::identity(*k, *k);
            n[(0, 0)] = ONE;
            Some((t, n))
        }
        Family::Matrix(2) => {
            let t = CVector::from_vec(vec![ONE, ZERO, ZERO, ONE]);
            let mut n = CMatrix::zeros(4, 4);
            n[(0, 3)] = half();
            n[(3, 0)] = half();
            n[(1, 2)] = -half();
            n[(2, 1)] = -half();
            Some((t, n))
        }
        _ => None,
    }
}

// ---------------------------------------------------------------- Albert

const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

type OctMatrix = [[Octonion; 3]; 3];

fn albert_matrix(x: &CVector) -> OctMatrix {
    let mut m = [[Octonion::zero(); 3]; 3];
    for i in 0..3 {
        m[i][i] = Octonion::scalar(x[i]);
    }
    for (p, &(i, j)) in PAIRS.iter().enumerate() {
        let mut o = Octonion::zero();
        for k in 0..8 {
            o.coeffs[k] = x[3 + 8 * p + k];
        }
        m[i][j] = o;
        m[j][i] = oct_conj(&o);
    }
    m
}

fn albert_coords(m: &OctMatrix) -> CVector {
    let mut x = CVector::zeros(27);
    for i in 0..3 {
        x[i] = m[i][i].coeffs[0];
    }
    for (p, &(i, j)) in PAIRS.iter().enumerate() {
        for k in 0..8 {
            x[3 + 8 * p + k] = m[i][j].coeffs[k];
        }
    }
    x
}

fn oct_matmul(a: &OctMatrix, b: &OctMatrix) -> OctMatrix {
    let mut out = [[Octonion::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                out[i][j] = out[i][j] + a[i][k] * b[k][j];
            }
        }
    }
    out
}

/// Jordan product of hermitian octonionic matrices, computed from coordinates.
pub fn albert_product_oracle(x: &CVector, y: &CVector) -> CVector {
    let (a, b) = (albert_matrix(x), albert_matrix(y));
    let (ab, ba) = (oct_matmul(&a, &b), oct_matmul(&b, &a));
    let mut sym = [[Octonion::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            sym[i][j] = (ab[i][j] + ba[i][j]).scale(half());
        }
    }
    albert_coords(&sym)
}

/// Structure constants of `H₃(O_C)` generated from the octonion table.
pub fn generate_albert_constants() -> Vec<(usize, usize, usize, C64)> {
    let mut out = Vec::new();
    for i in 0..27 {
        for j in 0..27 {
            let mut bi = CVector::zeros(27);
            let mut bj = CVector::zeros(27);
            bi[i] = ONE;
            bj[j] = ONE;
            let prod = albert_product_oracle(&bi, &bj);
            for (k, c) in prod.iter().enumerate() {
                if *c != ZERO {
                    out.push((i, j, k, *c));
                }
            }
        }
    }
    out
}

/// Symmetry `±e_k` at `(i,j)`, `∓e_k` conjugate at `(j,i)`, `1` on the remaining diagonal slot.
pub fn albert_offdiag_symmetry(pair: usize, k: usize, sign: f64) -> CVector {
    let (i, j) = PAIRS[pair];
    let l = 3 - i - j;
    let mut x = CVector::zeros(27);
    x[l] = ONE;
    x[3 + 8 * pair + k] = C64::new(sign, 0.0);
    x
}

/// `H₃(O_C)` with diagonal frame and scalar permutation symmetries.
pub fn albert_algebra() -> Result<(JordanAlgebra, Frame), ZooError> {
    let mut unit = CVector::zeros(27);
    for i in 0..3 {
        unit[i] = ONE;
    }
    let alg = JordanAlgebra::new("albert", 27, generate_albert_constants(), unit, CMatrix::identity(27, 27))?
        .with_family(Family::Albert);
    let projections = (0..3)
        .map(|i| {
            let mut p = CVector::zeros(27);
            p[i] = ONE;
            p
        })
        .collect();
    let exchanges = PAIRS
        .iter()
        .enumerate()
        .map(|(p, &(i, j))| Exchange { symmetry: albert_offdiag_symmetry(p, 0, 1.0), from: i, to: j })
        .collect();
    Ok((alg, Frame { projections, exchanges }))
}

/// Signed-permutation symmetries of `H₃(O_C)`.
pub fn albert_symmetry_catalog() -> Vec<CVector> {
    let mut out = Vec::new();
    for signs in 1..8u32 {
        let mut x = CVector::zeros(27);
        for i in 0..3 {
            x[i] = if signs & (1 << i) != 0 { -ONE } else { ONE };
        }
        out.push(x);
    }
    for pair in 0..3 {
        for k in 0..8 {
            for sign in [1.0, -1.0] {
                out.push(albert_offdiag_symmetry(pair, k, sign));
            }
        }
    }
    out
}

/// Fixed symmetries `f_i` and `(f_i ± f_j)/√2` of a spin factor.
pub fn spin_symmetry_catalog(k: usize) -> Vec<CVector> {
    let r = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut out = Vec::new();
    for i in 1..k {
        let mut s = CVector::zeros(k);
        s[i] = ONE;
        out.push(s);
        for j in (i + 1)..k {
            for sign in [1.0, -1.0] {
                let mut s = CVector::zeros(k);
                s[i] = r;
                s[j] = r * sign;
                out.push(s);
            }
        }
    }
    out
}

// ---------------------------------------------------------------- sums

pub fn scalar_algebra() -> JordanAlgebra {
    JordanAlgebra::new("scalar", 1, vec![(0, 0, 0, ONE)], CVector::from_vec(vec![ONE]), CMatrix::identity(1, 1))
        .expect("one-dimensional algebra")
        .with_family(Family::Scalar)
}

/// Coordinate ranges of the parts of a direct sum.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectSumInfo {
    pub ranges: Vec<std::ops::Range<usize>>,
}

impl DirectSumInfo {
    /// Central projection `p_k` (unit of the k-th part).
    pub fn central_projection(&self, alg: &JordanAlgebra, k: usize) -> CVector {
        let mut p = alg.zero();
        for i in self.ranges[k].clone() {
            p[i] = alg.unit()[i];
        }
        p
    }

    /// Coordinate projection `π_k : A → A_k`.
    pub fn coordinate_projection(&self, alg: &JordanAlgebra, k: usize) -> CMatrix {
        let r = &self.ranges[k];
        let mut m = CMatrix::zeros(r.len(), alg.dim());
        for (row, col) in r.clone().enumerate() {
            m[(row, col)] = ONE;
        }
        m
    }
}

fn join_names(parts: &[&JordanAlgebra]) -> String {
    let names: Vec<&str> = parts.iter().map(|p| p.name()).collect();
    format!("sum:{}", names.join("+"))
}

fn direct_sum_named(name: &str, parts: &[&JordanAlgebra]) -> Result<(JordanAlgebra, DirectSumInfo), ZooError> {
    if parts.is_empty() {
        return Err(ZooError::InvalidParameter("empty direct sum".into()));
    }
    let dim: usize = parts.iter().map(|p| p.dim()).sum();
    let mut constants = Vec::new();
    let mut unit = CVector::zeros(dim);
    let mut star = CMatrix::zeros(dim, dim);
    let mut summands = Vec::new();
    let mut ranges = Vec::new();
    let mut offset = 0;
    for part in parts {
        for (i, j, k, c) in part.structure_entries() {
            constants.push((i + offset, j + offset, k + offset, c));
        }
        unit.rows_mut(offset, part.dim()).copy_from(part.unit());
        star.view_mut((offset, offset), (part.dim(), part.dim())).copy_from(part.star_matrix());
        for s in part.summands() {
            summands.push(Summand { name: s.name.clone(), family: s.family.clone(), offset: s.offset + offset, dim: s.dim });
        }
        ranges.push(offset..offset + part.dim());
        offset += part.dim();
    }
    let alg = JordanAlgebra::new(name, dim, constants, unit, star)?.with_summands(summands);
    Ok((alg, DirectSumInfo { ranges }))
}

/// Block-diagonal direct sum with blockwise involution.
pub fn direct_sum(parts: &[&JordanAlgebra]) -> Result<(JordanAlgebra, DirectSumInfo), ZooError> {
    direct_sum_named(&join_names(parts), parts)
}

/// `C(Ω, A)` for a finite `Ω` of `m` points, i.e. the m-fold direct power.
pub fn function_algebra(a: &JordanAlgebra, m: usize) -> Result<(JordanAlgebra, DirectSumInfo), ZooError> {
    if m == 0 {
        return Err(ZooError::InvalidParameter(format!("func:{}:0", a.name())));
    }
    let parts: Vec<&JordanAlgebra> = std::iter::repeat_n(a, m).collect();
    direct_sum_named(&format!("func:{}:{m}", a.name()), &parts)
}

/// The diagonal embedding `a ↦ (a, …, a)` into the m-fold power.
pub fn constant_embedding(a: &JordanAlgebra, m: usize) -> CMatrix {
    let d = a.dim();
    let mut e = CMatrix::zeros(d * m, d);
    for p in 0..m {
        for i in 0..d {
            e[(p * d + i, i)] = ONE;
        }
    }
    e
}

// ---------------------------------------------------------------- registry

pub const REGISTRY: [&str; 6] = ["matrix:<n>", "spin:<k>", "albert", "scalar", "sum:<a>+<b>[+...]", "func:<base>:<m>"];

/// Parses a registry name into an algebra.
pub fn by_name(name: &str) -> Result<JordanAlgebra, ZooError> {
    let name = name.trim();
    if name.contains('⊕') && !name.starts_with("sum:") {
        return by_name(&format!("sum:{}", name.replace('⊕', "+")));
    }
    let unknown = || ZooError::UnknownName(name.to_string());
    if name == "albert" {
        return Ok(albert_algebra()?.0);
    }
    if name == "scalar" {
        return Ok(scalar_algebra());
    }
    if let Some(rest) = name.strip_prefix("matrix:") {
        let n: usize = rest.parse().map_err(|_| unknown())?;
        if n > 12 {
            return Err(ZooError::InvalidParameter(name.to_string()));
        }
        return Ok(matrix_jordan(n)?.0);
    }
    if let Some(rest) = name.strip_prefix("spin:") {
        let k: usize = rest.parse().map_err(|_| unknown())?;
        if k > 256 {
            return Err(ZooError::InvalidParameter(name.to_string()));
        }
        return spin_factor(k);
    }
    if let Some(rest) = name.strip_prefix("sum:") {
        let parts = rest.split(['+', '⊕']).map(by_name).collect::<Result<Vec<_>, _>>()?;
        if parts.len() < 2 {
            return Err(unknown());
        }
        let refs: Vec<&JordanAlgebra> = parts.iter().collect();
        return Ok(direct_sum(&refs)?.0);
    }
    if let Some(rest) = name.strip_prefix("func:") {
        let (base, m) = rest.rsplit_once(':').ok_or_else(unknown)?;
        let m: usize = m.parse().map_err(|_| unknown())?;
        if m > 8 {
            return Err(ZooError::InvalidParameter(name.to_string()));
        }
        return Ok(function_algebra(&by_name(base)?, m)?.0);
    }
    Err(unknown())
}

/// Faithful associative representation for sums of full matrix algebras.
pub fn associative_embedding(alg: &JordanAlgebra) -> Option<impl Fn(&CVector) -> CMatrix + '_> {
    let mut blocks = Vec::new();
    for s in alg.summands() {
        match s.family {
            Family::Matrix(n) => blocks.push((s.offset, n)),
            _ => return None,
        }
    }
    let size: usize = blocks.iter().map(|b| b.1).sum();
    Some(move |x: &CVector| {
        let mut m = CMatrix::zeros(size, size);
        let mut at = 0;
        for &(offset, n) in &blocks {
            for i in 0..n {
                for j in 0..n {
                    m[(at + i, at + j)] = x[offset + i * n + j];
                }
            }
            at += n;
        }
        m
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{check_axioms, is_jordan_homomorphism, is_star_map};
    use crate::numerics::{derive_seed, random_vector, rng_from_seed, solve_linear};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn rand_el(alg: &JordanAlgebra, seed: u64) -> CVector {
        random_vector(&mut rng_from_seed(seed), alg.dim(), 1.0)
    }

    #[test]
    fn matrix_examples() {
        assert!(matrix_jordan(1).is_err());
        let (m3, frame) = matrix_jordan(3).unwrap();
        assert_eq!(m3.dim(), 9);
        assert_eq!(m3.center_basis(&tol()).len(), 1);
        frame.verify(&m3, &tol()).unwrap();
        let s = frame.exchange(0, 1).unwrap();
        let p = matrix_of(s, 3);
        let oracle = &p * matrix_of(&frame.projections[0], 3) * &p;
        assert!(max_abs((m3.u(s) * &frame.projections[0] - matrix_coords(&oracle)).iter()) < 1e-14);
        assert_eq!(*m3.unit(), matrix_coords(&CMatrix::identity(3, 3)));
    }

    #[test]
    fn matrix_star_is_conjugate_transpose() {
        let (m3, _) = matrix_jordan(3).unwrap();
        let x = rand_el(&m3, 3);
        let want = matrix_coords(&matrix_of(&x, 3).adjoint());
        assert!(max_abs((m3.star(&x) - want).iter()) < 1e-15);
    }

    #[test]
    fn spin_examples() {
        assert!(spin_factor(2).is_err());
        let v = spin_factor(4).unwrap();
        let f = |i: usize| v.basis(i);
        assert_eq!(v.product(&f(1), &f(2)), v.zero());
        assert_eq!(v.product(v.unit(), &f(1)), f(1));
        assert_eq!(v.product(&f(1), &f(1)), *v.unit());
        assert_eq!(v.center_basis(&tol()).len(), 1);
    }

    #[test]
    fn spin_product_matches_displayed_formula() {
        // a∘b = ⟨a|1⟩b + ⟨b|1⟩a − ⟨a|b̄⟩1 with the bar involution.
        let v = spin_factor(5).unwrap();
        let one = v.unit().clone();
        for s in 0..50 {
            let a = rand_el(&v, 2 * s);
            let b = rand_el(&v, 2 * s + 1);
            let want = &b * spin_inner(&a, &one) + &a * spin_inner(&b, &one) - &one * spin_inner(&a, &spin_bar(&b));
            assert!(max_abs((v.product(&a, &b) - want).iter()) < 1e-13);
        }
    }

    #[test]
    fn spin_square_law_with_bar() {
        let v = spin_factor(4).unwrap();
        let one = v.unit().clone();
        for s in 0..100 {
            let a = rand_el(&v, 300 + s);
            let want = &a * (spin_inner(&a, &one) * 2.0) - &one * spin_inner(&a, &spin_bar(&a));
            assert!(max_abs((v.square(&a) - want).iter()) <= 1e-9);
        }
    }

    #[test]
    fn spin_star_matches_displayed_formula() {
        // a* = 2⟨1|a⟩1 − ā coincides with coordinate conjugation.
        let v = spin_factor(6).unwrap();
        let one = v.unit().clone();
        let a = rand_el(&v, 5);
        let want = &one * (spin_inner(&one, &a) * 2.0) - spin_bar(&a);
        assert!(max_abs((v.star(&a) - want).iter()) < 1e-14);
    }

    #[test]
    fn spin_norm_examples() {
        let v = spin_factor(4).unwrap();
        assert!((spin_norm(&v, v.unit()).unwrap() - 1.0).abs() < 1e-12);
        assert!((spin_norm(&v, &v.basis(1)).unwrap() - 1.0).abs() < 1e-12);
        // Independent evaluation: ‖a‖₂² = 2 and ⟨a|ā⟩ = −(1 + i²) = 0, so ‖a‖² = 2 + 2.
        let a = v.basis(1) + v.basis(2) * C64::new(0.0, 1.0);
        assert!((spin_norm(&v, &a).unwrap() - 2.0).abs() < 1e-12);
        // 1 + f1 = 2p with p a projection.
        assert!((spin_norm(&v, &(v.unit() + v.basis(1))).unwrap() - 2.0).abs() < 1e-12);
        let (m2, _) = matrix_jordan(2).unwrap();
        assert!(spin_norm(&m2, m2.unit()).is_err());
    }

    #[test]
    fn spin_is_quadratic() {
        let v = spin_factor(6).unwrap();
        for s in 0..200 {
            let a = rand_el(&v, 1000 + s);
            let basis = CMatrix::from_columns(&[v.unit().clone(), a.clone()]);
            let sol = solve_linear(&basis, &v.square(&a), &tol());
            assert!(sol.is_ok());
        }
    }

    #[test]
    fn spin_frame_verifies() {
        let v = spin_factor(4).unwrap();
        spin_frame(4, 1, 2).verify(&v, &tol()).unwrap();
        for s in spin_symmetry_catalog(4) {
            assert!(v.is_symmetry(&s, &tol()));
        }
    }

    #[test]
    fn quadratic_forms_reproduce_products() {
        for (alg, fam) in [(spin_factor(5).unwrap(), Family::Spin(5)), (matrix_jordan(2).unwrap().0, Family::Matrix(2))] {
            let (t, n) = quadratic_forms(&fam).unwrap();
            for s in 0..20 {
                let x = rand_el(&alg, 2 * s);
                let y = rand_el(&alg, 2 * s + 1);
                let tx = t.transpose() * &x;
                let ty = t.transpose() * &y;
                let nxy = (x.transpose() * &n * &y)[(0, 0)];
                let want = (&y * tx[(0, 0)] + &x * ty[(0, 0)]) * C64::new(0.5, 0.0) - alg.unit() * nxy;
                assert!(max_abs((alg.product(&x, &y) - want).iter()) < 1e-13);
            }
        }
    }

    #[test]
    fn albert_examples() {
        let (a, frame) = albert_algebra().unwrap();
        assert_eq!(a.dim(), 27);
        frame.verify(&a, &tol()).unwrap();
        assert_eq!(a.center_basis(&tol()).len(), 1);
        for r in check_axioms(&a, 200, 4, &tol()) {
            assert!(r.residual <= 1e-10, "{} {}", r.check_name, r.residual);
        }
        for s in albert_symmetry_catalog() {
            assert!(a.is_symmetry(&s, &tol()));
            assert!(is_star_map(&a, &a, &a.u(&s), &tol()));
        }
    }

    #[test]
    fn albert_product_matches_oracle_on_random_pairs() {
        let (a, _) = albert_algebra().unwrap();
        for s in 0..10 {
            let x = rand_el(&a, 2 * s);
            let y = rand_el(&a, 2 * s + 1);
            assert!(max_abs((a.product(&x, &y) - albert_product_oracle(&x, &y)).iter()) < 1e-12);
        }
    }

    #[test]
    fn direct_sum_examples() {
        let (m2, _) = matrix_jordan(2).unwrap();
        let (m3, _) = matrix_jordan(3).unwrap();
        let (s, info) = direct_sum(&[&m2, &m3]).unwrap();
        assert_eq!(s.dim(), 13);
        assert_eq!(s.center_basis(&tol()).len(), 2);
        let pi1 = info.coordinate_projection(&s, 0);
        assert!(is_jordan_homomorphism(&s, &m2, &pi1, &tol()));
        let mut want = CVector::zeros(13);
        want.rows_mut(0, 4).copy_from(m2.unit());
        want.rows_mut(4, 9).copy_from(m3.unit());
        assert_eq!(*s.unit(), want);
        assert!(s.is_projection(&info.central_projection(&s, 1), &tol()));
    }

    #[test]
    fn function_algebra_examples() {
        let (a, _) = albert_algebra().unwrap();
        let (f, _) = function_algebra(&a, 2).unwrap();
        assert_eq!(f.dim(), 54);
        assert_eq!(f.center_basis(&tol()).len(), 2);
        let (f1, _) = function_algebra(&a, 1).unwrap();
        assert_eq!(f1.structure_entries(), a.structure_entries());
        let (m3, _) = matrix_jordan(3).unwrap();
        let (f3, _) = function_algebra(&m3, 3).unwrap();
        assert!(is_star_map(&m3, &f3, &constant_embedding(&m3, 3), &tol()));
    }

    #[test]
    fn registry_names() {
        assert_eq!(by_name("matrix:3").unwrap().dim(), 9);
        assert_eq!(by_name("spin:6").unwrap().dim(), 6);
        assert_eq!(by_name("albert").unwrap().dim(), 27);
        assert_eq!(by_name("scalar").unwrap().dim(), 1);
        assert_eq!(by_name("sum:matrix:3+matrix:4").unwrap().dim(), 25);
        assert_eq!(by_name("matrix:3⊕matrix:4").unwrap().name(), "sum:matrix:3+matrix:4");
        assert_eq!(by_name("func:albert:2").unwrap().dim(), 54);
        assert_eq!(by_name("func:matrix:2:3").unwrap().dim(), 12);
        assert!(matches!(by_name("matrix:1"), Err(ZooError::InvalidParameter(_))));
        assert!(matches!(by_name("octonion"), Err(ZooError::UnknownName(_))));
        assert!(by_name("sum:matrix:2").is_err());
    }

    #[test]
    fn every_zoo_algebra_satisfies_axioms() {
        for name in ["matrix:2", "matrix:4", "spin:3", "spin:6", "scalar", "sum:matrix:2+spin:4", "func:matrix:3:2"] {
            let alg = by_name(name).unwrap();
            for r in check_axioms(&alg, 40, derive_seed(9, 1), &tol()) {
                assert!(r.residual <= 1e-10, "{name} {} {}", r.check_name, r.residual);
            }
        }
    }

    #[test]
    fn embedding_is_multiplicative() {
        let alg = by_name("sum:matrix:2+matrix:3").unwrap();
        let phi = associative_embedding(&alg).unwrap();
        let x = rand_el(&alg, 1);
        let y = rand_el(&alg, 2);
        let (a, b) = (phi(&x), phi(&y));
        let want = (&a * &b + &b * &a) * C64::new(0.5, 0.0);
        assert!(max_abs((phi(&alg.product(&x, &y)) - want).iter()) < 1e-13);
        assert!(associative_embedding(&by_name("spin:4").unwrap()).is_none());
    }
}
