//! Jordan algebras given by structure constants, with the operator toolkit built on them.

use crate::json;
use crate::numerics::{
    kernel_basis_floored, max_abs, random_vector, rng_from_seed, derive_seed, solve_linear, CMatrix, CVector,
    Tolerance, C64, ONE, ZERO,
};
use crate::report::Record;
use serde::{Deserialize, Serialize};
use std::ops::Range;
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("algebra must have positive dimension")]
    Empty,
    #[error("structure index out of range: ({0}, {1}, {2})")]
    IndexOutOfRange(usize, usize, usize),
    #[error("structure constants are not symmetric at ({i}, {j}, {k})")]
    NotCommutative { i: usize, j: usize, k: usize },
    #[error("unit does not act as identity (residual {0:e})")]
    BadUnit(f64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("element is not invertible")]
    NotInvertible,
}

/// Which concrete family a block of the algebra belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Scalar,
    Matrix(usize),
    Spin(usize),
    Albert,
    Custom,
}

/// A direct summand occupying the coordinate range `offset..offset+dim`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Summand {
    pub name: String,
    pub family: Family,
    pub offset: usize,
    pub dim: usize,
}

impl Summand {
    pub fn range(&self) -> Range<usize> {
        self.offset..self.offset + self.dim
    }
}

/// Sparse matrix stored as `(row, col, value)` triples.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOp {
    pub dim: usize,
    pub entries: Vec<(usize, usize, C64)>,
}

impl SparseOp {
    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    pub fn apply(&self, x: &CVector) -> CVector {
        let mut out = CVector::zeros(self.dim);
        for &(r, c, v) in &self.entries {
            out[r] += v * x[c];
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct JordanAlgebra {
    name: String,
    dim: usize,
    table: Vec<Vec<(usize, C64)>>,
    unit: CVector,
    star: CMatrix,
    star_is_identity: bool,
    summands: Vec<Summand>,
    basis_ops: Vec<SparseOp>,
    center: OnceLock<Vec<CVector>>,
}

impl PartialEq for JordanAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.dim == other.dim
            && self.table == other.table
            && self.unit == other.unit
            && self.star == other.star
    }
}

impl JordanAlgebra {
    /// Builds an algebra from nonzero constants `b_i ∘ b_j = Σ c_ijk b_k`.
    pub fn new(
        name: &str,
        dim: usize,
        constants: impl IntoIterator<Item = (usize, usize, usize, C64)>,
        unit: CVector,
        star: CMatrix,
    ) -> Result<Self, AlgebraError> {
        if dim == 0 {
            return Err(AlgebraError::Empty);
        }
        if unit.len() != dim {
            return Err(AlgebraError::DimensionMismatch { expected: dim, found: unit.len() });
        }
        if star.nrows() != dim || star.ncols() != dim {
            return Err(AlgebraError::DimensionMismatch { expected: dim, found: star.nrows() });
        }
        let mut dense: Vec<Vec<(usize, C64)>> = vec![Vec::new(); dim * dim];
        for (i, j, k, c) in constants {
            if i >= dim || j >= dim || k >= dim {
                return Err(AlgebraError::IndexOutOfRange(i, j, k));
            }
            let slot = &mut dense[i * dim + j];
            match slot.iter_mut().find(|(kk, _)| *kk == k) {
                Some(e) => e.1 += c,
                None => slot.push((k, c)),
            }
        }
        for slot in dense.iter_mut() {
            slot.retain(|(_, c)| *c != ZERO);
            slot.sort_by_key(|(k, _)| *k);
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                let a = &dense[i * dim + j];
                let b = &dense[j * dim + i];
                let lookup = |v: &Vec<(usize, C64)>, k: usize| v.iter().find(|e| e.0 == k).map_or(ZERO, |e| e.1);
                for k in a.iter().chain(b.iter()).map(|e| e.0) {
                    if (lookup(a, k) - lookup(b, k)).norm() > 1e-12 {
                        return Err(AlgebraError::NotCommutative { i, j, k });
                    }
                }
            }
        }
        let star_is_identity = star == CMatrix::identity(dim, dim);
        let mut alg = JordanAlgebra {
            name: name.to_string(),
            dim,
            table: dense,
            unit,
            star,
            star_is_identity,
            summands: vec![Summand { name: name.to_string(), family: Family::Custom, offset: 0, dim }],
            basis_ops: Vec::new(),
            center: OnceLock::new(),
        };
        alg.basis_ops = (0..dim).map(|k| alg.build_basis_op(k)).collect();
        let mut unit_res = 0.0f64;
        for i in 0..dim {
            let r = alg.product(&alg.unit, &alg.basis(i)) - alg.basis(i);
            unit_res = unit_res.max(max_abs(r.iter()));
        }
        if unit_res > 1e-10 {
            return Err(AlgebraError::BadUnit(unit_res));
        }
        Ok(alg)
    }

    pub(crate) fn with_summands(mut self, summands: Vec<Summand>) -> Self {
        self.summands = summands;
        self
    }

    pub(crate) fn with_family(mut self, family: Family) -> Self {
        let name = self.name.clone();
        self.summands = vec![Summand { name, family, offset: 0, dim: self.dim }];
        self
    }

    fn build_basis_op(&self, k: usize) -> SparseOp {
        let n = self.dim;
        let mut entries = Vec::new();
        for j in 0..n {
            for &(l, c) in &self.table[k * n + j] {
                entries.push((l, j, c));
            }
        }
        SparseOp { dim: n, entries }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn unit(&self) -> &CVector {
        &self.unit
    }

    pub fn star_matrix(&self) -> &CMatrix {
        &self.star
    }

    pub fn summands(&self) -> &[Summand] {
        &self.summands
    }

    /// `b_i ∘ b_j` as sparse `(k, c)` pairs.
    pub fn structure(&self, i: usize, j: usize) -> &[(usize, C64)] {
        &self.table[i * self.dim + j]
    }

    /// All nonzero constants in `(i, j, k)` order.
    pub fn structure_entries(&self) -> Vec<(usize, usize, usize, C64)> {
        let n = self.dim;
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for &(k, c) in &self.table[i * n + j] {
                    out.push((i, j, k, c));
                }
            }
        }
        out
    }

    /// Sparse multiplication operator of the basis element `b_k`.
    pub fn basis_op(&self, k: usize) -> &SparseOp {
        &self.basis_ops[k]
    }

    pub fn basis(&self, i: usize) -> CVector {
        let mut v = CVector::zeros(self.dim);
        v[i] = ONE;
        v
    }

    pub fn zero(&self) -> CVector {
        CVector::zeros(self.dim)
    }

    fn check_len(&self, x: &CVector) {
        assert_eq!(x.len(), self.dim, "element length does not match algebra `{}`", self.name);
    }

    pub fn product(&self, x: &CVector, y: &CVector) -> CVector {
        self.check_len(x);
        self.check_len(y);
        let n = self.dim;
        let mut out = CVector::zeros(n);
        for (i, xi) in x.iter().enumerate() {
            if *xi == ZERO {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if *yj == ZERO {
                    continue;
                }
                let s = xi * yj;
                for &(k, c) in &self.table[i * n + j] {
                    out[k] += s * c;
                }
            }
        }
        out
    }

    pub fn square(&self, x: &CVector) -> CVector {
        self.product(x, x)
    }

    /// `x^k` by repeated multiplication (`x^0 = 1`).
    pub fn power(&self, x: &CVector, k: usize) -> CVector {
        let mut p = self.unit.clone();
        for _ in 0..k {
            p = self.product(&p, x);
        }
        p
    }

    /// `[x, a, y] = (x∘a)∘y − (y∘a)∘x`.
    pub fn associator(&self, x: &CVector, a: &CVector, y: &CVector) -> CVector {
        self.product(&self.product(x, a), y) - self.product(&self.product(y, a), x)
    }

    /// Matrix of `M_a`, column `j` being `a ∘ b_j`.
    pub fn mult_operator(&self, a: &CVector) -> CMatrix {
        self.check_len(a);
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for (k, ak) in a.iter().enumerate() {
            if *ak == ZERO {
                continue;
            }
            for &(r, c, v) in &self.basis_ops[k].entries {
                m[(r, c)] += ak * v;
            }
        }
        m
    }

    /// `U_{a,c} = M_c M_a + M_a M_c − M_{a∘c}`.
    pub fn u_operator(&self, a: &CVector, c: &CVector) -> CMatrix {
        let ma = self.mult_operator(a);
        let mc = self.mult_operator(c);
        &mc * &ma + &ma * &mc - self.mult_operator(&self.product(a, c))
    }

    pub fn u(&self, a: &CVector) -> CMatrix {
        self.u_operator(a, a)
    }

    /// `x* = S·conj(x)`.
    pub fn star(&self, x: &CVector) -> CVector {
        let c = x.map(|z| z.conj());
        if self.star_is_identity {
            c
        } else {
            &self.star * c
        }
    }

    pub fn is_self_adjoint(&self, x: &CVector, tol: &Tolerance) -> bool {
        max_abs((self.star(x) - x).iter()) <= tol.abs_eps
    }

    /// `‖M_a M_b − M_b M_a‖_max`.
    pub fn commutator_residual(&self, a: &CVector, b: &CVector) -> f64 {
        let ma = self.mult_operator(a);
        let mb = self.mult_operator(b);
        max_abs((&ma * &mb - &mb * &ma).iter())
    }

    pub fn operator_commute(&self, a: &CVector, b: &CVector, tol: &Tolerance) -> bool {
        self.commutator_residual(a, b) <= tol.abs_eps
    }

    /// Basis of `{y : [x, b_i, y] = 0 for all i}`.
    pub fn commutant(&self, x: &CVector, tol: &Tolerance) -> Vec<CVector> {
        let n = self.dim;
        let mx = self.mult_operator(x);
        let mut stacked = CMatrix::zeros(n * n, n);
        for i in 0..n {
            let xb = self.product(x, &self.basis(i));
            let block = self.mult_operator(&xb) - &mx * self.basis_ops[i].to_dense();
            stacked.rows_mut(i * n, n).copy_from(&block);
        }
        kernel_basis_floored(&stacked, tol)
    }

    fn compute_center(&self, tol: &Tolerance) -> Vec<CVector> {
        let n = self.dim;
        // Refine K ← K·ker(A_k K) where A_k z stacks [z, b_a, b_k] over a.
        let mut k_basis = CMatrix::identity(n, n);
        for k in 0..n {
            let r = k_basis.ncols();
            if r == 0 {
                break;
            }
            let mut stacked = CMatrix::zeros(n * n, r);
            let bk = &self.basis_ops[k];
            for a in 0..n {
                let ba = &self.basis_ops[a];
                let pka = self.structure(k, a);
                for col in 0..r {
                    let z = k_basis.column(col).into_owned();
                    let mut v = bk.apply(&ba.apply(&z));
                    for &(l, c) in pka {
                        v -= self.basis_ops[l].apply(&z) * c;
                    }
                    stacked.view_mut((a * n, col), (n, 1)).copy_from(&v);
                }
            }
            if max_abs(stacked.iter()) <= tol.abs_eps {
                continue;
            }
            let ker = kernel_basis_floored(&stacked, tol);
            let mut w = CMatrix::zeros(r, ker.len());
            for (c, v) in ker.iter().enumerate() {
                w.set_column(c, v);
            }
            k_basis = &k_basis * w;
        }
        (0..k_basis.ncols()).map(|c| k_basis.column(c).into_owned()).collect()
    }

    /// Orthonormal basis of the center `Z(A)`.
    pub fn center_basis(&self, tol: &Tolerance) -> Vec<CVector> {
        if *tol == Tolerance::default() {
            self.center.get_or_init(|| self.compute_center(tol)).clone()
        } else {
            self.compute_center(tol)
        }
    }

    /// Cached center for the default tolerance.
    pub fn center(&self) -> &[CVector] {
        self.center.get_or_init(|| self.compute_center(&Tolerance::default()))
    }

    /// Distance (max-abs) from `v` to the span of the center.
    pub fn center_residual(&self, v: &CVector) -> f64 {
        let mut r = v.clone();
        for z in self.center() {
            let c = z.dotc(v);
            r -= z * c;
        }
        max_abs(r.iter())
    }

    /// Orthogonal projection of `v` onto the center span.
    pub fn center_projection(&self, v: &CVector) -> CVector {
        let mut p = self.zero();
        for z in self.center() {
            p += z * z.dotc(v);
        }
        p
    }

    /// Largest center residual over the columns of `m`.
    pub fn center_valued_residual(&self, m: &CMatrix) -> f64 {
        (0..m.ncols()).map(|c| self.center_residual(&m.column(c).into_owned())).fold(0.0, f64::max)
    }

    /// Solves `a∘b = 1`, `a²∘b = a` jointly.
    pub fn jordan_inverse(&self, a: &CVector, tol: &Tolerance) -> Result<CVector, AlgebraError> {
        let n = self.dim;
        let mut stacked = CMatrix::zeros(2 * n, n);
        stacked.rows_mut(0, n).copy_from(&self.mult_operator(a));
        stacked.rows_mut(n, n).copy_from(&self.mult_operator(&self.square(a)));
        let mut rhs = CVector::zeros(2 * n);
        rhs.rows_mut(0, n).copy_from(&self.unit);
        rhs.rows_mut(n, n).copy_from(a);
        solve_linear(&stacked, &rhs, tol).map_err(|_| AlgebraError::NotInvertible)
    }

    pub fn is_projection(&self, p: &CVector, tol: &Tolerance) -> bool {
        self.is_self_adjoint(p, tol) && max_abs((self.square(p) - p).iter()) <= tol.abs_eps
    }

    pub fn is_symmetry(&self, s: &CVector, tol: &Tolerance) -> bool {
        self.is_self_adjoint(s, tol) && max_abs((self.square(s) - &self.unit).iter()) <= tol.abs_eps
    }

    pub fn to_element(&self, coords: CVector) -> Element {
        Element { algebra: self.name.clone(), coords }
    }

    pub fn to_linop(&self, matrix: CMatrix) -> LinOp {
        LinOp { algebra: self.name.clone(), matrix }
    }

    pub fn to_json(&self) -> AlgebraJson {
        AlgebraJson {
            name: self.name.clone(),
            dim: self.dim,
            unit: self.unit.clone(),
            structure: self.structure_entries().into_iter().map(|(i, j, k, c)| (i, j, k, c.re, c.im)).collect(),
            star: self.star.clone(),
        }
    }

    pub fn from_json(j: &AlgebraJson) -> Result<Self, AlgebraError> {
        JordanAlgebra::new(
            &j.name,
            j.dim,
            j.structure.iter().map(|&(i, j, k, re, im)| (i, j, k, C64::new(re, im))),
            j.unit.clone(),
            j.star.clone(),
        )
    }

    /// Copy of the algebra with a single structure constant (and its mirror) shifted.
    pub fn perturbed(&self, i: usize, j: usize, k: usize, delta: C64) -> Result<Self, AlgebraError> {
        let mut entries = self.structure_entries();
        entries.push((i, j, k, delta));
        if i != j {
            entries.push((j, i, k, delta));
        }
        JordanAlgebra::new(&format!("{}~perturbed", self.name), self.dim, entries, self.unit.clone(), self.star.clone())
    }
}

/// Coordinates of an element together with the name of its algebra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Element {
    pub algebra: String,
    #[serde(with = "json::vector")]
    pub coords: CVector,
}

/// A linear operator on (or between) algebras, stored as a matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinOp {
    pub algebra: String,
    #[serde(with = "json::matrix")]
    pub matrix: CMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub name: String,
    pub dim: usize,
    #[serde(with = "json::vector")]
    pub unit: CVector,
    pub structure: Vec<(usize, usize, usize, f64, f64)>,
    #[serde(with = "json::matrix")]
    pub star: CMatrix,
}

/// `max ‖J(b_i∘b_j) − J(b_i)∘J(b_j)‖∞` over basis pairs.
pub fn homomorphism_residual(a: &JordanAlgebra, b: &JordanAlgebra, j: &CMatrix) -> f64 {
    assert_eq!(j.ncols(), a.dim());
    assert_eq!(j.nrows(), b.dim());
    let images: Vec<CVector> = (0..a.dim()).map(|i| j.column(i).into_owned()).collect();
    let mut worst = 0.0f64;
    for i in 0..a.dim() {
        let mi = b.mult_operator(&images[i]);
        for k in i..a.dim() {
            let mut lhs = CVector::zeros(b.dim());
            for &(l, c) in a.structure(i, k) {
                lhs += &images[l] * c;
            }
            let rhs = &mi * &images[k];
            worst = worst.max(max_abs((lhs - rhs).iter()));
        }
    }
    worst
}

pub fn is_jordan_homomorphism(a: &JordanAlgebra, b: &JordanAlgebra, j: &CMatrix, tol: &Tolerance) -> bool {
    homomorphism_residual(a, b, j) <= tol.abs_eps
}

/// `max |J S_A − S_B conj(J)|`, i.e. failure of `J(x*) = J(x)*`.
pub fn star_map_residual(a: &JordanAlgebra, b: &JordanAlgebra, j: &CMatrix) -> f64 {
    let lhs = j * a.star_matrix();
    let rhs = b.star_matrix() * j.map(|z| z.conj());
    max_abs((lhs - rhs).iter())
}

pub fn is_star_map(a: &JordanAlgebra, b: &JordanAlgebra, j: &CMatrix, tol: &Tolerance) -> bool {
    is_jordan_homomorphism(a, b, j, tol) && star_map_residual(a, b, j) <= tol.abs_eps
}

/// Axiom residuals on `samples` random triples.
pub fn check_axioms(alg: &JordanAlgebra, samples: usize, seed: u64, tol: &Tolerance) -> Vec<Record> {
    let n = alg.dim();
    let mut comm = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for &(k, c) in alg.structure(i, j) {
                let mirror = alg.structure(j, i).iter().find(|e| e.0 == k).map_or(ZERO, |e| e.1);
                comm = comm.max((c - mirror).norm());
            }
        }
    }
    let mut jordan = 0.0f64;
    let mut unit = 0.0f64;
    let mut invol = 0.0f64;
    let mut star_mult = 0.0f64;
    for s in 0..samples {
        let mut rng = rng_from_seed(derive_seed(seed, s as u64));
        let a = random_vector(&mut rng, n, 1.0);
        let b = random_vector(&mut rng, n, 1.0);
        let a2 = alg.square(&a);
        let lhs = alg.product(&alg.product(&a2, &b), &a);
        let rhs = alg.product(&alg.product(&a, &b), &a2);
        jordan = jordan.max(max_abs((lhs - rhs).iter()));
        unit = unit.max(max_abs((alg.product(alg.unit(), &a) - &a).iter()));
        invol = invol.max(max_abs((alg.star(&alg.star(&a)) - &a).iter()));
        let sm = alg.star(&alg.product(&a, &b)) - alg.product(&alg.star(&a), &alg.star(&b));
        star_mult = star_mult.max(max_abs(sm.iter()));
    }
    let star_unit = max_abs((alg.star(alg.unit()) - alg.unit()).iter());
    let t = tol.abs_eps;
    let name = alg.name();
    vec![
        Record::new("commutativity", name, seed, comm, t, "max |c_ijk - c_jik|"),
        Record::new("jordan_identity", name, seed, jordan, t, format!("(a²∘b)∘a - (a∘b)∘a² over {samples} samples")),
        Record::new("unit", name, seed, unit, t, "1∘a - a"),
        Record::new("star_involutive", name, seed, invol, t, "(a*)* - a"),
        Record::new("star_multiplicative", name, seed, star_mult, t, "(a∘b)* - a*∘b*"),
        Record::new("star_unit", name, seed, star_unit, t, "1* - 1"),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::{matrix_coords, matrix_jordan, matrix_of, spin_factor};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn e(n: usize, i: usize, j: usize) -> CVector {
        let mut m = CMatrix::zeros(n, n);
        m[(i, j)] = ONE;
        matrix_coords(&m)
    }

    fn close(a: &CVector, b: &CVector, eps: f64) -> bool {
        max_abs((a - b).iter()) <= eps
    }

    fn rand_el(alg: &JordanAlgebra, seed: u64) -> CVector {
        random_vector(&mut rng_from_seed(seed), alg.dim(), 1.0)
    }

    #[test]
    fn rejects_empty_and_asymmetric() {
        assert_eq!(
            JordanAlgebra::new("x", 0, vec![], CVector::zeros(0), CMatrix::zeros(0, 0)).unwrap_err(),
            AlgebraError::Empty
        );
        let bad = vec![(0, 0, 0, ONE), (0, 1, 1, ONE), (1, 0, 1, C64::new(2.0, 0.0))];
        let u = CVector::from_vec(vec![ONE, ZERO]);
        assert!(matches!(
            JordanAlgebra::new("x", 2, bad, u, CMatrix::identity(2, 2)),
            Err(AlgebraError::NotCommutative { .. }) | Err(AlgebraError::BadUnit(_))
        ));
    }

    #[test]
    fn product_examples() {
        let (m2, _) = matrix_jordan(2).unwrap();
        let x = rand_el(&m2, 1);
        let y = rand_el(&m2, 2);
        assert!(close(&m2.product(m2.unit(), &x), &x, 1e-14));
        assert!(close(&m2.product(&e(2, 0, 0), &e(2, 0, 1)), &(e(2, 0, 1) * C64::new(0.5, 0.0)), 1e-15));
        assert!(close(&m2.product(&x, &y), &m2.product(&y, &x), 1e-14));
    }

    #[test]
    fn product_matches_symmetrized_matrix_product() {
        let (m3, _) = matrix_jordan(3).unwrap();
        for s in 0..20 {
            let x = rand_el(&m3, 2 * s);
            let y = rand_el(&m3, 2 * s + 1);
            let (a, b) = (matrix_of(&x, 3), matrix_of(&y, 3));
            let oracle = (&a * &b + &b * &a) * C64::new(0.5, 0.0);
            assert!(close(&m3.product(&x, &y), &matrix_coords(&oracle), 1e-13));
        }
    }

    #[test]
    fn associator_examples() {
        let (m2, _) = matrix_jordan(2).unwrap();
        let a = rand_el(&m2, 3);
        let y = rand_el(&m2, 4);
        assert!(max_abs(m2.associator(m2.unit(), &a, &y).iter()) < 1e-14);
        assert!(max_abs(m2.associator(&y, &a, &y).iter()) < 1e-14);
        let e11 = e(2, 0, 0);
        let s = e(2, 0, 1) + e(2, 1, 0);
        let got = m2.associator(&e11, &e11, &s);
        assert!(close(&got, &(s * C64::new(0.25, 0.0)), 1e-15));
    }

    #[test]
    fn mult_operator_examples() {
        let (m2, _) = matrix_jordan(2).unwrap();
        assert_eq!(m2.mult_operator(m2.unit()), CMatrix::identity(4, 4));
        let got = m2.mult_operator(&e(2, 0, 0)) * e(2, 0, 1);
        assert!(close(&got, &(e(2, 0, 1) * C64::new(0.5, 0.0)), 1e-15));
        let x = rand_el(&m2, 5);
        let y = rand_el(&m2, 6);
        let lhs = m2.mult_operator(&(&x + &y));
        let rhs = m2.mult_operator(&x) + m2.mult_operator(&y);
        assert!(max_abs((lhs - rhs).iter()) < 1e-14);
    }

    #[test]
    fn u_operator_examples() {
        let (m2, _) = matrix_jordan(2).unwrap();
        let one = m2.unit().clone();
        assert!(max_abs((m2.u(&one) - CMatrix::identity(4, 4)).iter()) < 1e-14);
        let x = rand_el(&m2, 7);
        let a = matrix_of(&e(2, 0, 0), 2);
        let oracle = matrix_coords(&(&a * matrix_of(&x, 2) * &a));
        assert!(close(&(m2.u(&e(2, 0, 0)) * &x), &oracle, 1e-14));
        let (m3, _) = matrix_jordan(3).unwrap();
        let s = e(3, 0, 1) + e(3, 1, 0) + e(3, 2, 2);
        let us = m3.u(&s);
        assert!(max_abs((&us * &us - CMatrix::identity(9, 9)).iter()) < 1e-14);
        let y = rand_el(&m3, 8);
        let sm = matrix_of(&s, 3);
        assert!(close(&(&us * &y), &matrix_coords(&(&sm * matrix_of(&y, 3) * &sm)), 1e-13));
    }

    #[test]
    fn operator_commute_examples() {
        let (m2, _) = matrix_jordan(2).unwrap();
        let a = rand_el(&m2, 9);
        assert!(m2.operator_commute(&a, &m2.square(&a), &tol()));
        assert!(m2.operator_commute(&e(2, 0, 0), &e(2, 1, 1), &tol()));
        assert!(!m2.operator_commute(&e(2, 0, 0), &(e(2, 0, 1) + e(2, 1, 0)), &tol()));
    }

    #[test]
    fn commutant_examples() {
        let (m2, _) = matrix_jordan(2).unwrap();
        assert_eq!(m2.commutant(m2.unit(), &tol()).len(), 4);
        let c = m2.commutant(&e(2, 0, 0), &tol());
        assert_eq!(c.len(), 2);
        // every vector lies in span{e11, e22}
        for v in &c {
            assert!(v[1].norm() < 1e-10 && v[2].norm() < 1e-10);
        }
        let v = spin_factor(4).unwrap();
        let x = rand_el(&v, 10);
        assert_eq!(v.commutant(&x, &tol()).len(), 2);
    }

    #[test]
    fn center_examples() {
        for n in 2..5 {
            let (m, _) = matrix_jordan(n).unwrap();
            let z = m.center_basis(&tol());
            assert_eq!(z.len(), 1);
            assert!(m.center_residual(m.unit()) < 1e-12);
        }
        assert_eq!(spin_factor(5).unwrap().center_basis(&tol()).len(), 1);
    }

    #[test]
    fn center_elements_are_central() {
        let (m3, _) = matrix_jordan(3).unwrap();
        for z in m3.center() {
            for i in 0..9 {
                for j in 0..9 {
                    let r = m3.associator(z, &m3.basis(i), &m3.basis(j));
                    assert!(max_abs(r.iter()) <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn inverse_examples() {
        let (m2, _) = matrix_jordan(2).unwrap();
        let one = m2.unit().clone();
        assert!(close(&m2.jordan_inverse(&one, &tol()).unwrap(), &one, 1e-12));
        let d = e(2, 0, 0) * C64::new(2.0, 0.0) + e(2, 1, 1) * C64::new(4.0, 0.0);
        let want = e(2, 0, 0) * C64::new(0.5, 0.0) + e(2, 1, 1) * C64::new(0.25, 0.0);
        assert!(close(&m2.jordan_inverse(&d, &tol()).unwrap(), &want, 1e-12));
        assert_eq!(m2.jordan_inverse(&e(2, 0, 0), &tol()), Err(AlgebraError::NotInvertible));
    }

    #[test]
    fn inverse_properties() {
        let (m3, _) = matrix_jordan(3).unwrap();
        for s in 0..20 {
            let a = rand_el(&m3, 100 + s);
            let b = m3.jordan_inverse(&a, &tol()).unwrap();
            assert!(close(&m3.product(&a, &b), m3.unit(), 1e-9));
            assert!(close(&m3.product(&m3.square(&a), &b), &a, 1e-9));
            let back = m3.jordan_inverse(&b, &tol()).unwrap();
            assert!(close(&back, &a, 1e-8));
            let oracle = matrix_of(&a, 3).try_inverse().unwrap();
            assert!(close(&b, &matrix_coords(&oracle), 1e-8));
        }
    }

    #[test]
    fn projection_and_symmetry_examples() {
        let (m3, _) = matrix_jordan(3).unwrap();
        let one = m3.unit().clone();
        assert!(m3.is_projection(&one, &tol()) && m3.is_symmetry(&one, &tol()));
        let s = e(3, 0, 1) + e(3, 1, 0) + e(3, 2, 2);
        assert!(m3.is_symmetry(&s, &tol()) && !m3.is_projection(&s, &tol()));
        let z = m3.zero();
        assert!(m3.is_projection(&z, &tol()) && !m3.is_symmetry(&z, &tol()));
    }

    #[test]
    fn homomorphism_examples() {
        let (m2, _) = matrix_jordan(2).unwrap();
        let id = CMatrix::identity(4, 4);
        assert!(is_jordan_homomorphism(&m2, &m2, &id, &tol()));
        assert!(is_star_map(&m2, &m2, &id, &tol()));
        let s = e(2, 0, 1) + e(2, 1, 0);
        let us = m2.u(&s);
        assert!(is_jordan_homomorphism(&m2, &m2, &us, &tol()));
        assert!(is_star_map(&m2, &m2, &us, &tol()));
        let twice = id * C64::new(2.0, 0.0);
        assert!(!is_jordan_homomorphism(&m2, &m2, &twice, &tol()));
    }

    #[test]
    fn axioms_hold_on_matrix_algebra() {
        let (m3, _) = matrix_jordan(3).unwrap();
        for r in check_axioms(&m3, 50, 1, &tol()) {
            assert!(r.residual <= 1e-12, "{} residual {}", r.check_name, r.residual);
        }
    }

    #[test]
    fn corrupted_constant_breaks_jordan_identity() {
        let (m3, _) = matrix_jordan(3).unwrap();
        // perturb (e12 ∘ e21) along e33, leaving the unit intact
        let bad = m3.perturbed(1, 3, 8, C64::new(1e-3, 0.0)).unwrap();
        let recs = check_axioms(&bad, 50, 2, &tol());
        let jr = recs.iter().find(|r| r.check_name == "jordan_identity").unwrap();
        assert!(jr.residual > 1e-4, "residual {}", jr.residual);
    }

    #[test]
    fn power_associativity() {
        let (m3, _) = matrix_jordan(3).unwrap();
        for s in 0..10 {
            let a = rand_el(&m3, 200 + s) * C64::new(0.5, 0.0);
            for i in 0..=6 {
                for j in 0..=(6 - i) {
                    let lhs = m3.product(&m3.power(&a, i), &m3.power(&a, j));
                    assert!(close(&lhs, &m3.power(&a, i + j), 1e-9));
                }
            }
        }
    }

    #[test]
    fn linearized_commutativity_agrees() {
        let (m2, _) = matrix_jordan(2).unwrap();
        let t = tol();
        for s in 0..1000u64 {
            let mut rng = rng_from_seed(derive_seed(77, s));
            let x = random_vector(&mut rng, 4, 1.0);
            // every third pair is commuting by construction
            let y = if s % 3 == 0 { m2.square(&x) * C64::new(0.7, 0.1) + &x } else { random_vector(&mut rng, 4, 1.0) };
            let assoc_zero = (0..4).all(|a| max_abs(m2.associator(&x, &m2.basis(a), &y).iter()) <= t.abs_eps);
            assert_eq!(assoc_zero, m2.operator_commute(&x, &y, &t));
        }
    }

    #[test]
    fn json_roundtrip() {
        let (m2, _) = matrix_jordan(2).unwrap();
        let text = serde_json::to_string(&m2.to_json()).unwrap();
        let back = JordanAlgebra::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back.structure_entries(), m2.structure_entries());
        assert_eq!(back.unit(), m2.unit());
    }
}
