//! Capelli polynomials and linear-independence tests in full matrix algebras.

use crate::algebra::JordanAlgebra;
use crate::kit::ElementaryKit;
use crate::numerics::{derive_seed, random_matrix, rng_from_seed, CMatrix, CVector, Tolerance, C64};
use crate::zoo::associative_embedding;
use itertools::Itertools;
use thiserror::Error;

/// Largest arity accepted (9! ≈ 3.6·10⁵ terms).
pub const MAX_ARITY: usize = 9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CapelliError {
    #[error("arity {0} exceeds the factorial guard")]
    SizeGuard(usize),
    #[error("need n tuple entries and n-1 plug-ins of one square size")]
    Shape,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapelliInput {
    pub a: Vec<CMatrix>,
    pub x: Vec<CMatrix>,
}

fn permutation_sign(p: &[usize]) -> f64 {
    let inversions = (0..p.len()).flat_map(|i| (i + 1..p.len()).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn check_shape(input: &CapelliInput) -> Result<usize, CapelliError> {
    let n = input.a.len();
    if n > MAX_ARITY {
        return Err(CapelliError::SizeGuard(n));
    }
    if n == 0 || input.x.len() + 1 != n {
        return Err(CapelliError::Shape);
    }
    let k = input.a[0].nrows();
    if input.a.iter().chain(&input.x).any(|m| m.nrows() != k || m.ncols() != k) {
        return Err(CapelliError::Shape);
    }
    Ok(k)
}

/// `Σ_σ sign(σ) a_{σ(1)} x₁ a_{σ(2)} x₂ ⋯ x_{n−1} a_{σ(n)}`.
pub fn capelli_eval(input: &CapelliInput) -> Result<CMatrix, CapelliError> {
    let k = check_shape(input)?;
    let n = input.a.len();
    let mut total = CMatrix::zeros(k, k);
    for perm in (0..n).permutations(n) {
        let mut prod = input.a[perm[0]].clone();
        for (slot, &idx) in perm.iter().enumerate().skip(1) {
            prod = prod * &input.x[slot - 1] * &input.a[idx];
        }
        total += prod * C64::new(permutation_sign(&perm), 0.0);
    }
    Ok(total)
}

fn normalized(a: &[CMatrix], tol: &Tolerance) -> Option<Vec<CMatrix>> {
    a.iter()
        .map(|m| {
            let n = m.norm();
            (n > tol.abs_eps).then(|| m / C64::new(n, 0.0))
        })
        .collect()
}

/// Probabilistic test: independent as soon as one random plug-in gives a
/// value above `abs_eps`. Entries are scaled to unit Frobenius norm first.
pub fn independence_capelli(a: &[CMatrix], trials: usize, seed: u64, tol: &Tolerance) -> Result<bool, CapelliError> {
    if a.is_empty() {
        return Ok(true);
    }
    if a.len() > MAX_ARITY {
        return Err(CapelliError::SizeGuard(a.len()));
    }
    let Some(a) = normalized(a, tol) else {
        return Ok(false);
    };
    let k = a[0].nrows();
    for t in 0..trials {
        let mut rng = rng_from_seed(derive_seed(seed, t as u64));
        let x = (1..a.len()).map(|_| random_matrix(&mut rng, k, k, 1.0)).collect();
        let value = capelli_eval(&CapelliInput { a: a.clone(), x })?;
        if value.iter().any(|z| z.norm() > tol.abs_eps) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Deterministic oracle: the Gram matrix of the vectorized entries has full rank.
///
/// Rank is read off the singular values of the stacked vectors (the square
/// roots of the Gram eigenvalues) against `abs_eps·max(σ_max, 1)`.
pub fn independence_gram(a: &[CMatrix], tol: &Tolerance) -> bool {
    if a.is_empty() {
        return true;
    }
    let Some(a) = normalized(a, tol) else {
        return false;
    };
    let cols: Vec<_> = a.iter().map(|m| CVector::from_iterator(m.len(), m.iter().copied())).collect();
    let v = CMatrix::from_columns(&cols);
    let sv = v.singular_values();
    let smax = sv.max().max(1.0);
    sv.iter().filter(|s| **s > tol.abs_eps * smax).count() == a.len()
}

/// `{[u²,v], [u,v²], [u,v]}` in a faithful associative representation, if one exists.
pub fn kit_commutator_triple(alg: &JordanAlgebra, kit: &ElementaryKit) -> Option<Vec<CMatrix>> {
    let v = kit.v.as_ref()?;
    let phi = associative_embedding(alg)?;
    let (pu, pv) = (phi(&kit.u), phi(v));
    let comm = |a: &CMatrix, b: &CMatrix| a * b - b * a;
    Some(vec![comm(&(&pu * &pu), &pv), comm(&pu, &(&pv * &pv)), comm(&pu, &pv)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kit::build_kit;
    use crate::numerics::{max_abs, ONE};
    use crate::zoo::by_name;

    fn e(n: usize, i: usize, j: usize) -> CMatrix {
        let mut m = CMatrix::zeros(n, n);
        m[(i, j)] = ONE;
        m
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn c2_matches_definition() {
        let mut rng = rng_from_seed(1);
        let (a1, a2, x) = (random_matrix(&mut rng, 3, 3, 1.0), random_matrix(&mut rng, 3, 3, 1.0), random_matrix(&mut rng, 3, 3, 1.0));
        let got = capelli_eval(&CapelliInput { a: vec![a1.clone(), a2.clone()], x: vec![x.clone()] }).unwrap();
        let want = &a1 * &x * &a2 - &a2 * &x * &a1;
        assert!(max_abs((got - want).iter()) < 1e-14);
        let same = capelli_eval(&CapelliInput { a: vec![a1.clone(), a1], x: vec![x] }).unwrap();
        assert!(max_abs(same.iter()) < 1e-14);
    }

    #[test]
    fn c2_on_matrix_units() {
        let got = capelli_eval(&CapelliInput { a: vec![e(2, 0, 0), e(2, 1, 1)], x: vec![e(2, 0, 1)] }).unwrap();
        assert_eq!(got, e(2, 0, 1));
    }

    #[test]
    fn guards() {
        let a = vec![CMatrix::identity(2, 2); 10];
        let x = vec![CMatrix::identity(2, 2); 9];
        assert_eq!(capelli_eval(&CapelliInput { a, x }), Err(CapelliError::SizeGuard(10)));
        assert_eq!(capelli_eval(&CapelliInput { a: vec![CMatrix::identity(2, 2)], x: vec![CMatrix::identity(2, 2)] }), Err(CapelliError::Shape));
    }

    #[test]
    fn alternating_and_multilinear() {
        let mut rng = rng_from_seed(5);
        let a: Vec<CMatrix> = (0..3).map(|_| random_matrix(&mut rng, 3, 3, 1.0)).collect();
        let x: Vec<CMatrix> = (0..2).map(|_| random_matrix(&mut rng, 3, 3, 1.0)).collect();
        let base = capelli_eval(&CapelliInput { a: a.clone(), x: x.clone() }).unwrap();
        let swapped = capelli_eval(&CapelliInput { a: vec![a[1].clone(), a[0].clone(), a[2].clone()], x: x.clone() }).unwrap();
        assert!(max_abs((&base + &swapped).iter()) < 1e-12);
        let extra = random_matrix(&mut rng, 3, 3, 1.0);
        let c = C64::new(0.3, -1.2);
        let mix = capelli_eval(&CapelliInput { a: vec![&a[0] * c + &extra, a[1].clone(), a[2].clone()], x: x.clone() }).unwrap();
        let part = capelli_eval(&CapelliInput { a: vec![extra, a[1].clone(), a[2].clone()], x: x.clone() }).unwrap();
        assert!(max_abs((mix - (&base * c + part)).iter()) < 1e-12);
        let y = random_matrix(&mut rng, 3, 3, 1.0);
        let mix = capelli_eval(&CapelliInput { a: a.clone(), x: vec![&x[0] * c + &y, x[1].clone()] }).unwrap();
        let part = capelli_eval(&CapelliInput { a, x: vec![y, x[1].clone()] }).unwrap();
        assert!(max_abs((mix - (base * c + part)).iter()) < 1e-12);
    }

    #[test]
    fn independence_examples() {
        let pair = [CMatrix::identity(2, 2), e(2, 0, 1)];
        assert!(independence_capelli(&pair, 8, 0, &tol()).unwrap());
        assert!(independence_gram(&pair, &tol()));
        let a = random_matrix(&mut rng_from_seed(2), 3, 3, 1.0);
        let dep = [a.clone(), &a * C64::new(2.0, 0.0)];
        assert!(!independence_capelli(&dep, 8, 0, &tol()).unwrap());
        assert!(!independence_gram(&dep, &tol()));
        assert!(independence_gram(&[], &tol()));
    }

    #[test]
    fn kit_triples_are_independent() {
        for name in ["matrix:3", "matrix:4", "matrix:5", "sum:matrix:3+matrix:4"] {
            let alg = by_name(name).unwrap();
            let kit = build_kit(&alg, &tol()).unwrap();
            let triple = kit_commutator_triple(&alg, &kit).unwrap();
            assert!(independence_capelli(&triple, 8, 1, &tol()).unwrap(), "{name}");
            assert!(independence_gram(&triple, &tol()), "{name}");
        }
        let spin = by_name("spin:4").unwrap();
        assert!(kit_commutator_triple(&spin, &build_kit(&spin, &tol()).unwrap()).is_none());
    }
}
