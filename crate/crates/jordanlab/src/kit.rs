//! Elementary-operator kits `(u; E₀, E₁, E₂)` with `E_i(u^j) = δ_ij·1`.

use crate::algebra::{Element, Family, JordanAlgebra, LinOp};
use crate::numerics::{derive_seed, max_abs, operator_norm_estimate, random_vector, rng_from_seed, CMatrix, CVector, Tolerance, C64, ONE};
use crate::report::Record;
use crate::zoo::{self, matrix_coords, spin_frame, ZooError};
use serde::{Deserialize, Serialize};
use std::ops::Range;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KitError {
    #[error("frame invalid: {0}")]
    FrameInvalid(String),
    #[error("kit mismatch: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Zoo(#[from] ZooError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementaryKit {
    pub algebra: String,
    pub u: CVector,
    /// Companion of `u` whose commutators with `u` are independent.
    pub v: Option<CVector>,
    pub e0: CMatrix,
    pub e1: CMatrix,
    pub e2: Option<CMatrix>,
    pub log: Vec<String>,
}

impl ElementaryKit {
    pub fn ops(&self) -> Vec<&CMatrix> {
        let mut out = vec![&self.e0, &self.e1];
        out.extend(self.e2.as_ref());
        out
    }

    pub fn has_e2(&self) -> bool {
        self.e2.is_some()
    }
}

#[derive(Serialize, Deserialize)]
struct KitJson {
    algebra: String,
    u: Element,
    #[serde(default)]
    v: Option<Element>,
    #[serde(rename = "E0")]
    e0: LinOp,
    #[serde(rename = "E1")]
    e1: LinOp,
    #[serde(rename = "E2")]
    e2: Option<LinOp>,
    log: Vec<String>,
}

impl Serialize for ElementaryKit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let name = &self.algebra;
        let el = |c: &CVector| Element { algebra: name.clone(), coords: c.clone() };
        let op = |m: &CMatrix| LinOp { algebra: name.clone(), matrix: m.clone() };
        KitJson {
            algebra: name.clone(),
            u: el(&self.u),
            v: self.v.as_ref().map(el),
            e0: op(&self.e0),
            e1: op(&self.e1),
            e2: self.e2.as_ref().map(op),
            log: self.log.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ElementaryKit {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let k = KitJson::deserialize(d)?;
        Ok(ElementaryKit {
            algebra: k.algebra,
            u: k.u.coords,
            v: k.v.map(|e| e.coords),
            e0: k.e0.matrix,
            e1: k.e1.matrix,
            e2: k.e2.map(|o| o.matrix),
            log: k.log,
        })
    }
}

/// `q`, `r ≤ p₂` and a symmetry `t` with `U_t(r) = q`.
#[derive(Debug, Clone, PartialEq)]
pub struct Leftover {
    pub q: CVector,
    pub r: CVector,
    pub t: CVector,
}

/// Three projections exchanged by `s: p₁↔p₂`, `s': p₁↔p₃`, plus leftover projections.
#[derive(Debug, Clone, PartialEq)]
pub struct Case2Frame {
    pub p: [CVector; 3],
    pub s: CVector,
    pub s_prime: CVector,
    pub leftovers: Vec<Leftover>,
}

/// Four projections with `s: p₁↔p₂`, `s': p₁↔p₃`, `s'': p₁↔p₄`.
#[derive(Debug, Clone, PartialEq)]
pub struct Case1Frame {
    pub p: [CVector; 4],
    pub s: CVector,
    pub s_prime: CVector,
    pub s_double: CVector,
}

fn close(a: &CVector, b: &CVector, tol: &Tolerance) -> bool {
    max_abs((a - b).iter()) <= tol.abs_eps
}

fn check_projections(alg: &JordanAlgebra, ps: &[&CVector], tol: &Tolerance) -> Result<(), KitError> {
    let mut sum = alg.zero();
    for (i, p) in ps.iter().enumerate() {
        if !alg.is_projection(p, tol) {
            return Err(KitError::FrameInvalid(format!("element {i} is not a projection")));
        }
        for (j, q) in ps.iter().enumerate().skip(i + 1) {
            if max_abs(alg.product(p, q).iter()) > tol.abs_eps {
                return Err(KitError::FrameInvalid(format!("projections {i} and {j} are not orthogonal")));
            }
        }
        sum += *p;
    }
    if !close(&sum, alg.unit(), tol) {
        return Err(KitError::FrameInvalid("projections do not sum to the unit".into()));
    }
    Ok(())
}

fn check_exchange(alg: &JordanAlgebra, s: &CVector, from: &CVector, to: &CVector, label: &str, tol: &Tolerance) -> Result<(), KitError> {
    if !alg.is_symmetry(s, tol) || !close(&(alg.u(s) * from), to, tol) {
        return Err(KitError::FrameInvalid(format!("exchange {label} fails")));
    }
    Ok(())
}

fn two_jordan(alg: &JordanAlgebra, a: &CVector, b: &CVector) -> CVector {
    alg.product(a, b) * C64::new(2.0, 0.0)
}

/// Case II construction: `u = 2s∘p₁`, `v = 2s'∘p₁`.
pub fn build_kit_case2(alg: &JordanAlgebra, f: &Case2Frame, tol: &Tolerance) -> Result<ElementaryKit, KitError> {
    let mut all: Vec<&CVector> = f.p.iter().collect();
    all.extend(f.leftovers.iter().map(|l| &l.q));
    check_projections(alg, &all, tol)?;
    check_exchange(alg, &f.s, &f.p[0], &f.p[1], "s", tol)?;
    check_exchange(alg, &f.s_prime, &f.p[0], &f.p[2], "s'", tol)?;
    for (k, l) in f.leftovers.iter().enumerate() {
        if !alg.is_projection(&l.r, tol) || !close(&alg.product(&f.p[1], &l.r), &l.r, tol) {
            return Err(KitError::FrameInvalid(format!("leftover {k}: r is not a subprojection of p2")));
        }
        check_exchange(alg, &l.t, &l.r, &l.q, &format!("t{k}"), tol)?;
    }
    let u = two_jordan(alg, &f.s, &f.p[0]);
    let v = two_jordan(alg, &f.s_prime, &f.p[0]);
    let (us, usp) = (alg.u(&f.s), alg.u(&f.s_prime));
    let up3 = alg.u(&f.p[2]);
    let q_sum = f.leftovers.iter().fold(alg.zero(), |acc, l| acc + &l.q);
    let e0 = &up3 + &usp * &up3 + &us * &usp * &up3 + alg.u(&q_sum);
    let d = alg.u(&f.p[0]) - &usp * &up3;
    let mut e2 = &d + &us * &d + &usp * &d;
    for l in &f.leftovers {
        let ut = alg.u(&l.t);
        e2 += &ut * (alg.u(&l.r) - &ut * alg.u(&l.q));
    }
    let e1 = &e2 * alg.mult_operator(&u);
    let mut log = vec!["case II".to_string(), "u = 2 s∘p1".into(), "v = 2 s'∘p1".into()];
    log.extend((0..f.leftovers.len()).map(|k| format!("leftover projection q{}", k + 1)));
    Ok(ElementaryKit { algebra: alg.name().to_string(), u, v: Some(v), e0, e1, e2: Some(e2), log })
}

/// Case I construction over four exchangeable projections.
pub fn build_kit_case1(alg: &JordanAlgebra, f: &Case1Frame, tol: &Tolerance) -> Result<ElementaryKit, KitError> {
    check_projections(alg, &f.p.iter().collect::<Vec<_>>(), tol)?;
    check_exchange(alg, &f.s, &f.p[0], &f.p[1], "s", tol)?;
    check_exchange(alg, &f.s_prime, &f.p[0], &f.p[2], "s'", tol)?;
    check_exchange(alg, &f.s_double, &f.p[0], &f.p[3], "s''", tol)?;
    let u = two_jordan(alg, &f.s, &f.p[0]);
    let v = two_jordan(alg, &f.s_prime, &f.p[0]);
    let (us, usp, usd) = (alg.u(&f.s), alg.u(&f.s_prime), alg.u(&f.s_double));
    let up3 = alg.u(&f.p[2]);
    let moved = &usp * &up3;
    let e0 = &up3 + &moved + &us * &moved + &usd * &moved;
    let d = alg.u(&f.p[0]) - &moved;
    let e2 = &d + &us * &d + &usp * &d + &usd * &d;
    let e1 = &e2 * alg.mult_operator(&u);
    let log = vec!["case I".to_string(), "u = 2 s∘p1".into(), "v = 2 s'∘p1".into()];
    Ok(ElementaryKit { algebra: alg.name().to_string(), u, v: Some(v), e0, e1, e2: Some(e2), log })
}

/// Spin-type kit: `u = s`, `E₁ = M_s M_{2p₂} M_{2p₁}`, `E₀ = E₁M_s`.
pub fn build_kit_spin(alg: &JordanAlgebra, p1: &CVector, p2: &CVector, s: &CVector, tol: &Tolerance) -> Result<ElementaryKit, KitError> {
    check_projections(alg, &[p1, p2], tol)?;
    check_exchange(alg, s, p1, p2, "s", tol)?;
    let two = C64::new(2.0, 0.0);
    let ms = alg.mult_operator(s);
    let e1 = &ms * alg.mult_operator(&(p2 * two)) * alg.mult_operator(&(p1 * two));
    let e0 = &e1 * &ms;
    let log = vec!["spin".to_string(), "u = s".into()];
    Ok(ElementaryKit { algebra: alg.name().to_string(), u: s.clone(), v: None, e0, e1, e2: None, log })
}

/// Block-diagonal gluing `E_i = Σ_k E_{k,i} U_{1_k}` over coordinate ranges.
pub fn glue_kits(name: &str, parts: &[(&ElementaryKit, Range<usize>)]) -> Result<ElementaryKit, KitError> {
    let dim = parts.iter().map(|p| p.1.end).max().unwrap_or(0);
    for (k, r) in parts {
        if k.u.len() != r.len() {
            return Err(KitError::Mismatch(format!("kit on {} does not fit its block", k.algebra)));
        }
    }
    let with_e2 = parts.iter().all(|p| p.0.has_e2());
    let with_v = parts.iter().all(|p| p.0.v.is_some());
    let mut u = CVector::zeros(dim);
    let mut v = CVector::zeros(dim);
    let mut e = [CMatrix::zeros(dim, dim), CMatrix::zeros(dim, dim), CMatrix::zeros(dim, dim)];
    let mut log = Vec::new();
    for (k, r) in parts {
        let (o, d) = (r.start, r.len());
        u.rows_mut(o, d).copy_from(&k.u);
        if let Some(kv) = &k.v {
            v.rows_mut(o, d).copy_from(kv);
        }
        for (i, op) in k.ops().into_iter().enumerate() {
            e[i].view_mut((o, o), (d, d)).copy_from(op);
        }
        log.push(format!("block {}..{} from {}: {}", r.start, r.end, k.algebra, k.log.join("; ")));
    }
    let [e0, e1, e2] = e;
    Ok(ElementaryKit {
        algebra: name.to_string(),
        u,
        v: with_v.then_some(v),
        e0,
        e1,
        e2: with_e2.then_some(e2),
        log,
    })
}

fn diag(n: usize, idx: impl IntoIterator<Item = usize>) -> CVector {
    let mut m = CMatrix::zeros(n, n);
    for i in idx {
        m[(i, i)] = ONE;
    }
    matrix_coords(&m)
}

/// Permutation symmetry swapping the given index pairs and fixing the rest.
fn swap_symmetry(n: usize, pairs: &[(usize, usize)]) -> CVector {
    let mut perm: Vec<usize> = (0..n).collect();
    for &(a, b) in pairs {
        perm.swap(a, b);
    }
    let mut m = CMatrix::zeros(n, n);
    for (i, &j) in perm.iter().enumerate() {
        m[(i, j)] = ONE;
    }
    matrix_coords(&m)
}

/// Case II frame on `M_n` (n ≥ 3) through the index order `perm`.
pub fn matrix_case2_frame(n: usize, perm: &[usize]) -> Case2Frame {
    let m = n / 3;
    let slot = |j: usize, k: usize| perm[3 * j + k];
    let p = [0, 1, 2].map(|k| diag(n, (0..m).map(|j| slot(j, k))));
    let s = swap_symmetry(n, &(0..m).map(|j| (slot(j, 0), slot(j, 1))).collect::<Vec<_>>());
    let s_prime = swap_symmetry(n, &(0..m).map(|j| (slot(j, 0), slot(j, 2))).collect::<Vec<_>>());
    let r_idx = slot(0, 1);
    let leftovers = (3 * m..n)
        .map(|i| Leftover { q: diag(n, [perm[i]]), r: diag(n, [r_idx]), t: swap_symmetry(n, &[(r_idx, perm[i])]) })
        .collect();
    Case2Frame { p, s, s_prime, leftovers }
}

/// Case I frame on `M_n` with `4 | n`.
pub fn matrix_case1_frame(n: usize, perm: &[usize]) -> Case1Frame {
    let m = n / 4;
    let slot = |j: usize, k: usize| perm[4 * j + k];
    let p = [0, 1, 2, 3].map(|k| diag(n, (0..m).map(|j| slot(j, k))));
    let swaps = |k: usize| swap_symmetry(n, &(0..m).map(|j| (slot(j, 0), slot(j, k))).collect::<Vec<_>>());
    Case1Frame { p, s: swaps(1), s_prime: swaps(2), s_double: swaps(3) }
}

fn albert_case2_frame(order: [usize; 3]) -> Case2Frame {
    let proj = |i: usize| {
        let mut x = CVector::zeros(27);
        x[i] = ONE;
        x
    };
    let pair = |a: usize, b: usize| match (a.min(b), a.max(b)) {
        (0, 1) => 0,
        (0, 2) => 1,
        _ => 2,
    };
    let [a, b, c] = order;
    Case2Frame {
        p: [proj(a), proj(b), proj(c)],
        s: zoo::albert_offdiag_symmetry(pair(a, b), 0, 1.0),
        s_prime: zoo::albert_offdiag_symmetry(pair(a, c), 0, 1.0),
        leftovers: Vec::new(),
    }
}

/// Which of two independent constructions to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Primary,
    Alternative,
}

fn family_kit(family: &Family, variant: Variant, tol: &Tolerance) -> Result<ElementaryKit, KitError> {
    let alt = variant == Variant::Alternative;
    match *family {
        Family::Matrix(2) => {
            let (m2, _) = zoo::matrix_jordan(2)?;
            let (a, b) = if alt { (3, 0) } else { (0, 3) };
            let mut p1 = m2.zero();
            let mut p2 = m2.zero();
            p1[a] = ONE;
            p2[b] = ONE;
            build_kit_spin(&m2, &p1, &p2, &zoo::transposition(2, 0, 1), tol)
        }
        Family::Matrix(n) => {
            let (alg, _) = zoo::matrix_jordan(n)?;
            let ident: Vec<usize> = (0..n).collect();
            let reversed: Vec<usize> = (0..n).rev().collect();
            match (n % 4 == 0, alt) {
                (true, false) => build_kit_case1(&alg, &matrix_case1_frame(n, &ident), tol),
                (true, true) => build_kit_case2(&alg, &matrix_case2_frame(n, &reversed), tol),
                (false, false) => build_kit_case2(&alg, &matrix_case2_frame(n, &ident), tol),
                (false, true) => build_kit_case2(&alg, &matrix_case2_frame(n, &reversed), tol),
            }
        }
        Family::Spin(k) => {
            let v = zoo::spin_factor(k)?;
            let f = if alt { spin_frame(k, 2, 1) } else { spin_frame(k, 1, 2) };
            build_kit_spin(&v, &f.projections[0], &f.projections[1], &f.exchanges[0].symmetry, tol)
        }
        Family::Albert => {
            let (a, _) = zoo::albert_algebra()?;
            build_kit_case2(&a, &albert_case2_frame(if alt { [1, 2, 0] } else { [0, 1, 2] }), tol)
        }
        Family::Scalar => Err(KitError::FrameInvalid("one-dimensional summand admits no kit".into())),
        Family::Custom => Err(KitError::FrameInvalid("no frame known for this summand".into())),
    }
}

/// Kit assembled summand by summand.
pub fn build_kit_variant(alg: &JordanAlgebra, variant: Variant, tol: &Tolerance) -> Result<ElementaryKit, KitError> {
    let kits = alg
        .summands()
        .iter()
        .map(|s| family_kit(&s.family, variant, tol))
        .collect::<Result<Vec<_>, _>>()?;
    if kits.len() == 1 {
        let mut k = kits.into_iter().next().expect("one kit");
        k.algebra = alg.name().to_string();
        return Ok(k);
    }
    let parts: Vec<_> = kits.iter().zip(alg.summands()).map(|(k, s)| (k, s.range())).collect();
    glue_kits(alg.name(), &parts)
}

pub fn build_kit(alg: &JordanAlgebra, tol: &Tolerance) -> Result<ElementaryKit, KitError> {
    build_kit_variant(alg, Variant::Primary, tol)
}

/// Worst `‖E_i(u^j) − δ_ij·1‖∞` over available `i, j`.
pub fn kronecker_residuals(alg: &JordanAlgebra, kit: &ElementaryKit) -> Vec<Vec<f64>> {
    let ops = kit.ops();
    let powers: Vec<CVector> = (0..ops.len()).map(|j| alg.power(&kit.u, j)).collect();
    ops.iter()
        .enumerate()
        .map(|(i, e)| {
            powers
                .iter()
                .enumerate()
                .map(|(j, p)| {
                    let want = if i == j { alg.unit().clone() } else { alg.zero() };
                    max_abs((*e * p - want).iter())
                })
                .collect()
        })
        .collect()
}

/// Residual table, norm estimates, star compatibility and central linearity.
pub fn verify_kit(alg: &JordanAlgebra, kit: &ElementaryKit, tol: &Tolerance, seed: u64) -> Vec<Record> {
    let name = alg.name();
    let eps = tol.abs_eps;
    let mut out = Vec::new();
    if kit.u.len() != alg.dim() {
        out.push(Record::boolean("kit_dimension", name, seed, false, "kit does not match the algebra"));
        return out;
    }
    for (i, row) in kronecker_residuals(alg, kit).iter().enumerate() {
        for (j, r) in row.iter().enumerate() {
            out.push(Record::new(&format!("kronecker_e{i}_u{j}"), name, seed, *r, eps, format!("E{i}(u^{j})")));
        }
    }
    let s = alg.star_matrix();
    let centers = alg.center();
    let mut rng = rng_from_seed(derive_seed(seed, 0x6b17));
    let samples: Vec<(CVector, CVector)> = (0..4)
        .map(|_| {
            let coeffs = random_vector(&mut rng, centers.len(), 1.0);
            let z = centers.iter().zip(coeffs.iter()).fold(alg.zero(), |acc, (b, c)| acc + b * *c);
            (z, random_vector(&mut rng, alg.dim(), 1.0))
        })
        .collect();
    for (i, e) in kit.ops().into_iter().enumerate() {
        let norm = operator_norm_estimate(e, tol.norm_trials, derive_seed(seed, i as u64));
        out.push(Record::new(&format!("norm_e{i}"), name, seed, norm, 10.0 + eps, "operator norm estimate, coordinate 2-norm"));
        let star = max_abs((e * s - s * e.map(|z| z.conj())).iter());
        out.push(Record::new(&format!("star_compatible_e{i}"), name, seed, star, eps, "E(x*) = E(x)*"));
        let central = samples
            .iter()
            .map(|(z, x)| max_abs((e * alg.product(z, x) - alg.product(z, &(e * x))).iter()))
            .fold(0.0, f64::max);
        out.push(Record::new(&format!("central_linearity_e{i}"), name, seed, central, eps, "E(z∘x) = z∘E(x)"));
    }
    out
}
